//! The invariant suite run over a built tower.

use std::collections::HashSet;

use serde::Serialize;

use crate::angle::{sets_cross, Angle};
use crate::circuit::{check_semiconjugacy, circuit, entropy_measure_report};
use crate::error::BuildError;
use crate::lamination::{connection_graph, LevelRelation, Tower};
use crate::portrait::{cnc_violations, Color};
use crate::relations::restriction_equal;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOptions {
    /// Deepest level for the quadratic pairwise crossing check.
    pub brute_force_max: usize,
    /// Deepest level `n` for which levels `n, n+1` are checked for semiconjugacy.
    pub semiconjugacy_max: usize,
}

impl Default for SuiteOptions {
    fn default() -> SuiteOptions {
        SuiteOptions {
            brute_force_max: 3,
            semiconjugacy_max: usize::MAX,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub check: &'static str,
    pub level: usize,
    pub color: Option<Color>,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelCounts {
    pub level: usize,
    pub color: Color,
    pub angles: usize,
    pub gaps: usize,
    pub classes: usize,
    pub size_sum: usize,
    pub excess_sum: usize,
    pub largest_class: usize,
    pub fatou_classes: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexCounts {
    pub level: usize,
    pub vertices: usize,
    /// Most color classes merged into one vertex by the join.
    pub longest_chain: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantReport {
    pub degree: u32,
    pub k: usize,
    pub depth: usize,
    pub separation_from: Option<usize>,
    pub counts: Vec<LevelCounts>,
    pub vertices: Vec<VertexCounts>,
    pub checks: Vec<CheckResult>,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn failed(&self, check: &str) -> bool {
        self.checks.iter().any(|c| c.check == check && !c.passed)
    }
}

struct Recorder {
    checks: Vec<CheckResult>,
}

impl Recorder {
    fn record(&mut self, check: &'static str, level: usize, color: Option<Color>, problems: Vec<String>) {
        let passed = problems.is_empty();
        let detail = match problems.len() {
            0 => String::new(),
            1 => problems[0].clone(),
            n => format!("{} (and {} more)", problems[0], n - 1),
        };
        self.checks.push(CheckResult {
            check,
            level,
            color,
            passed,
            detail,
        });
    }
}

fn first<T>(it: impl Iterator<Item = T>) -> Vec<T> {
    it.take(1).collect()
}

/// Build the tower to `depth` and run every invariant.
pub fn run_invariants(tower: &mut Tower, depth: usize, opts: &SuiteOptions) -> Result<InvariantReport, BuildError> {
    tower.build_to(depth)?;
    let tower = &*tower;
    let d = tower.degree() as usize;
    let k = tower.k();
    let julia_bound = 1usize << (d - 1);
    let mut rec = Recorder { checks: Vec::new() };
    let mut counts = Vec::new();
    let mut vertices = Vec::new();
    for n in 0..=depth {
        let dn = d.pow(n as u32);
        let lv = tower.level_angles(n);
        for color in Color::BOTH {
            let rel = tower.relation(color, n);
            let gaps = tower.gaps(color, n);
            let sizes: Vec<usize> = rel.classes().map(<[u32]>::len).collect();
            let c = LevelCounts {
                level: n,
                color,
                angles: lv.len(),
                gaps: gaps.len(),
                classes: rel.class_count(),
                size_sum: sizes.iter().sum(),
                excess_sum: sizes.iter().map(|m| m - 1).sum(),
                largest_class: sizes.iter().copied().max().unwrap_or(0),
                fatou_classes: (0..rel.class_count()).filter(|&c| rel.dyn_type(c).is_fatou()).count(),
            };
            let mut p = Vec::new();
            if c.angles != k * dn {
                p.push(format!("{} angles, expected {}", c.angles, k * dn));
            }
            if c.gaps != dn {
                p.push(format!("{} gaps, expected {dn}", c.gaps));
            }
            if c.size_sum != k * dn {
                p.push(format!("class sizes sum to {}", c.size_sum));
            }
            if c.excess_sum != dn - 1 {
                p.push(format!("excess sum {}, expected {}", c.excess_sum, dn - 1));
            }
            if c.classes != (k - 1) * dn + 1 {
                p.push(format!("{} classes, expected {}", c.classes, (k - 1) * dn + 1));
            }
            rec.record("counts", n, Some(color), p);
            counts.push(c);

            rec.record(
                "successors",
                n,
                Some(color),
                match rel.successor_mismatches() {
                    0 => vec![],
                    m => vec![format!("{m} generated successors disagree with class order")],
                },
            );
            rec.record("zero-image", n, Some(color), zero_image_problems(tower, rel, n, opts));
            rec.record("non-crossing-sweep", n, Some(color), sweep_problems(rel));
            if n <= opts.brute_force_max {
                rec.record("non-crossing-brute", n, Some(color), brute_crossings(tower, rel, n));
            }
            rec.record(
                "gap-types",
                n,
                Some(color),
                first((0..gaps.len()).filter(|&g| !gaps.well_typed(g)).map(|g| format!("gap {g} is not one arc per type"))),
            );
            let cg = connection_graph(rel, gaps);
            let mut p = Vec::new();
            if !cg.is_tree {
                p.push(format!(
                    "connection graph with {} nodes and {} edges is not a tree",
                    cg.gap_nodes + cg.class_nodes,
                    cg.edges.len()
                ));
            }
            if cg.edges.len() != k * dn {
                p.push(format!("{} incidences, expected {}", cg.edges.len(), k * dn));
            }
            rec.record("connection-tree", n, Some(color), p);
            rec.record(
                "julia-bound",
                n,
                Some(color),
                first(
                    (0..rel.class_count())
                        .filter(|&c| !rel.dyn_type(c).is_fatou() && rel.class_size(c) > julia_bound)
                        .map(|c| format!("julia class {c} has {} members", rel.class_size(c))),
                ),
            );
            if n >= 1 {
                rec.record("gap-parents", n, Some(color), parent_problems(tower, color, n));
                rec.record("class-image", n, Some(color), image_problems(tower, color, n));
                rec.record("gap-image", n, Some(color), gap_image_problems(tower, color, n));
                rec.record("multiplicity", n, Some(color), multiplicity_problems(tower, color, n));
                rec.record(
                    "predicted-size",
                    n,
                    Some(color),
                    first((0..rel.class_count()).filter_map(|c| {
                        let p = tower.predicted_size(color, n, c);
                        (p != rel.class_size(c) as u128).then(|| format!("class {c}: predicted {p}, actual {}", rel.class_size(c)))
                    })),
                );
            }
        }
        let vc = tower.vertex_classes(n);
        let w = tower.relation(Color::White, n);
        let b = tower.relation(Color::Black, n);
        let longest_chain = vc
            .blocks()
            .map(|v| {
                let mut wc = HashSet::new();
                let mut bc = HashSet::new();
                for &x in v {
                    let cw = w.class_of(x as usize);
                    let cb = b.class_of(x as usize);
                    if w.class_size(cw) > 1 {
                        wc.insert(cw);
                    }
                    if b.class_size(cb) > 1 {
                        bc.insert(cb);
                    }
                }
                wc.len() + bc.len()
            })
            .max()
            .unwrap_or(0);
        vertices.push(VertexCounts {
            level: n,
            vertices: vc.block_count(),
            longest_chain,
        });
        rec.record("cnc", n, None, cnc_violations(tower, n));
        let m = entropy_measure_report(tower, n);
        rec.record("measure", n, None, m.problems);
        rec.record("circuit", n, None, circuit(tower, n).problems());
        if n < depth {
            let r = restriction_equal(tower, n);
            rec.record(
                "restriction",
                n,
                None,
                r.witness
                    .map(|(c, x, y)| vec![format!("{c} {x} and {y} differ between levels {n} and {}", n + 1)])
                    .unwrap_or_default(),
            );
            if n <= opts.semiconjugacy_max {
                let s = check_semiconjugacy(tower, n);
                rec.record("semiconjugacy", n, None, s.witness.into_iter().collect());
            }
        }
    }
    let mut separation_from = None;
    for m in (1..=depth).rev() {
        if Color::BOTH.iter().any(|&c| !tower.mixing_gaps(c, m).is_empty()) {
            break;
        }
        separation_from = Some(m);
    }
    Ok(InvariantReport {
        degree: tower.degree(),
        k,
        depth,
        separation_from,
        counts,
        vertices,
        checks: rec.checks,
    })
}

fn zero_image_problems(tower: &Tower, rel: &LevelRelation, n: usize, opts: &SuiteOptions) -> Vec<String> {
    let k = tower.k();
    let mut out = Vec::new();
    for c in rel.nontrivial_classes() {
        if c.iter().any(|&x| x as usize % k != c[0] as usize % k) {
            out.push(format!("class at {} does not map to one zero angle", c[0]));
            return out;
        }
    }
    if n <= opts.brute_force_max {
        let lv = tower.level_angles(n);
        let zero = tower.pair().zero.zero_angles();
        for c in rel.classes() {
            let images: HashSet<Angle> = c.iter().map(|&x| lv.angle(x as usize).mu_iter(tower.degree(), n)).collect();
            if images.len() != 1 || !zero.contains(images.iter().next().expect("non-empty")) {
                out.push(format!("class at {} has images {images:?}", lv.angle(c[0] as usize)));
                return out;
            }
        }
    }
    out
}

/// Circular sweep with a stack: a class opens at its least member, must be on
/// top at each later member, and closes at its greatest member.
pub fn sweep_problems(rel: &LevelRelation) -> Vec<String> {
    let mut stack: Vec<usize> = Vec::new();
    for i in 0..rel.len() {
        let c = rel.class_of(i);
        let members = rel.class(c);
        if members.len() < 2 {
            continue;
        }
        if members[0] as usize == i {
            stack.push(c);
        } else {
            if stack.last() != Some(&c) {
                return vec![format!("class {c} crosses class {:?} at index {i}", stack.last())];
            }
            if *members.last().expect("non-empty") as usize == i {
                stack.pop();
            }
        }
    }
    Vec::new()
}

fn brute_crossings(tower: &Tower, rel: &LevelRelation, n: usize) -> Vec<String> {
    let lv = tower.level_angles(n);
    let classes: Vec<Vec<Angle>> = rel
        .nontrivial_classes()
        .map(|c| c.iter().map(|&x| lv.angle(x as usize)).collect())
        .collect();
    for i in 0..classes.len() {
        for j in i + 1..classes.len() {
            if sets_cross(&classes[i], &classes[j]).unwrap_or(true) {
                return vec![format!("{:?} crosses {:?}", classes[i], classes[j])];
            }
        }
    }
    Vec::new()
}

fn parent_problems(tower: &Tower, color: Color, n: usize) -> Vec<String> {
    let gaps = tower.gaps(color, n);
    let up = tower.gaps(color, n - 1);
    for g in 0..gaps.len() {
        let parent = gaps.parent(g).expect("level ≥ 1");
        for &a in gaps.arcs(g) {
            if up.gap_of_arc(tower.parent_arc(n - 1, a as usize)) != parent {
                return vec![format!("gap {g} is not inside gap {parent}")];
            }
        }
    }
    Vec::new()
}

fn image_problems(tower: &Tower, color: Color, n: usize) -> Vec<String> {
    let rel = tower.relation(color, n);
    let below = tower.relation(color, n - 1);
    let len = below.len();
    for c in 0..rel.class_count() {
        let mut img: Vec<u32> = rel.class(c).iter().map(|&x| x % len as u32).collect();
        img.sort_unstable();
        img.dedup();
        let target = below.class(rel.image_class(c).expect("level ≥ 1"));
        if img != target {
            return vec![format!("image of class {c} is not a level-{} class", n - 1)];
        }
    }
    Vec::new()
}

fn gap_image_problems(tower: &Tower, color: Color, n: usize) -> Vec<String> {
    let gaps = tower.gaps(color, n);
    let below = tower.gaps(color, n - 1);
    let len = tower.level_angles(n - 1).len();
    for g in 0..gaps.len() {
        let mut img: Vec<u32> = gaps.arcs(g).iter().map(|&a| a % len as u32).collect();
        img.sort_unstable();
        let mut target = below.arcs(below.gap_of_arc(img[0] as usize)).to_vec();
        target.sort_unstable();
        if img != target {
            return vec![format!("image of gap {g} is not a level-{} gap boundary", n - 1)];
        }
    }
    Vec::new()
}

fn multiplicity_problems(tower: &Tower, color: Color, n: usize) -> Vec<String> {
    let d = tower.degree() as usize;
    let rel = tower.relation(color, n);
    let below = tower.relation(color, n - 1);
    let mut sum = vec![0usize; below.class_count()];
    for c in 0..rel.class_count() {
        let w = rel.image_class(c).expect("level ≥ 1");
        let m = below.class_size(w);
        if !rel.class_size(c).is_multiple_of(m) {
            return vec![format!("class {c} of size {} over a class of size {m}", rel.class_size(c))];
        }
        sum[w] += rel.class_size(c);
    }
    for (w, &s) in sum.iter().enumerate() {
        if s != d * below.class_size(w) {
            return vec![format!("preimages of class {w} have total size {s}")];
        }
    }
    Vec::new()
}
