//! The combinatorial curve at level n: the n-arcs in circle order tagged
//! with their type, endpoint vertices and containing gaps, together with the
//! semiconjugacy and measure checks.

use std::collections::{BTreeMap, HashSet};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::lamination::{GapSet, Tower};
use crate::portrait::{Color, ZeroData};
use crate::relations::IndexPartition;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CircuitArc {
    pub index: usize,
    pub arc_type: usize,
    pub start_vertex: u32,
    pub end_vertex: u32,
    pub white_gap: u32,
    pub black_gap: u32,
}

/// Two boundary arcs of one white gap that follow each other around it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SucceedingPair {
    pub white_gap: u32,
    pub first: u32,
    pub second: u32,
    pub vertex: u32,
}

#[derive(Clone, Debug)]
pub struct Circuit {
    pub level: usize,
    pub k: usize,
    pub arcs: Vec<CircuitArc>,
    pub succeeding: Vec<SucceedingPair>,
    pub vertices: IndexPartition,
}

pub fn circuit(tower: &Tower, n: usize) -> Circuit {
    let k = tower.k();
    let vertices = tower.vertex_classes(n);
    let wg = tower.gaps(Color::White, n);
    let bg = tower.gaps(Color::Black, n);
    let len = vertices.len();
    let arcs = (0..len)
        .map(|i| CircuitArc {
            index: i,
            arc_type: i % k,
            start_vertex: vertices.block_of(i) as u32,
            end_vertex: vertices.block_of((i + 1) % len) as u32,
            white_gap: wg.gap_of_arc(i) as u32,
            black_gap: bg.gap_of_arc(i) as u32,
        })
        .collect();
    let mut succeeding = Vec::with_capacity(len);
    for g in 0..wg.len() {
        let a = wg.arcs(g);
        for j in 0..a.len() {
            let first = a[j];
            let second = a[(j + 1) % a.len()];
            succeeding.push(SucceedingPair {
                white_gap: g as u32,
                first,
                second,
                vertex: vertices.block_of((first as usize + 1) % len) as u32,
            });
        }
    }
    Circuit {
        level: n,
        k,
        arcs,
        succeeding,
        vertices,
    }
}

impl Circuit {
    /// Violations of the circuit invariants.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let len = self.arcs.len();
        for i in 0..len {
            if self.arcs[i].end_vertex != self.arcs[(i + 1) % len].start_vertex {
                out.push(format!("arcs {i} and {} do not meet", (i + 1) % len));
            }
        }
        let mut per_type = vec![0usize; self.k];
        for a in &self.arcs {
            per_type[a.arc_type] += 1;
        }
        let expect = len / self.k;
        for (j, &c) in per_type.iter().enumerate() {
            if c != expect {
                out.push(format!("type {j} has {c} arcs, expected {expect}"));
            }
        }
        let mut edges = HashSet::new();
        for a in &self.arcs {
            if !edges.insert((a.white_gap, a.arc_type)) {
                out.push(format!("white gap {} has two arcs of type {}", a.white_gap, a.arc_type));
            }
        }
        for p in &self.succeeding {
            let v = self.vertices.block_of(self.arcs[p.second as usize].index) as u32;
            if v != p.vertex {
                out.push(format!("arcs {} and {} of white gap {} do not share a vertex", p.first, p.second, p.white_gap));
            }
        }
        out
    }

    /// One line per arc: `idx [start,end] type=j wgap=a bgap=b vstart=c vend=e`.
    pub fn dump(&self, tower: &Tower) -> String {
        let lv = tower.level_angles(self.level);
        let len = self.arcs.len();
        let mut out = String::new();
        for a in &self.arcs {
            out.push_str(&format!(
                "{} [{},{}] type={} wgap={} bgap={} vstart={} vend={}\n",
                a.index,
                lv.angle(a.index),
                lv.angle((a.index + 1) % len),
                a.arc_type,
                a.white_gap,
                a.black_gap,
                a.start_vertex,
                a.end_vertex
            ));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemiconjugacyReport {
    pub arcs_ok: bool,
    pub vertices_ok: bool,
    pub witness: Option<String>,
}

impl SemiconjugacyReport {
    pub fn passed(&self) -> bool {
        self.arcs_ok && self.vertices_ok
    }
}

/// `μ` maps (n+1)-arcs onto n-arcs of the same type and respects vertices.
pub fn check_semiconjugacy(tower: &Tower, n: usize) -> SemiconjugacyReport {
    let d = tower.degree();
    let k = tower.k();
    let hi = tower.level_angles(n + 1);
    let lo = tower.level_angles(n);
    let mut report = SemiconjugacyReport {
        arcs_ok: true,
        vertices_ok: true,
        witness: None,
    };
    let hi_angles = hi.angles();
    let lo_angles = lo.angles();
    for g in 0..hi.len() {
        let image = lo_angles
            .binary_search(&hi_angles[g].mu(d))
            .ok();
        let image_end = lo_angles
            .binary_search(&hi_angles[(g + 1) % hi.len()].mu(d))
            .ok();
        let ok = match (image, image_end) {
            (Some(s), Some(e)) => {
                e == (s + 1) % lo.len()
                    && s % k == g % k
                    && hi.arc_numerator(g) == lo.arc_numerator(s)
            }
            _ => false,
        };
        if !ok {
            report.arcs_ok = false;
            report.witness = Some(format!(
                "arc [{},{}] does not map onto a level-{n} arc of type {}",
                hi_angles[g],
                hi_angles[(g + 1) % hi.len()],
                g % k
            ));
            return report;
        }
    }
    let vhi = tower.vertex_classes(n + 1);
    let vlo = tower.vertex_classes(n);
    for b in vhi.blocks() {
        let target = vlo.block_of(lo_angles.binary_search(&hi_angles[b[0] as usize].mu(d)).unwrap_or(0));
        for &x in &b[1..] {
            let img = lo_angles.binary_search(&hi_angles[x as usize].mu(d)).unwrap_or(0);
            if vlo.block_of(img) != target {
                report.vertices_ok = false;
                report.witness = Some(format!(
                    "{} and {} share a level-{} vertex but their images do not",
                    hi_angles[b[0] as usize],
                    hi_angles[x as usize],
                    n + 1
                ));
                return report;
            }
        }
    }
    report
}

/// Boundary length of gap `g` at level `n`: `Σ len₀(type)/dⁿ` over its arcs.
pub fn gap_boundary_measure(gaps: &GapSet, g: usize, zero: &ZeroData, d: u32) -> BigRational {
    let scale = BigRational::from_integer(BigInt::from(d).pow(gaps.level() as u32));
    let k = zero.k();
    gaps.arcs(g)
        .iter()
        .map(|&a| zero.arc_length(a as usize % k).clone())
        .fold(BigRational::zero(), |acc, x| acc + x)
        / scale
}

/// Boundary length of gap `g` summed from the actual arc endpoints.
pub fn gap_boundary_length(tower: &Tower, color: Color, n: usize, g: usize) -> BigRational {
    let lv = tower.level_angles(n);
    let total: BigUint = tower
        .gaps(color, n)
        .arcs(g)
        .iter()
        .map(|&a| lv.arc_numerator(a as usize))
        .sum();
    BigRational::new(BigInt::from(total), BigInt::from(lv.denominator().clone()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberCount {
    pub image_vertex: usize,
    pub image_size: usize,
    pub preimage_classes: usize,
    pub size_sum: usize,
}

#[derive(Clone, Debug)]
pub struct MeasureReport {
    pub level: usize,
    pub white: Vec<BigRational>,
    pub black: Vec<BigRational>,
    /// Per level-(n−1) vertex, the level-n vertices mapping into it.
    pub fibers: Vec<FiberCount>,
    pub problems: Vec<String>,
}

impl MeasureReport {
    pub fn ok(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Gap measures and fiber bookkeeping at level `n`.
pub fn entropy_measure_report(tower: &Tower, n: usize) -> MeasureReport {
    let d = tower.degree();
    let expected = BigRational::one() / BigRational::from_integer(BigInt::from(d).pow(n as u32));
    let mut problems = Vec::new();
    let mut per_color = Vec::new();
    for color in Color::BOTH {
        let gaps = tower.gaps(color, n);
        let mut v = Vec::with_capacity(gaps.len());
        let mut total = BigRational::zero();
        for g in 0..gaps.len() {
            let m = gap_boundary_length(tower, color, n, g);
            let t = gap_boundary_measure(gaps, g, &tower.pair().zero, d);
            if m != expected || t != expected {
                problems.push(format!("{color} gap {g} has measure {m} (by type {t}), expected {expected}"));
            }
            total += &m;
            v.push(m);
        }
        if !total.is_one() {
            problems.push(format!("{color} gap measures sum to {total}"));
        }
        per_color.push(v);
    }
    let mut fibers = Vec::new();
    if n >= 1 {
        let hi = tower.vertex_classes(n);
        let lo = tower.vertex_classes(n - 1);
        let len_lo = lo.len();
        let mut agg: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        for b in hi.blocks() {
            let w = lo.block_of(b[0] as usize % len_lo);
            let e = agg.entry(w).or_insert((0, 0));
            e.0 += 1;
            e.1 += b.len();
        }
        for w in 0..lo.block_count() {
            let (count, sum) = agg.get(&w).copied().unwrap_or((0, 0));
            let size = lo.block(w).len();
            if sum != d as usize * size {
                problems.push(format!("vertex {w} at level {} has preimage size sum {sum}, expected {}", n - 1, d as usize * size));
            }
            fibers.push(FiberCount {
                image_vertex: w,
                image_size: size,
                preimage_classes: count,
                size_sum: sum,
            });
        }
    }
    let black = per_color.pop().expect("two colors");
    let white = per_color.pop().expect("two colors");
    MeasureReport {
        level: n,
        white,
        black,
        fibers,
        problems,
    }
}
