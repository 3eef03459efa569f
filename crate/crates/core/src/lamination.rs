//! The level tower: angle sets `Aⁿ = μ⁻ⁿ(A⁰)`, the white and black
//! relations `∼ₙ` on them, their gaps, and per-class metadata.
//!
//! All combinatorics run on indices into the sorted level sets. Two index
//! identities make this possible:
//!
//! * `Aⁿ⁺¹[i·N + r] = (Aⁿ[r] + i)/d` where `N = |Aⁿ|`, so `μ` acts on
//!   indices as `g ↦ g mod N`;
//! * the n-arc `[Aⁿ[g], Aⁿ[g+1]]` has type `g mod k` at every level.
//!
//! Exact angle values are kept alongside as numerators over a common
//! denominator and are used for lookups, output and independent checks.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::Serialize;

use crate::angle::Angle;
use crate::dsu::DisjointSets;
use crate::error::BuildError;
use crate::portrait::{Color, CriticalPortrait, PortraitPair, Separation, ZeroData};
use crate::relations::IndexPartition;

/// Default cap on the number of angles in one level.
pub const DEFAULT_BUDGET: usize = 10_000_000;

/// Sorted `Aⁿ`, stored as numerators over the common denominator `D₀·dⁿ`.
#[derive(Clone, Debug)]
pub struct LevelAngles {
    level: usize,
    denom: BigUint,
    nums: Vec<BigUint>,
}

/// Where an angle sits relative to a level set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    /// The angle is `Aⁿ[i]`.
    At(usize),
    /// The angle lies strictly inside arc `i`, from `Aⁿ[i]` to `Aⁿ[i+1]`.
    Inside(usize),
}

impl LevelAngles {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn len(&self) -> usize {
        self.nums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nums.is_empty()
    }

    pub fn denominator(&self) -> &BigUint {
        &self.denom
    }

    pub fn numerator(&self, i: usize) -> &BigUint {
        &self.nums[i]
    }

    pub fn angle(&self, i: usize) -> Angle {
        Angle::from_unsigned(self.nums[i].clone(), self.denom.clone())
    }

    pub fn angles(&self) -> Vec<Angle> {
        (0..self.len()).map(|i| self.angle(i)).collect()
    }

    pub fn f64(&self, i: usize) -> f64 {
        self.angle(i).to_f64()
    }

    /// Counterclockwise length of arc `i` as a numerator over `denominator()`.
    pub fn arc_numerator(&self, i: usize) -> BigUint {
        let j = (i + 1) % self.len();
        if self.nums[j] > self.nums[i] {
            &self.nums[j] - &self.nums[i]
        } else {
            &self.nums[j] + &self.denom - &self.nums[i]
        }
    }

    pub fn locate(&self, s: &Angle) -> Location {
        let lhs = |i: usize| &self.nums[i] * s.denominator();
        let rhs = s.numerator() * &self.denom;
        let mut lo = 0usize;
        let mut hi = self.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            if lhs(mid) < rhs {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        if lo < self.len() && lhs(lo) == rhs {
            Location::At(lo)
        } else if lo == 0 {
            Location::Inside(self.len() - 1)
        } else {
            Location::Inside(lo - 1)
        }
    }

    pub fn index_of(&self, s: &Angle) -> Option<usize> {
        match self.locate(s) {
            Location::At(i) => Some(i),
            Location::Inside(_) => None,
        }
    }
}

/// `μ⁻ⁿ(A⁰)` computed directly by repeated preimages; independent of the tower.
pub fn angles_at_level(zero: &ZeroData, d: u32, n: usize) -> Vec<Angle> {
    let mut cur: Vec<Angle> = zero.zero_angles().to_vec();
    for _ in 0..n {
        let mut next: Vec<Angle> = cur.iter().flat_map(|a| a.preimages(d)).collect();
        next.sort();
        cur = next;
    }
    cur
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DynType {
    Julia,
    PeriodicFatou,
    PreperiodicFatou,
}

impl DynType {
    pub fn is_fatou(self) -> bool {
        !matches!(self, DynType::Julia)
    }

    pub fn name(self) -> &'static str {
        match self {
            DynType::Julia => "julia",
            DynType::PeriodicFatou => "periodic-fatou",
            DynType::PreperiodicFatou => "preperiodic-fatou",
        }
    }
}

impl fmt::Display for DynType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Dynamic type of each class of a portrait, in the portrait's class order.
pub fn classify(portrait: &CriticalPortrait) -> Vec<DynType> {
    let d = portrait.degree();
    let classes = portrait.classes();
    let orbit_of_image: Vec<Vec<Angle>> = classes
        .iter()
        .map(|c| c[0].mu(d).orbit(d).points().cloned().collect())
        .collect();
    let hits = |orbit: &[Angle], j: usize| orbit.iter().any(|x| classes[j].binary_search(x).is_ok());
    let periodic: Vec<bool> = (0..classes.len()).map(|i| hits(&orbit_of_image[i], i)).collect();
    (0..classes.len())
        .map(|i| {
            if periodic[i] {
                DynType::PeriodicFatou
            } else if (0..classes.len()).any(|j| periodic[j] && hits(&orbit_of_image[i], j)) {
                DynType::PreperiodicFatou
            } else {
                DynType::Julia
            }
        })
        .collect()
}

/// Type of a trivial level-1 class `{y}`: Fatou iff the orbit of `y` meets a
/// Fatou-type critical class; periodic iff `y` is itself periodic.
fn classify_trivial(y: &Angle, d: u32, portrait: &CriticalPortrait, types: &[DynType]) -> DynType {
    let orbit = y.orbit(d);
    let meets_fatou = orbit.points().any(|x| {
        portrait
            .classes()
            .iter()
            .zip(types)
            .any(|(c, t)| t.is_fatou() && c.binary_search(x).is_ok())
    });
    match (meets_fatou, orbit.preperiod.is_empty()) {
        (false, _) => DynType::Julia,
        (true, true) => DynType::PeriodicFatou,
        (true, false) => DynType::PreperiodicFatou,
    }
}

/// The partition `∼ₙ,color` of `Aⁿ` with class metadata.
#[derive(Clone, Debug)]
pub struct LevelRelation {
    level: usize,
    color: Color,
    class_of: Vec<u32>,
    offsets: Vec<u32>,
    members: Vec<u32>,
    succ: Vec<u32>,
    image_class: Vec<u32>,
    local_degree: Vec<u32>,
    dyn_type: Vec<DynType>,
}

impl LevelRelation {
    /// Build from successor pointers; classes are the closure of `i ~ succ[i]`.
    pub(crate) fn from_successors(level: usize, color: Color, succ: Vec<u32>) -> LevelRelation {
        let n = succ.len();
        let mut dsu = DisjointSets::new(n);
        for (i, &s) in succ.iter().enumerate() {
            dsu.union(i, s as usize);
        }
        let mut rel = LevelRelation::from_labels(level, color, |i| dsu.find(i), n);
        rel.succ = succ;
        rel
    }

    /// Build from explicit classes over `0..n`; unlisted indices are singletons.
    pub fn from_classes(level: usize, color: Color, n: usize, classes: &[Vec<u32>]) -> LevelRelation {
        let mut dsu = DisjointSets::new(n);
        for c in classes {
            for w in c.windows(2) {
                dsu.union(w[0] as usize, w[1] as usize);
            }
        }
        LevelRelation::from_labels(level, color, |i| dsu.find(i), n)
    }

    fn from_labels(level: usize, color: Color, mut label: impl FnMut(usize) -> usize, n: usize) -> LevelRelation {
        // Class ids in order of least member.
        let mut id_of_root = vec![u32::MAX; n];
        let mut class_of = vec![0u32; n];
        let mut count = 0u32;
        for i in 0..n {
            let r = label(i);
            if id_of_root[r] == u32::MAX {
                id_of_root[r] = count;
                count += 1;
            }
            class_of[i] = id_of_root[r];
        }
        let mut offsets = vec![0u32; count as usize + 1];
        for &c in &class_of {
            offsets[c as usize + 1] += 1;
        }
        for c in 0..count as usize {
            offsets[c + 1] += offsets[c];
        }
        let mut fill = offsets.clone();
        let mut members = vec![0u32; n];
        for (i, &c) in class_of.iter().enumerate() {
            members[fill[c as usize] as usize] = i as u32;
            fill[c as usize] += 1;
        }
        let mut rel = LevelRelation {
            level,
            color,
            class_of,
            offsets,
            members,
            succ: Vec::new(),
            image_class: Vec::new(),
            local_degree: vec![1; count as usize],
            dyn_type: vec![DynType::Julia; count as usize],
        };
        rel.succ = (0..n).map(|i| rel.cyclic_successor(i) as u32).collect();
        rel
    }

    /// A copy with the classes of `a` and `b` merged; metadata is reset.
    pub fn merged(&self, a: usize, b: usize) -> LevelRelation {
        let mut classes: Vec<Vec<u32>> = self.classes().map(|c| c.to_vec()).collect();
        classes.push(vec![a as u32, b as u32]);
        LevelRelation::from_classes(self.level, self.color, self.len(), &classes)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn color(&self) -> Color {
        self.color
    }

    /// Number of angles.
    pub fn len(&self) -> usize {
        self.class_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_of.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Sorted member indices of class `c`.
    pub fn class(&self, c: usize) -> &[u32] {
        &self.members[self.offsets[c] as usize..self.offsets[c + 1] as usize]
    }

    pub fn classes(&self) -> impl Iterator<Item = &[u32]> + '_ {
        (0..self.class_count()).map(move |c| self.class(c))
    }

    pub fn class_of(&self, i: usize) -> usize {
        self.class_of[i] as usize
    }

    pub fn class_size(&self, c: usize) -> usize {
        (self.offsets[c + 1] - self.offsets[c]) as usize
    }

    /// Successor pointer produced by the construction.
    pub fn generated_successor(&self, i: usize) -> usize {
        self.succ[i] as usize
    }

    /// Next member of `i`'s class in counterclockwise order.
    pub fn cyclic_successor(&self, i: usize) -> usize {
        let c = self.class(self.class_of(i));
        let p = c.binary_search(&(i as u32)).expect("member of own class");
        c[(p + 1) % c.len()] as usize
    }

    pub fn cyclic_predecessor(&self, i: usize) -> usize {
        let c = self.class(self.class_of(i));
        let p = c.binary_search(&(i as u32)).expect("member of own class");
        c[(p + c.len() - 1) % c.len()] as usize
    }

    /// Class of `μ(class)` one level down; `None` at level 0.
    pub fn image_class(&self, c: usize) -> Option<usize> {
        self.image_class.get(c).map(|&x| x as usize)
    }

    pub fn local_degree(&self, c: usize) -> u32 {
        self.local_degree[c]
    }

    pub fn dyn_type(&self, c: usize) -> DynType {
        self.dyn_type[c]
    }

    /// Number of indices whose generated successor disagrees with class order.
    pub fn successor_mismatches(&self) -> usize {
        (0..self.len())
            .filter(|&i| self.succ[i] as usize != self.cyclic_successor(i))
            .count()
    }

    pub fn nontrivial_classes(&self) -> impl Iterator<Item = &[u32]> + '_ {
        self.classes().filter(|c| c.len() > 1)
    }
}

/// The gaps of one relation. Gap boundary arcs are listed in traversal
/// order starting from the type-0 arc when the gap is well typed.
#[derive(Clone, Debug)]
pub struct GapSet {
    level: usize,
    color: Color,
    k: usize,
    offsets: Vec<u32>,
    arcs: Vec<u32>,
    gap_of_arc: Vec<u32>,
    parent: Vec<u32>,
}

impl GapSet {
    /// Gaps of `rel`: the cycles of `i ↦ pred(i + 1)` on arc indices.
    pub fn of(rel: &LevelRelation, k: usize) -> GapSet {
        let n = rel.len();
        let mut gap_of_arc = vec![u32::MAX; n];
        let mut offsets = vec![0u32];
        let mut arcs = Vec::with_capacity(n);
        let mut cycle = Vec::new();
        for start in 0..n {
            if gap_of_arc[start] != u32::MAX {
                continue;
            }
            let id = (offsets.len() - 1) as u32;
            cycle.clear();
            let mut a = start;
            while gap_of_arc[a] == u32::MAX {
                gap_of_arc[a] = id;
                cycle.push(a as u32);
                a = rel.cyclic_predecessor((a + 1) % n);
            }
            let zero = cycle.iter().position(|&x| (x as usize).is_multiple_of(k)).unwrap_or(0);
            arcs.extend(cycle[zero..].iter().chain(cycle[..zero].iter()));
            offsets.push(arcs.len() as u32);
        }
        GapSet {
            level: rel.level(),
            color: rel.color(),
            k,
            offsets,
            arcs,
            gap_of_arc,
            parent: Vec::new(),
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn color(&self) -> Color {
        self.color
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Boundary arcs of gap `g` in traversal order.
    pub fn arcs(&self, g: usize) -> &[u32] {
        &self.arcs[self.offsets[g] as usize..self.offsets[g + 1] as usize]
    }

    pub fn gap_of_arc(&self, arc: usize) -> usize {
        self.gap_of_arc[arc] as usize
    }

    pub fn parent(&self, g: usize) -> Option<usize> {
        self.parent.get(g).map(|&p| p as usize)
    }

    /// Exactly `k` arcs whose types read `0, 1, …, k−1` in traversal order.
    pub fn well_typed(&self, g: usize) -> bool {
        let a = self.arcs(g);
        a.len() == self.k && a.iter().enumerate().all(|(j, &x)| x as usize % self.k == j)
    }

    /// The arc of type `j` in a well-typed gap.
    pub fn arc_of_type(&self, g: usize, j: usize) -> usize {
        self.arcs(g)[j] as usize
    }

    /// Corner angles of gap `g`: the end point of each boundary arc.
    pub fn corners(&self, g: usize, n_angles: usize) -> impl Iterator<Item = usize> + '_ {
        self.arcs(g).iter().map(move |&a| (a as usize + 1) % n_angles)
    }
}

/// Bipartite incidence graph between gaps and classes.
#[derive(Clone, Debug, Serialize)]
pub struct ConnectionGraph {
    pub gap_nodes: usize,
    pub class_nodes: usize,
    pub edges: Vec<(u32, u32)>,
    pub connected: bool,
    pub is_tree: bool,
}

pub fn connection_graph(rel: &LevelRelation, gaps: &GapSet) -> ConnectionGraph {
    let n = rel.len();
    let mut edges = Vec::new();
    for g in 0..gaps.len() {
        let mut cs: Vec<u32> = gaps.corners(g, n).map(|a| rel.class_of(a) as u32).collect();
        cs.sort_unstable();
        cs.dedup();
        edges.extend(cs.into_iter().map(|c| (g as u32, c)));
    }
    let gap_nodes = gaps.len();
    let class_nodes = rel.class_count();
    let mut dsu = DisjointSets::new(gap_nodes + class_nodes);
    for &(g, c) in &edges {
        dsu.union(g as usize, gap_nodes + c as usize);
    }
    let connected = dsu.set_count() == 1;
    let is_tree = connected && edges.len() + 1 == gap_nodes + class_nodes;
    ConnectionGraph {
        gap_nodes,
        class_nodes,
        edges,
        connected,
        is_tree,
    }
}

/// Result of comparing a class across deeper levels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stabilization {
    /// `[α]ₘ` equals `[α]ₙ₊ₘ₀` for every `m` up to the cap.
    Stable { m0: usize, sizes: Vec<usize> },
    NotStabilizedBy { cap: usize, sizes: Vec<usize> },
}

/// The memoized tower of levels for both colors.
#[derive(Clone, Debug)]
pub struct Tower {
    pair: PortraitPair,
    d: u32,
    k: usize,
    budget: usize,
    levels: Vec<LevelAngles>,
    embed: Vec<Vec<u32>>,
    a1_into: Vec<Vec<u32>>,
    zero_arc: Vec<(u32, u32)>,
    zero_arc_count: Vec<u32>,
    rel: [Vec<LevelRelation>; 2],
    gaps: [Vec<GapSet>; 2],
    level1_types: [Vec<DynType>; 2],
}

fn slot(color: Color) -> usize {
    match color {
        Color::White => 0,
        Color::Black => 1,
    }
}

impl Tower {
    pub fn new(pair: PortraitPair) -> Result<Tower, BuildError> {
        Tower::with_budget(pair, DEFAULT_BUDGET)
    }

    /// Builds levels 0 and 1; deeper levels are built on demand.
    pub fn with_budget(pair: PortraitPair, budget: usize) -> Result<Tower, BuildError> {
        let d = pair.degree();
        let k = pair.k();
        let zero = pair.zero.zero_angles();
        let mut denom = BigUint::one();
        for a in zero {
            denom = denom.lcm(a.denominator());
        }
        let nums: Vec<BigUint> = zero
            .iter()
            .map(|a| a.numerator() * (&denom / a.denominator()))
            .collect();
        let level0 = LevelAngles {
            level: 0,
            denom,
            nums,
        };
        let mut tower = Tower {
            pair,
            d,
            k,
            budget,
            levels: vec![level0],
            embed: Vec::new(),
            a1_into: Vec::new(),
            zero_arc: Vec::new(),
            zero_arc_count: Vec::new(),
            rel: [Vec::new(), Vec::new()],
            gaps: [Vec::new(), Vec::new()],
            level1_types: [Vec::new(), Vec::new()],
        };
        tower.check_budget(1)?;
        tower.push_angle_level();
        tower.init_zero_arcs();
        for color in Color::BOTH {
            let s = slot(color);
            let trivial = LevelRelation::from_classes(0, color, k, &[]);
            let g0 = GapSet::of(&trivial, k);
            tower.rel[s].push(trivial);
            tower.gaps[s].push(g0);
            let rel1 = tower.level_one(color)?;
            tower.rel[s].push(rel1);
            tower.finish_level(color, 1)?;
            tower.finish_level(color, 0)?;
        }
        Ok(tower)
    }

    pub fn pair(&self) -> &PortraitPair {
        &self.pair
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// Deepest built level.
    pub fn depth(&self) -> usize {
        self.rel[0].len() - 1
    }

    pub fn level_size(&self, n: usize) -> u128 {
        self.k as u128 * (self.d as u128).pow(n as u32)
    }

    fn check_budget(&self, n: usize) -> Result<(), BuildError> {
        let need = (self.k as u128).saturating_mul((self.d as u128).saturating_pow(n as u32));
        if need > self.budget as u128 {
            return Err(BuildError::BudgetExceeded {
                level: n,
                angles: need,
                budget: self.budget,
            });
        }
        Ok(())
    }

    /// Largest level that fits the budget.
    pub fn max_level_in_budget(&self) -> usize {
        let mut n = 0;
        while self.check_budget(n + 1).is_ok() && n < 64 {
            n += 1;
        }
        n
    }

    pub fn build_to(&mut self, n: usize) -> Result<(), BuildError> {
        while self.depth() < n {
            let next = self.depth() + 1;
            self.check_budget(next)?;
            while self.levels.len() <= next {
                self.push_angle_level();
            }
            for color in Color::BOTH {
                let rel = self.step(color, next - 1)?;
                self.rel[slot(color)].push(rel);
                self.finish_level(color, next)?;
            }
        }
        Ok(())
    }

    fn require(&self, n: usize) -> Result<(), BuildError> {
        if n > self.depth() {
            return Err(BuildError::NotBuilt {
                requested: n,
                built: self.depth(),
            });
        }
        Ok(())
    }

    pub fn level_angles(&self, n: usize) -> &LevelAngles {
        &self.levels[n]
    }

    pub fn relation(&self, color: Color, n: usize) -> &LevelRelation {
        &self.rel[slot(color)][n]
    }

    pub fn gaps(&self, color: Color, n: usize) -> &GapSet {
        &self.gaps[slot(color)][n]
    }

    /// Index of `Aⁿ[i]` inside `Aⁿ⁺¹`.
    pub fn embed(&self, n: usize, i: usize) -> usize {
        self.embed[n][i] as usize
    }

    /// Index of `Aᶠʳᵒᵐ[i]` inside `Aᵗᵒ`.
    pub fn embed_to(&self, from: usize, to: usize, mut i: usize) -> usize {
        for n in from..to {
            i = self.embed[n][i] as usize;
        }
        i
    }

    /// Index of `μ(Aⁿ[i])` in `Aⁿ⁻¹`.
    pub fn mu_index(&self, n: usize, i: usize) -> usize {
        i % self.levels[n - 1].len()
    }

    /// The level-`n` arc containing level-`(n+1)` arc `g`.
    pub fn parent_arc(&self, n: usize, g: usize) -> usize {
        let e = &self.embed[n];
        let p = e.partition_point(|&x| x as usize <= g);
        if p == 0 {
            e.len() - 1
        } else {
            p - 1
        }
    }

    /// The level-1 type of each level-1 class.
    pub fn level1_types(&self, color: Color) -> &[DynType] {
        &self.level1_types[slot(color)]
    }

    fn push_angle_level(&mut self) {
        let prev = self.levels.last().expect("level 0 exists");
        let n = prev.len();
        let d = self.d as usize;
        let mut nums = Vec::with_capacity(n * d);
        for i in 0..d {
            let shift = &prev.denom * i;
            nums.extend(prev.nums.iter().map(|x| x + &shift));
        }
        let level = LevelAngles {
            level: prev.level + 1,
            denom: &prev.denom * self.d,
            nums,
        };
        let m = self.levels.len() - 1;
        let emb: Vec<u32> = if m == 0 {
            let a0 = &self.levels[0];
            (0..n)
                .map(|j| {
                    let t = &a0.nums[j] * self.d;
                    let (q, r) = t.div_rem(&a0.denom);
                    let r_idx = a0.nums.binary_search(&r).expect("A⁰ is forward invariant");
                    let q = usize::try_from(q).expect("small quotient");
                    (q * n + r_idx) as u32
                })
                .collect()
        } else {
            let below = self.levels[m - 1].len();
            let prev_emb = &self.embed[m - 1];
            (0..n)
                .map(|i| ((i / below) * n + prev_emb[i % below] as usize) as u32)
                .collect()
        };
        self.embed.push(emb);
        self.levels.push(level);
        let a1: Vec<u32> = if self.levels.len() == 2 {
            (0..self.levels[1].len() as u32).collect()
        } else {
            let last = self.a1_into.last().expect("level 1 mapping exists");
            let e = self.embed.last().expect("just pushed");
            last.iter().map(|&x| e[x as usize]).collect()
        };
        if self.levels.len() >= 2 {
            self.a1_into.push(a1);
        }
    }

    /// Index of `A¹[x]` inside `Aⁿ` for `n ≥ 1`.
    pub fn a1_into(&self, n: usize, x: usize) -> usize {
        self.a1_into[n - 1][x] as usize
    }

    /// Index of `A⁰[j]` inside `Aⁿ`.
    pub fn a0_into(&self, n: usize, j: usize) -> usize {
        if n == 0 {
            j
        } else {
            self.a1_into(n, self.embed[0][j] as usize)
        }
    }

    fn init_zero_arcs(&mut self) {
        let n1 = self.levels[1].len();
        let e0: Vec<usize> = self.embed[0].iter().map(|&x| x as usize).collect();
        let k = self.k;
        self.zero_arc_count = (0..k)
            .map(|j| ((e0[(j + 1) % k] + n1 - e0[j]) % n1) as u32)
            .collect();
        self.zero_arc = (0..n1)
            .map(|x| {
                let p = e0.partition_point(|&e| e <= x);
                let j = if p == 0 { k - 1 } else { p - 1 };
                (j as u32, ((x + n1 - e0[j]) % n1) as u32)
            })
            .collect();
    }

    fn level_one(&self, color: Color) -> Result<LevelRelation, BuildError> {
        let a1 = &self.levels[1];
        let mut classes = Vec::new();
        for c in self.pair.portrait(color).classes() {
            let mut idx = Vec::with_capacity(c.len());
            for a in c {
                let i = a1.index_of(a).ok_or_else(|| BuildError::Inconsistent {
                    level: 1,
                    color: color.name(),
                    reason: format!("portrait angle {a} is not a 1-angle"),
                })?;
                idx.push(i as u32);
            }
            idx.sort_unstable();
            classes.push(idx);
        }
        Ok(LevelRelation::from_classes(1, color, a1.len(), &classes))
    }

    /// Pull ∼₁ back into every n-gap to generate `∼ₙ₊₁`.
    fn step(&self, color: Color, n: usize) -> Result<LevelRelation, BuildError> {
        let s = slot(color);
        let gaps = &self.gaps[s][n];
        let base = &self.rel[s][1];
        let emb = &self.embed[n];
        let len_n = self.levels[n].len();
        let len_next = self.levels[n + 1].len();
        let k = self.k;
        let inconsistent = |reason: String| BuildError::Inconsistent {
            level: n + 1,
            color: color.name(),
            reason,
        };
        let mut succ = vec![u32::MAX; len_next];
        for g in 0..gaps.len() {
            if !gaps.well_typed(g) {
                return Err(inconsistent(format!("level-{n} gap {g} is not well typed")));
            }
            let arcs = gaps.arcs(g);
            let start = |j: usize| emb[arcs[j] as usize] as usize;
            let end = |j: usize| emb[(arcs[j] as usize + 1) % len_n] as usize;
            for x in 0..self.zero_arc.len() {
                let (j, t) = self.zero_arc[x];
                let src = (start(j as usize) + t as usize) % len_next;
                let y = base.succ[x] as usize;
                let (j2, t2) = self.zero_arc[y];
                let tgt = if t2 == 0 {
                    end((j2 as usize + k - 1) % k)
                } else {
                    (start(j2 as usize) + t2 as usize) % len_next
                };
                if succ[src] != u32::MAX {
                    return Err(inconsistent(format!("angle index {src} is generated twice")));
                }
                succ[src] = tgt as u32;
            }
        }
        if let Some(i) = succ.iter().position(|&x| x == u32::MAX) {
            return Err(inconsistent(format!("angle index {i} lies in no gap")));
        }
        Ok(LevelRelation::from_successors(n + 1, color, succ))
    }

    /// Gaps, parents and class metadata for a freshly pushed level.
    fn finish_level(&mut self, color: Color, n: usize) -> Result<(), BuildError> {
        let s = slot(color);
        if n >= 1 {
            let mut gaps = GapSet::of(&self.rel[s][n], self.k);
            gaps.parent = (0..gaps.len())
                .map(|g| {
                    let a = gaps.arcs(g)[0] as usize;
                    self.gaps[s][n - 1].gap_of_arc(self.parent_arc(n - 1, a)) as u32
                })
                .collect();
            if self.gaps[s].len() > n {
                self.gaps[s][n] = gaps;
            } else {
                self.gaps[s].push(gaps);
            }
        }
        if n == 1 {
            let portrait = self.pair.portrait(color).clone();
            let crit_types = classify(&portrait);
            let rel = &self.rel[s][1];
            let a1 = &self.levels[1];
            let types: Vec<DynType> = (0..rel.class_count())
                .map(|c| {
                    let first = a1.angle(rel.class(c)[0] as usize);
                    match portrait.classes().iter().position(|pc| pc[0] == first) {
                        Some(i) if rel.class_size(c) > 1 => crit_types[i],
                        _ => classify_trivial(&first, self.d, &portrait, &crit_types),
                    }
                })
                .collect();
            self.level1_types[s] = types;
        }
        let critical: Vec<(usize, u32)> = self.rel[s][1]
            .nontrivial_classes()
            .map(|c| (c[0] as usize, c.len() as u32))
            .collect();
        let types1 = self.level1_types[s].clone();
        let (image_class, local_degree, dyn_type) = {
            let rel = &self.rel[s][n];
            let cc = rel.class_count();
            let mut local_degree = vec![1u32; cc];
            let mut dyn_type = vec![DynType::Julia; cc];
            let mut image_class = Vec::new();
            if n >= 1 {
                for &(x, size) in &critical {
                    let c = rel.class_of(self.a1_into(n, x));
                    local_degree[c] = local_degree[c].max(size);
                }
                let below = &self.rel[s][n - 1];
                let len_below = below.len();
                image_class = (0..cc)
                    .map(|c| below.class_of(rel.class(c)[0] as usize % len_below) as u32)
                    .collect();
                for c in 0..cc {
                    dyn_type[c] = if n == 1 {
                        types1[c]
                    } else {
                        below.dyn_type[image_class[c] as usize]
                    };
                }
            } else if !types1.is_empty() {
                let rel1 = &self.rel[s][1];
                for (c, t) in dyn_type.iter_mut().enumerate() {
                    *t = types1[rel1.class_of(self.embed[0][c] as usize)];
                }
            }
            (image_class, local_degree, dyn_type)
        };
        let rel = &mut self.rel[s][n];
        rel.image_class = image_class;
        rel.local_degree = local_degree;
        rel.dyn_type = dyn_type;
        Ok(())
    }

    /// Replace one relation by a forged one, discarding deeper levels.
    /// Used to plant defects when testing the checkers.
    pub fn replace_relation(&mut self, color: Color, n: usize, mut rel: LevelRelation) -> Result<(), BuildError> {
        self.require(n)?;
        rel.level = n;
        rel.color = color;
        for c in Color::BOTH {
            self.rel[slot(c)].truncate(n + 1);
            self.gaps[slot(c)].truncate(n + 1);
        }
        self.rel[slot(color)][n] = rel;
        self.finish_level(color, n)
    }

    /// `∼ₙ,w ∨ ∼ₙ,b` on indices of `Aⁿ`.
    pub fn vertex_classes(&self, n: usize) -> IndexPartition {
        let w = self.relation(Color::White, n);
        let b = self.relation(Color::Black, n);
        let mut dsu = DisjointSets::new(w.len());
        for rel in [w, b] {
            for c in rel.nontrivial_classes() {
                for x in &c[1..] {
                    dsu.union(c[0] as usize, *x as usize);
                }
            }
        }
        IndexPartition::from_labels(w.len(), |i| dsu.find(i))
    }

    /// `#[α]` predicted as the product of local degrees along the image chain.
    pub fn predicted_size(&self, color: Color, n: usize, class: usize) -> u128 {
        let mut c = class;
        let mut prod = 1u128;
        for m in (1..=n).rev() {
            let rel = self.relation(color, m);
            prod *= rel.local_degree(c) as u128;
            c = rel.image_class(c).expect("level ≥ 1 has images");
        }
        prod
    }

    /// For each level `m ≥ 1` up to the depth, which zero-level point (if any)
    /// each class contains.
    fn zero_labels(&self, color: Color, m: usize) -> Vec<u32> {
        let rel = self.relation(color, m);
        let mut label = vec![u32::MAX; rel.class_count()];
        for j in 0..self.k {
            label[rel.class_of(self.a0_into(m, j))] = j as u32;
        }
        label
    }

    /// Gaps at level `m` whose corners meet two distinct zero-level classes.
    pub fn mixing_gaps(&self, color: Color, m: usize) -> Vec<usize> {
        let rel = self.relation(color, m);
        let gaps = self.gaps(color, m);
        let label = self.zero_labels(color, m);
        (0..gaps.len())
            .filter(|&g| {
                let mut seen = u32::MAX;
                for a in gaps.corners(g, rel.len()) {
                    let l = label[rel.class_of(a)];
                    if l != u32::MAX {
                        if seen != u32::MAX && seen != l {
                            return true;
                        }
                        seen = l;
                    }
                }
                false
            })
            .collect()
    }

    /// Least `n₀ ≤ cap` from which no gap of either color mixes zero-level
    /// classes, checked through `cap`. The cap is lowered to fit the budget.
    pub fn separation(&mut self, cap: usize) -> Result<Separation, BuildError> {
        let cap = cap.min(self.max_level_in_budget()).max(1);
        self.build_to(cap)?;
        let mut depth = None;
        for m in (1..=cap).rev() {
            let clean = Color::BOTH.iter().all(|&c| self.mixing_gaps(c, m).is_empty());
            if !clean {
                break;
            }
            depth = Some(m);
        }
        Ok(match depth {
            Some(depth) => Separation::Certified { depth, cap },
            None => Separation::Inconclusive { cap },
        })
    }

    /// How many levels past `n` the class of `Aⁿ[rep]` keeps changing.
    pub fn stabilization(&mut self, color: Color, n: usize, rep: usize, cap: usize) -> Result<Stabilization, BuildError> {
        self.build_to(cap)?;
        let mut sets = Vec::new();
        let mut sizes = Vec::new();
        for m in n..=cap {
            let rel = self.relation(color, m);
            let i = self.embed_to(n, m, rep);
            let class = rel.class(rel.class_of(i));
            sizes.push(class.len());
            let mut lifted: Vec<usize> = class.iter().map(|&x| self.embed_to(m, cap, x as usize)).collect();
            lifted.sort_unstable();
            sets.push(lifted);
        }
        let c = self.relation(color, n).class_of(rep);
        if self.relation(color, n).dyn_type(c).is_fatou() {
            return Ok(Stabilization::NotStabilizedBy { cap, sizes });
        }
        let last = sets.last().expect("non-empty");
        let m0 = sets.iter().position(|s| s == last).expect("last matches itself");
        Ok(Stabilization::Stable { m0, sizes })
    }

    /// Level dump: one line per class, `n color id type: p/q …`.
    pub fn dump_level(&self, color: Color, n: usize) -> String {
        let rel = self.relation(color, n);
        let lv = self.level_angles(n);
        let mut out = String::new();
        for c in 0..rel.class_count() {
            let angles: Vec<String> = rel.class(c).iter().map(|&i| lv.angle(i as usize).to_string()).collect();
            out.push_str(&format!("{n} {color} {c} {}: {}\n", rel.dyn_type(c), angles.join(" ")));
        }
        out
    }
}
