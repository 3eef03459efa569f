//! Partitions of finite angle sets: the lattice operations, the level join
//! `∼ₙ = ∼ₙ,w ∨ ∼ₙ,b`, complementary non-crossing partitions at vertices,
//! and the restriction check between consecutive levels.

use std::collections::HashMap;

use serde::Serialize;

use crate::angle::Angle;
use crate::dsu::DisjointSets;
use crate::error::PartitionError;
use crate::lamination::{LevelRelation, Tower};
use crate::portrait::Color;

/// A partition of `0..n` with blocks ordered by least member.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexPartition {
    block_of: Vec<u32>,
    offsets: Vec<u32>,
    members: Vec<u32>,
}

impl IndexPartition {
    pub fn from_labels(n: usize, mut label: impl FnMut(usize) -> usize) -> IndexPartition {
        let mut id: HashMap<usize, u32> = HashMap::new();
        let mut block_of = Vec::with_capacity(n);
        for i in 0..n {
            let next = id.len() as u32;
            block_of.push(*id.entry(label(i)).or_insert(next));
        }
        let count = id.len();
        let mut offsets = vec![0u32; count + 1];
        for &b in &block_of {
            offsets[b as usize + 1] += 1;
        }
        for b in 0..count {
            offsets[b + 1] += offsets[b];
        }
        let mut fill = offsets.clone();
        let mut members = vec![0u32; n];
        for (i, &b) in block_of.iter().enumerate() {
            members[fill[b as usize] as usize] = i as u32;
            fill[b as usize] += 1;
        }
        IndexPartition {
            block_of,
            offsets,
            members,
        }
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<IndexPartition, PartitionError> {
        let mut label = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            for &i in block {
                if i >= n || label[i] != usize::MAX {
                    return Err(PartitionError::NotAPartition(format!("index {i} repeated or out of range")));
                }
                label[i] = b;
            }
        }
        if let Some(i) = label.iter().position(|&l| l == usize::MAX) {
            return Err(PartitionError::NotAPartition(format!("index {i} is uncovered")));
        }
        Ok(IndexPartition::from_labels(n, |i| label[i]))
    }

    pub fn trivial(n: usize) -> IndexPartition {
        IndexPartition::from_labels(n, |i| i)
    }

    pub fn len(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_of.is_empty()
    }

    pub fn block_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn block(&self, b: usize) -> &[u32] {
        &self.members[self.offsets[b] as usize..self.offsets[b + 1] as usize]
    }

    pub fn blocks(&self) -> impl Iterator<Item = &[u32]> + '_ {
        (0..self.block_count()).map(move |b| self.block(b))
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.block_of[i] as usize
    }

    pub fn join(&self, other: &IndexPartition) -> Result<IndexPartition, PartitionError> {
        if self.len() != other.len() {
            return Err(PartitionError::GroundMismatch);
        }
        let mut dsu = DisjointSets::new(self.len());
        for p in [self, other] {
            for b in p.blocks() {
                for x in &b[1..] {
                    dsu.union(b[0] as usize, *x as usize);
                }
            }
        }
        Ok(IndexPartition::from_labels(self.len(), |i| dsu.find(i)))
    }

    pub fn meet(&self, other: &IndexPartition) -> Result<IndexPartition, PartitionError> {
        if self.len() != other.len() {
            return Err(PartitionError::GroundMismatch);
        }
        let n = other.len();
        Ok(IndexPartition::from_labels(self.len(), |i| {
            self.block_of(i) * n + other.block_of(i)
        }))
    }
}

/// A partition of a sorted set of angles.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    ground: Vec<Angle>,
    blocks: IndexPartition,
}

impl Partition {
    /// `blocks` must cover `ground` exactly once.
    pub fn new(mut ground: Vec<Angle>, blocks: &[Vec<Angle>]) -> Result<Partition, PartitionError> {
        ground.sort();
        ground.dedup();
        let mut idx = Vec::with_capacity(blocks.len());
        for b in blocks {
            let mut v = Vec::with_capacity(b.len());
            for a in b {
                let i = ground
                    .binary_search(a)
                    .map_err(|_| PartitionError::NotAPartition(format!("{a} is not in the ground set")))?;
                v.push(i);
            }
            idx.push(v);
        }
        let blocks = IndexPartition::from_blocks(ground.len(), &idx)?;
        Ok(Partition { ground, blocks })
    }

    pub fn from_index(ground: Vec<Angle>, blocks: IndexPartition) -> Partition {
        assert_eq!(ground.len(), blocks.len());
        Partition { ground, blocks }
    }

    pub fn trivial(mut ground: Vec<Angle>) -> Partition {
        ground.sort();
        ground.dedup();
        let blocks = IndexPartition::trivial(ground.len());
        Partition { ground, blocks }
    }

    pub fn ground(&self) -> &[Angle] {
        &self.ground
    }

    pub fn index(&self) -> &IndexPartition {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.block_count()
    }

    pub fn blocks(&self) -> Vec<Vec<Angle>> {
        self.blocks
            .blocks()
            .map(|b| b.iter().map(|&i| self.ground[i as usize].clone()).collect())
            .collect()
    }

    /// The block containing `a`, if `a` is in the ground set.
    pub fn block_containing(&self, a: &Angle) -> Option<Vec<Angle>> {
        let i = self.ground.binary_search(a).ok()?;
        let b = self.blocks.block(self.blocks.block_of(i));
        Some(b.iter().map(|&j| self.ground[j as usize].clone()).collect())
    }

    /// One line per block: `label id: p/q …`.
    pub fn dump(&self, label: &str) -> String {
        let mut out = String::new();
        for (i, b) in self.blocks().iter().enumerate() {
            let s: Vec<String> = b.iter().map(|a| a.to_string()).collect();
            out.push_str(&format!("{label} {i}: {}\n", s.join(" ")));
        }
        out
    }
}

pub fn join(p: &Partition, q: &Partition) -> Result<Partition, PartitionError> {
    if p.ground != q.ground {
        return Err(PartitionError::GroundMismatch);
    }
    Ok(Partition {
        ground: p.ground.clone(),
        blocks: p.blocks.join(&q.blocks)?,
    })
}

pub fn meet(p: &Partition, q: &Partition) -> Result<Partition, PartitionError> {
    if p.ground != q.ground {
        return Err(PartitionError::GroundMismatch);
    }
    Ok(Partition {
        ground: p.ground.clone(),
        blocks: p.blocks.meet(&q.blocks)?,
    })
}

/// `∼ₙ` on `Aⁿ`; its blocks are the vertices at level `n`.
pub fn level_join(tower: &Tower, n: usize) -> Partition {
    Partition::from_index(tower.level_angles(n).angles(), tower.vertex_classes(n))
}

/// Is a partition of the points `0..len` of a line non-crossing?
/// `labels[p]` is the block of position `p`.
pub fn is_noncrossing_labels(labels: &[usize]) -> bool {
    let mut last = HashMap::new();
    for (p, &l) in labels.iter().enumerate() {
        last.insert(l, p);
    }
    let mut open: Vec<usize> = Vec::new();
    let mut started = std::collections::HashSet::new();
    for (p, &l) in labels.iter().enumerate() {
        if started.insert(l) {
            if last[&l] != p {
                open.push(l);
            }
        } else {
            if open.last() != Some(&l) {
                return false;
            }
            if last[&l] == p {
                open.pop();
            }
        }
    }
    true
}

/// White and black blocks of the `2m` incidences around one vertex.
/// White tiles sit at even positions, black tiles at odd positions, and
/// black position `2i+1` lies between white positions `2i` and `2i+2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CncPartition {
    pub white_blocks: Vec<Vec<usize>>,
    pub black_blocks: Vec<Vec<usize>>,
}

fn canonical(mut blocks: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for b in &mut blocks {
        b.sort_unstable();
    }
    blocks.retain(|b| !b.is_empty());
    blocks.sort();
    blocks
}

impl CncPartition {
    pub fn new(white_blocks: Vec<Vec<usize>>, black_blocks: Vec<Vec<usize>>) -> CncPartition {
        CncPartition {
            white_blocks: canonical(white_blocks),
            black_blocks: canonical(black_blocks),
        }
    }

    /// Number of white incidences.
    pub fn m(&self) -> usize {
        self.white_blocks.iter().map(Vec::len).sum()
    }

    fn labels(&self) -> Option<Vec<usize>> {
        let total = 2 * self.m();
        let mut labels = vec![usize::MAX; total];
        for (b, block) in self.white_blocks.iter().chain(&self.black_blocks).enumerate() {
            for &p in block {
                if p >= total || labels[p] != usize::MAX {
                    return None;
                }
                labels[p] = b;
            }
        }
        labels.iter().all(|&l| l != usize::MAX).then_some(labels)
    }

    /// The largest black partition whose union with the white one is
    /// non-crossing (the Kreweras complement).
    pub fn complement_of(white_blocks: &[Vec<usize>]) -> Vec<Vec<usize>> {
        let m: usize = white_blocks.iter().map(Vec::len).sum();
        let mut next = vec![0usize; m];
        for b in white_blocks {
            let mut idx: Vec<usize> = b.iter().map(|p| p / 2).collect();
            idx.sort_unstable();
            for (t, &i) in idx.iter().enumerate() {
                next[i] = idx[(t + 1) % idx.len()];
            }
        }
        let mut prev = vec![0usize; m];
        for (i, &j) in next.iter().enumerate() {
            prev[j] = i;
        }
        let kappa = |i: usize| prev[(i + 1) % m];
        let mut seen = vec![false; m];
        let mut out = Vec::new();
        for s in 0..m {
            if seen[s] {
                continue;
            }
            let mut block = Vec::new();
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                block.push(2 * i + 1);
                i = kappa(i);
            }
            out.push(block);
        }
        canonical(out)
    }

    /// Problems found; empty means a valid complementary non-crossing pair.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.white_blocks.iter().flatten().any(|p| p % 2 != 0)
            || self.black_blocks.iter().flatten().any(|p| p % 2 != 1)
        {
            out.push("white incidences must be even and black ones odd".to_string());
            return out;
        }
        let Some(labels) = self.labels() else {
            out.push("blocks do not partition the incidences".to_string());
            return out;
        };
        if !is_noncrossing_labels(&labels) {
            out.push("white and black blocks cross".to_string());
        }
        if self.black_blocks != CncPartition::complement_of(&self.white_blocks) {
            out.push("black blocks are not the complement of the white blocks".to_string());
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.problems().is_empty()
    }
}

/// Incidence structure at one vertex class.
#[derive(Clone, Debug, Serialize)]
pub struct VertexCnc {
    /// Vertex angles (level indices) in the counterclockwise order of their white tiles.
    pub order: Vec<u32>,
    pub partition: CncPartition,
    pub problems: Vec<String>,
}

impl VertexCnc {
    pub fn valid(&self) -> bool {
        self.problems.is_empty()
    }

    /// Position of angle `a` in `order`.
    pub fn position(&self, a: u32) -> Option<usize> {
        self.order.iter().position(|&x| x == a)
    }
}

/// Reconstruct the cyclic incidences at a vertex class and check them.
///
/// Around the vertex, counterclockwise, the white tile `W(α)` is followed by
/// the incoming edge of `α`, the black tile `B(α)`, the outgoing edge of
/// `succ_b(α)`, and then `W(pred_w(succ_b(α)))`.
pub fn vertex_cnc(vertex: &[u32], white: &LevelRelation, black: &LevelRelation) -> VertexCnc {
    let m = vertex.len();
    let tau = |a: usize| white.cyclic_predecessor(black.cyclic_successor(a));
    let mut order = Vec::with_capacity(m);
    let mut a = vertex[0] as usize;
    let mut problems = Vec::new();
    for _ in 0..m {
        order.push(a as u32);
        a = tau(a);
        if a == vertex[0] as usize {
            break;
        }
    }
    if order.len() != m || a != vertex[0] as usize {
        problems.push(format!(
            "incidences form {} tile(s) in the first cycle instead of {m}",
            order.len()
        ));
        return VertexCnc {
            order,
            partition: CncPartition::new(Vec::new(), Vec::new()),
            problems,
        };
    }
    let mut wb: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut bb: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, &x) in order.iter().enumerate() {
        wb.entry(white.class_of(x as usize)).or_default().push(2 * i);
        bb.entry(black.class_of(x as usize)).or_default().push(2 * i + 1);
    }
    let partition = CncPartition::new(wb.into_values().collect(), bb.into_values().collect());
    problems.extend(partition.problems());
    VertexCnc {
        order,
        partition,
        problems,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RestrictionReport {
    pub equal: bool,
    /// Two level-n angles related at exactly one of the two levels.
    pub witness: Option<(Color, Angle, Angle)>,
}

/// Does `∼ₙ₊₁` restricted to `Aⁿ` equal `∼ₙ`, for both colors?
pub fn restriction_equal(tower: &Tower, n: usize) -> RestrictionReport {
    let lv = tower.level_angles(n);
    for color in Color::BOTH {
        let lo = tower.relation(color, n);
        let hi = tower.relation(color, n + 1);
        let mut image_of = vec![usize::MAX; lo.class_count()];
        let mut owner: HashMap<usize, usize> = HashMap::new();
        for c in 0..lo.class_count() {
            let members = lo.class(c);
            let first = members[0] as usize;
            let target = hi.class_of(tower.embed(n, first));
            for &x in &members[1..] {
                if hi.class_of(tower.embed(n, x as usize)) != target {
                    return RestrictionReport {
                        equal: false,
                        witness: Some((color, lv.angle(first), lv.angle(x as usize))),
                    };
                }
            }
            image_of[c] = target;
            if let Some(&other) = owner.get(&target) {
                return RestrictionReport {
                    equal: false,
                    witness: Some((color, lv.angle(lo.class(other)[0] as usize), lv.angle(first))),
                };
            }
            owner.insert(target, c);
        }
    }
    RestrictionReport {
        equal: true,
        witness: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cnc_example_from_the_disk() {
        let p = CncPartition::new(vec![vec![0, 2, 6], vec![4]], vec![vec![1], vec![3, 5], vec![7]]);
        assert!(p.is_valid(), "{:?}", p.problems());
        assert_eq!(
            CncPartition::complement_of(&[vec![0, 2, 6], vec![4]]),
            vec![vec![1], vec![3, 5], vec![7]]
        );
    }

    #[test]
    fn crossing_cnc() {
        let white = vec![vec![0, 4], vec![2, 6]];
        let black = CncPartition::complement_of(&white);
        let p = CncPartition::new(white, black);
        assert!(!p.is_valid());
    }

    #[test]
    fn small_lattice_examples() {
        let a = |i: i64| Angle::new(i, 8).unwrap();
        let ground = vec![a(1), a(2), a(3)];
        let p = Partition::new(ground.clone(), &[vec![a(1), a(2)], vec![a(3)]]).unwrap();
        let q = Partition::new(ground.clone(), &[vec![a(2), a(3)], vec![a(1)]]).unwrap();
        let all = Partition::new(ground.clone(), &[ground.clone()]).unwrap();
        assert_eq!(join(&p, &q).unwrap(), all);
        assert_eq!(meet(&all, &p).unwrap(), p);
        assert_eq!(join(&p, &Partition::trivial(ground.clone())).unwrap(), p);
        assert_eq!(meet(&p, &Partition::trivial(ground.clone())).unwrap(), Partition::trivial(ground));
    }

    #[test]
    fn noncrossing_labels() {
        assert!(is_noncrossing_labels(&[0, 1, 1, 0, 2]));
        assert!(!is_noncrossing_labels(&[0, 1, 0, 1]));
    }
}
