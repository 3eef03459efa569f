mod common;

use std::collections::{BTreeMap, BTreeSet};

use lamina::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use std::sync::OnceLock;

use common::*;

fn angle() -> impl Strategy<Value = Angle> {
    (1i64..=240).prop_flat_map(|q| (0..q).prop_map(move |p| ang(p, q)))
}

fn distinct_angles(max: usize) -> impl Strategy<Value = Vec<Angle>> {
    (2i64..=48).prop_flat_map(move |q| {
        proptest::collection::btree_set(0..q, 1..=max.min(q as usize))
            .prop_map(move |s| s.into_iter().map(|p| ang(p, q)).collect())
    })
}

/// Labels of a random partition of `0..n`.
fn labels(n: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(0..n.max(1), n)
}

fn blocks_of(labels: &[usize]) -> Vec<Vec<usize>> {
    let mut map: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        map.entry(l).or_default().push(i);
    }
    map.into_values().collect()
}

fn partition(ground: &[Angle], labels: &[usize]) -> Partition {
    let blocks: Vec<Vec<Angle>> = blocks_of(labels)
        .into_iter()
        .map(|b| b.into_iter().map(|i| ground[i].clone()).collect())
        .collect();
    Partition::new(ground.to_vec(), &blocks).unwrap()
}

fn as_sets(p: &Partition) -> BTreeSet<BTreeSet<Angle>> {
    p.blocks().into_iter().map(|b| b.into_iter().collect()).collect()
}

/// Join by pairwise closure over the ground set.
fn join_oracle(n: usize, a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut label: Vec<usize> = (0..n).collect();
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if (a[i] == a[j] || b[i] == b[j]) && label[i] != label[j] {
                    let (lo, hi) = (label[i].min(label[j]), label[i].max(label[j]));
                    for l in label.iter_mut() {
                        if *l == hi {
                            *l = lo;
                        }
                    }
                    changed = true;
                }
            }
        }
        if !changed {
            return label;
        }
    }
}

fn chords_of(set: &[Angle]) -> Vec<(BigRational, BigRational)> {
    let r: Vec<BigRational> = set.iter().map(rat).collect();
    (0..r.len())
        .flat_map(|i| (i + 1..r.len()).map(move |j| (i, j)))
        .map(|(i, j)| (r[i].clone(), r[j].clone()))
        .collect()
}

/// Do blocks at positions on a line interleave as `a b a b`?
fn crossing_positions(labels: &[usize]) -> bool {
    let n = labels.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for e in c + 1..n {
                    if labels[a] == labels[c] && labels[b] == labels[e] && labels[a] != labels[b] {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Every partition of `0..m`, as label vectors in restricted growth form.
fn all_partitions(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; m];
    fn rec(i: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for l in 0..=max + 1 {
            cur[i] = l;
            rec(i + 1, max.max(l), cur, out);
        }
    }
    if m == 0 {
        return vec![Vec::new()];
    }
    rec(1, 0, &mut cur, &mut out);
    out
}

/// The coarsest black partition compatible with the white one, by exhaustion.
fn complement_oracle(white: &[usize]) -> Vec<Vec<usize>> {
    let m = white.len();
    let mut best: Option<Vec<usize>> = None;
    for black in all_partitions(m) {
        let mut merged = vec![0usize; 2 * m];
        for i in 0..m {
            merged[2 * i] = white[i];
            merged[2 * i + 1] = m + black[i];
        }
        if crossing_positions(&merged) {
            continue;
        }
        let blocks = black.iter().collect::<BTreeSet<_>>().len();
        if best.as_ref().map_or(true, |b| blocks < b.iter().collect::<BTreeSet<_>>().len()) {
            best = Some(black);
        }
    }
    blocks_of(&best.unwrap())
        .into_iter()
        .map(|b| b.into_iter().map(|i| 2 * i + 1).collect())
        .collect()
}

fn towers() -> &'static Vec<(&'static str, Tower)> {
    static TOWERS: OnceLock<Vec<(&'static str, Tower)>> = OnceLock::new();
    TOWERS.get_or_init(|| {
        reference_pairs()
            .into_iter()
            .map(|(name, pair)| {
                let depth = if pair.degree() == 3 { 7 } else { 5 };
                let mut t = Tower::new(pair).unwrap();
                t.build_to(depth).unwrap();
                (name, t)
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn display_parse_round_trip(a in angle()) {
        let back: Angle = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn reduction_ignores_common_factors(p in -500i64..500, q in 1i64..200, f in 1i64..20) {
        prop_assert_eq!(Angle::new(p * f, q * f).unwrap(), Angle::new(p, q).unwrap());
        prop_assert_eq!(Angle::new(p + q, q).unwrap(), Angle::new(p, q).unwrap());
    }

    #[test]
    fn mu_is_multiplication_mod_one(a in angle(), d in 2u32..6) {
        let x = rat(&a) * BigRational::from_integer(BigInt::from(d));
        prop_assert_eq!(rat(&a.mu(d)), &x - x.floor());
    }

    #[test]
    fn preimages_form_a_fiber(a in angle(), d in 2u32..6) {
        let pre = a.preimages(d);
        prop_assert_eq!(pre.len(), d as usize);
        prop_assert!(pre.windows(2).all(|w| w[0] < w[1]));
        for p in &pre {
            prop_assert_eq!(&p.mu(d), &a);
        }
    }

    #[test]
    fn orbit_decomposition_is_consistent(a in angle(), d in 2u32..6) {
        let orbit = a.orbit(d);
        let pts: Vec<Angle> = orbit.points().cloned().collect();
        prop_assert_eq!(pts.len(), orbit.preperiod_len() + orbit.period());
        prop_assert_eq!(&pts[0], &a);
        prop_assert_eq!(pts.iter().collect::<BTreeSet<_>>().len(), pts.len());
        prop_assert_eq!(pts.last().unwrap().mu(d), pts[orbit.preperiod_len()].clone());
        prop_assert_eq!(a.mu_iter(d, orbit.len()), pts[orbit.preperiod_len()].clone());
    }

    #[test]
    fn cyclic_order_trichotomy(v in distinct_angles(3).prop_filter("three", |v| v.len() == 3)) {
        let (a, b, c) = (&v[0], &v[1], &v[2]);
        let abc = cyclic_between(a, b, c).unwrap();
        prop_assert_ne!(abc, cyclic_between(a, c, b).unwrap());
        prop_assert_eq!(abc, cyclic_between(b, c, a).unwrap());
        prop_assert_eq!(abc, cyclic_between(c, a, b).unwrap());
    }

    #[test]
    fn set_crossing_matches_chords(v in distinct_angles(8), split in any::<u64>()) {
        prop_assume!(v.len() >= 2);
        let side = |i: usize| split >> (i % 64) & 1 == 1;
        let a: Vec<Angle> = v.iter().enumerate().filter(|&(i, _)| side(i)).map(|(_, x)| x.clone()).collect();
        let b: Vec<Angle> = v.iter().enumerate().filter(|&(i, _)| !side(i)).map(|(_, x)| x.clone()).collect();
        prop_assume!(!a.is_empty() && !b.is_empty());
        let brute = chords_of(&a).iter().any(|(x, y)| chords_of(&b).iter().any(|(u, w)| chords_cross(x, y, u, w)));
        prop_assert_eq!(sets_cross(&a, &b).unwrap(), brute);
        prop_assert_eq!(sets_cross(&b, &a).unwrap(), brute);
    }

    #[test]
    fn join_and_meet_match_oracles(
        (ground, a, b) in distinct_angles(24).prop_flat_map(|g| {
            let n = g.len();
            (Just(g), labels(n), labels(n))
        })
    ) {
        let n = ground.len();
        let p = partition(&ground, &a);
        let q = partition(&ground, &b);
        let joined = partition(&ground, &join_oracle(n, &a, &b));
        prop_assert_eq!(as_sets(&join(&p, &q).unwrap()), as_sets(&joined));
        let pairs: Vec<usize> = (0..n).map(|i| a[i] * n + b[i]).collect();
        let met = partition(&ground, &pairs);
        prop_assert_eq!(as_sets(&meet(&p, &q).unwrap()), as_sets(&met));
        let trivial = Partition::trivial(ground.clone());
        prop_assert_eq!(as_sets(&join(&p, &trivial).unwrap()), as_sets(&p));
        prop_assert_eq!(as_sets(&meet(&p, &trivial).unwrap()), as_sets(&trivial));
    }

    #[test]
    fn kreweras_complement_is_the_coarsest_compatible_partition(white in (1usize..=6).prop_flat_map(labels)) {
        prop_assume!(!crossing_positions(&white));
        let white_blocks: Vec<Vec<usize>> =
            blocks_of(&white).into_iter().map(|b| b.into_iter().map(|i| 2 * i).collect()).collect();
        let mut expected = complement_oracle(&white);
        expected.sort();
        let got = CncPartition::complement_of(&white_blocks);
        prop_assert_eq!(&got, &expected);
        prop_assert!(CncPartition::new(white_blocks, got).is_valid());
    }

    #[test]
    fn noncrossing_labels_match_brute_force(l in (0usize..=10).prop_flat_map(labels)) {
        prop_assert_eq!(lamina::relations::is_noncrossing_labels(&l), !crossing_positions(&l));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boundary_bounds_hold_for_random_angles(which in 0usize..3, s in angle(), white in any::<bool>()) {
        let (name, tower) = &towers()[which];
        let color = if white { Color::White } else { Color::Black };
        let k = tower.k();
        let d = tower.degree() as usize;
        let m = tower.depth();
        let chains = gap_itinerary(&s, tower, color, m).unwrap();
        prop_assert!(!chains.is_empty() && chains.len() <= 2);
        let on_some_level = (0..=m).any(|n| tower.level_angles(n).index_of(&s).is_some());
        prop_assert_eq!(chains.len() == 2, on_some_level, "{}", name);
        for it in &chains {
            prop_assert_eq!(it.chain.len(), m);
            let b = big_g_class(it, tower);
            if b.exact {
                prop_assert!(b.points.len() <= k);
            }
        }
        let class = approx_class(&s, tower, color, m).unwrap();
        prop_assert!(class.points.contains(&s));
        prop_assert!(class.points.len() <= (k - 1) << (d - 1));
    }

    #[test]
    fn embeddings_preserve_values(which in 0usize..3, n in 0usize..5, seed in any::<u64>()) {
        let (_, tower) = &towers()[which];
        let lo = tower.level_angles(n);
        let i = (seed % lo.len() as u64) as usize;
        let to = tower.depth();
        prop_assert_eq!(tower.level_angles(to).angle(tower.embed_to(n, to, i)), lo.angle(i));
        if n >= 1 {
            let d = tower.degree();
            prop_assert_eq!(tower.level_angles(n - 1).angle(tower.mu_index(n, i)), lo.angle(i).mu(d));
        }
    }

    #[test]
    fn classes_never_cross(which in 0usize..3, n in 1usize..5, white in any::<bool>(), seed in any::<u64>()) {
        let (_, tower) = &towers()[which];
        let color = if white { Color::White } else { Color::Black };
        let rel = tower.relation(color, n);
        let lv = tower.level_angles(n);
        let classes: Vec<Vec<Angle>> = rel
            .nontrivial_classes()
            .map(|c| c.iter().map(|&i| lv.angle(i as usize)).collect())
            .collect();
        let a = (seed % classes.len() as u64) as usize;
        for (b, other) in classes.iter().enumerate() {
            if b != a {
                prop_assert!(!sets_cross(&classes[a], other).unwrap());
            }
        }
    }
}
