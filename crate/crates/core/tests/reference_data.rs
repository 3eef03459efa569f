mod common;

use std::collections::BTreeSet;

use lamina::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use common::*;

fn set(v: &[(i64, i64)]) -> BTreeSet<Angle> {
    v.iter().map(|&(p, q)| ang(p, q)).collect()
}

fn nontrivial(tower: &Tower, color: Color, n: usize) -> BTreeSet<BTreeSet<Angle>> {
    let lv = tower.level_angles(n);
    tower
        .relation(color, n)
        .nontrivial_classes()
        .map(|c| c.iter().map(|&i| lv.angle(i as usize)).collect())
        .collect()
}

/// Forward closure of the portrait angles under `μ`, restricted to images.
fn orbit_closure_oracle(pair: &PortraitPair) -> BTreeSet<BigRational> {
    let d = BigRational::from_integer(BigInt::from(pair.degree()));
    let step = |x: &BigRational| {
        let y = x * &d;
        &y - y.floor()
    };
    let mut out = BTreeSet::new();
    let mut todo: Vec<BigRational> = Color::BOTH
        .iter()
        .flat_map(|&c| pair.portrait(c).angles().map(|a| step(&rat(a))).collect::<Vec<_>>())
        .collect();
    while let Some(x) = todo.pop() {
        if out.insert(x.clone()) {
            todo.push(step(&x));
        }
    }
    out
}

#[test]
fn r4_and_r2_documents_parse_with_three_zero_angles() {
    let r4 = parse_portrait_pair(
        "degree = 3\nwhite = [[\"1/9\", \"4/9\", \"7/9\"]]\nblack = [[\"1/3\", \"2/3\"], [\"1/6\", \"5/6\"]]\n",
    )
    .unwrap();
    assert_eq!(r4.k(), 3);
    let r2 = parse_portrait_pair(
        "degree = 4\nwhite = [[\"7/60\", \"22/60\", \"37/60\"], [\"43/60\", \"58/60\"]]\nblack = [[\"15/60\", \"30/60\", \"45/60\"], [\"13/60\", \"58/60\"]]\n",
    )
    .unwrap();
    assert_eq!(r2.k(), 3);
    assert_eq!(r2, common::r2());
}

#[test]
fn mismatched_degrees_are_rejected() {
    let err = PortraitPair::new(
        CriticalPortrait::new(3, vec![vec![ang(1, 9), ang(4, 9), ang(7, 9)]]).unwrap(),
        CriticalPortrait::new(4, vec![vec![ang(1, 8), ang(5, 8)]]).unwrap(),
    )
    .unwrap_err();
    assert!(err.to_string().contains("degree mismatch"), "{err}");
}

#[test]
fn zero_level_sets_match_the_orbit_closure() {
    let expected = [
        ("g", set(&[(0, 1), (1, 4), (1, 2), (3, 4)])),
        ("R4", set(&[(0, 1), (1, 3), (1, 2)])),
        ("R2", set(&[(0, 1), (7, 15), (13, 15)])),
    ];
    for ((name, pair), (_, want)) in reference_pairs().into_iter().zip(expected) {
        let got: BTreeSet<Angle> = pair.zero.zero_angles().iter().cloned().collect();
        assert_eq!(got, want, "{name}");
        let oracle: BTreeSet<BigRational> = orbit_closure_oracle(&pair);
        assert_eq!(oracle, got.iter().map(rat).collect(), "{name}");
        assert_eq!(pair.k(), want.len());
    }
}

#[test]
fn reference_pairs_validate_with_degree_sums_d_minus_one() {
    for (name, pair) in reference_pairs() {
        let r = validate(&pair, 8);
        assert_eq!(r.verdict, Verdict::Pass, "{name}: {:?}", r.violations);
        let d = pair.degree() as usize;
        assert_eq!(r.white_degree_sum, d - 1, "{name}");
        assert_eq!(r.black_degree_sum, d - 1, "{name}");
    }
}

#[test]
fn extra_white_class_breaks_the_degree_sum() {
    let mut white: Vec<&[(i64, i64)]> = G_WHITE.to_vec();
    white.push(&[(1, 32), (17, 32)]);
    let r = validate(&PortraitPair::from_ratios(4, &white, G_BLACK).unwrap(), 4);
    assert_eq!(r.verdict, Verdict::Fail);
    assert!(r.failed_axioms().contains(&Axiom::DegreeSum), "{:?}", r.violations);
    assert_eq!(r.white_degree_sum, 4);
}

#[test]
fn level_sets_agree_with_the_division_oracle() {
    for (name, pair) in reference_pairs() {
        let d = pair.degree();
        let mut tower = Tower::new(pair.clone()).unwrap();
        tower.build_to(4).unwrap();
        for n in 0..=4 {
            let oracle = level_set_oracle(pair.zero.zero_angles(), d as i64, n);
            let from_tower: Vec<BigRational> = tower.level_angles(n).angles().iter().map(rat).collect();
            let standalone: Vec<BigRational> = angles_at_level(&pair.zero, d, n).iter().map(rat).collect();
            assert_eq!(from_tower, oracle, "{name} n={n}");
            assert_eq!(standalone, oracle, "{name} n={n}");
        }
    }
    let level1: BTreeSet<Angle> = angles_at_level(&g().zero, 4, 1).into_iter().collect();
    assert_eq!(level1.len(), 16);
    assert!(set(&[(2, 16), (10, 16), (3, 16), (7, 16), (11, 16), (15, 16)]).is_subset(&level1));
}

#[test]
fn embedding_and_image_indices_match_values() {
    for (name, pair) in reference_pairs() {
        let d = pair.degree();
        let mut tower = Tower::new(pair).unwrap();
        tower.build_to(4).unwrap();
        for n in 0..4 {
            let lo = tower.level_angles(n);
            let hi = tower.level_angles(n + 1);
            for i in 0..lo.len() {
                assert_eq!(hi.angle(tower.embed(n, i)), lo.angle(i), "{name} embed {n}:{i}");
            }
            for i in 0..hi.len() {
                assert_eq!(lo.angle(tower.mu_index(n + 1, i)), hi.angle(i).mu(d), "{name} mu {n}:{i}");
            }
        }
    }
}

#[test]
fn level_one_classes_of_g() {
    let tower = Tower::new(g()).unwrap();
    let white: BTreeSet<BTreeSet<Angle>> =
        [set(&[(2, 16), (10, 16)]), set(&[(3, 16), (7, 16)]), set(&[(11, 16), (15, 16)])].into();
    let black: BTreeSet<BTreeSet<Angle>> =
        [set(&[(1, 16), (5, 16)]), set(&[(6, 16), (14, 16)]), set(&[(9, 16), (13, 16)])].into();
    assert_eq!(nontrivial(&tower, Color::White, 1), white);
    assert_eq!(nontrivial(&tower, Color::Black, 1), black);
}

#[test]
fn g_level_two_white_counts() {
    let mut tower = Tower::new(g()).unwrap();
    tower.build_to(3).unwrap();
    let rel = tower.relation(Color::White, 2);
    assert_eq!(rel.class_count(), 49);
    assert_eq!(rel.classes().map(|c| c.len() - 1).sum::<usize>(), 15);
    assert_eq!(tower.gaps(Color::White, 3).len(), 64);
}

#[test]
fn r4_level_one_white_is_one_triangle() {
    let tower = Tower::new(r4()).unwrap();
    assert_eq!(nontrivial(&tower, Color::White, 1), [set(&[(1, 9), (4, 9), (7, 9)])].into());
}

#[test]
fn gaps_are_typed_counterclockwise() {
    for (name, pair) in reference_pairs() {
        let k = pair.k();
        let tower = Tower::new(pair).unwrap();
        for color in Color::BOTH {
            let g0 = tower.gaps(color, 0);
            assert_eq!(g0.len(), 1, "{name}");
            assert_eq!(g0.arcs(0).iter().map(|&a| a as usize).collect::<Vec<_>>(), (0..k).collect::<Vec<_>>());
        }
    }
    let tower = Tower::new(g()).unwrap();
    let gaps = tower.gaps(Color::White, 1);
    assert_eq!(gaps.len(), 4);
    for gap in 0..4 {
        let types: Vec<usize> = gaps.arcs(gap).iter().map(|&a| a as usize % 4).collect();
        assert_eq!(types, vec![0, 1, 2, 3]);
        assert!(gaps.well_typed(gap));
    }
}

#[test]
fn dynamic_types() {
    assert!(classify(&g().white).iter().chain(&classify(&g().black)).all(|&t| t == DynType::Julia));
    assert_eq!(classify(&fatou_pair().white), vec![DynType::PeriodicFatou]);
    let quartic = CriticalPortrait::new(4, vec![vec![ang(0, 1), ang(1, 2)], vec![ang(1, 8), ang(5, 8)]]).unwrap();
    let types = classify(&quartic);
    let idx = quartic.classes().iter().position(|c| c.contains(&ang(1, 8))).unwrap();
    assert_eq!(types[idx], DynType::PreperiodicFatou);
    assert_eq!(types[1 - idx], DynType::PeriodicFatou);
}

#[test]
fn predicted_sizes() {
    let mut tower = Tower::new(g()).unwrap();
    tower.build_to(5).unwrap();
    let i1 = tower.level_angles(1).index_of(&ang(2, 16)).unwrap();
    for n in 1..=5 {
        let rel = tower.relation(Color::White, n);
        let c = rel.class_of(tower.embed_to(1, n, i1));
        assert_eq!(tower.predicted_size(Color::White, n, c), 2, "n={n}");
        assert_eq!(rel.class_size(c), 2);
    }
    // A class whose image chain avoids critical classes.
    let rel = tower.relation(Color::White, 3);
    let trivial = (0..rel.class_count()).find(|&c| rel.class_size(c) == 1).unwrap();
    assert_eq!(tower.predicted_size(Color::White, 3, trivial), 1);
}

#[test]
fn stabilization() {
    let mut tower = Tower::new(g()).unwrap();
    let i1 = tower.level_angles(1).index_of(&ang(2, 16)).unwrap();
    match tower.stabilization(Color::White, 1, i1, 6).unwrap() {
        Stabilization::Stable { m0, sizes } => {
            assert_eq!(m0, 0);
            assert_eq!(sizes, vec![2; 6]);
        }
        other => panic!("{other:?}"),
    }
    let mut tower = Tower::new(fatou_pair()).unwrap();
    let zero = tower.level_angles(1).index_of(&ang(0, 1)).unwrap();
    match tower.stabilization(Color::White, 1, zero, 6).unwrap() {
        Stabilization::NotStabilizedBy { cap, sizes } => {
            assert_eq!(cap, 6);
            assert!(sizes.windows(2).all(|w| w[0] < w[1]), "{sizes:?}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn connection_graphs_are_trees() {
    let mut tower = Tower::new(g()).unwrap();
    let cg = connection_graph(tower.relation(Color::White, 1), tower.gaps(Color::White, 1));
    assert_eq!((cg.gap_nodes, cg.class_nodes, cg.edges.len()), (4, 13, 16));
    assert!(cg.is_tree);
    let cg = connection_graph(tower.relation(Color::Black, 0), tower.gaps(Color::Black, 0));
    assert_eq!((cg.gap_nodes, cg.class_nodes, cg.edges.len()), (1, 4, 4));
    assert!(cg.is_tree);
    tower.build_to(2).unwrap();
    let mut r4 = Tower::new(r4()).unwrap();
    r4.build_to(2).unwrap();
    let cg = connection_graph(r4.relation(Color::White, 2), r4.gaps(Color::White, 2));
    assert_eq!((cg.gap_nodes, cg.class_nodes, cg.edges.len()), (9, 19, 27));
    assert!(cg.is_tree && cg.connected);
}

/// Chain closure of both colors' class lists, by repeated merging.
fn join_oracle(tower: &Tower, n: usize) -> BTreeSet<BTreeSet<Angle>> {
    let lv = tower.level_angles(n);
    let mut blocks: Vec<BTreeSet<Angle>> = Vec::new();
    for color in Color::BOTH {
        for c in tower.relation(color, n).classes() {
            blocks.push(c.iter().map(|&i| lv.angle(i as usize)).collect());
        }
    }
    loop {
        let mut merged = false;
        'outer: for i in 0..blocks.len() {
            for j in i + 1..blocks.len() {
                if !blocks[i].is_disjoint(&blocks[j]) {
                    let b = blocks.swap_remove(j);
                    blocks[i].extend(b);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            return blocks.into_iter().collect();
        }
    }
}

#[test]
fn vertex_classes() {
    let tower = Tower::new(g()).unwrap();
    let joined = level_join(&tower, 1);
    let blocks: BTreeSet<BTreeSet<Angle>> = joined.blocks().into_iter().map(|b| b.into_iter().collect()).collect();
    assert_eq!(blocks, join_oracle(&tower, 1));
    assert_eq!(blocks.len(), 10);
    assert!(blocks.contains(&set(&[(2, 16), (10, 16)])));
    assert!(blocks.iter().all(|b| b.len() <= 2));
    assert_eq!(level_join(&tower, 0).block_count(), 4);

    let r4 = Tower::new(r4()).unwrap();
    let joined = level_join(&r4, 1);
    assert_eq!(
        joined.block_containing(&ang(1, 9)).unwrap().into_iter().collect::<BTreeSet<_>>(),
        set(&[(1, 9), (4, 9), (7, 9)])
    );
    for (name, pair) in reference_pairs() {
        let mut t = Tower::new(pair).unwrap();
        t.build_to(3).unwrap();
        for n in 0..=3 {
            let got: BTreeSet<BTreeSet<Angle>> =
                level_join(&t, n).blocks().into_iter().map(|b| b.into_iter().collect()).collect();
            assert_eq!(got, join_oracle(&t, n), "{name} n={n}");
        }
    }
}

#[test]
fn every_vertex_of_g_is_cnc() {
    let mut tower = Tower::new(g()).unwrap();
    tower.build_to(3).unwrap();
    for n in 1..=3 {
        let w = tower.relation(Color::White, n);
        let b = tower.relation(Color::Black, n);
        for v in tower.vertex_classes(n).blocks() {
            let cnc = vertex_cnc(v, w, b);
            assert!(cnc.valid(), "n={n} {v:?}: {:?}", cnc.problems);
            assert_eq!(cnc.order.len(), v.len());
        }
    }
}

#[test]
fn restriction_and_forged_merges() {
    let mut tower = Tower::new(g()).unwrap();
    tower.build_to(3).unwrap();
    for n in 0..=2 {
        assert!(restriction_equal(&tower, n).equal, "n={n}");
    }
    let (a, b) = (tower.a0_into(2, 0), tower.a0_into(2, 1));
    let forged = tower.relation(Color::White, 2).merged(a, b);
    tower.replace_relation(Color::White, 2, forged).unwrap();
    let r = restriction_equal(&tower, 1);
    assert!(!r.equal);
    let (color, x, y) = r.witness.unwrap();
    assert_eq!(color, Color::White);
    assert_eq!(set(&[(0, 1), (1, 4)]), [x, y].into_iter().collect());
}

#[test]
fn circuits() {
    for (name, pair) in reference_pairs() {
        let k = pair.k();
        let tower = Tower::new(pair).unwrap();
        let c0 = circuit(&tower, 0);
        assert_eq!(c0.arcs.len(), k, "{name}");
        assert!(c0.arcs.iter().enumerate().all(|(i, a)| a.arc_type == i && a.white_gap == 0 && a.black_gap == 0));
        assert!(c0.problems().is_empty(), "{name}: {:?}", c0.problems());
    }
    let tower = Tower::new(g()).unwrap();
    let c = circuit(&tower, 1);
    assert_eq!(c.arcs.len(), 16);
    for t in 0..4 {
        assert_eq!(c.arcs.iter().filter(|a| a.arc_type == t).count(), 4);
    }
    let lv = tower.level_angles(1);
    let a = &c.arcs[lv.index_of(&ang(2, 16)).unwrap()];
    let b = &c.arcs[lv.index_of(&ang(10, 16)).unwrap()];
    assert_ne!(a.white_gap, b.white_gap);
    assert_eq!(a.start_vertex, b.start_vertex);
    let r4 = Tower::new(r4()).unwrap();
    let c = circuit(&r4, 1);
    assert_eq!(c.arcs.len(), 9);
    for t in 0..3 {
        assert_eq!(c.arcs.iter().filter(|a| a.arc_type == t).count(), 3);
    }
}

#[test]
fn semiconjugacy_and_its_failure_under_forgery() {
    let mut tower = Tower::new(g()).unwrap();
    tower.build_to(5).unwrap();
    for n in 0..=4 {
        assert!(check_semiconjugacy(&tower, n).passed(), "g n={n}");
    }
    let mut r2 = Tower::new(r2()).unwrap();
    r2.build_to(4).unwrap();
    for n in 0..=3 {
        assert!(check_semiconjugacy(&r2, n).passed(), "R2 n={n}");
    }
    // Merge two level-2 singletons whose images sit at different vertices.
    let mut tower = Tower::new(g()).unwrap();
    tower.build_to(2).unwrap();
    let lo = tower.vertex_classes(1);
    let w = tower.relation(Color::White, 2);
    let singles: Vec<usize> = (0..w.len()).filter(|&i| w.class_size(w.class_of(i)) == 1).collect();
    let (a, b) = singles
        .iter()
        .flat_map(|&a| singles.iter().map(move |&b| (a, b)))
        .find(|&(a, b)| a < b && lo.block_of(tower.mu_index(2, a)) != lo.block_of(tower.mu_index(2, b)))
        .unwrap();
    let forged = w.merged(a, b);
    tower.replace_relation(Color::White, 2, forged).unwrap();
    let r = check_semiconjugacy(&tower, 1);
    assert!(!r.passed());
    assert!(r.witness.is_some());
}

#[test]
fn gap_measures() {
    let d4 = |n: u32| BigRational::new(BigInt::one(), BigInt::from(4u32.pow(n)));
    let tower = Tower::new(g()).unwrap();
    for gap in 0..4 {
        assert_eq!(gap_boundary_measure(tower.gaps(Color::White, 1), gap, &tower.pair().zero, 4), d4(1));
    }
    assert!(gap_boundary_measure(tower.gaps(Color::White, 0), 0, &tower.pair().zero, 4).is_one());
    let r4 = Tower::new(r4()).unwrap();
    let third = BigRational::new(BigInt::one(), BigInt::from(3));
    for gap in 0..3 {
        assert_eq!(gap_boundary_measure(r4.gaps(Color::White, 1), gap, &r4.pair().zero, 3), third);
    }
    let mut tower = Tower::new(g()).unwrap();
    tower.build_to(2).unwrap();
    let report = entropy_measure_report(&tower, 2);
    assert!(report.ok(), "{:?}", report.problems);
    assert_eq!(report.white.len(), 16);
    assert!(report.white.iter().all(|m| *m == d4(2)));
    for (name, pair) in reference_pairs() {
        let d = pair.degree() as usize;
        let t = Tower::new(pair).unwrap();
        let report = entropy_measure_report(&t, 1);
        assert!(report.ok(), "{name}: {:?}", report.problems);
        assert!(!report.fibers.is_empty());
        for f in &report.fibers {
            assert_eq!(f.size_sum, d * f.image_size, "{name}: {f:?}");
        }
    }
}

#[test]
fn itineraries() {
    let mut tower = Tower::new(g()).unwrap();
    tower.build_to(6).unwrap();
    let zero = gap_itinerary(&ang(0, 1), &tower, Color::White, 4).unwrap();
    assert_eq!(zero.len(), 2);
    assert!(zero.iter().all(|it| it.chain.len() == 4));
    assert!(zero.iter().any(|it| big_g_class(it, &tower).points.contains(&ang(0, 1))));

    let fifth = gap_itinerary(&ang(1, 5), &tower, Color::White, 6).unwrap();
    assert_eq!(fifth.len(), 1);
    let it = &fifth[0];
    assert_eq!(it.side, Side::Unique);
    assert_eq!(it.chain.len(), 6);
    assert_eq!(it.periodicity.map(|c| c.period), Some(2));
    let limits = big_g_class(it, &tower);
    assert!(limits.exact);
    assert!(!limits.points.is_empty() && limits.points.len() <= 4);
    for p in &limits.points {
        let mut den = p.denominator().to_u64().unwrap();
        while den % 4 == 0 {
            den /= 4;
        }
        assert_eq!(15 % den, 0, "{p}");
    }
    // Each chain gap is the parent of the next.
    for n in 1..6 {
        let up = tower.gaps(Color::White, n + 1);
        let parent_arc = tower.parent_arc(n, up.arcs(it.gap(n + 1))[0] as usize);
        assert_eq!(tower.gaps(Color::White, n).gap_of_arc(parent_arc), it.gap(n));
    }
}

#[test]
fn approximate_classes() {
    let mut tower = Tower::new(g()).unwrap();
    tower.build_to(6).unwrap();
    let lv1 = tower.level_angles(1);
    let class = approx_class(&ang(2, 16), &tower, Color::White, 6).unwrap();
    let on_level: BTreeSet<Angle> = class.points.iter().filter(|p| lv1.index_of(p).is_some()).cloned().collect();
    assert_eq!(on_level, set(&[(2, 16), (10, 16)]));
    assert!(class.points.len() <= 3 * 8);
    let fifth = approx_class(&ang(1, 5), &tower, Color::White, 6).unwrap();
    assert_eq!(fifth.points, vec![ang(1, 5)]);
    for s in [(1, 5), (2, 16), (1, 7), (0, 1), (5, 12)] {
        let a = ang(s.0, s.1);
        assert_eq!(
            fatou_class(&a, &tower, Color::White, 6).unwrap(),
            approx_class(&a, &tower, Color::White, 6).unwrap(),
            "{a}"
        );
    }
    let mut syn = Tower::new(fatou_pair()).unwrap();
    syn.build_to(7).unwrap();
    let zero = ang(0, 1);
    let shallow = fatou_class(&zero, &syn, Color::White, 4).unwrap();
    let deep = fatou_class(&zero, &syn, Color::White, 7).unwrap();
    let approx = approx_class(&zero, &syn, Color::White, 7).unwrap();
    assert!(!deep.exact && !shallow.exact);
    assert!(deep.points.len() > approx.points.len());
    assert!(approx.points.iter().all(|p| deep.points.contains(p)));
    assert!(deep.points.len() > shallow.points.len());
}

#[test]
fn disk_diagrams() {
    let tower = Tower::new(r4()).unwrap();
    let svg = render_lamination(&tower, 1, &[Color::White], &DiskStyle::default()).unwrap();
    let leaves: Vec<&str> = svg.lines().filter(|l| l.contains("white-leaf")).collect();
    assert_eq!(leaves.len(), 1);
    assert!(leaves[0].starts_with("<polygon") && leaves[0].contains("data-angles=\"1/9 4/9 7/9\""));
    let svg0 = render_lamination(&tower, 0, &Color::BOTH, &DiskStyle::default()).unwrap();
    assert_eq!(svg0.matches("class=\"tick\"").count(), 3);
    assert!(!svg0.contains("-leaf"));
    let chords = DiskStyle {
        leaf: LeafShape::Chord,
        show_black_outside: false,
        ..DiskStyle::default()
    };
    let g1 = render_lamination(&Tower::new(g()).unwrap(), 1, &Color::BOTH, &chords).unwrap();
    assert_eq!(g1.matches("<line class=\"white-leaf\"").count(), 3);
    assert_eq!(g1.matches("<line class=\"black-leaf\"").count(), 3);
}

#[test]
fn square_trace_stays_on_the_grid() {
    let mut tower = Tower::new(g()).unwrap();
    tower.build_to(4).unwrap();
    for n in 0..=4 {
        let trace = turtle_trace(&tower, &GeometryConfig::unit_square(), n).unwrap();
        let cell = 0.5f64.powi(n as i32);
        for &(x, y) in &trace.points {
            for v in [x, y] {
                let r = v / cell;
                assert!((r - r.round()).abs() < 1e-9, "n={n}: {v} off the grid");
            }
        }
        assert!(trace.closure_error < 1e-9);
    }
}

#[test]
fn broken_geometry_is_rejected_before_tracing() {
    let tower = Tower::new(g()).unwrap();
    let geo = GeometryConfig::new(vec![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -0.5]]);
    assert!(matches!(turtle_trace(&tower, &geo, 1), Err(RenderError::OpenPolygon(..))));
    let short = GeometryConfig::equilateral();
    assert!(matches!(turtle_trace(&tower, &short, 1), Err(RenderError::WrongEdgeCount { .. })));
}

#[test]
fn tiling_colors_follow_the_coarse_intervals() {
    let mut tower = Tower::new(g()).unwrap();
    tower.build_to(4).unwrap();
    let trace = turtle_trace(&tower, &GeometryConfig::unit_square(), 4).unwrap();
    let tiles = |coarse: usize| -> BTreeSet<String> {
        let svg = render_tiling(
            &trace,
            &TilingStyle {
                coarse_level: coarse,
                ..TilingStyle::default()
            },
        );
        svg.lines()
            .filter_map(|l| l.split("class=\"").nth(1).map(|s| s.split('"').next().unwrap().to_string()))
            .collect()
    };
    assert_eq!(tiles(0).len(), 1);
    assert_eq!(tiles(1).len(), 4);
    let mut r4t = Tower::new(r4()).unwrap();
    r4t.build_to(4).unwrap();
    let trace = turtle_trace(&r4t, &GeometryConfig::triangle_236(), 4).unwrap();
    let svg = render_tiling(&trace, &TilingStyle::default());
    let classes: BTreeSet<&str> = svg.lines().filter_map(|l| l.split("class=\"").nth(1)).map(|s| &s[..6]).collect();
    assert_eq!(classes.len(), 3);
}
