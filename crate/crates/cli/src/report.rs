//! JSON report shapes for the query subcommands.

use std::collections::BTreeMap;

use lamina::{
    approx_class, big_g_class, fatou_class, gap_itinerary, Angle, BigGClass, BuildError, Certificate, Color, DynType,
    Side, Stabilization, Tower,
};
use serde::Serialize;

#[derive(Serialize)]
pub struct LevelStats {
    level: usize,
    color: Color,
    angles: usize,
    gaps: usize,
    classes: usize,
    /// Class size to number of classes of that size.
    class_sizes: BTreeMap<usize, usize>,
    /// Nontrivial classes by dynamic type.
    types: BTreeMap<&'static str, usize>,
}

#[derive(Serialize)]
pub struct StabilizationStats {
    color: Color,
    class: Vec<Angle>,
    #[serde(rename = "type")]
    dyn_type: DynType,
    result: Stabilization,
}

#[derive(Serialize)]
pub struct Stats {
    degree: u32,
    k: usize,
    zero_angles: Vec<Angle>,
    levels: Vec<LevelStats>,
    stabilization: Vec<StabilizationStats>,
    /// Largest `m0` over the stable classes; `None` if any class is unstable.
    max_m0: Option<usize>,
}

pub fn stats(t: &mut Tower, n: usize) -> Result<Stats, BuildError> {
    let mut levels = Vec::new();
    for m in 0..=n {
        for color in Color::BOTH {
            let rel = t.relation(color, m);
            let mut class_sizes = BTreeMap::new();
            let mut types = BTreeMap::new();
            for c in 0..rel.class_count() {
                *class_sizes.entry(rel.class_size(c)).or_insert(0) += 1;
                if rel.class_size(c) > 1 {
                    *types.entry(rel.dyn_type(c).name()).or_insert(0) += 1;
                }
            }
            levels.push(LevelStats {
                level: m,
                color,
                angles: rel.len(),
                gaps: t.gaps(color, m).len(),
                classes: rel.class_count(),
                class_sizes,
                types,
            });
        }
    }
    let mut stabilization = Vec::new();
    if n >= 1 {
        for color in Color::BOTH {
            let reps: Vec<(usize, DynType)> = {
                let rel = t.relation(color, 1);
                (0..rel.class_count())
                    .filter(|&c| rel.class_size(c) > 1)
                    .map(|c| (rel.class(c)[0] as usize, rel.dyn_type(c)))
                    .collect()
            };
            for (rep, dyn_type) in reps {
                let rel = t.relation(color, 1);
                let lv = t.level_angles(1);
                let class = rel.class(rel.class_of(rep)).iter().map(|&i| lv.angle(i as usize)).collect();
                let result = t.stabilization(color, 1, rep, n)?;
                stabilization.push(StabilizationStats {
                    color,
                    class,
                    dyn_type,
                    result,
                });
            }
        }
    }
    let max_m0 = stabilization
        .iter()
        .map(|s| match s.result {
            Stabilization::Stable { m0, .. } => Some(m0),
            Stabilization::NotStabilizedBy { .. } => None,
        })
        .try_fold(0, |acc, m| m.map(|m| acc.max(m)));
    Ok(Stats {
        degree: t.degree(),
        k: t.k(),
        zero_angles: t.pair().zero.zero_angles().to_vec(),
        levels,
        stabilization,
        max_m0,
    })
}

#[derive(Serialize)]
pub struct ClassEntry {
    color: Color,
    id: usize,
    #[serde(rename = "type")]
    dyn_type: DynType,
    image: Option<usize>,
    local_degree: u32,
    angles: Vec<Angle>,
}

#[derive(Serialize)]
pub struct Classes {
    level: usize,
    classes: Vec<ClassEntry>,
}

/// Classes at level `n`; with `only`, just the classes holding that index.
pub fn classes(t: &Tower, n: usize, colors: &[Color], only: Option<usize>) -> Classes {
    let lv = t.level_angles(n);
    let mut out = Vec::new();
    for &color in colors {
        let rel = t.relation(color, n);
        let ids: Vec<usize> = match only {
            Some(i) => vec![rel.class_of(i)],
            None => (0..rel.class_count()).collect(),
        };
        for c in ids {
            out.push(ClassEntry {
                color,
                id: c,
                dyn_type: rel.dyn_type(c),
                image: rel.image_class(c),
                local_degree: rel.local_degree(c),
                angles: rel.class(c).iter().map(|&i| lv.angle(i as usize)).collect(),
            });
        }
    }
    Classes { level: n, classes: out }
}

#[derive(Serialize)]
pub struct Chain {
    side: Side,
    arcs: Vec<usize>,
    chain: Vec<usize>,
    periodicity: Option<Certificate>,
    limit: Option<BigGClass>,
}

#[derive(Serialize)]
pub struct Boundary {
    angle: Angle,
    color: Color,
    depth: usize,
    chains: Vec<Chain>,
    approx_class: Vec<Angle>,
    approx_exact: bool,
    fatou_class: Vec<Angle>,
    fatou_exact: bool,
}

pub fn boundary(t: &Tower, s: &Angle, color: Color, n: usize) -> Result<Boundary, BuildError> {
    let chains = gap_itinerary(s, t, color, n)?
        .into_iter()
        .map(|it| {
            let limit = it.periodicity.map(|_| big_g_class(&it, t));
            Chain {
                side: it.side,
                arcs: it.arcs,
                chain: it.chain,
                periodicity: it.periodicity,
                limit,
            }
        })
        .collect();
    let approx = approx_class(s, t, color, n)?;
    let fatou = fatou_class(s, t, color, n)?;
    Ok(Boundary {
        angle: s.clone(),
        color,
        depth: n,
        chains,
        approx_class: approx.points,
        approx_exact: approx.exact,
        fatou_class: fatou.points,
        fatou_exact: fatou.exact,
    })
}
