//! Nested gap chains around an angle and the limit sets they cut out of the
//! circle.
//!
//! For an eventually periodic chain the limit set is computed exactly. Let
//! `ιₙ` send the type of an arc of `Gⁿ⁺¹` to the type of the arc of `Gⁿ`
//! containing it. If the base angle has preperiod `l` and period `p`, then
//! `ιₙ₊ₚ = ιₙ` for `n ≥ l`, so `Φ = ι_l ∘ … ∘ ι_{l+p−1}` describes one full
//! period. On the eventual image of `Φ` every type lies on a cycle, and the
//! nested arcs of that cycle shrink to the fixed point of an affine
//! contraction with ratio `d^{−p·r}`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::angle::Angle;
use crate::error::BuildError;
use crate::lamination::{Location, Tower};
use crate::portrait::Color;

/// Which side of an angle a chain follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// The angle is not an endpoint at any built level.
    Unique,
    /// Arcs ending at the angle.
    Left,
    /// Arcs starting at the angle.
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub preperiod: usize,
    pub period: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapItinerary {
    pub base: Angle,
    pub color: Color,
    pub side: Side,
    /// Arc containing the base angle at levels `0..=m`.
    pub arcs: Vec<usize>,
    /// Gap ids at levels `1..=m`; entry `n−1` is the level-`n` gap.
    pub chain: Vec<usize>,
    pub periodicity: Option<Certificate>,
}

impl GapItinerary {
    pub fn depth(&self) -> usize {
        self.arcs.len() - 1
    }

    /// Gap id at level `n` (the unique gap at level 0).
    pub fn gap(&self, n: usize) -> usize {
        if n == 0 {
            0
        } else {
            self.chain[n - 1]
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BigGClass {
    pub points: Vec<Angle>,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ApproxClass {
    pub points: Vec<Angle>,
    pub exact: bool,
}

/// The maximal nested chains of `color`-gaps containing `s`, through level `m`.
pub fn gap_itinerary(s: &Angle, tower: &Tower, color: Color, m: usize) -> Result<Vec<GapItinerary>, BuildError> {
    if m > tower.depth() {
        return Err(BuildError::NotBuilt {
            requested: m,
            built: tower.depth(),
        });
    }
    let mut left = Vec::with_capacity(m + 1);
    let mut right = Vec::with_capacity(m + 1);
    let mut is_angle = false;
    for n in 0..=m {
        let lv = tower.level_angles(n);
        match lv.locate(s) {
            Location::At(i) => {
                is_angle = true;
                left.push((i + lv.len() - 1) % lv.len());
                right.push(i);
            }
            Location::Inside(i) => {
                left.push(i);
                right.push(i);
            }
        }
    }
    let orbit = s.orbit(tower.degree());
    let sides: Vec<(Side, Vec<usize>)> = if is_angle {
        vec![(Side::Left, left), (Side::Right, right)]
    } else {
        vec![(Side::Unique, left)]
    };
    Ok(sides
        .into_iter()
        .map(|(side, arcs)| {
            let chain = (1..=m).map(|n| tower.gaps(color, n).gap_of_arc(arcs[n])).collect();
            let mut it = GapItinerary {
                base: s.clone(),
                color,
                side,
                arcs,
                chain,
                periodicity: None,
            };
            let cert = Certificate {
                preperiod: orbit.preperiod_len(),
                period: orbit.period(),
            };
            if verify_certificate(&it, tower, cert) {
                it.periodicity = Some(cert);
            }
            it
        })
        .collect())
}

/// `ιₙ` for the chain: type of the level-`n` arc containing each arc of `Gⁿ⁺¹`.
fn iota(it: &GapItinerary, tower: &Tower, n: usize) -> Option<Vec<usize>> {
    let k = tower.k();
    let up = tower.gaps(it.color, n + 1);
    let g = it.gap(n + 1);
    if !up.well_typed(g) {
        return None;
    }
    let below = tower.gaps(it.color, n);
    let gb = it.gap(n);
    (0..k)
        .map(|j| {
            let parent = tower.parent_arc(n, up.arc_of_type(g, j));
            (below.gap_of_arc(parent) == gb).then_some(parent % k)
        })
        .collect()
}

fn verify_certificate(it: &GapItinerary, tower: &Tower, c: Certificate) -> bool {
    let m = it.depth();
    if c.period == 0 || m < c.preperiod + c.period {
        return false;
    }
    let maps: Option<Vec<Vec<usize>>> = (0..m).map(|n| iota(it, tower, n)).collect();
    let Some(maps) = maps else {
        return false;
    };
    (c.preperiod..m)
        .filter(|n| n + c.period < m)
        .all(|n| maps[n] == maps[n + c.period])
}

fn pow_d(d: u32, e: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(d).pow(e as u32))
}

fn frac(r: BigRational) -> BigRational {
    let f = r.floor();
    r - f
}

/// Start angle of the type-`j` arc of the chain's level-`n` gap, as a rational.
fn arc_start(it: &GapItinerary, tower: &Tower, n: usize, j: usize) -> BigRational {
    let arc = if n == 0 {
        j
    } else {
        tower.gaps(it.color, n).arc_of_type(it.gap(n), j)
    };
    let lv = tower.level_angles(n);
    BigRational::new(
        BigInt::from(lv.numerator(arc).clone()),
        BigInt::from(lv.denominator().clone()),
    )
}

/// The limit set `⋂ Gⁿ ∩ S¹` of a chain.
pub fn big_g_class(it: &GapItinerary, tower: &Tower) -> BigGClass {
    if let Some(c) = it.periodicity {
        if let Some(points) = exact_limits(it, tower, c) {
            return BigGClass { points, exact: true };
        }
    }
    let m = it.depth();
    let lv = tower.level_angles(m);
    let mut pts = BTreeSet::new();
    if m == 0 {
        pts.extend(lv.angles());
    } else {
        let gaps = tower.gaps(it.color, m);
        for &a in gaps.arcs(it.gap(m)) {
            pts.insert(lv.angle(a as usize));
            pts.insert(lv.angle((a as usize + 1) % lv.len()));
        }
    }
    BigGClass {
        points: pts.into_iter().collect(),
        exact: false,
    }
}

fn exact_limits(it: &GapItinerary, tower: &Tower, c: Certificate) -> Option<Vec<Angle>> {
    let k = tower.k();
    let d = tower.degree();
    let (l, p) = (c.preperiod, c.period);
    let maps: Vec<Vec<usize>> = (l..l + p).map(|n| iota(it, tower, n)).collect::<Option<_>>()?;
    let phi: Vec<usize> = (0..k)
        .map(|j| maps.iter().rev().fold(j, |t, m| m[t]))
        .collect();
    let mut core: BTreeSet<usize> = (0..k).collect();
    loop {
        let next: BTreeSet<usize> = core.iter().map(|&j| phi[j]).collect();
        if next == core {
            break;
        }
        core = next;
    }
    let mut inverse = vec![usize::MAX; k];
    for &j in &core {
        inverse[phi[j]] = j;
    }
    let dl = pow_d(d, l);
    let dp = pow_d(d, p);
    let offset: Vec<Option<BigRational>> = (0..k)
        .map(|j| {
            core.contains(&j).then(|| {
                let a = arc_start(it, tower, l + p, j);
                let b = arc_start(it, tower, l, phi[j]);
                frac(a - b) * &dl
            })
        })
        .collect();
    let zero = &tower.pair().zero;
    let mut out = BTreeSet::new();
    for &j in &core {
        let mut sum = BigRational::zero();
        let mut weight = BigRational::one();
        let mut t = j;
        let mut r = 0usize;
        loop {
            t = inverse[t];
            sum += offset[t].clone().expect("core type") * &weight;
            weight /= &dp;
            r += 1;
            if t == j {
                break;
            }
        }
        let full = pow_d(d, p * r);
        let u0 = sum * &full / (full - BigRational::one());
        if u0 < BigRational::zero() || &u0 > zero.arc_length(j) {
            return None;
        }
        let x = arc_start(it, tower, l, j) + u0 / &dl;
        out.insert(Angle::from_rational(&frac(x)));
    }
    Some(out.into_iter().collect())
}

/// Chain closure of the limit sets through shared angles, capped at
/// `2^{d−1}` links. Points coming from uncertified chains are included but
/// not expanded further.
pub fn approx_class(s: &Angle, tower: &Tower, color: Color, depth: usize) -> Result<ApproxClass, BuildError> {
    let links = 1usize << (tower.degree() - 1);
    let mut class: BTreeSet<Angle> = BTreeSet::new();
    class.insert(s.clone());
    let mut frontier = vec![s.clone()];
    let mut exact = true;
    for _ in 0..links {
        let mut next = Vec::new();
        for t in &frontier {
            for it in gap_itinerary(t, tower, color, depth)? {
                let x = big_g_class(&it, tower);
                exact &= x.exact;
                for p in x.points {
                    if class.insert(p.clone()) && x.exact {
                        next.push(p);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(ApproxClass {
        points: class.into_iter().collect(),
        exact,
    })
}

/// `approx_class`, enlarged by the depth-`depth` class whenever that class is
/// of Fatou type. Fatou results are always inexact: such classes keep growing.
pub fn fatou_class(s: &Angle, tower: &Tower, color: Color, depth: usize) -> Result<ApproxClass, BuildError> {
    let base = approx_class(s, tower, color, depth)?;
    let lv = tower.level_angles(depth);
    let rel = tower.relation(color, depth);
    let mut points: BTreeSet<Angle> = base.points.iter().cloned().collect();
    let mut fatou = false;
    for p in &base.points {
        if let Some(i) = lv.index_of(p) {
            let c = rel.class_of(i);
            if rel.dyn_type(c).is_fatou() {
                fatou = true;
                points.extend(rel.class(c).iter().map(|&x| lv.angle(x as usize)));
            }
        }
    }
    if !fatou {
        return Ok(base);
    }
    Ok(ApproxClass {
        points: points.into_iter().collect(),
        exact: false,
    })
}
