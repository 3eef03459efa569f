//! Critical portraits, the shared zero-level data, the config format, and
//! portrait validation.
//!
//! The config format is TOML:
//!
//! ```toml
//! degree = 4
//! white = [["1/8", "5/8"], ["3/16", "7/16"], ["11/16", "15/16"]]
//! black = [["1/16", "5/16"], ["3/8", "7/8"], ["9/16", "13/16"]]
//!
//! [geometry]                      # optional, consumed by the renderer
//! edges = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]
//! scale = 2.0                     # optional, defaults to sqrt(degree)
//! angles = "polygon"              # "polygon", "equi", or a list in degrees
//! ```
//!
//! Angles are `"p/q"` strings (not necessarily reduced) or `"0"`.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::angle::{sets_cross, Angle};
use crate::error::{ConfigError, PortraitError};
use crate::lamination::Tower;
use crate::relations::vertex_cnc;
use crate::render::{AngleRule, GeometryConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub const BOTH: [Color; 2] = [Color::White, Color::Black];

    pub fn name(self) -> &'static str {
        match self {
            Color::White => "white",
            Color::Black => "black",
        }
    }

    pub fn other(self) -> Color {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One color's critical portrait: the nontrivial classes of the level-1 relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalPortrait {
    degree: u32,
    classes: Vec<Vec<Angle>>,
}

impl CriticalPortrait {
    /// Classes are sorted internally and ordered by their least angle.
    pub fn new(degree: u32, classes: Vec<Vec<Angle>>) -> Result<CriticalPortrait, PortraitError> {
        if degree < 2 {
            return Err(PortraitError::DegreeTooSmall(degree));
        }
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(classes.len());
        for (index, mut class) in classes.into_iter().enumerate() {
            class.sort();
            for a in &class {
                if !seen.insert(a.clone()) {
                    return Err(PortraitError::DuplicateAngle(a.to_string()));
                }
            }
            if class.len() < 2 {
                return Err(PortraitError::ClassTooSmall {
                    index,
                    size: class.len(),
                });
            }
            out.push(class);
        }
        out.sort();
        Ok(CriticalPortrait {
            degree,
            classes: out,
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn classes(&self) -> &[Vec<Angle>] {
        &self.classes
    }

    pub fn angles(&self) -> impl Iterator<Item = &Angle> {
        self.classes.iter().flatten()
    }

    /// `Σ (|class| − 1)`.
    pub fn degree_sum(&self) -> usize {
        self.classes.iter().map(|c| c.len() - 1).sum()
    }

    /// Classes whose points do not share one image under `μ`.
    pub fn single_image_violations(&self) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&i| {
                let c = &self.classes[i];
                let img = c[0].mu(self.degree);
                c.iter().any(|a| a.mu(self.degree) != img)
            })
            .collect()
    }

    /// Pairs of classes that cross.
    pub fn crossing_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.classes.len() {
            for j in i + 1..self.classes.len() {
                if sets_cross(&self.classes[i], &self.classes[j]).unwrap_or(true) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// The zero-level angle set `A⁰` and its typed arcs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroData {
    zero_angles: Vec<Angle>,
    arc_lengths: Vec<BigRational>,
}

impl ZeroData {
    pub fn zero_angles(&self) -> &[Angle] {
        &self.zero_angles
    }

    pub fn k(&self) -> usize {
        self.zero_angles.len()
    }

    /// Length of the 0-arc of type `j`, from `A⁰[j]` to `A⁰[j+1]`.
    pub fn arc_length(&self, j: usize) -> &BigRational {
        &self.arc_lengths[j]
    }

    pub fn arc_lengths(&self) -> &[BigRational] {
        &self.arc_lengths
    }

    pub fn index_of(&self, a: &Angle) -> Option<usize> {
        self.zero_angles.binary_search(a).ok()
    }
}

/// `A⁰`: the union of forward orbits of every angle of both portraits.
pub fn orbit_set(white: &CriticalPortrait, black: &CriticalPortrait) -> Result<ZeroData, PortraitError> {
    if white.degree != black.degree {
        return Err(PortraitError::DegreeMismatch {
            white: white.degree,
            black: black.degree,
        });
    }
    let d = white.degree;
    let mut set = BTreeSet::new();
    for a in white.angles().chain(black.angles()) {
        let mut x = a.mu(d);
        while set.insert(x.clone()) {
            x = x.mu(d);
        }
    }
    let zero_angles: Vec<Angle> = set.into_iter().collect();
    if zero_angles.len() < 2 {
        return Err(PortraitError::TooFewZeroAngles(zero_angles.len()));
    }
    let k = zero_angles.len();
    let arc_lengths = (0..k)
        .map(|j| zero_angles[j].ccw_distance_to(&zero_angles[(j + 1) % k]))
        .collect();
    Ok(ZeroData {
        zero_angles,
        arc_lengths,
    })
}

/// A white and a black portrait of the same degree with their shared `A⁰`.
#[derive(Clone, Debug, PartialEq)]
pub struct PortraitPair {
    pub white: CriticalPortrait,
    pub black: CriticalPortrait,
    pub zero: ZeroData,
    pub geometry: Option<GeometryConfig>,
}

impl PortraitPair {
    pub fn new(white: CriticalPortrait, black: CriticalPortrait) -> Result<PortraitPair, PortraitError> {
        let zero = orbit_set(&white, &black)?;
        Ok(PortraitPair {
            white,
            black,
            zero,
            geometry: None,
        })
    }

    /// Build from `(p, q)` literals; handy for tests and examples.
    pub fn from_ratios(degree: u32, white: &[&[(i64, i64)]], black: &[&[(i64, i64)]]) -> Result<PortraitPair, PortraitError> {
        let conv = |classes: &[&[(i64, i64)]]| -> Vec<Vec<Angle>> {
            classes
                .iter()
                .map(|c| c.iter().map(|&(p, q)| Angle::new(p, q).expect("positive denominator")).collect())
                .collect()
        };
        PortraitPair::new(
            CriticalPortrait::new(degree, conv(white))?,
            CriticalPortrait::new(degree, conv(black))?,
        )
    }

    pub fn with_geometry(mut self, geometry: GeometryConfig) -> PortraitPair {
        self.geometry = Some(geometry);
        self
    }

    pub fn degree(&self) -> u32 {
        self.white.degree
    }

    pub fn k(&self) -> usize {
        self.zero.k()
    }

    pub fn portrait(&self, color: Color) -> &CriticalPortrait {
        match color {
            Color::White => &self.white,
            Color::Black => &self.black,
        }
    }

    /// Canonical config text; parsing it back yields an equal pair.
    pub fn to_config_string(&self) -> String {
        let raw = RawConfig {
            degree: self.degree(),
            white: to_raw_classes(&self.white),
            black: to_raw_classes(&self.black),
            geometry: self.geometry.as_ref().map(RawGeometry::from),
        };
        toml::to_string(&raw).expect("config serialization cannot fail")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    degree: u32,
    white: Vec<Vec<String>>,
    black: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    geometry: Option<RawGeometry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    edges: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    angles: Option<RawAngles>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawAngles {
    Named(String),
    Degrees(Vec<f64>),
}

impl From<&GeometryConfig> for RawGeometry {
    fn from(g: &GeometryConfig) -> RawGeometry {
        RawGeometry {
            edges: g.edges.clone(),
            scale: g.scale,
            angles: Some(match &g.angle_rule {
                AngleRule::Polygon => RawAngles::Named("polygon".into()),
                AngleRule::EquiAngled => RawAngles::Named("equi".into()),
                AngleRule::PerType(v) => RawAngles::Degrees(v.iter().map(|r| r.to_degrees()).collect()),
            }),
        }
    }
}

fn to_raw_classes(p: &CriticalPortrait) -> Vec<Vec<String>> {
    p.classes
        .iter()
        .map(|c| c.iter().map(|a| a.to_string()).collect())
        .collect()
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

/// Parse a portrait config document.
pub fn parse_portrait_pair(document: &str) -> Result<PortraitPair, ConfigError> {
    let raw: RawConfig = toml::from_str(document).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(document, s.start));
        ConfigError::Syntax {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    let parse_classes = |classes: &[Vec<String>]| -> Result<Vec<Vec<Angle>>, ConfigError> {
        classes
            .iter()
            .map(|c| c.iter().map(|s| s.parse::<Angle>().map_err(ConfigError::from)).collect())
            .collect()
    };
    let white = CriticalPortrait::new(raw.degree, parse_classes(&raw.white)?)?;
    let black = CriticalPortrait::new(raw.degree, parse_classes(&raw.black)?)?;
    let mut pair = PortraitPair::new(white, black)?;
    if let Some(g) = raw.geometry {
        let angle_rule = match g.angles {
            None => AngleRule::Polygon,
            Some(RawAngles::Named(s)) => match s.as_str() {
                "polygon" => AngleRule::Polygon,
                "equi" => AngleRule::EquiAngled,
                other => return Err(ConfigError::Geometry(format!("unknown angle rule {other:?}"))),
            },
            Some(RawAngles::Degrees(v)) => AngleRule::PerType(v.iter().map(|x| x.to_radians()).collect()),
        };
        let geometry = GeometryConfig {
            edges: g.edges,
            scale: g.scale,
            angle_rule,
        };
        geometry
            .check(pair.k())
            .map_err(|e| ConfigError::Geometry(e.to_string()))?;
        pair.geometry = Some(geometry);
    }
    Ok(pair)
}

/// The portrait axioms, in report order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Axiom {
    #[serde(rename = "a-single-image")]
    SingleImage,
    #[serde(rename = "b-degree-sum")]
    DegreeSum,
    #[serde(rename = "c-non-crossing")]
    NonCrossing,
    #[serde(rename = "d-zero-angles")]
    ZeroAngles,
    #[serde(rename = "e-cnc")]
    Cnc,
    #[serde(rename = "f-separation")]
    Separation,
}

impl Axiom {
    pub fn id(self) -> &'static str {
        match self {
            Axiom::SingleImage => "a-single-image",
            Axiom::DegreeSum => "b-degree-sum",
            Axiom::NonCrossing => "c-non-crossing",
            Axiom::ZeroAngles => "d-zero-angles",
            Axiom::Cnc => "e-cnc",
            Axiom::Separation => "f-separation",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Outcome of the separation search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Separation {
    /// No gap mixes distinct zero-level classes from `depth` through `cap`.
    Certified { depth: usize, cap: usize },
    /// Mixing gaps persist at the cap.
    Inconclusive { cap: usize },
    /// Not searched because an earlier axiom failed.
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub verdict: Verdict,
    pub violations: Vec<Violation>,
    pub separation: Separation,
    pub white_degree_sum: usize,
    pub black_degree_sum: usize,
}

impl ValidationReport {
    pub fn separation_depth(&self) -> Option<usize> {
        match self.separation {
            Separation::Certified { depth, .. } => Some(depth),
            _ => None,
        }
    }

    pub fn failed_axioms(&self) -> BTreeSet<Axiom> {
        self.violations.iter().map(|v| v.axiom).collect()
    }
}

fn fmt_class(c: &[Angle]) -> String {
    let parts: Vec<String> = c.iter().map(|a| a.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// Check axioms (a)–(f). Separation is searched up to `depth_cap` levels.
pub fn validate(pair: &PortraitPair, depth_cap: usize) -> ValidationReport {
    validate_with_budget(pair, depth_cap, crate::lamination::DEFAULT_BUDGET)
}

pub fn validate_with_budget(pair: &PortraitPair, depth_cap: usize, budget: usize) -> ValidationReport {
    let d = pair.degree();
    let mut violations = Vec::new();
    for color in Color::BOTH {
        let p = pair.portrait(color);
        for i in p.single_image_violations() {
            violations.push(Violation {
                axiom: Axiom::SingleImage,
                witness: format!("{color} {}", fmt_class(&p.classes[i])),
            });
        }
        if p.degree_sum() != d as usize - 1 {
            violations.push(Violation {
                axiom: Axiom::DegreeSum,
                witness: format!("{color} sum {} != {}", p.degree_sum(), d - 1),
            });
        }
        for (i, j) in p.crossing_pairs() {
            violations.push(Violation {
                axiom: Axiom::NonCrossing,
                witness: format!("{color} {} {}", fmt_class(&p.classes[i]), fmt_class(&p.classes[j])),
            });
        }
        for c in &p.classes {
            let hits: Vec<&Angle> = c.iter().filter(|a| pair.zero.index_of(a).is_some()).collect();
            if hits.len() > 1 {
                violations.push(Violation {
                    axiom: Axiom::ZeroAngles,
                    witness: format!("{color} {} contains {}", fmt_class(c), fmt_class(&hits.into_iter().cloned().collect::<Vec<_>>())),
                });
            }
        }
    }
    let mut separation = Separation::Skipped;
    if violations.is_empty() {
        match Tower::with_budget(pair.clone(), budget) {
            Err(e) => violations.push(Violation {
                axiom: Axiom::Cnc,
                witness: e.to_string(),
            }),
            Ok(mut tower) => {
                for v in cnc_violations(&tower, 1) {
                    violations.push(Violation {
                        axiom: Axiom::Cnc,
                        witness: v,
                    });
                }
                if violations.is_empty() {
                    separation = match tower.separation(depth_cap) {
                        Ok(s) => s,
                        Err(e) => {
                            violations.push(Violation {
                                axiom: Axiom::Separation,
                                witness: e.to_string(),
                            });
                            Separation::Skipped
                        }
                    };
                }
            }
        }
    }
    violations.sort();
    let verdict = if !violations.is_empty() {
        Verdict::Fail
    } else if matches!(separation, Separation::Certified { .. }) {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    ValidationReport {
        verdict,
        violations,
        separation,
        white_degree_sum: pair.white.degree_sum(),
        black_degree_sum: pair.black.degree_sum(),
    }
}

/// cnc failures at the vertex classes of level `n`, as witness strings.
pub(crate) fn cnc_violations(tower: &Tower, n: usize) -> Vec<String> {
    let level = tower.level_angles(n);
    let join = tower.vertex_classes(n);
    let w = tower.relation(Color::White, n);
    let b = tower.relation(Color::Black, n);
    let mut out = Vec::new();
    for v in join.blocks() {
        if v.len() < 2 {
            continue;
        }
        let res = vertex_cnc(v, w, b);
        if !res.valid() {
            let angles: Vec<Angle> = v.iter().map(|&i| level.angle(i as usize)).collect();
            out.push(format!("level {n} vertex {} {}", fmt_class(&angles), res.problems.join("; ")));
        }
    }
    out
}
