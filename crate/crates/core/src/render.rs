//! SVG output: lamination disk diagrams and turtle-traced tilings.
//!
//! Floating point is used here and nowhere upstream.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::RenderError;
use crate::lamination::Tower;
use crate::portrait::Color;
use crate::relations::vertex_cnc;

/// How the interior angle at each vertex of the flat model is chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum AngleRule {
    /// Interior angles of the 0-tile polygon, by vertex type.
    Polygon,
    /// `2π / #incidences` at every vertex.
    EquiAngled,
    /// Explicit interior angle per vertex type, in radians.
    PerType(Vec<f64>),
}

/// Flat model of the white 0-tile.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometryConfig {
    /// Edge vector of each type; vertex `j` is where edge `j` starts.
    pub edges: Vec<[f64; 2]>,
    /// Edge shrink factor per level; `sqrt(d)` when absent.
    pub scale: Option<f64>,
    pub angle_rule: AngleRule,
}

impl GeometryConfig {
    pub fn new(edges: Vec<[f64; 2]>) -> GeometryConfig {
        GeometryConfig {
            edges,
            scale: None,
            angle_rule: AngleRule::Polygon,
        }
    }

    /// Unit square, counterclockwise from the origin.
    pub fn unit_square() -> GeometryConfig {
        GeometryConfig::new(vec![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    }

    /// Right triangle with angles 90°, 60°, 30° at its three vertices.
    pub fn triangle_236() -> GeometryConfig {
        let h = 3f64.sqrt() / 2.0;
        GeometryConfig::new(vec![[0.5, 0.0], [-0.5, h], [0.0, -h]])
    }

    pub fn equilateral() -> GeometryConfig {
        let h = 3f64.sqrt() / 2.0;
        GeometryConfig::new(vec![[1.0, 0.0], [-0.5, h], [-0.5, -h]])
    }

    pub fn check(&self, k: usize) -> Result<(), RenderError> {
        if self.edges.len() != k {
            return Err(RenderError::WrongEdgeCount {
                expected: k,
                got: self.edges.len(),
            });
        }
        let (sx, sy) = self.edges.iter().fold((0.0, 0.0), |(x, y), e| (x + e[0], y + e[1]));
        let scale: f64 = self.edges.iter().map(|e| e[0].hypot(e[1])).sum();
        if !(scale.is_finite() && scale > 0.0) || self.edges.iter().any(|e| e[0].hypot(e[1]) == 0.0) {
            return Err(RenderError::Invalid("edge vectors must be finite and non-zero".into()));
        }
        if sx.hypot(sy) > 1e-9 * scale {
            return Err(RenderError::OpenPolygon(sx, sy));
        }
        if let Some(s) = self.scale {
            if !(s.is_finite() && s > 1.0) {
                return Err(RenderError::Invalid(format!("scale must exceed 1, got {s}")));
            }
        }
        if let AngleRule::PerType(v) = &self.angle_rule {
            if v.len() != k || v.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
                return Err(RenderError::Invalid("per-type angles must be k positive values".into()));
            }
        }
        Ok(())
    }

    pub fn scale_for(&self, d: u32) -> f64 {
        self.scale.unwrap_or_else(|| (d as f64).sqrt())
    }

    /// Interior angle of the 0-tile at the start of each edge.
    pub fn polygon_angles(&self) -> Vec<f64> {
        let k = self.edges.len();
        (0..k)
            .map(|j| {
                let a = self.edges[(j + k - 1) % k];
                let b = self.edges[j];
                let turn = (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1]);
                PI - turn
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TurtleTrace {
    pub level: usize,
    pub points: Vec<(f64, f64)>,
    pub closure_error: f64,
    /// Start of each arc as `numerator/denominator` of the level set.
    #[serde(skip)]
    pub(crate) starts: Vec<BigUint>,
    #[serde(skip)]
    pub(crate) denominator: BigUint,
    pub degree: u32,
}

impl TurtleTrace {
    /// Which of the `dᵐ` equal intervals of the circle arc `i` starts in.
    pub fn interval(&self, i: usize, coarse: usize) -> usize {
        let scaled = &self.starts[i] * BigUint::from(self.degree).pow(coarse as u32);
        (scaled / &self.denominator).to_usize().unwrap_or(0)
    }
}

/// Walk the level-`n` arcs, turning at each vertex by the cnc incidence rule.
pub fn turtle_trace(tower: &Tower, geometry: &GeometryConfig, n: usize) -> Result<TurtleTrace, RenderError> {
    let k = tower.k();
    geometry.check(k)?;
    if n > tower.depth() {
        return Err(RenderError::Build(crate::error::BuildError::NotBuilt {
            requested: n,
            built: tower.depth(),
        }));
    }
    let w = tower.relation(Color::White, n);
    let b = tower.relation(Color::Black, n);
    let vertices = tower.vertex_classes(n);
    let len = w.len();
    // Position of each angle among its vertex's white tiles, and the tile count.
    let mut pos = vec![0usize; len];
    let mut size = vec![1usize; len];
    for v in vertices.blocks() {
        let cnc = vertex_cnc(v, w, b);
        if !cnc.valid() {
            return Err(RenderError::Invalid(format!("vertex at index {} is not a valid cnc vertex", v[0])));
        }
        for (p, &a) in cnc.order.iter().enumerate() {
            pos[a as usize] = p;
            size[a as usize] = v.len();
        }
    }
    let interior: Vec<f64> = match &geometry.angle_rule {
        AngleRule::Polygon => geometry.polygon_angles(),
        AngleRule::PerType(v) => v.clone(),
        AngleRule::EquiAngled => Vec::new(),
    };
    let step_scale = geometry.scale_for(tower.degree()).powi(-(n as i32));
    let e0 = geometry.edges[0];
    let mut heading = e0[1].atan2(e0[0]);
    let mut x = 0.0f64;
    let mut y = 0.0f64;
    let mut points = Vec::with_capacity(len + 1);
    points.push((x, y));
    for i in 0..len {
        let e = geometry.edges[i % k];
        let l = e[0].hypot(e[1]) * step_scale;
        x += l * heading.cos();
        y += l * heading.sin();
        points.push((x, y));
        let a = (i + 1) % len;
        let m = size[a];
        let r = (pos[a] + m - pos[w.cyclic_predecessor(a)]) % m;
        let theta = match geometry.angle_rule {
            AngleRule::EquiAngled => PI / m as f64,
            _ => interior[a % k],
        };
        heading += PI - (2 * r + 1) as f64 * theta;
    }
    let closure_error = (x - points[0].0).hypot(y - points[0].1);
    let lv = tower.level_angles(n);
    Ok(TurtleTrace {
        level: n,
        points,
        closure_error,
        starts: (0..len).map(|i| lv.numerator(i).clone()).collect(),
        denominator: lv.denominator().clone(),
        degree: tower.degree(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeafShape {
    Chord,
    ConvexPolygon,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiskStyle {
    pub radius: f64,
    pub type_colors: Vec<String>,
    pub leaf: LeafShape,
    pub show_black_outside: bool,
}

impl Default for DiskStyle {
    fn default() -> DiskStyle {
        DiskStyle {
            radius: 200.0,
            type_colors: PALETTE.iter().map(|s| s.to_string()).collect(),
            leaf: LeafShape::ConvexPolygon,
            show_black_outside: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TilingStyle {
    pub width: f64,
    pub coarse_level: usize,
    pub stroke_width: f64,
    pub colors: Vec<String>,
}

impl Default for TilingStyle {
    fn default() -> TilingStyle {
        TilingStyle {
            width: 600.0,
            coarse_level: 1,
            stroke_width: 1.0,
            colors: PALETTE.iter().map(|s| s.to_string()).collect(),
        }
    }
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

fn header(w: f64, h: f64, min_x: f64, min_y: f64) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"{} {} {} {}\">\n",
        num(w),
        num(h),
        num(min_x),
        num(min_y),
        num(w),
        num(h)
    )
}

/// Disk diagram of the level-`n` relations of the given colors. White leaves
/// are drawn inside the circle; black leaves are bent outside when enabled.
pub fn render_lamination(tower: &Tower, n: usize, colors: &[Color], style: &DiskStyle) -> Result<String, RenderError> {
    if style.radius.is_nan() || style.radius <= 0.0 {
        return Err(RenderError::Invalid("radius must be positive".into()));
    }
    if n > tower.depth() {
        return Err(RenderError::Build(crate::error::BuildError::NotBuilt {
            requested: n,
            built: tower.depth(),
        }));
    }
    let r = style.radius;
    let margin = r * 0.6;
    let size = 2.0 * (r + margin);
    let lv = tower.level_angles(n);
    let k = tower.k();
    let point = |i: usize, rad: f64| {
        let t = 2.0 * PI * lv.f64(i);
        (rad * t.cos(), -rad * t.sin())
    };
    let mut out = header(size, size, -(r + margin), -(r + margin));
    let _ = writeln!(
        out,
        "<circle cx=\"0.000000\" cy=\"0.000000\" r=\"{}\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>",
        num(r)
    );
    for i in 0..lv.len() {
        let (x0, y0) = point(i, r * 0.97);
        let (x1, y1) = point(i, r * 1.03);
        let color = &style.type_colors[(i % k) % style.type_colors.len()];
        let _ = writeln!(
            out,
            "<line class=\"tick\" data-angle=\"{}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\"/>",
            lv.angle(i),
            num(x0),
            num(y0),
            num(x1),
            num(y1)
        );
    }
    for &color in colors {
        let rel = tower.relation(color, n);
        let outside = color == Color::Black && style.show_black_outside;
        for c in rel.nontrivial_classes() {
            let labels: Vec<String> = c.iter().map(|&i| lv.angle(i as usize).to_string()).collect();
            let data = labels.join(" ");
            let fill = if color == Color::White { "#dddddd" } else { "#555555" };
            if outside {
                let mut d = String::new();
                let (sx, sy) = point(c[0] as usize, r);
                let _ = write!(d, "M {} {}", num(sx), num(sy));
                let steps = if style.leaf == LeafShape::Chord && c.len() == 2 { 1 } else { c.len() };
                for j in 0..steps {
                    let a = c[j] as usize;
                    let b = c[(j + 1) % c.len()] as usize;
                    let (cx, cy) = bulge(point(a, r), point(b, r), r, margin * 0.9);
                    let (bx, by) = point(b, r);
                    let _ = write!(d, " Q {} {} {} {}", num(cx), num(cy), num(bx), num(by));
                }
                if steps > 1 {
                    d.push_str(" Z");
                }
                let _ = writeln!(
                    out,
                    "<path class=\"black-leaf\" data-angles=\"{data}\" d=\"{d}\" fill=\"{}\" stroke=\"#000000\"/>",
                    if steps > 1 { fill } else { "none" }
                );
            } else if style.leaf == LeafShape::Chord {
                for j in 0..c.len() {
                    let (x0, y0) = point(c[j] as usize, r);
                    let (x1, y1) = point(c[(j + 1) % c.len()] as usize, r);
                    if c.len() == 2 && j == 1 {
                        break;
                    }
                    let _ = writeln!(
                        out,
                        "<line class=\"{color}-leaf\" data-angles=\"{data}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#000000\"/>",
                        num(x0),
                        num(y0),
                        num(x1),
                        num(y1)
                    );
                }
            } else {
                let pts: Vec<String> = c
                    .iter()
                    .map(|&i| {
                        let (x, y) = point(i as usize, r);
                        format!("{},{}", num(x), num(y))
                    })
                    .collect();
                let _ = writeln!(
                    out,
                    "<polygon class=\"{color}-leaf\" data-angles=\"{data}\" points=\"{}\" fill=\"{fill}\" stroke=\"#000000\"/>",
                    pts.join(" ")
                );
            }
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Control point pushing the chord `p`–`q` outside the circle of radius `r`.
fn bulge(p: (f64, f64), q: (f64, f64), r: f64, max_out: f64) -> (f64, f64) {
    let mx = (p.0 + q.0) / 2.0;
    let my = (p.1 + q.1) / 2.0;
    let dist = mx.hypot(my);
    let target = if dist < 1e-9 * r { r + max_out } else { (r * r / dist).min(r + max_out) };
    let (ux, uy) = if dist < 1e-9 * r {
        // Diameter: bend perpendicular to it.
        let (dx, dy) = (q.0 - p.0, q.1 - p.1);
        let l = dx.hypot(dy);
        (dy / l, -dx / l)
    } else {
        (mx / dist, my / dist)
    };
    // The quadratic curve reaches halfway between midpoint and control point.
    let apex = 2.0 * target - dist.max(0.0);
    (ux * apex, uy * apex)
}

/// Tiling picture: the trace drawn as polylines, each run of arcs colored by
/// the interval `[j/dᵐ, (j+1)/dᵐ]` containing it, `m = style.coarse_level`.
pub fn render_tiling(trace: &TurtleTrace, style: &TilingStyle) -> String {
    let (mut min_x, mut min_y, mut max_x, mut max_y) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for &(x, y) in &trace.points {
        min_x = min_x.min(x);
        max_x = max_x.max(x);
        min_y = min_y.min(-y);
        max_y = max_y.max(-y);
    }
    let extent = (max_x - min_x).max(max_y - min_y).max(1e-12);
    let s = style.width / (extent * 1.1);
    let pad = extent * 0.05 * s;
    let tx = |x: f64| (x - min_x) * s + pad;
    let ty = |y: f64| (-y - min_y) * s + pad;
    let w = (max_x - min_x) * s + 2.0 * pad;
    let h = (max_y - min_y) * s + 2.0 * pad;
    let mut out = header(w, h, 0.0, 0.0);
    let arcs = trace.points.len() - 1;
    let mut i = 0;
    while i < arcs {
        let bin = trace.interval(i, style.coarse_level);
        let mut j = i;
        while j < arcs && trace.interval(j, style.coarse_level) == bin {
            j += 1;
        }
        let pts: Vec<String> = trace.points[i..=j]
            .iter()
            .map(|&(x, y)| format!("{},{}", num(tx(x)), num(ty(y))))
            .collect();
        let color = &style.colors[bin % style.colors.len()];
        let _ = writeln!(
            out,
            "<polyline class=\"tile-{bin}\" points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{}\"/>",
            pts.join(" "),
            num(style.stroke_width)
        );
        i = j;
    }
    out.push_str("</svg>\n");
    out
}
