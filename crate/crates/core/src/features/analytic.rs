//! Closed-form intersections of the NHIM, its stable and unstable manifolds
//! and the dividing surface with a section.
//!
//! Every label is a set of affine constraints in the decoupled saddle pair
//! (`q1 + p1 = 0`, `q1 - p1 = 0`, `q1 = p1 = 0`, `q1 = 0`). On a section the
//! state is affine in `(u, v, s)`, so each constraint is affine in the same
//! variables. When a constraint involves the solved coordinate `s` it is
//! used to eliminate `s`, and the energy equation becomes a conic
//! `Q(u, v) = h`; otherwise the constraints cut a line or a point out of the
//! `(u, v)` plane directly. All coefficients are found by probing, so no
//! per-section algebra is written by hand.

use serde::{Deserialize, Serialize};

use crate::dynamics::{PhasePoint, SystemModel};
use crate::error::{Error, Result};
use crate::sections::{Bounds, SectionSpec};

/// Number of scan lines per axis when sampling curves.
pub const CURVE_SAMPLES: usize = 2000;
/// Slack on the sign conditions when testing membership of boundary points.
const MEMBERSHIP_SLACK: f64 = 1e-9;
/// A sample of a conic must agree with the lifted root to this precision.
const ROOT_MATCH: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Nhim,
    Stable,
    Unstable,
    /// The union of the stable and unstable manifolds.
    Manifolds,
    DividingSurface,
}

impl Label {
    pub fn name(self) -> &'static str {
        match self {
            Label::Nhim => "nhim",
            Label::Stable => "stable",
            Label::Unstable => "unstable",
            Label::Manifolds => "manifolds",
            Label::DividingSurface => "dividing_surface",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrimitiveKind {
    /// Finitely many isolated points (possibly none).
    Points,
    LineSegment,
    Circle,
    EllipseArc,
    CurveSamples,
    /// The constraints do not restrict the section at all.
    Region,
}

/// `c0 + cu u + cv v + cs s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Affine {
    pub c0: f64,
    pub cu: f64,
    pub cv: f64,
    pub cs: f64,
}

impl Affine {
    fn scale(&self) -> f64 {
        self.c0
            .abs()
            .max(self.cu.abs())
            .max(self.cv.abs())
            .max(self.cs.abs())
    }
}

/// `a u² + b uv + c v² + d u + e v + f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Conic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl Conic {
    pub fn eval(&self, u: f64, v: f64) -> f64 {
        self.a * u * u + self.b * u * v + self.c * v * v + self.d * u + self.e * v + self.f
    }

    fn gradient(&self, u: f64, v: f64) -> [f64; 2] {
        [
            2.0 * self.a * u + self.b * v + self.d,
            self.b * u + 2.0 * self.c * v + self.e,
        ]
    }

    fn scale(&self) -> f64 {
        [self.a, self.b, self.c, self.d, self.e, self.f]
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

/// Exact description of a primitive used for membership and refinement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    /// Isolated points; `s_map` gives the solved coordinate when the points
    /// come from eliminating it.
    Points {
        points: Vec<[f64; 2]>,
        s_map: Option<Affine>,
    },
    /// `n · (u, v) = offset` with `|n| = 1`.
    Line { normal: [f64; 2], offset: f64 },
    /// `Q(u, v) = 0` with `s = s_map(u, v)` on the curve.
    Conic { conic: Conic, s_map: Affine },
    /// Every point of the section.
    Region,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeaturePrimitive {
    pub label: Label,
    pub kind: PrimitiveKind,
    pub shape: Shape,
    /// Points of the primitive inside the section and the bounds. For point
    /// primitives these are the points themselves, for curves a dense sample.
    pub samples: Vec<[f64; 2]>,
    /// Kind-specific scalars: the centre and radius of a circle, the centre
    /// and semi-axes of an ellipse, the normal and offset of a line.
    pub payload: Vec<f64>,
}

impl FeaturePrimitive {
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty() && self.shape != Shape::Region
    }

    /// Short human-readable description of the expected set.
    pub fn describe(&self) -> String {
        match self.kind {
            PrimitiveKind::Points => format!("{} point(s)", self.samples.len()),
            PrimitiveKind::LineSegment => "line segment".to_string(),
            PrimitiveKind::Circle => format!("circle r={:.6}", self.payload[2]),
            PrimitiveKind::EllipseArc => "ellipse arc".to_string(),
            PrimitiveKind::CurveSamples => format!("curve ({} samples)", self.samples.len()),
            PrimitiveKind::Region => "whole section".to_string(),
        }
    }
}

/// The analytic structures on one section at energy `h`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureSet {
    pub section: SectionSpec,
    pub h: f64,
    pub bounds: Bounds,
    pub nhim: FeaturePrimitive,
    pub stable: FeaturePrimitive,
    pub unstable: FeaturePrimitive,
    pub dividing_surface: FeaturePrimitive,
    #[serde(skip)]
    context: Option<Context>,
}

/// Model and section needed to test membership during refinement.
#[derive(Debug, Clone)]
struct Context {
    system: SystemModel,
}

impl FeatureSet {
    /// Primitives making up `label` (two for [`Label::Manifolds`]).
    pub fn primitives(&self, label: Label) -> Vec<&FeaturePrimitive> {
        match label {
            Label::Nhim => vec![&self.nhim],
            Label::Stable => vec![&self.stable],
            Label::Unstable => vec![&self.unstable],
            Label::Manifolds => vec![&self.stable, &self.unstable],
            Label::DividingSurface => vec![&self.dividing_surface],
        }
    }

    pub fn is_empty(&self, label: Label) -> bool {
        self.primitives(label).iter().all(|p| p.is_empty())
    }

    /// All samples of `label`.
    pub fn samples(&self, label: Label) -> Vec<[f64; 2]> {
        self.primitives(label)
            .iter()
            .flat_map(|p| p.samples.iter().copied())
            .collect()
    }

    /// Distance from `(u, v)` to the set `label`; infinite for an empty set.
    ///
    /// The nearest dense sample is refined by projecting onto the exact
    /// curve, and the refined foot is kept only if it belongs to the section.
    pub fn distance(&self, label: Label, point: [f64; 2]) -> f64 {
        self.primitives(label)
            .iter()
            .map(|p| self.primitive_distance(p, point))
            .fold(f64::INFINITY, f64::min)
    }

    fn primitive_distance(&self, prim: &FeaturePrimitive, point: [f64; 2]) -> f64 {
        if prim.shape == Shape::Region {
            return match &self.context {
                Some(ctx) if !self.member(ctx, prim, point) => nearest(&prim.samples, point).0,
                _ => 0.0,
            };
        }
        let (best, idx) = nearest(&prim.samples, point);
        let Some(ctx) = &self.context else {
            return best;
        };
        let Some(idx) = idx else {
            return best;
        };
        let foot = match &prim.shape {
            Shape::Points { .. } | Shape::Region => return best,
            Shape::Line { normal, offset } => {
                let k = normal[0] * point[0] + normal[1] * point[1] - offset;
                [point[0] - k * normal[0], point[1] - k * normal[1]]
            }
            Shape::Conic { conic, .. } => match project_to_conic(conic, prim.samples[idx], point) {
                Some(f) => f,
                None => return best,
            },
        };
        let d = dist(foot, point);
        if d < best && self.member(ctx, prim, foot) {
            d
        } else {
            best
        }
    }

    fn member(&self, ctx: &Context, prim: &FeaturePrimitive, p: [f64; 2]) -> bool {
        in_bounds(&self.bounds, p) && on_section(&ctx.system, &self.section, self.h, &prim.shape, p)
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn nearest(samples: &[[f64; 2]], p: [f64; 2]) -> (f64, Option<usize>) {
    samples
        .iter()
        .enumerate()
        .fold((f64::INFINITY, None), |(bd, bi), (i, s)| {
            let d = dist(*s, p);
            if d < bd {
                (d, Some(i))
            } else {
                (bd, bi)
            }
        })
}

fn in_bounds(b: &Bounds, p: [f64; 2]) -> bool {
    let eps = 1e-12;
    p[0] >= b.u_min - eps && p[0] <= b.u_max + eps && p[1] >= b.v_min - eps && p[1] <= b.v_max + eps
}

/// Closest point of `Q = 0` to `target`, starting from `start`: alternate a
/// Newton step onto the curve with a move along its tangent.
fn project_to_conic(conic: &Conic, start: [f64; 2], target: [f64; 2]) -> Option<[f64; 2]> {
    let mut x = start;
    for _ in 0..50 {
        let g = conic.gradient(x[0], x[1]);
        let gg = g[0] * g[0] + g[1] * g[1];
        if gg < 1e-24 {
            return None;
        }
        let r = conic.eval(x[0], x[1]);
        x = [x[0] - r * g[0] / gg, x[1] - r * g[1] / gg];
        let g = conic.gradient(x[0], x[1]);
        let gn = (g[0] * g[0] + g[1] * g[1]).sqrt();
        if gn < 1e-12 {
            return None;
        }
        let t = [-g[1] / gn, g[0] / gn];
        let step = (target[0] - x[0]) * t[0] + (target[1] - x[1]) * t[1];
        x = [x[0] + step * t[0], x[1] + step * t[1]];
        if step.abs() < 1e-15 {
            break;
        }
    }
    let g = conic.gradient(x[0], x[1]);
    let gg = g[0] * g[0] + g[1] * g[1];
    if gg < 1e-24 {
        return None;
    }
    let r = conic.eval(x[0], x[1]);
    let x = [x[0] - r * g[0] / gg, x[1] - r * g[1] / gg];
    (conic.eval(x[0], x[1]).abs() <= 1e-10 * conic.scale().max(1.0)).then_some(x)
}

/// Whether `(u, v)` lifts onto the section with the state belonging to
/// `shape` (for conics, the lifted root must be the eliminated `s`).
fn on_section(system: &SystemModel, section: &SectionSpec, h: f64, shape: &Shape, p: [f64; 2]) -> bool {
    let Some(x) = section.lift_with_slack(system, p[0], p[1], h, MEMBERSHIP_SLACK) else {
        return false;
    };
    match eliminated(shape) {
        Some(s_map) => {
            let s = solved(s_map, p);
            (x[section.solve] - s).abs() <= ROOT_MATCH * s.abs().max(1.0)
        }
        None => true,
    }
}

fn eliminated(shape: &Shape) -> Option<&Affine> {
    match shape {
        Shape::Conic { s_map, .. } => Some(s_map),
        Shape::Points { s_map, .. } => s_map.as_ref(),
        _ => None,
    }
}

/// `s` from `s_map(u, v, s) = 0`.
fn solved(s_map: &Affine, p: [f64; 2]) -> f64 {
    -(s_map.c0 + s_map.cu * p[0] + s_map.cv * p[1]) / s_map.cs
}

/// `f(embed(u, v, s))` as an affine function, by probing.
fn affine_of(section: &SectionSpec, f: impl Fn(&PhasePoint) -> f64) -> Affine {
    let f0 = f(&section.embed(0.0, 0.0, 0.0));
    Affine {
        c0: f0,
        cu: f(&section.embed(1.0, 0.0, 0.0)) - f0,
        cv: f(&section.embed(0.0, 1.0, 0.0)) - f0,
        cs: f(&section.embed(0.0, 0.0, 1.0)) - f0,
    }
}

/// `H(embed(u, v, s(u, v))) - h` as a conic, by probing six points.
fn conic_of(system: &SystemModel, section: &SectionSpec, s_map: &Affine, h: f64) -> Conic {
    let q = |u: f64, v: f64| {
        let s = solved(s_map, [u, v]);
        system.energy_unchecked(&section.embed(u, v, s)) - h
    };
    let f = q(0.0, 0.0);
    let (up, um) = (q(1.0, 0.0), q(-1.0, 0.0));
    let (vp, vm) = (q(0.0, 1.0), q(0.0, -1.0));
    let a = 0.5 * (up + um) - f;
    let d = 0.5 * (up - um);
    let c = 0.5 * (vp + vm) - f;
    let e = 0.5 * (vp - vm);
    let b = q(1.0, 1.0) - a - c - d - e - f;
    Conic { a, b, c, d, e, f }
}

/// Decoupled saddle coordinates `(q1, p1)` of a storage-layout point.
fn saddle_pair(system: &SystemModel, x: &PhasePoint) -> (f64, f64) {
    let w = system.to_decoupled_unchecked(x);
    (w[0], w[system.dof()])
}

fn constraints(system: &SystemModel, section: &SectionSpec, label: Label) -> Vec<Affine> {
    let q1 = |x: &PhasePoint| saddle_pair(system, x).0;
    let p1 = |x: &PhasePoint| saddle_pair(system, x).1;
    match label {
        Label::Stable => vec![affine_of(section, |x| q1(x) + p1(x))],
        Label::Unstable => vec![affine_of(section, |x| q1(x) - p1(x))],
        Label::Nhim => vec![affine_of(section, q1), affine_of(section, p1)],
        Label::DividingSurface => vec![affine_of(section, q1)],
        Label::Manifolds => unreachable!("the union has no single constraint set"),
    }
}

fn negligible(x: f64, scale: f64) -> bool {
    x.abs() <= 1e-12 * scale.max(1.0)
}

/// Affine constraints in `(u, v)` only: `None` if inconsistent, otherwise
/// the solution set as a region, a line or a point.
enum PlaneSet {
    Empty,
    Everything,
    Line { normal: [f64; 2], offset: f64 },
    Point([f64; 2]),
}

fn solve_plane(rows: &[Affine]) -> PlaneSet {
    let mut lines: Vec<Affine> = Vec::new();
    for r in rows {
        let s = r.scale();
        if negligible(r.cu, s) && negligible(r.cv, s) {
            if !negligible(r.c0, s) {
                return PlaneSet::Empty;
            }
            continue;
        }
        lines.push(*r);
    }
    match lines.len() {
        0 => PlaneSet::Everything,
        _ => {
            let first = lines[0];
            for other in &lines[1..] {
                let det = first.cu * other.cv - first.cv * other.cu;
                let s = first.scale() * other.scale();
                if !negligible(det, s) {
                    let u = (-first.c0 * other.cv + other.c0 * first.cv) / det;
                    let v = (-first.cu * other.c0 + other.cu * first.c0) / det;
                    let consistent = lines.iter().all(|l| {
                        negligible(l.c0 + l.cu * u + l.cv * v, l.scale())
                    });
                    return if consistent { PlaneSet::Point([u, v]) } else { PlaneSet::Empty };
                }
            }
            let n = first.cu.hypot(first.cv);
            let normal = [first.cu / n, first.cv / n];
            let offset = -first.c0 / n;
            let consistent = lines.iter().all(|l| {
                let k = l.cu.hypot(l.cv);
                let sign = (l.cu * normal[0] + l.cv * normal[1]).signum();
                negligible(-sign * l.c0 / k - offset, offset.abs())
            });
            if consistent {
                PlaneSet::Line { normal, offset }
            } else {
                PlaneSet::Empty
            }
        }
    }
}

/// Points of `Q = 0` inside `bounds`, from scanning both axes.
fn conic_samples(conic: &Conic, bounds: &Bounds, n: usize) -> Vec<[f64; 2]> {
    let mut out = Vec::new();
    for k in 0..n {
        let t = k as f64 / (n - 1) as f64;
        let u = bounds.u_min + t * (bounds.u_max - bounds.u_min);
        // c v² + (b u + e) v + (a u² + d u + f) = 0
        for v in quadratic_roots(conic.c, conic.b * u + conic.e, conic.a * u * u + conic.d * u + conic.f) {
            if v >= bounds.v_min && v <= bounds.v_max {
                out.push([u, v]);
            }
        }
        let v = bounds.v_min + t * (bounds.v_max - bounds.v_min);
        for u in quadratic_roots(conic.a, conic.b * v + conic.d, conic.c * v * v + conic.e * v + conic.f) {
            if u >= bounds.u_min && u <= bounds.u_max {
                out.push([u, v]);
            }
        }
    }
    out
}

/// Real roots of `a x² + b x + c`; a negligible leading term degrades to the
/// linear case.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    if negligible(a, scale) {
        if negligible(b, scale) {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < -1e-14 * scale * scale {
        return Vec::new();
    }
    let disc = disc.max(0.0);
    if disc == 0.0 {
        return vec![-b / (2.0 * a)];
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    vec![q / a, c / q]
}

/// Intersection of the line `n · p = offset` with `Q = 0`.
fn line_conic(conic: &Conic, normal: [f64; 2], offset: f64) -> Vec<[f64; 2]> {
    let p0 = [normal[0] * offset, normal[1] * offset];
    let d = [-normal[1], normal[0]];
    // Q(p0 + t d) = α t² + β t + γ
    let gamma = conic.eval(p0[0], p0[1]);
    let qp = conic.eval(p0[0] + d[0], p0[1] + d[1]);
    let qm = conic.eval(p0[0] - d[0], p0[1] - d[1]);
    let alpha = 0.5 * (qp + qm) - gamma;
    let beta = 0.5 * (qp - qm);
    let scale = alpha.abs().max(beta.abs()).max(gamma.abs());
    if scale == 0.0 || (negligible(alpha, scale) && negligible(beta, scale) && negligible(gamma, scale)) {
        return Vec::new();
    }
    quadratic_roots(alpha, beta, gamma)
        .into_iter()
        .map(|t| [p0[0] + t * d[0], p0[1] + t * d[1]])
        .collect()
}

fn line_samples(normal: [f64; 2], offset: f64, bounds: &Bounds, n: usize) -> Vec<[f64; 2]> {
    let p0 = [normal[0] * offset, normal[1] * offset];
    let d = [-normal[1], normal[0]];
    let reach = (bounds.u_min.abs().max(bounds.u_max.abs())).hypot(bounds.v_min.abs().max(bounds.v_max.abs()))
        + offset.abs();
    (0..n)
        .map(|k| {
            let t = -reach + 2.0 * reach * k as f64 / (n - 1) as f64;
            [p0[0] + t * d[0], p0[1] + t * d[1]]
        })
        .filter(|p| in_bounds(bounds, *p))
        .collect()
}

fn region_samples(bounds: &Bounds, n: usize) -> Vec<[f64; 2]> {
    let m = (n as f64).sqrt().ceil() as usize;
    let mut out = Vec::with_capacity(m * m);
    for j in 0..m {
        for i in 0..m {
            out.push([
                bounds.u_min + (bounds.u_max - bounds.u_min) * (i as f64 + 0.5) / m as f64,
                bounds.v_min + (bounds.v_max - bounds.v_min) * (j as f64 + 0.5) / m as f64,
            ]);
        }
    }
    out
}

/// Circle `(centre, radius)` or ellipse `(centre, semi-axes)` payloads.
fn classify_conic(conic: &Conic, samples: &[[f64; 2]], raw_count: usize) -> (PrimitiveKind, Vec<f64>) {
    let s = conic.scale();
    let det = 4.0 * conic.a * conic.c - conic.b * conic.b;
    if det <= 1e-12 * s * s {
        return (PrimitiveKind::CurveSamples, Vec::new());
    }
    let uc = (conic.b * conic.e - 2.0 * conic.c * conic.d) / det;
    let vc = (conic.b * conic.d - 2.0 * conic.a * conic.e) / det;
    let k = -conic.eval(uc, vc);
    if k <= 0.0 {
        return (PrimitiveKind::CurveSamples, Vec::new());
    }
    // Eigenvalues of [[a, b/2], [b/2, c]].
    let mean = 0.5 * (conic.a + conic.c);
    let rad = (0.25 * (conic.a - conic.c).powi(2) + 0.25 * conic.b * conic.b).sqrt();
    let (l1, l2) = (mean - rad, mean + rad);
    let (r1, r2) = ((k / l1).sqrt(), (k / l2).sqrt());
    let whole = samples.len() == raw_count;
    if negligible(conic.b, s) && negligible(conic.a - conic.c, s) && whole {
        (PrimitiveKind::Circle, vec![uc, vc, r1])
    } else {
        (PrimitiveKind::EllipseArc, vec![uc, vc, r1, r2])
    }
}

fn points(points: Vec<[f64; 2]>, s_map: Option<Affine>) -> Shape {
    Shape::Points { points, s_map }
}

fn build_primitive(
    system: &SystemModel,
    section: &SectionSpec,
    h: f64,
    bounds: &Bounds,
    label: Label,
) -> FeaturePrimitive {
    let rows = constraints(system, section, label);
    let pivot = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| !negligible(r.cs, r.scale()))
        .max_by(|a, b| a.1.cs.abs().total_cmp(&b.1.cs.abs()))
        .map(|(i, r)| (i, *r));
    let (shape, raw): (Shape, Vec<[f64; 2]>) = match pivot {
        Some((i, s_map)) => {
            // Eliminate s and keep the remaining constraints in (u, v).
            let rest: Vec<Affine> = rows
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i)
                .map(|(_, r)| {
                    let k = r.cs / s_map.cs;
                    Affine {
                        c0: r.c0 - k * s_map.c0,
                        cu: r.cu - k * s_map.cu,
                        cv: r.cv - k * s_map.cv,
                        cs: 0.0,
                    }
                })
                .collect();
            let conic = conic_of(system, section, &s_map, h);
            let shape = Shape::Conic { conic, s_map };
            match solve_plane(&rest) {
                PlaneSet::Empty => (points(Vec::new(), None), Vec::new()),
                PlaneSet::Everything => {
                    let raw = conic_samples(&conic, bounds, CURVE_SAMPLES);
                    (shape, raw)
                }
                PlaneSet::Line { normal, offset } => {
                    let pts = line_conic(&conic, normal, offset);
                    (points(pts.clone(), Some(s_map)), pts)
                }
                PlaneSet::Point(p) => {
                    let pts = if negligible(conic.eval(p[0], p[1]), conic.scale()) {
                        vec![p]
                    } else {
                        Vec::new()
                    };
                    (points(pts.clone(), Some(s_map)), pts)
                }
            }
        }
        None => match solve_plane(&rows) {
            PlaneSet::Empty => (points(Vec::new(), None), Vec::new()),
            PlaneSet::Everything => (Shape::Region, region_samples(bounds, 40_000)),
            PlaneSet::Line { normal, offset } => (
                Shape::Line { normal, offset },
                line_samples(normal, offset, bounds, CURVE_SAMPLES),
            ),
            PlaneSet::Point(p) => (points(vec![p], None), vec![p]),
        },
    };
    let raw_count = raw.len();
    let samples: Vec<[f64; 2]> = raw
        .into_iter()
        .filter(|p| in_bounds(bounds, *p) && on_section(system, section, h, &shape, *p))
        .collect();
    let (kind, payload) = match &shape {
        Shape::Points { .. } => (PrimitiveKind::Points, Vec::new()),
        Shape::Line { normal, offset } => (PrimitiveKind::LineSegment, vec![normal[0], normal[1], *offset]),
        Shape::Conic { conic, .. } => classify_conic(conic, &samples, raw_count),
        Shape::Region => (PrimitiveKind::Region, Vec::new()),
    };
    let shape = match shape {
        Shape::Points { s_map, .. } => points(samples.clone(), s_map),
        other => other,
    };
    FeaturePrimitive {
        label,
        kind,
        shape,
        samples,
        payload,
    }
}

/// Analytic NHIM, manifold and dividing-surface sets on `section` within the
/// default `[-1, 1]²` bounds.
pub fn analytic_features(section: &SectionSpec, system: &SystemModel, h: f64) -> Result<FeatureSet> {
    analytic_features_in(section, system, h, Bounds::default())
}

/// [`analytic_features`] restricted to `bounds`.
pub fn analytic_features_in(
    section: &SectionSpec,
    system: &SystemModel,
    h: f64,
    bounds: Bounds,
) -> Result<FeatureSet> {
    crate::sections::check_kind(section, system)?;
    bounds.validate()?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::ParameterDomain {
            name: "h",
            value: h,
            reason: "energy must be finite and > 0",
        });
    }
    let build = |label| build_primitive(system, section, h, &bounds, label);
    Ok(FeatureSet {
        section: section.clone(),
        h,
        bounds,
        nhim: build(Label::Nhim),
        stable: build(Label::Stable),
        unstable: build(Label::Unstable),
        dividing_surface: build(Label::DividingSurface),
        context: Some(Context { system: system.clone() }),
    })
}

/// Residual of the defining equations at a lifted primitive point:
/// `max(|H - h|, |constraint|)` for the constraints of `label`.
pub fn defining_residual(system: &SystemModel, x: &PhasePoint, h: f64, label: Label) -> f64 {
    let (q1, p1) = saddle_pair(system, x);
    let e = (system.energy_unchecked(x) - h).abs();
    let c = match label {
        Label::Nhim => q1.abs().max(p1.abs()),
        Label::Stable => (q1 + p1).abs(),
        Label::Unstable => (q1 - p1).abs(),
        Label::Manifolds => (q1 + p1).abs().min((q1 - p1).abs()),
        Label::DividingSurface => q1.abs(),
    };
    e.max(c)
}

/// Lifts a primitive point back to phase space on the branch the primitive
/// was built on (for conics, with the eliminated `s`).
pub fn lift_primitive_point(
    system: &SystemModel,
    section: &SectionSpec,
    h: f64,
    prim: &FeaturePrimitive,
    p: [f64; 2],
) -> Option<PhasePoint> {
    if !on_section(system, section, h, &prim.shape, p) {
        return None;
    }
    match eliminated(&prim.shape) {
        Some(s_map) => Some(section.embed(p[0], p[1], solved(s_map, p))),
        None => section.lift_with_slack(system, p[0], p[1], h, MEMBERSHIP_SLACK),
    }
}
