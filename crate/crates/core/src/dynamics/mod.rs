//! Benchmark quadratic Hamiltonians.
//!
//! The decoupled models are
//! `H = λ/2 (p1² - q1²) + Σ_i ω_i/2 (q_i² + p_i²)` in the layout
//! `(q1, .., qN, p1, .., pN)`. The coupled models are the same Hamiltonians
//! pulled back through a symplectic matrix `C`, stored in the layout
//! `(x, y[, z], p_x, p_y[, p_z])` so that `(q, p) = C · (x, .., p_x, ..)`.

pub mod symplectic;

use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{shape, Error, Result};
pub use symplectic::{check_symplectic, SymplecticMatrix};

pub const MAX_DIM: usize = 6;

/// A point of the 4- or 6-dimensional phase space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    coords: [f64; MAX_DIM],
    dim: usize,
}

impl PhasePoint {
    pub fn new(coords: &[f64]) -> Result<Self> {
        if coords.len() != 4 && coords.len() != 6 {
            return Err(shape("4 or 6 coordinates", coords.len()));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::ParameterDomain {
                name: "coords",
                value: *bad,
                reason: "coordinates must be finite",
            });
        }
        let mut buf = [0.0; MAX_DIM];
        buf[..coords.len()].copy_from_slice(coords);
        Ok(Self {
            coords: buf,
            dim: coords.len(),
        })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim == 4 || dim == 6, "phase space dimension must be 4 or 6");
        Self {
            coords: [0.0; MAX_DIM],
            dim,
        }
    }

    /// Builds a point without the finiteness check (used for tangents and
    /// intermediate states that are validated elsewhere).
    pub(crate) fn from_array(coords: [f64; MAX_DIM], dim: usize) -> Self {
        Self { coords, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    pub(crate) fn raw(&self) -> &[f64; MAX_DIM] {
        &self.coords
    }

    pub fn with(mut self, index: usize, value: f64) -> Self {
        assert!(index < self.dim);
        self.coords[index] = value;
        self
    }

    pub fn max_abs_diff(&self, other: &PhasePoint) -> f64 {
        self.as_slice()
            .iter()
            .zip(other.as_slice())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

impl Index<usize> for PhasePoint {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.as_slice()[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    Decoupled2,
    Coupled2,
    Decoupled3,
    Coupled3,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::Decoupled2,
        ModelKind::Coupled2,
        ModelKind::Decoupled3,
        ModelKind::Coupled3,
    ];

    pub fn dof(self) -> usize {
        match self {
            ModelKind::Decoupled2 | ModelKind::Coupled2 => 2,
            ModelKind::Decoupled3 | ModelKind::Coupled3 => 3,
        }
    }

    pub fn dim(self) -> usize {
        2 * self.dof()
    }

    pub fn is_coupled(self) -> bool {
        matches!(self, ModelKind::Coupled2 | ModelKind::Coupled3)
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Decoupled2 => "decoupled2",
            ModelKind::Coupled2 => "coupled2",
            ModelKind::Decoupled3 => "decoupled3",
            ModelKind::Coupled3 => "coupled3",
        }
    }

    /// Coordinate labels in storage order.
    pub fn coord_names(self) -> &'static [&'static str] {
        match self {
            ModelKind::Decoupled2 => &["q1", "q2", "p1", "p2"],
            ModelKind::Coupled2 => &["x", "y", "px", "py"],
            ModelKind::Decoupled3 => &["q1", "q2", "q3", "p1", "p2", "p3"],
            ModelKind::Coupled3 => &["x", "y", "z", "px", "py", "pz"],
        }
    }

    pub fn coord_index(self, name: &str) -> Option<usize> {
        self.coord_names().iter().position(|n| *n == name)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownModel(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub lambda: f64,
    pub omega2: f64,
    pub omega3: Option<f64>,
}

impl ModelParams {
    pub fn two_dof(lambda: f64, omega2: f64) -> Self {
        Self {
            lambda,
            omega2,
            omega3: None,
        }
    }

    pub fn three_dof(lambda: f64, omega2: f64, omega3: f64) -> Self {
        Self {
            lambda,
            omega2,
            omega3: Some(omega3),
        }
    }

    /// `λ = ω2 (= ω3) = 1`, the parameter set used for every figure.
    pub fn unit(kind: ModelKind) -> Self {
        match kind.dof() {
            2 => Self::two_dof(1.0, 1.0),
            _ => Self::three_dof(1.0, 1.0, 1.0),
        }
    }

    fn validate(&self, kind: ModelKind) -> Result<()> {
        let positive = |name, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::ParameterDomain {
                    name,
                    value: v,
                    reason: "must be finite and > 0",
                })
            }
        };
        positive("lambda", self.lambda)?;
        positive("omega2", self.omega2)?;
        match (kind.dof(), self.omega3) {
            (3, Some(w)) => positive("omega3", w),
            (3, None) => Err(Error::ParameterDomain {
                name: "omega3",
                value: f64::NAN,
                reason: "required for 3-DoF models",
            }),
            (_, Some(w)) => Err(Error::ParameterDomain {
                name: "omega3",
                value: w,
                reason: "only valid for 3-DoF models",
            }),
            (_, None) => Ok(()),
        }
    }

    /// Bath frequencies `[ω2, ω3]` (second entry unused for 2-DoF).
    pub fn bath_frequencies(&self) -> [f64; 2] {
        [self.omega2, self.omega3.unwrap_or(0.0)]
    }
}

/// `A = q1 + p1` and `B = q1 - p1` of the saddle pair in decoupled coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicConstants {
    pub a: f64,
    pub b: f64,
}

impl HyperbolicConstants {
    pub fn on_stable(&self) -> bool {
        self.a == 0.0
    }

    pub fn on_unstable(&self) -> bool {
        self.b == 0.0
    }

    pub fn on_nhim(&self) -> bool {
        self.a == 0.0 && self.b == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reactivity {
    Reactive,
    Nonreactive,
}

/// One of the four benchmark systems with its constant linear operators.
#[derive(Debug, Clone)]
pub struct SystemModel {
    kind: ModelKind,
    params: ModelParams,
    transform: Option<SymplecticMatrix>,
    /// Row-major Jacobian of the vector field in storage coordinates.
    jac: [f64; MAX_DIM * MAX_DIM],
    /// Row-major `C` and `C^{-1}` (identity for decoupled models).
    c: [f64; MAX_DIM * MAX_DIM],
    c_inv: [f64; MAX_DIM * MAX_DIM],
}

impl SystemModel {
    pub fn build(
        kind: ModelKind,
        params: ModelParams,
        transform: Option<SymplecticMatrix>,
    ) -> Result<Self> {
        params.validate(kind)?;
        let n = kind.dim();
        match (&transform, kind.is_coupled()) {
            (Some(t), true) if t.dim() != n => {
                return Err(shape(format!("{n}x{n} transform"), format!("{0}x{0}", t.dim())))
            }
            (Some(_), false) => {
                return Err(shape("no transform for a decoupled model", "transform"))
            }
            (None, true) => return Err(shape(format!("{n}x{n} transform"), "none")),
            _ => {}
        }
        let mut c = [0.0; MAX_DIM * MAX_DIM];
        let mut c_inv = [0.0; MAX_DIM * MAX_DIM];
        match &transform {
            Some(t) => {
                for i in 0..n {
                    for k in 0..n {
                        c[i * MAX_DIM + k] = t.entries()[(i, k)];
                        c_inv[i * MAX_DIM + k] = t.inverse()[(i, k)];
                    }
                }
            }
            None => {
                for i in 0..n {
                    c[i * MAX_DIM + i] = 1.0;
                    c_inv[i * MAX_DIM + i] = 1.0;
                }
            }
        }
        // Decoupled Jacobian: q̇1 = λ p1, ṗ1 = λ q1, q̇i = ωi pi, ṗi = -ωi qi.
        let dof = kind.dof();
        let freqs = params.bath_frequencies();
        let mut a_dec = DMatrix::<f64>::zeros(n, n);
        a_dec[(0, dof)] = params.lambda;
        a_dec[(dof, 0)] = params.lambda;
        for i in 1..dof {
            a_dec[(i, dof + i)] = freqs[i - 1];
            a_dec[(dof + i, i)] = -freqs[i - 1];
        }
        let a = match &transform {
            Some(t) => t.inverse() * a_dec * t.entries(),
            None => a_dec,
        };
        let mut jac = [0.0; MAX_DIM * MAX_DIM];
        for i in 0..n {
            for k in 0..n {
                jac[i * MAX_DIM + k] = a[(i, k)];
            }
        }
        Ok(Self {
            kind,
            params,
            transform,
            jac,
            c,
            c_inv,
        })
    }

    /// The model with unit parameters and, for coupled kinds, the default coupling.
    pub fn standard(kind: ModelKind) -> Self {
        let transform = match kind {
            ModelKind::Coupled2 => Some(SymplecticMatrix::coupled2_default()),
            ModelKind::Coupled3 => Some(SymplecticMatrix::coupled3_default()),
            _ => None,
        };
        Self::build(kind, ModelParams::unit(kind), transform).expect("unit parameters are valid")
    }

    /// Same as [`SystemModel::standard`] with the given parameters.
    pub fn with_params(kind: ModelKind, params: ModelParams) -> Result<Self> {
        let transform = match kind {
            ModelKind::Coupled2 => Some(SymplecticMatrix::coupled2_default()),
            ModelKind::Coupled3 => Some(SymplecticMatrix::coupled3_default()),
            _ => None,
        };
        Self::build(kind, params, transform)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn transform(&self) -> Option<&SymplecticMatrix> {
        self.transform.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn dof(&self) -> usize {
        self.kind.dof()
    }

    pub(crate) fn jac_raw(&self) -> &[f64; MAX_DIM * MAX_DIM] {
        &self.jac
    }

    fn check_dim(&self, x: &PhasePoint) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(shape(self.dim(), x.dim()));
        }
        Ok(())
    }

    fn apply(m: &[f64; MAX_DIM * MAX_DIM], x: &PhasePoint) -> PhasePoint {
        let n = x.dim();
        let mut out = [0.0; MAX_DIM];
        for (i, o) in out.iter_mut().enumerate().take(n) {
            *o = (0..n).map(|k| m[i * MAX_DIM + k] * x.coords[k]).sum();
        }
        PhasePoint::from_array(out, n)
    }

    /// Storage coordinates to decoupled `(q, p)` coordinates (`C·x`).
    pub fn to_decoupled(&self, x: &PhasePoint) -> Result<PhasePoint> {
        self.check_dim(x)?;
        Ok(self.to_decoupled_unchecked(x))
    }

    pub(crate) fn to_decoupled_unchecked(&self, x: &PhasePoint) -> PhasePoint {
        if self.transform.is_some() {
            Self::apply(&self.c, x)
        } else {
            *x
        }
    }

    /// Decoupled `(q, p)` coordinates back to storage coordinates (`C^{-1}·w`).
    pub fn from_decoupled(&self, w: &PhasePoint) -> Result<PhasePoint> {
        self.check_dim(w)?;
        Ok(self.from_decoupled_unchecked(w))
    }

    pub(crate) fn from_decoupled_unchecked(&self, w: &PhasePoint) -> PhasePoint {
        if self.transform.is_some() {
            Self::apply(&self.c_inv, w)
        } else {
            *w
        }
    }

    /// Hamiltonian in decoupled coordinates.
    fn energy_decoupled(&self, w: &PhasePoint) -> f64 {
        let n = self.dof();
        let p = &self.params;
        let freqs = p.bath_frequencies();
        let mut h = 0.5 * p.lambda * (w.coords[n] * w.coords[n] - w.coords[0] * w.coords[0]);
        for i in 1..n {
            let (q, pm) = (w.coords[i], w.coords[n + i]);
            h += 0.5 * freqs[i - 1] * (q * q + pm * pm);
        }
        h
    }

    /// `H(x)`; coupled models evaluate the decoupled Hamiltonian at `C·x`.
    pub fn energy(&self, x: &PhasePoint) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.energy_unchecked(x))
    }

    pub(crate) fn energy_unchecked(&self, x: &PhasePoint) -> f64 {
        self.energy_decoupled(&self.to_decoupled_unchecked(x))
    }

    /// Per-DoF energies `[H_r, H_b2(, H_b3)]` in decoupled coordinates.
    pub fn mode_energies(&self, x: &PhasePoint) -> Result<Vec<f64>> {
        let w = self.to_decoupled(x)?;
        let n = self.dof();
        let freqs = self.params.bath_frequencies();
        let mut out = vec![0.5 * self.params.lambda * (w[n] * w[n] - w[0] * w[0])];
        for i in 1..n {
            out.push(0.5 * freqs[i - 1] * (w[i] * w[i] + w[n + i] * w[n + i]));
        }
        Ok(out)
    }

    /// Hamiltonian vector field `J ∇H(x)`.
    pub fn vector_field(&self, x: &PhasePoint) -> Result<PhasePoint> {
        self.check_dim(x)?;
        Ok(Self::apply(&self.jac, x))
    }

    pub(crate) fn vector_field_unchecked(&self, x: &PhasePoint) -> PhasePoint {
        Self::apply(&self.jac, x)
    }

    /// Constant Jacobian of the vector field.
    pub fn jacobian(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, k| self.jac[i * MAX_DIM + k])
    }

    /// The `2N` eigenvalues of the Jacobian, sorted by real then imaginary part.
    pub fn jacobian_spectrum(&self) -> Vec<Complex<f64>> {
        let mut ev: Vec<Complex<f64>> = self.jacobian().complex_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        ev
    }

    /// Saddle-pair constants of the trajectory through `x`.
    pub fn hyperbolic_constants(&self, x: &PhasePoint) -> Result<HyperbolicConstants> {
        let w = self.to_decoupled(x)?;
        let n = self.dof();
        Ok(HyperbolicConstants {
            a: w[0] + w[n],
            b: w[0] - w[n],
        })
    }

    /// Closed-form flow in decoupled coordinates.
    pub(crate) fn flow_decoupled(&self, w: &PhasePoint, t: f64) -> PhasePoint {
        let n = self.dof();
        let lam = self.params.lambda;
        let freqs = self.params.bath_frequencies();
        let mut out = [0.0; MAX_DIM];
        let a = w.coords[0] + w.coords[n];
        let b = w.coords[0] - w.coords[n];
        let (ep, em) = ((lam * t).exp(), (-lam * t).exp());
        out[0] = 0.5 * (a * ep + b * em);
        out[n] = 0.5 * (a * ep - b * em);
        for i in 1..n {
            let (s, c) = (freqs[i - 1] * t).sin_cos();
            let (q, p) = (w.coords[i], w.coords[n + i]);
            out[i] = q * c + p * s;
            out[n + i] = p * c - q * s;
        }
        PhasePoint::from_array(out, w.dim())
    }

    /// Exact solution `x(t)` through `x0`; `t` may be negative.
    pub fn analytic_flow(&self, x0: &PhasePoint, t: f64) -> Result<PhasePoint> {
        self.check_dim(x0)?;
        Ok(self.analytic_flow_unchecked(x0, t))
    }

    pub(crate) fn analytic_flow_unchecked(&self, x0: &PhasePoint, t: f64) -> PhasePoint {
        if t == 0.0 {
            return *x0;
        }
        let w = self.to_decoupled_unchecked(x0);
        self.from_decoupled_unchecked(&self.flow_decoupled(&w, t))
    }

    /// Index of the reaction coordinate (`q1` or `p_x`) in storage layout.
    pub fn reaction_coordinate(&self) -> usize {
        if self.kind.is_coupled() {
            self.dof()
        } else {
            0
        }
    }

    /// Reactive iff the reaction coordinate takes both signs on `[0, tau]`,
    /// sampled every `1e-3 tau` along the analytic flow.
    pub fn classify_reactive(&self, x0: &PhasePoint, tau: f64) -> Result<Reactivity> {
        self.check_dim(x0)?;
        if !(tau > 0.0) {
            return Err(Error::ParameterDomain {
                name: "tau",
                value: tau,
                reason: "must be > 0",
            });
        }
        let k = self.reaction_coordinate();
        let (mut neg, mut pos) = (false, false);
        for i in 0..=1000 {
            let t = tau * i as f64 * 1e-3;
            let v = self.analytic_flow_unchecked(x0, t)[k];
            neg |= v < 0.0;
            pos |= v > 0.0;
            if neg && pos {
                return Ok(Reactivity::Reactive);
            }
        }
        Ok(Reactivity::Nonreactive)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pt(v: &[f64]) -> PhasePoint {
        PhasePoint::new(v).unwrap()
    }

    #[test]
    fn phase_point_rejects_bad_input() {
        assert!(PhasePoint::new(&[0.0; 5]).is_err());
        assert!(PhasePoint::new(&[0.0, f64::NAN, 0.0, 0.0]).is_err());
    }

    #[test]
    fn rejects_non_positive_parameters() {
        let err = SystemModel::build(ModelKind::Decoupled2, ModelParams::two_dof(0.0, 1.0), None);
        assert!(matches!(err, Err(Error::ParameterDomain { name: "lambda", .. })));
        let err = SystemModel::build(ModelKind::Decoupled3, ModelParams::two_dof(1.0, 1.0), None);
        assert!(matches!(err, Err(Error::ParameterDomain { name: "omega3", .. })));
    }

    #[test]
    fn coupled_requires_matching_transform() {
        let p = ModelParams::unit(ModelKind::Coupled3);
        let err = SystemModel::build(ModelKind::Coupled3, p, Some(SymplecticMatrix::coupled2_default()));
        assert!(matches!(err, Err(Error::Shape { .. })));
        assert!(SystemModel::build(ModelKind::Coupled3, p, None).is_err());
    }

    #[test]
    fn energy_examples() {
        let s = SystemModel::standard(ModelKind::Decoupled2);
        assert_abs_diff_eq!(s.energy(&pt(&[0.0, 0.0, 0.0, 0.4f64.sqrt()])).unwrap(), 0.2, epsilon = 1e-15);
        assert_eq!(s.energy(&pt(&[1.0, 0.0, 1.0, 0.0])).unwrap(), 0.0);
        for k in ModelKind::ALL {
            let s = SystemModel::standard(k);
            assert_eq!(s.energy(&PhasePoint::zeros(k.dim())).unwrap(), 0.0);
        }
        assert!(s.energy(&PhasePoint::zeros(6)).is_err());
    }

    #[test]
    fn vector_field_examples() {
        let s = SystemModel::standard(ModelKind::Decoupled2);
        let v = s.vector_field(&pt(&[0.0, 0.0, 1.0, 0.0])).unwrap();
        assert_eq!(v.as_slice(), &[1.0, 0.0, 0.0, 0.0]);
        let v = s.vector_field(&pt(&[0.0, 1.0, 0.0, 0.0])).unwrap();
        assert_eq!(v.as_slice(), &[0.0, 0.0, 0.0, -1.0]);
        let s3 = SystemModel::standard(ModelKind::Decoupled3);
        let v = s3.vector_field(&pt(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(v.as_slice(), &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let c2 = SystemModel::standard(ModelKind::Coupled2);
        let v = c2.vector_field(&PhasePoint::zeros(4)).unwrap();
        assert!(v.as_slice().iter().all(|x| *x == 0.0));
    }

    #[test]
    fn spectrum_decoupled_block() {
        let s = SystemModel::build(ModelKind::Decoupled2, ModelParams::two_dof(2.0, 3.0), None).unwrap();
        let ev = s.jacobian_spectrum();
        let expected = [(-2.0, 0.0), (0.0, -3.0), (0.0, 3.0), (2.0, 0.0)];
        for (e, (re, im)) in ev.iter().zip(expected) {
            assert_abs_diff_eq!(e.re, re, epsilon = 1e-10);
            assert_abs_diff_eq!(e.im, im, epsilon = 1e-10);
        }
    }

    #[test]
    fn flow_examples() {
        let s = SystemModel::standard(ModelKind::Decoupled3);
        let x0 = pt(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(s.analytic_flow(&x0, 0.0).unwrap(), x0);
        let x = s.analytic_flow(&x0, 1.3).unwrap();
        assert_abs_diff_eq!(x[0], 1.3f64.cosh(), epsilon = 1e-14);
        assert_abs_diff_eq!(x[3], 1.3f64.sinh(), epsilon = 1e-14);
        let s2 = SystemModel::standard(ModelKind::Decoupled2);
        let x = s2
            .analytic_flow(&pt(&[0.0, 1.0, 0.0, 0.0]), std::f64::consts::FRAC_PI_2)
            .unwrap();
        assert_abs_diff_eq!(x[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(x[3], -1.0, epsilon = 1e-15);
    }

    #[test]
    fn reactive_classification() {
        let s = SystemModel::standard(ModelKind::Decoupled2);
        let on_shell = |q1: f64, p1: f64| {
            let hb = 0.2 - 0.5 * (p1 * p1 - q1 * q1);
            pt(&[q1, 0.0, p1, (2.0 * hb).sqrt()])
        };
        assert_eq!(s.classify_reactive(&on_shell(-0.1, 0.2), 10.0).unwrap(), Reactivity::Reactive);
        assert_eq!(s.classify_reactive(&on_shell(-0.2, 0.1), 10.0).unwrap(), Reactivity::Nonreactive);
        assert_eq!(s.classify_reactive(&on_shell(0.1, 0.1), 10.0).unwrap(), Reactivity::Nonreactive);
    }
}
