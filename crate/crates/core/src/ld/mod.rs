//! Lagrangian descriptor `M_p(x0, tau) = ∫_{-tau}^{tau} Σ_i |ẋ_i|^p dt`.
//!
//! The forward part integrates over `[0, tau]` and is minimal on the stable
//! manifold; the backward part integrates over `[-tau, 0]` and is minimal on
//! the unstable manifold.

pub mod asymptotics;
mod augmented;
mod quadrature;

use serde::{Deserialize, Serialize};

use crate::dynamics::{ModelKind, PhasePoint, SystemModel, MAX_DIM};
use crate::error::{shape, Error, Result};

pub use asymptotics::{beta, elliptic_arclength, elliptic_average_limit, hyperbolic_asymptote};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LDMethod {
    /// RK4 on the state with the integrand accumulated at the stage points.
    Augmented,
    /// Composite Simpson over the closed-form flow, split at zero crossings.
    AnalyticQuadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LDParams {
    pub p: f64,
    pub tau: f64,
    pub t0: f64,
    pub method: LDMethod,
    pub dt: f64,
}

impl Default for LDParams {
    fn default() -> Self {
        Self {
            p: 0.5,
            tau: 10.0,
            t0: 0.0,
            method: LDMethod::Augmented,
            dt: 1e-2,
        }
    }
}

impl LDParams {
    pub fn new(p: f64, tau: f64, dt: f64, method: LDMethod) -> Result<Self> {
        let params = Self {
            p,
            tau,
            t0: 0.0,
            method,
            dt,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_method(mut self, method: LDMethod) -> Self {
        self.method = method;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::ParameterDomain {
                name: "p",
                value: self.p,
                reason: "exponent must lie in (0, 1]",
            });
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::ParameterDomain {
                name: "tau",
                value: self.tau,
                reason: "must be finite and > 0",
            });
        }
        if !(self.dt > 0.0 && self.dt <= self.tau) {
            return Err(Error::ParameterDomain {
                name: "dt",
                value: self.dt,
                reason: "must satisfy 0 < dt <= tau",
            });
        }
        if !self.t0.is_finite() {
            return Err(Error::ParameterDomain {
                name: "t0",
                value: self.t0,
                reason: "must be finite",
            });
        }
        Ok(())
    }

    /// Number of uniform steps covering `[0, tau]` with step at most `dt`.
    pub fn steps(&self) -> usize {
        ((self.tau / self.dt) - 1e-9).ceil().max(1.0) as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LDResult {
    pub forward: f64,
    pub backward: f64,
    pub total: f64,
    /// One integral per storage coordinate, forward plus backward.
    pub per_dof: Vec<f64>,
    pub forward_per_dof: Vec<f64>,
    pub backward_per_dof: Vec<f64>,
    /// Saddle-pair part, computed in decoupled coordinates.
    pub hyperbolic: Option<f64>,
    /// Bath part, computed in decoupled coordinates.
    pub elliptic: Option<f64>,
}

/// Forward and backward totals only; what grid evaluation needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LDTotals {
    pub forward: f64,
    pub backward: f64,
}

impl LDTotals {
    pub fn total(&self) -> f64 {
        self.forward + self.backward
    }
}

/// Per-coordinate integrals over one half window.
pub(crate) fn half_window(
    system: &SystemModel,
    x0: &PhasePoint,
    direction: Direction,
    params: &LDParams,
) -> Result<[f64; MAX_DIM]> {
    match params.method {
        LDMethod::Augmented => augmented::integrate(system, x0, direction, params).map(|r| r.1),
        LDMethod::AnalyticQuadrature => Ok(quadrature::integrate(system, x0, direction, params)),
    }
}

fn check(system: &SystemModel, x0: &PhasePoint, params: &LDParams) -> Result<()> {
    params.validate()?;
    if x0.dim() != system.dim() {
        return Err(shape(system.dim(), x0.dim()));
    }
    Ok(())
}

/// Advances `x0` over `tau` with fixed-step RK4 (backward integrates the
/// reversed field) and returns the endpoint with the per-coordinate
/// integrals of `|ẋ_i|^p`.
pub fn integrate_augmented(
    system: &SystemModel,
    x0: &PhasePoint,
    direction: Direction,
    params: &LDParams,
) -> Result<(PhasePoint, Vec<f64>)> {
    check(system, x0, params)?;
    let (end, acc) = augmented::integrate(system, x0, direction, params)?;
    Ok((end, acc[..system.dim()].to_vec()))
}

/// Forward and backward descriptor without the per-coordinate breakdown.
pub fn ld_totals(system: &SystemModel, x0: &PhasePoint, params: &LDParams) -> Result<LDTotals> {
    check(system, x0, params)?;
    let n = system.dim();
    let f = half_window(system, x0, Direction::Forward, params)?;
    let b = half_window(system, x0, Direction::Backward, params)?;
    Ok(LDTotals {
        forward: f[..n].iter().sum(),
        backward: b[..n].iter().sum(),
    })
}

/// Full descriptor at `x0`, including the saddle / bath split.
pub fn ld_point(system: &SystemModel, x0: &PhasePoint, params: &LDParams) -> Result<LDResult> {
    check(system, x0, params)?;
    let n = system.dim();
    let f = half_window(system, x0, Direction::Forward, params)?;
    let b = half_window(system, x0, Direction::Backward, params)?;
    let forward_per_dof = f[..n].to_vec();
    let backward_per_dof = b[..n].to_vec();
    let per_dof: Vec<f64> = (0..n).map(|i| f[i] + b[i]).collect();
    let forward: f64 = forward_per_dof.iter().sum();
    let backward: f64 = backward_per_dof.iter().sum();
    let (hyperbolic, elliptic) = if system.kind().is_coupled() {
        let (h, e) = split_components(system, x0, params)?;
        (h, e)
    } else {
        split_from_per_dof(system.dof(), &per_dof)
    };
    Ok(LDResult {
        forward,
        backward,
        total: forward + backward,
        per_dof,
        forward_per_dof,
        backward_per_dof,
        hyperbolic: Some(hyperbolic),
        elliptic: Some(elliptic),
    })
}

fn split_from_per_dof(dof: usize, per_dof: &[f64]) -> (f64, f64) {
    let hyperbolic = per_dof[0] + per_dof[dof];
    let elliptic = (1..dof).map(|i| per_dof[i] + per_dof[dof + i]).sum();
    (hyperbolic, elliptic)
}

fn decoupled_kind(kind: ModelKind) -> ModelKind {
    match kind.dof() {
        2 => ModelKind::Decoupled2,
        _ => ModelKind::Decoupled3,
    }
}

/// `(M_h, M_e)`: saddle-pair and bath contributions in decoupled
/// coordinates. Their sum is the decoupled-coordinate descriptor, which for a
/// coupled model differs from the descriptor in storage coordinates.
pub fn split_components(system: &SystemModel, x0: &PhasePoint, params: &LDParams) -> Result<(f64, f64)> {
    check(system, x0, params)?;
    let w0 = system.to_decoupled(x0)?;
    let dec = if system.kind().is_coupled() {
        SystemModel::build(decoupled_kind(system.kind()), *system.params(), None)?
    } else {
        system.clone()
    };
    let n = dec.dim();
    let f = half_window(&dec, &w0, Direction::Forward, params)?;
    let b = half_window(&dec, &w0, Direction::Backward, params)?;
    let per_dof: Vec<f64> = (0..n).map(|i| f[i] + b[i]).collect();
    Ok(split_from_per_dof(dec.dof(), &per_dof))
}
