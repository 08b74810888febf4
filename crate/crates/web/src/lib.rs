//! Browser bindings. Each exported function has a plain Rust twin returning
//! `lagdesc::Result`, which is what the native tests call; the wrappers
//! only translate errors into JS exceptions.

use lagdesc::features::{analytic_features, Label};
use lagdesc::ld::{hyperbolic_asymptote, ld_point};
use lagdesc::sections::{find_section, grid_ld, Bounds};
use lagdesc::{LDMethod, LDParams, ModelKind, ModelParams, PhasePoint, SystemModel};
use wasm_bindgen::prelude::*;

/// Overlay codes in the flattened output of [`analytic_overlay`].
pub const OVERLAY_LABELS: [Label; 3] = [Label::Nhim, Label::Stable, Label::Unstable];

fn js(e: lagdesc::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Total descriptor on `[-1, 1]²`, `nu * nv` values with `v` as the outer
/// index (first row at `v = -1`). Cells without a lift are `NaN`.
pub fn grid_values(model: &str, section: &str, h: f64, tau: f64, p: f64, nu: usize, nv: usize) -> lagdesc::Result<Vec<f64>> {
    let kind: ModelKind = model.parse()?;
    let system = SystemModel::standard(kind);
    let spec = find_section(kind, section)?;
    let params = LDParams::new(p, tau, 1e-2f64.min(tau), LDMethod::Augmented)?;
    let grid = grid_ld(&system, &spec, h, Bounds::default(), nu, nv, &params)?;
    Ok((0..nv)
        .flat_map(|j| (0..nu).map(move |i| (i, j)))
        .map(|(i, j)| grid.total(i, j).unwrap_or(f64::NAN))
        .collect())
}

/// Analytic NHIM, stable and unstable sets on the section as flattened
/// `[code, u, v]` triples, `code` indexing [`OVERLAY_LABELS`].
pub fn overlay_points(model: &str, section: &str, h: f64) -> lagdesc::Result<Vec<f64>> {
    let kind: ModelKind = model.parse()?;
    let system = SystemModel::standard(kind);
    let spec = find_section(kind, section)?;
    let features = analytic_features(&spec, &system, h)?;
    let mut out = Vec::new();
    for (code, label) in OVERLAY_LABELS.iter().enumerate() {
        for [u, v] in features.samples(*label) {
            out.extend([code as f64, u, v]);
        }
    }
    Ok(out)
}

/// `n` rows of `[tau, M_h, asymptote]` for `tau` evenly spaced in
/// `(0, tau_max]`, from the decoupled 2-DoF model with hyperbolic constants
/// `A`, `B` and the bath at rest.
pub fn asymptote_rows(lambda: f64, p: f64, a: f64, b: f64, tau_max: f64, n: usize) -> lagdesc::Result<Vec<f64>> {
    let system = SystemModel::build(ModelKind::Decoupled2, ModelParams::two_dof(lambda, 1.0), None)?;
    let x = PhasePoint::new(&[0.5 * (a + b), 0.0, 0.5 * (a - b), 0.0])?;
    let mut out = Vec::with_capacity(3 * n);
    for k in 1..=n {
        let tau = tau_max * k as f64 / n as f64;
        let params = LDParams::new(p, tau, 1e-2f64.min(tau), LDMethod::AnalyticQuadrature)?;
        let m = ld_point(&system, &x, &params)?.hyperbolic.unwrap_or(f64::NAN);
        out.extend([tau, m, hyperbolic_asymptote(lambda, p, a, b, tau)]);
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn ld_grid(model: &str, section: &str, h: f64, tau: f64, p: f64, nu: usize, nv: usize) -> Result<Vec<f64>, JsError> {
    grid_values(model, section, h, tau, p, nu, nv).map_err(js)
}

#[wasm_bindgen]
pub fn analytic_overlay(model: &str, section: &str, h: f64) -> Result<Vec<f64>, JsError> {
    overlay_points(model, section, h).map_err(js)
}

#[wasm_bindgen]
pub fn asymptote_curve(lambda: f64, p: f64, a: f64, b: f64, tau_max: f64, n: usize) -> Result<Vec<f64>, JsError> {
    asymptote_rows(lambda, p, a, b, tau_max, n).map_err(js)
}
