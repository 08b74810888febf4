//! Whole-section verification: grid the descriptor, detect its minima and
//! ridges, and compare them with the analytic sets.

use serde::{Deserialize, Serialize};

use crate::dynamics::SystemModel;
use crate::error::Result;
use crate::features::{
    analytic_features_in, crossing_mask, detection_mask, mask_points, match_features, Coverage,
    Detections, DetectorConfig, FeatureSet, Label, MatchReport,
};
use crate::ld::LDParams;
use crate::sections::{grid_ld, grid_ld_with, Bounds, CellStatus, Component, GridField, SectionSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub h: f64,
    pub bounds: Bounds,
    pub nu: usize,
    pub nv: usize,
    pub params: LDParams,
    /// Distance tolerance; `None` means one grid spacing.
    pub tol: Option<f64>,
    pub detector: DetectorConfig,
    /// Energy handed to the analytic oracle when it differs from `h`.
    pub oracle_h: Option<f64>,
    /// Worker count for the grid; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            h: 0.2,
            bounds: Bounds::default(),
            nu: 400,
            nv: 400,
            params: LDParams::default(),
            tol: None,
            detector: DetectorConfig::default(),
            oracle_h: None,
            threads: None,
        }
    }
}

impl VerifyConfig {
    /// The larger of the two cell sizes.
    pub fn grid_spacing(&self) -> f64 {
        let du = (self.bounds.u_max - self.bounds.u_min) / self.nu as f64;
        let dv = (self.bounds.v_max - self.bounds.v_min) / self.nv as f64;
        du.max(dv)
    }

    pub fn tolerance(&self) -> f64 {
        self.tol.unwrap_or_else(|| self.grid_spacing())
    }
}

/// Detection masks of one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionMasks {
    pub forward: Vec<bool>,
    pub backward: Vec<bool>,
    pub total: Vec<bool>,
    pub nhim: Vec<bool>,
}

/// Minima and ridges of the forward, backward and total descriptors. The
/// forward field marks the stable manifold, the backward field the unstable
/// one, and NHIM candidates are forward cells next to backward cells.
pub fn detection_masks(grid: &GridField, config: &DetectorConfig) -> DetectionMasks {
    let forward = detection_mask(grid, Component::Forward, config);
    let backward = detection_mask(grid, Component::Backward, config);
    let total = detection_mask(grid, Component::Total, config);
    let nhim = crossing_mask(grid.nu, grid.nv, &forward, &backward);
    DetectionMasks {
        forward,
        backward,
        total,
        nhim,
    }
}

pub fn detections(grid: &GridField, masks: &DetectionMasks) -> Detections {
    Detections {
        nhim: mask_points(grid, &masks.nhim),
        stable: mask_points(grid, &masks.forward),
        unstable: mask_points(grid, &masks.backward),
        manifolds: mask_points(grid, &masks.total),
    }
}

/// Samples of `label` whose cell and its 3x3 neighbourhood are valid, and
/// how many of them have a detection within `tol`.
pub fn coverage(grid: &GridField, features: &FeatureSet, label: Label, mask: &[bool], tol: f64) -> Coverage {
    let (du, dv) = (grid.du(), grid.dv());
    let b = grid.bounds;
    let reach_u = (tol / du).ceil() as isize + 1;
    let reach_v = (tol / dv).ceil() as isize + 1;
    let (nu, nv) = (grid.nu as isize, grid.nv as isize);
    let mut cov = Coverage {
        checked: 0,
        covered: 0,
        max_gap: 0.0,
    };
    for p in features.samples(label) {
        let i = ((p[0] - b.u_min) / du).floor() as isize;
        let j = ((p[1] - b.v_min) / dv).floor() as isize;
        if i < 1 || j < 1 || i >= nu - 1 || j >= nv - 1 {
            continue;
        }
        let interior = (j - 1..=j + 1).all(|jj| (i - 1..=i + 1).all(|ii| grid.is_valid(ii as usize, jj as usize)));
        if !interior {
            continue;
        }
        cov.checked += 1;
        let mut best = f64::INFINITY;
        for jj in (j - reach_v).max(0)..=(j + reach_v).min(nv - 1) {
            for ii in (i - reach_u).max(0)..=(i + reach_u).min(nu - 1) {
                if mask[(jj * nu + ii) as usize] {
                    let d = (grid.u(ii as usize) - p[0]).hypot(grid.v(jj as usize) - p[1]);
                    best = best.min(d);
                }
            }
        }
        if best <= tol {
            cov.covered += 1;
        }
        cov.max_gap = cov.max_gap.max(best);
    }
    cov
}

/// Outcome of verifying one section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionVerification {
    pub report: MatchReport,
    pub valid_cells: usize,
    pub masked_cells: usize,
    pub overflow_cells: usize,
}

/// Matches the detections of an existing grid against the analytic sets.
pub fn verify_grid(system: &SystemModel, grid: &GridField, config: &VerifyConfig) -> Result<SectionVerification> {
    let tol = config.tolerance();
    let oracle_h = config.oracle_h.unwrap_or(grid.h);
    let features = analytic_features_in(&grid.section, system, oracle_h, grid.bounds)?;
    let masks = detection_masks(grid, &config.detector);
    let det = detections(grid, &masks);
    let mut report = match_features(&det, &features, tol);
    for entry in &mut report.entries {
        let mask = match entry.label {
            Label::Nhim => &masks.nhim,
            Label::Stable => &masks.forward,
            Label::Unstable => &masks.backward,
            _ => &masks.total,
        };
        entry.coverage = Some(coverage(grid, &features, entry.label, mask, tol));
    }
    Ok(SectionVerification {
        report,
        valid_cells: grid.count(CellStatus::Valid),
        masked_cells: grid.count(CellStatus::NoLift),
        overflow_cells: grid.count(CellStatus::Overflow),
    })
}

/// Grids `section` and verifies it.
pub fn verify_section(
    system: &SystemModel,
    section: &SectionSpec,
    config: &VerifyConfig,
) -> Result<(GridField, SectionVerification)> {
    let grid = match config.threads {
        Some(t) => grid_ld_with(t, system, section, config.h, config.bounds, config.nu, config.nv, &config.params)?,
        None => grid_ld(system, section, config.h, config.bounds, config.nu, config.nv, &config.params)?,
    };
    let outcome = verify_grid(system, &grid, config)?;
    Ok((grid, outcome))
}
