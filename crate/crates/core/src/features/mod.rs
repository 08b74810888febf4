//! Analytic NHIM and manifold sets on sections, detection of descriptor
//! minima and ridges on grids, and matching of the two.

mod analytic;
mod detect;
mod matching;

use serde::{Deserialize, Serialize};

use crate::dynamics::{PhasePoint, SystemModel};
use crate::error::{Error, Result};

pub use analytic::{
    analytic_features, analytic_features_in, defining_residual, lift_primitive_point, Affine, Conic,
    FeaturePrimitive, FeatureSet, Label, PrimitiveKind, Shape, CURVE_SAMPLES,
};
pub use detect::{
    crossing_mask, detect_minima, detect_singularities, detection_mask, mask_points,
    median_abs_difference, singularity_mask, singularity_mask_with, slice_minima, slice_minima_with,
    DetectorConfig, DEFAULT_KAPPA,
};
pub use matching::{
    match_features, match_label, Coverage, Detections, LabelMatch, MatchReport, MATCHED_LABELS,
};

/// Largest `|H - h|` accepted by [`ds_membership`].
pub const SHELL_TOL: f64 = 1e-9;
/// A saddle coordinate below this magnitude counts as zero.
pub const DS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DsMembership {
    /// On the dividing surface with `p1 > 0`.
    ForwardDs,
    /// On the dividing surface with `p1 < 0`.
    BackwardDs,
    /// `q1 = p1 = 0`: where the two hemispheres join.
    NhimSeam,
    OffDs,
}

/// Classifies an on-shell point against the dividing surface `q1 = 0`.
///
/// `q1` and its conjugate `p1` are read in decoupled coordinates, so for the
/// coupled models this is `p_x = 0` split by the sign of
/// `-x + p_x + p_y [+ p_z]`.
pub fn ds_membership(system: &SystemModel, x: &PhasePoint, h: f64) -> Result<DsMembership> {
    let residual = (system.energy(x)? - h).abs();
    if !(residual <= SHELL_TOL) {
        return Err(Error::EnergyMismatch { residual });
    }
    let w = system.to_decoupled(x)?;
    let (q1, p1) = (w[0], w[system.dof()]);
    Ok(if q1.abs() > DS_TOL {
        DsMembership::OffDs
    } else if p1 > DS_TOL {
        DsMembership::ForwardDs
    } else if p1 < -DS_TOL {
        DsMembership::BackwardDs
    } else {
        DsMembership::NhimSeam
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ModelKind;

    #[test]
    fn membership_examples() {
        let s = SystemModel::standard(ModelKind::Decoupled2);
        // p1 = 0.4 leaves 0.2 - 0.08 = 0.12 for the bath.
        let r = (2.0f64 * 0.12).sqrt();
        let x = PhasePoint::new(&[0.0, 0.0, 0.4, r]).unwrap();
        assert_eq!(ds_membership(&s, &x, 0.2).unwrap(), DsMembership::ForwardDs);
        let x = PhasePoint::new(&[0.0, 0.0, -0.4, r]).unwrap();
        assert_eq!(ds_membership(&s, &x, 0.2).unwrap(), DsMembership::BackwardDs);
        let x = PhasePoint::new(&[0.0, 0.0, 0.0, 0.4f64.sqrt()]).unwrap();
        assert_eq!(ds_membership(&s, &x, 0.2).unwrap(), DsMembership::NhimSeam);
        // q1 = 0.3: p1² = 0.09 + 0.4 - 2 H_bath; take the bath at rest.
        let x = PhasePoint::new(&[0.3, 0.0, (0.49f64).sqrt(), 0.0]).unwrap();
        assert_eq!(ds_membership(&s, &x, 0.2).unwrap(), DsMembership::OffDs);
    }

    #[test]
    fn membership_rejects_off_shell_points() {
        let s = SystemModel::standard(ModelKind::Decoupled2);
        let x = PhasePoint::new(&[0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(ds_membership(&s, &x, 0.2), Err(Error::EnergyMismatch { .. })));
    }

    #[test]
    fn coupled_membership_reads_px() {
        let s = SystemModel::standard(ModelKind::Coupled2);
        // x = 0, y = 0, p_x = 0, p_y = t: q2 = t, p1 = t, p2 = t.
        // H = λ/2 t² + ω/2 (t² + t²) = 1.5 t² at unit parameters.
        let t = (0.2f64 / 1.5).sqrt();
        let x = PhasePoint::new(&[0.0, 0.0, 0.0, t]).unwrap();
        assert_eq!(ds_membership(&s, &x, 0.2).unwrap(), DsMembership::ForwardDs);
    }
}
