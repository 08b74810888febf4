use serde::{Deserialize, Serialize};

use super::analytic::{FeatureSet, Label, PrimitiveKind};

/// Detected points per label, in `(u, v)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Detections {
    pub nhim: Vec<[f64; 2]>,
    pub stable: Vec<[f64; 2]>,
    pub unstable: Vec<[f64; 2]>,
    pub manifolds: Vec<[f64; 2]>,
}

impl Detections {
    pub fn get(&self, label: Label) -> &[[f64; 2]] {
        match label {
            Label::Nhim => &self.nhim,
            Label::Stable => &self.stable,
            Label::Unstable => &self.unstable,
            Label::Manifolds => &self.manifolds,
            Label::DividingSurface => &[],
        }
    }
}

/// How much of the analytic set has a detection nearby.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    /// Analytic samples away from masked cells.
    pub checked: usize,
    /// Of those, samples with a detection within the tolerance.
    pub covered: usize,
    /// Largest distance from a checked sample to its nearest detection.
    pub max_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelMatch {
    pub label: Label,
    pub n_detected: usize,
    pub n_expected: String,
    pub max_distance: f64,
    pub mean_distance: f64,
    pub pass: bool,
    /// For point primitives: each analytic point and the distance to its
    /// nearest detection.
    pub point_hits: Vec<([f64; 2], f64)>,
    pub coverage: Option<Coverage>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub section: String,
    pub tolerance: f64,
    pub entries: Vec<LabelMatch>,
}

impl MatchReport {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn get(&self, label: Label) -> Option<&LabelMatch> {
        self.entries.iter().find(|e| e.label == label)
    }
}

/// Labels compared by [`match_features`], in report order.
pub const MATCHED_LABELS: [Label; 4] = [Label::Nhim, Label::Stable, Label::Unstable, Label::Manifolds];

/// Compares `detected` points against the analytic set `label`.
///
/// `pass` holds iff every detection lies within `tol` of the set and the
/// detections are non-empty whenever the set is. An empty detection set
/// against an empty analytic set passes with distance 0.
pub fn match_label(detected: &[[f64; 2]], analytic: &FeatureSet, label: Label, tol: f64) -> LabelMatch {
    let expected_empty = analytic.is_empty(label);
    let distances: Vec<f64> = detected.iter().map(|p| analytic.distance(label, *p)).collect();
    let max_distance = distances.iter().copied().fold(0.0, f64::max);
    let mean_distance = if distances.is_empty() {
        0.0
    } else {
        distances.iter().sum::<f64>() / distances.len() as f64
    };
    let pass = max_distance <= tol && (expected_empty || !detected.is_empty());
    let n_expected = analytic
        .primitives(label)
        .iter()
        .map(|p| p.describe())
        .collect::<Vec<_>>()
        .join(" + ");
    let point_hits = analytic
        .primitives(label)
        .iter()
        .filter(|p| p.kind == PrimitiveKind::Points)
        .flat_map(|p| p.samples.iter())
        .map(|a| {
            let d = detected
                .iter()
                .map(|p| (p[0] - a[0]).hypot(p[1] - a[1]))
                .fold(f64::INFINITY, f64::min);
            (*a, d)
        })
        .collect();
    LabelMatch {
        label,
        n_detected: detected.len(),
        n_expected,
        max_distance,
        mean_distance,
        pass,
        point_hits,
        coverage: None,
    }
}

/// Matches every label of [`MATCHED_LABELS`].
pub fn match_features(detected: &Detections, analytic: &FeatureSet, tol: f64) -> MatchReport {
    MatchReport {
        section: analytic.section.name.clone(),
        tolerance: tol,
        entries: MATCHED_LABELS
            .iter()
            .map(|l| match_label(detected.get(*l), analytic, *l, tol))
            .collect(),
    }
}
