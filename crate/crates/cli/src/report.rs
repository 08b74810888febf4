//! JSON verification reports.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use lagdesc::pipeline::SectionVerification;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct LabelEntry {
    pub section: String,
    pub label: &'static str,
    pub n_detected: usize,
    pub n_expected: String,
    /// `null` when there is nothing to measure (no detections or no set).
    pub max_distance: Option<f64>,
    pub mean_distance: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct SectionEntry {
    pub section: String,
    pub pass: bool,
    pub valid_cells: usize,
    pub masked_cells: usize,
    pub overflow_cells: usize,
    pub labels: Vec<LabelEntry>,
}

#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub h: f64,
    pub oracle_h: f64,
    pub tau: f64,
    pub p: f64,
    pub dt: f64,
    pub method: &'static str,
    pub nu: usize,
    pub nv: usize,
    pub bounds: [f64; 4],
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub tool: String,
    pub config: RunSummary,
    pub pass: bool,
    pub entries: Vec<SectionEntry>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn section_entry(v: &SectionVerification) -> SectionEntry {
    let r = &v.report;
    SectionEntry {
        section: r.section.clone(),
        pass: r.pass(),
        valid_cells: v.valid_cells,
        masked_cells: v.masked_cells,
        overflow_cells: v.overflow_cells,
        labels: r
            .entries
            .iter()
            .map(|e| LabelEntry {
                section: r.section.clone(),
                label: e.label.name(),
                n_detected: e.n_detected,
                n_expected: e.n_expected.clone(),
                max_distance: finite(e.max_distance),
                mean_distance: finite(e.mean_distance),
                tolerance: r.tolerance,
                pass: e.pass,
            })
            .collect(),
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
