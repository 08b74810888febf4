use crate::dynamics::ModelKind;
use crate::error::{Error, Result};

use super::{Branch, Cmp, Condition, Quantity, SectionSpec};

/// `(name, u, v, fixed, solve, conditions)`; every fixed coordinate is 0.
/// A condition is `<coord>[']` followed by `>` or `>=`, the prime marking a
/// component of the vector field.
type Row = (
    &'static str,
    &'static str,
    &'static str,
    &'static [&'static str],
    &'static str,
    &'static [&'static str],
);

const DECOUPLED2: &[Row] = &[
    ("q1p1", "q1", "p1", &["q2"], "p2", &["q2'>", "p2>"]),
    ("q2p2", "q2", "p2", &["q1"], "p1", &["q1'>=", "p1>="]),
    ("q1q2", "q1", "q2", &["p1"], "p2", &["p2>"]),
    ("p1p2", "p1", "p2", &["q2"], "q1", &["q1>="]),
    ("q1p2", "q1", "p2", &["q2"], "p1", &["p1>="]),
    ("q2p1", "q2", "p1", &["q1"], "p2", &["p2>="]),
];

const COUPLED2: &[Row] = &[
    ("xpx", "x", "px", &["y"], "py", &["y'>"]),
    ("xy", "x", "y", &["px"], "py", &["py>", "px'>="]),
    ("ypy", "y", "py", &["x"], "px", &["px>", "x'>"]),
    ("pxpy", "px", "py", &["x"], "y", &["y>", "x'>"]),
    ("xpy", "x", "py", &["y"], "px", &["px>", "y'>"]),
    ("ypx", "y", "px", &["x"], "py", &["py>", "x'>"]),
];

const DECOUPLED3: &[Row] = &[
    ("q1p1", "q1", "p1", &["q2", "p2", "q3"], "p3", &["q3'>", "p3>"]),
    ("q2p2", "q2", "p2", &["q1", "q3", "p3"], "p1", &["q1'>", "p1>"]),
    ("q3p3", "q3", "p3", &["p1", "q2", "p2"], "q1", &["p1'>", "q1>"]),
    ("q1q2", "q1", "q2", &["p1", "p2", "q3"], "p3", &["q3'>", "p3>"]),
    ("q2q3", "q2", "q3", &["q1", "p2", "p3"], "p1", &["q1'>=", "p1>="]),
    ("q3q1", "q3", "q1", &["q2", "p2", "p3"], "p1", &["q1'>", "p1>"]),
    ("p2p3", "p2", "p3", &["p1", "q2", "q3"], "q1", &["p1'>", "q1>"]),
    ("q1p3", "q1", "p3", &["p1", "q2", "q3"], "p2", &["q2'>", "p2>"]),
    ("q3p2", "q3", "p2", &["q1", "q2", "p3"], "p1", &["q1'>", "p1>"]),
];

const COUPLED3: &[Row] = &[
    ("xpx", "x", "px", &["y", "z", "py"], "pz", &["pz>", "z'>"]),
    ("ypy", "y", "py", &["x", "z", "pz"], "px", &["px>", "x'>"]),
    ("zpz", "z", "pz", &["x", "y", "py"], "px", &["px>", "x'>"]),
    ("xpz", "x", "pz", &["px", "y", "z"], "py", &["y'>"]),
    ("ypz", "y", "pz", &["x", "px", "z"], "py", &["py>", "x'>"]),
    ("xz", "x", "z", &["y", "px", "pz"], "py", &["pz'>"]),
    ("yz", "y", "z", &["x", "px", "py"], "pz", &["pz>", "px'>"]),
    ("zpy", "z", "py", &["x", "px", "y"], "pz", &["y'>"]),
    ("pypz", "py", "pz", &["x", "y", "z"], "px", &["x'>"]),
];

fn rows(kind: ModelKind) -> &'static [Row] {
    match kind {
        ModelKind::Decoupled2 => DECOUPLED2,
        ModelKind::Coupled2 => COUPLED2,
        ModelKind::Decoupled3 => DECOUPLED3,
        ModelKind::Coupled3 => COUPLED3,
    }
}

fn index(kind: ModelKind, name: &str) -> usize {
    kind.coord_index(name)
        .unwrap_or_else(|| panic!("{name} is not a coordinate of {kind}"))
}

fn parse_condition(kind: ModelKind, text: &str) -> Condition {
    let (lhs, cmp) = if let Some(l) = text.strip_suffix(">=") {
        (l, Cmp::Ge)
    } else {
        (text.strip_suffix('>').expect("condition ends in > or >="), Cmp::Gt)
    };
    let quantity = match lhs.strip_suffix('\'') {
        Some(coord) => Quantity::Rate(index(kind, coord)),
        None => Quantity::Coord(index(kind, lhs)),
    };
    Condition { quantity, cmp }
}

fn build(kind: ModelKind, row: &Row) -> SectionSpec {
    let (name, u, v, fixed, solve, conds) = *row;
    SectionSpec {
        name: format!("{kind}/{name}"),
        kind,
        sweep: (index(kind, u), index(kind, v)),
        fixed: fixed.iter().map(|f| (index(kind, f), 0.0)).collect(),
        solve: index(kind, solve),
        branch: if kind.is_coupled() {
            Branch::Either
        } else {
            Branch::Upper
        },
        conditions: conds.iter().map(|c| parse_condition(kind, c)).collect(),
    }
}

/// Every cataloged section of `kind`, in catalog order.
pub fn section_catalog(kind: ModelKind) -> Vec<SectionSpec> {
    rows(kind).iter().map(|r| build(kind, r)).collect()
}

/// Looks a section up by `model/short` or by short name within `kind`.
pub fn find_section(kind: ModelKind, name: &str) -> Result<SectionSpec> {
    let short = match name.split_once('/') {
        Some((model, short)) if model == kind.name() => short,
        Some(_) => return Err(Error::UnknownSection(name.to_string())),
        None => name,
    };
    rows(kind)
        .iter()
        .find(|r| r.0 == short)
        .map(|r| build(kind, r))
        .ok_or_else(|| Error::UnknownSection(name.to_string()))
}
