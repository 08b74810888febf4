//! Isoenergetic two-dimensional surfaces `U⁺` and descriptor fields on them.
//!
//! A section fixes all but three coordinates, sweeps two of the remaining
//! ones over a rectangle and solves `H(x) = h` for the third. The root is
//! chosen by a branch rule and a set of sign conditions on coordinates or on
//! components of the vector field.

mod catalog;
mod grid;

use serde::{Deserialize, Serialize};

use crate::dynamics::{ModelKind, PhasePoint, SystemModel};

pub use catalog::{find_section, section_catalog};
pub use grid::{grid_ld, grid_ld_with, Bounds, CellStatus, Component, Field2D, GridField};

/// Residual accepted for a lifted point.
pub const ENERGY_TOL: f64 = 1e-10;
/// Discriminants in `[-DOUBLE_ROOT_TOL, 0)` are treated as a tangency.
pub const DOUBLE_ROOT_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantity {
    /// A coordinate value.
    Coord(usize),
    /// A component of the vector field.
    Rate(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cmp {
    Gt,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub quantity: Quantity,
    pub cmp: Cmp,
}

impl Condition {
    /// Whether the condition holds with the comparison relaxed by `slack`.
    pub fn holds(&self, x: &PhasePoint, xdot: &PhasePoint, slack: f64) -> bool {
        let value = match self.quantity {
            Quantity::Coord(k) => x[k],
            Quantity::Rate(k) => xdot[k],
        };
        match self.cmp {
            Cmp::Gt => value > -slack,
            Cmp::Ge => value >= -slack,
        }
    }
}

/// Which root of the energy quadratic a section keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Upper,
    Lower,
    /// Whichever root satisfies the conditions; the upper root wins a tie.
    Either,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionSpec {
    /// Qualified name, e.g. `decoupled2/q1p1`.
    pub name: String,
    pub kind: ModelKind,
    /// Coordinate indices plotted on the horizontal and vertical axes.
    pub sweep: (usize, usize),
    pub fixed: Vec<(usize, f64)>,
    pub solve: usize,
    pub branch: Branch,
    pub conditions: Vec<Condition>,
}

impl SectionSpec {
    /// Short name without the model prefix (`q1p1`).
    pub fn short_name(&self) -> &str {
        self.name.split('/').nth(1).unwrap_or(&self.name)
    }

    pub fn axis_names(&self) -> (&'static str, &'static str) {
        let names = self.kind.coord_names();
        (names[self.sweep.0], names[self.sweep.1])
    }

    pub fn solve_name(&self) -> &'static str {
        self.kind.coord_names()[self.solve]
    }

    /// The point with sweep values `(u, v)`, fixed values, and `s` in the
    /// solved slot.
    pub fn embed(&self, u: f64, v: f64, s: f64) -> PhasePoint {
        let mut x = PhasePoint::zeros(self.kind.dim());
        for (k, val) in &self.fixed {
            x = x.with(*k, *val);
        }
        x.with(self.sweep.0, u)
            .with(self.sweep.1, v)
            .with(self.solve, s)
    }

    /// Coefficients `(a, b, c)` of `H(embed(u, v, s)) = a s² + b s + c`,
    /// obtained from three probes of the Hamiltonian.
    pub fn quadratic(&self, system: &SystemModel, u: f64, v: f64) -> (f64, f64, f64) {
        let e = |s: f64| system.energy_unchecked(&self.embed(u, v, s));
        let (hm, h0, hp) = (e(-1.0), e(0.0), e(1.0));
        (0.5 * (hp + hm) - h0, 0.5 * (hp - hm), h0)
    }

    /// Real roots of `H = h` in the solved coordinate, ascending.
    pub fn roots(&self, system: &SystemModel, u: f64, v: f64, h: f64) -> Option<(f64, f64)> {
        let (a, b, c) = self.quadratic(system, u, v);
        let c = c - h;
        if a == 0.0 {
            if b == 0.0 {
                return None;
            }
            let s = -c / b;
            return Some((s, s));
        }
        let mut disc = b * b - 4.0 * a * c;
        if disc < -DOUBLE_ROOT_TOL {
            return None;
        }
        if disc < 0.0 {
            disc = 0.0;
        }
        let qq = -0.5 * (b + b.signum() * disc.sqrt());
        let (r1, r2) = if qq == 0.0 {
            (0.0, 0.0)
        } else {
            (qq / a, c / qq)
        };
        Some(if r1 <= r2 { (r1, r2) } else { (r2, r1) })
    }

    /// Whether every condition holds at `x` (relaxed by `slack`).
    pub fn admits(&self, system: &SystemModel, x: &PhasePoint, slack: f64) -> bool {
        let xdot = system.vector_field_unchecked(x);
        self.conditions.iter().all(|c| c.holds(x, &xdot, slack))
    }

    /// Lifts `(u, v)` onto `H = h`, returning `None` when no admissible root exists.
    pub fn lift(&self, system: &SystemModel, u: f64, v: f64, h: f64) -> Option<PhasePoint> {
        self.lift_with_slack(system, u, v, h, 0.0)
    }

    /// [`SectionSpec::lift`] with the sign conditions relaxed by `slack`, so
    /// that points on the closure of the section are accepted.
    pub fn lift_with_slack(
        &self,
        system: &SystemModel,
        u: f64,
        v: f64,
        h: f64,
        slack: f64,
    ) -> Option<PhasePoint> {
        let (lo, hi) = self.roots(system, u, v, h)?;
        let candidates: &[f64] = match self.branch {
            Branch::Upper => &[hi],
            Branch::Lower => &[lo],
            Branch::Either => &[hi, lo],
        };
        candidates.iter().find_map(|s| {
            let x = self.embed(u, v, *s);
            let ok = (system.energy_unchecked(&x) - h).abs() <= ENERGY_TOL
                && self.admits(system, &x, slack);
            ok.then_some(x)
        })
    }
}

/// Lifts `(u, v)` through `section` as a free function.
pub fn lift(
    section: &SectionSpec,
    system: &SystemModel,
    u: f64,
    v: f64,
    h: f64,
) -> Option<PhasePoint> {
    section.lift(system, u, v, h)
}

pub(crate) fn check_kind(section: &SectionSpec, system: &SystemModel) -> crate::Result<()> {
    if section.kind != system.kind() {
        return Err(crate::Error::UnknownSection(format!(
            "{} is not a section of {}",
            section.name,
            system.kind()
        )));
    }
    Ok(())
}
