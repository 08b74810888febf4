use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::SystemModel;
use crate::error::{Error, Result};
use crate::ld::{ld_totals, LDParams};

use super::{check_kind, SectionSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl Bounds {
    pub fn new(u_min: f64, u_max: f64, v_min: f64, v_max: f64) -> Result<Self> {
        let b = Self {
            u_min,
            u_max,
            v_min,
            v_max,
        };
        b.validate()?;
        Ok(b)
    }

    /// `[-r, r]²`.
    pub fn square(r: f64) -> Self {
        Self {
            u_min: -r,
            u_max: r,
            v_min: -r,
            v_max: r,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.u_min, self.u_max, self.v_min, self.v_max]
            .iter()
            .all(|x| x.is_finite())
            && self.u_max > self.u_min
            && self.v_max > self.v_min;
        if ok {
            Ok(())
        } else {
            Err(Error::ParameterDomain {
                name: "bounds",
                value: f64::NAN,
                reason: "need finite u_min < u_max and v_min < v_max",
            })
        }
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Self::square(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellStatus {
    Valid,
    /// No admissible root of the energy equation.
    NoLift,
    /// The trajectory overflowed during integration.
    Overflow,
}

/// Descriptor values at the cell centres of a uniform `nu x nv` lattice.
///
/// Cells are stored row-major with `v` as the outer index. Non-valid cells
/// hold `NaN`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    pub section: SectionSpec,
    pub h: f64,
    pub bounds: Bounds,
    pub nu: usize,
    pub nv: usize,
    pub params: LDParams,
    status: Vec<CellStatus>,
    forward: Vec<f64>,
    backward: Vec<f64>,
}

impl GridField {
    /// Assembles a field from per-cell `(forward, backward)` values; `None`
    /// marks a cell without a lift.
    pub fn from_cells(
        section: SectionSpec,
        h: f64,
        bounds: Bounds,
        nu: usize,
        nv: usize,
        params: LDParams,
        cells: Vec<Option<(f64, f64)>>,
    ) -> Result<Self> {
        if cells.len() != nu * nv {
            return Err(crate::error::shape(nu * nv, cells.len()));
        }
        let status = cells
            .iter()
            .map(|c| match c {
                Some(_) => CellStatus::Valid,
                None => CellStatus::NoLift,
            })
            .collect();
        let forward = cells.iter().map(|c| c.map_or(f64::NAN, |v| v.0)).collect();
        let backward = cells.iter().map(|c| c.map_or(f64::NAN, |v| v.1)).collect();
        Ok(Self {
            section,
            h,
            bounds,
            nu,
            nv,
            params,
            status,
            forward,
            backward,
        })
    }

    pub fn du(&self) -> f64 {
        (self.bounds.u_max - self.bounds.u_min) / self.nu as f64
    }

    pub fn dv(&self) -> f64 {
        (self.bounds.v_max - self.bounds.v_min) / self.nv as f64
    }

    pub fn u(&self, i: usize) -> f64 {
        cell_centre(self.bounds.u_min, self.bounds.u_max, self.nu, i)
    }

    pub fn v(&self, j: usize) -> f64 {
        cell_centre(self.bounds.v_min, self.bounds.v_max, self.nv, j)
    }

    fn at(&self, i: usize, j: usize) -> usize {
        assert!(i < self.nu && j < self.nv, "cell ({i}, {j}) out of range");
        j * self.nu + i
    }

    pub fn status(&self, i: usize, j: usize) -> CellStatus {
        self.status[self.at(i, j)]
    }

    pub fn is_valid(&self, i: usize, j: usize) -> bool {
        self.status(i, j) == CellStatus::Valid
    }

    pub fn forward(&self, i: usize, j: usize) -> Option<f64> {
        let k = self.at(i, j);
        (self.status[k] == CellStatus::Valid).then(|| self.forward[k])
    }

    pub fn backward(&self, i: usize, j: usize) -> Option<f64> {
        let k = self.at(i, j);
        (self.status[k] == CellStatus::Valid).then(|| self.backward[k])
    }

    pub fn total(&self, i: usize, j: usize) -> Option<f64> {
        let k = self.at(i, j);
        (self.status[k] == CellStatus::Valid).then(|| self.forward[k] + self.backward[k])
    }

    /// `true` for valid cells, row-major with `v` outer.
    pub fn mask(&self) -> Vec<bool> {
        self.status.iter().map(|s| *s == CellStatus::Valid).collect()
    }

    pub fn statuses(&self) -> &[CellStatus] {
        &self.status
    }

    pub fn count(&self, status: CellStatus) -> usize {
        self.status.iter().filter(|s| **s == status).count()
    }

    /// Values of one component as a [`Field2D`].
    pub fn field(&self, component: Component) -> Field2D {
        let values = (0..self.nu * self.nv)
            .map(|k| {
                if self.status[k] != CellStatus::Valid {
                    return f64::NAN;
                }
                match component {
                    Component::Total => self.forward[k] + self.backward[k],
                    Component::Forward => self.forward[k],
                    Component::Backward => self.backward[k],
                }
            })
            .collect();
        Field2D {
            nu: self.nu,
            nv: self.nv,
            values,
        }
    }
}

fn cell_centre(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    lo + (hi - lo) * (i as f64 + 0.5) / n as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Component {
    Total,
    Forward,
    Backward,
}

/// Plain scalar field on a lattice; `NaN` marks excluded cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    pub nu: usize,
    pub nv: usize,
    pub values: Vec<f64>,
}

impl Field2D {
    pub fn from_fn(nu: usize, nv: usize, f: impl Fn(usize, usize) -> Option<f64>) -> Self {
        let mut values = Vec::with_capacity(nu * nv);
        for j in 0..nv {
            for i in 0..nu {
                values.push(f(i, j).unwrap_or(f64::NAN));
            }
        }
        Self { nu, nv, values }
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let v = self.values[j * self.nu + i];
        (!v.is_nan()).then_some(v)
    }
}

/// Descriptor field over `section` on the default thread pool.
pub fn grid_ld(
    system: &SystemModel,
    section: &SectionSpec,
    h: f64,
    bounds: Bounds,
    nu: usize,
    nv: usize,
    params: &LDParams,
) -> Result<GridField> {
    check_grid(system, section, h, &bounds, nu, nv, params)?;
    let rows: Vec<Vec<Option<(CellStatus, f64, f64)>>> = (0..nv)
        .into_par_iter()
        .map(|j| {
            let v = cell_centre(bounds.v_min, bounds.v_max, nv, j);
            (0..nu)
                .map(|i| {
                    let u = cell_centre(bounds.u_min, bounds.u_max, nu, i);
                    evaluate(system, section, u, v, h, params)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut status = Vec::with_capacity(nu * nv);
    let mut forward = Vec::with_capacity(nu * nv);
    let mut backward = Vec::with_capacity(nu * nv);
    for cell in rows.into_iter().flatten() {
        let (s, f, b) = cell.unwrap_or((CellStatus::NoLift, f64::NAN, f64::NAN));
        status.push(s);
        forward.push(f);
        backward.push(b);
    }
    Ok(GridField {
        section: section.clone(),
        h,
        bounds,
        nu,
        nv,
        params: *params,
        status,
        forward,
        backward,
    })
}

/// [`grid_ld`] on a dedicated pool of `threads` workers.
#[allow(clippy::too_many_arguments)]
pub fn grid_ld_with(
    threads: usize,
    system: &SystemModel,
    section: &SectionSpec,
    h: f64,
    bounds: Bounds,
    nu: usize,
    nv: usize,
    params: &LDParams,
) -> Result<GridField> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|_| Error::ParameterDomain {
            name: "threads",
            value: threads as f64,
            reason: "thread pool could not be built",
        })?;
    pool.install(|| grid_ld(system, section, h, bounds, nu, nv, params))
}

fn check_grid(
    system: &SystemModel,
    section: &SectionSpec,
    h: f64,
    bounds: &Bounds,
    nu: usize,
    nv: usize,
    params: &LDParams,
) -> Result<()> {
    check_kind(section, system)?;
    bounds.validate()?;
    params.validate()?;
    if nu < 2 || nv < 2 {
        return Err(Error::ParameterDomain {
            name: "grid size",
            value: nu.min(nv) as f64,
            reason: "need at least 2 cells per axis",
        });
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::ParameterDomain {
            name: "h",
            value: h,
            reason: "energy must be finite and > 0",
        });
    }
    Ok(())
}

fn evaluate(
    system: &SystemModel,
    section: &SectionSpec,
    u: f64,
    v: f64,
    h: f64,
    params: &LDParams,
) -> Result<Option<(CellStatus, f64, f64)>> {
    let Some(x) = section.lift(system, u, v, h) else {
        return Ok(None);
    };
    match ld_totals(system, &x, params) {
        Ok(t) => Ok(Some((CellStatus::Valid, t.forward, t.backward))),
        Err(Error::Overflow { .. }) => Ok(Some((CellStatus::Overflow, f64::NAN, f64::NAN))),
        Err(e) => Err(e),
    }
}
