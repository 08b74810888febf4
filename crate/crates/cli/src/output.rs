//! Grid serialization: CSV with a `#` manifest, 8-bit PGM heatmaps and the
//! overflow sidecar.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use lagdesc::sections::{CellStatus, GridField};

use crate::config::{method_name, RunConfig};

pub const CSV_HEADER: &str = "u,v,valid,ld_total,ld_forward,ld_backward";

fn num(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v:.16e}"),
        None => "nan".to_string(),
    }
}

/// `#` lines recording everything needed to reproduce the grid.
pub fn manifest(cfg: &RunConfig, grid: &GridField) -> String {
    let mut m = String::new();
    let p = &cfg.params;
    let _ = writeln!(m, "# tool: lagdesc {}", env!("CARGO_PKG_VERSION"));
    let _ = write!(m, "# model: {} lambda={} omega2={}", cfg.model, p.lambda, p.omega2);
    if let Some(w3) = p.omega3 {
        let _ = write!(m, " omega3={w3}");
    }
    m.push('\n');
    if let Some((path, _)) = &cfg.transform {
        let _ = writeln!(m, "# transform: {}", path.display());
    }
    let (a, b) = grid.section.axis_names();
    let _ = writeln!(
        m,
        "# section: {} (u={a}, v={b}, solved {})",
        grid.section.name,
        grid.section.solve_name()
    );
    let _ = writeln!(
        m,
        "# h={} tau={} p={} dt={} method={}",
        grid.h,
        grid.params.tau,
        grid.params.p,
        grid.params.dt,
        method_name(grid.params.method)
    );
    let b = grid.bounds;
    let _ = writeln!(
        m,
        "# grid: nu={} nv={} bounds={},{},{},{}",
        grid.nu, grid.nv, b.u_min, b.u_max, b.v_min, b.v_max
    );
    m
}

pub fn write_csv(path: &Path, cfg: &RunConfig, grid: &GridField) -> Result<()> {
    let mut text = manifest(cfg, grid);
    text.push_str(CSV_HEADER);
    text.push('\n');
    for j in 0..grid.nv {
        for i in 0..grid.nu {
            let _ = writeln!(
                text,
                "{},{},{},{},{},{}",
                num(Some(grid.u(i))),
                num(Some(grid.v(j))),
                u8::from(grid.is_valid(i, j)),
                num(grid.total(i, j)),
                num(grid.forward(i, j)),
                num(grid.backward(i, j)),
            );
        }
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Binary PGM of the total descriptor. Valid cells map linearly onto
/// 1..=255; masked cells are 0. The first image row is `v_max`.
pub fn pgm_bytes(grid: &GridField) -> Vec<u8> {
    let (lo, hi) = (0..grid.nv)
        .flat_map(|j| (0..grid.nu).filter_map(move |i| grid.total(i, j)))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = format!("P5\n{} {}\n255\n", grid.nu, grid.nv).into_bytes();
    for j in (0..grid.nv).rev() {
        for i in 0..grid.nu {
            out.push(match grid.total(i, j) {
                Some(v) => 1 + ((v - lo) / span * 254.0).round().clamp(0.0, 254.0) as u8,
                None => 0,
            });
        }
    }
    out
}

pub fn write_pgm(path: &Path, grid: &GridField) -> Result<()> {
    fs::write(path, pgm_bytes(grid)).with_context(|| format!("writing {}", path.display()))
}

/// Lists overflowed cells, one `i,j,u,v` line each. Returns how many there were.
pub fn write_overflow_log(path: &Path, grid: &GridField) -> Result<usize> {
    let cells: Vec<(usize, usize)> = (0..grid.nv)
        .flat_map(|j| (0..grid.nu).map(move |i| (i, j)))
        .filter(|&(i, j)| grid.status(i, j) == CellStatus::Overflow)
        .collect();
    if cells.is_empty() {
        return Ok(0);
    }
    let mut f = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
    writeln!(f, "# cells whose trajectory overflowed; masked in the grid")?;
    writeln!(f, "i,j,u,v")?;
    for &(i, j) in &cells {
        writeln!(f, "{i},{j},{:.16e},{:.16e}", grid.u(i), grid.v(j))?;
    }
    Ok(cells.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use lagdesc::sections::{find_section, Bounds};
    use lagdesc::{LDParams, ModelKind};

    fn tiny() -> GridField {
        let section = find_section(ModelKind::Decoupled2, "q1p1").unwrap();
        let cells = vec![Some((1.0, 1.0)), None, Some((2.0, 3.0)), Some((0.5, 0.5))];
        GridField::from_cells(section, 0.2, Bounds::default(), 2, 2, LDParams::default(), cells).unwrap()
    }

    #[test]
    fn pgm_maps_extremes_and_masks() {
        let bytes = pgm_bytes(&tiny());
        let header = b"P5\n2 2\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        // Top row is j = 1: totals 5 and 1.
        assert_eq!(&bytes[header.len()..], &[255, 1, 65, 0]);
    }

    #[test]
    fn numbers_round_trip() {
        let x = 0.1f64 + 0.2;
        assert_eq!(num(Some(x)).parse::<f64>().unwrap(), x);
        assert_eq!(num(None), "nan");
    }
}
