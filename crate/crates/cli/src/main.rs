mod config;
mod matrix;
mod output;
mod report;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use lagdesc::ld::{elliptic_average_limit, hyperbolic_asymptote, ld_point};
use lagdesc::pipeline::{verify_grid, verify_section, VerifyConfig};
use lagdesc::sections::{grid_ld, grid_ld_with, section_catalog, CellStatus};
use lagdesc::{check_symplectic, LDMethod, LDParams, ModelKind, ModelParams, PhasePoint, SystemModel};

use crate::config::{method_name, RunArgs, RunConfig};
use crate::report::{section_entry, write_json, RunSummary, VerifyReport};

/// Lagrangian descriptor grids, verification against the analytic
/// invariant manifolds, and supporting checks.
#[derive(Debug, Parser)]
#[command(name = "lagdesc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the descriptor on one section and write CSV / PGM / report files.
    Grid(RunArgs),
    /// Grid sections, detect features and compare them with the analytic sets.
    Verify {
        /// `all`, `<model>/*`, `<model>` or `<model>/<section>`.
        #[arg(default_value = "all")]
        target: String,
        /// Energy given to the analytic oracle instead of `h`.
        #[arg(long)]
        oracle_h: Option<f64>,
        /// Match tolerance; defaults to one grid spacing.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print numerical descriptors next to their large-tau closed forms.
    Asymptotics(AsymptoticsArgs),
    /// Check a matrix file for the symplectic condition C J C^T = J.
    CheckSymplectic {
        file: PathBuf,
    },
}

#[derive(Debug, clap::Args)]
struct AsymptoticsArgs {
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Hyperbolic constant A = q1 + p1.
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    a: f64,
    /// Hyperbolic constant B = q1 - p1.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Energy of the bath mode.
    #[arg(long, default_value_t = 0.2)]
    h_mode: f64,
    /// Quadrature step.
    #[arg(long, default_value_t = 1e-2)]
    dt: f64,
}

/// Failure of a check, as opposed to a usage or I/O error.
const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Grid(args) => cmd_grid(&args),
        Command::Verify {
            target,
            oracle_h,
            tol,
            run,
        } => cmd_verify(&target, oracle_h, tol, &run),
        Command::Asymptotics(args) => cmd_asymptotics(&args),
        Command::CheckSymplectic { file } => cmd_check_symplectic(&file),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn create_out(cfg: &RunConfig) -> Result<()> {
    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))
}

fn cmd_grid(args: &RunArgs) -> Result<bool> {
    let cfg = RunConfig::resolve(args)?;
    let system = cfg.system()?;
    let section = cfg.section_spec()?;
    let stem = cfg.stem()?;
    create_out(&cfg)?;
    let grid = match cfg.threads {
        Some(t) => grid_ld_with(t, &system, &section, cfg.h, cfg.bounds, cfg.nu, cfg.nv, &cfg.ld)?,
        None => grid_ld(&system, &section, cfg.h, cfg.bounds, cfg.nu, cfg.nv, &cfg.ld)?,
    };
    let mut written = Vec::new();
    if cfg.emit.csv {
        let path = cfg.out.join(format!("{stem}.csv"));
        output::write_csv(&path, &cfg, &grid)?;
        written.push(path);
    }
    if cfg.emit.image {
        let path = cfg.out.join(format!("{stem}.pgm"));
        output::write_pgm(&path, &grid)?;
        written.push(path);
    }
    if cfg.emit.report {
        let vcfg = verify_config(&cfg, None, None);
        let v = verify_grid(&system, &grid, &vcfg)?;
        let path = cfg.out.join(format!("{stem}.report.json"));
        write_json(&path, &section_entry(&v))?;
        written.push(path);
    }
    let log = cfg.out.join(format!("{stem}.overflow.log"));
    let overflowed = output::write_overflow_log(&log, &grid)?;
    if overflowed > 0 {
        eprintln!("warning: {overflowed} cells overflowed and are masked; see {}", log.display());
    }
    eprintln!(
        "{}: {} valid, {} without lift, {} overflow",
        section.name,
        grid.count(CellStatus::Valid),
        grid.count(CellStatus::NoLift),
        overflowed
    );
    for path in written {
        println!("{}", path.display());
    }
    Ok(true)
}

fn verify_config(cfg: &RunConfig, oracle_h: Option<f64>, tol: Option<f64>) -> VerifyConfig {
    VerifyConfig {
        h: cfg.h,
        bounds: cfg.bounds,
        nu: cfg.nu,
        nv: cfg.nv,
        params: cfg.ld,
        tol,
        oracle_h,
        threads: cfg.threads,
        ..VerifyConfig::default()
    }
}

/// Expands a verify target into `(model, Some(section) | None for all)`.
fn expand_target(target: &str) -> Result<Vec<(ModelKind, Option<String>)>> {
    if target == "all" {
        return Ok(ModelKind::ALL.iter().map(|&k| (k, None)).collect());
    }
    let (model, section) = match target.split_once('/') {
        Some((m, "*")) => (m, None),
        Some((m, s)) => (m, Some(s.to_string())),
        None => (target, None),
    };
    Ok(vec![(model.parse()?, section)])
}

fn cmd_verify(target: &str, oracle_h: Option<f64>, tol: Option<f64>, run: &RunArgs) -> Result<bool> {
    if let Some(t) = tol {
        if !(t > 0.0 && t.is_finite()) {
            bail!("tol must be finite and > 0, got {t}");
        }
    }
    let targets = expand_target(target)?;
    if run.transform.is_some() && targets.len() > 1 {
        bail!("--transform needs a single-model target");
    }
    let mut entries = Vec::new();
    let mut summary = None;
    for (kind, section) in targets {
        let mut args = run.clone();
        args.model = Some(kind.name().to_string());
        args.section = section.clone();
        if kind.dof() == 2 {
            args.omega3 = None;
        }
        let cfg = RunConfig::resolve(&args)?;
        let system = cfg.system()?;
        let sections = match section {
            Some(_) => vec![cfg.section_spec()?],
            None => section_catalog(kind),
        };
        let vcfg = verify_config(&cfg, oracle_h, tol);
        for spec in &sections {
            let (_, v) = verify_section(&system, spec, &vcfg)?;
            eprintln!(
                "{:<20} {}",
                spec.name,
                if v.report.pass() { "pass" } else { "FAIL" }
            );
            entries.push(section_entry(&v));
        }
        summary.get_or_insert_with(|| (cfg.clone(), vcfg));
    }
    let (cfg, vcfg) = summary.expect("at least one target");
    create_out(&cfg)?;
    let b = cfg.bounds;
    let pass = entries.iter().all(|e| e.pass);
    let report = VerifyReport {
        tool: format!("lagdesc {}", env!("CARGO_PKG_VERSION")),
        config: RunSummary {
            h: cfg.h,
            oracle_h: oracle_h.unwrap_or(cfg.h),
            tau: cfg.ld.tau,
            p: cfg.ld.p,
            dt: cfg.ld.dt,
            method: method_name(cfg.ld.method),
            nu: cfg.nu,
            nv: cfg.nv,
            bounds: [b.u_min, b.u_max, b.v_min, b.v_max],
        },
        pass,
        entries,
    };
    let path = cfg.out.join("verify_report.json");
    write_json(&path, &report)?;
    let failed = report.entries.iter().filter(|e| !e.pass).count();
    println!(
        "{}/{} sections pass (tolerance {:.4e}); report at {}",
        report.entries.len() - failed,
        report.entries.len(),
        vcfg.tolerance(),
        path.display()
    );
    Ok(pass)
}

fn relative_gap(numeric: f64, closed: f64) -> f64 {
    if numeric == 0.0 && closed == 0.0 {
        0.0
    } else {
        (numeric / closed - 1.0).abs()
    }
}

fn cmd_asymptotics(a: &AsymptoticsArgs) -> Result<bool> {
    if !(a.h_mode >= 0.0) {
        bail!("h-mode must be >= 0, got {}", a.h_mode);
    }
    let system = SystemModel::build(ModelKind::Decoupled2, ModelParams::two_dof(a.lambda, a.omega), None)?;
    let x = PhasePoint::new(&[
        0.5 * (a.a + a.b),
        0.0,
        0.5 * (a.a - a.b),
        (2.0 * a.h_mode / a.omega).sqrt(),
    ])?;
    let run = |tau: f64| -> Result<lagdesc::LDResult> {
        let params = LDParams::new(a.p, tau, a.dt.min(tau), LDMethod::AnalyticQuadrature)?;
        Ok(ld_point(&system, &x, &params)?)
    };

    println!("# saddle pair: lambda={} p={} A={} B={}", a.lambda, a.p, a.a, a.b);
    println!("{:>6} {:>22} {:>22} {:>12}", "tau", "M_h", "asymptote", "rel_gap");
    for tau in [5.0, 10.0, 15.0] {
        let m = run(tau)?.hyperbolic.expect("decoupled models split the descriptor");
        let closed = hyperbolic_asymptote(a.lambda, a.p, a.a, a.b, tau);
        println!("{tau:>6} {m:>22.10} {closed:>22.10} {:>12.3e}", relative_gap(m, closed));
    }

    let limit = elliptic_average_limit(a.omega, a.h_mode, a.p);
    println!();
    println!("# bath mode: omega={} H={} p={}", a.omega, a.h_mode, a.p);
    println!("{:>6} {:>22} {:>22} {:>12}", "tau", "average", "limit", "rel_gap");
    for tau in [5.0, 10.0, 15.0, 100.0] {
        let m = run(tau)?.elliptic.expect("decoupled models split the descriptor");
        let avg = m / (2.0 * tau);
        println!("{tau:>6} {avg:>22.10} {limit:>22.10} {:>12.3e}", relative_gap(avg, limit));
    }
    Ok(true)
}

fn cmd_check_symplectic(file: &std::path::Path) -> Result<bool> {
    let m = matrix::read_matrix(file)?;
    let residual = check_symplectic(&m)?;
    let ok = residual <= lagdesc::dynamics::symplectic::SYMPLECTIC_TOL;
    println!("{}: residual {residual:e} ({})", file.display(), if ok { "symplectic" } else { "not symplectic" });
    Ok(ok)
}
