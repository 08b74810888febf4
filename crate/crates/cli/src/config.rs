//! Run configuration: command-line flags layered over an optional
//! `key=value` file, layered over the defaults.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use lagdesc::sections::{find_section, Bounds, SectionSpec};
use lagdesc::{LDMethod, LDParams, ModelKind, ModelParams, SymplecticMatrix, SystemModel};

use crate::matrix::read_matrix;

/// Flags shared by `grid` and `verify`. Every flag can also be given as a
/// key of the same name in the `--config` file; flags win.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Flat `key=value` file; `#` starts a comment.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// decoupled2, coupled2, decoupled3 or coupled3.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub omega2: Option<f64>,
    #[arg(long)]
    pub omega3: Option<f64>,
    /// Whitespace-separated 2N x 2N coupling matrix replacing the default.
    #[arg(long)]
    pub transform: Option<PathBuf>,
    /// Section name, with or without the `model/` prefix.
    #[arg(long)]
    pub section: Option<String>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// augmented or quadrature.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub nu: Option<usize>,
    #[arg(long)]
    pub nv: Option<usize>,
    /// `u_min,u_max,v_min,v_max`.
    #[arg(long, allow_hyphen_values = true)]
    pub bounds: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated subset of csv, image, report.
    #[arg(long)]
    pub emit: Option<String>,
    /// Worker threads for the grid; the default uses every core.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Emit {
    pub csv: bool,
    pub image: bool,
    pub report: bool,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ModelKind,
    pub params: ModelParams,
    pub transform: Option<(PathBuf, SymplecticMatrix)>,
    pub section: String,
    pub h: f64,
    pub ld: LDParams,
    pub bounds: Bounds,
    pub nu: usize,
    pub nv: usize,
    pub out: PathBuf,
    pub emit: Emit,
    pub threads: Option<usize>,
}

const KEYS: &[&str] = &[
    "model", "lambda", "omega2", "omega3", "transform", "section", "h", "tau", "p", "dt", "method", "nu",
    "nv", "bounds", "out", "emit", "threads",
];

fn read_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{}:{}: expected key=value", path.display(), n + 1))?;
        let k = k.trim().replace('_', "-");
        if !KEYS.contains(&k.as_str()) {
            bail!("{}:{}: unknown key `{k}`", path.display(), n + 1);
        }
        out.insert(k, v.trim().to_string());
    }
    Ok(out)
}

/// A flag value, else the config value parsed, else `None`.
fn layered<T: std::str::FromStr>(flag: Option<T>, file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    if flag.is_some() {
        return Ok(flag);
    }
    file.get(key)
        .map(|v| v.parse::<T>().map_err(|e| anyhow!("config key `{key}` = `{v}`: {e}")))
        .transpose()
}

pub fn parse_bounds(text: &str) -> Result<Bounds> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| anyhow!("bounds `{text}`: {e}"))?;
    if v.len() != 4 {
        bail!("bounds `{text}`: expected u_min,u_max,v_min,v_max");
    }
    Ok(Bounds::new(v[0], v[1], v[2], v[3])?)
}

fn parse_emit(text: &str) -> Result<Emit> {
    let mut emit = Emit {
        csv: false,
        image: false,
        report: false,
    };
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item {
            "csv" => emit.csv = true,
            "image" => emit.image = true,
            "report" => emit.report = true,
            other => bail!("unknown emit target `{other}` (csv, image, report)"),
        }
    }
    if !(emit.csv || emit.image || emit.report) {
        bail!("emit set is empty");
    }
    Ok(emit)
}

pub fn parse_method(text: &str) -> Result<LDMethod> {
    match text {
        "augmented" => Ok(LDMethod::Augmented),
        "quadrature" => Ok(LDMethod::AnalyticQuadrature),
        other => bail!("unknown method `{other}` (augmented, quadrature)"),
    }
}

pub fn method_name(m: LDMethod) -> &'static str {
    match m {
        LDMethod::Augmented => "augmented",
        LDMethod::AnalyticQuadrature => "quadrature",
    }
}

impl RunConfig {
    pub fn resolve(args: &RunArgs) -> Result<Self> {
        let file = match &args.config {
            Some(p) => read_config(p)?,
            None => BTreeMap::new(),
        };
        let model: ModelKind = layered(args.model.clone(), &file, "model")?
            .unwrap_or_else(|| "decoupled2".to_string())
            .parse()?;
        let unit = ModelParams::unit(model);
        let lambda = layered(args.lambda, &file, "lambda")?.unwrap_or(unit.lambda);
        let omega2 = layered(args.omega2, &file, "omega2")?.unwrap_or(unit.omega2);
        let omega3 = layered(args.omega3, &file, "omega3")?;
        let params = if model.dof() == 3 {
            ModelParams::three_dof(lambda, omega2, omega3.unwrap_or(1.0))
        } else {
            if omega3.is_some() {
                bail!("omega3 given for the 2-DoF model {model}");
            }
            ModelParams::two_dof(lambda, omega2)
        };
        let transform = match layered(args.transform.clone(), &file, "transform")? {
            Some(path) => {
                if !model.is_coupled() {
                    bail!("a transform only applies to coupled models");
                }
                let m = read_matrix(&path)?;
                Some((path, SymplecticMatrix::new(m)?))
            }
            None => None,
        };
        let section = layered(args.section.clone(), &file, "section")?.unwrap_or_else(|| {
            lagdesc::sections::section_catalog(model)[0].short_name().to_string()
        });
        let ld = LDParams {
            p: layered(args.p, &file, "p")?.unwrap_or(0.5),
            tau: layered(args.tau, &file, "tau")?.unwrap_or(10.0),
            dt: layered(args.dt, &file, "dt")?.unwrap_or(1e-2),
            method: match layered(args.method.clone(), &file, "method")? {
                Some(m) => parse_method(&m)?,
                None => LDMethod::Augmented,
            },
            t0: 0.0,
        };
        ld.validate()?;
        let bounds = match layered(args.bounds.clone(), &file, "bounds")? {
            Some(b) => parse_bounds(&b)?,
            None => Bounds::default(),
        };
        let nu = layered(args.nu, &file, "nu")?.unwrap_or(400);
        let nv = layered(args.nv, &file, "nv")?.unwrap_or(400);
        if nu < 2 || nv < 2 {
            bail!("grid needs at least 2 cells per axis, got {nu}x{nv}");
        }
        let h = layered(args.h, &file, "h")?.unwrap_or(0.2);
        if !(h > 0.0 && h.is_finite()) {
            bail!("h must be finite and > 0, got {h}");
        }
        let threads = layered(args.threads, &file, "threads")?;
        if threads == Some(0) {
            bail!("threads must be at least 1");
        }
        Ok(Self {
            model,
            params,
            transform,
            section,
            h,
            ld,
            bounds,
            nu,
            nv,
            out: layered(args.out.clone(), &file, "out")?.unwrap_or_else(|| PathBuf::from(".")),
            emit: parse_emit(&layered(args.emit.clone(), &file, "emit")?.unwrap_or_else(|| "csv".to_string()))?,
            threads,
        })
    }

    pub fn system(&self) -> Result<SystemModel> {
        Ok(match &self.transform {
            Some((_, t)) => SystemModel::build(self.model, self.params, Some(t.clone()))?,
            None => SystemModel::with_params(self.model, self.params)?,
        })
    }

    pub fn section_spec(&self) -> Result<SectionSpec> {
        Ok(find_section(self.model, &self.section)?)
    }

    /// File stem for outputs, e.g. `decoupled2_q1p1`.
    pub fn stem(&self) -> Result<String> {
        let s = self.section_spec()?;
        Ok(format!("{}_{}", self.model.name(), s.short_name()))
    }
}
