//! Run configuration: TOML text in, validated [`RunConfig`] out.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::condensate::CondensateSpec;
use crate::crystal::{PotentialCoefficients, ReciprocalLattice};
use crate::grid::Grid;
use crate::types::{LatticeIndex, PhysicalParams, Statistics, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Fluid,
    Crystal,
    Condensate,
    Wigner,
    Validate,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Fluid => "fluid",
            Mode::Crystal => "crystal",
            Mode::Condensate => "condensate",
            Mode::Wigner => "wigner",
            Mode::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("parse error at line {line:?}: {message}")]
    Parse { line: Option<usize>, message: String },
    #[error("invalid `{key}` at line {line:?}: {message}")]
    Validation {
        key: String,
        line: Option<usize>,
        message: String,
    },
}

impl ConfigError {
    pub fn key(&self) -> &str {
        match self {
            ConfigError::Parse { .. } => "",
            ConfigError::Validation { key, .. } => key,
        }
    }

    pub fn line(&self) -> Option<usize> {
        match self {
            ConfigError::Parse { line, .. } | ConfigError::Validation { line, .. } => *line,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            ConfigError::Parse { message, .. } | ConfigError::Validation { message, .. } => message,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: Option<Mode>,
    params: Option<RawParams>,
    grid: Option<RawGrid>,
    lattice: Option<RawLattice>,
    condensate: Option<RawCondensate>,
    wigner: Option<RawWigner>,
    output: Option<RawOutput>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    hbar: Option<f64>,
    mass: Option<f64>,
    tau: f64,
    temperature: Option<f64>,
    density: Option<f64>,
    n_particles: f64,
    volume: f64,
    statistics: Statistics,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    dim: usize,
    spacing: f64,
    extent: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoefficient {
    index: Vec<i32>,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLattice {
    basis: Vec<Vec<f64>>,
    cutoff: Option<usize>,
    #[serde(default)]
    potential: Vec<RawCoefficient>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCondensate {
    n_c: f64,
    #[serde(default)]
    p0: Vec<f64>,
    coefficients: Option<Vec<RawCoefficient>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWigner {
    order: Option<usize>,
    position_points: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    format: Option<Format>,
    path: Option<String>,
    precision: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WignerSettings {
    pub order: usize,
    pub position_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSettings {
    pub format: Format,
    pub path: Option<String>,
    /// Significant decimal digits.
    pub precision: usize,
}

#[derive(Debug, Clone)]
pub struct LatticeSettings {
    pub lattice: ReciprocalLattice,
    pub potential: PotentialCoefficients,
}

/// Validated configuration for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub params: Option<PhysicalParams>,
    pub grid: Option<Grid>,
    pub lattice: Option<LatticeSettings>,
    pub condensate: Option<CondensateSpec>,
    pub wigner: WignerSettings,
    pub output: OutputSettings,
}

/// First line mentioning `key` as a table header or an assignment.
fn locate(text: &str, key: &str) -> Option<usize> {
    let leaf = key.rsplit('.').next().unwrap_or(key);
    let header = format!("[{key}]");
    text.lines()
        .position(|l| {
            let t = l.trim_start();
            t.starts_with(&header)
                || t.strip_prefix(leaf)
                    .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map(|i| i + 1)
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn err(&self, key: &str, message: impl Into<String>) -> ConfigError {
        let table = key.split('.').next().unwrap_or(key);
        ConfigError::Validation {
            key: key.to_string(),
            line: locate(self.text, key).or_else(|| locate(self.text, table)),
            message: message.into(),
        }
    }

    fn lib(&self, key: &str, e: crate::Error) -> ConfigError {
        self.err(key, e.to_string())
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn pad3<T: Copy + Default>(v: &[T]) -> Option<[T; 3]> {
    if v.is_empty() || v.len() > 3 {
        return None;
    }
    let mut out = [T::default(); 3];
    out[..v.len()].copy_from_slice(v);
    Some(out)
}

fn coefficients(ctx: &Ctx, key: &str, raw: &[RawCoefficient]) -> Result<Vec<(LatticeIndex, Complex64)>, ConfigError> {
    raw.iter()
        .map(|c| {
            let idx = pad3(&c.index).ok_or_else(|| ctx.err(key, "index needs 1 to 3 integers"))?;
            Ok((idx, Complex64::new(c.re, c.im)))
        })
        .collect()
}

fn required(mode: Mode) -> &'static [&'static str] {
    match mode {
        Mode::Fluid => &["params", "grid"],
        Mode::Crystal => &["params", "grid", "lattice"],
        Mode::Condensate => &["params", "condensate"],
        Mode::Wigner => &["params", "grid"],
        Mode::Validate => &[],
    }
}

fn allowed(mode: Mode) -> &'static [&'static str] {
    match mode {
        Mode::Fluid => &["params", "grid", "output"],
        Mode::Crystal => &["params", "grid", "lattice", "output"],
        Mode::Condensate => &["params", "condensate", "lattice", "grid", "output"],
        Mode::Wigner => &["params", "grid", "lattice", "wigner", "output"],
        Mode::Validate => &["output"],
    }
}

/// Parse and validate a configuration for `mode`.
pub fn parse_config(text: &str, mode: Mode) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.span().map(|s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    let ctx = Ctx { text };
    if let Some(m) = raw.mode {
        if m != mode {
            return Err(ctx.err(
                "mode",
                format!("config is for mode `{}` but `{}` was requested", m.name(), mode.name()),
            ));
        }
    }
    let present = [
        ("params", raw.params.is_some()),
        ("grid", raw.grid.is_some()),
        ("lattice", raw.lattice.is_some()),
        ("condensate", raw.condensate.is_some()),
        ("wigner", raw.wigner.is_some()),
        ("output", raw.output.is_some()),
    ];
    for name in required(mode) {
        if !present.iter().any(|(n, p)| n == name && *p) {
            return Err(ctx.err(name, format!("block `{name}` is required in {} mode", mode.name())));
        }
    }
    for (name, p) in present {
        if p && !allowed(mode).contains(&name) {
            return Err(ctx.err(name, format!("block `{name}` is not used in {} mode", mode.name())));
        }
    }

    let params = match &raw.params {
        None => None,
        Some(p) => Some(build_params(&ctx, p, mode)?),
    };
    let grid = match &raw.grid {
        None => None,
        Some(g) => Some(Grid::from_extent(g.dim, g.spacing, g.extent).map_err(|e| ctx.lib("grid", e))?),
    };
    let lattice = match &raw.lattice {
        None => None,
        Some(l) => {
            let basis = l
                .basis
                .iter()
                .map(|v| pad3(v).map(|a| Vec3::new(a[0], a[1], a[2])))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| ctx.err("lattice.basis", "each basis vector needs 1 to 3 components"))?;
            let dim = basis.len();
            let cutoff = l.cutoff.unwrap_or_else(|| ReciprocalLattice::default_cutoff(dim));
            let lattice = ReciprocalLattice::new(basis, cutoff).map_err(|e| ctx.lib("lattice.basis", e))?;
            let potential = PotentialCoefficients::new(coefficients(&ctx, "lattice.potential", &l.potential)?)
                .map_err(|e| ctx.lib("lattice.potential", e))?;
            Some(LatticeSettings { lattice, potential })
        }
    };
    let condensate = match &raw.condensate {
        None => None,
        Some(c) => {
            let params = params.as_ref().expect("params required in condensate mode");
            let p0 = if c.p0.is_empty() {
                Vec3::zeros()
            } else {
                let a = pad3(&c.p0).ok_or_else(|| ctx.err("condensate.p0", "needs 1 to 3 components"))?;
                Vec3::new(a[0], a[1], a[2])
            };
            let spec = match (&lattice, &c.coefficients) {
                (None, None) => CondensateSpec::superfluid(c.n_c, p0, params.hbar, params.volume),
                (None, Some(_)) => {
                    return Err(ctx.err(
                        "condensate.coefficients",
                        "coefficients need a lattice block",
                    ))
                }
                (Some(l), coeffs) => {
                    let coeffs = match coeffs {
                        Some(raw) => coefficients(&ctx, "condensate.coefficients", raw)?,
                        None => vec![([0, 0, 0], Complex64::new(1.0, 0.0))],
                    };
                    CondensateSpec::crystal(c.n_c, p0, params.hbar, params.volume, coeffs, l.lattice.clone())
                }
            }
            .map_err(|e| ctx.lib("condensate", e))?;
            Some(spec)
        }
    };

    let wigner = WignerSettings {
        order: raw.wigner.as_ref().and_then(|w| w.order).unwrap_or(1),
        position_points: raw.wigner.as_ref().and_then(|w| w.position_points).unwrap_or(32),
    };
    let out = raw.output.as_ref();
    let default_format = match mode {
        Mode::Fluid | Mode::Crystal => Format::Csv,
        _ => Format::Json,
    };
    let output = OutputSettings {
        format: out.and_then(|o| o.format).unwrap_or(default_format),
        path: out.and_then(|o| o.path.clone()),
        precision: out.and_then(|o| o.precision).unwrap_or(17),
    };
    let config = RunConfig {
        mode,
        params,
        grid,
        lattice,
        condensate,
        wigner,
        output,
    };
    check_mode(&ctx, &config)?;
    Ok(config)
}

fn build_params(ctx: &Ctx, p: &RawParams, mode: Mode) -> Result<PhysicalParams, ConfigError> {
    let mut params =
        PhysicalParams::new(p.n_particles, p.volume, 1.0, p.statistics).map_err(|e| ctx.lib("params", e))?;
    if let Some(h) = p.hbar {
        params = params.with_hbar(h).map_err(|e| ctx.lib("params.hbar", e))?;
    }
    if let Some(m) = p.mass {
        params = params.with_mass(m).map_err(|e| ctx.lib("params.mass", e))?;
    }
    if !p.tau.is_finite() || p.tau == 0.0 {
        return Err(ctx.err("params.tau", format!("tau must be finite and non-zero, got {}", p.tau)));
    }
    params.tau = p.tau;
    if p.tau < 0.0 && mode != Mode::Condensate {
        return Err(ctx.err(
            "params.tau",
            "tau < 0 signals the condensate regime; continuous distributions need tau > 0",
        ));
    }
    if let Some(t) = p.temperature {
        params = params.with_temperature(t);
    }
    if let Some(d) = p.density {
        if (d * p.volume - p.n_particles).abs() > 1e-12 * p.n_particles {
            return Err(ctx.err(
                "params.density",
                format!("density * volume = {} differs from n_particles = {}", d * p.volume, p.n_particles),
            ));
        }
    }
    params.validate().map_err(|e| ctx.lib("params", e))?;
    Ok(params)
}

fn check_mode(ctx: &Ctx, c: &RunConfig) -> Result<(), ConfigError> {
    let grid_dim = c.grid.as_ref().map(|g| g.dim());
    match c.mode {
        Mode::Fluid => {
            if grid_dim != Some(3) {
                return Err(ctx.err("grid.dim", "fluid mode works in three dimensions"));
            }
        }
        Mode::Crystal => {
            let l = c.lattice.as_ref().expect("lattice required");
            if grid_dim != Some(l.lattice.dim()) {
                return Err(ctx.err("grid.dim", "grid and lattice dimensions differ"));
            }
        }
        Mode::Wigner => {
            let (order, dim) = (c.wigner.order, grid_dim.expect("grid required"));
            if !(1..=2).contains(&order) {
                return Err(ctx.err("wigner.order", "order must be 1 or 2"));
            }
            if order * dim > 3 {
                return Err(ctx.err("grid.dim", "order 2 needs a one-dimensional grid"));
            }
            if order == 2 && c.lattice.is_some() {
                return Err(ctx.err("lattice", "order 2 is available for the uniform gas only"));
            }
            if let Some(l) = &c.lattice {
                if l.lattice.dim() != dim {
                    return Err(ctx.err("grid.dim", "grid and lattice dimensions differ"));
                }
                if !l.lattice.basis().iter().enumerate().all(|(k, b)| {
                    (0..3).all(|j| if j == k { b[j] > 0.0 } else { b[j] == 0.0 })
                }) {
                    return Err(ctx.err("lattice.basis", "wigner mode needs an axis-aligned lattice"));
                }
            }
            if c.wigner.position_points < 4 {
                return Err(ctx.err("wigner.position_points", "need at least 4 points"));
            }
            if c.output.format == Format::Csv {
                return Err(ctx.err("output.format", "wigner output is json only"));
            }
        }
        Mode::Condensate => {
            if c.output.format == Format::Csv {
                return Err(ctx.err("output.format", "condensate peaks are exported as json only"));
            }
        }
        Mode::Validate => {}
    }
    if !(1..=17).contains(&c.output.precision) {
        return Err(ctx.err("output.precision", "precision must be 1 to 17 digits"));
    }
    Ok(())
}
