use std::path::PathBuf;

use rayon::prelude::*;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use super::config::{Format, Mode, RunConfig};
use super::validate;
use super::CliError;
use crate::condensate::{
    condensate_crystal_distribution, condensate_fluid_distribution, peak_lattice_indices, total_momentum,
    total_momentum_closed_form,
};
use crate::contour::WeightConstants;
use crate::crystal::{BandMode, CrystalModel};
use crate::distribution::GriddedDistribution;
use crate::fluid::FluidSpec;
use crate::grid::Grid;
use crate::types::{PhysicalParams, Vec3};
use crate::wigner::{FreeResolvent, PeriodicResolvent, ResolventProvider, WignerField};

/// What a run writes: the main document, side files, and the validation verdict.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub main: String,
    pub extra: Vec<(PathBuf, String)>,
    pub failed_suites: usize,
}

/// Header recorded with every export.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub entries: Vec<(String, String)>,
    precision: usize,
}

impl Provenance {
    pub fn new(cfg: &RunConfig, config_bytes: &[u8]) -> Self {
        let digest = Sha256::digest(config_bytes);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        let precision = cfg.output.precision;
        let mut entries = vec![
            ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
            ("mode".to_string(), cfg.mode.name().to_string()),
            ("config_sha256".to_string(), hex),
        ];
        if let Some(p) = &cfg.params {
            entries.extend([
                ("hbar".to_string(), fmt(p.hbar, precision)),
                ("mass".to_string(), fmt(p.mass, precision)),
                ("tau".to_string(), fmt(p.tau, precision)),
                ("n_particles".to_string(), fmt(p.n_particles, precision)),
                ("volume".to_string(), fmt(p.volume, precision)),
                ("density".to_string(), fmt(p.density, precision)),
                ("statistics".to_string(), format!("{:?}", p.statistics).to_lowercase()),
            ]);
            if let Some(t) = p.temperature {
                entries.push(("temperature".to_string(), fmt(t, precision)));
            }
        }
        Provenance { entries, precision }
    }

    fn with(&self, extra: &[(&str, f64)]) -> Self {
        let mut out = self.clone();
        for (k, v) in extra {
            out.entries.push((k.to_string(), fmt(*v, self.precision)));
        }
        out
    }

    fn csv_header(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("# {k}={v}\n")).collect()
    }

    fn json(&self) -> Value {
        let map: Map<String, Value> = self.entries.iter().map(|(k, v)| (k.clone(), Value::from(v.as_str()))).collect();
        Value::Object(map)
    }
}

fn fmt(x: f64, precision: usize) -> String {
    format!("{:.*e}", precision - 1, x)
}

fn num(x: f64, precision: usize) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::from(fmt(x, precision).parse::<f64>().unwrap_or(x))
}

fn nums(xs: impl IntoIterator<Item = f64>, precision: usize) -> Value {
    Value::Array(xs.into_iter().map(|x| num(x, precision)).collect())
}

fn vec_json(v: &Vec3, dim: usize, precision: usize) -> Value {
    nums(v.iter().take(dim).copied(), precision)
}

fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

const AXES: [&str; 3] = ["px", "py", "pz"];

fn csv_table(prov: &Provenance, grid: &Grid, columns: &[(&str, &[f64])]) -> String {
    let p = prov.precision;
    let mut out = prov.csv_header();
    let mut head: Vec<&str> = AXES.to_vec();
    head.extend(columns.iter().map(|(n, _)| *n));
    out.push_str(&head.join(","));
    out.push('\n');
    for (i, x) in grid.points().enumerate() {
        let mut row: Vec<String> = (0..3).map(|k| fmt(if k < grid.dim() { x[k] } else { 0.0 }, p)).collect();
        row.extend(columns.iter().map(|(_, v)| fmt(v[i], p)));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn json_table(prov: &Provenance, grid: &Grid, columns: &[(&str, &[f64])]) -> String {
    let p = prov.precision;
    let mut doc = Map::new();
    doc.insert("provenance".into(), prov.json());
    doc.insert(
        "momenta".into(),
        Value::Array(grid.points().map(|x| vec_json(&x, grid.dim(), p)).collect()),
    );
    for (name, values) in columns {
        doc.insert(name.to_string(), nums(values.iter().copied(), p));
    }
    to_text(&Value::Object(doc))
}

fn table(format: Format, prov: &Provenance, grid: &Grid, columns: &[(&str, &[f64])]) -> String {
    match format {
        Format::Csv => csv_table(prov, grid, columns),
        Format::Json => json_table(prov, grid, columns),
    }
}

/// Run the configured mode and render its output.
pub fn execute(cfg: &RunConfig, prov: &Provenance, broaden: Option<f64>) -> Result<Outcome, CliError> {
    match cfg.mode {
        Mode::Fluid => fluid(cfg, prov),
        Mode::Crystal => crystal(cfg, prov),
        Mode::Condensate => condensate(cfg, prov, broaden),
        Mode::Wigner => wigner(cfg, prov),
        Mode::Validate => validate_mode(prov),
    }
}

fn params(cfg: &RunConfig) -> PhysicalParams {
    cfg.params.expect("params checked at parse time")
}

fn grid(cfg: &RunConfig) -> &Grid {
    cfg.grid.as_ref().expect("grid checked at parse time")
}

fn fluid(cfg: &RunConfig, prov: &Provenance) -> Result<Outcome, CliError> {
    let spec = FluidSpec::new(params(cfg))?;
    let grid = grid(cfg);
    let values = (0..grid.len())
        .into_par_iter()
        .map(|i| spec.rho1_via_residues(&grid.point(i)))
        .collect::<crate::Result<Vec<f64>>>()?;
    let dist = GriddedDistribution::new(grid.clone(), values)?;
    let q = dist.quadrature()?;
    let prov = prov.with(&[("A", spec.weights.a), ("quadrature", q)]);
    Ok(Outcome {
        main: table(cfg.output.format, &prov, grid, &[("rho", &dist.values)]),
        ..Outcome::default()
    })
}

fn crystal(cfg: &RunConfig, prov: &Provenance) -> Result<Outcome, CliError> {
    let l = cfg.lattice.as_ref().expect("lattice checked at parse time");
    let model = CrystalModel::new(l.lattice.clone(), l.potential.clone(), params(cfg))?;
    let dist = model.distribution(grid(cfg), BandMode::Ground)?;
    let q = dist.rho.quadrature()?;
    let prov = prov.with(&[("a_norm", dist.a_norm), ("quadrature", q)]);
    let columns: [(&str, &[f64]); 3] = [
        ("rho", &dist.rho.values),
        ("eps0", &dist.eps0),
        ("psi0_sq", &dist.psi0_sq),
    ];
    Ok(Outcome {
        main: table(cfg.output.format, &prov, grid(cfg), &columns),
        ..Outcome::default()
    })
}

fn condensate(cfg: &RunConfig, prov: &Provenance, broaden: Option<f64>) -> Result<Outcome, CliError> {
    let spec = cfg.condensate.as_ref().expect("condensate checked at parse time");
    let p = cfg.output.precision;
    let measure = match spec.lattice() {
        Some(_) => condensate_crystal_distribution(spec)?,
        None => condensate_fluid_distribution(spec)?,
    };
    let indices = match spec.lattice() {
        Some(_) => Some(peak_lattice_indices(&measure, spec)?),
        None => None,
    };
    let peaks: Vec<Value> = measure
        .peaks()
        .iter()
        .enumerate()
        .map(|(i, peak)| {
            let mut obj = json!({
                "weight": num(peak.weight, p),
                "location": vec_json(&peak.location, 3, p),
            });
            if let Some(idx) = &indices {
                obj["lattice_index"] = json!(idx[i]);
            }
            obj
        })
        .collect();
    let doc = json!({
        "provenance": prov.json(),
        "n_c": num(spec.n_c, p),
        "peaks": peaks,
        "total_weight": num(measure.total_weight(), p),
        "total_momentum": vec_json(&total_momentum(&measure), 3, p),
        "total_momentum_closed_form": vec_json(&total_momentum_closed_form(spec), 3, p),
    });
    let mut outcome = Outcome {
        main: to_text(&doc),
        ..Outcome::default()
    };
    if let Some(sigma) = broaden {
        let (Some(grid), Some(out)) = (&cfg.grid, &cfg.output.path) else {
            return Err(CliError::Usage {
                key: "broaden".into(),
                message: "--broaden needs a grid block and an output path".into(),
            });
        };
        let smooth = measure.broaden(grid, sigma)?;
        let prov = prov.with(&[("broadening_sigma", sigma)]);
        let mut text = String::from("# visualization only: Gaussian-broadened delta peaks, not a physical distribution\n");
        text.push_str(&csv_table(&prov, grid, &[("rho_broadened", &smooth.values)]));
        outcome.extra.push((PathBuf::from(format!("{out}.broadened.csv")), text));
    }
    Ok(outcome)
}

/// One periodic cell per lattice axis, or the whole box for the uniform gas.
fn wigner_positions(cfg: &RunConfig, dim: usize) -> Result<Grid, CliError> {
    let n = cfg.wigner.position_points;
    let p = params(cfg);
    let axes: Vec<(f64, f64, usize)> = match &cfg.lattice {
        Some(l) => l
            .lattice
            .basis()
            .iter()
            .enumerate()
            .map(|(k, b)| (0.0, 2.0 * std::f64::consts::PI / b[k], n))
            .collect(),
        None => {
            let side = p.volume.powf(1.0 / dim as f64);
            vec![(-0.5 * side, side, n); dim]
        }
    };
    Ok(Grid::periodic_axes(&axes)?)
}

fn wigner(cfg: &RunConfig, prov: &Provenance) -> Result<Outcome, CliError> {
    let params = params(cfg);
    let order = cfg.wigner.order;
    let pg = grid(cfg);
    let dim = pg.dim();
    let p = cfg.output.precision;
    let single_positions = wigner_positions(cfg, dim)?;
    let provider: Box<dyn ResolventProvider> = match &cfg.lattice {
        Some(l) => Box::new(PeriodicResolvent::new(l.lattice.clone(), l.potential.clone(), params)),
        None => Box::new(FreeResolvent::new(params, 1, dim)?),
    };
    let unit = WeightConstants::new(1.0, dim)?;
    let single = WignerField::compute(single_positions.clone(), pg.clone(), provider.as_ref(), &unit, None, &params)?;
    let weights = WeightConstants::from_normalization(params.n_particles, single.marginal_momentum()?.quadrature()?, dim)?;
    let mut field = match order {
        1 => single,
        _ => {
            let pair = FreeResolvent::new(params, 2, dim)?;
            let axis = (single_positions.origin(0), cfg.wigner.position_points);
            let side = single_positions.spacing(0) * axis.1 as f64;
            let positions = Grid::periodic_axes(&[(axis.0, side, axis.1), (axis.0, side, axis.1)])?;
            let half = (pg.count(0) - 1) / 2;
            let momenta = Grid::symmetric_axes(&[(pg.spacing(0), half), (pg.spacing(0), half)])?;
            WignerField::compute(positions, momenta, &pair, &weights, None, &params)?
        }
    };
    if order == 1 {
        for v in field.values.iter_mut() {
            *v *= weights.a;
        }
    }
    let rho_r = field.marginal_position()?;
    let rho_p = field.marginal_momentum()?;
    let qr = rho_r.quadrature_unchecked();
    let qp = rho_p.quadrature()?;
    let prov = prov.with(&[
        ("A", weights.a),
        ("A_s", weights.a_s(order, &params)?),
        ("order", order as f64),
        ("position_quadrature", qr),
        ("momentum_quadrature", qp),
    ]);
    let sd = field.positions.dim();
    let doc = json!({
        "provenance": prov.json(),
        "order": order,
        "dim": dim,
        "positions": field.positions.points().map(|x| vec_json(&x, sd, p)).collect::<Vec<_>>(),
        "momenta": field.momenta.points().map(|x| vec_json(&x, sd, p)).collect::<Vec<_>>(),
        "layout": "w[ix * n_momenta + ip]",
        "w_re": nums(field.values.iter().map(|c| c.re), p),
        "w_im": nums(field.values.iter().map(|c| c.im), p),
        "marginal_position": nums(rho_r.values.iter().copied(), p),
        "marginal_momentum": nums(rho_p.values.iter().copied(), p),
        "position_quadrature": num(qr, p),
        "momentum_quadrature": num(qp, p),
        "imaginary_fraction": num(field.imaginary_fraction(), p),
    });
    Ok(Outcome {
        main: to_text(&doc),
        ..Outcome::default()
    })
}

fn validate_mode(prov: &Provenance) -> Result<Outcome, CliError> {
    let report = validate::run_all();
    let failed = report.suites.iter().filter(|s| !s.passed).count();
    let doc = json!({
        "provenance": prov.json(),
        "passed": report.passed,
        "suites": report.suites,
    });
    Ok(Outcome {
        main: to_text(&doc),
        extra: Vec::new(),
        failed_suites: failed,
    })
}
