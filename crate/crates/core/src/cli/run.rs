use rayon::prelude::*;

use super::{CliError, Command, ConfigError, RunConfig, SweepTarget, SweepVariable};
use crate::error::Error;
use crate::format::fmt12;
use crate::msa::{self, MsaOptions, DEFAULT_CHARGING_POINTS};
use crate::oz_numeric::{
    contact_extrapolate, solve_py_numeric, write_table_csv, PicardOptions, RadialGrid,
};
use crate::py_mixture::mixture_thermo;
use crate::py_single::{
    contact_value, inverse_compressibility, z_carnahan_starling, z_compressibility, z_virial,
};
use crate::system::{moments, Mixture};

/// Upper packing fraction accepted by the command line.
pub const ETA_CAP: f64 = 0.55;

/// A CSV table: header plus rows of already formatted fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Overrides applied at one sweep point.
#[derive(Debug, Clone, Copy, Default)]
struct Point {
    eta: Option<f64>,
    alpha_sq: Option<f64>,
}

fn num(x: f64) -> String {
    fmt12(x)
}

fn check_eta(eta: f64) -> Result<f64, Error> {
    if (0.0..=ETA_CAP).contains(&eta) {
        Ok(eta)
    } else {
        Err(Error::EtaOutOfRange(eta))
    }
}

fn mixture_at(cfg: &RunConfig, p: Point) -> Result<Mixture, Error> {
    let mut m = cfg.system.mixture()?;
    if let Some(a) = p.alpha_sq {
        m = m.with_alpha_sq(a)?;
    }
    if let Some(eta) = p.eta.or(cfg.eta) {
        m = m.with_packing_fraction(check_eta(eta)?)?;
    } else {
        check_eta(moments(&m)?.eta)?;
    }
    Ok(m)
}

fn eos(cfg: &RunConfig, p: Point) -> Result<Table, CliError> {
    let etas = match p.eta.or(cfg.eta) {
        Some(eta) => vec![eta],
        None => {
            let steps = cfg.steps.unwrap_or(11);
            if steps < 2 {
                return Err(ConfigError::new(format!(
                    "eos table needs at least 2 steps, got {steps}"
                ))
                .into());
            }
            (0..steps)
                .map(|i| 0.5 * i as f64 / (steps - 1) as f64)
                .collect()
        }
    };
    let mut t = Table::new(&[
        "eta",
        "z_compressibility",
        "z_virial",
        "z_carnahan_starling",
        "contact_value",
    ]);
    for eta in etas {
        check_eta(eta)?;
        t.rows.push(vec![
            num(eta),
            num(z_compressibility(eta)?),
            num(z_virial(eta)?),
            num(z_carnahan_starling(eta)?),
            num(contact_value(eta)?),
        ]);
    }
    Ok(t)
}

fn mix(cfg: &RunConfig, p: Point) -> Result<Table, CliError> {
    let m = mixture_at(cfg, p)?;
    let th = mixture_thermo(&m)?;
    let x = m.mole_fractions();
    let mut t = Table::new(&[
        "species",
        "sigma",
        "rho",
        "x",
        "z_bmcsl",
        "a_ex",
        "ln_gamma_hs",
    ]);
    for (i, s) in m.species().iter().enumerate() {
        t.rows.push(vec![
            (i + 1).to_string(),
            num(s.diameter),
            num(s.density),
            num(x[i]),
            num(th.z_bmcsl),
            num(th.a_ex_per_particle),
            num(th.ln_gamma_hs[i]),
        ]);
    }
    Ok(t)
}

fn msa_cmd(cfg: &RunConfig, p: Point) -> Result<Table, CliError> {
    let m = mixture_at(cfg, p)?;
    if !m.is_charged() && !cfg.allow_neutral {
        return Err(Error::NotCharged.into());
    }
    let opts = MsaOptions {
        tol: cfg.tol.unwrap_or(MsaOptions::default().tol),
        ..MsaOptions::default()
    };
    let sol = msa::solve_gamma_with(&m, &opts)?;
    let de = msa::internal_energy(&sol, &m);
    let da = msa::helmholtz_charging(&m, DEFAULT_CHARGING_POINTS)?;
    let elec = msa::ln_gamma_elec_all(&sol, &m)?;
    let hs = mixture_thermo(&m)?.ln_gamma_hs;
    let total: Vec<f64> = elec.iter().zip(&hs).map(|(e, h)| e + h).collect();

    // Mean ionic value only when exactly one cation and one anion are present.
    let ions: Vec<usize> = (0..m.len())
        .filter(|&i| m.species()[i].valence != 0)
        .collect();
    let mean = match ions.as_slice() {
        [a, b] if m.species()[*a].valence.signum() != m.species()[*b].valence.signum() => {
            let (cat, an) = if m.species()[*a].valence > 0 {
                (*a, *b)
            } else {
                (*b, *a)
            };
            Some(msa::mean_ln_gamma(
                m.species()[cat].valence,
                total[cat],
                m.species()[an].valence,
                total[an],
            ))
        }
        _ => None,
    };

    let mut t = Table::new(&[
        "species",
        "sigma",
        "rho",
        "z",
        "gamma",
        "p_n",
        "omega",
        "n_i",
        "a_i",
        "delta_e",
        "delta_a",
        "ln_gamma_elec",
        "ln_gamma_hs",
        "ln_gamma_total",
        "ln_gamma_mean",
    ]);
    for (i, s) in m.species().iter().enumerate() {
        let mean_field = match mean {
            Some(v) if s.valence != 0 => num(v),
            _ => String::new(),
        };
        t.rows.push(vec![
            (i + 1).to_string(),
            num(s.diameter),
            num(s.density),
            s.valence.to_string(),
            num(sol.gamma),
            num(sol.p_n),
            num(sol.omega),
            num(sol.n_coeff[i]),
            num(sol.a_coeff[i]),
            num(de),
            num(da),
            num(elec[i]),
            num(hs[i]),
            num(total[i]),
            mean_field,
        ]);
    }
    Ok(t)
}

fn oz(cfg: &RunConfig, p: Point, write_table: bool) -> Result<Table, CliError> {
    let eta = p.eta.or(cfg.eta).unwrap_or(0.3);
    let sigma = cfg.system.species.first().map(|s| s.sigma).unwrap_or(1.0);
    if !(sigma > 0.0) {
        return Err(Error::NonPositiveRadius(sigma).into());
    }
    let grid = RadialGrid::new(
        cfg.grid.n.unwrap_or(4096),
        cfg.grid.dr.unwrap_or(sigma / 100.0),
    )?;
    let defaults = PicardOptions::default();
    let opts = PicardOptions {
        mix: cfg.grid.mix.unwrap_or(defaults.mix),
        tol: cfg.tol.or(cfg.grid.tol).unwrap_or(defaults.tol),
        max_iter: cfg.grid.max_iter.unwrap_or(defaults.max_iter),
    };
    let table = solve_py_numeric(eta, sigma, &grid, &opts)?;
    if write_table {
        if let Some(path) = &cfg.table {
            let file = std::fs::File::create(path)
                .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
            write_table_csv(&table, std::io::BufWriter::new(file))
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        }
    }
    let contact = contact_extrapolate(&table, sigma)?;
    let contact_exact = contact_value(eta)?;
    let inv = table.inverse_compressibility();
    let inv_exact = inverse_compressibility(eta)?;
    let mut t = Table::new(&[
        "eta",
        "contact_numeric",
        "contact_analytic",
        "contact_rel_err",
        "inv_compress_numeric",
        "inv_compress_analytic",
        "inv_compress_rel_err",
        "iterations",
    ]);
    t.rows.push(vec![
        num(eta),
        num(contact),
        num(contact_exact),
        num((contact - contact_exact).abs() / contact_exact),
        num(inv),
        num(inv_exact),
        num((inv - inv_exact).abs() / inv_exact),
        table.iterations.to_string(),
    ]);
    Ok(t)
}

fn single(
    cfg: &RunConfig,
    target: SweepTarget,
    p: Point,
    top_level: bool,
) -> Result<Table, CliError> {
    match target {
        SweepTarget::Eos => eos(cfg, p),
        SweepTarget::Mix => mix(cfg, p),
        SweepTarget::Msa => msa_cmd(cfg, p),
        SweepTarget::OzSolve => oz(cfg, p, top_level),
    }
}

fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var("OZ_THERMO_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(ConfigError::new(format!(
                "OZ_THERMO_THREADS must be a positive integer, got {v:?}"
            ))
            .into()),
        },
        Err(_) => Ok(None),
    }
}

fn sweep(cfg: &RunConfig, target: SweepTarget) -> Result<Table, CliError> {
    let spec = cfg
        .sweep
        .ok_or_else(|| ConfigError::new("sweep needs a [sweep] section or --var/--start/--stop"))?;
    spec.validate()?;
    if spec.variable == SweepVariable::AlphaSq
        && matches!(target, SweepTarget::Eos | SweepTarget::OzSolve)
    {
        return Err(ConfigError::new("alpha_sq sweeps apply only to mix and msa").into());
    }
    let values = spec.values();
    let point = |v: f64| match spec.variable {
        SweepVariable::Eta => Point {
            eta: Some(v),
            alpha_sq: None,
        },
        SweepVariable::AlphaSq => Point {
            eta: None,
            alpha_sq: Some(v),
        },
    };
    let work = || -> Vec<Result<Table, CliError>> {
        values
            .par_iter()
            .map(|&v| single(cfg, target, point(v), false))
            .collect()
    };
    let results = match thread_cap()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Io(e.to_string()))?
            .install(work),
        None => work(),
    };

    let mut out: Option<Table> = None;
    for (v, res) in values.iter().zip(results) {
        let t = res?;
        let table = out.get_or_insert_with(|| {
            let mut header = vec![spec.variable.name().to_string()];
            header.extend(t.header.iter().cloned());
            Table {
                header,
                rows: Vec::new(),
            }
        });
        for row in t.rows {
            let mut full = vec![num(*v)];
            full.extend(row);
            table.rows.push(full);
        }
    }
    Ok(out.expect("sweep has at least two points"))
}

/// Run the configured command and return its table without writing it.
pub fn execute(cfg: &RunConfig) -> Result<Table, CliError> {
    let p = Point::default();
    match &cfg.command {
        Command::Eos => single(cfg, SweepTarget::Eos, p, true),
        Command::Mix => single(cfg, SweepTarget::Mix, p, true),
        Command::Msa => single(cfg, SweepTarget::Msa, p, true),
        Command::OzSolve => single(cfg, SweepTarget::OzSolve, p, true),
        Command::Sweep { target } => sweep(cfg, *target),
    }
}
