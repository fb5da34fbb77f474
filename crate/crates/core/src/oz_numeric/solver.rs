use std::f64::consts::PI;
use std::io::Write;

use super::{RadialGrid, SineTransform};
use crate::error::{Error, Result};
use crate::format::fmt12;
use crate::system::density_from_packing;

/// Picard iteration controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardOptions {
    /// Fraction of the closure update mixed into c each step, in (0, 1].
    pub mix: f64,
    /// Convergence threshold on max_j |c_new − c_old|.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            mix: 0.5,
            tol: 1e-8,
            max_iter: 100_000,
        }
    }
}

/// Correlation functions on the grid after a Picard run.
#[derive(Debug, Clone)]
pub struct CorrelationTable {
    pub grid: RadialGrid,
    pub c: Vec<f64>,
    /// Indirect correlation h − c.
    pub gamma_ind: Vec<f64>,
    pub h: Vec<f64>,
    pub g: Vec<f64>,
    /// ĉ on the k grid.
    pub c_hat: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub final_change: f64,
    pub eta: f64,
    pub diameter: f64,
    pub density: f64,
}

impl CorrelationTable {
    /// ĉ(k = 0) = 4π dr Σ r² c(r).
    pub fn c_hat_zero(&self) -> f64 {
        let g = &self.grid;
        4.0 * PI
            * g.dr()
            * self
                .c
                .iter()
                .enumerate()
                .map(|(j, c)| g.r(j).powi(2) * c)
                .sum::<f64>()
    }

    /// 1 − ρĉ(0), the inverse reduced compressibility.
    pub fn inverse_compressibility(&self) -> f64 {
        1.0 - self.density * self.c_hat_zero()
    }
}

/// Fraction of node j's cell treated as inside the core. Zero outside.
fn core_weight(r: f64, diameter: f64, dr: f64) -> f64 {
    if r <= diameter * (1.0 + 1e-12) {
        ((diameter - r) / dr + 0.5).clamp(0.5, 1.0)
    } else {
        0.0
    }
}

fn closure(weights: &[f64], gamma: &[f64]) -> Vec<f64> {
    weights
        .iter()
        .zip(gamma)
        .map(|(w, g)| if *w > 0.0 { -w * (1.0 + g) } else { 0.0 })
        .collect()
}

fn indirect(t: &SineTransform, c: &[f64], rho: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let c_hat = t.forward(c)?;
    let mut g_hat = Vec::with_capacity(c_hat.len());
    for (m, ch) in c_hat.iter().enumerate() {
        let denom = 1.0 - rho * ch;
        if !(denom > 0.0) {
            return Err(Error::PoleEncountered { k: t.grid().k(m) });
        }
        g_hat.push(rho * ch * ch / denom);
    }
    Ok((t.inverse(&g_hat)?, c_hat))
}

fn validate(eta: f64, diameter: f64, grid: &RadialGrid, opts: &PicardOptions) -> Result<()> {
    if !(eta > 0.0 && eta <= 0.5) {
        return Err(Error::EtaOutOfRange(eta));
    }
    if !(diameter > 0.0) || !diameter.is_finite() {
        return Err(Error::NonPositiveRadius(diameter));
    }
    if grid.r_max() < 20.0 * diameter {
        return Err(Error::InvalidGrid(format!(
            "grid reaches {} but must cover 20 diameters ({})",
            grid.r_max(),
            20.0 * diameter
        )));
    }
    if !(opts.mix > 0.0 && opts.mix <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "mix must lie in (0, 1], got {}",
            opts.mix
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )));
    }
    Ok(())
}

/// Run the damped Picard iteration and return the table whether or not it
/// converged. Validation failures and poles are still errors.
pub fn picard(
    eta: f64,
    diameter: f64,
    grid: &RadialGrid,
    opts: &PicardOptions,
) -> Result<CorrelationTable> {
    validate(eta, diameter, grid, opts)?;
    let rho = density_from_packing(eta, diameter);
    let t = SineTransform::new(*grid);
    let weights: Vec<f64> = (0..grid.n())
        .map(|j| core_weight(grid.r(j), diameter, grid.dr()))
        .collect();

    // Start from the low-density limit c = f_Mayer.
    let mut c: Vec<f64> = weights.iter().map(|w| -w).collect();
    let mut change = f64::INFINITY;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let (gamma, _) = indirect(&t, &c, rho)?;
        let target = closure(&weights, &gamma);
        change = 0.0;
        for (ci, ti) in c.iter_mut().zip(&target) {
            change = f64::max(change, (ti - *ci).abs());
            *ci += opts.mix * (ti - *ci);
        }
        if change <= opts.tol {
            break;
        }
    }
    let converged = change <= opts.tol;

    // Close once more so c, γ and h are mutually consistent on return.
    let (gamma, _) = indirect(&t, &c, rho)?;
    let c = closure(&weights, &gamma);
    let c_hat = t.forward(&c)?;
    let mut h = Vec::with_capacity(c.len());
    let mut g = Vec::with_capacity(c.len());
    for ((ci, gi), w) in c.iter().zip(&gamma).zip(&weights) {
        if *w == 1.0 {
            h.push(-1.0);
            g.push(0.0);
        } else {
            h.push(ci + gi);
            g.push(1.0 + ci + gi);
        }
    }
    Ok(CorrelationTable {
        grid: *grid,
        c,
        gamma_ind: gamma,
        h,
        g,
        c_hat,
        converged,
        iterations,
        final_change: change,
        eta,
        diameter,
        density: rho,
    })
}

/// Solve the PY hard-sphere OZ equation on `grid`.
pub fn solve_py_numeric(
    eta: f64,
    diameter: f64,
    grid: &RadialGrid,
    opts: &PicardOptions,
) -> Result<CorrelationTable> {
    let table = picard(eta, diameter, grid, opts)?;
    if !table.converged {
        return Err(Error::NoConvergence {
            iterations: table.iterations,
            residual: table.final_change,
        });
    }
    Ok(table)
}

/// g(R⁺) = 1 + γ(R), with γ linearly extrapolated from the first two
/// nodes outside the core.
pub fn contact_extrapolate(table: &CorrelationTable, diameter: f64) -> Result<f64> {
    if !table.converged {
        return Err(Error::NotConverged);
    }
    if !(diameter > 0.0) {
        return Err(Error::NonPositiveRadius(diameter));
    }
    let grid = &table.grid;
    let first = (0..grid.n())
        .find(|&j| grid.r(j) > diameter * (1.0 + 1e-12))
        .filter(|&j| j + 1 < grid.n())
        .ok_or_else(|| Error::InvalidGrid(format!("no two nodes beyond r = {diameter}")))?;
    let (r1, r2) = (grid.r(first), grid.r(first + 1));
    let (g1, g2) = (table.gamma_ind[first], table.gamma_ind[first + 1]);
    Ok(1.0 + g1 + (g2 - g1) * (diameter - r1) / (r2 - r1))
}

/// Dump r, c, h, g as CSV, one row per grid node.
pub fn write_table_csv<W: Write>(table: &CorrelationTable, mut out: W) -> std::io::Result<()> {
    writeln!(out, "r,c,h,g")?;
    for j in 0..table.grid.n() {
        writeln!(
            out,
            "{},{},{},{}",
            fmt12(table.grid.r(j)),
            fmt12(table.c[j]),
            fmt12(table.h[j]),
            fmt12(table.g[j])
        )?;
    }
    Ok(())
}
