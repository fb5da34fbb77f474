//! Mean spherical approximation for the primitive-model electrolyte.
//!
//! Everything hangs off the screening parameter Γ, fixed by
//! 2Γ = α·√(Σρ_i t_i²) with t_i = (z_i − (π/2Δ)σ_i²P_n)/(1+Γσ_i).
//! P_n and Ω are recomputed exactly for each trial Γ, so the only
//! nonlinear unknown is Γ itself.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::system::{moments, Mixture};

/// Node count used by [`helmholtz_charging`] when the caller has no preference.
pub const DEFAULT_CHARGING_POINTS: usize = 32;

/// Iteration controls for [`solve_gamma_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MsaOptions {
    /// Relative residual |2Γ − α√D_a|/(2Γ) accepted at return.
    pub tol: f64,
    pub max_iter: usize,
    /// Weight of the new iterate in the damped fixed point.
    pub damping: f64,
}

impl Default for MsaOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 500,
            damping: 0.5,
        }
    }
}

/// Solved MSA state for one mixture.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MsaSolution {
    /// Screening parameter Γ.
    pub gamma: f64,
    pub p_n: f64,
    pub omega: f64,
    /// Void fraction 1 − ξ₃.
    pub delta: f64,
    pub n_coeff: Vec<f64>,
    pub a_coeff: Vec<f64>,
    /// Screened charges t_i = z_i + σ_iN_i.
    pub screened: Vec<f64>,
    /// Q′_ij, row-major.
    pub q_prime: Vec<Vec<f64>>,
    /// Q″_ij, row-major.
    pub q_dprime: Vec<Vec<f64>>,
    pub m0: f64,
    pub iterations: usize,
    pub residual: f64,
    /// True when the fixed point stalled and bisection produced Γ.
    pub bisected: bool,
}

impl MsaSolution {
    pub fn len(&self) -> usize {
        self.n_coeff.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n_coeff.is_empty()
    }

    fn check(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                len: self.len(),
            })
        }
    }
}

/// Ω, P_n and t_i at a trial Γ.
struct Screening {
    omega: f64,
    p_n: f64,
    t: Vec<f64>,
    d_a: f64,
}

fn screening(m: &Mixture, delta: f64, gamma: f64) -> Screening {
    let c = PI / (2.0 * delta);
    let mut vol = 0.0;
    let mut charge = 0.0;
    for s in m.species() {
        let denom = 1.0 + gamma * s.diameter;
        vol += s.density * s.diameter.powi(3) / denom;
        charge += s.density * s.diameter * s.valence as f64 / denom;
    }
    let omega = 1.0 + c * vol;
    let p_n = charge / omega;
    let t: Vec<f64> = m
        .species()
        .iter()
        .map(|s| {
            (s.valence as f64 - c * s.diameter * s.diameter * p_n) / (1.0 + gamma * s.diameter)
        })
        .collect();
    let d_a = m.densities().zip(&t).map(|(rho, t)| rho * t * t).sum();
    Screening { omega, p_n, t, d_a }
}

/// Debye wavenumber κ_D = α√(Σρz²).
pub fn debye_kappa(m: &Mixture) -> f64 {
    (m.alpha_sq()
        * m.densities()
            .zip(m.valences())
            .map(|(r, z)| r * z * z)
            .sum::<f64>())
    .sqrt()
}

pub fn solve_gamma(m: &Mixture, tol: f64, max_iter: usize) -> Result<MsaSolution> {
    solve_gamma_with(
        m,
        &MsaOptions {
            tol,
            max_iter,
            ..MsaOptions::default()
        },
    )
}

/// Solve for Γ and fill in every derived coefficient.
///
/// An uncharged mixture, or α² = 0, yields the Γ = 0 solution with all
/// electrostatic outputs zero.
pub fn solve_gamma_with(m: &Mixture, opts: &MsaOptions) -> Result<MsaSolution> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )));
    }
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "damping must lie in (0, 1], got {}",
            opts.damping
        )));
    }
    let mo = moments(m)?;
    let delta = mo.delta;
    if !m.is_charged() || debye_kappa(m) == 0.0 {
        return Ok(neutral_solution(m, delta));
    }
    let alpha = m.alpha_sq().sqrt();
    let kappa = debye_kappa(m);
    let rel_residual = |g: f64, d_a: f64| (2.0 * g - alpha * d_a.sqrt()).abs() / (2.0 * g);

    let mut gamma = 0.5 * kappa;
    let mut found = None;
    let mut last = f64::INFINITY;
    for it in 1..=opts.max_iter {
        let s = screening(m, delta, gamma);
        let res = rel_residual(gamma, s.d_a);
        last = res;
        if res <= opts.tol {
            found = Some((gamma, it, res, false));
            break;
        }
        let target = 0.5 * alpha * s.d_a.sqrt();
        gamma = (1.0 - opts.damping) * gamma + opts.damping * target;
        if !gamma.is_finite() || gamma <= 0.0 {
            break;
        }
    }

    let (gamma, iterations, residual, bisected) = match found {
        Some(v) => v,
        None => {
            let (g, iters) = bisect_gamma(m, delta, alpha, kappa);
            let res = rel_residual(g, screening(m, delta, g).d_a);
            if res > opts.tol {
                return Err(Error::NoConvergence {
                    iterations: opts.max_iter,
                    residual: last.min(res),
                });
            }
            (g, opts.max_iter + iters, res, true)
        }
    };
    Ok(assemble(m, delta, gamma, iterations, residual, bisected))
}

/// Root of 2Γ − α√D_a(Γ), which is negative at 0 and increasing.
fn bisect_gamma(m: &Mixture, delta: f64, alpha: f64, kappa: f64) -> (f64, usize) {
    let f = |g: f64| 2.0 * g - alpha * screening(m, delta, g).d_a.sqrt();
    let mut lo = 0.0;
    let mut hi = 10.0 * kappa;
    while f(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    let mut iters = 0;
    while iters < 400 {
        iters += 1;
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let g = if f(lo).abs() < f(hi).abs() { lo } else { hi };
    (g, iters)
}

fn neutral_solution(m: &Mixture, delta: f64) -> MsaSolution {
    let n = m.len();
    let mut sol = assemble(m, delta, 0.0, 0, 0.0, false);
    sol.p_n = 0.0;
    sol.n_coeff = vec![0.0; n];
    sol.a_coeff = vec![0.0; n];
    sol.m0 = 0.0;
    // Drop the electrostatic part of Q′ that assemble() added from t = z.
    for i in 0..n {
        for j in 0..n {
            sol.q_prime[i][j] += 0.5 * m.alpha_sq() * sol.screened[i] * sol.screened[j];
        }
    }
    sol.screened = vec![0.0; n];
    sol
}

fn assemble(
    m: &Mixture,
    delta: f64,
    gamma: f64,
    iterations: usize,
    residual: f64,
    bisected: bool,
) -> MsaSolution {
    let s = screening(m, delta, gamma);
    let c = PI / (2.0 * delta);
    let alpha_sq = m.alpha_sq();
    let sp = m.species();
    let n_coeff: Vec<f64> = sp
        .iter()
        .map(|s_i| {
            -(gamma * s_i.valence as f64 + c * s_i.diameter * s.p_n) / (1.0 + gamma * s_i.diameter)
        })
        .collect();
    let a_coeff: Vec<f64> = if gamma > 0.0 {
        s.t.iter().map(|t| alpha_sq * t / (2.0 * gamma)).collect()
    } else {
        vec![0.0; sp.len()]
    };
    let m0 = PI / 6.0
        * sp.iter()
            .zip(&s.t)
            .map(|(s_i, t)| s_i.density * s_i.diameter.powi(2) * (t + 0.5 * s_i.valence as f64))
            .sum::<f64>();
    let s2: f64 = sp
        .iter()
        .map(|s_i| s_i.density * s_i.diameter.powi(2))
        .sum();
    let pre = 2.0 * PI / delta;
    let mut q_prime = vec![vec![0.0; sp.len()]; sp.len()];
    let mut q_dprime = vec![vec![0.0; sp.len()]; sp.len()];
    for (i, si) in sp.iter().enumerate() {
        for (j, sj) in sp.iter().enumerate() {
            let r_ij = 0.5 * (si.diameter + sj.diameter);
            q_prime[i][j] = pre * (r_ij + PI / (4.0 * delta) * si.diameter * sj.diameter * s2)
                - 0.5 * alpha_sq * s.t[i] * s.t[j];
            q_dprime[i][j] = pre * (1.0 + c * sj.diameter * s2) + PI / delta * a_coeff[j] * s.p_n;
        }
    }
    MsaSolution {
        gamma,
        p_n: s.p_n,
        omega: s.omega,
        delta,
        n_coeff,
        a_coeff,
        screened: s.t,
        q_prime,
        q_dprime,
        m0,
        iterations,
        residual,
        bisected,
    }
}

pub fn n_coefficient(sol: &MsaSolution, i: usize) -> Result<f64> {
    sol.check(i)?;
    Ok(sol.n_coeff[i])
}

pub fn a_coefficient(sol: &MsaSolution, j: usize) -> Result<f64> {
    sol.check(j)?;
    if sol.gamma == 0.0 {
        return Err(Error::ZeroGamma);
    }
    Ok(sol.a_coeff[j])
}

/// (Q′_ij, Q″_ij).
pub fn q_coefficients(sol: &MsaSolution, i: usize, j: usize) -> Result<(f64, f64)> {
    sol.check(i)?;
    sol.check(j)?;
    Ok((sol.q_prime[i][j], sol.q_dprime[i][j]))
}

/// βΔE/V from (α²/4π)Σρ_j z_j N_j.
pub fn internal_energy(sol: &MsaSolution, m: &Mixture) -> f64 {
    m.alpha_sq() / (4.0 * PI)
        * m.densities()
            .zip(m.valences())
            .zip(&sol.n_coeff)
            .map(|((r, z), n)| r * z * n)
            .sum::<f64>()
}

/// βΔE/V from −(α²/4π)[ΓΣρz²/(1+Γσ) + (π/2Δ)P_n²Ω].
pub fn internal_energy_closed(sol: &MsaSolution, m: &Mixture) -> f64 {
    let g = sol.gamma;
    let sum: f64 = m
        .species()
        .iter()
        .map(|s| s.density * (s.valence as f64).powi(2) / (1.0 + g * s.diameter))
        .sum();
    -m.alpha_sq() / (4.0 * PI) * (g * sum + PI / (2.0 * sol.delta) * sol.p_n * sol.p_n * sol.omega)
}

/// βΔA/V by the charging integral ∫₀¹ 2ΔE(λ²α²)/λ dλ.
///
/// The rule is applied with `quad_points` and `2·quad_points` nodes; a
/// relative change above 1e-8 is reported as [`Error::QuadTooCoarse`].
pub fn helmholtz_charging(m: &Mixture, quad_points: usize) -> Result<f64> {
    if quad_points == 0 {
        return Err(Error::InvalidParameter(
            "charging quadrature needs at least one node".into(),
        ));
    }
    moments(m)?;
    if !m.is_charged() {
        return Ok(0.0);
    }
    let integrate = |n: usize| -> Result<f64> {
        let rule = GaussLegendre::new(n);
        let mut acc = 0.0;
        for (lam, w) in rule.points(0.0, 1.0) {
            let scaled = m.with_alpha_sq(lam * lam * m.alpha_sq())?;
            let sol = solve_gamma_with(&scaled, &MsaOptions::default())?;
            acc += w * 2.0 * internal_energy(&sol, &scaled) / lam;
        }
        Ok(acc)
    };
    let coarse = integrate(quad_points)?;
    let fine = integrate(2 * quad_points)?;
    if (fine - coarse).abs() > 1e-8 * fine.abs() {
        return Err(Error::QuadTooCoarse { coarse, fine });
    }
    Ok(fine)
}

/// Electrostatic part of ln γ_i, with the species-independent constant set to zero.
pub fn ln_gamma_elec(sol: &MsaSolution, m: &Mixture, i: usize) -> Result<f64> {
    sol.check(i)?;
    m.check_index(i)?;
    let a2 = m.alpha_sq();
    let s = &m.species()[i];
    let (z, sigma) = (s.valence as f64, s.diameter);
    let p = sol.p_n;
    Ok(a2 / (4.0 * PI) * z * (sol.n_coeff[i] - sol.m0)
        - p * sigma / (4.0 * sol.delta)
            * (sol.gamma * sol.a_coeff[i] + PI / (12.0 * sol.delta) * a2 * p * sigma * sigma))
}

pub fn ln_gamma_elec_all(sol: &MsaSolution, m: &Mixture) -> Result<Vec<f64>> {
    (0..m.len()).map(|i| ln_gamma_elec(sol, m, i)).collect()
}

/// Mean ionic ln γ± of a binary salt from the per-ion values.
pub fn mean_ln_gamma(z_plus: i32, ln_plus: f64, z_minus: i32, ln_minus: f64) -> f64 {
    let nu_plus = z_minus.unsigned_abs() as f64;
    let nu_minus = z_plus.unsigned_abs() as f64;
    (nu_plus * ln_plus + nu_minus * ln_minus) / (nu_plus + nu_minus)
}

/// Equal-diameter screening, Γσ = (−1 + √(1+2x))/2.
pub fn waisman_lebowitz_gamma(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::NegativeX(x));
    }
    // Rationalised to avoid cancellation at small x.
    Ok(x / (1.0 + (1.0 + 2.0 * x).sqrt()))
}

/// Companion coefficient B = −Γσ/(1+Γσ).
pub fn waisman_lebowitz_b(x: f64) -> Result<f64> {
    let gs = waisman_lebowitz_gamma(x)?;
    Ok(-gs / (1.0 + gs))
}
