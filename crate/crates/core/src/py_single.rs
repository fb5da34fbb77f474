//! Closed-form Percus–Yevick solution for a one-component hard-sphere fluid.
//!
//! The Baxter factor function is the quadratic
//! Q(r) = ½a(r² − R²) + b(r − R) on [0, R], zero elsewhere, with
//! a = (1+2η)/(1−η)² and b = −3Rη/(2(1−η)²). Everything else here
//! (equations of state, contact value, c(r)) follows from those two
//! coefficients.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::system::density_from_packing;

fn check_eta(eta: f64) -> Result<()> {
    if (0.0..1.0).contains(&eta) {
        Ok(())
    } else {
        Err(Error::EtaOutOfRange(eta))
    }
}

/// Baxter coefficients and derived scalars for one-component PY hard spheres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PySingleSolution {
    pub eta: f64,
    /// Hard-sphere diameter R.
    pub diameter: f64,
    /// Quadratic Baxter coefficient (dimensionless).
    pub a: f64,
    /// Linear Baxter coefficient (length).
    pub b: f64,
    /// Q̂(0) = (1+2η)/(1−η)².
    pub q_hat_zero: f64,
}

pub fn solve_py_single(eta: f64, diameter: f64) -> Result<PySingleSolution> {
    check_eta(eta)?;
    if !(diameter > 0.0) {
        return Err(Error::NonPositiveRadius(diameter));
    }
    let void_sq = (1.0 - eta).powi(2);
    let a = (1.0 + 2.0 * eta) / void_sq;
    let b = -1.5 * diameter * eta / void_sq;
    Ok(PySingleSolution {
        eta,
        diameter,
        a,
        b,
        q_hat_zero: (1.0 + 2.0 * eta) / void_sq,
    })
}

impl PySingleSolution {
    pub fn density(&self) -> f64 {
        density_from_packing(self.eta, self.diameter)
    }

    /// Q̂(0) rebuilt from the coefficients, 1 + 4ηa + 6ηb/R.
    pub fn q_hat_zero_from_coefficients(&self) -> f64 {
        1.0 + 4.0 * self.eta * self.a + 6.0 * self.eta * self.b / self.diameter
    }

    /// 1 − ρĈ(0) = Q̂(0)².
    pub fn inverse_compressibility(&self) -> f64 {
        self.q_hat_zero * self.q_hat_zero
    }

    pub fn baxter_q(&self, r: f64) -> f64 {
        let big_r = self.diameter;
        if !(0.0..=big_r).contains(&r) {
            return 0.0;
        }
        0.5 * self.a * (r * r - big_r * big_r) + self.b * (r - big_r)
    }

    /// Q′(r) = ar + b on the support, zero outside.
    pub fn baxter_q_prime(&self, r: f64) -> f64 {
        if !(0.0..=self.diameter).contains(&r) {
            return 0.0;
        }
        self.a * r + self.b
    }

    /// Direct correlation function c(r).
    ///
    /// Inside the core, r·c(r) = −Q′(r) + 2πρ ∫₀^{R−r} Q(t) Q′(t+r) dt. The
    /// integrand is a cubic, so a three-point Gauss–Legendre rule is exact.
    pub fn direct_correlation(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::NonPositiveRadius(r));
        }
        let big_r = self.diameter;
        if r >= big_r {
            return Ok(0.0);
        }
        let rule = GaussLegendre::new(3);
        let overlap = rule.integrate(0.0, big_r - r, |t| {
            let q = 0.5 * self.a * (t * t - big_r * big_r) + self.b * (t - big_r);
            q * (self.a * (t + r) + self.b)
        });
        Ok((-self.baxter_q_prime(r) + 2.0 * PI * self.density() * overlap) / r)
    }
}

pub fn baxter_q(r: f64, s: &PySingleSolution) -> f64 {
    s.baxter_q(r)
}

pub fn direct_correlation(r: f64, s: &PySingleSolution) -> Result<f64> {
    s.direct_correlation(r)
}

/// Contact value g(R⁺) = (1 + η/2)/(1 − η)².
pub fn contact_value(eta: f64) -> Result<f64> {
    check_eta(eta)?;
    Ok((1.0 + 0.5 * eta) / (1.0 - eta).powi(2))
}

/// Compressibility-route PY equation of state.
pub fn z_compressibility(eta: f64) -> Result<f64> {
    check_eta(eta)?;
    Ok((1.0 + eta + eta * eta) / (1.0 - eta).powi(3))
}

/// Virial-route PY equation of state.
pub fn z_virial(eta: f64) -> Result<f64> {
    check_eta(eta)?;
    Ok((1.0 + 2.0 * eta + 3.0 * eta * eta) / (1.0 - eta).powi(2))
}

pub fn z_carnahan_starling(eta: f64) -> Result<f64> {
    check_eta(eta)?;
    let e2 = eta * eta;
    Ok((1.0 + eta + e2 - e2 * eta) / (1.0 - eta).powi(3))
}

/// (1/ρk_BT)(∂P/∂ρ) = [(1+2η)/(1−η)²]².
pub fn inverse_compressibility(eta: f64) -> Result<f64> {
    check_eta(eta)?;
    let q = (1.0 + 2.0 * eta) / (1.0 - eta).powi(2);
    Ok(q * q)
}

/// Single-component excess chemical potential in the closed form
/// −ln(1−η) + η(3−η)/(1−η)² + η²(3−2η)/(2(1−η)³).
///
/// This is not the derivative of the Carnahan–Starling free energy; see
/// [`excess_mu_carnahan_starling`] for the thermodynamically consistent value.
pub fn excess_mu_single(eta: f64) -> Result<f64> {
    check_eta(eta)?;
    let void = 1.0 - eta;
    Ok(-void.ln()
        + eta * (3.0 - eta) / (void * void)
        + eta * eta * (3.0 - 2.0 * eta) / (2.0 * void.powi(3)))
}

/// Carnahan–Starling excess Helmholtz energy per particle, (4η − 3η²)/(1 − η)².
pub fn excess_helmholtz_carnahan_starling(eta: f64) -> Result<f64> {
    check_eta(eta)?;
    Ok((4.0 * eta - 3.0 * eta * eta) / (1.0 - eta).powi(2))
}

/// Carnahan–Starling excess chemical potential, (8η − 9η² + 3η³)/(1 − η)³.
pub fn excess_mu_carnahan_starling(eta: f64) -> Result<f64> {
    check_eta(eta)?;
    let e2 = eta * eta;
    Ok((8.0 * eta - 9.0 * e2 + 3.0 * e2 * eta) / (1.0 - eta).powi(3))
}
