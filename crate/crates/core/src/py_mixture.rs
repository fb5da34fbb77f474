//! Hard-sphere mixtures: BMCSL equation of state, excess free energy and
//! activity coefficients.
//!
//! The free energy is the closed-form isochoric integral of the BMCSL
//! pressure. Writing Φ(ξ₀..ξ₃) = (π/6)·βF^ex/V,
//!
//! Φ = (ξ₂³/ξ₃² − ξ₀)·ln(1−ξ₃) + 3ξ₁ξ₂/(1−ξ₃) + ξ₂³/(ξ₃(1−ξ₃)²),
//!
//! so A^ex/N = Φ/ξ₀ and ln γ_i = Σ_n σ_i^n ∂Φ/∂ξ_n.

use serde::Serialize;

use crate::error::Result;
use crate::system::{moments, Mixture, Moments};

/// Thermodynamic summary of a hard-sphere mixture at one state point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixtureThermo {
    /// P/(k_BT Σρ).
    pub z_bmcsl: f64,
    /// A^ex/(N k_BT).
    pub a_ex_per_particle: f64,
    /// Hard-sphere excess chemical potential of each species, in input order.
    pub ln_gamma_hs: Vec<f64>,
    pub y1: f64,
    pub y2: f64,
    pub y3: f64,
}

/// Density-independent size composites (y₁, y₂, y₃).
///
/// They depend only on the composition; an empty system is treated as
/// equimolar so the values stay finite.
pub fn composites(m: &Mixture) -> (f64, f64, f64) {
    let x = if m.total_density() > 0.0 {
        m.mole_fractions()
    } else {
        vec![1.0 / m.len() as f64; m.len()]
    };
    let mut mom = [0.0; 4];
    for (s, xi) in m.species().iter().zip(&x) {
        let mut p = *xi;
        for v in mom.iter_mut() {
            *v += p;
            p *= s.diameter;
        }
    }
    let r12 = mom[1] * mom[2] / (mom[0] * mom[3]);
    let y3 = mom[2].powi(3) / (mom[0] * mom[3] * mom[3]);
    (1.0 - r12, r12 - y3, y3)
}

fn z_from(mo: &Moments, y: (f64, f64, f64)) -> f64 {
    let e = mo.eta;
    let (y1, y2, y3) = y;
    (1.0 + e + e * e - 3.0 * e * (y1 + y2 * e) - e.powi(3) * y3) / (1.0 - e).powi(3)
}

/// BMCSL compressibility factor.
pub fn bmcsl_z(m: &Mixture) -> Result<f64> {
    let mo = moments(m)?;
    Ok(z_from(&mo, composites(m)))
}

/// Φ and its four partial derivatives; all zero for an empty system.
fn phi_and_gradient(mo: &Moments) -> (f64, [f64; 4]) {
    let [x0, x1, x2, x3] = mo.xi;
    if x3 == 0.0 {
        return (0.0, [0.0; 4]);
    }
    let d = mo.delta;
    let l = (-x3).ln_1p();
    let c = x2.powi(3) / (x3 * x3);
    let phi = (c - x0) * l + 3.0 * x1 * x2 / d + x2.powi(3) / (x3 * d * d);
    let grad = [
        -l,
        3.0 * x2 / d,
        3.0 * x2 * x2 * l / (x3 * x3) + 3.0 * x1 / d + 3.0 * x2 * x2 / (x3 * d * d),
        -2.0 * c * l / x3 - (c - x0) / d + 3.0 * x1 * x2 / (d * d) - c / (d * d)
            + 2.0 * x2.powi(3) / (x3 * d.powi(3)),
    ];
    (phi, grad)
}

/// Excess Helmholtz energy per particle, A^ex/(N k_BT).
pub fn excess_helmholtz(m: &Mixture) -> Result<f64> {
    let mo = moments(m)?;
    if mo.xi0() == 0.0 {
        return Ok(0.0);
    }
    Ok(phi_and_gradient(&mo).0 / mo.xi0())
}

/// Hard-sphere excess chemical potential βμ_i^ex of species `i`.
pub fn ln_gamma_hs(m: &Mixture, i: usize) -> Result<f64> {
    m.check_index(i)?;
    let mo = moments(m)?;
    let (_, grad) = phi_and_gradient(&mo);
    Ok(ln_gamma_from(&grad, m.species()[i].diameter))
}

fn ln_gamma_from(grad: &[f64; 4], sigma: f64) -> f64 {
    grad[0] + sigma * (grad[1] + sigma * (grad[2] + sigma * grad[3]))
}

/// ln γ for every species, in input order.
pub fn ln_gamma_hs_all(m: &Mixture) -> Result<Vec<f64>> {
    let mo = moments(m)?;
    let (_, grad) = phi_and_gradient(&mo);
    Ok(m.diameters().map(|s| ln_gamma_from(&grad, s)).collect())
}

pub fn mixture_thermo(m: &Mixture) -> Result<MixtureThermo> {
    let mo = moments(m)?;
    let y = composites(m);
    let (phi, grad) = phi_and_gradient(&mo);
    Ok(MixtureThermo {
        z_bmcsl: z_from(&mo, y),
        a_ex_per_particle: if mo.xi0() == 0.0 { 0.0 } else { phi / mo.xi0() },
        ln_gamma_hs: m.diameters().map(|s| ln_gamma_from(&grad, s)).collect(),
        y1: y.0,
        y2: y.1,
        y3: y.2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::py_single::{
        excess_helmholtz_carnahan_starling, excess_mu_carnahan_starling, z_carnahan_starling,
    };
    use crate::system::{density_from_packing, make_mixture, Species};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn single(eta: f64) -> Mixture {
        make_mixture(
            vec![Species::neutral(1.0, density_from_packing(eta, 1.0))],
            0.0,
        )
        .unwrap()
    }

    fn random_mixture(rng: &mut ChaCha8Rng) -> Mixture {
        let n = rng.gen_range(2..=4);
        let species: Vec<Species> = (0..n)
            .map(|_| Species::neutral(rng.gen_range(0.5..3.0), rng.gen_range(0.01..1.0)))
            .collect();
        let eta = rng.gen_range(0.05..0.45);
        make_mixture(species, 0.0)
            .unwrap()
            .with_packing_fraction(eta)
            .unwrap()
    }

    /// Textbook BMCSL in moment form, written independently of the composites.
    fn bmcsl_moment_form(m: &Mixture) -> f64 {
        let mo = moments(m).unwrap();
        let [x0, x1, x2, x3] = mo.xi;
        let d = 1.0 - x3;
        (x0 / d + 3.0 * x1 * x2 / (d * d) + (3.0 - x3) * x2.powi(3) / d.powi(3)) / x0
    }

    fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
        #[allow(clippy::too_many_arguments)]
        fn rec<F: Fn(f64) -> f64>(
            f: &F,
            a: f64,
            b: f64,
            fa: f64,
            fm: f64,
            fb: f64,
            whole: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = f(lm);
            let frm = f(rm);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
        let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        rec(f, a, b, fa, fm, fb, whole, tol, 40)
    }

    #[test]
    fn single_species_reduces_to_carnahan_starling() {
        for i in 0..=110 {
            let eta = 0.005 * i as f64;
            let m = single(eta);
            assert_relative_eq!(
                bmcsl_z(&m).unwrap(),
                z_carnahan_starling(eta).unwrap(),
                max_relative = 1e-12
            );
        }
        assert_relative_eq!(
            bmcsl_z(&single(0.3)).unwrap(),
            3.973_761,
            max_relative = 1e-6
        );
        let (y1, y2, y3) = composites(&single(0.3));
        assert!(y1.abs() < 1e-15 && y2.abs() < 1e-15);
        assert_relative_eq!(y3, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn single_species_free_energy_and_mu() {
        let m = single(0.3);
        assert_relative_eq!(
            excess_helmholtz(&m).unwrap(),
            excess_helmholtz_carnahan_starling(0.3).unwrap(),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            excess_helmholtz(&m).unwrap(),
            1.897_959,
            max_relative = 1e-6
        );
        assert_relative_eq!(
            ln_gamma_hs(&m, 0).unwrap(),
            excess_mu_carnahan_starling(0.3).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn ideal_gas_limit() {
        let m = make_mixture(
            vec![Species::neutral(1.0, 0.0), Species::neutral(2.0, 0.0)],
            0.0,
        )
        .unwrap();
        assert_eq!(bmcsl_z(&m).unwrap(), 1.0);
        assert_eq!(excess_helmholtz(&m).unwrap(), 0.0);
        assert_eq!(ln_gamma_hs_all(&m).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn composite_form_matches_moment_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let m = random_mixture(&mut rng);
            assert_relative_eq!(
                bmcsl_z(&m).unwrap(),
                bmcsl_moment_form(&m),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn label_splitting_changes_nothing() {
        let rho = density_from_packing(0.3, 1.0);
        let one = single(0.3);
        let two = make_mixture(
            vec![
                Species::neutral(1.0, 0.5 * rho),
                Species::neutral(1.0, 0.5 * rho),
            ],
            0.0,
        )
        .unwrap();
        let a = mixture_thermo(&one).unwrap();
        let b = mixture_thermo(&two).unwrap();
        assert_relative_eq!(a.z_bmcsl, b.z_bmcsl, max_relative = 1e-12);
        assert_relative_eq!(
            a.a_ex_per_particle,
            b.a_ex_per_particle,
            max_relative = 1e-12
        );
        for g in &b.ln_gamma_hs {
            assert_relative_eq!(a.ln_gamma_hs[0], *g, max_relative = 1e-12);
        }
    }

    #[test]
    fn free_energy_is_isochoric_integral_of_pressure() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let m = random_mixture(&mut rng);
            let integrand = |lam: f64| {
                let lam = lam.max(1e-9);
                (bmcsl_z(&m.scale_densities(lam).unwrap()).unwrap() - 1.0) / lam
            };
            let quad = adaptive_simpson(&integrand, 0.0, 1.0, 1e-12);
            assert_relative_eq!(excess_helmholtz(&m).unwrap(), quad, max_relative = 1e-8);
        }
    }

    #[test]
    fn ln_gamma_is_density_derivative_of_free_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let m = random_mixture(&mut rng);
            let total = |sp: Vec<Species>| {
                let mm = make_mixture(sp, 0.0).unwrap();
                mm.total_density() * excess_helmholtz(&mm).unwrap()
            };
            for i in 0..m.len() {
                let h = 1e-7 * m.species()[i].density;
                let mut up = m.species().to_vec();
                let mut dn = m.species().to_vec();
                up[i].density += h;
                dn[i].density -= h;
                let fd = (total(up) - total(dn)) / (2.0 * h);
                assert_relative_eq!(ln_gamma_hs(&m, i).unwrap(), fd, max_relative = 1e-5);
            }
        }
    }

    #[test]
    fn gibbs_duhem_closure() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let m = random_mixture(&mut rng);
            let t = mixture_thermo(&m).unwrap();
            let weighted: f64 = m
                .mole_fractions()
                .iter()
                .zip(&t.ln_gamma_hs)
                .map(|(x, g)| x * g)
                .sum();
            assert!((weighted - t.a_ex_per_particle - (t.z_bmcsl - 1.0)).abs() < 1e-8);
        }
    }

    #[test]
    fn permutation_permutes_ln_gamma() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = random_mixture(&mut rng);
        let mut rev = m.species().to_vec();
        rev.reverse();
        let mr = make_mixture(rev, 0.0).unwrap();
        let a = ln_gamma_hs_all(&m).unwrap();
        let mut b = ln_gamma_hs_all(&mr).unwrap();
        b.reverse();
        for (x, y) in a.iter().zip(&b) {
            assert_relative_eq!(x, y, max_relative = 1e-13);
        }
    }

    #[test]
    fn errors() {
        let m = single(0.3);
        assert!(matches!(
            ln_gamma_hs(&m, 1),
            Err(Error::IndexOutOfRange { index: 1, len: 1 })
        ));
        let packed = make_mixture(vec![Species::neutral(1.0, 2.0)], 0.0).unwrap();
        assert!(matches!(bmcsl_z(&packed), Err(Error::PackingOverflow(_))));
        assert!(matches!(
            excess_helmholtz(&packed),
            Err(Error::PackingOverflow(_))
        ));
    }
}
