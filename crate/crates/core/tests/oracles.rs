//! Cross-checks between the closed forms and independent numerical routes.

use std::f64::consts::PI;

use oz_thermo::msa::{self, MsaOptions};
use oz_thermo::oz_numeric::{contact_extrapolate, solve_py_numeric, PicardOptions, RadialGrid};
use oz_thermo::py_single::{contact_value, solve_py_single};
use oz_thermo::system::{make_mixture, Mixture, Species};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grid() -> RadialGrid {
    RadialGrid::new(2048, 0.02).unwrap()
}

#[test]
fn picard_result_does_not_depend_on_mixing() {
    let tight = |mix| PicardOptions {
        mix,
        tol: 1e-11,
        ..PicardOptions::default()
    };
    let reference = solve_py_numeric(0.3, 1.0, &grid(), &tight(0.5)).unwrap();
    for mix in [0.2, 0.8] {
        let t = solve_py_numeric(0.3, 1.0, &grid(), &tight(mix)).unwrap();
        let worst =
            t.c.iter()
                .zip(&reference.c)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
        assert!(worst <= 1e-8, "mix {mix}: {worst:e}");
        let dc = (contact_extrapolate(&t, 1.0).unwrap()
            - contact_extrapolate(&reference, 1.0).unwrap())
        .abs();
        assert!(dc <= 1e-8);
    }
}

#[test]
fn converged_tables_respect_closure_and_tail() {
    for eta in [0.1, 0.25, 0.4] {
        let t = solve_py_numeric(eta, 1.0, &grid(), &PicardOptions::default()).unwrap();
        assert!(t.converged && t.final_change <= 1e-8);
        let g = &t.grid;
        for j in 0..g.n() {
            let r = g.r(j);
            if r > 1.0 + 1e-9 {
                assert_eq!(t.c[j], 0.0);
            } else if r < 1.0 - 1e-9 {
                assert_eq!(t.g[j], 0.0);
            }
            assert!(t.g[j] >= -1e-8);
            assert!((t.h[j] - t.c[j] - t.gamma_ind[j]).abs() < 1e-12);
        }
        let tail = g.n() * 9 / 10;
        assert!(t.g[tail..].iter().all(|v| (v - 1.0).abs() <= 1e-3));
    }
}

#[test]
fn numeric_contact_tracks_closed_form() {
    let t = solve_py_numeric(0.4, 1.0, &RadialGrid::default(), &PicardOptions::default()).unwrap();
    let got = contact_extrapolate(&t, 1.0).unwrap();
    assert!((got / contact_value(0.4).unwrap() - 1.0).abs() < 0.015);
}

#[test]
fn numeric_solve_scales_with_diameter() {
    // g(r/σ) is universal at fixed packing fraction.
    let unit = solve_py_numeric(
        0.2,
        1.0,
        &RadialGrid::new(4096, 0.01).unwrap(),
        &PicardOptions::default(),
    )
    .unwrap();
    let twice = solve_py_numeric(
        0.2,
        2.0,
        &RadialGrid::new(4096, 0.02).unwrap(),
        &PicardOptions::default(),
    )
    .unwrap();
    for j in (0..4096).step_by(97) {
        assert!((unit.g[j] - twice.g[j]).abs() < 1e-9);
    }
    let s = solve_py_single(0.2, 2.0).unwrap();
    assert!((twice.inverse_compressibility() / s.inverse_compressibility() - 1.0).abs() < 0.01);
}

/// Γ by bisection, with P_n, Ω and the screened charges rebuilt from scratch.
fn gamma_by_bisection(m: &Mixture) -> f64 {
    let sp = m.species();
    let eta: f64 = sp
        .iter()
        .map(|s| PI / 6.0 * s.density * s.diameter.powi(3))
        .sum();
    let c = PI / (2.0 * (1.0 - eta));
    let f = |g: f64| {
        let omega = 1.0
            + c * sp
                .iter()
                .map(|s| s.density * s.diameter.powi(3) / (1.0 + g * s.diameter))
                .sum::<f64>();
        let p = sp
            .iter()
            .map(|s| s.density * s.diameter * s.valence as f64 / (1.0 + g * s.diameter))
            .sum::<f64>()
            / omega;
        let d: f64 = sp
            .iter()
            .map(|s| {
                s.density
                    * ((s.valence as f64 - c * s.diameter.powi(2) * p) / (1.0 + g * s.diameter))
                        .powi(2)
            })
            .sum();
        2.0 * g - m.alpha_sq().sqrt() * d.sqrt()
    };
    let kappa = (m.alpha_sq()
        * sp.iter()
            .map(|s| s.density * (s.valence as f64).powi(2))
            .sum::<f64>())
    .sqrt();
    let (mut lo, mut hi) = (0.0, 10.0 * kappa);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn random_salt(rng: &mut ChaCha8Rng) -> Mixture {
    let zp = rng.gen_range(1..=3);
    let zn = -rng.gen_range(1..=3);
    let rho = rng.gen_range(0.001..0.05);
    make_mixture(
        vec![
            Species::new(rng.gen_range(0.5..2.0), rho * -zn as f64, zp),
            Species::new(rng.gen_range(0.5..2.0), rho * zp as f64, zn),
        ],
        10f64.powf(rng.gen_range(0.0..2.5)),
    )
    .unwrap()
}

#[test]
fn screening_matches_bisection_for_unequal_ions() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let m = random_salt(&mut rng);
        let sol = msa::solve_gamma_with(&m, &MsaOptions::default()).unwrap();
        let oracle = gamma_by_bisection(&m);
        assert!(
            (sol.gamma / oracle - 1.0).abs() < 1e-10,
            "{} vs {oracle}",
            sol.gamma
        );
    }
}

#[test]
fn charging_integral_closed_form() {
    // For the MSA, ΔA = ΔE + Γ³/(3π) per unit volume.
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..5 {
        let m = random_salt(&mut rng);
        let sol = msa::solve_gamma_with(&m, &MsaOptions::default()).unwrap();
        let expect = msa::internal_energy(&sol, &m) + sol.gamma.powi(3) / (3.0 * PI);
        let got = msa::helmholtz_charging(&m, msa::DEFAULT_CHARGING_POINTS).unwrap();
        assert!((got / expect - 1.0).abs() < 1e-9, "{got} vs {expect}");
    }
}

#[test]
fn electrostatic_ln_gamma_is_free_energy_derivative() {
    // Add salt in its stoichiometric ratio so the system stays neutral.
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..5 {
        let m = random_salt(&mut rng);
        let sol = msa::solve_gamma_with(&m, &MsaOptions::default()).unwrap();
        let lg = msa::ln_gamma_elec_all(&sol, &m).unwrap();
        let (nu_p, nu_n) = (
            -m.species()[1].valence as f64,
            m.species()[0].valence as f64,
        );
        let free = |d: f64| {
            let mut sp = m.species().to_vec();
            sp[0].density += nu_p * d;
            sp[1].density += nu_n * d;
            let mm = make_mixture(sp, m.alpha_sq()).unwrap();
            let s = msa::solve_gamma_with(&mm, &MsaOptions::default()).unwrap();
            msa::internal_energy(&s, &mm) + s.gamma.powi(3) / (3.0 * PI)
        };
        let h = 1e-6 * m.species()[0].density;
        let fd = (free(h) - free(-h)) / (2.0 * h);
        let analytic = nu_p * lg[0] + nu_n * lg[1];
        assert!((fd / analytic - 1.0).abs() < 1e-6, "{fd} vs {analytic}");
    }
}

#[test]
fn point_ion_limiting_law() {
    let m = make_mixture(
        vec![Species::new(1e-6, 1e-4, 2), Species::new(1e-6, 2e-4, -1)],
        5.0,
    )
    .unwrap();
    let sol = msa::solve_gamma_with(&m, &MsaOptions::default()).unwrap();
    let kappa = msa::debye_kappa(&m);
    assert!((2.0 * sol.gamma / kappa - 1.0).abs() <= 1e-3);
    for (i, s) in m.species().iter().enumerate() {
        let dh = -5.0 / (4.0 * PI) * (s.valence as f64).powi(2) * kappa / 2.0;
        let got = msa::ln_gamma_elec(&sol, &m, i).unwrap();
        assert!((got / dh - 1.0).abs() < 1e-3);
    }
}
