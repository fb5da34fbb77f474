//! System definitions shared by every solver.
//!
//! All quantities are in reduced units: lengths in units of a reference
//! diameter, energies in units of k_BT. The Coulomb coupling α² = 4πβe²/ε
//! is carried as a single length-valued input.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on Σρz for a charged mixture.
pub const ELECTRONEUTRALITY_TOL: f64 = 1e-12;

/// One component of a mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Species {
    /// Hard-core diameter σ.
    pub diameter: f64,
    /// Number density ρ.
    pub density: f64,
    /// Signed valence z; zero for a neutral hard sphere.
    pub valence: i32,
}

impl Species {
    pub fn new(diameter: f64, density: f64, valence: i32) -> Self {
        Self {
            diameter,
            density,
            valence,
        }
    }

    pub fn neutral(diameter: f64, density: f64) -> Self {
        Self::new(diameter, density, 0)
    }
}

/// A validated, immutable mixture of hard spheres, optionally charged.
///
/// Species order is preserved; every per-species output elsewhere in the
/// crate is aligned with it.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    species: Vec<Species>,
    alpha_sq: f64,
    label: String,
}

impl Mixture {
    pub fn new(species: Vec<Species>, alpha_sq: f64) -> Result<Self> {
        if species.is_empty() {
            return Err(Error::EmptyMixture);
        }
        for (index, s) in species.iter().enumerate() {
            if !(s.diameter > 0.0) || !s.diameter.is_finite() {
                return Err(Error::NonPositiveDiameter {
                    index,
                    value: s.diameter,
                });
            }
            if !(s.density >= 0.0) || !s.density.is_finite() {
                return Err(Error::NegativeDensity {
                    index,
                    value: s.density,
                });
            }
        }
        if !(alpha_sq >= 0.0) || !alpha_sq.is_finite() {
            return Err(Error::NegativeCoupling(alpha_sq));
        }
        if species.iter().any(|s| s.valence != 0) {
            let net: f64 = species.iter().map(|s| s.density * s.valence as f64).sum();
            if net.abs() > ELECTRONEUTRALITY_TOL {
                return Err(Error::ChargeImbalance(net));
            }
        }
        Ok(Self {
            species,
            alpha_sq,
            label: String::new(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn len(&self) -> usize {
        self.species.len()
    }

    pub fn is_empty(&self) -> bool {
        self.species.is_empty()
    }

    pub fn alpha_sq(&self) -> f64 {
        self.alpha_sq
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn diameters(&self) -> impl Iterator<Item = f64> + '_ {
        self.species.iter().map(|s| s.diameter)
    }

    pub fn densities(&self) -> impl Iterator<Item = f64> + '_ {
        self.species.iter().map(|s| s.density)
    }

    pub fn valences(&self) -> impl Iterator<Item = f64> + '_ {
        self.species.iter().map(|s| s.valence as f64)
    }

    /// True when at least one species carries a nonzero valence.
    pub fn has_charges(&self) -> bool {
        self.species.iter().any(|s| s.valence != 0)
    }

    /// True when the electrostatic part of the problem is non-trivial.
    pub fn is_charged(&self) -> bool {
        self.alpha_sq > 0.0 && self.has_charges()
    }

    pub fn total_density(&self) -> f64 {
        self.densities().sum()
    }

    /// Mole fractions x_i = ρ_i/Σρ; all zero for an empty system.
    pub fn mole_fractions(&self) -> Vec<f64> {
        let total = self.total_density();
        self.densities()
            .map(|rho| if total > 0.0 { rho / total } else { 0.0 })
            .collect()
    }

    /// Hard-core contact distance R_ij = (σ_i + σ_j)/2.
    pub fn contact_distance(&self, i: usize, j: usize) -> f64 {
        0.5 * (self.species[i].diameter + self.species[j].diameter)
    }

    /// Lower edge of the Baxter support, S_ij = |σ_i − σ_j|/2.
    pub fn half_difference(&self, i: usize, j: usize) -> f64 {
        0.5 * (self.species[i].diameter - self.species[j].diameter).abs()
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index,
                len: self.len(),
            })
        }
    }

    /// Same composition and sizes with every density multiplied by `factor`.
    pub fn scale_densities(&self, factor: f64) -> Result<Self> {
        let species = self
            .species
            .iter()
            .map(|s| Species {
                density: s.density * factor,
                ..*s
            })
            .collect();
        Ok(Mixture::new(species, self.alpha_sq)?.with_label(self.label.clone()))
    }

    /// Rescale densities at fixed composition so that ξ₃ equals `eta`.
    pub fn with_packing_fraction(&self, eta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&eta) {
            return Err(Error::EtaOutOfRange(eta));
        }
        let current = packing_fraction(self);
        if current == 0.0 {
            if eta == 0.0 {
                return Ok(self.clone());
            }
            return Err(Error::InvalidParameter(
                "cannot rescale a mixture with zero density to a finite packing fraction".into(),
            ));
        }
        self.scale_densities(eta / current)
    }

    pub fn with_alpha_sq(&self, alpha_sq: f64) -> Result<Self> {
        Ok(Mixture::new(self.species.clone(), alpha_sq)?.with_label(self.label.clone()))
    }
}

/// Validating constructor for a [`Mixture`].
pub fn make_mixture(species: Vec<Species>, alpha_sq: f64) -> Result<Mixture> {
    Mixture::new(species, alpha_sq)
}

/// Geometric moments ξ_n = (π/6) Σ_k ρ_k σ_k^n of the size distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    /// ξ₀, ξ₁, ξ₂, ξ₃ in that order.
    pub xi: [f64; 4],
    /// Void fraction Δ = 1 − ξ₃.
    pub delta: f64,
    /// Total packing fraction η = ξ₃.
    pub eta: f64,
}

impl Moments {
    pub fn xi0(&self) -> f64 {
        self.xi[0]
    }
    pub fn xi1(&self) -> f64 {
        self.xi[1]
    }
    pub fn xi2(&self) -> f64 {
        self.xi[2]
    }
    pub fn xi3(&self) -> f64 {
        self.xi[3]
    }
}

fn packing_fraction(m: &Mixture) -> f64 {
    PI / 6.0
        * m.species()
            .iter()
            .map(|s| s.density * s.diameter.powi(3))
            .sum::<f64>()
}

pub fn moments(m: &Mixture) -> Result<Moments> {
    let mut xi = [0.0; 4];
    for s in m.species() {
        let mut power = 1.0;
        for x in xi.iter_mut() {
            *x += s.density * power;
            power *= s.diameter;
        }
    }
    for x in xi.iter_mut() {
        *x *= PI / 6.0;
    }
    if xi[3] >= 1.0 {
        return Err(Error::PackingOverflow(xi[3]));
    }
    Ok(Moments {
        xi,
        delta: 1.0 - xi[3],
        eta: xi[3],
    })
}

/// Number density of a one-component fluid of diameter `diameter` at packing fraction `eta`.
pub fn density_from_packing(eta: f64, diameter: f64) -> f64 {
    6.0 * eta / (PI * diameter.powi(3))
}
