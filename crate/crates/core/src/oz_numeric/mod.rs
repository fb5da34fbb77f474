//! Grid-based Ornstein–Zernike solver with the Percus–Yevick closure.
//!
//! Used as an independent numerical check on the closed-form results.

mod solver;
mod transform;

pub use solver::{
    contact_extrapolate, picard, solve_py_numeric, write_table_csv, CorrelationTable, PicardOptions,
};
pub use transform::{inverse_sine_transform, sine_transform, SineTransform};

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform radial grid r_j = j·dr (j = 1..n) and its sine-conjugate
/// k_m = mπ/((n+1)dr).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    n: usize,
    dr: f64,
}

impl RadialGrid {
    pub const MIN_POINTS: usize = 256;

    pub fn new(n: usize, dr: f64) -> Result<Self> {
        if n < Self::MIN_POINTS || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "point count must be a power of two of at least {}, got {n}",
                Self::MIN_POINTS
            )));
        }
        if !(dr > 0.0) || !dr.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "spacing must be positive, got {dr}"
            )));
        }
        Ok(Self { n, dr })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    pub fn dk(&self) -> f64 {
        PI / ((self.n + 1) as f64 * self.dr)
    }

    /// Outermost radius n·dr.
    pub fn r_max(&self) -> f64 {
        self.n as f64 * self.dr
    }

    /// r of the zero-based node `j`.
    pub fn r(&self, j: usize) -> f64 {
        (j + 1) as f64 * self.dr
    }

    pub fn k(&self, m: usize) -> f64 {
        (m + 1) as f64 * self.dk()
    }

    pub fn r_values(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.r(j)).collect()
    }

    pub fn k_values(&self) -> Vec<f64> {
        (0..self.n).map(|m| self.k(m)).collect()
    }
}

impl Default for RadialGrid {
    /// 4096 points at dr = 0.01, i.e. about 41 diameters for unit spheres.
    fn default() -> Self {
        Self { n: 4096, dr: 0.01 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(RadialGrid::new(128, 0.01).is_err());
        assert!(RadialGrid::new(1000, 0.01).is_err());
        assert!(RadialGrid::new(512, 0.0).is_err());
        assert!(RadialGrid::new(512, f64::NAN).is_err());
        let g = RadialGrid::new(512, 0.02).unwrap();
        assert_eq!(g.r(0), 0.02);
        assert!((g.r_max() - 10.24).abs() < 1e-12);
        assert!((g.k(g.n() - 1) - 512.0 * PI / (513.0 * 0.02)).abs() < 1e-12);
    }

    #[test]
    fn default_grid() {
        let g = RadialGrid::default();
        assert_eq!((g.n(), g.dr()), (4096, 0.01));
        assert!(g.r_max() >= 20.0);
    }
}
