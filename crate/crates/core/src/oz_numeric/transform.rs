use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::RadialGrid;
use crate::error::{Error, Result};

/// Radial Fourier pair on a [`RadialGrid`], built on a type-I discrete
/// sine transform:
///
/// F(k_m) = (4π dr/k_m) Σ_j r_j f(r_j) sin(k_m r_j)
/// f(r_j) = (dk/(2π² r_j)) Σ_m k_m F(k_m) sin(k_m r_j)
///
/// The two are exact inverses on the grid.
#[derive(Clone)]
pub struct SineTransform {
    grid: RadialGrid,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SineTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SineTransform")
            .field("grid", &self.grid)
            .finish()
    }
}

impl SineTransform {
    pub fn new(grid: RadialGrid) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(2 * (grid.n() + 1));
        Self { grid, fft }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    /// Σ_j x_j sin(π(j+1)(m+1)/(n+1)) via an odd extension of length 2(n+1).
    fn dst1(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let len = 2 * (n + 1);
        let mut buf = vec![Complex::new(0.0, 0.0); len];
        for (j, &v) in x.iter().enumerate() {
            buf[j + 1].re = v;
            buf[len - j - 1].re = -v;
        }
        self.fft.process(&mut buf);
        buf[1..=n].iter().map(|c| -0.5 * c.im).collect()
    }

    fn check_len(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.grid.n() {
            return Err(Error::LengthMismatch {
                expected: self.grid.n(),
                found: values.len(),
            });
        }
        Ok(())
    }

    pub fn forward(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.check_len(f)?;
        let g = &self.grid;
        let rf: Vec<f64> = f.iter().enumerate().map(|(j, v)| g.r(j) * v).collect();
        let s = self.dst1(&rf);
        Ok(s.iter()
            .enumerate()
            .map(|(m, v)| 4.0 * PI * g.dr() * v / g.k(m))
            .collect())
    }

    pub fn inverse(&self, big_f: &[f64]) -> Result<Vec<f64>> {
        self.check_len(big_f)?;
        let g = &self.grid;
        let kf: Vec<f64> = big_f.iter().enumerate().map(|(m, v)| g.k(m) * v).collect();
        let s = self.dst1(&kf);
        let pre = g.dk() / (2.0 * PI * PI);
        Ok(s.iter()
            .enumerate()
            .map(|(j, v)| pre * v / g.r(j))
            .collect())
    }
}

pub fn sine_transform(values: &[f64], grid: &RadialGrid) -> Result<Vec<f64>> {
    SineTransform::new(*grid).forward(values)
}

pub fn inverse_sine_transform(values: &[f64], grid: &RadialGrid) -> Result<Vec<f64>> {
    SineTransform::new(*grid).inverse(values)
}
