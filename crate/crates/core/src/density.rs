//! Shift densities on the unit circle.
//!
//! A `ShiftDensity` is a probability density on `[0, 1)` stored as
//! nonnegative values on the uniform grid `tau_m = m / M`, normalized so the
//! periodic trapezoid integral (the grid mean) is exactly one. Two views of
//! the same object are used deliberately:
//!
//! * sampling and Wasserstein distances treat the density as piecewise
//!   constant on the bins `[m/M, (m+1)/M)`;
//! * likelihood quadrature evaluates the trigonometric interpolant derived
//!   from the grid, which keeps the periodic trapezoid rule spectrally
//!   accurate for smooth densities.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftDensity {
    values: Vec<f64>,
    /// Derived coefficients c_k for k = 0..=K_g with K_g = M/2 - 1;
    /// negative frequencies follow by conjugation since the density is real.
    coeffs: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct DensityJson {
    #[serde(rename = "M")]
    m: usize,
    values: Vec<f64>,
}

impl ShiftDensity {
    /// Uniform density.
    pub fn uniform(grid_len: usize) -> Self {
        ShiftDensity::from_values(vec![1.0; grid_len]).expect("uniform grid is a valid density")
    }

    /// All mass in a single grid bin.
    pub fn grid_delta(bin: usize, grid_len: usize) -> Self {
        let mut v = vec![0.0; grid_len];
        v[bin % grid_len] = grid_len as f64;
        ShiftDensity::from_values(v).expect("delta grid is a valid density")
    }

    /// Validate and normalize grid values into a density.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidDensity("grid needs at least 2 points".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDensity("non-finite grid value".into()));
        }
        if values.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidDensity("negative grid value".into()));
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        if mean <= 0.0 {
            return Err(Error::InvalidDensity("density integrates to zero".into()));
        }
        let values: Vec<f64> = values.into_iter().map(|v| v / mean).collect();
        let coeffs = analyze(&values);
        Ok(ShiftDensity { values, coeffs })
    }

    /// Build from Fourier coefficients `c_k` for `k >= 1` (with `c_0 = 1`
    /// implied), synthesized on a grid of `grid_len` points. Errors if the
    /// synthesis dips negative.
    pub fn from_positive_coeffs(coeffs: &[(i64, Complex64)], grid_len: usize) -> Result<Self> {
        let mut vals = vec![1.0; grid_len];
        for (m, v) in vals.iter_mut().enumerate() {
            let tau = m as f64 / grid_len as f64;
            let mut acc = 0.0;
            for &(k, c) in coeffs {
                // real signal: c_{-k} = conj(c_k), fold the pair
                acc += 2.0 * (c * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 * tau)).re;
            }
            *v += acc;
        }
        if let Some(&min) = vals.iter().min_by(|a, b| a.partial_cmp(b).unwrap()) {
            if min < -1e-12 {
                return Err(Error::InvalidDensity(format!(
                    "coefficient synthesis dips to {min:.3e}"
                )));
            }
        }
        for v in &mut vals {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        ShiftDensity::from_values(vals)
    }

    pub fn grid_len(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Periodic trapezoid integral; exactly 1 by construction.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Fourier coefficient `c_k = \int g(t) e^{-i 2 pi k t} dt` from the grid.
    pub fn fourier_coeff(&self, k: i64) -> Complex64 {
        let kg = self.max_frequency();
        if k == 0 {
            return Complex64::new(1.0, 0.0);
        }
        if k.unsigned_abs() as usize > kg {
            return Complex64::ZERO;
        }
        let c = self.coeffs[k.unsigned_abs() as usize];
        if k > 0 {
            c
        } else {
            c.conj()
        }
    }

    /// Largest derived frequency, `M/2 - 1`.
    pub fn max_frequency(&self) -> usize {
        self.values.len() / 2 - 1
    }

    /// Sobolev seminorm `sqrt(sum_k |k|^{2 nu} |c_k|^2)` over the derived band.
    pub fn sobolev_seminorm(&self, nu: f64) -> f64 {
        let mut acc = 0.0;
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            // factor 2 folds the conjugate negative frequency
            acc += 2.0 * (k as f64).powf(2.0 * nu) * c.norm_sqr();
        }
        acc.sqrt()
    }

    /// Value at an arbitrary point: exact grid lookup when `tau` falls on a
    /// grid node, otherwise the trigonometric interpolant clamped at zero.
    pub fn value_at(&self, tau: f64) -> f64 {
        let m = self.values.len();
        let t = tau.rem_euclid(1.0);
        let pos = t * m as f64;
        let idx = pos.round();
        if (pos - idx).abs() < 1e-9 {
            return self.values[(idx as usize) % m];
        }
        let mut acc = 1.0;
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            acc += 2.0
                * (c * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 * t)).re;
        }
        acc.max(0.0)
    }

    /// Resample onto a finer or coarser grid through the interpolant.
    pub fn resample(&self, grid_len: usize) -> Result<ShiftDensity> {
        let vals: Vec<f64> = (0..grid_len)
            .map(|m| self.value_at(m as f64 / grid_len as f64))
            .collect();
        ShiftDensity::from_values(vals)
    }

    /// Circular translation by a whole number of bins (exact).
    pub fn translate_bins(&self, bins: i64) -> ShiftDensity {
        let m = self.values.len() as i64;
        let vals: Vec<f64> = (0..m)
            .map(|i| self.values[((i - bins).rem_euclid(m)) as usize])
            .collect();
        ShiftDensity::from_values(vals).expect("translation preserves validity")
    }

    /// Half the integral of |self - other| (total variation between densities).
    pub fn tv_distance(&self, other: &ShiftDensity) -> f64 {
        assert_eq!(self.grid_len(), other.grid_len(), "grids must match");
        0.5 * self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / self.values.len() as f64
    }

    /// L2 distance between the grid densities.
    pub fn l2_distance(&self, other: &ShiftDensity) -> f64 {
        assert_eq!(self.grid_len(), other.grid_len(), "grids must match");
        (self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            / self.values.len() as f64)
            .sqrt()
    }

    /// Hellinger distance `sqrt(int (sqrt g - sqrt h)^2)`, in `[0, sqrt 2]`.
    pub fn hellinger_distance(&self, other: &ShiftDensity) -> f64 {
        assert_eq!(self.grid_len(), other.grid_len(), "grids must match");
        (self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| {
                let d = a.sqrt() - b.sqrt();
                d * d
            })
            .sum::<f64>()
            / self.values.len() as f64)
            .sqrt()
    }

    /// CDF at bin edges: `cdf[m] = integral over [0, m/M)`, length `M + 1`.
    pub fn bin_cdf(&self) -> Vec<f64> {
        let m = self.values.len();
        let mut cdf = Vec::with_capacity(m + 1);
        let mut acc = 0.0;
        cdf.push(0.0);
        for v in &self.values {
            acc += v / m as f64;
            cdf.push(acc);
        }
        // guard against rounding drift at the top
        let top = cdf[m];
        for c in cdf.iter_mut() {
            *c /= top;
        }
        cdf
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({"M": self.values.len(), "values": self.values})
    }

    pub fn from_json(v: &serde_json::Value) -> Result<ShiftDensity> {
        let parsed: DensityJson = serde_json::from_value(v.clone())?;
        if parsed.values.len() != parsed.m {
            return Err(Error::Config("density length disagrees with M".into()));
        }
        ShiftDensity::from_values(parsed.values)
    }
}

fn analyze(values: &[f64]) -> Vec<Complex64> {
    let m = values.len();
    let kg = m / 2 - 1;
    let mut coeffs = Vec::with_capacity(kg + 1);
    for k in 0..=kg {
        let mut acc = Complex64::ZERO;
        for (j, &v) in values.iter().enumerate() {
            let x = j as f64 / m as f64;
            acc += v * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * k as f64 * x);
        }
        coeffs.push(acc / m as f64);
    }
    coeffs
}
