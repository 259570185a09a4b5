//! Complex Fourier-series arithmetic shared by every other module.
//!
//! A shape is a truncated table of complex Fourier coefficients on the
//! symmetric band `[-K, K]`. The circular shift by `phi` acts per frequency
//! as multiplication by `exp(-i 2 pi l phi)`, which is the Fourier-domain
//! image of translating the curve.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncated complex Fourier series indexed by frequency `l` in `[-K, K]`.
///
/// `identifiable` marks membership in the identifiable shape class: the
/// first coefficient is real with strictly positive real part.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    cutoff: usize,
    coeffs: Vec<Complex64>,
    identifiable: bool,
}

/// Norms of a shape: plain L2, the derivative-weighted H1 seminorm
/// (frequency 0 drops out), and the Sobolev-s norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub l2: f64,
    pub h1: f64,
    pub sobolev_s: f64,
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    #[serde(rename = "K")]
    k: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl FourierSeries {
    /// Zero series with the given cutoff.
    pub fn zeros(cutoff: usize) -> Self {
        FourierSeries {
            cutoff,
            coeffs: vec![Complex64::ZERO; 2 * cutoff + 1],
            identifiable: false,
        }
    }

    /// Build from `(frequency, coefficient)` pairs; frequencies outside the
    /// band are rejected.
    pub fn from_pairs(cutoff: usize, pairs: &[(i64, Complex64)]) -> Result<Self> {
        let mut s = FourierSeries::zeros(cutoff);
        for &(l, c) in pairs {
            if l.unsigned_abs() as usize > cutoff {
                return Err(Error::Precondition(format!(
                    "frequency {l} outside band [-{cutoff}, {cutoff}]"
                )));
            }
            *s.coeff_mut(l) = c;
        }
        s.refresh_identifiable();
        Ok(s)
    }

    /// Build from a dense coefficient slice ordered `l = -K..=K`.
    pub fn from_coeffs(cutoff: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * cutoff + 1 {
            return Err(Error::Precondition(format!(
                "expected {} coefficients for cutoff {cutoff}, got {}",
                2 * cutoff + 1,
                coeffs.len()
            )));
        }
        let mut s = FourierSeries {
            cutoff,
            coeffs,
            identifiable: false,
        };
        s.refresh_identifiable();
        Ok(s)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Coefficient at frequency `l`; zero outside the band.
    pub fn coeff(&self, l: i64) -> Complex64 {
        if l.unsigned_abs() as usize > self.cutoff {
            Complex64::ZERO
        } else {
            self.coeffs[(l + self.cutoff as i64) as usize]
        }
    }

    pub fn coeff_mut(&mut self, l: i64) -> &mut Complex64 {
        assert!(
            l.unsigned_abs() as usize <= self.cutoff,
            "frequency {l} outside band"
        );
        &mut self.coeffs[(l + self.cutoff as i64) as usize]
    }

    /// Dense view ordered `l = -K..=K`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Frequencies with a nonzero coefficient.
    pub fn support(&self) -> Vec<i64> {
        (-(self.cutoff as i64)..=self.cutoff as i64)
            .filter(|&l| self.coeff(l) != Complex64::ZERO)
            .collect()
    }

    pub fn is_identifiable(&self) -> bool {
        self.identifiable
    }

    /// Re-derive the identifiability flag: theta_1 real and strictly positive.
    pub fn refresh_identifiable(&mut self) {
        let t1 = self.coeff(1);
        self.identifiable = t1.im == 0.0 && t1.re > 0.0;
    }

    /// The shift action: multiply each coefficient by `exp(-i 2 pi l phi)`.
    /// Moduli are preserved, so every norm is shift invariant.
    pub fn shift_action(&self, phi: f64) -> FourierSeries {
        let k = self.cutoff as i64;
        let coeffs = (-k..=k)
            .map(|l| self.coeff(l) * phase(l, phi))
            .collect();
        FourierSeries {
            cutoff: self.cutoff,
            coeffs,
            identifiable: false,
        }
    }

    /// Synthesize the curve on the uniform grid `x_m = m / grid_len`.
    /// Requires `grid_len >= 2K + 1` so the band is below Nyquist.
    pub fn evaluate_on_grid(&self, grid_len: usize) -> Result<Vec<Complex64>> {
        let needed = 2 * self.cutoff + 1;
        if grid_len < needed {
            return Err(Error::Aliasing {
                needed,
                got: grid_len,
            });
        }
        let k = self.cutoff as i64;
        let mut out = vec![Complex64::ZERO; grid_len];
        for (m, v) in out.iter_mut().enumerate() {
            let x = m as f64 / grid_len as f64;
            let mut acc = Complex64::ZERO;
            for l in -k..=k {
                let c = self.coeff(l);
                if c != Complex64::ZERO {
                    // synthesis uses e^{+i 2 pi l x}
                    acc += c * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * l as f64 * x);
                }
            }
            *v = acc;
        }
        Ok(out)
    }

    /// Discrete Fourier analysis of grid samples, exact for trigonometric
    /// polynomials of degree <= K sampled on at least `2K + 1` points.
    pub fn coefficients_from_grid(values: &[Complex64], cutoff: usize) -> Result<FourierSeries> {
        let needed = 2 * cutoff + 1;
        if values.len() < needed {
            return Err(Error::Aliasing {
                needed,
                got: values.len(),
            });
        }
        let m = values.len();
        let k = cutoff as i64;
        let mut coeffs = Vec::with_capacity(2 * cutoff + 1);
        for l in -k..=k {
            let mut acc = Complex64::ZERO;
            for (j, v) in values.iter().enumerate() {
                let x = j as f64 / m as f64;
                acc += v * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * l as f64 * x);
            }
            coeffs.push(acc / m as f64);
        }
        FourierSeries::from_coeffs(cutoff, coeffs)
    }

    /// L2, H1 and Sobolev-s norms.
    pub fn norms(&self, s: f64) -> NormReport {
        let mut l2 = 0.0;
        let mut h1 = 0.0;
        let mut sob = 0.0;
        let k = self.cutoff as i64;
        for l in -k..=k {
            let a2 = self.coeff(l).norm_sqr();
            l2 += a2;
            h1 += (l as f64) * (l as f64) * a2;
            sob += (1.0 + (l.unsigned_abs() as f64).powf(2.0 * s)) * a2;
        }
        NormReport {
            l2: l2.sqrt(),
            h1: h1.sqrt(),
            sobolev_s: sob.sqrt(),
        }
    }

    /// L2 distance between two series (coefficient-wise, Parseval).
    pub fn l2_distance(&self, other: &FourierSeries) -> f64 {
        let k = self.cutoff.max(other.cutoff) as i64;
        let mut acc = 0.0;
        for l in -k..=k {
            acc += (self.coeff(l) - other.coeff(l)).norm_sqr();
        }
        acc.sqrt()
    }

    /// Shift-aligned distance: minimum of `|| (self shifted by tau) - other ||`
    /// over a uniform tau grid, with one golden-section refinement around the
    /// best grid point. Diagnostic only; result is <= the plain L2 distance.
    pub fn frechet_distance(&self, other: &FourierSeries, grid: usize) -> f64 {
        assert!(grid >= 1, "tau grid must be nonempty");
        let dist = |tau: f64| {
            let k = self.cutoff.max(other.cutoff) as i64;
            let mut acc = 0.0;
            for l in -k..=k {
                acc += (self.coeff(l) * phase(l, tau) - other.coeff(l)).norm_sqr();
            }
            acc.sqrt()
        };
        let mut best_tau = 0.0;
        let mut best = dist(0.0);
        for j in 1..grid {
            let tau = j as f64 / grid as f64;
            let d = dist(tau);
            if d < best {
                best = d;
                best_tau = tau;
            }
        }
        // golden-section refinement on the bracket around the best grid point
        let h = 1.0 / grid as f64;
        let (mut a, mut b) = (best_tau - h, best_tau + h);
        let inv_phi = 0.618_033_988_749_894_9;
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let (mut fc, mut fd) = (dist(c), dist(d));
        for _ in 0..60 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = dist(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = dist(d);
            }
        }
        best.min(fc).min(fd)
    }

    /// JSON form `{"K": .., "re": [..], "im": [..]}` ordered `l = -K..K`.
    pub fn to_json(&self) -> serde_json::Value {
        let re: Vec<f64> = self.coeffs.iter().map(|c| c.re).collect();
        let im: Vec<f64> = self.coeffs.iter().map(|c| c.im).collect();
        serde_json::json!({"K": self.cutoff, "re": re, "im": im})
    }

    pub fn from_json(v: &serde_json::Value) -> Result<FourierSeries> {
        let parsed: SeriesJson = serde_json::from_value(v.clone())?;
        if parsed.re.len() != 2 * parsed.k + 1 || parsed.im.len() != parsed.re.len() {
            return Err(Error::Config(format!(
                "series arrays must have length 2K+1 = {}",
                2 * parsed.k + 1
            )));
        }
        let coeffs = parsed
            .re
            .iter()
            .zip(&parsed.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        FourierSeries::from_coeffs(parsed.k, coeffs)
    }
}

/// `exp(-i 2 pi l phi)`, the per-frequency phase of a circular shift.
pub fn phase(l: i64, phi: f64) -> Complex64 {
    Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * l as f64 * phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn shift_identity_and_half_turn() {
        let f = FourierSeries::from_pairs(1, &[(1, c(1.0, 0.0))]).unwrap();
        let id = f.shift_action(0.0);
        assert_eq!(id.coeff(1), c(1.0, 0.0));
        let half = f.shift_action(0.5);
        assert!((half.coeff(1) - c(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn shift_quarter_on_frequency_two() {
        // e^{-i 2 pi * 2 * 0.25} = e^{-i pi} = -1
        let f = FourierSeries::from_pairs(2, &[(2, c(1.0, 0.0))]).unwrap();
        let shifted = f.shift_action(0.25);
        assert!((shifted.coeff(2) - c(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn grid_constant_and_first_harmonic() {
        let f = FourierSeries::from_pairs(0, &[(0, c(1.0, 0.0))]).unwrap();
        let vals = f.evaluate_on_grid(8).unwrap();
        for v in vals {
            assert!((v - c(1.0, 0.0)).norm() < 1e-12);
        }
        let f = FourierSeries::from_pairs(1, &[(1, c(1.0, 0.0))]).unwrap();
        let vals = f.evaluate_on_grid(4).unwrap();
        let expect = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for (v, e) in vals.iter().zip(expect) {
            assert!((v - e).norm() < 1e-12);
        }
    }

    #[test]
    fn grid_round_trip_random_series() {
        let mut rng = crate::rng::substream(7, "fourier-roundtrip", 0);
        let coeffs: Vec<Complex64> = (0..11)
            .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let f = FourierSeries::from_coeffs(5, coeffs).unwrap();
        let vals = f.evaluate_on_grid(64).unwrap();
        let back = FourierSeries::coefficients_from_grid(&vals, 5).unwrap();
        let scale = f.norms(0.0).l2;
        assert!(f.l2_distance(&back) < 1e-12 * scale.max(1.0));
    }

    #[test]
    fn aliasing_guard() {
        let f = FourierSeries::zeros(3);
        assert!(matches!(
            f.evaluate_on_grid(6),
            Err(Error::Aliasing { needed: 7, got: 6 })
        ));
        let vals = vec![Complex64::ZERO; 6];
        assert!(FourierSeries::coefficients_from_grid(&vals, 3).is_err());
    }

    #[test]
    fn norm_examples() {
        let f = FourierSeries::from_pairs(1, &[(1, c(1.0, 0.0))]).unwrap();
        let n = f.norms(1.0);
        assert!((n.l2 - 1.0).abs() < 1e-12);
        assert!((n.h1 - 1.0).abs() < 1e-12);

        let z = FourierSeries::zeros(2);
        let n = z.norms(1.5);
        assert_eq!((n.l2, n.h1, n.sobolev_s), (0.0, 0.0, 0.0));

        let f = FourierSeries::from_pairs(2, &[(1, c(1.0, 0.0)), (2, c(0.5, 0.0))]).unwrap();
        let n = f.norms(1.0);
        assert!((n.h1 - 2.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn frechet_examples() {
        let f1 = FourierSeries::from_pairs(1, &[(1, c(1.0, 0.0))]).unwrap();
        assert!(f1.frechet_distance(&f1, 64) < 1e-12);

        let f2 = f1.shift_action(0.3);
        assert!(f1.frechet_distance(&f2, 1024) < 1e-9);

        // shifts cannot mix frequencies, so orthogonal harmonics stay sqrt(2) apart
        let g = FourierSeries::from_pairs(2, &[(2, c(1.0, 0.0))]).unwrap();
        let d = f1.frechet_distance(&g, 1024);
        assert!((d - 2.0_f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn json_round_trip() {
        let f = FourierSeries::from_pairs(2, &[(1, c(0.7, 0.0)), (-2, c(0.1, -0.4))]).unwrap();
        let v = f.to_json();
        let back = FourierSeries::from_json(&v).unwrap();
        assert_eq!(f, back);
        assert!(back.is_identifiable());
    }

    proptest! {
        #[test]
        fn shift_preserves_moduli(phi in 0.0..1.0f64, re in -2.0..2.0f64, im in -2.0..2.0f64) {
            let f = FourierSeries::from_pairs(3, &[(2, c(re, im)), (-1, c(im, re))]).unwrap();
            let s = f.shift_action(phi);
            for l in -3i64..=3 {
                prop_assert!((s.coeff(l).norm() - f.coeff(l).norm()).abs() < 1e-12);
            }
        }

        #[test]
        fn shifts_compose_mod_one(phi1 in 0.0..1.0f64, phi2 in 0.0..1.0f64) {
            let f = FourierSeries::from_pairs(2, &[(1, c(0.8, 0.0)), (2, c(-0.3, 0.5))]).unwrap();
            let a = f.shift_action(phi1).shift_action(phi2);
            let b = f.shift_action((phi1 + phi2) % 1.0);
            prop_assert!(a.l2_distance(&b) < 1e-12);
        }

        #[test]
        fn norms_shift_invariant(phi in 0.0..1.0f64) {
            let f = FourierSeries::from_pairs(2, &[(1, c(0.8, 0.1)), (-2, c(0.2, 0.4))]).unwrap();
            let n0 = f.norms(1.3);
            let n1 = f.shift_action(phi).norms(1.3);
            prop_assert!((n0.l2 - n1.l2).abs() < 1e-12);
            prop_assert!((n0.h1 - n1.h1).abs() < 1e-12);
            prop_assert!((n0.sobolev_s - n1.sobolev_s).abs() < 1e-12);
        }

        #[test]
        fn grid_round_trip_property(k in 1usize..5) {
            let mut coeffs = vec![Complex64::ZERO; 2 * k + 1];
            for (i, v) in coeffs.iter_mut().enumerate() {
                *v = c(((i + 1) as f64).sin(), (i as f64).cos() * 0.5);
            }
            let f = FourierSeries::from_coeffs(k, coeffs).unwrap();
            let m = 2 * k + 1;
            let vals = f.evaluate_on_grid(m).unwrap();
            let back = FourierSeries::coefficients_from_grid(&vals, k).unwrap();
            prop_assert!(f.l2_distance(&back) < 1e-10);
        }
    }
}
