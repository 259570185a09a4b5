//! The observation model: noisy, randomly shifted curves in the Fourier
//! domain, and the exact mixture likelihood of one observed curve.
//!
//! Each observed curve is a vector of complex coefficients
//! `y_l = theta0_l e^{-i 2 pi l tau} + xi_l` for `l` in `[-K, K]`, with
//! `tau` drawn from the shift density and `xi_l` standard complex Gaussian
//! noise. The convention `xi ~ N_C(0, 1)` means real and imaginary parts are
//! independent `N(0, 1/2)`, matching the density `pi^{-1} exp(-|z|^2)`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::ShiftDensity;
use crate::error::{Error, Result};
use crate::fourier::{phase, FourierSeries};
use crate::rng::{substream, Stream};

/// One observed curve: coefficients for `l = -K..=K`, the hidden shift when
/// generated synthetically (diagnostics only, never used by inference), and
/// the noise level (fixed to 1 in all experiments; a debug scale exists on
/// the generator).
#[derive(Debug, Clone, PartialEq)]
pub struct CurveObservation {
    pub y: Vec<Complex64>,
    pub hidden_shift: Option<f64>,
    pub noise_level: f64,
}

impl CurveObservation {
    pub fn cutoff(&self) -> usize {
        (self.y.len() - 1) / 2
    }

    /// Coefficient at frequency `l`.
    pub fn coeff(&self, l: i64) -> Complex64 {
        let k = self.cutoff() as i64;
        assert!(l.abs() <= k);
        self.y[(l + k) as usize]
    }

    /// Rotate the observation as if the underlying curve were shifted by
    /// `phi`: multiply `y_l` by `exp(-i 2 pi l phi)`.
    pub fn rotate(&self, phi: f64) -> CurveObservation {
        let k = self.cutoff() as i64;
        let y = (-k..=k)
            .map(|l| self.coeff(l) * phase(l, phi))
            .collect();
        CurveObservation {
            y,
            hidden_shift: self.hidden_shift.map(|s| (s + phi).rem_euclid(1.0)),
            noise_level: self.noise_level,
        }
    }
}

/// A synthetic dataset: curves sharing one cutoff and noise level, the
/// generating truth when known, and the master seed that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub curves: Vec<CurveObservation>,
    pub truth: Option<(FourierSeries, ShiftDensity)>,
    pub seed: u64,
    pub cutoff: usize,
    /// True when the requested cutoff dropped nonzero truth coefficients.
    pub truncated: bool,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }
}

/// Draw one shift from the grid density: inverse CDF over the bins of the
/// piecewise-constant density, with uniform jitter inside the selected bin.
pub fn sample_shift(g: &ShiftDensity, rng: &mut Stream) -> f64 {
    debug_assert!((g.integral() - 1.0).abs() < 1e-10, "density not normalized");
    let m = g.grid_len();
    let cdf = g.bin_cdf();
    let u: f64 = rng.random();
    // binary search for the bin with cdf[bin] <= u < cdf[bin+1]
    let mut lo = 0usize;
    let mut hi = m;
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if cdf[mid] <= u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let jitter: f64 = rng.random();
    ((lo as f64 + jitter) / m as f64).rem_euclid(1.0)
}

/// Standard complex Gaussian: real and imaginary parts `N(0, 1/2)`.
pub fn complex_gaussian(rng: &mut Stream) -> Complex64 {
    let n = Normal::new(0.0, (0.5f64).sqrt()).unwrap();
    Complex64::new(n.sample(rng), n.sample(rng))
}

/// Generate `n` curves from `(f0, g0)` at cutoff `K`. Deterministic in
/// `seed`; each curve uses its own substream so the result is independent of
/// scheduling.
pub fn generate_dataset(
    f0: &FourierSeries,
    g0: &ShiftDensity,
    n: usize,
    cutoff: usize,
    seed: u64,
) -> Result<Dataset> {
    generate_dataset_scaled(f0, g0, n, cutoff, seed, 1.0)
}

/// Debug variant with a noise scale; `noise_scale = 1` is the model.
pub fn generate_dataset_scaled(
    f0: &FourierSeries,
    g0: &ShiftDensity,
    n: usize,
    cutoff: usize,
    seed: u64,
    noise_scale: f64,
) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::Precondition("dataset needs at least one curve".into()));
    }
    let truncated = f0
        .support()
        .iter()
        .any(|l| l.unsigned_abs() as usize > cutoff);
    let k = cutoff as i64;
    let curves: Vec<CurveObservation> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut rng = substream(seed, "curve", j as u64);
            let tau = sample_shift(g0, &mut rng);
            let y = (-k..=k)
                .map(|l| f0.coeff(l) * phase(l, tau) + noise_scale * complex_gaussian(&mut rng))
                .collect();
            CurveObservation {
                y,
                hidden_shift: Some(tau),
                noise_level: 1.0,
            }
        })
        .collect();
    Ok(Dataset {
        curves,
        truth: Some((f0.clone(), g0.clone())),
        seed,
        cutoff,
        truncated,
    })
}

/// Log likelihood of one curve under `(f, g)`:
/// `log int_0^1 prod_l gamma(y_l - theta_l e^{-i 2 pi l phi}) g(phi) dphi`,
/// by the periodic trapezoid rule on `Q` nodes with log-sum-exp
/// stabilization. Spectrally accurate for smooth densities.
pub fn loglik_curve(
    y: &CurveObservation,
    f: &FourierSeries,
    g: &ShiftDensity,
    quad: usize,
) -> Result<f64> {
    let k = y.cutoff();
    if quad < 2 * k + 2 {
        return Err(Error::Precondition(format!(
            "quadrature size {quad} below 2K+2 = {}",
            2 * k + 2
        )));
    }
    if g.values().iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidDensity("all-zero shift density".into()));
    }
    let kk = k as i64;
    // S(phi) = sum_l -|y_l - theta_l e^{-i2pi l phi}|^2
    //        = -(|y|^2 + |theta|^2) + 2 Re sum_l conj(y_l) theta_l e^{-i2pi l phi}
    let y_sq: f64 = (-kk..=kk).map(|l| y.coeff(l).norm_sqr()).sum();
    let t_sq: f64 = (-kk..=kk).map(|l| f.coeff(l).norm_sqr()).sum();
    let cross: Vec<Complex64> = (-kk..=kk).map(|l| y.coeff(l).conj() * f.coeff(l)).collect();

    let mut terms = Vec::with_capacity(quad);
    for q in 0..quad {
        let phi = q as f64 / quad as f64;
        let w = g.value_at(phi) / quad as f64;
        if w <= 0.0 {
            continue;
        }
        let mut t = Complex64::ZERO;
        for (i, c) in cross.iter().enumerate() {
            if *c != Complex64::ZERO {
                let l = i as i64 - kk;
                t += c * phase(l, phi);
            }
        }
        let s = -(y_sq + t_sq) + 2.0 * t.re;
        terms.push(w.ln() + s);
    }
    if terms.is_empty() {
        return Err(Error::InvalidDensity(
            "density vanished at every quadrature node".into(),
        ));
    }
    let count = 2 * k + 1;
    Ok(logsumexp(&terms) - count as f64 * std::f64::consts::PI.ln())
}

pub fn logsumexp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

#[derive(Serialize, Deserialize)]
struct CurveJson {
    re: Vec<f64>,
    im: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shift: Option<f64>,
}

pub fn dataset_to_json(d: &Dataset) -> serde_json::Value {
    let curves: Vec<serde_json::Value> = d
        .curves
        .iter()
        .map(|c| {
            serde_json::to_value(CurveJson {
                re: c.y.iter().map(|z| z.re).collect(),
                im: c.y.iter().map(|z| z.im).collect(),
                shift: c.hidden_shift,
            })
            .unwrap()
        })
        .collect();
    let mut root = serde_json::json!({
        "K": d.cutoff,
        "sigma": 1.0,
        "seed": d.seed,
        "curves": curves,
    });
    if let Some((f, g)) = &d.truth {
        root["truth"] = serde_json::json!({"f": f.to_json(), "g": g.to_json()});
    }
    root
}

pub fn dataset_from_json(v: &serde_json::Value) -> Result<Dataset> {
    let cutoff = v["K"]
        .as_u64()
        .ok_or_else(|| Error::Config("dataset missing K".into()))? as usize;
    let seed = v["seed"]
        .as_u64()
        .ok_or_else(|| Error::Config("dataset missing seed".into()))?;
    let curves_json = v["curves"]
        .as_array()
        .ok_or_else(|| Error::Config("dataset missing curves".into()))?;
    let mut curves = Vec::with_capacity(curves_json.len());
    for cj in curves_json {
        let c: CurveJson = serde_json::from_value(cj.clone())?;
        if c.re.len() != 2 * cutoff + 1 || c.im.len() != c.re.len() {
            return Err(Error::Config("curve length disagrees with K".into()));
        }
        curves.push(CurveObservation {
            y: c.re
                .iter()
                .zip(&c.im)
                .map(|(&re, &im)| Complex64::new(re, im))
                .collect(),
            hidden_shift: c.shift,
            noise_level: 1.0,
        });
    }
    let truth = if v["truth"].is_object() {
        Some((
            FourierSeries::from_json(&v["truth"]["f"])?,
            ShiftDensity::from_json(&v["truth"]["g"])?,
        ))
    } else {
        None
    };
    Ok(Dataset {
        curves,
        truth,
        seed,
        cutoff,
        truncated: false,
    })
}
