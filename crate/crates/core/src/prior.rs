//! The two priors: an adaptive frequency-sieve prior on shapes and a
//! non-adaptive log-Gaussian-process prior on shift densities, plus the
//! small-ball probability experiments for the integrated bridge.
//!
//! The Brownian bridge is simulated through its sine Karhunen-Loeve series
//! `B(t) = sum_j Z_j sqrt(2) sin(j pi t) / (j pi)`. The centering integral
//! operator `J` has closed form on sines, cosines and polynomials, so the
//! iterated operator is applied analytically per mode and the grid is used
//! only to emit values; the construction is exact up to series truncation.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::density::ShiftDensity;
use crate::error::{Error, Result};
use crate::fourier::FourierSeries;
use crate::rng::Stream;
use num_complex::Complex64;

/// Configuration of the frequency-sieve prior. The level weights are
/// `lambda(l) ~ exp(-c_lambda l^2 log^rho(l + 1))` renormalized on
/// `[1, k_max]`, and the coefficient variance is
/// `xi_n^2 = n^{-1/4} (log n)^{-3/2}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SievePriorConfig {
    pub n: f64,
    pub rho: f64,
    pub c_lambda: f64,
    pub k_max: usize,
}

impl SievePriorConfig {
    pub fn new(n: f64, rho: f64, c_lambda: f64, k_max: usize) -> Result<Self> {
        if !(1.0 < rho && rho < 2.0) {
            return Err(Error::Config(format!("rho = {rho} outside (1, 2)")));
        }
        if n <= 1.0 {
            return Err(Error::Config("sieve prior needs n > 1".into()));
        }
        if k_max < 1 {
            return Err(Error::Config("k_max must be at least 1".into()));
        }
        Ok(SievePriorConfig {
            n,
            rho,
            c_lambda,
            k_max,
        })
    }

    /// `xi_n^2 = n^{-1/4} (log n)^{-3/2}`.
    pub fn xi_squared(&self) -> f64 {
        self.n.powf(-0.25) * self.n.ln().powf(-1.5)
    }

    /// Normalized level weights on `1..=k_max`.
    pub fn level_weights(&self) -> Vec<f64> {
        let raw: Vec<f64> = (1..=self.k_max)
            .map(|l| {
                let lf = l as f64;
                (-self.c_lambda * lf * lf * (lf + 1.0).ln().powf(self.rho)).exp()
            })
            .collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / total).collect()
    }

    /// Log of the unnormalized level weight (enough for Metropolis ratios).
    pub fn log_level_weight(&self, level: usize) -> f64 {
        let lf = level as f64;
        -self.c_lambda * lf * lf * (lf + 1.0).ln().powf(self.rho)
    }
}

/// Draw the active band half-width from the level weights.
pub fn sample_sieve_level(cfg: &SievePriorConfig, rng: &mut Stream) -> usize {
    let weights = cfg.level_weights();
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i + 1;
        }
    }
    cfg.k_max
}

/// Draw a shape: level first, then coefficients on the active band. The
/// first coefficient is `|N(0, xi^2)|` (real, positive); every other active
/// coefficient is complex Gaussian with total variance `xi^2`.
pub fn sample_sieve_f(cfg: &SievePriorConfig, rng: &mut Stream) -> FourierSeries {
    let level = sample_sieve_level(cfg, rng);
    sample_sieve_f_at_level(cfg, level, rng)
}

pub fn sample_sieve_f_at_level(
    cfg: &SievePriorConfig,
    level: usize,
    rng: &mut Stream,
) -> FourierSeries {
    let xi = cfg.xi_squared().sqrt();
    let real = Normal::new(0.0, xi).unwrap();
    let part = Normal::new(0.0, xi / 2.0f64.sqrt()).unwrap();
    let k = level as i64;
    let mut f = FourierSeries::zeros(level);
    for l in -k..=k {
        if l == 1 {
            *f.coeff_mut(l) = Complex64::new(real.sample(rng).abs(), 0.0);
        } else {
            *f.coeff_mut(l) = Complex64::new(part.sample(rng), part.sample(rng));
        }
    }
    f.refresh_identifiable();
    f
}

/// Closed-form trigonometric-plus-polynomial path representation:
/// `sum_j sin[j-1] sin(j pi t) + sum_j cos[j-1] cos(j pi t) + sum_p poly[p] t^p`.
#[derive(Debug, Clone, Default)]
pub struct TrigPoly {
    pub sin: Vec<f64>,
    pub cos: Vec<f64>,
    pub poly: Vec<f64>,
}

impl TrigPoly {
    /// The centering integral operator
    /// `J(f)(t) = int_0^t f - t int_0^1 f`, applied in closed form:
    /// sines map to cosines plus an affine part, cosines map to sines, and
    /// monomials integrate with a linear correction.
    pub fn apply_j(&self) -> TrigPoly {
        let n = self.sin.len().max(self.cos.len());
        let mut out = TrigPoly {
            sin: vec![0.0; n],
            cos: vec![0.0; n],
            poly: vec![0.0; self.poly.len() + 2],
        };
        for (idx, &a) in self.sin.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let j = (idx + 1) as f64;
            let jpi = j * std::f64::consts::PI;
            // int_0^t sin(j pi s) ds = (1 - cos(j pi t)) / (j pi)
            // int_0^1 sin = (1 - (-1)^j) / (j pi)
            out.cos[idx] -= a / jpi;
            out.poly[0] += a / jpi;
            let full = if idx % 2 == 0 { 2.0 } else { 0.0 }; // j odd <=> idx even
            out.poly[1] -= a * full / jpi;
        }
        for (idx, &b) in self.cos.iter().enumerate() {
            if b == 0.0 {
                continue;
            }
            let j = (idx + 1) as f64;
            let jpi = j * std::f64::consts::PI;
            // int_0^t cos(j pi s) ds = sin(j pi t) / (j pi); int_0^1 cos = 0
            out.sin[idx] += b / jpi;
        }
        for (p, &c) in self.poly.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let pf = (p + 1) as f64;
            out.poly[p + 1] += c / pf;
            out.poly[1] -= c / pf;
        }
        out
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (idx, &a) in self.sin.iter().enumerate() {
            if a != 0.0 {
                acc += a * ((idx + 1) as f64 * std::f64::consts::PI * t).sin();
            }
        }
        for (idx, &b) in self.cos.iter().enumerate() {
            if b != 0.0 {
                acc += b * ((idx + 1) as f64 * std::f64::consts::PI * t).cos();
            }
        }
        let mut tp = 1.0;
        for &c in &self.poly {
            acc += c * tp;
            tp *= t;
        }
        acc
    }

    /// Values on the periodic grid `t = i / m`, `i = 0..m-1`.
    pub fn eval_periodic_grid(&self, m: usize) -> Vec<f64> {
        (0..m).map(|i| self.eval(i as f64 / m as f64)).collect()
    }

    /// Values on the closed grid `t = i / m`, `i = 0..=m`.
    pub fn eval_closed_grid(&self, m: usize) -> Vec<f64> {
        (0..=m).map(|i| self.eval(i as f64 / m as f64)).collect()
    }
}

/// Smoothness index of the prior: `floor(nu - 1/2)` integrations.
pub fn smoothness_index(nu: f64) -> Result<usize> {
    if nu < 0.5 {
        return Err(Error::Precondition(format!("nu = {nu} below 1/2")));
    }
    Ok((nu - 0.5).floor() as usize)
}

/// One realization of the prior Gaussian process, kept both as grid values
/// and as its generating coordinates (bridge KL coefficients and the
/// trigonometric correction variables).
#[derive(Debug, Clone)]
pub struct GpPath {
    pub grid: Vec<f64>,
    pub bridge_coeffs: Vec<f64>,
    pub z: Vec<f64>,
    pub k_nu: usize,
}

impl GpPath {
    pub fn grid_len(&self) -> usize {
        self.grid.len()
    }

    pub fn sup_diff(&self, other: &GpPath) -> f64 {
        self.grid
            .iter()
            .zip(&other.grid)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Coordinate-wise linear combination; grid values combine identically
    /// because the synthesis is linear.
    pub fn linear_combine(&self, other: &GpPath, ca: f64, cb: f64) -> GpPath {
        assert_eq!(self.k_nu, other.k_nu);
        assert_eq!(self.grid.len(), other.grid.len());
        let comb = |x: &[f64], y: &[f64]| -> Vec<f64> {
            x.iter().zip(y).map(|(a, b)| ca * a + cb * b).collect()
        };
        GpPath {
            grid: comb(&self.grid, &other.grid),
            bridge_coeffs: comb(&self.bridge_coeffs, &other.bridge_coeffs),
            z: comb(&self.z, &other.z),
            k_nu: self.k_nu,
        }
    }
}

/// Build the closed-form path for given coordinates: the bridge series
/// integrated `k_nu` times plus the trigonometric corrections.
pub fn synthesize_path(bridge_coeffs: &[f64], z: &[f64], k_nu: usize) -> TrigPoly {
    let n_kl = bridge_coeffs.len();
    let mut bridge = TrigPoly {
        sin: vec![0.0; n_kl.max(2 * z.len())],
        cos: vec![0.0; n_kl.max(2 * z.len())],
        poly: vec![],
    };
    for (idx, &c) in bridge_coeffs.iter().enumerate() {
        let j = (idx + 1) as f64;
        bridge.sin[idx] = c * 2.0f64.sqrt() / (j * std::f64::consts::PI);
    }
    let mut path = bridge;
    for _ in 0..k_nu {
        path = path.apply_j();
    }
    // corrections psi_i(t) = sin(2 pi i t) + cos(2 pi i t): index 2i in the
    // half-period basis
    for (i, &zi) in z.iter().enumerate() {
        let idx = 2 * (i + 1) - 1;
        path.sin[idx] += zi;
        path.cos[idx] += zi;
    }
    path
}

/// Draw one prior path at smoothness `nu` on `m` grid points with `n_kl`
/// bridge modes.
pub fn sample_gp_w(nu: f64, m: usize, n_kl: usize, rng: &mut Stream) -> Result<GpPath> {
    if m < 64 {
        return Err(Error::Precondition("grid must have at least 64 points".into()));
    }
    if n_kl < 16 {
        return Err(Error::Precondition("need at least 16 bridge modes".into()));
    }
    let k_nu = smoothness_index(nu)?;
    let std_normal = Normal::new(0.0, 1.0).unwrap();
    let bridge_coeffs: Vec<f64> = (0..n_kl).map(|_| std_normal.sample(rng)).collect();
    let z: Vec<f64> = (0..k_nu).map(|_| std_normal.sample(rng)).collect();
    let path = synthesize_path(&bridge_coeffs, &z, k_nu);
    Ok(GpPath {
        grid: path.eval_periodic_grid(m),
        bridge_coeffs,
        z,
        k_nu,
    })
}

/// Exponentiate and normalize a path into a density. Overflow is guarded by
/// subtracting the maximum before exponentiation, which also makes the map
/// invariant to additive constants.
pub fn normalize_to_density(w: &GpPath) -> ShiftDensity {
    normalize_values_to_density(&w.grid)
}

pub fn normalize_values_to_density(values: &[f64]) -> ShiftDensity {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = values.iter().map(|v| (v - max).exp()).collect();
    ShiftDensity::from_values(exp).expect("exponentials are positive")
}

/// The centering operator on raw grid values over the closed grid
/// `t_i = i / (len - 1)`: cumulative trapezoid minus the linear ramp.
/// Vanishes at both endpoints by construction.
pub fn apply_j_grid(values: &[f64]) -> Vec<f64> {
    assert!(values.len() >= 2, "need at least two grid points");
    let n = values.len() - 1;
    let h = 1.0 / n as f64;
    let mut cum = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    cum.push(0.0);
    for i in 0..n {
        acc += 0.5 * h * (values[i] + values[i + 1]);
        cum.push(acc);
    }
    let total = cum[n];
    cum.iter()
        .enumerate()
        .map(|(i, &c)| c - (i as f64 / n as f64) * total)
        .collect()
}

/// Rejection-sample the log-Gaussian prior restricted to the Sobolev ball of
/// radius `2 A`. Returns the accepted density, its generating path, and the
/// number of attempts used.
pub fn sample_g_prior(
    nu: f64,
    a: f64,
    m: usize,
    n_kl: usize,
    max_attempts: usize,
    rng: &mut Stream,
) -> Result<(ShiftDensity, GpPath, usize)> {
    if a <= 0.0 {
        return Err(Error::Precondition("ball radius must be positive".into()));
    }
    for attempt in 1..=max_attempts {
        let w = sample_gp_w(nu, m, n_kl, rng)?;
        let g = normalize_to_density(&w);
        if g.sobolev_seminorm(nu) <= 2.0 * a {
            return Ok((g, w, attempt));
        }
    }
    Err(Error::BudgetExhausted(format!(
        "no prior draw inside the 2A Sobolev ball after {max_attempts} attempts"
    )))
}

/// Result of a small-ball probability experiment at one radius.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SmallBallEstimate {
    pub k: usize,
    pub epsilon: f64,
    pub reps: usize,
    pub p_hat: f64,
    pub stderr: f64,
    /// True when no hit was observed; `p_hat` then carries the 95% upper
    /// confidence bound instead of a point estimate.
    pub censored: bool,
}

/// Sup-amplitude of each integrated-bridge mode on the closed grid; the
/// scale that decides which modes a small ball constrains.
fn mode_matrix(k: usize, n_kl: usize, m: usize) -> Vec<Vec<f64>> {
    (0..n_kl)
        .map(|idx| {
            let mut coeffs = vec![0.0; n_kl];
            coeffs[idx] = 1.0;
            let path = synthesize_path(&coeffs, &[], k);
            path.eval_closed_grid(m)
        })
        .collect()
}

/// Exact bridge values at the closed grid `t_i = i/m` via the random walk
/// `B_i = W_i - t_i W_m`; the finite-dimensional law is exact, with no
/// series truncation.
fn random_walk_bridge(m: usize, rng: &mut Stream) -> Vec<f64> {
    let std = (1.0 / m as f64).sqrt();
    let normal = Normal::new(0.0, std).unwrap();
    let mut w = Vec::with_capacity(m + 1);
    let mut acc = 0.0;
    w.push(0.0);
    for _ in 0..m {
        acc += normal.sample(rng);
        w.push(acc);
    }
    let w1 = w[m];
    for (i, v) in w.iter_mut().enumerate() {
        *v -= i as f64 / m as f64 * w1;
    }
    w
}

/// Probability that the path stays inside `[-eps, eps]` between its grid
/// points, given the grid values: the product over intervals of the exact
/// Brownian-bridge two-sided crossing survival. Conditioning on the grid
/// and multiplying survivals both removes the grid-sup bias and smooths the
/// estimator.
fn crossing_survival(path: &[f64], eps: f64, h: f64) -> f64 {
    let mut surv = 1.0f64;
    for w in path.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.abs() > eps || b.abs() > eps {
            return 0.0;
        }
        let up = (-2.0 * (eps - a) * (eps - b) / h).exp();
        let down = (-2.0 * (eps + a) * (eps + b) / h).exp();
        surv *= (1.0 - up - down).max(0.0);
        if surv == 0.0 {
            return 0.0;
        }
    }
    surv
}

/// Bridge sine-mode `sqrt(2) sin(j pi t) / (j pi)` on the closed grid.
fn bridge_mode(j: usize, m: usize) -> Vec<f64> {
    let jpi = j as f64 * std::f64::consts::PI;
    (0..=m)
        .map(|i| two_sqrt() * (jpi * i as f64 / m as f64).sin() / jpi)
        .collect()
}

fn two_sqrt() -> f64 {
    std::f64::consts::SQRT_2
}

/// Importance-tilt shrink: a ball of radius `eps` constrains the path on a
/// correlation scale `eps^{1/(k+1/2)}`, so mode `j` with sup-amplitude `a_j`
/// is proposed with variance `1 / (1 + (c a_j eps^{-1/(k+1/2)})^2)`. The
/// constant is matched to the bridge tube rate `pi^2 / (8 eps^2)`.
const TILT_C: f64 = 0.8724;

fn tilt_sigma(amp: f64, eps: f64, k: usize) -> f64 {
    let rate = eps.powf(-1.0 / (k as f64 + 0.5));
    let x = TILT_C * amp * rate;
    (1.0 / (1.0 + x * x)).sqrt()
}

/// Plain Monte Carlo estimate of `P(sup |J_k(B)| <= eps)`; dispatches to the
/// exact-bridge crossing estimator at `k = 0` and to the truncated
/// Karhunen-Loeve synthesis (smooth paths) for `k >= 1`.
pub fn smallball_probability(
    k: usize,
    eps: f64,
    reps: usize,
    n_kl: usize,
    m: usize,
    rng: &mut Stream,
) -> Result<SmallBallEstimate> {
    smallball_impl(k, eps, reps, n_kl, m, false, rng)
}

/// Importance-sampled estimate for radii too deep for plain Monte Carlo:
/// the low Karhunen-Loeve modes are proposed with shrunk variances matched
/// to the ball scale and the likelihood ratio corrects the bias; unbiased
/// for any shrink schedule.
pub fn smallball_probability_is(
    k: usize,
    eps: f64,
    reps: usize,
    n_kl: usize,
    m: usize,
    rng: &mut Stream,
) -> Result<SmallBallEstimate> {
    smallball_impl(k, eps, reps, n_kl, m, true, rng)
}

fn smallball_impl(
    k: usize,
    eps: f64,
    reps: usize,
    n_kl: usize,
    m: usize,
    tilt: bool,
    rng: &mut Stream,
) -> Result<SmallBallEstimate> {
    if reps < 100 {
        return Err(Error::Precondition("need at least 100 replicates".into()));
    }
    if k == 0 {
        smallball_bridge(eps, reps, m, tilt, rng)
    } else {
        smallball_smooth(k, eps, reps, n_kl, m, tilt, rng)
    }
}

fn smallball_bridge(
    eps: f64,
    reps: usize,
    m: usize,
    tilt: bool,
    rng: &mut Stream,
) -> Result<SmallBallEstimate> {
    let m = m.max(512);
    let h = 1.0 / m as f64;
    // tilt every mode the tube constrains by more than about 1%
    let n_tilt = if tilt {
        ((2.8 / (eps * eps)).ceil() as usize).clamp(8, 96)
    } else {
        0
    };
    let modes: Vec<Vec<f64>> = (1..=n_tilt).map(|j| bridge_mode(j, m)).collect();
    let sigmas: Vec<f64> = (1..=n_tilt)
        .map(|j| {
            let amp = two_sqrt() / (j as f64 * std::f64::consts::PI);
            tilt_sigma(amp, eps, 0)
        })
        .collect();
    let std_normal = Normal::new(0.0, 1.0).unwrap();
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut hits = 0usize;
    for _ in 0..reps {
        let mut path = random_walk_bridge(m, rng);
        let mut log_w = 0.0;
        if n_tilt > 0 {
            // extract the path's own low coordinates by grid quadrature,
            // replace them with shrunk proposals and weight by the ratio
            for (j_idx, row) in modes.iter().enumerate() {
                let j = (j_idx + 1) as f64;
                let jpi = j * std::f64::consts::PI;
                // Z_j = j pi int B(t) sqrt2 sin(j pi t) dt
                let mut inner = 0.0;
                for (i, &r) in row.iter().enumerate() {
                    let wgt = if i == 0 || i == m { 0.5 } else { 1.0 };
                    inner += wgt * path[i] * r;
                }
                let z_old = inner * h * jpi * jpi;
                let s = sigmas[j_idx];
                let z_new = s * std_normal.sample(rng);
                log_w += s.ln() + 0.5 * z_new * z_new * (1.0 / (s * s) - 1.0);
                let delta = z_new - z_old;
                for (p, &r) in path.iter_mut().zip(row) {
                    *p += delta * r;
                }
            }
        }
        let surv = crossing_survival(&path, eps, h);
        if surv > 0.0 {
            let v = surv * log_w.exp();
            sum += v;
            sum_sq += v * v;
            hits += 1;
        }
    }
    Ok(finish_estimate(0, eps, reps, sum, hits as f64, Some(sum_sq)))
}

fn smallball_smooth(
    k: usize,
    eps: f64,
    reps: usize,
    n_kl: usize,
    m: usize,
    tilt: bool,
    rng: &mut Stream,
) -> Result<SmallBallEstimate> {
    let modes = mode_matrix(k, n_kl, m);
    let sigmas: Vec<f64> = if tilt {
        modes
            .iter()
            .map(|row| {
                let amp = row.iter().map(|v| v.abs()).fold(0.0, f64::max);
                tilt_sigma(amp, eps, k)
            })
            .collect()
    } else {
        vec![1.0; n_kl]
    };
    let std_normal = Normal::new(0.0, 1.0).unwrap();
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut hits = 0usize;
    let mut path = vec![0.0f64; m + 1];
    for _ in 0..reps {
        path.iter_mut().for_each(|v| *v = 0.0);
        let mut log_w = 0.0;
        for (row, &s) in modes.iter().zip(&sigmas) {
            let zj = s * std_normal.sample(rng);
            if s < 1.0 {
                log_w += s.ln() + 0.5 * zj * zj * (1.0 / (s * s) - 1.0);
            }
            for (p, &r) in path.iter_mut().zip(row) {
                *p += zj * r;
            }
        }
        let sup = path.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if sup <= eps {
            let w = log_w.exp();
            sum += w;
            sum_sq += w * w;
            hits += 1;
        }
    }
    Ok(finish_estimate(k, eps, reps, sum, hits as f64, Some(sum_sq)))
}

fn finish_estimate(
    k: usize,
    eps: f64,
    reps: usize,
    weighted_hits: f64,
    raw_hits: f64,
    weighted_sq: Option<f64>,
) -> SmallBallEstimate {
    let n = reps as f64;
    if raw_hits == 0.0 {
        // upper 95% bound from zero successes
        return SmallBallEstimate {
            k,
            epsilon: eps,
            reps,
            p_hat: 3.0 / n,
            stderr: f64::NAN,
            censored: true,
        };
    }
    let p = weighted_hits / n;
    let stderr = match weighted_sq {
        Some(sq) => ((sq / n - p * p).max(0.0) / n).sqrt(),
        None => (p * (1.0 - p) / n).sqrt(),
    };
    SmallBallEstimate {
        k,
        epsilon: eps,
        reps,
        p_hat: p,
        stderr,
        censored: false,
    }
}

/// Multilevel-splitting estimate of the small-ball probability, for radii
/// far beyond plain Monte Carlo: the tube radius is lowered through a
/// geometric ladder and each conditional factor is estimated by a pCN chain
/// that targets the path law restricted to the current tube (the proposal
/// is prior-reversible, so the restriction is exact). Several independent
/// ladders run on separate substreams; the spread across ladders gives the
/// standard error. For the raw bridge the last factor also applies the
/// exact interval-crossing correction, so the estimate targets the
/// continuum sup rather than the grid sup.
pub fn smallball_probability_splitting(
    k: usize,
    eps: f64,
    reps: usize,
    n_kl: usize,
    m: usize,
    rng: &mut Stream,
) -> Result<SmallBallEstimate> {
    if reps < 1000 {
        return Err(Error::Precondition("need at least 1000 replicates".into()));
    }
    let ladders = 10usize;
    let budget = reps / ladders;
    // seed one substream per ladder off the caller's stream
    let seeds: Vec<u64> = (0..ladders).map(|_| rng.random()).collect();
    let estimates: Vec<f64> = seeds
        .iter()
        .enumerate()
        .map(|(i, &seed)| {
            let mut lrng = crate::rng::substream(seed, "smallball-ladder", i as u64);
            ladder_estimate(k, eps, budget, n_kl, m, &mut lrng)
        })
        .collect::<Result<Vec<f64>>>()?;
    let n = ladders as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    if mean <= 0.0 {
        return Ok(SmallBallEstimate {
            k,
            epsilon: eps,
            reps,
            p_hat: 3.0 / reps as f64,
            stderr: f64::NAN,
            censored: true,
        });
    }
    let var = estimates.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / (n - 1.0);
    Ok(SmallBallEstimate {
        k,
        epsilon: eps,
        reps,
        p_hat: mean,
        stderr: (var / n).sqrt(),
        censored: false,
    })
}

/// Sequential Monte Carlo estimate of the bridge small-ball probability
/// (`k = 0` only): the bridge is Markov, so particles are propagated through
/// its exact inhomogeneous transitions and weighted at every step by the
/// probability of not crossing the tube wall inside the interval (exact
/// given the endpoints). Systematic resampling keeps the population alive
/// down to very deep tubes. Repetition spread gives the standard error.
pub fn smallball_probability_smc(
    eps: f64,
    reps: usize,
    m: usize,
    rng: &mut Stream,
) -> Result<SmallBallEstimate> {
    if reps < 1000 {
        return Err(Error::Precondition("need at least 1000 replicates".into()));
    }
    let repeats = 10usize;
    let particles = (reps / repeats).max(100);
    let m = m.max(512);
    let h = 1.0 / m as f64;
    let std_normal = Normal::new(0.0, 1.0).unwrap();
    let mut estimates = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let mut xs = vec![0.0f64; particles];
        let mut ws = vec![1.0f64; particles];
        let mut log_p = 0.0f64;
        for i in 0..m {
            let t = i as f64 * h;
            let remain = 1.0 - t;
            let shrink = (remain - h) / remain;
            let sd = (h * shrink).max(0.0).sqrt();
            for (x, w) in xs.iter_mut().zip(ws.iter_mut()) {
                if *w == 0.0 {
                    continue;
                }
                let nxt = *x * shrink + sd * std_normal.sample(rng);
                if nxt.abs() > eps {
                    *w = 0.0;
                    continue;
                }
                let up = (-2.0 * (eps - *x) * (eps - nxt) / h).exp();
                let down = (-2.0 * (eps + *x) * (eps + nxt) / h).exp();
                *w *= (1.0 - up - down).max(0.0);
                *x = nxt;
            }
            let mean_w: f64 = ws.iter().sum::<f64>() / particles as f64;
            if mean_w <= 0.0 {
                log_p = f64::NEG_INFINITY;
                break;
            }
            // effective sample size decides when to resample
            let sum_w: f64 = ws.iter().sum();
            let sum_w2: f64 = ws.iter().map(|w| w * w).sum();
            let ess = sum_w * sum_w / sum_w2.max(1e-300);
            if ess < particles as f64 / 2.0 {
                log_p += mean_w.ln();
                let step = sum_w / particles as f64;
                let offset: f64 = rng.random::<f64>() * step;
                let mut cum = 0.0;
                let mut idx = 0usize;
                let mut new_xs = Vec::with_capacity(particles);
                for j in 0..particles {
                    let target = offset + j as f64 * step;
                    while cum + ws[idx] < target && idx + 1 < particles {
                        cum += ws[idx];
                        idx += 1;
                    }
                    new_xs.push(xs[idx]);
                }
                xs = new_xs;
                ws.iter_mut().for_each(|w| *w = 1.0);
            }
        }
        if log_p.is_finite() {
            let mean_w: f64 = ws.iter().sum::<f64>() / particles as f64;
            if mean_w > 0.0 {
                estimates.push((log_p + mean_w.ln()).exp());
            } else {
                estimates.push(0.0);
            }
        } else {
            estimates.push(0.0);
        }
    }
    let n = repeats as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    if mean <= 0.0 {
        return Ok(SmallBallEstimate {
            k: 0,
            epsilon: eps,
            reps,
            p_hat: 3.0 / reps as f64,
            stderr: f64::NAN,
            censored: true,
        });
    }
    let var = estimates.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / (n - 1.0);
    Ok(SmallBallEstimate {
        k: 0,
        epsilon: eps,
        reps,
        p_hat: mean,
        stderr: (var / n).sqrt(),
        censored: false,
    })
}

/// Rough `-log P` scale used only to shape the ladder.
fn logp_scale(k: usize, eps: f64) -> f64 {
    let c = if k == 0 { std::f64::consts::PI * std::f64::consts::PI / 8.0 } else { 0.36 };
    c * eps.powf(-1.0 / (k as f64 + 0.5))
}

fn ladder_estimate(
    k: usize,
    eps: f64,
    budget: usize,
    n_kl: usize,
    m: usize,
    rng: &mut Stream,
) -> Result<f64> {
    let m = if k == 0 { m.max(512) } else { m };
    // entry radius where plain Monte Carlo still sees hits
    let start = if k == 0 { 0.55f64 } else { 0.045f64 };
    let modes = if k == 0 { Vec::new() } else { mode_matrix(k, n_kl, m) };
    let h = 1.0 / m as f64;

    let synth_sup = |coords: &[f64], path: &mut Vec<f64>| -> f64 {
        if k == 0 {
            // coords are scaled increments; build the bridge in place
            path.clear();
            path.push(0.0);
            let std = h.sqrt();
            let mut acc = 0.0;
            for &c in coords {
                acc += std * c;
                path.push(acc);
            }
            let w1 = *path.last().unwrap();
            for (i, v) in path.iter_mut().enumerate() {
                *v -= i as f64 * h * w1;
            }
        } else {
            path.iter_mut().for_each(|v| *v = 0.0);
            path.resize(m + 1, 0.0);
            for (row, &c) in modes.iter().zip(coords) {
                for (p, &r) in path.iter_mut().zip(row) {
                    *p += c * r;
                }
            }
        }
        path.iter().map(|v| v.abs()).fold(0.0, f64::max)
    };

    let dim = if k == 0 { m } else { n_kl };
    let std_normal = Normal::new(0.0, 1.0).unwrap();
    let mut path = Vec::with_capacity(m + 1);

    if eps >= start {
        // no ladder needed: plain indicator pass with crossing smoothing
        let mut acc = 0.0;
        for _ in 0..budget {
            let coords: Vec<f64> = (0..dim).map(|_| std_normal.sample(rng)).collect();
            let sup = synth_sup(&coords, &mut path);
            if sup <= eps {
                acc += if k == 0 { crossing_survival(&path, eps, h) } else { 1.0 };
            }
        }
        return Ok(acc / budget as f64);
    }

    // geometric ladder, about 1.2 nats of -log P per stage
    let gap = logp_scale(k, eps) - logp_scale(k, start);
    let stages = ((gap / 1.2).ceil() as usize).max(1);
    let mut radii = Vec::with_capacity(stages + 1);
    for l in 0..=stages {
        let target = logp_scale(k, start) + gap * l as f64 / stages as f64;
        let c = if k == 0 { std::f64::consts::PI * std::f64::consts::PI / 8.0 } else { 0.36 };
        radii.push((c / target).powf(k as f64 + 0.5));
    }
    radii[0] = start;
    radii[stages] = eps;

    let per_stage = (budget / (stages + 1)).max(200);

    // stage 0: plain Monte Carlo into the entry tube, keeping one state
    let mut hits = 0usize;
    let mut state: Option<Vec<f64>> = None;
    for _ in 0..per_stage {
        let coords: Vec<f64> = (0..dim).map(|_| std_normal.sample(rng)).collect();
        let sup = synth_sup(&coords, &mut path);
        if sup <= radii[0] {
            hits += 1;
            state = Some(coords);
        }
    }
    if hits == 0 {
        return Ok(0.0);
    }
    let mut log_p = (hits as f64 / per_stage as f64).ln();
    let mut coords = state.expect("hit recorded");

    let mut cur_path = path.clone();
    let mut cur_sup = synth_sup(&coords, &mut cur_path);
    for l in 0..stages {
        let tube = radii[l];
        let next = radii[l + 1];
        let mut beta: f64 = 0.4;
        let burn = per_stage / 5;
        let mut accepted = 0usize;
        let mut inside = 0usize;
        let mut final_corr_acc = 0.0;
        let mut final_corr_cnt = 0usize;
        for sweep in 0..per_stage {
            let prop: Vec<f64> = coords
                .iter()
                .map(|&c| (1.0 - beta * beta).sqrt() * c + beta * std_normal.sample(rng))
                .collect();
            let sup = synth_sup(&prop, &mut path);
            if sup <= tube {
                coords = prop;
                std::mem::swap(&mut cur_path, &mut path);
                cur_sup = sup;
                accepted += 1;
            }
            if sweep < burn {
                // crude adaptation toward ~30% acceptance, frozen afterwards
                if sweep % 50 == 49 {
                    let rate = accepted as f64 / (sweep + 1) as f64;
                    if rate < 0.15 {
                        beta = (beta * 0.7).max(0.01);
                    } else if rate > 0.5 {
                        beta = (beta * 1.4).min(0.99);
                    }
                }
                continue;
            }
            if cur_sup <= next {
                inside += 1;
                if l + 1 == stages && k == 0 {
                    final_corr_acc += crossing_survival(&cur_path, next, h);
                    final_corr_cnt += 1;
                }
            }
        }
        let samples = per_stage - burn;
        if inside == 0 {
            return Ok(0.0);
        }
        log_p += (inside as f64 / samples as f64).ln();
        if l + 1 == stages && k == 0 && final_corr_cnt > 0 {
            log_p += (final_corr_acc / final_corr_cnt as f64).ln();
        }
    }
    Ok(log_p.exp())
}

/// Hellinger bound for log densities:
/// `d_H(p_v, p_w) <= ||v - w||_inf exp(||v - w||_inf / 2)`.
/// Returns `(lhs, rhs)`.
pub fn hellinger_log_density_bound_check(v: &GpPath, w: &GpPath) -> (f64, f64) {
    assert_eq!(v.grid_len(), w.grid_len(), "paths must share the grid");
    let pv = normalize_to_density(v);
    let pw = normalize_to_density(w);
    let lhs = pv.hellinger_distance(&pw);
    let gap = v.sup_diff(w);
    (lhs, gap * (gap / 2.0).exp())
}
