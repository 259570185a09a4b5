//! Computable pieces of the identifiability analysis: the positive integrals
//! that weight Fourier gaps of the shift density, the quadratic-form lower
//! bound on the first-frequency marginal TV, and the explicit disk bounds
//! for the first coefficient and for pure phase gaps at higher frequencies.

use num_complex::Complex64;
use serde::Serialize;

use crate::bessel::bessel_a;
use crate::density::ShiftDensity;
use crate::distance::{tv_marginal, DistanceEstimate, MarginalQuad, MixtureLaw};
use crate::error::{Error, Result};
use crate::fourier::FourierSeries;

/// `I_n(theta1) = int_0^inf rho e^{-(rho+theta1)^2} A_n(2 rho theta1)^2 drho`,
/// strictly positive for every `n`; the identifiability weight of the n-th
/// Fourier gap.
pub fn lower_bound_integral(n: u32, theta1: f64) -> Result<f64> {
    if !(theta1 > 0.0 && theta1 <= 10.0) {
        return Err(Error::Precondition(format!(
            "theta1 = {theta1} outside (0, 10]"
        )));
    }
    // cover both the Gaussian bump near rho = theta1 and the small-theta1
    // regime; the integrand is below 1e-16 of its peak beyond this cap
    let rho_max = (40.0 / theta1).max(theta1 + 12.0);
    let integrand = |rho: f64| -> f64 {
        let a = bessel_a(n, (2.0 * rho * theta1).min(crate::bessel::MAX_ARGUMENT))
            .expect("argument capped");
        rho * (-(rho + theta1) * (rho + theta1)).exp() * a * a
    };
    // composite Simpson with doubling until relative 1e-12
    let mut nodes = 512usize;
    let mut prev = simpson(&integrand, 0.0, rho_max, nodes);
    loop {
        nodes *= 2;
        let next = simpson(&integrand, 0.0, rho_max, nodes);
        if (next - prev).abs() <= 1e-12 * next.abs() || nodes >= 1 << 20 {
            return Ok(next);
        }
        prev = next;
    }
}

fn simpson(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, nodes: usize) -> f64 {
    let n = nodes + nodes % 2; // even interval count
    let h = (hi - lo) / n as f64;
    let mut acc = f(lo) + f(hi);
    for i in 1..n {
        let x = lo + h * i as f64;
        acc += if i % 2 == 1 { 4.0 * f(x) } else { 2.0 * f(x) };
    }
    acc * h / 3.0
}

/// The quadratic-form lower bound on the first-frequency marginal TV:
/// `(1 / 8 pi^2) sum_{|n| <= cap} |c_n(g - g~)|^2 I_{|n|}(theta1)`.
pub fn quadratic_form(
    theta1: f64,
    g: &ShiftDensity,
    g_tilde: &ShiftDensity,
    freq_cap: u32,
) -> Result<f64> {
    if theta1 <= 0.0 {
        return Err(Error::Precondition("theta1 must be positive".into()));
    }
    let mut integrals = Vec::with_capacity(freq_cap as usize + 1);
    for n in 0..=freq_cap {
        integrals.push(lower_bound_integral(n, theta1)?);
    }
    let mut acc = 0.0;
    for n in -(freq_cap as i64)..=freq_cap as i64 {
        let gap = (g.fourier_coeff(n) - g_tilde.fourier_coeff(n)).norm_sqr();
        acc += gap * integrals[n.unsigned_abs() as usize];
    }
    Ok(acc / (8.0 * std::f64::consts::PI * std::f64::consts::PI))
}

/// Disk bound for the first coefficient: integrating the mixture gap over
/// the disk of radius `|theta1 - theta1_0| / 4` gives the explicit floor
/// `eta^2/32 * |e^{-(3 lo + hi)^2/16} - e^{-(3 hi + lo)^2/16}|`, cubic in
/// the gap, valid for every pair of shift densities.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiskBound {
    pub measured_tv: f64,
    pub cubic_floor: f64,
}

pub fn theta1_disk_lower_bound(
    theta1: f64,
    theta1_0: f64,
    g: &ShiftDensity,
    g_tilde: &ShiftDensity,
    quad: MarginalQuad,
) -> Result<DiskBound> {
    let eta = (theta1 - theta1_0).abs();
    if !(eta > 0.0 && eta < theta1_0 / 2.0 && theta1 > 0.0) {
        return Err(Error::Precondition(format!(
            "need 0 < |theta1 - theta1_0| < theta1_0/2, got {theta1} vs {theta1_0}"
        )));
    }
    let lo = theta1.min(theta1_0);
    let hi = theta1.max(theta1_0);
    let big = (-(3.0 * lo + hi) * (3.0 * lo + hi) / 16.0).exp();
    let small = (-(3.0 * hi + lo) * (3.0 * hi + lo) / 16.0).exp();
    let cubic_floor = eta * eta / 32.0 * (big - small);
    let fa = FourierSeries::from_pairs(1, &[(1, Complex64::new(theta1, 0.0))])?;
    let fb = FourierSeries::from_pairs(1, &[(1, Complex64::new(theta1_0, 0.0))])?;
    let measured = tv_marginal(
        1,
        &MixtureLaw::new(fa, g.clone()),
        &MixtureLaw::new(fb, g_tilde.clone()),
        quad,
    );
    Ok(DiskBound {
        measured_tv: measured.value,
        cubic_floor,
    })
}

/// Default region radius of the phase-gap bound.
pub const PHASE_REGION_RADIUS: f64 = 0.25;

/// Calibrated multiplicative constant of the phase-gap floor. The reference
/// case is `k = 1`, `|theta_k| = 1`, phase gap pi/2, density
/// `1 + 0.5 cos(2 pi tau)`; see [`calibrate_phase_constant`]. The shipped
/// value is that calibration divided by two.
pub const PHASE_CONSTANT: f64 = 39.3318;

/// Re-derive the phase constant from the reference case by quadrature:
/// `c = tv / (eta^3 e^{-|theta|^2} |c_{-k}(g)| |theta - theta0|)`.
pub fn calibrate_phase_constant(quad: MarginalQuad) -> f64 {
    let m = 256;
    let vals: Vec<f64> = (0..m)
        .map(|i| 1.0 + 0.5 * (2.0 * std::f64::consts::PI * i as f64 / m as f64).cos())
        .collect();
    let g = ShiftDensity::from_values(vals).expect("reference density");
    let theta0 = Complex64::new(1.0, 0.0);
    let theta = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_2);
    let r = phase_bound_raw(1, theta, theta0, &g, quad).expect("reference case is identifiable");
    let eta3 = PHASE_REGION_RADIUS.powi(3);
    let denom = eta3 * (-theta0.norm_sqr()).exp() * g.fourier_coeff(-1).norm() * (theta - theta0).norm();
    r.measured_tv / denom
}

/// Phase-gap lower bound at frequency `k`: for `|theta_k| = |theta_k^0|`,
/// `tv >= c eta^3 e^{-|theta0|^2} |c_{-k}(g0)| |theta_k - theta_k^0|`.
/// A vanishing `c_{-k}(g0)` is the non-identifiable direction: the floor is
/// zero and (for uniform g) so is the measured TV.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhaseBound {
    pub measured_tv: f64,
    pub linear_floor: f64,
    /// False when `c_{-k}(g0)` vanishes (phase not identifiable from this
    /// marginal).
    pub identifiable: bool,
}

pub fn thetak_phase_lower_bound(
    k: i64,
    theta_k: Complex64,
    theta_k0: Complex64,
    g0: &ShiftDensity,
    quad: MarginalQuad,
) -> Result<PhaseBound> {
    if (theta_k.norm() - theta_k0.norm()).abs() > 1e-12 * theta_k0.norm().max(1.0) {
        return Err(Error::Precondition(
            "phase bound needs |theta_k| = |theta_k0|".into(),
        ));
    }
    phase_bound_raw(k, theta_k, theta_k0, g0, quad)
}

fn phase_bound_raw(
    k: i64,
    theta_k: Complex64,
    theta_k0: Complex64,
    g0: &ShiftDensity,
    quad: MarginalQuad,
) -> Result<PhaseBound> {
    let c_minus_k = g0.fourier_coeff(-k).norm();
    let identifiable = c_minus_k > 1e-12;
    let cutoff = k.unsigned_abs() as usize;
    let fa = FourierSeries::from_pairs(cutoff, &[(k, theta_k)])?;
    let fb = FourierSeries::from_pairs(cutoff, &[(k, theta_k0)])?;
    let measured = tv_marginal(
        k,
        &MixtureLaw::new(fa, g0.clone()),
        &MixtureLaw::new(fb, g0.clone()),
        quad,
    );
    let eta3 = PHASE_REGION_RADIUS.powi(3);
    let linear_floor = if identifiable {
        PHASE_CONSTANT
            * eta3
            * (-theta_k0.norm_sqr()).exp()
            * c_minus_k
            * (theta_k - theta_k0).norm()
    } else {
        0.0
    };
    Ok(PhaseBound {
        measured_tv: measured.value,
        linear_floor,
        identifiable,
    })
}

/// CSV row of the identifiability report.
#[derive(Debug, Clone, Serialize)]
pub struct IdentifiabilityRow {
    pub case: String,
    pub lower_bound: f64,
    pub tv: f64,
    pub stderr: f64,
    pub ok: bool,
}

/// Check `quadratic_form <= tv_marginal(1)` for one pair.
pub fn check_quadratic_form_case(
    theta1: f64,
    g: &ShiftDensity,
    g_tilde: &ShiftDensity,
    freq_cap: u32,
    quad: MarginalQuad,
) -> Result<(f64, DistanceEstimate)> {
    let form = quadratic_form(theta1, g, g_tilde, freq_cap)?;
    let f = FourierSeries::from_pairs(1, &[(1, Complex64::new(theta1, 0.0))])?;
    let tv = tv_marginal(
        1,
        &MixtureLaw::new(f.clone(), g.clone()),
        &MixtureLaw::new(f, g_tilde.clone()),
        quad,
    );
    Ok((form, tv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::stats::regression_slope;
    use rand::Rng;

    fn cos_density(m: usize, amp: f64, freq: i64) -> ShiftDensity {
        let vals: Vec<f64> = (0..m)
            .map(|i| {
                1.0 + amp * (2.0 * std::f64::consts::PI * freq as f64 * i as f64 / m as f64).cos()
            })
            .collect();
        ShiftDensity::from_values(vals).unwrap()
    }

    #[test]
    fn integrals_strictly_positive() {
        for &theta1 in &[0.5, 1.0, 2.0] {
            for n in (0..=30).step_by(6) {
                let v = lower_bound_integral(n, theta1).unwrap();
                assert!(v > 0.0, "I_{n}({theta1}) = {v}");
            }
        }
    }

    #[test]
    fn integral_matches_riemann_oracle() {
        let exact = lower_bound_integral(0, 1.0).unwrap();
        // brute force: 10^6-node midpoint Riemann sum on the same domain
        let rho_max = 40.0;
        let n = 1_000_000;
        let h = rho_max / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let rho = (i as f64 + 0.5) * h;
            let a = bessel_a(0, 2.0 * rho).unwrap();
            acc += rho * (-(rho + 1.0) * (rho + 1.0)).exp() * a * a;
        }
        acc *= h;
        assert!(
            (exact - acc).abs() < 1e-8 * acc,
            "simpson={exact} riemann={acc}"
        );
    }

    #[test]
    fn log_integral_decays_superlinearly_in_n() {
        let mut ns = Vec::new();
        let mut logs = Vec::new();
        for n in 2..=30u32 {
            ns.push(n as f64 * (n as f64).ln());
            logs.push(lower_bound_integral(n, 1.0).unwrap().ln());
        }
        let slope = regression_slope(&ns, &logs);
        assert!(slope < -0.5, "slope vs n log n: {slope}");
    }

    #[test]
    fn quadratic_form_zero_and_single_mode() {
        let g = cos_density(128, 0.3, 1);
        assert_eq!(quadratic_form(1.0, &g, &g, 8).unwrap(), 0.0);

        // g - g~ = 0.2 cos(2 pi t): gaps at +-1 of modulus 0.1
        let a = cos_density(128, 0.3, 1);
        let b = cos_density(128, 0.1, 1);
        let form = quadratic_form(1.0, &a, &b, 4).unwrap();
        let i1 = lower_bound_integral(1, 1.0).unwrap();
        let expect = 2.0 * 0.01 * i1 / (8.0 * std::f64::consts::PI.powi(2));
        assert!((form - expect).abs() < 1e-12 * expect.max(1e-300));
    }

    #[test]
    fn quadratic_form_bounds_marginal_tv() {
        for case in 0..8u64 {
            let mut r = rng::substream(21, "quadform", case);
            let theta1 = 0.5 + 1.5 * r.random::<f64>();
            let a1 = 0.6 * r.random::<f64>();
            let a2 = 0.6 * r.random::<f64>();
            let g = cos_density(128, a1, 1);
            let gt = cos_density(128, a2, 2);
            let (form, tv) =
                check_quadratic_form_case(theta1, &g, &gt, 8, MarginalQuad::default()).unwrap();
            assert!(
                form <= tv.value + 1e-6,
                "case {case}: form={form} tv={}",
                tv.value
            );
        }
    }

    #[test]
    fn disk_bound_holds_and_tv_shrinks_at_most_cubically() {
        let g = cos_density(128, 0.4, 1);
        let gt = cos_density(128, 0.2, 1);
        let mut etas = Vec::new();
        let mut tvs = Vec::new();
        for eta in [0.05, 0.1, 0.2] {
            let r =
                theta1_disk_lower_bound(1.0 + eta, 1.0, &g, &gt, MarginalQuad::default()).unwrap();
            assert!(
                r.measured_tv >= r.cubic_floor,
                "eta={eta}: tv={} floor={}",
                r.measured_tv,
                r.cubic_floor
            );
            etas.push(eta.ln());
            tvs.push(r.measured_tv.ln());
        }
        let slope = regression_slope(&etas, &tvs);
        assert!(slope <= 3.0 + 0.1, "log-log slope {slope}");
    }

    #[test]
    fn disk_bound_rejects_bad_gaps() {
        let g = ShiftDensity::uniform(64);
        assert!(theta1_disk_lower_bound(1.0, 1.0, &g, &g, MarginalQuad::default()).is_err());
        assert!(theta1_disk_lower_bound(1.8, 1.0, &g, &g, MarginalQuad::default()).is_err());
    }

    #[test]
    fn phase_bound_reference_calibration_matches_shipped_constant() {
        let c = calibrate_phase_constant(MarginalQuad::default());
        assert!(
            (PHASE_CONSTANT - c / 2.0).abs() < 2e-3 * c,
            "shipped {PHASE_CONSTANT} vs calibrated/2 {}",
            c / 2.0
        );
    }

    #[test]
    fn phase_bound_uniform_g_is_degenerate() {
        let g = ShiftDensity::uniform(256);
        let theta0 = Complex64::new(1.0, 0.0);
        let theta = Complex64::from_polar(1.0, 0.7);
        let r = thetak_phase_lower_bound(1, theta, theta0, &g, MarginalQuad::default()).unwrap();
        assert!(!r.identifiable);
        assert_eq!(r.linear_floor, 0.0);
        assert!(r.measured_tv < 1e-10, "tv={}", r.measured_tv);
    }

    #[test]
    fn phase_bound_identical_coefficients_vanish() {
        let g = cos_density(128, 0.5, 1);
        let theta0 = Complex64::new(1.0, 0.0);
        let r = thetak_phase_lower_bound(1, theta0, theta0, &g, MarginalQuad::default()).unwrap();
        assert_eq!(r.linear_floor, 0.0);
        assert!(r.measured_tv < 1e-12);
    }

    #[test]
    fn phase_bound_holds_on_reference_grid() {
        let g = cos_density(256, 0.5, 1);
        let theta0 = Complex64::new(1.0, 0.0);
        for gap in [0.4, std::f64::consts::FRAC_PI_4, 1.2] {
            let theta = Complex64::from_polar(1.0, gap);
            let r =
                thetak_phase_lower_bound(1, theta, theta0, &g, MarginalQuad::default()).unwrap();
            assert!(r.identifiable);
            assert!(
                r.measured_tv >= r.linear_floor,
                "gap={gap}: tv={} floor={}",
                r.measured_tv,
                r.linear_floor
            );
        }
    }

    #[test]
    fn uniform_g_marginal_is_phase_invariant_grid_exact() {
        // with uniform shifts the k-th marginal is invariant under rotating
        // theta_k by a node-aligned phase
        let g = ShiftDensity::uniform(128);
        let theta = Complex64::new(0.9, 0.0);
        let f1 = FourierSeries::from_pairs(1, &[(1, theta)]).unwrap();
        let rot = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 5.0 / 128.0);
        let f2 = FourierSeries::from_pairs(1, &[(1, theta * rot)]).unwrap();
        let tv = tv_marginal(
            1,
            &MixtureLaw::new(f1, g.clone()),
            &MixtureLaw::new(f2, g),
            MarginalQuad::default(),
        );
        assert!(tv.value < 1e-12, "tv = {}", tv.value);
    }
}
