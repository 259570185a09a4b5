//! The cosine-weighted exponential integral
//! `A_n(a) = int_0^{2 pi} exp(a cos u) cos(n u) du = 2 pi I_n(a)`,
//! where `I_n` is the modified Bessel function of the first kind, plus the
//! asymptotic-equivalent checks used by the identifiability experiments.

use serde::Serialize;

use crate::error::{Error, Result};

/// Overflow guard: `exp(a)` stays finite in f64 up to ~709.
pub const MAX_ARGUMENT: f64 = 700.0;

/// Modified Bessel function `I_n(a)` by the ascending series
/// `sum_k (a/2)^{2k+n} / (k! (k+n)!)`, stopped at relative 1e-15.
pub fn bessel_i(n: u32, a: f64) -> Result<f64> {
    if !(0.0..=MAX_ARGUMENT).contains(&a) {
        return Err(Error::Overflow(format!(
            "bessel argument {a} outside [0, {MAX_ARGUMENT}]"
        )));
    }
    if a == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let half = a / 2.0;
    // t_0 = (a/2)^n / n!, accumulated multiplicatively to avoid overflow
    let mut term = 1.0f64;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let mut sum = term;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= half * half / (k as f64 * (k + n) as f64);
        sum += term;
        if term < sum * 1e-15 || k > 10_000 {
            break;
        }
    }
    Ok(sum)
}

/// `A_n(a) = 2 pi I_n(a)`.
pub fn bessel_a(n: u32, a: f64) -> Result<f64> {
    Ok(2.0 * std::f64::consts::PI * bessel_i(n, a)?)
}

/// Exponential tail `sum_{k >= n} x^k / k!`. For `n = 0` this is `exp(x)`.
fn exp_tail(x: f64, n: u32) -> f64 {
    let mut term = 1.0f64;
    for k in 1..=n {
        term *= x / k as f64;
    }
    let mut sum = term;
    let mut max_mag = term.abs();
    let mut k = n as f64;
    for _ in 0..2000 {
        k += 1.0;
        term *= x / k;
        sum += term;
        max_mag = max_mag.max(term.abs());
        if term.abs() < 1e-20 * max_mag.max(sum.abs()) {
            break;
        }
    }
    sum
}

/// Direct periodic trapezoid quadrature of the defining integral; the
/// independent cross-check for the series path.
///
/// The Taylor head `sum_{k < n} (a cos u)^k / k!` carries only frequencies
/// below `n`, so on the discrete grid it integrates to exactly zero against
/// `cos(n u)`. Dropping it before quadrature removes the catastrophic
/// cancellation that otherwise buries small values of `A_n` under rounding
/// noise; the sum itself is compensated (Neumaier).
pub fn bessel_a_quadrature(n: u32, a: f64, nodes: usize) -> Result<f64> {
    if !(0.0..=MAX_ARGUMENT).contains(&a) {
        return Err(Error::Overflow(format!(
            "bessel argument {a} outside [0, {MAX_ARGUMENT}]"
        )));
    }
    assert!(nodes > 2 * n as usize + 2, "grid must resolve frequency n");
    let mut acc = 0.0f64;
    let mut comp = 0.0f64;
    for q in 0..nodes {
        let u = 2.0 * std::f64::consts::PI * q as f64 / nodes as f64;
        let term = exp_tail(a * u.cos(), n) * (n as f64 * u).cos();
        let t = acc + term;
        if acc.abs() >= term.abs() {
            comp += (acc - t) + term;
        } else {
            comp += (term - t) + acc;
        }
        acc = t;
    }
    Ok((acc + comp) * 2.0 * std::f64::consts::PI / nodes as f64)
}

/// Coefficient of `a^n` in the series of `A_n`; `n!` times it is the n-th
/// derivative at zero, equal to `2^{1-n} pi`.
pub fn series_leading_coefficient(n: u32) -> f64 {
    let mut fact = 1.0f64;
    for k in 1..=n {
        fact *= k as f64;
    }
    2.0 * std::f64::consts::PI * 0.5f64.powi(n as i32) / fact
}

/// n-th derivative of `A_n` at zero: `n!` times the leading series
/// coefficient `2 pi / (2^n n!)`; the factorial cancels algebraically,
/// leaving `2^{1-n} pi` exactly.
pub fn nth_derivative_at_zero(n: u32) -> f64 {
    2.0 * std::f64::consts::PI * 0.5f64.powi(n as i32)
}

/// Verification row for one `(n, a)` pair: series value, quadrature value,
/// and their relative gap.
#[derive(Debug, Clone, Serialize)]
pub struct BesselCheck {
    pub n: u32,
    pub a: f64,
    pub series: f64,
    pub quadrature: f64,
    pub rel_err: f64,
}

pub fn cross_check(n: u32, a: f64, nodes: usize) -> Result<BesselCheck> {
    let series = bessel_a(n, a)?;
    let quadrature = bessel_a_quadrature(n, a, nodes)?;
    let scale = series.abs().max(quadrature.abs()).max(1e-300);
    Ok(BesselCheck {
        n,
        a,
        series,
        quadrature,
        rel_err: (series - quadrature).abs() / scale,
    })
}

/// Table of `A_n(a)` over `n = 0..=n_max` on a grid of arguments.
#[derive(Debug, Clone)]
pub struct BesselTable {
    pub n_max: u32,
    pub arguments: Vec<f64>,
    /// `values[n][i] = A_n(arguments[i])`
    pub values: Vec<Vec<f64>>,
}

impl BesselTable {
    pub fn build(n_max: u32, arguments: &[f64]) -> Result<BesselTable> {
        let mut values = Vec::with_capacity(n_max as usize + 1);
        for n in 0..=n_max {
            let row = arguments
                .iter()
                .map(|&a| bessel_a(n, a))
                .collect::<Result<Vec<f64>>>()?;
            values.push(row);
        }
        Ok(BesselTable {
            n_max,
            arguments: arguments.to_vec(),
            values,
        })
    }
}

/// The two equivalent ratios of the appendix: the small-argument form
/// `A_n(a) / (2 pi (a/2)^n / n!)` (valid for `a <= sqrt n`, deviation
/// `O(a/n)`) and the large-argument form `A_n(a) sqrt(2 pi a) / (2 pi e^a)`
/// (at least 1/2 once `a >= 4 n^2`).
pub fn equivalents_check(n: u32, a: f64) -> Result<(f64, f64)> {
    let value = bessel_a(n, a)?;
    let mut fact = 1.0f64;
    for k in 1..=n {
        fact *= k as f64;
    }
    let small_ref = 2.0 * std::f64::consts::PI * (a / 2.0).powi(n as i32) / fact;
    let ratio_small = if small_ref > 0.0 { value / small_ref } else { f64::NAN };
    let large_ref = 2.0 * std::f64::consts::PI * a.exp() / (2.0 * std::f64::consts::PI * a).sqrt();
    let ratio_large = value / large_ref;
    Ok((ratio_small, ratio_large))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn boundary_values() {
        assert!((bessel_a(0, 0.0).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert_eq!(bessel_a(3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn a1_of_one_matches_reference() {
        // 2 pi I_1(1), I_1(1) = 0.5651591039924850 (series summed to machine precision)
        let v = bessel_a(1, 1.0).unwrap();
        assert!((v - 2.0 * PI * 0.565_159_103_992_485).abs() < 1e-12);
        assert!((v - 3.550_999_378_481_437).abs() < 1e-5);
    }

    #[test]
    fn series_agrees_with_quadrature_over_grid() {
        for n in 0..=20u32 {
            for &a in &[0.1, 0.5, 1.0, 2.5, 5.0, 10.0] {
                let chk = cross_check(n, a, 4096).unwrap();
                assert!(
                    chk.rel_err < 1e-10,
                    "n={n} a={a} rel={}",
                    chk.rel_err
                );
            }
        }
    }

    #[test]
    fn nth_derivative_at_zero_is_two_to_one_minus_n_pi() {
        for n in 0..=12u32 {
            let expect = 2.0f64.powi(1 - n as i32) * PI;
            assert_eq!(nth_derivative_at_zero(n), expect, "n={n}");
            // the uncancelled route agrees to rounding
            let mut fact = 1.0f64;
            for k in 1..=n {
                fact *= k as f64;
            }
            let via_coeff = series_leading_coefficient(n) * fact;
            assert!((via_coeff / expect - 1.0).abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn leading_coefficient_matches_small_a_limit() {
        for n in [1u32, 3, 6, 10] {
            let a: f64 = 1e-4;
            let lead = series_leading_coefficient(n) * a.powi(n as i32);
            let v = bessel_a(n, a).unwrap();
            assert!((v / lead - 1.0).abs() < 1e-6, "n={n}");
        }
    }

    #[test]
    fn small_argument_ratio_within_envelope() {
        for &n in &[4u32, 9, 16, 25] {
            let mut a = 0.1;
            while a <= (n as f64).sqrt() {
                let (small, _) = equivalents_check(n, a).unwrap();
                assert!(
                    (small - 1.0).abs() <= 2.0 * a / n as f64,
                    "n={n} a={a} ratio={small}"
                );
                a += 0.3;
            }
        }
    }

    #[test]
    fn large_argument_ratio_at_least_half() {
        let (_, large) = equivalents_check(1, 16.0).unwrap();
        assert!(large >= 0.5, "ratio={large}");
        let (_, large) = equivalents_check(2, 17.0).unwrap();
        assert!(large >= 0.5, "ratio={large}");
    }

    #[test]
    fn large_argument_ratio_trends_to_one() {
        let grid = [16.0, 64.0, 256.0, 700.0];
        let ratios: Vec<f64> = grid
            .iter()
            .map(|&a| equivalents_check(1, a).unwrap().1)
            .collect();
        for w in ratios.windows(2) {
            assert!(w[1] >= w[0], "not monotone: {ratios:?}");
        }
        // leading correction is -3/(8a), about 5.4e-4 at the cap
        assert!((ratios[3] - 1.0).abs() < 1e-3, "ratio at 700: {}", ratios[3]);
    }

    #[test]
    fn overflow_guard() {
        assert!(bessel_a(0, 701.0).is_err());
        // at the guard the series still sums without overflow
        assert!(bessel_a(0, 700.0).unwrap().is_finite());
    }
}
