//! Detailed-balance smoke tests on frozen tiny state spaces: long chains
//! must reproduce known stationary marginals to small total variation.

use num_complex::Complex64;

use shiftlab::config::{scenario_density, scenario_shape};
use shiftlab::mcmc::{init_chain, step_f, ChainConfig, ChainContext, PriorSpec};
use shiftlab::model::{generate_dataset, CurveObservation, Dataset};
use shiftlab::prior::SievePriorConfig;
use shiftlab::rng::substream;
use shiftlab::stats::normal_cdf;

fn binned_tv(samples: &[f64], edges: &[f64], exact_mass: impl Fn(f64, f64) -> f64) -> f64 {
    let n = samples.len() as f64;
    let mut tv = 0.0;
    let mut covered = 0.0;
    for w in edges.windows(2) {
        let count = samples.iter().filter(|&&x| x >= w[0] && x < w[1]).count() as f64;
        let exact = exact_mass(w[0], w[1]);
        covered += exact;
        tv += (count / n - exact).abs();
    }
    // leftover mass outside the binned range
    let outside = samples
        .iter()
        .filter(|&&x| x < edges[0] || x >= *edges.last().unwrap())
        .count() as f64;
    tv += (outside / n - (1.0 - covered)).abs();
    0.5 * tv
}

/// Constant likelihood: theta1 visits must follow the half-normal prior,
/// with birth/death moves running throughout.
#[test]
fn theta1_marginal_matches_half_normal_prior() {
    let prior = PriorSpec {
        sieve: SievePriorConfig::new(100.0, 1.5, 0.3, 3).unwrap(),
        nu: 1.6,
        ball_radius: 2.0,
        grid_len: 64,
        n_kl: 32,
        max_attempts: 1000,
    };
    let config = ChainConfig {
        constant_likelihood: true,
        ..ChainConfig::default()
    };
    let f0 = scenario_shape(1.0, 1);
    let g0 = scenario_density(64);
    let data = generate_dataset(&f0, &g0, 2, 1, 3).unwrap();
    let ctx = ChainContext::new(&data, &prior, &config);
    let mut rng = substream(71, "stationarity-prior", 0);
    let mut state = init_chain(&ctx, &mut rng).unwrap();

    let steps = 1_000_000;
    let mut samples = Vec::with_capacity(steps / 10);
    for sweep in 0..steps {
        step_f(&ctx, &mut state, &mut rng).unwrap();
        if sweep % 10 == 0 {
            samples.push(state.f.coeff(1).re);
        }
    }
    let xi = prior.sieve.xi_squared().sqrt();
    let edges: Vec<f64> = (0..=20).map(|i| 3.0 * xi * i as f64 / 20.0).collect();
    let tv = binned_tv(&samples, &edges, |a, b| {
        // half-normal mass on [a, b)
        2.0 * (normal_cdf(b / xi) - normal_cdf(a / xi))
    });
    assert!(tv < 0.02, "TV gap to the half-normal prior: {tv}");
}

/// One curve observed at frequency zero only: the posterior of theta_0 is an
/// explicit complex Gaussian, and the chain must reproduce it.
#[test]
fn theta0_posterior_matches_analytic_gaussian() {
    let y0 = Complex64::new(0.8, -0.3);
    let data = Dataset {
        curves: vec![CurveObservation {
            y: vec![y0],
            hidden_shift: None,
            noise_level: 1.0,
        }],
        truth: None,
        seed: 0,
        cutoff: 0,
        truncated: false,
    };
    let prior = PriorSpec {
        sieve: SievePriorConfig::new(20.0, 1.5, 2.0, 2).unwrap(),
        nu: 1.6,
        ball_radius: 2.0,
        grid_len: 64,
        n_kl: 32,
        max_attempts: 1000,
    };
    let config = ChainConfig::default();
    let ctx = ChainContext::new(&data, &prior, &config);
    let mut rng = substream(72, "stationarity-post", 0);
    let mut state = init_chain(&ctx, &mut rng).unwrap();

    let steps = 1_000_000;
    let mut samples = Vec::with_capacity(steps / 10);
    for sweep in 0..steps {
        step_f(&ctx, &mut state, &mut rng).unwrap();
        if sweep % 10 == 0 {
            samples.push(state.f.coeff(0).re);
        }
    }
    // prior N_C(0, xi^2) times likelihood exp(-|y - theta|^2):
    // posterior N_C(y xi^2/(1+xi^2), xi^2/(1+xi^2)), each real part with
    // half that variance
    let xi2 = prior.sieve.xi_squared();
    let shrink = xi2 / (1.0 + xi2);
    let mean = y0.re * shrink;
    let sd = (shrink / 2.0).sqrt();
    let edges: Vec<f64> = (0..=20)
        .map(|i| mean - 4.0 * sd + 8.0 * sd * i as f64 / 20.0)
        .collect();
    let tv = binned_tv(&samples, &edges, |a, b| {
        normal_cdf((b - mean) / sd) - normal_cdf((a - mean) / sd)
    });
    assert!(tv < 0.02, "TV gap to the analytic posterior: {tv}");
}
