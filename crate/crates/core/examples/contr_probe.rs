use num_complex::Complex64;
use shiftlab::config::scenario_density;
use shiftlab::fourier::FourierSeries;
use shiftlab::mcmc::{run_chain, ChainConfig, PriorSpec};
use shiftlab::model::generate_dataset;
use shiftlab::prior::SievePriorConfig;

fn shape(theta1: f64, amp: f64) -> FourierSeries {
    let mut f = FourierSeries::zeros(4);
    *f.coeff_mut(0) = Complex64::new(0.15, 0.0);
    *f.coeff_mut(1) = Complex64::new(theta1, 0.0);
    *f.coeff_mut(-1) = Complex64::from_polar(0.45 * theta1, 0.7);
    for l in 2..=4i64 {
        let a = amp * (l as f64).powf(-1.5);
        *f.coeff_mut(l) = Complex64::from_polar(a, 0.9 * l as f64);
        *f.coeff_mut(-l) = Complex64::from_polar(0.8 * a, -1.3 * l as f64);
    }
    f.refresh_identifiable();
    f
}

fn main() {
    let g0 = scenario_density(256);
    for (label, f0) in [("A: theta1=0.9", shape(0.9, 0.55)), ("B: theta1=0.55", shape(0.55, 0.3))] {
        for seed in [700u64, 900, 1100] {
            let mut meds = vec![];
            for n in [25usize, 100, 400] {
                let data = generate_dataset(&f0, &g0, n, 4, seed).unwrap();
                let prior = PriorSpec {
                    sieve: SievePriorConfig::new(n as f64, 1.5, 1.0, 8).unwrap(),
                    nu: 1.6,
                    ball_radius: 2.0,
                    grid_len: 256,
                    n_kl: 256,
                    max_attempts: 1000,
                };
                let (_, s) = run_chain(&data, &prior, &ChainConfig::default(), seed + 7).unwrap();
                meds.push((s.median_hellinger, s.median_theta1_err, s.median_g_err));
            }
            let dec = |i: usize| -> String {
                let v: Vec<f64> = meds.iter().map(|m| [m.0, m.1, m.2][i]).collect();
                let ok = v.windows(2).all(|w| w[1] < w[0]);
                format!("{v:.3?} {}", if ok { "OK" } else { "VIOLATED" })
            };
            println!("{label} seed={seed}:");
            println!("  hellinger {}", dec(0));
            println!("  theta1    {}", dec(1));
            println!("  dist_g    {}", dec(2));
        }
    }
}
