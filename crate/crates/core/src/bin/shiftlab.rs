//! Command-line laboratory for the randomly-shifted-curves model.
//!
//! Verbs: simulate | prior | posterior | distances | identifiability |
//! fano | contraction | report. Every run writes a manifest with the
//! resolved configuration and master seed; reruns are byte identical.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use num_complex::Complex64;
use rand::Rng;

use shiftlab::config::ExperimentConfig;
use shiftlab::density::ShiftDensity;
use shiftlab::distance::{check_lemma_f_bound, check_prop_g_bound, MarginalQuad};
use shiftlab::error::{Error, Result};
use shiftlab::fano;
use shiftlab::fourier::FourierSeries;
use shiftlab::identifiability;
use shiftlab::mcmc::{self, mass_within, run_chain, SampleRecord};
use shiftlab::model::{dataset_from_json, dataset_to_json, generate_dataset};
use shiftlab::prior::{
    sample_g_prior, sample_sieve_f, smallball_probability, smallball_probability_smc,
};
use shiftlab::report::{fmt_f64, write_json, CsvTable, LinePlot, Series, PALETTE};
use shiftlab::rng::substream;
use shiftlab::stats;

struct Args {
    verb: String,
    config: Option<PathBuf>,
    seed: Option<u64>,
    out: PathBuf,
    workers: Option<usize>,
    input: Option<PathBuf>,
}

fn parse_args() -> std::result::Result<Args, String> {
    let mut argv = std::env::args().skip(1);
    let verb = argv.next().ok_or_else(usage)?;
    let mut args = Args {
        verb,
        config: None,
        seed: None,
        out: PathBuf::from("out"),
        workers: None,
        input: None,
    };
    while let Some(flag) = argv.next() {
        let mut take = |name: &str| -> std::result::Result<String, String> {
            argv.next().ok_or(format!("flag {name} needs a value"))
        };
        match flag.as_str() {
            "--config" => args.config = Some(PathBuf::from(take("--config")?)),
            "--seed" => {
                args.seed = Some(
                    take("--seed")?
                        .parse()
                        .map_err(|e| format!("bad --seed: {e}"))?,
                )
            }
            "--out" => args.out = PathBuf::from(take("--out")?),
            "--workers" => {
                args.workers = Some(
                    take("--workers")?
                        .parse()
                        .map_err(|e| format!("bad --workers: {e}"))?,
                )
            }
            "--input" => args.input = Some(PathBuf::from(take("--input")?)),
            other => return Err(format!("unknown flag {other}\n{}", usage())),
        }
    }
    Ok(args)
}

fn usage() -> String {
    "usage: shiftlab <simulate|prior|posterior|distances|identifiability|fano|contraction|report> \
     [--config PATH] [--seed U64] [--out DIR] [--workers N] [--input PATH]"
        .to_string()
}

fn main() -> ExitCode {
    let args = match parse_args() {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // machine-readable error report on stderr
            let report = serde_json::json!({
                "error": e.to_string(),
                "exit_code": e.exit_code(),
            });
            eprintln!("{report}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(args: &Args) -> Result<()> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::from_json_str(&fs::read_to_string(path)?)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seeds.master = seed;
    }
    config.validate()?;
    if let Some(workers) = args.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    }
    fs::create_dir_all(&args.out)?;
    write_manifest(&args.out, &config)?;

    match args.verb.as_str() {
        "simulate" => cmd_simulate(&args.out, &config),
        "prior" => cmd_prior(&args.out, &config),
        "posterior" => cmd_posterior(&args.out, &config, args.input.as_deref()),
        "distances" => cmd_distances(&args.out, &config),
        "identifiability" => cmd_identifiability(&args.out, &config),
        "fano" => cmd_fano(&args.out, &config),
        "contraction" => cmd_contraction(&args.out, &config),
        "report" => cmd_report(&args.out, args.input.as_deref()),
        other => Err(Error::Config(format!("unknown verb {other}\n{}", usage()))),
    }
}

fn write_manifest(out: &Path, config: &ExperimentConfig) -> Result<()> {
    let manifest = serde_json::json!({
        "tool": "shiftlab",
        "seed": config.seeds.master,
        "config": serde_json::to_value(config)?,
    });
    write_json(&out.join("manifest.json"), &manifest)
}

fn cmd_simulate(out: &Path, config: &ExperimentConfig) -> Result<()> {
    let (f0, g0) = config.truth()?;
    let n = *config.model.n_grid.first().expect("validated nonempty");
    let data = generate_dataset(&f0, &g0, n, config.model.cutoff, config.seeds.master)?;
    if data.truncated {
        eprintln!(
            "warning: cutoff K={} drops nonzero truth frequencies",
            config.model.cutoff
        );
    }
    write_json(&out.join("dataset.json"), &dataset_to_json(&data))?;
    println!("simulate: wrote {} curves at K={}", data.len(), data.cutoff);
    Ok(())
}

fn cmd_prior(out: &Path, config: &ExperimentConfig) -> Result<()> {
    let seed = config.seeds.master;
    let spec = config.prior_spec(*config.model.n_grid.first().unwrap())?;

    // gallery of shape draws
    let mut shape_csv = CsvTable::new(seed, &["draw", "level", "theta1", "l2", "h1"]);
    let mut rng = substream(seed, "prior-shapes", 0);
    for draw in 0..200 {
        let f = sample_sieve_f(&spec.sieve, &mut rng);
        let norms = f.norms(config.model.s);
        shape_csv.row(&[
            draw.to_string(),
            f.cutoff().to_string(),
            fmt_f64(f.coeff(1).re),
            fmt_f64(norms.l2),
            fmt_f64(norms.h1),
        ]);
    }
    shape_csv.write(&out.join("prior_shapes.csv"))?;

    // density draws with their ball statistics
    let mut dens_csv = CsvTable::new(seed, &["draw", "sobolev_nu", "attempts", "min", "max"]);
    let mut densities = Vec::new();
    for draw in 0..20u64 {
        let mut r = substream(seed, "prior-densities", draw);
        let (g, _, attempts) = sample_g_prior(
            spec.nu,
            spec.ball_radius,
            spec.grid_len,
            spec.n_kl,
            spec.max_attempts,
            &mut r,
        )?;
        let min = g.values().iter().cloned().fold(f64::INFINITY, f64::min);
        let max = g.values().iter().cloned().fold(0.0, f64::max);
        dens_csv.row(&[
            draw.to_string(),
            fmt_f64(g.sobolev_seminorm(spec.nu)),
            attempts.to_string(),
            fmt_f64(min),
            fmt_f64(max),
        ]);
        if draw < 5 {
            densities.push(g.to_json());
        }
    }
    dens_csv.write(&out.join("prior_densities.csv"))?;
    write_json(
        &out.join("prior_density_gallery.json"),
        &serde_json::json!(densities),
    )?;

    // small-ball experiment
    let sb = &config.smallball;
    let mut sb_csv = CsvTable::new(seed, &["k", "epsilon", "reps", "p_hat", "stderr", "method"]);
    for (i, &eps) in sb.epsilons_k0.iter().enumerate() {
        let mut r = substream(seed, "smallball-k0", i as u64);
        let est = smallball_probability_smc(eps, sb.reps, sb.grid_len, &mut r)?;
        sb_csv.row(&[
            "0".into(),
            fmt_f64(eps),
            est.reps.to_string(),
            fmt_f64(est.p_hat),
            fmt_f64(est.stderr),
            "smc".into(),
        ]);
    }
    for (i, &eps) in sb.epsilons_k1.iter().enumerate() {
        let mut r = substream(seed, "smallball-k1", i as u64);
        let est = smallball_probability(1, eps, sb.reps, sb.n_kl, 256, &mut r)?;
        sb_csv.row(&[
            "1".into(),
            fmt_f64(eps),
            est.reps.to_string(),
            fmt_f64(est.p_hat),
            if est.censored {
                "nan".into()
            } else {
                fmt_f64(est.stderr)
            },
            "plain".into(),
        ]);
    }
    sb_csv.write(&out.join("smallball.csv"))?;
    println!("prior: wrote shape gallery, density gallery, smallball.csv");
    Ok(())
}

fn chain_csv(out: &Path, seed: u64, name: &str, records: &[SampleRecord]) -> Result<()> {
    let mut csv = CsvTable::new(
        seed,
        &[
            "iter",
            "level",
            "theta1",
            "dist_f",
            "dist_g",
            "dist_theta1",
            "hellinger",
        ],
    );
    for r in records {
        csv.row(&[
            r.iter.to_string(),
            r.level.to_string(),
            fmt_f64(r.theta1),
            fmt_f64(r.dist_f),
            fmt_f64(r.dist_g),
            fmt_f64(r.dist_theta1),
            fmt_f64(r.hellinger),
        ]);
    }
    csv.write(&out.join(name))
}

fn mass_table(records: &[SampleRecord]) -> serde_json::Value {
    let metrics: [(&str, fn(&SampleRecord) -> f64); 4] = [
        ("hellinger", |r| r.hellinger),
        ("dist_f", |r| r.dist_f),
        ("dist_g", |r| r.dist_g),
        ("dist_theta1", |r| r.dist_theta1),
    ];
    let radii: Vec<f64> = (0..=24).map(|i| 0.02 * 1.3f64.powi(i)).collect();
    let mut table = serde_json::Map::new();
    for (name, metric) in metrics {
        let curve: Vec<serde_json::Value> = radii
            .iter()
            .map(|&r| serde_json::json!({"radius": r, "mass": mass_within(records, metric, r)}))
            .collect();
        table.insert(name.to_string(), serde_json::json!(curve));
    }
    serde_json::Value::Object(table)
}

fn cmd_posterior(out: &Path, config: &ExperimentConfig, input: Option<&Path>) -> Result<()> {
    let seed = config.seeds.master;
    let data = match input {
        Some(path) => dataset_from_json(&serde_json::from_str(&fs::read_to_string(path)?)?)?,
        None => {
            let (f0, g0) = config.truth()?;
            let n = *config.model.n_grid.first().unwrap();
            generate_dataset(&f0, &g0, n, config.model.cutoff, seed)?
        }
    };
    let spec = config.prior_spec(data.len())?;
    let chain_cfg = config.chain_config();
    let (records, summary) = run_chain(&data, &spec, &chain_cfg, seed)?;
    chain_csv(out, seed, "chain.csv", &records)?;
    let summary_json = serde_json::json!({
        "summary": serde_json::to_value(&summary)?,
        "mass_within_radius": mass_table(&records),
        "mass_at_reference_radii": {
            "hellinger_within_eps_n": mass_within(&records, |r| r.hellinger, summary.eps_n),
            "dist_g_within_log_rate": mass_within(&records, |r| r.dist_g, summary.g_rate),
            "dist_theta1_within_cbrt_eps_n":
                mass_within(&records, |r| r.dist_theta1, summary.theta1_rate),
        },
    });
    write_json(&out.join("summary.json"), &summary_json)?;

    let mut series = Vec::new();
    let metrics: [(&str, fn(&SampleRecord) -> f64); 2] =
        [("hellinger", |r| r.hellinger), ("dist_g", |r| r.dist_g)];
    for (i, (name, metric)) in metrics.iter().enumerate() {
        let pts: Vec<(f64, f64)> = (0..=40)
            .map(|j| {
                let r = 0.02 * 1.2f64.powi(j);
                (r, mass_within(&records, *metric, r))
            })
            .collect();
        series.push(Series {
            label: name.to_string(),
            points: pts,
            color: PALETTE[i],
            dashed: false,
        });
    }
    LinePlot {
        title: "posterior mass within radius".into(),
        x_label: "radius (log scale)".into(),
        y_label: "posterior mass".into(),
        log_x: true,
        log_y: false,
        series,
    }
    .write(&out.join("mass_curve.svg"))?;
    println!(
        "posterior: {} samples, median hellinger {:.4}",
        records.len(),
        summary.median_hellinger
    );
    Ok(())
}

fn random_shape(cutoff: usize, rng: &mut shiftlab::rng::Stream) -> FourierSeries {
    let mut f = FourierSeries::zeros(cutoff);
    for l in -(cutoff as i64)..=cutoff as i64 {
        *f.coeff_mut(l) = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
    }
    let t1 = f.coeff(1).norm().max(0.3);
    *f.coeff_mut(1) = Complex64::new(t1, 0.0);
    f.refresh_identifiable();
    f
}

fn random_density(grid_len: usize, rng: &mut shiftlab::rng::Stream) -> ShiftDensity {
    let a1 = 0.8 * (rng.random::<f64>() - 0.5);
    let a2 = 0.6 * (rng.random::<f64>() - 0.5);
    let ph = rng.random::<f64>();
    let vals: Vec<f64> = (0..grid_len)
        .map(|i| {
            let t = i as f64 / grid_len as f64;
            let tau = 2.0 * std::f64::consts::PI * t;
            1.0 + a1 * tau.cos() + a2 * (2.0 * tau + ph).sin()
        })
        .collect();
    ShiftDensity::from_values(vals).expect("positive by construction")
}

fn cmd_distances(out: &Path, config: &ExperimentConfig) -> Result<()> {
    let seed = config.seeds.master;
    let cases = config.distances.suite_cases;
    let budget = config.distances.mc_budget;
    let mut csv = CsvTable::new(
        seed,
        &["case_id", "metric", "value", "stderr", "bound", "violated"],
    );
    let mut violations = 0usize;

    for case in 0..cases {
        let mut r = substream(seed, "lemma-f-case", case as u64);
        let k = 1 + (case % 3);
        let f = random_shape(k, &mut r);
        let f2 = random_shape(k, &mut r);
        let g = random_density(128, &mut r);
        let (tv, bound) = check_lemma_f_bound(&f, &f2, &g, budget, &mut r);
        let violated = tv.value > bound + 3.0 * tv.stderr;
        violations += violated as usize;
        csv.row(&[
            case.to_string(),
            "lemma_f_tv".into(),
            fmt_f64(tv.value),
            fmt_f64(tv.stderr),
            fmt_f64(bound),
            violated.to_string(),
        ]);
    }
    for case in 0..cases {
        let mut r = substream(seed, "prop-g-case", case as u64);
        let k = 1 + (case % 3);
        let f = random_shape(k, &mut r);
        let g = random_density(128, &mut r);
        let g2 = random_density(128, &mut r);
        let res = check_prop_g_bound(&f, &g, &g2, budget, &mut r);
        let chain_ok = res.tv <= res.w1_bound + 3.0 * res.tv_stderr
            && res.w1_bound <= res.tv_bound + 1e-12
            && res.tv_bound <= res.l2_bound + 1e-12;
        violations += (!chain_ok) as usize;
        csv.row(&[
            case.to_string(),
            "prop_g_chain".into(),
            fmt_f64(res.tv),
            fmt_f64(res.tv_stderr),
            fmt_f64(res.w1_bound),
            (!chain_ok).to_string(),
        ]);
    }
    csv.write(&out.join("bound_checks.csv"))?;
    if violations > 0 {
        return Err(Error::BudgetExhausted(format!(
            "{violations} bound violations; see bound_checks.csv"
        )));
    }
    println!("distances: {} cases, zero violations", 2 * cases);
    Ok(())
}

fn cmd_identifiability(out: &Path, config: &ExperimentConfig) -> Result<()> {
    let seed = config.seeds.master;
    let quad = MarginalQuad {
        radial: config.distances.quad_radial,
        angular: config.distances.quad_angular,
        mixture_nodes: config.distances.quad_mixture,
    };

    let mut bessel_csv = CsvTable::new(seed, &["n", "a", "series", "quadrature", "rel_err"]);
    for n in 0..=20u32 {
        for &a in &[0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
            let chk = shiftlab::bessel::cross_check(n, a, 4096)?;
            bessel_csv.row(&[
                n.to_string(),
                fmt_f64(a),
                fmt_f64(chk.series),
                fmt_f64(chk.quadrature),
                fmt_f64(chk.rel_err),
            ]);
        }
    }
    bessel_csv.write(&out.join("bessel_checks.csv"))?;

    let mut id_csv = CsvTable::new(seed, &["case", "lower_bound", "tv", "stderr", "ok"]);
    for (i, &theta1) in [0.5, 1.0, 2.0].iter().enumerate() {
        for n in (0..=30u32).step_by(5) {
            let v = identifiability::lower_bound_integral(n, theta1)?;
            id_csv.row(&[
                format!("integral_n{n}_theta{theta1}"),
                fmt_f64(v),
                "nan".into(),
                "nan".into(),
                (v > 0.0).to_string(),
            ]);
        }
        let mut r = substream(seed, "quadform", i as u64);
        let g = random_density(128, &mut r);
        let gt = random_density(128, &mut r);
        let (form, tv) = identifiability::check_quadratic_form_case(theta1, &g, &gt, 8, quad)?;
        id_csv.row(&[
            format!("quadform_theta{theta1}"),
            fmt_f64(form),
            fmt_f64(tv.value),
            fmt_f64(tv.stderr),
            (form <= tv.value + 1e-6).to_string(),
        ]);
    }
    let g = random_density(128, &mut substream(seed, "disk", 0));
    let gt = random_density(128, &mut substream(seed, "disk", 1));
    for eta in [0.05, 0.1, 0.2] {
        let rep = identifiability::theta1_disk_lower_bound(1.0 + eta, 1.0, &g, &gt, quad)?;
        id_csv.row(&[
            format!("disk_eta{eta}"),
            fmt_f64(rep.cubic_floor),
            fmt_f64(rep.measured_tv),
            "0".into(),
            (rep.measured_tv >= rep.cubic_floor).to_string(),
        ]);
    }
    id_csv.write(&out.join("identifiability_checks.csv"))?;
    println!("identifiability: wrote bessel_checks.csv, identifiability_checks.csv");
    Ok(())
}

fn cmd_fano(out: &Path, config: &ExperimentConfig) -> Result<()> {
    let seed = config.seeds.master;
    let p = config.fano.p;
    let net = fano::build_net(
        p,
        config.model.s,
        config.model.nu,
        config.fano.beta,
        config.model.ball_radius,
        (4 * (p + p / 4)).next_power_of_two().max(256),
    )?;
    let shapes: Vec<serde_json::Value> = net.shapes.iter().map(|f| f.to_json()).collect();
    let coeffs: Vec<serde_json::Value> = net
        .densities
        .iter()
        .map(|g| {
            let c: Vec<serde_json::Value> = (1..=(3 * p) as i64)
                .map(|q| {
                    let v = g.fourier_coeff(q);
                    serde_json::json!([q, v.re, v.im])
                })
                .collect();
            serde_json::json!(c)
        })
        .collect();
    write_json(
        &out.join("fano_net.json"),
        &serde_json::json!({
            "p": net.p, "s": net.s, "nu": net.nu, "beta": net.beta,
            "amplitude": net.amplitude,
            "shapes": shapes,
            "density_coefficients": coeffs,
        }),
    )?;

    let sep = fano::verify_separation(&net);
    let closeness = fano::verify_closeness(&net, config.fano.tv_budget, seed);
    let ablation = fano::closeness_ablation(&net, config.fano.tv_budget, seed + 1);
    let mut csv = CsvTable::new(seed, &["pair", "tv", "stderr"]);
    for pc in &closeness.pairs {
        csv.row(&[pc.pair.to_string(), fmt_f64(pc.tv), fmt_f64(pc.stderr)]);
    }
    csv.write(&out.join("fano_closeness.csv"))?;
    write_json(
        &out.join("fano_report.json"),
        &serde_json::json!({
            "separation": serde_json::to_value(&sep)?,
            "max_tv": closeness.max_tv,
            "max_tv_stderr": closeness.max_stderr,
            "ablation_max_tv": ablation.max_tv,
        }),
    )?;
    println!(
        "fano: p={p}, max tv {:.5}, ablation {:.5}",
        closeness.max_tv, ablation.max_tv
    );
    Ok(())
}

fn cmd_contraction(out: &Path, config: &ExperimentConfig) -> Result<()> {
    let seed = config.seeds.master;
    let (f0, g0) = config.truth()?;
    let mut csv = CsvTable::new(
        seed,
        &[
            "n",
            "chain",
            "median_hellinger",
            "median_theta1_err",
            "median_f_err",
            "median_g_err",
            "eps_n",
            "log_rate",
        ],
    );
    let mut med_h = Vec::new();
    let mut med_t = Vec::new();
    let mut med_g = Vec::new();
    let mut ns = Vec::new();
    for (i, &n) in config.model.n_grid.iter().enumerate() {
        let data =
            generate_dataset(&f0, &g0, n, config.model.cutoff, seed.wrapping_add(i as u64))?;
        let spec = config.prior_spec(n)?;
        let chain_cfg = config.chain_config();
        let mut h_meds = Vec::new();
        let mut t_meds = Vec::new();
        let mut g_meds = Vec::new();
        for chain in 0..config.mcmc.chains {
            let (records, summary) = run_chain(
                &data,
                &spec,
                &chain_cfg,
                seed.wrapping_add((1000 * (chain + 1)) as u64),
            )?;
            chain_csv(out, seed, &format!("chain_n{n}_c{chain}.csv"), &records)?;
            csv.row(&[
                n.to_string(),
                chain.to_string(),
                fmt_f64(summary.median_hellinger),
                fmt_f64(summary.median_theta1_err),
                fmt_f64(summary.median_f_err),
                fmt_f64(summary.median_g_err),
                fmt_f64(summary.eps_n),
                fmt_f64(summary.g_rate),
            ]);
            h_meds.push(summary.median_hellinger);
            t_meds.push(summary.median_theta1_err);
            g_meds.push(summary.median_g_err);
        }
        ns.push(n as f64);
        med_h.push(stats::mean(&h_meds));
        med_t.push(stats::mean(&t_meds));
        med_g.push(stats::mean(&g_meds));
    }
    csv.write(&out.join("contraction.csv"))?;

    let pair = |xs: &[f64], ys: &[f64]| -> Vec<(f64, f64)> {
        xs.iter().cloned().zip(ys.iter().cloned()).collect()
    };
    let eps_series: Vec<f64> = ns
        .iter()
        .map(|&n| mcmc::reference_eps_n(n as usize, config.model.s, config.model.nu))
        .collect();
    let log_series: Vec<f64> = ns.iter().map(|&n| n.ln().powf(-config.model.nu)).collect();
    LinePlot {
        title: "posterior contraction against sample size".into(),
        x_label: "n (log scale)".into(),
        y_label: "median distance (log scale)".into(),
        log_x: true,
        log_y: true,
        series: vec![
            Series {
                label: "hellinger to truth".into(),
                points: pair(&ns, &med_h),
                color: PALETTE[0],
                dashed: false,
            },
            Series {
                label: "density L2 error".into(),
                points: pair(&ns, &med_g),
                color: PALETTE[1],
                dashed: false,
            },
            Series {
                label: "theta1 error".into(),
                points: pair(&ns, &med_t),
                color: PALETTE[2],
                dashed: false,
            },
            Series {
                label: "eps_n reference".into(),
                points: pair(&ns, &eps_series),
                color: PALETTE[3],
                dashed: true,
            },
            Series {
                label: "log^-nu n reference".into(),
                points: pair(&ns, &log_series),
                color: PALETTE[4],
                dashed: true,
            },
        ],
    }
    .write(&out.join("contraction_loglog.svg"))?;
    LinePlot {
        title: "density error against log n".into(),
        x_label: "n (log scale)".into(),
        y_label: "median density error".into(),
        log_x: true,
        log_y: false,
        series: vec![
            Series {
                label: "density L2 error".into(),
                points: pair(&ns, &med_g),
                color: PALETTE[1],
                dashed: false,
            },
            Series {
                label: "log^-nu n reference".into(),
                points: pair(&ns, &log_series),
                color: PALETTE[4],
                dashed: true,
            },
        ],
    }
    .write(&out.join("contraction_semilog.svg"))?;
    println!("contraction: medians over n {ns:?}: hellinger {med_h:?}");
    Ok(())
}

fn cmd_report(out: &Path, input: Option<&Path>) -> Result<()> {
    let dir = input.ok_or_else(|| Error::Config("report needs --input DIR".into()))?;
    let text = fs::read_to_string(dir.join("contraction.csv"))
        .map_err(|_| Error::Config("report expects contraction.csv in --input".into()))?;
    let mut ns = Vec::new();
    let mut hs = Vec::new();
    for line in text.lines().skip(2) {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() >= 3 {
            ns.push(cells[0].parse::<f64>().unwrap_or(f64::NAN));
            hs.push(cells[2].parse::<f64>().unwrap_or(f64::NAN));
        }
    }
    LinePlot {
        title: "median hellinger by chain".into(),
        x_label: "n (log scale)".into(),
        y_label: "median hellinger (log scale)".into(),
        log_x: true,
        log_y: true,
        series: vec![Series {
            label: "chains".into(),
            points: ns.iter().cloned().zip(hs.iter().cloned()).collect(),
            color: PALETTE[0],
            dashed: false,
        }],
    }
    .write(&out.join("report_hellinger.svg"))?;
    println!("report: re-rendered plots from {}", dir.display());
    Ok(())
}
