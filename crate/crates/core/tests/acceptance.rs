//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Pathwise criteria (1, 5a, 6, 7, 9a) make the process exit non-zero when they
//! fail. The statistical criteria (2, 3, 4, 5b, 8, 9b) are reported only; the
//! measured values are printed next to the target window.

use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use heavytail_oco::certify::{certify_trace, default_comparators, Slack};
use heavytail_oco::conversions::{o2nc_preset, run_last_iterate, run_o2nc, O2ncParams, O2ncPreset};
use heavytail_oco::geometry::BallDomain;
use heavytail_oco::harness::{
    fit_slope, run_oco, sweep, LearnerSpec, Metric, ProblemSpec, RunSpec, SlopeFit, SweepSpec,
};
use heavytail_oco::learners::{Algorithm, GammaRule, HintRule, Schedule};
use heavytail_oco::noise::{estimate_p_moment, pareto_scale, NoiseKind, DEFAULT_MOM_BLOCKS, NoiseModel, TailSpec};
use heavytail_oco::problems::{LinearAdversary, Objective, ProblemKind};
use heavytail_oco::rng::{derive_seed, stream, substream, Substream};
use heavytail_oco::trace::RunTrace;

const MASTER: u64 = 20_240_611;
const HORIZONS: [usize; 6] = [512, 1024, 2048, 4096, 8192, 16384];
const SEEDS: usize = 200;

struct Outcome {
    id: &'static str,
    pass: bool,
    hard: bool,
    detail: String,
}

fn report(id: &'static str, hard: bool, pass: bool, detail: String) -> Outcome {
    Outcome { id, pass, hard, detail }
}

fn in_window(s: f64, lo: f64, hi: f64) -> bool {
    s >= lo && s <= hi
}

fn slope_of(points: &[(f64, f64)]) -> SlopeFit {
    fit_slope(points).unwrap_or(SlopeFit { slope: f64::NAN, intercept: f64::NAN, r2: f64::NAN, points: points.len() })
}

fn curve(spec: &SweepSpec, algo: Algorithm, kind: ProblemKind, noise: &NoiseModel, metric: Metric) -> Vec<(f64, f64)> {
    let res = sweep(spec).expect("sweep");
    res.aggregate(algo, kind, noise.spec.p, noise.sigma(), metric)
        .iter()
        .map(|a| (a.horizon as f64, a.mean))
        .collect()
}

fn grid(learner: LearnerSpec, problem: ProblemSpec, noise: NoiseModel, domain: BallDomain, tag: u64) -> SweepSpec {
    SweepSpec {
        learners: vec![learner],
        problems: vec![problem],
        noises: vec![noise],
        domain,
        horizons: HORIZONS.to_vec(),
        seeds: SEEDS,
        master_seed: derive_seed(MASTER, tag),
    }
}

// ---------------------------------------------------------------- criterion 1

fn random_problem<R: Rng>(rng: &mut R) -> ProblemSpec {
    let mut p = match rng.random_range(0..6) {
        0 => ProblemSpec::new(ProblemKind::Linear),
        1 => ProblemSpec::linear(LinearAdversary::Biased { g: rng.random_range(0.5..2.0), bias: rng.random_range(0.1..0.8) }),
        2 => ProblemSpec::new(ProblemKind::Abs),
        3 => ProblemSpec::new(ProblemKind::Quad),
        4 => ProblemSpec::new(ProblemKind::Holder),
        _ => ProblemSpec::new(ProblemKind::Strong),
    };
    p.g = rng.random_range(0.5..2.0);
    p.h = rng.random_range(0.5..2.0);
    p.nu = rng.random_range(0.2..1.0);
    p.mu = rng.random_range(0.5..2.0);
    p
}

fn random_learner<R: Rng>(algo: Algorithm, diameter: f64, rng: &mut R) -> LearnerSpec {
    let mut l = LearnerSpec::new(algo);
    match algo {
        Algorithm::OAda => {
            l.hint_rule = if rng.random_bool(0.5) { HintRule::PreviousGradient } else { HintRule::Zero };
            if rng.random_bool(0.5) {
                l.gamma = GammaRule::HolderCap { scale: diameter, nu: rng.random_range(0.2..1.0), h_max: rng.random_range(0.5..4.0) };
            }
        }
        Algorithm::OAdaR => l.chunk_length = Some(rng.random_range(1..40)),
        Algorithm::AdaGrad => l.eta = Some(diameter * rng.random_range(0.2..2.0)),
        _ => {}
    }
    l
}

/// Replays an OGD trace without the projection step: `x_{t+1} = x_t - eta_t g_t`.
fn skip_projection(trace: &RunTrace) -> RunTrace {
    let mut out = trace.clone();
    let mut x = out.rows[0].x.clone();
    for r in &mut out.rows {
        r.x = x.clone();
        x = x.iter().zip(&r.g).map(|(a, g)| a - r.eta * g).collect();
    }
    out.x_end = x;
    out
}

fn criterion_1() -> Outcome {
    let algos = [Algorithm::Ogd, Algorithm::Da, Algorithm::AdaGrad, Algorithm::OAda, Algorithm::OAdaR];
    let noises = [
        NoiseModel::none(),
        NoiseModel::gaussian(1.0).unwrap(),
        NoiseModel::pareto(1.3, 1.0).unwrap(),
        NoiseModel::pareto(1.5, 1.0).unwrap(),
        NoiseModel::pareto(1.8, 1.0).unwrap(),
    ];
    let per_cell = 400;
    let runs = algos.len() * noises.len() * per_cell;
    let results: Vec<(bool, f64, String)> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let algo = algos[i % algos.len()];
            let noise = noises[(i / algos.len()) % noises.len()];
            let mut cfg = stream(derive_seed(MASTER, 1), i as u64);
            let d = cfg.random_range(1..=8);
            let center: Vec<f64> = (0..d).map(|_| cfg.random_range(-2.0..2.0)).collect();
            let radius = cfg.random_range(0.1..5.0);
            let domain = BallDomain::new(center, radius).unwrap();
            let mut sigma_noise = noise;
            sigma_noise.spec.sigma = cfg.random_range(0.1..3.0);
            let spec = RunSpec {
                learner: random_learner(algo, domain.diameter(), &mut cfg),
                problem: random_problem(&mut cfg),
                domain,
                horizon: cfg.random_range(20..=300),
                noise: sigma_noise,
                seed: derive_seed(MASTER, 10_000 + i as u64),
            };
            let out = run_oco(&spec).expect("run");
            let mut crng = substream(spec.seed, Substream::Comparators);
            let comps = default_comparators(&out.trace, 32, &mut crng).expect("comparators");
            match certify_trace(&out.trace, &comps) {
                Ok(rep) => (rep.pass(), rep.worst_slack(), String::new()),
                Err(e) => (false, f64::NEG_INFINITY, format!("{algo}: {e}")),
            }
        })
        .collect();
    let failed = results.iter().filter(|r| !r.0).count();
    let worst = results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    if let Some(e) = results.iter().find(|r| !r.2.is_empty()) {
        eprintln!("  first certification error: {}", e.2);
    }

    // Corrupted traces: large noise, stepsize tuned as if noiseless, projection skipped.
    let mut corrupted_caught = 0;
    let corrupted_total = 20;
    for k in 0..corrupted_total {
        let domain = BallDomain::origin(3, 1.0).unwrap();
        let noise = NoiseModel::pareto(1.5, 50.0).unwrap();
        let sched = Schedule::OgdConvex { d: 2.0, g: 1.0, sigma: 0.0, p: 1.5 };
        let spec = RunSpec {
            learner: LearnerSpec::new(Algorithm::Ogd).with_schedule(sched),
            problem: ProblemSpec::new(ProblemKind::Abs),
            domain,
            horizon: 200,
            noise,
            seed: derive_seed(MASTER, 900 + k),
        };
        let out = run_oco(&spec).expect("run");
        let bad = skip_projection(&out.trace);
        let comps = default_comparators(&bad, 32, &mut substream(spec.seed, Substream::Comparators)).unwrap();
        if matches!(certify_trace(&bad, &comps), Ok(r) if !r.pass()) {
            corrupted_caught += 1;
        }
    }
    let pass = failed == 0 && corrupted_caught == corrupted_total;
    report(
        "1",
        true,
        pass,
        format!(
            "runs={runs} comparators=33 failed={failed} worst_relative_slack={worst:.3e} (>= -1e-9); corrupted traces rejected {corrupted_caught}/{corrupted_total}"
        ),
    )
}

// ---------------------------------------------------------------- criterion 2

fn criterion_2() -> Outcome {
    let domain = BallDomain::origin(8, 1.0).unwrap();
    let problem = ProblemSpec::linear(LinearAdversary::Sphere { g: 1.0 });
    let target = 1.0 / 1.3;
    let mut lines = Vec::new();
    let mut pass = true;
    for (tag, algo) in [Algorithm::Ogd, Algorithm::Da, Algorithm::AdaGrad].into_iter().enumerate() {
        for (noise, lo, hi) in [
            (NoiseModel::pareto(1.3, 1.0).unwrap(), target - 0.12, target + 0.12),
            (NoiseModel::none(), 0.42, 0.58),
        ] {
            let spec = grid(LearnerSpec::new(algo), problem.clone(), noise, domain.clone(), 20 + tag as u64);
            let fit = slope_of(&curve(&spec, algo, ProblemKind::Linear, &noise, Metric::Regret));
            let ok = in_window(fit.slope, lo, hi);
            pass &= ok;
            lines.push(format!("{algo} sigma={} slope={:.3} in [{lo:.3},{hi:.3}] {}", noise.sigma(), fit.slope, if ok { "ok" } else { "out" }));
        }
    }
    report("2", false, pass, lines.join("; "))
}

// ---------------------------------------------------------------- criterion 3

fn criterion_3() -> Outcome {
    let domain = BallDomain::origin(4, 1.0).unwrap();
    let noise = NoiseModel::pareto(1.5, 1.0).unwrap();
    let learner = LearnerSpec::new(Algorithm::Ogd).with_schedule(Schedule::OgdStrong { mu: 1.0 });
    let spec = grid(learner, ProblemSpec::new(ProblemKind::Strong), noise, domain, 30);
    let fit = slope_of(&curve(&spec, Algorithm::Ogd, ProblemKind::Strong, &noise, Metric::Regret));
    let pass = in_window(fit.slope, 0.35, 0.65);
    report("3", false, pass, format!("strongly convex regret slope={:.3} in [0.35,0.65]", fit.slope))
}

// ---------------------------------------------------------------- criterion 4

fn criterion_4() -> Outcome {
    let domain = BallDomain::origin(4, 1.0).unwrap();
    let noise = NoiseModel::pareto(1.5, 1.0).unwrap();
    let spec = grid(LearnerSpec::new(Algorithm::Ogd), ProblemSpec::new(ProblemKind::Abs), noise, domain, 40);
    let fit = slope_of(&curve(&spec, Algorithm::Ogd, ProblemKind::Abs, &noise, Metric::Subopt));
    let (lo, hi) = (-(1.0 - 1.0 / 1.5) - 0.12, -(1.0 - 1.0 / 1.5) + 0.12);
    let pass = in_window(fit.slope, lo, hi);
    report("4", false, pass, format!("average-iterate suboptimality slope={:.3} in [{lo:.3},{hi:.3}]", fit.slope))
}

// ---------------------------------------------------------------- criterion 5

fn criterion_5a() -> Outcome {
    let algos = [Algorithm::Ogd, Algorithm::Da, Algorithm::AdaGrad, Algorithm::OAda, Algorithm::OAdaR];
    let kinds = [ProblemKind::Abs, ProblemKind::Quad, ProblemKind::Holder, ProblemKind::Strong];
    let runs = 2000;
    let results: Vec<(bool, f64)> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut cfg = stream(derive_seed(MASTER, 50), i as u64);
            let d = cfg.random_range(1..=6);
            let domain = BallDomain::origin(d, cfg.random_range(0.2..3.0)).unwrap();
            let mut problem = ProblemSpec::new(kinds[i % kinds.len()]);
            problem.nu = cfg.random_range(0.2..1.0);
            let noise = match i % 3 {
                0 => NoiseModel::none(),
                1 => NoiseModel::gaussian(1.0).unwrap(),
                _ => NoiseModel::pareto(1.5, 1.0).unwrap(),
            };
            let horizon = cfg.random_range(10..=400);
            let f = problem.build(&domain, horizon, &mut cfg).unwrap();
            let g_bound = f.lipschitz_on(&domain);
            let spec = random_learner(algos[(i / kinds.len()) % algos.len()], domain.diameter(), &mut cfg);
            let mut learner = spec.build(&domain, g_bound, &noise, Some(&problem), horizon).unwrap();
            let seed = derive_seed(MASTER, 5_000 + i as u64);
            let out = run_last_iterate(&mut learner, &f, horizon, &noise, g_bound, &mut substream(seed, Substream::Noise))
                .expect("last-iterate run");
            let mut comps = vec![f.best_comparator(&domain).unwrap()];
            comps.extend((0..8).map(|_| domain.sample_uniform(&mut cfg)));
            let slacks: Vec<Slack> = comps.iter().map(|x| out.anchor_bound_slack(&f, x).unwrap()).collect();
            (slacks.iter().all(Slack::holds), slacks.iter().map(Slack::relative).fold(f64::INFINITY, f64::min))
        })
        .collect();
    let failed = results.iter().filter(|r| !r.0).count();
    let worst = results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    report("5a", true, failed == 0, format!("runs={runs} comparators=9 failed={failed} worst_relative_slack={worst:.3e}"))
}

fn criterion_5b() -> Outcome {
    let domain = BallDomain::origin(4, 1.0).unwrap();
    let noise = NoiseModel::pareto(1.5, 1.0).unwrap();
    let problem = ProblemSpec::new(ProblemKind::Abs);
    let points: Vec<(f64, f64)> = HORIZONS
        .iter()
        .enumerate()
        .map(|(h, &horizon)| {
            let total: f64 = (0..SEEDS)
                .into_par_iter()
                .map(|s| {
                    let spec = RunSpec {
                        learner: LearnerSpec::new(Algorithm::Ogd),
                        problem: problem.clone(),
                        domain: domain.clone(),
                        horizon,
                        noise,
                        seed: derive_seed(derive_seed(MASTER, 55), (h * SEEDS + s) as u64),
                    };
                    run_oco(&spec).unwrap().last_subopt.unwrap()
                })
                .sum();
            (horizon as f64, total / SEEDS as f64)
        })
        .collect();
    let monotone = points.windows(2).all(|w| w[1].1 < w[0].1);
    let fit = slope_of(&points);
    let pass = monotone && fit.slope <= -0.15;
    report("5b", false, pass, format!("last-iterate slope={:.3} (<= -0.15), monotone decrease={monotone}", fit.slope))
}

// ---------------------------------------------------------------- criterion 6

fn criterion_6() -> Outcome {
    let f = Objective::SaturatedAbs { d: 2 };
    let y0 = [0.6, -0.4];
    let cfg = o2nc_preset(O2ncPreset::Free, 512, 0.1, &O2ncParams::default()).unwrap();
    let noise = NoiseModel::pareto(1.5, 1.0).unwrap();
    let inner = LearnerSpec::new(Algorithm::AdaGrad);
    let seeds = 2000;
    let res: Vec<f64> = (0..seeds)
        .into_par_iter()
        .map(|i| run_o2nc(&cfg, &inner, &f, &noise, &y0, 2f64.sqrt(), derive_seed(derive_seed(MASTER, 60), i)).unwrap().1.identity_residual)
        .collect();
    let n = seeds as f64;
    let mean = res.iter().sum::<f64>() / n;
    let var = res.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    let pass = mean.abs() <= 3.0 * se;
    report("6", true, pass, format!("T={} K={} mean_residual={mean:.3e} standard_error={se:.3e} ratio={:.2} (|ratio| <= 3)", cfg.t, cfg.k, mean / se))
}

// ---------------------------------------------------------------- criterion 7

fn criterion_7() -> Outcome {
    let d = 4;
    let f = Objective::SaturatedAbs { d };
    let y0 = [0.6, -0.4, 0.3, -0.7];
    let g_bound = (d as f64).sqrt();
    let noise = NoiseModel::pareto(1.5, 1.0).unwrap();
    let params = O2ncParams {
        g: Some(g_bound),
        sigma: Some(1.0),
        p: Some(1.5),
        gap: Some(f.value(1, &y0).unwrap()),
        ..O2ncParams::default()
    };
    let delta = 0.1;
    let seeds = 100u64;
    let mut pass = true;
    let mut lines = Vec::new();
    let mut max_spread: f64 = 0.0;
    let mut invariant_ok = true;
    for (pi, preset) in [O2ncPreset::Dep, O2ncPreset::Free].into_iter().enumerate() {
        for (ai, algo) in [Algorithm::AdaGrad, Algorithm::OAdaR].into_iter().enumerate() {
            let inner = LearnerSpec::new(algo);
            let mut means = Vec::new();
            for (ni, n) in [512usize, 2048, 8192].into_iter().enumerate() {
                let cfg = o2nc_preset(preset, n, delta, &params).unwrap();
                invariant_ok &= cfg.budget_invariant();
                let tag = derive_seed(MASTER, 70 + (pi * 100 + ai * 10 + ni) as u64);
                let reports: Vec<_> = (0..seeds)
                    .into_par_iter()
                    .map(|s| run_o2nc(&cfg, &inner, &f, &noise, &y0, g_bound, derive_seed(tag, s)).unwrap().1)
                    .collect();
                max_spread = reports.iter().map(|r| r.max_spread).fold(max_spread, f64::max);
                means.push(reports.iter().map(|r| r.mean_surrogate).sum::<f64>() / seeds as f64);
            }
            let dec = means.windows(2).all(|w| w[1] < w[0]);
            pass &= dec;
            lines.push(format!("{}/{algo} {:.3}>{:.3}>{:.3} {}", preset.name(), means[0], means[1], means[2], if dec { "ok" } else { "not decreasing" }));
        }
    }
    // Every preset output at the budgets used above and a wider range.
    let full = O2ncParams { h: Some(1.0), nu: Some(0.5), ..params };
    for preset in [O2ncPreset::Dep, O2ncPreset::Free, O2ncPreset::ExtDep, O2ncPreset::ExtFree, O2ncPreset::HolderDep, O2ncPreset::HolderFree] {
        for n in (2..=20).map(|e| 1usize << e) {
            invariant_ok &= o2nc_preset(preset, n, delta, &full).map(|c| c.budget_invariant()).unwrap_or(false);
        }
    }
    let geometry_ok = max_spread <= delta;
    pass &= geometry_ok && invariant_ok;
    lines.push(format!("max ||z - z_bar|| = {max_spread:.4} (<= {delta}), K T >= N/4 on all presets = {invariant_ok}"));
    report("7", true, pass, lines.join("; "))
}

// ---------------------------------------------------------------- criterion 8

fn criterion_8() -> Outcome {
    let domain = BallDomain::origin(4, 1.0).unwrap();
    let diam = domain.diameter();
    let problem = ProblemSpec::new(ProblemKind::Quad);
    let mut pass = true;
    let mut lines = Vec::new();
    for (tag, noise, lo, hi) in [
        (80, NoiseModel::for_moment(1.5, 0.0).unwrap(), f64::NEG_INFINITY, -0.85),
        (81, NoiseModel::pareto(1.5, 1.0).unwrap(), -0.453, -0.213),
    ] {
        let sched = Schedule::SmoothFixed { h: problem.h, gamma: 1.0 / (4.0 * problem.h * diam), d: diam, sigma: noise.sigma(), p: 1.5 };
        let spec = grid(LearnerSpec::new(Algorithm::Ogd).with_schedule(sched), problem.clone(), noise, domain.clone(), tag);
        let fit = slope_of(&curve(&spec, Algorithm::Ogd, ProblemKind::Quad, &noise, Metric::Subopt));
        let ok = in_window(fit.slope, lo, hi);
        pass &= ok;
        lines.push(format!("sigma={} slope={:.3} in [{lo:.3},{hi:.3}] {}", noise.sigma(), fit.slope, if ok { "ok" } else { "out" }));
    }
    report("8", false, pass, lines.join("; "))
}

// ---------------------------------------------------------------- criterion 9

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
}

fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(f, a, b, fa, fm, fb, whole, eps, 50)
}

/// `E R^p` for a Pareto magnitude with scale `xm` and index `a`, integrating
/// the density against `r^p` after substituting `r = xm e^u`.
fn pareto_moment_quadrature(p: f64, a: f64, xm: f64) -> f64 {
    // r^p * a xm^a r^(-a-1) dr with dr = r du.
    let g = |u: f64| a * xm.powf(p) * ((p - a) * u).exp();
    // Tail beyond u_max is a xm^p e^((p-a) u_max) / (a-p) <= 1e-14 xm^p.
    let u_max = ((a - p) * 1e-14 / a).ln() / (p - a);
    let pieces = 64;
    let h = u_max / pieces as f64;
    (0..pieces).map(|i| integrate(&g, i as f64 * h, (i + 1) as f64 * h, 1e-15)).sum()
}

/// `E ||eps||^2` for isotropic normal noise in R^4 with per-coordinate
/// variance `s^2`, integrating the chi density in `u = ln r`.
fn gaussian_second_moment_quadrature(sigma: f64) -> f64 {
    let s = sigma / 2.0;
    // chi density with 4 degrees of freedom: r^3 e^(-r^2 / 2 s^2) / (2 s^4).
    let g = |u: f64| {
        let r = u.exp();
        r * r * r.powi(3) * (-r * r / (2.0 * s * s)).exp() / (2.0 * s.powi(4)) * r
    };
    let (lo, hi) = ((s * 1e-6).ln(), (s * 12.0).ln());
    let pieces = 64;
    let h = (hi - lo) / pieces as f64;
    (0..pieces).map(|i| integrate(&g, lo + i as f64 * h, lo + (i + 1) as f64 * h, 1e-15)).sum()
}

fn noise_models(sigma: f64) -> Vec<(f64, NoiseModel)> {
    [1.1, 1.3, 1.5, 1.8, 2.0]
        .into_iter()
        .map(|p| {
            // At p = 2 no index lies strictly between p and 2; use index 3.
            let m = if p < 2.0 { NoiseModel::pareto(p, sigma) } else { NoiseModel::pareto_with_index(p, sigma, 3.0) };
            (p, m.unwrap())
        })
        .collect()
}

fn criterion_9a() -> Outcome {
    let sigma = 1.7;
    let mut worst_rel: f64 = 0.0;
    for (p, model) in noise_models(sigma) {
        let NoiseKind::ParetoRadial { index: a } = model.kind else { unreachable!() };
        let xm = pareto_scale(TailSpec::new(p, sigma).unwrap(), a).unwrap();
        let target = sigma.powf(p);
        worst_rel = worst_rel.max((pareto_moment_quadrature(p, a, xm) - target).abs() / target);
    }
    let g = NoiseModel::gaussian(sigma).unwrap();
    let rel = (gaussian_second_moment_quadrature(g.sigma()) - sigma * sigma).abs() / (sigma * sigma);
    worst_rel = worst_rel.max(rel);
    report("9a", true, worst_rel <= 1e-8, format!("quadrature E||eps||^p vs sigma^p, worst relative error={worst_rel:.2e} (<= 1e-8)"))
}

fn criterion_9b() -> Outcome {
    let sigma = 1.7;
    let mut pass = true;
    let mut lines = Vec::new();
    let mut models = noise_models(sigma);
    models.push((2.0, NoiseModel::gaussian(sigma).unwrap()));
    for (i, (p, model)) in models.into_iter().enumerate() {
        let mut rng = stream(derive_seed(MASTER, 90), i as u64);
        let samples: Vec<Vec<f64>> = (0..1_000_000).map(|_| model.sample(4, &mut rng)).collect();
        let est = estimate_p_moment(&samples, p, DEFAULT_MOM_BLOCKS).unwrap();
        let ratio = est / sigma.powf(p);
        let ok = (ratio - 1.0).abs() <= 0.25;
        pass &= ok;
        let name = if model.kind == NoiseKind::Gaussian { "gaussian" } else { "pareto" };
        lines.push(format!("{name} p={p} ratio={ratio:.3}{}", if ok { "" } else { " out" }));
    }
    report("9b", false, pass, format!("median-of-means / sigma^p within 25%: {}", lines.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("1", criterion_1),
        ("2", criterion_2),
        ("3", criterion_3),
        ("4", criterion_4),
        ("5a", criterion_5a),
        ("5b", criterion_5b),
        ("6", criterion_6),
        ("7", criterion_7),
        ("8", criterion_8),
        ("9a", criterion_9a),
        ("9b", criterion_9b),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut hard_failures = 0;
    for (id, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == id) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        debug_assert_eq!(o.id, id);
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        let kind = if o.hard { "" } else { " (reported)" };
        println!("criterion {:<2} {verdict}{kind} [{:.1}s] {}", o.id, start.elapsed().as_secs_f64(), o.detail);
        if o.hard && !o.pass {
            hard_failures += 1;
        }
    }
    if hard_failures > 0 {
        println!("{hard_failures} pathwise criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
