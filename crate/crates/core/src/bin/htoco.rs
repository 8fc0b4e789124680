use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use heavytail_oco::certify::{certify_trace, default_comparators};
use heavytail_oco::conversions::{o2nc_preset, run_o2nc, O2ncParams, O2ncPreset};
use heavytail_oco::geometry::BallDomain;
use heavytail_oco::harness::{fit_slope, loglog_svg, run_oco, sweep, LearnerSpec, Metric, ProblemSpec, RunSpec, SweepResult, SweepSpec};
use heavytail_oco::learners::Algorithm;
use heavytail_oco::noise::NoiseModel;
use heavytail_oco::problems::{Objective, ProblemKind};
use heavytail_oco::rng::{derive_seed, substream, Substream};
use heavytail_oco::trace::RunTrace;
use heavytail_oco::{Error, Result};

#[derive(Parser)]
#[command(name = "htoco", about = "Online learners under heavy-tailed gradient noise")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Single run: writes a trace and prints the regret ledger.
    Run(RunArgs),
    /// Grid of runs over horizons and seeds, written as CSV.
    Sweep(SweepArgs),
    /// Fitted log-log exponents from a sweep CSV.
    Slope(SlopeArgs),
    /// Certify a trace file against its pathwise inequality.
    Certify(CertifyArgs),
    /// Online-to-nonconvex conversion runs.
    O2nc(O2ncArgs),
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value = "ogd")]
    algo: String,
    #[arg(long, default_value = "linear")]
    problem: String,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 1.5)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Pareto tail index (defaults to (p + 2) / 2).
    #[arg(long)]
    tail_index: Option<f64>,
    #[arg(long = "G", default_value_t = 1.0)]
    g: f64,
    #[arg(long = "H", default_value_t = 1.0)]
    h: f64,
    #[arg(long, default_value_t = 0.5)]
    nu: f64,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Domain radius (diameter is twice this).
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Common {
    fn noise(&self) -> Result<NoiseModel> {
        match self.tail_index {
            Some(a) if self.sigma > 0.0 => NoiseModel::pareto_with_index(self.p, self.sigma, a),
            _ => NoiseModel::for_moment(self.p, self.sigma),
        }
    }

    fn problem(&self) -> Result<ProblemSpec> {
        let mut p = ProblemSpec::new(ProblemKind::parse(&self.problem)?);
        p.g = self.g;
        p.h = self.h;
        p.nu = self.nu;
        p.mu = self.mu;
        Ok(p)
    }

    fn learner(&self) -> Result<LearnerSpec> {
        Ok(LearnerSpec::new(Algorithm::parse(&self.algo)?))
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long = "T", default_value_t = 1000)]
    horizon: usize,
    /// Trace output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated horizons.
    #[arg(long = "T", value_delimiter = ',', default_values_t = [512usize, 1024, 2048, 4096, 8192, 16384])]
    horizons: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    seeds: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SlopeArgs {
    /// Sweep CSV.
    csv: PathBuf,
    /// `regret` or `subopt`.
    #[arg(long, default_value = "regret")]
    metric: String,
    /// Optional SVG chart path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    /// Trace file.
    trace: PathBuf,
    /// Uniform comparators in addition to the hindsight comparator.
    #[arg(long, default_value_t = 32)]
    comparators: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct O2ncArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "free")]
    preset: String,
    #[arg(long = "N", default_value_t = 1024)]
    budget: usize,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Chunk length for the manual preset.
    #[arg(long = "T")]
    chunk: Option<usize>,
    #[arg(long, default_value_t = 10)]
    seeds: usize,
    /// Per-seed report CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn create(path: &PathBuf) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn cmd_run(a: RunArgs) -> Result<()> {
    let c = &a.common;
    let spec = RunSpec {
        learner: c.learner()?,
        problem: c.problem()?,
        domain: BallDomain::origin(c.dim, c.radius)?,
        horizon: a.horizon,
        noise: c.noise()?,
        seed: c.seed,
    };
    let out = run_oco(&spec)?;
    if let Some(path) = &a.out {
        out.trace.write(create(path)?)?;
    }
    let l = &out.ledger;
    println!("algo={} problem={} T={} comparator={}", spec.learner.algo, spec.problem.kind.name(), a.horizon, out.comparator_kind);
    println!("regret={}", l.regret());
    println!("linearized_exact={}", l.linearized_exact);
    println!("linearized_noisy={}", l.linearized_noisy);
    if let Some(s) = out.average_subopt {
        println!("average_subopt={s}");
    }
    if let Some(s) = out.last_subopt {
        println!("last_subopt={s}");
    }
    Ok(())
}

fn cmd_sweep(a: SweepArgs) -> Result<()> {
    let c = &a.common;
    let learners = c.algo.split(',').map(|s| Algorithm::parse(s).map(LearnerSpec::new)).collect::<Result<Vec<_>>>()?;
    let problems = c
        .problem
        .split(',')
        .map(|s| Common { problem: s.to_string(), ..c.clone() }.problem())
        .collect::<Result<Vec<_>>>()?;
    let spec = SweepSpec {
        learners,
        problems,
        noises: vec![c.noise()?],
        domain: BallDomain::origin(c.dim, c.radius)?,
        horizons: a.horizons.clone(),
        seeds: a.seeds,
        master_seed: c.seed,
    };
    let res = sweep(&spec)?;
    match &a.out {
        Some(path) => res.write_csv(create(path)?)?,
        None => res.write_csv(std::io::stdout().lock())?,
    }
    Ok(())
}

fn cmd_slope(a: SlopeArgs) -> Result<()> {
    let res = SweepResult::read_csv(BufReader::new(File::open(&a.csv)?))?;
    let metric = match a.metric.as_str() {
        "regret" => Metric::Regret,
        "subopt" => Metric::Subopt,
        m => return Err(Error::InvalidArgument(format!("unknown metric '{m}'"))),
    };
    let mut series = Vec::new();
    for (algo, problem, p, sigma) in res.groups() {
        let pts: Vec<(f64, f64)> =
            res.aggregate(algo, problem, p, sigma, metric).iter().map(|g| (g.horizon as f64, g.mean)).collect();
        let label = format!("{algo} {} p={p} sigma={sigma}", problem.name());
        match fit_slope(&pts) {
            Ok(f) => println!("{label} slope={} intercept={} r2={} points={}", f.slope, f.intercept, f.r2, f.points),
            Err(e) => println!("{label} no fit: {e}"),
        }
        let fit = fit_slope(&pts).ok();
        series.push((label, pts, fit));
    }
    if let Some(path) = &a.out {
        let svg = loglog_svg(&format!("mean {} vs T", a.metric), &series);
        create(path)?.write_all(svg.as_bytes())?;
    }
    Ok(())
}

fn cmd_certify(a: CertifyArgs) -> Result<bool> {
    let trace = RunTrace::read(BufReader::new(File::open(&a.trace)?))?;
    let mut rng = substream(a.seed, Substream::Comparators);
    let comps = default_comparators(&trace, a.comparators, &mut rng)?;
    let report = certify_trace(&trace, &comps)?;
    print!("{report}");
    Ok(report.pass())
}

fn cmd_o2nc(a: O2ncArgs) -> Result<()> {
    let c = &a.common;
    let preset = O2ncPreset::parse(&a.preset)?;
    let d = c.dim;
    let f = match ProblemKind::parse(&c.problem)? {
        ProblemKind::Linear => return Err(Error::Config("the conversion needs a fixed objective".into())),
        ProblemKind::SatAbs => Objective::SaturatedAbs { d },
        _ => c.problem()?.build(&BallDomain::origin(d, c.radius)?, 1, &mut substream(c.seed, Substream::Environment))?,
    };
    // Start away from the minimiser on every coordinate.
    let y0: Vec<f64> = (0..d).map(|i| if i % 2 == 0 { 0.6 } else { -0.4 }).collect();
    let gap = f.value(1, &y0)? - f.min_value().unwrap_or(0.0);
    let g_bound = match f {
        Objective::SaturatedAbs { .. } => (d as f64).sqrt(),
        _ => c.g,
    };
    let params = O2ncParams {
        g: Some(g_bound),
        h: Some(c.h),
        nu: Some(c.nu),
        sigma: Some(c.sigma),
        p: Some(c.p),
        gap: Some(gap),
        chunk_length: a.chunk,
    };
    let cfg = o2nc_preset(preset, a.budget, a.delta, &params)?;
    let noise = c.noise()?;
    let inner = c.learner()?;
    println!("preset={} N={} T={} K={} delta={} radius={}", preset.name(), cfg.n, cfg.t, cfg.k, cfg.delta, cfg.radius);
    let reports = (0..a.seeds as u64)
        .into_par_iter()
        .map(|i| run_o2nc(&cfg, &inner, &f, &noise, &y0, g_bound, derive_seed(c.seed, i)).map(|r| r.1))
        .collect::<Result<Vec<_>>>()?;
    let n = reports.len().max(1) as f64;
    println!("mean_surrogate={}", reports.iter().map(|r| r.mean_surrogate).sum::<f64>() / n);
    println!("mean_grad_at_centers={}", reports.iter().map(|r| r.mean_grad_at_centers).sum::<f64>() / n);
    println!("max_spread={}", reports.iter().map(|r| r.max_spread).fold(0.0, f64::max));
    println!("mean_identity_residual={}", reports.iter().map(|r| r.identity_residual).sum::<f64>() / n);
    if let Some(path) = &a.out {
        let mut w = create(path)?;
        writeln!(w, "seed,mean_surrogate,mean_grad_at_centers,max_spread,identity_residual,final_value")?;
        for (i, r) in reports.iter().enumerate() {
            writeln!(w, "{i},{},{},{},{},{}", r.mean_surrogate, r.mean_grad_at_centers, r.max_spread, r.identity_residual, r.final_value)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Run(a) => cmd_run(a).map(|_| true),
        Cmd::Sweep(a) => cmd_sweep(a).map(|_| true),
        Cmd::Slope(a) => cmd_slope(a).map(|_| true),
        Cmd::Certify(a) => cmd_certify(a),
        Cmd::O2nc(a) => cmd_o2nc(a).map(|_| true),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
