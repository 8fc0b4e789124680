//! Seed sweep over horizons, fitted log-log exponents, and an SVG chart.
//!
//!     cargo run --release --example sweep_slopes -- [out.svg]

use heavytail_oco::geometry::BallDomain;
use heavytail_oco::harness::{fit_slope, loglog_svg, sweep, LearnerSpec, Metric, ProblemSpec, SweepSpec};
use heavytail_oco::learners::Algorithm;
use heavytail_oco::noise::NoiseModel;
use heavytail_oco::problems::ProblemKind;

fn main() -> heavytail_oco::Result<()> {
    let spec = SweepSpec {
        learners: [Algorithm::Ogd, Algorithm::Da, Algorithm::AdaGrad].map(LearnerSpec::new).to_vec(),
        problems: vec![ProblemSpec::new(ProblemKind::Linear)],
        noises: vec![NoiseModel::none(), NoiseModel::pareto(1.3, 1.0)?],
        domain: BallDomain::origin(8, 1.0)?,
        horizons: vec![256, 512, 1024, 2048, 4096, 8192],
        seeds: 40,
        master_seed: 2024,
    };
    let res = sweep(&spec)?;
    let mut series = Vec::new();
    for (algo, problem, p, sigma) in res.groups() {
        let pts: Vec<(f64, f64)> =
            res.aggregate(algo, problem, p, sigma, Metric::Regret).iter().map(|a| (a.horizon as f64, a.mean)).collect();
        let fit = fit_slope(&pts)?;
        println!("{algo:<8} sigma={sigma}  slope={:.3}  r2={:.4}", fit.slope, fit.r2);
        series.push((format!("{algo} sigma={sigma}"), pts, Some(fit)));
    }
    let path = std::env::args().nth(1).unwrap_or_else(|| "sweep_slopes.svg".into());
    std::fs::write(&path, loglog_svg("mean regret vs T", &series))?;
    println!("chart written to {path}");
    Ok(())
}
