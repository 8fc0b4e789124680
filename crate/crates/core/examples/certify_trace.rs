//! Record a white-box trace, save it, read it back and certify it; then
//! show that a trace with the projection removed is rejected.
//!
//!     cargo run --release --example certify_trace

use heavytail_oco::certify::{certify_trace, default_comparators};
use heavytail_oco::geometry::BallDomain;
use heavytail_oco::harness::{run_oco, LearnerSpec, ProblemSpec, RunSpec};
use heavytail_oco::learners::{Algorithm, Schedule};
use heavytail_oco::noise::NoiseModel;
use heavytail_oco::problems::ProblemKind;
use heavytail_oco::rng::{substream, Substream};
use heavytail_oco::trace::RunTrace;

fn main() -> heavytail_oco::Result<()> {
    for algo in Algorithm::ALL {
        let spec = RunSpec {
            learner: LearnerSpec::new(algo),
            problem: ProblemSpec::new(ProblemKind::Linear),
            domain: BallDomain::new(vec![1.0, -1.0, 0.5], 2.0)?,
            horizon: 500,
            noise: NoiseModel::pareto(1.3, 2.0)?,
            seed: 11,
        };
        let out = run_oco(&spec)?;
        let text = out.trace.to_text();
        let trace = RunTrace::from_text(&text)?;
        let comps = default_comparators(&trace, 32, &mut substream(spec.seed, Substream::Comparators))?;
        print!("{}", certify_trace(&trace, &comps)?);
    }

    // Stepsizes tuned for no noise, heavy noise, and no projection.
    let spec = RunSpec {
        learner: LearnerSpec::new(Algorithm::Ogd).with_schedule(Schedule::OgdConvex { d: 2.0, g: 1.0, sigma: 0.0, p: 1.5 }),
        problem: ProblemSpec::new(ProblemKind::Abs),
        domain: BallDomain::origin(2, 1.0)?,
        horizon: 100,
        noise: NoiseModel::pareto(1.5, 50.0)?,
        seed: 3,
    };
    let mut bad = run_oco(&spec)?.trace;
    let mut x = bad.rows[0].x.clone();
    for r in &mut bad.rows {
        r.x = x.clone();
        x = x.iter().zip(&r.g).map(|(a, g)| a - r.eta * g).collect();
    }
    bad.x_end = x;
    let comps = default_comparators(&bad, 32, &mut substream(3, Substream::Comparators))?;
    println!("\nprojection skipped:");
    print!("{}", certify_trace(&bad, &comps)?);
    Ok(())
}
