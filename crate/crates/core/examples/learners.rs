//! Every learner on the same noisy absolute-distance loss.
//!
//!     cargo run --release --example learners

use heavytail_oco::geometry::BallDomain;
use heavytail_oco::harness::{run_oco, LearnerSpec, ProblemSpec, RunSpec};
use heavytail_oco::learners::Algorithm;
use heavytail_oco::noise::NoiseModel;
use heavytail_oco::problems::ProblemKind;

fn main() -> heavytail_oco::Result<()> {
    let domain = BallDomain::origin(4, 1.0)?;
    let far = domain.project(&[3.0, 0.0, -4.0, 0.0])?;
    println!("projection of (3,0,-4,0) onto the unit ball: {far:?}");

    let noise = NoiseModel::pareto(1.5, 1.0)?;
    println!("\n{:<8} {:>10} {:>14} {:>12}", "algo", "regret", "avg subopt", "last subopt");
    for algo in Algorithm::ALL {
        let spec = RunSpec {
            learner: LearnerSpec::new(algo),
            problem: ProblemSpec::new(ProblemKind::Abs),
            domain: domain.clone(),
            horizon: 4096,
            noise,
            seed: 1,
        };
        let out = run_oco(&spec)?;
        println!(
            "{:<8} {:>10.3} {:>14.5} {:>12.5}",
            algo.name(),
            out.ledger.regret(),
            out.average_subopt.unwrap_or(f64::NAN),
            out.last_subopt.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
