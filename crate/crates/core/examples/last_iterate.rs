//! Anchored last-iterate conversion against the plain average iterate.
//!
//!     cargo run --release --example last_iterate

use heavytail_oco::conversions::{average_iterate, run_last_iterate};
use heavytail_oco::geometry::BallDomain;
use heavytail_oco::harness::LearnerSpec;
use heavytail_oco::learners::Algorithm;
use heavytail_oco::noise::NoiseModel;
use heavytail_oco::problems::Objective;
use heavytail_oco::rng::{substream, Substream};

fn main() -> heavytail_oco::Result<()> {
    let domain = BallDomain::origin(3, 1.0)?;
    let f = Objective::AbsDistance { g: 1.0, x_star: vec![0.3, -0.2, 0.1] };
    let noise = NoiseModel::pareto(1.5, 1.0)?;
    let fmin = 0.0;
    println!("{:>6} {:>14} {:>14} {:>12}", "T", "F(y_T) - F*", "F(x_T) - F*", "bound slack");
    for horizon in [256, 1024, 4096, 16384] {
        let mut learner = LearnerSpec::new(Algorithm::AdaGrad).build(&domain, 1.0, &noise, None, horizon)?;
        let out = run_last_iterate(&mut learner, &f, horizon, &noise, 1.0, &mut substream(5, Substream::Noise))?;
        let slack = out.anchor_bound_slack(&f, f.minimizer().expect("fixed objective"))?;
        // The final anchor coincides with the average of the learner's decisions.
        let avg = average_iterate(&out.trace.iterates())?;
        debug_assert!(heavytail_oco::linalg::dist(&avg, out.y_final()) < 1e-12);
        let last = &out.trace.rows[horizon - 1].x;
        println!(
            "{horizon:>6} {:>14.6} {:>14.6} {:>12.3e}",
            f.value(1, out.y_final())? - fmin,
            f.value(1, last)? - fmin,
            slack.raw()
        );
    }
    Ok(())
}
