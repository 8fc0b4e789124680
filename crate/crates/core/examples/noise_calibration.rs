//! Pareto-radial noise: scale calibration and how the tail index changes
//! what a finite sample sees.
//!
//!     cargo run --release --example noise_calibration

use heavytail_oco::noise::{estimate_p_moment, pareto_scale, NoiseModel, TailSpec, DEFAULT_MOM_BLOCKS};
use heavytail_oco::rng::stream;

fn main() -> heavytail_oco::Result<()> {
    let sigma = 1.0;
    let n = 200_000;
    println!("{:>4} {:>6} {:>10} {:>16}", "p", "index", "x_m", "MoM / sigma^p");
    for p in [1.1, 1.3, 1.5, 1.8] {
        let spec = TailSpec::new(p, sigma)?;
        for index in [spec.default_pareto_index(), (p + spec.default_pareto_index()) / 2.0] {
            let model = NoiseModel::pareto_with_index(p, sigma, index)?;
            let mut rng = stream(7, (p * 100.0) as u64);
            let samples: Vec<Vec<f64>> = (0..n).map(|_| model.sample(3, &mut rng)).collect();
            let est = estimate_p_moment(&samples, p, DEFAULT_MOM_BLOCKS)?;
            println!("{p:>4} {index:>6.3} {:>10.5} {:>16.3}", pareto_scale(spec, index)?, est / sigma.powf(p));
        }
    }
    println!("\nIndices close to p put most of the p-th moment in rare draws, so");
    println!("block estimates sit well below sigma^p at any practical sample size.");
    Ok(())
}
