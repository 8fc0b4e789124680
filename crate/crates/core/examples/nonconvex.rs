//! Online-to-nonconvex conversion on the saturated absolute loss with
//! heavy-tailed noise, for each preset.
//!
//!     cargo run --release --example nonconvex

use rayon::prelude::*;

use heavytail_oco::conversions::{o2nc_preset, run_o2nc, O2ncParams, O2ncPreset};
use heavytail_oco::harness::LearnerSpec;
use heavytail_oco::learners::Algorithm;
use heavytail_oco::noise::NoiseModel;
use heavytail_oco::problems::Objective;
use heavytail_oco::rng::derive_seed;

fn main() -> heavytail_oco::Result<()> {
    let d = 4;
    let f = Objective::SaturatedAbs { d };
    let y0 = [0.6, -0.4, 0.3, -0.7];
    let g_bound = (d as f64).sqrt();
    let noise = NoiseModel::pareto(1.5, 1.0)?;
    let params = O2ncParams {
        g: Some(g_bound),
        h: Some(1.0),
        nu: Some(0.5),
        sigma: Some(1.0),
        p: Some(1.5),
        gap: Some(f.value(1, &y0)?),
        chunk_length: None,
    };
    println!("{:<12} {:<8} {:>6} {:>5} {:>5} {:>10} {:>10}", "preset", "inner", "N", "T", "K", "surrogate", "spread");
    for preset in [O2ncPreset::Dep, O2ncPreset::Free, O2ncPreset::ExtDep, O2ncPreset::HolderFree] {
        for algo in [Algorithm::AdaGrad, Algorithm::OAdaR] {
            for n in [512, 2048, 8192] {
                let cfg = o2nc_preset(preset, n, 0.1, &params)?;
                let inner = LearnerSpec::new(algo);
                let reps = (0..50u64)
                    .into_par_iter()
                    .map(|s| run_o2nc(&cfg, &inner, &f, &noise, &y0, g_bound, derive_seed(9, s)).map(|r| r.1))
                    .collect::<heavytail_oco::Result<Vec<_>>>()?;
                let surrogate = reps.iter().map(|r| r.mean_surrogate).sum::<f64>() / reps.len() as f64;
                let spread = reps.iter().map(|r| r.max_spread).fold(0.0, f64::max);
                println!(
                    "{:<12} {:<8} {n:>6} {:>5} {:>5} {surrogate:>10.4} {spread:>10.4}",
                    preset.name(),
                    algo.name(),
                    cfg.t,
                    cfg.k
                );
            }
        }
    }
    Ok(())
}
