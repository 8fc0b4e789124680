//! Zero-mean gradient noise with a calibrated p-th moment.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::unit_direction;
use crate::linalg::norm;

/// Moment bound `E||eps||^p <= sigma^p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSpec {
    pub p: f64,
    pub sigma: f64,
}

impl TailSpec {
    pub fn new(p: f64, sigma: f64) -> Result<Self> {
        if !(p > 1.0 && p <= 2.0) {
            return Err(Error::InvalidArgument(format!("moment order p must lie in (1, 2], got {p}")));
        }
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidArgument(format!("sigma must be finite and >= 0, got {sigma}")));
        }
        Ok(Self { p, sigma })
    }

    /// Tail index used when none is given: halfway between p and 2.
    pub fn default_pareto_index(&self) -> f64 {
        (self.p + 2.0) / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    None,
    /// Isotropic normal noise with `E||eps||^2 = sigma^2`.
    Gaussian,
    /// Uniform direction, Pareto magnitude with the given tail index.
    ParetoRadial { index: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub spec: TailSpec,
}

impl NoiseModel {
    pub fn none() -> Self {
        Self { kind: NoiseKind::None, spec: TailSpec { p: 2.0, sigma: 0.0 } }
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        Self::new(NoiseKind::Gaussian, TailSpec::new(2.0, sigma)?)
    }

    /// Pareto-radial noise with the default tail index `(p + 2) / 2`.
    pub fn pareto(p: f64, sigma: f64) -> Result<Self> {
        let spec = TailSpec::new(p, sigma)?;
        Self::new(NoiseKind::ParetoRadial { index: spec.default_pareto_index() }, spec)
    }

    /// Silent when `sigma = 0`, Gaussian at `p = 2`, otherwise Pareto-radial
    /// with the default tail index.
    pub fn for_moment(p: f64, sigma: f64) -> Result<Self> {
        let spec = TailSpec::new(p, sigma)?;
        if sigma == 0.0 {
            Ok(Self { kind: NoiseKind::None, spec })
        } else if p == 2.0 {
            Self::gaussian(sigma)
        } else {
            Self::pareto(p, sigma)
        }
    }

    pub fn pareto_with_index(p: f64, sigma: f64, index: f64) -> Result<Self> {
        Self::new(NoiseKind::ParetoRadial { index }, TailSpec::new(p, sigma)?)
    }

    pub fn new(kind: NoiseKind, spec: TailSpec) -> Result<Self> {
        match kind {
            NoiseKind::None => {}
            NoiseKind::Gaussian => {
                if spec.p != 2.0 {
                    return Err(Error::InvalidArgument("Gaussian noise requires p = 2".into()));
                }
            }
            NoiseKind::ParetoRadial { index } => {
                if !(index > spec.p) || !index.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "Pareto tail index {index} must exceed p = {}",
                        spec.p
                    )));
                }
                // Below p = 2 the variance must be infinite; at p = 2 no index
                // in (p, 2) exists, so any finite-variance index is accepted.
                if spec.p < 2.0 && index >= 2.0 {
                    return Err(Error::InvalidArgument(format!(
                        "Pareto tail index {index} must be below 2 when p < 2"
                    )));
                }
            }
        }
        Ok(Self { kind, spec })
    }

    pub fn sigma(&self) -> f64 {
        match self.kind {
            NoiseKind::None => 0.0,
            _ => self.spec.sigma,
        }
    }

    pub fn is_silent(&self) -> bool {
        self.sigma() == 0.0
    }

    /// One noise vector in R^d.
    pub fn sample<R: Rng + ?Sized>(&self, d: usize, rng: &mut R) -> Vec<f64> {
        match self.kind {
            NoiseKind::None => vec![0.0; d],
            NoiseKind::Gaussian => {
                let s = self.spec.sigma / (d as f64).sqrt();
                (0..d).map(|_| s * rng.sample::<f64, _>(StandardNormal)).collect()
            }
            NoiseKind::ParetoRadial { index } => {
                let xm = pareto_scale_unchecked(self.spec, index);
                let dir = unit_direction(d, rng);
                if xm == 0.0 {
                    return vec![0.0; d];
                }
                // 1 - U lies in (0, 1], so the magnitude is finite.
                let u = 1.0 - rng.random::<f64>();
                let r = xm * u.powf(-1.0 / index);
                dir.into_iter().map(|c| c * r).collect()
            }
        }
    }
}

/// Pareto minimum `x_m` with `E[R^p] = sigma^p` for tail index `a`.
pub fn pareto_scale(spec: TailSpec, a: f64) -> Result<f64> {
    if !(a > spec.p) {
        return Err(Error::InvalidArgument(format!(
            "tail index {a} must exceed p = {} for a finite p-th moment",
            spec.p
        )));
    }
    Ok(pareto_scale_unchecked(spec, a))
}

fn pareto_scale_unchecked(spec: TailSpec, a: f64) -> f64 {
    spec.sigma * ((a - spec.p) / a).powf(1.0 / spec.p)
}

/// Free-function form of [`NoiseModel::sample`].
pub fn sample_noise<R: Rng + ?Sized>(model: &NoiseModel, d: usize, rng: &mut R) -> Vec<f64> {
    model.sample(d, rng)
}

/// Block count used when no other is given.
pub const DEFAULT_MOM_BLOCKS: usize = 20;

/// Median-of-means estimate of `E||eps||^p` from contiguous blocks.
pub fn estimate_p_moment(samples: &[Vec<f64>], p: f64, blocks: usize) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    if blocks == 0 {
        return Err(Error::InvalidArgument("need at least one block".into()));
    }
    let values: Vec<f64> = samples.iter().map(|s| norm(s).powf(p)).collect();
    Ok(median_of_means(&values, blocks))
}

/// Median of the means of `blocks` contiguous blocks of near-equal length.
/// More blocks than values degenerates to one value per block.
pub fn median_of_means(values: &[f64], blocks: usize) -> f64 {
    let n = values.len();
    let k = blocks.clamp(1, n);
    let mut means: Vec<f64> = (0..k)
        .map(|b| {
            let lo = b * n / k;
            let hi = (b + 1) * n / k;
            values[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect();
    means.sort_by(f64::total_cmp);
    if k % 2 == 1 {
        means[k / 2]
    } else {
        0.5 * (means[k / 2 - 1] + means[k / 2])
    }
}
