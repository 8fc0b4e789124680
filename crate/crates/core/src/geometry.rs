//! Euclidean-ball domains.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, norm};

/// Closed Euclidean ball `{x : ||x - center|| <= radius}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallDomain {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl BallDomain {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidArgument("ball dimension must be at least 1".into()));
        }
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!("ball radius must be finite and >= 0, got {radius}")));
        }
        if !linalg::all_finite(&center) {
            return Err(Error::InvalidArgument("ball center must be finite".into()));
        }
        Ok(Self { center, radius })
    }

    /// Ball of the given radius centred at the origin of R^d.
    pub fn origin(d: usize, radius: f64) -> Result<Self> {
        Self::new(vec![0.0; d], radius)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    /// Membership with a relative slack for rounding in the projection.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && linalg::dist(x, &self.center) <= self.radius * (1.0 + 1e-12) + 1e-300
    }

    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        Ok(self.project_unchecked(x))
    }

    pub(crate) fn project_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let off = linalg::sub(x, &self.center);
        let r = norm(&off);
        if r <= self.radius {
            return x.to_vec();
        }
        // The result is checked with the same distance computation `project`
        // starts with, so a second application returns it unchanged.
        let mut s = self.radius / r;
        loop {
            let y = linalg::axpy(&self.center, s, &off);
            if linalg::dist(&y, &self.center) <= self.radius {
                return y;
            }
            // Rounding pushed the result marginally outside; pull inward.
            s *= 1.0 - 4.0 * f64::EPSILON;
        }
    }

    /// Minimiser of `<w, x>` over the ball; the center when `w = 0`.
    pub fn linear_minimizer(&self, w: &[f64]) -> Vec<f64> {
        let n = norm(w);
        if n == 0.0 {
            return self.center.clone();
        }
        self.project_unchecked(&linalg::axpy(&self.center, -self.radius / n, w))
    }

    /// Uniform sample from the ball.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        if self.radius == 0.0 {
            return self.center.clone();
        }
        let d = self.dim();
        let dir = unit_direction(d, rng);
        let u: f64 = rng.random();
        let r = self.radius * u.powf(1.0 / d as f64);
        self.project_unchecked(&linalg::axpy(&self.center, r, &dir))
    }
}

/// Uniformly distributed point on the unit sphere of R^d.
pub fn unit_direction<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = norm(&v);
        if n > 1e-300 {
            return linalg::scale(&v, 1.0 / n);
        }
    }
}
