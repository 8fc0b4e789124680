//! Objective families, exact gradient oracles, and noisy oracle wrappers.

use rand::Rng;

use crate::error::{check_dim, Error, Result};
use crate::geometry::{unit_direction, BallDomain};
use crate::linalg::{self, norm};
use crate::noise::NoiseModel;

/// How the per-round vectors of a linear loss sequence are drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearAdversary {
    /// i.i.d. uniform on the sphere of radius `g`.
    Sphere { g: f64 },
    /// `g * (bias * e + (1 - bias) * u_t)` with `e` a fixed unit vector drawn
    /// once per run and `u_t` i.i.d. uniform on the unit sphere.
    Biased { g: f64, bias: f64 },
    /// Unit vector rotating in the first coordinate plane by `rate` radians per
    /// round, scaled to `g`.
    Drift { g: f64, rate: f64 },
    /// The same vector every round.
    Constant(Vec<f64>),
}

impl LinearAdversary {
    pub fn lipschitz(&self) -> f64 {
        match self {
            LinearAdversary::Sphere { g } | LinearAdversary::Biased { g, .. } | LinearAdversary::Drift { g, .. } => *g,
            LinearAdversary::Constant(w) => norm(w),
        }
    }

    /// The `rounds` loss vectors of one run.
    pub fn generate<R: Rng + ?Sized>(&self, d: usize, rounds: usize, rng: &mut R) -> Result<Vec<Vec<f64>>> {
        Ok(match self {
            LinearAdversary::Sphere { g } => {
                (0..rounds).map(|_| linalg::scale(&unit_direction(d, rng), *g)).collect()
            }
            LinearAdversary::Biased { g, bias } => {
                if !(0.0..=1.0).contains(bias) {
                    return Err(Error::InvalidArgument(format!("bias must lie in [0, 1], got {bias}")));
                }
                let e = unit_direction(d, rng);
                (0..rounds)
                    .map(|_| {
                        let u = unit_direction(d, rng);
                        e.iter().zip(&u).map(|(a, b)| g * (bias * a + (1.0 - bias) * b)).collect()
                    })
                    .collect()
            }
            LinearAdversary::Drift { g, rate } => (0..rounds)
                .map(|t| {
                    let mut w = vec![0.0; d];
                    let a = rate * t as f64;
                    w[0] = g * a.cos();
                    if d > 1 {
                        w[1] = g * a.sin();
                    }
                    w
                })
                .collect(),
            LinearAdversary::Constant(w) => {
                check_dim(d, w.len())?;
                vec![w.clone(); rounds]
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    /// `<w_t, x>` with `ws[t - 1] = w_t`.
    LinearSeq { ws: Vec<Vec<f64>>, g: f64 },
    /// `G ||x - x*||`.
    AbsDistance { g: f64, x_star: Vec<f64> },
    /// `(H / 2) ||x - x*||^2`.
    Quadratic { h: f64, x_star: Vec<f64> },
    /// `(H / (1 + nu)) ||x - x*||^(1 + nu)`.
    HolderPower { h: f64, nu: f64, x_star: Vec<f64> },
    /// `(mu / 2) ||x - x*||^2`.
    StrongQuadratic { mu: f64, x_star: Vec<f64> },
    /// `sum_i min(|x_i|, 1)`: Lipschitz, nonconvex, minimum 0 at the origin.
    SaturatedAbs { d: usize },
}

/// Problem family tags used by the harness and CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Linear,
    Abs,
    Quad,
    Holder,
    Strong,
    SatAbs,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 6] =
        [ProblemKind::Linear, ProblemKind::Abs, ProblemKind::Quad, ProblemKind::Holder, ProblemKind::Strong, ProblemKind::SatAbs];

    pub fn name(&self) -> &'static str {
        match self {
            ProblemKind::Linear => "linear",
            ProblemKind::Abs => "abs",
            ProblemKind::Quad => "quad",
            ProblemKind::Holder => "holder",
            ProblemKind::Strong => "strong",
            ProblemKind::SatAbs => "sat-abs",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown problem '{s}'")))
    }

    pub fn is_convex(&self) -> bool {
        !matches!(self, ProblemKind::SatAbs)
    }
}

/// A stochastic gradient with its exact and noise parts kept apart.
#[derive(Debug, Clone, PartialEq)]
pub struct GradSample {
    pub g: Vec<f64>,
    pub true_grad: Vec<f64>,
    pub noise: Vec<f64>,
}

impl Objective {
    pub fn kind(&self) -> ProblemKind {
        match self {
            Objective::LinearSeq { .. } => ProblemKind::Linear,
            Objective::AbsDistance { .. } => ProblemKind::Abs,
            Objective::Quadratic { .. } => ProblemKind::Quad,
            Objective::HolderPower { .. } => ProblemKind::Holder,
            Objective::StrongQuadratic { .. } => ProblemKind::Strong,
            Objective::SaturatedAbs { .. } => ProblemKind::SatAbs,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Objective::LinearSeq { ws, .. } => ws.first().map_or(0, Vec::len),
            Objective::AbsDistance { x_star, .. }
            | Objective::Quadratic { x_star, .. }
            | Objective::HolderPower { x_star, .. }
            | Objective::StrongQuadratic { x_star, .. } => x_star.len(),
            Objective::SaturatedAbs { d } => *d,
        }
    }

    /// Number of rounds a loss sequence covers; `None` for a fixed objective.
    pub fn horizon(&self) -> Option<usize> {
        match self {
            Objective::LinearSeq { ws, .. } => Some(ws.len()),
            _ => None,
        }
    }

    pub fn minimizer(&self) -> Option<&[f64]> {
        match self {
            Objective::AbsDistance { x_star, .. }
            | Objective::Quadratic { x_star, .. }
            | Objective::HolderPower { x_star, .. }
            | Objective::StrongQuadratic { x_star, .. } => Some(x_star),
            _ => None,
        }
    }

    /// Global minimum value for fixed objectives.
    pub fn min_value(&self) -> Option<f64> {
        match self {
            Objective::LinearSeq { .. } => None,
            _ => Some(0.0),
        }
    }

    fn check(&self, t: usize, x: &[f64]) -> Result<()> {
        check_dim(self.dim(), x.len())?;
        if let Objective::LinearSeq { ws, .. } = self {
            if t == 0 || t > ws.len() {
                return Err(Error::InvalidArgument(format!("round {t} outside loss sequence of {}", ws.len())));
            }
        }
        Ok(())
    }

    /// Loss of round `t` (1-based; ignored by fixed objectives) at `x`.
    pub fn value(&self, t: usize, x: &[f64]) -> Result<f64> {
        self.check(t, x)?;
        Ok(self.value_unchecked(t, x))
    }

    pub(crate) fn value_unchecked(&self, t: usize, x: &[f64]) -> f64 {
        match self {
            Objective::LinearSeq { ws, .. } => linalg::dot(&ws[t - 1], x),
            Objective::AbsDistance { g, x_star } => g * linalg::dist(x, x_star),
            Objective::Quadratic { h, x_star } => 0.5 * h * linalg::dist_sq(x, x_star),
            Objective::HolderPower { h, nu, x_star } => h / (1.0 + nu) * linalg::dist(x, x_star).powf(1.0 + nu),
            Objective::StrongQuadratic { mu, x_star } => 0.5 * mu * linalg::dist_sq(x, x_star),
            Objective::SaturatedAbs { .. } => x.iter().map(|u| u.abs().min(1.0)).sum(),
        }
    }

    /// Exact (sub)gradient, with 0 selected at kinks.
    pub fn gradient(&self, t: usize, x: &[f64]) -> Result<Vec<f64>> {
        self.check(t, x)?;
        Ok(self.gradient_unchecked(t, x))
    }

    pub(crate) fn gradient_unchecked(&self, t: usize, x: &[f64]) -> Vec<f64> {
        match self {
            Objective::LinearSeq { ws, .. } => ws[t - 1].clone(),
            Objective::AbsDistance { g, x_star } => {
                let diff = linalg::sub(x, x_star);
                let r = norm(&diff);
                if r == 0.0 {
                    vec![0.0; x.len()]
                } else {
                    linalg::scale(&diff, g / r)
                }
            }
            Objective::Quadratic { h, x_star } => linalg::scale(&linalg::sub(x, x_star), *h),
            Objective::HolderPower { h, nu, x_star } => {
                let diff = linalg::sub(x, x_star);
                let r = norm(&diff);
                if r == 0.0 {
                    vec![0.0; x.len()]
                } else {
                    linalg::scale(&diff, h * r.powf(nu - 1.0))
                }
            }
            Objective::StrongQuadratic { mu, x_star } => linalg::scale(&linalg::sub(x, x_star), *mu),
            Objective::SaturatedAbs { .. } => x
                .iter()
                .map(|&u| {
                    let a = u.abs();
                    if a > 0.0 && a < 1.0 {
                        u.signum()
                    } else {
                        0.0
                    }
                })
                .collect(),
        }
    }

    /// Exact gradient plus a fresh noise draw.
    pub fn noisy_gradient<R: Rng + ?Sized>(
        &self,
        t: usize,
        x: &[f64],
        model: &NoiseModel,
        rng: &mut R,
    ) -> Result<GradSample> {
        let true_grad = self.gradient(t, x)?;
        let noise = model.sample(x.len(), rng);
        let g = linalg::add(&true_grad, &noise);
        Ok(GradSample { g, true_grad, noise })
    }

    /// Best fixed decision in hindsight over `domain`.
    pub fn best_comparator(&self, domain: &BallDomain) -> Result<Vec<f64>> {
        check_dim(domain.dim(), self.dim())?;
        Ok(match self {
            Objective::LinearSeq { ws, .. } => {
                let mut w = vec![0.0; domain.dim()];
                for wt in ws {
                    linalg::add_assign(&mut w, wt);
                }
                domain.linear_minimizer(&w)
            }
            Objective::SaturatedAbs { d } => domain.project_unchecked(&vec![0.0; *d]),
            other => domain.project_unchecked(other.minimizer().expect("fixed objective has a minimiser")),
        })
    }

    /// Lipschitz constant of the losses over a ball of the given diameter.
    pub fn lipschitz_on(&self, domain: &BallDomain) -> f64 {
        let reach = |x_star: &[f64]| linalg::dist(x_star, &domain.center) + domain.radius;
        match self {
            Objective::LinearSeq { g, .. } => *g,
            Objective::AbsDistance { g, .. } => *g,
            Objective::Quadratic { h, x_star } => h * reach(x_star),
            Objective::HolderPower { h, nu, x_star } => h * reach(x_star).powf(*nu),
            Objective::StrongQuadratic { mu, x_star } => mu * reach(x_star),
            Objective::SaturatedAbs { d } => (*d as f64).sqrt(),
        }
    }
}

/// Free-function form of [`Objective::best_comparator`].
pub fn best_comparator(obj: &Objective, domain: &BallDomain) -> Result<Vec<f64>> {
    obj.best_comparator(domain)
}
