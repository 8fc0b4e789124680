//! Online learners over a ball and their stepsize schedules.

use crate::error::{check_dim, Error, Result};
use crate::geometry::BallDomain;
use crate::linalg::{self, norm, norm_sq};

/// Cap applied by the optimistic schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaRule {
    Infinite,
    /// `gamma_t = scale^(1 - nu) / max_{s <= t} H_s`.
    HolderCap { scale: f64, nu: f64, h_max: f64 },
}

impl GammaRule {
    pub fn value(&self) -> f64 {
        match *self {
            GammaRule::Infinite => f64::INFINITY,
            GammaRule::HolderCap { scale, nu, h_max } => scale.powf(1.0 - nu) / h_max,
        }
    }

    /// Feed the smoothness level of the current round into the running max.
    pub fn observe(&mut self, h: f64) {
        if let GammaRule::HolderCap { h_max, .. } = self {
            if h > *h_max {
                *h_max = h;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schedule {
    /// `min(D / (G sqrt t), D / (sigma t^(1/p)))`.
    OgdConvex { d: f64, g: f64, sigma: f64, p: f64 },
    /// `1 / (mu t)`.
    OgdStrong { mu: f64 },
    /// `min(1 / (4H), gamma D, D / (sigma t^(1/p)))`.
    SmoothFixed { h: f64, gamma: f64, d: f64, sigma: f64, p: f64 },
    /// `eta / sqrt V`.
    AdaGradScale { eta: f64 },
    /// `2D / sqrt V`.
    DaAdaptiveScale { d: f64 },
    /// `min(eta / sqrt V, gamma_t)`.
    OAdaRule { eta: f64, gamma: GammaRule },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")))
    }
}

fn noise_branch(d: f64, sigma: f64, p: f64, t: f64) -> f64 {
    if sigma == 0.0 {
        f64::INFINITY
    } else {
        d / (sigma * t.powf(1.0 / p))
    }
}

/// `scale / sqrt(V)`, infinite when `V = 0`.
fn inv_sqrt_scaled(scale: f64, v: f64) -> f64 {
    if v > 0.0 {
        scale / v.sqrt()
    } else {
        f64::INFINITY
    }
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        let check_p = |p: f64| {
            if p > 1.0 && p <= 2.0 {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("p must lie in (1, 2], got {p}")))
            }
        };
        let check_sigma = |s: f64| {
            if s >= 0.0 && s.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("sigma must be finite and >= 0, got {s}")))
            }
        };
        match *self {
            Schedule::OgdConvex { d, g, sigma, p } => {
                positive("D", d)?;
                positive("G", g)?;
                check_sigma(sigma)?;
                check_p(p)
            }
            Schedule::OgdStrong { mu } => positive("mu", mu),
            Schedule::SmoothFixed { h, gamma, d, sigma, p } => {
                positive("H", h)?;
                positive("gamma", gamma)?;
                positive("D", d)?;
                check_sigma(sigma)?;
                check_p(p)
            }
            Schedule::AdaGradScale { eta } => positive("eta", eta),
            Schedule::DaAdaptiveScale { d } => positive("D", d),
            Schedule::OAdaRule { eta, gamma } => {
                positive("eta", eta)?;
                if let GammaRule::HolderCap { scale, nu, h_max } = gamma {
                    positive("gamma scale", scale)?;
                    positive("H", h_max)?;
                    if !(nu > 0.0 && nu <= 1.0) {
                        return Err(Error::InvalidArgument(format!("nu must lie in (0, 1], got {nu}")));
                    }
                }
                Ok(())
            }
        }
    }

    /// Stepsize at round `t >= 1`. Accumulator-based schedules read `v`
    /// (absent counts as zero) and return `+inf` when it is zero.
    pub fn stepsize(&self, t: usize, v: Option<f64>) -> Result<f64> {
        if t < 1 {
            return Err(Error::InvalidArgument("round index starts at 1".into()));
        }
        let tf = t as f64;
        let v = v.unwrap_or(0.0);
        Ok(match *self {
            Schedule::OgdConvex { d, g, sigma, p } => (d / (g * tf.sqrt())).min(noise_branch(d, sigma, p, tf)),
            Schedule::OgdStrong { mu } => 1.0 / (mu * tf),
            Schedule::SmoothFixed { h, gamma, d, sigma, p } => {
                (1.0 / (4.0 * h)).min(gamma * d).min(noise_branch(d, sigma, p, tf))
            }
            Schedule::AdaGradScale { eta } => inv_sqrt_scaled(eta, v),
            Schedule::DaAdaptiveScale { d } => inv_sqrt_scaled(2.0 * d, v),
            Schedule::OAdaRule { eta, gamma } => inv_sqrt_scaled(eta, v).min(gamma.value()),
        })
    }

    /// Schedules whose stepsize depends only on the round index.
    pub fn is_fixed(&self) -> bool {
        matches!(self, Schedule::OgdConvex { .. } | Schedule::OgdStrong { .. } | Schedule::SmoothFixed { .. })
    }
}

/// Which algorithm a learner runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Ogd,
    Da,
    AdaGrad,
    DaAdaptive,
    OAda,
    OAdaR,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] =
        [Algorithm::Ogd, Algorithm::Da, Algorithm::AdaGrad, Algorithm::DaAdaptive, Algorithm::OAda, Algorithm::OAdaR];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Ogd => "ogd",
            Algorithm::Da => "da",
            Algorithm::AdaGrad => "adagrad",
            Algorithm::DaAdaptive => "da-ada",
            Algorithm::OAda => "oada",
            Algorithm::OAdaR => "oadar",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown algorithm '{s}'")))
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// How an optimistic learner forms its next hint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HintRule {
    /// `h_{t+1} = g_t`, with `h_1 = 0`.
    PreviousGradient,
    /// `h_t = 0` throughout.
    Zero,
    /// Supplied by the caller through [`Learner::update_with_hint`].
    Explicit,
}

impl HintRule {
    pub fn name(&self) -> &'static str {
        match self {
            HintRule::PreviousGradient => "previous-gradient",
            HintRule::Zero => "zero",
            HintRule::Explicit => "explicit",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "previous-gradient" => Ok(HintRule::PreviousGradient),
            "zero" => Ok(HintRule::Zero),
            "explicit" => Ok(HintRule::Explicit),
            _ => Err(Error::InvalidArgument(format!("unknown hint rule '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OgdState {
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DaState {
    pub x1: Vec<f64>,
    pub x: Vec<f64>,
    pub gradient_sum: Vec<f64>,
    pub t: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaGradState {
    pub x: Vec<f64>,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DaAdaptiveState {
    pub x1: Vec<f64>,
    pub x: Vec<f64>,
    pub gradient_sum: Vec<f64>,
    pub v: f64,
    pub t: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OAdaState {
    pub x: Vec<f64>,
    pub v: f64,
    /// Hint `h_t` for the round about to be played.
    pub hint: Vec<f64>,
    pub previous_gradient: Vec<f64>,
    pub t: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OAdaRState {
    pub x: Vec<f64>,
    pub v: f64,
    /// Index of the next round, starting at 1.
    pub n: usize,
    pub chunk_length: usize,
    pub radius: f64,
    pub previous_gradient: Vec<f64>,
}

impl OAdaRState {
    pub fn starts_chunk(&self, n: usize) -> bool {
        (n - 1).is_multiple_of(self.chunk_length)
    }

    pub fn ends_chunk(&self, n: usize) -> bool {
        n.is_multiple_of(self.chunk_length)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LearnerState {
    Ogd(OgdState),
    Da(DaState),
    AdaGrad(AdaGradState),
    DaAdaptive(DaAdaptiveState),
    OAda(OAdaState),
    OAdaR(OAdaRState),
}

fn check_gradient(d: usize, g: &[f64]) -> Result<()> {
    check_dim(d, g.len())?;
    if !linalg::all_finite(g) {
        return Err(Error::Numeric("non-finite gradient component".into()));
    }
    Ok(())
}

fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("stepsize must be positive and finite, got {eta}")))
    }
}

/// `x <- P(x - eta g)`.
pub fn ogd_step(state: &mut OgdState, domain: &BallDomain, g: &[f64], eta: f64) -> Result<()> {
    check_gradient(domain.dim(), g)?;
    check_eta(eta)?;
    state.x = domain.project_unchecked(&linalg::axpy(&state.x, -eta, g));
    Ok(())
}

/// `sum <- sum + g; x <- P(x1 - eta sum)`.
pub fn da_step(state: &mut DaState, domain: &BallDomain, g: &[f64], eta: f64) -> Result<()> {
    check_gradient(domain.dim(), g)?;
    check_eta(eta)?;
    linalg::add_assign(&mut state.gradient_sum, g);
    state.t += 1;
    state.x = domain.project_unchecked(&linalg::axpy(&state.x1, -eta, &state.gradient_sum));
    Ok(())
}

/// Norm-AdaGrad step; returns the stepsize used (`+inf` for the no-op at `V = 0`).
pub fn adagrad_step(state: &mut AdaGradState, domain: &BallDomain, g: &[f64], eta: f64) -> Result<f64> {
    check_gradient(domain.dim(), g)?;
    state.v += norm_sq(g);
    if state.v == 0.0 {
        return Ok(f64::INFINITY);
    }
    let step = eta / state.v.sqrt();
    state.x = domain.project_unchecked(&linalg::axpy(&state.x, -step, g));
    Ok(step)
}

/// Dual averaging with stepsize `2D / sqrt V`; returns the stepsize used.
pub fn da_adaptive_step(state: &mut DaAdaptiveState, domain: &BallDomain, g: &[f64], scale: f64) -> Result<f64> {
    check_gradient(domain.dim(), g)?;
    state.v += norm_sq(g);
    linalg::add_assign(&mut state.gradient_sum, g);
    state.t += 1;
    if state.v == 0.0 {
        return Ok(f64::INFINITY);
    }
    let step = 2.0 * scale / state.v.sqrt();
    state.x = domain.project_unchecked(&linalg::axpy(&state.x1, -step, &state.gradient_sum));
    Ok(step)
}

/// Projected step, with an infinite stepsize meaning the exact minimiser of
/// the linear term over the ball.
fn optimistic_move(domain: &BallDomain, x: &[f64], direction: &[f64], eta: f64) -> Vec<f64> {
    if eta.is_finite() {
        domain.project_unchecked(&linalg::axpy(x, -eta, direction))
    } else if norm(direction) == 0.0 {
        x.to_vec()
    } else {
        domain.linear_minimizer(direction)
    }
}

/// Optimistic AdaGrad step; `h_next` becomes the stored hint. Returns the stepsize.
pub fn oada_step(
    state: &mut OAdaState,
    domain: &BallDomain,
    g: &[f64],
    h_next: &[f64],
    schedule: &Schedule,
) -> Result<f64> {
    check_gradient(domain.dim(), g)?;
    check_gradient(domain.dim(), h_next)?;
    let Schedule::OAdaRule { .. } = schedule else {
        return Err(Error::Config("optimistic learner needs an OAdaRule schedule".into()));
    };
    state.t += 1;
    state.v += linalg::dist_sq(g, &state.hint);
    let eta = schedule.stepsize(state.t, Some(state.v))?;
    let direction: Vec<f64> = g.iter().zip(h_next).zip(&state.hint).map(|((a, b), c)| a + b - c).collect();
    state.x = optimistic_move(domain, &state.x, &direction, eta);
    state.hint = h_next.to_vec();
    state.previous_gradient = g.to_vec();
    Ok(eta)
}

/// Optimistic AdaGrad with a reset every `chunk_length` rounds. The domain
/// must have radius `state.radius`. Returns the stepsize.
pub fn oadar_step(state: &mut OAdaRState, domain: &BallDomain, g: &[f64]) -> Result<f64> {
    check_gradient(domain.dim(), g)?;
    let n = state.n;
    let inc = linalg::dist_sq(g, &state.previous_gradient);
    state.v = if state.starts_chunk(n) { inc } else { state.v + inc };
    let eta = inv_sqrt_scaled(std::f64::consts::SQRT_2 * state.radius, state.v);
    let direction: Vec<f64> = g.iter().zip(&state.previous_gradient).map(|(a, b)| 2.0 * a - b).collect();
    state.x = optimistic_move(domain, &state.x, &direction, eta);
    if state.ends_chunk(n) {
        state.x = domain.linear_minimizer(g);
    }
    state.previous_gradient = g.to_vec();
    state.n += 1;
    Ok(eta)
}

/// A learner: domain, schedule, and mutable state behind one interface.
#[derive(Debug, Clone)]
pub struct Learner {
    pub domain: BallDomain,
    pub schedule: Option<Schedule>,
    pub hint_rule: HintRule,
    pub state: LearnerState,
    round: usize,
}

impl Learner {
    fn build(domain: BallDomain, schedule: Option<Schedule>, state: LearnerState) -> Result<Self> {
        if let Some(s) = &schedule {
            s.validate()?;
        }
        Ok(Self { domain, schedule, hint_rule: HintRule::PreviousGradient, state, round: 0 })
    }

    fn start_point(domain: &BallDomain, x1: Option<Vec<f64>>) -> Result<Vec<f64>> {
        match x1 {
            None => Ok(domain.center.clone()),
            Some(x) => domain.project(&x),
        }
    }

    /// Projected online gradient descent with a round-indexed schedule.
    pub fn ogd(domain: BallDomain, schedule: Schedule, x1: Option<Vec<f64>>) -> Result<Self> {
        if !schedule.is_fixed() {
            return Err(Error::Config("OGD needs a round-indexed schedule".into()));
        }
        let x = Self::start_point(&domain, x1)?;
        Self::build(domain, Some(schedule), LearnerState::Ogd(OgdState { x }))
    }

    pub fn da(domain: BallDomain, schedule: Schedule, x1: Option<Vec<f64>>) -> Result<Self> {
        if !schedule.is_fixed() {
            return Err(Error::Config("dual averaging needs a round-indexed schedule".into()));
        }
        let x = Self::start_point(&domain, x1)?;
        let d = domain.dim();
        Self::build(
            domain,
            Some(schedule),
            LearnerState::Da(DaState { x1: x.clone(), x, gradient_sum: vec![0.0; d], t: 0 }),
        )
    }

    /// Norm-AdaGrad with base stepsize `eta` (`D / sqrt 2` for diameter `D`
    /// is the oblivious default).
    pub fn adagrad(domain: BallDomain, eta: f64, x1: Option<Vec<f64>>) -> Result<Self> {
        let x = Self::start_point(&domain, x1)?;
        Self::build(domain, Some(Schedule::AdaGradScale { eta }), LearnerState::AdaGrad(AdaGradState { x, v: 0.0 }))
    }

    /// Dual averaging with stepsize `2D / sqrt V`, `D` the scale parameter.
    pub fn da_adaptive(domain: BallDomain, scale: f64, x1: Option<Vec<f64>>) -> Result<Self> {
        let x = Self::start_point(&domain, x1)?;
        let d = domain.dim();
        Self::build(
            domain,
            Some(Schedule::DaAdaptiveScale { d: scale }),
            LearnerState::DaAdaptive(DaAdaptiveState { x1: x.clone(), x, gradient_sum: vec![0.0; d], v: 0.0, t: 0 }),
        )
    }

    /// Optimistic AdaGrad. `h1` defaults to zero.
    pub fn oada(
        domain: BallDomain,
        eta: f64,
        gamma: GammaRule,
        hint_rule: HintRule,
        x1: Option<Vec<f64>>,
        h1: Option<Vec<f64>>,
    ) -> Result<Self> {
        let x = Self::start_point(&domain, x1)?;
        let d = domain.dim();
        let hint = match (hint_rule, h1) {
            (HintRule::Explicit, Some(h)) => {
                check_gradient(d, &h)?;
                h
            }
            _ => vec![0.0; d],
        };
        let mut l = Self::build(
            domain,
            Some(Schedule::OAdaRule { eta, gamma }),
            LearnerState::OAda(OAdaState { x, v: 0.0, hint, previous_gradient: vec![0.0; d], t: 0 }),
        )?;
        l.hint_rule = hint_rule;
        Ok(l)
    }

    /// Optimistic AdaGrad with reset on `domain`, whose radius is the scale.
    pub fn oadar(domain: BallDomain, chunk_length: usize) -> Result<Self> {
        if chunk_length == 0 {
            return Err(Error::InvalidArgument("chunk length must be at least 1".into()));
        }
        if domain.radius <= 0.0 {
            return Err(Error::InvalidArgument("reset learner needs a positive radius".into()));
        }
        let d = domain.dim();
        let state = OAdaRState {
            x: domain.center.clone(),
            v: 0.0,
            n: 1,
            chunk_length,
            radius: domain.radius,
            previous_gradient: vec![0.0; d],
        };
        Self::build(domain, None, LearnerState::OAdaR(state))
    }

    pub fn algorithm(&self) -> Algorithm {
        match self.state {
            LearnerState::Ogd(_) => Algorithm::Ogd,
            LearnerState::Da(_) => Algorithm::Da,
            LearnerState::AdaGrad(_) => Algorithm::AdaGrad,
            LearnerState::DaAdaptive(_) => Algorithm::DaAdaptive,
            LearnerState::OAda(_) => Algorithm::OAda,
            LearnerState::OAdaR(_) => Algorithm::OAdaR,
        }
    }

    /// Current decision `x_t`.
    pub fn x(&self) -> &[f64] {
        match &self.state {
            LearnerState::Ogd(s) => &s.x,
            LearnerState::Da(s) => &s.x,
            LearnerState::AdaGrad(s) => &s.x,
            LearnerState::DaAdaptive(s) => &s.x,
            LearnerState::OAda(s) => &s.x,
            LearnerState::OAdaR(s) => &s.x,
        }
    }

    /// Accumulator `V`, if the algorithm keeps one.
    pub fn accumulator(&self) -> Option<f64> {
        match &self.state {
            LearnerState::AdaGrad(s) => Some(s.v),
            LearnerState::DaAdaptive(s) => Some(s.v),
            LearnerState::OAda(s) => Some(s.v),
            LearnerState::OAdaR(s) => Some(s.v),
            _ => None,
        }
    }

    /// Hint `h_t` for the upcoming round (optimistic learners only).
    pub fn hint(&self) -> Option<&[f64]> {
        match &self.state {
            LearnerState::OAda(s) => Some(&s.hint),
            LearnerState::OAdaR(s) => Some(&s.previous_gradient),
            _ => None,
        }
    }

    /// Current cap `gamma_t` of an optimistic learner.
    pub fn gamma(&self) -> Option<f64> {
        match self.schedule {
            Some(Schedule::OAdaRule { gamma, .. }) => Some(gamma.value()),
            _ => None,
        }
    }

    /// Rounds played so far.
    pub fn round(&self) -> usize {
        self.round
    }

    /// Feed a per-round smoothness level to a running-max cap.
    pub fn observe_smoothness(&mut self, h: f64) {
        if let Some(Schedule::OAdaRule { gamma, .. }) = &mut self.schedule {
            gamma.observe(h);
        }
    }

    /// Consume `g_t`; returns the stepsize used this round.
    pub fn update(&mut self, g: &[f64]) -> Result<f64> {
        if let LearnerState::OAda(_) = &self.state {
            let h_next = match self.hint_rule {
                HintRule::PreviousGradient => g.to_vec(),
                HintRule::Zero => vec![0.0; g.len()],
                HintRule::Explicit => {
                    return Err(Error::InvalidState("explicit hints need update_with_hint".into()))
                }
            };
            return self.update_with_hint(g, &h_next);
        }
        let t = self.round + 1;
        let eta = match (&mut self.state, self.schedule) {
            (LearnerState::Ogd(s), Some(sch)) => {
                let eta = sch.stepsize(t, None)?;
                ogd_step(s, &self.domain, g, eta)?;
                eta
            }
            (LearnerState::Da(s), Some(sch)) => {
                let eta = sch.stepsize(t, None)?;
                da_step(s, &self.domain, g, eta)?;
                eta
            }
            (LearnerState::AdaGrad(s), Some(Schedule::AdaGradScale { eta })) => adagrad_step(s, &self.domain, g, eta)?,
            (LearnerState::DaAdaptive(s), Some(Schedule::DaAdaptiveScale { d })) => {
                da_adaptive_step(s, &self.domain, g, d)?
            }
            (LearnerState::OAdaR(s), _) => oadar_step(s, &self.domain, g)?,
            _ => return Err(Error::InvalidState("schedule does not match algorithm".into())),
        };
        self.round = t;
        Ok(eta)
    }

    /// Optimistic update with an explicit next hint `h_{t+1}`.
    pub fn update_with_hint(&mut self, g: &[f64], h_next: &[f64]) -> Result<f64> {
        let (LearnerState::OAda(s), Some(sch)) = (&mut self.state, &self.schedule) else {
            return Err(Error::InvalidState("hints are only accepted by the optimistic learner".into()));
        };
        let eta = oada_step(s, &self.domain, g, h_next, sch)?;
        self.round += 1;
        Ok(eta)
    }
}
