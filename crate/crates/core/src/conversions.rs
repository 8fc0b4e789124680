//! Online-to-batch conversions: average iterate, last-iterate anchors, and
//! the online-to-nonconvex driver.

use rand::Rng;

use crate::certify::Slack;
use crate::error::{check_dim, Error, Result};
use crate::geometry::BallDomain;
use crate::harness::LearnerSpec;
use crate::learners::{Algorithm, Learner};
use crate::linalg::{self, dot, norm};
use crate::noise::NoiseModel;
use crate::problems::Objective;
use crate::rng::{substream, Substream};
use crate::trace::{RunTrace, TraceRow};

pub fn average_iterate(xs: &[Vec<f64>]) -> Result<Vec<f64>> {
    if xs.is_empty() {
        return Err(Error::InvalidArgument("cannot average an empty sequence".into()));
    }
    Ok(linalg::mean_of(xs))
}

/// `y_{t+1} = y_t + ((T - t) / T) (x_{t+1} - x_t)`.
pub fn last_iterate_anchor_update(y: &[f64], x_t: &[f64], x_next: &[f64], t: usize, horizon: usize) -> Result<Vec<f64>> {
    if t < 1 || t > horizon {
        return Err(Error::InvalidArgument(format!("round {t} outside 1..={horizon}")));
    }
    check_dim(y.len(), x_t.len())?;
    check_dim(y.len(), x_next.len())?;
    let c = (horizon - t) as f64 / horizon as f64;
    Ok(y.iter().zip(x_t).zip(x_next).map(|((y, a), b)| y + c * (b - a)).collect())
}

/// Result of a last-iterate run: the anchor sequence and the linear-loss
/// trace `l_t(x) = <grad F(y_t), x>` the learner saw.
#[derive(Debug, Clone)]
pub struct LastIterateOutcome {
    /// `y_1..=y_T`.
    pub anchors: Vec<Vec<f64>>,
    pub trace: RunTrace,
}

impl LastIterateOutcome {
    pub fn y_final(&self) -> &[f64] {
        &self.anchors[self.anchors.len() - 1]
    }

    /// `F(y_T) - F(x) <= (1/T) sum <grad F(y_t), x_t - x>` with exact gradients.
    pub fn anchor_bound_slack(&self, f: &Objective, x: &[f64]) -> Result<Slack> {
        let n = self.trace.len() as f64;
        let lhs = f.value(1, self.y_final())? - f.value(1, x)?;
        let rhs = self.trace.rows.iter().map(|r| dot(&r.true_grad, &linalg::sub(&r.x, x))).sum::<f64>() / n;
        Ok(Slack { lhs, rhs })
    }
}

/// Drives `learner` with stochastic gradients of the fixed objective `f`
/// taken at the anchors `y_t` rather than at the decisions `x_t`.
pub fn run_last_iterate<R: Rng + ?Sized>(
    learner: &mut Learner,
    f: &Objective,
    horizon: usize,
    noise: &NoiseModel,
    g_bound: f64,
    rng: &mut R,
) -> Result<LastIterateOutcome> {
    if horizon == 0 {
        return Err(Error::Config("horizon must be at least 1".into()));
    }
    if f.horizon().is_some() {
        return Err(Error::Config("last-iterate conversion needs a fixed objective".into()));
    }
    let dom = learner.domain.clone();
    let mut trace = RunTrace::new(crate::trace::TraceHeader {
        algo: learner.algorithm(),
        d: dom.dim(),
        center: dom.center.clone(),
        radius: dom.radius,
        p: noise.spec.p,
        sigma: noise.sigma(),
        g: g_bound,
        eta: 0.0,
        gamma: f64::INFINITY,
        hint_rule: learner.hint_rule,
        chunk_length: 0,
    });
    let optimistic = learner.algorithm() == Algorithm::OAda;
    let mut y = learner.x().to_vec();
    let mut anchors = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        anchors.push(y.clone());
        let x = learner.x().to_vec();
        let s = f.noisy_gradient(1, &y, noise, rng)?;
        if optimistic {
            trace.hints.push(learner.hint().expect("optimistic hint").to_vec());
            trace.gammas.push(learner.gamma().unwrap_or(f64::INFINITY));
        }
        let eta = learner.update(&s.g)?;
        let x_next = learner.x().to_vec();
        y = last_iterate_anchor_update(&y, &x, &x_next, t, horizon)?;
        trace.rows.push(TraceRow { t, x, g: s.g, true_grad: s.true_grad, noise: s.noise, eta });
    }
    if optimistic {
        trace.hints.push(learner.hint().expect("optimistic hint").to_vec());
    }
    trace.x_end = learner.x().to_vec();
    Ok(LastIterateOutcome { anchors, trace })
}

/// Hyperparameter rule of the nonconvex conversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum O2ncPreset {
    Manual,
    Dep,
    Free,
    ExtDep,
    ExtFree,
    HolderDep,
    HolderFree,
}

impl O2ncPreset {
    pub fn name(&self) -> &'static str {
        match self {
            O2ncPreset::Manual => "manual",
            O2ncPreset::Dep => "dep",
            O2ncPreset::Free => "free",
            O2ncPreset::ExtDep => "ext-dep",
            O2ncPreset::ExtFree => "ext-free",
            O2ncPreset::HolderDep => "holder-dep",
            O2ncPreset::HolderFree => "holder-free",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        [
            O2ncPreset::Manual,
            O2ncPreset::Dep,
            O2ncPreset::Free,
            O2ncPreset::ExtDep,
            O2ncPreset::ExtFree,
            O2ncPreset::HolderDep,
            O2ncPreset::HolderFree,
        ]
        .into_iter()
        .find(|p| p.name() == s)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown preset '{s}'")))
    }
}

/// Problem constants consumed by the dependent presets.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct O2ncParams {
    pub g: Option<f64>,
    pub h: Option<f64>,
    pub nu: Option<f64>,
    pub sigma: Option<f64>,
    pub p: Option<f64>,
    /// Initial gap `F(y_0) - F_*`.
    pub gap: Option<f64>,
    /// Chunk length for the manual preset.
    pub chunk_length: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct O2ncConfig {
    /// Gradient budget.
    pub n: usize,
    /// Number of chunks, `floor(N / T)`.
    pub k: usize,
    /// Chunk length.
    pub t: usize,
    pub delta: f64,
    /// Inner-ball radius `delta / T`.
    pub radius: f64,
    pub preset: O2ncPreset,
}

impl O2ncConfig {
    pub fn rounds(&self) -> usize {
        self.k * self.t
    }

    /// `K T >= N / 4`.
    pub fn budget_invariant(&self) -> bool {
        4 * self.k * self.t >= self.n
    }
}

fn need(v: Option<f64>, name: &str, preset: O2ncPreset) -> Result<f64> {
    v.ok_or_else(|| Error::Config(format!("preset {} needs parameter {name}", preset.name())))
}

fn ceil_pos(x: f64) -> usize {
    if x.is_finite() && x > 0.0 {
        x.ceil() as usize
    } else if x.is_infinite() {
        usize::MAX
    } else {
        0
    }
}

/// Chunk length, chunk count and inner radius for a preset.
pub fn o2nc_preset(preset: O2ncPreset, n: usize, delta: f64, params: &O2ncParams) -> Result<O2ncConfig> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("budget N must be at least 2, got {n}")));
    }
    let nf = n as f64;
    let half = n.div_ceil(2);
    let positive_delta = |d: f64| {
        if d > 0.0 && d.is_finite() {
            Ok(d)
        } else {
            Err(Error::InvalidArgument(format!("delta must be positive, got {d}")))
        }
    };
    let mut delta = delta;
    let dep_terms = |delta: f64| -> Result<(usize, usize)> {
        let g = need(params.g, "G", preset)?;
        let gap = need(params.gap, "Delta", preset)?;
        let sigma = need(params.sigma, "sigma", preset)?;
        let p = need(params.p, "p", preset)?;
        let a = ceil_pos((delta * g * nf / gap).powf(2.0 / 3.0));
        let b = ceil_pos((delta * sigma * nf / gap).powf(p / (2.0 * p - 1.0)));
        Ok((a, b))
    };
    let t = match preset {
        O2ncPreset::Manual => need(params.chunk_length.map(|t| t as f64), "T", preset)? as usize,
        O2ncPreset::Dep => {
            delta = positive_delta(delta)?;
            let (a, b) = dep_terms(delta)?;
            half.min(a.max(b))
        }
        O2ncPreset::Free | O2ncPreset::ExtFree => {
            delta = positive_delta(delta)?;
            half.min(ceil_pos((delta * nf).powf(2.0 / 3.0)))
        }
        O2ncPreset::ExtDep => {
            delta = positive_delta(delta)?;
            let (a, b) = dep_terms(delta)?;
            let h = need(params.h, "H", preset)?;
            let nu = need(params.nu, "nu", preset)?;
            let gap = need(params.gap, "Delta", preset)?;
            let c = ceil_pos((delta.powf(1.0 + nu) * h * nf / gap).powf(2.0 / (3.0 + 2.0 * nu)));
            half.min(a.max(b).max(c))
        }
        O2ncPreset::HolderDep => {
            let h = need(params.h, "H", preset)?;
            let nu = need(params.nu, "nu", preset)?;
            let sigma = need(params.sigma, "sigma", preset)?;
            let p = need(params.p, "p", preset)?;
            let gap = need(params.gap, "Delta", preset)?;
            let r = p * nu + (p - 1.0) * (1.0 + nu);
            let core = sigma.powf(p * (1.0 + nu) / r) * nf.powf(p * nu / r) / (h.powf(p / r) * gap.powf(p * nu / r));
            let t = half.min(ceil_pos(core + 1.0));
            delta = (gap * t as f64 / (h * nf)).powf(1.0 / (1.0 + nu));
            t
        }
        O2ncPreset::HolderFree => {
            delta = nf.powf(-0.25);
            ceil_pos(nf.sqrt())
        }
    };
    let t = t.max(1);
    if preset == O2ncPreset::Manual {
        positive_delta(delta)?;
        if t > n {
            return Err(Error::Config(format!("chunk length {t} exceeds budget {n}")));
        }
    }
    let k = n / t;
    let cfg = O2ncConfig { n, k, t, delta, radius: delta / t as f64, preset };
    if !cfg.budget_invariant() {
        return Err(Error::Config(format!("K T = {} is below N / 4 for N = {n}", k * t)));
    }
    Ok(cfg)
}

/// Trajectory of one conversion run. Index `n - 1` holds round `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct O2ncTrace {
    /// `y_0..=y_{KT}`.
    pub y: Vec<Vec<f64>>,
    pub x: Vec<Vec<f64>>,
    pub z: Vec<Vec<f64>>,
    pub s: Vec<f64>,
    pub g: Vec<Vec<f64>>,
    /// Exact gradients `grad F(z_n)`.
    pub true_grad: Vec<Vec<f64>>,
    /// Per-chunk means of `z_n`.
    pub z_bar: Vec<Vec<f64>>,
    /// Per-chunk `|| (1/T) sum grad F(z_n) ||`.
    pub surrogate: Vec<f64>,
    /// Inner-learner trace, chunks concatenated.
    pub inner: RunTrace,
}

/// Summary of one conversion run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct O2ncReport {
    /// `(1/K) sum_k surrogate_k`.
    pub mean_surrogate: f64,
    /// Largest `||z_n - z_bar_k||` over the run.
    pub max_spread: f64,
    /// `F(y_KT) - F(y_0) - sum <g_n, x_n>`.
    pub identity_residual: f64,
    pub final_value: f64,
    /// `(1/K) sum_k ||grad F(z_bar_k)||`.
    pub mean_grad_at_centers: f64,
}

/// `|| (1/T) sum_{n in chunk k} grad F(z_n) ||` for chunk `k` (1-based).
pub fn chunk_surrogate_norm(trace: &O2ncTrace, chunk_length: usize, k: usize, f: &Objective) -> Result<f64> {
    let chunks = trace.z.len() / chunk_length.max(1);
    if k < 1 || k > chunks {
        return Err(Error::InvalidArgument(format!("chunk {k} outside 1..={chunks}")));
    }
    let d = f.dim();
    let mut acc = vec![0.0; d];
    for z in &trace.z[(k - 1) * chunk_length..k * chunk_length] {
        linalg::add_assign(&mut acc, &f.gradient(1, z)?);
    }
    Ok(norm(&acc) / chunk_length as f64)
}

/// Runs the conversion for `K T` rounds. Every inner learner except the
/// reset learner is rebuilt at each chunk boundary; the reset learner keeps
/// one instance and resets itself.
pub fn run_o2nc(
    cfg: &O2ncConfig,
    inner: &LearnerSpec,
    f: &Objective,
    noise: &NoiseModel,
    y0: &[f64],
    g_bound: f64,
    seed: u64,
) -> Result<(O2ncTrace, O2ncReport)> {
    check_dim(f.dim(), y0.len())?;
    if f.horizon().is_some() {
        return Err(Error::Config("nonconvex conversion needs a fixed objective".into()));
    }
    if !(cfg.radius > 0.0) {
        return Err(Error::Config("inner radius must be positive".into()));
    }
    let d = y0.len();
    let ball = BallDomain::origin(d, cfg.radius)?;
    let mut noise_rng = substream(seed, Substream::Noise);
    let mut s_rng = substream(seed, Substream::Interpolation);
    let spec = LearnerSpec { chunk_length: Some(cfg.t), ..inner.clone() };
    let resets_itself = spec.algo == Algorithm::OAdaR;
    let mut learner = spec.build(&ball, g_bound, noise, None, cfg.t)?;
    let rounds = cfg.rounds();
    let mut tr = O2ncTrace {
        y: vec![y0.to_vec()],
        x: Vec::with_capacity(rounds),
        z: Vec::with_capacity(rounds),
        s: Vec::with_capacity(rounds),
        g: Vec::with_capacity(rounds),
        true_grad: Vec::with_capacity(rounds),
        z_bar: Vec::with_capacity(cfg.k),
        surrogate: Vec::with_capacity(cfg.k),
        inner: RunTrace::new(crate::trace::TraceHeader {
            algo: spec.algo,
            d,
            center: ball.center.clone(),
            radius: ball.radius,
            p: noise.spec.p,
            sigma: noise.sigma(),
            g: g_bound,
            eta: 0.0,
            gamma: f64::INFINITY,
            hint_rule: spec.hint_rule,
            chunk_length: cfg.t,
        }),
    };
    let mut y = y0.to_vec();
    let mut linear_sum = 0.0;
    let mut max_spread: f64 = 0.0;
    let mut center_grads = 0.0;
    for k in 0..cfg.k {
        if k > 0 && !resets_itself {
            learner = spec.build(&ball, g_bound, noise, None, cfg.t)?;
        }
        let lo = tr.z.len();
        for _ in 0..cfg.t {
            let x = learner.x().to_vec();
            let s: f64 = s_rng.random();
            let z = linalg::axpy(&y, s, &x);
            let sample = f.noisy_gradient(1, &z, noise, &mut noise_rng)?;
            let eta = learner.update(&sample.g)?;
            linear_sum += dot(&sample.g, &x);
            y = linalg::add(&y, &x);
            tr.inner.rows.push(TraceRow {
                t: tr.inner.rows.len() + 1,
                x: x.clone(),
                g: sample.g.clone(),
                true_grad: sample.true_grad.clone(),
                noise: sample.noise,
                eta,
            });
            tr.y.push(y.clone());
            tr.x.push(x);
            tr.z.push(z);
            tr.s.push(s);
            tr.g.push(sample.g);
            tr.true_grad.push(sample.true_grad);
        }
        let zs = &tr.z[lo..];
        let z_bar = linalg::mean_of(zs);
        for z in zs {
            max_spread = max_spread.max(linalg::dist(z, &z_bar));
        }
        let mean_grad = linalg::mean_of(&tr.true_grad[lo..]);
        tr.surrogate.push(norm(&mean_grad));
        center_grads += norm(&f.gradient(1, &z_bar)?);
        tr.z_bar.push(z_bar);
    }
    tr.inner.x_end = learner.x().to_vec();
    let final_value = f.value(1, &y)?;
    let kf = cfg.k.max(1) as f64;
    let report = O2ncReport {
        mean_surrogate: tr.surrogate.iter().sum::<f64>() / kf,
        max_spread,
        identity_residual: final_value - f.value(1, y0)? - linear_sum,
        final_value,
        mean_grad_at_centers: center_grads / kf,
    };
    Ok((tr, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::Algorithm;

    #[test]
    fn average_examples() {
        assert_eq!(average_iterate(&[vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap(), vec![1.0, 0.0]);
        assert_eq!(average_iterate(&[vec![0.3, -0.1]]).unwrap(), vec![0.3, -0.1]);
        assert_eq!(average_iterate(&vec![vec![0.5]; 4]).unwrap(), vec![0.5]);
        assert!(average_iterate(&[]).is_err());
    }

    #[test]
    fn anchor_examples() {
        assert_eq!(last_iterate_anchor_update(&[0.0, 0.0], &[0.0, 0.0], &[1.0, 0.0], 1, 4).unwrap(), vec![0.75, 0.0]);
        assert_eq!(last_iterate_anchor_update(&[0.2], &[0.0], &[1.0], 4, 4).unwrap(), vec![0.2]);
        assert_eq!(last_iterate_anchor_update(&[0.2], &[0.7], &[0.7], 2, 4).unwrap(), vec![0.2]);
        assert!(last_iterate_anchor_update(&[0.2], &[0.7], &[0.7], 5, 4).is_err());
        assert!(last_iterate_anchor_update(&[0.2], &[0.7], &[0.7], 0, 4).is_err());
    }

    #[test]
    fn preset_examples() {
        let params = O2ncParams { g: Some(1.0), gap: Some(1.0), sigma: Some(1.0), p: Some(1.5), ..Default::default() };
        let dep = o2nc_preset(O2ncPreset::Dep, 1024, 0.1, &params).unwrap();
        assert_eq!((dep.t, dep.k), (33, 31));
        assert!((dep.radius - 0.1 / 33.0).abs() < 1e-18);
        let free = o2nc_preset(O2ncPreset::Free, 1024, 0.1, &O2ncParams::default()).unwrap();
        assert_eq!((free.t, free.k), (22, 46));
        let hf = o2nc_preset(O2ncPreset::HolderFree, 256, 0.0, &O2ncParams::default()).unwrap();
        assert_eq!(hf.t, 16);
        assert_eq!(hf.delta, 0.25);
        assert!(matches!(o2nc_preset(O2ncPreset::Dep, 1024, 0.1, &O2ncParams::default()), Err(Error::Config(_))));
        assert!(o2nc_preset(O2ncPreset::Free, 1, 0.1, &O2ncParams::default()).is_err());
    }

    #[test]
    fn linear_objective_surrogate_is_gradient_norm() {
        // A fixed objective with constant gradient: AbsDistance far from x*.
        let f = Objective::AbsDistance { g: 2.0, x_star: vec![100.0, 0.0] };
        let cfg = o2nc_preset(O2ncPreset::Free, 64, 0.1, &O2ncParams::default()).unwrap();
        let (tr, rep) = run_o2nc(&cfg, &LearnerSpec::new(Algorithm::AdaGrad), &f, &NoiseModel::none(), &[0.0, 0.0], 2.0, 3).unwrap();
        for s in &tr.surrogate {
            assert!((s - 2.0).abs() < 1e-9);
        }
        assert!(rep.max_spread <= cfg.delta * (1.0 + 1e-12));
    }

    #[test]
    fn surrogate_cancels_opposite_gradients() {
        let f = Objective::SaturatedAbs { d: 1 };
        let tr = O2ncTrace {
            y: vec![],
            x: vec![],
            z: vec![vec![0.5], vec![-0.5], vec![3.0], vec![-4.0]],
            s: vec![],
            g: vec![],
            true_grad: vec![],
            z_bar: vec![],
            surrogate: vec![],
            inner: RunTrace::new(crate::trace::TraceHeader {
                algo: Algorithm::Ogd,
                d: 1,
                center: vec![0.0],
                radius: 1.0,
                p: 2.0,
                sigma: 0.0,
                g: 1.0,
                eta: 0.0,
                gamma: f64::INFINITY,
                hint_rule: crate::learners::HintRule::Zero,
                chunk_length: 2,
            }),
        };
        assert_eq!(chunk_surrogate_norm(&tr, 2, 1, &f).unwrap(), 0.0);
        assert_eq!(chunk_surrogate_norm(&tr, 2, 2, &f).unwrap(), 0.0);
        assert!(chunk_surrogate_norm(&tr, 2, 3, &f).is_err());
    }
}
