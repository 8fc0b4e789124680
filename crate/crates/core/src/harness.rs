//! Runs, seed sweeps, regret accounting, exponent fits, and persistence.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::geometry::BallDomain;
use crate::learners::{Algorithm, GammaRule, HintRule, Learner, Schedule};
use crate::linalg::{self, dot};
use crate::noise::NoiseModel;
use crate::problems::{LinearAdversary, Objective, ProblemKind};
use crate::rng::{derive_seed, substream, Substream};
use crate::trace::{RunTrace, TraceHeader, TraceRow};

pub use crate::trace;

/// Problem family plus its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    /// Lipschitz level of linear and absolute-distance losses.
    pub g: f64,
    /// Smoothness level of quadratic and Hölder losses.
    pub h: f64,
    pub nu: f64,
    pub mu: f64,
    /// Linear adversary; defaults to i.i.d. sphere vectors of norm `g`.
    pub adversary: Option<LinearAdversary>,
    /// Minimiser of fixed objectives; defaults to `center + (r/2) * (1,..,1)/sqrt d`.
    pub x_star: Option<Vec<f64>>,
}

impl ProblemSpec {
    pub fn new(kind: ProblemKind) -> Self {
        Self { kind, g: 1.0, h: 1.0, nu: 0.5, mu: 1.0, adversary: None, x_star: None }
    }

    pub fn linear(adversary: LinearAdversary) -> Self {
        let g = adversary.lipschitz();
        Self { g, adversary: Some(adversary), ..Self::new(ProblemKind::Linear) }
    }

    fn default_x_star(domain: &BallDomain) -> Vec<f64> {
        let d = domain.dim();
        let s = 0.5 * domain.radius / (d as f64).sqrt();
        domain.center.iter().map(|c| c + s).collect()
    }

    /// Objective for one run; linear sequences draw from `rng`.
    pub fn build<R: rand::Rng + ?Sized>(&self, domain: &BallDomain, rounds: usize, rng: &mut R) -> Result<Objective> {
        let d = domain.dim();
        let x_star = match &self.x_star {
            Some(x) => {
                check_dim(d, x.len())?;
                x.clone()
            }
            None => Self::default_x_star(domain),
        };
        Ok(match self.kind {
            ProblemKind::Linear => {
                let adv = self.adversary.clone().unwrap_or(LinearAdversary::Sphere { g: self.g });
                Objective::LinearSeq { ws: adv.generate(d, rounds, rng)?, g: adv.lipschitz() }
            }
            ProblemKind::Abs => Objective::AbsDistance { g: self.g, x_star },
            ProblemKind::Quad => Objective::Quadratic { h: self.h, x_star },
            ProblemKind::Holder => Objective::HolderPower { h: self.h, nu: self.nu, x_star },
            ProblemKind::Strong => Objective::StrongQuadratic { mu: self.mu, x_star },
            ProblemKind::SatAbs => Objective::SaturatedAbs { d },
        })
    }
}

/// Algorithm plus optional overrides of its default tuning.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerSpec {
    pub algo: Algorithm,
    /// Round-indexed schedule for OGD / DA; defaults to the known-parameter
    /// convex schedule (or `1/(mu t)` on strongly convex problems).
    pub schedule: Option<Schedule>,
    /// Base stepsize of the adaptive learners; defaults to `diameter / sqrt 2`.
    pub eta: Option<f64>,
    pub gamma: GammaRule,
    pub hint_rule: HintRule,
    /// Reset period of the reset learner; defaults to `ceil(sqrt T)`.
    pub chunk_length: Option<usize>,
}

impl LearnerSpec {
    pub fn new(algo: Algorithm) -> Self {
        Self { algo, schedule: None, eta: None, gamma: GammaRule::Infinite, hint_rule: HintRule::PreviousGradient, chunk_length: None }
    }

    pub fn with_schedule(mut self, s: Schedule) -> Self {
        self.schedule = Some(s);
        self
    }

    /// Builds the learner. `g_bound` and `noise` feed the known-parameter
    /// schedules; `problem` selects the strongly convex default.
    pub fn build(
        &self,
        domain: &BallDomain,
        g_bound: f64,
        noise: &NoiseModel,
        problem: Option<&ProblemSpec>,
        horizon: usize,
    ) -> Result<Learner> {
        let diam = domain.diameter();
        let eta = self.eta.unwrap_or(diam / std::f64::consts::SQRT_2);
        let fixed = || -> Schedule {
            if let Some(s) = self.schedule {
                return s;
            }
            match problem {
                Some(p) if p.kind == ProblemKind::Strong => Schedule::OgdStrong { mu: p.mu },
                _ => Schedule::OgdConvex { d: diam, g: g_bound.max(f64::MIN_POSITIVE), sigma: noise.sigma(), p: noise.spec.p },
            }
        };
        match self.algo {
            Algorithm::Ogd => Learner::ogd(domain.clone(), fixed(), None),
            Algorithm::Da => Learner::da(domain.clone(), fixed(), None),
            Algorithm::AdaGrad => Learner::adagrad(domain.clone(), eta, None),
            Algorithm::DaAdaptive => Learner::da_adaptive(domain.clone(), diam, None),
            Algorithm::OAda => Learner::oada(domain.clone(), eta, self.gamma, self.hint_rule, None, None),
            Algorithm::OAdaR => {
                let len = self.chunk_length.unwrap_or_else(|| ((horizon as f64).sqrt().ceil() as usize).max(1));
                Learner::oadar(domain.clone(), len)
            }
        }
    }
}

/// Fully specified single run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub learner: LearnerSpec,
    pub problem: ProblemSpec,
    pub domain: BallDomain,
    pub horizon: usize,
    pub noise: NoiseModel,
    pub seed: u64,
}

/// Regret accounting against one comparator.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretLedger {
    pub comparator: Vec<f64>,
    pub learner_loss: f64,
    pub comparator_loss: f64,
    /// `l_t(x_t) - l_t(x)` per round.
    pub increments: Vec<f64>,
    /// `sum <g_t, x_t - x>`.
    pub linearized_noisy: f64,
    /// `sum <grad l_t(x_t), x_t - x>`.
    pub linearized_exact: f64,
}

impl RegretLedger {
    pub fn from_trace(trace: &RunTrace, obj: &Objective, comparator: &[f64]) -> Result<Self> {
        check_dim(obj.dim(), comparator.len())?;
        let mut led = Self {
            comparator: comparator.to_vec(),
            learner_loss: 0.0,
            comparator_loss: 0.0,
            increments: Vec::with_capacity(trace.len()),
            linearized_noisy: 0.0,
            linearized_exact: 0.0,
        };
        for r in &trace.rows {
            let a = obj.value(r.t, &r.x)?;
            let b = obj.value(r.t, comparator)?;
            led.learner_loss += a;
            led.comparator_loss += b;
            led.increments.push(a - b);
            let diff = linalg::sub(&r.x, comparator);
            led.linearized_noisy += dot(&r.g, &diff);
            led.linearized_exact += dot(&r.true_grad, &diff);
        }
        Ok(led)
    }

    pub fn regret(&self) -> f64 {
        self.learner_loss - self.comparator_loss
    }
}

/// Output of [`run_oco`].
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub trace: RunTrace,
    pub objective: Objective,
    /// Against the best fixed decision in hindsight (which is the projected
    /// minimiser for fixed objectives).
    pub ledger: RegretLedger,
    pub comparator_kind: &'static str,
    /// `F(mean x_t) - min F` for fixed convex objectives.
    pub average_subopt: Option<f64>,
    /// `F(x_T) - min F` for fixed convex objectives.
    pub last_subopt: Option<f64>,
}

fn trace_header(learner: &Learner, domain: &BallDomain, noise: &NoiseModel, g_bound: f64) -> TraceHeader {
    let (eta, chunk) = match (learner.schedule, &learner.state) {
        (Some(Schedule::AdaGradScale { eta }), _) | (Some(Schedule::OAdaRule { eta, .. }), _) => (eta, 0),
        (Some(Schedule::DaAdaptiveScale { d }), _) => (d, 0),
        (_, crate::learners::LearnerState::OAdaR(s)) => (std::f64::consts::SQRT_2 * s.radius, s.chunk_length),
        _ => (0.0, 0),
    };
    TraceHeader {
        algo: learner.algorithm(),
        d: domain.dim(),
        center: domain.center.clone(),
        radius: domain.radius,
        p: noise.spec.p,
        sigma: noise.sigma(),
        g: g_bound,
        eta,
        gamma: learner.gamma().unwrap_or(f64::INFINITY),
        hint_rule: learner.hint_rule,
        chunk_length: chunk,
    }
}

/// Drives `learner` on `obj` for `horizon` rounds, recording a white-box trace.
pub fn drive<R: rand::Rng + ?Sized>(
    learner: &mut Learner,
    obj: &Objective,
    noise: &NoiseModel,
    horizon: usize,
    g_bound: f64,
    rng: &mut R,
) -> Result<RunTrace> {
    let domain = learner.domain.clone();
    let mut trace = RunTrace::new(trace_header(learner, &domain, noise, g_bound));
    let optimistic = learner.algorithm() == Algorithm::OAda;
    trace.rows.reserve(horizon);
    for t in 1..=horizon {
        let x = learner.x().to_vec();
        let s = obj.noisy_gradient(t, &x, noise, rng)?;
        if optimistic {
            trace.hints.push(learner.hint().expect("optimistic hint").to_vec());
            trace.gammas.push(learner.gamma().unwrap_or(f64::INFINITY));
        }
        let eta = learner.update(&s.g)?;
        trace.rows.push(TraceRow { t, x, g: s.g, true_grad: s.true_grad, noise: s.noise, eta });
    }
    if optimistic {
        trace.hints.push(learner.hint().expect("optimistic hint").to_vec());
    }
    trace.x_end = learner.x().to_vec();
    Ok(trace)
}

/// One online run with full white-box trace and regret ledger.
pub fn run_oco(spec: &RunSpec) -> Result<RunOutcome> {
    if spec.horizon == 0 {
        return Err(Error::Config("horizon must be at least 1".into()));
    }
    let domain = &spec.domain;
    let mut env = substream(spec.seed, Substream::Environment);
    let mut noise_rng = substream(spec.seed, Substream::Noise);
    let obj = spec.problem.build(domain, spec.horizon, &mut env)?;
    let g_bound = obj.lipschitz_on(domain);
    let mut learner = spec.learner.build(domain, g_bound, &spec.noise, Some(&spec.problem), spec.horizon)?;
    let trace = drive(&mut learner, &obj, &spec.noise, spec.horizon, g_bound, &mut noise_rng)?;
    let comparator = obj.best_comparator(domain)?;
    let ledger = RegretLedger::from_trace(&trace, &obj, &comparator)?;
    let (kind, avg, last) = match obj.min_value() {
        Some(fmin) if spec.problem.kind.is_convex() => {
            let xbar = crate::conversions::average_iterate(&trace.iterates())?;
            let last = &trace.rows[trace.len() - 1].x;
            ("minimizer", Some(obj.value(1, &xbar)? - fmin), Some(obj.value(1, last)? - fmin))
        }
        Some(_) => ("minimizer", None, None),
        None => ("hindsight", None, None),
    };
    Ok(RunOutcome { trace, objective: obj, ledger, comparator_kind: kind, average_subopt: avg, last_subopt: last })
}

/// Least-squares fit of `log value = slope * log T + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: usize,
}

pub fn fit_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 5 {
        return Err(Error::InvalidArgument(format!("need at least 5 points, got {}", points.len())));
    }
    for w in points.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::InvalidArgument("T values must be strictly increasing".into()));
        }
    }
    if let Some(&(t, v)) = points.iter().find(|(t, v)| !(*v > 0.0 && *t > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("log fit needs positive finite values, got ({t}, {v})")));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(SlopeFit { slope, intercept, r2, points: points.len() })
}

/// One sweep cell's result; also one CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub algo: Algorithm,
    pub problem: ProblemKind,
    pub d: usize,
    pub p: f64,
    pub sigma: f64,
    pub horizon: usize,
    pub seed: u64,
    pub final_regret: f64,
    pub final_subopt: f64,
    pub comparator_kind: String,
}

pub const CSV_HEADER: &str = "algo,problem,d,p,sigma,T,seed,final_regret,final_subopt,comparator_kind";

impl SweepRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.algo.name(),
            self.problem.name(),
            self.d,
            self.p,
            self.sigma,
            self.horizon,
            self.seed,
            self.final_regret,
            self.final_subopt,
            self.comparator_kind
        )
    }

    pub fn from_csv(line: &str, lineno: usize) -> Result<Self> {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        let perr = |msg: String| Error::Parse { line: lineno, msg };
        if f.len() != 10 {
            return Err(perr(format!("expected 10 columns, got {}", f.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| perr(format!("'{s}': {e}")));
        let int = |s: &str| s.parse::<u64>().map_err(|e| perr(format!("'{s}': {e}")));
        Ok(Self {
            algo: Algorithm::parse(f[0])?,
            problem: ProblemKind::parse(f[1])?,
            d: int(f[2])? as usize,
            p: num(f[3])?,
            sigma: num(f[4])?,
            horizon: int(f[5])? as usize,
            seed: int(f[6])?,
            final_regret: num(f[7])?,
            final_subopt: num(f[8])?,
            comparator_kind: f[9].to_string(),
        })
    }
}

/// Grid of runs: every learner × problem × noise × horizon × seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub learners: Vec<LearnerSpec>,
    pub problems: Vec<ProblemSpec>,
    pub noises: Vec<NoiseModel>,
    pub domain: BallDomain,
    pub horizons: Vec<usize>,
    pub seeds: usize,
    pub master_seed: u64,
}

impl SweepSpec {
    pub fn cell_count(&self) -> usize {
        self.learners.len() * self.problems.len() * self.noises.len() * self.horizons.len() * self.seeds
    }

    /// Run specification of cell `index` (row-major in the field order above).
    pub fn cell(&self, index: usize) -> RunSpec {
        let mut i = index / self.seeds;
        let h = i % self.horizons.len();
        i /= self.horizons.len();
        let n = i % self.noises.len();
        i /= self.noises.len();
        let pr = i % self.problems.len();
        i /= self.problems.len();
        RunSpec {
            learner: self.learners[i].clone(),
            problem: self.problems[pr].clone(),
            domain: self.domain.clone(),
            horizon: self.horizons[h],
            noise: self.noises[n],
            seed: derive_seed(self.master_seed, index as u64),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

/// Summary of one `(algo, problem, p, sigma, T)` group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub horizon: usize,
    pub mean: f64,
    pub median: f64,
    pub count: usize,
}

fn mean_median(mut v: Vec<f64>) -> (f64, f64) {
    let n = v.len();
    let mean = v.iter().sum::<f64>() / n as f64;
    v.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) };
    (mean, median)
}

/// Which column an aggregate summarises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Regret,
    Subopt,
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(64 * (self.rows.len() + 1));
        s.push_str(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.to_csv());
            s.push('\n');
        }
        s
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if i == 0 {
                if line.trim() != CSV_HEADER {
                    return Err(Error::Parse { line: 1, msg: "unexpected CSV header".into() });
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            rows.push(SweepRow::from_csv(&line, i + 1)?);
        }
        Ok(Self { rows })
    }

    /// Distinct `(algo, problem, p, sigma)` groups in first-seen order.
    pub fn groups(&self) -> Vec<(Algorithm, ProblemKind, f64, f64)> {
        let mut out: Vec<(Algorithm, ProblemKind, f64, f64)> = Vec::new();
        for r in &self.rows {
            let key = (r.algo, r.problem, r.p, r.sigma);
            if !out.contains(&key) {
                out.push(key);
            }
        }
        out
    }

    /// Mean and median over seeds per horizon for one group, skipping NaN cells.
    pub fn aggregate(&self, algo: Algorithm, problem: ProblemKind, p: f64, sigma: f64, metric: Metric) -> Vec<Aggregate> {
        let mut horizons: Vec<usize> = self
            .rows
            .iter()
            .filter(|r| r.algo == algo && r.problem == problem && r.p == p && r.sigma == sigma)
            .map(|r| r.horizon)
            .collect();
        horizons.sort_unstable();
        horizons.dedup();
        horizons
            .into_iter()
            .filter_map(|t| {
                let vals: Vec<f64> = self
                    .rows
                    .iter()
                    .filter(|r| r.algo == algo && r.problem == problem && r.p == p && r.sigma == sigma && r.horizon == t)
                    .map(|r| match metric {
                        Metric::Regret => r.final_regret,
                        Metric::Subopt => r.final_subopt,
                    })
                    .filter(|v| !v.is_nan())
                    .collect();
                if vals.is_empty() {
                    return None;
                }
                let count = vals.len();
                let (mean, median) = mean_median(vals);
                Some(Aggregate { horizon: t, mean, median, count })
            })
            .collect()
    }
}

fn row_for(spec: &RunSpec, seed_index: u64) -> SweepRow {
    let base = |regret: f64, subopt: f64, kind: String| SweepRow {
        algo: spec.learner.algo,
        problem: spec.problem.kind,
        d: spec.domain.dim(),
        p: spec.noise.spec.p,
        sigma: spec.noise.sigma(),
        horizon: spec.horizon,
        seed: seed_index,
        final_regret: regret,
        final_subopt: subopt,
        comparator_kind: kind,
    };
    match run_oco(spec) {
        Ok(out) => base(out.ledger.regret(), out.average_subopt.unwrap_or(f64::NAN), out.comparator_kind.into()),
        // A failed cell keeps its row so the grid stays rectangular.
        Err(_) => base(f64::NAN, f64::NAN, "error".into()),
    }
}

/// Executes every cell (in parallel) and returns rows in cell order.
pub fn sweep(spec: &SweepSpec) -> Result<SweepResult> {
    if spec.seeds == 0 || spec.horizons.is_empty() || spec.learners.is_empty() || spec.problems.is_empty() || spec.noises.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    let rows = (0..spec.cell_count())
        .into_par_iter()
        .map(|i| row_for(&spec.cell(i), (i % spec.seeds) as u64))
        .collect();
    Ok(SweepResult { rows })
}

/// Self-contained log-log chart of `(T, value)` series with an optional
/// fitted line per series.
/// Labelled `(T, value)` points with an optional fitted line.
pub type ChartSeries = (String, Vec<(f64, f64)>, Option<SlopeFit>);

pub fn loglog_svg(title: &str, series: &[ChartSeries]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const M: f64 = 60.0;
    const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.1.iter().copied())
        .filter(|(t, v)| *t > 0.0 && *v > 0.0)
        .map(|(t, v)| (t.log10(), v.log10()))
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = (0.0, 1.0, 0.0, 1.0);
    if !pts.is_empty() {
        x0 = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        x1 = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        y0 = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        y1 = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    }
    let pad = |a: f64, b: f64| if b - a < 1e-9 { (a - 0.5, b + 0.5) } else { (a - 0.05 * (b - a), b + 0.05 * (b - a)) };
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);
    let sx = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
    let sy = |y: f64| H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#, W / 2.0, xml_escape(title));
    let _ = writeln!(
        s,
        r#"<g stroke="black" fill="none"><line x1="{M}" y1="{}" x2="{}" y2="{}"/><line x1="{M}" y1="{M}" x2="{M}" y2="{}"/></g>"#,
        H - M,
        W - M,
        H - M,
        H - M
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">log10 T</text>"#, W / 2.0, H - 20.0);
    let _ = writeln!(s, r#"<text x="16" y="{}" font-family="sans-serif" font-size="12" transform="rotate(-90 16 {})" text-anchor="middle">log10 value</text>"#, H / 2.0, H / 2.0);
    for (k, tick) in [(x0, y0), (x1, y1)].iter().enumerate() {
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="middle">{:.2}</text>"#, sx(if k == 0 { x0 } else { x1 }), H - M + 14.0, tick.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="end">{:.2}</text>"#, M - 4.0, sy(if k == 0 { y0 } else { y1 }) + 3.0, tick.1);
    }
    for (i, (label, points, fit)) in series.iter().enumerate() {
        let c = COLORS[i % COLORS.len()];
        for &(t, v) in points.iter().filter(|(t, v)| *t > 0.0 && *v > 0.0) {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{c}"/>"#, sx(t.log10()), sy(v.log10()));
        }
        let mut legend = xml_escape(label);
        if let Some(f) = fit {
            let ln10 = std::f64::consts::LN_10;
            let line_y = |lx: f64| (f.intercept + f.slope * lx * ln10) / ln10;
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{c}" stroke-dasharray="5,3"/>"#,
                sx(x0),
                sy(line_y(x0)),
                sx(x1),
                sy(line_y(x1))
            );
            let _ = write!(legend, " (slope {:.3})", f.slope);
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="{c}">{legend}</text>"#, M + 10.0, M + 16.0 * i as f64);
    }
    s.push_str("</svg>\n");
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
