//! Pathwise regret certificates checked against recorded traces.
//!
//! Each check evaluates an inequality whose two sides are computed from the
//! trace alone, so a replayed trace gives bitwise-identical reports.

use std::f64::consts::SQRT_2;
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::BallDomain;
use crate::learners::Algorithm;
use crate::linalg::{self, dot, norm, norm_sq};
use crate::trace::RunTrace;

/// Relative slack threshold below which a check fails.
pub const TOLERANCE: f64 = 1e-9;

/// `(4p - 4)^(p - 1) / p^p`, the constant of the heavy-tail Young step.
pub fn c_of_p(p: f64) -> Result<f64> {
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::InvalidArgument(format!("p must lie in (1, 2], got {p}")));
    }
    Ok((4.0 * p - 4.0).powf(p - 1.0) / p.powf(p))
}

/// Constants used by the certificates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertConstants {
    pub p: f64,
    /// Heavy-tail Young constant, see [`c_of_p`].
    pub c_p: f64,
    /// Leading factor of the noise-split adaptive bound; comes from
    /// `sqrt(a + b) <= sqrt 2 * sqrt(max(a, b))` in the AdaGrad chain.
    pub adagrad_split: f64,
    /// Factor on `D * sqrt(V)` in the reset-learner chunk bound: diameter
    /// `2D` and base stepsize `sqrt 2 * D` give `(2D)^2 / (2 sqrt 2 D) + 2 sqrt 2 D`.
    pub oadar_factor: f64,
}

impl CertConstants {
    pub fn new(p: f64) -> Result<Self> {
        Ok(Self { p, c_p: c_of_p(p)?, adagrad_split: SQRT_2, oadar_factor: 3.0 * SQRT_2 })
    }
}

/// Two sides of one inequality `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slack {
    pub lhs: f64,
    pub rhs: f64,
}

impl Slack {
    pub fn raw(&self) -> f64 {
        self.rhs - self.lhs
    }

    /// Signed slack scaled by `max(1, |lhs|, |rhs|)`.
    pub fn relative(&self) -> f64 {
        let scale = 1f64.max(self.lhs.abs()).max(self.rhs.abs());
        self.raw() / scale
    }

    pub fn holds(&self) -> bool {
        self.relative() >= -TOLERANCE
    }
}

fn require_white_box(trace: &RunTrace) -> Result<()> {
    let d = trace.header.d;
    for r in &trace.rows {
        if r.true_grad.len() != d || r.noise.len() != d || r.g.len() != d || r.x.len() != d {
            return Err(Error::NotCertifiable(format!("round {} lacks a full noise decomposition", r.t)));
        }
        let recon = linalg::dist(&linalg::add(&r.true_grad, &r.noise), &r.g);
        if recon > 1e-9 * (1.0 + norm(&r.g)) {
            return Err(Error::NotCertifiable(format!("round {}: g differs from true_grad + noise", r.t)));
        }
    }
    Ok(())
}

fn require_lipschitz(trace: &RunTrace, g: f64) -> Result<()> {
    for r in &trace.rows {
        if norm(&r.true_grad) > g * (1.0 + 1e-12) {
            return Err(Error::NotCertifiable(format!("round {}: exact gradient exceeds G = {g}", r.t)));
        }
    }
    Ok(())
}

/// Heavy-tail noise allowance `C(p) eta^(p-1) ||eps||^p D^(2-p)`.
fn noise_term(c: &CertConstants, eta: f64, eps: &[f64], diameter: f64) -> f64 {
    let e = norm(eps);
    if e == 0.0 {
        return 0.0;
    }
    c.c_p * eta.powf(c.p - 1.0) * e.powf(c.p) * diameter.powf(2.0 - c.p)
}

/// Single-step descent inequality of projected gradient descent at round `t`.
pub fn certify_ogd_step(
    trace: &RunTrace,
    t: usize,
    comparator: &[f64],
    diameter: f64,
    g_bound: f64,
    c: &CertConstants,
) -> Result<Slack> {
    let r = trace.rows.get(t - 1).ok_or_else(|| Error::InvalidArgument(format!("round {t} not in trace")))?;
    if !(r.eta > 0.0 && r.eta.is_finite()) {
        return Err(Error::NotCertifiable(format!("round {t}: stepsize {} is not positive finite", r.eta)));
    }
    let x_next = trace.x(t + 1);
    let lhs = dot(&r.g, &linalg::sub(&r.x, comparator));
    let rhs = (linalg::dist_sq(&r.x, comparator) - linalg::dist_sq(x_next, comparator)) / (2.0 * r.eta)
        + r.eta * g_bound * g_bound
        + noise_term(c, r.eta, &r.noise, diameter);
    Ok(Slack { lhs, rhs })
}

/// Whole-run dual averaging inequality with `eta_0 = eta_1`.
pub fn certify_da_run(
    trace: &RunTrace,
    comparator: &[f64],
    diameter: f64,
    g_bound: f64,
    c: &CertConstants,
) -> Result<Slack> {
    let rows = &trace.rows;
    if rows.is_empty() {
        return Ok(Slack { lhs: 0.0, rhs: 0.0 });
    }
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for (i, r) in rows.iter().enumerate() {
        let eta_prev = if i == 0 { rows[0].eta } else { rows[i - 1].eta };
        lhs += dot(&r.g, &linalg::sub(&r.x, comparator));
        rhs += eta_prev * g_bound * g_bound + noise_term(c, eta_prev, &r.noise, diameter);
    }
    let eta_last = rows[rows.len() - 1].eta;
    rhs += linalg::dist_sq(comparator, &rows[0].x) / (2.0 * eta_last);
    Ok(Slack { lhs, rhs })
}

fn linear_regret(trace: &RunTrace, comparator: &[f64]) -> f64 {
    trace.rows.iter().map(|r| dot(&r.g, &linalg::sub(&r.x, comparator))).sum()
}

/// Adaptive-stepsize bounds for norm-AdaGrad: the noise-split form and the
/// tighter `(D^2 / (2 eta) + eta) sqrt(V_T)` it is derived from.
pub fn certify_adagrad_run(
    trace: &RunTrace,
    comparator: &[f64],
    diameter: f64,
    eta: f64,
    c: &CertConstants,
) -> Result<(Slack, Slack)> {
    let lhs = linear_regret(trace, comparator);
    let lead = diameter * diameter / (2.0 * eta) + eta;
    let v: f64 = trace.rows.iter().map(|r| norm_sq(&r.g)).sum();
    let exact: f64 = trace.rows.iter().map(|r| norm_sq(&r.true_grad)).sum();
    let noise: f64 = trace.rows.iter().map(|r| norm(&r.noise).powf(c.p)).sum();
    let split = c.adagrad_split * lead * (exact.sqrt() + noise.powf(1.0 / c.p));
    Ok((Slack { lhs, rhs: split }, Slack { lhs, rhs: lead * v.sqrt() }))
}

/// Dual averaging with `eta_t = 2D / sqrt(V_t)`:
/// `sum <g_t, x_t - x> <= D^2 / (2 eta_T) + sum eta_t ||g_t||^2`.
pub fn certify_da_adaptive_run(trace: &RunTrace, comparator: &[f64], diameter: f64) -> Result<Slack> {
    let lhs = linear_regret(trace, comparator);
    let mut rhs = 0.0;
    let mut eta_last = f64::INFINITY;
    for r in &trace.rows {
        let gg = norm_sq(&r.g);
        if gg > 0.0 {
            rhs += r.eta * gg;
        }
        eta_last = r.eta;
    }
    if eta_last.is_finite() {
        rhs += diameter * diameter / (2.0 * eta_last);
    }
    Ok(Slack { lhs, rhs })
}

/// Optimistic AdaGrad inequality before the movement terms are dropped:
/// `LHS <= D^2/(2 gamma_T) + (D^2/(2 eta) + 2 eta) sqrt(V_T)
///         - sum_{t<T} ||x_{t+1} - x_t||^2 / (4 gamma_t)
///         + <h_1, x_1 - x> - <h_{T+1}, x_{T+1} - x>`.
pub fn certify_oada_run(
    trace: &RunTrace,
    comparator: &[f64],
    diameter: f64,
    eta: f64,
    gammas: &[f64],
) -> Result<Slack> {
    let n = trace.rows.len();
    if trace.hints.len() != n + 1 || gammas.len() != n {
        return Err(Error::NotCertifiable("optimistic trace needs T+1 hints and T caps".into()));
    }
    let lhs = linear_regret(trace, comparator);
    if n == 0 {
        return Ok(Slack { lhs, rhs: 0.0 });
    }
    let v: f64 = trace.rows.iter().zip(&trace.hints).map(|(r, h)| linalg::dist_sq(&r.g, h)).sum();
    let mut rhs = (diameter * diameter / (2.0 * eta) + 2.0 * eta) * v.sqrt();
    let gamma_last = gammas[n - 1];
    if gamma_last.is_finite() {
        rhs += diameter * diameter / (2.0 * gamma_last);
    }
    for t in 1..n {
        let gt = gammas[t - 1];
        if gt.is_finite() {
            rhs -= linalg::dist_sq(trace.x(t + 1), trace.x(t)) / (4.0 * gt);
        }
    }
    rhs += dot(&trace.hints[0], &linalg::sub(trace.x(1), comparator));
    rhs -= dot(&trace.hints[n], &linalg::sub(trace.x(n + 1), comparator));
    Ok(Slack { lhs, rhs })
}

/// Per-chunk result of the reset learner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChunkSlack {
    /// `sum <g_n, x_n - v_k> <= boundary + 3 sqrt 2 D sqrt(sum ||g_n - g_{n-1}||^2)`.
    pub main: Slack,
    /// `<g_{(k-1)T}, x_{(k-1)T+1} - v_k> <= 0`.
    pub boundary: Slack,
}

/// Chunk-wise bound of the reset learner; `comparators[k]` is used on chunk
/// `k` and `radius` is the inner-ball radius.
pub fn certify_oadar_chunks(
    trace: &RunTrace,
    comparators: &[Vec<f64>],
    radius: f64,
    c: &CertConstants,
) -> Result<Vec<ChunkSlack>> {
    let len = trace.header.chunk_length;
    if len == 0 {
        return Err(Error::NotCertifiable("reset trace without a chunk length".into()));
    }
    let chunks = trace.rows.len().div_ceil(len);
    if comparators.len() < chunks {
        return Err(Error::InvalidArgument(format!("need {chunks} chunk comparators, got {}", comparators.len())));
    }
    let d = trace.header.d;
    let zero = vec![0.0; d];
    let mut out = Vec::with_capacity(chunks);
    for (k, v) in comparators.iter().enumerate().take(chunks) {
        let lo = k * len;
        let hi = ((k + 1) * len).min(trace.rows.len());
        let before: &[f64] = if lo == 0 { &zero } else { &trace.rows[lo - 1].g };
        let boundary = dot(before, &linalg::sub(&trace.rows[lo].x, v));
        let mut lhs = 0.0;
        let mut var = 0.0;
        let mut prev = before;
        for r in &trace.rows[lo..hi] {
            lhs += dot(&r.g, &linalg::sub(&r.x, v));
            var += linalg::dist_sq(&r.g, prev);
            prev = &r.g;
        }
        let rhs = boundary + c.oadar_factor * radius * var.sqrt();
        let scale = norm(before) * (norm(&trace.rows[lo].x) + norm(v));
        out.push(ChunkSlack {
            main: Slack { lhs, rhs },
            boundary: Slack { lhs: boundary / 1f64.max(scale), rhs: 0.0 },
        });
    }
    Ok(out)
}

/// Outcome of one named check across all rounds/chunks and comparators.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    /// Rounds (or chunks) covered by the check.
    pub units: usize,
    pub unit_label: &'static str,
    pub comparators: usize,
    /// Smallest relative slack seen; negative values are violations.
    pub worst_slack: f64,
}

impl CheckResult {
    fn new(name: &str, units: usize, unit_label: &'static str) -> Self {
        Self { name: name.into(), units, unit_label, comparators: 0, worst_slack: f64::INFINITY }
    }

    fn absorb(&mut self, s: &Slack) {
        let r = s.relative();
        if r < self.worst_slack || r.is_nan() {
            self.worst_slack = r;
        }
    }

    /// Largest violation, `max(0, -worst_slack)`.
    pub fn max_violation(&self) -> f64 {
        (-self.worst_slack).max(0.0)
    }

    pub fn pass(&self) -> bool {
        self.worst_slack >= -TOLERANCE
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CertReport {
    pub checks: Vec<CheckResult>,
}

impl CertReport {
    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(CheckResult::pass)
    }

    pub fn worst_slack(&self) -> f64 {
        self.checks.iter().map(|c| c.worst_slack).fold(f64::INFINITY, f64::min)
    }
}

impl fmt::Display for CertReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {}={} comparators={} max_violation={:e} worst_slack={:e} {}",
                c.name,
                c.unit_label,
                c.units,
                c.comparators,
                c.max_violation(),
                c.worst_slack,
                if c.pass() { "PASS" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

fn domain_of(trace: &RunTrace) -> Result<BallDomain> {
    BallDomain::new(trace.header.center.clone(), trace.header.radius)
}

/// Comparator minimising the exact linearised losses `sum <grad_t, x>`.
pub fn hindsight_comparator(trace: &RunTrace) -> Result<Vec<f64>> {
    let dom = domain_of(trace)?;
    let mut w = vec![0.0; trace.header.d];
    for r in &trace.rows {
        linalg::add_assign(&mut w, &r.true_grad);
    }
    Ok(dom.linear_minimizer(&w))
}

/// `count` uniform comparators from the trace's ball followed by the
/// hindsight comparator.
pub fn default_comparators<R: Rng + ?Sized>(trace: &RunTrace, count: usize, rng: &mut R) -> Result<Vec<Vec<f64>>> {
    let dom = domain_of(trace)?;
    let mut out: Vec<Vec<f64>> = (0..count).map(|_| dom.sample_uniform(rng)).collect();
    out.push(hindsight_comparator(trace)?);
    Ok(out)
}

/// Runs every certificate that applies to the trace's algorithm against each
/// comparator. Reset-learner traces use each comparator on every chunk, plus
/// the per-chunk worst case `-D * (chunk gradient sum) / norm`.
pub fn certify_trace(trace: &RunTrace, comparators: &[Vec<f64>]) -> Result<CertReport> {
    require_white_box(trace)?;
    let h = &trace.header;
    let c = CertConstants::new(h.p)?;
    let diam = h.diameter();
    let n = trace.rows.len();
    let mut checks = Vec::new();
    match h.algo {
        Algorithm::Ogd => {
            require_lipschitz(trace, h.g)?;
            let mut ck = CheckResult::new("ogd-step", n, "rounds");
            for v in comparators {
                for t in 1..=n {
                    ck.absorb(&certify_ogd_step(trace, t, v, diam, h.g, &c)?);
                }
                ck.comparators += 1;
            }
            checks.push(ck);
        }
        Algorithm::Da => {
            require_lipschitz(trace, h.g)?;
            let mut ck = CheckResult::new("da-run", n, "rounds");
            for v in comparators {
                ck.absorb(&certify_da_run(trace, v, diam, h.g, &c)?);
                ck.comparators += 1;
            }
            checks.push(ck);
        }
        Algorithm::AdaGrad => {
            let mut split = CheckResult::new("adagrad-run", n, "rounds");
            let mut tight = CheckResult::new("adagrad-run-tight", n, "rounds");
            for v in comparators {
                let (a, b) = certify_adagrad_run(trace, v, diam, h.eta, &c)?;
                split.absorb(&a);
                tight.absorb(&b);
                split.comparators += 1;
                tight.comparators += 1;
            }
            checks.push(split);
            checks.push(tight);
        }
        Algorithm::DaAdaptive => {
            let mut ck = CheckResult::new("da-adaptive-run", n, "rounds");
            for v in comparators {
                ck.absorb(&certify_da_adaptive_run(trace, v, diam)?);
                ck.comparators += 1;
            }
            checks.push(ck);
        }
        Algorithm::OAda => {
            let mut ck = CheckResult::new("oada-run", n, "rounds");
            for v in comparators {
                ck.absorb(&certify_oada_run(trace, v, diam, h.eta, &trace.gammas)?);
                ck.comparators += 1;
            }
            checks.push(ck);
        }
        Algorithm::OAdaR => {
            let len = h.chunk_length.max(1);
            let chunks = n.div_ceil(len);
            let dom = domain_of(trace)?;
            let mut main = CheckResult::new("oadar-chunk", chunks, "chunks");
            let mut bnd = CheckResult::new("oadar-boundary", chunks, "chunks");
            let mut sets: Vec<Vec<Vec<f64>>> = comparators.iter().map(|v| vec![v.clone(); chunks]).collect();
            sets.push(
                (0..chunks)
                    .map(|k| {
                        let mut w = vec![0.0; h.d];
                        for r in &trace.rows[k * len..((k + 1) * len).min(n)] {
                            linalg::add_assign(&mut w, &r.g);
                        }
                        dom.linear_minimizer(&w)
                    })
                    .collect(),
            );
            for set in &sets {
                for cs in certify_oadar_chunks(trace, set, h.radius, &c)? {
                    main.absorb(&cs.main);
                    bnd.absorb(&cs.boundary);
                }
                main.comparators += 1;
                bnd.comparators += 1;
            }
            checks.push(main);
            checks.push(bnd);
        }
    }
    Ok(CertReport { checks })
}
