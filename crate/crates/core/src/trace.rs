//! White-box run traces and their line-oriented text format.
//!
//! ```text
//! # algo=oada
//! # d=2
//! # center=0;0
//! # radius=1
//! # p=1.5
//! # sigma=1
//! # G=1
//! # eta=1.4142135623730951
//! # gamma=inf
//! # hint_rule=previous-gradient
//! # chunk_length=0
//! t, x_t[d], g_t[d], true_grad[d], noise[d], eta_t
//! ...
//! end, x_{T+1}[d]
//! hint, t, h_t[d]          (optimistic learners, t = 1..=T+1)
//! gamma, t, gamma_t        (optimistic learners, t = 1..=T)
//! ```
//! Values use the shortest round-trip decimal form; infinities are `inf`.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::learners::{Algorithm, HintRule};

#[derive(Debug, Clone, PartialEq)]
pub struct TraceHeader {
    pub algo: Algorithm,
    pub d: usize,
    pub center: Vec<f64>,
    pub radius: f64,
    pub p: f64,
    pub sigma: f64,
    /// Bound on the exact gradient norms.
    pub g: f64,
    /// Base stepsize of the adaptive learners (0 when unused).
    pub eta: f64,
    /// Constant cap of the optimistic learner (`inf` when uncapped or varying).
    pub gamma: f64,
    pub hint_rule: HintRule,
    /// Reset period of the reset learner (0 when unused).
    pub chunk_length: usize,
}

impl TraceHeader {
    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: usize,
    pub x: Vec<f64>,
    pub g: Vec<f64>,
    pub true_grad: Vec<f64>,
    pub noise: Vec<f64>,
    pub eta: f64,
}

/// Record of one online run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub header: TraceHeader,
    pub rows: Vec<TraceRow>,
    /// Decision after the last round.
    pub x_end: Vec<f64>,
    /// `h_1..=h_{T+1}` for optimistic learners, otherwise empty.
    pub hints: Vec<Vec<f64>>,
    /// `gamma_1..=gamma_T` for optimistic learners, otherwise empty.
    pub gammas: Vec<f64>,
}

impl RunTrace {
    pub fn new(header: TraceHeader) -> Self {
        let x_end = header.center.clone();
        Self { header, rows: Vec::new(), x_end, hints: Vec::new(), gammas: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `x_t` for `t` in `1..=T+1`.
    pub fn x(&self, t: usize) -> &[f64] {
        if t == self.rows.len() + 1 {
            &self.x_end
        } else {
            &self.rows[t - 1].x
        }
    }

    pub fn iterates(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.x.clone()).collect()
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        let h = &self.header;
        let mut s = String::new();
        let _ = writeln!(s, "# algo={}", h.algo.name());
        let _ = writeln!(s, "# d={}", h.d);
        let _ = writeln!(s, "# center={}", join(&h.center, ";"));
        let _ = writeln!(s, "# radius={}", h.radius);
        let _ = writeln!(s, "# p={}", h.p);
        let _ = writeln!(s, "# sigma={}", h.sigma);
        let _ = writeln!(s, "# G={}", h.g);
        let _ = writeln!(s, "# eta={}", h.eta);
        let _ = writeln!(s, "# gamma={}", h.gamma);
        let _ = writeln!(s, "# hint_rule={}", h.hint_rule.name());
        let _ = writeln!(s, "# chunk_length={}", h.chunk_length);
        w.write_all(s.as_bytes())?;
        for r in &self.rows {
            s.clear();
            let _ = write!(s, "{}, {}, {}, {}, {}, {}", r.t, join(&r.x, ", "), join(&r.g, ", "), join(&r.true_grad, ", "), join(&r.noise, ", "), r.eta);
            s.push('\n');
            w.write_all(s.as_bytes())?;
        }
        s.clear();
        let _ = writeln!(s, "end, {}", join(&self.x_end, ", "));
        for (i, hint) in self.hints.iter().enumerate() {
            let _ = writeln!(s, "hint, {}, {}", i + 1, join(hint, ", "));
        }
        for (i, g) in self.gammas.iter().enumerate() {
            let _ = writeln!(s, "gamma, {}, {}", i + 1, g);
        }
        w.write_all(s.as_bytes())?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("trace text is ASCII")
    }

    pub fn read<R: BufRead>(r: R) -> Result<Self> {
        let mut kv = std::collections::HashMap::new();
        let mut rows = Vec::new();
        let mut x_end = None;
        let mut hints = Vec::new();
        let mut gammas = Vec::new();
        let mut d = None;
        for (i, line) in r.lines().enumerate() {
            let lineno = i + 1;
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: lineno, msg };
            if let Some(rest) = line.strip_prefix('#') {
                let (k, v) = rest.trim().split_once('=').ok_or_else(|| perr("header line needs key=value".into()))?;
                let (k, v) = (k.trim().to_string(), v.trim().to_string());
                if k == "d" {
                    d = Some(v.parse::<usize>().map_err(|e| perr(e.to_string()))?);
                }
                kv.insert(k, v);
                continue;
            }
            let d = d.ok_or_else(|| perr("dimension header missing before data".into()))?;
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let nums = |xs: &[&str]| -> Result<Vec<f64>> {
                xs.iter().map(|s| parse_f64(s).map_err(|m| perr(m))).collect()
            };
            match fields[0] {
                "end" => {
                    if fields.len() != 1 + d {
                        return Err(perr(format!("end row needs {} values", d)));
                    }
                    x_end = Some(nums(&fields[1..])?);
                }
                "hint" => {
                    if fields.len() != 2 + d {
                        return Err(perr(format!("hint row needs {} values", d)));
                    }
                    hints.push(nums(&fields[2..])?);
                }
                "gamma" => {
                    if fields.len() != 3 {
                        return Err(perr("gamma row needs one value".into()));
                    }
                    gammas.push(parse_f64(fields[2]).map_err(perr)?);
                }
                first => {
                    if fields.len() != 2 + 4 * d {
                        return Err(perr(format!("round row needs {} fields, got {}", 2 + 4 * d, fields.len())));
                    }
                    let t = first.parse::<usize>().map_err(|e| perr(e.to_string()))?;
                    if t != rows.len() + 1 {
                        return Err(perr(format!("round {t} out of order")));
                    }
                    let v = nums(&fields[1..])?;
                    rows.push(TraceRow {
                        t,
                        x: v[0..d].to_vec(),
                        g: v[d..2 * d].to_vec(),
                        true_grad: v[2 * d..3 * d].to_vec(),
                        noise: v[3 * d..4 * d].to_vec(),
                        eta: v[4 * d],
                    });
                }
            }
        }
        let get = |k: &str| kv.get(k).ok_or_else(|| Error::Parse { line: 0, msg: format!("missing header '{k}'") });
        let num = |k: &str| -> Result<f64> { parse_f64(get(k)?).map_err(|msg| Error::Parse { line: 0, msg }) };
        let d = d.ok_or_else(|| Error::Parse { line: 0, msg: "missing header 'd'".into() })?;
        let center = get("center")?
            .split(';')
            .map(|s| parse_f64(s.trim()).map_err(|msg| Error::Parse { line: 0, msg }))
            .collect::<Result<Vec<f64>>>()?;
        if center.len() != d {
            return Err(Error::Parse { line: 0, msg: "center dimension differs from d".into() });
        }
        let header = TraceHeader {
            algo: Algorithm::parse(get("algo")?)?,
            d,
            center,
            radius: num("radius")?,
            p: num("p")?,
            sigma: num("sigma")?,
            g: num("G")?,
            eta: num("eta")?,
            gamma: num("gamma")?,
            hint_rule: HintRule::parse(get("hint_rule")?)?,
            chunk_length: get("chunk_length")?
                .parse()
                .map_err(|e: std::num::ParseIntError| Error::Parse { line: 0, msg: e.to_string() })?,
        };
        let x_end = x_end.ok_or_else(|| Error::Parse { line: 0, msg: "missing end row".into() })?;
        Ok(Self { header, rows, x_end, hints, gammas })
    }

    pub fn from_text(s: &str) -> Result<Self> {
        Self::read(s.as_bytes())
    }
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    s.parse::<f64>().map_err(|e| format!("bad number '{s}': {e}"))
}

fn join(v: &[f64], sep: &str) -> String {
    let mut s = String::new();
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push_str(sep);
        }
        let _ = write!(s, "{x}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunTrace {
        let header = TraceHeader {
            algo: Algorithm::OAda,
            d: 2,
            center: vec![0.0, 0.5],
            radius: 1.0,
            p: 1.5,
            sigma: 1.0,
            g: 1.0,
            eta: std::f64::consts::FRAC_1_SQRT_2,
            gamma: f64::INFINITY,
            hint_rule: HintRule::PreviousGradient,
            chunk_length: 0,
        };
        let mut tr = RunTrace::new(header);
        tr.rows.push(TraceRow {
            t: 1,
            x: vec![0.1, 1e-300],
            g: vec![0.3, -0.7],
            true_grad: vec![0.1, 0.2],
            noise: vec![0.2, -0.9],
            eta: f64::INFINITY,
        });
        tr.x_end = vec![-0.25, 0.125];
        tr.hints = vec![vec![0.0, 0.0], vec![0.3, -0.7]];
        tr.gammas = vec![f64::INFINITY];
        tr
    }

    #[test]
    fn text_round_trip_is_exact() {
        let tr = sample();
        let text = tr.to_text();
        assert_eq!(RunTrace::from_text(&text).unwrap(), tr);
    }

    #[test]
    fn malformed_rows_are_rejected() {
        let text = sample().to_text().replace("1, 0.1,", "2, 0.1,");
        assert!(matches!(RunTrace::from_text(&text), Err(Error::Parse { .. })));
        let short = sample().to_text().replace("end, -0.25, 0.125", "end, -0.25");
        assert!(RunTrace::from_text(&short).is_err());
    }
}
