//! Line-delimited report records and witness replay.
//!
//! Every check emits one record per line: a record type followed by
//! space-separated key=value fields, rationals always written p/q. Witness
//! lines are self-contained (system, constants, points, exact values), so a
//! witness file can be replayed later: the replayer re-evaluates the raw
//! metric and map on the recorded points and confirms the violated
//! inequality reproduces exactly.

use std::collections::BTreeMap;

use crate::axioms::{AxiomReport, Witness};
use crate::config::system_from_selector;
use crate::rational::Rational;
use crate::system::{iterate, preimages_k, AxiomConstants, System, SystemError};
use crate::with_system;

/// Render an axiom report: one header record plus one record per retained
/// witness.
pub fn axiom_report_lines(report: &AxiomReport) -> Vec<String> {
    let mut lines = Vec::with_capacity(1 + report.witnesses.len());
    let worst = report
        .worst_ratio
        .as_ref()
        .map(|r| r.to_string())
        .unwrap_or_else(|| "none".into());
    lines.push(format!(
        "axiom-report axiom={} system={} K={} beta={} gamma={} resolution={} verdict={} worst={} checked={} violations={}",
        report.axiom,
        report.system,
        report.constants.big_k,
        report.constants.beta,
        report.constants.gamma,
        report.resolution,
        report.verdict,
        worst,
        report.pairs_checked,
        report.violations,
    ));
    for w in &report.witnesses {
        lines.push(witness_line(&report.system, &report.constants, w));
    }
    lines
}

pub fn witness_line(system: &str, c: &AxiomConstants, w: &Witness) -> String {
    match w {
        Witness::Axiom1(a) => format!(
            "witness kind=axiom1 system={system} K={} beta={} gamma={} x={} y={} d={} num={} den={} hard={}",
            c.big_k, c.beta, c.gamma, a.x, a.y, a.distance, a.numerator, a.denominator, a.hard
        ),
        Witness::Axiom2(a) => format!(
            "witness kind=axiom2 system={system} K={} beta={} gamma={} x={} eps={} w={} target={} best={} preimages={}",
            c.big_k,
            c.beta,
            c.gamma,
            a.x,
            a.epsilon,
            a.w,
            a.target,
            a.best_distance,
            a.preimages
                .iter()
                .map(|(p, d)| format!("{p}~{d}"))
                .collect::<Vec<_>>()
                .join("|"),
        ),
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReplayError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: witness does not reproduce: {reason}")]
    Mismatch { line: usize, reason: String },
    #[error(transparent)]
    System(#[from] SystemError),
}

#[derive(Debug, Default)]
pub struct ReplaySummary {
    pub replayed: usize,
    pub skipped: usize,
}

fn fields_of(line: &str) -> BTreeMap<&str, &str> {
    line.split_whitespace()
        .filter_map(|tok| tok.split_once('='))
        .collect()
}

fn need<'a>(
    map: &BTreeMap<&str, &'a str>,
    key: &str,
    line: usize,
) -> Result<&'a str, ReplayError> {
    map.get(key).copied().ok_or_else(|| ReplayError::Malformed {
        line,
        reason: format!("missing field {key}"),
    })
}

fn rational(
    map: &BTreeMap<&str, &str>,
    key: &str,
    line: usize,
) -> Result<Rational, ReplayError> {
    need(map, key, line)?.parse().map_err(|_| ReplayError::Malformed {
        line,
        reason: format!("field {key} is not a rational"),
    })
}

/// Replay every witness record in the text. Non-witness lines are skipped.
pub fn replay_witnesses(text: &str) -> Result<ReplaySummary, ReplayError> {
    let mut summary = ReplaySummary::default();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if !line.starts_with("witness ") {
            if !line.is_empty() {
                summary.skipped += 1;
            }
            continue;
        }
        let fields = fields_of(line);
        let system_name = need(&fields, "system", lineno)?;
        let any = system_from_selector(system_name)?;
        let constants = AxiomConstants::new(
            rational(&fields, "beta", lineno)?,
            need(&fields, "K", lineno)?.parse().map_err(|_| ReplayError::Malformed {
                line: lineno,
                reason: "bad K".into(),
            })?,
            rational(&fields, "gamma", lineno)?,
        )?;
        match need(&fields, "kind", lineno)? {
            "axiom1" => with_system!(&any, |sys| {
                replay_axiom1(sys, &constants, &fields, lineno)?
            }),
            "axiom2" => with_system!(&any, |sys| {
                replay_axiom2(sys, &constants, &fields, lineno)?
            }),
            other => {
                return Err(ReplayError::Malformed {
                    line: lineno,
                    reason: format!("unknown witness kind {other}"),
                })
            }
        }
        summary.replayed += 1;
    }
    Ok(summary)
}

fn replay_axiom1<S: System>(
    sys: &S,
    c: &AxiomConstants,
    fields: &BTreeMap<&str, &str>,
    line: usize,
) -> Result<(), ReplayError> {
    let x = sys.parse_point(need(fields, "x", line)?)?;
    let y = sys.parse_point(need(fields, "y", line)?)?;
    let mismatch = |reason: String| ReplayError::Mismatch { line, reason };
    let d = sys.metric(&x, &y);
    if d != rational(fields, "d", line)? {
        return Err(mismatch(format!("d(x,y) recomputes to {d}")));
    }
    if d > c.beta {
        return Err(mismatch(format!("pair distance {d} exceeds beta {}", c.beta)));
    }
    let num = sys.metric(&iterate(sys, &x, c.big_k), &iterate(sys, &y, c.big_k));
    let den = sys.metric(&iterate(sys, &x, 2 * c.big_k), &iterate(sys, &y, 2 * c.big_k));
    if num != rational(fields, "num", line)? {
        return Err(mismatch(format!("numerator recomputes to {num}")));
    }
    if den != rational(fields, "den", line)? {
        return Err(mismatch(format!("denominator recomputes to {den}")));
    }
    let violated = num > &c.gamma_pow_k() * &den;
    if !violated {
        return Err(mismatch("the recorded pair does not violate the inequality".into()));
    }
    Ok(())
}

fn replay_axiom2<S: System>(
    sys: &S,
    c: &AxiomConstants,
    fields: &BTreeMap<&str, &str>,
    line: usize,
) -> Result<(), ReplayError> {
    let x = sys.parse_point(need(fields, "x", line)?)?;
    let w = sys.parse_point(need(fields, "w", line)?)?;
    let eps = rational(fields, "eps", line)?;
    let mismatch = |reason: String| ReplayError::Mismatch { line, reason };
    if sys.metric(&w, &iterate(sys, &x, c.big_k)) > eps {
        return Err(mismatch("w is not within eps of g^K(x)".into()));
    }
    let target = iterate(sys, &w, c.big_k);
    if target.to_string() != need(fields, "target", line)? {
        return Err(mismatch(format!("g^K(w) recomputes to {target}")));
    }
    let radius = &c.gamma * &eps;
    let mut best: Option<Rational> = None;
    for u in preimages_k(sys, &target, 2 * c.big_k)? {
        let du = sys.metric(&u, &x);
        if best.as_ref().is_none_or(|b| &du < b) {
            best = Some(du);
        }
    }
    let best = best.expect("nonempty preimages");
    if best != rational(fields, "best", line)? {
        return Err(mismatch(format!("best preimage distance recomputes to {best}")));
    }
    if best <= radius {
        return Err(mismatch(format!(
            "the ball B(x, {radius}) does reach the target; no violation"
        )));
    }
    Ok(())
}
