//! Post-hoc checks over finished runs: Fejér monotonicity, objective
//! descent, the quasi-Fejér summability lemma and objective limits.
//!
//! Everything here is a pure function of the records.

use std::fmt::Write;

use crate::algorithms::{Algorithm, AlphaRule, IterationRecord, RunResult};
use crate::{check_dim, Result, Vector};

/// Relative tolerance for every comparison in this module.
pub const REL_TOL: f64 = 1e-9;
/// Trailing window for the liminf of the objective gap.
pub const LIMINF_WINDOW: usize = 20;
pub const CAUCHY_TOL: f64 = 1e-8;

fn leq(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + REL_TOL * lhs.abs().max(rhs.abs()).max(1.0)
}

/// Which Fejér inequality to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FejerRule {
    /// `alpha_{n+1} d_{n+1} <= alpha_n d_n - alpha_n ||x_n - x_{n+1}||^2`,
    /// with `alpha_n = 1/(2 gamma) + a_n`.
    Ppa,
    /// `alpha_{n+1} d_{n+1} <= alpha_n d_n + gamma_n^2 U_n^2 / (1 + 2 gamma_n (a_n - a^f_n))`
    /// with `alpha_n = 1 + 2 gamma_n a_n`, only on steps where
    /// `2 gamma_n (a_n - a^f_n) >= 2 gamma_{n+1} a_{n+1}`.
    Psg,
    /// Plain non-increase of `alpha_n d_n` with the proximal-point weight.
    Monotone,
}

impl FejerRule {
    pub fn for_algorithm(alg: Algorithm) -> Self {
        match alg {
            Algorithm::Ppa => FejerRule::Ppa,
            Algorithm::Psg => FejerRule::Psg,
            Algorithm::Fb => FejerRule::Monotone,
        }
    }

    fn alpha(&self) -> AlphaRule {
        match self {
            FejerRule::Psg => AlphaRule::Psg,
            _ => AlphaRule::Ppa,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FejerReport {
    pub monotone: bool,
    pub first_violation: Option<usize>,
    /// `rhs - lhs` for the step leaving record `n`; NaN where the step was
    /// not checked and for the final record. Same length as the records.
    pub slack: Vec<f64>,
    /// Steps where the inequality was evaluated.
    pub checked: usize,
    /// `sum beta_n ||x_n - x_{n+1}||^2`.
    pub step_sq_sum: f64,
    /// The `epsilon_n` terms of the quasi-Fejér form.
    pub eps: Vec<f64>,
}

pub fn check_fejer(records: &[IterationRecord], x_star: &Vector, rule: FejerRule) -> Result<FejerReport> {
    let alpha_rule = rule.alpha();
    let mut report = FejerReport {
        monotone: true,
        first_violation: None,
        slack: Vec::with_capacity(records.len().saturating_sub(1)),
        checked: 0,
        step_sq_sum: 0.0,
        eps: Vec::new(),
    };
    for w in records.windows(2) {
        let (p, q) = (&w[0], &w[1]);
        check_dim(p.x.len(), x_star.len())?;
        let alpha_p = alpha_rule.alpha(p.gamma, p.a);
        let alpha_q = alpha_rule.alpha(q.gamma, q.a);
        let lhs = alpha_q * (x_star - &q.x).norm_squared();
        let base = alpha_p * (x_star - &p.x).norm_squared();
        let step_sq = (&p.x - &q.x).norm_squared();
        let (rhs, eps, active) = match rule {
            FejerRule::Ppa => {
                report.step_sq_sum += alpha_p * step_sq;
                (base - alpha_p * step_sq, 0.0, alpha_p > 0.0)
            }
            FejerRule::Monotone => (base, 0.0, alpha_p > 0.0),
            FejerRule::Psg => {
                let denom = 1.0 + 2.0 * p.gamma * (p.a - p.a_f);
                let eps = p.gamma * p.gamma * p.residual_norm.powi(2) / denom;
                let hypothesis = 2.0 * p.gamma * (p.a - p.a_f) >= 2.0 * q.gamma * q.a;
                (base + eps, eps, hypothesis && denom > 0.0 && eps.is_finite())
            }
        };
        report.eps.push(eps);
        if !active {
            report.slack.push(f64::NAN);
            continue;
        }
        report.checked += 1;
        report.slack.push(rhs - lhs);
        if !leq(lhs, rhs) && report.monotone {
            report.monotone = false;
            report.first_violation = Some(p.n);
        }
    }
    if !records.is_empty() {
        report.slack.push(f64::NAN);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuasiFejerReport {
    pub premise_holds: bool,
    pub premise_violation: Option<usize>,
    pub converges: bool,
    pub beta_summable: bool,
}

/// Numerical verdicts for `alpha_{n+1} <= chi alpha_n - beta_n + eps_n`:
/// `alpha` converges (Cauchy over the last quartile) and `beta` is summable
/// (monotone bounded partial sums whose last quartile carries under half of
/// the total). When the premise fails both verdicts are false.
pub fn check_quasi_fejer(alpha: &[f64], beta: &[f64], eps: &[f64], chi: f64) -> QuasiFejerReport {
    let steps = alpha.len().saturating_sub(1).min(beta.len()).min(eps.len());
    let mut premise_violation = None;
    for n in 0..steps {
        if !leq(alpha[n + 1], chi * alpha[n] - beta[n] + eps[n]) {
            premise_violation = Some(n);
            break;
        }
    }
    if premise_violation.is_some() || !(chi > 0.0 && chi <= 1.0) {
        return QuasiFejerReport {
            premise_holds: false,
            premise_violation,
            converges: false,
            beta_summable: false,
        };
    }
    let quartile = |len: usize| len - (len / 4).max(1).min(len);
    let converges = alpha.iter().all(|a| a.is_finite()) && {
        let tail = &alpha[quartile(alpha.len())..];
        let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
        tail.is_empty() || hi - lo <= CAUCHY_TOL * hi.abs().max(1.0)
    };
    let beta = &beta[..steps];
    let monotone = beta.iter().all(|b| *b >= -REL_TOL);
    let total: f64 = beta.iter().sum();
    let tail: f64 = beta[quartile(beta.len())..].iter().sum();
    let beta_summable = monotone && total.is_finite() && (total <= 0.0 || tail / total < 0.5);
    QuasiFejerReport { premise_holds: true, premise_violation: None, converges, beta_summable }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveLimit {
    pub gap_series: Vec<f64>,
    /// Smallest gap over the trailing window.
    pub liminf_gap: f64,
}

pub fn objective_limit_report(records: &[IterationRecord], f_star: f64) -> ObjectiveLimit {
    let gap_series: Vec<f64> = records.iter().map(|r| r.f_value - f_star).collect();
    let start = gap_series.len().saturating_sub(LIMINF_WINDOW);
    let liminf_gap = gap_series[start..].iter().copied().fold(f64::INFINITY, f64::min);
    ObjectiveLimit { gap_series, liminf_gap }
}

/// First `n` with `f(x_{n+1}) > f(x_n)` beyond tolerance.
pub fn objective_first_increase(records: &[IterationRecord]) -> Option<usize> {
    records
        .windows(2)
        .find(|w| !leq(w[1].f_value, w[0].f_value))
        .map(|w| w[0].n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    pub fejer: Option<FejerReport>,
    pub objective_monotone: bool,
    pub objective_first_violation: Option<usize>,
    pub dist_series: Vec<f64>,
    pub quasi_fejer: Option<QuasiFejerReport>,
    pub objective_limit: Option<ObjectiveLimit>,
}

impl DiagnosticsReport {
    pub fn step_sq_sum(&self) -> f64 {
        self.fejer.as_ref().map_or(f64::NAN, |f| f.step_sq_sum)
    }

    pub fn quasi_fejer_slack(&self) -> &[f64] {
        self.fejer.as_ref().map_or(&[], |f| &f.slack)
    }

    /// Flat `key = value` block.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let opt = |v: Option<usize>| v.map_or("none".to_string(), |n| n.to_string());
        let _ = writeln!(out, "objective_monotone = {}", self.objective_monotone);
        let _ = writeln!(out, "objective_first_violation = {}", opt(self.objective_first_violation));
        if let Some(f) = &self.fejer {
            let min_slack = f.slack.iter().copied().filter(|s| !s.is_nan()).fold(f64::INFINITY, f64::min);
            let _ = writeln!(out, "fejer_monotone = {}", f.monotone);
            let _ = writeln!(out, "fejer_first_violation = {}", opt(f.first_violation));
            let _ = writeln!(out, "fejer_checked_steps = {}", f.checked);
            let _ = writeln!(out, "fejer_min_slack = {min_slack:e}");
            let _ = writeln!(out, "step_sq_sum = {:e}", f.step_sq_sum);
        }
        if let Some(d) = self.dist_series.last() {
            let _ = writeln!(out, "final_dist_to_ref = {d:e}");
        }
        if let Some(q) = &self.quasi_fejer {
            let _ = writeln!(out, "quasi_fejer_premise = {}", q.premise_holds);
            let _ = writeln!(out, "alpha_converges = {}", q.converges);
            let _ = writeln!(out, "beta_summable = {}", q.beta_summable);
        }
        if let Some(l) = &self.objective_limit {
            let _ = writeln!(out, "liminf_gap = {:e}", l.liminf_gap);
        }
        out
    }
}

/// Runs every applicable check over `result`.
pub fn diagnose(result: &RunResult, x_star: Option<&Vector>, f_star: Option<f64>) -> Result<DiagnosticsReport> {
    let records = &result.records;
    let objective_first_violation = objective_first_increase(records);
    let (fejer, dist_series, quasi_fejer) = match x_star {
        Some(xs) => {
            let rule = FejerRule::for_algorithm(result.algorithm);
            let rep = check_fejer(records, xs, rule)?;
            let dist: Vec<f64> = records.iter().map(|r| (xs - &r.x).norm()).collect();
            let alpha_rule = rule.alpha();
            let alpha: Vec<f64> =
                records.iter().map(|r| alpha_rule.alpha(r.gamma, r.a) * (xs - &r.x).norm_squared()).collect();
            let beta: Vec<f64> = records
                .windows(2)
                .map(|w| match rule {
                    FejerRule::Ppa => alpha_rule.alpha(w[0].gamma, w[0].a) * (&w[0].x - &w[1].x).norm_squared(),
                    _ => 0.0,
                })
                .collect();
            // the quasi-Fejér lemma needs a non-negative, fully checked sequence
            let usable = rep.checked == records.len().saturating_sub(1) && alpha.iter().all(|a| *a >= 0.0);
            let q = usable.then(|| check_quasi_fejer(&alpha, &beta, &rep.eps, 1.0));
            (Some(rep), dist, q)
        }
        None => (None, Vec::new(), None),
    };
    Ok(DiagnosticsReport {
        fejer,
        objective_monotone: objective_first_violation.is_none(),
        objective_first_violation,
        dist_series,
        quasi_fejer,
        objective_limit: f_star.map(|fs| objective_limit_report(records, fs)),
    })
}
