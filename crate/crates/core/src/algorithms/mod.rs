//! Proximal point, forward-backward and projected subgradient iterations.
//!
//! Each run returns one [`IterationRecord`] per iterate, starting with the
//! initial point. The theorem-level guarantees (descent, Fejér monotonicity,
//! the gradient identity for smooth oracles) are checked as the run goes;
//! a failure becomes a warning on the result, or an error in strict mode.

mod schedule;

pub use schedule::{Schedule, ScheduleKind, ScheduleStep, StopReason};

use crate::oracle::OracleFn;
use crate::prox::{regularized_argmin, InnerSolver};
use crate::sets::SetDescriptor;
use crate::{check_dim, is_finite_vec, Error, Result, Vector};

pub const DESCENT_TOL: f64 = 1e-10;
pub const FEJER_TOL: f64 = 1e-9;
/// Weight below which `1/(2 gamma) + a_n` counts as zero.
pub const ZERO_WEIGHT_TOL: f64 = 1e-12;
/// Relative tolerance of the smooth-oracle gradient identity.
pub const LEMMA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub n: usize,
    pub gamma: f64,
    pub a: f64,
    /// Oracle coefficient used at this iterate; NaN for the proximal point method.
    pub a_f: f64,
    pub x: Vector,
    pub f_value: f64,
    /// `||x_n - x_{n-1}||`, zero for the initial record.
    pub step_norm: f64,
    /// Weighted squared distance to the reference point, NaN without one.
    pub fejer: f64,
    /// `||2 a^f x_n - u^f||` for subgradient steps, `||grad g(x_n)||` for
    /// forward-backward; NaN for the proximal point method.
    pub residual_norm: f64,
    pub stopped_by: Option<StopReason>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Terminal {
    MaxIter,
    StopRule(StopReason),
    Converged,
    NonFinite,
}

/// Weight in front of `||x* - x_n||^2` in the Fejér quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaRule {
    /// `1/(2 gamma_n) + a_n`.
    Ppa,
    /// `1 + 2 gamma_n a_n`.
    Psg,
}

impl AlphaRule {
    pub fn alpha(&self, gamma: f64, a: f64) -> f64 {
        match self {
            AlphaRule::Ppa => 1.0 / (2.0 * gamma) + a,
            AlphaRule::Psg => 1.0 + 2.0 * gamma * a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Ppa,
    Fb,
    Psg,
}

impl Algorithm {
    pub fn alpha_rule(&self) -> AlphaRule {
        match self {
            Algorithm::Psg => AlphaRule::Psg,
            Algorithm::Ppa | Algorithm::Fb => AlphaRule::Ppa,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Ppa => "ppa",
            Algorithm::Fb => "fb",
            Algorithm::Psg => "psg",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub algorithm: Algorithm,
    pub records: Vec<IterationRecord>,
    pub terminal: Terminal,
    pub warnings: Vec<String>,
}

impl RunResult {
    pub fn alpha_rule(&self) -> AlphaRule {
        self.algorithm.alpha_rule()
    }

    pub fn last(&self) -> &IterationRecord {
        self.records.last().expect("records are never empty")
    }

    /// Recomputes the Fejér column against `x_star`.
    pub fn attach_reference(&mut self, x_star: &Vector) -> Result<()> {
        let rule = self.alpha_rule();
        for r in &mut self.records {
            check_dim(r.x.len(), x_star.len())?;
            r.fejer = rule.alpha(r.gamma, r.a) * (x_star - &r.x).norm_squared();
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    /// Reference minimizer for the Fejér column and runtime checks.
    pub reference: Option<Vector>,
    /// Turn theorem warnings into errors.
    pub strict: bool,
    /// Stop once `step_norm <= tol * max(1, ||x_n||)` three times in a row.
    pub converge_tol: Option<f64>,
    pub solver: InnerSolver,
}

struct Runner<'o> {
    opts: &'o RunOptions,
    algorithm: Algorithm,
    rule: AlphaRule,
    records: Vec<IterationRecord>,
    warnings: Vec<String>,
    small_steps: usize,
}

impl<'o> Runner<'o> {
    fn new(opts: &'o RunOptions, algorithm: Algorithm, dim: usize) -> Result<Self> {
        if let Some(r) = &opts.reference {
            check_dim(dim, r.len())?;
        }
        Ok(Self { opts, algorithm, rule: algorithm.alpha_rule(), records: Vec::new(), warnings: Vec::new(), small_steps: 0 })
    }

    fn fejer(&self, gamma: f64, a: f64, x: &Vector) -> f64 {
        match &self.opts.reference {
            Some(r) => self.rule.alpha(gamma, a) * (r - x).norm_squared(),
            None => f64::NAN,
        }
    }

    fn violation(&mut self, step: usize, detail: String) -> Result<()> {
        if self.opts.strict {
            Err(Error::TheoremViolation { step, detail })
        } else {
            self.warnings.push(format!("step {step}: {detail}"));
            Ok(())
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn push(&mut self, gamma: f64, a: f64, a_f: f64, x: Vector, f_value: f64, residual_norm: f64) {
        let n = self.records.len();
        let step_norm = self.records.last().map_or(0.0, |p| (&x - &p.x).norm());
        let fejer = self.fejer(gamma, a, &x);
        self.records.push(IterationRecord {
            n,
            gamma,
            a,
            a_f,
            x,
            f_value,
            step_norm,
            fejer,
            residual_norm,
            stopped_by: None,
        });
    }

    /// Tracks the optional convergence stop.
    fn converged(&mut self) -> bool {
        let Some(tol) = self.opts.converge_tol else { return false };
        let r = self.records.last().expect("nonempty");
        if r.step_norm <= tol * r.x.norm().max(1.0) {
            self.small_steps += 1;
        } else {
            self.small_steps = 0;
        }
        self.small_steps >= 3
    }

    fn stop(&mut self, reason: StopReason) -> Terminal {
        if let Some(r) = self.records.last_mut() {
            r.stopped_by = Some(reason);
        }
        Terminal::StopRule(reason)
    }

    fn finish(self, terminal: Terminal) -> RunResult {
        RunResult { algorithm: self.algorithm, records: self.records, terminal, warnings: self.warnings }
    }
}

fn coefficient(f: &OracleFn, sched: &Schedule, x: &Vector) -> Result<f64> {
    match sched.a_f {
        Some(a) => Ok(a),
        None => f.default_coefficient(x),
    }
}

fn check_start(f: &OracleFn, x0: &Vector, n: usize) -> Result<()> {
    check_dim(n, f.dim())?;
    check_dim(n, x0.len())?;
    if !is_finite_vec(x0) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Proximal point method:
/// `x_{n+1} = argmin_z f(z) + (1/(2 gamma) + a_n) ||z - x_n||^2`.
pub fn run_ppa(f: &OracleFn, x0: &Vector, sched: &Schedule, n_iter: usize, opts: &RunOptions) -> Result<RunResult> {
    check_start(f, x0, f.dim())?;
    let f0 = f.eval(x0)?;
    if !f0.is_finite() {
        return Err(Error::EmptySubdifferential);
    }
    let mut run = Runner::new(opts, Algorithm::Ppa, f.dim())?;
    let (mut gamma, mut a) = (sched.gamma0, sched.a0);
    if 2.0 * gamma * a < -1.0 - ZERO_WEIGHT_TOL {
        return Err(Error::InfeasibleCoefficient { a, a_min: -1.0 / (2.0 * gamma), open: false });
    }
    run.push(gamma, a, f64::NAN, x0.clone(), f0, f64::NAN);

    for n in 0..n_iter {
        let prev = run.records.last().expect("nonempty").clone();
        let weight = 1.0 / (2.0 * gamma) + a;
        let at_zero = weight.abs() <= ZERO_WEIGHT_TOL;
        let x_next = regularized_argmin(f, &prev.x, if at_zero { 0.0 } else { weight }, &opts.solver)?;
        if !is_finite_vec(&x_next) {
            return Ok(run.finish(Terminal::NonFinite));
        }
        let f_next = f.eval(&x_next)?;
        let st = sched.step(gamma, a, f64::NAN, f64::NAN)?;
        if !st.a.is_finite() || !st.gamma.is_finite() || !f_next.is_finite() {
            return Ok(run.finish(Terminal::NonFinite));
        }

        // (a_n, ...) - (a_{n+1}, ...) must be a subgradient of f at x_{n+1}
        let range = f.feasible_range(&x_next)?;
        if !at_zero && !range.admits(a - st.a) {
            return Err(Error::ScheduleInfeasible {
                step: n,
                detail: format!("a_n - a_(n+1) = {} below a_min = {}", a - st.a, range.a_min),
            });
        }
        if f_next > prev.f_value + DESCENT_TOL {
            run.violation(n, format!("objective increased from {} to {}", prev.f_value, f_next))?;
        }
        run.push(st.gamma, st.a, f64::NAN, x_next, f_next, f64::NAN);
        if let Some(x_star) = &opts.reference {
            let cur = run.records.last().expect("nonempty");
            let lhs = cur.fejer;
            let rhs = prev.fejer;
            let scale = lhs.abs().max(rhs.abs()).max(1.0);
            if weight > 0.0 && st.gamma > 0.0 && lhs > rhs + FEJER_TOL * scale {
                let detail = format!("Fejér quantity rose from {rhs} to {lhs} (x* = {:?})", x_star.as_slice());
                run.violation(n, detail)?;
            }
        }
        if at_zero {
            let t = run.stop(StopReason::GlobalMinimizer);
            return Ok(run.finish(t));
        }
        (gamma, a) = (st.gamma, st.a);
        if run.converged() {
            return Ok(run.finish(Terminal::Converged));
        }
    }
    Ok(run.finish(Terminal::MaxIter))
}

/// Forward-backward splitting for `f + g` with `g` differentiable:
/// `x_{n+1} = argmin_z f(z) + <grad g(x_n), z> + (1/(2 gamma) + a_n - a^g_n) ||z - x_n||^2`.
///
/// The gradient is read off the subgradient of `g` as `u - 2 a x`.
pub fn run_fb(
    f: &OracleFn,
    g: &OracleFn,
    x0: &Vector,
    sched: &Schedule,
    n_iter: usize,
    opts: &RunOptions,
) -> Result<RunResult> {
    check_start(f, x0, g.dim())?;
    if !g.is_differentiable() {
        return Err(Error::Unsupported("forward-backward needs a differentiable g".into()));
    }
    let total = |x: &Vector| -> Result<f64> { Ok(f.eval(x)? + g.eval(x)?) };
    let mut run = Runner::new(opts, Algorithm::Fb, f.dim())?;
    let (mut gamma, mut a) = (sched.gamma0, sched.a0);
    let mut a_g = coefficient(g, sched, x0)?;
    run.push(gamma, a, a_g, x0.clone(), total(x0)?, g.gradient(x0).map_or(f64::NAN, |d| d.norm()));

    for n in 0..n_iter {
        let prev = run.records.last().expect("nonempty").clone();
        let x = &prev.x;
        let phi_g = g.subgrad_at(x, a_g)?;
        let v = &phi_g.u - x * (2.0 * a_g);
        if let Some(grad) = g.gradient(x) {
            let scale = phi_g.u.norm().max((x * (2.0 * a_g)).norm()).max(grad.norm()).max(1.0);
            let gap = (&v - &grad).amax();
            if gap > LEMMA_TOL * scale {
                run.violation(n, format!("u - 2ax differs from the gradient by {gap:e}"))?;
            }
        }
        let c = 1.0 / (2.0 * gamma) + a - a_g;
        if !(c > 0.0) {
            return Err(Error::DegenerateStep { step: n, weight: c });
        }
        let center = x - &v / (2.0 * c);
        let x_next = regularized_argmin(f, &center, c, &opts.solver)?;
        if !is_finite_vec(&x_next) {
            return Ok(run.finish(Terminal::NonFinite));
        }
        let f_next = total(&x_next)?;
        let a_g_next = coefficient(g, sched, &x_next)?;
        let st = sched.step(gamma, a, a_g, a_g_next)?;
        if !st.a.is_finite() || !st.gamma.is_finite() || f_next.is_nan() || !a_g_next.is_finite() {
            return Ok(run.finish(Terminal::NonFinite));
        }
        if let Some(lg) = g.lipschitz() {
            let descent_regime = 1.0 / gamma + a + st.a >= a_g + lg / 2.0;
            if descent_regime && f_next > prev.f_value + DESCENT_TOL {
                run.violation(n, format!("objective increased from {} to {}", prev.f_value, f_next))?;
            }
        }
        let residual = g.gradient(&x_next).map_or(f64::NAN, |d| d.norm());
        run.push(st.gamma, st.a, a_g_next, x_next, f_next, residual);
        if let Some(reason) = st.stop {
            let t = run.stop(reason);
            return Ok(run.finish(t));
        }
        (gamma, a, a_g) = (st.gamma, st.a, a_g_next);
        if run.converged() {
            return Ok(run.finish(Terminal::Converged));
        }
    }
    Ok(run.finish(Terminal::MaxIter))
}

/// Projected subgradient method:
/// `x_{n+1} = Proj_C(((1 + 2 gamma a_n) x_n - gamma u^f_n) / (1 + 2 gamma (a_n - a^f_n)))`.
///
/// The starting point may lie outside `C`; the first projection brings it in.
pub fn run_psg(
    f: &OracleFn,
    set: &SetDescriptor,
    x0: &Vector,
    sched: &Schedule,
    n_iter: usize,
    opts: &RunOptions,
) -> Result<RunResult> {
    check_start(f, x0, set.dim())?;
    let mut run = Runner::new(opts, Algorithm::Psg, f.dim())?;
    let (mut gamma, mut a) = (sched.gamma0, sched.a0);
    let mut a_f = coefficient(f, sched, x0)?;
    run.push(gamma, a, a_f, x0.clone(), f.eval(x0)?, f64::NAN);

    for n in 0..n_iter {
        let prev = run.records.last().expect("nonempty").clone();
        let x = &prev.x;
        let phi = f.subgrad_at(x, a_f)?;
        let residual = (x * (2.0 * a_f) - &phi.u).norm();
        run.records.last_mut().expect("nonempty").residual_norm = residual;
        let denom = 1.0 + 2.0 * gamma * (a - a_f);
        if !(denom > 0.0) {
            let t = run.stop(StopReason::Denominator);
            return Ok(run.finish(t));
        }
        let z = (x * (1.0 + 2.0 * gamma * a) - &phi.u * gamma) / denom;
        let x_next = set.project(&z)?;
        if !is_finite_vec(&x_next) {
            return Ok(run.finish(Terminal::NonFinite));
        }
        let f_next = f.eval(&x_next)?;
        let a_f_next = coefficient(f, sched, &x_next)?;
        let st = sched.step(gamma, a, a_f, a_f_next)?;
        if !st.a.is_finite() || !st.gamma.is_finite() || !f_next.is_finite() {
            return Ok(run.finish(Terminal::NonFinite));
        }
        run.push(st.gamma, st.a, a_f_next, x_next, f_next, f64::NAN);

        let hypothesis = 2.0 * gamma * (a - a_f) >= 2.0 * st.gamma * st.a;
        if opts.reference.is_some() && hypothesis {
            let cur = run.records.last().expect("nonempty");
            let lhs = cur.fejer;
            let rhs = prev.fejer + gamma * gamma * residual * residual / denom;
            let scale = lhs.abs().max(rhs.abs()).max(1.0);
            if lhs > rhs + FEJER_TOL * scale {
                run.violation(n, format!("Fejér bound broken: {lhs} > {rhs}"))?;
            }
        }
        if let Some(reason) = st.stop {
            let t = run.stop(reason);
            return Ok(run.finish(t));
        }
        (gamma, a, a_f) = (st.gamma, st.a, a_f_next);
        if run.converged() {
            return Ok(run.finish(Terminal::Converged));
        }
    }
    Ok(run.finish(Terminal::MaxIter))
}
