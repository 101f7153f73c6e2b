//! Config-driven runs, the built-in experiments and their CSV output.

pub mod config;
pub mod csv;
pub mod named;
pub mod verify;

use std::sync::Arc;

pub use config::{ConfigError, ExperimentConfig, FunctionSpec, ReferenceSpec};

use crate::algorithms::{run_fb, run_ppa, run_psg, Algorithm, RunOptions, RunResult, Schedule};
use crate::diagnostics::{diagnose, DiagnosticsReport};
use crate::oracle::{OracleFn, OracleKind};
use crate::sets::SetDescriptor;
use crate::{Error, Result, Vector};

/// `g(x, y) = x^4/12 + x^2/2 - y^4/12 - y^2/2` with the curvature rule
/// `a^g = y^2 + 1 + epsilon`. The rule is a local bound only.
pub fn hessian_example(epsilon: f64) -> Result<OracleFn> {
    OracleFn::smooth(
        2,
        Arc::new(|p: &Vector| {
            let (x, y) = (p[0], p[1]);
            x.powi(4) / 12.0 + x * x / 2.0 - y.powi(4) / 12.0 - y * y / 2.0
        }),
        Arc::new(|p: &Vector| {
            let (x, y) = (p[0], p[1]);
            Vector::from_vec(vec![x.powi(3) / 3.0 + x, -y.powi(3) / 3.0 - y])
        }),
        Arc::new(|p: &Vector| p[1] * p[1] + 1.0),
        epsilon,
        None,
    )
}

pub fn build_oracle(spec: &FunctionSpec, dim: usize, epsilon: Option<f64>) -> Result<OracleFn> {
    match spec {
        FunctionSpec::Quadratic(q) => OracleFn::quadratic_form(q.clone()),
        FunctionSpec::AbsPlusSquare => Ok(OracleFn::abs_plus_square()),
        FunctionSpec::NormSquare(g) => OracleFn::norm_square(dim, *g),
        FunctionSpec::HessianExample => hessian_example(
            epsilon.ok_or_else(|| Error::InvalidArgument("hessian_example needs epsilon".into()))?,
        ),
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub config: ExperimentConfig,
    pub result: RunResult,
    pub reference: Option<Vector>,
    pub f_star: Option<f64>,
    pub diagnostics: DiagnosticsReport,
}

impl ExperimentRun {
    /// Sidecar text: terminal state, warnings and the diagnostics block.
    pub fn report(&self) -> String {
        let mut out = format!(
            "algorithm = {}\ngamma0 = {}\nrecords = {}\nterminal = {:?}\n",
            self.config.algorithm.name(),
            self.config.gamma0,
            self.result.records.len(),
            self.result.terminal
        );
        if let Some(fs) = self.f_star {
            out.push_str(&format!("f_star = {fs:e}\n"));
        }
        out.push_str(&format!("final_f = {:e}\n", self.result.last().f_value));
        out.push_str(&format!("warnings = {}\n", self.result.warnings.len()));
        out.push_str(&self.diagnostics.to_key_value());
        for w in &self.result.warnings {
            out.push_str(&format!("# warning: {w}\n"));
        }
        out
    }
}

struct Problem {
    f: OracleFn,
    g: Option<OracleFn>,
    set: Option<SetDescriptor>,
}

impl Problem {
    fn objective(&self, x: &Vector) -> Result<f64> {
        match &self.g {
            Some(g) => Ok(self.f.eval(x)? + g.eval(x)?),
            None => self.f.eval(x),
        }
    }
}

fn execute(cfg: &ExperimentConfig, p: &Problem, sched: &Schedule, opts: &RunOptions) -> Result<RunResult> {
    match cfg.algorithm {
        Algorithm::Ppa => run_ppa(&p.f, &cfg.x0, sched, cfg.n_iter, opts),
        Algorithm::Psg => {
            let set = p.set.as_ref().ok_or_else(|| Error::InvalidArgument("psg needs a set".into()))?;
            run_psg(&p.f, set, &cfg.x0, sched, cfg.n_iter, opts)
        }
        Algorithm::Fb => run_fb(&p.f, p.g.as_ref().expect("fb has g"), &cfg.x0, sched, cfg.n_iter, opts),
    }
}

/// Builds the oracles and schedule for `cfg`, runs it and diagnoses the
/// result. Sign-matched references need a first pass to find the limit.
pub fn run_config(cfg: &ExperimentConfig, strict: bool) -> Result<ExperimentRun> {
    let n = cfg.dim();
    let main = build_oracle(&cfg.function, n, cfg.epsilon)?;
    let problem = match cfg.algorithm {
        Algorithm::Fb => Problem {
            f: cfg.set.clone().map_or_else(|| OracleFn::zero(n), OracleFn::indicator),
            g: Some(main),
            set: cfg.set.clone(),
        },
        _ => Problem { f: main, g: None, set: cfg.set.clone() },
    };
    let mut sched = Schedule::new(cfg.schedule, cfg.gamma0, cfg.a0)?;
    sched.a_f = cfg.a_f;

    let candidate = match &cfg.reference {
        None => None,
        Some(ReferenceSpec::Point(p)) => Some((p.clone(), false)),
        Some(ReferenceSpec::SignMatched(p)) => Some((p.clone(), true)),
        Some(ReferenceSpec::AutoEigen) => {
            let quad = problem.g.as_ref().unwrap_or(&problem.f);
            let OracleKind::QuadraticForm { eigvecs, .. } = quad.kind() else {
                return Err(Error::InvalidArgument("auto_eigen needs a quadratic form".into()));
            };
            let v: Vector = eigvecs.column(0).into_owned();
            let p = match &problem.set {
                Some(SetDescriptor::Ball { center, radius }) => center + v * *radius,
                _ => v,
            };
            Some((p, true))
        }
    };
    let reference = match candidate {
        Some((p, true)) => {
            let probe = execute(cfg, &problem, &sched, &RunOptions::default())?;
            let last = &probe.last().x;
            Some(if last.dot(&p) < 0.0 { -p } else { p })
        }
        Some((p, false)) => Some(p),
        None => None,
    };
    let opts = RunOptions { reference: reference.clone(), strict, ..Default::default() };
    let result = execute(cfg, &problem, &sched, &opts)?;
    let f_star = match &reference {
        Some(x) => Some(problem.objective(x)?),
        None => None,
    };
    let diagnostics = diagnose(&result, reference.as_ref(), f_star)?;
    Ok(ExperimentRun { config: cfg.clone(), result, reference, f_star, diagnostics })
}
