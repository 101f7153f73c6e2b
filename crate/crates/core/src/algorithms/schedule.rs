use std::fmt;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleKind {
    /// `a_{n+1} = a_n + delta`, constant gamma.
    PpaAdditive { delta: f64 },
    /// `a_{n+1} = a_n - a^f_n`, constant gamma.
    PsgConstantGamma,
    /// Constant `a`, `gamma_{n+1} = gamma_n (a_n - a^f_n) / a_{n+1}`.
    PsgAdaptiveV1 { a_const: f64 },
    /// `gamma_{n+1} = (gamma_n (a_n - a^f_n) + 1) / (a^f_n + epsilon)`, then
    /// `a_{n+1} = -1/(2 gamma_{n+1}) + a^f_{n+1} + epsilon`.
    PsgAdaptiveV2 { epsilon: f64 },
    /// Constant `a`, constant gamma.
    FbConstant { a_const: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub kind: ScheduleKind,
    pub gamma0: f64,
    pub a0: f64,
    /// Fixed oracle coefficient `a^f`; `None` asks the oracle for its default.
    pub a_f: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StopReason {
    /// The regularization weight `1/(2 gamma) + a_n` vanished, so the next
    /// iterate is a global minimizer.
    GlobalMinimizer,
    /// The schedule's own guard fired.
    Guard,
    /// `1 + 2 gamma (a_n - a^f_n) <= 0` at a live step.
    Denominator,
}

impl StopReason {
    pub fn tag(&self) -> &'static str {
        match self {
            StopReason::GlobalMinimizer => "global_minimizer",
            StopReason::Guard => "guard",
            StopReason::Denominator => "denominator_guard",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleStep {
    pub gamma: f64,
    pub a: f64,
    pub stop: Option<StopReason>,
}

impl Schedule {
    pub fn new(kind: ScheduleKind, gamma0: f64, a0: f64) -> Result<Self> {
        if !(gamma0 > 0.0 && gamma0.is_finite()) {
            return Err(Error::InvalidArgument(format!("gamma0 must be positive, got {gamma0}")));
        }
        if !a0.is_finite() {
            return Err(Error::InvalidArgument(format!("a0 must be finite, got {a0}")));
        }
        match kind {
            ScheduleKind::PsgAdaptiveV2 { epsilon } if !(epsilon > 0.0) => {
                return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")))
            }
            _ => {}
        }
        Ok(Self { kind, gamma0, a0, a_f: None })
    }

    pub fn with_a_f(mut self, a_f: f64) -> Self {
        self.a_f = Some(a_f);
        self
    }

    /// Next `(gamma, a)` from the current pair and the oracle coefficients
    /// at the current and next iterate.
    pub fn step(&self, gamma: f64, a: f64, a_f: f64, a_f_next: f64) -> Result<ScheduleStep> {
        let guard = |gamma: f64, a: f64| {
            if 2.0 * gamma * (a - a_f_next) <= -1.0 || !(gamma > 0.0) {
                Some(StopReason::Guard)
            } else {
                None
            }
        };
        Ok(match self.kind {
            ScheduleKind::PpaAdditive { delta } => ScheduleStep { gamma, a: a + delta, stop: None },
            ScheduleKind::FbConstant { a_const } => ScheduleStep { gamma, a: a_const, stop: None },
            ScheduleKind::PsgConstantGamma => {
                let next = a - a_f;
                let stop = (next <= a_f_next - 1.0 / (2.0 * gamma)).then_some(StopReason::Guard);
                ScheduleStep { gamma, a: next, stop }
            }
            ScheduleKind::PsgAdaptiveV1 { a_const } => {
                if a_const == 0.0 {
                    return Err(Error::ScheduleDegenerate("adaptive step with a = 0".into()));
                }
                let next_gamma = gamma * (a - a_f) / a_const;
                ScheduleStep { gamma: next_gamma, a: a_const, stop: guard(next_gamma, a_const) }
            }
            ScheduleKind::PsgAdaptiveV2 { epsilon } => {
                let denom = a_f + epsilon;
                if denom == 0.0 {
                    return Err(Error::ScheduleDegenerate("a^f + epsilon = 0".into()));
                }
                let next_gamma = (gamma * (a - a_f) + 1.0) / denom;
                let next_a = -1.0 / (2.0 * next_gamma) + a_f_next + epsilon;
                ScheduleStep { gamma: next_gamma, a: next_a, stop: guard(next_gamma, next_a) }
            }
        })
    }
}
