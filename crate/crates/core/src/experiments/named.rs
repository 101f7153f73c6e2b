//! The built-in experiments, stored as config text plus a gamma sweep.

use std::thread;

use super::config::ExperimentConfig;
use super::{run_config, ExperimentRun};
use crate::Result;

#[derive(Debug, Clone, Copy)]
pub struct NamedExperiment {
    pub name: &'static str,
    pub summary: &'static str,
    pub config: &'static str,
    /// Values substituted for `gamma0`, one run each.
    pub gammas: &'static [f64],
}

const Q3: &str = "[[-2,2,2];[2,2,-2];[2,-2,2]]";
const Q5: &str = "[[1,0,-1,1,0];[0,1,1,-1,0];[-1,1,-1,1,1];[1,-1,1,-1,1];[0,0,1,1,1]]";

macro_rules! q3 {
    () => {
        "Q = [[-2,2,2];[2,2,-2];[2,-2,2]]  # eigenvalues -4, 2, 4\n"
    };
}
macro_rules! q5 {
    () => {
        "Q = [[1,0,-1,1,0];[0,1,1,-1,0];[-1,1,-1,1,1];[1,-1,1,-1,1];[0,0,1,1,1]]  # eigenvalues -3, -1, 1, 2, 2\n"
    };
}

pub const NAMED: &[NamedExperiment] = &[
    NamedExperiment {
        name: "ppa-absq",
        summary: "proximal point on |x| + x^2 from x0 = -10, a_{n+1} = a_n + 0.9",
        config: "# f(x) = |x| + x^2, minimizer 0\n\
                 algorithm = ppa\n\
                 function = abs_plus_square\n\
                 x0 = [-10]\n\
                 gamma0 = 1\n\
                 a0 = 1\n\
                 schedule = ppa_additive\n\
                 delta = 0.9\n\
                 N = 101\n\
                 reference = [0]\n",
        gammas: &[0.01, 0.1, 1.0, 10.0],
    },
    NamedExperiment {
        name: "psg-q3-const",
        summary: "projected subgradient, <x,Qx> over the unit ball in R^3, a_{n+1} = a_n - 4",
        config: concat!(
            "algorithm = psg\n",
            q3!(),
            "set = ball(0,1)\n\
             x0 = [-5,5,-5]\n\
             gamma0 = 1\n\
             a0 = 200\n\
             a_f = 4\n\
             schedule = psg_constant\n\
             N = 101\n\
             reference = auto_eigen\n"
        ),
        gammas: &[0.01, 0.1, 1.0, 10.0],
    },
    NamedExperiment {
        name: "psg-q3-adaptive",
        summary: "projected subgradient, <x,Qx> over the unit ball in R^3, a_n = 5 and adaptive gamma",
        config: concat!(
            "algorithm = psg\n",
            q3!(),
            "set = ball(0,1)\n\
             x0 = [-5,5,-5]\n\
             gamma0 = 1\n\
             a0 = 5\n\
             a_f = 4\n\
             schedule = psg_adaptive_v1\n\
             a_const = 5\n\
             N = 101\n\
             reference = auto_eigen\n"
        ),
        gammas: &[0.01, 0.1, 1.0, 10.0],
    },
    NamedExperiment {
        name: "psg-q5-const-x01",
        summary: "projected subgradient, 5x5 indefinite Q, start (-10,...,-10), a_{n+1} = a_n - 3",
        config: concat!(
            "algorithm = psg\n",
            q5!(),
            "set = ball(0,1)\n\
             x0 = [-10,-10,-10,-10,-10]\n\
             gamma0 = 1\n\
             a0 = 200\n\
             a_f = 3\n\
             schedule = psg_constant\n\
             N = 101\n\
             reference = auto_eigen\n"
        ),
        gammas: &[0.01, 0.1, 1.0, 10.0],
    },
    NamedExperiment {
        name: "psg-q5-const-x02",
        summary: "projected subgradient, 5x5 indefinite Q, start (-10,10,-10,10,-10), a_{n+1} = a_n - 3",
        config: concat!(
            "algorithm = psg\n",
            q5!(),
            "set = ball(0,1)\n\
             x0 = [-10,10,-10,10,-10]\n\
             gamma0 = 1\n\
             a0 = 200\n\
             a_f = 3\n\
             schedule = psg_constant\n\
             N = 101\n\
             reference = auto_eigen\n"
        ),
        gammas: &[0.01, 0.1, 1.0, 10.0],
    },
    NamedExperiment {
        name: "psg-q5-adaptive-x02",
        summary: "projected subgradient, 5x5 indefinite Q, start (-10,10,-10,10,-10), a_n = -1/(2 gamma_n) + 3 + 1",
        config: concat!(
            "algorithm = psg\n",
            q5!(),
            "set = ball(0,1)\n\
             x0 = [-10,10,-10,10,-10]\n\
             gamma0 = 1\n\
             a0 = 4\n\
             a_f = 3\n\
             schedule = psg_adaptive_v2\n\
             epsilon = 1\n\
             N = 101\n\
             reference = auto_eigen\n"
        ),
        gammas: &[0.01, 0.1, 1.0, 10.0],
    },
    NamedExperiment {
        name: "fb-hessian",
        summary: "forward-backward on x^4/12 + x^2/2 - y^4/12 - y^2/2 over the unit ball, a^f = y^2 + 1 + 0.1",
        config: "# g has an indefinite Hessian; f is the indicator of the unit ball,\n\
                 # drop `set` to run with f = 0 instead\n\
                 algorithm = fb\n\
                 function = hessian_example\n\
                 set = ball(0,1)\n\
                 x0 = [-5,-1]\n\
                 gamma0 = 0.1\n\
                 a0 = 200\n\
                 epsilon = 0.1\n\
                 schedule = psg_constant\n\
                 N = 1001\n\
                 reference = sign_matched([0,1])\n",
        gammas: &[0.01, 0.1, 1.0],
    },
];

pub fn find(name: &str) -> Option<&'static NamedExperiment> {
    NAMED.iter().find(|e| e.name == name)
}

pub fn names() -> Vec<&'static str> {
    NAMED.iter().map(|e| e.name).collect()
}

/// Matrix literals used by the built-in experiments.
pub fn q3_literal() -> &'static str {
    Q3
}

pub fn q5_literal() -> &'static str {
    Q5
}

impl NamedExperiment {
    /// One parsed config per swept gamma.
    pub fn configs(&self) -> Vec<ExperimentConfig> {
        let base = ExperimentConfig::parse(self.config).expect("built-in configs parse");
        self.gammas
            .iter()
            .map(|&g| ExperimentConfig { gamma0: g, ..base.clone() })
            .collect()
    }

    pub fn config_for(&self, gamma: f64) -> ExperimentConfig {
        ExperimentConfig { gamma0: gamma, ..ExperimentConfig::parse(self.config).expect("built-in configs parse") }
    }

    /// Runs the sweep, one thread per gamma.
    pub fn run(&self, strict: bool) -> Vec<(f64, Result<ExperimentRun>)> {
        let configs = self.configs();
        thread::scope(|s| {
            let handles: Vec<_> = configs
                .iter()
                .map(|cfg| (cfg.gamma0, s.spawn(move || run_config(cfg, strict))))
                .collect();
            handles
                .into_iter()
                .map(|(g, h)| (g, h.join().expect("experiment thread panicked")))
                .collect()
        })
    }
}
