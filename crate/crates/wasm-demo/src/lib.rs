//! wasm-bindgen bindings for the browser demo in `www/`.
//!
//! Each export returns a flat `Float64Array`; the page splits it into
//! columns. The plain-Rust functions behind them are testable natively.

use absprox::algorithms::{run_ppa, run_psg, RunOptions, Schedule, ScheduleKind};
use absprox::experiments::verify::q3;
use absprox::prox::prox_abs_square_closed_form;
use absprox::{OracleFn, SetDescriptor, Vector};
use wasm_bindgen::prelude::*;

const MAX_POINTS: usize = 20_000;
const MAX_ITER: usize = 5_000;

fn check_count(n: usize, limit: usize, what: &str) -> Result<(), String> {
    if n == 0 || n > limit {
        return Err(format!("{what} must be in 1..={limit}, got {n}"));
    }
    Ok(())
}

/// `[x0, prox(x0)]` pairs for `|x| + x^2` over `n` evenly spaced `x0`.
pub fn prox_curve_values(gamma: f64, a0: f64, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, String> {
    check_count(n, MAX_POINTS, "point count")?;
    if !(lo < hi) {
        return Err(format!("need lo < hi, got [{lo}, {hi}]"));
    }
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        let x0 = if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
        let z = prox_abs_square_closed_form(x0, gamma, a0).map_err(|e| e.to_string())?;
        out.extend([x0, z]);
    }
    Ok(out)
}

/// `[x_n, f(x_n), a_n]` triples of the proximal point method on `|x| + x^2`.
pub fn ppa_values(gamma: f64, a0: f64, delta: f64, x0: f64, n_iter: usize) -> Result<Vec<f64>, String> {
    check_count(n_iter, MAX_ITER, "iteration count")?;
    let f = OracleFn::abs_plus_square();
    let sched = Schedule::new(ScheduleKind::PpaAdditive { delta }, gamma, a0).map_err(|e| e.to_string())?;
    let run = run_ppa(&f, &Vector::from_element(1, x0), &sched, n_iter, &RunOptions::default())
        .map_err(|e| e.to_string())?;
    Ok(run.records.iter().flat_map(|r| [r.x[0], r.f_value, r.a]).collect())
}

/// `[f(x_n), ||x_n||, a_n]` triples of the projected subgradient method on
/// `<x, Qx>` over the unit ball of R^3, constant step, `a^f = 4`.
pub fn psg_q3_values(gamma: f64, a0: f64, x0: &[f64], n_iter: usize) -> Result<Vec<f64>, String> {
    check_count(n_iter, MAX_ITER, "iteration count")?;
    if x0.len() != 3 {
        return Err(format!("x0 needs 3 entries, got {}", x0.len()));
    }
    let f = OracleFn::quadratic_form(q3()).map_err(|e| e.to_string())?;
    let sched = Schedule::new(ScheduleKind::PsgConstantGamma, gamma, a0).map_err(|e| e.to_string())?.with_a_f(4.0);
    let run = run_psg(&f, &SetDescriptor::unit_ball(3), &Vector::from_column_slice(x0), &sched, n_iter, &RunOptions::default())
        .map_err(|e| e.to_string())?;
    Ok(run.records.iter().flat_map(|r| [r.f_value, r.x.norm(), r.a]).collect())
}

#[wasm_bindgen]
pub fn prox_curve(gamma: f64, a0: f64, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, JsError> {
    prox_curve_values(gamma, a0, lo, hi, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn ppa_series(gamma: f64, a0: f64, delta: f64, x0: f64, n_iter: usize) -> Result<Vec<f64>, JsError> {
    ppa_values(gamma, a0, delta, x0, n_iter).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn psg_q3_series(gamma: f64, a0: f64, x0: Vec<f64>, n_iter: usize) -> Result<Vec<f64>, JsError> {
    psg_q3_values(gamma, a0, &x0, n_iter).map_err(|e| JsError::new(&e))
}
