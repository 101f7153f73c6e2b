//! Self-checks run by the `verify` subcommand: the reference oracles
//! against the library's closed forms.

use std::sync::Arc;

use rand::Rng;

use crate::oracle::OracleFn;
use crate::phi::{duality_map_element, duality_map_inverse, PhiElement, SetValued};
use crate::prox::prox_abs_square_closed_form;
use crate::reference::{
    eig_sym, grid_argmin_1d, rng, sample_box, subgrad_inequality_sampler, DEFAULT_COARSE, DEFAULT_REFINE_TOL,
};
use crate::sets::SetDescriptor;
use crate::{Matrix, Result, Vector};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

pub fn q3() -> Matrix {
    Matrix::from_row_slice(3, 3, &[-2.0, 2.0, 2.0, 2.0, 2.0, -2.0, 2.0, -2.0, 2.0])
}

pub fn q5() -> Matrix {
    Matrix::from_row_slice(5, 5, &[
        1.0, 0.0, -1.0, 1.0, 0.0, 0.0, 1.0, 1.0, -1.0, 0.0, -1.0, 1.0, -1.0, 1.0, 1.0, 1.0, -1.0, 1.0,
        -1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0,
    ])
}

/// `sum_i cos(x_i)`: gradient Lipschitz constant 1, so `a >= 1/2` is a
/// global curvature bound.
pub fn cosine_sum(dim: usize) -> OracleFn {
    OracleFn::smooth(
        dim,
        Arc::new(|x: &Vector| x.iter().map(|t| t.cos()).sum()),
        Arc::new(|x: &Vector| x.map(|t| -t.sin())),
        Arc::new(|_: &Vector| 0.5),
        0.1,
        Some(1.0),
    )
    .expect("positive epsilon")
}

/// One oracle of every kind.
pub fn oracle_zoo() -> Vec<(&'static str, OracleFn)> {
    let v = |xs: &[f64]| Vector::from_column_slice(xs);
    vec![
        ("norm_square", OracleFn::norm_square(3, 0.7).expect("gamma > 0")),
        ("quadratic_q3", OracleFn::quadratic_form(q3()).expect("symmetric")),
        ("quadratic_q5", OracleFn::quadratic_form(q5()).expect("symmetric")),
        ("abs_plus_square", OracleFn::abs_plus_square()),
        ("indicator_ball", OracleFn::indicator(SetDescriptor::ball(v(&[0.5, -1.0]), 2.0).expect("r > 0"))),
        (
            "indicator_box",
            OracleFn::indicator(SetDescriptor::boxed(v(&[-1.0, 0.0, -2.0]), v(&[1.0, 3.0, 0.5])).expect("lo <= hi")),
        ),
        ("indicator_halfspace", OracleFn::indicator(SetDescriptor::halfspace(v(&[1.0, 2.0]), 1.0).expect("n != 0"))),
        ("smooth_cosine", cosine_sum(2)),
    ]
}

/// Random point of the domain with a feasible coefficient. Indicator points
/// land on the boundary or a vertex half of the time so that negative
/// coefficients get exercised.
pub fn random_feasible<R: Rng>(f: &OracleFn, r: &mut R) -> Result<(Vector, f64)> {
    let n = f.dim();
    let x = match f.set() {
        Some(SetDescriptor::Ball { center, radius }) => {
            let dir = sample_box(r, &Vector::zeros(n), 1.0);
            let dir = if dir.norm() == 0.0 { Vector::from_element(n, 1.0) } else { dir.normalize() };
            let t = if r.random_bool(0.5) { 1.0 } else { r.random_range(0.0..1.0) };
            center + dir * (radius * t)
        }
        Some(SetDescriptor::Box { lo, hi }) => {
            let vertex = r.random_bool(0.5);
            Vector::from_iterator(
                n,
                (0..n).map(|i| {
                    if vertex {
                        if r.random_bool(0.5) { lo[i] } else { hi[i] }
                    } else {
                        r.random_range(lo[i]..=hi[i])
                    }
                }),
            )
        }
        Some(s @ SetDescriptor::Halfspace { .. }) => s.project(&sample_box(r, &Vector::zeros(n), 5.0))?,
        None => sample_box(r, &Vector::zeros(n), 5.0),
    };
    let range = f.feasible_range(&x)?;
    let a = if range.a_min == f64::NEG_INFINITY {
        r.random_range(-5.0..5.0)
    } else {
        range.a_min + r.random_range(0.0..5.0) + if range.open { 1e-6 } else { 0.0 }
    };
    Ok((x, a))
}

pub fn run_all(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();

    for (name, q, expect) in [
        ("eigen_q3", q3(), vec![-4.0, 2.0, 4.0]),
        ("eigen_q5", q5(), vec![-3.0, -1.0, 1.0, 2.0, 2.0]),
    ] {
        let (vals, _) = eig_sym(&q)?;
        let err = vals.iter().zip(expect.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        out.push(Check { name, pass: err <= 1e-9, detail: format!("max error {err:e}") });
    }

    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let gamma = r.random_range(0.01..10.0);
        let a0 = r.random_range(-0.5 / gamma..10.0);
        let x0 = r.random_range(-20.0..20.0);
        let closed = prox_abs_square_closed_form(x0, gamma, a0)?;
        let w = 1.0 / (2.0 * gamma) + a0;
        let grid = grid_argmin_1d(
            |z| z.abs() + z * z + w * (z - x0).powi(2),
            -25.0,
            25.0,
            DEFAULT_COARSE,
            DEFAULT_REFINE_TOL,
        )?;
        worst = worst.max((closed - grid).abs());
    }
    out.push(Check { name: "prox_closed_form", pass: worst <= 1e-8, detail: format!("max gap {worst:e}") });

    for (name, f) in oracle_zoo() {
        let mut worst = f64::INFINITY;
        for k in 0..100 {
            let (x, a) = random_feasible(&f, &mut r)?;
            let phi = f.subgrad_at(&x, a)?;
            let rep = subgrad_inequality_sampler(&f, &x, &phi, 1000, 10.0, seed.wrapping_add(k))?;
            worst = worst.min(rep.worst_violation);
        }
        out.push(Check { name, pass: worst >= -1e-9, detail: format!("worst violation {worst:e}") });
    }

    let mut identity_ok = true;
    for _ in 0..1000 {
        let gamma = r.random_range(0.01..10.0);
        let a = r.random_range(-0.5 / gamma..10.0);
        let u = sample_box(&mut r, &Vector::zeros(3), 10.0);
        let phi = PhiElement::linear(a, u);
        if let SetValued::Point(x) = duality_map_inverse(&phi, gamma)? {
            identity_ok &= duality_map_element(&x, gamma, a)?.same_subgradient(&phi, 1e-12);
        } else {
            identity_ok = false;
        }
    }
    out.push(Check { name: "duality_identity", pass: identity_ok, detail: "1000 draws".into() });
    Ok(out)
}
