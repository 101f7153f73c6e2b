use absprox::algorithms::{run_ppa, run_psg, RunOptions, Schedule, ScheduleKind};
use absprox::experiments::verify::{q3, q5};
use absprox::phi::{duality_map_element, duality_map_inverse, phi_geq_minorant};
use absprox::prox::{prox_abs_square_closed_form, regularized_argmin};
use absprox::reference::{eig_sym, grid_argmin_1d, rng, sample_box, subgrad_inequality_sampler};
use absprox::{InnerSolver, Matrix, OracleFn, PhiElement, SetDescriptor, SetValued, Vector};
use proptest::prelude::*;
use rand::Rng;

fn vec3() -> impl Strategy<Value = Vector> {
    prop::collection::vec(-10.0..10.0f64, 3).prop_map(Vector::from_vec)
}

fn gamma() -> impl Strategy<Value = f64> {
    0.01..10.0f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn duality_identity(g in gamma(), t in 1e-6..20.0f64, u in vec3()) {
        let a = -0.5 / g + t;
        let phi = PhiElement::linear(a, u);
        let SetValued::Point(x) = duality_map_inverse(&phi, g).unwrap() else {
            panic!("interior coefficient must give a point");
        };
        prop_assert!(duality_map_element(&x, g, a).unwrap().same_subgradient(&phi, 1e-12));
    }

    #[test]
    fn duality_element_is_subgradient_of_scaled_norm(g in gamma(), t in 0.0..20.0f64, x in vec3()) {
        let a = -0.5 / g + t;
        let phi = duality_map_element(&x, g, a).unwrap();
        let norm = |y: &Vector| y.norm_squared() / (2.0 * g);
        let mut r = rng(x.norm().to_bits());
        for _ in 0..200 {
            let y = sample_box(&mut r, &x, 20.0);
            let lhs = norm(&y) - norm(&x);
            let rhs = phi.eval(&y).unwrap() - phi.eval(&x).unwrap();
            prop_assert!(lhs - rhs >= -1e-9 * lhs.abs().max(1.0));
        }
    }

    #[test]
    fn inverse_empty_only_outside_range(g in gamma(), t in -20.0..20.0f64, u in vec3()) {
        let a = -0.5 / g + t;
        let res = duality_map_inverse(&PhiElement::linear(a, u), g).unwrap();
        prop_assert_eq!(matches!(res, SetValued::Empty), 2.0 * g * a < -1.0);
    }

    #[test]
    fn minorant_touches_and_stays_below(a in -5.0..5.0f64, u in vec3(), c in -3.0..3.0f64, x in vec3()) {
        let phi = PhiElement::new(a, u, c);
        let psi = phi_geq_minorant(&phi, &x).unwrap();
        let fx = phi.eval(&x).unwrap();
        prop_assert!((psi.eval(&x).unwrap() - fx).abs() <= 1e-10 * fx.abs().max(1.0));
        let mut r = rng(a.to_bits());
        for _ in 0..200 {
            let y = sample_box(&mut r, &x, 15.0);
            let (p, q) = (psi.eval(&y).unwrap(), phi.eval(&y).unwrap());
            prop_assert!(p <= q + 1e-9 * q.abs().max(1.0));
        }
    }

    #[test]
    fn quadratic_coefficient_formula(x in prop::collection::vec(-5.0..5.0f64, 5), t in 0.0..5.0f64) {
        let f = OracleFn::quadratic_form(q5()).unwrap();
        let x = Vector::from_vec(x);
        let a = 3.0 + t;
        let phi = f.subgrad_at(&x, a).unwrap();
        let expect = (q5() * &x + &x * a) * 2.0;
        prop_assert!((phi.u - expect).amax() <= 1e-12 * x.amax().max(1.0) * 10.0);
    }

    #[test]
    fn quadratic_certificate(x in vec3(), t in 0.0..3.0f64, seed in any::<u64>()) {
        let f = OracleFn::quadratic_form(q3()).unwrap();
        let phi = f.subgrad_at(&x, 4.0 + t).unwrap();
        let rep = subgrad_inequality_sampler(&f, &x, &phi, 300, 10.0, seed).unwrap();
        prop_assert!(rep.pass, "worst {}", rep.worst_violation);
    }

    #[test]
    fn abs_square_prox_matches_generic_argmin(g in gamma(), t in 0.0..10.0f64, x0 in -20.0..20.0f64) {
        let a0 = -0.5 / g + t;
        let closed = prox_abs_square_closed_form(x0, g, a0).unwrap();
        let f = OracleFn::abs_plus_square();
        let w = 1.0 / (2.0 * g) + a0;
        let generic = regularized_argmin(&f, &Vector::from_element(1, x0), w, &InnerSolver::default()).unwrap();
        prop_assert!((closed - generic[0]).abs() <= 1e-12 * x0.abs().max(1.0));
    }

    #[test]
    fn projection_lands_in_set_and_is_idempotent(x in vec3(), r in 0.1..4.0f64) {
        let sets = [
            SetDescriptor::ball(Vector::from_vec(vec![1.0, 0.0, -1.0]), r).unwrap(),
            SetDescriptor::boxed(Vector::from_element(3, -r), Vector::from_element(3, r)).unwrap(),
            SetDescriptor::halfspace(Vector::from_vec(vec![1.0, 1.0, -2.0]), r).unwrap(),
        ];
        for s in &sets {
            let p = s.project(&x).unwrap();
            prop_assert!(s.contains(&p));
            prop_assert!((s.project(&p).unwrap() - &p).amax() <= 1e-12 * p.amax().max(1.0));
        }
    }

    #[test]
    fn ppa_descends(g in gamma(), x0 in -20.0..20.0f64, a0 in 0.0..3.0f64) {
        let f = OracleFn::abs_plus_square();
        let s = Schedule::new(ScheduleKind::PpaAdditive { delta: 0.9 }, g, a0).unwrap();
        let run = run_ppa(&f, &Vector::from_element(1, x0), &s, 40, &RunOptions::default()).unwrap();
        for w in run.records.windows(2) {
            prop_assert!(w[1].f_value <= w[0].f_value + 1e-10);
        }
        prop_assert!(run.warnings.is_empty());
    }

    #[test]
    fn constant_schedule_subtracts_coefficient(g in gamma(), a in -5.0..50.0f64, af in 0.0..5.0f64) {
        let s = Schedule::new(ScheduleKind::PsgConstantGamma, g, a).unwrap();
        let st = s.step(g, a, af, af).unwrap();
        prop_assert_eq!(st.gamma, g);
        prop_assert_eq!(st.a, a - af);
        prop_assert_eq!(st.stop.is_some(), a - af <= af - 1.0 / (2.0 * g));
    }

    #[test]
    fn adaptive_v2_keeps_identity(g in gamma(), eps in 0.1..3.0f64, af in 0.5..5.0f64, af_next in 0.5..5.0f64) {
        let a = af + eps - 0.5 / g;
        let s = Schedule::new(ScheduleKind::PsgAdaptiveV2 { epsilon: eps }, g, a).unwrap();
        let st = s.step(g, a, af, af_next).unwrap();
        let lhs = 2.0 * st.gamma * (st.a - af_next);
        let rhs = 2.0 * st.gamma * eps - 1.0;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        prop_assert!(lhs > -1.0);
    }

    #[test]
    fn jacobi_matches_nalgebra(n in 1usize..7, entries in prop::collection::vec(-5.0..5.0f64, 36)) {
        let a = Matrix::from_fn(n, n, |i, j| entries[6 * i.min(j) + i.max(j)]);
        let (vals, vecs) = eig_sym(&a).unwrap();
        let mut expect: Vec<f64> = a.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        expect.sort_by(f64::total_cmp);
        for (got, want) in vals.iter().zip(&expect) {
            prop_assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "{} vs {}", got, want);
        }
        let residual = (&a * &vecs - &vecs * Matrix::from_diagonal(&vals)).amax();
        prop_assert!(residual <= 1e-9);
    }

    #[test]
    fn grid_search_finds_quadratic_minimum(c in -10.0..10.0f64, k in 0.1..5.0f64) {
        let z = grid_argmin_1d(|t| k * (t - c).powi(2), -20.0, 20.0, 2000, 1e-12).unwrap();
        prop_assert!((z - c).abs() <= 1e-6);
    }
}

#[test]
fn runs_are_deterministic() {
    let f = OracleFn::quadratic_form(q3()).unwrap();
    let ball = SetDescriptor::unit_ball(3);
    let s = Schedule::new(ScheduleKind::PsgConstantGamma, 1.0, 200.0).unwrap().with_a_f(4.0);
    let x0 = Vector::from_vec(vec![-5.0, 5.0, -5.0]);
    let a = run_psg(&f, &ball, &x0, &s, 101, &RunOptions::default()).unwrap();
    let b = run_psg(&f, &ball, &x0, &s, 101, &RunOptions::default()).unwrap();
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}

#[test]
fn rng_is_reproducible() {
    let draw = |seed| {
        let mut r = rng(seed);
        (0..16).map(|_| r.random::<u64>()).collect::<Vec<_>>()
    };
    assert_eq!(draw(7), draw(7));
    assert_ne!(draw(7), draw(8));
}
