//! Acceptance suite. Prints one `criterion N: PASS|FAIL` line per criterion
//! and exits nonzero if any of them fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use absprox::algorithms::{run_fb, run_psg, RunOptions, Schedule, ScheduleKind, Terminal};
use absprox::experiments::named;
use absprox::experiments::verify::{oracle_zoo, q3, q5, random_feasible};
use absprox::experiments::ExperimentRun;
use absprox::phi::{duality_map_element, duality_map_inverse, PhiElement, SetValued};
use absprox::prox::{prox_abs_square_closed_form, prox_indicator};
use absprox::reference::{
    eig_sym, fd_gradient, grid_argmin_1d, rng, sample_box, subgrad_inequality_sampler, DEFAULT_COARSE,
    DEFAULT_REFINE_TOL,
};
use absprox::{OracleFn, SetDescriptor, Vector};
use rand::Rng;

const SEED: u64 = 20_240_917;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }

    fn error(e: impl std::fmt::Display) -> Self {
        Self::new(false, format!("error: {e}"))
    }
}

fn v(xs: &[f64]) -> Vector {
    Vector::from_column_slice(xs)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn runs_for(name: &str) -> Result<Vec<(f64, ExperimentRun)>, String> {
    let exp = named::find(name).ok_or_else(|| format!("no experiment named {name}"))?;
    exp.run(false)
        .into_iter()
        .map(|(g, r)| r.map(|run| (g, run)).map_err(|e| format!("gamma {g}: {e}")))
        .collect()
}

fn criterion_1() -> Outcome {
    let (m3, m5) = (q3(), q5());
    let start = Instant::now();
    let r3 = eig_sym(&m3);
    let r5 = eig_sym(&m5);
    let elapsed = start.elapsed();
    let (Ok((e3, _)), Ok((e5, _))) = (r3, r5) else {
        return Outcome::new(false, "eig_sym returned an error");
    };
    let err3 = max_abs_diff(e3.as_slice(), &[-4.0, 2.0, 4.0]);
    let err5 = max_abs_diff(e5.as_slice(), &[-3.0, -1.0, 1.0, 2.0, 2.0]);
    let pass = err3 <= 1e-9 && err5 <= 1e-9 && elapsed < Duration::from_millis(1);
    Outcome::new(pass, format!("3x3 error {err3:.1e}, 5x5 error {err5:.1e}, {elapsed:?} (limit 1e-9, 1 ms)"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let runs = match runs_for("psg-q3-const") {
        Ok(r) => r,
        Err(e) => return Outcome::error(e),
    };
    let elapsed = start.elapsed();
    let q = q3();
    let mut notes = Vec::new();
    let mut pass = elapsed < Duration::from_secs(1);

    let Some((_, main)) = runs.iter().find(|(g, _)| *g == 1.0) else {
        return Outcome::new(false, "no gamma = 1 run");
    };
    let Some(x_star) = main.reference.clone() else {
        return Outcome::new(false, "gamma = 1 run has no reference point");
    };
    let gap = (main.result.last().f_value + 4.0).abs();
    pass &= gap <= 1e-2;
    notes.push(format!("gamma=1 |f+4| {gap:.1e}"));

    // Fejér bound recomputed from the records: alpha = 1 + 2 gamma a and
    // U_n = ||2 a^f x_n - u^f|| = 2 ||Q x_n||.
    let recs = &main.result.records;
    let mut worst = f64::INFINITY;
    for w in recs.windows(2) {
        let (p, c) = (&w[0], &w[1]);
        let denom = 1.0 + 2.0 * p.gamma * (p.a - p.a_f);
        let u_n = 2.0 * (&q * &p.x).norm();
        let lhs = (1.0 + 2.0 * c.gamma * c.a) * (&x_star - &c.x).norm_squared();
        let rhs = (1.0 + 2.0 * p.gamma * p.a) * (&x_star - &p.x).norm_squared() + p.gamma * p.gamma * u_n * u_n / denom;
        let slack = (rhs - lhs) / lhs.abs().max(rhs.abs()).max(1.0);
        worst = worst.min(slack);
    }
    let fejer_ok = worst >= -1e-9 && recs.len() > 1;
    pass &= fejer_ok;
    notes.push(format!("Fejér on {} steps, min relative slack {worst:.2e}", recs.len() - 1));

    match runs.iter().find(|(g, _)| *g == 0.01) {
        Some((_, small)) => {
            let early = matches!(small.result.terminal, Terminal::StopRule(_))
                && small.result.records.len() < small.config.n_iter + 1;
            pass &= early;
            notes.push(format!(
                "gamma=0.01 stops after {} of {} steps",
                small.result.records.len() - 1,
                small.config.n_iter
            ));
        }
        None => {
            pass = false;
            notes.push("no gamma = 0.01 run".into());
        }
    }
    notes.push(format!("{elapsed:?}"));
    Outcome::new(pass, notes.join(", "))
}

fn criterion_3() -> Outcome {
    let runs = match runs_for("psg-q5-adaptive-x02") {
        Ok(r) => r,
        Err(e) => return Outcome::error(e),
    };
    let Some((_, run)) = runs.iter().find(|(g, _)| *g == 1.0) else {
        return Outcome::new(false, "no gamma0 = 1 run");
    };
    let eps = match run.config.schedule {
        ScheduleKind::PsgAdaptiveV2 { epsilon } => epsilon,
        other => return Outcome::new(false, format!("unexpected schedule {other:?}")),
    };
    let gap = (run.result.last().f_value + 3.0).abs();
    let mut worst_identity = 0.0f64;
    let mut above = true;
    for (i, r) in run.result.records.iter().enumerate() {
        let lhs = 2.0 * r.gamma * (r.a - r.a_f);
        above &= lhs > -1.0;
        if i > 0 {
            let rhs = 2.0 * r.gamma * eps - 1.0;
            worst_identity = worst_identity.max((lhs - rhs).abs() / rhs.abs().max(1.0));
        }
    }
    let pass = gap <= 1e-1 && above && worst_identity <= 1e-12;
    Outcome::new(
        pass,
        format!(
            "|f+3| {gap:.1e}, 2g(a-a^f) = 2g eps - 1 to {worst_identity:.1e} over {} records, all > -1: {above}",
            run.result.records.len()
        ),
    )
}

fn criterion_4() -> Outcome {
    let runs = match runs_for("ppa-absq") {
        Ok(r) => r,
        Err(e) => return Outcome::error(e),
    };
    let mut pass = runs.len() == 4;
    let mut notes = Vec::new();
    for (gamma, run) in &runs {
        let recs = &run.result.records;
        let descent = recs.windows(2).all(|w| w[1].f_value <= w[0].f_value + 1e-10);
        let weighted: Vec<f64> = recs.iter().map(|r| (1.0 / (2.0 * r.gamma) + r.a) * r.x.norm_squared()).collect();
        let fejer = weighted.windows(2).all(|w| w[1] <= w[0]);
        let x_end = recs.last().map_or(f64::NAN, |r| r.x[0].abs());
        let end_ok = *gamma == 0.01 || x_end <= 1e-3;
        pass &= descent && fejer && end_ok;
        notes.push(format!("gamma={gamma}: descent {descent}, weighted norm monotone {fejer}, |x_N| {x_end:.1e}"));
    }
    Outcome::new(pass, notes.join("; "))
}

fn criterion_5() -> Outcome {
    let mut r = rng(SEED);
    let draws: Vec<(f64, f64, f64)> = (0..1000)
        .map(|_| {
            let gamma = r.random_range(0.01..10.0);
            let a0 = r.random_range(-0.5 / gamma..10.0);
            (gamma, a0, r.random_range(-20.0..20.0))
        })
        .collect();
    let start = Instant::now();
    let mut worst = 0.0f64;
    for &(gamma, a0, x0) in &draws {
        let closed = match prox_abs_square_closed_form(x0, gamma, a0) {
            Ok(z) => z,
            Err(e) => return Outcome::error(e),
        };
        let w = 1.0 / (2.0 * gamma) + a0;
        let grid = match grid_argmin_1d(
            |z| z.abs() + z * z + w * (z - x0).powi(2),
            -25.0,
            25.0,
            DEFAULT_COARSE,
            DEFAULT_REFINE_TOL,
        ) {
            Ok(z) => z,
            Err(e) => return Outcome::error(e),
        };
        worst = worst.max((closed - grid).abs());
    }
    let elapsed = start.elapsed();
    let readme = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../README.md")).unwrap_or_default();
    let documented = readme.contains("s + 2") && readme.contains("s + 1");
    let pass = worst <= 1e-8 && elapsed < Duration::from_secs(1) && documented;
    Outcome::new(
        pass,
        format!("1000 draws, max gap {worst:.1e} (limit 1e-8), {elapsed:?}, denominator note in README: {documented}"),
    )
}

fn criterion_6() -> Outcome {
    let mut r = rng(SEED + 6);
    let mut pass = true;
    let mut notes = Vec::new();
    for (k, (name, f)) in oracle_zoo().into_iter().enumerate() {
        let mut worst = f64::INFINITY;
        for i in 0..100u64 {
            let res = random_feasible(&f, &mut r)
                .and_then(|(x, a)| f.subgrad_at(&x, a).map(|phi| (x, phi)))
                .and_then(|(x, phi)| subgrad_inequality_sampler(&f, &x, &phi, 1000, 10.0, SEED + 100 * k as u64 + i));
            match res {
                Ok(rep) => worst = worst.min(rep.worst_violation),
                Err(e) => return Outcome::error(format!("{name}: {e}")),
            }
        }
        pass &= worst >= -1e-9;
        notes.push(format!("{name} {worst:.1e}"));
    }

    // Negative control: a 1e-3 curvature deficit on the 3x3 form.
    let q = q3();
    let f = match OracleFn::quadratic_form(q.clone()) {
        Ok(f) => f,
        Err(e) => return Outcome::error(e),
    };
    let a = 4.0 - 1e-3;
    let mut caught = 0;
    for i in 0..100u64 {
        let x = sample_box(&mut r, &Vector::zeros(3), 5.0);
        let u = (&q * &x + &x * a) * 2.0;
        match subgrad_inequality_sampler(&f, &x, &PhiElement::linear(a, u), 1000, 10.0, SEED + 7000 + i) {
            Ok(rep) => caught += usize::from(!rep.pass),
            Err(e) => return Outcome::error(e),
        }
    }
    pass &= caught == 100;
    notes.push(format!("negative control caught {caught}/100"));
    Outcome::new(pass, notes.join(", "))
}

fn criterion_7() -> Outcome {
    let mut r = rng(SEED + 7);
    let mut identity_fail = 0;
    for _ in 0..1000 {
        let gamma = r.random_range(0.01..10.0);
        let a = -0.5 / gamma + r.random_range(1e-6..20.0);
        let u = sample_box(&mut r, &Vector::zeros(3), 10.0);
        let phi = PhiElement::linear(a, u);
        let ok = match duality_map_inverse(&phi, gamma) {
            Ok(SetValued::Point(x)) => {
                duality_map_element(&x, gamma, a).is_ok_and(|back| back.same_subgradient(&phi, 1e-12))
            }
            _ => false,
        };
        identity_fail += usize::from(!ok);
    }

    let mut region_fail = 0;
    for i in 0..1000 {
        let gamma = r.random_range(0.01..10.0);
        let boundary = -1.0 / (2.0 * gamma);
        let (a, zero_u) = match i % 4 {
            0 => (boundary - r.random_range(1e-6..10.0), false),
            1 => (boundary, false),
            2 => (boundary, true),
            _ => (boundary + r.random_range(1e-6..10.0), r.random_bool(0.5)),
        };
        let u = if zero_u { Vector::zeros(2) } else { sample_box(&mut r, &Vector::zeros(2), 10.0) };
        let expect_empty = 2.0 * gamma * a < -1.0 || (a == boundary && u.norm() > 0.0);
        match duality_map_inverse(&PhiElement::linear(a, u), gamma) {
            Ok(res) => region_fail += usize::from(matches!(res, SetValued::Empty) != expect_empty),
            Err(_) => region_fail += 1,
        }
    }
    Outcome::new(
        identity_fail == 0 && region_fail == 0,
        format!("identity failures {identity_fail}/1000, empty-region mismatches {region_fail}/1000"),
    )
}

fn criterion_8() -> Outcome {
    let mut r = rng(SEED + 8);
    let sets = [
        (SetDescriptor::ball(v(&[0.5, -1.0, 2.0]), 1.5), "ball"),
        (SetDescriptor::boxed(v(&[-1.0, 0.0, -2.0]), v(&[1.0, 3.0, 0.5])), "box"),
        (SetDescriptor::halfspace(v(&[1.0, -2.0, 0.5]), 0.7), "halfspace"),
    ];
    let mut notes = Vec::new();
    let mut pass = true;
    for (set, name) in sets {
        let set = match set {
            Ok(s) => s,
            Err(e) => return Outcome::error(e),
        };
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let x = sample_box(&mut r, &Vector::zeros(3), 6.0);
            let expect = match &set {
                SetDescriptor::Ball { center, radius } => {
                    let d = &x - center;
                    center + &d * (radius / d.norm().max(*radius))
                }
                SetDescriptor::Box { lo, hi } => x.zip_zip_map(lo, hi, |t, l, h| t.max(l).min(h)),
                SetDescriptor::Halfspace { normal, offset } => {
                    &x - normal * ((normal.dot(&x) - offset).max(0.0) / normal.norm_squared())
                }
            };
            let gamma = r.random_range(0.01..10.0);
            match prox_indicator(&set, &x, gamma) {
                Ok(p) => worst = worst.max((p - expect).amax()),
                Err(e) => return Outcome::error(e),
            }
        }
        pass &= worst <= 1e-12;
        notes.push(format!("{name} {worst:.1e}"));
    }
    Outcome::new(pass, format!("max deviation from projection: {}", notes.join(", ")))
}

fn criterion_9() -> Outcome {
    let ball = SetDescriptor::unit_ball(3);
    let f = OracleFn::indicator(ball.clone());
    let g = match OracleFn::quadratic_form(q3()) {
        Ok(g) => g,
        Err(e) => return Outcome::error(e),
    };
    let sched = match Schedule::new(ScheduleKind::PsgConstantGamma, 1.0, 200.0) {
        Ok(s) => s.with_a_f(4.0),
        Err(e) => return Outcome::error(e),
    };
    let x0 = v(&[-5.0, 5.0, -5.0]);
    let opts = RunOptions::default();
    let (fb, psg) = match (run_fb(&f, &g, &x0, &sched, 50, &opts), run_psg(&g, &ball, &x0, &sched, 50, &opts)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Outcome::error(e),
    };
    let steps = fb.records.len().min(psg.records.len()) - 1;
    let worst = fb
        .records
        .iter()
        .zip(&psg.records)
        .map(|(a, b)| (&a.x - &b.x).amax())
        .fold(0.0, f64::max);
    let pass = steps == 50 && worst <= 1e-10;
    Outcome::new(pass, format!("{steps} steps compared, max difference {worst:.1e} (limit 1e-10)"))
}

fn hessian_gradient(p: &Vector) -> Vector {
    let (x, y) = (p[0], p[1]);
    v(&[x.powi(3) / 3.0 + x, -y.powi(3) / 3.0 - y])
}

fn criterion_10() -> Outcome {
    let runs = match runs_for("fb-hessian") {
        Ok(r) => r,
        Err(e) => return Outcome::error(e),
    };
    let Some(eps) = runs.first().and_then(|(_, r)| r.config.epsilon) else {
        return Outcome::new(false, "no runs or no epsilon");
    };
    let g = match absprox::experiments::hessian_example(eps) {
        Ok(g) => g,
        Err(e) => return Outcome::error(e),
    };
    let mut pass = true;
    let mut notes = Vec::new();
    let (mut lemma_worst, mut fd_worst) = (0.0f64, 0.0f64);
    for (gamma, run) in &runs {
        let recs = &run.result.records;
        let finite = recs.iter().all(|r| r.x.iter().all(|t| t.is_finite()) && !r.f_value.is_nan());
        let steps = recs.len() - 1;
        pass &= finite && steps == 1001;
        let mut line = format!("gamma={gamma}: {steps}/1001 steps, no NaN {finite}");
        if *gamma == 0.1 {
            let x_end = recs.last().map_or(f64::NAN, |r| r.x[0].abs());
            pass &= x_end <= 1e-3;
            line.push_str(&format!(", |x_N| {x_end:.2e} (limit 1e-3)"));
        }
        notes.push(line);

        for r in recs {
            let grad = hessian_gradient(&r.x);
            let phi = match g.subgrad_at(&r.x, r.a_f) {
                Ok(phi) => phi,
                Err(e) => return Outcome::error(e),
            };
            let lhs = &phi.u - &r.x * (2.0 * r.a_f);
            let scale = phi.u.norm().max((&r.x * (2.0 * r.a_f)).norm()).max(grad.norm()).max(1.0);
            lemma_worst = lemma_worst.max((lhs - &grad).amax() / scale);
            let fd = fd_gradient(|p| g.eval(p).unwrap_or(f64::NAN), &r.x, None);
            fd_worst = fd_worst.max((fd - &grad).amax() / grad.amax().max(1.0));
        }
    }
    pass &= lemma_worst <= 1e-12 && fd_worst <= 1e-5;
    notes.push(format!("gradient identity {lemma_worst:.1e}, finite differences {fd_worst:.1e}"));
    Outcome::new(pass, notes.join("; "))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("eigenvalues of the 3x3 and 5x5 test matrices", criterion_1),
        ("psg-q3-const endpoint, Fejér bound, early stop", criterion_2),
        ("psg-q5-adaptive-x02 endpoint and schedule identity", criterion_3),
        ("ppa-absq descent and weighted distance", criterion_4),
        ("closed-form prox against grid search", criterion_5),
        ("subgradient certificates and negative control", criterion_6),
        ("duality map identity and empty region", criterion_7),
        ("indicator prox equals projection", criterion_8),
        ("forward-backward with a ball indicator equals projected subgradient", criterion_9),
        ("fb-hessian run", criterion_10),
    ];
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let out = check();
        failed += usize::from(!out.pass);
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {}: {verdict} [{title}] {}", i + 1, out.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
