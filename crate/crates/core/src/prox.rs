//! The abstract proximal operator, computed through its argmin form
//! `argmin_z f(z) + (1/(2 gamma) + a0) ||z - x0||^2`.

use crate::oracle::{OracleFn, OracleKind};
use crate::sets::SetDescriptor;
use crate::{check_dim, Error, Result, Vector};

#[derive(Debug, Clone)]
pub struct ProxRequest<'a> {
    pub f: &'a OracleFn,
    pub x0: Vector,
    pub gamma: f64,
    pub a0: f64,
}

impl<'a> ProxRequest<'a> {
    pub fn new(f: &'a OracleFn, x0: Vector, gamma: f64, a0: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!("gamma must be positive, got {gamma}")));
        }
        if 2.0 * gamma * a0 < -1.0 {
            return Err(Error::InfeasibleCoefficient { a: a0, a_min: -1.0 / (2.0 * gamma), open: false });
        }
        check_dim(f.dim(), x0.len())?;
        Ok(Self { f, x0, gamma, a0 })
    }

    /// `1/(2 gamma) + a0`.
    pub fn weight(&self) -> f64 {
        1.0 / (2.0 * self.gamma) + self.a0
    }
}

/// Numerical fallback for oracles without a closed-form argmin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerSolver {
    /// Bracket width (1-D) or projected-step length (n-D) at which to stop.
    pub tol: f64,
    /// Number of starting points for the n-D search.
    pub starts: usize,
    /// Half-width of the search box; `None` uses `max(10, 4 ||x0||)`.
    pub half_width: Option<f64>,
    pub max_iter: usize,
    /// Accepted gradient norm of the regularized objective at the result.
    pub residual_tol: f64,
}

impl Default for InnerSolver {
    fn default() -> Self {
        Self { tol: 1e-10, starts: 8, half_width: None, max_iter: 20_000, residual_tol: 1e-6 }
    }
}

impl InnerSolver {
    fn half_width(&self, center: &Vector) -> f64 {
        self.half_width.unwrap_or_else(|| (4.0 * center.amax()).max(10.0))
    }

    fn minimize_1d<H: Fn(f64) -> f64>(&self, h: H, lo: f64, hi: f64) -> f64 {
        const SCAN: usize = 400;
        let width = (hi - lo) / SCAN as f64;
        let (mut best_z, mut best_h) = (lo, h(lo));
        for i in 1..=SCAN {
            let z = lo + width * i as f64;
            let v = h(z);
            if v < best_h {
                best_z = z;
                best_h = v;
            }
        }
        let (mut a, mut b) = ((best_z - width).max(lo), (best_z + width).min(hi));
        let r = (5f64.sqrt() - 1.0) / 2.0;
        let (mut c, mut d) = (b - r * (b - a), a + r * (b - a));
        let (mut hc, mut hd) = (h(c), h(d));
        for _ in 0..self.max_iter {
            if b - a <= self.tol {
                break;
            }
            if hc <= hd {
                (b, d, hd) = (d, c, hc);
                c = b - r * (b - a);
                hc = h(c);
            } else {
                (a, c, hc) = (c, d, hd);
                d = a + r * (b - a);
                hd = h(d);
            }
        }
        let mut z = 0.5 * (a + b);
        // one parabolic step through a small stencil, kept only if it helps
        let k = 1e-4 * z.abs().max(1.0);
        let (hm, h0, hp) = (h(z - k), h(z), h(z + k));
        let curv = hp - 2.0 * h0 + hm;
        if curv > 0.0 {
            let cand = (z - 0.5 * k * (hp - hm) / curv).clamp(lo, hi);
            let noise = 8.0 * f64::EPSILON * h0.abs().max(1.0);
            if (cand - z).abs() <= k && h(cand) <= h0 + noise {
                z = cand;
            }
        }
        z
    }

    fn minimize_nd<H, G>(&self, h: H, grad: G, center: &Vector, half: f64) -> (Vector, f64)
    where
        H: Fn(&Vector) -> f64,
        G: Fn(&Vector) -> Vector,
    {
        let n = center.len();
        let clamp = |z: Vector| {
            Vector::from_iterator(n, (0..n).map(|i| z[i].clamp(center[i] - half, center[i] + half)))
        };
        let mut best: Option<(Vector, f64)> = None;
        for k in 0..self.starts.max(1) {
            let mut z = center.clone();
            if k > 0 {
                for i in 0..n {
                    let bit = ((k - 1) >> (i % 3)) & 1;
                    let sign = if bit == 0 { 1.0 } else { -1.0 };
                    z[i] += sign * half * 0.5 * (1.0 + (i / 3) as f64) / (1.0 + (n / 3) as f64);
                }
            }
            let mut hz = h(&z);
            let mut step = 1.0;
            for _ in 0..self.max_iter {
                let g = grad(&z);
                let mut accepted = false;
                while step > 1e-16 {
                    let cand = clamp(&z - &g * step);
                    let hc = h(&cand);
                    let moved = (&cand - &z).norm_squared();
                    if hc <= hz - 1e-4 * moved / step {
                        let done = moved.sqrt() <= self.tol;
                        z = cand;
                        hz = hc;
                        accepted = true;
                        step *= 2.0;
                        if done {
                            step = 0.0;
                        }
                        break;
                    }
                    step *= 0.5;
                }
                if !accepted || step == 0.0 {
                    break;
                }
            }
            if best.as_ref().is_none_or(|(_, hb)| hz < *hb) {
                best = Some((z, hz));
            }
        }
        best.expect("at least one start")
    }
}

/// Closed-form prox of `|x| + x^2`. With `s = 1/gamma + 2 a0` the minimizer
/// is `(s x0 + 1)/(s + 2)` when `s x0 < -1`, `(s x0 - 1)/(s + 2)` when
/// `s x0 > 1` and `0` otherwise.
pub fn prox_abs_square_closed_form(x0: f64, gamma: f64, a0: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidArgument(format!("gamma must be positive, got {gamma}")));
    }
    if 2.0 * gamma * a0 < -1.0 {
        return Err(Error::InfeasibleCoefficient { a: a0, a_min: -1.0 / (2.0 * gamma), open: false });
    }
    Ok(abs_square_argmin(x0, (1.0 / gamma + 2.0 * a0).max(0.0)))
}

fn abs_square_argmin(x0: f64, s: f64) -> f64 {
    let sx = s * x0;
    if sx < -1.0 {
        (sx + 1.0) / (s + 2.0)
    } else if sx > 1.0 {
        (sx - 1.0) / (s + 2.0)
    } else {
        0.0
    }
}

/// `argmin_z f(z) + weight ||z - center||^2`. Closed forms cover every kind
/// except smooth oracles, which go through `solver`.
pub fn regularized_argmin(
    f: &OracleFn,
    center: &Vector,
    weight: f64,
    solver: &InnerSolver,
) -> Result<Vector> {
    check_dim(f.dim(), center.len())?;
    if !weight.is_finite() || !crate::is_finite_vec(center) {
        return Err(Error::NonFinite);
    }
    match f.kind() {
        OracleKind::AbsPlusSquare => {
            let s = 2.0 * weight;
            if s + 2.0 <= 0.0 {
                return Err(Error::Unbounded);
            }
            Ok(Vector::from_element(1, abs_square_argmin(center[0], s)))
        }
        OracleKind::NormSquare { gamma } => {
            let total = 1.0 / gamma + 2.0 * weight;
            if total <= 0.0 {
                return Err(Error::Unbounded);
            }
            Ok(center * (2.0 * weight / total))
        }
        OracleKind::QuadraticForm { eigvals, eigvecs, .. } => {
            let coords = eigvecs.transpose() * center;
            let mut out = Vector::zeros(center.len());
            for i in 0..center.len() {
                let denom = eigvals[i] + weight;
                let rhs = weight * coords[i];
                let scale = eigvals[i].abs().max(weight.abs()).max(1.0);
                if denom.abs() <= 1e-14 * scale {
                    if rhs.abs() > 1e-14 * scale {
                        return Err(Error::Unbounded);
                    }
                } else if denom < 0.0 {
                    return Err(Error::Unbounded);
                } else {
                    out += eigvecs.column(i) * (rhs / denom);
                }
            }
            Ok(out)
        }
        OracleKind::Indicator(set) => {
            if weight >= 0.0 {
                set.project(center)
            } else {
                farthest_point(set, center)
            }
        }
        OracleKind::Smooth { value, gradient, .. } => {
            let h = |z: &Vector| value(z) + weight * (z - center).norm_squared();
            let gh = |z: &Vector| gradient(z) + (z - center) * (2.0 * weight);
            let half = solver.half_width(center);
            let z = if center.len() == 1 {
                let c = center[0];
                let t = solver.minimize_1d(
                    |t| h(&Vector::from_element(1, t)),
                    c - half,
                    c + half,
                );
                Vector::from_element(1, t)
            } else {
                solver.minimize_nd(h, gh, center, half).0
            };
            let residual = gh(&z).norm();
            let on_edge = (&z - center).amax() >= half * (1.0 - 1e-12);
            if on_edge {
                return Err(Error::SolverTolerance { best: z, residual });
            }
            let scale = gradient(&z).norm().max(1.0);
            if residual > solver.residual_tol * scale {
                return Err(Error::SolverTolerance { best: z, residual });
            }
            Ok(z)
        }
    }
}

fn farthest_point(set: &SetDescriptor, p: &Vector) -> Result<Vector> {
    match set {
        SetDescriptor::Ball { center, radius } => {
            let d = p - center;
            let norm = d.norm();
            if norm == 0.0 {
                let mut e = center.clone();
                e[0] += radius;
                Ok(e)
            } else {
                Ok(center - d * (*radius / norm))
            }
        }
        SetDescriptor::Box { lo, hi } => Ok(Vector::from_iterator(
            p.len(),
            (0..p.len()).map(|i| if (p[i] - lo[i]).abs() >= (p[i] - hi[i]).abs() { lo[i] } else { hi[i] }),
        )),
        SetDescriptor::Halfspace { .. } => Err(Error::Unbounded),
    }
}

/// A global minimizer of `f(z) + (1/(2 gamma) + a0) ||z - x0||^2`.
pub fn prox_via_argmin(req: &ProxRequest<'_>, solver: &InnerSolver) -> Result<Vector> {
    regularized_argmin(req.f, &req.x0, req.weight(), solver)
}

/// For indicators the proximal operator is the projection.
pub fn prox_indicator(set: &SetDescriptor, x: &Vector, gamma: f64) -> Result<Vector> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidArgument(format!("gamma must be positive, got {gamma}")));
    }
    set.project(x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriticalityVerdict {
    GlobalMin,
    /// `f(y) - f(x0) >= -a ||y - x0||^2` with the given `a > 0`.
    ACritical(f64),
    Unknown,
}

/// Classifies a fixed point `x0` reached with `phi_1 = (a1, .)` and
/// `phi_2 = (a2, .)` in `J_gamma(x0)` by comparing the coefficients.
pub fn classify_fixed_point(f: &OracleFn, x0: &Vector, gamma: f64, a1: f64, a2: f64) -> CriticalityVerdict {
    let in_range = |a: f64| 2.0 * gamma * a >= -1.0;
    if x0.len() != f.dim() || !f.in_domain(x0) || !(gamma > 0.0) || !in_range(a1) || !in_range(a2) {
        return CriticalityVerdict::Unknown;
    }
    if a2 >= a1 {
        CriticalityVerdict::GlobalMin
    } else {
        CriticalityVerdict::ACritical(a1 - a2)
    }
}
