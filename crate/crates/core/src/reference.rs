//! Brute-force ground truth: grid argmin, Jacobi eigenvalues, finite
//! differences and sampled subgradient inequalities. Nothing in here is used
//! by the algorithms themselves.

use rand::{Rng, SeedableRng};
use rand_xorshift::XorShiftRng;

use crate::oracle::{OracleFn, OracleKind};
use crate::phi::PhiElement;
use crate::{check_dim, Error, Matrix, Result, Vector};

pub const DEFAULT_COARSE: usize = 10_000;
pub const DEFAULT_REFINE_TOL: f64 = 1e-12;
pub const JACOBI_TOL: f64 = 1e-12;
pub const SYMMETRY_TOL: f64 = 1e-12;
pub const SAMPLER_TOL: f64 = -1e-9;
pub const MAX_SAMPLER_DIM: usize = 16;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Seedable generator shared by the samplers (xorshift128, see README).
pub fn rng(seed: u64) -> XorShiftRng {
    XorShiftRng::seed_from_u64(seed)
}

/// Uniform point in the box `center +- radius`.
pub fn sample_box<R: Rng>(rng: &mut R, center: &Vector, radius: f64) -> Vector {
    Vector::from_iterator(
        center.len(),
        center.iter().map(|c| c + rng.random_range(-radius..=radius)),
    )
}

/// Minimizer of `h` on `[lo, hi]`: uniform scan with `coarse` points, golden
/// section inside the best cell down to `refine_tol`, then a few parabolic
/// polishing steps on shrinking stencils.
pub fn grid_argmin_1d<F>(h: F, lo: f64, hi: f64, coarse: usize, refine_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!("bad bracket [{lo}, {hi}]")));
    }
    let coarse = coarse.max(3);
    let step = (hi - lo) / (coarse - 1) as f64;
    let mut best = (0usize, f64::INFINITY);
    for i in 0..coarse {
        let z = lo + step * i as f64;
        let v = h(z);
        if !v.is_finite() {
            return Err(Error::NonFinite);
        }
        if v < best.1 {
            best = (i, v);
        }
    }
    let mut a = (lo + step * best.0.saturating_sub(1) as f64).max(lo);
    let mut b = (lo + step * (best.0 + 1) as f64).min(hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (h(c), h(d));
    while b - a > refine_tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = h(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = h(d);
        }
        if b - a <= f64::EPSILON * a.abs().max(b.abs()).max(1.0) {
            break;
        }
    }
    let mut z = 0.5 * (a + b);
    let mut hz = h(z);
    for &k in &[1e-3, 1e-4, 1e-5] {
        let k = k * z.abs().max(1.0);
        let (hm, hp) = (h(z - k), h(z + k));
        let curv = hp - 2.0 * hz + hm;
        if curv <= 0.0 {
            continue;
        }
        let cand = (z - 0.5 * k * (hp - hm) / curv).clamp(lo, hi);
        let hc = h(cand);
        // near the minimum h is flat to within rounding, so a vertex inside
        // the stencil is trusted unless it is visibly worse
        let noise = 8.0 * f64::EPSILON * hz.abs().max(1.0);
        if (cand - z).abs() <= k && hc <= hz + noise {
            z = cand;
            hz = hc.min(hz);
        }
    }
    Ok(z)
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations. Eigenvalues come
/// back ascending, eigenvectors are the matching columns.
pub fn eig_sym(q: &Matrix) -> Result<(Vector, Matrix)> {
    let n = q.nrows();
    check_dim(n, q.ncols())?;
    let deviation = (q - q.transpose()).amax();
    if deviation > SYMMETRY_TOL {
        return Err(Error::NotSymmetric { deviation });
    }
    let mut a = q.clone();
    let mut v = Matrix::identity(n, n);
    let off = |m: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)] * m[(i, j)];
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off(&a) > JACOBI_TOL {
        sweeps += 1;
        if sweeps > 100 {
            return Err(Error::Unsupported("jacobi sweeps did not converge".into()));
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = a[(p, r)];
                if apr == 0.0 {
                    continue;
                }
                let theta = (a[(r, r)] - a[(p, p)]) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akr = a[(k, r)];
                    a[(k, p)] = cs * akp - sn * akr;
                    a[(k, r)] = sn * akp + cs * akr;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let ark = a[(r, k)];
                    a[(p, k)] = cs * apk - sn * ark;
                    a[(r, k)] = sn * apk + cs * ark;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkr = v[(k, r)];
                    v[(k, p)] = cs * vkp - sn * vkr;
                    v[(k, r)] = sn * vkp + cs * vkr;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = Vector::from_iterator(n, order.iter().map(|&i| a[(i, i)]));
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src));
    }
    Ok((values, vectors))
}

/// Central differences. `h = None` picks `1e-6 * max(1, ||x||)`.
pub fn fd_gradient<F>(g: F, x: &Vector, h: Option<f64>) -> Vector
where
    F: Fn(&Vector) -> f64,
{
    let h = h.unwrap_or(1e-6 * x.norm().max(1.0));
    let mut grad = Vector::zeros(x.len());
    let mut y = x.clone();
    for i in 0..x.len() {
        y[i] = x[i] + h;
        let fp = g(&y);
        y[i] = x[i] - h;
        let fm = g(&y);
        y[i] = x[i];
        grad[i] = (fp - fm) / (2.0 * h);
    }
    grad
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerReport {
    pub pass: bool,
    /// Minimum over probes of `f(y) - f(x) - phi(y) + phi(x)`.
    pub worst_violation: f64,
    pub witness: Option<Vector>,
    pub probes: usize,
}

/// Checks `f(y) - f(x) >= phi(y) - phi(x)` on `samples` uniform points of the
/// box `x +- radius`, ten axis-aligned extreme points and, for quadratic
/// forms, `+- radius` along each eigenvector.
pub fn subgrad_inequality_sampler(
    f: &OracleFn,
    x: &Vector,
    phi: &PhiElement,
    samples: usize,
    radius: f64,
    seed: u64,
) -> Result<SamplerReport> {
    let n = f.dim();
    check_dim(n, x.len())?;
    check_dim(n, phi.dim())?;
    if n > MAX_SAMPLER_DIM {
        return Err(Error::Unsupported(format!("sampler dimension {n} > {MAX_SAMPLER_DIM}")));
    }
    let fx = f.eval(x)?;
    if !fx.is_finite() {
        return Err(Error::EmptySubdifferential);
    }
    let phix = phi.eval(x)?;

    let mut probes: Vec<Vector> = Vec::with_capacity(samples + 10 + 2 * n);
    for k in 0..10 {
        let axis = (k / 2) % n;
        let shrink = 0.5f64.powi((k / (2 * n)) as i32);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let mut y = x.clone();
        y[axis] += sign * radius * shrink;
        probes.push(y);
    }
    if let OracleKind::QuadraticForm { eigvecs, .. } = f.kind() {
        for j in 0..n {
            for sign in [1.0, -1.0] {
                probes.push(x + eigvecs.column(j) * (sign * radius));
            }
        }
    }
    let mut r = rng(seed);
    for _ in 0..samples {
        probes.push(sample_box(&mut r, x, radius));
    }

    let mut worst = f64::INFINITY;
    let mut witness = None;
    for y in &probes {
        let fy = f.eval(y)?;
        if fy == f64::INFINITY {
            continue;
        }
        let gap = fy - fx - (phi.eval(y)? - phix);
        if gap < worst {
            worst = gap;
            witness = Some(y.clone());
        }
    }
    let scale = fx.abs().max(1.0);
    Ok(SamplerReport {
        pass: !(worst < SAMPLER_TOL * scale),
        worst_violation: worst,
        witness: if worst < SAMPLER_TOL * scale { witness } else { None },
        probes: probes.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    #[test]
    fn grid_argmin_examples() {
        let z = grid_argmin_1d(
            |z| z.abs() + z * z + 0.5 * (z - 3.0).powi(2),
            -20.0,
            20.0,
            DEFAULT_COARSE,
            DEFAULT_REFINE_TOL,
        )
        .unwrap();
        assert_abs_diff_eq!(z, 2.0 / 3.0, epsilon = 1e-10);
        let z = grid_argmin_1d(|z| (z - 5.0).powi(2), -20.0, 20.0, DEFAULT_COARSE, 1e-12).unwrap();
        assert_abs_diff_eq!(z, 5.0, epsilon = 1e-10);
        let z = grid_argmin_1d(|z| z * z, 1.0, 2.0, DEFAULT_COARSE, 1e-12).unwrap();
        assert_abs_diff_eq!(z, 1.0, epsilon = 1e-10);
        assert!(grid_argmin_1d(|z| z, 1.0, 1.0, 10, 1e-12).is_err());
        assert_eq!(grid_argmin_1d(|_| f64::NAN, 0.0, 1.0, 10, 1e-12), Err(Error::NonFinite));
    }

    #[test]
    fn jacobi_identity_and_asymmetric() {
        let (vals, vecs) = eig_sym(&Matrix::identity(3, 3)).unwrap();
        assert_eq!(vals, v(&[1.0, 1.0, 1.0]));
        assert_abs_diff_eq!((vecs.transpose() * &vecs - Matrix::identity(3, 3)).amax(), 0.0, epsilon = 1e-12);
        let bad = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(eig_sym(&bad), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn jacobi_matches_nalgebra() {
        let q = Matrix::from_row_slice(4, 4, &[
            4.0, 1.0, -2.0, 2.0, 1.0, 2.0, 0.0, 1.0, -2.0, 0.0, 3.0, -2.0, 2.0, 1.0, -2.0, -1.0,
        ]);
        let (vals, vecs) = eig_sym(&q).unwrap();
        let mut expect: Vec<f64> = q.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        expect.sort_by(f64::total_cmp);
        for (a, b) in vals.iter().zip(expect.iter()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-10);
        }
        let recon = &vecs * Matrix::from_diagonal(&vals) * vecs.transpose();
        assert!((recon - q).amax() <= 1e-8);
    }

    #[test]
    fn fd_examples() {
        let g = |p: &Vector| {
            let (x, y) = (p[0], p[1]);
            x.powi(4) / 12.0 + x * x / 2.0 - y.powi(4) / 12.0 - y * y / 2.0
        };
        let d = fd_gradient(g, &v(&[1.0, 1.0]), None);
        assert_abs_diff_eq!(d[0], 4.0 / 3.0, epsilon = 1e-6);
        assert_abs_diff_eq!(d[1], -4.0 / 3.0, epsilon = 1e-6);
        assert_eq!(fd_gradient(|_| 7.0, &v(&[1.0, 2.0]), None), v(&[0.0, 0.0]));
        let d = fd_gradient(|p: &Vector| p.norm_squared(), &v(&[1.0, 0.0]), None);
        assert_abs_diff_eq!(d[0], 2.0, epsilon = 1e-8);
        assert_abs_diff_eq!(d[1], 0.0, epsilon = 1e-8);
    }

    #[test]
    fn sampler_examples() {
        let f = OracleFn::abs_plus_square();
        let x = v(&[2.0]);
        let ok = subgrad_inequality_sampler(&f, &x, &PhiElement::linear(0.0, v(&[5.0])), 1000, 10.0, 1)
            .unwrap();
        assert!(ok.pass, "{ok:?}");
        let bad = subgrad_inequality_sampler(&f, &x, &PhiElement::linear(0.0, v(&[7.0])), 1000, 10.0, 1)
            .unwrap();
        assert!(!bad.pass);
        let w = bad.witness.unwrap()[0];
        assert!(w > 2.0 && w < 4.0, "witness {w}");
        let zero = subgrad_inequality_sampler(&f, &v(&[0.0]), &PhiElement::zero(1), 1000, 10.0, 1)
            .unwrap();
        assert!(zero.pass);
    }

    #[test]
    fn sampler_is_deterministic() {
        let f = OracleFn::abs_plus_square();
        let phi = PhiElement::linear(0.0, v(&[7.0]));
        let a = subgrad_inequality_sampler(&f, &v(&[2.0]), &phi, 500, 10.0, 9).unwrap();
        let b = subgrad_inequality_sampler(&f, &v(&[2.0]), &phi, 500, 10.0, 9).unwrap();
        assert_eq!(a, b);
    }
}
