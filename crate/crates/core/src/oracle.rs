//! Subgradient oracles. Each one evaluates `f` and hands out elements
//! `(a, u)` of its abstract subdifferential for a requested curvature `a`.

use std::fmt;
use std::sync::Arc;

use crate::phi::PhiElement;
use crate::reference::{eig_sym, SYMMETRY_TOL};
use crate::sets::{SetDescriptor, MEMBERSHIP_TOL};
use crate::{check_dim, Error, Matrix, Result, Vector};

pub type ScalarFn = Arc<dyn Fn(&Vector) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;

/// Largest box dimension for which the farthest-vertex check enumerates.
pub const MAX_VERTEX_DIM: usize = 16;

#[derive(Clone)]
pub enum OracleKind {
    /// `||x||^2 / (2 gamma)`.
    NormSquare { gamma: f64 },
    /// `<x, Qx>`, with the eigendecomposition cached at construction.
    QuadraticForm { q: Matrix, eigvals: Vector, eigvecs: Matrix },
    /// `|x| + x^2` on the real line.
    AbsPlusSquare,
    Indicator(SetDescriptor),
    /// Smooth `g` with caller-supplied gradient and curvature rule. The
    /// coefficient `kappa(x)` is trusted as a curvature bound; if it is only a
    /// local bound, the certificates are only local too.
    Smooth {
        value: ScalarFn,
        gradient: VectorFn,
        kappa: ScalarFn,
        epsilon: f64,
        lipschitz: Option<f64>,
    },
}

impl fmt::Debug for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleKind::NormSquare { gamma } => write!(f, "NormSquare({gamma})"),
            OracleKind::QuadraticForm { q, .. } => write!(f, "QuadraticForm({q:?})"),
            OracleKind::AbsPlusSquare => write!(f, "AbsPlusSquare"),
            OracleKind::Indicator(s) => write!(f, "Indicator({s:?})"),
            OracleKind::Smooth { epsilon, lipschitz, .. } => {
                write!(f, "Smooth(epsilon={epsilon}, lipschitz={lipschitz:?})")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibleRange {
    pub a_min: f64,
    pub open: bool,
}

impl FeasibleRange {
    pub fn closed(a_min: f64) -> Self {
        Self { a_min, open: false }
    }

    pub fn admits(&self, a: f64) -> bool {
        // round-off slack: a_min often comes out of an eigen solve
        let slack = 1e-12 * self.a_min.abs().max(1.0);
        if self.open {
            a > self.a_min
        } else {
            a >= self.a_min - slack
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleFn {
    kind: OracleKind,
    dim: usize,
}

impl OracleFn {
    pub fn norm_square(dim: usize, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!("gamma must be positive, got {gamma}")));
        }
        Ok(Self { kind: OracleKind::NormSquare { gamma }, dim })
    }

    pub fn quadratic_form(q: Matrix) -> Result<Self> {
        let dim = q.nrows();
        check_dim(dim, q.ncols())?;
        let deviation = (&q - q.transpose()).amax();
        if deviation > SYMMETRY_TOL {
            return Err(Error::NotSymmetric { deviation });
        }
        let (eigvals, eigvecs) = eig_sym(&q)?;
        Ok(Self { kind: OracleKind::QuadraticForm { q, eigvals, eigvecs }, dim })
    }

    /// The constant zero function, as a zero quadratic form.
    pub fn zero(dim: usize) -> Self {
        Self::quadratic_form(Matrix::zeros(dim, dim)).expect("zero matrix is symmetric")
    }

    pub fn abs_plus_square() -> Self {
        Self { kind: OracleKind::AbsPlusSquare, dim: 1 }
    }

    pub fn indicator(set: SetDescriptor) -> Self {
        let dim = set.dim();
        Self { kind: OracleKind::Indicator(set), dim }
    }

    pub fn smooth(
        dim: usize,
        value: ScalarFn,
        gradient: VectorFn,
        kappa: ScalarFn,
        epsilon: f64,
        lipschitz: Option<f64>,
    ) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(Self { kind: OracleKind::Smooth { value, gradient, kappa, epsilon, lipschitz }, dim })
    }

    pub fn kind(&self) -> &OracleKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn set(&self) -> Option<&SetDescriptor> {
        match &self.kind {
            OracleKind::Indicator(s) => Some(s),
            _ => None,
        }
    }

    pub fn eval(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(match &self.kind {
            OracleKind::NormSquare { gamma } => x.norm_squared() / (2.0 * gamma),
            OracleKind::QuadraticForm { q, .. } => x.dot(&(q * x)),
            OracleKind::AbsPlusSquare => x[0].abs() + x[0] * x[0],
            OracleKind::Indicator(s) => {
                if s.contains(x) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            OracleKind::Smooth { value, .. } => value(x),
        })
    }

    pub fn in_domain(&self, x: &Vector) -> bool {
        match &self.kind {
            OracleKind::Indicator(s) => s.contains(x),
            _ => x.len() == self.dim,
        }
    }

    pub fn feasible_range(&self, x: &Vector) -> Result<FeasibleRange> {
        check_dim(self.dim, x.len())?;
        Ok(match &self.kind {
            OracleKind::NormSquare { gamma } => FeasibleRange::closed(-1.0 / (2.0 * gamma)),
            OracleKind::QuadraticForm { eigvals, .. } => {
                FeasibleRange::closed(if eigvals.is_empty() { 0.0 } else { -eigvals[0] })
            }
            OracleKind::AbsPlusSquare => FeasibleRange::closed(-1.0),
            OracleKind::Indicator(s) => {
                if !s.contains(x) {
                    return Err(Error::EmptySubdifferential);
                }
                let far_point = match s {
                    SetDescriptor::Ball { .. } => s.on_boundary(x),
                    SetDescriptor::Box { .. } => s.is_vertex(x),
                    SetDescriptor::Halfspace { .. } => false,
                };
                if far_point {
                    FeasibleRange { a_min: f64::NEG_INFINITY, open: true }
                } else {
                    FeasibleRange::closed(0.0)
                }
            }
            OracleKind::Smooth { kappa, .. } => FeasibleRange::closed(kappa(x)),
        })
    }

    /// Coefficient used when the caller does not pick one: the smallest
    /// feasible `a`, `kappa(x) + epsilon` for smooth oracles and `0` for
    /// indicators.
    pub fn default_coefficient(&self, x: &Vector) -> Result<f64> {
        Ok(match &self.kind {
            OracleKind::Smooth { kappa, epsilon, .. } => {
                check_dim(self.dim, x.len())?;
                kappa(x) + epsilon
            }
            OracleKind::Indicator(_) => 0.0,
            _ => self.feasible_range(x)?.a_min,
        })
    }

    /// Lipschitz constant of the gradient when one is known.
    pub fn lipschitz(&self) -> Option<f64> {
        match &self.kind {
            OracleKind::NormSquare { gamma } => Some(1.0 / gamma),
            OracleKind::QuadraticForm { eigvals, .. } => {
                Some(2.0 * eigvals.iter().fold(0.0f64, |m, l| m.max(l.abs())))
            }
            OracleKind::Smooth { lipschitz, .. } => *lipschitz,
            _ => None,
        }
    }

    /// Euclidean gradient for the differentiable kinds.
    pub fn gradient(&self, x: &Vector) -> Option<Vector> {
        if x.len() != self.dim {
            return None;
        }
        match &self.kind {
            OracleKind::NormSquare { gamma } => Some(x / *gamma),
            OracleKind::QuadraticForm { q, .. } => Some(q * x * 2.0),
            OracleKind::Smooth { gradient, .. } => Some(gradient(x)),
            _ => None,
        }
    }

    pub fn is_differentiable(&self) -> bool {
        matches!(
            self.kind,
            OracleKind::NormSquare { .. } | OracleKind::QuadraticForm { .. } | OracleKind::Smooth { .. }
        )
    }

    /// A subgradient `(a, u)` at `x`.
    pub fn subgrad_at(&self, x: &Vector, a: f64) -> Result<PhiElement> {
        check_dim(self.dim, x.len())?;
        if !self.in_domain(x) {
            return Err(Error::EmptySubdifferential);
        }
        let range = self.feasible_range(x)?;
        if !range.admits(a) || !a.is_finite() {
            return Err(Error::InfeasibleCoefficient { a, a_min: range.a_min, open: range.open });
        }
        let u = match &self.kind {
            OracleKind::NormSquare { gamma } => x * (1.0 / gamma + 2.0 * a),
            OracleKind::QuadraticForm { q, .. } => (q * x + x * a) * 2.0,
            OracleKind::AbsPlusSquare => {
                let t = x[0];
                let s = if t > 0.0 {
                    1.0
                } else if t < 0.0 {
                    -1.0
                } else {
                    0.0
                };
                Vector::from_element(1, s + 2.0 * (a + 1.0) * t)
            }
            OracleKind::Indicator(set) => {
                if a >= 0.0 {
                    x * (2.0 * a)
                } else {
                    // Mirror x through the set's centre; x is then the point
                    // of the set farthest from u / (2a).
                    let p = match set {
                        SetDescriptor::Ball { center, .. } => center * 2.0 - x,
                        SetDescriptor::Box { lo, hi } => lo + hi - x,
                        SetDescriptor::Halfspace { .. } => {
                            unreachable!("halfspace range is closed at 0")
                        }
                    };
                    p * (2.0 * a)
                }
            }
            OracleKind::Smooth { gradient, .. } => x * (2.0 * a) + gradient(x),
        };
        Ok(PhiElement::linear(a, u))
    }
}

/// Whether `phi` belongs to the subdifferential of the indicator of `set` at
/// `x`. Negative curvature on a halfspace is reported as unsupported.
pub fn indicator_subgrad_check(set: &SetDescriptor, x: &Vector, phi: &PhiElement) -> Result<bool> {
    check_dim(set.dim(), x.len())?;
    check_dim(set.dim(), phi.dim())?;
    if !set.contains(x) {
        return Err(Error::EmptySubdifferential);
    }
    let tol = MEMBERSHIP_TOL * set.scale();
    let (a, u) = (phi.a, &phi.u);
    if a > 0.0 {
        let target = u / (2.0 * a);
        return Ok((set.project(&target)? - x).norm() <= tol);
    }
    if a == 0.0 {
        let utol = MEMBERSHIP_TOL * u.norm().max(1.0);
        return Ok(match set {
            SetDescriptor::Ball { center, .. } => {
                if !set.on_boundary(x) {
                    u.norm() <= utol
                } else {
                    let dir = (x - center).normalize();
                    let along = u.dot(&dir);
                    along >= -utol && (u - &dir * along).norm() <= utol
                }
            }
            SetDescriptor::Box { lo, hi } => (0..x.len()).all(|i| {
                let at_lo = (x[i] - lo[i]).abs() <= tol;
                let at_hi = (x[i] - hi[i]).abs() <= tol;
                match (at_lo, at_hi) {
                    (true, true) => true,
                    (true, false) => u[i] <= utol,
                    (false, true) => u[i] >= -utol,
                    (false, false) => u[i].abs() <= utol,
                }
            }),
            SetDescriptor::Halfspace { normal, .. } => {
                if !set.on_boundary(x) {
                    u.norm() <= utol
                } else {
                    let dir = normal.normalize();
                    let along = u.dot(&dir);
                    along >= -utol && (u - &dir * along).norm() <= utol
                }
            }
        });
    }
    let p = u / (2.0 * a);
    match set {
        SetDescriptor::Ball { center, radius } => {
            let d = &p - center;
            if d.norm() <= tol {
                return Ok(set.on_boundary(x));
            }
            let far = center - d.normalize() * *radius;
            Ok((far - x).norm() <= tol.max(MEMBERSHIP_TOL * p.norm()))
        }
        SetDescriptor::Box { lo, hi } => {
            let n = x.len();
            if n > MAX_VERTEX_DIM {
                return Err(Error::Unsupported(format!("vertex enumeration in dimension {n}")));
            }
            let mut best = 0.0f64;
            for mask in 0u32..(1u32 << n) {
                let mut d2 = 0.0;
                for i in 0..n {
                    let vi = if mask & (1 << i) != 0 { hi[i] } else { lo[i] };
                    d2 += (vi - p[i]).powi(2);
                }
                best = best.max(d2);
            }
            let dx = (x - &p).norm_squared();
            Ok(dx >= best - MEMBERSHIP_TOL * best.max(1.0))
        }
        SetDescriptor::Halfspace { .. } => Err(Error::Unsupported(
            "negative curvature subgradients of a halfspace indicator".into(),
        )),
    }
}

/// `u - 2a x`, a proximal normal to the set at `x`.
pub fn proximal_normal_vector(set: &SetDescriptor, x: &Vector, phi: &PhiElement) -> Result<Vector> {
    if !indicator_subgrad_check(set, x, phi)? {
        return Err(Error::InvalidArgument(
            "element is not a subgradient of the indicator at x".into(),
        ));
    }
    phi.gradient_at(x)
}
