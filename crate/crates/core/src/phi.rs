//! Elementary quadratic functions `phi(x) = -a||x||^2 + <u,x> + c` and the
//! duality map `J_gamma`, the subdifferential of `||.||^2 / (2 gamma)`.

use crate::{check_dim, Error, Result, Vector};

/// Relative tolerance for recognising the `a = -1/(2 gamma)` boundary.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PhiElement {
    pub a: f64,
    pub u: Vector,
    pub c: f64,
}

impl PhiElement {
    pub fn new(a: f64, u: Vector, c: f64) -> Self {
        Self { a, u, c }
    }

    /// Element with `c = 0`.
    pub fn linear(a: f64, u: Vector) -> Self {
        Self { a, u, c: 0.0 }
    }

    pub fn zero(n: usize) -> Self {
        Self::linear(0.0, Vector::zeros(n))
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn eval(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(-self.a * x.norm_squared() + self.u.dot(x) + self.c)
    }

    pub fn sub(&self, other: &PhiElement) -> Result<PhiElement> {
        check_dim(self.dim(), other.dim())?;
        Ok(PhiElement {
            a: self.a - other.a,
            u: &self.u - &other.u,
            c: self.c - other.c,
        })
    }

    /// Euclidean gradient `u - 2a x`.
    pub fn gradient_at(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.dim(), x.len())?;
        Ok(&self.u - x * (2.0 * self.a))
    }

    /// Compares `(a, u)` with relative tolerance `tol`; `c` is ignored since it
    /// cancels in every subgradient inequality.
    pub fn same_subgradient(&self, other: &PhiElement, tol: f64) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let close = |p: f64, q: f64| (p - q).abs() <= tol * p.abs().max(q.abs()).max(1.0);
        close(self.a, other.a) && self.u.iter().zip(other.u.iter()).all(|(p, q)| close(*p, *q))
    }
}

/// Outcome of an inverse map that may be empty or everything.
#[derive(Debug, Clone, PartialEq)]
pub enum SetValued {
    Point(Vector),
    WholeSpace,
    Empty,
}

impl SetValued {
    pub fn point(&self) -> Option<&Vector> {
        match self {
            SetValued::Point(p) => Some(p),
            _ => None,
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("gamma must be positive, got {gamma}")))
    }
}

/// The element `(a, (1/gamma + 2a) x)` of `J_gamma(x)`.
pub fn duality_map_element(x: &Vector, gamma: f64, a: f64) -> Result<PhiElement> {
    check_gamma(gamma)?;
    let a_min = -1.0 / (2.0 * gamma);
    if !(2.0 * gamma * a >= -1.0) {
        return Err(Error::InfeasibleCoefficient { a, a_min, open: false });
    }
    Ok(PhiElement::linear(a, x * (1.0 / gamma + 2.0 * a)))
}

/// `J_gamma^{-1}(phi)`.
pub fn duality_map_inverse(phi: &PhiElement, gamma: f64) -> Result<SetValued> {
    check_gamma(gamma)?;
    let boundary = -1.0 / (2.0 * gamma);
    let on_boundary = (phi.a - boundary).abs() <= BOUNDARY_TOL * (1.0f64).max(-boundary);
    if on_boundary {
        return Ok(if phi.u.norm() <= BOUNDARY_TOL {
            SetValued::WholeSpace
        } else {
            SetValued::Empty
        });
    }
    let denom = 1.0 + 2.0 * gamma * phi.a;
    if denom > 0.0 {
        Ok(SetValued::Point(&phi.u * (gamma / denom)))
    } else {
        Ok(SetValued::Empty)
    }
}

/// Affine minorant touching `phi` at `x`. Elements with `a >= 0` are already
/// below their tangent plane and come back unchanged.
pub fn phi_geq_minorant(phi: &PhiElement, x: &Vector) -> Result<PhiElement> {
    check_dim(phi.dim(), x.len())?;
    if phi.a >= 0.0 {
        return Ok(phi.clone());
    }
    Ok(PhiElement {
        a: 0.0,
        u: x * (-2.0 * phi.a) + &phi.u,
        c: phi.a * x.norm_squared() + phi.c,
    })
}
