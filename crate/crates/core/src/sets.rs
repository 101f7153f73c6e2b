//! Closed convex sets with exact projections.

use crate::{check_dim, Error, Result, Vector};

/// Absolute membership tolerance before scaling by the set's size.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum SetDescriptor {
    Ball { center: Vector, radius: f64 },
    Box { lo: Vector, hi: Vector },
    Halfspace { normal: Vector, offset: f64 },
}

impl SetDescriptor {
    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("ball radius must be positive, got {radius}")));
        }
        Ok(SetDescriptor::Ball { center, radius })
    }

    pub fn unit_ball(n: usize) -> Self {
        SetDescriptor::Ball { center: Vector::zeros(n), radius: 1.0 }
    }

    pub fn boxed(lo: Vector, hi: Vector) -> Result<Self> {
        check_dim(lo.len(), hi.len())?;
        if lo.iter().zip(hi.iter()).any(|(l, h)| !(l <= h)) {
            return Err(Error::InvalidArgument("box needs lo <= hi componentwise".into()));
        }
        Ok(SetDescriptor::Box { lo, hi })
    }

    /// `{x : <normal, x> <= offset}`.
    pub fn halfspace(normal: Vector, offset: f64) -> Result<Self> {
        if normal.norm() == 0.0 {
            return Err(Error::InvalidArgument("halfspace normal must be nonzero".into()));
        }
        Ok(SetDescriptor::Halfspace { normal, offset })
    }

    pub fn dim(&self) -> usize {
        match self {
            SetDescriptor::Ball { center, .. } => center.len(),
            SetDescriptor::Box { lo, .. } => lo.len(),
            SetDescriptor::Halfspace { normal, .. } => normal.len(),
        }
    }

    /// Characteristic length used to scale membership tolerances.
    pub fn scale(&self) -> f64 {
        match self {
            SetDescriptor::Ball { radius, .. } => radius.max(1.0),
            SetDescriptor::Box { lo, hi } => {
                (hi - lo).amax().max(lo.amax()).max(hi.amax()).max(1.0)
            }
            SetDescriptor::Halfspace { offset, .. } => offset.abs().max(1.0),
        }
    }

    pub fn project(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.dim(), x.len())?;
        Ok(match self {
            SetDescriptor::Ball { center, radius } => {
                let d = x - center;
                let norm = d.norm();
                if norm <= *radius {
                    x.clone()
                } else {
                    center + d * (*radius / norm)
                }
            }
            SetDescriptor::Box { lo, hi } => {
                Vector::from_iterator(x.len(), (0..x.len()).map(|i| x[i].clamp(lo[i], hi[i])))
            }
            SetDescriptor::Halfspace { normal, offset } => {
                let excess = normal.dot(x) - offset;
                if excess <= 0.0 {
                    x.clone()
                } else {
                    x - normal * (excess / normal.norm_squared())
                }
            }
        })
    }

    pub fn contains(&self, x: &Vector) -> bool {
        if x.len() != self.dim() || !crate::is_finite_vec(x) {
            return false;
        }
        let tol = MEMBERSHIP_TOL * self.scale();
        match self {
            SetDescriptor::Ball { center, radius } => (x - center).norm() <= radius + tol,
            SetDescriptor::Box { lo, hi } => {
                (0..x.len()).all(|i| x[i] >= lo[i] - tol && x[i] <= hi[i] + tol)
            }
            SetDescriptor::Halfspace { normal, offset } => {
                normal.dot(x) <= offset + tol * normal.norm()
            }
        }
    }

    /// Whether `x` lies on the boundary, within the membership tolerance.
    pub fn on_boundary(&self, x: &Vector) -> bool {
        let tol = MEMBERSHIP_TOL * self.scale();
        match self {
            SetDescriptor::Ball { center, radius } => ((x - center).norm() - radius).abs() <= tol,
            SetDescriptor::Box { lo, hi } => (0..x.len())
                .any(|i| (x[i] - lo[i]).abs() <= tol || (x[i] - hi[i]).abs() <= tol),
            SetDescriptor::Halfspace { normal, offset } => {
                (normal.dot(x) - offset).abs() <= tol * normal.norm()
            }
        }
    }

    /// For boxes: whether every coordinate sits on a face.
    pub fn is_vertex(&self, x: &Vector) -> bool {
        let tol = MEMBERSHIP_TOL * self.scale();
        match self {
            SetDescriptor::Box { lo, hi } => (0..x.len())
                .all(|i| (x[i] - lo[i]).abs() <= tol || (x[i] - hi[i]).abs() <= tol),
            _ => false,
        }
    }
}
