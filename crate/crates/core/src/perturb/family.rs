//! The family Phi_t = I + t U and its pullback coefficient.

use super::{cal_a_from, DisplacementField};
use crate::geom::Point;
use crate::{Error, Result};
use nalgebra::Matrix2;
use std::sync::Arc;

/// The deformation family at a fixed parameter t in [0, 1].
#[derive(Clone)]
pub struct FamilyMap {
    pub field: Arc<DisplacementField>,
    pub t: f64,
}

impl FamilyMap {
    pub fn new(field: Arc<DisplacementField>, t: f64) -> Self {
        Self { field, t }
    }

    /// Phi_t(x) = x + t U(x).
    pub fn phi(&self, x: Point) -> Point {
        x + self.field.eval(x) * self.t
    }

    /// D Phi_t = I + t DU, constant per strip triangle.
    pub fn dphi(&self, x: Point) -> Matrix2<f64> {
        Matrix2::identity() + self.field.grad(x) * self.t
    }

    /// Inverse map by fixed-point iteration; the contraction factor is
    /// t |DU| < 1/2 in the admissible regime.
    pub fn phi_inv(&self, y: Point) -> Result<Point> {
        let mut xi = y;
        for _ in 0..200 {
            let next = y - self.field.eval(xi) * self.t;
            if next.dist(xi) < 1e-15 {
                return Ok(next);
            }
            xi = next;
        }
        Err(Error::SingularJacobian(y.x, y.y))
    }

    /// A(t, x) = M^{-1} M^{-T} det M with M = I + t DU(x).
    pub fn pullback_a(&self, x: Point) -> Result<Matrix2<f64>> {
        self.pullback_a_at(self.t, x)
    }

    /// Same, at an arbitrary parameter (used for sweeps over t on one field).
    pub fn pullback_a_at(&self, t: f64, x: Point) -> Result<Matrix2<f64>> {
        let m = Matrix2::identity() + self.field.grad(x) * t;
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        if det <= 0.0 || !det.is_finite() {
            return Err(Error::SingularJacobian(x.x, x.y));
        }
        let inv = m.try_inverse().ok_or(Error::SingularJacobian(x.x, x.y))?;
        Ok(inv * inv.transpose() * det)
    }

    /// cal A(x) = d/dt A(t, x) at t = 0.
    pub fn cal_a(&self, x: Point) -> Matrix2<f64> {
        cal_a_from(self.field.grad(x))
    }

    /// Image polygon of the base vertices under Phi_t.
    pub fn map_polygon(&self, p: &crate::geom::Polygon) -> Result<crate::geom::Polygon> {
        crate::geom::Polygon::new(p.vertices().iter().map(|&v| self.phi(v)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cal_a_matches_derivative_for_affine_field() {
        // For U = B x on one triangle, A(t) has a closed form and its
        // derivative at 0 must equal div(U) I - (B + B^T).
        let b = Matrix2::new(0.3, -0.1, 0.2, 0.05);
        let a_of = |t: f64| -> Matrix2<f64> {
            let m = Matrix2::identity() + b * t;
            let det = m.determinant();
            let inv = m.try_inverse().unwrap();
            inv * inv.transpose() * det
        };
        let expected = cal_a_from(b);
        for &t in &[1e-3, 1e-4, 1e-5] {
            let fd = (a_of(t) - a_of(0.0)) / t;
            let err = (fd - expected).norm();
            assert!(err < 3.0 * t * b.norm() * b.norm() * 10.0, "t={t}, err={err}");
        }
    }
}
