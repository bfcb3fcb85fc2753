//! Randomized verification of the family map properties: piecewise
//! affinity on the chain, invertibility with the explicit gradient bound,
//! layer preservation, and the parameter-derivative bounds.

use super::{DisplacementField, FamilyMap};
use crate::exec;
use crate::geom::{LayeredBackground, MarkedPoint, Point};
use nalgebra::Matrix2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed quantity divided by its bound (<= 1 passes when the
    /// bound has an explicit constant).
    pub max_ratio: f64,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct PropertyReport {
    pub checks: Vec<PropertyCheck>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Runs the randomized property checks with `samples` points per property.
///
/// The chain is needed to test affinity along the boundary; pass the same
/// marked chain the field was built from.
pub fn verify_phi_properties(
    family: &FamilyMap,
    chain: &[MarkedPoint],
    bg: &LayeredBackground,
    samples: usize,
    seed: u64,
) -> PropertyReport {
    let field = &family.field;
    let t = family.t;
    let d_h = field.d_h;
    let scale = field.c0 * d_h;
    let mut checks = Vec::new();
    let (lo, hi) = field.strip.bounding_box();

    // f1: affine on each chain sub-segment.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        let m = chain.len();
        for _ in 0..samples.min(20_000) {
            let i = rng.random_range(0..m);
            let s: f64 = rng.random();
            let (a, b) = (chain[i], chain[(i + 1) % m]);
            let x = a.base + (b.base - a.base) * s;
            let expect = a.displacement() * (1.0 - s) + b.displacement() * s;
            let got = field.eval(x);
            worst = worst.max((got - expect).norm());
        }
        let tol = 1e-12 * (1.0 + scale);
        checks.push(PropertyCheck {
            name: "affine_on_chain",
            passed: worst <= tol,
            max_ratio: worst / tol.max(1e-300),
            detail: format!("max deviation {worst:.3e}"),
        });
    }

    // f2: invertibility and |DPhi - I| <= 8 t C0 d_H / d0.
    {
        let bound = 8.0 * t * field.c0 * d_h / field.d0;
        let worst = exec::max_indexed(samples, |i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9e37));
            let x = sample_box(&mut rng, lo, hi);
            let m = family.dphi(x) - Matrix2::identity();
            super::spectral_norm(&m)
        });
        let det_ok = exec::max_indexed(samples, |i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x51f1));
            let x = sample_box(&mut rng, lo, hi);
            let d = family.dphi(x).determinant();
            if d > 0.0 {
                0.0
            } else {
                1.0
            }
        });
        let ratio = if bound > 0.0 { worst / bound } else { 0.0 };
        checks.push(PropertyCheck {
            name: "gradient_bound_and_invertibility",
            passed: det_ok == 0.0 && ratio <= 1.0 + 1e-9,
            max_ratio: ratio,
            detail: format!("max |DPhi - I| = {worst:.3e}, bound {bound:.3e}"),
        });
    }

    // f3: layer preservation outside the inclusion.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf3);
        let mut violations = 0usize;
        let mut tested = 0usize;
        while tested < samples {
            let x = sample_box(&mut rng, lo, hi);
            if field.strip.locate(x).is_none() {
                continue;
            }
            let inside = field
                .strip
                .locate(x)
                .map(|t| field.strip.region[t].inside)
                .unwrap_or(false);
            if inside {
                continue;
            }
            tested += 1;
            let y = family.phi(x);
            if bg.layer_of(x.y) != bg.layer_of(y.y) {
                // Tolerate exact-interface round-off.
                let near = bg
                    .interior_interfaces()
                    .iter()
                    .any(|&w| (x.y - w).abs() < 1e-10 || (y.y - w).abs() < 1e-10);
                if !near {
                    violations += 1;
                }
            }
        }
        checks.push(PropertyCheck {
            name: "layer_preservation",
            passed: violations == 0,
            max_ratio: violations as f64,
            detail: format!("{violations} violations out of {tested}"),
        });
    }

    // f4: |d/dt Phi| = |U| <= C0 d_H, and the inverse-map derivative stays
    // of the same order (finite differences).
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf4);
        let mut worst = 0.0f64;
        let mut worst_inv = 0.0f64;
        let eps = 1e-5;
        for _ in 0..samples.min(2_000) {
            let x = sample_box(&mut rng, lo, hi);
            worst = worst.max(field.eval(x).norm());
            let y = family.phi(x);
            let fp = FamilyMap::new(Arc::clone(&family.field), (t + eps).min(1.0));
            let fm = FamilyMap::new(Arc::clone(&family.field), (t - eps).max(0.0));
            if let (Ok(a), Ok(b)) = (fp.phi_inv(y), fm.phi_inv(y)) {
                worst_inv = worst_inv.max((a - b).norm() / (fp.t - fm.t));
            }
        }
        let bound = scale.max(1e-300);
        let ratio = worst / bound;
        // The inverse derivative bound carries an unspecified constant;
        // 2x the forward bound is ample in the admissible regime.
        let inv_ok = worst_inv <= 2.0 * scale + 1e-12;
        checks.push(PropertyCheck {
            name: "time_derivative_bounds",
            passed: ratio <= 1.0 + 1e-9 && inv_ok,
            max_ratio: ratio.max(worst_inv / (2.0 * bound)),
            detail: format!("|U| max {worst:.3e}, |d/dt inverse| max {worst_inv:.3e}"),
        });
    }

    // f5: |d/dt DPhi| = |DU| <= 8 C0 d_H / d0.
    {
        let bound = 8.0 * field.c0 * d_h / field.d0;
        let worst = field.sup_grad_norm();
        let ratio = if bound > 0.0 { worst / bound } else { 0.0 };
        checks.push(PropertyCheck {
            name: "gradient_time_derivative",
            passed: ratio <= 1.0 + 1e-9,
            max_ratio: ratio,
            detail: format!("sup |DU| = {worst:.3e}, bound {bound:.3e}"),
        });
    }

    // f6: central difference of D(Phi_s^{-1}) at s = 0 with step t agrees
    // with -DU to second order; the log-log slope in t is checked by the
    // caller via `inverse_gradient_defect`.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf6);
        let mut worst = 0.0f64;
        let step = t.max(1e-3);
        for _ in 0..samples.min(2_000) {
            let x = sample_box(&mut rng, lo, hi);
            let defect = inverse_gradient_defect(field, x, step);
            worst = worst.max(defect);
        }
        let du2 = field.sup_grad_norm().powi(2);
        let bound = (2.0 * step * step * du2 * field.sup_grad_norm() + 1e-13).max(1e-300);
        checks.push(PropertyCheck {
            name: "inverse_gradient_derivative",
            passed: worst <= 10.0 * bound,
            max_ratio: worst / bound,
            detail: format!("max |central FD + DU| = {worst:.3e} at step {step:.1e}"),
        });
    }

    PropertyReport { checks }
}

/// |[D Phi_s^{-1}]'_{s=0,central step} + DU| at the material point x: the
/// second-order defect of the inverse-Jacobian derivative.
pub fn inverse_gradient_defect(field: &DisplacementField, x: Point, step: f64) -> f64 {
    let du = field.grad(x);
    let inv_at = |s: f64| -> Matrix2<f64> {
        (Matrix2::identity() + du * s)
            .try_inverse()
            .unwrap_or_else(Matrix2::identity)
    };
    let fd = (inv_at(step) - inv_at(-step)) / (2.0 * step);
    (fd + du).norm()
}

fn sample_box(rng: &mut ChaCha8Rng, lo: Point, hi: Point) -> Point {
    Point {
        x: lo.x + (hi.x - lo.x) * rng.random::<f64>(),
        y: lo.y + (hi.y - lo.y) * rng.random::<f64>(),
    }
}
