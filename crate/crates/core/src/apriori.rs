//! The a priori data: the constant pack every admissibility constraint and
//! stability constant may depend on.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Constants parameterizing the admissible class and the background medium.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AprioriData {
    /// Maximum number of polygon sides.
    pub n0: usize,
    /// Minimum side length, boundary standoff and interface spacing.
    pub d0: f64,
    /// Lipschitz radius of the boundary graph property.
    pub r0: f64,
    /// Lipschitz constant of the boundary graph property.
    pub k0: f64,
    /// Half side-length of the square domain (-L, L)^2.
    pub l: f64,
    /// Angle bound in (0, pi/2]: every vertex angle beta satisfies
    /// beta0 <= beta <= 2 pi - beta0 and |beta - pi| >= beta0.
    pub beta0: f64,
    /// Conductivity contrast floor |k - gamma_i| >= c0.
    pub c0: f64,
    /// Inclusion conductivity.
    pub k: f64,
    /// Number of layers.
    pub m: usize,
}

impl AprioriData {
    pub fn validate(&self) -> Result<()> {
        let pos = [
            ("d0", self.d0),
            ("r0", self.r0),
            ("k0", self.k0),
            ("L", self.l),
            ("c0", self.c0),
            ("k", self.k),
        ];
        for (name, v) in pos {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.beta0 > 0.0 && self.beta0 <= std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidInput(format!(
                "beta0 must lie in (0, pi/2], got {}",
                self.beta0
            )));
        }
        if self.n0 < 3 {
            return Err(Error::InvalidInput(format!("N0 must be >= 3, got {}", self.n0)));
        }
        if self.m < 1 {
            return Err(Error::InvalidInput("m must be >= 1".into()));
        }
        if self.d0 >= self.l {
            return Err(Error::InvalidInput(format!(
                "d0 = {} must be smaller than L = {}",
                self.d0, self.l
            )));
        }
        Ok(())
    }

    /// Matching threshold delta0 = min(K0 r0, d0 sin(beta0) / 16).
    pub fn delta0(&self) -> f64 {
        (self.k0 * self.r0).min(self.d0 * self.beta0.sin() / 16.0)
    }

    /// Vertex matching constant C0 = sqrt(1 + 16 / sin^2(beta0)).
    pub fn matching_constant(&self) -> f64 {
        (1.0 + 16.0 / (self.beta0.sin() * self.beta0.sin())).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> AprioriData {
        AprioriData {
            n0: 12,
            d0: 0.2,
            r0: 0.1,
            k0: 1.0,
            l: 1.0,
            beta0: std::f64::consts::FRAC_PI_4,
            c0: 0.5,
            k: 2.0,
            m: 2,
        }
    }

    #[test]
    fn derived_constants() {
        let a = base();
        a.validate().unwrap();
        let expect = (0.2 * (std::f64::consts::FRAC_PI_4).sin() / 16.0).min(0.1);
        assert!((a.delta0() - expect).abs() < 1e-15);
        let c0 = a.matching_constant();
        assert!((c0 - (1.0f64 + 16.0 / 0.5).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_packs() {
        let mut a = base();
        a.beta0 = 2.0;
        assert!(a.validate().is_err());
        let mut a = base();
        a.n0 = 2;
        assert!(a.validate().is_err());
        let mut a = base();
        a.d0 = 2.0;
        assert!(a.validate().is_err());
    }
}
