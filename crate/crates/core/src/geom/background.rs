//! The layered background conductivity on the square domain.

use crate::apriori::AprioriData;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Horizontal layers Omega_i = {omega_{i-1} < y < omega_i} with constant
/// conductivity gamma_i on each, on the domain (-L, L)^2.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LayeredBackground {
    pub l: f64,
    /// Interface heights omega_0 = -L < omega_1 < ... < omega_m = L.
    pub omegas: Vec<f64>,
    /// Layer conductivities gamma_1 ... gamma_m, all positive.
    pub gammas: Vec<f64>,
}

impl LayeredBackground {
    pub fn new(l: f64, omegas: Vec<f64>, gammas: Vec<f64>) -> Result<Self> {
        if !(l > 0.0) {
            return Err(Error::InvalidInput(format!("L must be positive, got {l}")));
        }
        if omegas.len() != gammas.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "expected {} interface heights for {} layers, got {}",
                gammas.len() + 1,
                gammas.len(),
                omegas.len()
            )));
        }
        if omegas.first() != Some(&-l) || omegas.last() != Some(&l) {
            return Err(Error::InvalidInput(
                "omegas must start at -L and end at L".into(),
            ));
        }
        if omegas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("omegas must be strictly increasing".into()));
        }
        if gammas.iter().any(|&g| !(g > 0.0) || !g.is_finite()) {
            return Err(Error::InvalidInput("all gammas must be positive".into()));
        }
        Ok(Self { l, omegas, gammas })
    }

    /// Uniform background gamma = 1 on (-L, L)^2.
    pub fn homogeneous(l: f64) -> Self {
        Self { l, omegas: vec![-l, l], gammas: vec![1.0] }
    }

    pub fn layer_count(&self) -> usize {
        self.gammas.len()
    }

    /// Interior interfaces omega_1 .. omega_{m-1}.
    pub fn interior_interfaces(&self) -> &[f64] {
        &self.omegas[1..self.omegas.len() - 1]
    }

    /// Index i (0-based) of the layer containing ordinate y; points above the
    /// top interface belong to the last layer, so chimney extensions of the
    /// domain keep the top conductivity.
    pub fn layer_of(&self, y: f64) -> usize {
        let m = self.layer_count();
        for i in 0..m {
            if y < self.omegas[i + 1] {
                return i;
            }
        }
        m - 1
    }

    pub fn gamma_at(&self, y: f64) -> f64 {
        self.gammas[self.layer_of(y)]
    }

    /// Checks the interface spacing and contrast constraints against the
    /// a priori data.
    pub fn check_apriori(&self, a: &AprioriData) -> Result<()> {
        if self.layer_count() != a.m {
            return Err(Error::InvalidInput(format!(
                "background has {} layers, a priori data says {}",
                self.layer_count(),
                a.m
            )));
        }
        if (self.l - a.l).abs() > 1e-14 {
            return Err(Error::InvalidInput("background L differs from a priori L".into()));
        }
        for w in self.omegas.windows(2) {
            if w[1] - w[0] < a.d0 - 1e-14 {
                return Err(Error::InvalidInput(format!(
                    "interface spacing {} below d0 = {}",
                    w[1] - w[0],
                    a.d0
                )));
            }
        }
        for &g in &self.gammas {
            if (a.k - g).abs() < a.c0 - 1e-14 {
                return Err(Error::InvalidInput(format!(
                    "contrast |k - {g}| below c0 = {}",
                    a.c0
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layer_lookup() {
        let bg = LayeredBackground::new(1.0, vec![-1.0, 0.0, 1.0], vec![2.0, 3.0]).unwrap();
        assert_eq!(bg.layer_of(-0.5), 0);
        assert_eq!(bg.layer_of(0.5), 1);
        assert_eq!(bg.layer_of(1.5), 1); // chimney extension keeps the top layer
        assert_eq!(bg.gamma_at(-0.1), 2.0);
        assert_eq!(bg.interior_interfaces(), &[0.0]);
    }

    #[test]
    fn rejects_malformed() {
        assert!(LayeredBackground::new(1.0, vec![-1.0, 1.0], vec![]).is_err());
        assert!(LayeredBackground::new(1.0, vec![-1.0, 0.5, 0.2, 1.0], vec![1., 1., 1.]).is_err());
        assert!(LayeredBackground::new(1.0, vec![-1.0, 0.0, 1.0], vec![1.0, -2.0]).is_err());
    }
}
