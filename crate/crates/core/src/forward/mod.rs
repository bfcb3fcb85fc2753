//! P1 finite elements for the Dirichlet transmission problem and its
//! pulled-back variant on the fixed mesh.

mod assemble;
mod solve;

pub use assemble::{assemble_stiffness, element_gradients, StiffnessParts, TriCoeff};
pub use solve::{solve_dirichlet, solve_pullback, DirichletOperator, DiscreteSolution};

use crate::geom::{LayeredBackground, Polygon};
use crate::mesh::RegionTag;

/// Piecewise-constant conductivity: layer values outside the inclusion, k
/// inside.
#[derive(Clone, Debug)]
pub struct ConductivityField {
    pub bg: LayeredBackground,
    pub inclusion: Option<Polygon>,
    pub k: f64,
}

impl ConductivityField {
    pub fn background(bg: LayeredBackground) -> Self {
        Self { k: bg.gammas[0], bg, inclusion: None }
    }

    pub fn with_inclusion(bg: LayeredBackground, inclusion: Polygon, k: f64) -> Self {
        Self { bg, inclusion: Some(inclusion), k }
    }

    /// Conductivity on a triangle with the given region tag.
    pub fn value(&self, tag: RegionTag) -> f64 {
        if tag.inside {
            self.k
        } else {
            self.bg.gammas[tag.layer]
        }
    }
}
