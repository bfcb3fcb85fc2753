//! Numerical laboratory for the inverse conductivity problem with a
//! polygonal inclusion in a layered medium.
//!
//! The crate covers the forward transmission solve, the discrete
//! Dirichlet-to-Neumann operator with fractional boundary norms, the
//! distributed shape derivative of the boundary pairing, bi-phase Green
//! states for the blow-up probe, and vertex-based Gauss-Newton
//! reconstruction.
//!
//! Data-parallel inner loops (operator columns, Jacobian directions,
//! randomized sweeps, quadrature) run on rayon when the default `parallel`
//! feature is enabled and fall back to sequential iteration without it.

pub mod apriori;
pub mod dtn;
pub mod error;
pub mod exec;
pub mod forward;
pub mod geom;
pub mod greens;
pub mod io;
pub mod linalg;
pub mod mesh;
pub mod perturb;
pub mod recon;
pub mod sampling;
pub mod shape;

pub use apriori::AprioriData;
pub use error::{Error, Result};
