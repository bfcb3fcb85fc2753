//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("polygon is not simple: sides {0} and {1} intersect")]
    NonSimplePolygon(usize, usize),
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("Hausdorff distance {d_h:.6e} exceeds the matching threshold delta0 = {delta0:.6e}")]
    DistanceTooLarge { d_h: f64, delta0: f64 },
    #[error("interface crossing counts differ: {0} on the base polygon, {1} on the other")]
    CrossingMismatch(usize, usize),
    #[error("vertex {index} lies on interface y = {omega}")]
    VertexOnInterface { index: usize, omega: f64 },
    #[error("perturbation strip of width {width} self-intersects")]
    StripCollision { width: f64 },
    #[error("family map Jacobian is singular at ({0:.6}, {1:.6})")]
    SingularJacobian(f64, f64),
    #[error("refinement stalled: reached minimum angle {achieved_deg:.2} deg, target {target_deg:.2} deg")]
    RefinementStall { achieved_deg: f64, target_deg: f64 },
    #[error("triangle {0} straddles a coefficient discontinuity")]
    NonConformingMesh(usize),
    #[error("linear solver breakdown: {0}")]
    SolverBreakdown(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operators live on different boundary spaces ({0} vs {1} boundary nodes)")]
    GramMismatch(usize, usize),
    #[error("probe offset {r:.6e} outside the admissible window [{lo:.6e}, {hi:.6e}]")]
    OffsetOutOfRange { r: f64, lo: f64, hi: f64 },
    #[error("source ({0:.6}, {1:.6}) is too close to a marked boundary point or the domain boundary")]
    SourceTooCloseToVertex(f64, f64),
    #[error("source ordinate {y:.12} is within tolerance of interface y = {omega}")]
    SourceOnInterface { y: f64, omega: f64 },
    #[error("projection cannot restore the admissible class: {0}")]
    InfeasibleProjection(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed geometry file: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
