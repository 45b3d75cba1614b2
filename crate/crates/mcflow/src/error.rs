use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A point left the validity band of the oriented distance function.
    #[error("point outside the distance-function band (|d| = {value:.3e} > {band:.3e})")]
    PointOutsideBand { value: f64, band: f64 },

    /// An iterative geometric solve (closest point, ray bisection) failed.
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// The level-set gradient vanished where a normal was required.
    #[error("degenerate level-set gradient (|grad d| = {norm:.3e})")]
    DegenerateGradient { norm: f64 },

    /// A ray from the origin never crosses the target level set.
    #[error("level-set root not bracketed along a node ray")]
    RootNotBracketed,

    /// Requested quadrature exactness is not available.
    #[error("unsupported quadrature degree {degree} (supported: 1..=8)")]
    UnsupportedDegree { degree: usize },

    /// A mesh triangle collapsed to (near) zero area.
    #[error("degenerate triangle (area = {area:.3e})")]
    DegenerateTriangle { area: f64 },

    /// The lift transform between mesh and surface became non-invertible.
    #[error("singular mesh-to-surface transform")]
    SingularTransform,

    /// The discrete metric determinant fell below the floor; for a running
    /// flow this signals a pinch-off.
    #[error("degenerate metric (sqrt(det G) = {sqrt_det:.3e} <= {floor:.3e})")]
    DegenerateMetric { sqrt_det: f64, floor: f64 },

    /// Facet normals cancelled in the nodal average (mesh fold-over).
    #[error("vanishing averaged normal at node {node} (|nu| = {norm:.3e})")]
    ZeroAverage { node: usize, norm: f64 },

    /// A scalar parameter violated its admissible range.
    #[error("invalid parameter {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    /// The iterative linear solver failed to reach the requested tolerance.
    #[error("linear solver diverged after {iterations} iterations (residual {residual:.3e})")]
    SolverDiverged { iterations: usize, residual: f64 },

    /// Error/mesh-size sequences passed to the EOC computation are unusable.
    #[error("invalid sequence for EOC: {reason}")]
    InvalidSequence { reason: &'static str },

    /// The exact shrinking sphere was queried at or past its extinction time.
    #[error("time {t} is at or past the extinction time {extinction}")]
    PastExtinction { t: f64, extinction: f64 },

    /// A run configuration failed validation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// File output failed.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
