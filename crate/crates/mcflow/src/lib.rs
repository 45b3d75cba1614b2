//! Surface finite elements for parametric mean curvature flow.
//!
//! The flow is written as a strictly parabolic system for the position
//! vector `x : M -> R^3` over a fixed closed reference surface `M`, with a
//! harmonic-map style tangential velocity controlled by a parameter
//! `alpha > 0`.  Small `alpha` means strong tangential regularization and
//! well-distributed mesh points; the limit `alpha -> infinity` recovers a
//! purely normal velocity.
//!
//! The crate is organized along the pipeline of a simulation:
//!
//! * [`geometry`]: reference surfaces (unit sphere, level sets), signed
//!   distance / closest-point machinery, icosphere meshes and level-set
//!   initial embeddings;
//! * [`fem`]: order-1 and order-2 surface Lagrange elements, triangle
//!   quadrature, tangential gradients on the polyhedral mesh and their lift
//!   to the smooth surface;
//! * [`kernel`]: the metric tensor `G`, wedge-product normals, the mobility
//!   matrix, the smoothed normal field and element assembly of the fully
//!   discrete schemes;
//! * [`evolution`]: sparse linear algebra, the time-stepping driver and
//!   pinch-off handling;
//! * [`diagnostics`]: exact-solution error monitors, convergence orders,
//!   mesh-quality statistics and CSV/VTK output.
//!
//! A command line front end lives in the companion `mcflow-cli` crate; the
//! `book/` directory of the repository walks through the concepts with
//! runnable snippets.

pub mod diagnostics;
pub mod evolution;
pub mod fem;
pub mod geometry;
pub mod kernel;

mod error;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// 3-vector of `f64`, the ambient coordinate type used throughout.
pub type Vec3 = nalgebra::Vector3<f64>;
/// 3x3 matrix of `f64`.
pub type Mat3 = nalgebra::Matrix3<f64>;
