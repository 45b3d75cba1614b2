//! The mathematical core: metric tensor, wedge-product normals, mobility
//! matrix, smoothed normal field, and element assembly of the fully
//! discrete schemes.

mod assembly;
mod identities;
mod metric;
mod mobility;
mod normal;

pub use assembly::{
    assemble_euler_step, assemble_midpoint_steps, AssemblyWorkspace, SchemeSystem,
};
pub use identities::{
    divergence_form_laplacian, identity_suite, ChartSample, IdentityReport, LinearEmbedding,
};
pub use metric::{lemma2_residual, metric_tensor, MetricState, DET_FLOOR};
pub use mobility::{mobility, MobilityMatrix};
pub use normal::{projection_and_gradient, smoothed_normal};
