//! Sparse linear algebra, the time-stepping driver for both schemes, and
//! pinch-off/termination handling.

mod config;
mod solver;
mod sparse;
mod stepper;

pub use config::{RunConfig, Scheme, SurfaceChoice};
pub use solver::solve_linear;
pub use sparse::{block3_pattern, CsrMatrix, SparsityPattern};
pub use stepper::{run, step, FlowDriver, FlowState, RunOutcome, Termination};
