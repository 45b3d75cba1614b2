//! Exact-solution oracles, error monitors, convergence orders, mesh
//! quality statistics and CSV/VTK emission.

mod errors;
mod exact;
mod output;
mod quality;

pub use errors::{eoc, relative_errors, ErrorParts, ErrorTriple};
pub use exact::{exact_sphere, SphereEmbedding};
pub use output::{
    format_significant, vtk_snapshot_name, write_csv, write_vtk, DiagnosticsRecord,
};
pub use quality::{sigma_max, surface_area};
