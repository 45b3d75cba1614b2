//! Reference surfaces, signed-distance machinery and polyhedral meshes.

mod embedding;
mod icosphere;
mod mesh;
mod surface;

pub use embedding::{initial_embedding, EmbeddingTarget};
pub use icosphere::build_icosphere;
pub use mesh::PolyhedralMesh;
pub use surface::{DumbbellLevelSet, LevelSet, ReferenceSurface, SurfaceKind};
