//! Order-1 and order-2 surface Lagrange elements: reference bases,
//! triangle quadrature, coefficient fields, tangential gradients on the
//! polyhedral mesh and their lift to the smooth surface.

mod context;
mod element;
mod field;
mod lift;
mod quadrature;

pub use context::{ElementNodeData, ElementQuadData, NodeContext, QuadContext, QuadPointData, MAX_LOCAL_NODES};
pub use element::{barycentric_gradients, facet_tangential_gradients, ReferenceElement};
pub use field::{evaluate_field, interpolate, FeVectorField};
pub use lift::{lift_at, GeometryMode, LiftData};
pub use quadrature::{quadrature_rule, QuadratureRule};
