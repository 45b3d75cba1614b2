//! Initial embeddings of the reference surface onto a target level set by
//! scaling along rays through the origin.
//!
//! The target must be star-shaped with respect to the origin along every
//! node ray: the level function is negative at the origin and becomes
//! positive far out, so bisection finds the unique crossing.

use std::sync::Arc;

use crate::fem::FeVectorField;
use crate::{Error, Result, Vec3};

use super::{LevelSet, PolyhedralMesh, ReferenceSurface};

/// Target surface of the initial embedding.
#[derive(Clone)]
pub enum EmbeddingTarget {
    /// Sphere of the given radius centred at the origin.
    Sphere { radius: f64 },
    /// Zero set of a level function (evaluated raw, without band checks).
    LevelSet(Arc<dyn LevelSet>),
}

impl EmbeddingTarget {
    pub fn dumbbell() -> Self {
        EmbeddingTarget::LevelSet(Arc::new(super::DumbbellLevelSet::default()))
    }

    fn level(&self, p: &Vec3) -> f64 {
        match self {
            EmbeddingTarget::Sphere { radius } => p.norm() - radius,
            EmbeddingTarget::LevelSet(ls) => ls.value(p),
        }
    }
}

/// Interpolates the ray-scaled parametrization of the target into the
/// order-`k` Lagrange space: the coefficient at a node is `c * p` where `p`
/// is the node lifted to `M` and `c` solves `level(c * p) = 0`.
pub fn initial_embedding(
    target: &EmbeddingTarget,
    surface: &ReferenceSurface,
    mesh: &PolyhedralMesh,
    order: usize,
) -> Result<FeVectorField> {
    if target.level(&Vec3::zeros()) >= 0.0 {
        return Err(Error::RootNotBracketed);
    }
    let n = mesh.dof_count(order);
    let mut coeffs = Vec::with_capacity(n);
    for dof in 0..n {
        let p = surface.closest_point(&mesh.node_position(order, dof))?;
        let c = ray_crossing(target, &p)?;
        coeffs.push(c * p);
    }
    Ok(FeVectorField::from_coefficients(order, coeffs))
}

/// Bisection for the scale factor `c > 0` with `level(c p) = 0`.
fn ray_crossing(target: &EmbeddingTarget, p: &Vec3) -> Result<f64> {
    let g = |c: f64| target.level(&(c * *p));
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut expand = 0;
    while g(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
        expand += 1;
        if expand > 60 {
            return Err(Error::RootNotBracketed);
        }
    }
    while hi - lo > 0.5e-13 {
        let mid = 0.5 * (lo + hi);
        if g(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
