//! Coefficient vectors of 3-vector-valued finite element functions.

use nalgebra::DVector;

use crate::geometry::{PolyhedralMesh, ReferenceSurface};
use crate::{Mat3, Result, Vec3};

use super::{facet_tangential_gradients, lift_at, GeometryMode, ReferenceElement};

/// A function in `(S_h^k)^3` stored as one ambient 3-vector per Lagrange
/// node (vertices first, then edge midpoints for order 2).
#[derive(Debug, Clone, PartialEq)]
pub struct FeVectorField {
    order: usize,
    coeffs: Vec<Vec3>,
}

impl FeVectorField {
    pub fn from_coefficients(order: usize, coeffs: Vec<Vec3>) -> Self {
        assert!(order == 1 || order == 2);
        Self { order, coeffs }
    }

    /// The constant field `value` on a mesh.
    pub fn constant(mesh: &PolyhedralMesh, order: usize, value: Vec3) -> Self {
        Self::from_coefficients(order, vec![value; mesh.dof_count(order)])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dof_count(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficient(&self, dof: usize) -> Vec3 {
        self.coeffs[dof]
    }

    pub fn coefficients(&self) -> &[Vec3] {
        &self.coeffs
    }

    pub fn coefficients_mut(&mut self) -> &mut [Vec3] {
        &mut self.coeffs
    }

    /// Adds a constant vector to every coefficient (rigid translation).
    pub fn translated(&self, shift: &Vec3) -> Self {
        Self {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c + shift).collect(),
        }
    }

    /// Flattens to the interleaved solver layout `(3 * node + component)`.
    pub fn to_flat(&self) -> DVector<f64> {
        let mut v = DVector::zeros(3 * self.coeffs.len());
        for (i, c) in self.coeffs.iter().enumerate() {
            v[3 * i] = c.x;
            v[3 * i + 1] = c.y;
            v[3 * i + 2] = c.z;
        }
        v
    }

    pub fn from_flat(order: usize, flat: &DVector<f64>) -> Self {
        assert_eq!(flat.len() % 3, 0);
        let coeffs = (0..flat.len() / 3)
            .map(|i| Vec3::new(flat[3 * i], flat[3 * i + 1], flat[3 * i + 2]))
            .collect();
        Self { order, coeffs }
    }
}

/// Lagrange interpolation of a continuous function on `M`: the coefficient
/// at a node is the value at the node's closest point on the surface.
pub fn interpolate<F>(
    f: F,
    surface: &ReferenceSurface,
    mesh: &PolyhedralMesh,
    order: usize,
) -> Result<FeVectorField>
where
    F: Fn(&Vec3) -> Vec3,
{
    let n = mesh.dof_count(order);
    let mut coeffs = Vec::with_capacity(n);
    for dof in 0..n {
        let lifted = surface.closest_point(&mesh.node_position(order, dof))?;
        coeffs.push(f(&lifted));
    }
    Ok(FeVectorField::from_coefficients(order, coeffs))
}

/// Value and tangential gradient of a field at a barycentric point of a
/// triangle.  The gradient rows are derivative directions:
/// `(grad u)_{ij} = D_i u_j`, taken on `M` (lifted) or on the facet.
pub fn evaluate_field(
    field: &FeVectorField,
    surface: &ReferenceSurface,
    mesh: &PolyhedralMesh,
    mode: GeometryMode,
    tri: usize,
    bary: &[f64; 3],
) -> Result<(Vec3, Mat3)> {
    let element = ReferenceElement::new(field.order());
    let verts = mesh.triangle_vertices(tri);
    let values = element.basis_values(bary);
    let mut grads = facet_tangential_gradients(&element, &verts, bary)?;

    if mode == GeometryMode::Lifted {
        let q = bary[0] * verts[0] + bary[1] * verts[1] + bary[2] * verts[2];
        let (_, mu_h) = mesh.facet_area_normal(tri)?;
        let lift = lift_at(surface, &q, &mu_h)?;
        for g in &mut grads {
            *g = lift.lift_gradient(g)?;
        }
    }

    let mut value = Vec3::zeros();
    let mut grad = Mat3::zeros();
    for local in 0..element.node_count() {
        let c = field.coefficient(mesh.node_index(field.order(), tri, local));
        value += values[local] * c;
        grad += grads[local] * c.transpose();
    }
    Ok((value, grad))
}
