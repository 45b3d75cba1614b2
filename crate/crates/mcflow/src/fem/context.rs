//! Precomputed per-element quadrature and node tables.
//!
//! The reference mesh never changes during a flow, so facet areas, basis
//! values, mode-resolved tangential gradients, lift factors and measure
//! ratios are computed once and reused by every assembly and every error
//! evaluation.

use crate::geometry::{PolyhedralMesh, ReferenceSurface};
use crate::{Mat3, Result, Vec3};

use super::{
    facet_tangential_gradients, lift_at, quadrature_rule, GeometryMode, QuadratureRule,
    ReferenceElement,
};

pub const MAX_LOCAL_NODES: usize = 6;

/// Everything needed at one quadrature point.
#[derive(Debug, Clone)]
pub struct QuadPointData {
    /// Integration weight including facet area and, in lifted mode, the
    /// measure ratio.
    pub weight: f64,
    /// Basis values.
    pub basis: [f64; MAX_LOCAL_NODES],
    /// Mode-resolved tangential gradients of the basis.
    pub grads: [Vec3; MAX_LOCAL_NODES],
    /// Normal entering the metric tensor: `mu(a(q))` lifted, `mu(q)`
    /// simplified.
    pub mu: Vec3,
    /// Closest point on `M`; exact solutions are evaluated here.
    pub surface_point: Vec3,
    /// Transform turning an exact tangential gradient on `M` into the
    /// gradient this mode compares against (identity when lifted).
    pub grad_transform: Mat3,
}

impl QuadPointData {
    pub fn value(&self, local: &[Vec3]) -> Vec3 {
        let mut v = Vec3::zeros();
        for (phi, c) in self.basis[..local.len()].iter().zip(local) {
            v += *phi * c;
        }
        v
    }

    /// Gradient matrix with rows as derivative directions:
    /// `(grad u)_{ij} = D_i u_j`.
    pub fn gradient(&self, local: &[Vec3]) -> Mat3 {
        let mut g = Mat3::zeros();
        for (grad, c) in self.grads[..local.len()].iter().zip(local) {
            g += grad * c.transpose();
        }
        g
    }
}

/// Quadrature data and connectivity of one element.
#[derive(Debug, Clone)]
pub struct ElementQuadData {
    pub points: Vec<QuadPointData>,
    pub dofs: Vec<usize>,
    pub facet_area: f64,
    pub facet_normal: Vec3,
    /// Orthonormal frame of the facet plane (used for mapped-area elements
    /// in simplified mode).
    pub frame: (Vec3, Vec3),
}

impl ElementQuadData {
    pub fn gather(&self, coeffs: &[Vec3], out: &mut [Vec3; MAX_LOCAL_NODES]) {
        for (slot, &dof) in out.iter_mut().zip(&self.dofs) {
            *slot = coeffs[dof];
        }
    }
}

/// Per-element tables at the quadrature points of a fixed rule.
#[derive(Debug, Clone)]
pub struct QuadContext {
    pub order: usize,
    pub mode: GeometryMode,
    pub rule: QuadratureRule,
    pub elements: Vec<ElementQuadData>,
    pub n_dofs: usize,
}

impl QuadContext {
    pub fn build(
        surface: &ReferenceSurface,
        mesh: &PolyhedralMesh,
        order: usize,
        mode: GeometryMode,
        quad_degree: usize,
    ) -> Result<Self> {
        let rule = quadrature_rule(quad_degree)?;
        let element = ReferenceElement::new(order);
        let n_local = element.node_count();
        let mut elements = Vec::with_capacity(mesh.triangle_count());

        for tri in 0..mesh.triangle_count() {
            let verts = mesh.triangle_vertices(tri);
            let (area, mu_h) = mesh.facet_area_normal(tri)?;
            let frame = super::lift::tangent_frame(&mu_h);
            let dofs = (0..n_local)
                .map(|local| mesh.node_index(order, tri, local))
                .collect();

            let mut points = Vec::with_capacity(rule.len());
            for (bary, w) in rule.points() {
                let q = bary[0] * verts[0] + bary[1] * verts[1] + bary[2] * verts[2];
                let lift = lift_at(surface, &q, &mu_h)?;
                let facet_grads = facet_tangential_gradients(&element, &verts, bary)?;

                let mut basis = [0.0; MAX_LOCAL_NODES];
                for (slot, v) in basis.iter_mut().zip(element.basis_values(bary)) {
                    *slot = v;
                }
                let mut grads = [Vec3::zeros(); MAX_LOCAL_NODES];
                let (weight, mu, grad_transform) = match mode {
                    GeometryMode::Lifted => {
                        for (slot, g) in grads.iter_mut().zip(&facet_grads) {
                            *slot = lift.lift_gradient(g)?;
                        }
                        (area * w * lift.measure_ratio()?, lift.mu, Mat3::identity())
                    }
                    GeometryMode::Simplified => {
                        for (slot, g) in grads.iter_mut().zip(&facet_grads) {
                            *slot = *g;
                        }
                        // P_h (I - d D^2 d): the facet gradient a lifted
                        // exact function would have at this point.
                        let proj_h = Mat3::identity() - mu_h * mu_h.transpose();
                        let transform = proj_h * lift.inverse_scale();
                        (area * w, surface.normal_at(&q)?, transform)
                    }
                };

                points.push(QuadPointData {
                    weight,
                    basis,
                    grads,
                    mu,
                    surface_point: lift.surface_point,
                    grad_transform,
                });
            }
            elements.push(ElementQuadData {
                points,
                dofs,
                facet_area: area,
                facet_normal: mu_h,
                frame,
            });
        }

        Ok(Self {
            order,
            mode,
            rule,
            elements,
            n_dofs: mesh.dof_count(order),
        })
    }
}

/// Per-element data at the Lagrange nodes (for the smoothed normal).
#[derive(Debug, Clone)]
pub struct ElementNodeData {
    pub facet_area: f64,
    pub dofs: Vec<usize>,
    /// `grads[local_node][basis]`, mode-resolved.
    pub grads: Vec<Vec<Vec3>>,
    /// Normal for the metric at each node.
    pub mus: Vec<Vec3>,
}

/// Tables at element nodes for nodal averaging.
#[derive(Debug, Clone)]
pub struct NodeContext {
    pub order: usize,
    pub mode: GeometryMode,
    pub elements: Vec<ElementNodeData>,
    pub n_dofs: usize,
}

impl NodeContext {
    pub fn build(
        surface: &ReferenceSurface,
        mesh: &PolyhedralMesh,
        order: usize,
        mode: GeometryMode,
    ) -> Result<Self> {
        let element = ReferenceElement::new(order);
        let n_local = element.node_count();
        let nodes = element.nodes();
        let mut elements = Vec::with_capacity(mesh.triangle_count());

        for tri in 0..mesh.triangle_count() {
            let verts = mesh.triangle_vertices(tri);
            let (area, mu_h) = mesh.facet_area_normal(tri)?;
            let dofs = (0..n_local)
                .map(|local| mesh.node_index(order, tri, local))
                .collect();

            let mut grads = Vec::with_capacity(n_local);
            let mut mus = Vec::with_capacity(n_local);
            for bary in &nodes {
                let q = bary[0] * verts[0] + bary[1] * verts[1] + bary[2] * verts[2];
                let facet_grads = facet_tangential_gradients(&element, &verts, bary)?;
                match mode {
                    GeometryMode::Lifted => {
                        let lift = lift_at(surface, &q, &mu_h)?;
                        grads.push(
                            facet_grads
                                .iter()
                                .map(|g| lift.lift_gradient(g))
                                .collect::<Result<Vec<_>>>()?,
                        );
                        mus.push(lift.mu);
                    }
                    GeometryMode::Simplified => {
                        grads.push(facet_grads);
                        mus.push(surface.normal_at(&q)?);
                    }
                }
            }
            elements.push(ElementNodeData {
                facet_area: area,
                dofs,
                grads,
                mus,
            });
        }

        Ok(Self {
            order,
            mode,
            elements,
            n_dofs: mesh.dof_count(order),
        })
    }
}
