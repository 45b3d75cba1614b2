//! Lagrange reference elements on the triangle in barycentric coordinates.

use crate::{Error, Result, Vec3};

/// Reference element of order 1 (vertices) or 2 (vertices plus edge
/// midpoints).  Local node ordering matches
/// [`PolyhedralMesh::node_index`](crate::geometry::PolyhedralMesh::node_index):
/// vertices 0..3, then midpoints of edges (0,1), (1,2), (2,0).
#[derive(Debug, Clone, Copy)]
pub struct ReferenceElement {
    order: usize,
}

impl ReferenceElement {
    pub fn new(order: usize) -> Self {
        assert!(order == 1 || order == 2, "unsupported element order {order}");
        Self { order }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn node_count(&self) -> usize {
        if self.order == 1 {
            3
        } else {
            6
        }
    }

    /// Barycentric coordinates of the Lagrange nodes.
    pub fn nodes(&self) -> Vec<[f64; 3]> {
        let mut nodes = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        if self.order == 2 {
            nodes.push([0.5, 0.5, 0.0]);
            nodes.push([0.0, 0.5, 0.5]);
            nodes.push([0.5, 0.0, 0.5]);
        }
        nodes
    }

    /// Basis values at a barycentric point.
    pub fn basis_values(&self, bary: &[f64; 3]) -> Vec<f64> {
        let [l0, l1, l2] = *bary;
        match self.order {
            1 => vec![l0, l1, l2],
            _ => vec![
                l0 * (2.0 * l0 - 1.0),
                l1 * (2.0 * l1 - 1.0),
                l2 * (2.0 * l2 - 1.0),
                4.0 * l0 * l1,
                4.0 * l1 * l2,
                4.0 * l2 * l0,
            ],
        }
    }

    /// Gradients with respect to the three barycentric coordinates.
    pub fn basis_bary_gradients(&self, bary: &[f64; 3]) -> Vec<[f64; 3]> {
        let [l0, l1, l2] = *bary;
        match self.order {
            1 => vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            _ => vec![
                [4.0 * l0 - 1.0, 0.0, 0.0],
                [0.0, 4.0 * l1 - 1.0, 0.0],
                [0.0, 0.0, 4.0 * l2 - 1.0],
                [4.0 * l1, 4.0 * l0, 0.0],
                [0.0, 4.0 * l2, 4.0 * l1],
                [4.0 * l2, 0.0, 4.0 * l0],
            ],
        }
    }
}

/// Tangential gradients of the barycentric coordinates on a flat facet:
/// the dual basis of the edge vectors within the facet plane.
pub fn barycentric_gradients(verts: &[Vec3; 3]) -> Result<[Vec3; 3]> {
    let t1 = verts[1] - verts[0];
    let t2 = verts[2] - verts[0];
    let g11 = t1.dot(&t1);
    let g12 = t1.dot(&t2);
    let g22 = t2.dot(&t2);
    let det = g11 * g22 - g12 * g12;
    // det = (2 * area)^2
    if det < 1e-28 {
        return Err(Error::DegenerateTriangle {
            area: 0.5 * det.max(0.0).sqrt(),
        });
    }
    let e1 = (g22 * t1 - g12 * t2) / det;
    let e2 = (g11 * t2 - g12 * t1) / det;
    Ok([-e1 - e2, e1, e2])
}

/// Tangential gradients on the facet of all basis functions at a
/// barycentric point, each orthogonal to the facet normal.
pub fn facet_tangential_gradients(
    element: &ReferenceElement,
    verts: &[Vec3; 3],
    bary: &[f64; 3],
) -> Result<Vec<Vec3>> {
    let grad_l = barycentric_gradients(verts)?;
    Ok(element
        .basis_bary_gradients(bary)
        .iter()
        .map(|d| d[0] * grad_l[0] + d[1] * grad_l[1] + d[2] * grad_l[2])
        .collect())
}
