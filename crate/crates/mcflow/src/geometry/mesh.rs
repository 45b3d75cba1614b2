//! Triangulated polyhedral approximation of the reference surface.
//!
//! Vertices lie on `M`; facets are flat.  Degrees of freedom are ordered
//! vertices first, then edges (identified by their sorted vertex pair and
//! sorted lexicographically), so assembly and file output are deterministic.

use crate::{Error, Result, Vec3};

use super::ReferenceSurface;

/// A closed, consistently oriented triangle mesh with vertices on `M`.
#[derive(Debug, Clone)]
pub struct PolyhedralMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    /// Unique edges as sorted vertex pairs, lexicographically ordered.
    edges: Vec<[usize; 2]>,
    /// Per triangle, the edge indices opposite to the local ordering
    /// (local edge 0 = (v0,v1), 1 = (v1,v2), 2 = (v2,v0)).
    triangle_edges: Vec<[usize; 3]>,
}

impl PolyhedralMesh {
    /// Builds the mesh from raw vertices and oriented triangles, deriving
    /// the unique edge list.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Self {
        let mut edge_set: Vec<[usize; 2]> = triangles
            .iter()
            .flat_map(|t| {
                [[t[0], t[1]], [t[1], t[2]], [t[2], t[0]]]
                    .into_iter()
                    .map(|[a, b]| if a < b { [a, b] } else { [b, a] })
            })
            .collect();
        edge_set.sort_unstable();
        edge_set.dedup();

        let lookup = |a: usize, b: usize| -> usize {
            let key = if a < b { [a, b] } else { [b, a] };
            edge_set.binary_search(&key).expect("edge from own triangle")
        };
        let triangle_edges = triangles
            .iter()
            .map(|t| [lookup(t[0], t[1]), lookup(t[1], t[2]), lookup(t[2], t[0])])
            .collect();

        Self {
            vertices,
            triangles,
            edges: edge_set,
            triangle_edges,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn triangle_vertices(&self, tri: usize) -> [Vec3; 3] {
        let t = self.triangles[tri];
        [self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]]
    }

    /// Number of degrees of freedom of an order-`k` Lagrange space.
    pub fn dof_count(&self, order: usize) -> usize {
        match order {
            1 => self.vertex_count(),
            2 => self.vertex_count() + self.edge_count(),
            _ => panic!("unsupported element order {order}"),
        }
    }

    /// Global index of a local node: for order 2, locals 0..3 are the
    /// triangle vertices and 3..6 the midpoints of edges (v0,v1), (v1,v2),
    /// (v2,v0).
    pub fn node_index(&self, order: usize, tri: usize, local: usize) -> usize {
        let t = self.triangles[tri];
        match order {
            1 => t[local],
            2 => {
                if local < 3 {
                    t[local]
                } else {
                    self.vertex_count() + self.triangle_edges[tri][local - 3]
                }
            }
            _ => panic!("unsupported element order {order}"),
        }
    }

    /// Position on the polyhedral mesh of a global degree of freedom
    /// (vertex, or edge midpoint for order 2).
    pub fn node_position(&self, order: usize, dof: usize) -> Vec3 {
        if dof < self.vertex_count() {
            self.vertices[dof]
        } else {
            assert!(order == 2, "edge dofs only exist for order 2");
            let [a, b] = self.edges[dof - self.vertex_count()];
            0.5 * (self.vertices[a] + self.vertices[b])
        }
    }

    /// Number of local nodes per triangle for order `k`.
    pub fn local_nodes(order: usize) -> usize {
        match order {
            1 => 3,
            2 => 6,
            _ => panic!("unsupported element order {order}"),
        }
    }

    /// Longest edge of the mesh.
    pub fn h_max(&self) -> f64 {
        self.edges
            .iter()
            .map(|&[a, b]| (self.vertices[a] - self.vertices[b]).norm())
            .fold(0.0, f64::max)
    }

    /// Euler characteristic `V - E + F`.
    pub fn euler_characteristic(&self) -> isize {
        self.vertex_count() as isize - self.edge_count() as isize
            + self.triangle_count() as isize
    }

    /// Flat area and unit normal of a facet (normal oriented by the vertex
    /// winding).
    pub fn facet_area_normal(&self, tri: usize) -> Result<(f64, Vec3)> {
        let [a, b, c] = self.triangle_vertices(tri);
        let n = (b - a).cross(&(c - a));
        let len = n.norm();
        if len < 1e-14 {
            return Err(Error::DegenerateTriangle { area: 0.5 * len });
        }
        Ok((0.5 * len, n / len))
    }

    /// Checks the structural invariants: vertices on `M`, each edge shared
    /// by exactly two triangles, sphere topology, and facet normals aligned
    /// with the surface normal at the centroid.
    pub fn validate(&self, surface: &ReferenceSurface) -> Result<()> {
        for v in &self.vertices {
            let d = surface.signed_distance(v)?;
            if d.abs() > 1e-12 {
                return Err(Error::InvalidConfig(format!(
                    "mesh vertex off the surface by {d:.3e}"
                )));
            }
        }

        let mut edge_use = vec![0usize; self.edges.len()];
        for te in &self.triangle_edges {
            for &e in te {
                edge_use[e] += 1;
            }
        }
        if edge_use.iter().any(|&c| c != 2) {
            return Err(Error::InvalidConfig(
                "mesh is not a closed surface (edge not shared by 2 triangles)".into(),
            ));
        }

        if self.euler_characteristic() != 2 {
            return Err(Error::InvalidConfig(format!(
                "unexpected Euler characteristic {}",
                self.euler_characteristic()
            )));
        }

        for tri in 0..self.triangle_count() {
            let (_, n) = self.facet_area_normal(tri)?;
            let [a, b, c] = self.triangle_vertices(tri);
            let centroid = (a + b + c) / 3.0;
            let mu = surface.normal_at(&centroid)?;
            if n.dot(&mu) <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "triangle {tri} is inward-oriented"
                )));
            }
        }
        Ok(())
    }
}
