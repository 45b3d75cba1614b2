//! Icosphere generation: a regular icosahedron refined 4-to-1 and radially
//! projected to the unit sphere after every split.

use std::collections::HashMap;

use crate::Vec3;

use super::PolyhedralMesh;

/// Uniformly refined icosahedral approximation of the unit sphere.
///
/// Level `l` has `10 * 4^l + 2` vertices and `20 * 4^l` triangles, all
/// vertices on the sphere and all facets oriented outward.  Levels above 8
/// are rejected as a memory guard.
pub fn build_icosphere(level: usize) -> PolyhedralMesh {
    assert!(level <= 8, "icosphere level {level} exceeds the guard (8)");

    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ];
    let mut vertices: Vec<Vec3> = raw
        .iter()
        .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
        .collect();

    // Outward (counter-clockwise seen from outside) icosahedron facets.
    let mut triangles: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..level {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for t in &triangles {
            let mut mid = [0usize; 3];
            for (i, &(a, b)) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])].iter().enumerate() {
                let key = if a < b { (a, b) } else { (b, a) };
                mid[i] = *midpoint.entry(key).or_insert_with(|| {
                    let m = (vertices[a] + vertices[b]).normalize();
                    vertices.push(m);
                    vertices.len() - 1
                });
            }
            next.push([t[0], mid[0], mid[2]]);
            next.push([mid[0], t[1], mid[1]]);
            next.push([mid[2], mid[1], t[2]]);
            next.push([mid[0], mid[1], mid[2]]);
        }
        triangles = next;
    }

    PolyhedralMesh::new(vertices, triangles)
}
