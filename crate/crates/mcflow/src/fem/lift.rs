//! Identification of functions on the polyhedral mesh with functions on
//! the smooth surface through the closest-point projection.
//!
//! For a band point `q` with `p = a(q)` the facet gradient of a mesh
//! function and the tangential gradient of its lift are related by
//! `grad_Mh f = P_h (I - d D^2 d) grad_M f^l`.  With the shape operator
//! `S` at `p`, the band Hessian satisfies `D^2 d(q) = S (I + d S)^{-1}`, so
//! the inverse factor is simply `(I - d D^2 d)^{-1} = I + d S`.

use crate::geometry::ReferenceSurface;
use crate::{Error, Mat3, Result, Vec3};

/// Where scheme and error integrals live.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryMode {
    /// Integrals over `M`, with lifted gradients and the measure ratio.
    Lifted,
    /// Integrals over the polyhedral mesh with facet gradients.
    Simplified,
}

/// Lift data at one band point: the decomposition `q = p + d mu`, the facet
/// normal, and the curvature factors of the gradient transform.
#[derive(Debug, Clone, Copy)]
pub struct LiftData {
    /// Closest point on the surface.
    pub surface_point: Vec3,
    /// Signed distance of `q` (true distance even for level sets).
    pub distance: f64,
    /// Outward unit normal of `M` at the closest point.
    pub mu: Vec3,
    /// Unit normal of the facet carrying `q`.
    pub mu_h: Vec3,
    /// `B = I + d S`, the inverse of `I - d D^2 d(q)`.
    scale: Mat3,
    /// `B^{-1} = I - d D^2 d(q)`.
    scale_inv: Mat3,
}

/// Builds the lift data at a band point `q` on a facet with normal `mu_h`.
///
/// Fails with [`Error::SingularTransform`] when `1 + d kappa <= 0.1` for a
/// principal curvature `kappa`, i.e. when `q` is too close to the skeleton.
pub fn lift_at(surface: &ReferenceSurface, q: &Vec3, mu_h: &Vec3) -> Result<LiftData> {
    let p = surface.closest_point(q)?;
    let mu = surface.normal_at(&p)?;
    let d = (q - p).dot(&mu);
    let shape = surface.shape_operator(&p)?;

    // Eigenvalues of B = I + d S are 1 + d kappa_i (and exactly 1 along mu).
    let eigen = shape.symmetric_eigenvalues();
    let min_factor = eigen.iter().map(|k| 1.0 + d * k).fold(f64::INFINITY, f64::min);
    if min_factor <= 0.1 {
        return Err(Error::SingularTransform);
    }
    let scale = Mat3::identity() + d * shape;
    let scale_inv = scale.try_inverse().ok_or(Error::SingularTransform)?;

    Ok(LiftData {
        surface_point: p,
        distance: d,
        mu,
        mu_h: *mu_h,
        scale,
        scale_inv,
    })
}

impl LiftData {
    /// Maps a facet-tangential gradient to the tangential gradient of the
    /// lifted function at the closest point.
    pub fn lift_gradient(&self, grad_h: &Vec3) -> Result<Vec3> {
        // Solve P_h (I - d H) v = g_h with v orthogonal to mu: the missing
        // normal component of (I - d H) v is fixed by that constraint.
        let b_g = self.scale * grad_h;
        let b_n = self.scale * self.mu_h;
        let denom = self.mu.dot(&b_n);
        if denom.abs() <= 0.1 {
            return Err(Error::SingularTransform);
        }
        Ok(b_g - (self.mu.dot(&b_g) / denom) * b_n)
    }

    /// Jacobian `do / do_h` of the closest-point projection restricted to
    /// the facet.
    pub fn measure_ratio(&self) -> Result<f64> {
        let (t1, t2) = tangent_frame(&self.mu_h);
        let proj = Mat3::identity() - self.mu * self.mu.transpose();
        let u1 = proj * (self.scale_inv * t1);
        let u2 = proj * (self.scale_inv * t2);
        let j = u1.cross(&u2).norm();
        if j <= 1e-10 {
            return Err(Error::SingularTransform);
        }
        Ok(j)
    }

    /// Residual of the decomposition `q = p + d mu`; diagnostic only.
    pub fn decomposition_residual(&self, q: &Vec3) -> f64 {
        (q - self.surface_point - self.distance * self.mu).norm()
    }

    /// `B^{-1} = I - d D^2 d(q)`, the forward factor of the gradient
    /// transform.
    pub fn inverse_scale(&self) -> Mat3 {
        self.scale_inv
    }
}

/// Any orthonormal pair spanning the plane orthogonal to `n`.
pub(crate) fn tangent_frame(n: &Vec3) -> (Vec3, Vec3) {
    let helper = if n.x.abs() < 0.9 {
        Vec3::new(1.0, 0.0, 0.0)
    } else {
        Vec3::new(0.0, 1.0, 0.0)
    };
    let t1 = n.cross(&helper).normalize();
    let t2 = n.cross(&t1);
    (t1, t2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_icosphere, PolyhedralMesh};

    fn sphere() -> ReferenceSurface {
        ReferenceSurface::unit_sphere()
    }

    #[test]
    fn vertices_lift_to_themselves() {
        let mesh = build_icosphere(1);
        let s = sphere();
        let (_, n) = mesh.facet_area_normal(0).unwrap();
        let v = mesh.triangle_vertices(0)[0];
        let lift = lift_at(&s, &v, &n).unwrap();
        assert!((lift.surface_point - v).norm() < 1e-15);
        assert!(lift.distance.abs() < 1e-15);
    }

    #[test]
    fn centroid_decomposition_is_consistent() {
        let mesh = build_icosphere(0);
        let s = sphere();
        let [a, b, c] = mesh.triangle_vertices(0);
        let q = (a + b + c) / 3.0;
        let (_, n) = mesh.facet_area_normal(0).unwrap();
        let lift = lift_at(&s, &q, &n).unwrap();
        assert!((lift.surface_point - q / q.norm()).norm() < 1e-14);
        assert!((lift.distance - (q.norm() - 1.0)).abs() < 1e-14);
        assert!(lift.distance < 0.0);
        assert!(lift.decomposition_residual(&q) < 1e-12);
    }

    #[test]
    fn interior_point_decomposition() {
        let s = sphere();
        let q = Vec3::new(0.0, 0.0, 0.9);
        let lift = lift_at(&s, &q, &Vec3::new(0.0, 0.0, 1.0)).unwrap();
        assert!((lift.surface_point - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-15);
        assert!((lift.distance + 0.1).abs() < 1e-15);
    }

    #[test]
    fn identity_transform_on_shared_tangent_plane() {
        // d = 0 and mu_h = mu: the lift fixes tangent vectors.
        let s = sphere();
        let p = Vec3::new(0.0, 0.0, 1.0);
        let lift = lift_at(&s, &p, &p).unwrap();
        let g = Vec3::new(0.3, -0.2, 0.0);
        assert!((lift.lift_gradient(&g).unwrap() - g).norm() < 1e-14);
        assert!((lift.measure_ratio().unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lifted_gradient_of_constant_vanishes() {
        let mesh = build_icosphere(2);
        let s = sphere();
        // A constant has zero facet gradient; its lift must also vanish.
        for tri in [0usize, 17, 51] {
            let (_, n) = mesh.facet_area_normal(tri).unwrap();
            let [a, b, c] = mesh.triangle_vertices(tri);
            let q = 0.25 * a + 0.4 * b + 0.35 * c;
            let lift = lift_at(&s, &q, &n).unwrap();
            let g = lift.lift_gradient(&Vec3::zeros()).unwrap();
            assert!(g.norm() < 1e-13);
        }
    }

    #[test]
    fn lifted_gradient_is_tangential() {
        let mesh = build_icosphere(2);
        let s = sphere();
        let (t1, _) = tangent_frame(&mesh.facet_area_normal(3).unwrap().1);
        let [a, b, c] = mesh.triangle_vertices(3);
        let q = (a + b + c) / 3.0;
        let lift = lift_at(&s, &q, &mesh.facet_area_normal(3).unwrap().1).unwrap();
        let v = lift.lift_gradient(&t1).unwrap();
        assert!(v.dot(&lift.mu).abs() < 1e-12);
    }

    /// Max |measure ratio - 1| over all facets' quadrature points.
    fn max_ratio_deviation(mesh: &PolyhedralMesh) -> f64 {
        let s = sphere();
        let rule = crate::fem::quadrature_rule(4).unwrap();
        let mut max_dev: f64 = 0.0;
        for tri in 0..mesh.triangle_count() {
            let verts = mesh.triangle_vertices(tri);
            let (_, n) = mesh.facet_area_normal(tri).unwrap();
            for (bary, _) in rule.points() {
                let q = bary[0] * verts[0] + bary[1] * verts[1] + bary[2] * verts[2];
                let lift = lift_at(&s, &q, &n).unwrap();
                max_dev = max_dev.max((lift.measure_ratio().unwrap() - 1.0).abs());
            }
        }
        max_dev
    }

    #[test]
    fn measure_ratio_deviation_is_second_order() {
        let d2 = max_ratio_deviation(&build_icosphere(2));
        let d3 = max_ratio_deviation(&build_icosphere(3));
        let ratio = d2 / d3;
        assert!((2.5..6.0).contains(&ratio), "O(h^2) ratio: {ratio}");
    }

    #[test]
    fn lifted_facet_areas_sum_to_sphere_area() {
        let mesh = build_icosphere(4);
        let s = sphere();
        let rule = crate::fem::quadrature_rule(4).unwrap();
        let mut area = 0.0;
        for tri in 0..mesh.triangle_count() {
            let verts = mesh.triangle_vertices(tri);
            let (facet_area, n) = mesh.facet_area_normal(tri).unwrap();
            for (bary, w) in rule.points() {
                let q = bary[0] * verts[0] + bary[1] * verts[1] + bary[2] * verts[2];
                let lift = lift_at(&s, &q, &n).unwrap();
                area += facet_area * w * lift.measure_ratio().unwrap();
            }
        }
        let exact = 4.0 * std::f64::consts::PI;
        assert!(
            ((area - exact) / exact).abs() < 1e-4,
            "lifted area {area} vs {exact}"
        );
    }
}
