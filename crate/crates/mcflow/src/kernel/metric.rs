//! The globally defined metric tensor
//! `G_ij = D_i x . D_j x + mu_i mu_j` and its derived quantities.
//!
//! `G` makes the degenerate surface metric invertible in ambient
//! coordinates: it satisfies `G mu = mu`, `G^{-1} grad x : grad x = 2`, and
//! `sqrt(det G)` is the area element of the embedding relative to the
//! reference surface.  The wedge-product combination
//! `nu = mu_j D_{j+1} x ^ D_{j+2} x / sqrt(det G)` is the unit normal of
//! the embedded surface.

use crate::{Error, Mat3, Result, Vec3};

/// Floor for `sqrt(det G)`; below it an element counts as collapsed
/// (pinch-off detection).
pub const DET_FLOOR: f64 = 1e-12;

/// Per-point bundle of the metric quantities driving assembly.
#[derive(Debug, Clone, Copy)]
pub struct MetricState {
    /// Tangential gradient with rows as derivative directions
    /// (`grad_x[(i, j)] = D_i x_j`).
    pub grad_x: Mat3,
    /// Unit normal of the reference surface at the point.
    pub mu: Vec3,
    /// The metric tensor.
    pub g: Mat3,
    /// Its inverse.
    pub g_inv: Mat3,
    /// `sqrt(det G) > 0`.
    pub sqrt_det_g: f64,
    /// Unit normal of the embedded surface.
    pub nu: Vec3,
}

/// Builds the metric bundle from a tangential gradient and the reference
/// normal.  Fails with [`Error::DegenerateMetric`] when the determinant
/// falls below the floor.
pub fn metric_tensor(grad_x: &Mat3, mu: &Vec3) -> Result<MetricState> {
    debug_assert!((mu.norm() - 1.0).abs() < 1e-8, "mu must be a unit vector");
    let g = grad_x * grad_x.transpose() + mu * mu.transpose();
    let det = g.determinant();
    let sqrt_det_g = det.max(0.0).sqrt();
    if !(sqrt_det_g > DET_FLOOR) {
        return Err(Error::DegenerateMetric {
            sqrt_det: sqrt_det_g,
            floor: DET_FLOOR,
        });
    }
    let g_inv = g.try_inverse().ok_or(Error::DegenerateMetric {
        sqrt_det: sqrt_det_g,
        floor: DET_FLOOR,
    })?;
    let nu = wedge_normal(grad_x, mu, sqrt_det_g);
    Ok(MetricState {
        grad_x: *grad_x,
        mu: *mu,
        g,
        g_inv,
        sqrt_det_g,
        nu,
    })
}

/// `nu = (1 / sqrt(det G)) sum_j mu_j (D_{j+1} x ^ D_{j+2} x)`, indices
/// modulo 3.
fn wedge_normal(grad_x: &Mat3, mu: &Vec3, sqrt_det_g: f64) -> Vec3 {
    let rows: [Vec3; 3] = [
        grad_x.row(0).transpose(),
        grad_x.row(1).transpose(),
        grad_x.row(2).transpose(),
    ];
    let mut nu = Vec3::zeros();
    for j in 0..3 {
        nu += mu[j] * rows[(j + 1) % 3].cross(&rows[(j + 2) % 3]);
    }
    nu / sqrt_det_g
}

impl MetricState {
    /// The embedded surface's unit normal.
    pub fn element_normal(&self) -> Vec3 {
        self.nu
    }
}

/// Residual of the wedge identity
/// `G^{ik} G^{lj} D_j x ^ D_k x - (-1)^{i+l} mu_{sigma(i,l)} nu / sqrt(det G)`
/// for one index pair `1 <= i < l <= 3` (1-based as in the analysis;
/// `sigma(1,2) = 3`, `sigma(1,3) = 2`, `sigma(2,3) = 1`).
pub fn lemma2_residual(state: &MetricState, i: usize, l: usize) -> Vec3 {
    assert!((1..=3).contains(&i) && i < l && l <= 3, "need 1 <= i < l <= 3");
    let rows: [Vec3; 3] = [
        state.grad_x.row(0).transpose(),
        state.grad_x.row(1).transpose(),
        state.grad_x.row(2).transpose(),
    ];
    let gi = &state.g_inv;
    let (i0, l0) = (i - 1, l - 1);

    let mut lhs = Vec3::zeros();
    for j in 0..3 {
        for k in 0..3 {
            lhs += gi[(i0, k)] * gi[(l0, j)] * rows[j].cross(&rows[k]);
        }
    }

    let sigma = 6 - i - l; // sigma(1,2)=3, sigma(1,3)=2, sigma(2,3)=1 (1-based)
    let sign = if (i + l) % 2 == 0 { 1.0 } else { -1.0 };
    let rhs = sign / state.sqrt_det_g * state.mu[sigma - 1] * state.nu;
    lhs - rhs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn projection(p: &Vec3) -> Mat3 {
        Mat3::identity() - p * p.transpose()
    }

    #[test]
    fn identity_embedding_on_sphere() {
        let p = Vec3::new(0.6, -0.48, 0.64).normalize();
        let state = metric_tensor(&projection(&p), &p).unwrap();
        assert!((state.g - Mat3::identity()).norm() < 1e-14);
        assert!((state.sqrt_det_g - 1.0).abs() < 1e-14);
        assert!((state.g_inv - Mat3::identity()).norm() < 1e-14);
        assert!((state.nu - p).norm() < 1e-14);
    }

    #[test]
    fn scaled_identity_embedding() {
        let p = Vec3::new(0.0, 0.8, -0.6);
        let grad = 2.0 * projection(&p);
        let state = metric_tensor(&grad, &p).unwrap();
        let expect_g = 4.0 * projection(&p) + p * p.transpose();
        assert!((state.g - expect_g).norm() < 1e-13);
        assert!((state.sqrt_det_g - 4.0).abs() < 1e-13);
        let expect_inv = 0.25 * projection(&p) + p * p.transpose();
        assert!((state.g_inv - expect_inv).norm() < 1e-13);
        // The wedge normal is scale invariant.
        assert!((state.nu - p).norm() < 1e-13);
    }

    #[test]
    fn metric_fixes_mu_and_trace_identity() {
        // Ellipsoid embedding x(p) = diag(a,b,c) p.
        let diag = Mat3::from_diagonal(&Vec3::new(1.3, 0.7, 1.9));
        for p in [
            Vec3::new(0.36, 0.48, 0.8),
            Vec3::new(-0.6, 0.64, 0.48),
            Vec3::new(0.2, -0.4, 0.893308824).normalize(),
        ] {
            let grad = projection(&p) * diag; // rows D_i x_j = P diag
            let state = metric_tensor(&grad, &p).unwrap();
            assert!((state.g * p - p).norm() < 1e-12, "G mu = mu");
            let trace = (state.g_inv * state.grad_x)
                .component_mul(&state.grad_x)
                .sum();
            assert!((trace - 2.0).abs() < 1e-10, "G^-1 grad x : grad x = 2");
            // nu orthogonal to all rows, unit length.
            for i in 0..3 {
                assert!(state.nu.dot(&state.grad_x.row(i).transpose()).abs() < 1e-10);
            }
            assert!((state.nu.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn degenerate_gradient_is_rejected() {
        let p = Vec3::new(0.0, 0.0, 1.0);
        let err = metric_tensor(&Mat3::zeros(), &p).unwrap_err();
        assert!(matches!(err, Error::DegenerateMetric { .. }));
    }

    #[test]
    fn lemma2_identity_sphere_and_scaled() {
        for scale in [1.0, 0.5] {
            let p = Vec3::new(2.0, -1.0, 2.0) / 3.0;
            let state = metric_tensor(&(scale * projection(&p)), &p).unwrap();
            for (i, l) in [(1, 2), (1, 3), (2, 3)] {
                let r = lemma2_residual(&state, i, l).norm();
                assert!(r < 1e-12, "scale {scale}, pair ({i},{l}): residual {r}");
            }
        }
    }

    #[test]
    fn lemma2_identity_ellipsoid() {
        let diag = Mat3::from_diagonal(&Vec3::new(0.9, 1.4, 2.1));
        let p = Vec3::new(0.48, -0.6, 0.64).normalize();
        let state = metric_tensor(&(projection(&p) * diag), &p).unwrap();
        for (i, l) in [(1, 2), (1, 3), (2, 3)] {
            let r = lemma2_residual(&state, i, l).norm();
            assert!(r < 1e-9, "pair ({i},{l}): residual {r}");
        }
    }
}
