//! The mobility matrix `A(w, rho) = (alpha + 1) I + (rho - alpha - 1) w (x) w`
//! weighting the time-derivative term of the weak form.

use crate::{Error, Mat3, Result, Vec3};

/// Symmetric positive definite coefficient of the time derivative.
///
/// Eigenvalues are `rho` (eigenvector `w`) and `alpha + 1` (twice), so the
/// quadratic form is bounded below by `min(1, rho) |xi|^2`.
#[derive(Debug, Clone, Copy)]
pub struct MobilityMatrix {
    matrix: Mat3,
}

impl MobilityMatrix {
    pub fn matrix(&self) -> &Mat3 {
        &self.matrix
    }

    pub fn apply(&self, xi: &Vec3) -> Vec3 {
        self.matrix * xi
    }
}

/// Builds `A(w, rho)` for a unit vector `w` and positive `rho`, `alpha`.
pub fn mobility(w: &Vec3, rho: f64, alpha: f64) -> Result<MobilityMatrix> {
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter {
            name: "rho",
            value: rho,
        });
    }
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
        });
    }
    if (w.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidParameter {
            name: "|w|",
            value: w.norm(),
        });
    }
    let matrix = (alpha + 1.0) * Mat3::identity() + (rho - alpha - 1.0) * w * w.transpose();
    Ok(MobilityMatrix { matrix })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_aligned_example() {
        let a = mobility(&Vec3::new(1.0, 0.0, 0.0), 1.0, 0.1).unwrap();
        let expect = Mat3::from_diagonal(&Vec3::new(1.0, 1.1, 1.1));
        assert!((a.matrix() - expect).norm() < 1e-15);
    }

    #[test]
    fn rank_one_term_vanishes_when_rho_is_alpha_plus_one() {
        let w = Vec3::new(0.6, 0.8, 0.0);
        let a = mobility(&w, 1.3, 0.3).unwrap();
        assert!((a.matrix() - 1.3 * Mat3::identity()).norm() < 1e-14);
    }

    #[test]
    fn spectral_bound_example() {
        let w = Vec3::new(0.2, -0.4, 0.6).normalize();
        let a = mobility(&w, 0.3, 0.04).unwrap();
        let eig = a.matrix().symmetric_eigenvalues();
        let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((min - 0.3).abs() < 1e-12);
        assert!(min >= 0.3f64.min(1.0) - 1e-12);
    }

    #[test]
    fn quadratic_form_identity() {
        // A xi . xi = (alpha+1)(|xi|^2 - (xi.w)^2) + rho (xi.w)^2
        let w = Vec3::new(1.0, 2.0, -2.0).normalize();
        let (rho, alpha) = (0.7, 0.25);
        let a = mobility(&w, rho, alpha).unwrap();
        for xi in [
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.3, -1.2, 0.5),
            w,
        ] {
            let lhs = a.apply(&xi).dot(&xi);
            let dot = xi.dot(&w);
            let rhs = (alpha + 1.0) * (xi.norm_squared() - dot * dot) + rho * dot * dot;
            assert!((lhs - rhs).abs() < 1e-13);
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let w = Vec3::new(1.0, 0.0, 0.0);
        assert!(mobility(&w, -1.0, 0.1).is_err());
        assert!(mobility(&w, 1.0, 0.0).is_err());
        assert!(mobility(&(2.0 * w), 1.0, 0.1).is_err());
    }
}
