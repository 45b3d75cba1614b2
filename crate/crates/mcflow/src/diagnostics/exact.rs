//! The exact shrinking sphere `x(p, t) = sqrt(R0^2 - 4 t) p`.

use crate::{Error, Mat3, Result, Vec3};

/// A radial embedding of the unit sphere at a fixed time.
#[derive(Debug, Clone, Copy)]
pub struct SphereEmbedding {
    radius: f64,
}

impl SphereEmbedding {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn value(&self, p: &Vec3) -> Vec3 {
        self.radius * p
    }

    /// Tangential gradient `R P(p)`, rows as derivative directions.
    pub fn gradient(&self, p: &Vec3) -> Mat3 {
        self.radius * (Mat3::identity() - p * p.transpose())
    }
}

/// The sphere of initial radius `r0` after flowing for time `t`.
pub fn exact_sphere(r0: f64, t: f64) -> Result<SphereEmbedding> {
    let extinction = 0.25 * r0 * r0;
    if t >= extinction {
        return Err(Error::PastExtinction { t, extinction });
    }
    Ok(SphereEmbedding {
        radius: (r0 * r0 - 4.0 * t).sqrt(),
    })
}
