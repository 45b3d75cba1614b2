//! Mesh-quality statistics and surface area of the mapped mesh.

use crate::fem::{FeVectorField, GeometryMode, QuadContext, MAX_LOCAL_NODES};
use crate::geometry::PolyhedralMesh;
use crate::kernel::metric_tensor;
use crate::{Error, Result, Vec3};

/// Worst diameter-to-inradius ratio over the mapped vertex triangles
/// (`inradius = 2 area / perimeter`); small values mean no sharp angles.
pub fn sigma_max(x: &FeVectorField, mesh: &PolyhedralMesh) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for t in mesh.triangles() {
        let a = x.coefficient(t[0]);
        let b = x.coefficient(t[1]);
        let c = x.coefficient(t[2]);
        let sides = [(b - a).norm(), (c - b).norm(), (a - c).norm()];
        let diam = sides.iter().cloned().fold(0.0, f64::max);
        let area = 0.5 * (b - a).cross(&(c - a)).norm();
        if area <= 1e-14 * diam * diam.max(1.0) {
            return Err(Error::DegenerateTriangle { area });
        }
        let perimeter: f64 = sides.iter().sum();
        let inradius = 2.0 * area / perimeter;
        worst = worst.max(diam / inradius);
    }
    Ok(worst)
}

/// Area of the mapped surface.
///
/// Order-1 fields map facets to flat triangles, summed exactly; order-2
/// fields integrate the mapped-parametrization area element with the
/// context's quadrature rule.
pub fn surface_area(x: &FeVectorField, ctx: &QuadContext) -> Result<f64> {
    if ctx.order == 1 {
        let mut area = 0.0;
        for element in &ctx.elements {
            let a = x.coefficient(element.dofs[0]);
            let b = x.coefficient(element.dofs[1]);
            let c = x.coefficient(element.dofs[2]);
            area += 0.5 * (b - a).cross(&(c - a)).norm();
        }
        return Ok(area);
    }

    let mut area = 0.0;
    let mut local = [Vec3::zeros(); MAX_LOCAL_NODES];
    for element in &ctx.elements {
        let nl = element.dofs.len();
        element.gather(x.coefficients(), &mut local);
        for qp in &element.points {
            let grad = qp.gradient(&local[..nl]);
            match ctx.mode {
                GeometryMode::Lifted => {
                    // sqrt(det G) is exactly the area element of the
                    // embedding relative to M.
                    let state = metric_tensor(&grad, &qp.mu)?;
                    area += qp.weight * state.sqrt_det_g;
                }
                GeometryMode::Simplified => {
                    let (t1, t2) = element.frame;
                    let u = grad.transpose() * t1;
                    let v = grad.transpose() * t2;
                    area += qp.weight * u.cross(&v).norm();
                }
            }
        }
    }
    Ok(area)
}
