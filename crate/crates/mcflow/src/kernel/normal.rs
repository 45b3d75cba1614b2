//! The smoothed normal field: facet-area-weighted nodal averaging of the
//! element-wise wedge normals, followed by nodal normalization.
//!
//! The defining lumped system diagonalizes node by node, so the
//! pre-normalization value at a node is
//! `sum_{T ~ p} |T| nu|_T(p) / sum_{T ~ p} |T|`.

use crate::fem::{evaluate_field, FeVectorField, GeometryMode, NodeContext};
use crate::geometry::{PolyhedralMesh, ReferenceSurface};
use crate::{Error, Mat3, Result, Vec3};

use super::metric::metric_tensor;

/// Pre-normalization nodal averages of the element wedge normals.
pub fn smoothed_normal_raw(ctx: &NodeContext, x: &FeVectorField) -> Result<FeVectorField> {
    assert_eq!(x.dof_count(), ctx.n_dofs);
    let mut numerator = vec![Vec3::zeros(); ctx.n_dofs];
    let mut weight = vec![0.0f64; ctx.n_dofs];

    for element in &ctx.elements {
        for (local, &dof) in element.dofs.iter().enumerate() {
            let mut grad = Mat3::zeros();
            for (basis, &other) in element.dofs.iter().enumerate() {
                grad += element.grads[local][basis] * x.coefficient(other).transpose();
            }
            let state = metric_tensor(&grad, &element.mus[local])?;
            numerator[dof] += element.facet_area * state.nu;
            weight[dof] += element.facet_area;
        }
    }

    let coeffs = numerator
        .into_iter()
        .zip(weight)
        .map(|(num, w)| num / w)
        .collect();
    Ok(FeVectorField::from_coefficients(ctx.order, coeffs))
}

/// The smoothed normal: nodal averages normalized to unit length.
///
/// Fails with [`Error::ZeroAverage`] when adjacent facet normals cancel at
/// a node (fold-over) and with [`Error::DegenerateMetric`] when an element
/// has collapsed.
pub fn smoothed_normal(ctx: &NodeContext, x: &FeVectorField) -> Result<FeVectorField> {
    let mut field = smoothed_normal_raw(ctx, x)?;
    for (node, c) in field.coefficients_mut().iter_mut().enumerate() {
        let norm = c.norm();
        if norm < 1e-8 {
            return Err(Error::ZeroAverage { node, norm });
        }
        *c /= norm;
    }
    Ok(field)
}

/// Tangential projection `P_h = I - nu_hat (x) nu_hat` and its derivative
/// `dP[i][(j, k)] = D_i (P_h)_{jk}` at a point, from the finite element
/// value and gradient of the smoothed normal field.
pub fn projection_and_gradient(
    nu_hat: &FeVectorField,
    surface: &ReferenceSurface,
    mesh: &PolyhedralMesh,
    mode: GeometryMode,
    tri: usize,
    bary: &[f64; 3],
) -> Result<(Mat3, [Mat3; 3])> {
    let (value, grad) = evaluate_field(nu_hat, surface, mesh, mode, tri, bary)?;
    Ok(projection_from_value(&value, &grad))
}

/// The algebra of the product rule, shared with assembly:
/// `D_i P_{jk} = -(D_i n_j) n_k - n_j (D_i n_k)`.
pub(crate) fn projection_from_value(value: &Vec3, grad: &Mat3) -> (Mat3, [Mat3; 3]) {
    let proj = Mat3::identity() - value * value.transpose();
    let mut dp = [Mat3::zeros(); 3];
    for i in 0..3 {
        let dn = grad.row(i).transpose();
        dp[i] = -(dn * value.transpose() + value * dn.transpose());
    }
    (proj, dp)
}
