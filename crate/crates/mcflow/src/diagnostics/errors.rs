//! Relative error monitors against the exact solution and experimental
//! orders of convergence.

use crate::fem::{QuadContext, FeVectorField, GeometryMode, MAX_LOCAL_NODES};
use crate::{Error, Result, Vec3};

use super::SphereEmbedding;

/// Relative squared errors of one time step.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ErrorParts {
    /// `||x_h - x||^2 / ||x||^2`.
    pub l2: f64,
    /// Same with tangential-gradient seminorms.
    pub h1_semi: f64,
    /// Same with full `H^1` norms (numerators and denominators added
    /// before dividing).
    pub h1: f64,
}

/// Running maxima of the per-step parts, the quantities tabulated per run.
#[derive(Debug, Clone, Copy, Default)]
pub struct ErrorTriple {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
}

impl ErrorTriple {
    pub fn update(&mut self, parts: &ErrorParts) {
        self.e1 = self.e1.max(parts.l2);
        self.e2 = self.e2.max(parts.h1_semi);
        self.e3 = self.e3.max(parts.h1);
    }
}

/// Integrates the relative errors of `x_h` against the exact embedding
/// with the rule baked into `ctx` (degree 8 for the tabulated errors).
///
/// In lifted mode the comparison happens on `M` at the projected
/// quadrature points; in simplified mode on the mesh, against the lifted
/// extension of the exact solution and its transformed gradient.
pub fn relative_errors(
    x: &FeVectorField,
    exact: &SphereEmbedding,
    ctx: &QuadContext,
) -> ErrorParts {
    let mut num_l2 = 0.0;
    let mut den_l2 = 0.0;
    let mut num_h1 = 0.0;
    let mut den_h1 = 0.0;

    let mut local = [Vec3::zeros(); MAX_LOCAL_NODES];
    for element in &ctx.elements {
        let nl = element.dofs.len();
        element.gather(x.coefficients(), &mut local);
        for qp in &element.points {
            let value = qp.value(&local[..nl]);
            let grad = qp.gradient(&local[..nl]);
            let exact_value = exact.value(&qp.surface_point);
            let mut exact_grad = exact.gradient(&qp.surface_point);
            if ctx.mode == GeometryMode::Simplified {
                exact_grad = qp.grad_transform * exact_grad;
            }
            num_l2 += qp.weight * (value - exact_value).norm_squared();
            den_l2 += qp.weight * exact_value.norm_squared();
            num_h1 += qp.weight * (grad - exact_grad).norm_squared();
            den_h1 += qp.weight * exact_grad.norm_squared();
        }
    }

    ErrorParts {
        l2: num_l2 / den_l2,
        h1_semi: num_h1 / den_h1,
        h1: (num_l2 + num_h1) / (den_l2 + den_h1),
    }
}

/// Experimental orders of convergence:
/// `eoc_i = log(E_i / E_{i+1}) / log(h_i / h_{i+1})` for strictly
/// decreasing mesh sizes and positive errors.
pub fn eoc(errors: &[f64], h_values: &[f64]) -> Result<Vec<f64>> {
    if errors.len() != h_values.len() {
        return Err(Error::InvalidSequence {
            reason: "errors and mesh sizes must have equal length",
        });
    }
    if errors.len() < 2 {
        return Err(Error::InvalidSequence {
            reason: "need at least two refinement levels",
        });
    }
    if errors.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidSequence {
            reason: "errors must be positive",
        });
    }
    if h_values.windows(2).any(|w| !(w[0] > w[1]) || !(w[1] > 0.0)) {
        return Err(Error::InvalidSequence {
            reason: "mesh sizes must be positive and strictly decreasing",
        });
    }
    Ok(errors
        .windows(2)
        .zip(h_values.windows(2))
        .map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect())
}
