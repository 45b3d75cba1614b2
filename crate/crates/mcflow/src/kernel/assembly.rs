//! Element assembly of the fully discrete schemes.
//!
//! One time step solves a linear system for the new position field.  All
//! nonlinear coefficients (the mobility `A`, `G^{-1} sqrt(det G)` and the
//! projection `P_h` with its gradient) are frozen at the previous - or
//! half - step and evaluated at quadrature points.  Two matrices are
//! assembled over the shared pattern:
//!
//! * the weighted mass `M[x] : (chi, psi) -> int A(nu, sqrt(det G)) chi . psi`,
//! * the combined form `W[x] : (chi, psi) ->
//!   int G^{-1} grad chi : grad psi sqrt(det G)
//!   + (1+alpha)/alpha int grad chi : grad (P_h psi)`.
//!
//! The first-order scheme then reads
//! `(M/tau + W) x^{m+1} = (M/tau) x^m`, and the midpoint corrector
//! `(M'/tau + W'/2) x^{m+1} = (M'/tau - W'/2) x^m` with primed forms frozen
//! at the half step.

use std::sync::Arc;

use nalgebra::DVector;

use crate::evolution::{block3_pattern, CsrMatrix, SparsityPattern};
use crate::fem::{FeVectorField, GeometryMode, NodeContext, QuadContext, MAX_LOCAL_NODES};
use crate::geometry::{PolyhedralMesh, ReferenceSurface};
use crate::{Result, Vec3};

use super::metric::metric_tensor;
use super::mobility::mobility;
use super::normal::{projection_from_value, smoothed_normal};

/// Sparse system for one solve: `matrix * x = rhs`.
///
/// Row/column layout is interleaved: the degree of freedom `(node, comp)`
/// sits at `3 * node + comp`.
#[derive(Debug, Clone)]
pub struct SchemeSystem {
    pub matrix: CsrMatrix,
    pub rhs: DVector<f64>,
}

impl SchemeSystem {
    pub fn dof_row(node: usize, comp: usize) -> usize {
        3 * node + comp
    }
}

/// Reusable assembly state: precomputed geometry tables, the sparsity
/// pattern and per-element scatter indices.
pub struct AssemblyWorkspace {
    pub quad: QuadContext,
    pub nodes: NodeContext,
    pub alpha: f64,
    pattern: Arc<SparsityPattern>,
    /// `scatter[el][(li * n_local + lj) * 3 + r]` is the flat value index
    /// of entry `(3 i + r, 3 j)`; the three column entries are contiguous.
    scatter: Vec<Vec<u32>>,
}

impl AssemblyWorkspace {
    pub fn new(
        surface: &ReferenceSurface,
        mesh: &PolyhedralMesh,
        order: usize,
        mode: GeometryMode,
        quad_degree: usize,
        alpha: f64,
    ) -> Result<Self> {
        assert!(alpha > 0.0, "alpha must be positive");
        let quad = QuadContext::build(surface, mesh, order, mode, quad_degree)?;
        let nodes = NodeContext::build(surface, mesh, order, mode)?;

        // Scalar adjacency from element connectivity.
        let n = mesh.dof_count(order);
        let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];
        for element in &quad.elements {
            for &i in &element.dofs {
                for &j in &element.dofs {
                    neighbors[i].push(j);
                }
            }
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        let pattern = Arc::new(block3_pattern(&neighbors));

        let scatter = quad
            .elements
            .iter()
            .map(|element| {
                let nl = element.dofs.len();
                let mut map = Vec::with_capacity(nl * nl * 3);
                for &i in &element.dofs {
                    for &j in &element.dofs {
                        for r in 0..3 {
                            let idx = pattern
                                .index_of(3 * i + r, 3 * j)
                                .expect("block in pattern");
                            map.push(idx as u32);
                        }
                    }
                }
                map
            })
            .collect();

        Ok(Self {
            quad,
            nodes,
            alpha,
            pattern,
            scatter,
        })
    }

    pub fn pattern(&self) -> &Arc<SparsityPattern> {
        &self.pattern
    }

    pub fn mode(&self) -> GeometryMode {
        self.quad.mode
    }

    pub fn n_dofs(&self) -> usize {
        self.quad.n_dofs
    }

    /// The smoothed normal of a position field, in this workspace's mode.
    pub fn smoothed_normal(&self, x: &FeVectorField) -> Result<FeVectorField> {
        smoothed_normal(&self.nodes, x)
    }

    /// Assembles the weighted mass and the combined stiffness + projection
    /// forms with coefficients frozen at `x` (and its smoothed normal).
    pub fn assemble_forms(
        &self,
        x: &FeVectorField,
        nu_hat: &FeVectorField,
    ) -> Result<(CsrMatrix, CsrMatrix)> {
        assert_eq!(x.dof_count(), self.quad.n_dofs);
        assert_eq!(nu_hat.dof_count(), self.quad.n_dofs);
        let mut mass = CsrMatrix::zeros(self.pattern.clone());
        let mut stiff = CsrMatrix::zeros(self.pattern.clone());
        let proj_coef = (1.0 + self.alpha) / self.alpha;

        let mut xs = [Vec3::zeros(); MAX_LOCAL_NODES];
        let mut ns = [Vec3::zeros(); MAX_LOCAL_NODES];
        let mut gi_grads = [Vec3::zeros(); MAX_LOCAL_NODES];

        for (element, scatter) in self.quad.elements.iter().zip(&self.scatter) {
            let nl = element.dofs.len();
            element.gather(x.coefficients(), &mut xs);
            element.gather(nu_hat.coefficients(), &mut ns);

            for qp in &element.points {
                let grad_x = qp.gradient(&xs[..nl]);
                let state = metric_tensor(&grad_x, &qp.mu)?;
                let weight = qp.weight;
                let rho = state.sqrt_det_g;
                let a_mat =
                    *mobility(&state.nu, rho, self.alpha)?.matrix();

                // Smoothed-normal value/gradient and the projection data.
                let nh = qp.value(&ns[..nl]);
                let grad_nh = qp.gradient(&ns[..nl]);
                let (proj, dp) = projection_from_value(&nh, &grad_nh);

                // Precompute G^{-1} grads and the dP contraction vectors.
                for j in 0..nl {
                    gi_grads[j] = state.g_inv * qp.grads[j];
                }
                // dp_vec[s][r] = vector with components D_a P_{s r}.
                let mut dp_vec = [[Vec3::zeros(); 3]; 3];
                for s in 0..3 {
                    for r in 0..3 {
                        dp_vec[s][r] = Vec3::new(dp[0][(s, r)], dp[1][(s, r)], dp[2][(s, r)]);
                    }
                }

                let w_rho = weight * rho;
                for li in 0..nl {
                    let phi_i = qp.basis[li];
                    let grad_i = qp.grads[li];
                    for lj in 0..nl {
                        let base = (li * nl + lj) * 3;
                        let phi_j = qp.basis[lj];
                        let grad_j = qp.grads[lj];

                        let mass_scale = weight * phi_i * phi_j;
                        let stiff_scalar = w_rho * grad_i.dot(&gi_grads[lj]);
                        let grad_dot = grad_i.dot(&grad_j);

                        for r in 0..3 {
                            let row_base = scatter[base + r] as usize;
                            let mass_row = &mut mass.values_mut()
                                [row_base..row_base + 3];
                            mass_row[0] += mass_scale * a_mat[(r, 0)];
                            mass_row[1] += mass_scale * a_mat[(r, 1)];
                            mass_row[2] += mass_scale * a_mat[(r, 2)];

                            let stiff_row = &mut stiff.values_mut()
                                [row_base..row_base + 3];
                            for s in 0..3 {
                                // Test chi = phi_i e_r against trial phi_j e_s.
                                let mut v = proj_coef
                                    * (phi_i * grad_j.dot(&dp_vec[s][r])
                                        + proj[(s, r)] * grad_dot);
                                if r == s {
                                    v += stiff_scalar;
                                }
                                stiff_row[s] += v;
                            }
                        }
                    }
                }
            }
        }
        Ok((mass, stiff))
    }
}

/// One implicit Euler step: `(M/tau + W) x^{m+1} = (M/tau) x^m`.
pub fn assemble_euler_step(
    workspace: &AssemblyWorkspace,
    x_prev: &FeVectorField,
    nu_hat_prev: &FeVectorField,
    tau: f64,
) -> Result<SchemeSystem> {
    assert!(tau > 0.0);
    let (mass, stiff) = workspace.assemble_forms(x_prev, nu_hat_prev)?;
    let matrix = mass.linear_combination(1.0 / tau, &stiff, 1.0);
    let rhs = mass.mul_vec(&x_prev.to_flat()) / tau;
    Ok(SchemeSystem { matrix, rhs })
}

/// The two systems of the second-order scheme: an Euler predictor with
/// step `tau / 2`, and a factory producing the trapezoidal corrector once
/// the half-step solution is known (its smoothed normal is recomputed
/// inside).
pub fn assemble_midpoint_steps<'a>(
    workspace: &'a AssemblyWorkspace,
    x_prev: &'a FeVectorField,
    nu_hat_prev: &FeVectorField,
    tau: f64,
) -> Result<(
    SchemeSystem,
    impl FnOnce(&FeVectorField) -> Result<SchemeSystem> + 'a,
)> {
    assert!(tau > 0.0);
    let half = assemble_euler_step(workspace, x_prev, nu_hat_prev, 0.5 * tau)?;
    let corrector = move |x_half: &FeVectorField| -> Result<SchemeSystem> {
        let nu_half = workspace.smoothed_normal(x_half)?;
        let (mass, stiff) = workspace.assemble_forms(x_half, &nu_half)?;
        let matrix = mass.linear_combination(1.0 / tau, &stiff, 0.5);
        let lhs_old = mass.linear_combination(1.0 / tau, &stiff, -0.5);
        let rhs = lhs_old.mul_vec(&x_prev.to_flat());
        Ok(SchemeSystem { matrix, rhs })
    };
    Ok((half, corrector))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::solve_linear;
    use crate::fem::interpolate;
    use crate::geometry::build_icosphere;

    fn sphere() -> ReferenceSurface {
        ReferenceSurface::unit_sphere()
    }

    fn sphere_workspace(level: usize, mode: GeometryMode) -> (AssemblyWorkspace, PolyhedralMesh) {
        let s = sphere();
        let mesh = build_icosphere(level);
        let ws = AssemblyWorkspace::new(&s, &mesh, 2, mode, 4, 0.1).unwrap();
        (ws, mesh)
    }

    fn mean_vertex_radius(mesh: &PolyhedralMesh, x: &FeVectorField) -> f64 {
        let v = mesh.vertex_count();
        (0..v).map(|i| x.coefficient(i).norm()).sum::<f64>() / v as f64
    }

    #[test]
    fn weighted_mass_is_symmetric_positive_definite() {
        let (ws, mesh) = sphere_workspace(2, GeometryMode::Lifted);
        let x = interpolate(|p| 2.0 * p, &sphere(), &mesh, 2).unwrap();
        let nu = ws.smoothed_normal(&x).unwrap();
        let (mass, _) = ws.assemble_forms(&x, &nu).unwrap();
        assert!(mass.asymmetry() < 1e-12);
        // Positive definiteness via Cholesky of the dense copy.
        let dense = mass.to_dense();
        assert!(
            nalgebra::Cholesky::new(dense).is_some(),
            "mass must be positive definite"
        );
    }

    #[test]
    fn one_euler_step_matches_radius_ode() {
        // dR/dt = -2/R: from R0 = 2 one step of size 1e-4 moves the mean
        // radius to 2 - 1e-4 (+ O(tau^2), O(spatial)).
        let (ws, mesh) = sphere_workspace(3, GeometryMode::Lifted);
        let x = interpolate(|p| 2.0 * p, &sphere(), &mesh, 2).unwrap();
        let nu = ws.smoothed_normal(&x).unwrap();
        let tau = 1e-4;
        let system = assemble_euler_step(&ws, &x, &nu, tau).unwrap();
        let sol = solve_linear(&system.matrix, &system.rhs, 1e-12).unwrap();
        let x_new = FeVectorField::from_flat(2, &sol);
        let r = mean_vertex_radius(&mesh, &x_new);
        assert!(
            (r - (2.0 - tau)).abs() < 1e-6,
            "mean radius {r} vs {}",
            2.0 - tau
        );
    }

    #[test]
    fn translation_equivariance_euler() {
        let (ws, mesh) = sphere_workspace(2, GeometryMode::Lifted);
        let x = interpolate(|p| 2.0 * p, &sphere(), &mesh, 2).unwrap();
        let nu = ws.smoothed_normal(&x).unwrap();
        let tau = 1e-3;

        let sys = assemble_euler_step(&ws, &x, &nu, tau).unwrap();
        let sol = solve_linear(&sys.matrix, &sys.rhs, 1e-13).unwrap();

        let shift = Vec3::new(0.3, -0.7, 0.2);
        let x_shifted = x.translated(&shift);
        let nu_shifted = ws.smoothed_normal(&x_shifted).unwrap();
        // The smoothed normal only sees gradients, so it is unchanged.
        for dof in 0..mesh.dof_count(2) {
            assert!((nu_shifted.coefficient(dof) - nu.coefficient(dof)).norm() < 1e-12);
        }
        let sys2 = assemble_euler_step(&ws, &x_shifted, &nu_shifted, tau).unwrap();
        let sol2 = solve_linear(&sys2.matrix, &sys2.rhs, 1e-13).unwrap();

        let a = FeVectorField::from_flat(2, &sol);
        let b = FeVectorField::from_flat(2, &sol2);
        let mut worst: f64 = 0.0;
        for dof in 0..mesh.dof_count(2) {
            worst = worst.max((b.coefficient(dof) - a.coefficient(dof) - shift).norm());
        }
        assert!(worst < 1e-10, "translation defect {worst}");
    }

    #[test]
    fn midpoint_corrector_freeze_is_consistent() {
        // Forcing the half step back to x^m must reproduce the Euler matrix
        // with halved stiffness and the augmented right-hand side.
        let (ws, mesh) = sphere_workspace(1, GeometryMode::Lifted);
        let x = interpolate(|p| 1.5 * p, &sphere(), &mesh, 2).unwrap();
        let nu = ws.smoothed_normal(&x).unwrap();
        let tau = 0.02;

        let (_, corrector) = assemble_midpoint_steps(&ws, &x, &nu, tau).unwrap();
        let system = corrector(&x).unwrap();

        let (mass, stiff) = ws.assemble_forms(&x, &nu).unwrap();
        let expect_matrix = mass.linear_combination(1.0 / tau, &stiff, 0.5);
        let expect_rhs = mass
            .linear_combination(1.0 / tau, &stiff, -0.5)
            .mul_vec(&x.to_flat());

        let diff: f64 = system
            .matrix
            .values()
            .iter()
            .zip(expect_matrix.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-13);
        assert!((system.rhs - expect_rhs).norm() < 1e-12);
    }

    #[test]
    fn midpoint_one_step_third_order_local_error() {
        let (ws, mesh) = sphere_workspace(4, GeometryMode::Lifted);
        let x0 = interpolate(|p| 2.0 * p, &sphere(), &mesh, 2).unwrap();
        let nu0 = ws.smoothed_normal(&x0).unwrap();

        let one_step = |tau: f64| -> f64 {
            let (half, corrector) = assemble_midpoint_steps(&ws, &x0, &nu0, tau).unwrap();
            let x_half = FeVectorField::from_flat(
                2,
                &solve_linear(&half.matrix, &half.rhs, 1e-13).unwrap(),
            );
            let system = corrector(&x_half).unwrap();
            let x1 = FeVectorField::from_flat(
                2,
                &solve_linear(&system.matrix, &system.rhs, 1e-13).unwrap(),
            );
            let exact = (4.0 - 4.0 * tau).sqrt();
            (mean_vertex_radius(&mesh, &x1) - exact).abs()
        };

        let d1 = one_step(0.02);
        let d2 = one_step(0.01);
        assert!(d1 < 1e-4, "one-step defect {d1}");
        let ratio = d1 / d2;
        assert!(
            (5.0..12.0).contains(&ratio),
            "expected ~8x reduction, got {ratio} ({d1} / {d2})"
        );
    }

    #[test]
    fn lifted_and_simplified_steps_agree_to_second_order() {
        // One Euler step in both modes; nodal gap is O(h^2).
        let mut gaps = Vec::new();
        for level in [3usize, 4] {
            let s = sphere();
            let mesh = build_icosphere(level);
            let x = interpolate(|p| 2.0 * p, &s, &mesh, 2).unwrap();
            let tau = 1e-3;
            let mut solutions = Vec::new();
            for mode in [GeometryMode::Lifted, GeometryMode::Simplified] {
                let ws = AssemblyWorkspace::new(&s, &mesh, 2, mode, 4, 0.1).unwrap();
                let nu = ws.smoothed_normal(&x).unwrap();
                let sys = assemble_euler_step(&ws, &x, &nu, tau).unwrap();
                solutions.push(FeVectorField::from_flat(
                    2,
                    &solve_linear(&sys.matrix, &sys.rhs, 1e-12).unwrap(),
                ));
            }
            let mut gap: f64 = 0.0;
            for dof in 0..mesh.dof_count(2) {
                gap = gap
                    .max((solutions[0].coefficient(dof) - solutions[1].coefficient(dof)).norm());
            }
            gaps.push(gap);
        }
        let ratio = gaps[0] / gaps[1];
        assert!(
            (2.5..6.0).contains(&ratio),
            "mode gap should be O(h^2): gaps {gaps:?}, ratio {ratio}"
        );
    }
}
