//! Residual evaluators for the geometric identities of the metric tensor
//! and the wedge normal, checked against an independent local chart.
//!
//! The reference surface is the unit sphere with the spherical chart
//! `phi(t1, t2) = (sin t1 cos t2, sin t1 sin t2, cos t1)`; embeddings are
//! time-dependent linear maps `x(p, t) = A(t) p`, which covers spheres,
//! scaled spheres, ellipsoids and the shrinking sphere.  Everything the
//! chart route needs (first fundamental forms of surface and image) is
//! computed independently of the ambient-coordinate route.

use crate::{Mat3, Result, Vec3};

use super::metric::{lemma2_residual, metric_tensor, MetricState};

/// Chart step for the finite-difference identities.
const THETA_STEP: f64 = 1e-5;
/// Time step for the determinant time-derivative identity.
const TIME_STEP: f64 = 1e-6;

/// A smooth embedding `x(p, t) = A(t) p` of the unit sphere.
pub struct LinearEmbedding {
    matrix: Box<dyn Fn(f64) -> Mat3 + Send + Sync>,
    matrix_dt: Box<dyn Fn(f64) -> Mat3 + Send + Sync>,
}

impl LinearEmbedding {
    pub fn new(
        matrix: impl Fn(f64) -> Mat3 + Send + Sync + 'static,
        matrix_dt: impl Fn(f64) -> Mat3 + Send + Sync + 'static,
    ) -> Self {
        Self {
            matrix: Box::new(matrix),
            matrix_dt: Box::new(matrix_dt),
        }
    }

    pub fn identity() -> Self {
        Self::new(|_| Mat3::identity(), |_| Mat3::zeros())
    }

    pub fn scaled(r: f64) -> Self {
        Self::new(move |_| r * Mat3::identity(), |_| Mat3::zeros())
    }

    pub fn ellipsoid(a: f64, b: f64, c: f64) -> Self {
        let diag = Mat3::from_diagonal(&Vec3::new(a, b, c));
        Self::new(move |_| diag, |_| Mat3::zeros())
    }

    /// The exact mean curvature flow solution `R(t) = sqrt(r0^2 - 4 t)`.
    pub fn shrinking_sphere(r0: f64) -> Self {
        Self::new(
            move |t| (r0 * r0 - 4.0 * t).sqrt() * Mat3::identity(),
            move |t| -2.0 / (r0 * r0 - 4.0 * t).sqrt() * Mat3::identity(),
        )
    }

    pub fn matrix_at(&self, t: f64) -> Mat3 {
        (self.matrix)(t)
    }

    pub fn matrix_dt_at(&self, t: f64) -> Mat3 {
        (self.matrix_dt)(t)
    }
}

/// One evaluation point of the suite: chart coordinates and a time.
#[derive(Debug, Clone, Copy)]
pub struct ChartSample {
    pub theta: [f64; 2],
    pub t: f64,
}

/// Maximum residuals over all samples, one entry per identity.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityReport {
    /// Metric entries vs the chart expression.
    pub metric_chart: f64,
    /// Inverse metric entries vs the chart expression.
    pub inverse_chart: f64,
    /// `det G` vs `det(g) / det(h)`.
    pub det_ratio: f64,
    /// `G^{-1} grad x : grad x - 2`.
    pub trace_two: f64,
    /// `|G mu - mu|`.
    pub metric_fixes_mu: f64,
    /// Wedge normal vs the chart normal.
    pub normal_chart: f64,
    /// The wedge identity, max over the three index pairs.
    pub wedge_identity: f64,
    /// Divergence-form Laplace-Beltrami vs the chart Laplacian (FD).
    pub laplace_divergence: f64,
    /// Time derivative of `sqrt(det G)` (FD) vs its closed form.
    pub det_time_derivative: f64,
}

impl IdentityReport {
    fn absorb(&mut self, other: &IdentityReport) {
        self.metric_chart = self.metric_chart.max(other.metric_chart);
        self.inverse_chart = self.inverse_chart.max(other.inverse_chart);
        self.det_ratio = self.det_ratio.max(other.det_ratio);
        self.trace_two = self.trace_two.max(other.trace_two);
        self.metric_fixes_mu = self.metric_fixes_mu.max(other.metric_fixes_mu);
        self.normal_chart = self.normal_chart.max(other.normal_chart);
        self.wedge_identity = self.wedge_identity.max(other.wedge_identity);
        self.laplace_divergence = self.laplace_divergence.max(other.laplace_divergence);
        self.det_time_derivative = self.det_time_derivative.max(other.det_time_derivative);
    }

    /// Largest algebraic (non finite-difference) residual.
    pub fn max_algebraic(&self) -> f64 {
        [
            self.metric_chart,
            self.inverse_chart,
            self.det_ratio,
            self.trace_two,
            self.metric_fixes_mu,
            self.normal_chart,
            self.wedge_identity,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Largest finite-difference residual.
    pub fn max_finite_difference(&self) -> f64 {
        self.laplace_divergence.max(self.det_time_derivative)
    }
}

fn chart_point(theta: &[f64; 2]) -> Vec3 {
    let (s1, c1) = theta[0].sin_cos();
    let (s2, c2) = theta[1].sin_cos();
    Vec3::new(s1 * c2, s1 * s2, c1)
}

fn chart_tangents(theta: &[f64; 2]) -> [Vec3; 2] {
    let (s1, c1) = theta[0].sin_cos();
    let (s2, c2) = theta[1].sin_cos();
    [
        Vec3::new(c1 * c2, c1 * s2, -s1),
        Vec3::new(-s1 * s2, s1 * c2, 0.0),
    ]
}

fn invert_2x2(m: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ]
}

fn first_fundamental(t: &[Vec3; 2]) -> [[f64; 2]; 2] {
    [
        [t[0].dot(&t[0]), t[0].dot(&t[1])],
        [t[1].dot(&t[0]), t[1].dot(&t[1])],
    ]
}

/// Ambient-route metric state at a chart point.
fn state_at(embedding: &LinearEmbedding, theta: &[f64; 2], t: f64) -> Result<MetricState> {
    let p = chart_point(theta);
    let proj = Mat3::identity() - p * p.transpose();
    let grad_x = proj * embedding.matrix_at(t).transpose();
    metric_tensor(&grad_x, &p)
}

/// Evaluates all identity residuals and reports the maxima over samples.
pub fn identity_suite(
    embedding: &LinearEmbedding,
    samples: &[ChartSample],
) -> Result<IdentityReport> {
    let mut report = IdentityReport::default();
    for sample in samples {
        let local = sample_residuals(embedding, sample)?;
        report.absorb(&local);
    }
    Ok(report)
}

fn sample_residuals(embedding: &LinearEmbedding, sample: &ChartSample) -> Result<IdentityReport> {
    let theta = sample.theta;
    let t = sample.t;
    let p = chart_point(&theta);
    let mu = p;
    let a_mat = embedding.matrix_at(t);

    let state = state_at(embedding, &theta, t)?;

    // Chart-route quantities.
    let phi_t = chart_tangents(&theta);
    let x_t = [a_mat * phi_t[0], a_mat * phi_t[1]];
    let h = first_fundamental(&phi_t);
    let g = first_fundamental(&x_t);
    let h_inv = invert_2x2(h);
    let g_inv = invert_2x2(g);
    let det_h = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let det_g = g[0][0] * g[1][1] - g[0][1] * g[1][0];

    let mut metric_chart: f64 = 0.0;
    let mut inverse_chart: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let mut entry = mu[i] * mu[j];
            for r in 0..2 {
                for s in 0..2 {
                    for pp in 0..2 {
                        for q in 0..2 {
                            entry += h_inv[r][s] * h_inv[pp][q] * g[r][pp]
                                * phi_t[s][i]
                                * phi_t[q][j];
                        }
                    }
                }
            }
            metric_chart = metric_chart.max((state.g[(i, j)] - entry).abs());

            let mut inv_entry = mu[i] * mu[j];
            for k in 0..2 {
                for l in 0..2 {
                    inv_entry += g_inv[k][l] * phi_t[k][i] * phi_t[l][j];
                }
            }
            inverse_chart = inverse_chart.max((state.g_inv[(i, j)] - inv_entry).abs());
        }
    }

    let det_ratio = (state.g.determinant() - det_g / det_h).abs();
    let trace_two = ((state.g_inv * state.grad_x)
        .component_mul(&state.grad_x)
        .sum()
        - 2.0)
        .abs();
    let metric_fixes_mu = (state.g * mu - mu).norm();

    let chart_normal = x_t[0].cross(&x_t[1]).normalize();
    let normal_chart = (state.nu - chart_normal).norm();

    let mut wedge_identity: f64 = 0.0;
    for (i, l) in [(1, 2), (1, 3), (2, 3)] {
        wedge_identity = wedge_identity.max(lemma2_residual(&state, i, l).norm());
    }

    let laplace_divergence = laplace_residual(embedding, &theta, t)?;
    let det_time_derivative = dtdet_residual(embedding, &theta, t)?;

    Ok(IdentityReport {
        metric_chart,
        inverse_chart,
        det_ratio,
        trace_two,
        metric_fixes_mu,
        normal_chart,
        wedge_identity,
        laplace_divergence,
        det_time_derivative,
    })
}

/// Central difference of a chart-scalar in one chart direction.
fn chart_fd(f: impl Fn(&[f64; 2]) -> f64, theta: &[f64; 2], k: usize) -> f64 {
    let mut plus = *theta;
    let mut minus = *theta;
    plus[k] += THETA_STEP;
    minus[k] -= THETA_STEP;
    (f(&plus) - f(&minus)) / (2.0 * THETA_STEP)
}

/// Tangential gradient of a chart-scalar at `theta`:
/// `grad_M f = h^{kl} (df/dtheta_k) phi_{theta_l}`.
fn tangential_gradient(f: impl Fn(&[f64; 2]) -> f64 + Copy, theta: &[f64; 2]) -> Vec3 {
    let phi_t = chart_tangents(theta);
    let h_inv = invert_2x2(first_fundamental(&phi_t));
    let mut grad = Vec3::zeros();
    for k in 0..2 {
        let df = chart_fd(f, theta, k);
        for l in 0..2 {
            grad += h_inv[k][l] * df * phi_t[l];
        }
    }
    grad
}

/// Residual of the divergence-form Laplace-Beltrami identity: the ambient
/// route `(1/sqrt(det G)) D_i (G^{ij'} D_j' x sqrt(det G))` against the
/// chart Laplacian of the embedding, both by central differences.
fn laplace_residual(embedding: &LinearEmbedding, theta: &[f64; 2], t: f64) -> Result<f64> {
    let state = state_at(embedding, theta, t)?;

    // Ambient route: F = G^{-1} grad x sqrt(det G), row-divergence per
    // component, with tangential derivatives taken through the chart.
    let f_matrix = |th: &[f64; 2]| -> Result<Mat3> {
        let s = state_at(embedding, th, t)?;
        Ok(s.g_inv * s.grad_x * s.sqrt_det_g)
    };
    let mut divergence = Vec3::zeros();
    for j in 0..3 {
        for i in 0..3 {
            let scalar = |th: &[f64; 2]| f_matrix(th).map(|m| m[(i, j)]).unwrap_or(f64::NAN);
            divergence[j] += tangential_gradient(scalar, theta)[i];
        }
    }
    let ambient = divergence / state.sqrt_det_g;

    // Chart route: (1/sqrt(det g)) d_k (g^{kl} X_l sqrt(det g)).
    let chart_term = |th: &[f64; 2], k: usize| -> Vec3 {
        let phi_t = chart_tangents(th);
        let a = embedding.matrix_at(t);
        let x_t = [a * phi_t[0], a * phi_t[1]];
        let g = first_fundamental(&x_t);
        let g_inv = invert_2x2(g);
        let det_g = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        (g_inv[k][0] * x_t[0] + g_inv[k][1] * x_t[1]) * det_g.sqrt()
    };
    let mut chart_lap = Vec3::zeros();
    for k in 0..2 {
        let mut plus = *theta;
        let mut minus = *theta;
        plus[k] += THETA_STEP;
        minus[k] -= THETA_STEP;
        chart_lap += (chart_term(&plus, k) - chart_term(&minus, k)) / (2.0 * THETA_STEP);
    }
    let phi_t = chart_tangents(theta);
    let a = embedding.matrix_at(t);
    let x_t = [a * phi_t[0], a * phi_t[1]];
    let g = first_fundamental(&x_t);
    let det_g = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let chart = chart_lap / det_g.sqrt();

    Ok((ambient - chart).amax())
}

/// Residual of `d/dt sqrt(det G) = G^{-1} grad x : grad x_t sqrt(det G)`.
fn dtdet_residual(embedding: &LinearEmbedding, theta: &[f64; 2], t: f64) -> Result<f64> {
    let state = state_at(embedding, theta, t)?;
    let p = chart_point(theta);
    let proj = Mat3::identity() - p * p.transpose();
    let grad_x_t = proj * embedding.matrix_dt_at(t).transpose();
    let closed_form = (state.g_inv * state.grad_x)
        .component_mul(&grad_x_t)
        .sum()
        * state.sqrt_det_g;

    let plus = state_at(embedding, theta, t + TIME_STEP)?.sqrt_det_g;
    let minus = state_at(embedding, theta, t - TIME_STEP)?.sqrt_det_g;
    let fd = (plus - minus) / (2.0 * TIME_STEP);
    Ok((fd - closed_form).abs())
}

/// The divergence-form mean curvature vector at a chart point, exposed for
/// comparison against closed-form curvatures.
pub fn divergence_form_laplacian(
    embedding: &LinearEmbedding,
    theta: &[f64; 2],
    t: f64,
) -> Result<Vec3> {
    let state = state_at(embedding, theta, t)?;
    let f_matrix = |th: &[f64; 2]| -> Result<Mat3> {
        let s = state_at(embedding, th, t)?;
        Ok(s.g_inv * s.grad_x * s.sqrt_det_g)
    };
    let mut divergence = Vec3::zeros();
    for j in 0..3 {
        for i in 0..3 {
            let scalar = |th: &[f64; 2]| f_matrix(th).map(|m| m[(i, j)]).unwrap_or(f64::NAN);
            divergence[j] += tangential_gradient(scalar, theta)[i];
        }
    }
    Ok(divergence / state.sqrt_det_g)
}
