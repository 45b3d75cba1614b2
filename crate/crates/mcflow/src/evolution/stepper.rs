//! The time-stepping driver: state, single steps, and full runs with
//! diagnostics and pinch-off handling.

use std::time::Instant;

use crate::diagnostics::{
    exact_sphere, relative_errors, sigma_max, surface_area, vtk_snapshot_name, write_csv,
    write_vtk, DiagnosticsRecord, ErrorParts,
};
use crate::fem::{FeVectorField, QuadContext};
use crate::geometry::{
    build_icosphere, initial_embedding, EmbeddingTarget, PolyhedralMesh, ReferenceSurface,
};
use crate::kernel::{assemble_euler_step, assemble_midpoint_steps, AssemblyWorkspace};
use crate::{Error, Result};

use super::config::{RunConfig, Scheme, SurfaceChoice};
use super::solver::solve_linear;

/// Positions and cached smoothed normal at one time level `t^m = m tau`.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub time: f64,
    pub step_index: usize,
    pub positions: FeVectorField,
    pub nu_hat: FeVectorField,
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Completed,
    /// A degenerate element stopped the flow; `t_pinch` is the last valid
    /// time level.
    PinchOff { t_pinch: f64 },
}

/// Final state plus the full diagnostics stream.
#[derive(Debug)]
pub struct RunOutcome {
    pub final_state: FlowState,
    pub records: Vec<DiagnosticsRecord>,
    pub termination: Termination,
}

impl RunOutcome {
    pub fn error_triple(&self) -> crate::diagnostics::ErrorTriple {
        let mut triple = crate::diagnostics::ErrorTriple::default();
        for r in &self.records {
            triple.update(&r.errors);
        }
        triple
    }
}

/// Mesh, workspace and error tables of one configured flow.
pub struct FlowDriver {
    config: RunConfig,
    surface: ReferenceSurface,
    mesh: PolyhedralMesh,
    workspace: AssemblyWorkspace,
    error_ctx: QuadContext,
}

impl FlowDriver {
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        // The reference surface is always the unit sphere; the initial
        // surface enters through the embedding.
        let surface = ReferenceSurface::unit_sphere();
        let mesh = build_icosphere(config.level);
        let workspace = AssemblyWorkspace::new(
            &surface,
            &mesh,
            config.order,
            config.mode,
            config.quad_assembly,
            config.alpha,
        )?;
        let error_ctx = QuadContext::build(
            &surface,
            &mesh,
            config.order,
            config.mode,
            config.quad_error,
        )?;
        Ok(Self {
            config,
            surface,
            mesh,
            workspace,
            error_ctx,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn mesh(&self) -> &PolyhedralMesh {
        &self.mesh
    }

    pub fn surface(&self) -> &ReferenceSurface {
        &self.surface
    }

    pub fn workspace(&self) -> &AssemblyWorkspace {
        &self.workspace
    }

    /// Interpolates the initial surface and its smoothed normal.
    pub fn initial_state(&self) -> Result<FlowState> {
        let target = match self.config.surface {
            SurfaceChoice::Sphere { r0 } => EmbeddingTarget::Sphere { radius: r0 },
            SurfaceChoice::Dumbbell => EmbeddingTarget::dumbbell(),
        };
        let positions =
            initial_embedding(&target, &self.surface, &self.mesh, self.config.order)?;
        let nu_hat = self.workspace.smoothed_normal(&positions)?;
        Ok(FlowState {
            time: 0.0,
            step_index: 0,
            positions,
            nu_hat,
        })
    }

    /// Advances one time step with the configured scheme.
    pub fn step(&self, state: &FlowState) -> Result<FlowState> {
        let tau = self.config.tau;
        let tol = self.config.solver_tol;
        let positions = match self.config.scheme {
            Scheme::Euler => {
                let system =
                    assemble_euler_step(&self.workspace, &state.positions, &state.nu_hat, tau)?;
                FeVectorField::from_flat(
                    self.config.order,
                    &solve_linear(&system.matrix, &system.rhs, tol)?,
                )
            }
            Scheme::Midpoint => {
                let (half, corrector) = assemble_midpoint_steps(
                    &self.workspace,
                    &state.positions,
                    &state.nu_hat,
                    tau,
                )?;
                let x_half = FeVectorField::from_flat(
                    self.config.order,
                    &solve_linear(&half.matrix, &half.rhs, tol)?,
                );
                let system = corrector(&x_half)?;
                FeVectorField::from_flat(
                    self.config.order,
                    &solve_linear(&system.matrix, &system.rhs, tol)?,
                )
            }
        };
        if positions.coefficients().iter().any(|c| !c.x.is_finite() || !c.y.is_finite() || !c.z.is_finite()) {
            return Err(Error::SolverDiverged {
                iterations: 0,
                residual: f64::NAN,
            });
        }
        let nu_hat = self.workspace.smoothed_normal(&positions)?;
        Ok(FlowState {
            time: state.time + tau,
            step_index: state.step_index + 1,
            positions,
            nu_hat,
        })
    }

    /// Diagnostics row for a state (errors only when an exact solution
    /// exists).
    pub fn record(&self, state: &FlowState, cpu_s: f64) -> Result<DiagnosticsRecord> {
        let errors = match self.config.surface {
            SurfaceChoice::Sphere { r0 } => {
                let exact = exact_sphere(r0, state.time)?;
                relative_errors(&state.positions, &exact, &self.error_ctx)
            }
            SurfaceChoice::Dumbbell => ErrorParts::default(),
        };
        Ok(DiagnosticsRecord {
            t: state.time,
            errors,
            sigma_max: sigma_max(&state.positions, &self.mesh)?,
            area: surface_area(&state.positions, &self.error_ctx)?,
            cpu_s,
        })
    }
}

/// Advances one step of a configured flow (thin wrapper over
/// [`FlowDriver::step`]).
pub fn step(driver: &FlowDriver, state: &FlowState) -> Result<FlowState> {
    driver.step(state)
}

fn is_pinch(err: &Error) -> bool {
    matches!(err, Error::DegenerateMetric { .. } | Error::ZeroAverage { .. })
}

/// Runs a configured flow to `T` or pinch-off, invoking the observer with
/// every diagnostics record (the initial state included), writing CSV and
/// optional VTK snapshots when an output directory is set.
pub fn run(
    config: RunConfig,
    mut observer: impl FnMut(&DiagnosticsRecord),
) -> Result<RunOutcome> {
    let driver = FlowDriver::new(config)?;
    let config = driver.config().clone();
    if let Some(dir) = &config.out_dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("config_used.txt"), config.echo())?;
    }

    let mut state = driver.initial_state()?;
    let mut records = Vec::with_capacity(config.steps() + 1);
    let mut cpu_s = 0.0;
    let record = driver.record(&state, cpu_s)?;
    observer(&record);
    records.push(record);
    snapshot(&config, &driver, &state)?;

    let mut termination = Termination::Completed;
    for _ in 0..config.steps() {
        let started = config.timing.then(Instant::now);
        match driver.step(&state) {
            Ok(next) => {
                if let Some(start) = started {
                    cpu_s += start.elapsed().as_secs_f64();
                }
                state = next;
                let record = driver.record(&state, cpu_s)?;
                observer(&record);
                records.push(record);
                snapshot(&config, &driver, &state)?;
            }
            Err(err) if is_pinch(&err) => {
                termination = Termination::PinchOff {
                    t_pinch: state.time,
                };
                break;
            }
            Err(err) => return Err(err),
        }
    }

    if let Some(dir) = &config.out_dir {
        write_csv(&records, &dir.join("diagnostics.csv"))?;
    }
    Ok(RunOutcome {
        final_state: state,
        records,
        termination,
    })
}

fn snapshot(config: &RunConfig, driver: &FlowDriver, state: &FlowState) -> Result<()> {
    let Some(dir) = &config.out_dir else {
        return Ok(());
    };
    if config.snapshot_every == 0 || state.step_index % config.snapshot_every != 0 {
        return Ok(());
    }
    write_vtk(
        &state.positions,
        driver.mesh(),
        &dir.join(vtk_snapshot_name(state.step_index)),
    )
}
