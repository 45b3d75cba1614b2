//! Run configuration: validated parameters, flat key=value config files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::fem::GeometryMode;
use crate::{Error, Result};

/// Which initial surface the flow starts from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceChoice {
    /// Sphere of radius `r0` (exact solution available).
    Sphere { r0: f64 },
    /// The dumbbell level set.
    Dumbbell,
}

/// Time discretization of the flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// First order: one implicit solve per step.
    Euler,
    /// Second order: half-step predictor plus trapezoidal corrector.
    Midpoint,
}

/// Everything one flow needs; parsed from files and flags.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub surface: SurfaceChoice,
    /// Icosphere refinement level of the reference mesh.
    pub level: usize,
    /// Element order `k` (1 or 2).
    pub order: usize,
    pub alpha: f64,
    pub tau: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub mode: GeometryMode,
    pub quad_assembly: usize,
    pub quad_error: usize,
    pub out_dir: Option<PathBuf>,
    /// Write a VTK snapshot every this many steps (0 disables snapshots).
    pub snapshot_every: usize,
    pub solver_tol: f64,
    /// Record wall-clock times; off by default so repeated runs emit
    /// bit-identical CSV.
    pub timing: bool,
}

impl RunConfig {
    /// Defaults mirroring the numerical studies: `k = 2`, `alpha = 0.1`,
    /// assembly quadrature `2k`, error quadrature 8.
    pub fn new(surface: SurfaceChoice) -> Self {
        Self {
            surface,
            level: 3,
            order: 2,
            alpha: 0.1,
            tau: 1e-3,
            t_end: 0.2,
            scheme: Scheme::Midpoint,
            mode: GeometryMode::Lifted,
            quad_assembly: 4,
            quad_error: 8,
            out_dir: None,
            snapshot_every: 0,
            solver_tol: 1e-10,
            timing: false,
        }
    }

    pub fn sphere(r0: f64) -> Self {
        Self::new(SurfaceChoice::Sphere { r0 })
    }

    pub fn dumbbell() -> Self {
        let mut config = Self::new(SurfaceChoice::Dumbbell);
        config.scheme = Scheme::Euler;
        config.tau = 1e-4;
        config.t_end = 0.05;
        config
    }

    /// Number of steps `M = T / tau`; `T / tau` must be integral.
    pub fn steps(&self) -> usize {
        (self.t_end / self.tau).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.tau > 0.0) {
            return fail(format!("tau must be positive, got {}", self.tau));
        }
        if !(self.t_end > 0.0) {
            return fail(format!("T must be positive, got {}", self.t_end));
        }
        let ratio = self.t_end / self.tau;
        if (ratio - ratio.round()).abs() > 1e-9 {
            return fail(format!(
                "T / tau = {ratio} is not an integer; refusing a truncated last step"
            ));
        }
        if self.order != 1 && self.order != 2 {
            return fail(format!("k must be 1 or 2, got {}", self.order));
        }
        if self.level > 8 {
            return fail(format!("refinement level {} exceeds the guard (8)", self.level));
        }
        if !(self.alpha > 0.0) {
            return fail(format!("alpha must be positive, got {}", self.alpha));
        }
        if self.quad_assembly == 0 || self.quad_assembly > 8 || self.quad_error == 0 || self.quad_error > 8 {
            return fail("quadrature degrees must lie in 1..=8".into());
        }
        if !(self.solver_tol > 0.0 && self.solver_tol < 1.0) {
            return fail(format!("solver tolerance {} out of range", self.solver_tol));
        }
        if let SurfaceChoice::Sphere { r0 } = self.surface {
            if !(r0 > 0.0) {
                return fail(format!("sphere radius must be positive, got {r0}"));
            }
            if self.t_end >= 0.25 * r0 * r0 {
                return fail(format!(
                    "T = {} reaches the sphere extinction time {}",
                    self.t_end,
                    0.25 * r0 * r0
                ));
            }
        }
        Ok(())
    }

    /// Applies one `key=value` assignment (file line or flag override).
    pub fn apply_key_value(&mut self, key: &str, value: &str) -> Result<()> {
        let invalid = |what: &str, v: &str| {
            Err(Error::InvalidConfig(format!("invalid {what}: {v:?}")))
        };
        match key {
            "surface" => match value {
                "sphere" => {
                    let r0 = match self.surface {
                        SurfaceChoice::Sphere { r0 } => r0,
                        _ => 2.0,
                    };
                    self.surface = SurfaceChoice::Sphere { r0 };
                }
                "dumbbell" => self.surface = SurfaceChoice::Dumbbell,
                _ => return invalid("surface", value),
            },
            "r0" => {
                let r0 = parse_num(key, value)?;
                self.surface = SurfaceChoice::Sphere { r0 };
            }
            "level" => self.level = parse_num::<usize>(key, value)?,
            "k" => self.order = parse_num::<usize>(key, value)?,
            "alpha" => self.alpha = parse_num(key, value)?,
            "tau" => self.tau = parse_num(key, value)?,
            "T" | "t_end" => self.t_end = parse_num(key, value)?,
            "scheme" | "order" => match value {
                "euler" | "1" => self.scheme = Scheme::Euler,
                "midpoint" | "2" => self.scheme = Scheme::Midpoint,
                _ => return invalid("scheme", value),
            },
            "mode" => match value {
                "lifted" => self.mode = GeometryMode::Lifted,
                "simplified" => self.mode = GeometryMode::Simplified,
                _ => return invalid("mode", value),
            },
            "quad_assembly" => self.quad_assembly = parse_num(key, value)?,
            "quad_error" => self.quad_error = parse_num(key, value)?,
            "out" => self.out_dir = Some(PathBuf::from(value)),
            "snapshot_every" => self.snapshot_every = parse_num(key, value)?,
            "solver_tol" => self.solver_tol = parse_num(key, value)?,
            "timing" => match value {
                "true" | "1" => self.timing = true,
                "false" | "0" => self.timing = false,
                _ => return invalid("timing", value),
            },
            _ => {
                return Err(Error::InvalidConfig(format!("unknown config key {key:?}")));
            }
        }
        Ok(())
    }

    /// Reads a flat `key=value` file (blank lines and `#` comments allowed).
    pub fn from_file(path: &Path) -> Result<Self> {
        let mut config = Self::sphere(2.0);
        config.merge_file(path)?;
        Ok(config)
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        for (number, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected key=value", number + 1))
            })?;
            self.apply_key_value(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// The full configuration as a reusable key=value echo.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        match self.surface {
            SurfaceChoice::Sphere { r0 } => {
                let _ = writeln!(out, "surface=sphere");
                let _ = writeln!(out, "r0={r0}");
            }
            SurfaceChoice::Dumbbell => {
                let _ = writeln!(out, "surface=dumbbell");
            }
        }
        let _ = writeln!(out, "level={}", self.level);
        let _ = writeln!(out, "k={}", self.order);
        let _ = writeln!(out, "alpha={}", self.alpha);
        let _ = writeln!(out, "tau={}", self.tau);
        let _ = writeln!(out, "T={}", self.t_end);
        let _ = writeln!(
            out,
            "scheme={}",
            match self.scheme {
                Scheme::Euler => "euler",
                Scheme::Midpoint => "midpoint",
            }
        );
        let _ = writeln!(
            out,
            "mode={}",
            match self.mode {
                GeometryMode::Lifted => "lifted",
                GeometryMode::Simplified => "simplified",
            }
        );
        let _ = writeln!(out, "quad_assembly={}", self.quad_assembly);
        let _ = writeln!(out, "quad_error={}", self.quad_error);
        if let Some(dir) = &self.out_dir {
            let _ = writeln!(out, "out={}", dir.display());
        }
        let _ = writeln!(out, "snapshot_every={}", self.snapshot_every);
        let _ = writeln!(out, "solver_tol={}", self.solver_tol);
        let _ = writeln!(out, "timing={}", self.timing);
        out
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("cannot parse {key}={value:?}")))
}
