//! CSV diagnostics and legacy ASCII VTK snapshots.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::fem::FeVectorField;
use crate::geometry::PolyhedralMesh;
use crate::Result;

use super::ErrorParts;

/// One row of the per-step diagnostics stream.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// Relative squared errors (zero when no exact solution is available).
    pub errors: ErrorParts,
    pub sigma_max: f64,
    pub area: f64,
    /// Wall-clock seconds of the stepping loop so far (zero unless timing
    /// was requested; timed output is not reproducible bit-for-bit).
    pub cpu_s: f64,
}

/// Decimal (positional) formatting with 12 significant digits.
pub fn format_significant(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let magnitude = value.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let mut s = format!("{value:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// Writes `diagnostics.csv` with the fixed header
/// `t,err_l2,err_h1semi,err_h1,sigma_max,area,cpu_s`.
pub fn write_csv(records: &[DiagnosticsRecord], path: &Path) -> Result<()> {
    let mut out = String::from("t,err_l2,err_h1semi,err_h1,sigma_max,area,cpu_s\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            format_significant(r.t),
            format_significant(r.errors.l2),
            format_significant(r.errors.h1_semi),
            format_significant(r.errors.h1),
            format_significant(r.sigma_max),
            format_significant(r.area),
            format_significant(r.cpu_s),
        );
    }
    fs::write(path, out)?;
    Ok(())
}

/// File name of the VTK snapshot for a step index (`mesh_%06d.vtk`).
pub fn vtk_snapshot_name(step: usize) -> String {
    format!("mesh_{step:06}.vtk")
}

/// Legacy ASCII VTK POLYDATA snapshot of the mapped vertex mesh.
pub fn write_vtk(x: &FeVectorField, mesh: &PolyhedralMesh, path: &Path) -> Result<()> {
    let v = mesh.vertex_count();
    let f = mesh.triangle_count();
    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\n");
    out.push_str("mapped surface\n");
    out.push_str("ASCII\n");
    out.push_str("DATASET POLYDATA\n");
    let _ = writeln!(out, "POINTS {v} double");
    for i in 0..v {
        let p = x.coefficient(i);
        let _ = writeln!(
            out,
            "{} {} {}",
            format_significant(p.x),
            format_significant(p.y),
            format_significant(p.z)
        );
    }
    let _ = writeln!(out, "POLYGONS {f} {}", 4 * f);
    for t in mesh.triangles() {
        let _ = writeln!(out, "3 {} {} {}", t[0], t[1], t[2]);
    }
    fs::write(path, out)?;
    Ok(())
}
