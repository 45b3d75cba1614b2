use mcflow::evolution::solve_linear;
use mcflow::fem::{interpolate, FeVectorField, GeometryMode};
use mcflow::geometry::{build_icosphere, ReferenceSurface};
use mcflow::kernel::{assemble_euler_step, AssemblyWorkspace};

fn main() {
    let s = ReferenceSurface::unit_sphere();
    let mesh = build_icosphere(1);
    let ws = AssemblyWorkspace::new(&s, &mesh, 2, GeometryMode::Lifted, 4, 0.1).unwrap();
    let x = interpolate(|p| 2.0 * p, &s, &mesh, 2).unwrap();
    let nu = ws.smoothed_normal(&x).unwrap();
    // check nu quality
    let mut worst = 0.0f64;
    for dof in 0..mesh.dof_count(2) {
        let p = s.closest_point(&mesh.node_position(2, dof)).unwrap();
        worst = worst.max((nu.coefficient(dof) - p).norm());
    }
    println!("nu_hat max error vs mu: {worst:.3e}");

    let tau = 1e-4;
    let (mass, stiff) = ws.assemble_forms(&x, &nu).unwrap();
    let xf = x.to_flat();
    let wx = stiff.mul_vec(&xf);
    println!("||W x|| = {:.6e}, <W x, x> = {:.6e}", wx.norm(), wx.dot(&xf));
    let mx = mass.mul_vec(&xf);
    println!("||M x|| = {:.6e}", mx.norm());

    let system = assemble_euler_step(&ws, &x, &nu, tau).unwrap();
    // dense direct solve as ground truth
    let dense = system.matrix.to_dense();
    let sol = dense.lu().solve(&system.rhs).unwrap();
    let xn = FeVectorField::from_flat(2, &sol);
    let v = mesh.vertex_count();
    let mean: f64 = (0..v).map(|i| xn.coefficient(i).norm()).sum::<f64>() / v as f64;
    println!("dense solve mean radius: {mean:.8}");

    let it = solve_linear(&system.matrix, &system.rhs, 1e-10).unwrap();
    let xn2 = FeVectorField::from_flat(2, &it);
    let mean2: f64 = (0..v).map(|i| xn2.coefficient(i).norm()).sum::<f64>() / v as f64;
    println!("bicgstab solve mean radius: {mean2:.8}");
    println!("bicgstab vs dense diff: {:.3e}", (&it - &sol).norm());
}
