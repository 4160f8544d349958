//! Positive solution of u = K(u²) on the unit ball, checked against radial shooting.

use conekit::geometry::DomainSpec;
use conekit::kernels::GreenKernel;
use conekit::solver::{
    barrier_constant, lower_bound_rho, picard_solve, radial_nodes, radial_shooting_oracle, torsion_grid, NonLinearity,
    SolverConfig,
};
use conekit::{Interp, Point};

fn main() -> conekit::Result<()> {
    let kernel = GreenKernel::new(1.0, DomainSpec::ball([0.0; 3], 1.0)?)?;
    let torsion = torsion_grid(3, &[0.0; 3], 1.0, radial_nodes(&[0.0; 3], 1.0, 48), Interp::RadialCubic {
        center: Point::zeros(3),
    })?;
    let init = torsion.with_values(torsion.values.iter().map(|v| 2.0 * v).collect())?;
    let nl = NonLinearity::new(0.0, 2.0, 0.0, Point::zeros(3))?;
    let out = picard_solve(&kernel, &nl, &SolverConfig::default(), &init)?;
    let oracle = radial_shooting_oracle(3, 2.0, 1.0, 4000, 101)?;
    println!(
        "{:?}: {} iterations, residual {:.2e}, sup {:.6}",
        out.scheme,
        out.iters,
        out.residual(),
        out.sup_norm()
    );
    println!("shooting u(0) = {:.6}", oracle.u0);
    println!("lower bound = {:.3}", lower_bound_rho(3, 1.0, 2.0, 2.0, barrier_constant(1.0, 3))?);

    // with a source term the minimal branch starts from zero
    let zero = init.with_values(vec![0.0; init.len()])?;
    for t in [0.01, 0.1, 1.0] {
        let nl = NonLinearity::new(0.0, 2.0, t, Point::zeros(3))?;
        let out = picard_solve(&kernel, &nl, &SolverConfig::default(), &zero)?;
        println!("t = {t}: converged {} sup {:.6}", out.converged, out.sup_norm());
    }
    Ok(())
}
