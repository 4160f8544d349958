//! The biharmonic Navier kernel of the unit ball in R^4 as an iterated Laplace kernel.

use conekit::geometry::DomainSpec;
use conekit::kernels::{green_iterated, GreenKernel, Kernel};
use conekit::quadrature::quadrature_for;

fn main() -> conekit::Result<()> {
    let dom = DomainSpec::ball([0.0; 4], 1.0)?;
    let base = GreenKernel::new(1.0, dom.clone())?;
    let g2 = green_iterated(base, 2, quadrature_for(&dom, 16)?)?;
    let c = 1.0 / (4.0 * std::f64::consts::PI.powi(2));
    for r in [0.25f64, 0.5, 0.8] {
        let x = [r, 0.0, 0.0, 0.0];
        let exact = c * (-0.5 * r.ln() + (r * r - 1.0) / 8.0);
        println!("r = {r}: G2(x, 0) = {:.8} closed form {exact:.8}", g2.eval(&x, &[0.0; 4])?);
    }
    Ok(())
}
