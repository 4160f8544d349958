//! Image Green kernels on half-spaces, balls and their exteriors.

use conekit::geometry::DomainSpec;
use conekit::kernels::{half_line_half, GreenKernel, Kernel};

fn main() -> conekit::Result<()> {
    let x = [0.4, 0.3, 0.2];
    let y = [0.9, 0.1, 0.5];
    for (name, dom) in [
        ("free space", DomainSpec::free_space(3)),
        ("half-space", DomainSpec::half_space_k(3, 1)?),
        ("quarter-space", DomainSpec::half_space_k(3, 2)?),
        ("octant", DomainSpec::half_space_k(3, 3)?),
    ] {
        let k = GreenKernel::new(1.0, dom)?;
        println!("{name:>14}: G(x, y) = {:.6e}", k.eval(&x, &y)?);
    }

    let ball = GreenKernel::new(1.0, DomainSpec::ball([0.0; 3], 1.0)?)?;
    let ext = GreenKernel::new(1.0, DomainSpec::exterior_ball_k(3, 0, 1.0)?)?;
    println!("ball: {:.6e}", ball.eval(&[0.2, 0.0, 0.0], &[0.0, 0.5, 0.0])?);
    println!("exterior: {:.6e}", ext.eval(&[2.0, 0.0, 0.0], &[0.0, 1.5, 0.0])?);
    // vanishes on the sphere
    println!("ball at |y| = 1: {:.1e}", ball.eval(&[0.2, 0.0, 0.0], &[0.6, 0.8, 0.0])?);

    // fractional order on a long interval approaches the half-line kernel
    for r in [1e2, 1e3, 1e4] {
        let k = GreenKernel::new(0.5, DomainSpec::interval(0.0, 2.0 * r)?)?;
        let diff = k.eval(&[1.0], &[2.0])? - half_line_half(1.0, 1.0, 2.0);
        println!("interval (0, {:.0e}): G - G_half-line = {diff:.3e}", 2.0 * r);
    }
    Ok(())
}
