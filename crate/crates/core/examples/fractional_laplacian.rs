//! The singular integral for (-Δ)^s: eigenfunctions and the torsion barrier.

use std::f64::consts::PI;

use conekit::kernels::{frac_laplacian, normalization_const, FracLapConfig, Kinks, Normalization};
use conekit::{FnField, Point};

fn main() -> conekit::Result<()> {
    let wave = FnField::new(1, |x: &[f64]| (2.0 * PI * x[0]).cos());
    let cycles = FracLapConfig { normalization: Normalization::PaperCycles, far_mean: Some(0.0), ..Default::default() };
    for s in [0.3, 0.5, 0.7] {
        let v = frac_laplacian(&wave, s, &[0.1], &cycles)?;
        println!("s = {s}: (-Δ)^s cos(2πx) / cos(2πx) at 0.1 = {:.8}", v / (0.2 * PI).cos());
    }
    println!("C(1/2, 1) = {:.10} vs 1/(2π²) = {:.10}", normalization_const(0.5, 1, Normalization::PaperCycles)?, 0.5 / (PI * PI));

    let zeta = FnField::new(1, |x: &[f64]| (1.0 - x[0] * x[0]).max(0.0).sqrt());
    let cfg = FracLapConfig {
        far_mean: Some(0.0),
        kinks: Kinks::Sphere { center: Point::zeros(1), radius: 1.0 },
        ..Default::default()
    };
    for x in [0.0, 0.3, 0.6, 0.9] {
        println!("(-Δ)^(1/2) (1 - x²)^(1/2) at {x} = {:.8}", frac_laplacian(&zeta, 0.5, &[x], &cfg)?);
    }
    Ok(())
}
