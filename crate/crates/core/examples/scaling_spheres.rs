//! Kelvin comparison functions and the critical scale of a sphere sweep.

use conekit::point::dot;
use conekit::scaling_spheres::{find_lambda0, kelvin_invariant_profile, log_radial_samples, omega_at, SweepDirection};
use conekit::FnField;

fn main() -> conekit::Result<()> {
    let p = [0.0; 3];
    let inv = FnField::new(3, |x: &[f64]| kelvin_invariant_profile(3, 1.0, &[0.0; 3], x));
    let worst = log_radial_samples(&p, 1e-3, 0.999, 500)
        .iter()
        .map(|x| omega_at(&inv, &p, 1.0, 1.0, x).map(f64::abs))
        .try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))?;
    println!("invariant profile: max |ω| = {worst:.1e}");

    let gauss = FnField::new(3, |x: &[f64]| (-dot(x, x)).exp());
    let samples = log_radial_samples(&p, 0.05, 5.0, 400);
    for step in [0.1, 0.01] {
        let grid: Vec<f64> = (1..).map(|i| i as f64 * step).take_while(|l| *l <= 3.0).collect();
        let r = find_lambda0(&gauss, &samples, &p, 1.0, SweepDirection::Dilate, &grid)?;
        println!("gaussian, step {step}: λ0 = {:.3}, first failure {:?}", r.lambda0, r.first_failure);
    }
    Ok(())
}
