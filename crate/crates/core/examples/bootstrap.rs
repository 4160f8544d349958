//! The exponent recurrence on either side of the critical power.

use conekit::scaling_spheres::{bootstrap, BootstrapDirection, ExponentParams};

fn main() -> conekit::Result<()> {
    for p in [1.0, 2.0, 4.9, 5.0, 5.1, 7.0] {
        let params = ExponentParams::new(3, 1.0, 0.0, p)?;
        let run = bootstrap(&params, -0.5, BootstrapDirection::DilateOutward, 40)?;
        println!(
            "p = {p:<4} p_c = {} verdict {:?} mu_40 = {:.3e}",
            params.p_critical()?,
            run.verdict,
            run.sequence[40]
        );
    }
    Ok(())
}
