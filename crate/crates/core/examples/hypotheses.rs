//! Sampling the kernel hypotheses, with the fitted decay exponents.

use conekit::geometry::DomainSpec;
use conekit::kernels::{verify_hypotheses, GreenKernel, Hypothesis, VerifyConfig};

fn main() -> conekit::Result<()> {
    let cfg = VerifyConfig { samples: 1000, seed: 7, ..Default::default() };
    let cases = [
        ("half-space", DomainSpec::half_space_k(3, 1)?, Hypothesis::H1),
        ("quarter-space", DomainSpec::half_space_k(3, 2)?, Hypothesis::H2),
        ("quarter-ball", DomainSpec::ball_k(3, 2, 1.0)?, Hypothesis::H2t),
        ("half-space", DomainSpec::half_space_k(3, 1)?, Hypothesis::H3),
        ("ball", DomainSpec::ball([0.0; 3], 1.0)?, Hypothesis::H3),
    ];
    for (name, dom, which) in cases {
        let k = GreenKernel::new(1.0, dom)?;
        let r = verify_hypotheses(&k, which, &cfg)?;
        println!(
            "{:<4} {name:<13}: pass {} margin {:.2e} theta {:?} expected {:?}",
            r.hypothesis, r.pass, r.min_margin, r.theta_fit, r.theta_expected
        );
    }
    Ok(())
}
