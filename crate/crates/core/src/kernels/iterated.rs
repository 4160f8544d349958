use super::{GreenKernel, Kernel};
use crate::error::{invalid, Result};
use crate::geometry::DomainSpec;
use crate::quadrature::QuadratureRule;

/// `G^k(x, y) = ∫_Ω G¹(x, z) G^{k-1}(z, y) dz`, evaluated by nested singular quadrature.
#[derive(Clone, Debug)]
pub struct IteratedKernel {
    pub base: GreenKernel,
    pub steps: usize,
    pub rule: QuadratureRule,
}

/// Builds the `steps`-fold composition of a second-order Green kernel.
pub fn green_iterated(base: GreenKernel, steps: usize, rule: QuadratureRule) -> Result<IteratedKernel> {
    if base.s != 1.0 {
        return Err(invalid("iterated kernels start from an s = 1 Green function"));
    }
    if steps == 0 {
        return Err(invalid("steps must be at least 1"));
    }
    if rule.domain != base.domain {
        return Err(invalid("quadrature rule and kernel live on different domains"));
    }
    Ok(IteratedKernel { base, steps, rule })
}

impl IteratedKernel {
    fn level(&self, k: usize, x: &[f64], y: &[f64]) -> f64 {
        if k == 1 {
            return self.base.eval_raw(x, y);
        }
        self.rule.integrate_two_point(
            |z| {
                if z == x || z == y {
                    return 0.0;
                }
                self.base.eval_raw(x, z) * self.level(k - 1, z, y)
            },
            x,
            y,
        )
    }
}

impl Kernel for IteratedKernel {
    fn domain(&self) -> &DomainSpec {
        &self.base.domain
    }

    fn order(&self) -> f64 {
        self.steps as f64
    }

    fn eval_raw(&self, x: &[f64], y: &[f64]) -> f64 {
        self.level(self.steps, x, y)
    }

    fn factors(&self) -> Option<(&GreenKernel, usize)> {
        Some((&self.base, self.steps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::quadrature_for;
    use std::f64::consts::PI;

    #[test]
    fn navier_biharmonic_ball() {
        let ball = DomainSpec::ball([0.0; 4], 1.0).unwrap();
        let base = GreenKernel::new(1.0, ball.clone()).unwrap();
        let rule = quadrature_for(&ball, 16).unwrap();
        let g2 = green_iterated(base, 2, rule).unwrap();
        let c = 1.0 / (4.0 * PI * PI);
        for r in [0.25, 0.5, 0.8] {
            let exact = c * (-0.5 * f64::ln(r) + (r * r - 1.0) / 8.0);
            let got = g2.eval(&[r, 0.0, 0.0, 0.0], &[0.0; 4]).unwrap();
            assert!((got / exact - 1.0).abs() < 1e-4, "r={r}: {got} vs {exact}");
        }
        assert_eq!(g2.order(), 2.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let ball = DomainSpec::ball([0.0; 3], 1.0).unwrap();
        let base = GreenKernel::new(1.0, ball.clone()).unwrap();
        let rule = quadrature_for(&ball, 4).unwrap();
        assert!(green_iterated(base.clone(), 0, rule.clone()).is_err());
        let other = quadrature_for(&DomainSpec::ball([0.0; 3], 2.0).unwrap(), 4).unwrap();
        assert!(green_iterated(base, 2, other).is_err());
    }
}
