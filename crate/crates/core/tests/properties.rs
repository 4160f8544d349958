use proptest::prelude::*;

use conekit::blowup::rescale_domain;
use conekit::geometry::{kelvin_point, DomainSpec};
use conekit::kernels::{GreenKernel, Kernel};
use conekit::point::dist;
use conekit::scaling_spheres::{bootstrap, p_critical, BootstrapDirection, ExponentParams, Verdict};
use conekit::solver::{radial_nodes, KOperator, NonLinearity, SolverConfig};
use conekit::{GridFunction, Interp, Point};

fn point3() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-3.0..3.0f64)
}

proptest! {
    #[test]
    fn kelvin_is_an_involution(x in point3(), p in point3(), lam in 0.1..5.0f64) {
        prop_assume!(dist(&x, &p) > 1e-3);
        let y = kelvin_point(&x, &p, lam).unwrap();
        let z = kelvin_point(&y, &p, lam).unwrap();
        prop_assert!(dist(&z, &x) <= 1e-9 * (1.0 + dist(&x, &p)));
        let prod = dist(&x, &p) * dist(&y, &p);
        prop_assert!((prod - lam * lam).abs() <= 1e-12 * lam * lam);
    }

    #[test]
    fn green_kernels_are_symmetric(x in point3(), y in point3(), which in 0usize..4) {
        let dom = match which {
            0 => DomainSpec::half_space_k(3, 1).unwrap(),
            1 => DomainSpec::half_space_k(3, 2).unwrap(),
            2 => DomainSpec::ball([0.0; 3], 3.0).unwrap(),
            _ => DomainSpec::exterior_ball_k(3, 0, 0.5).unwrap(),
        };
        prop_assume!(dom.contains(&x) && dom.contains(&y) && dist(&x, &y) > 1e-3);
        let k = GreenKernel::new(1.0, dom).unwrap();
        let a = k.eval(&x, &y).unwrap();
        let b = k.eval(&y, &x).unwrap();
        prop_assert!(a >= 0.0);
        prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1e-300));
    }

    #[test]
    fn bootstrap_verdict_tracks_the_critical_exponent(
        n in 3usize..8,
        s in prop::sample::select(vec![0.25, 0.5, 0.75, 1.0]),
        a in 0.0..2.0f64,
        p in 1.0..12.0f64,
    ) {
        let params = ExponentParams::new(n, s, a, p).unwrap();
        let pc = p_critical(n, s, a).unwrap();
        prop_assume!((p - pc).abs() > 1e-9);
        let mu0 = -(n as f64 - 2.0 * s) / 2.0;
        let run = bootstrap(&params, mu0, BootstrapDirection::DilateOutward, 10).unwrap();
        let expect = if p < pc { Verdict::DivergesPlus } else { Verdict::DivergesMinus };
        prop_assert_eq!(run.verdict, expect);
    }

    #[test]
    fn blowup_rescalings_compose(r1 in 1e-3..1.0f64, r2 in 1e-3..1.0f64, t in 0.0..1.0f64) {
        let square = DomainSpec::polygon(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let anchor = [t, 0.0];
        let once = rescale_domain(&square, anchor, r1 * r2).unwrap();
        let twice = rescale_domain(&rescale_domain(&square, anchor, r1).unwrap(), [0.0, 0.0], r2).unwrap();
        let (conekit::geometry::DomainKind::Polygon2D { vertices: a }, conekit::geometry::DomainKind::Polygon2D { vertices: b }) =
            (&once.kind, &twice.kind) else { panic!("polygon expected") };
        for (u, v) in a.iter().zip(b) {
            let scale = u[0].abs().max(u[1].abs()).max(1.0);
            prop_assert!((u[0] - v[0]).abs() <= 1e-12 * scale && (u[1] - v[1]).abs() <= 1e-12 * scale);
        }
    }
}

fn ball_operator() -> (KOperator, NonLinearity) {
    let kernel = GreenKernel::new(1.0, DomainSpec::ball([0.0; 3], 1.0).unwrap()).unwrap();
    let nodes = radial_nodes(&[0.0; 3], 1.0, 12);
    let grid = GridFunction::new(nodes.clone(), vec![0.0; nodes.len()], Interp::RadialCubic { center: Point::zeros(3) })
        .unwrap();
    let nl = NonLinearity::new(0.5, 2.0, 0.1, Point::zeros(3)).unwrap();
    let rule = SolverConfig::default().rule_for(&kernel).unwrap();
    (KOperator::assemble(&kernel, &grid, &nl, &rule).unwrap(), nl)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn k_is_monotone(u in prop::collection::vec(0.0..2.0f64, 13), bump in prop::collection::vec(0.0..1.0f64, 13)) {
        static OP: std::sync::OnceLock<(KOperator, NonLinearity)> = std::sync::OnceLock::new();
        let (op, _) = OP.get_or_init(ball_operator);
        let n = op.len();
        let u = &u[..n];
        let v: Vec<f64> = u.iter().zip(&bump).map(|(a, b)| a + b).collect();
        let ku = op.apply(u).unwrap();
        let kv = op.apply(&v).unwrap();
        for (a, b) in ku.iter().zip(&kv) {
            prop_assert!(*b >= *a - 1e-12 * a.abs().max(1.0));
        }
    }
}
