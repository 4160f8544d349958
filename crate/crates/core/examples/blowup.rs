//! Blowing up polygons at boundary points and comparing with their tangent cones.

use conekit::blowup::{bcb_check, limit_cone, AnchorPath};
use conekit::geometry::DomainSpec;

fn main() -> conekit::Result<()> {
    let square = DomainSpec::polygon(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])?;
    let rhos = [1e-1, 1e-2, 1e-3, 1e-4];
    for path in [AnchorPath::Fixed, AnchorPath::Quadratic] {
        let r = bcb_check(&square, [0.0, 0.0], &rhos, path, 100)?;
        for row in &r.rows {
            println!("{path:?} rho {:.0e}: hausdorff {:.3e}", row.rho, row.hausdorff);
        }
        println!("{path:?} slope {:?}", r.slope);
    }
    let l = DomainSpec::polygon(vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]])?;
    for x0 in [[1.0, 1.0], [0.0, 0.0], [1.0, 0.0]] {
        let cone = limit_cone(&l, x0)?;
        println!("L-shape at {x0:?}: angle {:.6} (π × {:.3})", cone.angle, cone.angle / std::f64::consts::PI);
    }
    Ok(())
}
