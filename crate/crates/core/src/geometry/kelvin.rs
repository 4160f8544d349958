use super::domain::Frame;
use crate::error::{invalid, Error, Result};
use crate::field::{Field, GridFunction, Interp};
use crate::point::{dist, Point};

/// Inversion `x^λ = λ²(x - P)/|x - P|² + P`.
pub fn kelvin_point(x: &[f64], p: &[f64], lambda: f64) -> Result<Point> {
    if x.len() != p.len() {
        return Err(invalid("dimension mismatch"));
    }
    if !(lambda > 0.0) {
        return Err(invalid("λ must be positive"));
    }
    let r2: f64 = x.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum();
    if r2 == 0.0 {
        return Err(Error::Domain(
            "Kelvin inversion is singular at its center".into(),
        ));
    }
    let f = lambda * lambda / r2;
    Ok(Point(
        x.iter().zip(p).map(|(a, b)| f * (a - b) + b).collect(),
    ))
}

/// Negates the frame coordinates of `y - P` listed in `subset` (0-based).
pub fn signed_reflection(y: &[f64], subset: &[usize], frame: &Frame, p: &[f64]) -> Result<Point> {
    let n = y.len();
    if p.len() != n || frame.dim() != n {
        return Err(invalid("dimension mismatch"));
    }
    if let Some(&i) = subset.iter().find(|&&i| i >= n) {
        return Err(invalid(format!("reflection index {i} out of range")));
    }
    let v: Vec<f64> = y.iter().zip(p).map(|(a, b)| a - b).collect();
    let mut out = Point::new(y);
    for &i in subset {
        let a = &frame.axes[i];
        let c: f64 = a.iter().zip(&v).map(|(ai, vi)| ai * vi).sum();
        for k in 0..n {
            out[k] -= 2.0 * c * a[k];
        }
    }
    Ok(out)
}

/// Lazily evaluated `u_λ(x) = (λ/|x - P|)^{order_exp} u(x^λ)`; `NaN` at `P`.
pub struct KelvinField<F> {
    pub u: F,
    pub center: Point,
    pub lambda: f64,
    pub order_exp: f64,
}

impl<F: Field> KelvinField<F> {
    pub fn new(u: F, center: impl Into<Point>, lambda: f64, order_exp: f64) -> Self {
        KelvinField {
            u,
            center: center.into(),
            lambda,
            order_exp,
        }
    }

    pub fn try_eval(&self, x: &[f64]) -> Result<f64> {
        let xl = kelvin_point(x, &self.center, self.lambda)?;
        let w = if self.order_exp == 0.0 {
            1.0
        } else {
            (self.lambda / dist(x, &self.center)).powf(self.order_exp)
        };
        Ok(w * self.u.eval(&xl))
    }
}

impl<F: Field> Field for KelvinField<F> {
    fn dim(&self) -> usize {
        self.u.dim()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        self.try_eval(x).unwrap_or(f64::NAN)
    }
}

/// `u_λ` sampled on the nodes of `u` with the same interpolation rule; `u` is read at the
/// reflected nodes through its interpolant.
pub fn kelvin_pullback(
    u: &GridFunction,
    p: &[f64],
    lambda: f64,
    order_exp: f64,
) -> Result<GridFunction> {
    kelvin_pullback_at(u, p, lambda, order_exp, u.nodes.clone(), u.interp.clone())
}

/// `u_λ` sampled at `targets`.
pub fn kelvin_pullback_at(
    u: &dyn Field,
    p: &[f64],
    lambda: f64,
    order_exp: f64,
    targets: Vec<Point>,
    interp: Interp,
) -> Result<GridFunction> {
    let k = KelvinField::new(u, Point::new(p), lambda, order_exp);
    let values = targets
        .iter()
        .map(|x| k.try_eval(x))
        .collect::<Result<Vec<f64>>>()?;
    GridFunction::new(targets, values, interp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FnField;

    #[test]
    fn kelvin_examples() {
        let y = kelvin_point(&[2.0, 0.0, 0.0], &[0.0; 3], 1.0).unwrap();
        assert_eq!(&y[..], &[0.5, 0.0, 0.0]);
        let y = kelvin_point(&[1.0, 0.0], &[0.0; 2], 1.0).unwrap();
        assert_eq!(&y[..], &[1.0, 0.0]);
        let x = [0.3, -1.2, 0.7];
        let p = [1.0, 1.0, 1.0];
        let back = kelvin_point(&kelvin_point(&x, &p, 2.0).unwrap(), &p, 2.0).unwrap();
        for (a, b) in back.iter().zip(&x) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(matches!(kelvin_point(&p, &p, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn reflection_examples() {
        let id = Frame::identity(3);
        let y = [1.0, 2.0, 3.0];
        assert_eq!(
            &signed_reflection(&y, &[1], &id, &[0.0; 3]).unwrap()[..],
            &[1.0, -2.0, 3.0]
        );
        assert_eq!(&signed_reflection(&y, &[], &id, &[0.0; 3]).unwrap()[..], &y);
        assert!(signed_reflection(&y, &[3], &id, &[0.0; 3]).is_err());
    }

    #[test]
    fn pullback_examples() {
        let fundamental = FnField::new(3, |x: &[f64]| 1.0 / crate::point::norm(x));
        // the pole at the center is sent to infinity: u_λ ≡ λ^{-1}
        for lambda in [1.0, 2.0] {
            let k = KelvinField::new(&fundamental, Point::zeros(3), lambda, 1.0);
            assert!((k.eval(&[2.0, 0.0, 0.0]) - 1.0 / lambda).abs() < 1e-15);
            assert!((k.eval(&[0.1, -0.3, 0.7]) - 1.0 / lambda).abs() < 1e-14);
        }
        let invariant = FnField::new(3, |x: &[f64]| crate::point::norm(x).powf(-0.5));
        let k = KelvinField::new(&invariant, Point::zeros(3), 1.7, 1.0);
        let x = [0.4, 0.2, -1.1];
        assert!((k.eval(&x) - invariant.eval(&x)).abs() < 1e-14);
        let one = FnField::new(3, |_: &[f64]| 1.0);
        let k = KelvinField::new(&one, Point::zeros(3), 1.0, 1.0);
        assert_eq!(k.eval(&[2.0, 0.0, 0.0]), 0.5);
        assert!(k.try_eval(&[0.0; 3]).is_err());
    }
}
