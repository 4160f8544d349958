use std::fmt;
use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

/// A point of `R^n`. Coordinates live inline for `n <= 4`.
#[derive(Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub SmallVec<[f64; 4]>);

impl Point {
    pub fn new(coords: &[f64]) -> Self {
        Point(SmallVec::from_slice(coords))
    }

    pub fn zeros(n: usize) -> Self {
        Point(SmallVec::from_elem(0.0, n))
    }

    /// The `i`-th standard basis vector scaled by `len`.
    pub fn axis(n: usize, i: usize, len: f64) -> Self {
        let mut p = Point::zeros(n);
        p.0[i] = len;
        p
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Point {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(SmallVec::from_vec(v))
    }
}

impl From<&[f64]> for Point {
    fn from(v: &[f64]) -> Self {
        Point::new(v)
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(v: [f64; N]) -> Self {
        Point::new(&v)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Point {
    Point(a.iter().zip(b).map(|(x, y)| x - y).collect())
}

pub fn add(a: &[f64], b: &[f64]) -> Point {
    Point(a.iter().zip(b).map(|(x, y)| x + y).collect())
}

/// `a + t * d`
pub fn axpy(a: &[f64], t: f64, d: &[f64]) -> Point {
    Point(a.iter().zip(d).map(|(x, y)| x + t * y).collect())
}

pub fn scale(a: &[f64], t: f64) -> Point {
    Point(a.iter().map(|x| t * x).collect())
}
