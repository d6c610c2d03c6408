//! Points in the open unit disc/ball and sequences thereof.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A point in the open unit ball of `C^d` (`d = 1` for disc kernels).
///
/// The Euclidean norm of the coordinate vector is strictly less than 1;
/// this invariant is enforced at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointRepr", into = "PointRepr")]
pub struct Point {
    coords: Vec<Complex64>,
}

/// Serialized form: a single `[re, im]` pair for disc points, or an array
/// of such pairs for ball points.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PointRepr {
    Disc([f64; 2]),
    Ball(Vec<[f64; 2]>),
}

impl TryFrom<PointRepr> for Point {
    type Error = Error;
    fn try_from(r: PointRepr) -> Result<Point> {
        match r {
            PointRepr::Disc([re, im]) => Point::disc(re, im),
            PointRepr::Ball(cs) => {
                Point::new(cs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            }
        }
    }
}

impl From<Point> for PointRepr {
    fn from(p: Point) -> PointRepr {
        if p.dim() == 1 {
            PointRepr::Disc([p.coords[0].re, p.coords[0].im])
        } else {
            PointRepr::Ball(p.coords.iter().map(|c| [c.re, c.im]).collect())
        }
    }
}

impl Point {
    /// Constructs a point, checking that its Euclidean norm is `< 1`.
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        let norm = coords.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm < 1.0) {
            return Err(Error::PointOutsideDomain { norm });
        }
        Ok(Point { coords })
    }

    /// Disc point from real and imaginary parts.
    pub fn disc(re: f64, im: f64) -> Result<Self> {
        Self::new(vec![Complex64::new(re, im)])
    }

    /// Disc point on the real axis.
    pub fn real(x: f64) -> Result<Self> {
        Self::disc(x, 0.0)
    }

    /// The origin of `C^d`.
    pub fn origin(d: usize) -> Self {
        Point { coords: vec![Complex64::ZERO; d.max(1)] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    /// First coordinate; the value itself for disc points.
    pub fn z(&self) -> Complex64 {
        self.coords[0]
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Hermitian pairing `<z, w> = sum_i z_i conj(w_i)`.
    pub fn pair(&self, w: &Point) -> Result<Complex64> {
        if self.dim() != w.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: w.dim() });
        }
        Ok(self
            .coords
            .iter()
            .zip(&w.coords)
            .map(|(a, b)| a * b.conj())
            .sum())
    }
}

/// Returns an error if any two points in the slice have identical coordinates.
pub fn check_pairwise_distinct(pts: &[Point]) -> Result<()> {
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            if pts[i] == pts[j] {
                return Err(Error::DuplicatePoints { i, j });
            }
        }
    }
    Ok(())
}

/// Returns an error unless all points share dimension `d`.
pub fn check_dim(pts: &[Point], d: usize) -> Result<()> {
    for p in pts {
        if p.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: p.dim() });
        }
    }
    Ok(())
}
