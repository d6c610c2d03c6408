//! Gram matrices of normalized kernel functions and the spectral
//! diagnostics behind separation, Carleson-type bounds, and Riesz-sequence
//! certificates.

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::linalg::HermitianMatrix;
use crate::point::{check_dim, check_pairwise_distinct, Point};
use num_complex::Complex64;
use serde::Serialize;

/// Spectral and separation summary of a finite Gram section.
#[derive(Debug, Clone, Serialize)]
pub struct GramReport {
    pub n: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub separation: f64,
    pub max_offdiag_mod: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classes: Option<Vec<Vec<usize>>>,
}

/// Gram matrix `G_ij = k(p_j, p_i) / sqrt(k(p_j,p_j) k(p_i,p_i))` of the
/// normalized kernel functions at the given points (unit diagonal).
///
/// The two diagonal square roots divide the entry one after the other so
/// that kernels with astronomically large diagonal values (the weighted
/// Bergman family near the boundary) never overflow.
pub fn gram(spec: &KernelSpec, pts: &[Point]) -> Result<HermitianMatrix> {
    check_dim(pts, spec.dim())?;
    check_pairwise_distinct(pts)?;
    let n = pts.len();
    let mut diag = Vec::with_capacity(n);
    for p in pts {
        diag.push(spec.norm_sq(p)?.sqrt());
    }
    let mut m = nalgebra::DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = spec.eval(&pts[j], &pts[i])? / diag[i] / diag[j];
        }
    }
    HermitianMatrix::new(m)
}

/// `(lambda_min, lambda_max)` of the Hermitian part of `H`.
pub fn spectral_bounds(h: &HermitianMatrix) -> (f64, f64) {
    h.spectral_bounds()
}

/// Separation: the minimum of `d_H` over all pairs of points.
pub fn separation(spec: &KernelSpec, pts: &[Point]) -> Result<f64> {
    if pts.len() < 2 {
        return Err(Error::TooFewPoints { need: 2, got: pts.len() });
    }
    check_pairwise_distinct(pts)?;
    let mut min = f64::INFINITY;
    for i in 0..pts.len() {
        for j in 0..i {
            min = min.min(spec.dh(&pts[i], &pts[j])?);
        }
    }
    Ok(min)
}

/// Largest off-diagonal modulus of a unit-diagonal Gram matrix.
pub fn max_offdiag_mod(h: &HermitianMatrix) -> f64 {
    let n = h.n();
    let mut m = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                m = m.max(h.entry(i, j).norm());
            }
        }
    }
    m
}

/// Strong-separation diagnostic for the Hardy-space kernel on the disc:
/// `min_i prod_{j != i} |(p_i - p_j) / (1 - conj(p_j) p_i)|`
/// (the Blaschke-product criterion). Defined for one-dimensional points;
/// a single point yields the empty product 1.
pub fn strong_separation_h2(pts: &[Point]) -> Result<f64> {
    check_dim(pts, 1)?;
    check_pairwise_distinct(pts)?;
    if pts.is_empty() {
        return Err(Error::TooFewPoints { need: 1, got: 0 });
    }
    let mut min = f64::INFINITY;
    for i in 0..pts.len() {
        let zi = pts[i].z();
        let mut prod = 1.0f64;
        for (j, pj) in pts.iter().enumerate() {
            if j != i {
                let zj = pj.z();
                prod *= ((zi - zj) / (Complex64::ONE - zj.conj() * zi)).norm();
            }
        }
        min = min.min(prod);
    }
    Ok(min)
}

/// Certificate check: `||G[C, C] - I|| <= bound` via the eigenvalues of the
/// principal submatrix.
fn class_certified(g: &HermitianMatrix, class: &[usize], bound: f64) -> bool {
    g.principal_submatrix(class).norm_minus_identity() <= bound
}

/// Partitions the index set so that every class `C` satisfies the
/// certificate `||G[C, C] - I|| <= bound`.
///
/// Greedy assignment in descending order of off-diagonal row mass (ties by
/// index), each class re-verified by an independent eigenvalue check after
/// assignment. If the greedy pass fails its certificate (it cannot for
/// valid inputs, since singletons always satisfy the bound) an exhaustive
/// minimal-class search runs for `n <= 12`.
pub fn partition_interpolating(g: &HermitianMatrix, bound: f64) -> Result<Vec<Vec<usize>>> {
    if !(bound > 0.0 && bound < 1.0) {
        return Err(Error::InvalidParameter(format!("bound={bound} must lie in (0, 1)")));
    }
    let n = g.n();
    for i in 0..n {
        if (g.entry(i, i) - Complex64::ONE).norm() > 1e-8 {
            return Err(Error::InvalidParameter("partition requires a unit-diagonal Gram matrix".into()));
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let row_mass: Vec<f64> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i).map(|j| g.entry(i, j).norm()).sum())
        .collect();
    order.sort_by(|&a, &b| row_mass[b].total_cmp(&row_mass[a]).then(a.cmp(&b)));

    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        let mut placed = false;
        for class in classes.iter_mut() {
            let mut trial = class.clone();
            trial.push(i);
            trial.sort_unstable();
            if class_certified(g, &trial, bound) {
                *class = trial;
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push(vec![i]);
        }
    }
    classes.sort_by_key(|c| c[0]);

    if classes.iter().all(|c| class_certified(g, c, bound)) {
        return Ok(classes);
    }
    if n <= 12 {
        if let Some(found) = exhaustive_partition(g, bound, n) {
            return Ok(found);
        }
    }
    Err(Error::SearchFailed("no certified partition found".into()))
}

/// Exhaustive minimal-class-count partition search (restricted growth
/// strings), used only as a fallback for small `n`.
fn exhaustive_partition(g: &HermitianMatrix, bound: f64, n: usize) -> Option<Vec<Vec<usize>>> {
    for max_classes in 1..=n {
        let mut assign = vec![0usize; n];
        if search(g, bound, n, max_classes, 0, &mut assign, 0) {
            let k = *assign.iter().max().unwrap() + 1;
            let mut classes = vec![Vec::new(); k];
            for (i, &c) in assign.iter().enumerate() {
                classes[c].push(i);
            }
            return Some(classes);
        }
    }
    return None;

    fn search(
        g: &HermitianMatrix,
        bound: f64,
        n: usize,
        cap: usize,
        i: usize,
        assign: &mut Vec<usize>,
        used: usize,
    ) -> bool {
        if i == n {
            return true;
        }
        for c in 0..(used + 1).min(cap) {
            assign[i] = c;
            let class: Vec<usize> = (0..=i).filter(|&j| assign[j] == c).collect();
            if class_certified(g, &class, bound)
                && search(g, bound, n, cap, i + 1, assign, used.max(c + 1))
            {
                return true;
            }
        }
        false
    }
}

/// Full diagnostic report for a point set under one kernel; partition
/// classes are included when `partition_bound` is given.
pub fn report(spec: &KernelSpec, pts: &[Point], partition_bound: Option<f64>) -> Result<GramReport> {
    let g = gram(spec, pts)?;
    let (lambda_min, lambda_max) = g.spectral_bounds();
    let sep = if pts.len() >= 2 { separation(spec, pts)? } else { 1.0 };
    let classes = match partition_bound {
        Some(b) => Some(partition_interpolating(&g, b)?),
        None => None,
    };
    Ok(GramReport {
        n: pts.len(),
        lambda_min,
        lambda_max,
        separation: sep,
        max_offdiag_mod: max_offdiag_mod(&g),
        classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pts(xs: &[f64]) -> Vec<Point> {
        xs.iter().map(|&x| Point::real(x).unwrap()).collect()
    }

    #[test]
    fn szego_two_point_gram() {
        let g = gram(&KernelSpec::szego(), &pts(&[0.0, 0.5])).unwrap();
        assert_eq!(g.entry(0, 0), Complex64::ONE);
        assert_relative_eq!(g.entry(0, 1).re, (3.0f64 / 4.0).sqrt(), max_relative = 1e-12);
        assert!((g.entry(0, 1).re - 0.86603).abs() < 1e-5);
        let (lo, hi) = spectral_bounds(&g);
        assert!((lo - 0.13397).abs() < 1e-5 && (hi - 1.86603).abs() < 1e-5);
    }

    #[test]
    fn single_point_gram_is_unit() {
        let g = gram(&KernelSpec::dirichlet(), &pts(&[0.3])).unwrap();
        assert_eq!(g.n(), 1);
        assert!((g.entry(0, 0) - Complex64::ONE).norm() < 1e-12);
    }

    #[test]
    fn dirichlet_two_point_offdiag() {
        let g = gram(&KernelSpec::dirichlet(), &pts(&[0.0, 0.5])).unwrap();
        let expected = 1.0 / 1.150728289807123f64.sqrt();
        assert_relative_eq!(g.entry(0, 1).re, expected, max_relative = 1e-9);
        assert!((g.entry(0, 1).re - 0.93221).abs() < 1e-5);
    }

    #[test]
    fn duplicate_points_rejected() {
        assert!(matches!(
            gram(&KernelSpec::szego(), &pts(&[0.1, 0.1])),
            Err(Error::DuplicatePoints { .. })
        ));
        assert!(separation(&KernelSpec::szego(), &pts(&[0.1, 0.1])).is_err());
    }

    #[test]
    fn separation_examples() {
        assert_relative_eq!(
            separation(&KernelSpec::szego(), &pts(&[0.0, 0.5])).unwrap(),
            0.5,
            max_relative = 1e-12
        );
        assert!(separation(&KernelSpec::szego(), &pts(&[0.3])).is_err());
        // separation^2 + max_offdiag^2 = 1 for unit-diagonal Gram matrices.
        let p = pts(&[0.0, 0.3, -0.55, 0.72]);
        let g = gram(&KernelSpec::szego(), &p).unwrap();
        let s = separation(&KernelSpec::szego(), &p).unwrap();
        let m = max_offdiag_mod(&g);
        assert!((s * s + m * m - 1.0).abs() < 1e-10);
    }

    #[test]
    fn strong_separation_examples() {
        assert_relative_eq!(strong_separation_h2(&pts(&[0.0, 0.5])).unwrap(), 0.5, max_relative = 1e-14);
        assert_eq!(strong_separation_h2(&pts(&[0.4])).unwrap(), 1.0);
        // Geometric sequence against a direct product oracle.
        let zs: Vec<f64> = (0..8).map(|j| 1.0 - 0.5f64.powi(j)).collect();
        let p = pts(&zs);
        let got = strong_separation_h2(&p).unwrap();
        let mut oracle = f64::INFINITY;
        for i in 0..zs.len() {
            let mut prod = 1.0;
            for j in 0..zs.len() {
                if j != i {
                    prod *= ((zs[i] - zs[j]) / (1.0 - zs[j] * zs[i])).abs();
                }
            }
            oracle = oracle.min(prod);
        }
        assert!(got > 0.0);
        assert_relative_eq!(got, oracle, max_relative = 1e-12);
        // Never exceeds plain separation for the Hardy kernel.
        assert!(got <= separation(&KernelSpec::szego(), &p).unwrap() + 1e-12);
        // Dimension check.
        let ball = Point::new(vec![Complex64::new(0.1, 0.0), Complex64::new(0.2, 0.0)]).unwrap();
        assert!(strong_separation_h2(&[ball]).is_err());
    }

    #[test]
    fn partition_identity_single_class() {
        let g = HermitianMatrix::new(nalgebra::DMatrix::identity(5, 5)).unwrap();
        let classes = partition_interpolating(&g, 0.5).unwrap();
        assert_eq!(classes, vec![vec![0, 1, 2, 3, 4]]);
    }

    #[test]
    fn partition_small_offdiag_single_class() {
        // All off-diagonal moduli <= bound / n forces one class by Gershgorin.
        let n = 6;
        let bound = 0.5;
        let eps = bound / n as f64;
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| {
            if i == j { Complex64::ONE } else { Complex64::new(eps * 0.99, 0.0) }
        });
        let g = HermitianMatrix::new(m).unwrap();
        let classes = partition_interpolating(&g, bound).unwrap();
        assert_eq!(classes.len(), 1);
    }

    #[test]
    fn partition_certificates_reverified() {
        let p = pts(&[0.0, 0.5, 0.75, 0.875, 0.9375, -0.5, -0.75, 0.3]);
        let g = gram(&KernelSpec::szego(), &p).unwrap();
        let classes = partition_interpolating(&g, 0.5).unwrap();
        let all: Vec<usize> = {
            let mut v: Vec<usize> = classes.iter().flatten().copied().collect();
            v.sort_unstable();
            v
        };
        assert_eq!(all, (0..p.len()).collect::<Vec<_>>());
        for c in &classes {
            assert!(g.principal_submatrix(c).norm_minus_identity() <= 0.5 + 1e-12);
        }
    }

    #[test]
    fn partition_rejects_bad_bound() {
        let g = HermitianMatrix::new(nalgebra::DMatrix::identity(2, 2)).unwrap();
        assert!(partition_interpolating(&g, 0.0).is_err());
        assert!(partition_interpolating(&g, 1.0).is_err());
    }
}
