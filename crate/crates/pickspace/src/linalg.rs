//! Dense complex Hermitian linear algebra shared by the matrix-facing
//! modules: spectral queries, pivoted PSD factorization, generalized
//! eigenvalues by Cholesky congruence, and unitary completion.

use crate::error::{Error, Result};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen, QR};
use num_complex::Complex64;
use serde::Serialize;

/// Relative Hermitian-defect tolerance.
pub const HERMITIAN_DEFECT_TOL: f64 = 1e-10;

/// Dense complex Hermitian matrix with spectral query support.
///
/// Carries the measured Hermitian defect `max |H - H*|` entrywise; sign
/// decisions downstream use the relative PSD tolerance `1e-10 (1 + lambda_max)`.
#[derive(Debug, Clone)]
pub struct HermitianMatrix {
    m: DMatrix<Complex64>,
    defect: f64,
}

impl HermitianMatrix {
    /// Wraps a matrix, enforcing the Hermitian-defect invariant.
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Internal("Hermitian matrix must be square".into()));
        }
        let mut defect = 0.0f64;
        let mut max_entry = 0.0f64;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                defect = defect.max((m[(i, j)] - m[(j, i)].conj()).norm());
                max_entry = max_entry.max(m[(i, j)].norm());
            }
        }
        let tol = HERMITIAN_DEFECT_TOL * (1.0 + max_entry);
        if defect > tol {
            return Err(Error::HermitianDefect { defect, tol });
        }
        Ok(HermitianMatrix { m, defect })
    }

    /// Builds entries from a fallible closure over `(row, col)`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Result<Complex64>) -> Result<Self> {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j)?;
            }
        }
        Self::new(m)
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.defect
    }

    /// The exactly-Hermitian part `(H + H*) / 2`.
    pub fn hermitian_part(&self) -> DMatrix<Complex64> {
        (&self.m + self.m.adjoint()) * Complex64::new(0.5, 0.0)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigh_values(&self.hermitian_part())
    }

    /// `(lambda_min, lambda_max)` of the Hermitian part.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let ev = self.eigenvalues();
        (ev[0], ev[ev.len() - 1])
    }

    /// Operator norm `||H - I||` (largest `|lambda - 1|`).
    pub fn norm_minus_identity(&self) -> f64 {
        self.eigenvalues().iter().map(|l| (l - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Principal submatrix on the given indices.
    pub fn principal_submatrix(&self, idx: &[usize]) -> HermitianMatrix {
        let k = idx.len();
        let mut m = DMatrix::zeros(k, k);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m[(a, b)] = self.m[(i, j)];
            }
        }
        HermitianMatrix { m, defect: self.defect }
    }
}

/// Ascending eigenvalues of an (exactly) Hermitian matrix.
pub fn eigh_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    let e = SymmetricEigen::new(m.clone());
    let mut ev: Vec<f64> = e.eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Full Hermitian eigendecomposition, eigenvalues ascending with matching
/// eigenvector columns.
pub fn eigh(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let e = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..e.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals: Vec<f64> = order.iter().map(|&i| e.eigenvalues[i]).collect();
    let n = m.nrows();
    let mut vecs = DMatrix::zeros(n, n);
    for (c, &i) in order.iter().enumerate() {
        vecs.set_column(c, &e.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Pivoted rank-revealing Cholesky of a PSD matrix `H`.
///
/// Returns `Theta` (`n x r`) with rows `theta_i` such that
/// `Theta Theta* = H`; pivots below `rank_tol * max diag` are clamped to
/// zero and end the factorization. Deterministic (largest remaining
/// diagonal first, ties by index).
pub fn pivoted_cholesky(h: &DMatrix<Complex64>, rank_tol: f64) -> DMatrix<Complex64> {
    let n = h.nrows();
    let scale = (0..n).map(|i| h[(i, i)].re.abs()).fold(1.0f64, f64::max);
    let mut d: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    let mut piv: Vec<usize> = (0..n).collect();
    let mut l = DMatrix::<Complex64>::zeros(n, n);
    let mut rank = 0;
    for k in 0..n {
        let rel = (k..n)
            .max_by(|&a, &b| d[a].total_cmp(&d[b]))
            .expect("non-empty pivot range");
        if d[rel] <= rank_tol * scale {
            break;
        }
        piv.swap(k, rel);
        d.swap(k, rel);
        l.swap_rows(k, rel);
        let pk = piv[k];
        l[(k, k)] = Complex64::new(d[k].sqrt(), 0.0);
        for i in (k + 1)..n {
            let pi = piv[i];
            let mut acc = h[(pi, pk)];
            for t in 0..k {
                acc -= l[(i, t)] * l[(k, t)].conj();
            }
            let v = acc / l[(k, k)];
            l[(i, k)] = v;
            d[i] -= v.norm_sqr();
        }
        rank += 1;
    }
    let mut theta = DMatrix::zeros(n, rank);
    for i in 0..n {
        for j in 0..rank {
            theta[(piv[i], j)] = l[(i, j)];
        }
    }
    theta
}

/// Largest generalized eigenvalue `mu` of `M x = mu P x` with `P` Hermitian
/// positive definite, via Cholesky congruence `P = L L*` and the ordinary
/// Hermitian problem for `L^{-1} M L^{-*}`.
///
/// Errors if `P` is numerically singular (condition estimate above 1e12).
pub fn generalized_eig_max(m: &DMatrix<Complex64>, p: &DMatrix<Complex64>) -> Result<f64> {
    let pev = eigh_values(p);
    let (pmin, pmax) = (pev[0], pev[pev.len() - 1]);
    if pmin <= 0.0 || pmax / pmin > 1e12 {
        return Err(Error::SingularMatrix { cond: if pmin > 0.0 { pmax / pmin } else { f64::INFINITY } });
    }
    let chol = Cholesky::new(p.clone()).ok_or(Error::SingularMatrix { cond: f64::INFINITY })?;
    let l = chol.l();
    // A = L^{-1} M^*  (lower-triangular solve), then L^{-1} A^* = L^{-1} M L^{-*}.
    let a = l
        .solve_lower_triangular(&m.adjoint())
        .ok_or(Error::SingularMatrix { cond: f64::INFINITY })?;
    let mt = l
        .solve_lower_triangular(&a.adjoint())
        .ok_or(Error::SingularMatrix { cond: f64::INFINITY })?;
    let herm = (&mt + mt.adjoint()) * Complex64::new(0.5, 0.0);
    let ev = eigh_values(&herm);
    Ok(ev[ev.len() - 1])
}

/// Least-squares solve `A x = b` via SVD (rank-revealing, deterministic).
pub fn lstsq(a: &DMatrix<Complex64>, b: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    if a.ncols() == 0 {
        return Ok(DVector::zeros(0));
    }
    let svd = nalgebra::SVD::new_unordered(a.clone(), true, true);
    svd.solve(b, 1e-13)
        .map_err(|e| Error::Internal(format!("SVD solve failed: {e}")))
}

/// Extends a matrix `O` (`p x s`, orthonormal columns) to a full `p x p`
/// unitary `[O | O_perp]` by Householder QR of `[O | I]`; the complement
/// columns are deterministic given `O`.
pub fn complete_to_unitary(o: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    complete_to_unitary_seeded(o, 0)
}

/// As [`complete_to_unitary`], but the identity seed is rotated so that
/// coordinate `first` is orthonormalized first: when `e_first` is exactly
/// orthogonal to col(`O`), it becomes the first complement column verbatim.
pub fn complete_to_unitary_seeded(o: &DMatrix<Complex64>, first: usize) -> DMatrix<Complex64> {
    let p = o.nrows();
    let s = o.ncols();
    if s >= p {
        return o.clone();
    }
    let mut wide = DMatrix::zeros(p, s + p);
    wide.view_mut((0, 0), (p, s)).copy_from(o);
    for j in 0..p {
        wide[((first + j) % p, s + j)] = Complex64::ONE;
    }
    let qr = QR::<Complex64, Dyn, Dyn>::new(wide);
    let q = qr.q();
    let mut out = DMatrix::zeros(p, p);
    out.view_mut((0, 0), (p, s)).copy_from(o);
    // The first s columns of Q span col(O); the next p-s columns of Q are an
    // orthonormal basis of its orthogonal complement.
    out.view_mut((0, s), (p, p - s)).copy_from(&q.view((0, s), (p, p - s)));
    out
}

/// Orthonormal basis for the span of vectors given by their Gram matrix.
///
/// Given columns `v_j` (as `V`, `p x n`) with Gram `G = V* V`, returns the
/// coefficient matrix `M` (`n x s`) such that `V M` has orthonormal columns
/// spanning col(V): eigendecomposition of `G`, keeping eigenvalues above
/// `tol * lambda_max`.
pub fn span_onb_coefficients(g: &DMatrix<Complex64>, tol: f64) -> DMatrix<Complex64> {
    let herm = (g + g.adjoint()) * Complex64::new(0.5, 0.0);
    let (vals, vecs) = eigh(&herm);
    let lmax = vals.last().copied().unwrap_or(0.0).max(0.0);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > tol * lmax.max(1.0)).collect();
    let mut m = DMatrix::zeros(g.nrows(), keep.len());
    for (c, &i) in keep.iter().enumerate() {
        let scale = Complex64::new(vals[i].sqrt().recip(), 0.0);
        m.set_column(c, &(vecs.column(i) * scale));
    }
    m
}

/// Row-major `[re, im]` pair export used by report serialization.
#[derive(Debug, Clone, Serialize)]
pub struct ComplexMatrixExport {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl ComplexMatrixExport {
    pub fn of(m: &DMatrix<Complex64>) -> Self {
        let mut entries = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                entries.push([m[(i, j)].re, m[(i, j)].im]);
            }
        }
        ComplexMatrixExport { rows: m.nrows(), cols: m.ncols(), entries }
    }
}
