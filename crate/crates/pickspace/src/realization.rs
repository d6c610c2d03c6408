//! Explicit contractive interpolating multipliers from finite data: a
//! lurking-isometry construction produces a unitary colligation
//! `U = [[A*, C*], [B*, D*]]`, and the transfer function
//! `Delta(w) = A + B E(w) (I - D E(w))^{-1} C` evaluates the multiplier
//! `phi = rho * Delta` at arbitrary points.
//!
//! Construction sketch (single kernel `k`, nodes `lambda_j`, scaled targets
//! `y_j = w_j / rho`): with `Q_ij = (1 - y_i conj(y_j)) k(lambda_i,
//! lambda_j) = Theta Theta*` and the `b`-embedding Gram `B_ij =
//! <b_i, b_j> = Beta Beta*`, the identity
//! `g_ij + <(b tensor theta)_i, (b tensor theta)_j> = y_i conj(y_j) +
//! <theta_i, theta_j>` (here `g == 1`) makes
//! `(conj(Gamma_j); conj(beta_j) tensor conj(theta_j)) ->
//! (conj(y_j); conj(theta_j))` an isometry on the node data; completing it
//! to a unitary gives the colligation. Kernel pairs `(k, l)` use the same
//! identity with `g = l / k` and `Gamma` a factor of the `g`-Gram.
//!
//! Off the node span, a query point is represented by its projection onto
//! the span of the node coordinates plus one extra orthogonal coordinate
//! carrying the residual norm; this reproduces every pairwise inner
//! product the formula consumes, and is validated by the contractivity
//! certificate rather than by uniqueness.

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::linalg::{
    complete_to_unitary, complete_to_unitary_seeded, pivoted_cholesky, span_onb_coefficients,
    ComplexMatrixExport, HermitianMatrix,
};
use crate::point::{check_dim, check_pairwise_distinct, Point};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

/// Default rank tolerance for PSD factorizations.
pub const DEFAULT_RANK_TOL: f64 = 1e-12;
/// Acceptance threshold for the unitary-completion defect.
pub const UNITARY_DEFECT_TOL: f64 = 1e-9;

/// Rank-revealing factor of a PSD matrix: `rows * rows^* = H`.
#[derive(Debug, Clone)]
pub struct PsdFactor {
    pub rank: usize,
    /// `n x rank`; row `i` is the coordinate vector of the `i`-th datum.
    pub rows: DMatrix<Complex64>,
    pub rank_tol: f64,
}

/// Pivoted rank-revealing Cholesky factorization of a PSD matrix.
///
/// Negative pivots within tolerance are clamped to zero; an indefinite
/// input (smallest eigenvalue below `-rank_tol * (1 + lambda_max)`) is
/// rejected.
pub fn factor_psd(h: &HermitianMatrix, rank_tol: f64) -> Result<PsdFactor> {
    let (lmin, lmax) = h.spectral_bounds();
    if lmin < -rank_tol * (1.0 + lmax.max(0.0)) {
        return Err(Error::IndefiniteMatrix { min_eig: lmin });
    }
    let rows = pivoted_cholesky(&h.hermitian_part(), rank_tol);
    Ok(PsdFactor { rank: rows.ncols(), rows, rank_tol })
}

/// `b`-embedding data at the nodes: the Gram `B_ij = <b(lambda_i),
/// b(lambda_j)> = 1 - 1/k(lambda_i, lambda_j)` and finite coordinates
/// `beta_i` (rows of the pivoted Cholesky factor) with `<beta_i, beta_j> =
/// B_ij`.
pub fn node_embedding(spec: &KernelSpec, nodes: &[Point]) -> Result<(HermitianMatrix, PsdFactor)> {
    if !spec.is_cnp() {
        return Err(Error::NonCnpKernel { family: spec.family_name().into() });
    }
    check_dim(nodes, spec.dim())?;
    let n = nodes.len();
    let bg = HermitianMatrix::from_fn(n, |i, j| spec.b_inner(&nodes[i], &nodes[j]))?;
    let factor = factor_psd(&bg, DEFAULT_RANK_TOL)?;
    Ok((bg, factor))
}

/// A built colligation, immutable and safe to evaluate concurrently.
#[derive(Debug, Clone)]
pub struct Realization {
    /// The completed unitary on `C^p` (domain split `kg + kd*rq` padded,
    /// range split `1 + (p-1)`).
    u: DMatrix<Complex64>,
    kspec: KernelSpec,
    lspec: Option<KernelSpec>,
    nodes: Vec<Point>,
    /// Node coordinates of the `b`-embedding (`n x rb`).
    beta: DMatrix<Complex64>,
    /// Node coordinates of the `g`-factor (`n x rg`; all-ones Gram rank 1
    /// for single-kernel problems).
    gamma: DMatrix<Complex64>,
    pub node_b_gram: HermitianMatrix,
    pub rho: f64,
    /// Rank of the defect factor `Theta`.
    pub rank: usize,
    pub unitary_defect: f64,
    kg: usize,
    kd: usize,
    rq: usize,
    p: usize,
}

/// JSON export of a realization: enough to re-evaluate the transfer
/// function without rebuilding.
#[derive(Debug, Clone, Serialize)]
pub struct RealizationExport {
    pub a: ComplexMatrixExport,
    pub b: ComplexMatrixExport,
    pub c: ComplexMatrixExport,
    pub d: ComplexMatrixExport,
    pub beta: ComplexMatrixExport,
    pub gamma: ComplexMatrixExport,
    pub nodes: Vec<Point>,
    pub rho: f64,
    pub rank: usize,
    pub unitary_defect: f64,
}

/// Builds the realization for a single complete Pick kernel.
///
/// Requires `rho` at least the minimal multiplier norm of the data (the
/// defect kernel matrix must be PSD).
pub fn build_realization(
    spec: &KernelSpec,
    nodes: &[Point],
    targets: &[Complex64],
    rho: f64,
) -> Result<Realization> {
    build_impl(spec, None, nodes, targets, rho)
}

/// Builds the realization for a kernel pair `(k, l)`: the multiplier maps
/// the `k`-space into the `l`-space with norm at most `rho`. Requires the
/// ratio kernel `g = l / k` to be positive semidefinite on the nodes.
pub fn build_pair_realization(
    kspec: &KernelSpec,
    lspec: &KernelSpec,
    nodes: &[Point],
    targets: &[Complex64],
    rho: f64,
) -> Result<Realization> {
    build_impl(kspec, Some(lspec), nodes, targets, rho)
}

fn build_impl(
    kspec: &KernelSpec,
    lspec: Option<&KernelSpec>,
    nodes: &[Point],
    targets: &[Complex64],
    rho: f64,
) -> Result<Realization> {
    if nodes.is_empty() {
        return Err(Error::TooFewPoints { need: 1, got: 0 });
    }
    if nodes.len() != targets.len() {
        return Err(Error::DimensionMismatch { expected: nodes.len(), got: targets.len() });
    }
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!("rho={rho} must be > 0")));
    }
    check_pairwise_distinct(nodes)?;
    let n = nodes.len();
    let y: Vec<Complex64> = targets.iter().map(|w| w / rho).collect();

    let (bg, beta_f) = node_embedding(kspec, nodes)?;
    let beta = beta_f.rows;
    let rb = beta.ncols();

    // g-Gram: all ones for the single-kernel case, entrywise l/k for pairs.
    let gg = match lspec {
        None => HermitianMatrix::new(DMatrix::from_element(n, n, Complex64::ONE))?,
        Some(l) => HermitianMatrix::from_fn(n, |i, j| {
            Ok(l.eval(&nodes[i], &nodes[j])? / kspec.eval(&nodes[i], &nodes[j])?)
        })?,
    };
    let gamma = factor_psd(&gg, DEFAULT_RANK_TOL)?.rows;
    let rg = gamma.ncols();

    // Defect kernel Q_ij = (g_ij - y_i conj(y_j)) k(lambda_i, lambda_j);
    // PSD exactly when rho is a feasible budget.
    let q = HermitianMatrix::from_fn(n, |i, j| {
        Ok((gg.entry(i, j) - y[i] * y[j].conj()) * kspec.eval(&nodes[i], &nodes[j])?)
    })?;
    let theta_f = factor_psd(&q, DEFAULT_RANK_TOL).map_err(|e| match e {
        Error::IndefiniteMatrix { .. } => Error::RhoBelowMinimum { rho },
        other => other,
    })?;
    let rank = theta_f.rank;
    // Keep at least one auxiliary coordinate even when Q vanishes.
    let rq = rank.max(1);
    let mut theta = DMatrix::zeros(n, rq);
    theta.view_mut((0, 0), (n, theta_f.rows.ncols())).copy_from(&theta_f.rows);

    // One residual slot each for the b- and g-coordinates of query points.
    let kd = rb + 1;
    let kg = rg + 1;
    let p = (kg + kd * rq).max(1 + rq);

    // Node data columns of the isometry: domain (conj Gamma_j ; conj(beta_j
    // tensor theta_j)), range (conj y_j ; conj theta_j), zero-padded to p.
    let mut dom = DMatrix::<Complex64>::zeros(p, n);
    let mut ran = DMatrix::<Complex64>::zeros(p, n);
    for j in 0..n {
        for m in 0..rg {
            dom[(m, j)] = gamma[(j, m)].conj();
        }
        for m in 0..rb {
            for l in 0..rq {
                dom[(kg + m * rq + l, j)] = (beta[(j, m)] * theta[(j, l)]).conj();
            }
        }
        ran[(0, j)] = y[j].conj();
        for l in 0..rq {
            ran[(1 + l, j)] = theta[(j, l)].conj();
        }
    }

    // The two Gram matrices must agree: that is the lurking-isometry
    // identity. Disagreement signals inconsistent inputs.
    let gd = dom.adjoint() * &dom;
    let gr = ran.adjoint() * &ran;
    let scale = gd.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let mismatch = (&gd - &gr).iter().map(|v| v.norm()).fold(0.0, f64::max);
    if mismatch > 1e-8 * scale {
        return Err(Error::Internal(format!("isometry Gram mismatch {mismatch:.3e}")));
    }

    // Matched orthonormal bases of the two spans, completed to unitaries in
    // deterministic column order; U maps domain data to range data.
    let m = span_onb_coefficients(&gd, DEFAULT_RANK_TOL);
    let od = &dom * &m;
    let orr = &ran * &m;
    // Seed the domain completion at the g-residual slot (always orthogonal
    // to the node data) and the range completion at the output slot: when
    // all targets vanish these pair up exactly and the transfer function is
    // identically zero, as the degenerate problem requires.
    let fd = complete_to_unitary_seeded(&od, kg - 1);
    let fr = complete_to_unitary(&orr);
    let u = &fr * fd.adjoint();
    let unitary_defect = (u.adjoint() * &u - DMatrix::<Complex64>::identity(p, p))
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    if unitary_defect > UNITARY_DEFECT_TOL {
        return Err(Error::UnitaryDefect { defect: unitary_defect, tol: UNITARY_DEFECT_TOL });
    }

    let r = Realization {
        u,
        kspec: kspec.clone(),
        lspec: lspec.cloned(),
        nodes: nodes.to_vec(),
        beta,
        gamma,
        node_b_gram: bg,
        rho,
        rank,
        unitary_defect,
        kg,
        kd,
        rq,
        p,
    };
    Ok(r)
}

impl Realization {
    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    /// Coordinates of `b(w)`: projection onto span{beta_i} from the known
    /// inner products, plus one orthogonal residual coordinate.
    fn b_coords(&self, w: &Point) -> Result<DVector<Complex64>> {
        let rb = self.beta.ncols();
        let n = self.nodes.len();
        let mut v = DVector::zeros(n);
        for i in 0..n {
            v[i] = self.kspec.b_inner(w, &self.nodes[i])?;
        }
        let gamma = crate::linalg::lstsq(&self.beta.conjugate(), &v)?;
        let self_inner = self.kspec.b_inner(w, w)?.re;
        let radicand = self_inner - gamma.norm_squared();
        if radicand < -1e-10 {
            return Err(Error::NegativeResidual { value: radicand });
        }
        let mut bt = DVector::zeros(rb + 1);
        bt.view_mut((0, 0), (rb, 1)).copy_from(&gamma);
        bt[rb] = Complex64::new(radicand.max(0.0).sqrt(), 0.0);
        Ok(bt)
    }

    /// Coordinates of the `g`-factor at `w`, mirroring the `b`-treatment;
    /// `(1; 0)` exactly in the single-kernel case.
    fn g_coords(&self, w: &Point) -> Result<DVector<Complex64>> {
        let rg = self.gamma.ncols();
        let mut gt = DVector::zeros(rg + 1);
        match &self.lspec {
            None => {
                gt[0] = Complex64::ONE;
            }
            Some(l) => {
                let n = self.nodes.len();
                let mut v = DVector::zeros(n);
                for i in 0..n {
                    v[i] = l.eval(w, &self.nodes[i])? / self.kspec.eval(w, &self.nodes[i])?;
                }
                let coeff = crate::linalg::lstsq(&self.gamma.conjugate(), &v)?;
                let self_g = (l.eval(w, w)? / self.kspec.eval(w, w)?).re;
                let radicand = self_g - coeff.norm_squared();
                if radicand < -1e-10 {
                    return Err(Error::NegativeResidual { value: radicand });
                }
                gt.view_mut((0, 0), (rg, 1)).copy_from(&coeff);
                gt[rg] = Complex64::new(radicand.max(0.0).sqrt(), 0.0);
            }
        }
        Ok(gt)
    }

    /// Evaluates the multiplier `phi(w) = rho * Delta(w)`.
    pub fn eval_transfer(&self, w: &Point) -> Result<Complex64> {
        let (p, kg, kd, rq) = (self.p, self.kg, self.kd, self.rq);
        let bt = self.b_coords(w)?;
        let gt = self.g_coords(w)?;
        // ||E(w)|| = ||b(w)|| < 1 keeps I - Urr E invertible; guard the
        // numerically degenerate boundary anyway.
        if bt.norm() >= 1.0 - 1e-12 {
            return Err(Error::SingularMatrix { cond: f64::INFINITY });
        }
        let u_dom: DVector<Complex64> = gt.map(|z| z.conj());

        // Lift E(w): range-L coordinates t -> domain coordinates
        // (conj(bt) tensor t), in the fixed (m, l) -> m*rq + l order.
        let mut lift = DMatrix::<Complex64>::zeros(p - kg, p - 1);
        for m in 0..kd {
            for l in 0..rq {
                lift[(m * rq + l, l)] = bt[m].conj();
            }
        }
        let u00 = self.u.view((0, 0), (1, kg));
        let u0r = self.u.view((0, kg), (1, p - kg));
        let ur0 = self.u.view((1, 0), (p - 1, kg));
        let urr = self.u.view((1, kg), (p - 1, p - kg));

        let sys = DMatrix::<Complex64>::identity(p - 1, p - 1) - urr * &lift;
        let rhs = ur0 * &u_dom;
        let lu = sys.clone().lu();
        let t = lu.solve(&rhs).ok_or(Error::SingularMatrix { cond: f64::INFINITY })?;
        // Conditioning guard for near-boundary evaluation.
        let resid = (&sys * &t - &rhs).norm();
        if resid > 1e-8 * (1.0 + rhs.norm()) {
            return Err(Error::SingularMatrix { cond: resid / f64::EPSILON });
        }
        let val = (u00 * &u_dom + u0r * (&lift * &t))[(0, 0)];
        Ok(self.rho * val.conj())
    }

    /// Contractivity certificate on a grid: the extreme eigenvalues
    /// `(lambda_min, lambda_max)` of the defect matrix with entries
    /// `(rho^2 l(z_j, z_i) - conj(phi_i) k(z_j, z_i) phi_j) / rho^2`
    /// (with `l = k` for single-kernel realizations). The realization is
    /// accepted as contractive when
    /// `lambda_min >= -1e-8 (1 + lambda_max)`.
    pub fn verify_contractive(&self, grid: &[Point]) -> Result<(f64, f64)> {
        if grid.is_empty() {
            return Err(Error::TooFewPoints { need: 1, got: 0 });
        }
        check_pairwise_distinct(grid)?;
        let n = grid.len();
        let mut phi = Vec::with_capacity(n);
        for z in grid {
            phi.push(self.eval_transfer(z)?);
        }
        let r2 = self.rho * self.rho;
        let right = self.lspec.as_ref().unwrap_or(&self.kspec);
        let m = HermitianMatrix::from_fn(n, |i, j| {
            let l = right.eval(&grid[j], &grid[i])?;
            let k = self.kspec.eval(&grid[j], &grid[i])?;
            Ok((r2 * l - phi[i].conj() * k * phi[j]) / r2)
        })?;
        Ok(m.spectral_bounds())
    }

    /// Export with the colligation blocks `A, B, C, D` (adjoints of the
    /// corresponding blocks of the stored unitary `U = [[A*, C*], [B*,
    /// D*]]`) and the node-basis data needed for re-evaluation.
    pub fn export(&self) -> RealizationExport {
        let (p, kg) = (self.p, self.kg);
        let a = self.u.view((0, 0), (1, kg)).adjoint();
        let c = self.u.view((0, kg), (1, p - kg)).adjoint();
        let b = self.u.view((1, 0), (p - 1, kg)).adjoint();
        let d = self.u.view((1, kg), (p - 1, p - kg)).adjoint();
        RealizationExport {
            a: ComplexMatrixExport::of(&a),
            b: ComplexMatrixExport::of(&b),
            c: ComplexMatrixExport::of(&c),
            d: ComplexMatrixExport::of(&d),
            beta: ComplexMatrixExport::of(&self.beta),
            gamma: ComplexMatrixExport::of(&self.gamma),
            nodes: self.nodes.clone(),
            rho: self.rho,
            rank: self.rank,
            unitary_defect: self.unitary_defect,
        }
    }
}
