//! The kernel zoo: evaluation, the induced pseudo metric `d_H`, and the
//! `b`-embedding inner products of normalized complete Pick kernels.
//!
//! Every kernel here is normalized at the origin: `k(z, 0) = k(0, w) = 1`.
//! Disc families are functions of `x = z * conj(w)`; the Drury-Arveson
//! family uses the Hermitian pairing `<z, w>` on the ball of `C^d`.

use crate::error::{Error, Result};
use crate::point::{check_dim, Point};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Default relative tail tolerance for series-evaluated families.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;
/// Default truncation order for the weighted Bergman series.
pub const DEFAULT_WBE_TRUNC: usize = 450_000;
/// Default relative quadrature tolerance for moment computation.
pub const DEFAULT_QUAD_TOL: f64 = 1e-11;
/// Hard cap on dynamically chosen series truncations.
const MAX_DYNAMIC_TRUNC: usize = 100_000_000;

/// One kernel family with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `1 / (1 - z conj(w))`.
    Szego,
    /// `(1 - z conj(w))^{-t}` for `0 < t <= 1` (`t = 1` is the Szego kernel).
    Power { t: f64 },
    /// `-log(1 - x) / x`, the Dirichlet-type kernel.
    Dirichlet,
    /// `1 / (1 - <z, w>)` on the unit ball of `C^d`.
    DruryArveson { d: usize },
    /// `sum_n x^n / (n+1)^alpha` for `alpha >= 0`, truncated.
    Kaluza { alpha: f64, trunc: Option<usize> },
    /// `(1 - z conj(w))^{-t}` for `t > 1` (not a complete Pick kernel).
    BergmanPower { t: f64 },
    /// Normalized weighted Bergman kernel with weight `exp(-1/(1-|z|^2))`,
    /// truncated power series with quadrature-computed moments.
    WeightedBergmanExp { trunc: usize },
}

/// A declarative kernel description: family plus series tolerances.
///
/// Serializes as `{"family": "...", "t"?, "d"?, "alpha"?, "trunc"?,
/// "tail_tol"?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct KernelSpec {
    pub family: Family,
    pub tail_tol: f64,
}

/// Flat JSON representation of a [`KernelSpec`].
#[derive(Serialize, Deserialize)]
struct SpecRepr {
    family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trunc: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tail_tol: Option<f64>,
}

impl TryFrom<SpecRepr> for KernelSpec {
    type Error = Error;
    fn try_from(r: SpecRepr) -> Result<KernelSpec> {
        let need = |o: Option<f64>, what: &str| {
            o.ok_or_else(|| Error::InvalidParameter(format!("family {} requires \"{}\"", r.family, what)))
        };
        let spec = match r.family.as_str() {
            "szego" => KernelSpec::szego(),
            "power" => KernelSpec::power(need(r.t, "t")?)?,
            "dirichlet" => KernelSpec::dirichlet(),
            "drury_arveson" => KernelSpec::drury_arveson(
                r.d.ok_or_else(|| Error::InvalidParameter("family drury_arveson requires \"d\"".into()))?,
            )?,
            "kaluza" => match r.trunc {
                Some(t) => KernelSpec::kaluza_trunc(need(r.alpha, "alpha")?, t)?,
                None => KernelSpec::kaluza(need(r.alpha, "alpha")?)?,
            },
            "bergman_power" => KernelSpec::bergman_power(need(r.t, "t")?)?,
            "weighted_bergman_exp" => {
                KernelSpec::weighted_bergman_exp(r.trunc.unwrap_or(DEFAULT_WBE_TRUNC))?
            }
            other => return Err(Error::InvalidParameter(format!("unknown kernel family \"{other}\""))),
        };
        match r.tail_tol {
            Some(t) => spec.with_tail_tol(t),
            None => Ok(spec),
        }
    }
}

impl From<KernelSpec> for SpecRepr {
    fn from(k: KernelSpec) -> SpecRepr {
        let mut r = SpecRepr {
            family: k.family_name().to_string(),
            t: None,
            d: None,
            alpha: None,
            trunc: None,
            tail_tol: Some(k.tail_tol),
        };
        match k.family {
            Family::Szego | Family::Dirichlet => {}
            Family::Power { t } | Family::BergmanPower { t } => r.t = Some(t),
            Family::DruryArveson { d } => r.d = Some(d),
            Family::Kaluza { alpha, trunc } => {
                r.alpha = Some(alpha);
                r.trunc = trunc;
            }
            Family::WeightedBergmanExp { trunc } => r.trunc = Some(trunc),
        }
        r
    }
}

/// Squared monomial norms `c_n` of the weighted Bergman space, kept in log
/// space (`c_n` underflows double precision for large `n`).
#[derive(Debug, Clone)]
pub struct MomentTable {
    log_c: Vec<f64>,
    /// `c_n / c_{n+1}` for `n = 0..=trunc`, used for incremental series terms.
    ratio: Vec<f64>,
    pub trunc: usize,
    pub quad_error: f64,
}

impl MomentTable {
    /// `c_n` itself; underflows to 0 for very large `n`.
    pub fn c(&self, n: usize) -> f64 {
        self.log_c[n].exp()
    }

    /// `log c_n`.
    pub fn log_c(&self, n: usize) -> f64 {
        self.log_c[n]
    }
}

impl KernelSpec {
    pub fn szego() -> Self {
        KernelSpec { family: Family::Szego, tail_tol: DEFAULT_TAIL_TOL }
    }

    pub fn power(t: f64) -> Result<Self> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::InvalidParameter(format!("power exponent t={t} must satisfy 0 < t <= 1")));
        }
        Ok(KernelSpec { family: Family::Power { t }, tail_tol: DEFAULT_TAIL_TOL })
    }

    pub fn dirichlet() -> Self {
        KernelSpec { family: Family::Dirichlet, tail_tol: DEFAULT_TAIL_TOL }
    }

    pub fn drury_arveson(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("drury_arveson dimension d must be >= 1".into()));
        }
        Ok(KernelSpec { family: Family::DruryArveson { d }, tail_tol: DEFAULT_TAIL_TOL })
    }

    /// Kaluza kernel with dynamically chosen truncation (geometric tail bound
    /// below `tail_tol` at each evaluation).
    pub fn kaluza(alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0) {
            return Err(Error::InvalidParameter(format!("kaluza exponent alpha={alpha} must be >= 0")));
        }
        Ok(KernelSpec { family: Family::Kaluza { alpha, trunc: None }, tail_tol: DEFAULT_TAIL_TOL })
    }

    /// Kaluza kernel with a fixed truncation; evaluation errors out if the
    /// geometric tail bound at that truncation exceeds `tail_tol`.
    pub fn kaluza_trunc(alpha: f64, trunc: usize) -> Result<Self> {
        if !(alpha >= 0.0) {
            return Err(Error::InvalidParameter(format!("kaluza exponent alpha={alpha} must be >= 0")));
        }
        Ok(KernelSpec { family: Family::Kaluza { alpha, trunc: Some(trunc) }, tail_tol: DEFAULT_TAIL_TOL })
    }

    pub fn bergman_power(t: f64) -> Result<Self> {
        if !(t > 1.0) {
            return Err(Error::InvalidParameter(format!("bergman_power exponent t={t} must be > 1")));
        }
        Ok(KernelSpec { family: Family::BergmanPower { t }, tail_tol: DEFAULT_TAIL_TOL })
    }

    pub fn weighted_bergman_exp(trunc: usize) -> Result<Self> {
        if trunc < 1 {
            return Err(Error::InvalidParameter("weighted_bergman_exp trunc must be >= 1".into()));
        }
        Ok(KernelSpec { family: Family::WeightedBergmanExp { trunc }, tail_tol: DEFAULT_TAIL_TOL })
    }

    pub fn with_tail_tol(mut self, tail_tol: f64) -> Result<Self> {
        if !(tail_tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tail_tol={tail_tol} must be > 0")));
        }
        self.tail_tol = tail_tol;
        Ok(self)
    }

    /// Whether the family is an irreducible complete Pick kernel
    /// (normalized at the origin).
    pub fn is_cnp(&self) -> bool {
        matches!(
            self.family,
            Family::Szego
                | Family::Power { .. }
                | Family::Dirichlet
                | Family::DruryArveson { .. }
                | Family::Kaluza { .. }
        )
    }

    /// Point dimension this kernel expects.
    pub fn dim(&self) -> usize {
        match self.family {
            Family::DruryArveson { d } => d,
            _ => 1,
        }
    }

    /// Short family name for messages and reports.
    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::Szego => "szego",
            Family::Power { .. } => "power",
            Family::Dirichlet => "dirichlet",
            Family::DruryArveson { .. } => "drury_arveson",
            Family::Kaluza { .. } => "kaluza",
            Family::BergmanPower { .. } => "bergman_power",
            Family::WeightedBergmanExp { .. } => "weighted_bergman_exp",
        }
    }

    fn check_points(&self, pts: &[&Point]) -> Result<()> {
        for p in pts {
            if p.dim() != self.dim() {
                return Err(Error::DimensionMismatch { expected: self.dim(), got: p.dim() });
            }
            if !(p.norm() < 1.0) {
                return Err(Error::PointOutsideDomain { norm: p.norm() });
            }
        }
        Ok(())
    }

    /// Evaluates `k(z, w)`.
    pub fn eval(&self, z: &Point, w: &Point) -> Result<Complex64> {
        self.check_points(&[z, w])?;
        let x = z.pair(w)?;
        match self.family {
            Family::Szego | Family::DruryArveson { .. } => Ok((Complex64::ONE - x).inv()),
            Family::Power { t } | Family::BergmanPower { t } => {
                // 1 - x has positive real part on the ball, so the principal
                // branch of the logarithm is unambiguous.
                Ok((-t * (Complex64::ONE - x).ln()).exp())
            }
            Family::Dirichlet => Ok(dirichlet_of(x)),
            Family::Kaluza { alpha, trunc } => kaluza_of(x, alpha, trunc, self.tail_tol),
            Family::WeightedBergmanExp { trunc } => {
                let table = cached_moments(trunc)?;
                wbe_of(x, &table, self.tail_tol)
            }
        }
    }

    /// `||k_z||^2 = k(z, z)`, checked real.
    pub fn norm_sq(&self, z: &Point) -> Result<f64> {
        let v = self.eval(z, z)?;
        if v.im.abs() > 1e-12 * (1.0 + v.re.abs()) {
            return Err(Error::Internal(format!("k(z,z) has imaginary part {:.3e}", v.im)));
        }
        Ok(v.re)
    }

    /// The pseudo metric `d_H(z, w) = sqrt(1 - |k(z,w)|^2 / (k(z,z) k(w,w)))`.
    ///
    /// Intermediate quotients are ordered so that the very large kernel
    /// values of the weighted Bergman family never overflow.
    pub fn dh(&self, z: &Point, w: &Point) -> Result<f64> {
        let kzw = self.eval(z, w)?;
        let kzz = self.norm_sq(z)?;
        let kww = self.norm_sq(w)?;
        let q = (kzw.norm() / kzz.sqrt()) / kww.sqrt();
        let radicand = 1.0 - q * q;
        if radicand < -1e-12 {
            return Err(Error::Internal(format!("d_H radicand {radicand:.3e} below -1e-12")));
        }
        Ok(radicand.max(0.0).sqrt())
    }

    /// `<b(z), b(w)> = 1 - 1/k(z, w)` for complete Pick kernels.
    pub fn b_inner(&self, z: &Point, w: &Point) -> Result<Complex64> {
        if !self.is_cnp() {
            return Err(Error::NonCnpKernel { family: self.family_name().into() });
        }
        let k = self.eval(z, w)?;
        if k.norm() == 0.0 {
            // Irreducible Pick kernels never vanish; reaching this is a bug.
            return Err(Error::Internal("kernel value 0 for a CNP family".into()));
        }
        Ok(Complex64::ONE - k.inv())
    }

    /// The general normalization transform
    /// `l(z, w) = k(z, w) k(0, 0) / (k(z, 0) k(0, w))`.
    ///
    /// All built-in families are already normalized, so this is the identity
    /// for them; it is exposed (and tested) as the documented way to
    /// renormalize externally supplied kernel values.
    pub fn normalized_eval(&self, z: &Point, w: &Point) -> Result<Complex64> {
        let o = Point::origin(self.dim());
        let k00 = self.eval(&o, &o)?;
        let kz0 = self.eval(z, &o)?;
        let k0w = self.eval(&o, w)?;
        Ok(self.eval(z, w)? * k00 / (kz0 * k0w))
    }
}

fn dirichlet_of(x: Complex64) -> Complex64 {
    if x.norm() < 1e-4 {
        // Removable singularity at 0: sum the series 1 + x/2 + x^2/3 + ...
        let mut s = Complex64::ZERO;
        let mut xp = Complex64::ONE;
        for n in 0..12 {
            s += xp / (n as f64 + 1.0);
            xp *= x;
        }
        s
    } else {
        -(Complex64::ONE - x).ln() / x
    }
}

fn kaluza_of(x: Complex64, alpha: f64, trunc: Option<usize>, tail_tol: f64) -> Result<Complex64> {
    let ax = x.norm();
    if ax == 0.0 {
        return Ok(Complex64::ONE);
    }
    // Coefficients (n+1)^{-alpha} <= 1, so the tail beyond T is bounded by
    // the geometric tail |x|^{T+1} / (1 - |x|).
    let needed = ((tail_tol * (1.0 - ax)).ln() / ax.ln()).ceil().max(1.0);
    let needed = if needed.is_finite() { needed as usize } else { MAX_DYNAMIC_TRUNC + 1 };
    let t = match trunc {
        Some(t) => {
            let bound = ax.powi(t as i32 + 1) / (1.0 - ax);
            if bound >= tail_tol {
                return Err(Error::TailBoundNotMet { bound, tol: tail_tol, trunc: t });
            }
            t
        }
        None => {
            if needed > MAX_DYNAMIC_TRUNC {
                return Err(Error::TailBoundNotMet {
                    bound: f64::INFINITY,
                    tol: tail_tol,
                    trunc: MAX_DYNAMIC_TRUNC,
                });
            }
            needed
        }
    };
    let mut s = Complex64::ZERO;
    let mut xp = Complex64::ONE;
    for n in 0..=t {
        s += xp * (n as f64 + 1.0).powf(-alpha);
        xp *= x;
    }
    Ok(s)
}

/// Weighted Bergman series `sum_n (c_0 / c_n) x^n`, evaluated with the term
/// recurrence `t_{n+1} = t_n * (c_n / c_{n+1}) * x` so that the enormous
/// coefficients `c_0 / c_n` are never materialized on their own.
fn wbe_of(x: Complex64, table: &MomentTable, tail_tol: f64) -> Result<Complex64> {
    let ax = x.norm();
    if ax == 0.0 {
        return Ok(Complex64::ONE);
    }
    let mut term = Complex64::ONE;
    let mut tmag = 1.0f64;
    let mut sum = Complex64::ONE;
    let mut abs_sum = 1.0f64;
    for n in 0..table.trunc {
        let r = table.ratio[n] * ax;
        term *= x * table.ratio[n];
        tmag *= r;
        sum += term;
        abs_sum += tmag;
        if tmag > 1e290 || abs_sum > 1e290 {
            return Err(Error::Overflow);
        }
        // Moment log-convexity makes the term growth ratio r monotonically
        // decreasing, so once r < 1 the remaining tail is geometric.
        if r < 1.0 && tmag * r / (1.0 - r) <= tail_tol * abs_sum {
            return Ok(sum);
        }
    }
    let r = table.ratio[table.trunc] * ax;
    if r >= 1.0 {
        return Err(Error::TailBoundNotMet { bound: f64::INFINITY, tol: tail_tol, trunc: table.trunc });
    }
    let bound = tmag * r / (1.0 - r);
    if bound > tail_tol * abs_sum {
        return Err(Error::TailBoundNotMet { bound: bound / abs_sum, tol: tail_tol, trunc: table.trunc });
    }
    Ok(sum)
}

// ---------------------------------------------------------------------------
// Moment computation: c_n = int_0^1 r^{2n} exp(-1/(1-r^2)) 2r dr
//                         = int_0^1 (1-u)^n exp(-1/u) du   (u = 1 - r^2).
// ---------------------------------------------------------------------------

/// Adaptive Simpson quadrature with Richardson acceptance test.
fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &impl Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol || (b - a) < 1e-14 {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(Error::QuadratureFailure);
        }
        Ok(rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)?
            + rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)?)
    }
    let fa = f(a);
    let fb = f(b);
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, m, fm, whole, tol, 48)
}

/// `log c_n`, computed by peak-bracketed adaptive quadrature.
///
/// The integrand `exp(h(u))` with `h(u) = n log(1-u) - 1/u` peaks at
/// `u* = (sqrt(1+4n) - 1) / (2n)`; the exponent is shifted by `h(u*)` and
/// the domain split into panels bracketing the peak (width from the local
/// Gaussian scale) so the adaptive rule cannot miss it.
fn log_moment(n: usize, quad_tol: f64) -> Result<f64> {
    if n == 0 {
        let f = |u: f64| if u > 0.0 { (-1.0 / u).exp() } else { 0.0 };
        let v = adaptive_simpson(&f, 0.0, 1.0, quad_tol * 0.1)?;
        return Ok(v.ln());
    }
    let nf = n as f64;
    let ustar = ((1.0 + 4.0 * nf).sqrt() - 1.0) / (2.0 * nf);
    let m = nf * (-ustar).ln_1p() - 1.0 / ustar;
    let f = move |u: f64| {
        if u > 0.0 && u < 1.0 {
            (nf * (-u).ln_1p() - 1.0 / u - m).exp()
        } else {
            0.0
        }
    };
    // Local Gaussian scale at the peak.
    let h2 = -nf / ((1.0 - ustar) * (1.0 - ustar)) - 2.0 / (ustar * ustar * ustar);
    let sigma = (-h2).recip().sqrt();
    let cuts = [
        0.0,
        (ustar - 50.0 * sigma).max(0.0),
        ustar,
        (ustar + 50.0 * sigma).min(1.0),
        1.0,
    ];
    let mut total = 0.0;
    for win in cuts.windows(2) {
        if win[1] > win[0] {
            total += adaptive_simpson(&f, win[0], win[1], quad_tol * sigma.min(1.0) * 0.1)?;
        }
    }
    if !(total > 0.0) {
        return Err(Error::QuadratureFailure);
    }
    Ok(m + total.ln())
}

/// Computes the moment table `c_0 ... c_{trunc+1}` (in log space).
///
/// Moments with `n <= 1024` are integrated directly; larger ones are cubic
/// interpolants of exact values on a grid uniform in `sqrt(n)`, where
/// `log c_n` is very nearly linear (interpolation accuracy is itself
/// unit-tested against direct quadrature).
pub fn weighted_bergman_moments(trunc: usize, quad_tol: f64) -> Result<MomentTable> {
    if trunc < 1 {
        return Err(Error::InvalidParameter("trunc must be >= 1".into()));
    }
    if !(quad_tol > 0.0) {
        return Err(Error::InvalidParameter("quad_tol must be > 0".into()));
    }
    let top = trunc + 1;
    let exact_cut = 1024.min(top);
    let mut log_c = vec![0.0f64; top + 1];
    for (n, slot) in log_c.iter_mut().enumerate().take(exact_cut + 1) {
        *slot = log_moment(n, quad_tol)?;
    }
    if top > exact_cut {
        // Exact nodes on a sqrt(n)-uniform grid, extended two steps past the
        // end so every query has a full cubic stencil.
        let s0 = (exact_cut as f64).sqrt();
        let step = 0.5;
        let mut nodes_n: Vec<usize> = Vec::new();
        let mut k = 0usize;
        loop {
            let s = s0 + step * k as f64;
            let n = (s * s).round() as usize;
            if nodes_n.last() != Some(&n) {
                nodes_n.push(n);
            }
            if n as f64 >= (top as f64).sqrt().powi(2) + 2.0 * step * (top as f64).sqrt() + 1.0 {
                break;
            }
            k += 1;
        }
        let nodes_s: Vec<f64> = nodes_n.iter().map(|&n| (n as f64).sqrt()).collect();
        let mut nodes_v = Vec::with_capacity(nodes_n.len());
        for &n in &nodes_n {
            nodes_v.push(log_moment(n, quad_tol)?);
        }
        for (n, slot) in log_c.iter_mut().enumerate().take(top + 1).skip(exact_cut + 1) {
            let s = (n as f64).sqrt();
            // Locate the stencil around s; grid is uniform in s up to rounding.
            let mut j = (((s - s0) / step) as usize).min(nodes_s.len() - 1);
            while j + 1 < nodes_s.len() && nodes_s[j + 1] <= s {
                j += 1;
            }
            while j > 0 && nodes_s[j] > s {
                j -= 1;
            }
            let lo = j.saturating_sub(1).min(nodes_s.len() - 4);
            // Lagrange cubic through four surrounding nodes.
            let mut acc = 0.0;
            for a in 0..4 {
                let mut w = 1.0;
                for b in 0..4 {
                    if a != b {
                        w *= (s - nodes_s[lo + b]) / (nodes_s[lo + a] - nodes_s[lo + b]);
                    }
                }
                acc += w * nodes_v[lo + a];
            }
            *slot = acc;
        }
    }
    // Moments of a measure on [0, 1] are strictly decreasing.
    for n in 0..top {
        if log_c[n + 1] >= log_c[n] {
            return Err(Error::Internal(format!("moments not strictly decreasing at n={n}")));
        }
    }
    let ratio: Vec<f64> = (0..=trunc).map(|n| (log_c[n] - log_c[n + 1]).exp()).collect();
    Ok(MomentTable { log_c, ratio, trunc, quad_error: quad_tol })
}

/// Process-wide cache of moment tables at the default quadrature tolerance.
fn cached_moments(trunc: usize) -> Result<Arc<MomentTable>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<MomentTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    {
        let guard = cache.lock().unwrap();
        if let Some(t) = guard.get(&trunc) {
            return Ok(Arc::clone(t));
        }
    }
    let table = Arc::new(weighted_bergman_moments(trunc, DEFAULT_QUAD_TOL)?);
    cache.lock().unwrap().insert(trunc, Arc::clone(&table));
    Ok(table)
}

/// Convenience: evaluate the Gram-style kernel value `k(p_j, p_i)` used by
/// downstream matrix builders (the row index conjugates).
pub fn eval_grid(spec: &KernelSpec, pts: &[Point]) -> Result<Vec<Vec<Complex64>>> {
    check_dim(pts, spec.dim())?;
    let n = pts.len();
    let mut out = vec![vec![Complex64::ZERO; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = spec.eval(&pts[j], &pts[i])?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn all_disc_families() -> Vec<KernelSpec> {
        vec![
            KernelSpec::szego(),
            KernelSpec::power(0.5).unwrap(),
            KernelSpec::dirichlet(),
            KernelSpec::kaluza(1.0).unwrap(),
            KernelSpec::kaluza(2.0).unwrap(),
            KernelSpec::bergman_power(2.0).unwrap(),
            KernelSpec::weighted_bergman_exp(4000).unwrap(),
        ]
    }

    #[test]
    fn szego_half() {
        let k = KernelSpec::szego();
        let p = Point::real(0.5).unwrap();
        let v = k.eval(&p, &p).unwrap();
        assert_relative_eq!(v.re, 4.0 / 3.0, max_relative = 1e-15);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn normalization_at_origin() {
        let o = Point::origin(1);
        let z = Point::disc(0.3, -0.4).unwrap();
        for k in all_disc_families() {
            let v = k.eval(&z, &o).unwrap();
            assert_relative_eq!(v.re, 1.0, max_relative = 1e-12);
            assert!(v.im.abs() < 1e-12);
            let v = k.eval(&o, &z).unwrap();
            assert_relative_eq!(v.re, 1.0, max_relative = 1e-12);
        }
        let da = KernelSpec::drury_arveson(2).unwrap();
        let z2 = Point::new(vec![Complex64::new(0.3, 0.1), Complex64::new(0.0, 0.5)]).unwrap();
        assert_eq!(da.eval(&z2, &Point::origin(2)).unwrap(), Complex64::ONE);
    }

    #[test]
    fn dirichlet_closed_form_and_series_switch() {
        let k = KernelSpec::dirichlet();
        let p = Point::real(0.5).unwrap();
        let v = k.eval(&p, &p).unwrap();
        assert_relative_eq!(v.re, -(0.75f64.ln()) / 0.25, max_relative = 1e-14);
        assert_relative_eq!(v.re, 1.150728289807123, max_relative = 1e-12);
        // Series branch (|x| < 1e-4) agrees with the closed form at the
        // same point to rounding accuracy.
        let x = Complex64::new(0.99e-4, 0.0);
        let series = dirichlet_of(x);
        let closed = -(Complex64::ONE - x).ln() / x;
        assert!((series - closed).norm() < 1e-10);
        assert_eq!(dirichlet_of(Complex64::ZERO), Complex64::ONE);
    }

    #[test]
    fn norm_sq_examples() {
        let k = KernelSpec::szego();
        assert_relative_eq!(k.norm_sq(&Point::real(0.8).unwrap()).unwrap(), 1.0 / 0.36, max_relative = 1e-14);
        for f in all_disc_families() {
            assert_eq!(f.norm_sq(&Point::origin(1)).unwrap(), 1.0);
        }
        // Kaluza alpha=2 at 0.9 against a direct series oracle.
        let k2 = KernelSpec::kaluza(2.0).unwrap();
        let mut oracle = 0.0f64;
        let x: f64 = 0.81;
        let mut xp = 1.0;
        for n in 0..3000 {
            oracle += xp / ((n + 1) as f64).powi(2);
            xp *= x;
        }
        assert_relative_eq!(k2.norm_sq(&Point::real(0.9).unwrap()).unwrap(), oracle, max_relative = 1e-11);
    }

    #[test]
    fn dh_examples() {
        let k = KernelSpec::szego();
        let o = Point::origin(1);
        let h = Point::real(0.5).unwrap();
        assert_relative_eq!(k.dh(&o, &h).unwrap(), 0.5, max_relative = 1e-14);
        assert_eq!(k.dh(&h, &h).unwrap(), 0.0);
        let z = Point::real(0.9375).unwrap();
        let w = Point::disc(0.9375, 0.03125).unwrap();
        let pseudo = ((z.z() - w.z()) / (Complex64::ONE - w.z().conj() * z.z())).norm();
        assert_relative_eq!(k.dh(&z, &w).unwrap(), pseudo, max_relative = 1e-12);
        assert!((k.dh(&z, &w).unwrap() - 0.2508).abs() < 5e-4);
    }

    #[test]
    fn b_inner_examples() {
        let k = KernelSpec::szego();
        let h = Point::real(0.5).unwrap();
        assert_relative_eq!(k.b_inner(&h, &h).unwrap().re, 0.25, max_relative = 1e-14);
        assert_eq!(k.b_inner(&h, &Point::origin(1)).unwrap(), Complex64::ZERO);
        let da = KernelSpec::drury_arveson(2).unwrap();
        let z = Point::new(vec![Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)]).unwrap();
        assert_relative_eq!(da.b_inner(&z, &z).unwrap().re, 0.5, max_relative = 1e-14);
        assert!(matches!(
            KernelSpec::bergman_power(2.0).unwrap().b_inner(&h, &h),
            Err(Error::NonCnpKernel { .. })
        ));
    }

    #[test]
    fn hermitian_symmetry_spot() {
        let z = Point::disc(0.3, 0.4).unwrap();
        let w = Point::disc(-0.5, 0.2).unwrap();
        for k in all_disc_families() {
            let a = k.eval(&z, &w).unwrap();
            let b = k.eval(&w, &z).unwrap();
            assert!((a - b.conj()).norm() < 1e-12 * (1.0 + a.norm()), "{}", k.family_name());
        }
    }

    #[test]
    fn kaluza_fixed_trunc_tail_enforced() {
        let k = KernelSpec::kaluza_trunc(1.0, 5).unwrap();
        let p = Point::real(0.9).unwrap();
        assert!(matches!(k.eval(&p, &p), Err(Error::TailBoundNotMet { .. })));
        let k = KernelSpec::kaluza_trunc(1.0, 400).unwrap();
        assert!(k.eval(&p, &p).is_ok());
    }

    #[test]
    fn moments_basic() {
        let t = weighted_bergman_moments(64, 1e-11).unwrap();
        // c_0 against a plain midpoint Riemann oracle.
        let m = 200_000;
        let mut c0 = 0.0;
        for i in 0..m {
            let u = (i as f64 + 0.5) / m as f64;
            c0 += (-1.0 / u).exp() / m as f64;
        }
        assert_relative_eq!(t.c(0), c0, max_relative = 1e-8);
        for n in 0..=64 {
            assert!(t.c(n + 1) < t.c(n));
        }
    }

    #[test]
    fn moment_interpolation_matches_direct_quadrature() {
        let t = weighted_bergman_moments(20_000, 1e-11).unwrap();
        for n in [1500usize, 2345, 7777, 12_000, 19_999, 20_001] {
            let exact = log_moment(n, 1e-12).unwrap();
            // Absolute error in the log is relative error in the moment.
            assert!(
                (t.log_c(n) - exact).abs() < 1e-8 * (1.0 + exact.abs()),
                "n={n}: interp {} vs exact {}",
                t.log_c(n),
                exact
            );
        }
    }

    #[test]
    fn wbe_eval_against_direct_sum() {
        // Direct per-term summation oracle at moderate |x|.
        let trunc = 4000;
        let t = weighted_bergman_moments(trunc, 1e-11).unwrap();
        let spec = KernelSpec::weighted_bergman_exp(trunc).unwrap();
        let z = Point::disc(0.52, -0.31).unwrap();
        let w = Point::disc(0.6, 0.2).unwrap();
        let x = z.z() * w.z().conj();
        let mut oracle = Complex64::ZERO;
        let mut xp = Complex64::ONE;
        for n in 0..=trunc {
            oracle += xp * (t.log_c(0) - t.log_c(n)).exp();
            xp *= x;
        }
        let got = spec.eval(&z, &w).unwrap();
        assert!((got - oracle).norm() < 1e-10 * (1.0 + oracle.norm()));
    }

    #[test]
    fn normalized_eval_is_identity_for_builtins() {
        let z = Point::disc(0.3, 0.2).unwrap();
        let w = Point::disc(-0.1, 0.6).unwrap();
        for k in all_disc_families() {
            let a = k.eval(&z, &w).unwrap();
            let b = k.normalized_eval(&z, &w).unwrap();
            assert!((a - b).norm() <= 1e-10 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(KernelSpec::power(0.0).is_err());
        assert!(KernelSpec::power(1.2).is_err());
        assert!(KernelSpec::bergman_power(1.0).is_err());
        assert!(KernelSpec::kaluza(-0.5).is_err());
        assert!(KernelSpec::drury_arveson(0).is_err());
        assert!(KernelSpec::szego().with_tail_tol(0.0).is_err());
    }

    #[test]
    fn dimension_checks() {
        let da = KernelSpec::drury_arveson(2).unwrap();
        let p1 = Point::real(0.5).unwrap();
        assert!(matches!(da.eval(&p1, &p1), Err(Error::DimensionMismatch { .. })));
        let sz = KernelSpec::szego();
        let p2 = Point::new(vec![Complex64::new(0.1, 0.0), Complex64::new(0.1, 0.0)]).unwrap();
        assert!(matches!(sz.eval(&p2, &p2), Err(Error::DimensionMismatch { .. })));
    }
}
