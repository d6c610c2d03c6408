//! Bundled example sequences and the associated finite-scale experiments:
//! greedy extraction of interpolating subsequences, the essential-normality
//! lower bound `1 - d_H^2`, and companion-sequence construction at a
//! prescribed separation band.

use crate::error::{Error, Result};
use crate::grammian;
use crate::kernels::KernelSpec;
use crate::point::{check_pairwise_distinct, Point};
use serde::{Deserialize, Serialize};

/// Kinds of generated sequences.
///
/// `example55_*` use `z_j = 1 - 2^{-j}` and `w_j = z_j + i 2^{-5j/4}`.
/// Since `w_0 = i` lies on the unit circle, the `w` and `union` kinds start
/// at `j = 1`; the union interleaves `z_1, w_1, z_2, w_2, ...`.
#[derive(Debug, Clone, PartialEq)]
pub enum SeqKind {
    Geometric { ratio: f64 },
    Example55Z,
    Example55W,
    Example55Union,
    Custom { points: Vec<Point> },
}

/// Specification of a deterministic point sequence of length `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeqSpec {
    pub kind: SeqKind,
    pub n: usize,
}

#[derive(Serialize, Deserialize)]
struct SeqRepr {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio: Option<f64>,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<Vec<Point>>,
}

impl Serialize for SeqSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (kind, ratio, points) = match &self.kind {
            SeqKind::Geometric { ratio } => ("geometric", Some(*ratio), None),
            SeqKind::Example55Z => ("example55_z", None, None),
            SeqKind::Example55W => ("example55_w", None, None),
            SeqKind::Example55Union => ("example55_union", None, None),
            SeqKind::Custom { points } => ("custom", None, Some(points.clone())),
        };
        SeqRepr { kind: kind.into(), ratio, n: self.n, points }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SeqSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let r = SeqRepr::deserialize(d)?;
        let kind = match r.kind.as_str() {
            "geometric" => SeqKind::Geometric {
                ratio: r.ratio.ok_or_else(|| DeError::custom("geometric requires \"ratio\""))?,
            },
            "example55_z" => SeqKind::Example55Z,
            "example55_w" => SeqKind::Example55W,
            "example55_union" => SeqKind::Example55Union,
            "custom" => SeqKind::Custom {
                points: r.points.ok_or_else(|| DeError::custom("custom requires \"points\""))?,
            },
            other => return Err(DeError::custom(format!("unknown sequence kind {other:?}"))),
        };
        Ok(SeqSpec { kind, n: r.n })
    }
}

impl SeqSpec {
    pub fn geometric(ratio: f64, n: usize) -> Self {
        SeqSpec { kind: SeqKind::Geometric { ratio }, n }
    }

    pub fn example55_z(n: usize) -> Self {
        SeqSpec { kind: SeqKind::Example55Z, n }
    }

    pub fn example55_w(n: usize) -> Self {
        SeqSpec { kind: SeqKind::Example55W, n }
    }

    pub fn example55_union(n: usize) -> Self {
        SeqSpec { kind: SeqKind::Example55Union, n }
    }
}

fn ex55_z(j: u32) -> Result<Point> {
    Point::real(1.0 - 0.5f64.powi(j as i32))
}

fn ex55_w(j: u32) -> Result<Point> {
    Point::disc(1.0 - 0.5f64.powi(j as i32), 2.0f64.powf(-1.25 * j as f64))
}

/// Generates the first `n` points of a sequence; deterministic, admissible,
/// and pairwise distinct.
pub fn gen(s: &SeqSpec) -> Result<Vec<Point>> {
    if s.n == 0 {
        return Err(Error::TooFewPoints { need: 1, got: 0 });
    }
    let pts: Vec<Point> = match &s.kind {
        SeqKind::Geometric { ratio } => {
            if !(*ratio > 0.0 && *ratio < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "geometric ratio {ratio} must lie in (0, 1)"
                )));
            }
            (0..s.n as u32)
                .map(|j| Point::real(1.0 - ratio.powi(j as i32)))
                .collect::<Result<_>>()?
        }
        SeqKind::Example55Z => (0..s.n as u32).map(ex55_z).collect::<Result<_>>()?,
        SeqKind::Example55W => (1..=s.n as u32).map(ex55_w).collect::<Result<_>>()?,
        SeqKind::Example55Union => {
            let mut v = Vec::with_capacity(s.n);
            let mut j = 1u32;
            while v.len() < s.n {
                v.push(ex55_z(j)?);
                if v.len() < s.n {
                    v.push(ex55_w(j)?);
                }
                j += 1;
            }
            v
        }
        SeqKind::Custom { points } => {
            if points.len() < s.n {
                return Err(Error::TooFewPoints { need: s.n, got: points.len() });
            }
            points[..s.n].to_vec()
        }
    };
    check_pairwise_distinct(&pts)?;
    Ok(pts)
}

/// Greedily extracts `target_count` indices whose normalized Gram satisfies
/// the Riesz-sequence certificate `||G[C, C] - I|| <= 1/2`.
///
/// Candidates are scanned in order of decreasing `||s_lambda||^2` (ties by
/// index): when kernel norms grow without bound, normalized kernels of
/// large-norm points are nearly orthogonal to any fixed finite set, so the
/// greedy scan succeeds whenever the input allows it at all. Fails with a
/// diagnostic when the input is exhausted first (for instance under a
/// bounded kernel such as `kaluza` with `alpha > 1`).
pub fn subsequence_riesz(
    spec: &KernelSpec,
    pts: &[Point],
    target_count: usize,
) -> Result<Vec<usize>> {
    if !spec.is_cnp() {
        return Err(Error::NonCnpKernel { family: spec.family_name().into() });
    }
    if target_count == 0 || pts.len() < target_count {
        return Err(Error::TooFewPoints { need: target_count.max(1), got: pts.len() });
    }
    check_pairwise_distinct(pts)?;

    let mut order: Vec<usize> = (0..pts.len()).collect();
    let norms: Vec<f64> = pts.iter().map(|p| spec.norm_sq(p)).collect::<Result<_>>()?;
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap().then(a.cmp(&b)));

    let mut selected: Vec<usize> = Vec::new();
    for idx in order {
        let mut trial = selected.clone();
        trial.push(idx);
        trial.sort_unstable();
        let sub: Vec<Point> = trial.iter().map(|&i| pts[i].clone()).collect();
        let g = grammian::gram(spec, &sub)?;
        if g.norm_minus_identity() <= 0.5 {
            selected = trial;
            if selected.len() == target_count {
                break;
            }
        }
    }
    if selected.len() < target_count {
        return Err(Error::SearchFailed(format!(
            "greedy Riesz extraction reached only {} of {} indices (kernel norms may be bounded: \
             max ||s||^2 = {:.6})",
            selected.len(),
            target_count,
            norms.iter().cloned().fold(0.0, f64::max),
        )));
    }
    // Independent re-verification of the certificate.
    let sub: Vec<Point> = selected.iter().map(|&i| pts[i].clone()).collect();
    let cert = grammian::gram(spec, &sub)?.norm_minus_identity();
    if cert > 0.5 {
        return Err(Error::Internal(format!("Riesz certificate re-check failed: {cert}")));
    }
    Ok(selected)
}

/// Per-index essential-normality lower bound `1 - d_H(z_n, w_n)^2`, the
/// squared modulus of the normalized-kernel inner product.
pub fn essnormal_bound(spec: &KernelSpec, zs: &[Point], ws: &[Point]) -> Result<Vec<f64>> {
    if zs.len() != ws.len() {
        return Err(Error::DimensionMismatch { expected: zs.len(), got: ws.len() });
    }
    zs.iter()
        .zip(ws)
        .map(|(z, w)| {
            let d = spec.dh(z, w)?;
            Ok(1.0 - d * d)
        })
        .collect()
}

/// For each `z_n`, bisects along the vertical ray `z_n + i t` for a
/// companion point with `d_H` strictly inside `(delta, 2 delta)`.
pub fn companion_sequence(spec: &KernelSpec, zs: &[Point], delta: f64) -> Result<Vec<Point>> {
    if !spec.is_cnp() {
        return Err(Error::NonCnpKernel { family: spec.family_name().into() });
    }
    if spec.dim() != 1 {
        return Err(Error::InvalidParameter("companion search requires the disc (d = 1)".into()));
    }
    if !(delta > 0.0 && 2.0 * delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta {delta} must satisfy 0 < 2 delta < 1")));
    }
    let target = 1.5 * delta;
    let mut out = Vec::with_capacity(zs.len());
    for (n, z) in zs.iter().enumerate() {
        let a = z.z().re;
        let b = z.z().im;
        // Largest t keeping z + i t strictly inside the disc.
        let t_max = (-b + (1.0 - a * a).max(0.0).sqrt()) * (1.0 - 1e-12);
        if !(t_max > 0.0) {
            return Err(Error::SearchFailed(format!(
                "index {n}: vertical ray exits the disc immediately"
            )));
        }
        let at = |t: f64| -> Result<(Point, f64)> {
            let p = Point::disc(a, b + t)?;
            let d = spec.dh(z, &p)?;
            Ok((p, d))
        };
        // Grow to bracket the target band.
        let mut hi = (t_max * 1e-3).min(t_max * 0.5);
        let mut d_hi;
        loop {
            d_hi = at(hi)?.1;
            if d_hi >= target {
                break;
            }
            if hi >= t_max * (1.0 - 1e-9) {
                // The ray saturates inside the disc; accept only if the
                // endpoint already sits strictly inside the band.
                if d_hi > delta && d_hi < 2.0 * delta {
                    break;
                }
                return Err(Error::SearchFailed(format!(
                    "index {n}: ray exits the disc at d_H = {d_hi:.6}, below the band ({delta}, {})",
                    2.0 * delta
                )));
            }
            hi = (hi * 2.0).min(t_max);
        }
        let (point, dh) = if d_hi < target {
            at(hi)?
        } else {
            let mut lo = 0.0f64;
            for _ in 0..200 {
                let t = 0.5 * (lo + hi);
                let d = at(t)?.1;
                if d < target {
                    lo = t;
                } else {
                    hi = t;
                }
                if hi - lo < 1e-14 * (1.0 + t) {
                    break;
                }
            }
            at(0.5 * (lo + hi))?
        };
        if !(dh > delta && dh < 2.0 * delta) {
            return Err(Error::SearchFailed(format!(
                "index {n}: bisection landed at d_H = {dh:.6}, outside ({delta}, {})",
                2.0 * delta
            )));
        }
        out.push(point);
    }
    Ok(out)
}
