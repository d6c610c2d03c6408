//! Property-based invariants: kernel symmetry and normalization, metric
//! axioms, embedding inequalities, Gram spectral facts, and feasibility
//! monotonicity — all on seeded random data for reproducibility.

use nalgebra::DMatrix;
use num_complex::Complex64;
use pickspace::grammian;
use pickspace::kernels::KernelSpec;
use pickspace::linalg::HermitianMatrix;
use pickspace::pick::{self, PickProblem};
use pickspace::Point;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn disc_families() -> Vec<KernelSpec> {
    vec![
        KernelSpec::szego(),
        KernelSpec::power(0.5).unwrap(),
        KernelSpec::dirichlet(),
        KernelSpec::kaluza(1.0).unwrap(),
        KernelSpec::bergman_power(2.0).unwrap(),
        KernelSpec::weighted_bergman_exp(60_000).unwrap(),
    ]
}

fn cnp_disc_families() -> Vec<KernelSpec> {
    vec![
        KernelSpec::szego(),
        KernelSpec::power(0.5).unwrap(),
        KernelSpec::dirichlet(),
        KernelSpec::kaluza(1.0).unwrap(),
    ]
}

fn random_disc_point(rng: &mut ChaCha8Rng, rmax: f64) -> Point {
    let r = rmax * rng.gen::<f64>().sqrt();
    let th = rng.gen::<f64>() * std::f64::consts::TAU;
    Point::disc(r * th.cos(), r * th.sin()).unwrap()
}

fn random_ball_point(rng: &mut ChaCha8Rng, d: usize, rmax: f64) -> Point {
    loop {
        let coords: Vec<Complex64> = (0..d)
            .map(|_| Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0))
            .collect();
        let norm: f64 = coords.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1.0 {
            let scale = Complex64::new(rmax * norm.max(1e-3) / norm, 0.0);
            let scaled: Vec<Complex64> = coords.iter().map(|c| c * scale / norm.max(1e-3) * norm).collect();
            if let Ok(p) = Point::new(scaled) {
                return p;
            }
        }
    }
}

fn distinct_points(rng: &mut ChaCha8Rng, n: usize, rmax: f64) -> Vec<Point> {
    let mut pts: Vec<Point> = Vec::new();
    while pts.len() < n {
        let p = random_disc_point(rng, rmax);
        // Keep the sets well separated so boundary Pick problems stay
        // well-conditioned for the dual-oracle cross-checks.
        if pts.iter().all(|q| (q.z() - p.z()).norm() > 5e-2) {
            pts.push(p);
        }
    }
    pts
}

#[test]
fn hermitian_symmetry_and_normalization() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let origin = Point::origin(1);
    for spec in disc_families() {
        for _ in 0..200 {
            let z = random_disc_point(&mut rng, 0.95);
            let w = random_disc_point(&mut rng, 0.95);
            let a = spec.eval(&z, &w).unwrap();
            let b = spec.eval(&w, &z).unwrap();
            assert!((a - b.conj()).norm() <= 1e-12 * (1.0 + a.norm()), "{}", spec.family_name());
            let at_origin = spec.eval(&z, &origin).unwrap();
            assert!((at_origin - Complex64::ONE).norm() < 1e-11, "{}", spec.family_name());
        }
    }
    let da = KernelSpec::drury_arveson(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let z = random_ball_point(&mut rng, 2, 0.9);
        let w = random_ball_point(&mut rng, 2, 0.9);
        let a = da.eval(&z, &w).unwrap();
        let b = da.eval(&w, &z).unwrap();
        assert!((a - b.conj()).norm() <= 1e-12 * (1.0 + a.norm()));
        assert_eq!(da.eval(&z, &Point::origin(2)).unwrap(), Complex64::ONE);
    }
}

#[test]
fn dh_triangle_inequality() {
    for spec in disc_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..1000 {
            let x = random_disc_point(&mut rng, 0.9);
            let y = random_disc_point(&mut rng, 0.9);
            let z = random_disc_point(&mut rng, 0.9);
            let dxz = spec.dh(&x, &z).unwrap();
            let dxy = spec.dh(&x, &y).unwrap();
            let dyz = spec.dh(&y, &z).unwrap();
            assert!(
                dxz <= dxy + dyz + 1e-10,
                "{}: {dxz} > {dxy} + {dyz}",
                spec.family_name()
            );
        }
    }
}

#[test]
fn b_embedding_cauchy_schwarz_and_consistency() {
    for spec in cnp_disc_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..300 {
            let z = random_disc_point(&mut rng, 0.95);
            let w = random_disc_point(&mut rng, 0.95);
            let bzz = spec.b_inner(&z, &z).unwrap().re;
            let bww = spec.b_inner(&w, &w).unwrap().re;
            let bzw = spec.b_inner(&z, &w).unwrap();
            assert!((0.0..1.0).contains(&bzz), "{}: b(z,z)={bzz}", spec.family_name());
            assert!(bzw.norm_sqr() <= bzz * bww + 1e-10);
            // 1/(1 - <b(z), b(w)>) reproduces the kernel.
            let recon = (Complex64::ONE - bzw).inv();
            let k = spec.eval(&z, &w).unwrap();
            assert!((recon - k).norm() <= 1e-10 * (1.0 + k.norm()));
        }
    }
}

#[test]
fn gram_psd_on_random_sets() {
    for spec in cnp_disc_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for &n in &[8usize, 24, 64] {
            let pts = distinct_points(&mut rng, n, 0.9);
            let g = grammian::gram(&spec, &pts).unwrap();
            let (lmin, lmax) = g.spectral_bounds();
            assert!(lmin >= -1e-10 * lmax.max(1.0), "{}: n={n} lmin={lmin}", spec.family_name());
        }
    }
}

#[test]
fn eigenvalue_interlacing_under_point_addition() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for spec in cnp_disc_families() {
        let pts = distinct_points(&mut rng, 12, 0.9);
        let mut prev: Option<(f64, f64)> = None;
        for n in 2..=12 {
            let g = grammian::gram(&spec, &pts[..n]).unwrap();
            let (lmin, lmax) = g.spectral_bounds();
            if let Some((pmin, pmax)) = prev {
                assert!(lmin <= pmin + 1e-10, "{}: lmin grew", spec.family_name());
                assert!(lmax >= pmax - 1e-10, "{}: lmax shrank", spec.family_name());
            }
            prev = Some((lmin, lmax));
        }
    }
}

#[test]
fn separation_identity_with_offdiagonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for spec in disc_families() {
        let pts = distinct_points(&mut rng, 8, 0.9);
        let sep = grammian::separation(&spec, &pts).unwrap();
        let g = grammian::gram(&spec, &pts).unwrap();
        let max_off = grammian::max_offdiag_mod(&g);
        assert!(
            (sep * sep - (1.0 - max_off * max_off)).abs() <= 1e-10,
            "{}: sep={sep} off={max_off}",
            spec.family_name()
        );
    }
}

#[test]
fn strong_separation_below_separation() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    for _ in 0..20 {
        let pts = distinct_points(&mut rng, 7, 0.9);
        let ss = grammian::strong_separation_h2(&pts).unwrap();
        let s = grammian::separation(&KernelSpec::szego(), &pts).unwrap();
        assert!(ss <= s + 1e-12, "ss={ss} s={s}");
    }
}

#[test]
fn partition_classes_always_certified() {
    let mut rng = ChaCha8Rng::seed_from_u64(81);
    for trial in 0..10 {
        let n = 6 + (trial % 6);
        let pts = distinct_points(&mut rng, n, 0.92);
        let g = grammian::gram(&KernelSpec::szego(), &pts).unwrap();
        let bound = 0.5;
        let classes = grammian::partition_interpolating(&g, bound).unwrap();
        let mut seen = vec![false; n];
        for c in &classes {
            for &i in c {
                assert!(!seen[i]);
                seen[i] = true;
            }
            let sub = g.principal_submatrix(c);
            assert!(sub.norm_minus_identity() <= bound + 1e-12);
        }
        assert!(seen.iter().all(|&x| x));
    }
}

fn random_problem(rng: &mut ChaCha8Rng, spec: &KernelSpec, n: usize) -> PickProblem {
    let nodes = distinct_points(rng, n, 0.85);
    let targets: Vec<Complex64> = (0..n)
        .map(|_| {
            let r = 0.9 * rng.gen::<f64>();
            let th = rng.gen::<f64>() * std::f64::consts::TAU;
            Complex64::from_polar(r, th)
        })
        .collect();
    PickProblem::single(spec.clone(), nodes, targets).unwrap()
}

#[test]
fn feasibility_monotone_in_rho_and_lower_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    for spec in cnp_disc_families() {
        for _ in 0..10 {
            let p = random_problem(&mut rng, &spec, 5);
            let r = pick::min_norm(&p).unwrap();
            let wmax = p.targets.iter().map(|w| w.norm()).fold(0.0, f64::max);
            assert!(r.rho_min >= wmax - 1e-9, "{}: {} < {wmax}", spec.family_name(), r.rho_min);
            // Feasible at rho_min * 1.01 and every larger budget tested.
            for f in [1.01, 1.5, 4.0] {
                let m = pick::pick_matrix(&p, f * r.rho_min.max(1e-6)).unwrap();
                let (lmin, lmax) = m.spectral_bounds();
                assert!(lmin >= -1e-10 * (1.0 + lmax.max(0.0)));
            }
        }
    }
}

#[test]
fn node_monotonicity_of_min_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for spec in cnp_disc_families() {
        let full = random_problem(&mut rng, &spec, 7);
        let mut prev = 0.0f64;
        for n in 1..=7 {
            let p = PickProblem::single(
                spec.clone(),
                full.nodes[..n].to_vec(),
                full.targets[..n].to_vec(),
            )
            .unwrap();
            let r = pick::min_norm(&p).unwrap();
            assert!(
                r.rho_min >= prev - 1e-8 * (1.0 + prev),
                "{}: rho_min dropped {prev} -> {}",
                spec.family_name(),
                r.rho_min
            );
            prev = r.rho_min;
        }
    }
}

#[test]
fn hermitian_matrix_rejects_asymmetry() {
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.5, 0.1),
            Complex64::new(0.9, 0.2),
            Complex64::new(1.0, 0.0),
        ],
    );
    assert!(HermitianMatrix::new(m).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// d_H is symmetric, vanishes on the diagonal, and lies in [0, 1].
    #[test]
    fn dh_metric_axioms(re in -0.9f64..0.9, im in -0.3f64..0.3, re2 in -0.9f64..0.9, im2 in -0.3f64..0.3) {
        let z = Point::disc(re, im).unwrap();
        let w = Point::disc(re2, im2).unwrap();
        for spec in cnp_disc_families() {
            let d = spec.dh(&z, &w).unwrap();
            prop_assert!((0.0..=1.0).contains(&d));
            prop_assert!((d - spec.dh(&w, &z).unwrap()).abs() < 1e-12);
            prop_assert!(spec.dh(&z, &z).unwrap() < 1e-7);
        }
    }

    /// KernelSpec JSON round-trips preserve the value exactly.
    #[test]
    fn kernel_spec_serde_round_trip(pick in 0usize..6, t in 0.1f64..1.0, alpha in 0.0f64..3.0) {
        let spec = match pick {
            0 => KernelSpec::szego(),
            1 => KernelSpec::power(t).unwrap(),
            2 => KernelSpec::dirichlet(),
            3 => KernelSpec::kaluza(alpha).unwrap(),
            4 => KernelSpec::bergman_power(1.0 + t).unwrap(),
            _ => KernelSpec::drury_arveson(2).unwrap(),
        };
        let json = serde_json::to_string(&spec).unwrap();
        let back: KernelSpec = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(format!("{:?}", back), format!("{:?}", spec));
    }
}
