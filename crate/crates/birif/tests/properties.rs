//! Property-based invariants: parser round trips, reflection algebra,
//! torus unimodularity, and pseudodistance geometry.

use num_complex::Complex64;
use proptest::prelude::*;

use birif::contact::{
    case_limit_check, cayley_to_disk, pseudo_distance_disk, pseudo_distance_halfplane, LocalModel,
};
use birif::{format_poly, parse_poly, BiPoly, Rif};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Small-integer bivariate polynomials with bounded support.
fn small_poly() -> impl Strategy<Value = BiPoly> {
    prop::collection::vec(((0u32..4, 0u32..4), -5i32..=5), 1..8).prop_filter_map(
        "nonzero polynomial",
        |terms| {
            let coeffs: Vec<((u32, u32), Complex64)> = terms
                .into_iter()
                .filter(|&(_, v)| v != 0)
                .map(|((i, j), v)| ((i, j), c(v as f64, 0.0)))
                .collect();
            if coeffs.is_empty() {
                return None;
            }
            BiPoly::from_coeffs(coeffs).ok().filter(|p| !p.is_zero())
        },
    )
}

fn torus_point() -> impl Strategy<Value = (Complex64, Complex64)> {
    (0.0..std::f64::consts::TAU, 0.0..std::f64::consts::TAU)
        .prop_map(|(s, t)| (Complex64::from_polar(1.0, s), Complex64::from_polar(1.0, t)))
}

fn disk_point() -> impl Strategy<Value = Complex64> {
    (0.0..0.95f64, 0.0..std::f64::consts::TAU)
        .prop_map(|(r, t)| Complex64::from_polar(r.sqrt() * 0.95, t))
}

fn upper_half_point() -> impl Strategy<Value = Complex64> {
    (-3.0..3.0f64, 0.01..3.0f64).prop_map(|(x, y)| c(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parser_round_trip(p in small_poly(), (z1, z2) in torus_point()) {
        let text = format_poly(&p);
        let q = parse_poly(&text).unwrap();
        let diff = (p.eval(z1, z2) - q.eval(z1, z2)).norm();
        prop_assert!(diff < 1e-9, "round trip drift {diff} for '{text}'");
    }

    #[test]
    fn reflection_is_an_involution(p in small_poly(), (z1, z2) in torus_point()) {
        let (n1, n2) = p.bidegree().unwrap();
        let r = p.reflect((n1, n2)).unwrap();
        let rr = r.reflect((n1, n2)).unwrap();
        let diff = (p.eval(z1, z2) - rr.eval(z1, z2)).norm();
        prop_assert!(diff < 1e-9 * (1.0 + p.max_coeff_norm()));
    }

    #[test]
    fn reflection_preserves_torus_modulus(p in small_poly(), (z1, z2) in torus_point()) {
        let (n1, n2) = p.bidegree().unwrap();
        let r = p.reflect((n1, n2)).unwrap();
        let a = p.eval(z1, z2).norm();
        let b = r.eval(z1, z2).norm();
        prop_assert!((a - b).abs() < 1e-9 * (1.0 + a));
    }

    #[test]
    fn rif_is_unimodular_on_torus(shift in 2.0..6.0f64, (z1, z2) in torus_point()) {
        // p = shift - z1 - z2 is stable for shift > 2; at shift = 2 the
        // singular point (1,1) is excluded by the open range.
        let p = BiPoly::from_coeffs([
            ((0, 0), c(shift, 0.0)),
            ((1, 0), c(-1.0, 0.0)),
            ((0, 1), c(-1.0, 0.0)),
        ]).unwrap();
        let rif = Rif::from_denominator(p).unwrap();
        prop_assert!((rif.eval(z1, z2).norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pseudodistance_is_cayley_invariant(z in upper_half_point(), w in upper_half_point()) {
        let dh = pseudo_distance_halfplane(z, w).unwrap();
        let dd = pseudo_distance_disk(cayley_to_disk(z).unwrap(), cayley_to_disk(w).unwrap())
            .unwrap();
        prop_assert!((dh - dd).abs() < 1e-12);
    }

    #[test]
    fn pseudodistance_is_symmetric_and_bounded(z in disk_point(), w in disk_point()) {
        let a = pseudo_distance_disk(z, w).unwrap();
        let b = pseudo_distance_disk(w, z).unwrap();
        prop_assert!((a - b).abs() < 1e-14);
        prop_assert!((0.0..1.0).contains(&a));
    }

    #[test]
    fn square_free_branches_stay_separated(
        q1 in -3i32..=3,
        q2 in -3i32..=3,
        l1 in 1u32..=4,
        l2 in 1u32..=4,
    ) {
        // Branches y = q(x) + i x^{2L} with linear leading term x, plus a
        // small higher-order perturbation; square-free pairs keep the
        // pseudodistance away from zero as x -> 0.
        // deg q must stay below 2L, so the quadratic term needs L >= 2.
        let quad = |q: i32, l: u32| {
            if l >= 2 { vec![0.0, 1.0, 0.25 * q as f64] } else { vec![0.0, 1.0] }
        };
        let b1 = (quad(q1, l1), l1);
        let b2 = (quad(q2, l2), l2);
        let model = LocalModel { branches: vec![b1, b2] };
        prop_assume!(model.is_square_free());
        let xs: Vec<f64> = (0..=20).map(|k| 1e-2 * 0.5f64.powf(k as f64 / 4.0)).collect();
        let vals = case_limit_check(&model, (0, 1), &xs).unwrap();
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!(min >= 0.5, "min pseudodistance {min}");
    }
}
