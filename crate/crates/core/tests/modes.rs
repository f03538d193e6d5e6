use approx::assert_abs_diff_eq;
use gravtritter::modes::{
    inner_product, make_comb, norm, orthonormalize_pair, redshift_transform, ModeProfile,
};
use num_complex::Complex64;
use proptest::prelude::*;

/// ⟨g(ω1,σ1,α), g(ω2,σ2,β)⟩ over the whole real line.
fn gaussian_overlap(w1: f64, s1: f64, a: f64, w2: f64, s2: f64, b: f64) -> Complex64 {
    let ss = s1 * s1 + s2 * s2;
    let modulus = (2.0 * s1 * s2 / ss).sqrt() * (-(w1 - w2).powi(2) / (4.0 * ss)).exp();
    Complex64::from_polar(modulus, b - a)
}

const CHIS: [f64; 5] = [0.5, 0.9, 1.0, 1.1, 2.0];

fn sample_comb() -> ModeProfile {
    make_comb(&[
        (Complex64::new(1.0, 0.0), 95.0, 0.7),
        (Complex64::new(-0.5, 0.3), 100.0, 1.2),
        (Complex64::new(0.2, -0.8), 104.5, 0.9),
    ])
    .unwrap()
    .normalize()
    .unwrap()
}

#[test]
fn unequal_width_overlap_matches_closed_form() {
    let cases = [
        (100.0, 1.0, 0.0, 101.5, 2.0, 0.3),
        (50.0, 0.5, 1.0, 50.0, 0.7, -0.4),
        (80.0, 3.0, 0.0, 90.0, 2.5, 0.0),
    ];
    for (w1, s1, a, w2, s2, b) in cases {
        let f = ModeProfile::gaussian(w1, s1, a).unwrap();
        let g = ModeProfile::gaussian(w2, s2, b).unwrap();
        let got = inner_product(&f, &g).unwrap();
        let want = gaussian_overlap(w1, s1, a, w2, s2, b);
        assert!((got - want).norm() < 1e-10, "{got} vs {want}");
    }
}

#[test]
fn redshifted_overlap_oracle() {
    // F1 at 100, σ = 1, redshifted with χ² = 1.02
    let f1 = ModeProfile::gaussian(100.0, 1.0, 0.0).unwrap();
    let chi = 1.02_f64.sqrt();
    let f1p = redshift_transform(&f1, chi).unwrap();
    let o11 = inner_product(&f1p, &f1).unwrap();
    assert_abs_diff_eq!(o11.re, 0.6125051000404553, epsilon = 1e-9);
    assert_abs_diff_eq!(o11.im, 0.0, epsilon = 1e-12);

    let f2 = ModeProfile::gaussian(104.0, 1.0, 0.0).unwrap();
    let f2p = redshift_transform(&f2, chi).unwrap();
    let o22 = inner_product(&f2p, &f2).unwrap();
    assert_abs_diff_eq!(o22.re, 0.5884930462546003, epsilon = 1e-9);
}

#[test]
fn norm_preserved_for_every_kind() {
    let gauss = ModeProfile::gaussian(100.0, 1.5, 0.2).unwrap();
    let comb = sample_comb();
    let omega: Vec<f64> = (0..=400).map(|i| 90.0 + 0.05 * i as f64).collect();
    let values: Vec<Complex64> = omega
        .iter()
        .map(|&w| Complex64::from_polar((-(w - 100.0).powi(2) / 8.0).exp(), 0.1 * w))
        .collect();
    let tab = ModeProfile::tabulated(omega, values).unwrap();

    for f in [&gauss, &comb, &tab] {
        let n0 = norm(f).unwrap();
        for chi in CHIS {
            let n = norm(&redshift_transform(f, chi).unwrap()).unwrap();
            assert!((n - n0).abs() < 1e-8, "χ={chi}: {n} vs {n0}");
        }
    }
}

#[test]
fn gaussian_transform_agrees_with_closed_form() {
    let (w0, s) = (100.0, 1.0);
    let f = ModeProfile::gaussian(w0, s, 0.0).unwrap();
    for chi in CHIS {
        let fp = redshift_transform(&f, chi).unwrap();
        let c2 = chi * chi;
        let got = inner_product(&fp, &f).unwrap();
        let want = gaussian_overlap(w0 / c2, s / c2, 0.0, w0, s, 0.0);
        assert!((got - want).norm() < 1e-8, "χ={chi}");
    }
}

#[test]
fn comb_pair_inner_products_preserved() {
    let a = sample_comb();
    let b = make_comb(&[
        (Complex64::new(0.4, 0.0), 97.0, 1.0),
        (Complex64::new(0.0, 1.0), 102.0, 0.8),
    ])
    .unwrap();
    let g = ModeProfile::gaussian(99.0, 2.0, 0.0).unwrap();
    let base_ab = inner_product(&a, &b).unwrap();
    let base_ag = inner_product(&a, &g).unwrap();
    for chi in CHIS {
        let ap = redshift_transform(&a, chi).unwrap();
        let bp = redshift_transform(&b, chi).unwrap();
        let gp = redshift_transform(&g, chi).unwrap();
        assert!((inner_product(&ap, &bp).unwrap() - base_ab).norm() < 1e-8);
        assert!((inner_product(&ap, &gp).unwrap() - base_ag).norm() < 1e-8);
    }
}

#[test]
fn orthonormalized_pair_is_orthonormal() {
    let f1 = ModeProfile::gaussian(100.0, 1.0, 0.0).unwrap();
    let f2 = ModeProfile::gaussian(102.0, 1.3, 0.5).unwrap();
    let (e1, e2) = orthonormalize_pair(&f1, &f2).unwrap();
    assert_abs_diff_eq!(norm(&e1).unwrap(), 1.0, epsilon = 1e-10);
    assert_abs_diff_eq!(norm(&e2).unwrap(), 1.0, epsilon = 1e-10);
    assert!(inner_product(&e1, &e2).unwrap().norm() < 1e-10);
}

#[test]
fn orthonormalizing_parallel_modes_fails() {
    let f1 = ModeProfile::gaussian(100.0, 1.0, 0.0).unwrap();
    let f2 = f1.scaled(Complex64::new(0.0, 2.0));
    assert!(orthonormalize_pair(&f1, &f2).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn redshift_preserves_inner_products(
        w1 in 40.0..120.0f64, s1 in 0.3..3.0f64, a in -3.0..3.0f64,
        w2 in 40.0..120.0f64, s2 in 0.3..3.0f64, b in -3.0..3.0f64,
        chi in 0.5..2.0f64,
    ) {
        let f = ModeProfile::gaussian(w1, s1, a).unwrap();
        let g = ModeProfile::gaussian(w2, s2, b).unwrap();
        let before = inner_product(&f, &g).unwrap();
        let after = inner_product(
            &redshift_transform(&f, chi).unwrap(),
            &redshift_transform(&g, chi).unwrap(),
        ).unwrap();
        prop_assert!((before - after).norm() < 1e-8);
        prop_assert!((before - gaussian_overlap(w1, s1, a, w2, s2, b)).norm() < 1e-8);
    }

    #[test]
    fn cauchy_schwarz(
        c1 in 60.0..100.0f64, c2 in 60.0..100.0f64,
        r in -1.0..1.0f64, i in -1.0..1.0f64, width in 0.3..2.0f64,
    ) {
        let f = make_comb(&[(Complex64::new(1.0, 0.0), c1, width), (Complex64::new(r, i), c2, 1.0)]).unwrap();
        let g = ModeProfile::gaussian(80.0, 4.0, 0.0).unwrap();
        let lhs = inner_product(&f, &g).unwrap().norm();
        prop_assert!(lhs <= norm(&f).unwrap() * norm(&g).unwrap() + 1e-10);
    }

    #[test]
    fn inner_product_is_conjugate_symmetric(
        w in 50.0..150.0f64, s in 0.5..2.0f64, p in -3.0..3.0f64, chi in 0.8..1.25f64,
    ) {
        let f = ModeProfile::gaussian(w, s, p).unwrap();
        let g = redshift_transform(&ModeProfile::gaussian(100.0, 1.0, 0.0).unwrap(), chi).unwrap();
        let fg = inner_product(&f, &g).unwrap();
        let gf = inner_product(&g, &f).unwrap();
        prop_assert!((fg - gf.conj()).norm() < 1e-12);
    }
}
