use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use gravtritter::eigen::{hermitian_eigenvalues, DenseMatrix};
use gravtritter::fock::{
    apply_mixer, evolve_two_photon, hom_record, negativity, negativity_lower_bound, occupations,
    partial_transpose, permanent, trace_out_third, FockState, Occupation,
};
use gravtritter::tritter::{build_tritter, MixerMatrix, TritterAngles};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn random_tritter(rng: &mut StdRng) -> MixerMatrix {
    build_tritter(
        &TritterAngles::new(
            rng.gen_range(0.0..=FRAC_PI_2),
            rng.gen_range(0.0..=FRAC_PI_2),
            rng.gen_range(0.0..=FRAC_PI_2),
        )
        .unwrap(),
    )
}

/// Random unitary with complex entries: a tritter dressed with phases.
fn random_unitary(rng: &mut StdRng) -> MixerMatrix {
    let t = random_tritter(rng);
    let l: Vec<Complex64> = (0..3)
        .map(|_| Complex64::from_polar(1.0, rng.gen_range(-3.0..3.0)))
        .collect();
    let r: Vec<Complex64> = (0..3)
        .map(|_| Complex64::from_polar(1.0, rng.gen_range(-3.0..3.0)))
        .collect();
    let mut m = [[Complex64::default(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = l[i] * t.get(i, j) * r[j];
        }
    }
    MixerMatrix(m)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Expands Π_i (Σ_j U_ij b_j†)^{n_i} photon by photon, without permanents.
fn expand_oracle(state: &FockState, u: &MixerMatrix) -> HashMap<Occupation, Complex64> {
    let mut out: HashMap<Occupation, Complex64> = HashMap::new();
    for (occ, &amp) in state.basis().iter().zip(state.amplitudes()) {
        if amp.norm() == 0.0 {
            continue;
        }
        let inputs: Vec<usize> = (0..3)
            .flat_map(|i| std::iter::repeat(i).take(occ[i]))
            .collect();
        let n = inputs.len();
        let norm_in: f64 = occ.iter().map(|&k| factorial(k).sqrt()).product();
        for code in 0..3usize.pow(n as u32) {
            let mut rest = code;
            let mut coeff = amp / norm_in;
            let mut target = [0usize; 3];
            for &i in &inputs {
                let j = rest % 3;
                rest /= 3;
                coeff *= u.get(i, j);
                target[j] += 1;
            }
            let norm_out: f64 = target.iter().map(|&k| factorial(k).sqrt()).product();
            *out.entry(target).or_default() += coeff * norm_out;
        }
    }
    out
}

#[test]
fn closed_form_matches_permanent_rule() {
    let mut rng = StdRng::seed_from_u64(3);
    let input = FockState::basis_state([1, 1, 0]);
    for _ in 0..1000 {
        let u = random_tritter(&mut rng);
        let a = evolve_two_photon(&u).unwrap();
        let b = apply_mixer(&input, &u).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }
}

#[test]
fn permanent_rule_matches_polynomial_expansion() {
    let mut rng = StdRng::seed_from_u64(5);
    for photons in 1..=4 {
        for _ in 0..20 {
            let basis = occupations(photons);
            let raw: Vec<Complex64> = basis
                .iter()
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let n = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let state = FockState::new(photons, raw.iter().map(|z| z / n).collect()).unwrap();
            let u = random_unitary(&mut rng);
            let out = apply_mixer(&state, &u).unwrap();
            let oracle = expand_oracle(&state, &u);
            for occ in out.basis() {
                let want = oracle.get(occ).copied().unwrap_or_default();
                assert!((out.amplitude(*occ) - want).norm() < 1e-12, "{occ:?}");
            }
            assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn permanent_of_known_matrices() {
    let ones = vec![vec![c(1.0); 4]; 4];
    assert!((permanent(&ones) - c(24.0)).norm() < 1e-12);
    let m = vec![vec![c(1.0), c(2.0)], vec![c(3.0), c(4.0)]];
    assert!((permanent(&m) - c(10.0)).norm() < 1e-12);
}

#[test]
fn balanced_splitter_reproduces_hom() {
    let u = build_tritter(&TritterAngles::new(0.0, FRAC_PI_4, 0.0).unwrap());
    let rec = hom_record(&u, 1e-6);
    assert!(rec.hom);
    assert!(rec.coefficient < 1e-14);
    let state = evolve_two_photon(&u).unwrap();
    assert!(state.amplitude([1, 1, 0]).norm() < 1e-14);
    let rho = trace_out_third(&state, 2).unwrap();
    assert!((rho.get(2, 0, 2, 0).re - 0.5).abs() < 1e-14);
    assert!((rho.get(0, 2, 0, 2).re - 0.5).abs() < 1e-14);
    assert!((rho.get(2, 0, 0, 2).re + 0.5).abs() < 1e-14);
    assert!((negativity(&rho).unwrap() - 0.5).abs() < 1e-10);
}

#[test]
fn identity_leaves_product_state() {
    let state = evolve_two_photon(&MixerMatrix::identity()).unwrap();
    assert!((state.fidelity(&FockState::basis_state([1, 1, 0])) - 1.0).abs() < 1e-14);
    let rho = trace_out_third(&state, 2).unwrap();
    assert!(negativity(&rho).unwrap() < 1e-10);
    assert!(!hom_record(&MixerMatrix::identity(), 1e-6).hom);
}

#[test]
fn mixing_without_mode_two_is_separable() {
    // Mode 1 mixes only with the traced mode, so modes 1 and 2 stay PPT.
    let mut rng = StdRng::seed_from_u64(13);
    for _ in 0..200 {
        let t: f64 = rng.gen_range(0.0..FRAC_PI_2);
        let ph = Complex64::from_polar(1.0, rng.gen_range(-3.0..3.0));
        let z = Complex64::default();
        let u = MixerMatrix([
            [c(t.cos()), z, ph * t.sin()],
            [z, c(1.0), z],
            [-c(t.sin()), z, ph * t.cos()],
        ]);
        let rho = trace_out_third(&evolve_two_photon(&u).unwrap(), 2).unwrap();
        assert!(negativity(&rho).unwrap() < 1e-10);
    }
}

#[test]
fn negativity_dominates_lower_bound() {
    let mut rng = StdRng::seed_from_u64(17);
    let mut strict = false;
    for _ in 0..1000 {
        let u = random_tritter(&mut rng);
        let rho = trace_out_third(&evolve_two_photon(&u).unwrap(), 2).unwrap();
        let n = negativity(&rho).unwrap();
        let b = negativity_lower_bound(&rho);
        assert!(n >= b - 1e-10, "{n} < {b}");
        let coherent = rho.get(0, 2, 1, 1).norm() > 1e-3 || rho.get(2, 0, 1, 1).norm() > 1e-3;
        if coherent && n > b + 1e-6 {
            strict = true;
        }
    }
    assert!(strict);
}

#[test]
fn reduced_states_are_valid() {
    let mut rng = StdRng::seed_from_u64(19);
    for _ in 0..300 {
        let u = random_unitary(&mut rng);
        let rho = trace_out_third(&evolve_two_photon(&u).unwrap(), 2).unwrap();
        let m = rho.operator().matrix();
        assert!((m.trace() - c(1.0)).norm() < 1e-12);
        assert!(m.hermiticity_residual() < 1e-14);
        let ev = rho.operator().eigenvalues().unwrap();
        assert!(ev[0] > -1e-12);
        assert!(rho.purity() <= 1.0 + 1e-12);
        // partial transpose preserves the trace and is an involution
        let pt = partial_transpose(rho.operator());
        assert!((pt.matrix().trace() - c(1.0)).norm() < 1e-12);
        let back = partial_transpose(&pt);
        for (x, y) in back.matrix().data().iter().zip(m.data()) {
            assert_eq!(x, y);
        }
    }
}

#[test]
fn hom_structure_when_coincidence_vanishes() {
    // Coincidences vanish ⇒ the |11⟩ population and its coherences vanish.
    let mut rng = StdRng::seed_from_u64(23);
    for _ in 0..500 {
        let u = random_tritter(&mut rng);
        let rho = trace_out_third(&evolve_two_photon(&u).unwrap(), 2).unwrap();
        let r = hom_record(&u, 1e-6);
        assert!((rho.get(1, 1, 1, 1).re - r.coefficient.powi(2)).abs() < 1e-14);
        assert!((rho.get(2, 0, 2, 0).re - r.rho2020).abs() < 1e-14);
        assert!((rho.get(0, 2, 0, 2).re - r.rho0202).abs() < 1e-14);
        assert!(rho.get(0, 2, 1, 1).norm() <= r.coefficient + 1e-14);
        assert!(rho.get(2, 0, 1, 1).norm() <= r.coefficient + 1e-14);
    }
}

#[test]
fn jacobi_agrees_with_nalgebra() {
    let mut rng = StdRng::seed_from_u64(29);
    for dim in [1usize, 2, 5, 9] {
        for _ in 0..50 {
            let mut a = DenseMatrix::zeros(dim);
            for i in 0..dim {
                a.set(i, i, c(rng.gen_range(-1.0..1.0)));
                for j in i + 1..dim {
                    let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    a.set(i, j, z);
                    a.set(j, i, z.conj());
                }
            }
            let ours = hermitian_eigenvalues(&a).unwrap();
            let na = DMatrix::from_fn(dim, dim, |i, j| a.get(i, j));
            let mut theirs: Vec<f64> = na.symmetric_eigenvalues().iter().copied().collect();
            theirs.sort_by(|x, y| x.partial_cmp(y).unwrap());
            for (x, y) in ours.iter().zip(&theirs) {
                assert!((x - y).abs() < 1e-11, "{ours:?} vs {theirs:?}");
            }
        }
    }
}

#[test]
fn invalid_states_rejected() {
    assert!(FockState::new(2, vec![c(1.0); 6]).is_err());
    assert!(FockState::new(2, vec![c(1.0); 5]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evolution_conserves_norm(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let u = random_unitary(&mut rng);
        let photons = rng.gen_range(1..=4);
        let basis = occupations(photons);
        let k = rng.gen_range(0..basis.len());
        let out = apply_mixer(&FockState::basis_state(basis[k]), &u).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lower_bound_never_exceeds_negativity(
        theta in 0.0..=FRAC_PI_2, phi in 0.0..=FRAC_PI_2, psi in 0.0..=FRAC_PI_2,
    ) {
        let u = build_tritter(&TritterAngles::new(theta, phi, psi).unwrap());
        let rho = trace_out_third(&evolve_two_photon(&u).unwrap(), 2).unwrap();
        prop_assert!(negativity(&rho).unwrap() >= negativity_lower_bound(&rho) - 1e-10);
    }
}
