//! Three-mode Fock states under a passive mixer, reduction to the two
//! observed modes, and the interference/entanglement figures of merit.
//!
//! A mixer `U` acts on creation operators as `a_i† ↦ Σ_j U_ij a_j†`: input
//! mode `i` selects row `i`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::{hermitian_eigenvalues, DenseMatrix};
use crate::error::{Error, Result};
use crate::tritter::MixerMatrix;

pub const NORM_TOL: f64 = 1e-10;
pub const UNITARITY_TOL: f64 = 1e-10;
/// Eigenvalues of the partial transpose below `-NEGATIVE_EIGEN_TOL` count
/// towards the negativity.
pub const NEGATIVE_EIGEN_TOL: f64 = 1e-11;
pub const DEFAULT_CUTOFF: usize = 2;
pub const DEFAULT_HOM_TOL: f64 = 1e-6;

pub type Occupation = [usize; 3];

/// All `(n1, n2, n3)` with `n1 + n2 + n3 = photons`, in lexicographic order.
pub fn occupations(photons: usize) -> Vec<Occupation> {
    let mut out = Vec::new();
    for n1 in 0..=photons {
        for n2 in 0..=photons - n1 {
            out.push([n1, n2, photons - n1 - n2]);
        }
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Pure state of fixed total photon number over three modes.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    photons: usize,
    basis: Vec<Occupation>,
    amplitudes: Vec<Complex64>,
}

impl FockState {
    /// Amplitudes are given in the order of [`occupations`].
    pub fn new(photons: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let basis = occupations(photons);
        if amplitudes.len() != basis.len() {
            return Err(Error::domain(format!(
                "{} amplitudes for {} basis states",
                amplitudes.len(),
                basis.len()
            )));
        }
        let s = FockState {
            photons,
            basis,
            amplitudes,
        };
        let n = s.norm_sqr();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::domain(format!("state norm² is {n}, expected 1")));
        }
        Ok(s)
    }

    /// `|n1 n2 n3⟩`.
    pub fn basis_state(occ: Occupation) -> Self {
        let photons = occ.iter().sum();
        let basis = occupations(photons);
        let amplitudes = basis
            .iter()
            .map(|b| if *b == occ { 1.0 } else { 0.0 })
            .map(|x| Complex64::new(x, 0.0))
            .collect();
        FockState {
            photons,
            basis,
            amplitudes,
        }
    }

    pub fn photons(&self) -> usize {
        self.photons
    }

    pub fn basis(&self) -> &[Occupation] {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, occ: Occupation) -> Complex64 {
        self.basis
            .iter()
            .position(|b| *b == occ)
            .map_or(Complex64::new(0.0, 0.0), |i| self.amplitudes[i])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &FockState) -> f64 {
        if self.photons != other.photons {
            return 0.0;
        }
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm_sqr()
    }
}

/// Permanent by Ryser's formula with Gray-code subset updates.
pub fn permanent(m: &[Vec<Complex64>]) -> Complex64 {
    let n = m.len();
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut gray: usize = 0;
    for k in 1..(1usize << n) {
        let next = k ^ (k >> 1);
        let col = (gray ^ next).trailing_zeros() as usize;
        let added = next & (1 << col) != 0;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if added {
                *s += m[i][col];
            } else {
                *s -= m[i][col];
            }
        }
        gray = next;
        let prod: Complex64 = row_sums.iter().product();
        if next.count_ones() % 2 == n as u32 % 2 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    total
}

fn expand(occ: &Occupation) -> Vec<usize> {
    occ.iter()
        .enumerate()
        .flat_map(|(mode, &n)| std::iter::repeat(mode).take(n))
        .collect()
}

fn check_unitary(u: &MixerMatrix) -> Result<()> {
    let residual = u.unitarity_residual();
    if !(residual <= UNITARITY_TOL) {
        return Err(Error::NotUnitary { residual });
    }
    Ok(())
}

/// Evolves any fixed-photon-number state with the permanent rule:
/// `⟨m|U|n⟩ = perm(U[n; m]) / sqrt(Π n_i! Π m_j!)`, where the submatrix
/// repeats row `i` `n_i` times (inputs) and column `j` `m_j` times (outputs).
pub fn apply_mixer(state: &FockState, u: &MixerMatrix) -> Result<FockState> {
    check_unitary(u)?;
    let basis = occupations(state.photons);
    let mut out = vec![Complex64::new(0.0, 0.0); basis.len()];

    for (n_occ, &amp) in state.basis.iter().zip(&state.amplitudes) {
        if amp == Complex64::new(0.0, 0.0) {
            continue;
        }
        let rows = expand(n_occ);
        let n_fact: f64 = n_occ.iter().map(|&k| factorial(k)).product();
        for (m_occ, slot) in basis.iter().zip(out.iter_mut()) {
            let cols = expand(m_occ);
            let sub: Vec<Vec<Complex64>> = rows
                .iter()
                .map(|&r| cols.iter().map(|&c| u.get(r, c)).collect())
                .collect();
            let m_fact: f64 = m_occ.iter().map(|&k| factorial(k)).product();
            *slot += amp * permanent(&sub) / (n_fact * m_fact).sqrt();
        }
    }

    FockState::new(state.photons, out)
}

/// Closed-form output of `|110⟩` under `U`.
pub fn evolve_two_photon(u: &MixerMatrix) -> Result<FockState> {
    check_unitary(u)?;
    let e = |i: usize, j: usize| u.get(i - 1, j - 1);
    let r2 = std::f64::consts::SQRT_2;
    let mut amps = vec![Complex64::new(0.0, 0.0); 6];
    let basis = occupations(2);
    let mut put = |occ: Occupation, v: Complex64| {
        let i = basis
            .iter()
            .position(|b| *b == occ)
            .expect("two-photon basis");
        amps[i] = v;
    };
    put([0, 0, 2], e(1, 3) * e(2, 3) * r2);
    put([0, 2, 0], e(1, 2) * e(2, 2) * r2);
    put([2, 0, 0], e(1, 1) * e(2, 1) * r2);
    put([0, 1, 1], e(1, 3) * e(2, 2) + e(1, 2) * e(2, 3));
    put([1, 1, 0], e(1, 1) * e(2, 2) + e(1, 2) * e(2, 1));
    put([1, 0, 1], e(1, 1) * e(2, 3) + e(1, 3) * e(2, 1));
    FockState::new(2, amps)
}

/// Operator on the two observed modes, basis `|n m⟩` with
/// `n, m ∈ 0..=cutoff`, lexicographic (index `n·(cutoff+1) + m`).
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeOperator {
    cutoff: usize,
    matrix: DenseMatrix,
}

impl TwoModeOperator {
    pub fn zeros(cutoff: usize) -> Self {
        let d = cutoff + 1;
        TwoModeOperator {
            cutoff,
            matrix: DenseMatrix::zeros(d * d),
        }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn index(&self, n: usize, m: usize) -> usize {
        n * (self.cutoff + 1) + m
    }

    pub fn labels(&self) -> Vec<[usize; 2]> {
        let d = self.cutoff + 1;
        (0..d * d).map(|i| [i / d, i % d]).collect()
    }

    /// `⟨n m| X |p q⟩`; zero when any index exceeds the cutoff.
    pub fn get(&self, n: usize, m: usize, p: usize, q: usize) -> Complex64 {
        if [n, m, p, q].iter().any(|&k| k > self.cutoff) {
            return Complex64::new(0.0, 0.0);
        }
        self.matrix.get(self.index(n, m), self.index(p, q))
    }

    fn add(&mut self, n: usize, m: usize, p: usize, q: usize, v: Complex64) {
        let (i, j) = (self.index(n, m), self.index(p, q));
        let cur = self.matrix.get(i, j);
        self.matrix.set(i, j, cur + v);
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.matrix)
    }
}

/// Reduced state of the two observed modes.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeDensityMatrix(TwoModeOperator);

impl TwoModeDensityMatrix {
    /// Validates trace, Hermiticity and positivity.
    pub fn new(op: TwoModeOperator) -> Result<Self> {
        let tr = op.matrix.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::domain(format!("trace is {tr}, expected 1")));
        }
        let h = op.matrix.hermiticity_residual();
        if h > 1e-12 {
            return Err(Error::domain(format!("not Hermitian (residual {h:.3e})")));
        }
        let min = op.eigenvalues()?.first().copied().unwrap_or(0.0);
        if min < -NORM_TOL {
            return Err(Error::domain(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(TwoModeDensityMatrix(op))
    }

    pub fn operator(&self) -> &TwoModeOperator {
        &self.0
    }

    pub fn get(&self, n: usize, m: usize, p: usize, q: usize) -> Complex64 {
        self.0.get(n, m, p, q)
    }

    pub fn cutoff(&self) -> usize {
        self.0.cutoff
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        let m = &self.0.matrix;
        let d = m.dim();
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                s += m.get(i, j).norm_sqr();
            }
        }
        s
    }
}

/// `ρ(n m, p q) = Σ_k ψ(n,m,k) ψ*(p,q,k)`.
pub fn trace_out_third(state: &FockState, cutoff: usize) -> Result<TwoModeDensityMatrix> {
    if (state.norm_sqr() - 1.0).abs() > NORM_TOL {
        return Err(Error::domain("state is not normalized"));
    }
    for (occ, a) in state.basis.iter().zip(&state.amplitudes) {
        if (occ[0] > cutoff || occ[1] > cutoff) && a.norm() > 1e-14 {
            return Err(Error::domain(format!(
                "occupation {occ:?} exceeds cutoff {cutoff} with amplitude {:.3e}",
                a.norm()
            )));
        }
    }
    let mut rho = TwoModeOperator::zeros(cutoff);
    let entries: Vec<(Occupation, Complex64)> = state
        .basis
        .iter()
        .copied()
        .zip(state.amplitudes.iter().copied())
        .filter(|(o, _)| o[0] <= cutoff && o[1] <= cutoff)
        .collect();
    for &(a, x) in &entries {
        for &(b, y) in &entries {
            if a[2] == b[2] {
                rho.add(a[0], a[1], b[0], b[1], x * y.conj());
            }
        }
    }
    TwoModeDensityMatrix::new(rho)
}

/// Transpose with respect to the second mode: `(n m, p q) ↦ (n q, p m)`.
pub fn partial_transpose(op: &TwoModeOperator) -> TwoModeOperator {
    let c = op.cutoff;
    let mut out = TwoModeOperator::zeros(c);
    for n in 0..=c {
        for m in 0..=c {
            for p in 0..=c {
                for q in 0..=c {
                    let v = op.get(n, m, p, q);
                    let (i, j) = (out.index(n, q), out.index(p, m));
                    out.matrix.set(i, j, v);
                }
            }
        }
    }
    out
}

/// Sum of `|λ|` over the negative eigenvalues of the partial transpose.
pub fn negativity(rho: &TwoModeDensityMatrix) -> Result<f64> {
    let eig = partial_transpose(&rho.0).eigenvalues()?;
    Ok(eig
        .iter()
        .filter(|&&l| l < -NEGATIVE_EIGEN_TOL)
        .fold(0.0, |acc, l| acc - l))
}

/// Two negative eigenvalues of the partial transpose that are available in
/// closed form; their magnitudes bound the negativity from below.
pub fn negativity_lower_bound(rho: &TwoModeDensityMatrix) -> f64 {
    let term =
        |diag: f64, coh: Complex64| 0.5 * ((diag * diag + 4.0 * coh.norm_sqr()).sqrt() - diag);
    term(rho.get(0, 1, 0, 1).re, rho.get(0, 2, 1, 1))
        + term(rho.get(1, 0, 1, 0).re, rho.get(2, 0, 1, 1))
}

/// Hong-Ou-Mandel figures for the `|110⟩` input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomRecord {
    /// `|U11 U22 + U12 U21|`
    pub coefficient: f64,
    /// `U11 U22 + U12 U21` as `[re, im]`; real for zero-phase mixers.
    pub amplitude: [f64; 2],
    /// `2 |U11 U21|²`
    pub rho2020: f64,
    /// `2 |U12 U22|²`
    pub rho0202: f64,
    pub tolerance: f64,
    /// Coincidences vanish while both bunched populations survive.
    pub hom: bool,
}

pub fn coincidence_amplitude(u: &MixerMatrix) -> Complex64 {
    u.get(0, 0) * u.get(1, 1) + u.get(0, 1) * u.get(1, 0)
}

pub fn hom_coefficient(u: &MixerMatrix) -> f64 {
    coincidence_amplitude(u).norm()
}

pub fn hom_record(u: &MixerMatrix, tolerance: f64) -> HomRecord {
    let amp = coincidence_amplitude(u);
    let coefficient = amp.norm();
    let rho2020 = 2.0 * (u.get(0, 0) * u.get(1, 0)).norm_sqr();
    let rho0202 = 2.0 * (u.get(0, 1) * u.get(1, 1)).norm_sqr();
    HomRecord {
        coefficient,
        amplitude: [amp.re, amp.im],
        rho2020,
        rho0202,
        tolerance,
        hom: coefficient < tolerance && rho2020 > tolerance && rho0202 > tolerance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tritter::{build_tritter, TritterAngles};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn tritter(t: f64, f: f64, p: f64) -> MixerMatrix {
        build_tritter(&TritterAngles::new(t, f, p).unwrap())
    }

    fn splitter() -> MixerMatrix {
        tritter(0.0, FRAC_PI_4, 0.0)
    }

    fn hom_pair() -> FockState {
        let mut amps = vec![c(0.0); 6];
        let basis = occupations(2);
        amps[basis.iter().position(|o| *o == [2, 0, 0]).unwrap()] = c(FRAC_1_SQRT_2);
        amps[basis.iter().position(|o| *o == [0, 2, 0]).unwrap()] = c(-FRAC_1_SQRT_2);
        FockState::new(2, amps).unwrap()
    }

    #[test]
    fn basis_is_lexicographic() {
        assert_eq!(
            occupations(2),
            vec![
                [0, 0, 2],
                [0, 1, 1],
                [0, 2, 0],
                [1, 0, 1],
                [1, 1, 0],
                [2, 0, 0]
            ]
        );
        assert_eq!(occupations(4).len(), 15);
    }

    #[test]
    fn permanent_small_cases() {
        let m = vec![vec![c(1.0), c(2.0)], vec![c(3.0), c(4.0)]];
        assert_eq!(permanent(&m), c(10.0));
        let m3: Vec<Vec<Complex64>> = (0..3)
            .map(|i| (0..3).map(|j| c((3 * i + j + 1) as f64)).collect())
            .collect();
        assert_eq!(permanent(&m3), c(450.0));
    }

    #[test]
    fn identity_leaves_state() {
        let s = FockState::basis_state([1, 1, 0]);
        let out = apply_mixer(&s, &MixerMatrix::identity()).unwrap();
        assert_abs_diff_eq!(out.fidelity(&s), 1.0, epsilon = 1e-15);
        let out = evolve_two_photon(&MixerMatrix::identity()).unwrap();
        assert_abs_diff_eq!(out.fidelity(&s), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn balanced_splitter_bunches() {
        let out = apply_mixer(&FockState::basis_state([1, 1, 0]), &splitter()).unwrap();
        assert!(out.amplitude([1, 1, 0]).norm() < 1e-15);
        assert_abs_diff_eq!(out.amplitude([2, 0, 0]).re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(out.amplitude([0, 2, 0]).re, -FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn mismatch_tritter_sends_pair_to_011() {
        let out = evolve_two_photon(&tritter(FRAC_PI_2, 0.0, FRAC_PI_2)).unwrap();
        assert_abs_diff_eq!(out.amplitude([0, 1, 1]).re, -1.0, epsilon = 1e-15);
        for occ in occupations(2).into_iter().filter(|o| *o != [0, 1, 1]) {
            assert!(out.amplitude(occ).norm() < 1e-15);
        }
    }

    #[test]
    fn closed_form_matches_permanent() {
        let u = tritter(0.3, 0.7, 1.1);
        let a = evolve_two_photon(&u).unwrap();
        let b = apply_mixer(&FockState::basis_state([1, 1, 0]), &u).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn non_unitary_is_rejected() {
        let mut u = MixerMatrix::identity();
        u.0[0][0] = c(1.1);
        assert!(matches!(
            evolve_two_photon(&u),
            Err(Error::NotUnitary { .. })
        ));
        assert!(matches!(
            apply_mixer(&FockState::basis_state([1, 1, 0]), &u),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn reduce_coincidence_state() {
        let rho = trace_out_third(&FockState::basis_state([1, 1, 0]), 2).unwrap();
        assert_eq!(rho.get(1, 1, 1, 1), c(1.0));
        assert_abs_diff_eq!(rho.purity(), 1.0);
    }

    #[test]
    fn reduce_bunched_state() {
        let rho = trace_out_third(&hom_pair(), 2).unwrap();
        assert_abs_diff_eq!(rho.get(2, 0, 2, 0).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.get(0, 2, 0, 2).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.get(2, 0, 0, 2).re, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.get(0, 2, 2, 0).re, -0.5, epsilon = 1e-15);
    }

    #[test]
    fn reduce_single_photon_sector() {
        let mut amps = vec![c(0.0); 6];
        amps[1] = c(0.6); // |011⟩
        amps[3] = Complex64::new(0.0, 0.8); // |101⟩
        let rho = trace_out_third(&FockState::new(2, amps).unwrap(), 2).unwrap();
        assert_abs_diff_eq!(rho.get(0, 1, 0, 1).re, 0.36, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.get(1, 0, 1, 0).re, 0.64, epsilon = 1e-15);
        let coh = rho.get(1, 0, 0, 1);
        assert_abs_diff_eq!(coh.im, 0.48, epsilon = 1e-15);
        // both components share k = 1, so the reduction stays pure
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn cutoff_overflow_is_rejected() {
        assert!(trace_out_third(&FockState::basis_state([2, 0, 0]), 1).is_err());
        assert!(trace_out_third(&FockState::basis_state([0, 0, 2]), 1).is_ok());
    }

    #[test]
    fn partial_transpose_moves_coherence() {
        let rho = trace_out_third(&hom_pair(), 2).unwrap();
        let pt = partial_transpose(rho.operator());
        assert_abs_diff_eq!(pt.get(2, 2, 0, 0).re, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(pt.get(0, 0, 2, 2).re, -0.5, epsilon = 1e-15);
        assert_eq!(pt.get(2, 0, 0, 2), c(0.0));
        let eig = pt.eigenvalues().unwrap();
        assert_abs_diff_eq!(eig[0], -0.5, epsilon = 1e-13);
        assert_eq!(partial_transpose(&pt), *rho.operator());
    }

    #[test]
    fn negativity_of_bell_like_state() {
        let rho = trace_out_third(&hom_pair(), 2).unwrap();
        assert_abs_diff_eq!(negativity(&rho).unwrap(), 0.5, epsilon = 1e-10);
        let product = trace_out_third(&FockState::basis_state([1, 1, 0]), 2).unwrap();
        assert_eq!(negativity(&product).unwrap(), 0.0);
    }

    #[test]
    fn lower_bound_arithmetic() {
        let mut op = TwoModeOperator::zeros(2);
        op.add(0, 1, 0, 1, c(0.3));
        op.add(1, 0, 1, 0, c(0.3));
        op.add(1, 1, 1, 1, c(0.4));
        op.add(0, 2, 1, 1, c(0.1));
        op.add(1, 1, 0, 2, c(0.1));
        let rho = TwoModeDensityMatrix(op);
        let expect = 0.5 * ((0.09f64 + 0.04).sqrt() - 0.3);
        assert_abs_diff_eq!(negativity_lower_bound(&rho), expect, epsilon = 1e-15);
        assert_abs_diff_eq!(negativity_lower_bound(&rho), 0.03028, epsilon = 1e-5);

        let diag = trace_out_third(&FockState::basis_state([1, 1, 0]), 2).unwrap();
        assert_eq!(negativity_lower_bound(&diag), 0.0);
    }

    #[test]
    fn hom_records() {
        let id = hom_record(&MixerMatrix::identity(), DEFAULT_HOM_TOL);
        assert_eq!(id.coefficient, 1.0);
        assert!(!id.hom);

        let bs = hom_record(&splitter(), DEFAULT_HOM_TOL);
        assert!(bs.coefficient < 1e-15);
        assert_abs_diff_eq!(bs.rho2020, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(bs.rho0202, 0.5, epsilon = 1e-15);
        assert!(bs.hom);

        let mixed = hom_record(&tritter(FRAC_PI_2, 0.0, FRAC_PI_2), DEFAULT_HOM_TOL);
        assert!(mixed.coefficient < 1e-15);
        assert!(mixed.rho2020 < 1e-30 && mixed.rho0202 < 1e-30);
        assert!(!mixed.hom);
    }
}
