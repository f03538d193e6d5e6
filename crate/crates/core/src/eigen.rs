//! Cyclic Jacobi diagonalization of small dense Hermitian matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Stop once the off-diagonal Frobenius norm falls below this (scaled by
/// `max(1, ‖A‖_F)`).
pub const OFF_DIAGONAL_TOL: f64 = 1e-13;
pub const MAX_SWEEPS: usize = 64;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        DenseMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn from_rows(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::domain(format!(
                "expected {} entries for a {dim}×{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(DenseMatrix { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `max |A_ij − conj(A_ji)|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    s += self.get(i, j).norm_sqr();
                }
            }
        }
        s.sqrt()
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// Each rotation first removes the phase of `a_pq` and then applies the
/// real symmetric Jacobi rotation that annihilates it.
pub fn hermitian_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    let n = a.dim;
    let mut m = a.clone();
    // symmetrize away rounding noise
    for i in 0..n {
        for j in i..n {
            let v = 0.5 * (m.get(i, j) + m.get(j, i).conj());
            m.set(i, j, v);
            m.set(j, i, v.conj());
        }
    }
    let stop = OFF_DIAGONAL_TOL * a.frobenius().max(1.0);

    let mut sweeps = 0;
    while m.off_diagonal_norm() > stop {
        if sweeps == MAX_SWEEPS {
            return Err(Error::Eigen {
                sweeps,
                residual: m.off_diagonal_norm(),
            });
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, p, q);
            }
        }
        sweeps += 1;
    }

    let mut eig: Vec<f64> = (0..n).map(|i| m.get(i, i).re).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

fn rotate(m: &mut DenseMatrix, p: usize, q: usize) {
    let apq = m.get(p, q);
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag; // e^{iα}
    let app = m.get(p, p).re;
    let aqq = m.get(q, q).re;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // G on (p, q): [[c, s], [-s e^{-iα}, c e^{-iα}]]; A ← G† A G.
    let n = m.dim;
    let ph_conj = phase.conj();
    for k in 0..n {
        let akp = m.get(k, p);
        let akq = m.get(k, q);
        m.set(k, p, akp * c - akq * ph_conj * s);
        m.set(k, q, akp * s + akq * ph_conj * c);
    }
    for k in 0..n {
        let apk = m.get(p, k);
        let aqk = m.get(q, k);
        m.set(p, k, apk * c - aqk * phase * s);
        m.set(q, k, apk * s + aqk * phase * c);
    }
    m.set(p, q, Complex64::new(0.0, 0.0));
    m.set(q, p, Complex64::new(0.0, 0.0));
    let d = m.get(p, p).re;
    m.set(p, p, Complex64::new(d, 0.0));
    let d = m.get(q, q).re;
    m.set(q, q, Complex64::new(d, 0.0));
}
