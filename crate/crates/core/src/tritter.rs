//! The three-mode mixer ("tritter") induced by redshift on a pair of
//! orthonormal modes plus their orthogonal complement.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::{inner_product, norm, redshift_transform, ModeProfile};

/// Slack allowed when clamping arcsin/arccos arguments into `[0, 1]`.
pub const CLAMP_SLACK: f64 = 1e-9;
/// Below this `cos φ` the angles θ, ψ are undetermined.
pub const DEGENERATE_COS_PHI: f64 = 1e-12;
/// Largest `|⟨F1,F2⟩|` accepted by [`tritter_from_modes`].
pub const ORTHOGONALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TritterAngles {
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
}

impl TritterAngles {
    pub fn new(theta: f64, phi: f64, psi: f64) -> Result<Self> {
        let a = TritterAngles { theta, phi, psi };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("theta", self.theta), ("phi", self.phi), ("psi", self.psi)] {
            if !(v.is_finite() && (-1e-12..=FRAC_PI_2 + 1e-12).contains(&v)) {
                return Err(Error::domain(format!("{name} = {v} is outside [0, π/2]")));
            }
        }
        Ok(())
    }
}

/// 3×3 mixer with rows/columns ordered `(A_ω0, A_ω̃0, A_⊥)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[[[f64; 2]; 3]; 3]", into = "[[[f64; 2]; 3]; 3]")]
pub struct MixerMatrix(pub [[Complex64; 3]; 3]);

impl From<[[[f64; 2]; 3]; 3]> for MixerMatrix {
    fn from(rows: [[[f64; 2]; 3]; 3]) -> Self {
        MixerMatrix(rows.map(|r| r.map(|[re, im]| Complex64::new(re, im))))
    }
}

impl From<MixerMatrix> for [[[f64; 2]; 3]; 3] {
    fn from(m: MixerMatrix) -> Self {
        m.0.map(|r| r.map(|z| [z.re, z.im]))
    }
}

impl MixerMatrix {
    pub fn identity() -> Self {
        let mut m = [[Complex64::new(0.0, 0.0); 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = Complex64::new(1.0, 0.0);
        }
        MixerMatrix(m)
    }

    /// Entry `U_{row+1, col+1}` (zero-based indices).
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[row][col]
    }

    /// `max |(U U†)_{ij} − δ_ij|`.
    pub fn unitarity_residual(&self) -> f64 {
        let u = &self.0;
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..3 {
                    s += u[i][k] * u[j][k].conj();
                }
                if i == j {
                    s -= 1.0;
                }
                worst = worst.max(s.norm());
            }
        }
        worst
    }

    pub fn determinant(&self) -> Complex64 {
        let u = &self.0;
        u[0][0] * (u[1][1] * u[2][2] - u[1][2] * u[2][1])
            - u[0][1] * (u[1][0] * u[2][2] - u[1][2] * u[2][0])
            + u[0][2] * (u[1][0] * u[2][1] - u[1][1] * u[2][0])
    }
}

/// Inverts `cosθ cosφ = o11`, `cosφ cosψ = o22`, `sinφ = o21`.
pub fn angles_from_overlaps(o11: f64, o22: f64, o21: f64) -> Result<TritterAngles> {
    for (name, v) in [("o11", o11), ("o22", o22), ("o21", o21)] {
        if !(v.is_finite() && v >= -CLAMP_SLACK && v <= 1.0 + CLAMP_SLACK) {
            return Err(Error::Inconsistent(format!(
                "{name} = {v} is not in [0, 1]"
            )));
        }
    }
    if o11 * o11 + o21 * o21 > 1.0 + CLAMP_SLACK {
        return Err(Error::Inconsistent(format!(
            "o11² + o21² = {} exceeds 1",
            o11 * o11 + o21 * o21
        )));
    }
    if o22 * o22 + o21 * o21 > 1.0 + CLAMP_SLACK {
        return Err(Error::Inconsistent(format!(
            "o22² + o21² = {} exceeds 1",
            o22 * o22 + o21 * o21
        )));
    }

    let phi = clamp_unit(o21, "sin φ")?.asin();
    let cos_phi = phi.cos();
    if cos_phi < DEGENERATE_COS_PHI {
        if o11 > CLAMP_SLACK || o22 > CLAMP_SLACK {
            return Err(Error::Inconsistent(format!(
                "cos φ = {cos_phi:.3e} but o11 = {o11:.3e}, o22 = {o22:.3e}"
            )));
        }
        return Ok(TritterAngles {
            theta: 0.0,
            phi,
            psi: 0.0,
        });
    }
    let theta = clamp_unit(o11 / cos_phi, "cos θ")?.acos();
    let psi = clamp_unit(o22 / cos_phi, "cos ψ")?.acos();
    Ok(TritterAngles { theta, phi, psi })
}

fn clamp_unit(x: f64, what: &str) -> Result<f64> {
    if x < -CLAMP_SLACK || x > 1.0 + CLAMP_SLACK {
        return Err(Error::Inconsistent(format!("{what} = {x} outside [0, 1]")));
    }
    Ok(x.clamp(0.0, 1.0))
}

/// Zero-phase tritter: product of the θ (mode 1 ↔ ⊥), φ (1 ↔ 2) and
/// ψ (2 ↔ ⊥) beam-splitter rotations.
pub fn build_tritter(angles: &TritterAngles) -> MixerMatrix {
    let (st, ct) = angles.theta.sin_cos();
    let (sf, cf) = angles.phi.sin_cos();
    let (sp, cp) = angles.psi.sin_cos();
    let r = |x: f64| Complex64::new(x, 0.0);
    MixerMatrix([
        [
            r(ct * cf),
            r(-ct * sf * cp - st * sp),
            r(-ct * sf * sp + st * cp),
        ],
        [r(sf), r(cf * cp), r(cf * sp)],
        [
            r(-st * cf),
            r(st * sf * cp - ct * sp),
            r(st * sf * sp + ct * cp),
        ],
    ])
}

/// Raw overlaps behind a tritter, kept for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlapRecord {
    /// `⟨F1, F2⟩` of the inputs (should vanish).
    pub input_overlap: [f64; 2],
    /// `⟨F1', F1⟩`
    pub o11: [f64; 2],
    /// `⟨F2', F2⟩`
    pub o22: [f64; 2],
    /// `⟨F2', F1⟩`
    pub o21: [f64; 2],
    /// `⟨F1', F2⟩`, not used to build the matrix.
    pub o12: [f64; 2],
    /// Normalized moduli actually fed to [`angles_from_overlaps`].
    pub moduli: [f64; 3],
    /// `|U12| − |⟨F1',F2⟩|` (normalized).
    pub fourth_overlap_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TritterResult {
    pub matrix: MixerMatrix,
    pub angles: TritterAngles,
    pub overlaps: OverlapRecord,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Redshifts both modes by χ and builds the mixer from the overlap moduli.
///
/// Each modulus is divided by the quadrature norms of the two profiles
/// involved, so that at `χ = 1` the diagonal overlaps are exactly one.
pub fn tritter_from_modes(f1: &ModeProfile, f2: &ModeProfile, chi: f64) -> Result<TritterResult> {
    let f1p = redshift_transform(f1, chi)?;
    let f2p = redshift_transform(f2, chi)?;

    let n1 = norm(f1)?;
    let n2 = norm(f2)?;
    let n1p = norm(&f1p)?;
    let n2p = norm(&f2p)?;
    if !(n1 > 0.0 && n2 > 0.0 && n1p > 0.0 && n2p > 0.0) {
        return Err(Error::Degenerate("mode with zero norm".into()));
    }

    let input = inner_product(f1, f2)?;
    if input.norm() / (n1 * n2) > ORTHOGONALITY_TOL {
        return Err(Error::Inconsistent(format!(
            "input modes are not orthogonal: |⟨F1,F2⟩| = {:.3e}",
            input.norm()
        )));
    }

    let o11 = inner_product(&f1p, f1)?;
    let o22 = inner_product(&f2p, f2)?;
    let o21 = inner_product(&f2p, f1)?;
    let o12 = inner_product(&f1p, f2)?;

    let m11 = o11.norm() / (n1p * n1);
    let m22 = o22.norm() / (n2p * n2);
    let m21 = o21.norm() / (n2p * n1);
    let m12 = o12.norm() / (n1p * n2);

    let angles = angles_from_overlaps(m11, m22, m21)?;
    let matrix = build_tritter(&angles);
    log::info!(
        "χ = {chi}: θ = {:.6e}, φ = {:.6e}, ψ = {:.6e}",
        angles.theta,
        angles.phi,
        angles.psi
    );

    Ok(TritterResult {
        matrix,
        angles,
        overlaps: OverlapRecord {
            input_overlap: pair(input),
            o11: pair(o11),
            o22: pair(o22),
            o21: pair(o21),
            o12: pair(o12),
            moduli: [m11, m22, m21],
            fourth_overlap_residual: matrix.get(0, 1).norm() - m12,
        },
    })
}

/// Value of `U†[A, A†]U` under a naive sharp-frequency shift `ω → χ²ω`,
/// which is `1/χ²`; a unitary implementation needs it to equal 1.
pub fn nogo_normalization(chi: f64) -> Result<f64> {
    if !(chi.is_finite() && chi > 0.0) {
        return Err(Error::domain(format!("χ must be > 0, got {chi}")));
    }
    Ok(1.0 / (chi * chi))
}

/// Whether a naive sharp-frequency shift could be unitary at this χ.
pub fn sharp_shift_is_unitary(chi: f64) -> Result<bool> {
    Ok((nogo_normalization(chi)? - 1.0).abs() <= 1e-12)
}
