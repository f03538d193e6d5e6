//! Report documents. Each one carries the library version and the resolved
//! configuration, and deserializes back into the same type.

use gravtritter::fock::HomRecord;
use gravtritter::{HomRoot, MixerMatrix, OverlapRecord, SweepRow, TritterAngles};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report<C, R> {
    pub version: String,
    pub command: String,
    pub config: C,
    pub result: R,
}

/// The reproducibility line written as `# {...}` above CSV tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Header<C> {
    pub version: String,
    pub command: String,
    pub config: C,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChiOutput {
    /// `schwarzschild` or `weak_field`
    pub model: String,
    pub chi: f64,
    /// `χ − 1` without the rounding of `chi`; ~1e-16 per meter at Earth scale.
    pub chi_minus_one: f64,
    pub ln_chi: f64,
    pub chi_squared: f64,
    /// Received over emitted peak frequency, `ω0'/ω0 = 1/χ²`.
    pub frequency_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixerOutput {
    pub chi: Option<f64>,
    pub angles: TritterAngles,
    pub matrix: MixerMatrix,
    pub unitarity_residual: f64,
    pub determinant: [f64; 2],
    /// Present when the mixer was built from mode overlaps.
    pub overlaps: Option<OverlapRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Amplitude {
    pub occupation: [usize; 3],
    pub amplitude: [f64; 2],
}

/// Two-mode state with rows and columns labelled `|n m⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReducedState {
    pub labels: Vec<[usize; 2]>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveOutput {
    pub mixer: MixerOutput,
    /// Output state for the `|110⟩` input.
    pub state: Vec<Amplitude>,
    pub reduced: ReducedState,
    pub purity: f64,
    pub rho2020: f64,
    pub rho0202: f64,
    pub rho1111: f64,
    pub negativity: f64,
    pub negativity_bound: f64,
    pub hom: HomRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NogoRow {
    pub chi: f64,
    /// `∫|F'|² / ∫|F|²` for a sharp frequency shift, `1/χ²`.
    pub normalization: f64,
    pub unitary: bool,
    pub verdict: String,
}

pub type SweepResult = Vec<SweepRow>;
pub type HomResult = Vec<HomRoot>;
