//! JSON run configurations. Every document rejects unknown keys.

use std::path::Path;

use gravtritter::geometry::SPEED_OF_LIGHT;
use gravtritter::{ModeFamily, ModeProfile, StaticSchwarzschildConfig};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Schema(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))
}

fn speed_of_light() -> f64 {
    SPEED_OF_LIGHT
}

/// Uniform field `g` over a height `h`; SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeakFieldConfig {
    pub g: f64,
    pub h: f64,
    #[serde(default = "speed_of_light")]
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum GeometryConfig {
    Schwarzschild(StaticSchwarzschildConfig),
    WeakField(WeakFieldConfig),
}

impl<'de> Deserialize<'de> for GeometryConfig {
    // Dispatch on the keys so errors name the offending field instead of
    // "no variant matched".
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = serde_json::Value::deserialize(d)?;
        let weak = v.get("g").is_some() || v.get("h").is_some();
        if weak {
            serde_json::from_value(v).map(GeometryConfig::WeakField)
        } else {
            serde_json::from_value(v).map(GeometryConfig::Schwarzschild)
        }
        .map_err(D::Error::custom)
    }
}

/// Both modes of the pair, in order `(F_ω0, F_ω̃0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModePair {
    pub first: ModeProfile,
    pub second: ModeProfile,
}

fn default_hom_tolerance() -> f64 {
    gravtritter::fock::DEFAULT_HOM_TOL
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Where the mixer comes from. Exactly one of `modes`, `family`, `angles`
/// or `random_angles` must be given; mode-based sources also need either
/// `chi` or `geometry`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixerConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<ModePair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<ModeFamily>,
    /// `[θ, φ, ψ]` in radians.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub random_angles: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometryConfig>,
    /// Gram-Schmidt the `modes` pair before use.
    #[serde(default, skip_serializing_if = "is_false")]
    pub orthonormalize: bool,
    #[serde(default = "default_hom_tolerance")]
    pub hom_tolerance: f64,
}

/// Resolved mixer source, after the combination rules have been checked.
#[derive(Debug, Clone, PartialEq)]
pub enum Source<'a> {
    Modes(&'a ModePair),
    Family(&'a ModeFamily),
    Angles([f64; 3]),
    Random(u64),
}

impl MixerConfig {
    pub fn source(&self) -> Result<Source<'_>, CliError> {
        let given = [
            self.modes.is_some(),
            self.family.is_some(),
            self.angles.is_some(),
            self.random_angles,
        ]
        .iter()
        .filter(|&&b| b)
        .count();
        if given != 1 {
            return Err(CliError::Schema(
                "exactly one of `modes`, `family`, `angles`, `random_angles` is required".into(),
            ));
        }
        let redshift = self.chi.is_some() as usize + self.geometry.is_some() as usize;
        let needs_redshift = self.modes.is_some() || self.family.is_some();
        if needs_redshift && redshift != 1 {
            return Err(CliError::Schema(
                "mode-based mixers need exactly one of `chi`, `geometry`".into(),
            ));
        }
        if !needs_redshift && redshift != 0 {
            return Err(CliError::Schema(
                "`chi`/`geometry` only apply to `modes` or `family`".into(),
            ));
        }
        if self.orthonormalize && self.modes.is_none() {
            return Err(CliError::Schema(
                "`orthonormalize` only applies to `modes`".into(),
            ));
        }
        if self.seed.is_some() && !self.random_angles {
            return Err(CliError::Schema(
                "`seed` only applies to `random_angles`".into(),
            ));
        }
        Ok(if let Some(m) = &self.modes {
            Source::Modes(m)
        } else if let Some(f) = &self.family {
            Source::Family(f)
        } else if let Some(a) = self.angles {
            Source::Angles(a)
        } else {
            Source::Random(self.seed.unwrap_or(0))
        })
    }
}

/// χ values at which to evaluate the no-go normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NogoConfig {
    pub chi: Vec<f64>,
}

impl Default for NogoConfig {
    fn default() -> Self {
        NogoConfig {
            chi: vec![0.5, 0.9, 0.99, 1.0, 1.01, 1.1, 2.0],
        }
    }
}
