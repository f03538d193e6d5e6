//! Redshift parameter χ between static observers.
//!
//! Convention: `χ² = ω_emitted / ω_received`, both measured by local
//! clocks, so a receiver higher in the potential sees `χ > 1` and a peak
//! `ω0` arrives at `ω0/χ²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Largest `|g h| / c²` accepted by [`weak_field_chi`].
pub const WEAK_FIELD_LIMIT: f64 = 1e-3;

/// Emitter at areal radius `r_A`, receiver at `r_B`, both static outside a
/// Schwarzschild horizon of radius `r_s`. All lengths in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaticSchwarzschildConfig {
    pub r_s: f64,
    #[serde(rename = "r_A")]
    pub r_a: f64,
    #[serde(rename = "r_B")]
    pub r_b: f64,
}

impl StaticSchwarzschildConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_s.is_finite() && self.r_s >= 0.0) {
            return Err(Error::domain(format!("r_s must be >= 0, got {}", self.r_s)));
        }
        for (name, r) in [("r_A", self.r_a), ("r_B", self.r_b)] {
            if !(r.is_finite() && r > self.r_s) {
                return Err(Error::domain(format!(
                    "{name} = {r} is not outside the horizon r_s = {}; no static observer",
                    self.r_s
                )));
            }
        }
        Ok(())
    }
}

/// `ln χ = ¼ [ln(1 − r_s/r_B) − ln(1 − r_s/r_A)]`.
///
/// Working in logs keeps `χ − 1` accurate when `r_s/r ~ 1e-9`.
pub fn schwarzschild_ln_chi(cfg: &StaticSchwarzschildConfig) -> Result<f64> {
    cfg.validate()?;
    Ok(0.25 * ((-cfg.r_s / cfg.r_b).ln_1p() - (-cfg.r_s / cfg.r_a).ln_1p()))
}

pub fn schwarzschild_chi(cfg: &StaticSchwarzschildConfig) -> Result<f64> {
    Ok(schwarzschild_ln_chi(cfg)?.exp())
}

/// First-order `χ − 1 = g h / (2c²)` for a receiver a height `h` above the
/// emitter in a uniform field `g`.
///
/// Returned as the offset from one: at Earth scale it is ~1e-16 per meter,
/// below the resolution of `f64` around 1.
pub fn weak_field_redshift(g: f64, h: f64, c: f64) -> Result<f64> {
    if !(g.is_finite() && h.is_finite() && c.is_finite() && c > 0.0) {
        return Err(Error::domain("g, h must be finite and c > 0"));
    }
    let x = g * h / (c * c);
    if x.abs() >= WEAK_FIELD_LIMIT {
        return Err(Error::domain(format!(
            "g h / c² = {x:.3e} is outside the weak-field range (< {WEAK_FIELD_LIMIT:e})"
        )));
    }
    Ok(0.5 * x)
}

/// First-order `χ = 1 + g h / (2c²)`; see [`weak_field_redshift`].
pub fn weak_field_chi(g: f64, h: f64, c: f64) -> Result<f64> {
    Ok(1.0 + weak_field_redshift(g, h, c)?)
}
