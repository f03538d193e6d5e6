//! Gravitational redshift modelled as a passive mode-mixer acting on
//! photon wavepackets.
//!
//! The pipeline runs in four stages:
//!
//! * [`modes`]: frequency profiles, their overlaps and the redshift map
//!   `F(ω) ↦ χ F(χ²ω)`.
//! * [`geometry`]: the redshift parameter χ for static observers.
//! * [`tritter`]: tritter angles from overlap moduli and the 3×3 mixer.
//! * [`fock`]: two-photon evolution, reduction to the observed modes,
//!   Hong-Ou-Mandel coefficient and negativity.
//!
//! [`search`] sweeps χ (or a mode parameter) and locates configurations
//! where the coincidence amplitude vanishes.

pub mod eigen;
pub mod error;
pub mod fock;
pub mod geometry;
pub mod modes;
pub mod quadrature;
pub mod search;
pub mod tritter;

pub use error::{Error, Result};
pub use fock::{FockState, HomRecord, TwoModeDensityMatrix, TwoModeOperator};
pub use geometry::StaticSchwarzschildConfig;
pub use modes::{Lobe, ModeProfile, Shape};
pub use search::{HomRoot, ModeFamily, SweepRow, SweepSpec};
pub use tritter::{MixerMatrix, OverlapRecord, TritterAngles, TritterResult};

/// Crate version, embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
