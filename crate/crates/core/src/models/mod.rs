//! Desk-scale Nelson-type models and their initial decimation onto kernel space.

mod initial;
mod nelson;

pub use initial::{initial_audit, initial_decimation, initial_feshbach, InitialAudit, InitialDecimation, LevelMatch, I0_FRACTION};
pub use nelson::{build_nelson, default_kappa, kato_constants, KatoConstants, NelsonConfig, NelsonModel};
