//! Exact-diagonalization oracle and numerical checks of the spectral
//! statements: Mourre estimate, weighted resolvent bounds, local decay.

mod decay;
mod diag;
mod lap;
mod mourre;
mod resolvent;
mod scan;
mod transfer;
mod windows;

pub use decay::{bump, decay_scan, DecayReport};
pub use diag::{exact_diag, Spectrum, RESIDUAL_TOL};
pub use lap::{eps_floor, holder_fit, lap_scan, HolderFit, LapReport};
pub use mourre::{commutator_with_b, mourre_check, mourre_check_family, MourreReport};
pub use resolvent::{weighted_resolvent, WeightedResolvent};
pub use scan::ScanTable;
pub use transfer::{lap_transfer_check, TransferReport};
pub use windows::{window_schedule, Window, WindowSchedule};
