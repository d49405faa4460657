//! Smooth Feshbach-Schur decimation.

mod lap;
mod map;
mod partition;
mod suite;

pub use lap::{lap_transfer_conditions, LapConditionRow, LapConditionsReport};
pub use map::{feshbach_map, feshbach_map_with_floor, resolvent_reconstruct, FeshbachResult, Reconstruction, Split, DEFAULT_FLOOR};
pub use partition::Partition;
pub use suite::{isospectrality_suite, random_instance, run_random_suite, InstanceKind, IsospectralReport, RandomInstance, SuiteSummary};
