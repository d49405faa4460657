//! Truncated bosonic Fock space over a logarithmic momentum grid.

mod basis;
mod dilation;
mod grid;
mod operator;

pub use basis::{FockState, TruncatedFockBasis, DEFAULT_DIMENSION_CAP};
pub use dilation::{ad_b, build_dilation_b, one_particle_b, weight_b_theta, weight_from_b};
pub use grid::MomentumGrid;
pub use operator::{build_hf, ladder_op, FockOperator, Ladder};
