//! The renormalization map on kernel families and the flows built from it.

mod audit;
mod bisect;
mod flow;
mod polydisc;
mod scaling;
mod series;
mod step;

pub use audit::{contraction_audit, AuditRow, ContractionReport};
pub use bisect::{flow_sign, gs_energy_bisect, BisectOptions, BisectResult};
pub use flow::{rg_iterate, FlowStatus, RGTrace, StepRecord, ESCAPE_THRESHOLD};
pub use polydisc::{polydisc_membership, PolydiscParams, PredictedBounds};
pub use scaling::scale_kernels;
pub use series::{e_series_estimate, SeriesReport};
pub use step::{rg_step, StepOutput};
