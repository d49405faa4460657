use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::TruncatedFockBasis;
use crate::kernel::KernelFamily;
use crate::linalg::C64;

use super::polydisc::{polydisc_membership, PolydiscParams, PredictedBounds};
use super::step::rg_step;

/// `|E_n|` above this ends a flow as escaped.
pub const ESCAPE_THRESHOLD: f64 = 1.0 / 18.0;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    /// `ρ⁻¹ E_{n-1}`, the expanded previous constant.
    pub e_shift: f64,
    /// `Δ_n = E_n - ρ⁻¹E_{n-1}`, the constant generated by the step.
    pub delta: f64,
    /// Full constant `E_n` of the family after the step.
    pub unstable: f64,
    pub input: PolydiscParams,
    /// Polydisc of the output with the constant removed.
    pub output: PolydiscParams,
    pub predicted: PredictedBounds,
    pub margin: f64,
    pub input_in_domain: bool,
    /// `Re w₀₀` on the r-grid after the step (constant removed).
    pub w00: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum FlowStatus {
    Completed,
    /// `sign` is the sign of the escaping constant.
    Escaped { step: usize, sign: i8 },
    Failed { step: usize, message: String },
}

/// Per-step record of a renormalization flow.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RGTrace {
    pub rho: f64,
    /// `E_0`, the constant of the initial family.
    pub initial_constant: f64,
    pub initial: PolydiscParams,
    pub steps: Vec<StepRecord>,
    pub status: FlowStatus,
}

impl RGTrace {
    /// Constants `E_0, E_1, …`.
    pub fn constants(&self) -> Vec<f64> {
        std::iter::once(self.initial_constant).chain(self.steps.iter().map(|s| s.unstable)).collect()
    }

    /// Sign used by bisection: the escape sign, or the sign of the last constant.
    pub fn sign(&self) -> i8 {
        match self.status {
            FlowStatus::Escaped { sign, .. } => sign,
            _ => {
                let e = *self.constants().last().unwrap_or(&0.0);
                if e > 0.0 {
                    1
                } else if e < 0.0 {
                    -1
                } else {
                    0
                }
            }
        }
    }

    /// Flat CSV with a fixed column order.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "step,e_shift,delta,unstable,alpha,beta,gamma,alpha_out,beta_out,gamma_out,pred_alpha,pred_beta_increment,pred_gamma,margin,status\n",
        );
        let status = match &self.status {
            FlowStatus::Completed => "completed".to_string(),
            FlowStatus::Escaped { step, sign } => format!("escaped@{step}:{sign}"),
            FlowStatus::Failed { step, .. } => format!("failed@{step}"),
        };
        let _ = writeln!(
            s,
            "0,0,0,{:e},{:e},{:e},{:e},,,,,,,,{}",
            self.initial_constant, self.initial.alpha, self.initial.beta, self.initial.gamma, status
        );
        for r in &self.steps {
            let _ = writeln!(
                s,
                "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{}",
                r.step,
                r.e_shift,
                r.delta,
                r.unstable,
                r.input.alpha,
                r.input.beta,
                r.input.gamma,
                r.output.alpha,
                r.output.beta,
                r.output.gamma,
                r.predicted.alpha,
                r.predicted.beta_increment,
                r.predicted.gamma,
                r.margin,
                status
            );
        }
        s
    }
}

/// Iterates [`rg_step`] up to `n_steps` times, re-adding the expanded
/// constant after each step so that `E_n = ρ⁻¹E_{n-1} + Δ_n`.
///
/// Stops as escaped once `|E_n| > 1/18`; a failed decimation ends the flow
/// with status `Failed`.
pub fn rg_iterate(
    family0: &KernelFamily,
    rho: f64,
    n_steps: usize,
    basis: &TruncatedFockBasis,
) -> Result<RGTrace> {
    if n_steps == 0 {
        return Err(Error::InvalidParameter("n_steps must be at least 1".into()));
    }
    let e0 = family0.constant().re;
    let mut trace = RGTrace {
        rho,
        initial_constant: e0,
        initial: polydisc_membership(family0)?,
        steps: Vec::new(),
        status: FlowStatus::Completed,
    };
    if e0.abs() > ESCAPE_THRESHOLD {
        trace.status = FlowStatus::Escaped { step: 0, sign: if e0 > 0.0 { 1 } else { -1 } };
        return Ok(trace);
    }
    let mut current = family0.clone();
    for n in 1..=n_steps {
        let out = match rg_step(&current, rho, basis) {
            Ok(o) => o,
            Err(e @ Error::NotInvertible { .. }) => {
                trace.status = FlowStatus::Failed { step: n, message: e.to_string() };
                return Ok(trace);
            }
            Err(e) => return Err(e),
        };
        let delta = out.family.constant().re;
        let unstable = out.e_shift + delta;
        trace.steps.push(StepRecord {
            step: n,
            e_shift: out.e_shift,
            delta,
            unstable,
            input: out.input,
            output: out.output,
            predicted: out.input.predicted(rho),
            margin: out.margin,
            input_in_domain: out.input_in_domain,
            w00: out.family.w00().iter().map(|v| v.re).collect(),
        });
        if unstable.abs() > ESCAPE_THRESHOLD {
            trace.status = FlowStatus::Escaped { step: n, sign: if unstable > 0.0 { 1 } else { -1 } };
            return Ok(trace);
        }
        current = out.family.shifted(C64::new(out.e_shift, 0.0));
    }
    Ok(trace)
}
