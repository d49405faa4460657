use serde::{Deserialize, Serialize};

use super::flow::RGTrace;

/// `S = Σ_{i≥1} ρ^i Δ_i` with `Δ_i = E_i - ρ⁻¹E_{i-1}`.
///
/// Since `ρⁿEₙ = E₀ + Σ_{i≤n} ρ^i Δ_i`, a bounded flow gives `S ≈ -E₀`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesReport {
    pub sum: f64,
    pub deltas: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// `|Σ_{j>i} ρ^j Δ_j|` within the trace.
    pub tails: Vec<f64>,
    /// `2 ρ^i α_i` with `α_i` the measured constant bound after step `i`.
    pub envelope: Vec<f64>,
    pub envelope_holds: bool,
    /// `|ρⁿEₙ - E₀ - Σ_{i≤n} ρ^i Δ_i|`, bookkeeping check.
    pub identity_residual: f64,
    /// `|S + E₀|`.
    pub consistency: f64,
    /// Partial sums failed to settle: the last term is not below the first.
    pub divergent: bool,
}

pub fn e_series_estimate(trace: &RGTrace) -> SeriesReport {
    let rho = trace.rho;
    let e0 = trace.initial_constant;
    let deltas: Vec<f64> = trace.steps.iter().map(|s| s.delta).collect();
    let terms: Vec<f64> = deltas.iter().enumerate().map(|(i, d)| rho.powi(i as i32 + 1) * d).collect();
    let partial_sums: Vec<f64> = terms
        .iter()
        .scan(0.0, |acc, t| {
            *acc += t;
            Some(*acc)
        })
        .collect();
    let sum = partial_sums.last().copied().unwrap_or(0.0);
    let tails: Vec<f64> = (0..terms.len()).map(|i| terms[i + 1..].iter().sum::<f64>().abs()).collect();
    let envelope: Vec<f64> =
        trace.steps.iter().map(|s| 2.0 * rho.powi(s.step as i32) * s.output.alpha).collect();
    let envelope_holds = tails.iter().zip(&envelope).all(|(t, e)| *t <= *e * (1.0 + 1e-12) + f64::EPSILON * e0.abs());
    let identity_residual = trace
        .steps
        .last()
        .map(|s| (rho.powi(s.step as i32) * s.unstable - e0 - sum).abs())
        .unwrap_or(0.0);
    let divergent = match (terms.first(), terms.last()) {
        (Some(a), Some(b)) if terms.len() > 1 => b.abs() > a.abs() && b.abs() > 0.0,
        _ => false,
    };
    SeriesReport {
        sum,
        deltas,
        partial_sums,
        tails,
        envelope,
        envelope_holds,
        identity_residual,
        consistency: (sum + e0).abs(),
        divergent,
    }
}
