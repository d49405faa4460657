use serde::{Deserialize, Serialize};

use crate::kernel::c_chi;

use super::flow::RGTrace;

/// Measured step against the contraction estimate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AuditRow {
    pub step: usize,
    pub gamma_in: f64,
    pub gamma_out: f64,
    pub gamma_bound: f64,
    pub alpha_out: f64,
    pub beta_increment: f64,
    /// `3 C_χ γ² / (2ρ)`, bounding `α'` and `β' - β`.
    pub quadratic_bound: f64,
    /// Whether the input met `α, β ≤ ρ/8`, `γ ≤ ρ/(8C_χ)`.
    pub in_hypotheses: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContractionReport {
    pub rho: f64,
    pub mu: f64,
    pub rows: Vec<AuditRow>,
    /// `128 C_χ² ρ^μ`.
    pub rate_bound: f64,
    /// Geometric mean of `γ_{n+1}/γ_n` over steps with `γ_n > 0`.
    pub fitted_rate: Option<f64>,
    /// `fitted_rate / ρ^μ`, the constant `c` of `γ_n ~ (cρ^μ)ⁿ γ₀`.
    pub implied_c: Option<f64>,
    pub all_passed: bool,
}

/// Compares each step of `trace` with the contraction estimate.
pub fn contraction_audit(trace: &RGTrace) -> ContractionReport {
    let rho = trace.rho;
    let cc = c_chi();
    let mu = trace.steps.first().map(|s| s.input.mu).unwrap_or(trace.initial.mu);
    let rate_bound = 128.0 * cc * cc * rho.powf(mu);
    let rows: Vec<AuditRow> = trace
        .steps
        .iter()
        .map(|s| {
            let quad = s.predicted.alpha;
            let beta_increment = s.output.beta - s.input.beta;
            let passed = s.output.gamma <= s.predicted.gamma * (1.0 + 1e-12)
                && s.output.alpha <= quad * (1.0 + 1e-12)
                && beta_increment <= quad * (1.0 + 1e-12) + 1e-14;
            AuditRow {
                step: s.step,
                gamma_in: s.input.gamma,
                gamma_out: s.output.gamma,
                gamma_bound: s.predicted.gamma,
                alpha_out: s.output.alpha,
                beta_increment,
                quadratic_bound: quad,
                in_hypotheses: s.input.in_contraction_domain(rho),
                passed,
            }
        })
        .collect();
    let ratios: Vec<f64> = rows
        .iter()
        .filter(|r| r.gamma_in > 0.0 && r.gamma_out > 0.0)
        .map(|r| r.gamma_out / r.gamma_in)
        .collect();
    let fitted_rate =
        (!ratios.is_empty()).then(|| (ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64).exp());
    ContractionReport {
        rho,
        mu,
        all_passed: rows.iter().all(|r| r.passed),
        rows,
        rate_bound,
        implied_c: fitted_rate.map(|r| r / rho.powf(mu)),
        fitted_rate,
    }
}
