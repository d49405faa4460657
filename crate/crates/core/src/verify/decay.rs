use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, C64};

use super::resolvent::WeightedResolvent;
use super::scan::ScanTable;

/// Smooth bump equal to 1 at the centre of `(a, b)` and vanishing outside.
pub fn bump(a: f64, b: f64) -> impl Fn(f64) -> f64 {
    move |x| {
        let y = (2.0 * x - a - b) / (b - a);
        if y.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - y * y)).exp()
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecayReport {
    pub support: (f64, f64),
    pub theta: f64,
    /// Eigenvalues strictly inside the support.
    pub levels: usize,
    /// `2π / (smallest spacing of those levels)`.
    pub t_rec: f64,
    pub value_t0: f64,
    /// `‖⟨B⟩^-θ f(H) ⟨B⟩^-θ‖`, computed independently of the time loop.
    pub static_value: f64,
    pub value_end: f64,
    /// Fraction of consecutive samples with non-increasing value.
    pub monotone_fraction: f64,
    /// Power-law exponent fitted on `t ≥ t_fit_start`.
    pub nu_fit: f64,
    /// Large-time decay is not representable with a discrete spectrum; the
    /// scan is meaningful only for `t ≤ T_rec/2`.
    pub caveat: String,
    pub table: ScanTable,
}

/// `t ↦ ‖⟨B⟩^-θ e^{-iHt} f(H) ⟨B⟩^-θ‖` on `n_times` points of `[0, T_rec/2]`.
pub fn decay_scan(wr: &WeightedResolvent, support: (f64, f64), n_times: usize) -> Result<DecayReport> {
    let (a, b) = support;
    if !(b > a) || n_times < 3 {
        return Err(Error::InvalidParameter("decay scan needs a proper support and ≥ 3 times".into()));
    }
    let inside: Vec<f64> = wr.spectrum.values.iter().copied().filter(|&e| e > a && e < b).collect();
    if inside.is_empty() {
        return Err(Error::EmptySupport(format!("no eigenvalues in ({a}, {b})")));
    }
    let mut distinct = inside.clone();
    distinct.dedup_by(|x, y| (*x - *y).abs() <= 1e-12);
    let min_gap = distinct.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let t_rec = if min_gap.is_finite() { 2.0 * std::f64::consts::PI / min_gap } else { f64::INFINITY };
    let t_end = if t_rec.is_finite() { t_rec / 2.0 } else { 1.0 };
    let f = bump(a, b);
    let static_value = linalg::op_norm(&wr.sandwich(|e| C64::new(f(e), 0.0)));
    let mut table = ScanTable::new(&["t", "value"]);
    table.meta("theta", wr.theta);
    table.meta("support", format!("{a},{b}"));
    table.meta("t_rec", t_rec);
    let times: Vec<f64> = (0..n_times).map(|i| t_end * i as f64 / (n_times - 1) as f64).collect();
    let mut values = Vec::with_capacity(n_times);
    for &t in &times {
        let v = linalg::op_norm(&wr.sandwich(|e| C64::from_polar(f(e), -e * t)));
        values.push(v);
        table.push(vec![t, v])?;
    }
    let down = values.windows(2).filter(|w| w[1] <= w[0] * (1.0 + 1e-12)).count();
    let monotone_fraction = down as f64 / (values.len() - 1) as f64;
    // Power law on the upper half of the window, where the short-time plateau is over.
    let start = n_times / 2;
    let pts: Vec<(f64, f64)> =
        times[start..].iter().zip(&values[start..]).filter(|(t, v)| **t > 0.0 && **v > 0.0).map(|(t, v)| (t.ln(), v.ln())).collect();
    let nu_fit = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        -sxy / sxx
    } else {
        0.0
    };
    Ok(DecayReport {
        support,
        theta: wr.theta,
        levels: inside.len(),
        t_rec,
        value_t0: values[0],
        static_value,
        value_end: *values.last().unwrap(),
        monotone_fraction,
        nu_fit,
        caveat: "discrete spectrum: recurrences beyond T_rec/2, asymptotic power law not reproducible".into(),
        table,
    })
}
