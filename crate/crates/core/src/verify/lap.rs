use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::diag::Spectrum;
use super::resolvent::WeightedResolvent;
use super::scan::ScanTable;

/// `2 ×` the largest gap between consecutive distinct eigenvalues meeting `[a, b]`,
/// counting the nearest levels outside on either side.
pub fn eps_floor(spectrum: &Spectrum, a: f64, b: f64) -> Result<f64> {
    let v = &spectrum.values;
    let lo = v.iter().rposition(|&e| e < a).unwrap_or(0);
    let hi = v.iter().position(|&e| e > b).unwrap_or(v.len() - 1);
    let mut levels: Vec<f64> = v[lo..=hi].to_vec();
    levels.dedup_by(|x, y| (*x - *y).abs() <= 1e-12);
    if levels.len() < 2 {
        return Err(Error::EmptySupport(format!("fewer than two levels around [{a}, {b}]")));
    }
    Ok(2.0 * levels.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max))
}

/// Least-squares fit `log|F(x₁) - F(x₂)| ≈ log C + ν log|x₁ - x₂|`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct HolderFit {
    pub exponent: f64,
    pub log_constant: f64,
    pub pairs: usize,
}

/// Fit over all pairs with separation at least `min_sep` and nonzero difference.
pub fn holder_fit(x: &[f64], f: &[f64], min_sep: f64) -> Result<HolderFit> {
    let mut pts = Vec::new();
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let (dx, df) = ((x[i] - x[j]).abs(), (f[i] - f[j]).abs());
            if dx >= min_sep && df > 0.0 {
                pts.push((dx.ln(), df.ln()));
            }
        }
    }
    if pts.len() < 2 {
        return Err(Error::Numerical("too few pairs for a Hölder fit".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Numerical("degenerate separations in Hölder fit".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    Ok(HolderFit { exponent, log_constant: my - exponent * mx, pairs: pts.len() })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LapReport {
    pub window: (f64, f64),
    pub theta: f64,
    pub eps_floor: f64,
    /// `(ε, sup_λ value)` for `ε = m · ε_floor`, largest first.
    pub sup_by_eps: Vec<(f64, f64)>,
    /// `sup(ε_floor) / sup(ε_max) - 1`.
    pub growth: f64,
    /// Fit of the λ-profile at `ε_floor`.
    pub holder: HolderFit,
    /// `θ - 0.55`.
    pub target_exponent: f64,
    /// Every row satisfies `value ≤ 1/ε`.
    pub unitarity_ok: bool,
    pub table: ScanTable,
}

/// Scans `n_lambda` equally spaced points of `window` at `ε = m ε_floor` for
/// each multiplier in `multipliers` (descending), in parallel.
pub fn lap_scan(
    wr: &WeightedResolvent,
    window: (f64, f64),
    eps_floor: f64,
    n_lambda: usize,
    multipliers: &[f64],
) -> Result<LapReport> {
    let (a, b) = window;
    if !(b > a) || n_lambda < 3 || multipliers.is_empty() || !(eps_floor > 0.0) {
        return Err(Error::InvalidParameter("lap scan needs a proper window, ≥ 3 points and ε_floor > 0".into()));
    }
    if !(wr.theta > 0.5) {
        return Err(Error::InvalidParameter(format!("theta must exceed 1/2, got {}", wr.theta)));
    }
    let step = (b - a) / (n_lambda - 1) as f64;
    let lambdas: Vec<f64> = (0..n_lambda).map(|i| a + step * i as f64).collect();
    let mut mults = multipliers.to_vec();
    mults.sort_by(|x, y| y.total_cmp(x));
    let points: Vec<(f64, f64)> =
        mults.iter().flat_map(|&m| lambdas.iter().map(move |&l| (l, m * eps_floor))).collect();
    let values: Vec<f64> = points.par_iter().map(|&(l, e)| wr.value(l, e)).collect::<Result<_>>()?;

    let mut table = ScanTable::new(&["lambda", "eps", "value"]);
    table.meta("theta", wr.theta);
    table.meta("eps_floor", eps_floor);
    table.meta("window", format!("{a},{b}"));
    let mut unitarity_ok = true;
    for (&(l, e), &v) in points.iter().zip(&values) {
        unitarity_ok &= v <= (1.0 / e) * (1.0 + 1e-12);
        table.push(vec![l, e, v])?;
    }
    table.sort();
    let sup_by_eps: Vec<(f64, f64)> = mults
        .iter()
        .enumerate()
        .map(|(k, &m)| (m * eps_floor, values[k * n_lambda..(k + 1) * n_lambda].iter().copied().fold(0.0, f64::max)))
        .collect();
    let growth = sup_by_eps.last().unwrap().1 / sup_by_eps[0].1 - 1.0;
    let floor_row = mults.iter().position(|&m| m == *mults.last().unwrap()).unwrap();
    let profile = &values[floor_row * n_lambda..(floor_row + 1) * n_lambda];
    let holder = holder_fit(&lambdas, profile, 2.0 * step)?;
    Ok(LapReport {
        window,
        theta: wr.theta,
        eps_floor,
        sup_by_eps,
        growth,
        holder,
        target_exponent: wr.theta - 0.55,
        unitarity_ok,
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holder_fit_recovers_power_law() {
        let x: Vec<f64> = (0..40).map(|i| i as f64 * 0.01).collect();
        let f: Vec<f64> = x.iter().map(|v| 3.0 * v).collect();
        let h = holder_fit(&x, &f, 0.02).unwrap();
        assert!((h.exponent - 1.0).abs() < 1e-12);
        assert!((h.log_constant - 3f64.ln()).abs() < 1e-12);
        let f: Vec<f64> = x.iter().map(|v| v.sqrt()).collect();
        // Differences of √x from the origin dominate the small-separation end.
        assert!(holder_fit(&x, &f, 0.02).unwrap().exponent < 1.0);
    }
}
