use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `[e + ρ₀ ρ δ_n / 2, e + ρ₀ δ_n]` with `δ_n = ρⁿ/18`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub n: usize,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WindowSchedule {
    pub e_g: f64,
    pub rho: f64,
    pub rho0: f64,
    pub windows: Vec<Window>,
    /// `(e + ρ₀ ρ δ_{n_max}/2, e + ρ₀ δ₀]`, the union of the windows.
    pub covered: (f64, f64),
}

impl WindowSchedule {
    /// Windows meeting `[a, b]`.
    pub fn containing(&self, x: f64) -> Vec<Window> {
        self.windows.iter().copied().filter(|w| w.lo <= x && x <= w.hi).collect()
    }
}

/// Window ladder in the original energy variable, with a coverage check.
pub fn window_schedule(e_g: f64, rho: f64, rho0: f64, n_max: usize) -> Result<WindowSchedule> {
    if !(rho > 0.0 && rho <= 0.5) {
        return Err(Error::InvalidParameter(format!("rho must lie in (0, 1/2], got {rho}")));
    }
    if n_max < 1 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    if !(rho0 > 0.0) {
        return Err(Error::InvalidParameter(format!("rho0 must be positive, got {rho0}")));
    }
    let windows: Vec<Window> = (0..=n_max)
        .map(|n| {
            let d = rho.powi(n as i32) / 18.0;
            Window { n, lo: e_g + rho0 * rho * d / 2.0, hi: e_g + rho0 * d }
        })
        .collect();
    // Consecutive windows overlap: lo_n < hi_{n+1} because ρ/2 < ρ.
    for pair in windows.windows(2) {
        if !(pair[1].hi >= pair[0].lo) {
            return Err(Error::Numerical(format!("windows {} and {} leave a gap", pair[0].n, pair[1].n)));
        }
    }
    let last = windows[windows.len() - 1];
    Ok(WindowSchedule { e_g, rho, rho0, covered: (last.lo, windows[0].hi), windows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_endpoints_halve() {
        let s = window_schedule(0.0, 0.5, 1.0, 3).unwrap();
        let hi: Vec<f64> = s.windows.iter().map(|w| w.hi).collect();
        assert_eq!(hi, vec![1.0 / 18.0, 1.0 / 36.0, 1.0 / 72.0, 1.0 / 144.0]);
        assert_eq!(s.covered, (0.5 / 144.0 / 2.0 * 1.0, 1.0 / 18.0));
    }

    #[test]
    fn rejects_large_rho() {
        assert!(window_schedule(0.0, 0.75, 1.0, 2).is_err());
    }
}
