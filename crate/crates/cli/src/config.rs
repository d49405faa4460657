use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use spectral_rg::fock::{MomentumGrid, TruncatedFockBasis};
use spectral_rg::kernel::NormParams;
use spectral_rg::models::NelsonConfig;
use spectral_rg::rg::BisectOptions;

/// Full run configuration, one TOML table per section.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub grid: GridSection,
    pub rg: RgSection,
    pub verify: VerifySection,
    pub suite: SuiteSection,
    pub output: OutputSection,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub levels: Vec<f64>,
    pub g: f64,
    pub mu: f64,
    pub kappa: Option<Vec<f64>>,
    pub coupling: Option<Vec<Vec<Vec<f64>>>>,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self { levels: vec![0.0, 1.0], g: 0.02, mu: 0.5, kappa: None, coupling: None }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub sigma: f64,
    pub n_k: usize,
    pub n_max: usize,
    pub e_max: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { sigma: 0.5, n_k: 8, n_max: 2, e_max: 2.0 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RgSection {
    pub rho: f64,
    /// Defaults to the particle gap.
    pub rho0: Option<f64>,
    pub n_steps: usize,
    pub tol: f64,
    pub s: usize,
    /// Spectral parameter for `rg-run`; the exact ground energy when absent.
    pub lambda: Option<f64>,
}

impl Default for RgSection {
    fn default() -> Self {
        Self { rho: 0.5, rho0: None, n_steps: 12, tol: 1e-12, s: 2, lambda: None }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    /// `θ` for the resolvent scan, then for the decay scan.
    pub theta_lap: f64,
    pub theta_decay: f64,
    /// Highest window index `n` of the ladder.
    pub windows: usize,
    /// `ε = m · ε_floor` for each multiplier.
    pub eps_multipliers: Vec<f64>,
    pub lap_points: usize,
    pub times: usize,
    pub mourre_delta: f64,
    pub mourre_steps: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            theta_lap: 0.75,
            theta_decay: 1.0,
            windows: 2,
            eps_multipliers: vec![8.0, 4.0, 2.0, 1.0],
            lap_points: 61,
            times: 201,
            mourre_delta: 1.0 / 18.0,
            mourre_steps: 4,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteSection {
    pub seed: Option<u64>,
    pub instances: usize,
    pub max_dim: usize,
}

impl Default for SuiteSection {
    fn default() -> Self {
        Self { seed: None, instances: 200, max_dim: 100 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: String,
    pub formats: Vec<String>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: "out".into(), formats: vec!["csv".into(), "json".into()] }
    }
}

/// Reads `path` (or the defaults), applies `section.key=value` overrides and
/// deserializes. Errors are returned as a list of messages.
pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig, Vec<String>> {
    let mut table: toml::Table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| vec![format!("cannot read {}: {e}", p.display())])?;
            text.parse().map_err(|e| vec![format!("{}: {e}", p.display())])?
        }
        None => toml::Table::new(),
    };
    let mut errors = Vec::new();
    for o in overrides {
        if let Err(e) = apply_override(&mut table, o) {
            errors.push(e);
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| vec![e.message().to_string()])
}

fn apply_override(table: &mut toml::Table, spec: &str) -> Result<(), String> {
    let (key, raw) = spec.split_once('=').ok_or_else(|| format!("override `{spec}` is not key=value"))?;
    let (section, field) = key.trim().split_once('.').ok_or_else(|| format!("override key `{key}` is not section.key"))?;
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let entry = table.entry(section.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
    let sec = entry.as_table_mut().ok_or_else(|| format!("`{section}` is not a section"))?;
    sec.insert(field.to_string(), value);
    Ok(())
}

impl RunConfig {
    pub fn nelson(&self) -> NelsonConfig {
        NelsonConfig {
            levels: self.model.levels.clone(),
            g: self.model.g,
            mu: self.model.mu,
            kappa: self.model.kappa.clone(),
            coupling: self.model.coupling.clone(),
        }
    }

    pub fn gap(&self) -> f64 {
        self.nelson().gap()
    }

    pub fn rho0(&self) -> f64 {
        self.rg.rho0.unwrap_or_else(|| self.gap())
    }

    /// Every cross-section consistency check; empty when valid.
    pub fn validate(&self) -> Vec<String> {
        let mut e = Vec::new();
        if let Err(err) = self.nelson().validate() {
            e.push(format!("model: {err}"));
        }
        let g = &self.grid;
        if !(g.sigma > 0.0 && g.sigma < 1.0) {
            e.push("grid.sigma must lie in (0, 1)".into());
        }
        if g.n_k < 3 {
            e.push("grid.n_k must be at least 3".into());
        }
        if g.n_max == 0 {
            e.push("grid.n_max must be at least 1".into());
        }
        if !(g.e_max > 0.0) {
            e.push("grid.e_max must be positive".into());
        }
        let r = &self.rg;
        if !(r.rho > 0.0 && r.rho <= 0.5) {
            e.push("rg.rho must lie in (0, 1/2]".into());
        } else if g.sigma > 0.0 && g.sigma < 1.0 {
            let p = (r.rho.ln() / g.sigma.ln()).round();
            if p < 1.0 || ((g.sigma.powi(p as i32) - r.rho).abs() > 1e-12 * r.rho) {
                e.push("rg.rho must be sigma^p".into());
            }
        }
        if self.model.levels.len() >= 2 {
            let rho0 = self.rho0();
            if !(rho0 > 0.0 && rho0 <= self.gap()) {
                e.push("rg.rho0 must lie in (0, gap]".into());
            }
            if rho0 < 100.0 * self.model.g * self.model.g {
                e.push("rg.rho0 must be at least 100 g^2".into());
            }
        }
        if r.n_steps == 0 {
            e.push("rg.n_steps must be at least 1".into());
        }
        if !(r.tol > 0.0) {
            e.push("rg.tol must be positive".into());
        }
        if r.s > 2 {
            e.push("rg.s must be 0, 1 or 2".into());
        }
        let v = &self.verify;
        for (name, t) in [("verify.theta_lap", v.theta_lap), ("verify.theta_decay", v.theta_decay)] {
            if !(t > 0.5 && t <= 1.0) {
                e.push(format!("{name} must lie in (1/2, 1]"));
            }
        }
        if v.windows == 0 {
            e.push("verify.windows must be at least 1".into());
        }
        if v.eps_multipliers.is_empty() || v.eps_multipliers.iter().any(|m| !(*m >= 1.0)) {
            e.push("verify.eps_multipliers must be a non-empty list of values >= 1".into());
        }
        if v.lap_points < 3 || v.times < 3 {
            e.push("verify.lap_points and verify.times must be at least 3".into());
        }
        if !(v.mourre_delta > 0.0) {
            e.push("verify.mourre_delta must be positive".into());
        }
        if self.suite.instances == 0 {
            e.push("suite.instances must be at least 1".into());
        }
        for f in &self.output.formats {
            if f != "csv" && f != "json" {
                e.push(format!("output.formats: unknown format `{f}`"));
            }
        }
        e
    }

    pub fn basis(&self) -> spectral_rg::Result<TruncatedFockBasis> {
        let grid = MomentumGrid::new(self.grid.sigma, self.grid.n_k)?;
        TruncatedFockBasis::build(&grid, self.grid.n_max, self.grid.e_max, self.model.levels.len())
    }

    pub fn bisect_options(&self) -> spectral_rg::Result<BisectOptions> {
        Ok(BisectOptions {
            rho0: self.rho0(),
            rho: self.rg.rho,
            n_steps: self.rg.n_steps,
            tol: self.rg.tol,
            params: NormParams::new(self.model.mu, self.rg.s, NormParams::contraction_xi(self.rg.rho))?,
        })
    }

    /// Canonical TOML of the resolved configuration.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// SHA-256 of the canonical form with `output.dir` blanked, hex encoded.
    /// Identical computations written to different places share a hash.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output.dir.clear();
        hex::encode(Sha256::digest(c.canonical().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        assert!(RunConfig::default().validate().is_empty());
    }

    #[test]
    fn override_parses_numbers_and_lists() {
        let c = load(None, &["rg.rho=0.25".into(), "verify.eps_multipliers=[4, 1]".into()]).unwrap();
        assert_eq!(c.rg.rho, 0.25);
        assert_eq!(c.verify.eps_multipliers, vec![4.0, 1.0]);
    }

    #[test]
    fn rho_off_grid_is_rejected() {
        let c = load(None, &["rg.rho=0.3".into()]).unwrap();
        assert!(c.validate().iter().any(|e| e == "rg.rho must be sigma^p"));
    }

    #[test]
    fn hash_changes_with_content() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.model.g = 0.03;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash(), RunConfig::default().hash());
        b = a.clone();
        b.output.dir = "elsewhere".into();
        assert_eq!(a.hash(), b.hash());
    }
}
