use std::fmt::Write as _;
use std::path::PathBuf;

use serde_json::json;
use spectral_rg::feshbach::run_random_suite;
use spectral_rg::fock::build_dilation_b;
use spectral_rg::linalg::c;
use spectral_rg::models::{build_nelson, initial_decimation, kato_constants, NelsonModel};
use spectral_rg::rg::{contraction_audit, e_series_estimate, gs_energy_bisect, rg_iterate, rg_step, BisectOptions};
use spectral_rg::verify::{
    decay_scan, eps_floor, exact_diag, lap_scan, mourre_check_family, window_schedule, Spectrum, WeightedResolvent,
};

use crate::config::RunConfig;
use crate::output::Artifacts;
use crate::Command;

/// Ground-state agreement required of `gs-energy`.
pub const GS_TOLERANCE: f64 = 1e-4;
/// Mourre margin floor in units of `δ`.
pub const MOURRE_FLOOR: f64 = -0.05;

pub enum Outcome {
    Pass,
    Failed(String),
}

pub enum RunError {
    Validation(String),
    Numerical(anyhow::Error),
}

impl From<spectral_rg::Error> for RunError {
    fn from(e: spectral_rg::Error) -> Self {
        use spectral_rg::Error as E;
        match e {
            E::InvalidParameter(_) | E::DimensionCap { .. } | E::OutsideWindow { .. } => {
                RunError::Validation(e.to_string())
            }
            other => RunError::Numerical(other.into()),
        }
    }
}

impl From<anyhow::Error> for RunError {
    fn from(e: anyhow::Error) -> Self {
        RunError::Numerical(e)
    }
}

impl From<serde_json::Error> for RunError {
    fn from(e: serde_json::Error) -> Self {
        RunError::Numerical(e.into())
    }
}

const ALL: [Command; 8] = [
    Command::Build,
    Command::GsEnergy,
    Command::RgRun,
    Command::AuditContraction,
    Command::IsospectralSuite,
    Command::Mourre,
    Command::LapScan,
    Command::DecayScan,
];

/// Model and exact spectrum, built on first use and shared by subcommands.
struct Session<'a> {
    cfg: &'a RunConfig,
    model: Option<NelsonModel>,
    spectrum: Option<Spectrum>,
}

impl<'a> Session<'a> {
    fn model(&mut self) -> Result<&NelsonModel, RunError> {
        if self.model.is_none() {
            let basis = self.cfg.basis()?;
            self.model = Some(build_nelson(&self.cfg.nelson(), &basis)?);
        }
        Ok(self.model.as_ref().unwrap())
    }

    fn spectrum(&mut self) -> Result<&Spectrum, RunError> {
        if self.spectrum.is_none() {
            let s = exact_diag(&self.model()?.h)?;
            self.spectrum = Some(s);
        }
        Ok(self.spectrum.as_ref().unwrap())
    }

    fn ground(&mut self) -> Result<f64, RunError> {
        Ok(self.spectrum()?.ground())
    }
}

pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Outcome, RunError> {
    let hash = cfg.hash();
    let mut art = Artifacts::new(&PathBuf::from(&cfg.output.dir), &hash, &cfg.output.formats)?;
    art.text("config.toml", &format!("# config_hash={hash}\n{}", cfg.canonical()))?;
    let list: Vec<Command> = if cmd == Command::All { ALL.to_vec() } else { vec![cmd] };
    let mut session = Session { cfg, model: None, spectrum: None };
    let mut failures = Vec::new();
    let mut result = Ok(());
    for c in list {
        match run_one(c, &mut session, &mut art) {
            Ok(Outcome::Pass) => {}
            Ok(Outcome::Failed(why)) => failures.push(format!("{}: {why}", c.name())),
            Err(e) => {
                result = Err(e);
                break;
            }
        }
    }
    let code = match (&result, failures.is_empty()) {
        (Err(RunError::Validation(_)), _) => 1,
        (Err(RunError::Numerical(_)), _) => 2,
        (Ok(()), false) => 3,
        (Ok(()), true) => 0,
    };
    art.manifest(cmd.name(), cfg.suite.seed, code)?;
    result?;
    if failures.is_empty() {
        Ok(Outcome::Pass)
    } else {
        Ok(Outcome::Failed(failures.join("; ")))
    }
}

fn run_one(cmd: Command, s: &mut Session, art: &mut Artifacts) -> Result<Outcome, RunError> {
    match cmd {
        Command::Build => build(s, art),
        Command::GsEnergy => gs_energy(s, art),
        Command::RgRun => rg_run(s, art),
        Command::AuditContraction => audit(s, art),
        Command::IsospectralSuite => suite(s, art),
        Command::Mourre => mourre(s, art),
        Command::LapScan => lap(s, art),
        Command::DecayScan => decay(s, art),
        Command::All => unreachable!("expanded by the caller"),
    }
}

fn build(s: &mut Session, art: &mut Artifacts) -> Result<Outcome, RunError> {
    let spectrum = s.spectrum()?.clone();
    let m = s.model()?;
    let kato = kato_constants(m);
    let mut csv = String::from("index,eigenvalue\n");
    for (i, v) in spectrum.values.iter().enumerate() {
        let _ = writeln!(csv, "{i},{v:?}");
    }
    art.csv("spectrum", &csv)?;
    art.json(
        "model",
        json!({
            "dim": m.basis.dim(),
            "sector_dim": m.basis.sector_dim(),
            "e0": m.e0(),
            "gap": m.gap(),
            "kato": { "a": kato.a, "b": kato.b },
            "kappa": m.kappa,
            "ground_energy": spectrum.ground(),
            "max_residual": spectrum.max_residual,
        }),
    )?;
    println!("build: dim {}, exact ground energy {:.12e}", m.basis.dim(), spectrum.ground());
    Ok(Outcome::Pass)
}

fn gs_energy(s: &mut Session, art: &mut Artifacts) -> Result<Outcome, RunError> {
    let opts = s.cfg.bisect_options()?;
    let exact = s.ground()?;
    let r = gs_energy_bisect(s.model()?, &opts)?;
    let diff = (r.e_g - exact).abs();
    art.csv("gs_trace", &r.trace.to_csv())?;
    art.json(
        "gs_energy",
        json!({
            "e_g_rg": r.e_g,
            "e_g_exact": exact,
            "abs_diff": diff,
            "tolerance": GS_TOLERANCE,
            "bracket": r.bracket,
            "evaluations": r.evaluations,
            "options": opts,
        }),
    )?;
    println!("e_g(RG) = {:.12e}\ne_g(oracle) = {exact:.12e}\n|Δ| = {diff:.3e}", r.e_g);
    Ok(if diff <= GS_TOLERANCE {
        Outcome::Pass
    } else {
        Outcome::Failed(format!("|Δ| = {diff:e} exceeds {GS_TOLERANCE:e}"))
    })
}

fn trace_at(s: &mut Session, lambda: f64, opts: &BisectOptions) -> Result<spectral_rg::rg::RGTrace, RunError> {
    let init = initial_decimation(s.model()?, lambda, opts.rho0, opts.params)?;
    Ok(rg_iterate(&init.family, opts.rho, opts.n_steps, init.reduced.basis())?)
}

fn rg_run(s: &mut Session, art: &mut Artifacts) -> Result<Outcome, RunError> {
    let opts = s.cfg.bisect_options()?;
    let lambda = match s.cfg.rg.lambda {
        Some(l) => l,
        None => s.ground()?,
    };
    let trace = trace_at(s, lambda, &opts)?;
    let series = e_series_estimate(&trace);
    art.csv("rg_trace", &trace.to_csv())?;
    art.json("rg_run", json!({ "lambda": lambda, "trace": trace, "series": series }))?;
    println!("rg-run: λ = {lambda:.12e}, {} steps, status {:?}", trace.steps.len(), trace.status);
    Ok(Outcome::Pass)
}

fn audit(s: &mut Session, art: &mut Artifacts) -> Result<Outcome, RunError> {
    let opts = s.cfg.bisect_options()?;
    let lambda = s.ground()?;
    let trace = trace_at(s, lambda, &opts)?;
    let rep = contraction_audit(&trace);
    let mut csv = String::from(
        "step,gamma_in,gamma_out,gamma_bound,alpha_out,beta_increment,quadratic_bound,in_hypotheses,passed\n",
    );
    for r in &rep.rows {
        let _ = writeln!(
            csv,
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{},{}",
            r.step,
            r.gamma_in,
            r.gamma_out,
            r.gamma_bound,
            r.alpha_out,
            r.beta_increment,
            r.quadratic_bound,
            r.in_hypotheses,
            r.passed
        );
    }
    art.csv("audit", &csv)?;
    art.json("audit", serde_json::to_value(&rep)?)?;
    println!("audit-contraction: {} steps, all passed {}", rep.rows.len(), rep.all_passed);
    Ok(if rep.all_passed { Outcome::Pass } else { Outcome::Failed("a step exceeded its contraction bound".into()) })
}

fn suite(s: &mut Session, art: &mut Artifacts) -> Result<Outcome, RunError> {
    let cfg = &s.cfg.suite;
    let seed = cfg.seed.ok_or_else(|| RunError::Validation("suite.seed is required".into()))?;
    let sum = run_random_suite(seed, cfg.instances, cfg.max_dim)?;
    let mut csv = String::from("seed,kind,dim,forward,backward,resolvent,kernel_dim_h,kernel_dim_f,passed\n");
    for r in &sum.reports {
        let _ = writeln!(
            csv,
            "{},{},{},{:e},{:e},{:e},{},{},{}",
            r.seed,
            r.kind,
            r.dim,
            r.forward_residual,
            r.backward_residual,
            r.resolvent_residual.unwrap_or(0.0),
            r.kernel_dim_h,
            r.kernel_dim_f,
            r.passed()
        );
    }
    art.csv("suite", &csv)?;
    art.json("suite", serde_json::to_value(&sum)?)?;
    println!("isospectral-suite: {}/{} passed", sum.passed, sum.instances);
    Ok(if sum.all_passed() {
        Outcome::Pass
    } else {
        Outcome::Failed(format!("{} of {} instances failed", sum.instances - sum.passed, sum.instances))
    })
}

fn mourre(s: &mut Session, art: &mut Artifacts) -> Result<Outcome, RunError> {
    let opts = s.cfg.bisect_options()?;
    let v = s.cfg.verify.clone();
    let lambda = s.ground()?;
    let init = initial_decimation(s.model()?, lambda, opts.rho0, opts.params)?;
    let basis = init.reduced.basis().clone();
    let mut family = init.family;
    let mut csv = String::from("step,min_eigenvalue,margin_ratio,window_dim,remainder_norm,gamma,matrix_min_eigenvalue\n");
    let mut reports = Vec::new();
    let mut ok = true;
    for step in 1..=v.mourre_steps {
        let out = rg_step(&family, opts.rho, &basis)?;
        let rep = mourre_check_family(&out.family, &basis, v.mourre_delta)?;
        ok &= rep.margin_ratio >= MOURRE_FLOOR;
        let _ = writeln!(
            csv,
            "{step},{:e},{:e},{},{:e},{:e},{:e}",
            rep.min_eigenvalue,
            rep.margin_ratio,
            rep.window_dim,
            rep.remainder_norm.unwrap_or(f64::NAN),
            rep.gamma.unwrap_or(f64::NAN),
            rep.matrix_min_eigenvalue.unwrap_or(f64::NAN)
        );
        reports.push(rep);
        family = out.family.shifted(c(out.e_shift));
    }
    art.csv("mourre", &csv)?;
    art.json("mourre", json!({ "lambda": lambda, "steps": reports }))?;
    let ratios: Vec<String> = reports.iter().map(|r| format!("{:.3}", r.margin_ratio)).collect();
    println!("mourre: margin/δ by step {}", ratios.join(", "));
    Ok(if ok { Outcome::Pass } else { Outcome::Failed(format!("margin below {MOURRE_FLOOR}·δ")) })
}

fn lap(s: &mut Session, art: &mut Artifacts) -> Result<Outcome, RunError> {
    let v = s.cfg.verify.clone();
    let (rho, rho0) = (s.cfg.rg.rho, s.cfg.rho0());
    let spectrum = s.spectrum()?.clone();
    let m = s.model()?;
    let b = build_dilation_b(&m.basis)?;
    let wr = WeightedResolvent::with_spectrum(spectrum, &b, v.theta_lap)?;
    let sched = window_schedule(wr.spectrum.ground(), rho, rho0, v.windows)?;
    let mut summary = Vec::new();
    for w in &sched.windows {
        let floor = eps_floor(&wr.spectrum, w.lo, w.hi)?;
        let rep = lap_scan(&wr, (w.lo, w.hi), floor, v.lap_points, &v.eps_multipliers)?;
        art.csv(&format!("lap_window{}", w.n), &rep.table.to_csv())?;
        println!(
            "lap-scan: window {} [{:.6}, {:.6}], ε_floor {:.3e}, growth {:.3}, Hölder {:.3}",
            w.n, w.lo, w.hi, floor, rep.growth, rep.holder.exponent
        );
        summary.push(json!({
            "window": w,
            "eps_floor": rep.eps_floor,
            "sup_by_eps": rep.sup_by_eps,
            "growth": rep.growth,
            "holder": rep.holder,
            "target_exponent": rep.target_exponent,
            "unitarity_ok": rep.unitarity_ok,
        }));
    }
    art.json("lap", json!({ "theta": v.theta_lap, "schedule": sched, "windows": summary }))?;
    Ok(Outcome::Pass)
}

fn decay(s: &mut Session, art: &mut Artifacts) -> Result<Outcome, RunError> {
    let v = s.cfg.verify.clone();
    let (rho, rho0) = (s.cfg.rg.rho, s.cfg.rho0());
    let spectrum = s.spectrum()?.clone();
    let m = s.model()?;
    let b = build_dilation_b(&m.basis)?;
    let wr = WeightedResolvent::with_spectrum(spectrum, &b, v.theta_decay)?;
    let sched = window_schedule(wr.spectrum.ground(), rho, rho0, v.windows)?;
    let rep = decay_scan(&wr, sched.covered, v.times)?;
    art.csv("decay", &rep.table.to_csv())?;
    let mut j = serde_json::to_value(&rep)?;
    if let Some(o) = j.as_object_mut() {
        o.remove("table");
    }
    art.json("decay", j)?;
    println!(
        "decay-scan: {} levels, T_rec {:.3e}, value ratio {:.3}, monotone fraction {:.3}",
        rep.levels,
        rep.t_rec,
        rep.value_end / rep.value_t0,
        rep.monotone_fraction
    );
    Ok(Outcome::Pass)
}
