use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use idsig::experiments::{write_monte_carlo_csv, write_sweep_csv, MonotonicityReport};
use idsig::presets::random_restricted_population;
use idsig::{
    audit_sweep, augmented_params, believes, closed_form_equilibrium, full_lp_oracle, ground_truth_oracle,
    lower_bound_check, monte_carlo_accuracy, run_sweep, synthesize_from_oracle, EstimationResult, Population,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{load_config, LoadedConfig, PopulationConfig};
use crate::report::{emit, exact, real, strategy};
use crate::{Cli, CliError, Command};

/// Closed form and full LP must agree to this in quality and in every
/// coordinate.
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-9;

pub fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let out = cli.out.as_deref();
    match cli.command {
        Command::Equilibrium => {
            let cfg = require_config(cli)?;
            emit(&equilibrium_report(&cfg.population)?, stdout, out)
        }
        Command::Verify => {
            let base = match &cli.config {
                Some(path) => Some(load_config(path)?.population),
                None => None,
            };
            let summary = verify(base, cli.trials, cli.seed.unwrap_or(0))?;
            emit(&summary.to_json(), stdout, out)?;
            summary.into_result()
        }
        Command::Estimate => {
            let cfg = require_config(cli)?;
            emit(&estimate_report(&cfg)?, stdout, out)
        }
        Command::Sweep => {
            let cfg = require_config(cli)?;
            let path = out.ok_or_else(|| CliError::Usage("sweep needs --out <path>".into()))?;
            let (summary, violations) = sweep(&cfg, path)?;
            emit(&summary, stdout, None)?;
            if cli.audit && violations > 0 {
                return Err(CliError::Property(format!("monotonicity audit found {violations} violations")));
            }
            Ok(())
        }
        Command::Simulate => {
            let cfg = require_config(cli)?;
            emit(&simulate(&cfg, cli.seed, out)?, stdout, None)
        }
    }
}

fn require_config(cli: &Cli) -> Result<LoadedConfig, CliError> {
    let path = cli.config.as_deref().ok_or_else(|| CliError::Usage("this command needs --config <path>".into()))?;
    load_config(path)
}

pub fn equilibrium_report(population: &Population) -> Result<Value, CliError> {
    let eq = closed_form_equilibrium(population)?;
    let (believes_a, believes_b) = believes(&eq.strategy, population);
    Ok(json!({
        "k_A": real(eq.params.k_a),
        "k_B": real(eq.params.k_b),
        "case": eq.case_label.as_str(),
        "m_A": exact(eq.strategy.m_a),
        "m_B": exact(eq.strategy.m_b),
        "n_A": exact(eq.strategy.n_a),
        "n_B": exact(eq.strategy.n_b),
        "Q": real(eq.quality),
        "believes_A": believes_a,
        "believes_B": believes_b,
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialCheck {
    pub population: Population,
    pub quality_gap: f64,
    pub coordinate_gap: f64,
    pub structural: Vec<String>,
}

impl TrialCheck {
    pub fn mismatched(&self) -> bool {
        !(self.quality_gap <= EQUIVALENCE_TOLERANCE && self.coordinate_gap <= EQUIVALENCE_TOLERANCE)
    }
}

/// Compares the closed form with the full LP on one restricted population
/// and checks the structural properties of both optima.
pub fn check_population(population: &Population) -> idsig::Result<TrialCheck> {
    let cf = closed_form_equilibrium(population)?;
    let lp = full_lp_oracle(population)?;
    let coordinate_gap =
        cf.strategy.to_array().iter().zip(lp.strategy.to_array()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);

    let mut structural = Vec::new();
    if cf.strategy.m_a != 1.0 || cf.strategy.m_b != 1.0 {
        structural.push("negative states not reported truthfully".to_string());
    }
    if !lower_bound_check(&cf) || !lower_bound_check(&lp) {
        structural.push(format!("quality below 2 (closed form {}, LP {})", cf.quality, lp.quality));
    }
    if believes(&cf.strategy, population) != (true, true) {
        structural.push("equilibrium strategy not believed by both types".to_string());
    }
    if lp.strategy.n_b > EQUIVALENCE_TOLERANCE && (lp.strategy.m_a - 1.0).abs() > EQUIVALENCE_TOLERANCE {
        structural.push(format!("LP optimum has n_B = {} > 0 but m_A = {}", lp.strategy.n_b, lp.strategy.m_a));
    }
    Ok(TrialCheck { population: *population, quality_gap: (cf.quality - lp.quality).abs(), coordinate_gap, structural })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifySummary {
    pub trials: u64,
    pub seed: u64,
    pub max_quality_gap: f64,
    pub max_coordinate_gap: f64,
    /// Trials failing equivalence or a structural check.
    pub failures: Vec<TrialCheck>,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        let failures: Vec<Value> = self
            .failures
            .iter()
            .map(|t| {
                json!({
                    "population": PopulationConfig::from(&t.population),
                    "quality_gap": real(t.quality_gap),
                    "coordinate_gap": real(t.coordinate_gap),
                    "structural": t.structural,
                })
            })
            .collect();
        json!({
            "trials": self.trials,
            "seed": self.seed,
            "max_quality_gap": real(self.max_quality_gap),
            "max_coordinate_gap": real(self.max_coordinate_gap),
            "tolerance": EQUIVALENCE_TOLERANCE,
            "passed": self.passed(),
            "failures": failures,
        })
    }

    pub fn into_result(self) -> Result<(), CliError> {
        if self.passed() {
            Ok(())
        } else {
            Err(CliError::Property(format!("{} of {} populations failed", self.failures.len(), self.trials)))
        }
    }
}

/// Checks `trials` populations: `base` first when given, then seeded random
/// restricted draws.
pub fn verify(base: Option<Population>, trials: u64, seed: u64) -> Result<VerifySummary, CliError> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    if let Some(p) = &base {
        p.require_restricted()?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random = trials - u64::from(base.is_some());
    let populations: Vec<Population> =
        base.into_iter().chain((0..random).map(|_| random_restricted_population(&mut rng))).collect();

    let checks = populations.par_iter().map(check_population).collect::<idsig::Result<Vec<_>>>()?;
    let max_quality_gap = checks.iter().map(|c| c.quality_gap).fold(0.0, f64::max);
    let max_coordinate_gap = checks.iter().map(|c| c.coordinate_gap).fold(0.0, f64::max);
    let failures = checks.into_iter().filter(|c| c.mismatched() || !c.structural.is_empty()).collect();
    Ok(VerifySummary { trials, seed, max_quality_gap, max_coordinate_gap, failures })
}

fn estimation_json(suffix: &str, est: &EstimationResult, map: &mut serde_json::Map<String, Value>) {
    map.insert(format!("k_hat_{suffix}"), real(est.k_hat));
    map.insert(format!("steps_{suffix}"), json!(est.steps));
    map.insert(format!("lower_{suffix}"), real(est.lower));
    map.insert(format!("upper_{suffix}"), real(est.upper));
    map.insert(format!("at_upper_bound_{suffix}"), json!(est.at_upper_bound));
}

pub fn estimate_report(cfg: &LoadedConfig) -> Result<Value, CliError> {
    let est = cfg.raw.estimator.ok_or_else(|| CliError::Usage("config has no estimator block".into()))?;
    let population = &cfg.population;
    let (est_a, est_b, synthesized) = synthesize_from_oracle(&ground_truth_oracle(population), est.delta, est.max)?;
    let (believes_a, believes_b) = believes(&synthesized, population);

    let mut map = serde_json::Map::new();
    map.insert("delta".into(), real(est.delta));
    map.insert("M".into(), real(est.max));
    estimation_json("A", &est_a, &mut map);
    estimation_json("B", &est_b, &mut map);
    if let Ok(k) = augmented_params(population) {
        map.insert("k_A".into(), real(k.k_a));
        map.insert("k_B".into(), real(k.k_b));
    }
    map.insert("strategy".into(), strategy(&synthesized));
    map.insert("Q".into(), real(synthesized.quality()));
    map.insert("believes_A".into(), json!(believes_a));
    map.insert("believes_B".into(), json!(believes_b));
    Ok(Value::Object(map))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Domain(format!("cannot write {}: {e}", path.display())))
}

fn write_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Domain(format!("cannot write {}: {e}", path.display()))
}

fn audit_json(r: &MonotonicityReport) -> Value {
    json!({
        "param": r.param.name(),
        "direction": r.direction,
        "pairs": r.pairs_checked,
        "violations": r.violations.len(),
    })
}

/// Runs the config's sweep, writes its CSV to `path` and returns the JSON
/// summary with the total audit violation count.
pub fn sweep(cfg: &LoadedConfig, path: &Path) -> Result<(Value, usize), CliError> {
    let spec = cfg.sweep_spec()?;
    let result = run_sweep(&spec)?;
    let mut writer = create(path)?;
    write_sweep_csv(&result, &mut writer).map_err(write_error(path))?;
    writer.flush().map_err(write_error(path))?;

    let audits = audit_sweep(&result);
    let violations = audits.iter().map(|r| r.violations.len()).sum();
    let (q_min, q_max) = result.quality_range().unwrap_or((f64::NAN, f64::NAN));
    let summary = json!({
        "out": path.display().to_string(),
        "rows": result.records.len(),
        "skipped": result.skipped.len(),
        "Q_min": real(q_min),
        "Q_max": real(q_max),
        "unbelieved": result.unbelieved(),
        "audit": audits.iter().map(audit_json).collect::<Vec<_>>(),
        "violations": violations,
    });
    Ok((summary, violations))
}

/// Monte Carlo accuracy of the closed-form equilibrium. `seed` overrides the
/// config's seed; the CSV goes to `out` when given.
pub fn simulate(cfg: &LoadedConfig, seed: Option<u64>, out: Option<&Path>) -> Result<Value, CliError> {
    let block = cfg.raw.simulate.ok_or_else(|| CliError::Usage("config has no simulate block".into()))?;
    let seed = seed.unwrap_or(block.seed);
    let eq = closed_form_equilibrium(&cfg.population)?;
    let est = monte_carlo_accuracy(&eq.strategy, &cfg.population, block.n, seed)?;
    if let Some(path) = out {
        let mut writer = create(path)?;
        write_monte_carlo_csv(&est, &mut writer).map_err(write_error(path))?;
        writer.flush().map_err(write_error(path))?;
    }
    Ok(json!({
        "N": est.n,
        "seed": est.seed,
        "accuracy": real(est.accuracy),
        "std_error": real(est.std_error),
        "expected": real(est.expected),
        "Q": real(eq.quality),
        "within_3_sigma": est.within(3.0),
    }))
}
