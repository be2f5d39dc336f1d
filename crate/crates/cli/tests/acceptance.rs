//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! (with indented detail) and exits nonzero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use idsig::estimator::step_bound;
use idsig::experiments::{audit_monotonicity, Direction, MonotonicityReport, Param, SweepAxis, SweepSpec};
use idsig::presets::{balanced, random_restricted_population, reference_population, OutGroupMix};
use idsig::{
    augmented_params, believes, closed_form_equilibrium, estimate_k, ground_truth_oracle, monte_carlo_accuracy,
    run_sweep, synthesize_from_oracle, SourceType,
};
use idsig_cli::commands::check_population;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;
const POPULATIONS: usize = 10_000;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { pass: true, detail: Vec::new() }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.pass &= ok;
        self.detail.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }

    fn note(&mut self, line: String) {
        self.detail.push(format!("     {line}"));
    }
}

fn reference_example() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let pop = balanced();
    let k = augmented_params(&pop).expect("determinate");
    o.check(format!("{:.3}", k.k_a) == "2.857", format!("k_A = {:.3}", k.k_a));
    o.check(format!("{:.3}", k.k_b) == "1.025", format!("k_B = {:.3}", k.k_b));
    let oracle = ground_truth_oracle(&pop);
    for (side, truth) in [(SourceType::A, 2.857), (SourceType::B, 1.025)] {
        let est = estimate_k(&oracle, side, 0.01, 1e4).expect("valid resolution");
        o.check((est.k_hat - truth).abs() < 0.01, format!("k_hat_{side} = {:.5} (|err| < 0.01)", est.k_hat));
        o.check(est.steps == 21, format!("queries on side {side} = {} (expect 21)", est.steps));
    }
    o.note(format!("runtime {:?}", start.elapsed()));
    o
}

fn step_bound_sweep() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    for (max, delta) in [(1e4, 1e-2), (1e2, 1e-4)] {
        let bound = step_bound(delta, max);
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        for side in SourceType::ALL {
            let (mut tested, mut worst_err, mut worst_steps, mut bad) = (0, 0.0_f64, 0, 0);
            while tested < 1000 {
                let pop = random_restricted_population(&mut rng);
                let Ok(k) = augmented_params(&pop) else { continue };
                let truth = if side == SourceType::A { k.k_a } else { k.k_b };
                if !(truth > 0.0 && truth < max) {
                    continue;
                }
                tested += 1;
                let est = estimate_k(&ground_truth_oracle(&pop), side, delta, max).expect("valid resolution");
                let err = (est.k_hat - truth).abs();
                worst_err = worst_err.max(err);
                worst_steps = worst_steps.max(est.steps);
                if !(err < delta && est.steps <= bound) {
                    bad += 1;
                }
            }
            o.check(
                bad == 0,
                format!(
                    "M={max:e} delta={delta:e} side {side}: 1000 populations, max err {worst_err:.3e}, max steps {worst_steps} (bound {bound})"
                ),
            );
        }
    }
    let elapsed = start.elapsed();
    o.check(elapsed < Duration::from_secs(1), format!("runtime {elapsed:?} (< 1 s)"));
    o
}

fn oracle_equivalence() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_idsig"))
        .args(["verify", "--trials", &POPULATIONS.to_string(), "--seed", &SEED.to_string()])
        .output()
        .expect("binary runs");
    let code = out.status.code();
    o.check(code == Some(0), format!("idsig verify --trials {POPULATIONS} exit code {code:?}"));
    match serde_json::from_slice::<serde_json::Value>(&out.stdout) {
        Ok(r) => {
            let gap = |k: &str| r[k].as_f64().unwrap_or(f64::INFINITY);
            o.check(gap("max_quality_gap") <= 1e-9, format!("max |dQ| = {:e}", gap("max_quality_gap")));
            o.check(
                gap("max_coordinate_gap") <= 1e-9,
                format!("max coordinate deviation = {:e}", gap("max_coordinate_gap")),
            );
        }
        Err(e) => o.check(false, format!("unreadable report: {e}")),
    }
    o.note(format!("runtime {:?}", start.elapsed()));
    o
}

fn structural_properties() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut violations = Vec::new();
    for _ in 0..POPULATIONS {
        let pop = random_restricted_population(&mut rng);
        match check_population(&pop) {
            Ok(c) => violations.extend(c.structural),
            Err(e) => violations.push(e.to_string()),
        }
    }
    o.check(
        violations.is_empty(),
        format!(
            "{POPULATIONS} populations: truthful on negative states, Q >= 2, both types believe, \
             oracle n_B > 0 implies m_A = 1; {} violations",
            violations.len()
        ),
    );
    for v in violations.iter().take(5) {
        o.note(v.clone());
    }
    o
}

fn monotonicity() -> Outcome {
    let mut o = Outcome::new();
    let axes = [
        (Param::IdentityA, 0.0, 1.0),
        (Param::IdentityB, 0.0, 1.0),
        (Param::AccuracyA, 0.0, 1.0),
        (Param::AccuracyB, 0.0, 1.0),
        // in-group penalty stays at 1, so the restriction holds throughout
        (Param::OutGroupA, 1.0, 5.0),
        (Param::OutGroupB, 1.0, 5.0),
    ];
    for mix in OutGroupMix::ALL {
        let base = reference_population(mix);
        for (param, lo, hi) in axes {
            let spec = SweepSpec::one_dimensional(base, SweepAxis::new(param, lo, hi, 201));
            let direction = param.claimed_direction();
            let report = audit_monotonicity(&spec, param, direction).expect("valid sweep");
            o.check(report.passed(), describe(mix, &report));
        }
    }
    o
}

fn describe(mix: OutGroupMix, r: &MonotonicityReport) -> String {
    let dir = match r.direction {
        Direction::Nonincreasing => "nonincreasing",
        Direction::Nondecreasing => "nondecreasing",
    };
    let mut s = format!("{mix:?} base, {} {dir}: {} of {} pairs violate", r.param, r.violations.len(), r.pairs_checked);
    if let Some(v) = r.violations.first() {
        s += &format!(" (first: Q {:.6} -> {:.6} at {:?} -> {:?})", v.quality_from, v.quality_to, v.from, v.to);
    }
    s
}

fn heatmap_spot_values() -> Outcome {
    let mut o = Outcome::new();
    let spec = SweepSpec {
        base: balanced(),
        axes: vec![SweepAxis::new(Param::IdentityA, 0.0, 1.0, 101), SweepAxis::new(Param::AccuracyA, 0.0, 1.0, 101)],
        simplex_constrained: false,
    };
    let result = run_sweep(&spec).expect("valid sweep");
    o.check(result.records.len() == 10_201, format!("{} cells", result.records.len()));
    let at = |ls: f64, la: f64| {
        result
            .records
            .iter()
            .find(|r| (r.axis_values[0] - ls).abs() < 1e-12 && (r.axis_values[1] - la).abs() < 1e-12)
            .expect("grid cell")
    };

    let both_negative: Vec<_> = result.records.iter().filter(|r| r.params.k_a < 0.0 && r.params.k_b < 0.0).collect();
    o.check(
        both_negative.iter().all(|r| r.quality == 4.0),
        format!("{} cells with k_A < 0 and k_B < 0, all with Q = 4", both_negative.len()),
    );
    let c = at(0.1, 0.9);
    o.check(
        c.quality == 4.0,
        format!(
            "cell lambda_a_A=0.9 lambda_s_A=0.1: Q = {:.10} (k_A = {:.4}, k_B = {:.4}, {})",
            c.quality, c.params.k_a, c.params.k_b, c.case_label
        ),
    );
    let c = at(0.45, 0.55);
    let target = 3.0 + 1.0 / 1.025;
    o.check(
        (c.quality - target).abs() <= 1e-6,
        format!("cell lambda_a_A=0.55 lambda_s_A=0.45: Q = {:.10} (3 + 1/1.025 = {target:.10})", c.quality),
    );
    o
}

fn monte_carlo() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let pop = balanced();
    let eq = closed_form_equilibrium(&pop).expect("restricted");
    let n = 1_000_000;
    let est = monte_carlo_accuracy(&eq.strategy, &pop, n, SEED).expect("believed strategy");
    let tol = 3.0 * (0.25 / n as f64).sqrt();
    let gap = (est.accuracy - est.expected).abs();
    o.check(
        gap <= tol,
        format!("N={n}: accuracy {:.6}, Q/4 {:.6}, |gap| {gap:.2e} <= {tol:.2e}", est.accuracy, est.expected),
    );
    let elapsed = start.elapsed();
    o.check(elapsed < Duration::from_secs(5), format!("runtime {elapsed:?} (< 5 s)"));
    o
}

fn estimation_pipeline() -> Outcome {
    let mut o = Outcome::new();
    let pop = balanced();
    let q_star = closed_form_equilibrium(&pop).expect("restricted").quality;
    let (est_a, est_b, strategy) = synthesize_from_oracle(&ground_truth_oracle(&pop), 0.01, 1e4).expect("valid");
    o.note(format!(
        "edges used: k_A >= {:.5}, k_B <= {:.5} (midpoints {:.5}, {:.5})",
        est_a.lower, est_b.upper, est_a.k_hat, est_b.k_hat
    ));
    o.check(
        (strategy.quality() - q_star).abs() <= 0.05,
        format!("Q = {:.6} vs closed form {q_star:.6}", strategy.quality()),
    );
    let flags = believes(&strategy, &pop);
    o.check(flags == (true, true), format!("believed by (A, B) = {flags:?}"));
    o
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("reference example estimates", reference_example),
        ("bisection step bound", step_bound_sweep),
        ("closed form vs LP oracle", oracle_equivalence),
        ("structural properties", structural_properties),
        ("monotonicity audit", monotonicity),
        ("heatmap spot values", heatmap_spot_values),
        ("monte carlo accuracy identity", monte_carlo),
        ("end-to-end estimation pipeline", estimation_pipeline),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        println!("criterion {}: {} ({name})", i + 1, if outcome.pass { "PASS" } else { "FAIL" });
        for line in &outcome.detail {
            println!("    {line}");
        }
        failed += usize::from(!outcome.pass);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
