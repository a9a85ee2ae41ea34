//! Acceptance criteria. Each prints one `[PASS]`/`[FAIL]` line with the
//! tolerance and runtime budget it was checked against; any failure makes
//! the run exit nonzero.

use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use tpost::harness::validate::{
    complexity_suite, engine_equivalence, laplace_suite, lem_som_sweep, math_suite_with,
    sphere_cap_suite,
};
use tpost::harness::{
    run_experiment, run_validation, ContaminationSpec, ExperimentConfig, ExperimentOutput, Suite,
    ValidationSummary,
};
use tpost::io::{read_json, write_json};
use tpost::oracles::{debase_sweep, ideal_risk_sweep, prop00_check, CheckReport, TripleConfig};

const SEED: u64 = 20261016;

fn report(id: u32, title: &str, ok: bool, detail: &str, elapsed: Duration, budget_s: f64) -> bool {
    let secs = elapsed.as_secs_f64();
    let pass = ok && secs < budget_s;
    println!(
        "[{}] criterion {id}: {title}: {detail} ({secs:.2}s, budget {budget_s}s)",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

fn describe(reports: &[CheckReport]) -> (bool, String) {
    let ok = reports.iter().all(CheckReport::passed);
    let text = reports
        .iter()
        .map(|r| {
            format!(
                "{} {}/{} violations",
                r.name, r.violations, r.instances_tested
            )
        })
        .collect::<Vec<_>>()
        .join(", ");
    (ok, text)
}

fn config(name: &str) -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name);
    let c: ExperimentConfig = read_json(&path).unwrap();
    c.validate().unwrap();
    c
}

fn with_fraction(f: f64) -> ExperimentConfig {
    let mut c = config("sphere_poisson.json");
    c.contamination = ContaminationSpec::Deterministic {
        count: 0,
        add: 0,
        remove: 0,
        fraction: Some(f),
        mechanism: None,
    };
    c
}

fn clean_run() -> &'static (ExperimentOutput, Duration) {
    static CLEAN: OnceLock<(ExperimentOutput, Duration)> = OnceLock::new();
    CLEAN.get_or_init(|| {
        let t = Instant::now();
        let out = run_experiment(&config("sphere_poisson.json")).unwrap();
        (out, t.elapsed())
    })
}

fn criterion_01_special_functions() -> bool {
    let t = Instant::now();
    let (ok, detail) = describe(&math_suite_with(10_000).unwrap());
    report(
        1,
        "special values exact, ψ antisymmetry within 1e-12 on 1e4 points",
        ok,
        &detail,
        t.elapsed(),
        1.0,
    )
}

fn criterion_02_engine_matches_oracle() -> bool {
    let t = Instant::now();
    let r = engine_equivalence(200, SEED).unwrap();
    let detail = format!(
        "max deviation {:.3e} over {} instances",
        1e-10 - r.worst_margin,
        r.instances_tested
    );
    report(
        2,
        "engine vs brute force, tolerance 1e-10",
        r.passed(),
        &detail,
        t.elapsed(),
        10.0,
    )
}

fn criterion_03_ideal_test_bound() -> bool {
    let t = Instant::now();
    let (ok, detail) = describe(&[ideal_risk_sweep(100, SEED).unwrap()]);
    report(
        3,
        "ideal-test risk bound, slack 1e-9",
        ok,
        &detail,
        t.elapsed(),
        5.0,
    )
}

fn criterion_04_inequality_oracles() -> bool {
    let t = Instant::now();
    let mut reports = vec![
        debase_sweep(500, SEED).unwrap(),
        prop00_check(TripleConfig::default(), 1000, SEED).unwrap(),
    ];
    reports.extend(lem_som_sweep(50, SEED).unwrap());
    let (ok, detail) = describe(&reports);
    report(
        4,
        "debase 1e-12, prop00 1e-10, shell lemma 1e-12",
        ok,
        &detail,
        t.elapsed(),
        30.0,
    )
}

fn criterion_05_sphere_caps() -> bool {
    let t = Instant::now();
    let (ok, detail) = describe(&sphere_cap_suite(100_000, SEED).unwrap());
    report(
        5,
        "caps within 4 SE at 1e5 samples, D=3 equals t²/4 to 1e-10",
        ok,
        &detail,
        t.elapsed(),
        10.0,
    )
}

fn criterion_06_poisson_coverage() -> bool {
    let (out, elapsed) = clean_run();
    let s = &out.summary;
    let cov_floor = s.coverage_target - 4.0 * s.coverage_se;
    let mass_ceiling = s.mass_outside_target + 4.0 * s.mass_outside_se;
    let ok =
        s.coverage >= cov_floor && s.mass_outside_mean <= mass_ceiling && s.loss.median.is_finite();
    let detail = format!(
        "coverage {:.4} ≥ {:.4}, mass outside {:.4} ≤ {:.4}, median loss {:.3}, radius {:.3e}{}, tuning (λ={:.4}, β={:.4})",
        s.coverage,
        cov_floor,
        s.mass_outside_mean,
        mass_ceiling,
        s.loss.median,
        s.theorem_radius,
        if s.vacuous { " vacuous" } else { "" },
        s.tuning.lambda,
        s.tuning.beta
    );
    report(
        6,
        "sphere-model Poisson coverage, ξ=3, 500 replications",
        ok,
        &detail,
        *elapsed,
        300.0,
    )
}

fn criterion_07_robustness() -> bool {
    let (clean, _) = clean_run();
    let t = Instant::now();
    let base = clean.summary.loss.median;
    let mut ok = base.is_finite() && base < clean.summary.diameter;
    let mut parts = vec![format!("clean median {base:.3}")];
    for f in [0.02, 0.05] {
        let s = run_experiment(&with_fraction(f)).unwrap().summary;
        let allowed = s.robustness_constant * s.t_xi;
        let increase = s.loss.median - base;
        ok &= increase <= allowed && s.loss.median.is_finite() && s.loss.median < s.diameter;
        let b = s.baselines.as_ref().unwrap();
        parts.push(format!(
            "{:.0}%: N={} median {:.3}, increase {:.3} ≤ {:.3e}, baseline medians gibbs {:?} mle {:?}",
            f * 100.0,
            s.t_xi,
            s.loss.median,
            increase,
            allowed,
            b.gibbs.as_ref().map(|l| l.median),
            b.mle.as_ref().map(|l| l.median)
        ));
    }
    report(
        7,
        "additive degradation under contamination",
        ok,
        &parts.join("; "),
        t.elapsed(),
        300.0,
    )
}

fn criterion_08_empirical_laplace() -> bool {
    let t = Instant::now();
    let (ok, detail) = describe(&laplace_suite(20, 10_000, SEED).unwrap());
    report(
        8,
        "Laplace transforms within 4 SE, 20 triples, 1e4 replications",
        ok,
        &detail,
        t.elapsed(),
        180.0,
    )
}

fn criterion_09_constraint_provenance() -> bool {
    let t = Instant::now();
    let summary = run_validation(Suite::Tuning, SEED).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("summary.json");
    write_json(&path, &summary).unwrap();
    let back: ValidationSummary = read_json(&path).unwrap();
    let tuning = back.tuning.unwrap();
    let d = tuning.density_admissible.as_ref();
    let p = tuning.poisson_admissible.as_ref();
    let ok = back.passed && d.is_some_and(|a| a.gamma > 0.0) && p.is_some_and(|a| a.gamma > 0.0);
    let detail = format!(
        "density (0.1, 0.01) constraints {}, Poisson (0.15, 0.1) constraints {}; admissible density {:?}, Poisson {:?}",
        tuning.density_quoted.constraints.satisfied,
        tuning.poisson_quoted.constraints.satisfied,
        d.map(|a| (a.lambda, a.beta, a.gamma)),
        p.map(|a| (a.lambda, a.beta, a.gamma))
    );
    report(
        9,
        "quoted verdicts recorded, admissible pairs with γ > 0",
        ok,
        &detail,
        t.elapsed(),
        10.0,
    )
}

fn criterion_10_complexity_invariants() -> bool {
    let t = Instant::now();
    let (ok, detail) = describe(&complexity_suite(SEED).unwrap());
    report(
        10,
        "π-complexity ≤ critical radius, mixture domination, Σe^(−L)=1 to 1e-12",
        ok,
        &detail,
        t.elapsed(),
        10.0,
    )
}

fn main() {
    let criteria: [fn() -> bool; 10] = [
        criterion_01_special_functions,
        criterion_02_engine_matches_oracle,
        criterion_03_ideal_test_bound,
        criterion_04_inequality_oracles,
        criterion_05_sphere_caps,
        criterion_06_poisson_coverage,
        criterion_07_robustness,
        criterion_08_empirical_laplace,
        criterion_09_constraint_provenance,
        criterion_10_complexity_invariants,
    ];
    let mut failed = 0;
    for c in criteria {
        match std::panic::catch_unwind(c) {
            Ok(true) => {}
            Ok(false) => failed += 1,
            Err(_) => {
                println!("[FAIL] criterion panicked");
                failed += 1;
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
