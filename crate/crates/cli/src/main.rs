use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tpost::complexity::complexity_report;
use tpost::harness::{
    run_experiment, run_validation, with_thread_cap, write_outputs, ExperimentConfig, ModelSpec,
    Suite,
};
use tpost::io::{read_json, read_prior, write_json, write_points_csv, COVARIATE_NORM_TOL};
use tpost::poisson::{simulate_poisson, IntensitySpec};
use tpost::rng::{substream, Purpose};
use tpost::sphere::CovariateSet;
use tpost::tuning::{find_admissible_tuning, Framework};
use tpost::Error;

#[derive(Parser)]
#[command(
    name = "tpost",
    version,
    about = "T-posterior estimators, experiments and validation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the validation suites and print one line per check.
    Validate {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the full summary as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a configured experiment and write records.csv, posterior_final.csv and summary.json.
    Estimate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// π-complexity and critical radius of a discrete prior around one point.
    Complexity {
        #[arg(long)]
        prior: PathBuf,
        #[arg(long)]
        loss: PathBuf,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        center: String,
    },
    /// Admissible (λ, β) pairs on a grid, best γ first, as JSON.
    TuningSearch {
        #[arg(long)]
        framework: Framework,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Simulate Poisson processes from a cell-wise intensity file.
    Simulate {
        #[arg(long)]
        intensity: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        processes: usize,
    },
}

#[derive(Args)]
struct GridArgs {
    /// `LO:HI:STEP`
    #[arg(long, value_parser = parse_range)]
    lambda: Range,
    /// `LO:HI:STEP`
    #[arg(long, value_parser = parse_range)]
    beta: Range,
}

#[derive(Clone)]
struct Range(Vec<f64>);

fn parse_range(s: &str) -> Result<Range, String> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("cannot parse {p:?}"))
        })
        .collect::<Result<_, _>>()?;
    let [lo, hi, step] = parts[..] else {
        return Err("expected LO:HI:STEP".into());
    };
    if !(step > 0.0 && lo <= hi && lo.is_finite() && hi.is_finite()) {
        return Err("need LO ≤ HI and STEP > 0".into());
    }
    let count = ((hi - lo) / step * (1.0 + 1e-12)).floor() as usize + 1;
    Ok(Range((0..count).map(|k| lo + k as f64 * step).collect()))
}

/// Errors in the inputs map to exit code 2, everything else to 1.
fn exit_for(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Config(_) | Error::Io { .. } | Error::Json(_) | Error::Lookup(_) => {
            ExitCode::from(2)
        }
        _ => ExitCode::from(1),
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> tpost::Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn warn_covariates(config: &ExperimentConfig) -> tpost::Result<()> {
    if let ModelSpec::Sphere {
        covariates: Some(w),
        ..
    } = &config.model
    {
        let (_, dev) = CovariateSet::renormalized(w.clone())?;
        if dev > COVARIATE_NORM_TOL {
            eprintln!(
                "warning: covariates renormalised to unit length (largest deviation {dev:.3e})"
            );
        }
    }
    Ok(())
}

fn validate(suite: Suite, seed: u64, out: Option<PathBuf>) -> tpost::Result<bool> {
    let summary = with_thread_cap(|| run_validation(suite, seed))?;
    for r in &summary.reports {
        println!(
            "{} {:<32} instances={:<7} violations={:<4} skipped={:<4} worst_margin={:.3e}",
            if r.passed() { "PASS" } else { "FAIL" },
            r.name,
            r.instances_tested,
            r.violations,
            r.skipped,
            r.worst_margin
        );
    }
    if let Some(t) = &summary.tuning {
        for v in [&t.density_quoted, &t.poisson_quoted] {
            println!(
                "INFO {:?} quoted (λ={}, β={}): constraints={} sign_pattern={} admissible={}",
                v.framework,
                v.lambda,
                v.beta,
                v.constraints.satisfied,
                v.sign_pattern,
                v.admissible
            );
        }
    }
    if let Some(path) = out {
        write_json(&path, &summary)?;
    }
    Ok(summary.passed)
}

fn estimate(config: PathBuf, out: PathBuf) -> tpost::Result<()> {
    let config: ExperimentConfig = read_json(&config)?;
    config.validate()?;
    warn_covariates(&config)?;
    let output = with_thread_cap(|| run_experiment(&config))?;
    write_outputs(&output, &out)?;
    let s = &output.summary;
    println!(
        "coverage {:.4} (target {:.4}), mass outside {:.4}, median loss {:.4}, theorem radius {:.4}{}",
        s.coverage,
        s.coverage_target,
        s.mass_outside_mean,
        s.loss.median,
        s.theorem_radius,
        if s.vacuous { " (vacuous)" } else { "" }
    );
    Ok(())
}

fn simulate(intensity: PathBuf, seed: u64, out: PathBuf, processes: usize) -> tpost::Result<()> {
    let spec: IntensitySpec = read_json(&intensity)?;
    let (grid, lambda) = spec.build()?;
    let procs = (0..processes)
        .map(|i| {
            simulate_poisson(
                &lambda,
                &grid,
                i,
                &mut substream(seed, 0, Purpose::Data, i as u64),
            )
        })
        .collect::<tpost::Result<Vec<_>>>()?;
    write_points_csv(&out, &procs, spec.dim)
}

fn run(command: Command) -> tpost::Result<ExitCode> {
    match command {
        Command::Validate { suite, seed, out } => {
            return Ok(if validate(suite, seed, out)? {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Estimate { config, out } => estimate(config, out)?,
        Command::Complexity {
            prior,
            loss,
            gamma,
            center,
        } => {
            let prior = read_prior(&prior, &loss)?;
            let center = prior.index_of(&center)?;
            print_json(&complexity_report(&prior, center, gamma)?)?;
        }
        Command::TuningSearch { framework, grid } => {
            print_json(&find_admissible_tuning(
                framework,
                &grid.lambda.0,
                &grid.beta.0,
            ))?;
        }
        Command::Simulate {
            intensity,
            seed,
            out,
            processes,
        } => simulate(intensity, seed, out, processes)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    run(cli.command).unwrap_or_else(|e| exit_for(&e))
}
