//! Command-line front end. Four subcommands: `verify` runs the seeded
//! theorem sweep on one nest, `corollaries` runs the checker campaigns,
//! `counterexample` replays the four-dimensional contrast story, and
//! `solve` decides a single (delta, tau) pair read from matrix files.
//!
//! Exit codes: 0 when the requested computation completed with the expected
//! outcome, 2 for bad input or unmet preconditions, 3 when an internal
//! consistency guarantee failed — in which case a reproduction bundle is
//! written to `theorem_violation.json` in the working directory.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand};

use tderiv::error::{Error, ViolationBundle};
use tderiv::report::{
    parse_map, run_corollaries, run_counterexample, run_solve, run_verify, CampaignConfig,
};
use tderiv::scalar::FieldMode;
use tderiv::NestSpec;

#[derive(Parser)]
#[command(name = "tderiv", version, about = "exact ternary-derivation toolkit for finite nest algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Seeded sweep: generated triples must round-trip through extraction
    /// and completion; random control pairs must be decided with witnesses.
    Verify {
        /// Nest cut points, comma separated, e.g. 1,2,4
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        nest: Vec<usize>,
        /// Scalar field: rational | gaussian
        #[arg(long, default_value = "rational")]
        field: FieldMode,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit a JSON report instead of text
        #[arg(long)]
        json: bool,
        /// Write the report to a file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every specialized checker over constructed positives and random
    /// negatives; any misclassification fails the run.
    Corollaries {
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        nest: Vec<usize>,
        #[arg(long, default_value = "rational")]
        field: FieldMode,
        /// Positives and negatives per checker
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay the four-dimensional algebra where compatibility holds but no
    /// completion exists, and the census showing no nest algebra matches it.
    Counterexample {
        /// Random first factors per stratum in the compatibility certificate
        #[arg(long, default_value_t = 40)]
        samples: usize,
        #[arg(long, default_value_t = 0xC0FFEE)]
        seed: u64,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide one (delta, tau) pair and, when compatible, print the
    /// implementing triple and the completed map.
    Solve {
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        nest: Vec<usize>,
        /// Path to the delta matrix: one row per line, exact scalars
        #[arg(long)]
        delta: PathBuf,
        /// Path to the tau matrix, same format
        #[arg(long)]
        tau: PathBuf,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(text: String, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::Precondition(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn render(value: serde_json::Value) -> String {
    serde_json::to_string_pretty(&value).expect("report values serialize")
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Verify { nest, field, trials, seed, json, out } => {
            let config = CampaignConfig { nest, field, trials, seed };
            let started = Instant::now();
            let report = run_verify(&config)?;
            let text = if json {
                render(report.to_json(Some(started.elapsed().as_millis())))
            } else {
                report.render_text()
            };
            emit(text, out.as_ref())
        }
        Command::Corollaries { nest, field, trials, seed, json, out } => {
            let config = CampaignConfig { nest, field, trials, seed };
            let started = Instant::now();
            let report = run_corollaries(&config)?;
            let text = if json {
                render(report.to_json(Some(started.elapsed().as_millis())))
            } else {
                report.render_text()
            };
            emit(text, out.as_ref())?;
            if report.all_clean() {
                Ok(())
            } else {
                let dirty = report
                    .rows
                    .iter()
                    .find(|r| !r.clean())
                    .expect("some row is dirty");
                Err(Error::violation(ViolationBundle {
                    context: "corollaries_campaign".into(),
                    nest: report.config.nest.clone(),
                    field: format!("{:?}", report.config.field).to_lowercase(),
                    seed: Some(report.config.seed),
                    trial: None,
                    delta: None,
                    tau: None,
                    detail: format!(
                        "checker {} misclassified: {}/{} positives, {}/{} negatives",
                        dirty.checker,
                        dirty.positives_ok,
                        dirty.positives,
                        dirty.negatives_ok,
                        dirty.negatives
                    ),
                }))
            }
        }
        Command::Counterexample { samples, seed, json, out } => {
            let started = Instant::now();
            let outcome = run_counterexample(samples, seed)?;
            let text = if json {
                render(outcome.to_json(Some(started.elapsed().as_millis())))
            } else {
                outcome.render_text()
            };
            emit(text, out.as_ref())?;
            if outcome.ok() {
                Ok(())
            } else {
                Err(Error::violation(ViolationBundle {
                    context: "counterexample".into(),
                    nest: vec![],
                    field: "rational".into(),
                    seed: Some(seed),
                    trial: None,
                    delta: None,
                    tau: None,
                    detail: "contrast-algebra replay left its expected script".into(),
                }))
            }
        }
        Command::Solve { nest, delta, tau, json, out } => {
            let alg = Arc::new(tderiv::NestAlgebra::new(NestSpec::new(nest)?));
            let read = |path: &PathBuf| -> Result<String, Error> {
                fs::read_to_string(path).map_err(|e| {
                    Error::Precondition(format!("cannot read {}: {e}", path.display()))
                })
            };
            let delta = parse_map(&alg, &read(&delta)?)?;
            let tau = parse_map(&alg, &read(&tau)?)?;
            let started = Instant::now();
            let outcome = run_solve(&delta, &tau)?;
            let text = if json {
                render(outcome.to_json(&alg, Some(started.elapsed().as_millis())))
            } else {
                outcome.render_text(&alg)
            };
            emit(text, out.as_ref())?;
            if outcome.z.verdict == tderiv::engine::ZVerdict::Inconclusive {
                Err(Error::violation(ViolationBundle {
                    context: "solve".into(),
                    nest: alg.spec().dims().to_vec(),
                    field: delta.field_label().into(),
                    seed: None,
                    trial: None,
                    delta: Some(delta.to_json()),
                    tau: Some(tau.to_json()),
                    detail: "pair is infeasible yet no witness was found".into(),
                }))
            } else {
                Ok(())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Error::TheoremViolation(bundle) = &e {
                match serde_json::to_string_pretty(bundle.as_ref()) {
                    Ok(body) => {
                        if fs::write("theorem_violation.json", body).is_ok() {
                            eprintln!("reproduction bundle written to theorem_violation.json");
                        }
                    }
                    Err(ser) => eprintln!("could not serialize reproduction bundle: {ser}"),
                }
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
