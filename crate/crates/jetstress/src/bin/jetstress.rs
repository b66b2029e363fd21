//! Command-line front end for the scenario harness.
//!
//! Exit codes: 0 all identities passed, 1 at least one row failed its
//! tolerance, 2 the invocation or input was unusable.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use jetstress::harness::{run_scenario, suite_scenarios, Mode, ResidualReport, Scenario};

#[derive(Parser)]
#[command(
    name = "jetstress",
    version,
    about = "Verify stress balance identities on coordinate boxes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// First-order balance and the pointwise divergence identity
    VerifyFirst(RunArgs),
    /// Second-order identities: four-term split, jet identity, edge sum
    VerifySecond(VerifySecondArgs),
    /// Oriented edge cancellation on its own
    EdgeCancel(RunArgs),
    /// The built-in scenario suite
    Suite(OutputArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario JSON file
    #[arg(long, value_name = "FILE", conflicts_with = "seed")]
    scenario: Option<PathBuf>,
    /// Generate the scenario data from this seed instead
    #[arg(long)]
    seed: Option<u64>,
    /// Base dimension for seeded scenarios
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Fiber dimension for seeded scenarios
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Override every row's tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Gauss-Legendre order per axis
    #[arg(long, value_name = "ORDER")]
    quad_order: Option<usize>,
    /// Differentiate by finite differences instead of exactly
    #[arg(long)]
    fd: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct VerifySecondArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Seeded scenarios: pair an unconstrained stress with an independent
    /// jet section instead of a prolonged one
    #[arg(long)]
    nonholonomic: bool,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the report to this file
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
    /// Report file format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::VerifyFirst(args) => {
            run_one(&args, Mode::FirstOrder, &[Mode::FirstOrder])
        }
        Command::VerifySecond(args) => {
            let default = if args.nonholonomic { Mode::Nonholonomic } else { Mode::SecondOrder };
            run_one(&args.run, default, &[Mode::SecondOrder, Mode::Nonholonomic])
        }
        Command::EdgeCancel(args) => run_one(&args, Mode::EdgeCancel, &[Mode::EdgeCancel]),
        Command::Suite(out) => run_suite_command(&out),
    };
    match outcome {
        Ok(all_passed) => {
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn build_scenario(args: &RunArgs, default_mode: Mode, allowed: &[Mode]) -> Result<Scenario, String> {
    let mut scenario = match (&args.scenario, args.seed) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            let scenario = Scenario::from_json(&text)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            if !allowed.contains(&scenario.mode) {
                return Err(format!(
                    "{}: mode '{}' does not belong to this subcommand",
                    path.display(),
                    scenario.mode.as_str()
                ));
            }
            scenario
        }
        (None, Some(seed)) => {
            let name = format!("{}-seed{}", default_mode.as_str().replace('_', "-"), seed);
            Scenario::seeded(&name, default_mode, args.n, args.d, seed)
        }
        (None, None) => return Err("give either --scenario or --seed".to_string()),
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    };
    if let Some(tol) = args.tol {
        scenario.tol = Some(tol);
    }
    if let Some(order) = args.quad_order {
        scenario.quad_order = order;
    }
    if args.fd {
        scenario.fd = true;
    }
    Ok(scenario)
}

fn run_one(args: &RunArgs, default_mode: Mode, allowed: &[Mode]) -> Result<bool, String> {
    let scenario = build_scenario(args, default_mode, allowed)?;
    let report = run_scenario(&scenario).map_err(|e| e.to_string())?;
    print_report(&report);
    write_reports(std::slice::from_ref(&report), &args.out)?;
    Ok(report.pass())
}

fn run_suite_command(out: &OutputArgs) -> Result<bool, String> {
    let mut reports = Vec::new();
    for scenario in suite_scenarios() {
        let report = run_scenario(&scenario).map_err(|e| e.to_string())?;
        print_report(&report);
        reports.push(report);
    }
    write_reports(&reports, out)?;
    let passed = reports.iter().filter(|r| r.pass()).count();
    println!("suite: {passed}/{} scenarios passed", reports.len());
    Ok(passed == reports.len())
}

fn print_report(report: &ResidualReport) {
    for row in &report.rows {
        let verdict = if row.pass { "PASS" } else { "FAIL" };
        let terms = row
            .term_labels
            .iter()
            .zip(&row.terms)
            .map(|(label, term)| format!("{label}={term:.6e}"))
            .collect::<Vec<_>>()
            .join(" ");
        println!(
            "{verdict} {scenario} {identity} :: {terms} :: abs={abs:.3e} rel={rel:.3e} tol={tol:.1e} ({basis})",
            scenario = report.scenario,
            identity = row.identity,
            abs = row.abs_residual,
            rel = row.rel_residual,
            tol = row.tolerance,
            basis = row.basis,
        );
    }
}

fn write_reports(reports: &[ResidualReport], out: &OutputArgs) -> Result<(), String> {
    let Some(path) = &out.report else {
        return Ok(());
    };
    let payload = match out.format {
        Format::Json => {
            if reports.len() == 1 {
                reports[0].to_json()
            } else {
                serde_json::to_string_pretty(reports).expect("reports serialize")
            }
        }
        Format::Csv => {
            let mut text = String::new();
            for (idx, report) in reports.iter().enumerate() {
                let csv = report.to_csv();
                if idx == 0 {
                    text.push_str(&csv);
                } else {
                    // one header for the whole file
                    let mut lines = csv.lines();
                    lines.next();
                    for line in lines {
                        text.push_str(line);
                        text.push('\n');
                    }
                }
            }
            text
        }
    };
    fs::write(path, payload).map_err(|e| format!("{}: {e}", path.display()))
}
