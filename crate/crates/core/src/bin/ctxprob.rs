//! Batch front end: run scenario files, write JSON/CSV reports.
//!
//! Exit status: 0 when every task passes, 1 when a task fails (the failing
//! tasks are named on stderr), 2 for file, parse or configuration errors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use ctxprob::runner::{run_scenario, RunConfig, RunOutcome};
use ctxprob::scenario::{Scenario, TaskKind};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ctxprob", version, about = "Contextual probability model runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its reports.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (TOML).
    scenario: PathBuf,

    /// Directory for the JSON report and CSV tables.
    #[arg(short, long, default_value = ".")]
    out: PathBuf,

    /// Run only the named tasks (repeatable); default is all scenario tasks.
    #[arg(long = "task", value_name = "NAME")]
    tasks: Vec<String>,

    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Override the scenario tolerances (applies to float and verify).
    #[arg(long)]
    tolerance: Option<f64>,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Suppress per-task console lines.
    #[arg(long)]
    quiet: bool,

    /// Run tasks on separate threads (report order is unchanged).
    #[arg(long)]
    parallel: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Both,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => run(args),
    }
}

fn run(args: RunArgs) -> ExitCode {
    let scenario = match Scenario::load(&args.scenario) {
        Ok(sc) => sc,
        Err(e) => {
            eprintln!("ctxprob: cannot load {}: {e}", args.scenario.display());
            return ExitCode::from(2);
        }
    };

    let task_filter = match args
        .tasks
        .iter()
        .map(|t| TaskKind::parse(t))
        .collect::<ctxprob::Result<Vec<_>>>()
    {
        Ok(tasks) => tasks,
        Err(e) => {
            eprintln!("ctxprob: {e}");
            return ExitCode::from(2);
        }
    };

    let config = RunConfig {
        seed_override: args.seed,
        tolerance_override: args.tolerance,
        task_filter,
        parallel: args.parallel,
        trials_override: None,
    };

    let outcome = match run_scenario(&scenario, &config) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("ctxprob: {e}");
            return ExitCode::from(2);
        }
    };

    if let Err(e) = write_outputs(&args, &scenario, &outcome) {
        eprintln!("ctxprob: cannot write reports: {e}");
        return ExitCode::from(2);
    }

    if !args.quiet {
        for task in &outcome.report.tasks {
            println!("{}: {}", task.task, if task.pass { "PASS" } else { "FAIL" });
        }
        println!(
            "scenario {}: {}",
            outcome.report.scenario,
            if outcome.report.pass { "PASS" } else { "FAIL" }
        );
    }

    if outcome.report.pass {
        ExitCode::SUCCESS
    } else {
        let failed = outcome.report.failed_tasks().join(", ");
        eprintln!("ctxprob: failing tasks: {failed}");
        ExitCode::from(1)
    }
}

fn write_outputs(args: &RunArgs, scenario: &Scenario, outcome: &RunOutcome) -> ctxprob::Result<()> {
    std::fs::create_dir_all(&args.out)?;
    if args.format != Format::Csv {
        let path = args.out.join(format!("{}.report.json", scenario.name));
        std::fs::write(&path, outcome.report.to_json_bytes())?;
        if !args.quiet {
            println!("report: {}", path.display());
        }
    }
    if args.format != Format::Json {
        for table in &outcome.tables {
            let path = args
                .out
                .join(format!("{}.{}.csv", scenario.name, table.name));
            table.write_to(&path)?;
            if !args.quiet {
                println!("table: {}", path.display());
            }
        }
    }
    Ok(())
}
