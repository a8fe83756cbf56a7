use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use genlr::config::{Config, ConfigError};
use genlr::harness::{grid_search_spec, run_all, with_jobs, ExperimentSpec, GridSearch, RunResult};
use genlr::report;
use genlr::Error;

#[derive(Parser)]
#[command(name = "genlr", version, about = "Run GeN learning-rate experiments and write CSV results")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One trajectory CSV per experiment plus summary.csv.
    Run(Common),
    /// Sweep the fixed learning-rate grid for every baseline experiment.
    GridSearch(Common),
    /// Aligned loss-per-iteration table for base / GeN pairs.
    Compare(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Replaces every experiment's seed.
    #[arg(long)]
    seed: Option<u64>,
}

enum Failure {
    Config(ConfigError),
    Runtime(&'static str, String),
}

impl Failure {
    fn report(&self) -> ExitCode {
        match self {
            Failure::Config(e) => {
                eprintln!("error {e}");
                ExitCode::from(2)
            }
            Failure::Runtime(code, msg) => {
                eprintln!("error {code}: {msg}");
                ExitCode::from(3)
            }
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

fn load(args: &Common) -> Result<(Config, PathBuf), Failure> {
    let mut config = Config::load(&args.config)?;
    if let Some(seed) = args.seed {
        config = config.with_seed(seed);
    }
    let out = args.out.clone().or_else(|| config.output_dir.clone()).unwrap_or_else(|| PathBuf::from("results"));
    fs::create_dir_all(&out).map_err(|e| Failure::Runtime("E_OUTPUT", format!("{}: {e}", out.display())))?;
    Ok((config, out))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Runtime("E_OUTPUT", format!("{}: {e}", path.display())))
}

fn one_line(e: &Error) -> String {
    e.to_string().split_whitespace().collect::<Vec<_>>().join(" ")
}

fn run_specs(specs: &[ExperimentSpec], jobs: usize) -> (Vec<(&ExperimentSpec, RunResult)>, Option<String>) {
    let mut done = Vec::new();
    let mut first_error = None;
    for (spec, result) in specs.iter().zip(run_all(specs, jobs)) {
        match result {
            Ok(r) => done.push((spec, r)),
            Err(e) => {
                eprintln!("error E_RUN: experiment `{}`: {}", spec.name, one_line(&e));
                first_error.get_or_insert_with(|| spec.name.clone());
            }
        }
    }
    (done, first_error)
}

fn cmd_run(args: &Common) -> Result<(), Failure> {
    let (config, out) = load(args)?;
    let (done, failed) = run_specs(&config.experiments, args.jobs);
    for (spec, r) in &done {
        write(&out.join(format!("trajectory_{}.csv", spec.name)), &report::trajectory_csv(r))?;
    }
    let rows: Vec<_> = done.iter().map(|(s, r)| (*s, r)).collect();
    write(&out.join("summary.csv"), &report::summary_csv(&rows))?;
    for (spec, r) in &done {
        emit(&format!("{}\t{}\tfinal_loss={}\n", spec.name, r.status.as_str(), report::fmt_f64(r.final_loss)));
    }
    match failed {
        Some(name) => Err(Failure::Runtime("E_RUN", format!("experiment `{name}` failed"))),
        None => Ok(()),
    }
}

/// Stdout may be a closed pipe; results are already on disk by then.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn grid_table(name: &str, grid: &GridSearch) -> String {
    let mut out = format!("{name}\n{:>12}  {:>24}  {:<8}\n", "eta", "final_loss", "status");
    for row in &grid.rows {
        let mark = if row.eta == grid.best_eta { "  <- best" } else { "" };
        out += &format!("{:>12e}  {:>24e}  {:<8}{mark}\n", row.eta, row.final_loss, row.status.as_str());
    }
    out
}

fn cmd_grid_search(args: &Common) -> Result<(), Failure> {
    let (config, out) = load(args)?;
    if let Some(exp) = config.experiments.iter().find(|e| e.gen.is_some()) {
        return Err(Failure::Config(ConfigError {
            code: genlr::config::ConfigErrorCode::Invalid,
            message: format!("grid search needs baseline optimizers, `{}` has a [gen] table", exp.name),
        }));
    }
    for exp in &config.experiments {
        let grid = with_jobs(args.jobs, || grid_search_spec(exp)).map_err(|e| match e {
            Error::AllDiverged(_) => Failure::Runtime("E_GRID_DIVERGED", format!("`{}`: {}", exp.name, one_line(&e))),
            e => Failure::Runtime("E_RUN", format!("`{}`: {}", exp.name, one_line(&e))),
        })?;
        write(&out.join(format!("grid_{}.csv", exp.name)), &report::grid_csv(&grid))?;
        emit(&grid_table(&exp.name, &grid));
    }
    Ok(())
}

fn cmd_compare(args: &Common) -> Result<(), Failure> {
    let (config, out) = load(args)?;
    let specs = config.compare_experiments()?;
    let (done, failed) = run_specs(&specs, args.jobs);
    if let Some(name) = failed {
        return Err(Failure::Runtime("E_RUN", format!("experiment `{name}` failed")));
    }
    let rows: Vec<_> = done.iter().map(|(s, r)| (*s, r)).collect();
    write(&out.join("compare.csv"), &report::compare_csv(&rows))?;
    let summary = report::compare_summary_csv(&rows);
    write(&out.join("compare_summary.csv"), &summary)?;
    emit(&summary);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::GridSearch(args) => cmd_grid_search(args),
        Command::Compare(args) => cmd_compare(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}
