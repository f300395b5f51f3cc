//! Command-line front end: instance generation, solving, validation, oracle
//! runs, SVG plots and batch experiments.

mod plot;

use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use cagvrp::experiment::{self, ExperimentSpec};
use cagvrp::instance::DEFAULT_RADIUS;
use cagvrp::oracle;
use cagvrp::{solve, validate, Instance, Solution, SolveOutcome, SolveParams};

/// Exit code for a run stopped by a limit with an incumbent in hand.
const EXIT_TIMEOUT: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
/// Exit code for a run stopped by a limit before any solution was found.
const EXIT_NO_SOLUTION: u8 = 4;

#[derive(Parser)]
#[command(name = "cagvrp", version, about = "Exact solver for cooperative air-ground vehicle routing")]
struct Cli {
    /// Only print errors.
    #[arg(long, global = true)]
    quiet: bool,
    /// Random seed (instance generation, first experiment seed).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file, or directory for `experiment`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random instance with targets uniform in a 100 x 100 square.
    Generate(GenerateArgs),
    /// Solve an instance to optimality with branch-and-cut.
    Solve(SolveArgs),
    /// Check a solution against an instance.
    Validate(ValidateArgs),
    /// Solve a small instance by exhaustive enumeration.
    Oracle(OracleArgs),
    /// Render an instance and optionally a solution as SVG.
    Plot(PlotArgs),
    /// Solve a grid of random instances and summarize per cell.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Number of targets, depot included.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.3)]
    alpha: f64,
    /// Communication radius.
    #[arg(long, default_value_t = DEFAULT_RADIUS)]
    radius: f64,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Time limit in seconds.
    #[arg(long, default_value_t = 9000.0)]
    time_limit: f64,
    #[arg(long)]
    node_limit: Option<usize>,
    /// Print one line per node, cut and incumbent.
    #[arg(long)]
    log_cuts: bool,
    /// Charge communication-infeasible assignments instead of forbidding them.
    #[arg(long)]
    penalty_mode: bool,
    /// Solution file used as the initial incumbent.
    #[arg(long)]
    warm_start: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    solution: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    instance: PathBuf,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    solution: Option<PathBuf>,
    /// Draw the communication radius around each stop.
    #[arg(long)]
    radius_circles: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON experiment description; overrides the grid flags.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Instance sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "10")]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3")]
    alphas: Vec<f64>,
    /// Instances per cell; seeds run from `--seed` upwards.
    #[arg(long, default_value_t = 5)]
    count: u64,
    #[arg(long, default_value_t = DEFAULT_RADIUS)]
    radius: f64,
    /// Per-run time limit in seconds.
    #[arg(long, default_value_t = 9000.0)]
    time_limit: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Generate(a) => generate(cli, a),
        Command::Solve(a) => solve_cmd(cli, a),
        Command::Validate(a) => validate_cmd(cli, a),
        Command::Oracle(a) => oracle_cmd(cli, a),
        Command::Plot(a) => plot_cmd(cli, a),
        Command::Experiment(a) => experiment_cmd(cli, a),
    }
}

fn load_instance(path: &Path) -> Result<Instance> {
    Instance::load(path).with_context(|| format!("cannot load instance {}", path.display()))
}

fn load_solution(path: &Path) -> Result<Solution> {
    Solution::load(path).with_context(|| format!("cannot load solution {}", path.display()))
}

fn say(cli: &Cli, text: impl AsRef<str>) {
    if !cli.quiet {
        println!("{}", text.as_ref());
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if !(v > 0.0 && v.is_finite()) {
        bail!("--{name} must be positive, got {v}");
    }
    Ok(v)
}

fn generate(cli: &Cli, a: &GenerateArgs) -> Result<ExitCode> {
    let out = cli.out.as_ref().context("generate needs --out")?;
    let inst = Instance::generate_random(a.n, cli.seed, a.alpha, a.radius)?;
    inst.save(out)?;
    say(cli, format!("wrote {} ({} targets) to {}", inst.name(), inst.n(), out.display()));
    Ok(ExitCode::SUCCESS)
}

fn solve_cmd(cli: &Cli, a: &SolveArgs) -> Result<ExitCode> {
    let inst = load_instance(&a.instance)?;
    let warm_start = a.warm_start.as_deref().map(load_solution).transpose()?;
    let params = SolveParams {
        time_limit: Duration::from_secs_f64(positive("time-limit", a.time_limit)?),
        node_limit: a.node_limit,
        penalty_mode: a.penalty_mode,
        warm_start,
        log_cuts: a.log_cuts,
        ..SolveParams::default()
    };
    let res = solve(&inst, &params)?;
    for line in &res.cut_log {
        say(cli, line);
    }
    let (status, code) = match &res.outcome {
        SolveOutcome::Optimal => ("optimal".to_string(), ExitCode::SUCCESS),
        SolveOutcome::Timeout { gap } => {
            let gap = gap.map_or_else(|| "unknown".to_string(), |g| format!("{:.4}%", 100.0 * g));
            let code = if res.solution.is_some() { EXIT_TIMEOUT } else { EXIT_NO_SOLUTION };
            (format!("limit reached, gap {gap}"), ExitCode::from(code))
        }
        SolveOutcome::Infeasible { reason } => (format!("infeasible: {reason}"), ExitCode::from(EXIT_INFEASIBLE)),
    };
    say(cli, format!("status          {status}"));
    if let Some(sol) = &res.solution {
        say(
            cli,
            format!(
                "objective       {:.6}\nGV cost         {:.6}\nUAV cost        {:.6}\nstops           {:?}",
                sol.objective, sol.gv_cost, sol.uav_cost, sol.tour
            ),
        );
    }
    say(cli, format!("lower bound     {:.6}", res.lower_bound));
    say(cli, res.stats.report().trim_end());
    if let (Some(out), Some(sol)) = (&cli.out, &res.solution) {
        let mut sol = sol.clone();
        sol.stats = Some(res.stats.clone());
        sol.save(out)?;
        say(cli, format!("wrote solution to {}", out.display()));
    }
    Ok(code)
}

fn validate_cmd(cli: &Cli, a: &ValidateArgs) -> Result<ExitCode> {
    let inst = load_instance(&a.instance)?;
    let sol = load_solution(&a.solution)?;
    let report = validate(&inst, &sol);
    if report.is_empty() {
        say(cli, format!("valid, objective {:.6}", sol.objective));
        return Ok(ExitCode::SUCCESS);
    }
    // violations go to stdout even when quiet: they are the result
    for v in &report {
        println!("{v}");
    }
    Ok(ExitCode::FAILURE)
}

fn oracle_cmd(cli: &Cli, a: &OracleArgs) -> Result<ExitCode> {
    let inst = load_instance(&a.instance)?;
    let res = oracle::brute_force(&inst)?;
    say(
        cli,
        format!(
            "objective       {:.6}\nstops           {:?}\nstructures      {}",
            res.objective, res.solution.tour, res.structures
        ),
    );
    if let Some(out) = &cli.out {
        res.solution.save(out)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn plot_cmd(cli: &Cli, a: &PlotArgs) -> Result<ExitCode> {
    let out = cli.out.as_ref().context("plot needs --out")?;
    let inst = load_instance(&a.instance)?;
    let sol = a.solution.as_deref().map(load_solution).transpose()?;
    if let Some(sol) = &sol {
        if sol.assignment.len() != inst.n() {
            bail!("solution covers {} targets but the instance has {}", sol.assignment.len(), inst.n());
        }
    }
    let svg = plot::render_svg(&inst, sol.as_ref(), a.radius_circles);
    fs::write(out, svg).with_context(|| format!("cannot write {}", out.display()))?;
    say(cli, format!("wrote {}", out.display()));
    Ok(ExitCode::SUCCESS)
}

fn experiment_cmd(cli: &Cli, a: &ExperimentArgs) -> Result<ExitCode> {
    let spec = match &a.spec {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            let mut spec: ExperimentSpec =
                serde_json::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))?;
            if let Some(out) = &cli.out {
                spec.out_dir = out.clone();
            }
            spec
        }
        None => {
            let out = cli.out.as_ref().context("experiment needs --out or --spec")?;
            let seeds: Range<u64> = cli.seed..cli.seed + a.count;
            ExperimentSpec::grid(&a.sizes, &a.alphas, seeds, a.radius, a.time_limit, out)
        }
    };
    spec.validate()?;
    let total = spec.num_runs();
    let mut done = 0;
    let table = experiment::run_experiment(&spec, |r| {
        done += 1;
        if !cli.quiet {
            eprintln!(
                "[{done}/{total}] n={} alpha={} seed={} {:?} objective {:?} in {:.2}s",
                r.n, r.alpha, r.seed, r.status, r.objective, r.wall_time_secs
            );
        }
    })?;
    say(cli, experiment::render_table(&table).trim_end());
    Ok(ExitCode::SUCCESS)
}
