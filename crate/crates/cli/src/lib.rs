//! Command-line driver: instance I/O, subcommands and reports.
//!
//! Exit codes: 0 on success, 1 on domain errors (bad instance, failed
//! check), 2 on usage errors.

pub mod instance;
pub mod report;

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use parok::exact::{format_q, q_to_f64, Q};
use parok::grid::{
    example_3_2, example_3_2_global, example_4_5, residual_breakdown, search_towers, GridAction, NumericTowers,
    SearchParams,
};
use parok::harness::{run_all, HarnessOptions};
use parok::par::Exec;
use parok::rokhlin::{SearchOptions, DEFAULT_BUDGET};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use instance::{Instance, InstanceError};

#[derive(Debug, Parser)]
#[command(name = "parok", version, about = "Partial actions of finite groups on finite sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Search steps allowed per orbit
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Run without the thread pool
    #[arg(long)]
    pub sequential: bool,
}

impl SolverArgs {
    fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }

    fn options(&self) -> SearchOptions {
        SearchOptions { budget: self.budget, exec: self.exec() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridExample {
    /// Half-interval shift on (0,2]
    Shift,
    /// Antipodal flip on two copies of the punctured circle
    Flip,
    /// Global model of the flip, with its projection towers
    FlipGlobal,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate an instance
    Validate { file: PathBuf },
    /// Full report: freeness, strata, orbits, Rokhlin dimension, algebras, globalization
    Analyze {
        file: PathBuf,
        /// Seed for the numeric block split and the bimodule test family
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Exact tower search with d + 1 levels
    Towers {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        d: usize,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Enveloping global action and central splitting
    Globalize { file: PathBuf },
    /// Strata, extension chain and orbit-type parts
    Decompose { file: PathBuf },
    /// Grid models of the continuous examples
    Grid {
        example: GridExample,
        #[arg(long, default_value_t = 64)]
        m: usize,
        #[arg(long, default_value_t = 0.125)]
        delta: f64,
        /// Run the tower search with this many levels minus one
        #[arg(long)]
        search_d: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 400)]
        iterations: usize,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        /// Print towers as a tab-separated table instead of JSON
        #[arg(long)]
        table: bool,
        #[arg(long)]
        sequential: bool,
    },
    /// Randomized theorem checks over the seeded corpus
    Check {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = parok::harness::DEFAULT_COUNT)]
        count: usize,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("{0}")]
    Domain(String),
}

pub fn read_instance(path: &PathBuf) -> Result<Instance, CliError> {
    let mut text = String::new();
    let res = if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    Ok(Instance::parse(&text)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ValidateReport {
    #[serde(flatten)]
    pub header: report::Header,
    pub valid: bool,
    pub group_order: usize,
    pub carrier_size: usize,
    pub global: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GridSearchOut {
    pub d: usize,
    pub seed: u64,
    pub restarts: usize,
    pub iterations: usize,
    pub epsilon: f64,
    pub restart: usize,
    pub within_epsilon: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GridReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub example: String,
    pub m: usize,
    pub points: usize,
    pub lipschitz: f64,
    pub delta: Option<String>,
    pub epsilon: Option<String>,
    pub bound: Option<String>,
    /// Residual of the reported towers, if any.
    pub residual: Option<String>,
    pub residual_float: Option<f64>,
    /// Conditions (1) to (3) separately.
    pub conditions: Option<[String; 3]>,
    pub search: Option<GridSearchOut>,
}

struct GridRun {
    report: GridReport,
    grid: GridAction,
    towers: Option<NumericTowers>,
}

#[allow(clippy::too_many_arguments)]
fn grid_run(
    example: GridExample,
    m: usize,
    delta: f64,
    search_d: Option<usize>,
    seed: u64,
    restarts: usize,
    iterations: usize,
    epsilon: f64,
    exec: Exec,
) -> Result<GridRun, CliError> {
    let domain = |e: parok::grid::GridError| CliError::Domain(e.to_string());
    let (grid, test_set, mut towers, mut report) = match example {
        GridExample::Shift => {
            let ex = example_4_5(delta, m).map_err(domain)?;
            let r = GridReport::blank("shift", m, &ex.grid);
            let r = GridReport { delta: Some(format_q(&ex.delta)), bound: Some(format_q(&ex.bound)), ..r };
            (ex.grid, ex.test_set, Some(ex.towers), r)
        }
        GridExample::Flip => {
            let ex = example_3_2(m).map_err(domain)?;
            let r = GridReport { epsilon: Some(format_q(&ex.epsilon)), ..GridReport::blank("flip", m, &ex.grid) };
            (ex.grid, ex.test_set, None, r)
        }
        GridExample::FlipGlobal => {
            let (ex, t) = example_3_2_global(m).map_err(domain)?;
            let r =
                GridReport { epsilon: Some(format_q(&ex.epsilon)), ..GridReport::blank("flip-global", m, &ex.grid) };
            (ex.grid, ex.test_set, Some(t), r)
        }
    };
    if let Some(d) = search_d {
        let params = SearchParams { iterations, exec, ..SearchParams::new(d, epsilon, seed, restarts) };
        let out = search_towers(&grid, &test_set, &params).map_err(domain)?;
        report.search = Some(GridSearchOut {
            d,
            seed,
            restarts,
            iterations,
            epsilon,
            restart: out.restart,
            within_epsilon: out.within_epsilon,
        });
        towers = Some(out.towers);
    }
    if let Some(t) = &towers {
        let b = residual_breakdown(&grid, t, &test_set).map_err(domain)?;
        let value: Q = b.value();
        report.residual_float = Some(q_to_f64(&value));
        report.residual = Some(format_q(&value));
        report.conditions = Some(b.conditions.clone().map(|c| format_q(&c)));
    }
    Ok(GridRun { report, grid, towers })
}

impl GridReport {
    fn blank(example: &str, m: usize, grid: &GridAction) -> Self {
        GridReport {
            schema_version: report::SCHEMA_VERSION,
            tool_version: report::TOOL_VERSION.into(),
            example: example.into(),
            m,
            points: grid.size(),
            lipschitz: grid.lipschitz,
            delta: None,
            epsilon: None,
            bound: None,
            residual: None,
            residual_float: None,
            conditions: None,
            search: None,
        }
    }
}

/// One row per grid point: coordinate, component, then `f_g^(j)` for each
/// level and element.
fn tower_table(grid: &GridAction, towers: Option<&NumericTowers>) -> String {
    let mut s = String::from("x\tcomponent");
    if let Some(t) = towers {
        for j in 0..t.values.len() {
            for g in 0..t.values[j].len() {
                s.push_str(&format!("\tf_{g}^{j}"));
            }
        }
    }
    s.push('\n');
    for p in 0..grid.size() {
        s.push_str(&format!("{}\t{}", q_to_f64(&grid.coords[p]), grid.components[p]));
        if let Some(t) = towers {
            for level in &t.values {
                for f in level {
                    s.push_str(&format!("\t{}", q_to_f64(&f[p])));
                }
            }
        }
        s.push('\n');
    }
    s
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize") + "\n"
}

/// Runs one command, returning the text for standard output and the exit
/// code.
pub fn execute(command: &Command) -> Result<(String, i32), CliError> {
    match command {
        Command::Validate { file } => {
            let inst = read_instance(file)?;
            let r = ValidateReport {
                header: report::Header::new(&inst),
                valid: true,
                group_order: inst.action.order(),
                carrier_size: inst.action.size(),
                global: inst.action.is_global(),
            };
            Ok((json(&r), 0))
        }
        Command::Analyze { file, seed, solver } => {
            let inst = read_instance(file)?;
            Ok((json(&report::analyze(&inst, *seed, &solver.options())), 0))
        }
        Command::Towers { file, d, solver } => {
            let inst = read_instance(file)?;
            Ok((json(&report::towers(&inst, *d, &solver.options())), 0))
        }
        Command::Globalize { file } => Ok((json(&report::globalize_report(&read_instance(file)?)), 0)),
        Command::Decompose { file } => Ok((json(&report::decompose(&read_instance(file)?)), 0)),
        Command::Grid { example, m, delta, search_d, seed, restarts, iterations, epsilon, table, sequential } => {
            let exec = if *sequential { Exec::Sequential } else { Exec::Parallel };
            let run = grid_run(*example, *m, *delta, *search_d, *seed, *restarts, *iterations, *epsilon, exec)?;
            if *table {
                Ok((tower_table(&run.grid, run.towers.as_ref()), 0))
            } else {
                Ok((json(&run.report), 0))
            }
        }
        Command::Check { seed, count, solver } => {
            let opts = HarnessOptions { exec: solver.exec(), search: solver.options() };
            let reports = run_all(*seed, *count, &opts);
            let code = if reports.iter().all(|r| r.ok()) { 0 } else { 1 };
            Ok((json(&reports), code))
        }
    }
}

/// Parses arguments and runs; diagnostics go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli.command) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
