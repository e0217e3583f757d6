//! Batch front end for `runlab`. Every subcommand parses its flags, calls one
//! library operation and prints the report; no numerics live here.
//!
//! Exit codes: 0 success, 1 property violated, 2 usage error, 3 resource
//! budget or timeout. Errors are also written to stderr as JSON.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use runlab::blockfactor::{
    adversarial_min, construct_h, counting_bridge_check, distinctness_bound_check,
    exact_run_probability_with_budget, mc_estimate, verify_impossibility_with_limit, verify_lower_bound,
    BridgeOptions, MinimizeMode, DEFAULT_COLORING_LIMIT, DEFAULT_EXACT_BUDGET, DEFAULT_TUPLE_LIMIT,
};
use runlab::bounds::p_lower;
use runlab::coloring::{
    check_chvatal, chromatic_number, find_mono_path, is_proper, lift_edge_coloring, search_coloring, CheckMode,
    ChvatalOptions, SearchLimits, DEFAULT_CHROMATIC_BUDGET,
};
use runlab::debruijn::DEFAULT_VERTEX_BUDGET;
use runlab::{
    DeBruijnGraph, EdgeColoring, Error, ErrorKind, GridFunction, Noise, ProcessSpec, RunEvent, SearchOutcome,
    VertexColoring,
};
use serde::Serialize;
use serde_json::{json, Value as Json};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "runlab", version, about = "Runs in k-block-factor processes: graphs, colorings, exact and sampled probabilities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Output::Json, global = true)]
    pub output: Output,

    /// Worker threads for parallel operations. Results do not depend on it.
    #[arg(long, default_value_t = 1, global = true)]
    pub threads: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exhaustive,
    Sampled,
}

impl From<Mode> for CheckMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exhaustive => CheckMode::Exhaustive,
            Mode::Sampled => CheckMode::Sampled,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Event {
    Constant,
    Increasing,
    Decreasing,
}

impl From<Event> for RunEvent {
    fn from(e: Event) -> Self {
        match e {
            Event::Constant => RunEvent::Constant,
            Event::Increasing => RunEvent::Increasing,
            Event::Decreasing => RunEvent::Decreasing,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseArg {
    Discrete,
    ContinuousCeil,
}

impl From<NoiseArg> for Noise {
    fn from(n: NoiseArg) -> Self {
        match n {
            NoiseArg::Discrete => Noise::Discrete,
            NoiseArg::ContinuousCeil => Noise::ContinuousCeil,
        }
    }
}

#[derive(Debug, Args)]
pub struct Dims {
    /// Word length k.
    #[arg(long)]
    pub k: usize,
    /// Alphabet size m (also the grid size M).
    #[arg(long)]
    pub m: usize,
}

#[derive(Debug, Args)]
pub struct Sampling {
    /// exhaustive enumeration or uniform sampling.
    #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
    pub mode: Mode,
    /// Sample count for sampled mode.
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    /// RNG seed; generated and reported when absent.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Summary of D(k,m); `--output csv` prints the edge list as rank pairs.
    Graph {
        #[command(flatten)]
        dims: Dims,
        /// Vertex budget.
        #[arg(long, default_value_t = DEFAULT_VERTEX_BUDGET)]
        budget: u64,
    },
    /// Exact chromatic number of D(k,m).
    Chromatic {
        #[command(flatten)]
        dims: Dims,
        /// Largest vertex count for exact computation.
        #[arg(long, default_value_t = DEFAULT_CHROMATIC_BUDGET)]
        budget: usize,
    },
    /// Lifts an edge coloring of D(k,m), given as a vertex coloring of D(k+1,m), to a vertex coloring of D(k,m).
    Lift {
        #[arg(long)]
        coloring_file: PathBuf,
        /// Write the lifted coloring here.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Finds a monochromatic directed path of `l` vertices.
    MonoPath {
        #[arg(long)]
        coloring_file: PathBuf,
        /// Path length in vertices.
        #[arg(long)]
        l: usize,
    },
    /// Checks on D(k,m) that chromatic number > l^r forces a monochromatic path of `l` edges in every r-edge-coloring.
    ChvatalCheck {
        #[command(flatten)]
        dims: Dims,
        #[arg(long)]
        r: u32,
        /// Path length in edges.
        #[arg(long)]
        l: usize,
        #[command(flatten)]
        sampling: Sampling,
        /// Largest r^edges enumerated in exhaustive mode.
        #[arg(long, default_value_t = runlab::coloring::DEFAULT_EXHAUSTIVE_LIMIT)]
        budget: u64,
    },
    /// Searches for an r-coloring of D(k,m) with no monochromatic path of `l` vertices.
    SearchColoring {
        #[command(flatten)]
        dims: Dims,
        #[arg(long)]
        r: u32,
        /// Path length in vertices.
        #[arg(long)]
        l: usize,
        /// Time limit in seconds.
        #[arg(long, default_value_t = 60.0)]
        time_limit: f64,
        /// Vertex budget.
        #[arg(long, default_value_t = DEFAULT_VERTEX_BUDGET)]
        budget: u64,
        /// Write the coloring here when one is found.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Builds the adversarial function h from a 2-coloring of D(k,M) and prints its table.
    ConstructH {
        #[arg(long)]
        coloring_file: PathBuf,
        /// Write the table as a function file.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Checks that h never has 2k+1 equal windows on 3k distinct coordinates.
    VerifyH {
        #[arg(long)]
        coloring_file: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
        /// Largest number of distinct tuples enumerated in exhaustive mode.
        #[arg(long, default_value_t = DEFAULT_TUPLE_LIMIT)]
        budget: u64,
    },
    /// Exact run probability of a grid function.
    ProbExact {
        #[arg(long)]
        function_file: PathBuf,
        #[arg(long, value_enum, default_value_t = Event::Constant)]
        event: Event,
        /// Run length in windows.
        #[arg(long)]
        l: usize,
        /// DP transition budget.
        #[arg(long, default_value_t = DEFAULT_EXACT_BUDGET)]
        budget: u64,
    },
    /// Monte-Carlo run probability of a grid function.
    ProbMc {
        #[arg(long)]
        function_file: PathBuf,
        #[arg(long, value_enum, default_value_t = Event::Constant)]
        event: Event,
        /// Run length in windows.
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// RNG seed; generated and reported when absent.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = NoiseArg::Discrete)]
        noise: NoiseArg,
    },
    /// Smallest constant-run probability over f: {1..M}^k -> {0..r-1}.
    AdversarialMin {
        #[command(flatten)]
        dims: Dims,
        #[arg(long)]
        r: u32,
        /// Run length in windows.
        #[arg(long)]
        l: usize,
        #[command(flatten)]
        sampling: Sampling,
        /// Largest r^(M^k) enumerated in exhaustive mode.
        #[arg(long, default_value_t = runlab::blockfactor::DEFAULT_EXHAUSTIVE_LIMIT)]
        budget: u64,
    },
    /// Checks that increasing constant tuples equal monochromatic path counts.
    BridgeCheck {
        #[arg(long)]
        function_file: PathBuf,
        /// Run length in windows.
        #[arg(long)]
        l: usize,
        /// Largest M^M scanned for the factorial lower bound.
        #[arg(long, default_value_t = DEFAULT_COLORING_LIMIT)]
        budget: u64,
    },
    /// The constant M(k,l,r), the lower bound 1/M^(k+l-1), and for k >= 3 the adversarial constants.
    Bounds {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        r: u32,
    },
    /// Compares the worst constant-run probability on {1..M}^k with 1/M^(k+l-1).
    VerifyTheorem2 {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 200)]
        samples: u64,
        /// RNG seed for sampled minimization; generated and reported when absent.
        #[arg(long)]
        seed: Option<u64>,
        /// Largest r^(M^k) enumerated exhaustively; beyond it sampling is used.
        #[arg(long, default_value_t = runlab::blockfactor::DEFAULT_EXHAUSTIVE_LIMIT)]
        budget: u64,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Lib(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = std::result::Result<Report, Failure>;

/// A report plus whether the property it checks held.
pub struct Report {
    body: Json,
    csv: Option<String>,
    holds: bool,
}

impl Report {
    fn new(value: impl Serialize) -> Self {
        Report {
            body: serde_json::to_value(value).expect("reports serialize"),
            csv: None,
            holds: true,
        }
    }

    fn holds(mut self, holds: bool) -> Self {
        self.holds = holds;
        self
    }
}

fn seed_or_random(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(rand::random)
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> std::result::Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn load_coloring(path: &Path) -> std::result::Result<VertexColoring, Failure> {
    Ok(VertexColoring::from_json(&read(path)?)?)
}

fn load_function(path: &Path) -> std::result::Result<GridFunction, Failure> {
    Ok(GridFunction::from_json(&read(path)?)?)
}

fn execute(command: Command) -> CmdResult {
    match command {
        Command::Graph { dims, budget } => {
            let g = DeBruijnGraph::with_budget(dims.k, dims.m, budget)?;
            let mut report = Report::new(g.summary());
            report.csv = Some(g.edge_list_csv());
            Ok(report)
        }
        Command::Chromatic { dims, budget } => {
            let g = DeBruijnGraph::new(dims.k, dims.m)?;
            let chi = chromatic_number(&g, budget)?;
            Ok(Report::new(json!({"k": dims.k, "m": dims.m, "chromatic_number": chi})))
        }
        Command::Lift { coloring_file, save } => {
            let vc = load_coloring(&coloring_file)?;
            if vc.k < 2 {
                return Err(Failure::Usage("an edge coloring of D(k,m) is a coloring of D(k+1,m), so k+1 >= 2".into()));
            }
            let ec = EdgeColoring::from(vc);
            let g = DeBruijnGraph::new(ec.k, ec.m)?;
            let lifted = lift_edge_coloring(&g, &ec)?;
            if let Some(path) = save {
                write(&path, &lifted.to_json())?;
            }
            let proper = is_proper(&g, &lifted)?;
            Ok(Report::new(json!({
                "proper": proper,
                "colors_used": lifted.colors_used(),
                "coloring": lifted,
            }))
            .holds(proper))
        }
        Command::MonoPath { coloring_file, l } => {
            let vc = load_coloring(&coloring_file)?;
            let g = DeBruijnGraph::new(vc.k, vc.m)?;
            let path = find_mono_path(&g, &vc, l)?;
            let words = match &path {
                Some(p) => Some(p.words(&g)?.iter().map(ToString::to_string).collect::<Vec<_>>()),
                None => None,
            };
            Ok(Report::new(json!({
                "l_vertices": l,
                "found": path.is_some(),
                "path": path.map(|p| p.vertices),
                "words": words,
            })))
        }
        Command::ChvatalCheck {
            dims,
            r,
            l,
            sampling,
            budget,
        } => {
            let g = DeBruijnGraph::new(dims.k, dims.m)?;
            let opts = ChvatalOptions {
                mode: sampling.mode.into(),
                exhaustive_limit: budget,
                samples: sampling.samples,
                seed: seed_or_random(sampling.seed),
                ..ChvatalOptions::default()
            };
            let rep = check_chvatal(&g, r, l, &opts)?;
            let holds = rep.holds;
            Ok(Report::new(rep).holds(holds))
        }
        Command::SearchColoring {
            dims,
            r,
            l,
            time_limit,
            budget,
            save,
        } => {
            if !(time_limit.is_finite() && time_limit >= 0.0) {
                return Err(Failure::Usage(format!("invalid --time-limit {time_limit}")));
            }
            let limits = SearchLimits {
                time: Some(Duration::from_secs_f64(time_limit)),
                vertex_budget: budget,
            };
            let out = search_coloring(dims.k, dims.m, r, l, &limits)?;
            if let (Some(path), Some(vc)) = (save, out.coloring()) {
                write(&path, &vc.to_json())?;
            }
            if out == SearchOutcome::Timeout {
                return Err(Failure::Lib(Error::Timeout));
            }
            Ok(Report::new(out))
        }
        Command::ConstructH { coloring_file, save } => {
            let vc = load_coloring(&coloring_file)?;
            let h = construct_h(&vc)?;
            let file = h.to_file()?;
            if let Some(path) = save {
                write(&path, &h.to_json()?)?;
            }
            Ok(Report::new(file))
        }
        Command::VerifyH {
            coloring_file,
            sampling,
            budget,
        } => {
            let vc = load_coloring(&coloring_file)?;
            let h = construct_h(&vc)?;
            let seed = seed_or_random(sampling.seed);
            let rep = verify_impossibility_with_limit(&h, sampling.mode.into(), sampling.samples, seed, budget)?;
            let dist = distinctness_bound_check(vc.k, vc.m as u64)?;
            Ok(Report::new(json!({"impossibility": rep, "distinctness": dist})).holds(dist.holds))
        }
        Command::ProbExact {
            function_file,
            event,
            l,
            budget,
        } => {
            let f = load_function(&function_file)?;
            Ok(Report::new(exact_run_probability_with_budget(&f, event.into(), l, budget)?))
        }
        Command::ProbMc {
            function_file,
            event,
            l,
            samples,
            seed,
            noise,
        } => {
            let f = load_function(&function_file)?;
            let spec = ProcessSpec::new(f, noise.into());
            Ok(Report::new(mc_estimate(&spec, event.into(), l, samples, seed_or_random(seed))?))
        }
        Command::AdversarialMin {
            dims,
            r,
            l,
            sampling,
            budget,
        } => {
            let grid = u32::try_from(dims.m).map_err(|_| Failure::Usage(format!("M={} too large", dims.m)))?;
            let mode = match sampling.mode {
                Mode::Exhaustive => MinimizeMode::Exhaustive,
                Mode::Sampled => MinimizeMode::Sampled {
                    samples: sampling.samples,
                    seed: seed_or_random(sampling.seed),
                },
            };
            Ok(Report::new(adversarial_min(dims.k, grid, r, l, mode, budget)?))
        }
        Command::BridgeCheck {
            function_file,
            l,
            budget,
        } => {
            let f = load_function(&function_file)?;
            let rep = counting_bridge_check(&f, l, &BridgeOptions { coloring_limit: budget })?;
            let holds = rep.lower_bound.as_ref().is_none_or(|b| b.holds);
            Ok(Report::new(rep).holds(holds))
        }
        Command::Bounds { k, l, r } => Ok(Report::new(p_lower(k, l, r)?)),
        Command::VerifyTheorem2 {
            k,
            l,
            r,
            samples,
            seed,
            budget,
        } => {
            let rep = verify_lower_bound(k, l, r, samples, seed_or_random(seed), budget)?;
            let holds = rep.holds;
            Ok(Report::new(rep).holds(holds))
        }
    }
}

fn scalar(v: &Json) -> String {
    match v {
        Json::String(s) => s.clone(),
        Json::Null => String::new(),
        other => other.to_string(),
    }
}

/// Top-level fields as one header line and one row; nested values as JSON.
fn to_csv(body: &Json) -> String {
    let Json::Object(map) = body else {
        return format!("value\n{}\n", csv_field(&scalar(body)));
    };
    let header: Vec<String> = map.keys().map(|k| csv_field(k)).collect();
    let row: Vec<String> = map.values().map(|v| csv_field(&scalar(v))).collect();
    format!("{}\n{}\n", header.join(","), row.join(","))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn to_human(body: &Json) -> String {
    match body {
        Json::Object(map) => {
            let width = map.keys().map(String::len).max().unwrap_or(0);
            map.iter()
                .map(|(k, v)| format!("{k:<width$}  {}\n", scalar(v)))
                .collect()
        }
        other => format!("{}\n", scalar(other)),
    }
}

fn render(report: &Report, output: Output) -> String {
    match output {
        Output::Json => format!("{}\n", report.body),
        Output::Csv => report.csv.clone().unwrap_or_else(|| to_csv(&report.body)),
        Output::Human => to_human(&report.body),
    }
}

fn error_json(kind: &str, message: &str) -> String {
    format!("{}\n", json!({"error": kind, "message": message}))
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: error_json("usage", text.trim_end()),
                }
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.max(1)).build() {
        Ok(pool) => pool,
        Err(e) => {
            return Outcome {
                code: EXIT_RESOURCE,
                stdout: String::new(),
                stderr: error_json("resource", &e.to_string()),
            }
        }
    };
    let output = cli.output;
    match pool.install(|| execute(cli.command)) {
        Ok(report) => Outcome {
            code: if report.holds { EXIT_OK } else { EXIT_VIOLATION },
            stdout: render(&report, output),
            stderr: String::new(),
        },
        Err(Failure::Usage(msg)) => Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: error_json("usage", &msg),
        },
        Err(Failure::Lib(e)) => {
            let (code, kind) = match e.kind() {
                ErrorKind::Usage => (EXIT_USAGE, "usage"),
                ErrorKind::Violation => (EXIT_VIOLATION, "violation"),
                ErrorKind::Resource => (EXIT_RESOURCE, "resource"),
            };
            Outcome {
                code,
                stdout: String::new(),
                stderr: error_json(kind, &e.to_string()),
            }
        }
    }
}
