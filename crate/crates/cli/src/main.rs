use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use padtrack::experiments;
use padtrack::formats::{emit_json, parse_system};
use padtrack::runner::{solve_document, RunError, SolveOptions};
use padtrack_core::tracker::TrackerConfig;
use serde::Serialize;

const EXIT_PARSE: u8 = 2;
const EXIT_PATH_FAILURE: u8 = 3;
const EXIT_NUMERIC: u8 = 4;

#[derive(Parser)]
#[command(
    name = "padtrack",
    about = "Polynomial homotopy continuation with a-priori adaptive stepsize",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a polynomial system (or track an explicit homotopy) from a
    /// JSON system document.
    Solve(SolveArgs),
    /// Run one of the built-in experiment suites.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct TrackerFlags {
    /// Padé numerator degree.
    #[arg(long = "L", default_value_t = 5)]
    l: usize,
    /// Padé denominator degree.
    #[arg(long = "M", default_value_t = 1)]
    m: usize,
    /// Prediction-error fraction of the nearest-path distance.
    #[arg(long, default_value_t = 0.005)]
    beta1: f64,
    /// Safety factor on the pole-distance trust region.
    #[arg(long, default_value_t = 0.5)]
    beta2: f64,
    #[arg(long = "max-step", default_value_t = 0.5)]
    max_step: f64,
    /// Hard lower bound on the a-priori step (0 = no floor).
    #[arg(long = "min-step", default_value_t = 0.0)]
    min_step: f64,
    /// Corrector residual tolerance.
    #[arg(long = "tol", default_value_t = 1e-12)]
    corrector_tol: f64,
    /// Maximum predictor-corrector steps per path.
    #[arg(long = "max-steps", default_value_t = 10_000)]
    max_steps: usize,
    /// End of the plain tracking phase (endpoint refinement runs at t = 1).
    #[arg(long = "t-end-game", default_value_t = 1.0)]
    t_end_game: f64,
    /// Endpoint-matching tolerance for counting distinct solutions.
    #[arg(long = "match-tol", default_value_t = 1e-6)]
    match_tol: f64,
    /// RNG seed (random constant, experiment coefficient streams).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (static block assignment; 0 = all available cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Write the JSON report/document here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl TrackerFlags {
    fn validate(&self) -> Result<(), String> {
        if !(self.beta1 > 0.0 && self.beta1 < 1.0) {
            return Err("--beta1 must lie in (0, 1)".into());
        }
        if !(self.beta2 > 0.0 && self.beta2 < 1.0) {
            return Err("--beta2 must lie in (0, 1)".into());
        }
        if !(self.t_end_game > 0.0 && self.t_end_game <= 1.0) {
            return Err("--t-end-game must lie in (0, 1]".into());
        }
        if !(self.min_step >= 0.0 && self.min_step < self.max_step && self.max_step <= 1.0) {
            return Err("need 0 <= --min-step < --max-step <= 1".into());
        }
        if self.l == 0 && self.m == 0 {
            return Err("--L and --M cannot both be zero".into());
        }
        if !(self.match_tol > 0.0) || !(self.corrector_tol > 0.0) {
            return Err("--match-tol and --tol must be positive".into());
        }
        Ok(())
    }

    fn config(&self) -> TrackerConfig {
        TrackerConfig {
            l_degree: self.l,
            m_degree: self.m,
            beta1: self.beta1,
            beta2: self.beta2,
            t_end_game: self.t_end_game,
            max_step: self.max_step,
            min_step: self.min_step,
            corrector_tol: self.corrector_tol,
            corrector_max_iters: 4,
            max_steps_per_path: self.max_steps,
            eta_floor: 1e-30,
        }
    }

    fn worker_count(&self) -> usize {
        if self.workers > 0 {
            self.workers
        } else {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// System document (JSON); reads stdin when omitted or given as "-".
    input: Option<PathBuf>,
    #[command(flatten)]
    flags: TrackerFlags,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(subcommand)]
    which: ExperimentKind,
}

#[derive(Subcommand)]
enum ExperimentKind {
    /// Both branches of x² − (t−1/2)² − p² for p = 10⁻ᵏ.
    Hyperbola {
        /// Exponent list/range, e.g. "1-7" or "1,3,5".
        #[arg(long, default_value = "1-7")]
        k: String,
        #[command(flatten)]
        flags: TrackerFlags,
    },
    /// Wilkinson polynomials W_d through the total-degree homotopy.
    Wilkinson {
        /// Degree list/range, e.g. "10-19".
        #[arg(long, default_value = "10-19")]
        degrees: String,
        #[command(flatten)]
        flags: TrackerFlags,
    },
    /// Dense systems with seeded standard-normal coefficients.
    Generic {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[command(flatten)]
        flags: TrackerFlags,
    },
    /// Clustered-solution stress test.
    Cluster {
        /// Number of clusters.
        #[arg(long, default_value_t = 5)]
        clusters: usize,
        /// Cluster sizes, e.g. "1-5" or "3".
        #[arg(long = "cluster-sizes", default_value = "1-5")]
        cluster_sizes: String,
        /// Cluster radius factors, e.g. "10,100,1000".
        #[arg(long, default_value = "10")]
        alphas: String,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[command(flatten)]
        flags: TrackerFlags,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Experiment(args) => run_experiment(args.which),
    }
}

fn run_solve(args: SolveArgs) -> ExitCode {
    let text = match read_input(&args.input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read input: {e}");
            return ExitCode::from(EXIT_PARSE);
        }
    };
    let doc = match parse_system(&text) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_PARSE);
        }
    };
    if let Err(e) = args.flags.validate() {
        return usage_error(&e);
    }
    let opts = SolveOptions {
        cfg: args.flags.config(),
        seed: args.flags.seed,
        workers: args.flags.worker_count(),
        match_tol: args.flags.match_tol,
    };
    match solve_document(&doc, &opts) {
        Ok(outcome) => {
            if write_report(&args.flags.out, &outcome.document).is_err() {
                return ExitCode::from(EXIT_NUMERIC);
            }
            if outcome.all_success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_PATH_FAILURE)
            }
        }
        Err(RunError::Parse(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_PARSE)
        }
        Err(RunError::MissingStarts) => {
            eprintln!("error: {}", RunError::MissingStarts);
            ExitCode::from(EXIT_PARSE)
        }
        Err(RunError::Build(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}

fn run_experiment(kind: ExperimentKind) -> ExitCode {
    match kind {
        ExperimentKind::Hyperbola { k, flags } => {
            if let Err(e) = flags.validate() {
                return usage_error(&e);
            }
            let ks = match parse_u32_list(&k) {
                Ok(v) => v,
                Err(e) => return usage_error(&e),
            };
            let report = experiments::run_hyperbola(&ks, &flags.config(), flags.worker_count());
            finish_experiment(&flags.out, &report, format!("{report}"))
        }
        ExperimentKind::Wilkinson { degrees, flags } => {
            if let Err(e) = flags.validate() {
                return usage_error(&e);
            }
            let ds = match parse_u32_list(&degrees) {
                Ok(v) => v,
                Err(e) => return usage_error(&e),
            };
            let report = experiments::run_wilkinson(
                &ds,
                &flags.config(),
                flags.seed,
                flags.match_tol,
                flags.worker_count(),
            );
            finish_experiment(&flags.out, &report, format!("{report}"))
        }
        ExperimentKind::Generic {
            n,
            d,
            trials,
            flags,
        } => {
            if n == 0 || d == 0 || trials == 0 {
                return usage_error("generic experiment needs n >= 1, d >= 1, trials >= 1");
            }
            let report = experiments::run_generic(
                n,
                d,
                trials,
                flags.seed,
                &flags.config(),
                flags.match_tol,
                flags.worker_count(),
            );
            finish_experiment(&flags.out, &report, format!("{report}"))
        }
        ExperimentKind::Cluster {
            clusters,
            cluster_sizes,
            alphas,
            trials,
            flags,
        } => {
            if let Err(e) = flags.validate() {
                return usage_error(&e);
            }
            let sizes = match parse_u32_list(&cluster_sizes) {
                Ok(v) => v.into_iter().map(|v| v as usize).collect::<Vec<_>>(),
                Err(e) => return usage_error(&e),
            };
            let alpha_values = match parse_f64_list(&alphas) {
                Ok(v) => v,
                Err(e) => return usage_error(&e),
            };
            if clusters == 0 || sizes.iter().any(|&s| s == 0) || trials == 0 {
                return usage_error(
                    "cluster experiment needs clusters >= 1, sizes >= 1, trials >= 1",
                );
            }
            let report = experiments::run_cluster(
                clusters,
                &sizes,
                &alpha_values,
                trials,
                flags.seed,
                &flags.config(),
                flags.match_tol,
                flags.worker_count(),
            );
            finish_experiment(&flags.out, &report, format!("{report}"))
        }
    }
}

fn finish_experiment<T: Serialize>(out: &Option<PathBuf>, report: &T, table: String) -> ExitCode {
    print!("{table}");
    match out {
        Some(path) => {
            if let Err(e) = fs::write(path, emit_json(report) + "\n") {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_NUMERIC);
            }
            ExitCode::SUCCESS
        }
        None => ExitCode::SUCCESS,
    }
}

fn usage_error(message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_PARSE)
}

fn write_report<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<(), ()> {
    let json = emit_json(value) + "\n";
    match out {
        Some(path) => fs::write(path, json).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", path.display());
        }),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn read_input(path: &Option<PathBuf>) -> std::io::Result<String> {
    match path {
        Some(p) if p.as_os_str() != "-" => fs::read_to_string(p),
        _ => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            Ok(buf)
        }
    }
}

/// Parses "1,2,5" and "1-7" (inclusive range) style lists.
fn parse_u32_list(spec: &str) -> Result<Vec<u32>, String> {
    let mut out = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if let Some((a, b)) = part.split_once('-') {
            let lo: u32 = a
                .trim()
                .parse()
                .map_err(|_| format!("bad range start in {part:?}"))?;
            let hi: u32 = b
                .trim()
                .parse()
                .map_err(|_| format!("bad range end in {part:?}"))?;
            if lo > hi {
                return Err(format!("empty range {part:?}"));
            }
            out.extend(lo..=hi);
        } else {
            out.push(part.parse().map_err(|_| format!("bad value {part:?}"))?);
        }
    }
    if out.is_empty() {
        return Err(format!("no values in {spec:?}"));
    }
    Ok(out)
}

fn parse_f64_list(spec: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        out.push(part.parse().map_err(|_| format!("bad value {part:?}"))?);
    }
    if out.is_empty() {
        return Err(format!("no values in {spec:?}"));
    }
    Ok(out)
}
