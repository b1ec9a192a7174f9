//! Multi-threaded path driver and the end-to-end solve pipeline.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use padtrack_core::tracker::{
    count_distinct_solutions, total_degree_homotopy, track_path, BuildError, PathResult, SolveSet,
    TrackerConfig,
};
use padtrack_core::Complex64;

use crate::formats::{ConfigDocument, ParseError, PathDocument, SolutionDocument, SystemDocument};

/// Residual bound under which an endpoint counts as a solution when
/// deduplicating (Table-style failure counting).
pub const SOLUTION_RESIDUAL: f64 = 1e-9;

/// Tracks all start points across `workers` threads with a static block
/// assignment: worker `w` gets the `w`-th contiguous block of starts.
/// Results land in start order and are identical for any worker count.
pub fn track_all_parallel(
    h: &padtrack_core::polysys::Homotopy,
    starts: &[Vec<Complex64>],
    cfg: &TrackerConfig,
    workers: usize,
) -> Vec<PathResult> {
    let workers = workers.max(1).min(starts.len().max(1));
    if workers <= 1 {
        let mut results = Vec::with_capacity(starts.len());
        for (i, z0) in starts.iter().enumerate() {
            results.push(track_path(h, z0, cfg));
            if (i + 1) % 100 == 0 {
                eprintln!("tracked {}/{} paths", i + 1, starts.len());
            }
        }
        return results;
    }
    let chunk = starts.len().div_ceil(workers);
    let mut results: Vec<Option<PathResult>> = vec![None; starts.len()];
    let done = AtomicUsize::new(0);
    let total = starts.len();
    std::thread::scope(|scope| {
        for (block, slots) in starts.chunks(chunk).zip(results.chunks_mut(chunk)) {
            scope.spawn(|| {
                for (z0, slot) in block.iter().zip(slots.iter_mut()) {
                    *slot = Some(track_path(h, z0, cfg));
                    let n = done.fetch_add(1, Ordering::Relaxed) + 1;
                    if n % 100 == 0 {
                        eprintln!("tracked {n}/{total} paths");
                    }
                }
            });
        }
    });
    results
        .into_iter()
        .map(|r| r.expect("every slot is written by its worker"))
        .collect()
}

/// Tracks a solve set in parallel, filling `set.results`.
pub fn track_set_parallel(set: &mut SolveSet, cfg: &TrackerConfig, workers: usize) {
    set.results = track_all_parallel(&set.homotopy, &set.starts, cfg, workers);
}

#[derive(Debug)]
pub enum RunError {
    Parse(ParseError),
    /// Start-system construction failed.
    Build(BuildError),
    /// Explicit homotopy document without start solutions.
    MissingStarts,
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Parse(e) => write!(f, "{e}"),
            RunError::Build(e) => write!(f, "cannot build start system: {e}"),
            RunError::MissingStarts => {
                write!(
                    f,
                    "homotopy documents (t_degree > 0) must supply \"starts\""
                )
            }
        }
    }
}

impl std::error::Error for RunError {}

/// Everything `padtrack solve` needs to report.
pub struct SolveOutcome {
    pub document: SolutionDocument,
    pub all_success: bool,
}

pub struct SolveOptions {
    pub cfg: TrackerConfig,
    pub seed: u64,
    pub workers: usize,
    pub match_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            cfg: TrackerConfig::default(),
            seed: 0,
            workers: 1,
            match_tol: 1e-6,
        }
    }
}

/// Solves a system document end to end.
///
/// Plain polynomial documents go through the total-degree start system with
/// the random constant drawn from `seed`; explicit homotopy documents are
/// tracked from their supplied start solutions.
pub fn solve_document(doc: &SystemDocument, opts: &SolveOptions) -> Result<SolveOutcome, RunError> {
    let clock = Instant::now();
    let (results, gamma) = if doc.is_homotopy() {
        let h = doc.to_homotopy().map_err(RunError::Parse)?;
        let starts = doc.start_points().ok_or(RunError::MissingStarts)?;
        if starts.is_empty() {
            return Err(RunError::MissingStarts);
        }
        let results = track_all_parallel(&h, &starts, &opts.cfg, opts.workers);
        (results, Complex64::ONE)
    } else {
        let f = doc.to_homotopy().map_err(RunError::Parse)?;
        let mut set = total_degree_homotopy(&f, opts.seed).map_err(RunError::Build)?;
        track_set_parallel(&mut set, &opts.cfg, opts.workers);
        (set.results, set.gamma)
    };

    let success_count = results.iter().filter(|r| r.is_success()).count();
    let distinct = count_distinct_solutions(&results, opts.match_tol, SOLUTION_RESIDUAL);
    let document = SolutionDocument {
        gamma: [gamma.re, gamma.im],
        seed: opts.seed,
        config: ConfigDocument::new(&opts.cfg, opts.match_tol, opts.workers),
        wall_time_seconds: clock.elapsed().as_secs_f64(),
        path_count: results.len(),
        success_count,
        distinct_solutions: distinct,
        paths: results.iter().map(PathDocument::new).collect(),
    };
    Ok(SolveOutcome {
        all_success: success_count == results.len(),
        document,
    })
}
