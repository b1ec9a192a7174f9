//! Desk-scale experiment harness: hyperbola robustness, Wilkinson
//! polynomials, generic dense systems, and clustered-solution stress runs.
//!
//! Each harness returns a serializable report and renders a plain-text
//! table; randomness is fully determined by the given seed.

use std::fmt;
use std::time::Instant;

use padtrack_core::tracker::{
    count_distinct_solutions, same_solution, total_degree_homotopy, PathResult, TrackerConfig,
};
use padtrack_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::runner::{track_all_parallel, track_set_parallel, SOLUTION_RESIDUAL};
use crate::systems;

fn steps_range(results: &[PathResult]) -> (usize, usize) {
    let min = results.iter().map(|r| r.steps).min().unwrap_or(0);
    let max = results.iter().map(|r| r.steps).max().unwrap_or(0);
    (min, max)
}

fn dt1_ratio(results: &[PathResult]) -> f64 {
    let total: usize = results.iter().map(|r| r.steps).sum();
    if total == 0 {
        return 0.0;
    }
    let bound: usize = results.iter().map(|r| r.dt1_binding_steps).sum();
    bound as f64 / total as f64
}

// ── Hyperbola ───────────────────────────────────────────────────────

#[derive(Debug, Clone, Serialize)]
pub struct HyperbolaCase {
    pub k: u32,
    pub p: f64,
    /// Both paths stayed on their branch and hit the true endpoint.
    pub ok: bool,
    pub jumped: bool,
    pub max_endpoint_error: f64,
    pub min_steps: usize,
    pub max_steps: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct HyperbolaReport {
    pub cases: Vec<HyperbolaCase>,
}

/// Tracks both branches of `x² − (t−1/2)² − p²` for `p = 10⁻ᵏ`.
pub fn run_hyperbola(ks: &[u32], cfg: &TrackerConfig, workers: usize) -> HyperbolaReport {
    let mut cases = Vec::new();
    for &k in ks {
        let p = 10f64.powi(-(k as i32));
        let (h, starts) = systems::hyperbola(p);
        let results = track_all_parallel(&h, &starts.to_vec(), cfg, workers);
        let root = (0.25 + p * p).sqrt();
        let mut jumped = false;
        let mut max_err = 0.0f64;
        let mut all_success = true;
        for (i, r) in results.iter().enumerate() {
            let sign = if i == 0 { 1.0 } else { -1.0 };
            if !r.is_success() {
                all_success = false;
            }
            if r.endpoint[0].re.signum() != sign {
                jumped = true;
            }
            max_err = max_err.max((r.endpoint[0] - Complex64::new(sign * root, 0.0)).norm());
        }
        let (min_steps, max_steps) = steps_range(&results);
        cases.push(HyperbolaCase {
            k,
            p,
            ok: all_success && !jumped && max_err < 1e-8,
            jumped,
            max_endpoint_error: max_err,
            min_steps,
            max_steps,
        });
    }
    HyperbolaReport { cases }
}

impl fmt::Display for HyperbolaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "hyperbola family: p = 10^-k, two paths per case")?;
        writeln!(
            f,
            "{:>3} {:>9} {:>6} {:>7} {:>13} {:>9}",
            "k", "p", "ok", "jumped", "endpoint-err", "steps"
        )?;
        for c in &self.cases {
            writeln!(
                f,
                "{:>3} {:>9.1e} {:>6} {:>7} {:>13.2e} {:>4}-{}",
                c.k,
                c.p,
                if c.ok { "yes" } else { "NO" },
                if c.jumped { "yes" } else { "no" },
                c.max_endpoint_error,
                c.min_steps,
                c.max_steps
            )?;
        }
        Ok(())
    }
}

// ── Wilkinson ───────────────────────────────────────────────────────

#[derive(Debug, Clone, Serialize)]
pub struct WilkinsonRow {
    pub d: u32,
    /// `d` minus the number of distinct endpoints with residual < 1e-9.
    pub failures: usize,
    pub min_steps: usize,
    pub max_steps: usize,
    pub wall_time_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WilkinsonReport {
    pub seed: u64,
    pub match_tol: f64,
    pub rows: Vec<WilkinsonRow>,
}

/// Solves `W_d` through the total-degree homotopy for each degree.
pub fn run_wilkinson(
    degrees: &[u32],
    cfg: &TrackerConfig,
    seed: u64,
    match_tol: f64,
    workers: usize,
) -> WilkinsonReport {
    let mut rows = Vec::new();
    for &d in degrees {
        let clock = Instant::now();
        let w = systems::wilkinson(d);
        let mut set = total_degree_homotopy(&w, seed.wrapping_add(d as u64))
            .expect("Wilkinson target is well formed");
        track_set_parallel(&mut set, cfg, workers);
        let distinct = count_distinct_solutions(&set.results, match_tol, SOLUTION_RESIDUAL);
        let (min_steps, max_steps) = steps_range(&set.results);
        rows.push(WilkinsonRow {
            d,
            failures: (d as usize).saturating_sub(distinct),
            min_steps,
            max_steps,
            wall_time_seconds: clock.elapsed().as_secs_f64(),
        });
    }
    WilkinsonReport {
        seed,
        match_tol,
        rows,
    }
}

impl fmt::Display for WilkinsonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "Wilkinson polynomials via total-degree homotopy (seed {})",
            self.seed
        )?;
        writeln!(f, "{:>3} {:>3} {:>9} {:>9}", "d", "e", "steps", "T[s]")?;
        for r in &self.rows {
            writeln!(
                f,
                "{:>3} {:>3} {:>4}-{:<4} {:>9.3}",
                r.d, r.failures, r.min_steps, r.max_steps, r.wall_time_seconds
            )?;
        }
        Ok(())
    }
}

// ── Generic dense systems ───────────────────────────────────────────

#[derive(Debug, Clone, Serialize)]
pub struct GenericTrial {
    pub seed: u64,
    pub failures: usize,
    pub min_steps: usize,
    pub max_steps: usize,
    /// Fraction of steps on which `Δt₁` was the binding criterion.
    pub dt1_fraction: f64,
    pub wall_time_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GenericReport {
    pub n: usize,
    pub d: u32,
    pub path_count: usize,
    pub trials: Vec<GenericTrial>,
}

/// Dense systems with seeded standard-normal coefficients; one row per
/// trial, each with its own coefficient stream and random constant.
pub fn run_generic(
    n: usize,
    d: u32,
    trials: usize,
    seed: u64,
    cfg: &TrackerConfig,
    match_tol: f64,
    workers: usize,
) -> GenericReport {
    let path_count = (d as usize).pow(n as u32);
    let mut rows = Vec::new();
    for trial in 0..trials {
        let trial_seed = seed.wrapping_add(trial as u64);
        let clock = Instant::now();
        let mut rng = ChaCha12Rng::seed_from_u64(trial_seed);
        let f = systems::dense_normal_system(n, d, &mut rng);
        let mut set = total_degree_homotopy(&f, trial_seed).expect("dense target is well formed");
        track_set_parallel(&mut set, cfg, workers);
        let distinct = count_distinct_solutions(&set.results, match_tol, SOLUTION_RESIDUAL);
        let (min_steps, max_steps) = steps_range(&set.results);
        rows.push(GenericTrial {
            seed: trial_seed,
            failures: path_count.saturating_sub(distinct),
            min_steps,
            max_steps,
            dt1_fraction: dt1_ratio(&set.results),
            wall_time_seconds: clock.elapsed().as_secs_f64(),
        });
    }
    GenericReport {
        n,
        d,
        path_count,
        trials: rows,
    }
}

impl fmt::Display for GenericReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "generic dense systems: n = {}, d = {}, {} paths per trial",
            self.n, self.d, self.path_count
        )?;
        writeln!(
            f,
            "{:>12} {:>3} {:>9} {:>6} {:>9}",
            "seed", "e", "steps", "h", "T[s]"
        )?;
        for t in &self.trials {
            writeln!(
                f,
                "{:>12} {:>3} {:>4}-{:<4} {:>6.2} {:>9.3}",
                t.seed, t.failures, t.min_steps, t.max_steps, t.dt1_fraction, t.wall_time_seconds
            )?;
        }
        Ok(())
    }
}

// ── Clustered solutions ─────────────────────────────────────────────

#[derive(Debug, Clone, Serialize)]
pub struct ClusterCell {
    pub alpha: f64,
    pub cluster_size: usize,
    pub success_rates: Vec<f64>,
    pub mean_success_rate: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterReport {
    pub clusters: usize,
    pub trials: usize,
    pub seed: u64,
    pub match_tol: f64,
    pub cells: Vec<ClusterCell>,
}

/// The clustered-solutions stress test.
///
/// Per trial a random degree-`n_c·CS` target `F` is solved twice: once as a
/// conservative reference run (total-degree homotopy, max step 0.1) that
/// defines the solution set of `F`, and once through the cluster homotopy
/// passing near the clustered polynomial at `t = 1/2`. The success rate is
/// the fraction of reference solutions hit by the cluster run.
pub fn run_cluster(
    n_c: usize,
    cluster_sizes: &[usize],
    alphas: &[f64],
    trials: usize,
    seed: u64,
    cfg: &TrackerConfig,
    match_tol: f64,
    workers: usize,
) -> ClusterReport {
    let mut cells = Vec::new();
    for &alpha in alphas {
        for &cs in cluster_sizes {
            let d = (n_c * cs) as u32;
            let g = systems::roots_of_unity_system(d);
            let e = systems::poly_from_roots(&systems::cluster_roots(n_c, cs, alpha));
            let starts: Vec<Vec<Complex64>> = (0..d)
                .map(|m| {
                    vec![Complex64::from_polar(
                        1.0,
                        std::f64::consts::TAU * m as f64 / d as f64,
                    )]
                })
                .collect();
            // One deterministic sub-seed stream per (alpha, CS) cell.
            let mut cell_rng = ChaCha12Rng::seed_from_u64(
                seed ^ (alpha.to_bits().rotate_left(17)) ^ ((cs as u64) << 1),
            );
            let mut rates = Vec::with_capacity(trials);
            for _ in 0..trials {
                let trial_seed: u64 = cell_rng.random();
                let mut rng = ChaCha12Rng::seed_from_u64(trial_seed);
                let f = systems::dense_normal_system(1, d, &mut rng);
                let gamma1 =
                    Complex64::from_polar(1.0, std::f64::consts::TAU * rng.random::<f64>());
                let gamma2 =
                    Complex64::from_polar(1.0, std::f64::consts::TAU * rng.random::<f64>());

                // Reference solution set of F from a conservative run.
                let mut reference_cfg = cfg.clone();
                reference_cfg.max_step = 0.1;
                let mut reference =
                    total_degree_homotopy(&f, trial_seed).expect("dense target is well formed");
                track_set_parallel(&mut reference, &reference_cfg, workers);
                let mut reference_roots: Vec<Vec<Complex64>> = Vec::new();
                for r in &reference.results {
                    if r.residual <= SOLUTION_RESIDUAL
                        && !reference_roots
                            .iter()
                            .any(|root| same_solution(root, &r.endpoint, match_tol))
                    {
                        reference_roots.push(r.endpoint.clone());
                    }
                }

                let h = systems::cluster_homotopy(&g, &e, &f, gamma1, gamma2);
                let results = track_all_parallel(&h, &starts, cfg, workers);
                let hit = reference_roots
                    .iter()
                    .filter(|root| {
                        results
                            .iter()
                            .any(|r| same_solution(root, &r.endpoint, match_tol))
                    })
                    .count();
                rates.push(hit as f64 / d as f64);
            }
            let mean = rates.iter().sum::<f64>() / rates.len().max(1) as f64;
            cells.push(ClusterCell {
                alpha,
                cluster_size: cs,
                success_rates: rates,
                mean_success_rate: mean,
            });
        }
    }
    ClusterReport {
        clusters: n_c,
        trials,
        seed,
        match_tol,
        cells,
    }
}

impl fmt::Display for ClusterReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "clustered solutions: {} clusters, {} trials per cell (seed {})",
            self.clusters, self.trials, self.seed
        )?;
        writeln!(f, "{:>8} {:>4} {:>8}", "alpha", "CS", "mean SR")?;
        for c in &self.cells {
            writeln!(
                f,
                "{:>8} {:>4} {:>8.3}",
                c.alpha, c.cluster_size, c.mean_success_rate
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyperbola_easy_case() {
        let report = run_hyperbola(&[1], &TrackerConfig::default(), 1);
        assert!(report.cases[0].ok);
        assert!(!report.cases[0].jumped);
    }

    #[test]
    fn wilkinson_small_degree() {
        let report = run_wilkinson(&[6], &TrackerConfig::default(), 3, 1e-6, 2);
        assert_eq!(report.rows[0].failures, 0);
    }

    #[test]
    fn cluster_trivial_cell() {
        // CS = 1: plain well-separated roots; the success rate must be 1.
        let report = run_cluster(5, &[1], &[10.0], 2, 9, &TrackerConfig::default(), 1e-6, 2);
        assert_eq!(report.cells.len(), 1);
        assert!((report.cells[0].mean_success_rate - 1.0).abs() < 1e-12);
    }
}
