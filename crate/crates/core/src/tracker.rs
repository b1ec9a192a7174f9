//! A-priori adaptive-stepsize path tracking.
//!
//! The predictor lifts the current path point to a power-series solution,
//! fits per-coordinate Padé approximants, and chooses the stepsize as the
//! minimum of two candidates before the step is taken:
//!
//! * `Δt₁ = (β₁ η / ‖e₀‖)^{1/k}` — the approximation error stays a small
//!   fraction of the estimated distance `η` to the nearest different path;
//! * `Δt₂ = β₂ D` — a trust region from the nearest approximant pole.
//!
//! The tracking loop alternates predict and correct until the end of the
//! tracked interval, then refines the endpoint at `t = 1`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::algebra::{singular_values, vec_norm, ComplexVector};
use crate::newton::{compute_series, correct, SeriesSolveError};
use crate::pade::PadeBundle;
use crate::polysys::{HMonomial, Homotopy, HomotopyPoly, SystemError};

/// Residual bound for a successful endpoint.
pub const ENDPOINT_RESIDUAL: f64 = 1e-9;
/// Condition bound on the endpoint Jacobian.
pub const ENDPOINT_CONDITION: f64 = 1e12;
/// Newton iterations spent on endpoint refinement.
const ENDPOINT_REFINE_ITERS: usize = 6;
/// Stepsize halvings attempted when the corrector rejects a predicted point.
const CORRECTOR_FALLBACK_HALVINGS: usize = 5;

/// All tracker tunables.
#[derive(Debug, Clone)]
pub struct TrackerConfig {
    /// Padé numerator degree `L`.
    pub l_degree: usize,
    /// Padé denominator degree `M`.
    pub m_degree: usize,
    /// Fraction of the nearest-path distance allowed as prediction error.
    pub beta1: f64,
    /// Safety factor on the pole-distance trust region.
    pub beta2: f64,
    /// Tracking endpoint of the plain continuation phase.
    pub t_end_game: f64,
    pub max_step: f64,
    /// Hard floor on the a-priori step; zero disables it (steps are then
    /// bounded below only by floating-point advance of the parameter).
    pub min_step: f64,
    pub corrector_tol: f64,
    pub corrector_max_iters: usize,
    pub max_steps_per_path: usize,
    /// `‖e₀‖` below this floor makes the curvature candidate `Δt₁ = 1`.
    pub eta_floor: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            l_degree: 5,
            m_degree: 1,
            beta1: 0.005,
            beta2: 0.5,
            t_end_game: 1.0,
            max_step: 0.5,
            min_step: 0.0,
            corrector_tol: 1e-12,
            corrector_max_iters: 4,
            max_steps_per_path: 10_000,
            eta_floor: 1e-30,
        }
    }
}

impl TrackerConfig {
    /// Series truncation order used by the predictor: `L + M + 2`.
    pub fn series_order(&self) -> usize {
        self.l_degree + self.m_degree + 2
    }

    /// Generic defect order `k = L + M + 1` in the `Δt₁` root.
    pub fn defect_order(&self) -> usize {
        self.l_degree + self.m_degree + 1
    }

    fn validate(&self) {
        assert!(
            self.beta1 > 0.0 && self.beta1 < 1.0,
            "beta1 must be in (0,1)"
        );
        assert!(
            self.beta2 > 0.0 && self.beta2 < 1.0,
            "beta2 must be in (0,1)"
        );
        assert!(
            self.t_end_game > 0.0 && self.t_end_game <= 1.0,
            "t_end_game must be in (0,1]"
        );
        assert!(
            self.min_step >= 0.0 && self.min_step < self.max_step && self.max_step <= 1.0,
            "need 0 <= min_step < max_step <= 1"
        );
        assert!(
            self.m_degree >= 1 || self.l_degree >= 1,
            "degenerate Padé type"
        );
    }
}

/// Terminal state of one tracked path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathStatus {
    Success,
    /// Corrector rejected the predicted point even after step halving.
    CorrectorFailure,
    /// The a-priori stepsize fell below `min_step`.
    StepUnderflow,
    StepBudgetExhausted,
    /// Endpoint refinement found a singular or out-of-tolerance endpoint.
    SingularEndpoint,
}

impl PathStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            PathStatus::Success => "success",
            PathStatus::CorrectorFailure => "corrector-failure",
            PathStatus::StepUnderflow => "step-underflow",
            PathStatus::StepBudgetExhausted => "step-budget-exhausted",
            PathStatus::SingularEndpoint => "singular-endpoint",
        }
    }
}

impl fmt::Display for PathStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome and diagnostics of one tracked path.
#[derive(Debug, Clone)]
pub struct PathResult {
    pub endpoint: ComplexVector,
    pub status: PathStatus,
    /// Accepted predictor-corrector steps.
    pub steps: usize,
    /// Scale-invariant residual of the homotopy at the endpoint: at `t = 1`
    /// for completed paths, at the stopping parameter for abandoned ones.
    pub residual: f64,
    /// Smallest accepted stepsize (0 when no step was accepted).
    pub min_dt: f64,
    /// Largest accepted stepsize.
    pub max_dt: f64,
    /// Steps on which the curvature candidate `Δt₁` was binding.
    pub dt1_binding_steps: usize,
}

impl PathResult {
    pub fn is_success(&self) -> bool {
        self.status == PathStatus::Success
    }

    /// Fraction of accepted steps where `Δt₁` was the first candidate.
    pub fn dt1_fraction(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.dt1_binding_steps as f64 / self.steps as f64
        }
    }
}

/// Scale-invariant residual of `H(·, t)` at `z`:
/// `r = (1/n) Σᵢ |hᵢ(z,t)| / (h_{i,abs}(|z|,|t|) + 1)`.
pub fn residual_at(h: &Homotopy, z: &[Complex64], t: Complex64) -> f64 {
    let values = match h.evaluate(z, t) {
        Ok(v) => v,
        Err(_) => return f64::INFINITY,
    };
    let abs = h.evaluate_abs(z, t);
    let n = h.n() as f64;
    values
        .iter()
        .zip(abs.iter())
        .map(|(v, a)| v.norm() / (a + 1.0))
        .sum::<f64>()
        / n
}

/// Residual of a plain polynomial system (no t-dependence).
pub fn residual(f: &Homotopy, z: &[Complex64]) -> f64 {
    residual_at(f, z, Complex64::ZERO)
}

/// Estimate `η = 2σₙ(J_H) (σ₁(𝓗₁)² + … + σ₁(𝓗ₙ)²)^{−1/2}` of the distance
/// to the most nearby different path at `(z, t)`.
///
/// Returns `+∞` when every Hessian vanishes (no curvature, e.g. linear
/// systems) and `0` when the data is numerically unusable, which makes the
/// caller fail toward small steps rather than large ones.
pub fn eta(h: &Homotopy, z: &[Complex64], t: Complex64) -> f64 {
    let jac = match h.jacobian(z, t) {
        Ok(j) => j,
        Err(_) => return 0.0,
    };
    let sv = match singular_values(&jac) {
        Ok(s) => s,
        Err(_) => return 0.0,
    };
    let sigma_n = *sv.last().expect("n >= 1");
    let hessians = match h.hessians(z, t) {
        Ok(hs) => hs,
        Err(_) => return 0.0,
    };
    let mut sum_sq = 0.0;
    for hess in &hessians {
        match singular_values(hess) {
            Ok(s) => sum_sq += s[0] * s[0],
            Err(_) => return 0.0,
        }
    }
    if sum_sq == 0.0 {
        return f64::INFINITY;
    }
    2.0 * sigma_n / sum_sq.sqrt()
}

/// Which bound produced the accepted stepsize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepBound {
    /// `Δt₁`, the curvature/approximation-error bound.
    Curvature,
    /// `Δt₂`, the pole-distance trust region.
    PoleDistance,
    /// The remaining distance to `t_end_game`.
    EndGame,
    /// The configured maximum stepsize.
    MaxStep,
}

/// A predicted point together with the quantities that produced it.
#[derive(Debug, Clone)]
pub struct Prediction {
    pub z_tilde: ComplexVector,
    pub dt: f64,
    pub bundle: PadeBundle,
    pub eta: f64,
    pub dt1: f64,
    pub dt2: f64,
    pub binding: StepBound,
    /// The step lands exactly on `t_end_game`.
    pub landing: bool,
    pub series_iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PredictError {
    Series(SeriesSolveError),
    /// The difficulty-driven stepsize fell below `min_step`.
    StepUnderflow {
        dt: f64,
    },
    /// The approximant could not be evaluated at the chosen step.
    PoleEvaluation,
}

impl fmt::Display for PredictError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredictError::Series(e) => write!(f, "series solve failed: {e}"),
            PredictError::StepUnderflow { dt } => {
                write!(f, "a-priori stepsize {dt:.3e} fell below the minimum step")
            }
            PredictError::PoleEvaluation => write!(f, "predicted step hit an approximant pole"),
        }
    }
}

impl core::error::Error for PredictError {}

/// The a-priori predictor: series solution of order `L+M+2`, Padé fit per
/// coordinate, stepsize from the two candidates capped by `max_step` and
/// the remaining distance to `t_end_game`.
pub fn predict(
    h: &Homotopy,
    z: &[Complex64],
    t_star: f64,
    cfg: &TrackerConfig,
) -> Result<Prediction, PredictError> {
    let w = cfg.series_order();
    let report =
        compute_series(h, Complex64::new(t_star, 0.0), w, z).map_err(PredictError::Series)?;
    let eta_value = eta(h, z, Complex64::new(t_star, 0.0));
    let bundle = PadeBundle::fit(&report.series, cfg.l_degree, cfg.m_degree);
    let e0_norm = vec_norm(&bundle.e0);
    let k = cfg.defect_order();

    let dt1 = if e0_norm < cfg.eta_floor || eta_value == f64::INFINITY {
        1.0
    } else {
        (cfg.beta1 * eta_value / e0_norm).powf(1.0 / k as f64)
    };
    let dt2 = if bundle.pole_distance.is_finite() {
        cfg.beta2 * bundle.pole_distance
    } else {
        f64::INFINITY
    };

    let mut dt = dt1.min(dt2).min(cfg.max_step);
    // Underflow when the suggestion is degenerate (NaN, zero), below the
    // configured floor, or too small to advance the parameter in floating
    // point (a frozen t* would otherwise spin until the step budget).
    // Heavily unbalanced targets and clustered fibers legitimately demand
    // steps many orders below any fixed absolute floor while t* is itself
    // tiny or the pinch is genuine, hence the default min_step of zero.
    let advance_floor = f64::EPSILON * t_star;
    if !(dt > 0.0) || dt < cfg.min_step || dt < advance_floor {
        return Err(PredictError::StepUnderflow { dt });
    }
    let remaining = cfg.t_end_game - t_star;
    // Land exactly on t_end_game; also when the gap has shrunk to the
    // floating-point resolution of the parameter interval.
    let landing = dt >= remaining || remaining <= 4.0 * f64::EPSILON * cfg.t_end_game;
    if landing {
        dt = remaining;
    }
    let binding = if landing {
        StepBound::EndGame
    } else if dt1 <= dt2 && dt1 <= cfg.max_step {
        StepBound::Curvature
    } else if dt2 <= cfg.max_step {
        StepBound::PoleDistance
    } else {
        StepBound::MaxStep
    };
    let z_tilde = bundle
        .eval(Complex64::new(dt, 0.0))
        .map_err(|_| PredictError::PoleEvaluation)?;
    Ok(Prediction {
        z_tilde,
        dt,
        bundle,
        eta: eta_value,
        dt1,
        dt2,
        binding,
        landing,
        series_iterations: report.iterations,
    })
}

/// Newton refinement at `t = 1` with a success gate on the residual and the
/// endpoint Jacobian condition.
///
/// Two Jacobian checks back the condition estimate: the matrix condition
/// `σ₁/σₙ`, and a degeneracy floor that flags `σₙ` within a few ulps of the
/// cancellation-free magnitude of the Jacobian entries (a matrix that small
/// cannot be told apart from a singular one in double precision).
pub fn refine_endpoint(
    h: &Homotopy,
    z: &[Complex64],
    cfg: &TrackerConfig,
) -> (ComplexVector, PathStatus, f64) {
    let one = Complex64::new(1.0, 0.0);
    let report = correct(h, z, one, cfg.corrector_tol, ENDPOINT_REFINE_ITERS);
    let residual = report.residual;
    let condition_ok = match h.jacobian(&report.point, one) {
        Ok(j) => match singular_values(&j) {
            Ok(sv) => {
                let hi = sv[0];
                let lo = *sv.last().expect("n >= 1");
                let floor = 10.0 * f64::EPSILON * h.jacobian_abs_max(&report.point, one);
                lo > floor && hi / lo < ENDPOINT_CONDITION
            }
            Err(_) => false,
        },
        Err(_) => false,
    };
    let status = if residual <= ENDPOINT_RESIDUAL && condition_ok {
        PathStatus::Success
    } else {
        PathStatus::SingularEndpoint
    };
    (report.point, status, residual)
}

/// Tracks one path of `H` from the start solution `z0` at `t = 0` to
/// `t = 1`. Never panics across a path; every failure maps to a status.
pub fn track_path(h: &Homotopy, z0: &[Complex64], cfg: &TrackerConfig) -> PathResult {
    cfg.validate();
    let fail = |endpoint: ComplexVector, status: PathStatus, steps, t: f64, diag: &StepDiag| {
        let residual = residual_at(h, &endpoint, Complex64::new(t, 0.0));
        PathResult {
            endpoint,
            status,
            steps,
            residual,
            min_dt: diag.min_dt_or_zero(),
            max_dt: diag.max_dt,
            dt1_binding_steps: diag.dt1_binding,
        }
    };

    let mut diag = StepDiag::new();
    // Settle the start point before the first prediction.
    let start = correct(
        h,
        z0,
        Complex64::ZERO,
        cfg.corrector_tol,
        cfg.corrector_max_iters,
    );
    if !start.converged {
        return fail(start.point, PathStatus::CorrectorFailure, 0, 0.0, &diag);
    }
    let mut z = start.point;
    let mut t_star = 0.0_f64;
    let mut steps = 0usize;

    while t_star < cfg.t_end_game {
        if steps >= cfg.max_steps_per_path {
            return fail(z, PathStatus::StepBudgetExhausted, steps, t_star, &diag);
        }
        let pred = match predict(h, &z, t_star, cfg) {
            Ok(p) => p,
            Err(PredictError::StepUnderflow { .. }) => {
                return fail(z, PathStatus::StepUnderflow, steps, t_star, &diag);
            }
            Err(_) => {
                return fail(z, PathStatus::CorrectorFailure, steps, t_star, &diag);
            }
        };

        // Corrector with a-priori stepsize; on rejection halve the step and
        // re-evaluate the same Padé bundle rather than re-predicting.
        let mut dt = pred.dt;
        let mut landing = pred.landing;
        let mut z_tilde = pred.z_tilde.clone();
        let mut accepted = None;
        for attempt in 0..=CORRECTOR_FALLBACK_HALVINGS {
            if attempt > 0 {
                dt *= 0.5;
                landing = false;
                z_tilde = match pred.bundle.eval(Complex64::new(dt, 0.0)) {
                    Ok(p) => p,
                    Err(_) => continue,
                };
            }
            let t_next = if landing { cfg.t_end_game } else { t_star + dt };
            let rep = correct(
                h,
                &z_tilde,
                Complex64::new(t_next, 0.0),
                cfg.corrector_tol,
                cfg.corrector_max_iters,
            );
            if rep.converged {
                accepted = Some((rep.point, t_next, dt, attempt == 0));
                break;
            }
        }
        match accepted {
            None => return fail(z, PathStatus::CorrectorFailure, steps, t_star, &diag),
            Some((point, t_next, dt_used, full_step)) => {
                z = point;
                t_star = t_next;
                steps += 1;
                diag.record(dt_used, full_step && pred.binding == StepBound::Curvature);
            }
        }
    }

    let (endpoint, status, residual) = refine_endpoint(h, &z, cfg);
    PathResult {
        endpoint,
        status,
        steps,
        residual,
        min_dt: diag.min_dt_or_zero(),
        max_dt: diag.max_dt,
        dt1_binding_steps: diag.dt1_binding,
    }
}

struct StepDiag {
    min_dt: f64,
    max_dt: f64,
    dt1_binding: usize,
}

impl StepDiag {
    fn new() -> Self {
        StepDiag {
            min_dt: f64::INFINITY,
            max_dt: 0.0,
            dt1_binding: 0,
        }
    }

    fn record(&mut self, dt: f64, dt1_bound: bool) {
        self.min_dt = self.min_dt.min(dt);
        self.max_dt = self.max_dt.max(dt);
        if dt1_bound {
            self.dt1_binding += 1;
        }
    }

    fn min_dt_or_zero(&self) -> f64 {
        if self.min_dt.is_finite() {
            self.min_dt
        } else {
            0.0
        }
    }
}

/// Tracks every start point, in order. Paths are independent; this
/// sequential driver is the reference scheduling, and any parallel driver
/// must produce the same results in the same order.
pub fn track_all(h: &Homotopy, starts: &[ComplexVector], cfg: &TrackerConfig) -> Vec<PathResult> {
    starts.iter().map(|z0| track_path(h, z0, cfg)).collect()
}

/// Whether two endpoints represent the same solution: coordinatewise
/// distance below `tol · (1 + |coordinate|)`.
pub fn same_solution(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b.iter())
            .all(|(x, y)| (x - y).norm() <= tol * (1.0 + x.norm().max(y.norm())))
}

/// Number of distinct endpoints with residual at most `residual_tol`,
/// deduplicated with [`same_solution`] at `match_tol`. Only paths whose
/// tracking reached `t = 1` participate; a path abandoned mid-way reports
/// the residual where it stopped, which says nothing about the target.
pub fn count_distinct_solutions(
    results: &[PathResult],
    match_tol: f64,
    residual_tol: f64,
) -> usize {
    let mut reps: Vec<&ComplexVector> = Vec::new();
    for r in results {
        let completed = matches!(r.status, PathStatus::Success | PathStatus::SingularEndpoint);
        if !completed || !(r.residual <= residual_tol) {
            continue;
        }
        if !reps
            .iter()
            .any(|rep| same_solution(rep, &r.endpoint, match_tol))
        {
            reps.push(&r.endpoint);
        }
    }
    reps.len()
}

// ── Homotopy construction ───────────────────────────────────────────

/// Errors from start-system construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuildError {
    /// Target equation is identically zero.
    ZeroPolynomial {
        poly: usize,
    },
    /// Target equation has degree zero (a nonzero constant has no roots).
    DegreeZero {
        poly: usize,
    },
    /// Total-degree start systems need a plain polynomial target.
    UnsupportedTarget,
    System(SystemError),
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::ZeroPolynomial { poly } => write!(f, "polynomial {poly} is zero"),
            BuildError::DegreeZero { poly } => write!(f, "polynomial {poly} has degree zero"),
            BuildError::UnsupportedTarget => {
                write!(
                    f,
                    "target must be a plain (non-toric, t-free) polynomial system"
                )
            }
            BuildError::System(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for BuildError {}

/// A solve instance: the blended homotopy, its start solutions, the random
/// constant applied to the target, and (after tracking) the results.
#[derive(Debug, Clone)]
pub struct SolveSet {
    pub homotopy: Homotopy,
    pub target: Homotopy,
    pub starts: Vec<ComplexVector>,
    pub gamma: Complex64,
    pub results: Vec<PathResult>,
}

impl SolveSet {
    /// Sequential tracking of all start points.
    pub fn track(&mut self, cfg: &TrackerConfig) {
        self.results = track_all(&self.homotopy, &self.starts, cfg);
    }
}

/// Rescales every equation to unit largest coefficient modulus. The
/// solution set is unchanged and the scale-invariant residual does not see
/// the scaling; blended homotopies become numerically balanced against a
/// unit-coefficient start system (a raw target like a Wilkinson polynomial
/// carries coefficients of size 1e14 and would otherwise force the whole
/// path geometry into a t-interval of that reciprocal scale).
pub fn normalize_equations(f: &Homotopy) -> Homotopy {
    let polys = f
        .polys()
        .iter()
        .map(|p| {
            let scale = p.max_coeff_abs();
            if scale == 0.0 || scale == 1.0 {
                return p.clone();
            }
            HomotopyPoly::new(
                p.monomials()
                    .iter()
                    .map(|m| HMonomial::new(m.coeff / scale, m.x_exponents.clone(), m.t_degree))
                    .collect(),
            )
        })
        .collect();
    Homotopy::new(f.n(), polys, f.is_toric()).expect("rescaling preserves validity")
}

/// Combines t-free systems with polynomial weights in `t`:
/// `H = Σ parts wᵢ(t) · Fᵢ` where each weight is given by its coefficient
/// sequence `w(t) = w₀ + w₁ t + …`.
pub fn blend_systems(parts: &[(&Homotopy, &[Complex64])]) -> Result<Homotopy, BuildError> {
    assert!(!parts.is_empty());
    let n = parts[0].0.n();
    let toric = parts.iter().any(|(f, _)| f.is_toric());
    for (f, _) in parts {
        assert_eq!(f.n(), n, "blended systems must share the variable count");
        if !f.is_t_free() {
            return Err(BuildError::UnsupportedTarget);
        }
    }
    let mut polys = Vec::with_capacity(n);
    for i in 0..n {
        let mut monomials = Vec::new();
        for (f, weights) in parts {
            for m in f.poly(i).monomials() {
                for (k, wc) in weights.iter().enumerate() {
                    if *wc == Complex64::ZERO {
                        continue;
                    }
                    monomials.push(HMonomial::new(
                        m.coeff * wc,
                        m.x_exponents.clone(),
                        k as u32,
                    ));
                }
            }
        }
        polys.push(HomotopyPoly::new(monomials));
    }
    Homotopy::new(n, polys, toric).map_err(BuildError::System)
}

/// Builds the total-degree homotopy `H(x,t) = G(x)(1−t) + γ F(x) t` with
/// the start system `G = (x₁^{d₁} − 1, …, xₙ^{dₙ} − 1)` using per-equation
/// degrees, all `∏dᵢ` root-of-unity tuples as start solutions, and a
/// random modulus-one `γ` drawn from the seeded generator.
pub fn total_degree_homotopy(f: &Homotopy, seed: u64) -> Result<SolveSet, BuildError> {
    if f.is_toric() || !f.is_t_free() {
        return Err(BuildError::UnsupportedTarget);
    }
    let n = f.n();
    let mut degrees = Vec::with_capacity(n);
    for (i, p) in f.polys().iter().enumerate() {
        if p.is_zero() {
            return Err(BuildError::ZeroPolynomial { poly: i });
        }
        let d = p.total_degree();
        if d == 0 {
            return Err(BuildError::DegreeZero { poly: i });
        }
        degrees.push(d);
    }

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let u: f64 = rng.random();
    let gamma = Complex64::from_polar(1.0, core::f64::consts::TAU * u);

    let start_polys: Vec<HomotopyPoly> = degrees
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let mut exps = vec![0i32; n];
            exps[i] = d as i32;
            HomotopyPoly::new(vec![
                HMonomial::new(Complex64::ONE, exps, 0),
                HMonomial::new(-Complex64::ONE, vec![0; n], 0),
            ])
        })
        .collect();
    let g = Homotopy::new(n, start_polys, false).map_err(BuildError::System)?;

    let one = Complex64::ONE;
    let homotopy = blend_systems(&[(&g, &[one, -one]), (f, &[Complex64::ZERO, gamma])])?;

    // All tuples of dᵢ-th roots of unity, in lexicographic index order.
    let total: usize = degrees.iter().map(|&d| d as usize).product();
    let mut starts = Vec::with_capacity(total);
    let mut index = vec![0u32; n];
    loop {
        starts.push(
            index
                .iter()
                .zip(degrees.iter())
                .map(|(&m, &d)| {
                    Complex64::from_polar(1.0, core::f64::consts::TAU * m as f64 / d as f64)
                })
                .collect::<ComplexVector>(),
        );
        let mut carry = n;
        while carry > 0 {
            let j = carry - 1;
            index[j] += 1;
            if index[j] < degrees[j] {
                break;
            }
            index[j] = 0;
            carry -= 1;
        }
        if carry == 0 {
            break;
        }
    }
    debug_assert_eq!(starts.len(), total);

    Ok(SolveSet {
        homotopy,
        target: f.clone(),
        starts,
        gamma,
        results: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    fn hyperbola(p: f64) -> Homotopy {
        let poly = HomotopyPoly::new(vec![
            HMonomial::new(re(1.0), vec![2], 0),
            HMonomial::new(re(-1.0), vec![0], 2),
            HMonomial::new(re(1.0), vec![0], 1),
            HMonomial::new(re(-0.25 - p * p), vec![0], 0),
        ]);
        Homotopy::new(1, vec![poly], false).unwrap()
    }

    fn hyperbola_branch(p: f64, t: f64, sign: f64) -> f64 {
        sign * ((t - 0.5) * (t - 0.5) + p * p).sqrt()
    }

    #[test]
    fn residual_formula() {
        // exact root
        let sq = HomotopyPoly::new(vec![
            HMonomial::new(re(1.0), vec![2], 0),
            HMonomial::new(re(-1.0), vec![0], 0),
        ]);
        let f = Homotopy::new(1, vec![sq], false).unwrap();
        assert_eq!(residual(&f, &[re(1.0)]), 0.0);

        // f = x at z = 1: |1| / (1 + 1) = 0.5
        let ident = HomotopyPoly::new(vec![HMonomial::new(re(1.0), vec![1], 0)]);
        let f = Homotopy::new(1, vec![ident], false).unwrap();
        assert!((residual(&f, &[re(1.0)]) - 0.5).abs() < 1e-15);

        // Scaling leaves the ratio nearly unchanged once the denominator is
        // dominated by the abs-polynomial (the +1 guard fades out).
        let big = HomotopyPoly::new(vec![
            HMonomial::new(re(1e8), vec![2], 0),
            HMonomial::new(re(1.0), vec![0], 0),
        ]);
        let f1 = Homotopy::new(1, vec![big], false).unwrap();
        let scaled = HomotopyPoly::new(vec![
            HMonomial::new(re(1e9), vec![2], 0),
            HMonomial::new(re(10.0), vec![0], 0),
        ]);
        let f10 = Homotopy::new(1, vec![scaled], false).unwrap();
        let r1 = residual(&f1, &[re(2.0)]);
        let r10 = residual(&f10, &[re(2.0)]);
        assert!((r1 - r10).abs() <= 1e-8 * r1);
    }

    #[test]
    fn eta_is_exact_on_univariate_quadratics() {
        let p = 0.1;
        let h = hyperbola(p);
        for i in 0..20 {
            let t = i as f64 / 20.0;
            let z = hyperbola_branch(p, t, 1.0);
            let e = eta(&h, &[re(z)], re(t));
            assert!(
                (e - 2.0 * z.abs()).abs() <= 1e-10,
                "t={t}: {e} vs {}",
                2.0 * z.abs()
            );
        }
    }

    #[test]
    fn eta_linear_system_is_infinite() {
        let lin = HomotopyPoly::new(vec![
            HMonomial::new(re(1.0), vec![1], 0),
            HMonomial::new(re(-1.0), vec![0], 1),
        ]);
        let h = Homotopy::new(1, vec![lin], false).unwrap();
        assert_eq!(eta(&h, &[re(0.3)], re(0.3)), f64::INFINITY);
    }

    #[test]
    fn eta_direct_formula_two_by_two() {
        // h1 = x1² + x1, h2 = x1² + x2 at the origin:
        // J = I, both Hessians are diag(2, 0), so η = 2·1/√8 = 1/√2.
        let p1 = HomotopyPoly::new(vec![
            HMonomial::new(re(1.0), vec![2, 0], 0),
            HMonomial::new(re(1.0), vec![1, 0], 0),
        ]);
        let p2 = HomotopyPoly::new(vec![
            HMonomial::new(re(1.0), vec![2, 0], 0),
            HMonomial::new(re(1.0), vec![0, 1], 0),
        ]);
        let h = Homotopy::new(2, vec![p1, p2], false).unwrap();
        let e = eta(&h, &[re(0.0), re(0.0)], Complex64::ZERO);
        assert!((e - 1.0 / 2.0f64.sqrt()).abs() < 1e-12, "{e}");
    }

    #[test]
    fn predict_linear_homotopy_takes_the_max_step() {
        let lin = HomotopyPoly::new(vec![
            HMonomial::new(re(1.0), vec![1], 0),
            HMonomial::new(re(-1.0), vec![0], 1),
        ]);
        let h = Homotopy::new(1, vec![lin], false).unwrap();
        let cfg = TrackerConfig::default();
        let pred = predict(&h, &[re(0.0)], 0.0, &cfg).unwrap();
        assert_eq!(pred.dt, 0.5);
        assert_eq!(pred.binding, StepBound::MaxStep);
        assert!((pred.z_tilde[0] - re(0.5)).norm() < 1e-14);
        assert_eq!(pred.dt2, f64::INFINITY);
        assert_eq!(pred.dt1, 1.0);
    }

    #[test]
    fn predict_hyperbola_budget() {
        let p = 0.1;
        let h = hyperbola(p);
        let cfg = TrackerConfig::default();
        let z0 = hyperbola_branch(p, 0.0, 1.0);
        let pred = predict(&h, &[re(z0)], 0.0, &cfg).unwrap();
        assert!(pred.dt > 0.0);
        // prediction error within the design budget β₁·η
        let truth = hyperbola_branch(p, pred.dt, 1.0);
        let err = (pred.z_tilde[0] - re(truth)).norm();
        assert!(
            err < cfg.beta1 * pred.eta,
            "prediction error {err} vs budget {}",
            cfg.beta1 * pred.eta
        );
        // the pole trust region binds here: Δt₂ = β₂|c₅/c₆| ≈ 0.268
        assert_eq!(pred.binding, StepBound::PoleDistance);
        assert!((pred.dt2 - pred.dt).abs() < 1e-12);
    }

    #[test]
    fn predict_shrinks_near_singularity() {
        let p = 1e-4;
        let h = hyperbola(p);
        let cfg = TrackerConfig::default();
        // Near t* = 0.5 the branch points 0.5 ± pi are a few thousandths
        // away, and the pole trust region must clamp the step accordingly.
        let t_star = 0.497;
        let z = hyperbola_branch(p, t_star, 1.0);
        let pred = predict(&h, &[re(z)], t_star, &cfg).unwrap();
        assert!(pred.dt < 1e-2, "dt = {}", pred.dt);
        assert!(pred.dt2 < 1e-2, "dt2 = {}", pred.dt2);
    }

    #[test]
    fn track_hyperbola_no_jump() {
        let p = 0.1;
        let h = hyperbola(p);
        let cfg = TrackerConfig::default();
        let root = hyperbola_branch(p, 0.0, 1.0);
        for sign in [1.0, -1.0] {
            let res = track_path(&h, &[re(sign * root)], &cfg);
            assert!(res.is_success(), "status {:?}", res.status);
            assert!(res.residual < 1e-12);
            assert_eq!(res.endpoint[0].re.signum(), sign);
            assert!((res.endpoint[0].re - sign * root).abs() < 1e-10);
        }
    }

    #[test]
    fn track_hyperbola_tiny_p_keeps_branches() {
        let p = 1e-7;
        let h = hyperbola(p);
        let cfg = TrackerConfig::default();
        let root = hyperbola_branch(p, 0.0, 1.0);
        for sign in [1.0, -1.0] {
            let res = track_path(&h, &[re(sign * root)], &cfg);
            assert!(res.is_success(), "status {:?}", res.status);
            assert_eq!(res.endpoint[0].re.signum(), sign, "jumped branch");
        }
    }

    #[test]
    fn constant_paths_of_start_equals_target() {
        // H = (1−t)G + γtG has constant solution paths {±1}.
        let g_poly = HomotopyPoly::new(vec![
            HMonomial::new(re(1.0), vec![2], 0),
            HMonomial::new(re(-1.0), vec![0], 0),
        ]);
        let g = Homotopy::new(1, vec![g_poly], false).unwrap();
        let gamma = Complex64::from_polar(1.0, 1.234);
        let h = blend_systems(&[
            (&g, &[Complex64::ONE, -Complex64::ONE]),
            (&g, &[Complex64::ZERO, gamma]),
        ])
        .unwrap();
        let cfg = TrackerConfig::default();
        for start in [re(1.0), re(-1.0)] {
            let res = track_path(&h, &[start], &cfg);
            assert!(res.is_success());
            assert!((res.endpoint[0] - start).norm() < 1e-10);
        }
    }

    #[test]
    fn track_all_matches_order_and_handles_empty() {
        let p = 0.1;
        let h = hyperbola(p);
        let cfg = TrackerConfig::default();
        let root = hyperbola_branch(p, 0.0, 1.0);
        let starts = vec![vec![re(root)], vec![re(-root)]];
        let results = track_all(&h, &starts, &cfg);
        assert_eq!(results.len(), 2);
        assert!(results[0].endpoint[0].re > 0.0);
        assert!(results[1].endpoint[0].re < 0.0);
        assert!(track_all(&h, &[], &cfg).is_empty());
    }

    #[test]
    fn total_degree_start_solutions() {
        // x² − 3: square roots of unity
        let f_poly = HomotopyPoly::new(vec![
            HMonomial::new(re(1.0), vec![2], 0),
            HMonomial::new(re(-3.0), vec![0], 0),
        ]);
        let f = Homotopy::new(1, vec![f_poly], false).unwrap();
        let set = total_degree_homotopy(&f, 0).unwrap();
        assert_eq!(set.starts.len(), 2);
        assert!((set.starts[0][0] - re(1.0)).norm() < 1e-15);
        assert!((set.starts[1][0] - re(-1.0)).norm() < 1e-14);
        assert!((set.gamma.norm() - 1.0).abs() < 1e-15);

        // degrees (2, 3) -> 6 starts
        let p1 = HomotopyPoly::new(vec![
            HMonomial::new(re(1.0), vec![2, 0], 0),
            HMonomial::new(re(-1.0), vec![0, 0], 0),
        ]);
        let p2 = HomotopyPoly::new(vec![
            HMonomial::new(re(1.0), vec![0, 3], 0),
            HMonomial::new(re(2.0), vec![0, 1], 0),
            HMonomial::new(re(-1.0), vec![0, 0], 0),
        ]);
        let f = Homotopy::new(2, vec![p1, p2], false).unwrap();
        let set = total_degree_homotopy(&f, 1).unwrap();
        assert_eq!(set.starts.len(), 6);

        // zero polynomial rejected
        let f = Homotopy::new(1, vec![HomotopyPoly::zero()], false).unwrap();
        assert_eq!(
            total_degree_homotopy(&f, 0).unwrap_err(),
            BuildError::ZeroPolynomial { poly: 0 }
        );
    }

    #[test]
    fn wilkinson_four_end_to_end() {
        // W4 = (x−1)(x−2)(x−3)(x−4) = x⁴ − 10x³ + 35x² − 50x + 24
        let w4 = HomotopyPoly::new(vec![
            HMonomial::new(re(1.0), vec![4], 0),
            HMonomial::new(re(-10.0), vec![3], 0),
            HMonomial::new(re(35.0), vec![2], 0),
            HMonomial::new(re(-50.0), vec![1], 0),
            HMonomial::new(re(24.0), vec![0], 0),
        ]);
        let f = Homotopy::new(1, vec![w4], false).unwrap();
        let mut set = total_degree_homotopy(&f, 42).unwrap();
        set.track(&TrackerConfig::default());
        assert_eq!(set.results.len(), 4);
        for r in &set.results {
            assert!(r.is_success(), "status {:?}", r.status);
        }
        for root in [1.0, 2.0, 3.0, 4.0] {
            let found = set
                .results
                .iter()
                .any(|r| (r.endpoint[0] - re(root)).norm() < 1e-6);
            assert!(found, "missing root {root}");
        }
        assert_eq!(count_distinct_solutions(&set.results, 1e-6, 1e-9), 4);
    }

    #[test]
    fn double_root_target_flags_singularity() {
        // (x−1)² from x²−1: the paths merge at t = 1. The path that rides
        // the exact root x = 1 hits an exactly singular Jacobian.
        let f_poly = HomotopyPoly::new(vec![
            HMonomial::new(re(1.0), vec![2], 0),
            HMonomial::new(re(-2.0), vec![1], 0),
            HMonomial::new(re(1.0), vec![0], 0),
        ]);
        let f = Homotopy::new(1, vec![f_poly], false).unwrap();
        let mut set = total_degree_homotopy(&f, 7).unwrap();
        set.track(&TrackerConfig::default());
        assert_eq!(set.results.len(), 2);
        // Both paths end at the double root and both get flagged: the
        // endpoint Jacobian is zero to working precision.
        for r in &set.results {
            assert!(
                (r.endpoint[0] - re(1.0)).norm() < 1e-5,
                "endpoint {}",
                r.endpoint[0]
            );
            assert_eq!(r.status, PathStatus::SingularEndpoint);
        }
        // Deduplication sees a single solution: one failure by the e-count.
        assert_eq!(count_distinct_solutions(&set.results, 1e-6, 1e-9), 1);
    }

    #[test]
    fn stepsize_shrinks_with_difficulty() {
        let cfg = TrackerConfig::default();
        let mut last_min = f64::INFINITY;
        for &p in &[1e-1, 1e-3, 1e-5] {
            let h = hyperbola(p);
            let root = hyperbola_branch(p, 0.0, 1.0);
            let res = track_path(&h, &[re(root)], &cfg);
            assert!(res.is_success());
            assert!(
                res.min_dt <= last_min,
                "p={p}: min_dt {} > previous {last_min}",
                res.min_dt
            );
            last_min = res.min_dt;
        }
    }

    #[test]
    fn wider_denominator_type_tracks_conjugate_pair() {
        // With two denominator roots available the approximant can hold
        // both branch points 1/2 ± p i at once; tracking must still work.
        let p = 0.05;
        let h = hyperbola(p);
        let cfg = TrackerConfig {
            l_degree: 6,
            m_degree: 2,
            ..TrackerConfig::default()
        };
        let root = hyperbola_branch(p, 0.0, 1.0);
        for sign in [1.0, -1.0] {
            let res = track_path(&h, &[re(sign * root)], &cfg);
            assert!(res.is_success(), "status {:?}", res.status);
            assert_eq!(res.endpoint[0].re.signum(), sign);
            assert!((res.endpoint[0].re - sign * root).abs() < 1e-9);
        }
    }

    #[test]
    fn exactly_polynomial_paths_survive_near_collision() {
        // H = x² − (t − c)⁴ with c = 1/2 + b i: the two solution branches
        // ±(t − c)² are entire (no branch points at all), yet they pass
        // within 2b² of each other at t = 1/2. The series prediction is
        // exact here, so large steps stay safe.
        let b = 1e-3;
        let c = Complex64::new(0.5, b);
        // -(t-c)^4 expanded: coefficients of t^i are -C(4,i)(-c)^{4-i}.
        let mut monos = vec![HMonomial::new(re(1.0), vec![2], 0)];
        let binom = [1.0, 4.0, 6.0, 4.0, 1.0];
        for (i, &bc) in binom.iter().enumerate() {
            let coeff = -(bc * (-c).powu((4 - i) as u32));
            monos.push(HMonomial::new(coeff, vec![0], i as u32));
        }
        let h = Homotopy::new(1, vec![HomotopyPoly::new(monos)], false).unwrap();
        let cfg = TrackerConfig::default();
        for sign in [1.0, -1.0] {
            let start = re(sign) * c * c; // ±(0 − c)²
            let res = track_path(&h, &[start], &cfg);
            assert!(res.is_success(), "status {:?}", res.status);
            let expect = re(sign) * (re(1.0) - c) * (re(1.0) - c);
            assert!(
                (res.endpoint[0] - expect).norm() < 1e-9,
                "endpoint {} vs {expect}",
                res.endpoint[0]
            );
        }
    }

    #[test]
    fn same_solution_tolerance() {
        let a = vec![re(1.0), re(2.0)];
        let b = vec![re(1.0 + 5e-7), re(2.0 - 5e-7)];
        let c = vec![re(1.01), re(2.0)];
        assert!(same_solution(&a, &b, 1e-6));
        assert!(!same_solution(&a, &c, 1e-6));
    }
}
