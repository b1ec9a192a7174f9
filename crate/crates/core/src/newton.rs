//! Newton iterations: series-valued lifting and the point corrector.
//!
//! [`compute_series`] lifts a path point to a truncated power-series
//! solution of `H(x, t + t*) = 0` with error order doubling every
//! iteration, and [`correct`] is the plain Newton refinement used after
//! every predictor step.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::algebra::{vec_norm, ComplexMatrix, ComplexVector, LuFactors};
use crate::polysys::{DomainError, Homotopy};
use crate::series::SeriesVector;
use crate::tracker::residual_at;

/// A constant start must satisfy `H(z0, t*) ≈ 0` at least this well;
/// the predictor always provides a corrected point.
pub const INVALID_START_RESIDUAL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeriesSolveError {
    /// The constant Jacobian coefficient `J₀` is numerically singular.
    SingularJacobian,
    /// The start point is not a solution to working precision.
    InvalidStart { residual: f64 },
    /// Evaluation failed (toric domain violations).
    Domain(DomainError),
}

impl fmt::Display for SeriesSolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesSolveError::SingularJacobian => {
                write!(f, "singular Jacobian in series Newton step")
            }
            SeriesSolveError::InvalidStart { residual } => {
                write!(f, "start point is not a solution (residual {residual:.3e})")
            }
            SeriesSolveError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SeriesSolveError {}

/// Result of the series Newton iteration.
#[derive(Debug, Clone)]
pub struct SeriesSolveReport {
    /// The local series solution `x(t)` around `t = t*` (so `x(0) = z0`).
    pub series: SeriesVector,
    pub iterations: usize,
    /// Order of the Newton update per iteration; `None` means the update
    /// vanished to working precision.
    pub update_orders: Vec<Option<usize>>,
    /// Truncation order reached (equals the requested `w`).
    pub achieved_order: usize,
}

/// Computes the power-series solution of `H(x, t) = 0` through the point
/// `z0` at `t = t*`, truncated at order `w`.
///
/// The truncation schedule is `w_k = min(2^k, w)`, so `⌈log₂ w⌉` Newton
/// steps suffice; each step factors the constant Jacobian coefficient once
/// and obtains the new update coefficients degree by degree through the
/// lower-triangular block Toeplitz system.
pub fn compute_series(
    h: &Homotopy,
    t_star: Complex64,
    w: usize,
    z0: &[Complex64],
) -> Result<SeriesSolveReport, SeriesSolveError> {
    assert!(w >= 1, "truncation order must be positive");
    assert_eq!(z0.len(), h.n(), "start point dimension mismatch");
    let start_residual = residual_at(h, z0, t_star);
    if !(start_residual <= INVALID_START_RESIDUAL) {
        return Err(SeriesSolveError::InvalidStart {
            residual: start_residual,
        });
    }
    let g = h.shift(t_star);
    let mut xs = SeriesVector::constant(z0, 1);
    let mut update_orders = Vec::new();
    let mut iterations = 0;
    // With a constant start the error has order ≥ 1, so degrees below the
    // previous truncation are already exact and stay untouched.
    while xs.w() < w {
        let w_next = (2 * xs.w()).min(w);
        let (next, ord) = banded_newton_step(&g, &xs, xs.w(), w_next)?;
        xs = next;
        update_orders.push(ord);
        iterations += 1;
    }
    Ok(SeriesSolveReport {
        series: xs,
        iterations,
        update_orders,
        achieved_order: w,
    })
}

/// One Newton step on series: `x ← x − J_H(x(t), t)⁻¹ H(x(t), t)` truncated
/// at `w_next`, solving for all update degrees. `g` must already be shifted
/// so that the expansion point is `t = 0`.
pub fn series_newton_step(
    g: &Homotopy,
    xs: &SeriesVector,
    w_next: usize,
) -> Result<SeriesVector, SeriesSolveError> {
    banded_newton_step(g, xs, 0, w_next).map(|(s, _)| s)
}

/// Shared implementation: solves the block lower-triangular system for the
/// update degrees `lo … w_next−1`, taking `d_ℓ = 0` for `ℓ < lo`.
fn banded_newton_step(
    g: &Homotopy,
    xs: &SeriesVector,
    lo: usize,
    w_next: usize,
) -> Result<(SeriesVector, Option<usize>), SeriesSolveError> {
    let n = g.n();
    let padded = if xs.w() < w_next {
        xs.pad(w_next)
    } else {
        xs.truncate(w_next)
    };
    let (hs, js) = g
        .evaluate_with_jacobian_series(&padded, w_next)
        .map_err(SeriesSolveError::Domain)?;
    let j_coeff: Vec<ComplexMatrix> = (0..w_next).map(|l| js.coefficient_matrix(l)).collect();
    let lu = LuFactors::new(&j_coeff[0]).map_err(|_| SeriesSolveError::SingularJacobian)?;

    let mut d: Vec<ComplexVector> = vec![vec![Complex64::ZERO; n]; w_next];
    for l in lo..w_next {
        let mut rhs: ComplexVector = hs.coefficient_vector(l).iter().map(|v| -v).collect();
        for m in lo..l {
            let prod = j_coeff[l - m].mul_vec(&d[m]);
            for i in 0..n {
                rhs[i] -= prod[i];
            }
        }
        d[l] = lu.solve_vec(&rhs);
    }

    let mut out = padded;
    for l in lo..w_next {
        for j in 0..n {
            let v = out.component(j).coeff(l) + d[l][j];
            out.component_mut(j).set_coeff(l, v);
        }
    }
    let update = SeriesVector::new(
        (0..n)
            .map(|j| {
                crate::series::TruncatedSeries::from_coeffs((0..w_next).map(|l| d[l][j]).collect())
            })
            .collect(),
    );
    Ok((out, update.order()))
}

/// Outcome of the point corrector.
#[derive(Debug, Clone)]
pub struct CorrectorReport {
    pub point: ComplexVector,
    pub converged: bool,
    /// Set when a singular Jacobian stopped the iteration.
    pub singular: bool,
    pub iterations: usize,
    /// Norm of the last Newton update (0 when no step was taken).
    pub update_norm: f64,
    /// Scale-invariant residual at the final point.
    pub residual: f64,
}

/// Newton refinement of `z̃` as a solution of `H(·, t) = 0`.
///
/// Converges when the residual drops to `tol` or the update norm falls
/// below `tol · (1 + ‖z‖)`; gives up after `max_iters` steps, on a singular
/// Jacobian, or when the update norm grows tenfold twice.
pub fn correct(
    h: &Homotopy,
    z_tilde: &[Complex64],
    t: Complex64,
    tol: f64,
    max_iters: usize,
) -> CorrectorReport {
    assert_eq!(z_tilde.len(), h.n(), "point dimension mismatch");
    let mut z = z_tilde.to_vec();
    let mut iterations = 0;
    let mut update_norm = 0.0;
    let mut prev_update = f64::INFINITY;
    let mut growths = 0;
    let mut singular = false;
    let mut converged = false;
    loop {
        let r = residual_at(h, &z, t);
        if r <= tol {
            converged = true;
            break;
        }
        if iterations >= max_iters {
            break;
        }
        let (hv, jm) = match h.evaluate_with_jacobian(&z, t) {
            Ok(v) => v,
            Err(_) => break,
        };
        let lu = match LuFactors::new(&jm) {
            Ok(l) => l,
            Err(_) => {
                singular = true;
                break;
            }
        };
        let rhs: ComplexVector = hv.iter().map(|v| -v).collect();
        let d = lu.solve_vec(&rhs);
        for (zi, di) in z.iter_mut().zip(d.iter()) {
            *zi += di;
        }
        iterations += 1;
        update_norm = vec_norm(&d);
        if !update_norm.is_finite() {
            break;
        }
        if update_norm <= tol * (1.0 + vec_norm(&z)) {
            converged = true;
            break;
        }
        if update_norm > 10.0 * prev_update {
            growths += 1;
            if growths >= 2 {
                break;
            }
        }
        prev_update = update_norm;
    }
    let residual = residual_at(h, &z, t);
    CorrectorReport {
        point: z,
        converged,
        singular,
        iterations,
        update_norm,
        residual,
    }
}
