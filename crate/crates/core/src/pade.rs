//! Padé approximants from truncated series coefficients.
//!
//! Per coordinate the tracker fits a type `(L, M)` rational approximant,
//! extracts the leading coefficient `e₀` of the approximation defect, and
//! collects the distance `D` to the nearest denominator root. Degenerate
//! Toeplitz systems fall back to a smaller denominator degree instead of
//! producing spurious poles.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::algebra::{lu_solve, poly_roots, singular_values, ComplexMatrix, ComplexVector};
use crate::series::SeriesVector;

/// Poles beyond this modulus are numerical artifacts and do not count
/// toward the pole distance.
pub const POLE_MODULUS_CAP: f64 = 1e6;

/// Relative singular-value cutoff that triggers the denominator-degree
/// fallback when fitting.
const TOEPLITZ_CUTOFF: f64 = 1e-10;

/// A rational approximant `p(t)/q(t)` with `deg p ≤ L`, `deg q ≤ M` and
/// `q(0) = 1`. The stored denominator may be shorter than `M + 1` when the
/// robustness fallback reduced its degree.
#[derive(Debug, Clone, PartialEq)]
pub struct PadeApproximant {
    num: Vec<Complex64>,
    den: Vec<Complex64>,
    l_degree: usize,
    m_degree: usize,
}

impl PadeApproximant {
    /// Numerator coefficients `a₀ … a_L`.
    pub fn numerator(&self) -> &[Complex64] {
        &self.num
    }

    /// Denominator coefficients `b₀ = 1, b₁ … `; may be shorter than the
    /// requested `M + 1` after the degeneracy fallback.
    pub fn denominator(&self) -> &[Complex64] {
        &self.den
    }

    /// Requested numerator degree `L`.
    pub fn l_degree(&self) -> usize {
        self.l_degree
    }

    /// Requested denominator degree `M`.
    pub fn m_degree(&self) -> usize {
        self.m_degree
    }

    /// Denominator coefficient `b_j` (zero beyond the stored degree).
    pub fn den_coeff(&self, j: usize) -> Complex64 {
        self.den.get(j).copied().unwrap_or(Complex64::ZERO)
    }

    /// Poles: roots of the denominator (empty when it is constant).
    pub fn poles(&self) -> Vec<Complex64> {
        poly_roots(&self.den)
    }
}

/// Error from evaluating an approximant on top of one of its poles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoleEvaluationError;

impl fmt::Display for PoleEvaluationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Padé denominator vanishes at the evaluation point")
    }
}

impl core::error::Error for PoleEvaluationError {}

/// Fits the type `(L, M)` Padé approximant to the coefficients
/// `c₀ … c_{L+M}` (more may be supplied).
///
/// The denominator solves the M×M Toeplitz system
/// `Σ_j b_j c_{L+i−j} = −c_{L+i}`; when that system is degenerate (rank
/// deficient relative to its largest singular value, or consisting only of
/// numerically-zero coefficients) the fit retries with `M − 1`, down to a
/// truncated Taylor numerator at `M = 0`. The numerator follows by
/// convolution.
pub fn pade_fit(c: &[Complex64], l: usize, m: usize) -> PadeApproximant {
    assert!(
        c.len() >= l + m + 1,
        "need at least L+M+1 series coefficients"
    );
    let den = solve_denominator(c, l, m);
    let mut num = Vec::with_capacity(l + 1);
    for ell in 0..=l {
        let mut a = Complex64::ZERO;
        for (j, &b) in den.iter().enumerate().take(ell + 1) {
            a += b * c[ell - j];
        }
        num.push(a);
    }
    PadeApproximant {
        num,
        den,
        l_degree: l,
        m_degree: m,
    }
}

fn solve_denominator(c: &[Complex64], l: usize, m: usize) -> Vec<Complex64> {
    let coeff = |idx: isize| -> Complex64 {
        if idx < 0 {
            Complex64::ZERO
        } else {
            c[idx as usize]
        }
    };
    let mut m_cur = m;
    while m_cur >= 1 {
        let scale = (0..=(l + m_cur)).map(|i| c[i].norm()).fold(0.0, f64::max);
        let mut t = ComplexMatrix::zeros(m_cur, m_cur);
        let mut rhs: ComplexVector = vec![Complex64::ZERO; m_cur];
        for i in 0..m_cur {
            for j in 0..m_cur {
                t[(i, j)] = coeff(l as isize + i as isize - j as isize);
            }
            rhs[i] = -c[l + i + 1];
        }
        // Degenerate when the system is relatively rank-deficient, or when
        // the whole matrix sits below the numerical order threshold of the
        // series (an exactly terminating expansion). Comparing against the
        // series scale directly would be wrong: legitimately tiny tails
        // still carry meaningful coefficient ratios.
        let degenerate = match singular_values(&t) {
            Ok(sv) => {
                let hi = sv[0];
                let lo = sv[m_cur - 1];
                hi <= crate::series::order_threshold(scale) || lo <= TOEPLITZ_CUTOFF * hi
            }
            Err(_) => true,
        };
        if !degenerate {
            if let Ok(tail) = lu_solve(&t, &rhs) {
                let mut den = Vec::with_capacity(m_cur + 1);
                den.push(Complex64::ONE);
                den.extend(tail);
                return den;
            }
        }
        m_cur -= 1;
    }
    vec![Complex64::ONE]
}

/// Leading defect coefficient `e₀ = a_k − (c_k + b₁c_{k−1} + … + b_Mc_{k−M})`
/// at `k = L + M + 1` (so `a_k = 0`); `c_j = 0` for `j < 0`.
pub fn error_coefficient(c: &[Complex64], p: &PadeApproximant) -> Complex64 {
    let k = p.l_degree + p.m_degree + 1;
    assert!(
        c.len() >= k + 1,
        "need series coefficients through index L+M+1"
    );
    let mut acc = c[k];
    for j in 1..=p.m_degree {
        if j <= k {
            acc += p.den_coeff(j) * c[k - j];
        }
    }
    -acc
}

/// Smallest pole modulus over a family of approximants; `+∞` when every
/// denominator is constant. Poles with modulus above [`POLE_MODULUS_CAP`]
/// are ignored as numerical artifacts.
pub fn pole_distance(approximants: &[PadeApproximant]) -> f64 {
    let mut d = f64::INFINITY;
    for p in approximants {
        for root in p.poles() {
            let modulus = root.norm();
            if modulus <= POLE_MODULUS_CAP {
                d = d.min(modulus);
            }
        }
    }
    d
}

/// Horner evaluation of `p(dt)/q(dt)`.
pub fn pade_eval(p: &PadeApproximant, dt: Complex64) -> Result<Complex64, PoleEvaluationError> {
    let horner = |coeffs: &[Complex64]| {
        let mut acc = Complex64::ZERO;
        for &c in coeffs.iter().rev() {
            acc = acc * dt + c;
        }
        acc
    };
    let q = horner(&p.den);
    if q.norm() < 1e-300 {
        return Err(PoleEvaluationError);
    }
    Ok(horner(&p.num) / q)
}

/// Per-coordinate approximants of a series solution plus the quantities the
/// predictor consumes.
#[derive(Debug, Clone)]
pub struct PadeBundle {
    pub approximants: Vec<PadeApproximant>,
    /// Error coefficients `e₀ⱼ`, one per coordinate.
    pub e0: Vec<Complex64>,
    /// Distance to the nearest pole over all coordinates.
    pub pole_distance: f64,
    /// Generic defect order `k = L + M + 1`.
    pub defect_order: usize,
}

impl PadeBundle {
    /// Fits all coordinates of a series solution. Requires the series to
    /// carry at least `L + M + 2` coefficients (for the defect coefficient).
    pub fn fit(series: &SeriesVector, l: usize, m: usize) -> Self {
        assert!(
            series.w() >= l + m + 2,
            "series too short for (L,M) fit with defect"
        );
        let mut approximants = Vec::with_capacity(series.len());
        let mut e0 = Vec::with_capacity(series.len());
        for j in 0..series.len() {
            let c = series.component(j).coeffs();
            let p = pade_fit(c, l, m);
            e0.push(error_coefficient(c, &p));
            approximants.push(p);
        }
        let pole_distance = pole_distance(&approximants);
        PadeBundle {
            approximants,
            e0,
            pole_distance,
            defect_order: l + m + 1,
        }
    }

    /// Predicted point: every coordinate evaluated at `dt`.
    pub fn eval(&self, dt: Complex64) -> Result<ComplexVector, PoleEvaluationError> {
        self.approximants.iter().map(|p| pade_eval(p, dt)).collect()
    }
}
