//! Truncated complex power series: the quotient ring `ℂ[[t]]/tʷ`.
//!
//! A [`TruncatedSeries`] stores the coefficients `c₀ … c_{w−1}`; all binary
//! operations require both operands to share the truncation order `w`.
//! Vectors and matrices of series share one `w` across their entries.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::algebra::{ComplexMatrix, ComplexVector};

/// Numerical replacement for the exact-arithmetic notion of a zero
/// coefficient: entries with modulus at most `1e-14 · (1 + max |cᵢ|)` do not
/// count toward the order of a series.
pub fn order_threshold(max_abs: f64) -> f64 {
    1e-14 * (1.0 + max_abs)
}

/// Power series truncated at order `w ≥ 1` (coefficients `c₀ … c_{w−1}`).
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<Complex64>,
}

impl TruncatedSeries {
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "truncation order must be at least 1");
        TruncatedSeries { coeffs }
    }

    pub fn zero(w: usize) -> Self {
        assert!(w >= 1);
        TruncatedSeries {
            coeffs: vec![Complex64::ZERO; w],
        }
    }

    pub fn constant(c: Complex64, w: usize) -> Self {
        let mut s = Self::zero(w);
        s.coeffs[0] = c;
        s
    }

    /// Truncation order `w`.
    pub fn w(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `t^l` (zero for `l ≥ w`).
    pub fn coeff(&self, l: usize) -> Complex64 {
        self.coeffs.get(l).copied().unwrap_or(Complex64::ZERO)
    }

    pub fn set_coeff(&mut self, l: usize, c: Complex64) {
        assert!(l < self.w(), "coefficient index beyond truncation order");
        self.coeffs[l] = c;
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.w(), other.w(), "mismatched truncation orders");
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(other.coeffs.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.w(), other.w(), "mismatched truncation orders");
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(other.coeffs.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, lambda: Complex64) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|a| a * lambda).collect(),
        }
    }

    /// Cauchy product truncated at `w` (schoolbook; `w` stays small here).
    pub fn mul(&self, other: &Self) -> Self {
        let w = self.w();
        assert_eq!(w, other.w(), "mismatched truncation orders");
        let mut out = vec![Complex64::ZERO; w];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == Complex64::ZERO {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if i + j >= w {
                    break;
                }
                out[i + j] += a * b;
            }
        }
        TruncatedSeries { coeffs: out }
    }

    /// Drops coefficients of index `≥ w2`.
    pub fn truncate(&self, w2: usize) -> Self {
        assert!(w2 >= 1 && w2 <= self.w(), "invalid truncation order");
        TruncatedSeries {
            coeffs: self.coeffs[..w2].to_vec(),
        }
    }

    /// Extends with zero coefficients up to order `w2 ≥ w`.
    pub fn pad(&self, w2: usize) -> Self {
        assert!(w2 >= self.w());
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(w2, Complex64::ZERO);
        TruncatedSeries { coeffs }
    }

    /// Smallest index with a coefficient above the numerical threshold;
    /// `None` encodes an (effectively) zero series, i.e. order +∞.
    pub fn order(&self) -> Option<usize> {
        let max_abs = self.max_abs();
        let tau = order_threshold(max_abs);
        self.coeffs.iter().position(|c| c.norm() > tau)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Horner evaluation at a point.
    pub fn eval(&self, t: Complex64) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    /// Multiplication by `t^k` inside the quotient ring: shifts coefficients
    /// up, dropping whatever passes the truncation order.
    pub(crate) fn mul_t_power(&self, k: usize) -> Self {
        let w = self.w();
        let mut out = vec![Complex64::ZERO; w];
        for l in 0..w.saturating_sub(k) {
            out[l + k] = self.coeffs[l];
        }
        TruncatedSeries { coeffs: out }
    }

    /// Reciprocal of a unit series (nonzero constant coefficient).
    pub(crate) fn recip(&self) -> Option<Self> {
        let w = self.w();
        if self.coeffs[0] == Complex64::ZERO {
            return None;
        }
        let inv0 = Complex64::ONE / self.coeffs[0];
        let mut out = vec![Complex64::ZERO; w];
        out[0] = inv0;
        for k in 1..w {
            let mut acc = Complex64::ZERO;
            for j in 1..=k {
                acc += self.coeffs[j] * out[k - j];
            }
            out[k] = -inv0 * acc;
        }
        Some(TruncatedSeries { coeffs: out })
    }
}

/// Vector of `n` truncated series sharing one truncation order.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesVector {
    comps: Vec<TruncatedSeries>,
}

impl SeriesVector {
    pub fn new(comps: Vec<TruncatedSeries>) -> Self {
        assert!(
            !comps.is_empty(),
            "series vector must have at least one component"
        );
        let w = comps[0].w();
        assert!(
            comps.iter().all(|s| s.w() == w),
            "mismatched truncation orders"
        );
        SeriesVector { comps }
    }

    /// Constant series vector from a point.
    pub fn constant(z: &[Complex64], w: usize) -> Self {
        Self::new(z.iter().map(|&c| TruncatedSeries::constant(c, w)).collect())
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn w(&self) -> usize {
        self.comps[0].w()
    }

    pub fn component(&self, j: usize) -> &TruncatedSeries {
        &self.comps[j]
    }

    pub fn components(&self) -> &[TruncatedSeries] {
        &self.comps
    }

    pub fn component_mut(&mut self, j: usize) -> &mut TruncatedSeries {
        &mut self.comps[j]
    }

    /// The degree-`l` coefficient of every component, as a point vector.
    pub fn coefficient_vector(&self, l: usize) -> ComplexVector {
        self.comps.iter().map(|s| s.coeff(l)).collect()
    }

    /// Constant coefficients, i.e. the underlying point `x(0)`.
    pub fn constant_term(&self) -> ComplexVector {
        self.coefficient_vector(0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len());
        Self::new(
            self.comps
                .iter()
                .zip(other.comps.iter())
                .map(|(a, b)| a.sub(b))
                .collect(),
        )
    }

    /// Minimum component order; `None` is the +∞ sentinel.
    pub fn order(&self) -> Option<usize> {
        self.comps.iter().filter_map(|s| s.order()).min()
    }

    pub fn truncate(&self, w2: usize) -> Self {
        Self::new(self.comps.iter().map(|s| s.truncate(w2)).collect())
    }

    pub fn pad(&self, w2: usize) -> Self {
        Self::new(self.comps.iter().map(|s| s.pad(w2)).collect())
    }

    pub fn eval(&self, t: Complex64) -> ComplexVector {
        self.comps.iter().map(|s| s.eval(t)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().map(|s| s.max_abs()).fold(0.0, f64::max)
    }
}

/// Square matrix of truncated series sharing one truncation order.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMatrix {
    n: usize,
    entries: Vec<TruncatedSeries>,
}

impl SeriesMatrix {
    /// Row-major entries of an n×n matrix.
    pub fn new(n: usize, entries: Vec<TruncatedSeries>) -> Self {
        assert!(n >= 1);
        assert_eq!(entries.len(), n * n, "entry count mismatch");
        let w = entries[0].w();
        assert!(
            entries.iter().all(|s| s.w() == w),
            "mismatched truncation orders"
        );
        SeriesMatrix { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w(&self) -> usize {
        self.entries[0].w()
    }

    pub fn entry(&self, i: usize, j: usize) -> &TruncatedSeries {
        &self.entries[i * self.n + j]
    }

    /// The degree-`l` coefficient of every entry, as a point matrix.
    pub fn coefficient_matrix(&self, l: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = self.entry(i, j).coeff(l);
            }
        }
        m
    }
}
