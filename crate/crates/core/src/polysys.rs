//! Square Laurent polynomial homotopies `H(x, t)` and their derivatives.
//!
//! A homotopy is stored as a sparse list of monomials `c · x^q · t^k` per
//! equation, with exact integer exponents. Differentiation is symbolic on
//! the exponents, so Jacobians and Hessians are exact up to the final
//! numeric evaluation. Evaluation is supported both at complex points and
//! at truncated power series arguments.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::algebra::{ComplexMatrix, ComplexVector};
use crate::series::{SeriesMatrix, SeriesVector, TruncatedSeries};

/// A single term `c · x^q · t^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct HMonomial {
    pub coeff: Complex64,
    /// One exponent per variable; negative values only in toric systems.
    pub x_exponents: Vec<i32>,
    pub t_degree: u32,
}

impl HMonomial {
    pub fn new(coeff: Complex64, x_exponents: Vec<i32>, t_degree: u32) -> Self {
        HMonomial {
            coeff,
            x_exponents,
            t_degree,
        }
    }
}

/// One equation of a homotopy: a merged, deduplicated monomial list.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HomotopyPoly {
    monomials: Vec<HMonomial>,
}

impl HomotopyPoly {
    /// Merges duplicate `(q, k)` keys by coefficient addition and drops
    /// terms whose merged coefficient is exactly zero.
    pub fn new(mut monomials: Vec<HMonomial>) -> Self {
        monomials.sort_by(|a, b| {
            a.x_exponents
                .cmp(&b.x_exponents)
                .then(a.t_degree.cmp(&b.t_degree))
        });
        let mut merged: Vec<HMonomial> = Vec::with_capacity(monomials.len());
        for m in monomials {
            match merged.last_mut() {
                Some(last) if last.x_exponents == m.x_exponents && last.t_degree == m.t_degree => {
                    last.coeff += m.coeff;
                }
                _ => merged.push(m),
            }
        }
        merged.retain(|m| m.coeff != Complex64::ZERO);
        HomotopyPoly { monomials: merged }
    }

    pub fn zero() -> Self {
        HomotopyPoly {
            monomials: Vec::new(),
        }
    }

    pub fn monomials(&self) -> &[HMonomial] {
        &self.monomials
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Maximum total degree in the x-variables (negative exponents do not
    /// contribute), ignoring the t-degree.
    pub fn total_degree(&self) -> u32 {
        self.monomials
            .iter()
            .map(|m| m.x_exponents.iter().map(|&e| e.max(0) as u32).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn max_t_degree(&self) -> u32 {
        self.monomials.iter().map(|m| m.t_degree).max().unwrap_or(0)
    }

    /// Symbolic partial derivative with respect to variable `j`.
    pub fn differentiate(&self, j: usize) -> HomotopyPoly {
        let mut out = Vec::new();
        for m in &self.monomials {
            let e = m.x_exponents[j];
            if e == 0 {
                continue;
            }
            let mut q = m.x_exponents.clone();
            q[j] = e - 1;
            out.push(HMonomial::new(m.coeff * (e as f64), q, m.t_degree));
        }
        HomotopyPoly::new(out)
    }

    /// Largest coefficient modulus.
    pub fn max_coeff_abs(&self) -> f64 {
        self.monomials
            .iter()
            .map(|m| m.coeff.norm())
            .fold(0.0, f64::max)
    }
}

/// Validation errors when assembling a homotopy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemError {
    /// Number of polynomials differs from the number of variables.
    NotSquare {
        variables: usize,
        polynomials: usize,
    },
    /// An exponent vector has the wrong length.
    ExponentLength { poly: usize },
    /// Negative exponent in a system not flagged toric.
    NegativeExponent { poly: usize },
    /// NaN or infinite coefficient.
    NonFiniteCoefficient { poly: usize },
}

impl fmt::Display for SystemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemError::NotSquare {
                variables,
                polynomials,
            } => write!(
                f,
                "system is not square: {variables} variables but {polynomials} polynomials"
            ),
            SystemError::ExponentLength { poly } => {
                write!(f, "polynomial {poly}: exponent vector length mismatch")
            }
            SystemError::NegativeExponent { poly } => {
                write!(
                    f,
                    "polynomial {poly}: negative exponent in a non-toric system"
                )
            }
            SystemError::NonFiniteCoefficient { poly } => {
                write!(f, "polynomial {poly}: non-finite coefficient")
            }
        }
    }
}

impl core::error::Error for SystemError {}

/// Domain errors during evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainError {
    /// Toric system evaluated at a point with a zero coordinate.
    OffTorus,
    /// Negative exponent applied to a series with zero constant term.
    SeriesNotUnit,
}

impl fmt::Display for DomainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainError::OffTorus => write!(f, "toric system evaluated at a zero coordinate"),
            DomainError::SeriesNotUnit => {
                write!(
                    f,
                    "negative exponent applied to a series with zero constant term"
                )
            }
        }
    }
}

impl core::error::Error for DomainError {}

/// A square homotopy `H : X × ℂ → ℂⁿ`. The Jacobian polynomials
/// `∂hᵢ/∂xⱼ` are derived symbolically on construction.
#[derive(Debug, Clone)]
pub struct Homotopy {
    n: usize,
    polys: Vec<HomotopyPoly>,
    toric: bool,
    /// Row-major n×n: `jac[i*n + j] = ∂hᵢ/∂xⱼ`.
    jac: Vec<HomotopyPoly>,
}

impl Homotopy {
    pub fn new(n: usize, polys: Vec<HomotopyPoly>, toric: bool) -> Result<Self, SystemError> {
        assert!(n >= 1, "homotopy needs at least one variable");
        if polys.len() != n {
            return Err(SystemError::NotSquare {
                variables: n,
                polynomials: polys.len(),
            });
        }
        for (i, p) in polys.iter().enumerate() {
            for m in p.monomials() {
                if m.x_exponents.len() != n {
                    return Err(SystemError::ExponentLength { poly: i });
                }
                if !toric && m.x_exponents.iter().any(|&e| e < 0) {
                    return Err(SystemError::NegativeExponent { poly: i });
                }
                if !m.coeff.re.is_finite() || !m.coeff.im.is_finite() {
                    return Err(SystemError::NonFiniteCoefficient { poly: i });
                }
            }
        }
        let jac = derive_jacobian(n, &polys);
        Ok(Homotopy {
            n,
            polys,
            toric,
            jac,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn polys(&self) -> &[HomotopyPoly] {
        &self.polys
    }

    pub fn poly(&self, i: usize) -> &HomotopyPoly {
        &self.polys[i]
    }

    pub fn is_toric(&self) -> bool {
        self.toric
    }

    /// True when no monomial carries a positive t-degree, i.e. the homotopy
    /// is a plain polynomial system.
    pub fn is_t_free(&self) -> bool {
        self.polys.iter().all(|p| p.max_t_degree() == 0)
    }

    pub fn max_coeff_abs(&self) -> f64 {
        self.polys
            .iter()
            .map(|p| p.max_coeff_abs())
            .fold(0.0, f64::max)
    }

    /// `H(x, t)`.
    pub fn evaluate(&self, x: &[Complex64], t: Complex64) -> Result<ComplexVector, DomainError> {
        assert_eq!(x.len(), self.n, "point dimension mismatch");
        self.check_torus(x)?;
        let polys: Vec<&HomotopyPoly> = self.polys.iter().collect();
        let ctx = PointCtx::build(self.n, &polys, x, t)?;
        Ok(self.polys.iter().map(|p| ctx.eval(p)).collect())
    }

    /// `J_H(x, t) = (∂hᵢ/∂xⱼ)`.
    pub fn jacobian(&self, x: &[Complex64], t: Complex64) -> Result<ComplexMatrix, DomainError> {
        assert_eq!(x.len(), self.n, "point dimension mismatch");
        self.check_torus(x)?;
        let polys: Vec<&HomotopyPoly> = self.jac.iter().collect();
        let ctx = PointCtx::build(self.n, &polys, x, t)?;
        let mut m = ComplexMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = ctx.eval(&self.jac[i * self.n + j]);
            }
        }
        Ok(m)
    }

    /// `H` and `J_H` at once, sharing the power tables.
    pub fn evaluate_with_jacobian(
        &self,
        x: &[Complex64],
        t: Complex64,
    ) -> Result<(ComplexVector, ComplexMatrix), DomainError> {
        assert_eq!(x.len(), self.n, "point dimension mismatch");
        self.check_torus(x)?;
        let polys: Vec<&HomotopyPoly> = self.polys.iter().chain(self.jac.iter()).collect();
        let ctx = PointCtx::build(self.n, &polys, x, t)?;
        let h = self.polys.iter().map(|p| ctx.eval(p)).collect();
        let mut m = ComplexMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = ctx.eval(&self.jac[i * self.n + j]);
            }
        }
        Ok((h, m))
    }

    /// The Hessian matrices `𝓗ᵢ` of the individual equations, each complex
    /// symmetric by construction (upper triangle computed, then mirrored).
    pub fn hessians(
        &self,
        x: &[Complex64],
        t: Complex64,
    ) -> Result<Vec<ComplexMatrix>, DomainError> {
        assert_eq!(x.len(), self.n, "point dimension mismatch");
        self.check_torus(x)?;
        let n = self.n;
        // hess[i][(j,k)] for j <= k: ∂(∂hᵢ/∂xⱼ)/∂x_k.
        let mut polys: Vec<HomotopyPoly> = Vec::with_capacity(n * n * (n + 1) / 2);
        for i in 0..n {
            for j in 0..n {
                for k in j..n {
                    polys.push(self.jac[i * n + j].differentiate(k));
                }
            }
        }
        let refs: Vec<&HomotopyPoly> = polys.iter().collect();
        let ctx = PointCtx::build(n, &refs, x, t)?;
        let mut out = Vec::with_capacity(n);
        let mut idx = 0;
        for _ in 0..n {
            let mut hess = ComplexMatrix::zeros(n, n);
            for j in 0..n {
                for k in j..n {
                    let v = ctx.eval(&polys[idx]);
                    idx += 1;
                    hess[(j, k)] = v;
                    hess[(k, j)] = v;
                }
            }
            out.push(hess);
        }
        Ok(out)
    }

    /// Absolute-value evaluation `h_{i,abs}(|x|, |t|) = Σ |c| · |x|^q · |t|^k`,
    /// the denominator material of the scale-invariant residual.
    pub fn evaluate_abs(&self, x: &[Complex64], t: Complex64) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "point dimension mismatch");
        let xa: Vec<f64> = x.iter().map(|z| z.norm()).collect();
        let ta = t.norm();
        self.polys
            .iter()
            .map(|p| {
                p.monomials()
                    .iter()
                    .map(|m| {
                        let mut v = m.coeff.norm();
                        for (j, &e) in m.x_exponents.iter().enumerate() {
                            if e != 0 {
                                v *= xa[j].powi(e);
                            }
                        }
                        if m.t_degree > 0 {
                            v *= ta.powi(m.t_degree as i32);
                        }
                        v
                    })
                    .sum()
            })
            .collect()
    }

    /// Largest absolute-value evaluation over the Jacobian entries,
    /// `max_{i,j} (∂hᵢ/∂xⱼ)_abs(|x|, |t|)`: the natural magnitude scale of
    /// the Jacobian with all cancellation removed.
    pub fn jacobian_abs_max(&self, x: &[Complex64], t: Complex64) -> f64 {
        assert_eq!(x.len(), self.n, "point dimension mismatch");
        let xa: Vec<f64> = x.iter().map(|z| z.norm()).collect();
        let ta = t.norm();
        let mut worst = 0.0f64;
        for p in &self.jac {
            let mut acc = 0.0;
            for m in p.monomials() {
                let mut v = m.coeff.norm();
                for (j, &e) in m.x_exponents.iter().enumerate() {
                    if e != 0 {
                        v *= xa[j].powi(e);
                    }
                }
                if m.t_degree > 0 {
                    v *= ta.powi(m.t_degree as i32);
                }
                acc += v;
            }
            worst = worst.max(acc);
        }
        worst
    }

    /// The parameter shift `G(x, t) = H(x, t + t*)`, expanding every `t^k`
    /// binomially. Shifting by zero reproduces the monomials exactly.
    pub fn shift(&self, t_star: Complex64) -> Homotopy {
        if t_star == Complex64::ZERO {
            return self.clone();
        }
        let polys = self
            .polys
            .iter()
            .map(|p| shift_poly(p, t_star))
            .collect::<Vec<_>>();
        // Shifting commutes with ∂/∂xⱼ, so the Jacobian shifts directly.
        let jac = self.jac.iter().map(|p| shift_poly(p, t_star)).collect();
        Homotopy {
            n: self.n,
            polys,
            toric: self.toric,
            jac,
        }
    }

    /// `H(xs(t), t)` as a series vector truncated at `w`.
    pub fn evaluate_series(
        &self,
        xs: &SeriesVector,
        w: usize,
    ) -> Result<SeriesVector, DomainError> {
        assert_eq!(xs.len(), self.n, "series dimension mismatch");
        assert!(xs.w() >= w, "series truncation below requested order");
        let polys: Vec<&HomotopyPoly> = self.polys.iter().collect();
        let ctx = SeriesCtx::build(self.n, &polys, xs, w)?;
        Ok(SeriesVector::new(
            self.polys.iter().map(|p| ctx.eval(p)).collect(),
        ))
    }

    /// `J_H(xs(t), t)` as a series matrix truncated at `w`.
    pub fn jacobian_series(
        &self,
        xs: &SeriesVector,
        w: usize,
    ) -> Result<SeriesMatrix, DomainError> {
        assert_eq!(xs.len(), self.n, "series dimension mismatch");
        assert!(xs.w() >= w, "series truncation below requested order");
        let polys: Vec<&HomotopyPoly> = self.jac.iter().collect();
        let ctx = SeriesCtx::build(self.n, &polys, xs, w)?;
        Ok(SeriesMatrix::new(
            self.n,
            self.jac.iter().map(|p| ctx.eval(p)).collect(),
        ))
    }

    /// Series evaluation of `H` and `J_H` sharing one power table.
    pub fn evaluate_with_jacobian_series(
        &self,
        xs: &SeriesVector,
        w: usize,
    ) -> Result<(SeriesVector, SeriesMatrix), DomainError> {
        assert_eq!(xs.len(), self.n, "series dimension mismatch");
        assert!(xs.w() >= w, "series truncation below requested order");
        let polys: Vec<&HomotopyPoly> = self.polys.iter().chain(self.jac.iter()).collect();
        let ctx = SeriesCtx::build(self.n, &polys, xs, w)?;
        let h = SeriesVector::new(self.polys.iter().map(|p| ctx.eval(p)).collect());
        let j = SeriesMatrix::new(self.n, self.jac.iter().map(|p| ctx.eval(p)).collect());
        Ok((h, j))
    }

    fn check_torus(&self, x: &[Complex64]) -> Result<(), DomainError> {
        if self.toric && x.iter().any(|z| *z == Complex64::ZERO) {
            return Err(DomainError::OffTorus);
        }
        Ok(())
    }
}

fn derive_jacobian(n: usize, polys: &[HomotopyPoly]) -> Vec<HomotopyPoly> {
    let mut jac = Vec::with_capacity(n * n);
    for p in polys {
        for j in 0..n {
            jac.push(p.differentiate(j));
        }
    }
    jac
}

fn shift_poly(p: &HomotopyPoly, t_star: Complex64) -> HomotopyPoly {
    let mut out = Vec::new();
    for m in p.monomials() {
        let k = m.t_degree;
        // (t + t*)^k = Σ_i C(k,i) t*^{k-i} t^i
        let mut binom = 1.0f64;
        let mut shift_pow = vec![Complex64::ONE; (k + 1) as usize];
        for i in 1..=(k as usize) {
            shift_pow[i] = shift_pow[i - 1] * t_star;
        }
        for i in 0..=k {
            if i > 0 {
                binom = binom * ((k - i + 1) as f64) / (i as f64);
            }
            let c = m.coeff * binom * shift_pow[(k - i) as usize];
            out.push(HMonomial::new(c, m.x_exponents.clone(), i));
        }
    }
    HomotopyPoly::new(out)
}

// ── Power tables ────────────────────────────────────────────────────

/// Per-variable exponent ranges needed by a set of polynomials.
fn exponent_ranges(n: usize, polys: &[&HomotopyPoly]) -> (Vec<i32>, Vec<i32>, u32) {
    let mut max_pos = vec![0i32; n];
    let mut max_neg = vec![0i32; n];
    let mut max_t = 0u32;
    for p in polys {
        for m in p.monomials() {
            for (j, &e) in m.x_exponents.iter().enumerate() {
                if e > 0 {
                    max_pos[j] = max_pos[j].max(e);
                } else if e < 0 {
                    max_neg[j] = max_neg[j].max(-e);
                }
            }
            max_t = max_t.max(m.t_degree);
        }
    }
    (max_pos, max_neg, max_t)
}

struct PointCtx {
    pos: Vec<Vec<Complex64>>,
    neg: Vec<Vec<Complex64>>,
    t_pow: Vec<Complex64>,
}

impl PointCtx {
    fn build(
        n: usize,
        polys: &[&HomotopyPoly],
        x: &[Complex64],
        t: Complex64,
    ) -> Result<Self, DomainError> {
        let (max_pos, max_neg, max_t) = exponent_ranges(n, polys);
        let mut pos = Vec::with_capacity(n);
        let mut neg = Vec::with_capacity(n);
        for j in 0..n {
            pos.push(power_table(x[j], max_pos[j] as usize));
            if max_neg[j] > 0 {
                if x[j] == Complex64::ZERO {
                    return Err(DomainError::OffTorus);
                }
                neg.push(power_table(Complex64::ONE / x[j], max_neg[j] as usize));
            } else {
                neg.push(Vec::new());
            }
        }
        let t_pow = power_table(t, max_t as usize);
        Ok(PointCtx { pos, neg, t_pow })
    }

    fn eval(&self, p: &HomotopyPoly) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for m in p.monomials() {
            let mut v = m.coeff;
            for (j, &e) in m.x_exponents.iter().enumerate() {
                if e > 0 {
                    v *= self.pos[j][e as usize];
                } else if e < 0 {
                    v *= self.neg[j][(-e) as usize];
                }
            }
            if m.t_degree > 0 {
                v *= self.t_pow[m.t_degree as usize];
            }
            acc += v;
        }
        acc
    }
}

fn power_table(base: Complex64, max: usize) -> Vec<Complex64> {
    let mut table = Vec::with_capacity(max + 1);
    table.push(Complex64::ONE);
    for i in 1..=max {
        let prev = table[i - 1];
        table.push(prev * base);
    }
    table
}

struct SeriesCtx {
    w: usize,
    pos: Vec<Vec<TruncatedSeries>>,
    neg: Vec<Vec<TruncatedSeries>>,
}

impl SeriesCtx {
    fn build(
        n: usize,
        polys: &[&HomotopyPoly],
        xs: &SeriesVector,
        w: usize,
    ) -> Result<Self, DomainError> {
        let (max_pos, max_neg, _) = exponent_ranges(n, polys);
        let mut pos = Vec::with_capacity(n);
        let mut neg = Vec::with_capacity(n);
        for j in 0..n {
            let base = xs.component(j).truncate(w);
            pos.push(series_power_table(&base, max_pos[j] as usize, w));
            if max_neg[j] > 0 {
                let inv = base.recip().ok_or(DomainError::SeriesNotUnit)?;
                neg.push(series_power_table(&inv, max_neg[j] as usize, w));
            } else {
                neg.push(Vec::new());
            }
        }
        Ok(SeriesCtx { w, pos, neg })
    }

    fn eval(&self, p: &HomotopyPoly) -> TruncatedSeries {
        let mut acc = TruncatedSeries::zero(self.w);
        for m in p.monomials() {
            let mut term: Option<TruncatedSeries> = None;
            for (j, &e) in m.x_exponents.iter().enumerate() {
                let pw = if e > 0 {
                    &self.pos[j][e as usize]
                } else if e < 0 {
                    &self.neg[j][(-e) as usize]
                } else {
                    continue;
                };
                term = Some(match term {
                    None => pw.clone(),
                    Some(t) => t.mul(pw),
                });
            }
            let mut t = match term {
                Some(t) => t.scale(m.coeff),
                None => TruncatedSeries::constant(m.coeff, self.w),
            };
            if m.t_degree > 0 {
                t = t.mul_t_power(m.t_degree as usize);
            }
            acc = acc.add(&t);
        }
        acc
    }
}

fn series_power_table(base: &TruncatedSeries, max: usize, w: usize) -> Vec<TruncatedSeries> {
    let mut table = Vec::with_capacity(max + 1);
    table.push(TruncatedSeries::constant(Complex64::ONE, w));
    for i in 1..=max {
        let next = table[i - 1].mul(base);
        table.push(next);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn re(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    /// H(x,t) = x² − (t − 1/2)² − p² in expanded monomial form.
    fn hyperbola(p: f64) -> Homotopy {
        let poly = HomotopyPoly::new(vec![
            HMonomial::new(re(1.0), vec![2], 0),
            HMonomial::new(re(-1.0), vec![0], 2),
            HMonomial::new(re(1.0), vec![0], 1),
            HMonomial::new(re(-0.25 - p * p), vec![0], 0),
        ]);
        Homotopy::new(1, vec![poly], false).unwrap()
    }

    #[test]
    fn evaluate_hyperbola_on_path() {
        let h = hyperbola(0.1);
        let x = re(0.26f64.sqrt());
        let v = h.evaluate(&[x], Complex64::ZERO).unwrap();
        assert!(v[0].norm() < 1e-15);
    }

    #[test]
    fn evaluate_zero_system() {
        let h = Homotopy::new(2, vec![HomotopyPoly::zero(), HomotopyPoly::zero()], false).unwrap();
        let v = h.evaluate(&[c(1.0, 2.0), c(-3.0, 0.5)], re(0.7)).unwrap();
        assert_eq!(v[0], Complex64::ZERO);
        assert_eq!(v[1], Complex64::ZERO);
    }

    #[test]
    fn evaluate_toric_factor_pair() {
        // x1 * x2 - 1, toric
        let p1 = HomotopyPoly::new(vec![
            HMonomial::new(re(1.0), vec![1, 1], 0),
            HMonomial::new(re(-1.0), vec![0, 0], 0),
        ]);
        let p2 = HomotopyPoly::new(vec![HMonomial::new(re(1.0), vec![1, -1], 0)]);
        let h = Homotopy::new(2, vec![p1, p2], true).unwrap();
        let v = h.evaluate(&[re(2.0), re(0.5)], re(0.3)).unwrap();
        assert!(v[0].norm() < 1e-15);
        assert_eq!(
            h.evaluate(&[re(0.0), re(1.0)], Complex64::ZERO)
                .unwrap_err(),
            DomainError::OffTorus
        );
    }

    #[test]
    fn negative_exponent_requires_toric_flag() {
        let p = HomotopyPoly::new(vec![HMonomial::new(re(1.0), vec![-1], 0)]);
        assert_eq!(
            Homotopy::new(1, vec![p], false).unwrap_err(),
            SystemError::NegativeExponent { poly: 0 }
        );
    }

    #[test]
    fn jacobian_power_rule_and_hand_example() {
        let h = hyperbola(0.1);
        let j = h.jacobian(&[re(3.0)], Complex64::ZERO).unwrap();
        assert!((j[(0, 0)] - re(6.0)).norm() < 1e-15);

        // H = (x1 + x2, x1 x2) at (1, 2) -> [[1, 1], [2, 1]]
        let p1 = HomotopyPoly::new(vec![
            HMonomial::new(re(1.0), vec![1, 0], 0),
            HMonomial::new(re(1.0), vec![0, 1], 0),
        ]);
        let p2 = HomotopyPoly::new(vec![HMonomial::new(re(1.0), vec![1, 1], 0)]);
        let h = Homotopy::new(2, vec![p1, p2], false).unwrap();
        let j = h.jacobian(&[re(1.0), re(2.0)], Complex64::ZERO).unwrap();
        assert!((j[(0, 0)] - re(1.0)).norm() < 1e-15);
        assert!((j[(0, 1)] - re(1.0)).norm() < 1e-15);
        assert!((j[(1, 0)] - re(2.0)).norm() < 1e-15);
        assert!((j[(1, 1)] - re(1.0)).norm() < 1e-15);
    }

    fn random_system(rng: &mut ChaCha12Rng, n: usize, deg: u32) -> Homotopy {
        let mut polys = Vec::new();
        for _ in 0..n {
            let mut monos = Vec::new();
            let mut stack = vec![(Vec::new(), 0u32)];
            // enumerate all exponent vectors with total degree <= deg
            while let Some((head, used)) = stack.pop() {
                if head.len() == n {
                    monos.push(HMonomial::new(
                        c(
                            rng.random::<f64>() * 2.0 - 1.0,
                            rng.random::<f64>() * 2.0 - 1.0,
                        ),
                        head.iter().map(|&e: &u32| e as i32).collect(),
                        0,
                    ));
                    continue;
                }
                for e in 0..=(deg - used) {
                    let mut h2 = head.clone();
                    h2.push(e);
                    stack.push((h2, used + e));
                }
            }
            polys.push(HomotopyPoly::new(monos));
        }
        Homotopy::new(n, polys, false).unwrap()
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let step = 1e-6;
        for trial in 0..50 {
            let n = 1 + (trial % 3);
            let deg = 2 + (trial % 3) as u32;
            let h = random_system(&mut rng, n, deg);
            let x: Vec<Complex64> = (0..n)
                .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let t = re(rng.random::<f64>());
            let j = h.jacobian(&x, t).unwrap();
            for col in 0..n {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[col] += re(step);
                xm[col] -= re(step);
                let fp = h.evaluate(&xp, t).unwrap();
                let fm = h.evaluate(&xm, t).unwrap();
                for row in 0..n {
                    let fd = (fp[row] - fm[row]) / re(2.0 * step);
                    let scale = j[(row, col)].norm().max(1.0);
                    assert!(
                        (j[(row, col)] - fd).norm() <= 1e-5 * scale,
                        "trial {trial} entry ({row},{col}): {} vs fd {}",
                        j[(row, col)],
                        fd
                    );
                }
            }
        }
    }

    #[test]
    fn hessians_basic_and_symmetry() {
        let h = hyperbola(0.1);
        let hs = h.hessians(&[re(0.4)], re(0.2)).unwrap();
        assert!((hs[0][(0, 0)] - re(2.0)).norm() < 1e-15);

        // linear system -> all Hessians zero
        let p1 = HomotopyPoly::new(vec![
            HMonomial::new(re(2.0), vec![1, 0], 0),
            HMonomial::new(re(-1.0), vec![0, 1], 1),
        ]);
        let p2 = HomotopyPoly::new(vec![HMonomial::new(re(1.0), vec![0, 1], 0)]);
        let h = Homotopy::new(2, vec![p1, p2], false).unwrap();
        for hess in h.hessians(&[re(1.0), re(2.0)], re(0.5)).unwrap() {
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(hess[(i, j)], Complex64::ZERO);
                }
            }
        }
    }

    #[test]
    fn hessians_match_double_differentiation_exactly() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let h = random_system(&mut rng, 2, 3);
        let x = [c(0.3, -0.2), c(-0.7, 0.4)];
        let t = c(0.3, 0.1);
        let hs = h.hessians(&x, t).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    // evaluate ∂²hᵢ/∂xⱼ∂x_k via two explicit differentiations
                    let dd = h.poly(i).differentiate(j).differentiate(k);
                    let sys = Homotopy::new(2, vec![dd, HomotopyPoly::zero()], false).unwrap();
                    let v = sys.evaluate(&x, t).unwrap()[0];
                    assert_eq!(hs[i][(j, k)], v, "entry ({i},{j},{k})");
                }
            }
        }
    }

    #[test]
    fn hessians_match_finite_differences() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let h = random_system(&mut rng, 2, 3);
        let x = [c(0.2, 0.1), c(-0.4, 0.3)];
        let t = re(0.6);
        let hs = h.hessians(&x, t).unwrap();
        let step = 1e-4;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let mut xpp = x.to_vec();
                    let mut xpm = x.to_vec();
                    let mut xmp = x.to_vec();
                    let mut xmm = x.to_vec();
                    xpp[j] += re(step);
                    xpp[k] += re(step);
                    xpm[j] += re(step);
                    xpm[k] -= re(step);
                    xmp[j] -= re(step);
                    xmp[k] += re(step);
                    xmm[j] -= re(step);
                    xmm[k] -= re(step);
                    let fd = (h.evaluate(&xpp, t).unwrap()[i]
                        - h.evaluate(&xpm, t).unwrap()[i]
                        - h.evaluate(&xmp, t).unwrap()[i]
                        + h.evaluate(&xmm, t).unwrap()[i])
                        / re(4.0 * step * step);
                    assert!((hs[i][(j, k)] - fd).norm() < 1e-4);
                }
            }
        }
    }

    #[test]
    fn shift_identity_and_linear() {
        let h = hyperbola(0.2);
        let same = h.shift(Complex64::ZERO);
        assert_eq!(h.poly(0), same.poly(0));

        // x - t shifted by 1/2 -> x - t - 1/2
        let p = HomotopyPoly::new(vec![
            HMonomial::new(re(1.0), vec![1], 0),
            HMonomial::new(re(-1.0), vec![0], 1),
        ]);
        let h = Homotopy::new(1, vec![p], false).unwrap();
        let g = h.shift(re(0.5));
        let expect = HomotopyPoly::new(vec![
            HMonomial::new(re(1.0), vec![1], 0),
            HMonomial::new(re(-1.0), vec![0], 1),
            HMonomial::new(re(-0.5), vec![0], 0),
        ]);
        assert_eq!(g.poly(0), &expect);
    }

    #[test]
    fn shift_agrees_with_direct_evaluation() {
        // x - t² shifted by a must evaluate as x - (t+a)².
        let p = HomotopyPoly::new(vec![
            HMonomial::new(re(1.0), vec![1], 0),
            HMonomial::new(re(-1.0), vec![0], 2),
        ]);
        let h = Homotopy::new(1, vec![p], false).unwrap();
        let a = c(0.3, -0.7);
        let g = h.shift(a);
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        for _ in 0..10 {
            let x = c(rng.random::<f64>(), rng.random::<f64>());
            let t = c(rng.random::<f64>(), rng.random::<f64>());
            let lhs = g.evaluate(&[x], t).unwrap()[0];
            let rhs = h.evaluate(&[x], t + a).unwrap()[0];
            assert!((lhs - rhs).norm() < 1e-14);
        }
    }

    #[test]
    fn shift_round_trip() {
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        let h = random_system_with_t(&mut rng);
        let a = c(0.4, 0.9);
        let round = h.shift(a).shift(-a);
        for _ in 0..20 {
            let x = [c(rng.random::<f64>(), rng.random::<f64>())];
            let t = c(rng.random::<f64>(), rng.random::<f64>());
            let lhs = round.evaluate(&x, t).unwrap()[0];
            let rhs = h.evaluate(&x, t).unwrap()[0];
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
        }
    }

    fn random_system_with_t(rng: &mut ChaCha12Rng) -> Homotopy {
        let mut monos = Vec::new();
        for e in 0..4 {
            for k in 0..3 {
                monos.push(HMonomial::new(
                    c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
                    vec![e],
                    k,
                ));
            }
        }
        Homotopy::new(1, vec![HomotopyPoly::new(monos)], false).unwrap()
    }

    #[test]
    fn series_evaluation_exact_solution() {
        // H = x - t along xs = (t) vanishes identically.
        let p = HomotopyPoly::new(vec![
            HMonomial::new(re(1.0), vec![1], 0),
            HMonomial::new(re(-1.0), vec![0], 1),
        ]);
        let h = Homotopy::new(1, vec![p], false).unwrap();
        for w in 1..=6 {
            let mut xs = TruncatedSeries::zero(w);
            if w > 1 {
                xs.set_coeff(1, Complex64::ONE);
            }
            let v = h.evaluate_series(&SeriesVector::new(vec![xs]), w).unwrap();
            if w == 1 {
                // truncated at order 1 the residual is the constant 0
                assert_eq!(v.component(0).coeff(0), Complex64::ZERO);
            } else {
                assert_eq!(v.order(), None);
            }
        }
    }

    #[test]
    fn series_evaluation_square_of_binomial() {
        let sq = HomotopyPoly::new(vec![HMonomial::new(re(1.0), vec![2], 0)]);
        let h = Homotopy::new(1, vec![sq], false).unwrap();
        let mut xs = TruncatedSeries::zero(3);
        xs.set_coeff(0, Complex64::ONE);
        xs.set_coeff(1, Complex64::ONE);
        let v = h.evaluate_series(&SeriesVector::new(vec![xs]), 3).unwrap();
        let s = v.component(0);
        assert!((s.coeff(0) - re(1.0)).norm() < 1e-15);
        assert!((s.coeff(1) - re(2.0)).norm() < 1e-15);
        assert!((s.coeff(2) - re(1.0)).norm() < 1e-15);
    }

    #[test]
    fn series_constant_term_matches_point_evaluation() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let h = random_system_with_t(&mut rng);
        let z = c(0.3, 0.4);
        let xs = SeriesVector::constant(&[z], 1);
        let v = h.evaluate_series(&xs, 1).unwrap();
        let direct = h.evaluate(&[z], Complex64::ZERO).unwrap();
        assert!((v.component(0).coeff(0) - direct[0]).norm() < 1e-15);
        let js = h.jacobian_series(&xs, 1).unwrap();
        let jd = h.jacobian(&[z], Complex64::ZERO).unwrap();
        assert!((js.coefficient_matrix(0)[(0, 0)] - jd[(0, 0)]).norm() < 1e-15);
    }

    #[test]
    fn series_of_a_solution_branch_vanishes_to_truncation() {
        // Feed the hyperbola the Taylor expansion of its own branch
        // sqrt((t−1/2)² + p²); the residual series must vanish through the
        // supplied order. Coefficients come from the square-root recurrence.
        let p = 0.1;
        let w = 7;
        let g: [f64; 3] = [0.25 + p * p, -1.0, 1.0];
        let mut c = vec![0.0f64; w];
        c[0] = g[0].sqrt();
        for k in 1..w {
            let gk = if k < 3 { g[k] } else { 0.0 };
            let mut acc = 0.0;
            for j in 1..k {
                acc += c[j] * c[k - j];
            }
            c[k] = (gk - acc) / (2.0 * c[0]);
        }
        let xs = SeriesVector::new(vec![TruncatedSeries::from_coeffs(
            c.iter().map(|&v| re(v)).collect(),
        )]);
        let h = hyperbola(p);
        let v = h.evaluate_series(&xs, w).unwrap();
        assert_eq!(
            v.order(),
            None,
            "residual coefficients: {:?}",
            v.component(0)
        );
        assert!(v.component(0).max_abs() < 1e-10);
    }

    #[test]
    fn laurent_series_evaluation() {
        // toric: x1 * x2^{-1} at xs=(1+t, 1-t): (1+t)(1-t)^{-1} = 1+2t+2t²+…
        let p1 = HomotopyPoly::new(vec![HMonomial::new(re(1.0), vec![1, -1], 0)]);
        let p2 = HomotopyPoly::new(vec![HMonomial::new(re(1.0), vec![0, 1], 0)]);
        let h = Homotopy::new(2, vec![p1, p2], true).unwrap();
        let w = 5;
        let mut a = TruncatedSeries::zero(w);
        a.set_coeff(0, Complex64::ONE);
        a.set_coeff(1, Complex64::ONE);
        let mut b = TruncatedSeries::zero(w);
        b.set_coeff(0, Complex64::ONE);
        b.set_coeff(1, -Complex64::ONE);
        let v = h
            .evaluate_series(&SeriesVector::new(vec![a, b.clone()]), w)
            .unwrap();
        let s = v.component(0);
        assert!((s.coeff(0) - re(1.0)).norm() < 1e-14);
        for l in 1..w {
            assert!((s.coeff(l) - re(2.0)).norm() < 1e-14, "coeff {l}");
        }
        // zero constant term + negative exponent -> domain error
        let mut zc = TruncatedSeries::zero(w);
        zc.set_coeff(1, Complex64::ONE);
        let err = h
            .evaluate_series(&SeriesVector::new(vec![b, zc]), w)
            .unwrap_err();
        assert_eq!(err, DomainError::SeriesNotUnit);
    }
}
