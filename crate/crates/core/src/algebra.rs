//! Dense complex linear algebra for small matrices.
//!
//! Everything the tracker needs from linear algebra lives here: LU solves
//! with partial pivoting, singular values by one-sided Jacobi, and roots of
//! low-degree polynomials. Matrix dimensions in this crate stay small
//! (n ≤ ~30), so the kernels favour accuracy and simplicity over blocking.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

/// Column vector over ℂ.
pub type ComplexVector = Vec<Complex64>;

/// Errors from the linear algebra kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgebraError {
    /// Operation requires a square matrix.
    NotSquare,
    /// An entry is NaN or infinite.
    NonFinite,
    /// Operand shapes do not match.
    DimensionMismatch,
    /// Pivot below the singularity threshold.
    SingularMatrix,
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::NotSquare => write!(f, "matrix is not square"),
            AlgebraError::NonFinite => write!(f, "matrix has non-finite entries"),
            AlgebraError::DimensionMismatch => write!(f, "operand dimensions do not match"),
            AlgebraError::SingularMatrix => write!(f, "matrix is numerically singular"),
        }
    }
}

impl core::error::Error for AlgebraError {}

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    /// Builds a matrix from a row-major coefficient slice.
    pub fn from_row_major(rows: usize, cols: usize, data: &[Complex64]) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        assert_eq!(data.len(), rows * cols, "row-major data length mismatch");
        ComplexMatrix {
            rows,
            cols,
            data: data.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn all_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> ComplexVector {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension mismatch");
        let mut out = vec![Complex64::ZERO; self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::ZERO;
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn mul_mat(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, other.rows, "matrix-matrix dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

// ── Singular values ─────────────────────────────────────────────────

/// Singular values of a square complex matrix, descending.
///
/// Uses one-sided Jacobi on the columns: unitary plane rotations are applied
/// until all column pairs are numerically orthogonal; the singular values
/// are the final column norms. For the small matrices used here this attains
/// close to full relative accuracy.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>, AlgebraError> {
    if !a.is_square() {
        return Err(AlgebraError::NotSquare);
    }
    if !a.all_finite() {
        return Err(AlgebraError::NonFinite);
    }
    let n = a.rows();
    // Column-major working copy.
    let mut col: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)]).collect())
        .collect();

    const EPS: f64 = 1e-15;
    const MAX_SWEEPS: usize = 60;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = col[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = col[q].iter().map(|z| z.norm_sqr()).sum();
                let mut gamma = Complex64::ZERO;
                for i in 0..n {
                    gamma += col[p][i].conj() * col[q][i];
                }
                let g = gamma.norm();
                let scale = (alpha * beta).sqrt();
                if scale == 0.0 || g <= EPS * scale {
                    continue;
                }
                rotated = true;
                // Absorb the phase of the inner product into column q, then
                // apply the real Jacobi rotation that annihilates it.
                let phase = gamma / g;
                let tau = (beta - alpha) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let xp = col[p][i];
                    let xq = col[q][i] / phase;
                    col[p][i] = c * xp - s * xq;
                    col[q][i] = s * xp + c * xq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = col
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
    Ok(sv)
}

// ── LU factorization ────────────────────────────────────────────────

/// Pivot moduli below this are treated as exactly singular.
const PIVOT_FLOOR: f64 = 1e-300;

/// LU factorization with partial pivoting, packed in a single matrix.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    odd_swaps: bool,
}

impl LuFactors {
    /// Factors a square matrix. Fails if a pivot falls below `1e-300`.
    pub fn new(a: &ComplexMatrix) -> Result<Self, AlgebraError> {
        if !a.is_square() {
            return Err(AlgebraError::NotSquare);
        }
        if !a.all_finite() {
            return Err(AlgebraError::NonFinite);
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut odd_swaps = false;
        for k in 0..n {
            let mut piv = k;
            let mut piv_abs = lu[(k, k)].norm();
            for i in (k + 1)..n {
                let v = lu[(i, k)].norm();
                if v > piv_abs {
                    piv = i;
                    piv_abs = v;
                }
            }
            if piv_abs < PIVOT_FLOOR || !piv_abs.is_finite() {
                return Err(AlgebraError::SingularMatrix);
            }
            if piv != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(piv, j)];
                    lu[(piv, j)] = tmp;
                }
                perm.swap(k, piv);
                odd_swaps = !odd_swaps;
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                for j in (k + 1)..n {
                    let sub = factor * lu[(k, j)];
                    lu[(i, j)] -= sub;
                }
            }
        }
        Ok(LuFactors {
            lu,
            perm,
            odd_swaps,
        })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// Solves `A x = b`.
    pub fn solve_vec(&self, b: &[Complex64]) -> ComplexVector {
        let n = self.dim();
        assert_eq!(b.len(), n, "rhs length mismatch");
        let mut x: ComplexVector = self.perm.iter().map(|&p| b[p]).collect();
        // Forward substitution with unit lower-triangular L.
        for i in 1..n {
            for j in 0..i {
                let sub = self.lu[(i, j)] * x[j];
                x[i] -= sub;
            }
        }
        // Back substitution with U.
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let sub = self.lu[(i, j)] * x[j];
                x[i] -= sub;
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    /// Solves `A X = B` column by column.
    pub fn solve_mat(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim();
        assert_eq!(b.rows(), n, "rhs row count mismatch");
        let mut out = ComplexMatrix::zeros(n, b.cols());
        let mut col = vec![Complex64::ZERO; n];
        for j in 0..b.cols() {
            for i in 0..n {
                col[i] = b[(i, j)];
            }
            let x = self.solve_vec(&col);
            for i in 0..n {
                out[(i, j)] = x[i];
            }
        }
        out
    }

    /// Determinant from the factorization.
    pub fn det(&self) -> Complex64 {
        let n = self.dim();
        let mut d = if self.odd_swaps {
            -Complex64::ONE
        } else {
            Complex64::ONE
        };
        for i in 0..n {
            d *= self.lu[(i, i)];
        }
        d
    }
}

/// One-shot solve of `A x = b` with partial pivoting.
pub fn lu_solve(a: &ComplexMatrix, b: &[Complex64]) -> Result<ComplexVector, AlgebraError> {
    Ok(LuFactors::new(a)?.solve_vec(b))
}

/// One-shot solve of `A X = B`.
pub fn lu_solve_mat(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, AlgebraError> {
    Ok(LuFactors::new(a)?.solve_mat(b))
}

// ── Polynomial roots ────────────────────────────────────────────────

/// Roots of `q₀ + q₁ t + … + q_M t^M` where `q₀ = 1`.
///
/// Trailing zero coefficients are stripped first, so the number of returned
/// roots equals the effective degree (and degree 0 returns no roots).
/// Degrees one and two use closed formulas (the quadratic in its
/// cancellation-free form); higher degrees take the eigenvalues of the
/// companion matrix, each polished by a few Newton steps.
pub fn poly_roots(q: &[Complex64]) -> Vec<Complex64> {
    assert!(!q.is_empty(), "empty coefficient sequence");
    assert_eq!(
        q[0],
        Complex64::ONE,
        "coefficient sequence must be normalized to q0 = 1"
    );
    let mut deg = q.len() - 1;
    while deg > 0 && q[deg] == Complex64::ZERO {
        deg -= 1;
    }
    match deg {
        0 => Vec::new(),
        1 => vec![-q[0] / q[1]],
        2 => {
            // Larger-modulus root from the quadratic formula, the other from
            // the product of roots q0/q2.
            let disc = (q[1] * q[1] - 4.0 * q[2] * q[0]).sqrt();
            let num = if (q[1].conj() * disc).re >= 0.0 {
                q[1] + disc
            } else {
                q[1] - disc
            };
            let r1 = -num / (2.0 * q[2]);
            let r2 = q[0] / (q[2] * r1);
            vec![r1, r2]
        }
        _ => {
            let mut roots = companion_eigenvalues(&q[..=deg]);
            for r in roots.iter_mut() {
                *r = newton_polish(&q[..=deg], *r);
            }
            roots
        }
    }
}

fn eval_poly(q: &[Complex64], t: Complex64) -> Complex64 {
    let mut acc = Complex64::ZERO;
    for &c in q.iter().rev() {
        acc = acc * t + c;
    }
    acc
}

fn eval_poly_deriv(q: &[Complex64], t: Complex64) -> Complex64 {
    let mut acc = Complex64::ZERO;
    for k in (1..q.len()).rev() {
        acc = acc * t + q[k] * (k as f64);
    }
    acc
}

fn newton_polish(q: &[Complex64], mut r: Complex64) -> Complex64 {
    let mut best = r;
    let mut best_abs = eval_poly(q, r).norm();
    for _ in 0..3 {
        let d = eval_poly_deriv(q, r);
        if d.norm() < PIVOT_FLOOR {
            break;
        }
        r -= eval_poly(q, r) / d;
        let v = eval_poly(q, r).norm();
        if v < best_abs {
            best_abs = v;
            best = r;
        } else {
            break;
        }
    }
    best
}

/// Eigenvalues of the companion matrix of a polynomial given by its full
/// coefficient sequence (nonzero leading coefficient), via shifted complex
/// Hessenberg QR with Givens rotations.
fn companion_eigenvalues(q: &[Complex64]) -> Vec<Complex64> {
    let d = q.len() - 1;
    let lead = q[d];
    let mut h = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        h[(i, d - 1)] = -q[i] / lead;
        if i > 0 {
            h[(i, i - 1)] = Complex64::ONE;
        }
    }
    hessenberg_eigenvalues(h)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    // Eigenvalue of [[a, b], [c, d]] closest to d.
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - 4.0 * det).sqrt();
    let l1 = (tr + disc) / 2.0;
    let l2 = (tr - disc) / 2.0;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn hessenberg_eigenvalues(mut h: ComplexMatrix) -> Vec<Complex64> {
    let n = h.rows();
    let mut eigs = vec![Complex64::ZERO; n];
    let mut m = n;
    let mut stalled = 0usize;
    while m > 0 {
        if m == 1 {
            eigs[0] = h[(0, 0)];
            break;
        }
        // Deflate converged trailing eigenvalue.
        let sub = h[(m - 1, m - 2)].norm();
        let local = h[(m - 2, m - 2)].norm() + h[(m - 1, m - 1)].norm();
        if sub <= f64::EPSILON * local || sub < PIVOT_FLOOR {
            eigs[m - 1] = h[(m - 1, m - 1)];
            m -= 1;
            stalled = 0;
            continue;
        }
        let mut shift = wilkinson_shift(
            h[(m - 2, m - 2)],
            h[(m - 2, m - 1)],
            h[(m - 1, m - 2)],
            h[(m - 1, m - 1)],
        );
        stalled += 1;
        if stalled % 12 == 0 {
            // Exceptional shift to break symmetry-induced stalls.
            shift = h[(m - 1, m - 1)] + Complex64::new(0.75 * sub, 0.25 * sub);
        }
        if stalled > 200 {
            // Give up on further refinement; report the diagonal as-is and
            // let the Newton polish in `poly_roots` recover what it can.
            for i in 0..m {
                eigs[i] = h[(i, i)];
            }
            break;
        }
        qr_step(&mut h, m, shift);
    }
    eigs
}

/// One explicit shifted QR sweep on the leading m×m Hessenberg block.
fn qr_step(h: &mut ComplexMatrix, m: usize, shift: Complex64) {
    let mut rot: Vec<(f64, Complex64)> = Vec::with_capacity(m - 1);
    for i in 0..m {
        h[(i, i)] -= shift;
    }
    // Reduce to upper triangular with complex Givens rotations.
    for i in 0..(m - 1) {
        let f = h[(i, i)];
        let g = h[(i + 1, i)];
        let (c, s) = givens(f, g);
        rot.push((c, s));
        for j in i..m {
            let a = h[(i, j)];
            let b = h[(i + 1, j)];
            h[(i, j)] = c * a + s * b;
            h[(i + 1, j)] = -s.conj() * a + c * b;
        }
    }
    // Multiply R by the accumulated rotations from the right.
    for (i, &(c, s)) in rot.iter().enumerate() {
        for k in 0..=(i + 1).min(m - 1) {
            let a = h[(k, i)];
            let b = h[(k, i + 1)];
            h[(k, i)] = c * a + s.conj() * b;
            h[(k, i + 1)] = -s * a + c * b;
        }
    }
    for i in 0..m {
        h[(i, i)] += shift;
    }
}

/// Complex Givens rotation: returns real `c ≥ 0` and complex `s` with
/// `c² + |s|² = 1` such that `[c s; -s̄ c]·[f; g] = [r; 0]`.
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    let fa = f.norm();
    let ga = g.norm();
    if ga == 0.0 {
        return (1.0, Complex64::ZERO);
    }
    if fa == 0.0 {
        return (0.0, g.conj() / ga);
    }
    let r = (fa * fa + ga * ga).sqrt();
    let c = fa / r;
    let s = (f / fa) * g.conj() / r;
    (c, s)
}
