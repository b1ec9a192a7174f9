//! Constructors for the benchmark systems driven by the experiment harness.

use padtrack_core::polysys::{HMonomial, Homotopy, HomotopyPoly};
use padtrack_core::tracker::{blend_systems, normalize_equations};
use padtrack_core::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// The hyperbola family `H(x,t) = x² − (t − 1/2)² − p²` with its two start
/// solutions `±sqrt(1/4 + p²)` at `t = 0`.
pub fn hyperbola(p: f64) -> (Homotopy, [Vec<Complex64>; 2]) {
    let poly = HomotopyPoly::new(vec![
        HMonomial::new(re(1.0), vec![2], 0),
        HMonomial::new(re(-1.0), vec![0], 2),
        HMonomial::new(re(1.0), vec![0], 1),
        HMonomial::new(re(-0.25 - p * p), vec![0], 0),
    ]);
    let h = Homotopy::new(1, vec![poly], false).expect("hyperbola is well formed");
    let root = (0.25 + p * p).sqrt();
    (h, [vec![re(root)], vec![re(-root)]])
}

/// Wilkinson polynomial `W_d(x) = Π (x − i)` expanded in the monomial
/// basis. The integer coefficients are built exactly in `i128` (they fit
/// through d = 19 and beyond) and only rounded on conversion to `f64`.
pub fn wilkinson(d: u32) -> Homotopy {
    assert!(d >= 1 && d <= 25, "supported Wilkinson degrees: 1..=25");
    let mut coeffs: Vec<i128> = vec![1];
    for i in 1..=(d as i128) {
        // multiply by (x - i)
        let mut next = vec![0i128; coeffs.len() + 1];
        for (k, &c) in coeffs.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= i * c;
        }
        coeffs = next;
    }
    let monomials = coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(k, &c)| HMonomial::new(re(c as f64), vec![k as i32], 0))
        .collect();
    Homotopy::new(1, vec![HomotopyPoly::new(monomials)], false).expect("Wilkinson is well formed")
}

/// Dense system of `n` polynomials of total degree `d` whose coefficients
/// have standard-normal real and imaginary parts. Monomials are filled in
/// a fixed (graded-lexicographic) order so a seeded generator reproduces
/// the same system.
pub fn dense_normal_system<R: Rng>(n: usize, d: u32, rng: &mut R) -> Homotopy {
    let exponents = graded_exponents(n, d);
    let polys = (0..n)
        .map(|_| {
            HomotopyPoly::new(
                exponents
                    .iter()
                    .map(|q| {
                        let re_part: f64 = rng.sample(StandardNormal);
                        let im_part: f64 = rng.sample(StandardNormal);
                        HMonomial::new(
                            Complex64::new(re_part, im_part),
                            q.iter().map(|&e| e as i32).collect(),
                            0,
                        )
                    })
                    .collect(),
            )
        })
        .collect();
    Homotopy::new(n, polys, false).expect("dense system is well formed")
}

/// All exponent vectors with total degree at most `d`, graded then
/// lexicographic.
fn graded_exponents(n: usize, d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for total in 0..=d {
        let mut current = vec![0u32; n];
        fill_degree(n, total, 0, &mut current, &mut out);
    }
    out
}

fn fill_degree(
    n: usize,
    remaining: u32,
    pos: usize,
    current: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if pos == n - 1 {
        current[pos] = remaining;
        out.push(current.clone());
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        fill_degree(n, remaining - e, pos + 1, current, out);
        current[pos] = 0;
    }
}

/// Univariate monic polynomial with the given roots, expanded by repeated
/// convolution.
pub fn poly_from_roots(roots: &[Complex64]) -> Homotopy {
    let mut coeffs: Vec<Complex64> = vec![Complex64::ONE];
    for &r in roots {
        let mut next = vec![Complex64::ZERO; coeffs.len() + 1];
        for (k, &c) in coeffs.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= r * c;
        }
        coeffs = next;
    }
    let monomials = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != Complex64::ZERO)
        .map(|(k, &c)| HMonomial::new(c, vec![k as i32], 0))
        .collect();
    Homotopy::new(1, vec![HomotopyPoly::new(monomials)], false)
        .expect("product form is well formed")
}

/// Clustered roots: `n_c` cluster centers on the unit circle, each split
/// into `cluster_size` points at radius `α · u^{1/CS}` around its center,
/// with `u = 2⁻⁵²` the double-precision unit roundoff.
pub fn cluster_roots(n_c: usize, cluster_size: usize, alpha: f64) -> Vec<Complex64> {
    let u = 2.0f64.powi(-52);
    let radius = alpha * u.powf(1.0 / cluster_size as f64);
    let mut roots = Vec::with_capacity(n_c * cluster_size);
    for i in 0..n_c {
        let center = Complex64::from_polar(1.0, std::f64::consts::TAU * i as f64 / n_c as f64);
        for j in 0..cluster_size {
            let offset = Complex64::from_polar(
                radius,
                std::f64::consts::TAU * j as f64 / cluster_size as f64,
            );
            roots.push(center + offset);
        }
    }
    roots
}

/// The cluster-experiment homotopy
/// `H = (1−t)(1/2−t)·G + γ₁·t(1−t)·E + γ₂·t(1/2−t)·F`
/// connecting `G = x^d − 1` (t = 0) through the clustered polynomial `E`
/// (t = 1/2) to the random target `F` (t = 1).
pub fn cluster_homotopy(
    g: &Homotopy,
    e: &Homotopy,
    f: &Homotopy,
    gamma1: Complex64,
    gamma2: Complex64,
) -> Homotopy {
    // Normalize the parts so no blend member dwarfs the others (the
    // expanded cluster polynomial carries binomial-sized coefficients).
    let e = normalize_equations(e);
    let f = normalize_equations(f);
    // (1−t)(1/2−t) = 1/2 − 3/2 t + t²; t(1−t) = t − t²; t(1/2−t) = t/2 − t².
    let g_w = [re(0.5), re(-1.5), re(1.0)];
    let e_w = [Complex64::ZERO, gamma1, -gamma1];
    let f_w = [Complex64::ZERO, 0.5 * gamma2, -gamma2];
    blend_systems(&[(g, &g_w), (&e, &e_w), (&f, &f_w)]).expect("cluster blend is well formed")
}

/// Power benchmark `x^d − 1`.
pub fn roots_of_unity_system(d: u32) -> Homotopy {
    let poly = HomotopyPoly::new(vec![
        HMonomial::new(re(1.0), vec![d as i32], 0),
        HMonomial::new(re(-1.0), vec![0], 0),
    ]);
    Homotopy::new(1, vec![poly], false).expect("power system is well formed")
}

/// The katsura-n benchmark: n quadratic convolution equations plus one
/// linear normalization in n+1 unknowns `u₀ … uₙ`, with Bézout number 2ⁿ.
pub fn katsura(n: usize) -> Homotopy {
    let vars = n + 1;
    let idx = |k: i64| -> Option<usize> {
        let a = k.unsigned_abs() as usize;
        (a <= n).then_some(a)
    };
    let mut polys = Vec::with_capacity(vars);
    for m in 0..n {
        let mut monomials = Vec::new();
        for l in -(n as i64)..=(n as i64) {
            let (Some(a), Some(b)) = (idx(l), idx(m as i64 - l)) else {
                continue;
            };
            let mut exps = vec![0i32; vars];
            exps[a] += 1;
            exps[b] += 1;
            monomials.push(HMonomial::new(re(1.0), exps, 0));
        }
        let mut lin = vec![0i32; vars];
        lin[m] = 1;
        monomials.push(HMonomial::new(re(-1.0), lin, 0));
        polys.push(HomotopyPoly::new(monomials));
    }
    // u₀ + 2 Σ u_k = 1
    let mut monomials = Vec::new();
    for k in 0..vars {
        let mut exps = vec![0i32; vars];
        exps[k] = 1;
        monomials.push(HMonomial::new(re(if k == 0 { 1.0 } else { 2.0 }), exps, 0));
    }
    monomials.push(HMonomial::new(re(-1.0), vec![0; vars], 0));
    polys.push(HomotopyPoly::new(monomials));
    Homotopy::new(vars, polys, false).expect("katsura is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use padtrack_core::tracker::residual;

    #[test]
    fn wilkinson_has_integer_roots() {
        let w = wilkinson(10);
        for root in 1..=10 {
            let r = residual(&w, &[re(root as f64)]);
            assert!(r < 1e-14, "root {root}: residual {r}");
        }
    }

    #[test]
    fn dense_system_has_expected_support() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(1);
        let h = dense_normal_system(2, 10, &mut rng);
        // C(12, 2) = 66 monomials of total degree <= 10 in two variables
        assert_eq!(h.poly(0).monomials().len(), 66);
        assert_eq!(h.poly(1).monomials().len(), 66);
        assert_eq!(h.poly(0).total_degree(), 10);
    }

    #[test]
    fn cluster_roots_layout() {
        let roots = cluster_roots(5, 3, 10.0);
        assert_eq!(roots.len(), 15);
        let radius = 10.0 * 2.0f64.powi(-52).powf(1.0 / 3.0);
        for (i, chunk) in roots.chunks(3).enumerate() {
            let center = Complex64::from_polar(1.0, std::f64::consts::TAU * i as f64 / 5.0);
            for z in chunk {
                // recovering the offset from center + offset costs ~1 ulp of
                // the center, which is large relative to the tiny radius
                assert!(((z - center).norm() - radius).abs() < 1e-9 * radius);
            }
        }
    }

    #[test]
    fn cluster_homotopy_interpolates() {
        let g = roots_of_unity_system(4);
        let e = poly_from_roots(&cluster_roots(2, 2, 10.0));
        let roots = [re(1.3), re(-0.4), Complex64::new(0.0, 0.9), re(2.0)];
        let f = poly_from_roots(&roots);
        let h = cluster_homotopy(&g, &e, &f, re(1.0), re(1.0));
        // t = 1: H = -γ₂/2 F, so F's roots solve it
        for root in roots {
            let v = h.evaluate(&[root], re(1.0)).unwrap();
            assert!(v[0].norm() < 1e-10, "{v:?}");
        }
        // t = 0: H = G/2, roots of unity solve it
        let v = h.evaluate(&[re(1.0)], re(0.0)).unwrap();
        assert!(v[0].norm() < 1e-12);
    }

    #[test]
    fn katsura_counts() {
        let h = katsura(8);
        assert_eq!(h.n(), 9);
        let degrees: Vec<u32> = h.polys().iter().map(|p| p.total_degree()).collect();
        assert_eq!(degrees.iter().filter(|&&d| d == 2).count(), 8);
        assert_eq!(degrees.iter().filter(|&&d| d == 1).count(), 1);
    }
}
