//! The predictor's design target: at every accepted step the predicted
//! point stays within a small fraction of the estimated distance to the
//! nearest different path. Checked against the closed-form hyperbola
//! branches, with slack for the fact that both `η` and `e₀` are estimates.

use num_complex::Complex64;
use padtrack_core::newton::correct;
use padtrack_core::polysys::{HMonomial, Homotopy, HomotopyPoly};
use padtrack_core::tracker::{predict, TrackerConfig};

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

fn branch(p: f64, t: f64) -> f64 {
    ((t - 0.5) * (t - 0.5) + p * p).sqrt()
}

#[test]
fn prediction_error_stays_within_budget() {
    let cfg = TrackerConfig::default();
    for &p in &[1e-1, 1e-3] {
        let h = hyperbola(p);
        let mut z = vec![re(branch(p, 0.0))];
        let mut t = 0.0_f64;
        let mut steps = 0;
        while t < cfg.t_end_game && steps < 500 {
            let pred = predict(&h, &z, t, &cfg).unwrap();
            let truth = branch(p, t + pred.dt);
            let err = (pred.z_tilde[0] - re(truth)).norm();
            let budget = 5.0 * cfg.beta1 * pred.eta;
            assert!(
                err <= budget,
                "p={p}, t={t:.6}: prediction error {err:.3e} over budget {budget:.3e}"
            );
            let rep = correct(
                &h,
                &pred.z_tilde,
                re(t + pred.dt),
                cfg.corrector_tol,
                cfg.corrector_max_iters,
            );
            assert!(
                rep.converged,
                "p={p}, t={t}: corrector rejected the prediction"
            );
            z = rep.point;
            t += pred.dt;
            steps += 1;
        }
        assert!(t >= cfg.t_end_game, "p={p}: did not finish in 500 steps");
    }
}
