use std::sync::OnceLock;

use carver_core::homotopy::{find_critical_points, CriticalSet, SolveOptions};
use carver_core::linalg::{norm2, SymmetricEigen};
use carver_core::morse::{default_t, MorseFunction};
use carver_core::named;
use proptest::prelude::*;

fn ellipsoids() -> MorseFunction {
    let ex = named::ELLIPSOIDS;
    MorseFunction::with_denominator(ex.arrangement(), ex.denominator().unwrap(), 0, None, None).unwrap()
}

fn discriminant(seed: u64) -> MorseFunction {
    MorseFunction::build(named::DISCRIMINANT8.arrangement(), seed, None, None).unwrap()
}

fn ellipsoid_critical_points() -> &'static (MorseFunction, CriticalSet) {
    static SET: OnceLock<(MorseFunction, CriticalSet)> = OnceLock::new();
    SET.get_or_init(|| {
        let m = ellipsoids();
        let set = find_critical_points(&m, 0, &SolveOptions::default()).unwrap();
        (m, set)
    })
}

/// Keeps sample points well away from every hypersurface, where the
/// derivatives blow up and difference quotients lose all accuracy.
fn clear_of_hypersurfaces(m: &MorseFunction, x: &[f64]) -> bool {
    m.near_hypersurface(x, 1e-2).is_none()
}

fn diff(a: &[f64], b: &[f64]) -> f64 {
    norm2(&a.iter().zip(b).map(|(u, v)| u - v).collect::<Vec<_>>())
}

fn shifted(x: &[f64], j: usize, h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[j] += h;
    y
}

fn check_derivatives(m: &MorseFunction, x: &[f64]) -> Result<(), TestCaseError> {
    let e = m.eval_log_g(x, true).unwrap();
    let n = x.len();
    let mut fd_grad = vec![0.0; n];
    let mut fd_hess = vec![0.0; n * n];
    for j in 0..n {
        let h = 1e-6 * (1.0 + x[j].abs());
        let p = m.eval_log_g(&shifted(x, j, h), false).unwrap();
        let q = m.eval_log_g(&shifted(x, j, -h), false).unwrap();
        fd_grad[j] = (p.value - q.value) / (2.0 * h);
        for i in 0..n {
            fd_hess[i * n + j] = (p.grad[i] - q.grad[i]) / (2.0 * h);
        }
    }
    let g = &e.grad;
    let hess = e.hessian.as_ref().unwrap();
    prop_assert!(
        diff(&fd_grad, g) <= 1e-5 * norm2(g).max(1.0),
        "gradient {:?} vs differences {:?}",
        g,
        fd_grad
    );
    prop_assert!(
        diff(&fd_hess, hess) <= 1e-4 * norm2(hess).max(1.0),
        "hessian {:?} vs differences {:?}",
        hess,
        fd_hess
    );
    for i in 0..n {
        for j in 0..i {
            let (a, b) = (hess[i * n + j], hess[j * n + i]);
            prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(1e-300));
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ellipsoid_derivatives_match_differences(x in prop::collection::vec(-4.0f64..4.0, 3)) {
        let m = ellipsoids();
        prop_assume!(clear_of_hypersurfaces(&m, &x));
        check_derivatives(&m, &x)?;
    }

    #[test]
    fn discriminant_derivatives_match_differences(seed in 0u64..4, x in prop::collection::vec(-3.0f64..3.0, 2)) {
        let m = discriminant(seed);
        prop_assume!(clear_of_hypersurfaces(&m, &x));
        check_derivatives(&m, &x)?;
    }

    #[test]
    fn log_g_is_finite_off_the_hypersurfaces(x in prop::collection::vec(-20.0f64..20.0, 3)) {
        let m = ellipsoids();
        prop_assume!(m.near_hypersurface(&x, 1e-9).is_none());
        let v = m.eval_log_g(&x, false).unwrap().value;
        prop_assert!(v.is_finite());
        prop_assert!(m.eval_g(&x).unwrap() >= 0.0);
    }

    #[test]
    fn log_g_falls_along_rays(seed in 0u64..8, dir in prop::collection::vec(-1.0f64..1.0, 2)) {
        prop_assume!(norm2(&dir) > 0.1);
        let m = discriminant(seed);
        let values: Vec<f64> = [1e2, 1e4, 1e6]
            .iter()
            .map(|r| dir.iter().map(|d| d * r).collect::<Vec<_>>())
            .filter(|x| m.near_hypersurface(x, 1e-9).is_none())
            .map(|x| m.eval_log_g(&x, false).unwrap().value)
            .collect();
        prop_assume!(values.len() == 3);
        prop_assert!(values[0] > values[1] && values[1] > values[2], "{:?}", values);
    }
}

#[test]
fn ellipsoid_origin_value() {
    let m = ellipsoids();
    let q0 = m.denominator().eval(&[0.0, 0.0, 0.0]).unwrap();
    // (x+2)² + (y−3)² + (z−3)² + (2x+y)² + 4 at the origin
    assert_eq!(q0, 26.0);
    let want = 1f64.ln() + 4f64.ln() + 9f64.ln() - 4.0 * q0.ln();
    let got = m.eval_log_g(&[0.0, 0.0, 0.0], false).unwrap().value;
    assert!((got - want).abs() < 1e-14);
}

#[test]
fn default_exponent_for_the_discriminant_factors() {
    assert_eq!(default_t(&[1, 1, 1, 1], &[1, 6, 1, 2]), 6);
    assert_eq!(discriminant(0).t(), 6);
    assert_eq!(ellipsoids().t(), 4);
}

/// Hessian of `g` itself by second differences of `g`, sharing nothing with
/// the analytic Hessian of `log g`.
fn hessian_of_g(m: &MorseFunction, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let g = |y: &[f64]| m.eval_g(y).unwrap();
    let h: Vec<f64> = x.iter().map(|v| 1e-4 * (1.0 + v.abs())).collect();
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let v = if i == j {
                (g(&shifted(x, i, h[i])) - 2.0 * g(x) + g(&shifted(x, i, -h[i]))) / (h[i] * h[i])
            } else {
                let pp = g(&shifted(&shifted(x, i, h[i]), j, h[j]));
                let pm = g(&shifted(&shifted(x, i, h[i]), j, -h[j]));
                let mp = g(&shifted(&shifted(x, i, -h[i]), j, h[j]));
                let mm = g(&shifted(&shifted(x, i, -h[i]), j, -h[j]));
                (pp - pm - mp + mm) / (4.0 * h[i] * h[j])
            };
            out[i * n + j] = v;
        }
    }
    out
}

#[test]
fn inertia_of_g_and_log_g_agree_at_critical_points() {
    let (m, set) = ellipsoid_critical_points();
    assert_eq!(set.points.len(), 21);
    for p in &set.points {
        let h = hessian_of_g(m, &p.x);
        let eig = SymmetricEigen::jacobi(&h, 3);
        let positive = eig.values.iter().filter(|&&v| v > 0.0).count();
        // the difference Hessian is accurate to well under the gap to zero
        let g = m.eval_g(&p.x).unwrap();
        let smallest = p.eigenvalues.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
        assert!(smallest * g > 1e-4 * eig.spectral_radius(), "nearly degenerate at {:?}", p.x);
        assert_eq!(positive, p.index, "at {:?}", p.x);
    }
}

#[test]
fn critical_points_have_vanishing_gradient() {
    let (m, set) = ellipsoid_critical_points();
    for p in &set.points {
        let e = m.eval_log_g(&p.x, false).unwrap();
        assert!(norm2(&e.grad) < 1e-8 * (1.0 + norm2(&p.x)), "{:?}", e.grad);
    }
}
