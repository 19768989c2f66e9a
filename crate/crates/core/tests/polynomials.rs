use carver_core::poly::{Degree, Polynomial};
use num_complex::Complex64;
use proptest::prelude::*;

const VARS: [&str; 3] = ["x", "y", "z"];

/// Small random polynomials in three variables, degree at most 3.
fn poly() -> impl Strategy<Value = Polynomial> {
    let coef = prop_oneof![
        (-9i32..=9).prop_map(f64::from),
        -1e3f64..1e3,
        (-1e-7f64..1e-7).prop_filter("nonzero", |c| *c != 0.0),
    ];
    prop::collection::vec(((0u32..=3, 0u32..=3, 0u32..=3), coef), 0..8).prop_map(|terms| {
        Polynomial::from_terms(
            3,
            terms
                .into_iter()
                .filter(|((a, b, c), _)| a + b + c <= 3)
                .map(|((a, b, c), v)| (vec![a, b, c], v)),
        )
        .unwrap()
    })
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 3)
}

fn close(a: f64, b: f64, scale: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * scale.max(1.0)
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(p in poly()) {
        let text = p.to_string_with(&VARS);
        let back = Polynomial::parse(&text, &VARS).unwrap();
        prop_assert_eq!(&back, &p, "printed as {}", text);
        prop_assert_eq!(back.to_string_with(&VARS), text);
    }

    #[test]
    fn distributive_law(p in poly(), q in poly(), r in poly(), x in point()) {
        let lhs = &(&p + &q) * &r;
        let rhs = &(&p * &r) + &(&q * &r);
        let scale = lhs.abs_eval(&x) + rhs.abs_eval(&x);
        prop_assert!(close(lhs.eval(&x).unwrap(), rhs.eval(&x).unwrap(), scale, 1e-12));
    }

    #[test]
    fn derivative_is_linear_and_leibniz(p in poly(), q in poly(), i in 0usize..3, a in -5.0f64..5.0, x in point()) {
        let d = |f: &Polynomial| f.derivative(i).unwrap();
        let lin = &d(&(&p.scale(a) + &q)) - &(&d(&p).scale(a) + &d(&q));
        let prod = &d(&(&p * &q)) - &(&(&d(&p) * &q) + &(&p * &d(&q)));
        for r in [lin, prod] {
            let scale = r.abs_eval(&x) + p.abs_eval(&x) * q.abs_eval(&x) + 1.0;
            prop_assert!(r.eval(&x).unwrap().abs() <= 1e-11 * scale);
        }
    }

    #[test]
    fn derivative_matches_central_differences(p in poly(), i in 0usize..3, x in point()) {
        let h = 1e-5 * (1.0 + x[i].abs());
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += h;
        xm[i] -= h;
        let fd = (p.eval(&xp).unwrap() - p.eval(&xm).unwrap()) / (2.0 * h);
        let exact = p.derivative(i).unwrap().eval(&x).unwrap();
        // truncation is O(h²·p''') and rounding O(ε·|p|/h)
        let scale = p.abs_eval(&x) + p.derivative(i).unwrap().abs_eval(&x);
        prop_assert!((fd - exact).abs() <= 1e-6 * scale.max(1.0), "{} vs {}", fd, exact);
    }

    #[test]
    fn homogenize_keeps_degree(p in poly()) {
        let h = p.homogenize();
        prop_assert_eq!(h.nvars(), 4);
        prop_assert!(h.is_homogeneous());
        prop_assert_eq!(h.degree(), p.degree());
        prop_assert_eq!(h.dehomogenize(), p);
    }

    #[test]
    fn complex_evaluation_embeds_real(p in poly(), x in point()) {
        let z: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let c = p.eval(&z).unwrap();
        prop_assert_eq!(c.im, 0.0);
        prop_assert!(close(c.re, p.eval(&x).unwrap(), p.abs_eval(&x), 1e-14));
    }
}

#[test]
fn zero_polynomial_has_sentinel_degree() {
    let z = Polynomial::parse("0", &VARS).unwrap();
    assert!(z.is_zero());
    assert_eq!(z.degree(), Degree::MinusInfinity);
    assert_eq!(z.homogenize(), Polynomial::zero(4));
}

#[test]
fn identity_collapses_to_a_monomial() {
    let p = Polynomial::parse("(x+y)^2 - x^2 - 2*x*y", &VARS).unwrap();
    assert_eq!(p, Polynomial::parse("y^2", &VARS).unwrap());
}

#[test]
fn chart_restrictions() {
    let h = |s: &str| Polynomial::parse(s, &VARS).unwrap().homogenize().restrict_chart();
    let u = ["u", "v"];
    assert_eq!(h("x^2 + y^2 + z^2 - 1"), Polynomial::parse("1 + u^2 + v^2", &u).unwrap());
    assert_eq!(h("x + y"), Polynomial::parse("1 + u", &u).unwrap());
    assert_eq!(h("z"), Polynomial::parse("v", &u).unwrap());
    // the hyperboloid's chart restriction keeps its quadratic part
    assert_eq!(
        h("x^2 + y^2 - 1/4 - 3/2z^2"),
        Polynomial::parse("1 + u^2 - 1.5v^2", &u).unwrap()
    );
}

#[test]
fn derivatives_of_the_ellipsoid_factors() {
    let f3 = Polynomial::parse("100x^2 + 100y^2 + z^2 - 9", &VARS).unwrap();
    assert_eq!(f3.derivative(2).unwrap(), Polynomial::parse("2z", &VARS).unwrap());
    assert!(Polynomial::constant(3, 5.0).derivative(0).unwrap().is_zero());
    assert!(f3.derivative(3).is_err());
}

#[test]
fn cayley_cubic_vanishes_at_a_vertex() {
    let p = Polynomial::parse("2x*y*z - x^2 - y^2 - z^2 + 1", &VARS).unwrap();
    assert_eq!(p.eval(&[1.0, 1.0, 1.0]).unwrap(), 0.0);
    assert!(p.eval(&[1.0, 1.0]).is_err());
}
