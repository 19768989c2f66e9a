use carver_core::generate::{monomials_up_to, random_arrangement, random_pencil, spectrahedron_minors, subsets};
use proptest::prelude::*;

/// Determinant by Gaussian elimination with partial pivoting.
fn numeric_det(mut a: Vec<f64>, m: usize) -> f64 {
    let mut det = 1.0;
    for c in 0..m {
        let p = (c..m).max_by(|&i, &j| a[i * m + c].abs().total_cmp(&a[j * m + c].abs())).unwrap();
        if a[p * m + c] == 0.0 {
            return 0.0;
        }
        if p != c {
            for k in 0..m {
                a.swap(p * m + k, c * m + k);
            }
            det = -det;
        }
        det *= a[c * m + c];
        for r in c + 1..m {
            let f = a[r * m + c] / a[c * m + c];
            for k in c..m {
                a[r * m + k] -= f * a[c * m + k];
            }
        }
    }
    det
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn minors_match_numeric_determinants(
        n in 1usize..=3,
        m in 1usize..=4,
        seed in 0u64..1000,
        x in prop::collection::vec(-2.0f64..2.0, 3),
    ) {
        let x = &x[..n];
        let pencil = random_pencil(n, m, seed);
        let at: Vec<f64> = pencil.iter().map(|p| p.eval(x).unwrap()).collect();
        for i in 0..m {
            for j in 0..m {
                prop_assert_eq!(&pencil[i * m + j], &pencil[j * m + i]);
            }
        }
        let arr = spectrahedron_minors(n, m, seed);
        prop_assert_eq!(arr.len(), (1 << m) - 1);
        for (s, minor) in subsets(m).iter().zip(arr.polys()) {
            let sub: Vec<f64> = s.iter().flat_map(|&i| s.iter().map(move |&j| (i, j))).map(|(i, j)| at[i * m + j]).collect();
            let want = numeric_det(sub, s.len());
            let got = minor.eval(x).unwrap();
            let scale = minor.abs_eval(x).max(1.0);
            prop_assert!((got - want).abs() <= 1e-10 * scale, "subset {:?}: {} vs {}", s, got, want);
            prop_assert_eq!(minor.degree_or_zero() as usize, s.len());
        }
    }
}

#[test]
fn three_by_three_minor_degrees() {
    for seed in 0..5 {
        assert_eq!(spectrahedron_minors(3, 3, seed).degrees(), [1, 1, 1, 2, 2, 2, 3]);
    }
}

#[test]
fn monomial_counts_are_binomial() {
    // C(n + d, d)
    assert_eq!(monomials_up_to(3, 2).len(), 10);
    assert_eq!(monomials_up_to(2, 3).len(), 10);
    assert_eq!(monomials_up_to(4, 4).len(), 70);
    assert_eq!(monomials_up_to(1, 5).len(), 6);
    let m = monomials_up_to(2, 2);
    assert_eq!(m[0], [0, 0]);
    assert!(m.windows(2).all(|w| w[0].iter().sum::<u32>() <= w[1].iter().sum::<u32>()));
}

#[test]
fn random_arrangements_are_seeded() {
    let a = random_arrangement(2, 3, 2, 42);
    assert_eq!(a, random_arrangement(2, 3, 2, 42));
    assert_ne!(a, random_arrangement(2, 3, 2, 43));
    assert!(a.polys().iter().all(|p| p.num_terms() == 6));
}
