use std::collections::BTreeSet;

use carver_core::generate::random_arrangement;
use carver_core::poly::Arrangement;
use carver_core::regions::{compute_regions, euler_characteristic, membership, RegionsError, RegionsOptions};
use proptest::prelude::*;

/// Solves `A x = b` for a small dense system, or `None` when singular.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-12 {
            return None;
        }
        a.swap(p, c);
        b.swap(p, c);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn combinations(k: usize, n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    (0..k)
        .flat_map(|last| {
            combinations(last, n - 1).into_iter().map(move |mut c| {
                c.push(last);
                c
            })
        })
        .collect()
}

fn binomial(k: usize, j: usize) -> usize {
    (0..j).fold(1, |acc, i| acc * (k - i) / (i + 1))
}

/// Sign vectors of every region of a generic affine hyperplane arrangement.
/// Each region has a vertex on its boundary, so steering the `n`
/// hyperplanes through a vertex to every small sign pattern visits all of
/// them.
fn hyperplane_sign_vectors(arr: &Arrangement) -> BTreeSet<Vec<i8>> {
    let n = arr.nvars();
    let lin: Vec<(Vec<f64>, f64)> = arr
        .polys()
        .iter()
        .map(|p| {
            let zero = vec![0.0; n];
            let c = p.eval(&zero).unwrap();
            let a = (0..n).map(|i| p.derivative(i).unwrap().eval(&zero).unwrap()).collect();
            (a, c)
        })
        .collect();
    let mut out = BTreeSet::new();
    for vertex in combinations(arr.len(), n) {
        for mask in 0..(1u32 << n) {
            let eps: Vec<f64> = (0..n).map(|i| if mask & (1 << i) != 0 { 1e-6 } else { -1e-6 }).collect();
            let a = vertex.iter().map(|&j| lin[j].0.clone()).collect();
            let b = vertex.iter().zip(&eps).map(|(&j, e)| e - lin[j].1).collect();
            let x = solve(a, b).expect("generic hyperplanes meet in a point");
            out.insert(arr.polys().iter().map(|p| if p.eval(&x).unwrap() > 0.0 { 1 } else { -1 }).collect());
        }
    }
    out
}

fn check_hyperplanes(n: usize, k: usize, seed: u64) {
    let arr = random_arrangement(n, k, 1, seed);
    let res = compute_regions(&arr, seed, &RegionsOptions::default()).unwrap();
    let want = hyperplane_sign_vectors(&arr);
    assert_eq!(want.len(), (0..=n).map(|j| binomial(k, j)).sum::<usize>());
    let got: BTreeSet<Vec<i8>> = res.regions.iter().map(|r| r.sigma.clone()).collect();
    assert_eq!(res.regions.len(), got.len(), "n={n} k={k} seed={seed}: a convex region was split");
    assert_eq!(got, want, "n={n} k={k} seed={seed}");
    for r in &res.regions {
        assert_eq!(r.chi, 1);
    }
}

#[test]
fn generic_lines() {
    for k in 3..=5 {
        for seed in 0..2 {
            check_hyperplanes(2, k, 10 * k as u64 + seed);
        }
    }
}

#[test]
fn generic_planes() {
    for k in 3..=4 {
        check_hyperplanes(3, k, 70 + k as u64);
    }
}

#[test]
fn same_seed_same_regions() {
    let arr = random_arrangement(2, 3, 2, 8);
    let a = compute_regions(&arr, 5, &RegionsOptions::default()).unwrap();
    let b = compute_regions(&arr, 5, &RegionsOptions { parallel: false, ..RegionsOptions::default() }).unwrap();
    assert_eq!(a.regions, b.regions);
    assert_eq!(a.critical_points, b.critical_points);
    assert_eq!(a.region_of, b.region_of);
}

#[test]
fn annulus_and_disc() {
    let arr = Arrangement::parse(&["x^2 + y^2 - 1", "x^2 + y^2 - 4"], &["x", "y"]).unwrap();
    let res = compute_regions(&arr, 1, &RegionsOptions::default()).unwrap();
    let mut chis: Vec<(String, i64)> = res
        .regions
        .iter()
        .map(|r| (carver_core::regions::sigma_string(&r.sigma), r.chi))
        .collect();
    chis.sort();
    assert_eq!(chis, [("++".to_string(), 0), ("+-".to_string(), 0), ("--".to_string(), 1)]);
    assert_eq!(membership(&res, &[0.1, -0.2]).unwrap().sigma, [-1, -1]);
    assert_eq!(membership(&res, &[1.5, 0.0]).unwrap().sigma, [1, -1]);
    assert_eq!(membership(&res, &[0.0, -30.0]).unwrap().sigma, [1, 1]);
    assert!(matches!(membership(&res, &[0.0, 2.0]), Err(RegionsError::OnHypersurface { index: 1 })));
}

#[test]
fn members_are_consistent() {
    let res = compute_regions(&random_arrangement(2, 2, 2, 3), 3, &RegionsOptions::default()).unwrap();
    let total: usize = res.regions.iter().map(|r| r.members.len()).sum();
    assert_eq!(total, res.critical_points.len());
    for r in &res.regions {
        assert_eq!(r.mu.iter().sum::<usize>(), r.members.len());
        assert_eq!(r.chi, euler_characteristic(&r.mu));
        assert!(r.mu[0] >= 1);
        for &i in &r.members {
            assert_eq!(res.region_of[i], r.id);
            assert_eq!(res.critical_points[i].sigma, r.sigma);
        }
    }
    assert!(res.diagnostics.complex_critical_points as u64 <= res.diagnostics.bound.bound);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn region_count_within_the_bound(seed in 0u64..10_000, k in 1usize..=3, d in 1u32..=2) {
        let arr = random_arrangement(2, k, d, seed);
        let res = compute_regions(&arr, seed, &RegionsOptions::default()).unwrap();
        prop_assert!(res.regions.len() as u64 <= res.diagnostics.bound.bound);
        prop_assert!(res.diagnostics.real_critical_points <= res.diagnostics.complex_critical_points);
        prop_assert!(!res.diagnostics.incomplete_graph);
    }
}

#[test]
fn saddle_flow_into_a_maximum_beside_a_curve() {
    // one maximum sits so close to a conic that rounding keeps the gradient
    // above the flow's trigger at the point itself
    let res = compute_regions(&random_arrangement(2, 2, 2, 180), 180, &RegionsOptions::default()).unwrap();
    assert!(!res.diagnostics.incomplete_graph);
    assert_eq!(res.diagnostics.dropped_edges, 0);
    assert!(res.regions.len() as u64 <= res.diagnostics.bound.bound);
}
