//! Seeded random arrangements: dense Gaussian polynomials and principal
//! minors of symmetric matrix pencils.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::poly::{Arrangement, Polynomial};

/// Exponent vectors of total degree at most `d` in `n` variables, in
/// ascending graded order.
pub fn monomials_up_to(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(n, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d, &mut Vec::new(), &mut out);
    out.sort_by_key(|e| (e.iter().sum::<u32>(), e.clone()));
    out
}

/// `k` dense polynomials of degree `d` in `n` variables with independent
/// standard Gaussian coefficients.
pub fn random_arrangement(n: usize, k: usize, d: u32, seed: u64) -> Arrangement {
    assert!(n >= 1 && k >= 1 && d >= 1, "n, k, d must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let monos = monomials_up_to(n, d);
    let polys = (0..k)
        .map(|_| {
            Polynomial::from_terms(
                n,
                monos
                    .iter()
                    .map(|e| (e.clone(), StandardNormal.sample(&mut rng)))
                    .collect::<Vec<_>>(),
            )
            .expect("exponent lengths match")
        })
        .collect();
    Arrangement::new(n, polys).expect("nonzero Gaussian polynomials")
}

/// Symmetric `m × m` pencil `A_0 + x_1 A_1 + … + x_n A_n`, row-major, with
/// polynomial entries.
pub fn random_pencil(n: usize, m: usize, seed: u64) -> Vec<Polynomial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = vec![Polynomial::zero(n); m * m];
    for l in 0..=n {
        for i in 0..m {
            for j in i..m {
                let c: f64 = StandardNormal.sample(&mut rng);
                let term = if l == 0 {
                    Polynomial::constant(n, c)
                } else {
                    Polynomial::var(n, l - 1).scale(c)
                };
                a[i * m + j] = &a[i * m + j] + &term;
                if i != j {
                    a[j * m + i] = &a[j * m + i] + &term;
                }
            }
        }
    }
    a
}

/// Determinant by cofactor expansion along the first row.
pub fn determinant(a: &[Polynomial], m: usize, nvars: usize) -> Polynomial {
    if m == 0 {
        return Polynomial::constant(nvars, 1.0);
    }
    if m == 1 {
        return a[0].clone();
    }
    let mut det = Polynomial::zero(nvars);
    for c in 0..m {
        if a[c].is_zero() {
            continue;
        }
        let minor: Vec<Polynomial> = (1..m)
            .flat_map(|r| (0..m).filter(move |&cc| cc != c).map(move |cc| (r, cc)))
            .map(|(r, cc)| a[r * m + cc].clone())
            .collect();
        let term = &a[c] * &determinant(&minor, m - 1, nvars);
        det = if c % 2 == 0 { &det + &term } else { &det - &term };
    }
    det
}

/// Nonempty subsets of `0..m`, by size and then lexicographically.
pub fn subsets(m: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1u32..(1 << m))
        .map(|mask| (0..m).filter(|&i| mask & (1 << i) != 0).collect())
        .collect();
    out.sort_by(|a: &Vec<usize>, b: &Vec<usize>| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

/// All `2^m - 1` principal minors of a seeded random pencil.
pub fn spectrahedron_minors(n: usize, m: usize, seed: u64) -> Arrangement {
    assert!(n >= 1 && m >= 1, "n and m must be positive");
    let a = random_pencil(n, m, seed);
    let polys = subsets(m)
        .iter()
        .map(|s| {
            let sub: Vec<Polynomial> = s
                .iter()
                .flat_map(|&i| s.iter().map(move |&j| (i, j)))
                .map(|(i, j)| a[i * m + j].clone())
                .collect();
            determinant(&sub, s.len(), n)
        })
        .collect();
    Arrangement::new(n, polys).expect("random minors are nonzero")
}
