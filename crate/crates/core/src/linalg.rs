//! Small dense linear algebra: partial-pivot LU over real or complex scalars
//! and the cyclic Jacobi eigensolver for symmetric matrices.
//!
//! Matrices are row-major `Vec`s; every system here has dimension at most a
//! handful, so nothing is blocked or vectorised.

use crate::poly::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Singular;

/// In-place LU factorisation with partial pivoting.
#[derive(Clone, Debug)]
pub struct Lu<S> {
    n: usize,
    lu: Vec<S>,
    perm: Vec<usize>,
}

impl<S: Scalar> Lu<S> {
    pub fn factor(mut a: Vec<S>, n: usize) -> Result<Self, Singular> {
        assert_eq!(a.len(), n * n);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|r| (r, a[r * n + k].modulus()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == 0.0 || !best.is_finite() {
                return Err(Singular);
            }
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
            }
            let pivot = a[k * n + k];
            for r in k + 1..n {
                let f = a[r * n + k] / pivot;
                a[r * n + k] = f;
                for c in k + 1..n {
                    let v = a[k * n + c];
                    a[r * n + c] -= f * v;
                }
            }
        }
        Ok(Lu { n, lu: a, perm })
    }

    pub fn solve(&self, b: &[S]) -> Vec<S> {
        let n = self.n;
        let mut x: Vec<S> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            for c in 0..r {
                let v = x[c];
                x[r] -= self.lu[r * n + c] * v;
            }
        }
        for r in (0..n).rev() {
            for c in r + 1..n {
                let v = x[c];
                x[r] -= self.lu[r * n + c] * v;
            }
            x[r] /= self.lu[r * n + r];
        }
        x
    }

    /// `‖A^{-1}‖_∞`, computed column by column.
    pub fn inverse_norm_inf(&self) -> f64 {
        let n = self.n;
        let mut row_sums = vec![0.0; n];
        for c in 0..n {
            let mut e = vec![S::zero(); n];
            e[c] = S::one();
            let col = self.solve(&e);
            for (s, v) in row_sums.iter_mut().zip(&col) {
                *s += v.modulus();
            }
        }
        row_sums.into_iter().fold(0.0, f64::max)
    }
}

pub fn norm_inf_matrix<S: Scalar>(a: &[S], n: usize) -> f64 {
    (0..n)
        .map(|r| a[r * n..(r + 1) * n].iter().map(Scalar::modulus).sum::<f64>())
        .fold(0.0, f64::max)
}

/// ∞-norm condition number, `f64::INFINITY` when singular.
pub fn condition_inf<S: Scalar>(a: &[S], n: usize) -> f64 {
    let na = norm_inf_matrix(a, n);
    match Lu::factor(a.to_vec(), n) {
        Ok(lu) => na * lu.inverse_norm_inf(),
        Err(Singular) => f64::INFINITY,
    }
}

pub fn solve<S: Scalar>(a: Vec<S>, n: usize, b: &[S]) -> Result<Vec<S>, Singular> {
    Ok(Lu::factor(a, n)?.solve(b))
}

pub fn norm2<S: Scalar>(v: &[S]) -> f64 {
    v.iter().map(|x| x.modulus().powi(2)).sum::<f64>().sqrt()
}

pub fn norm_inf<S: Scalar>(v: &[S]) -> f64 {
    v.iter().map(Scalar::modulus).fold(0.0, f64::max)
}

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub n: usize,
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `j` (row-major storage, `vectors[i * n + j]`) is the unit
    /// eigenvector for `values[j]`.
    pub vectors: Vec<f64>,
    pub sweeps: usize,
}

impl SymmetricEigen {
    const MAX_SWEEPS: usize = 100;

    /// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops
    /// below `1e-12` times the matrix norm.
    pub fn jacobi(m: &[f64], n: usize) -> Self {
        assert_eq!(m.len(), n * n);
        let mut a = m.to_vec();
        // symmetrise against rounding in the caller
        for i in 0..n {
            for j in i + 1..n {
                let s = 0.5 * (a[i * n + j] + a[j * n + i]);
                a[i * n + j] = s;
                a[j * n + i] = s;
            }
        }
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        let total: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let off = |a: &[f64]| -> f64 {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        s += a[i * n + j] * a[i * n + j];
                    }
                }
            }
            s.sqrt()
        };
        let mut sweeps = 0;
        while sweeps < Self::MAX_SWEEPS && off(&a) > 1e-12 * total.max(f64::MIN_POSITIVE) {
            sweeps += 1;
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let app = a[p * n + p];
                    let aqq = a[q * n + q];
                    let theta = (aqq - app) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
        let values = order.iter().map(|&i| a[i * n + i]).collect();
        let mut vectors = vec![0.0; n * n];
        for (new_j, &old_j) in order.iter().enumerate() {
            // first nonzero coordinate positive
            let lead = (0..n)
                .map(|i| v[i * n + old_j])
                .find(|x| x.abs() > 1e-14)
                .unwrap_or(1.0);
            let sign = lead.signum();
            for i in 0..n {
                vectors[i * n + new_j] = sign * v[i * n + old_j];
            }
        }
        SymmetricEigen {
            n,
            values,
            vectors,
            sweeps,
        }
    }

    pub fn vector(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.vectors[i * self.n + j]).collect()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    #[test]
    fn lu_complex_solve() {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let a = vec![one, i, 2.0 * one, -i];
        let x = vec![Complex64::new(0.5, -1.0), Complex64::new(2.0, 0.25)];
        let b = vec![a[0] * x[0] + a[1] * x[1], a[2] * x[0] + a[3] * x[1]];
        let got = solve(a, 2, &b).unwrap();
        for (g, e) in got.iter().zip(&x) {
            assert!((g - e).norm() < 1e-14);
        }
    }

    #[test]
    fn lu_detects_singular() {
        assert_eq!(solve(vec![1.0, 2.0, 2.0, 4.0], 2, &[1.0, 1.0]).err(), Some(Singular));
        assert!(condition_inf(&[1.0, 2.0, 2.0, 4.0], 2).is_infinite());
    }

    #[test]
    fn jacobi_diagonal_and_known() {
        let e = SymmetricEigen::jacobi(&[2.0, 1.0, 1.0, 2.0], 2);
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
        let v = e.vector(1);
        assert!((v[0] - v[1]).abs() < 1e-14 && v[0] > 0.0);
    }

    proptest! {
        #[test]
        fn jacobi_reconstructs(n in 1usize..6, entries in prop::collection::vec(-10.0f64..10.0, 36)) {
            let mut m = vec![0.0; n * n];
            for i in 0..n {
                for j in i..n {
                    m[i * n + j] = entries[i * 6 + j];
                    m[j * n + i] = entries[i * 6 + j];
                }
            }
            let e = SymmetricEigen::jacobi(&m, n);
            let scale = m.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
            let mut err = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let r: f64 = (0..n).map(|k| e.vectors[i * n + k] * e.values[k] * e.vectors[j * n + k]).sum();
                    err += (r - m[i * n + j]).powi(2);
                }
            }
            prop_assert!(err.sqrt() / scale <= 1e-9);
            // orthonormal columns
            for a in 0..n {
                for b in 0..n {
                    let d: f64 = (0..n).map(|k| e.vectors[k * n + a] * e.vectors[k * n + b]).sum();
                    let want = if a == b { 1.0 } else { 0.0 };
                    prop_assert!((d - want).abs() < 1e-10);
                }
            }
        }
    }
}
