//! The Morse function `g = ∏|f_i|^{s_i} / q^t` and its logarithm.
//!
//! All downstream numerics work with `log g`. Inside a region `g > 0`, so
//! `∇g = g ∇log g`; both fields have the same integral curves and critical
//! points, and at a critical point `Hess g = g · Hess log g`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::linalg::SymmetricEigen;
use crate::poly::{Arrangement, Polynomial};

/// Relative floor below which a point counts as lying on `f_i = 0`.
pub const ON_HYPERSURFACE_REL: f64 = 1e-12;

/// Constant added to the sum of squared affine forms in a random `q`.
pub const Q_OFFSET: f64 = 4.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MorseError {
    #[error("exponents violate Σ s_i deg f_i < 2t: {lhs} >= {}", 2 * .t)]
    InvalidExponents { lhs: u64, t: u32 },
    #[error("expected {expected} exponents s_i, got {got}")]
    ExponentCount { expected: usize, got: usize },
    #[error("exponents must be positive integers")]
    NonPositiveExponent,
    #[error("point lies on hypersurface f_{} = 0", .index + 1)]
    OnHypersurface { index: usize },
    #[error("point has {got} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("denominator is not a positive quadric: {0}")]
    BadDenominator(String),
}

/// `log g`, `∇ log g` and optionally the Hessian (row-major `n × n`).
#[derive(Clone, Debug, PartialEq)]
pub struct LogGradient {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hessian: Option<Vec<f64>>,
}

#[derive(Clone, Debug)]
struct Derivs {
    grad: Vec<Polynomial>,
    /// upper triangle, row-major `(a, b)` with `a <= b`
    hess: Vec<Polynomial>,
}

impl Derivs {
    fn of(p: &Polynomial) -> Self {
        let n = p.nvars();
        let grad = p.gradient();
        let mut hess = Vec::with_capacity(n * (n + 1) / 2);
        for a in 0..n {
            for b in a..n {
                hess.push(grad[a].derivative(b).expect("index in range"));
            }
        }
        Derivs { grad, hess }
    }
}

#[derive(Clone, Debug)]
pub struct MorseFunction {
    arrangement: Arrangement,
    q: Polynomial,
    s: Vec<u32>,
    t: u32,
    seed: u64,
    f_derivs: Vec<Derivs>,
    q_derivs: Derivs,
}

/// Default `t`: the smallest integer with `Σ s_i d_i < 2t`.
pub fn default_t(s: &[u32], degrees: &[u32]) -> u32 {
    let lhs: u64 = s.iter().zip(degrees).map(|(&a, &d)| u64::from(a) * u64::from(d)).sum();
    (lhs / 2 + 1) as u32
}

/// `Σ_{j=1}^{n+1} ℓ_j(x)^2 + 4` with standard-Gaussian affine forms `ℓ_j`.
pub fn random_quadric(nvars: usize, seed: u64) -> Polynomial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = Polynomial::constant(nvars, Q_OFFSET);
    for _ in 0..=nvars {
        let mut l = Polynomial::constant(nvars, StandardNormal.sample(&mut rng));
        for i in 0..nvars {
            let a: f64 = StandardNormal.sample(&mut rng);
            l = &l + &Polynomial::var(nvars, i).scale(a);
        }
        q = &q + &(&l * &l);
    }
    q
}

/// Checks that `q` has degree 2 and a positive minimum on `R^n`.
pub fn check_positive_quadric(q: &Polynomial) -> Result<(), MorseError> {
    let n = q.nvars();
    if q.degree().finite() != Some(2) && !(n == 0 && q.degree().finite() == Some(0)) {
        return Err(MorseError::BadDenominator(format!(
            "degree {:?}, expected 2",
            q.degree()
        )));
    }
    if n == 0 {
        return if q.coefficient(&[]) > 0.0 {
            Ok(())
        } else {
            Err(MorseError::BadDenominator("nonpositive constant".into()))
        };
    }
    // q = x^T A x + b·x + c
    let mut a = vec![0.0; n * n];
    let mut b = vec![0.0; n];
    let mut c = 0.0;
    for (m, coef) in q.terms() {
        let e = m.exponents();
        let nz: Vec<usize> = (0..n).filter(|&i| e[i] > 0).collect();
        match (m.total_degree(), nz.as_slice()) {
            (0, _) => c = coef,
            (1, [i]) => b[*i] = coef,
            (2, [i]) => a[i * n + i] = coef,
            (2, [i, j]) => {
                a[i * n + j] = coef / 2.0;
                a[j * n + i] = coef / 2.0;
            }
            _ => unreachable!("degree checked"),
        }
    }
    let eig = SymmetricEigen::jacobi(&a, n);
    let lo = eig.values[0];
    if lo <= 1e-12 * eig.spectral_radius().max(1.0) {
        return Err(MorseError::BadDenominator(
            "quadratic part is not positive definite".into(),
        ));
    }
    // minimum value c - b^T A^{-1} b / 4 via the eigenbasis
    let mut quad = 0.0;
    for j in 0..n {
        let v = eig.vector(j);
        let proj: f64 = v.iter().zip(&b).map(|(x, y)| x * y).sum();
        quad += proj * proj / eig.values[j];
    }
    let min = c - quad / 4.0;
    if min <= 0.0 {
        return Err(MorseError::BadDenominator(format!(
            "minimum value {min} is not positive"
        )));
    }
    Ok(())
}

impl MorseFunction {
    /// Builds `g` with a seeded random denominator. Missing `s` defaults to
    /// all ones and missing `t` to [`default_t`].
    pub fn build(
        arrangement: Arrangement,
        seed: u64,
        s: Option<Vec<u32>>,
        t: Option<u32>,
    ) -> Result<Self, MorseError> {
        let q = random_quadric(arrangement.nvars(), seed);
        Self::with_denominator(arrangement, q, seed, s, t)
    }

    /// Builds `g` with a caller-supplied positive quadric.
    pub fn with_denominator(
        arrangement: Arrangement,
        q: Polynomial,
        seed: u64,
        s: Option<Vec<u32>>,
        t: Option<u32>,
    ) -> Result<Self, MorseError> {
        if q.nvars() != arrangement.nvars() {
            return Err(MorseError::DimensionMismatch {
                expected: arrangement.nvars(),
                got: q.nvars(),
            });
        }
        check_positive_quadric(&q)?;
        Self::assemble(arrangement, q, seed, s, t)
    }

    /// Same as [`with_denominator`](Self::with_denominator) without the
    /// positivity check; used for restrictions whose positivity is structural.
    pub(crate) fn assemble(
        arrangement: Arrangement,
        q: Polynomial,
        seed: u64,
        s: Option<Vec<u32>>,
        t: Option<u32>,
    ) -> Result<Self, MorseError> {
        let k = arrangement.len();
        let s = s.unwrap_or_else(|| vec![1; k]);
        if s.len() != k {
            return Err(MorseError::ExponentCount {
                expected: k,
                got: s.len(),
            });
        }
        if s.contains(&0) {
            return Err(MorseError::NonPositiveExponent);
        }
        let degrees = arrangement.degrees();
        let t = t.unwrap_or_else(|| default_t(&s, &degrees));
        if t == 0 {
            return Err(MorseError::NonPositiveExponent);
        }
        let lhs: u64 = s
            .iter()
            .zip(&degrees)
            .map(|(&a, &d)| u64::from(a) * u64::from(d))
            .sum();
        if lhs >= 2 * u64::from(t) {
            return Err(MorseError::InvalidExponents { lhs, t });
        }
        let f_derivs = arrangement.polys().iter().map(Derivs::of).collect();
        let q_derivs = Derivs::of(&q);
        Ok(MorseFunction {
            arrangement,
            q,
            s,
            t,
            seed,
            f_derivs,
            q_derivs,
        })
    }

    pub fn arrangement(&self) -> &Arrangement {
        &self.arrangement
    }

    pub fn nvars(&self) -> usize {
        self.arrangement.nvars()
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.q
    }

    pub fn s(&self) -> &[u32] {
        &self.s
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), MorseError> {
        if x.len() != self.nvars() {
            return Err(MorseError::DimensionMismatch {
                expected: self.nvars(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Index of the first `f_i` whose value is below `rel` relative to the
    /// size of its terms (see [`Polynomial::relative_value`]).
    pub fn near_hypersurface(&self, x: &[f64], rel: f64) -> Option<usize> {
        self.arrangement
            .polys()
            .iter()
            .position(|f| f.relative_value(x) < rel)
    }

    pub fn eval_log_g(&self, x: &[f64], with_hessian: bool) -> Result<LogGradient, MorseError> {
        self.check_dim(x)?;
        if let Some(index) = self.near_hypersurface(x, ON_HYPERSURFACE_REL) {
            return Err(MorseError::OnHypersurface { index });
        }
        let n = self.nvars();
        let mut value = 0.0;
        let mut grad = vec![0.0; n];
        let mut hess = if with_hessian { vec![0.0; n * n] } else { Vec::new() };
        let mut accumulate = |weight: f64, p: &Polynomial, d: &Derivs, value: &mut f64| {
            let pv = p.eval_unchecked(x);
            *value += weight * pv.abs().ln();
            let g: Vec<f64> = d.grad.iter().map(|dp| dp.eval_unchecked(x) / pv).collect();
            for i in 0..n {
                grad[i] += weight * g[i];
            }
            if with_hessian {
                let mut idx = 0;
                for a in 0..n {
                    for b in a..n {
                        let h = weight * (d.hess[idx].eval_unchecked(x) / pv - g[a] * g[b]);
                        hess[a * n + b] += h;
                        if a != b {
                            hess[b * n + a] += h;
                        }
                        idx += 1;
                    }
                }
            }
        };
        for ((f, d), &s) in self
            .arrangement
            .polys()
            .iter()
            .zip(&self.f_derivs)
            .zip(&self.s)
        {
            accumulate(f64::from(s), f, d, &mut value);
        }
        accumulate(-f64::from(self.t), &self.q, &self.q_derivs, &mut value);
        Ok(LogGradient {
            value,
            grad,
            hessian: with_hessian.then_some(hess),
        })
    }

    /// `g(x)` itself; underflows for far-away points.
    pub fn eval_g(&self, x: &[f64]) -> Result<f64, MorseError> {
        Ok(self.eval_log_g(x, false)?.value.exp())
    }

    pub fn signs(&self, x: &[f64]) -> Vec<i8> {
        self.arrangement
            .polys()
            .iter()
            .map(|f| if f.eval_unchecked(x) > 0.0 { 1 } else { -1 })
            .collect()
    }
}
