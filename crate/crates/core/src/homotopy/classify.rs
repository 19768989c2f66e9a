use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, SymmetricEigen};
use crate::morse::{MorseError, MorseFunction, ON_HYPERSURFACE_REL};
use crate::poly::Arrangement;

/// Eigenvalues smaller than this fraction of the spectral radius make the
/// Hessian degenerate. Beyond the unit ball the fraction shrinks by
/// `‖x‖²`: far out, curvature along an asymptotic direction falls off like
/// `1/‖x‖²` while curvature across a nearby hypersurface does not.
pub const DEGENERACY_REL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("sign of f_{} is ambiguous at this point", .index + 1)]
    AmbiguousSign { index: usize },
    #[error("point is not critical: gradient norm {grad_norm:e}")]
    NotCritical { grad_norm: f64 },
    #[error("degenerate Hessian: smallest |eigenvalue| {smallest:e} vs spectral radius {radius:e}")]
    DegenerateHessian { smallest: f64, radius: f64 },
    #[error(transparent)]
    Morse(#[from] MorseError),
}

/// A real critical point of `log g` with its Morse data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub x: Vec<f64>,
    pub log_g: f64,
    /// Number of positive Hessian eigenvalues.
    pub index: usize,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unit eigenvectors of the positive eigenvalues, in ascending
    /// eigenvalue order.
    pub unstable_eigenvectors: Vec<Vec<f64>>,
    pub sigma: Vec<i8>,
}

pub fn sign_vector(arr: &Arrangement, x: &[f64]) -> Result<Vec<i8>, ClassifyError> {
    arr.polys()
        .iter()
        .enumerate()
        .map(|(index, f)| {
            let v = f.eval(x).map_err(|_| {
                ClassifyError::Morse(MorseError::DimensionMismatch {
                    expected: arr.nvars(),
                    got: x.len(),
                })
            })?;
            if f.relative_value(x) < ON_HYPERSURFACE_REL {
                Err(ClassifyError::AmbiguousSign { index })
            } else {
                Ok(if v > 0.0 { 1 } else { -1 })
            }
        })
        .collect()
}

/// Newton iterations on `∇ log g = 0` starting from `x`; stops when the step
/// stops shrinking.
pub fn polish(m: &MorseFunction, x: &[f64], iters: usize) -> Vec<f64> {
    let n = x.len();
    let mut x = x.to_vec();
    let mut last = f64::INFINITY;
    for _ in 0..iters {
        let Ok(e) = m.eval_log_g(&x, true) else { break };
        let rhs: Vec<f64> = e.grad.iter().map(|v| -v).collect();
        let Ok(dx) = linalg::solve(e.hessian.unwrap(), n, &rhs) else {
            break;
        };
        let dn = linalg::norm_inf(&dx);
        if !dn.is_finite() || dn >= last {
            break;
        }
        let cand: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
        if m.near_hypersurface(&cand, ON_HYPERSURFACE_REL).is_some() {
            break;
        }
        x = cand;
        last = dn;
        if dn <= 1e-15 * (1.0 + linalg::norm_inf(&x)) {
            break;
        }
    }
    x
}

/// Hessian eigen-decomposition and index of a real critical point.
pub fn classify_critical_point(
    m: &MorseFunction,
    x: &[f64],
) -> Result<CriticalPoint, ClassifyError> {
    let n = m.nvars();
    let sigma = sign_vector(m.arrangement(), x)?;
    let e = m.eval_log_g(x, true)?;
    let grad_norm = linalg::norm2(&e.grad);
    let eig = SymmetricEigen::jacobi(e.hessian.as_ref().unwrap(), n);
    let radius = eig.spectral_radius();
    let smallest = eig.values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let scale = 1.0 + linalg::norm2(x);
    if grad_norm >= 1e-8 * scale {
        // close to a hypersurface the gradient terms are huge and rounding
        // alone leaves a large residual; judge by the Newton step instead
        let step = (0..n)
            .map(|j| {
                let v = eig.vector(j);
                let c: f64 = v.iter().zip(&e.grad).map(|(a, b)| a * b).sum();
                (c / eig.values[j]).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        if step.is_nan() || step > 1e-10 * scale {
            return Err(ClassifyError::NotCritical { grad_norm });
        }
    }
    let far = linalg::norm2(x).max(1.0).powi(2);
    if n > 0 && smallest < DEGENERACY_REL * radius / far || radius == 0.0 && n > 0 {
        return Err(ClassifyError::DegenerateHessian { smallest, radius });
    }
    let unstable: Vec<usize> = (0..n).filter(|&j| eig.values[j] > 0.0).collect();
    Ok(CriticalPoint {
        x: x.to_vec(),
        log_g: e.value,
        index: unstable.len(),
        unstable_eigenvectors: unstable.iter().map(|&j| eig.vector(j)).collect(),
        eigenvalues: eig.values,
        sigma,
    })
}
