//! Ascending gradient flow of `log g` and matching of its limit against the
//! known critical points.
//!
//! Inside a region `∇g = g ∇log g` with `g > 0`, so the two fields share
//! their integral curves; `∇log g` is the better-scaled one.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::homotopy::{polish, CriticalPoint};
use crate::linalg;
use crate::morse::{MorseError, MorseFunction};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("flow broke down near f_{} = 0 after {steps} steps", .index + 1)]
    Breakdown { index: usize, steps: usize },
    #[error(transparent)]
    Morse(#[from] MorseError),
}

#[derive(Clone, Debug)]
pub struct FlowOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Gradient norm that triggers a Newton polish and a match attempt.
    pub grad_tol: f64,
    pub max_steps: usize,
    /// Matching radius relative to `1 + ‖p‖`.
    pub match_rel: f64,
    /// Floor (relative, as in [`MorseFunction::near_hypersurface`]) under
    /// which a trial step counts as touching a hypersurface.
    pub hypersurface_rel: f64,
    /// Keep every accepted state in [`FlowResult::checkpoints`].
    pub record: bool,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            rtol: 1e-8,
            atol: 1e-10,
            grad_tol: 1e-7,
            max_steps: 1_000_000,
            match_rel: 1e-5,
            hypersurface_rel: 1e-10,
            record: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowResult {
    /// Position of the limit in the critical-point list, if matched.
    pub limit_index: Option<usize>,
    pub trajectory_len: usize,
    pub final_grad_norm: f64,
    pub endpoint: Vec<f64>,
    pub start_log_g: f64,
    pub end_log_g: f64,
    /// Accepted states `(x, log g)` when recording was requested.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub checkpoints: Vec<(Vec<f64>, f64)>,
}

/// Accepted steps between match attempts made regardless of the gradient.
const STALL_CHECK: usize = 256;

// Dormand–Prince 5(4) tableau; the field is autonomous, so the nodes are
// not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Field<'a> {
    m: &'a MorseFunction,
    sigma: Vec<i8>,
    rel: f64,
}

impl Field<'_> {
    /// `(log g, ∇log g)` if `x` is in the starting region and clear of the
    /// hypersurfaces, else the offending factor.
    fn eval(&self, x: &[f64]) -> Result<(f64, Vec<f64>), usize> {
        if let Some(i) = self.m.near_hypersurface(x, self.rel) {
            return Err(i);
        }
        if let Some(i) = self.m.signs(x).iter().zip(&self.sigma).position(|(a, b)| a != b) {
            return Err(i);
        }
        let e = self.m.eval_log_g(x, false).map_err(|_| 0usize)?;
        Ok((e.value, e.grad))
    }
}

enum Step {
    Accepted {
        x: Vec<f64>,
        value: f64,
        grad: Vec<f64>,
        err: f64,
    },
    Rejected {
        err: f64,
        blocked: Option<usize>,
    },
}

fn dp45(field: &Field, x: &[f64], value: f64, k1: &[f64], h: f64, opts: &FlowOptions) -> Step {
    let n = x.len();
    let mut k: Vec<Vec<f64>> = vec![k1.to_vec()];
    for s in 1..6 {
        let xs: Vec<f64> = (0..n)
            .map(|i| x[i] + h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>())
            .collect();
        match field.eval(&xs) {
            Ok((_, g)) => k.push(g),
            Err(i) => {
                return Step::Rejected {
                    err: f64::INFINITY,
                    blocked: Some(i),
                }
            }
        }
    }
    let xn: Vec<f64> = (0..n)
        .map(|i| x[i] + h * (0..6).map(|j| A[6][j] * k[j][i]).sum::<f64>())
        .collect();
    let (vn, gn) = match field.eval(&xn) {
        Ok(v) => v,
        Err(i) => {
            return Step::Rejected {
                err: f64::INFINITY,
                blocked: Some(i),
            }
        }
    };
    k.push(gn.clone());
    let mut err: f64 = 0.0;
    for i in 0..n {
        let e = h * (0..7).map(|j| (A[6].get(j).copied().unwrap_or(0.0) - B4[j]) * k[j][i]).sum::<f64>();
        let sc = opts.atol + opts.rtol * x[i].abs().max(xn[i].abs());
        err = err.max((e / sc).abs());
    }
    // ascent, with slack for rounding in log g
    if err <= 1.0 && vn < value - 1e-9 * (1.0 + value.abs()) {
        return Step::Rejected {
            err: 2.0,
            blocked: None,
        };
    }
    if err <= 1.0 {
        Step::Accepted {
            x: xn,
            value: vn,
            grad: gn,
            err,
        }
    } else {
        Step::Rejected { err, blocked: None }
    }
}

fn nearest_match(
    p: &[f64],
    crit: &[CriticalPoint],
    rel: f64,
    floor_value: f64,
    start: &[f64],
) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in crit.iter().enumerate() {
        let d = dist(p, &c.x);
        let radius = rel * (1.0 + linalg::norm2(&c.x));
        if d >= radius {
            continue;
        }
        let start_here = dist(start, &c.x) < radius;
        if !(start_here || c.log_g > floor_value) {
            continue;
        }
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| i)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

/// Integrates `ẋ = ∇log g` from `x0` until it settles at a local maximum of
/// `log g`, then matches the limit against `crit`.
pub fn flow_to_critical_point(
    m: &MorseFunction,
    x0: &[f64],
    crit: &[CriticalPoint],
    opts: &FlowOptions,
) -> Result<FlowResult, FlowError> {
    let start = m.eval_log_g(x0, false)?;
    let field = Field {
        m,
        sigma: m.signs(x0),
        rel: opts.hypersurface_rel,
    };
    let mut x = x0.to_vec();
    let mut value = start.value;
    let mut grad = start.grad;
    let mut gn = linalg::norm2(&grad);
    let mut h = 1e-3 * (1.0 + linalg::norm2(&x)) / gn.max(1e-12);
    let mut steps = 0;
    let mut checkpoints = Vec::new();
    if opts.record {
        checkpoints.push((x.clone(), value));
    }
    let mut trigger = opts.grad_tol;
    let finish = |limit, x: Vec<f64>, steps, gn, value, checkpoints| FlowResult {
        limit_index: limit,
        trajectory_len: steps,
        final_grad_norm: gn,
        endpoint: x,
        start_log_g: start.value,
        end_log_g: value,
        checkpoints,
    };
    // generic trajectories end at local maxima; a saddle hit is a near miss
    // and the flow keeps going
    let matched_maximum = |x: &[f64]| {
        let p = polish(m, x, 8);
        nearest_match(&p, crit, opts.match_rel, start.value, x0).filter(|&i| crit[i].index == 0)
    };
    loop {
        // next to a hypersurface rounding can hold the gradient above the
        // trigger at the maximum itself, so also try a match now and then
        if steps > 0 && steps % STALL_CHECK == 0 && gn >= trigger {
            let arrived = |&i: &usize| dist(&x, &crit[i].x) < opts.match_rel * (1.0 + linalg::norm2(&crit[i].x));
            if let Some(i) = matched_maximum(&x).filter(arrived) {
                return Ok(finish(Some(i), x, steps, gn, value, checkpoints));
            }
        }
        if gn < trigger {
            if let Some(i) = matched_maximum(&x) {
                return Ok(finish(Some(i), x, steps, gn, value, checkpoints));
            }
            if gn < 1e-13 {
                log::debug!("flow settled at an unknown point {x:?}");
                return Ok(finish(None, x, steps, gn, value, checkpoints));
            }
            trigger = gn * 0.1;
        }
        if steps >= opts.max_steps {
            return Ok(finish(None, x, steps, gn, value, checkpoints));
        }
        steps += 1;
        match dp45(&field, &x, value, &grad, h, opts) {
            Step::Accepted {
                x: xn,
                value: vn,
                grad: g,
                err,
            } => {
                x = xn;
                value = vn;
                grad = g;
                gn = linalg::norm2(&grad);
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                h *= factor;
                if opts.record {
                    checkpoints.push((x.clone(), value));
                }
            }
            Step::Rejected { err, blocked } => {
                let factor = if err.is_finite() {
                    (0.9 * err.powf(-0.2)).clamp(0.1, 0.5)
                } else {
                    0.25
                };
                h *= factor;
                let scale = 1.0 + linalg::norm2(&x);
                if h * gn < 1e-15 * scale {
                    return Err(FlowError::Breakdown {
                        index: blocked.unwrap_or(0),
                        steps,
                    });
                }
            }
        }
    }
}
