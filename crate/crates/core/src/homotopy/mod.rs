//! Complex critical points of `log g` by total-degree homotopy continuation,
//! and their reduction to classified real critical points.

mod bound;
mod classify;
mod system;
pub(crate) mod tracker;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec;
use crate::linalg;
use crate::morse::MorseFunction;
use crate::poly::Polynomial;

pub use bound::{ml_degree_bound, MlDegreeBound};
pub use classify::{classify_critical_point, sign_vector, ClassifyError, CriticalPoint, DEGENERACY_REL};
pub use classify::polish;
pub use system::{assemble_critical_system, CriticalSystem};
pub use tracker::{PathStatus, PathTrackRecord};

use tracker::{CompiledSystem, Homotopy};

/// Relative floor under which an endpoint counts as lying on `f_j = 0` or
/// `q = 0`, i.e. as an artifact of clearing denominators.
pub const EXTRANEOUS_REL: f64 = 1e-8;
/// Relative distance under which two endpoints are the same solution.
pub const DEDUP_REL: f64 = 1e-6;
/// Relative imaginary part under which a solution counts as real.
pub const REAL_REL: f64 = 1e-8;
/// Critical values closer than this are not considered distinct.
pub const DISTINCT_VALUES_ABS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HomotopyError {
    #[error("{failed} of {total} paths failed in every pass")]
    PathFailures { failed: usize, total: u64 },
    /// The random denominator gave a non-Morse function; retry with a new one.
    #[error("denominator must be regenerated: {0}")]
    RegenerateQ(String),
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub parallel: bool,
    /// Passes run unconditionally. A path can jump onto a neighbour without
    /// any visible failure, so a second `γ` is the only cheap check.
    pub min_passes: usize,
    /// Extra passes run automatically when a pass shows failed or colliding
    /// paths, up to this many in total.
    pub max_passes: usize,
    /// Largest tolerated fraction of failed paths.
    pub failure_budget: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            parallel: true,
            min_passes: 2,
            max_passes: 4,
            failure_budget: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassSummary {
    pub seed: u64,
    pub converged: usize,
    pub diverged: usize,
    pub failed: usize,
    /// Converged, non-extraneous endpoints that coincide with an earlier one.
    pub collisions: usize,
    pub new_solutions: usize,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub bezout: u64,
    pub passes: Vec<PassSummary>,
    pub extraneous: usize,
    pub solutions: usize,
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    /// Deduplicated finite critical points, sorted lexicographically.
    pub solutions: Vec<Vec<Complex64>>,
    /// One list of path records per pass.
    pub records: Vec<Vec<PathTrackRecord>>,
    pub diagnostics: SolveDiagnostics,
}

fn pass_seed(seed: u64, pass: usize) -> u64 {
    seed.wrapping_add((pass as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn cnorm(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn same_point(a: &[Complex64], b: &[Complex64]) -> bool {
    let d = a.iter().zip(b).map(|(u, v)| (u - v).norm_sqr()).sum::<f64>().sqrt();
    d <= DEDUP_REL * (1.0 + cnorm(a).max(cnorm(b)))
}

/// Extraneous solutions of the cleared system lie on two of the `f_j` and
/// `q` at once (or on a singular point of one). Being singular, they are
/// only resolved to about the square root of the working precision, so two
/// values under this looser floor also mark an endpoint as extraneous.
pub const EXTRANEOUS_PAIR_REL: f64 = 1e-4;

fn is_extraneous(m: &MorseFunction, x: &[Complex64]) -> bool {
    let mut rel: Vec<f64> = m
        .arrangement()
        .polys()
        .iter()
        .chain([m.denominator()])
        .map(|p| p.relative_value(x))
        .collect();
    rel.sort_by(f64::total_cmp);
    rel[0] < EXTRANEOUS_REL || rel.get(1).is_some_and(|&r| r < EXTRANEOUS_PAIR_REL)
}

/// Tracks all `bezout` paths of the total-degree homotopy for `cs` and
/// returns the finite, non-extraneous, deduplicated endpoints.
pub fn solve_critical_points(
    m: &MorseFunction,
    cs: &CriticalSystem,
    seed: u64,
    opts: &SolveOptions,
) -> Result<SolveOutcome, HomotopyError> {
    let homog: Vec<Polynomial> = cs.equations.iter().map(Polynomial::homogenize).collect();
    let compiled = CompiledSystem::new(&homog);
    let starts: Vec<u64> = (0..cs.bezout).collect();
    let mut found: Vec<(Vec<Complex64>, f64)> = Vec::new();
    let mut passes = Vec::new();
    let mut all_records = Vec::new();
    let mut extraneous = 0;
    let mut any_within_budget = false;
    for pass in 0..opts.max_passes.max(1) {
        let pseed = pass_seed(seed, pass);
        let mut rng = ChaCha8Rng::seed_from_u64(pseed);
        let h = Homotopy::new(&compiled, &mut rng);
        let records = exec::map(&starts, opts.parallel, |&i| h.track(h.start_solution(i)));
        let mut summary = PassSummary {
            seed: pseed,
            converged: 0,
            diverged: 0,
            failed: 0,
            collisions: 0,
            new_solutions: 0,
            max_residual: 0.0,
        };
        let mut this_pass: Vec<Vec<Complex64>> = Vec::new();
        let mut pass_extraneous = 0;
        for r in &records {
            match r.status {
                PathStatus::Diverged => summary.diverged += 1,
                PathStatus::Failed => summary.failed += 1,
                PathStatus::Converged => {
                    summary.converged += 1;
                    summary.max_residual = summary.max_residual.max(r.newton_residual);
                    let x: Vec<Complex64> = r
                        .end
                        .as_ref()
                        .expect("converged paths have endpoints")
                        .iter()
                        .map(|c| Complex64::new(c[0], c[1]))
                        .collect();
                    if is_extraneous(m, &x) {
                        pass_extraneous += 1;
                        continue;
                    }
                    if this_pass.iter().any(|y| same_point(y, &x)) {
                        summary.collisions += 1;
                        continue;
                    }
                    this_pass.push(x.clone());
                    match found.iter_mut().find(|(y, _)| same_point(y, &x)) {
                        Some(slot) => {
                            if r.newton_residual < slot.1 {
                                *slot = (x, r.newton_residual);
                            }
                        }
                        None => {
                            summary.new_solutions += 1;
                            found.push((x, r.newton_residual));
                        }
                    }
                }
            }
        }
        if pass == 0 {
            extraneous = pass_extraneous;
        }
        let within_budget = summary.failed as f64 <= opts.failure_budget * cs.bezout as f64;
        any_within_budget |= within_budget;
        let clean = summary.failed == 0 && summary.collisions == 0;
        log::debug!(
            "pass {pass}: {} converged, {} diverged, {} failed, {} collisions, {} new",
            summary.converged,
            summary.diverged,
            summary.failed,
            summary.collisions,
            summary.new_solutions
        );
        passes.push(summary);
        all_records.push(records);
        // a later pass that finds nothing new confirms the earlier ones
        let confirmed = pass > 0 && passes[pass].new_solutions == 0 && within_budget;
        if pass + 1 >= opts.min_passes && (confirmed || pass == 0 && clean) {
            break;
        }
    }
    if !any_within_budget {
        let failed = passes.iter().map(|p| p.failed).min().unwrap_or(0);
        return Err(HomotopyError::PathFailures {
            failed,
            total: cs.bezout,
        });
    }
    let mut solutions: Vec<Vec<Complex64>> = found.into_iter().map(|(x, _)| x).collect();
    solutions.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(u, v)| u.re.total_cmp(&v.re).then(u.im.total_cmp(&v.im)))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let diagnostics = SolveDiagnostics {
        bezout: cs.bezout,
        passes,
        extraneous,
        solutions: solutions.len(),
    };
    Ok(SolveOutcome {
        solutions,
        records: all_records,
        diagnostics,
    })
}

/// Real critical points with their classification.
#[derive(Clone, Debug)]
pub struct CriticalSet {
    pub complex: Vec<Vec<Complex64>>,
    /// Sorted by descending `log g`.
    pub points: Vec<CriticalPoint>,
    pub diagnostics: SolveDiagnostics,
    pub bound: MlDegreeBound,
}

pub fn is_real(x: &[Complex64]) -> bool {
    let im = x.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    im < REAL_REL * (1.0 + cnorm(x))
}

/// Solves, filters to real points, polishes and classifies them. Any sign of
/// a non-Morse denominator surfaces as [`HomotopyError::RegenerateQ`].
pub fn find_critical_points(
    m: &MorseFunction,
    seed: u64,
    opts: &SolveOptions,
) -> Result<CriticalSet, HomotopyError> {
    let cs = assemble_critical_system(m);
    let out = solve_critical_points(m, &cs, seed, opts)?;
    let bound = ml_degree_bound(&m.arrangement().degrees(), m.nvars());
    if out.solutions.len() as u64 > bound.bound {
        log::warn!(
            "{} complex critical points exceed the bound {}",
            out.solutions.len(),
            bound.bound
        );
    }
    let real: Vec<Vec<f64>> = out
        .solutions
        .iter()
        .filter(|x| is_real(x))
        .map(|x| x.iter().map(|v| v.re).collect())
        .collect();
    let classified = exec::map(&real, opts.parallel, |x| {
        let p = polish(m, x, 8);
        classify_critical_point(m, &p)
    });
    let mut points = Vec::with_capacity(classified.len());
    for c in classified {
        match c {
            Ok(p) => points.push(p),
            Err(e) => return Err(HomotopyError::RegenerateQ(e.to_string())),
        }
    }
    points.sort_by(|a, b| b.log_g.total_cmp(&a.log_g));
    for w in points.windows(2) {
        if (w[0].log_g - w[1].log_g).abs() <= DISTINCT_VALUES_ABS {
            let close = linalg::norm_inf(
                &w[0].x.iter().zip(&w[1].x).map(|(a, b)| a - b).collect::<Vec<_>>(),
            ) <= DEDUP_REL * (1.0 + linalg::norm_inf(&w[0].x));
            let why = if close {
                "a critical point was found twice"
            } else {
                "two critical values coincide"
            };
            return Err(HomotopyError::RegenerateQ(why.into()));
        }
    }
    Ok(CriticalSet {
        complex: out.solutions,
        points,
        diagnostics: out.diagnostics,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Arrangement;

    #[test]
    fn single_line_matches_quadratic_formula() {
        // g = |x + 1| / q, q = a x^2 + b x + c; critical points solve
        // q - (x + 1) q' = 0, i.e. -a x^2 - 2a x + (c - b) = 0
        let arr = Arrangement::parse(&["x + 1"], &["x"]).unwrap();
        let m = MorseFunction::build(arr, 17, None, None).unwrap();
        let q = m.denominator();
        let (a, b, c) = (q.coefficient(&[2]), q.coefficient(&[1]), q.coefficient(&[0]));
        let disc = (4.0 * a * a + 4.0 * a * (c - b)).sqrt();
        let mut want = [(2.0 * a - disc) / (-2.0 * a), (2.0 * a + disc) / (-2.0 * a)];
        want.sort_by(f64::total_cmp);
        let set = find_critical_points(&m, 1, &SolveOptions::default()).unwrap();
        assert_eq!(set.complex.len(), 2);
        assert_eq!(set.bound.bound, 2);
        let mut got: Vec<f64> = set.points.iter().map(|p| p.x[0]).collect();
        got.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-10 * (1.0 + w.abs()));
        }
    }

    #[test]
    fn path_accounting() {
        let arr = Arrangement::parse(&["x^2 + y^2 - 1", "x - y"], &["x", "y"]).unwrap();
        let m = MorseFunction::build(arr, 3, None, None).unwrap();
        let cs = assemble_critical_system(&m);
        let out = solve_critical_points(&m, &cs, 5, &SolveOptions::default()).unwrap();
        for p in &out.diagnostics.passes {
            assert_eq!((p.converged + p.diverged + p.failed) as u64, cs.bezout);
        }
        assert!(out.solutions.len() as u64 <= ml_degree_bound(&[2, 1], 2).bound);
    }
}
