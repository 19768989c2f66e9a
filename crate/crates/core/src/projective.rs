//! Regions at infinity: fusion of affine regions into projective ones, and
//! the bounded / unbounded / undecided classification.
//!
//! Infinity is seen through the chart `x_0 = 0, x_1 = 1` of the
//! homogenised arrangement. Points at infinity with `x_1 = 0` are outside
//! that chart and are not examined.

use num_complex::Complex64;
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec;
use crate::homotopy::{find_critical_points, SolveOptions};
use crate::linalg;
use crate::morse::MorseFunction;
use crate::poly::{Arrangement, Polynomial};
use crate::regions::{compute_regions, membership, Boundedness, RegionsError, RegionsOptions, RegionsResult};

/// Representatives closer than this (relative) to an infinity hypersurface
/// are discarded.
pub const REPRESENTATIVE_REL: f64 = 1e-6;
pub const DEFAULT_DELTA: f64 = 1e-5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootsError {
    #[error("polynomial is zero")]
    Zero,
    #[error("root iteration did not converge in {0} sweeps")]
    NoConvergence(usize),
}

fn horner(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All complex roots of `Σ c_k t^k` (ascending coefficients) by
/// Aberth–Ehrlich iteration, repeated according to multiplicity.
pub fn roots_of_univariate(coeffs: &[f64]) -> Result<Vec<Complex64>, RootsError> {
    const SWEEPS: usize = 200;
    let deg = match coeffs.iter().rposition(|&c| c != 0.0) {
        Some(d) => d,
        None => return Err(RootsError::Zero),
    };
    let c = &coeffs[..=deg];
    // zero roots split off exactly
    let zeros = c.iter().position(|&v| v != 0.0).unwrap();
    let c = &c[zeros..];
    let d = c.len() - 1;
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    if d == 0 {
        return Ok(roots);
    }
    let lead = c[d];
    // Fujiwara-style radius for the initial circle
    let radius = (0..d)
        .map(|k| (c[k] / lead).abs().powf(1.0 / (d - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / d as f64 + 0.4))
        .collect();
    let scale = |x: Complex64| -> f64 {
        let r = x.norm();
        c.iter().enumerate().map(|(k, v)| v.abs() * r.powi(k as i32)).sum()
    };
    for _ in 0..SWEEPS {
        let mut max_rel = 0.0f64;
        for i in 0..d {
            let (p, dp) = horner(c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let sum: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| {
                    let diff = z[i] - z[j];
                    if diff.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        diff.inv()
                    }
                })
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if w.is_finite() {
                z[i] -= w;
                max_rel = max_rel.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        let small = z.iter().all(|&r| horner(c, r).0.norm() <= 1e-10 * scale(r));
        if max_rel < 1e-15 || small && max_rel < 1e-8 {
            roots.extend(z);
            return Ok(roots);
        }
    }
    if z.iter().all(|&r| horner(c, r).0.norm() <= 1e-10 * scale(r)) {
        roots.extend(z);
        return Ok(roots);
    }
    Err(RootsError::NoConvergence(SWEEPS))
}

/// Groups roots closer than `tol·(1+|z|)` into `(center, multiplicity)`.
pub fn cluster_roots(roots: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    for &r in roots {
        match out
            .iter_mut()
            .find(|(c, _)| (c - r).norm() <= tol * (1.0 + r.norm()))
        {
            Some((c, m)) => {
                *c = (*c * *m as f64 + r) / (*m as f64 + 1.0);
                *m += 1;
            }
            None => out.push((r, 1)),
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfinityRepresentative {
    /// Point of `R^{n-1}` in the chart `x_0 = 0, x_1 = 1`.
    pub u: Vec<f64>,
    /// Region of the arrangement at infinity it represents.
    pub infinity_region: usize,
    pub lambda: f64,
    pub plus_region: Option<usize>,
    pub minus_region: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveFusion {
    /// Partition of the affine region ids, each group sorted, groups ordered
    /// by their smallest id.
    pub groups: Vec<Vec<usize>>,
    pub infinity_representatives: Vec<InfinityRepresentative>,
    /// Affine regions reached by some flow from infinity.
    pub visited: Vec<usize>,
    pub infinity_regions: usize,
    /// Some infinity region had no usable representative.
    pub heuristic_incomplete: bool,
    pub failed_flows: usize,
}

/// Largest `|root|` of `t ↦ f_j(t·dir)` over the arrangement.
fn max_root_along(arr: &Arrangement, dir: &[f64]) -> f64 {
    arr.polys()
        .iter()
        .filter_map(|f| roots_of_univariate(&f.along_ray(dir)).ok())
        .flatten()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// The arrangement seen at infinity through the chart: nonconstant
/// restrictions, deduplicated up to scaling.
pub fn infinity_arrangement(arr: &Arrangement) -> Vec<Polynomial> {
    let mut out: Vec<Polynomial> = Vec::new();
    for f in arr.polys() {
        let r = f.homogenize().restrict_chart();
        if r.is_zero() {
            log::warn!("a factor vanishes on the chart at infinity and is dropped");
            continue;
        }
        if r.is_constant() {
            continue;
        }
        let r = r.scale(1.0 / r.max_coefficient());
        if out.iter().any(|o| proportional(o, &r)) {
            continue;
        }
        out.push(r);
    }
    out
}

fn proportional(a: &Polynomial, b: &Polynomial) -> bool {
    if a.num_terms() != b.num_terms() {
        return false;
    }
    let Some((m0, c0)) = a.terms().next() else {
        return b.is_zero();
    };
    let ratio = b.coefficient(m0.exponents()) / c0;
    if ratio == 0.0 {
        return false;
    }
    a.terms()
        .all(|(m, c)| (b.coefficient(m.exponents()) - ratio * c).abs() <= 1e-12 * c.abs().max(1e-300) * ratio.abs().max(1.0))
}

fn subseed(seed: u64, salt: u64) -> u64 {
    seed.wrapping_mul(0x2545_F491_4F6C_DD1D).wrapping_add(salt)
}

/// Affine point `λ·dir` pushed outwards until it sits clear of every
/// hypersurface.
fn clear_start(m: &MorseFunction, dir: &[f64], mut lambda: f64) -> Option<(Vec<f64>, f64)> {
    for _ in 0..12 {
        let x: Vec<f64> = dir.iter().map(|d| d * lambda).collect();
        if m.near_hypersurface(&x, 1e-8).is_none() {
            return Some((x, lambda));
        }
        lambda *= 2.0;
    }
    None
}

/// Fuses affine regions meeting across the hyperplane at infinity.
pub fn compute_projective_regions(
    res: &RegionsResult,
    seed: u64,
    opts: &RegionsOptions,
) -> Result<ProjectiveFusion, RegionsError> {
    let m = &res.morse;
    let arr = m.arrangement();
    let n = arr.nvars();
    let mut reps: Vec<(Vec<f64>, usize)> = Vec::new();
    let mut infinity_regions = 1;
    let mut heuristic_incomplete = false;
    if n == 1 {
        reps.push((Vec::new(), 0));
    } else {
        let inf = infinity_arrangement(arr);
        if inf.is_empty() {
            reps.push((vec![0.0; n - 1], 0));
        } else {
            let inf_arr = Arrangement::new(n - 1, inf.clone()).expect("nonempty, nonzero");
            let sub_opts = RegionsOptions {
                s: None,
                t: None,
                denominator: None,
                ..opts.clone()
            };
            let sub = compute_regions(&inf_arr, subseed(seed, n as u64), &sub_opts)?;
            infinity_regions = sub.regions.len();
            for region in &sub.regions {
                let rep = region
                    .members
                    .iter()
                    .map(|&i| &sub.critical_points[i])
                    .filter(|c| c.index == 0)
                    .find(|c| inf.iter().all(|f| f.relative_value(&c.x) >= REPRESENTATIVE_REL));
                match rep {
                    Some(c) => reps.push((c.x.clone(), region.id)),
                    None => heuristic_incomplete = true,
                }
            }
        }
    }

    let starts: Vec<(Vec<f64>, usize, Option<(Vec<f64>, f64)>)> = reps
        .into_iter()
        .map(|(u, id)| {
            let mut dir = vec![1.0];
            dir.extend_from_slice(&u);
            let lambda = 2.0 * (1.0 + max_root_along(arr, &dir));
            let start = clear_start(m, &dir, lambda);
            (u, id, start)
        })
        .collect();
    let flows = exec::map(&starts, opts.parallel, |(_, _, start)| {
        let (x, _) = start.as_ref()?;
        let minus: Vec<f64> = x.iter().map(|v| -v).collect();
        let a = membership(res, x).ok().map(|r| r.id);
        let b = membership(res, &minus).ok().map(|r| r.id);
        Some((a, b))
    });

    let mut uf = UnionFind::<usize>::new(res.regions.len());
    let mut visited = vec![false; res.regions.len()];
    let mut failed_flows = 0;
    let mut representatives = Vec::new();
    for ((u, id, start), out) in starts.into_iter().zip(flows) {
        let (a, b) = out.unwrap_or((None, None));
        failed_flows += usize::from(a.is_none()) + usize::from(b.is_none());
        for r in [a, b].into_iter().flatten() {
            visited[r] = true;
        }
        if let (Some(a), Some(b)) = (a, b) {
            uf.union(a, b);
        }
        representatives.push(InfinityRepresentative {
            u,
            infinity_region: id,
            lambda: start.map_or(f64::NAN, |s| s.1),
            plus_region: a,
            minus_region: b,
        });
    }
    let labels = uf.into_labeling();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: Vec<Option<usize>> = vec![None; res.regions.len()];
    for r in 0..res.regions.len() {
        let root = labels[r];
        match slot[root] {
            Some(g) => groups[g].push(r),
            None => {
                slot[root] = Some(groups.len());
                groups.push(vec![r]);
            }
        }
    }
    Ok(ProjectiveFusion {
        groups,
        infinity_representatives: representatives,
        visited: (0..visited.len()).filter(|&r| visited[r]).collect(),
        infinity_regions,
        heuristic_incomplete,
        failed_flows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundednessReport {
    pub delta: f64,
    /// Indexed by region id.
    pub statuses: Vec<Boundedness>,
    /// Regions reached from the slab hyperplanes `x_1 = ±1/δ`.
    pub slab_reached: Vec<usize>,
    pub slab_points: usize,
    pub slab_failures: usize,
}

/// Critical points of `g` restricted to `x_1 = side/δ`, in the scaled
/// coordinates `w = δ·(x_2, …, x_n)`, returned as directions
/// `(side, w)` so the slab point is `dir/δ`.
fn slab_directions(
    m: &MorseFunction,
    side: f64,
    delta: f64,
    seed: u64,
    opts: &RegionsOptions,
) -> Result<Vec<Vec<f64>>, String> {
    let n = m.nvars();
    if n == 1 {
        return Ok(vec![vec![side]]);
    }
    let restrict = |p: &Polynomial| p.homogenize().specialize(0, delta).specialize(0, side);
    let mut polys = Vec::new();
    let mut s = Vec::new();
    for (f, &sf) in m.arrangement().polys().iter().zip(m.s()) {
        let r = restrict(f);
        if !r.is_constant() {
            polys.push(r.scale(1.0 / r.max_coefficient()));
            s.push(sf);
        }
    }
    let q = restrict(m.denominator());
    let arr = Arrangement::new_allow_empty(n - 1, polys).map_err(|e| e.to_string())?;
    let mut last = String::new();
    for attempt in 0..opts.max_attempts.max(1) as u64 {
        // the slab quadric is positive by construction; on a degenerate
        // restriction, perturb it with a small random positive quadric
        let qa = if attempt == 0 {
            q.clone()
        } else {
            &q + &crate::morse::random_quadric(n - 1, subseed(seed, attempt)).scale(1e-3)
        };
        let rm = MorseFunction::assemble(arr.clone(), qa, seed, Some(s.clone()), Some(m.t()))
            .map_err(|e| e.to_string())?;
        let solve = SolveOptions {
            parallel: opts.parallel,
            ..opts.solve.clone()
        };
        match find_critical_points(&rm, subseed(seed, 100 + attempt), &solve) {
            Ok(set) => {
                return Ok(set
                    .points
                    .into_iter()
                    .map(|c| {
                        let mut d = vec![side];
                        d.extend(c.x);
                        d
                    })
                    .collect())
            }
            Err(e) => last = e.to_string(),
        }
    }
    Err(last)
}

/// `(∇' log g, H', h)` at `x` for the restriction to `x_1 = const`:
/// gradient and Hessian in `x_2, …, x_n`, and the mixed column `∂_1 ∇'`.
fn restricted_derivatives(m: &MorseFunction, x: &[f64]) -> Option<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let n = x.len();
    let e = m.eval_log_g(x, true).ok()?;
    let hess = e.hessian?;
    let grad = e.grad[1..].to_vec();
    let h_rest: Vec<f64> = (1..n)
        .flat_map(|i| (1..n).map(move |j| (i, j)))
        .map(|(i, j)| hess[i * n + j])
        .collect();
    let mixed: Vec<f64> = (1..n).map(|i| hess[i * n]).collect();
    Some((grad, h_rest, mixed))
}

/// Follows a critical point of `g` restricted to `x_1 = c` as `|c|` grows
/// from `|x[0]|` to `c1`, parametrised by `ln |c|`: tangent predictor from
/// the implicit function theorem, Newton corrector at fixed `x_1`, and the
/// sign vector held fixed throughout.
fn continue_slab_point(m: &MorseFunction, x: Vec<f64>, c1: f64) -> Result<Vec<f64>, Vec<i8>> {
    let n = x.len();
    let side = x[0].signum();
    let sigma = m.signs(&x);
    let velocity = |x: &[f64]| -> Option<Vec<f64>> {
        let (_, h, mixed) = restricted_derivatives(m, x)?;
        let v = linalg::solve(h, n - 1, &mixed).ok()?;
        Some(v.iter().map(|vi| -vi * x[0]).collect())
    };
    let at = |s: f64, rest: &[f64]| -> Vec<f64> {
        std::iter::once(side * s.exp()).chain(rest.iter().copied()).collect()
    };
    let target = c1.ln();
    let mut s = x[0].abs().ln();
    let mut rest = x[1..].to_vec();
    let mut ds: f64 = 0.25;
    while s < target {
        let step = ds.min(target - s);
        let s1 = if step >= target - s { target } else { s + step };
        let attempt = (|| -> Option<Vec<f64>> {
            let axpy = |a: &[f64], t: f64, b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(u, v)| u + t * v).collect() };
            let k1 = velocity(&at(s, &rest))?;
            let k2 = velocity(&at(s + step / 2.0, &axpy(&rest, step / 2.0, &k1)))?;
            let k3 = velocity(&at(s + step / 2.0, &axpy(&rest, step / 2.0, &k2)))?;
            let k4 = velocity(&at(s1, &axpy(&rest, step, &k3)))?;
            let mut y: Vec<f64> = (0..n - 1)
                .map(|i| rest[i] + step / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]))
                .collect();
            let c = if s1 == target { side * c1 } else { side * s1.exp() };
            let mut last = f64::INFINITY;
            for _ in 0..8 {
                let full: Vec<f64> = std::iter::once(c).chain(y.iter().copied()).collect();
                if m.signs(&full) != sigma {
                    return None;
                }
                let (g, h, _) = restricted_derivatives(m, &full)?;
                let neg: Vec<f64> = g.iter().map(|v| -v).collect();
                let dy = linalg::solve(h, n - 1, &neg).ok()?;
                let dn = linalg::norm_inf(&dy);
                let scale = 1.0 + linalg::norm_inf(&y);
                // in a thin slice rounding stalls Newton well above 1e-10
                let stalled = dn > 0.5 * last && last <= 1e-8 * scale;
                if stalled {
                    return Some(y);
                }
                last = dn;
                for (a, b) in y.iter_mut().zip(&dy) {
                    *a += b;
                }
                if dn <= 1e-10 * scale {
                    let full: Vec<f64> = std::iter::once(c).chain(y.iter().copied()).collect();
                    return (m.signs(&full) == sigma).then_some(y);
                }
            }
            None
        })();
        match attempt {
            Some(y) => {
                rest = y;
                s = s1;
                ds = (ds * 1.5).min(1.0);
            }
            None => {
                ds *= 0.5;
                if ds < 1e-6 {
                    return Err(sigma);
                }
            }
        }
    }
    Ok(std::iter::once(side * c1).chain(rest).collect())
}

/// Slab critical points at `x_1 = side/δ` as directions `x·δ`.
///
/// The direct solve on a thin slab misses critical points sitting at a
/// higher power of `1/δ` (slices of regions tangent to infinity), so the
/// real critical points of a moderate slab `x_1 = side·c0` are also
/// continued out to `1/δ`.
fn slab_critical_points(
    res: &RegionsResult,
    side: f64,
    delta: f64,
    seed: u64,
    opts: &RegionsOptions,
) -> Result<(Vec<Vec<f64>>, Vec<Vec<i8>>), String> {
    let m = &res.morse;
    let mut dirs = slab_directions(m, side, delta, seed, opts)?;
    let mut lost = Vec::new();
    let n = m.nvars();
    let spread = res
        .critical_points
        .iter()
        .map(|c| linalg::norm2(&c.x))
        .fold(0.0, f64::max);
    let c0 = 10.0 * (1.0 + spread);
    if n > 1 && c0 < 1.0 / delta {
        let near = slab_directions(m, side, 1.0 / c0, subseed(seed, 0xC0), opts)?;
        let continued = exec::map(&near, opts.parallel, |d| {
            let x: Vec<f64> = d.iter().map(|v| v * c0).collect();
            continue_slab_point(m, x, 1.0 / delta)
        });
        for c in continued {
            match c {
                Ok(x) => dirs.push(x.iter().map(|v| v * delta).collect()),
                Err(sigma) => lost.push(sigma),
            }
        }
    }
    Ok((dirs, lost))
}

/// Start point on the ray through `dir`: the geometric midpoint between the
/// last real crossing before the slab and the slab itself.
fn slab_start(m: &MorseFunction, dir: &[f64], delta: f64) -> Option<Vec<f64>> {
    let limit = 1.0 / delta;
    let r_max = m
        .arrangement()
        .polys()
        .iter()
        .filter_map(|f| roots_of_univariate(&f.along_ray(dir)).ok())
        .flatten()
        .filter(|z| z.im.abs() <= 1e-8 * (1.0 + z.norm()) && z.re > 0.0 && z.re < limit)
        .map(|z| z.re)
        .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))));
    let lambda = match r_max {
        Some(r) => (r * limit).sqrt(),
        None => 0.5 * limit,
    };
    let at = |l: f64| -> Vec<f64> { dir.iter().map(|d| d * l).collect() };
    let x = at(lambda);
    if m.near_hypersurface(&x, 1e-8).is_none() {
        return Some(x);
    }
    let x = at(limit);
    m.near_hypersurface(&x, 1e-8).is_none().then_some(x)
}

/// Bounded / unbounded / undecided status for every region.
///
/// Regions reached by the flows from infinity are unbounded. Regions reached
/// only from the slab hyperplanes `x_1 = ±1/δ` may be tangent to infinity and
/// stay undecided. Of the rest, those whose critical points all lie strictly
/// inside the slab are bounded.
pub fn classify_boundedness(
    res: &RegionsResult,
    fusion: &ProjectiveFusion,
    delta: f64,
    seed: u64,
    opts: &RegionsOptions,
) -> BoundednessReport {
    assert!(delta > 0.0, "delta must be positive");
    let m = &res.morse;
    let nreg = res.regions.len();
    let mut unbounded = vec![false; nreg];
    for &r in &fusion.visited {
        unbounded[r] = true;
    }
    let mut reached = vec![false; nreg];
    let mut slab_points = 0;
    let mut failures = 0;
    let mut unresolved: Vec<Vec<i8>> = Vec::new();
    let mut all_undecided = false;
    for (k, side) in [1.0, -1.0].into_iter().enumerate() {
        let dirs = match slab_critical_points(res, side, delta, subseed(seed, 7 + k as u64), opts) {
            Ok((d, lost)) => {
                unresolved.extend(lost);
                d
            }
            Err(e) => {
                log::warn!("slab x_1 = {side}/δ: {e}");
                all_undecided = true;
                failures += 1;
                continue;
            }
        };
        slab_points += dirs.len();
        let hits = exec::map(&dirs, opts.parallel, |dir| {
            let x = slab_start(m, dir, delta)
                .unwrap_or_else(|| dir.iter().map(|v| v / delta).collect());
            membership(res, &x).map(|r| r.id).map_err(|_| m.signs(&x))
        });
        for h in hits {
            match h {
                Ok(r) => reached[r] = true,
                Err(sigma) => unresolved.push(sigma),
            }
        }
    }
    // a slab point that could not be placed still pins down its sign
    // vector; every region sharing it might be the one reaching the slab
    failures += unresolved.len();
    for sigma in &unresolved {
        for region in res.regions.iter().filter(|r| &r.sigma == sigma) {
            reached[region.id] = true;
        }
    }
    let limit = 1.0 / delta;
    let statuses = res
        .regions
        .iter()
        .map(|region| {
            if unbounded[region.id] {
                Boundedness::Unbounded
            } else if reached[region.id] || all_undecided {
                Boundedness::Undecided
            } else if region
                .members
                .iter()
                .all(|&i| res.critical_points[i].x[0].abs() < limit)
            {
                Boundedness::Bounded
            } else {
                Boundedness::Undecided
            }
        })
        .collect();
    BoundednessReport {
        delta,
        statuses,
        slab_reached: (0..nreg).filter(|&r| reached[r]).collect(),
        slab_points,
        slab_failures: failures,
    }
}

impl RegionsResult {
    /// Runs the fusion and, when `delta` is given, the boundedness check,
    /// storing both on the result.
    pub fn annotate_infinity(
        &mut self,
        seed: u64,
        delta: Option<f64>,
        opts: &RegionsOptions,
    ) -> Result<(), RegionsError> {
        let fusion = compute_projective_regions(self, seed, opts)?;
        if let Some(delta) = delta {
            let report = classify_boundedness(self, &fusion, delta, seed, opts);
            for (region, status) in self.regions.iter_mut().zip(&report.statuses) {
                region.boundedness = *status;
            }
            self.boundedness = Some(report);
        }
        self.projective = Some(fusion);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_real(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn simple_roots() {
        let r = sorted_real(roots_of_univariate(&[-1.0, 0.0, 1.0]).unwrap());
        assert!((r[0].re + 1.0).abs() < 1e-12 && (r[1].re - 1.0).abs() < 1e-12);
        let r = sorted_real(roots_of_univariate(&[1.0, 0.0, 1.0]).unwrap());
        assert!((r[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((r[1] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert_eq!(roots_of_univariate(&[0.0, 0.0]), Err(RootsError::Zero));
        assert!(roots_of_univariate(&[3.0]).unwrap().is_empty());
    }

    #[test]
    fn double_root_clusters() {
        // (t - 2)^2 (t + 1) t
        let roots = roots_of_univariate(&[0.0, 4.0, 0.0, -3.0, 1.0]).unwrap();
        let c = cluster_roots(&roots, 1e-6);
        assert_eq!(c.len(), 3);
        let two = c.iter().find(|(z, _)| (z.re - 2.0).abs() < 1e-6).unwrap();
        assert_eq!(two.1, 2);
    }

    #[test]
    fn ellipsoid_rays() {
        let arr = Arrangement::parse(
            &[
                "x^2 + y^2 + z^2 - 1",
                "x^2 + y^2 + z^2 - 4",
                "100x^2 + 100y^2 + z^2 - 9",
            ],
            &["x", "y", "z"],
        )
        .unwrap();
        assert!((max_root_along(&arr, &[1.0, 0.0, 0.0]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn infinity_arrangement_dedups_proportional_factors() {
        let arr = Arrangement::parse(&["x + y + 1", "2x + 2y - 5", "x^2 + y^2 - 1", "y"], &["x", "y"]).unwrap();
        let inf = infinity_arrangement(&arr);
        // 1 + u (twice), 1 + u^2, u
        assert_eq!(inf.len(), 3);
    }

    #[test]
    fn single_line_fuses_half_planes() {
        let arr = Arrangement::parse(&["x"], &["x", "y"]).unwrap();
        let opts = RegionsOptions::default();
        let mut res = compute_regions(&arr, 2, &opts).unwrap();
        assert_eq!(res.regions.len(), 2);
        res.annotate_infinity(2, Some(DEFAULT_DELTA), &opts).unwrap();
        let f = res.projective.as_ref().unwrap();
        assert_eq!(f.groups, vec![vec![0, 1]]);
        assert!(res.regions.iter().all(|r| r.boundedness == Boundedness::Unbounded));
    }
}

