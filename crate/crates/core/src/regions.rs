//! Regions of the complement of an arrangement: critical points grouped by
//! sign vector, connected through gradient flows out of the saddles.

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec;
use crate::flow::{flow_to_critical_point, FlowError, FlowOptions};
use crate::homotopy::{
    find_critical_points, sign_vector, ClassifyError, CriticalPoint, HomotopyError,
    MlDegreeBound, SolveDiagnostics, SolveOptions,
};
use crate::linalg;
use crate::morse::{MorseError, MorseFunction, ON_HYPERSURFACE_REL};
use crate::poly::{Arrangement, Polynomial};
use crate::projective::{BoundednessReport, ProjectiveFusion};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionsError {
    #[error(transparent)]
    Morse(#[from] MorseError),
    #[error("critical point computation failed after {attempts} attempts: {source}")]
    Solver {
        attempts: usize,
        source: HomotopyError,
    },
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("point lies on or too close to f_{} = 0", .index + 1)]
    OnHypersurface { index: usize },
    #[error("flow from the point did not reach a known critical point")]
    Unmatched,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundedness {
    Bounded,
    Unbounded,
    Undecided,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub id: usize,
    pub sigma: Vec<i8>,
    /// Indices into [`RegionsResult::critical_points`], by descending `log g`.
    pub members: Vec<usize>,
    /// `mu[l]` is the number of members of index `l`.
    pub mu: Vec<usize>,
    pub chi: i64,
    pub boundedness: Boundedness,
}

#[derive(Clone, Debug)]
pub struct RegionsOptions {
    pub s: Option<Vec<u32>>,
    pub t: Option<u32>,
    /// Use this positive quadric instead of a random one on the first
    /// attempt.
    pub denominator: Option<Polynomial>,
    pub parallel: bool,
    pub solve: SolveOptions,
    pub flow: FlowOptions,
    /// Attempts with a fresh random denominator when the Morse function
    /// turns out degenerate.
    pub max_attempts: usize,
}

impl Default for RegionsOptions {
    fn default() -> Self {
        RegionsOptions {
            s: None,
            t: None,
            denominator: None,
            parallel: true,
            solve: SolveOptions::default(),
            flow: FlowOptions::default(),
            max_attempts: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionsDiagnostics {
    pub solve: SolveDiagnostics,
    pub bound: MlDegreeBound,
    pub complex_critical_points: usize,
    pub real_critical_points: usize,
    /// Seed of the denominator that produced the result.
    pub seed_used: u64,
    pub attempts: usize,
    pub flows: usize,
    pub dropped_edges: usize,
    /// Some flow out of a saddle failed, so regions may be split.
    pub incomplete_graph: bool,
    /// Components lacking an index-0 point (never expected).
    pub components_without_maximum: usize,
}

#[derive(Clone, Debug)]
pub struct RegionsResult {
    pub regions: Vec<Region>,
    /// All real critical points, by descending `log g`.
    pub critical_points: Vec<CriticalPoint>,
    /// Region id of each critical point.
    pub region_of: Vec<usize>,
    pub complex_points: Vec<Vec<[f64; 2]>>,
    pub morse: MorseFunction,
    pub diagnostics: RegionsDiagnostics,
    pub projective: Option<ProjectiveFusion>,
    pub boundedness: Option<BoundednessReport>,
}

pub fn euler_characteristic(mu: &[usize]) -> i64 {
    mu.iter()
        .enumerate()
        .map(|(l, &m)| if l % 2 == 0 { m as i64 } else { -(m as i64) })
        .sum()
}

/// `1e-3·(1+‖p‖)`, halved until `p ± εv` stays in the same region.
pub(crate) fn perturbed_start(
    m: &MorseFunction,
    p: &[f64],
    v: &[f64],
    sign: f64,
    sigma: &[i8],
) -> Option<Vec<f64>> {
    let mut eps = 1e-3 * (1.0 + linalg::norm2(p));
    for _ in 0..30 {
        let x: Vec<f64> = p.iter().zip(v).map(|(a, b)| a + sign * eps * b).collect();
        if m.near_hypersurface(&x, 1e-10).is_none() && m.signs(&x) == sigma {
            return Some(x);
        }
        eps *= 0.5;
    }
    None
}

struct Job {
    point: usize,
    start: Option<Vec<f64>>,
}

/// Computes all regions with a seeded random denominator, retrying with
/// `seed + 1, seed + 2, ...` when the Morse function is degenerate.
pub fn compute_regions(
    arr: &Arrangement,
    seed: u64,
    opts: &RegionsOptions,
) -> Result<RegionsResult, RegionsError> {
    let mut last = None;
    for attempt in 0..opts.max_attempts.max(1) {
        let q_seed = seed.wrapping_add(attempt as u64);
        let m = match (&opts.denominator, attempt) {
            (Some(q), 0) => MorseFunction::with_denominator(
                arr.clone(),
                q.clone(),
                q_seed,
                opts.s.clone(),
                opts.t,
            )?,
            _ => MorseFunction::build(arr.clone(), q_seed, opts.s.clone(), opts.t)?,
        };
        match regions_for(m, q_seed, attempt + 1, opts) {
            Ok(r) => return Ok(r),
            Err(e @ HomotopyError::RegenerateQ(_)) => {
                log::warn!("attempt {}: {e}", attempt + 1);
                last = Some(e);
            }
            Err(e) => {
                return Err(RegionsError::Solver {
                    attempts: attempt + 1,
                    source: e,
                })
            }
        }
    }
    Err(RegionsError::Solver {
        attempts: opts.max_attempts.max(1),
        source: last.expect("at least one attempt"),
    })
}

fn regions_for(
    m: MorseFunction,
    seed: u64,
    attempts: usize,
    opts: &RegionsOptions,
) -> Result<RegionsResult, HomotopyError> {
    let n = m.nvars();
    let solve_opts = SolveOptions {
        parallel: opts.parallel,
        ..opts.solve.clone()
    };
    let set = find_critical_points(&m, seed ^ 0x5_EED0_FCA7_u64, &solve_opts)?;
    let pts = set.points;

    // group by sign vector; within a group, points keep descending log g
    let mut sigmas: Vec<Vec<i8>> = pts.iter().map(|p| p.sigma.clone()).collect();
    sigmas.sort();
    sigmas.dedup();
    let groups: Vec<Vec<usize>> = sigmas
        .iter()
        .map(|s| (0..pts.len()).filter(|&i| &pts[i].sigma == s).collect())
        .collect();

    // flows are only needed in groups with several maxima
    let mut jobs = Vec::new();
    for g in &groups {
        let maxima = g.iter().filter(|&&i| pts[i].index == 0).count();
        if maxima == 1 {
            continue;
        }
        for &i in g {
            let p = &pts[i];
            let Some(v) = p.unstable_eigenvectors.last() else {
                continue;
            };
            let signs: &[f64] = if p.index == 1 { &[1.0, -1.0] } else { &[1.0] };
            for &sg in signs {
                jobs.push(Job {
                    point: i,
                    start: perturbed_start(&m, &p.x, v, sg, &p.sigma),
                });
            }
        }
    }
    let outcomes = exec::map(&jobs, opts.parallel, |job| {
        let start = job.start.as_ref()?;
        match flow_to_critical_point(&m, start, &pts, &opts.flow) {
            Ok(r) => r.limit_index,
            Err(e) => {
                log::debug!("flow from critical point {} failed: {e}", job.point);
                None
            }
        }
    });

    let mut uf = UnionFind::<usize>::new(pts.len());
    for g in &groups {
        let maxima: Vec<usize> = g.iter().copied().filter(|&i| pts[i].index == 0).collect();
        if maxima.len() == 1 {
            for &i in g {
                uf.union(i, maxima[0]);
            }
        }
    }
    let mut dropped = 0;
    for (job, out) in jobs.iter().zip(&outcomes) {
        match out {
            Some(j) if pts[*j].sigma == pts[job.point].sigma => {
                uf.union(job.point, *j);
            }
            _ => dropped += 1,
        }
    }

    // components, then canonical order
    let labels = uf.into_labeling();
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut seen: Vec<Option<usize>> = vec![None; pts.len()];
    for i in 0..pts.len() {
        let root = labels[i];
        match seen[root] {
            Some(c) => comps[c].push(i),
            None => {
                seen[root] = Some(comps.len());
                comps.push(vec![i]);
            }
        }
    }
    comps.sort_by(|a, b| {
        pts[a[0]]
            .sigma
            .cmp(&pts[b[0]].sigma)
            .then(pts[b[0]].log_g.total_cmp(&pts[a[0]].log_g))
    });
    let mut region_of = vec![0; pts.len()];
    let mut without_max = 0;
    let regions: Vec<Region> = comps
        .into_iter()
        .enumerate()
        .map(|(id, members)| {
            let mut mu = vec![0; n + 1];
            for &i in &members {
                mu[pts[i].index] += 1;
                region_of[i] = id;
            }
            if mu[0] == 0 {
                without_max += 1;
            }
            Region {
                id,
                sigma: pts[members[0]].sigma.clone(),
                chi: euler_characteristic(&mu),
                members,
                mu,
                boundedness: Boundedness::Unknown,
            }
        })
        .collect();
    if dropped > 0 {
        log::warn!("{dropped} flows failed; the region graph may be incomplete");
    }
    let diagnostics = RegionsDiagnostics {
        solve: set.diagnostics,
        bound: set.bound,
        complex_critical_points: set.complex.len(),
        real_critical_points: pts.len(),
        seed_used: seed,
        attempts,
        flows: jobs.len(),
        dropped_edges: dropped,
        incomplete_graph: dropped > 0,
        components_without_maximum: without_max,
    };
    Ok(RegionsResult {
        regions,
        region_of,
        complex_points: set
            .complex
            .iter()
            .map(|x| x.iter().map(|c| [c.re, c.im]).collect())
            .collect(),
        critical_points: pts,
        morse: m,
        diagnostics,
        projective: None,
        boundedness: None,
    })
}

/// Region containing `p`, found by flowing from `p` to a local maximum.
pub fn membership<'a>(res: &'a RegionsResult, p: &[f64]) -> Result<&'a Region, RegionsError> {
    let id = locate(&res.morse, &res.critical_points, &res.region_of, p)?;
    Ok(&res.regions[id])
}

/// Region id of `p` given the critical points and their region ids, for
/// callers that hold these without a full [`RegionsResult`].
pub fn locate(
    m: &MorseFunction,
    critical_points: &[CriticalPoint],
    region_of: &[usize],
    p: &[f64],
) -> Result<usize, RegionsError> {
    match sign_vector(m.arrangement(), p) {
        Err(ClassifyError::AmbiguousSign { index }) => {
            return Err(RegionsError::OnHypersurface { index })
        }
        Err(ClassifyError::Morse(e)) => return Err(e.into()),
        Err(_) => unreachable!("sign_vector only fails on signs or dimensions"),
        Ok(_) => {}
    }
    if let Some(index) = m.near_hypersurface(p, ON_HYPERSURFACE_REL) {
        return Err(RegionsError::OnHypersurface { index });
    }
    let r = flow_to_critical_point(m, p, critical_points, &FlowOptions::default())?;
    let i = r.limit_index.ok_or(RegionsError::Unmatched)?;
    Ok(region_of[i])
}

/// Member critical points of `region`, by descending `log g`.
pub fn critical_points_of<'a>(res: &'a RegionsResult, region: &Region) -> Vec<&'a CriticalPoint> {
    region.members.iter().map(|&i| &res.critical_points[i]).collect()
}

/// `"+-+"`-style rendering of a sign vector.
pub fn sigma_string(sigma: &[i8]) -> String {
    sigma.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_examples() {
        assert_eq!(euler_characteristic(&[2, 4, 4, 0]), 2);
        assert_eq!(euler_characteristic(&[1, 0, 0]), 1);
        assert_eq!(euler_characteristic(&[1, 1, 0]), 0);
    }

    #[test]
    fn two_lines_make_four_quadrants() {
        let arr = Arrangement::parse(&["x - 0.3", "y + 0.2"], &["x", "y"]).unwrap();
        let res = compute_regions(&arr, 3, &RegionsOptions::default()).unwrap();
        assert_eq!(res.regions.len(), 4);
        let sig: Vec<String> = res.regions.iter().map(|r| sigma_string(&r.sigma)).collect();
        assert_eq!(sig, vec!["--", "-+", "+-", "++"]);
        for r in &res.regions {
            assert_eq!(r.chi, 1);
        }
        let got = membership(&res, &[5.0, -7.0]).unwrap();
        assert_eq!(got.sigma, vec![1, -1]);
        assert!(matches!(
            membership(&res, &[0.3, 1.0]),
            Err(RegionsError::OnHypersurface { index: 0 })
        ));
    }

    #[test]
    fn circle_has_disc_and_annulus_like_outside() {
        // outside a circle in R^2 is an annulus, χ = 0
        let arr = Arrangement::parse(&["x^2 + y^2 - 1"], &["x", "y"]).unwrap();
        let res = compute_regions(&arr, 1, &RegionsOptions::default()).unwrap();
        assert_eq!(res.regions.len(), 2);
        assert_eq!(res.regions[0].sigma, vec![-1]);
        assert_eq!(res.regions[0].chi, 1);
        assert_eq!(res.regions[1].chi, 0);
    }
}
