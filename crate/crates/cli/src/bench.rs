//! Batch statistics over seeded random arrangements, one CSV row per
//! family and size.

use std::time::Instant;

use carver_core::generate::{random_arrangement, spectrahedron_minors};
use carver_core::homotopy::ml_degree_bound;
use carver_core::poly::Arrangement;
use carver_core::regions::{compute_regions, RegionsOptions};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `k` dense Gaussian polynomials of degree `d` in `n` variables.
    Random { n: usize, k: usize, d: u32 },
    /// Principal minors of an `m × m` symmetric pencil in `n` variables.
    Spectrahedron { n: usize, m: usize },
}

impl Family {
    pub fn instance(&self, seed: u64) -> Arrangement {
        match *self {
            Family::Random { n, k, d } => random_arrangement(n, k, d, seed),
            Family::Spectrahedron { n, m } => spectrahedron_minors(n, m, seed),
        }
    }

    /// Parses `n,k,d` for random rows.
    pub fn parse_random(s: &str) -> Result<Family, String> {
        match parse_list(s)?.as_slice() {
            &[n, k, d] if n >= 1 && k >= 1 && d >= 1 => Ok(Family::Random {
                n,
                k,
                d: u32::try_from(d).map_err(|e| e.to_string())?,
            }),
            _ => Err(format!("expected n,k,d with all entries ≥ 1, got {s:?}")),
        }
    }

    /// Parses `n,m` for spectrahedron rows.
    pub fn parse_spectrahedron(s: &str) -> Result<Family, String> {
        match parse_list(s)?.as_slice() {
            &[n, m] if n >= 1 && m >= 1 => Ok(Family::Spectrahedron { n, m }),
            _ => Err(format!("expected n,m with both entries ≥ 1, got {s:?}")),
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|v| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}")))
        .collect()
}

/// One CSV row. Count columns are empty when every instance failed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub family: &'static str,
    pub n: usize,
    pub k: usize,
    /// Degree for random rows, matrix size for spectrahedra.
    pub d_or_m: usize,
    pub instances: usize,
    pub failures: usize,
    pub ml_bound: u64,
    pub min_regions: Option<usize>,
    pub max_regions: Option<usize>,
    pub min_sigmas: Option<usize>,
    pub max_sigmas: Option<usize>,
    pub max_regions_per_sigma: Option<usize>,
    pub min_chi: Option<i64>,
    pub max_chi: Option<i64>,
    pub max_complex: Option<usize>,
    /// Every successful instance has at most `ml_bound` complex critical
    /// points and regions.
    pub within_bound: bool,
    pub mean_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceStats {
    pub regions: usize,
    pub sigmas: usize,
    pub max_regions_per_sigma: usize,
    pub min_chi: i64,
    pub max_chi: i64,
    pub complex: usize,
}

pub fn instance_stats(arr: &Arrangement, seed: u64, opts: &RegionsOptions) -> Result<InstanceStats, String> {
    let res = compute_regions(arr, seed, opts).map_err(|e| e.to_string())?;
    let mut sigmas: Vec<&Vec<i8>> = res.regions.iter().map(|r| &r.sigma).collect();
    sigmas.sort();
    let mut per_sigma = 0;
    let mut distinct = 0;
    let mut i = 0;
    while i < sigmas.len() {
        let j = (i..sigmas.len()).find(|&j| sigmas[j] != sigmas[i]).unwrap_or(sigmas.len());
        per_sigma = per_sigma.max(j - i);
        distinct += 1;
        i = j;
    }
    Ok(InstanceStats {
        regions: res.regions.len(),
        sigmas: distinct,
        max_regions_per_sigma: per_sigma,
        min_chi: res.regions.iter().map(|r| r.chi).min().unwrap_or(0),
        max_chi: res.regions.iter().map(|r| r.chi).max().unwrap_or(0),
        complex: res.diagnostics.complex_critical_points,
    })
}

/// Runs `reps` instances with seeds `seed, seed + 1, …`; failed instances are
/// logged and counted.
pub fn run_row(family: Family, reps: usize, seed: u64, opts: &RegionsOptions) -> BenchRow {
    assert!(reps >= 1, "at least one repetition");
    let mut stats = Vec::new();
    let mut failures = 0;
    let mut total_ms = 0.0;
    let mut bound = 0;
    for i in 0..reps as u64 {
        let s = seed.wrapping_add(i);
        let arr = family.instance(s);
        bound = ml_degree_bound(&arr.degrees(), arr.nvars()).bound;
        let t = Instant::now();
        match instance_stats(&arr, s, opts) {
            Ok(st) => stats.push(st),
            Err(e) => {
                log::warn!("instance with seed {s} failed: {e}");
                failures += 1;
            }
        }
        total_ms += t.elapsed().as_secs_f64() * 1e3;
    }
    let (n, k, d_or_m, name) = match family {
        Family::Random { n, k, d } => (n, k, d as usize, "random"),
        Family::Spectrahedron { n, m } => (n, (1 << m) - 1, m, "spectrahedron"),
    };
    let min = |f: fn(&InstanceStats) -> usize| stats.iter().map(f).min();
    let max = |f: fn(&InstanceStats) -> usize| stats.iter().map(f).max();
    BenchRow {
        family: name,
        n,
        k,
        d_or_m,
        instances: reps,
        failures,
        ml_bound: bound,
        min_regions: min(|s| s.regions),
        max_regions: max(|s| s.regions),
        min_sigmas: min(|s| s.sigmas),
        max_sigmas: max(|s| s.sigmas),
        max_regions_per_sigma: max(|s| s.max_regions_per_sigma),
        min_chi: stats.iter().map(|s| s.min_chi).min(),
        max_chi: stats.iter().map(|s| s.max_chi).max(),
        max_complex: max(|s| s.complex),
        within_bound: stats
            .iter()
            .all(|s| s.complex as u64 <= bound && s.regions as u64 <= bound),
        mean_ms: total_ms / reps as f64,
    }
}

pub fn write_csv<W: std::io::Write>(rows: &[BenchRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
