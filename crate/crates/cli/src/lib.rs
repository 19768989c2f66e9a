//! Library side of the `region-carver` binary: input handling, the result
//! document, and the subcommands as plain functions.

pub mod bench;
pub mod document;
pub mod input;

use std::path::{Path, PathBuf};
use std::time::Instant;

use carver_core::named;
use carver_core::regions::{compute_regions, locate, RegionsError, RegionsOptions};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use document::{ResultDocument, Timing};
use input::{parse_input, split_vars, ArrangementInput};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Solver(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    OnHypersurface(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Solver(_) => 2,
            CliError::Io(_) => 3,
            CliError::OnHypersurface(_) => 4,
        }
    }
}

impl From<RegionsError> for CliError {
    fn from(e: RegionsError) -> Self {
        match e {
            RegionsError::Morse(m) => CliError::Input(m.to_string()),
            RegionsError::OnHypersurface { .. } => CliError::OnHypersurface(e.to_string()),
            other => CliError::Solver(other.to_string()),
        }
    }
}

/// Where the arrangement comes from.
#[derive(Clone, Debug)]
pub enum Source {
    File(PathBuf),
    Example(String),
    Inline { vars: String, polys: Vec<String> },
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn load(source: &Source) -> Result<ArrangementInput, CliError> {
    match source {
        Source::File(path) => parse_input(&read_file(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        Source::Example(name) => {
            let ex = named::by_name(name).ok_or_else(|| {
                let known: Vec<&str> = named::ALL.iter().map(|e| e.name).collect();
                CliError::Input(format!("unknown example {name:?}; known: {}", known.join(", ")))
            })?;
            let vars = ex.vars.iter().map(|v| v.to_string()).collect();
            let exprs = ex.polys.iter().map(|p| p.to_string()).collect();
            let mut inp = ArrangementInput::from_exprs(vars, exprs).map_err(|e| CliError::Input(e.to_string()))?;
            inp.denominator = ex.denominator();
            Ok(inp)
        }
        Source::Inline { vars, polys } => {
            ArrangementInput::from_exprs(split_vars(vars), polys.clone()).map_err(|e| CliError::Input(e.to_string()))
        }
    }
}

#[derive(Clone, Debug)]
pub struct RegionsJob {
    pub seed: u64,
    pub bounded_check: bool,
    pub projective: bool,
    pub delta: f64,
    pub s: Option<Vec<u32>>,
    pub t: Option<u32>,
    pub parallel: bool,
}

impl RegionsJob {
    pub fn new(seed: u64) -> Self {
        RegionsJob {
            seed,
            bounded_check: false,
            projective: false,
            delta: carver_core::projective::DEFAULT_DELTA,
            s: None,
            t: None,
            parallel: true,
        }
    }
}

pub fn regions(input: &ArrangementInput, job: &RegionsJob) -> Result<ResultDocument, CliError> {
    if !(job.delta > 0.0 && job.delta.is_finite()) {
        return Err(CliError::Input(format!("delta must be positive, got {}", job.delta)));
    }
    let opts = RegionsOptions {
        s: job.s.clone(),
        t: job.t,
        denominator: input.denominator.clone(),
        parallel: job.parallel,
        ..RegionsOptions::default()
    };
    let start = Instant::now();
    let mut res = compute_regions(&input.arrangement, job.seed, &opts)?;
    let solve_ms = start.elapsed().as_secs_f64() * 1e3;
    let annotate = Instant::now();
    if job.bounded_check || job.projective {
        res.annotate_infinity(job.seed, job.bounded_check.then_some(job.delta), &opts)?;
    }
    let timing = Timing {
        solve_ms,
        annotate_ms: annotate.elapsed().as_secs_f64() * 1e3,
        total_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok(ResultDocument::new(input, &res, job.projective, timing))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipAnswer {
    pub point: Vec<f64>,
    pub region: usize,
    pub sigma: String,
    pub chi: i64,
    pub boundedness: carver_core::regions::Boundedness,
}

pub fn membership(doc: &ResultDocument, point: &[f64]) -> Result<MembershipAnswer, CliError> {
    let r = doc.reload().map_err(CliError::Input)?;
    if point.len() != r.morse.nvars() {
        return Err(CliError::Input(format!(
            "point has {} coordinates, the arrangement {} variables",
            point.len(),
            r.morse.nvars()
        )));
    }
    let id = locate(&r.morse, &r.critical_points, &r.region_of, point)?;
    let region = doc
        .regions
        .iter()
        .find(|reg| reg.id == id)
        .ok_or_else(|| CliError::Input(format!("document has no region {id}")))?;
    Ok(MembershipAnswer {
        point: point.to_vec(),
        region: id,
        sigma: region.sigma.clone(),
        chi: region.chi,
        boundedness: region.boundedness,
    })
}

pub fn load_document(path: &Path) -> Result<ResultDocument, CliError> {
    let text = read_file(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Writes to `path`, or stdout when absent.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}
