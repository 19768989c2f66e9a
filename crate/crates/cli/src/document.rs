//! The JSON result document and its reconstruction for `membership`.

use carver_core::homotopy::{CriticalPoint, PassSummary};
use carver_core::morse::MorseFunction;
use carver_core::poly::{PolynomialJson, Polynomial};
use carver_core::regions::{sigma_string, Boundedness, RegionsResult};
use serde::{Deserialize, Serialize};

use crate::input::ArrangementInput;

pub const FORMAT: &str = "region-carver/1";

/// The schema every document validates against.
pub const SCHEMA: &str = include_str!("../schema/result.schema.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub format: String,
    pub arrangement: ArrangementEcho,
    pub morse: MorseEcho,
    pub ml_bound: u64,
    pub complex_critical_points: usize,
    pub real_critical_points: usize,
    pub regions: Vec<RegionDoc>,
    pub projective: Option<ProjectiveDoc>,
    pub diagnostics: DiagnosticsDoc,
    /// Wall-clock times; the only part of the document that varies between
    /// runs with the same seed.
    pub timing: Timing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArrangementEcho {
    pub vars: Vec<String>,
    pub polynomials: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorseEcho {
    pub q: PolynomialJson,
    pub s: Vec<u32>,
    pub t: u32,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionDoc {
    pub id: usize,
    pub sigma: String,
    pub mu: Vec<usize>,
    pub chi: i64,
    pub boundedness: Boundedness,
    pub members: Vec<MemberDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberDoc {
    pub x: Vec<f64>,
    pub log_g: f64,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveDoc {
    pub groups: Vec<Vec<usize>>,
    pub infinity_regions: usize,
    pub heuristic_incomplete: bool,
    pub failed_flows: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundednessDoc {
    pub delta: f64,
    pub slab_points: usize,
    pub slab_failures: usize,
    pub slab_reached: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsDoc {
    pub bezout: u64,
    pub passes: Vec<PassSummary>,
    pub extraneous: usize,
    pub attempts: usize,
    pub flows: usize,
    pub dropped_edges: usize,
    pub incomplete_graph: bool,
    pub boundedness: Option<BoundednessDoc>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub solve_ms: f64,
    pub annotate_ms: f64,
    pub total_ms: f64,
}

/// `v` rounded to 12 significant digits.
pub fn round12(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().expect("formatted float parses")
}

impl ResultDocument {
    pub fn new(input: &ArrangementInput, res: &RegionsResult, include_projective: bool, timing: Timing) -> Self {
        let m = &res.morse;
        let d = &res.diagnostics;
        let regions = res
            .regions
            .iter()
            .map(|r| RegionDoc {
                id: r.id,
                sigma: sigma_string(&r.sigma),
                mu: r.mu.clone(),
                chi: r.chi,
                boundedness: r.boundedness,
                members: r
                    .members
                    .iter()
                    .map(|&i| {
                        let c = &res.critical_points[i];
                        MemberDoc {
                            x: c.x.iter().copied().map(round12).collect(),
                            log_g: round12(c.log_g),
                            index: c.index,
                        }
                    })
                    .collect(),
            })
            .collect();
        let projective = res.projective.as_ref().filter(|_| include_projective).map(|f| ProjectiveDoc {
            groups: f.groups.clone(),
            infinity_regions: f.infinity_regions,
            heuristic_incomplete: f.heuristic_incomplete,
            failed_flows: f.failed_flows,
        });
        ResultDocument {
            format: FORMAT.to_string(),
            arrangement: ArrangementEcho {
                vars: input.vars.clone(),
                polynomials: input
                    .arrangement
                    .polys()
                    .iter()
                    .map(|p| p.to_string_with(&input.var_refs()))
                    .collect(),
            },
            morse: MorseEcho {
                q: PolynomialJson::from_polynomial(m.denominator(), &input.vars),
                s: m.s().to_vec(),
                t: m.t(),
                seed: m.seed(),
            },
            ml_bound: d.bound.bound,
            complex_critical_points: d.complex_critical_points,
            real_critical_points: d.real_critical_points,
            regions,
            projective,
            diagnostics: DiagnosticsDoc {
                bezout: d.solve.bezout,
                passes: d.solve.passes.clone(),
                extraneous: d.solve.extraneous,
                attempts: d.attempts,
                flows: d.flows,
                dropped_edges: d.dropped_edges,
                incomplete_graph: d.incomplete_graph,
                boundedness: res.boundedness.as_ref().map(|b| BoundednessDoc {
                    delta: b.delta,
                    slab_points: b.slab_points,
                    slab_failures: b.slab_failures,
                    slab_reached: b.slab_reached.clone(),
                }),
            },
            timing,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents contain only finite numbers")
    }

    /// The document with its timing zeroed, for comparisons across runs.
    pub fn without_timing(&self) -> Self {
        ResultDocument {
            timing: Timing::default(),
            ..self.clone()
        }
    }

    /// Rebuilds the Morse function and the stored critical points with their
    /// region ids, enough to rerun flows from new points.
    pub fn reload(&self) -> Result<Reloaded, String> {
        let vars: Vec<String> = self.arrangement.vars.clone();
        let input = ArrangementInput::from_exprs(vars, self.arrangement.polynomials.clone())
            .map_err(|e| e.to_string())?;
        let q: Polynomial = self.morse.q.to_polynomial().map_err(|e| e.to_string())?;
        let morse = MorseFunction::with_denominator(
            input.arrangement.clone(),
            q,
            self.morse.seed,
            Some(self.morse.s.clone()),
            Some(self.morse.t),
        )
        .map_err(|e| e.to_string())?;
        let mut critical_points = Vec::new();
        let mut region_of = Vec::new();
        for r in &self.regions {
            let sigma = parse_sigma(&r.sigma)?;
            for mem in &r.members {
                critical_points.push(CriticalPoint {
                    x: mem.x.clone(),
                    log_g: mem.log_g,
                    index: mem.index,
                    eigenvalues: Vec::new(),
                    unstable_eigenvectors: Vec::new(),
                    sigma: sigma.clone(),
                });
                region_of.push(r.id);
            }
        }
        Ok(Reloaded {
            input,
            morse,
            critical_points,
            region_of,
        })
    }
}

pub struct Reloaded {
    pub input: ArrangementInput,
    pub morse: MorseFunction,
    pub critical_points: Vec<CriticalPoint>,
    pub region_of: Vec<usize>,
}

pub fn parse_sigma(s: &str) -> Result<Vec<i8>, String> {
    s.chars()
        .map(|c| match c {
            '+' => Ok(1),
            '-' => Ok(-1),
            other => Err(format!("bad sign `{other}` in sign vector {s:?}")),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(round12(2.0 / 3.0), 0.666666666667);
        assert_eq!(round12(-1.0e-20 / 3.0), -3.33333333333e-21);
        assert_eq!(round12(0.0), 0.0);
        assert_eq!(round12(12.5), 12.5);
    }

    #[test]
    fn sigma_strings() {
        assert_eq!(parse_sigma("+-+").unwrap(), vec![1, -1, 1]);
        assert!(parse_sigma("+0").is_err());
    }
}
