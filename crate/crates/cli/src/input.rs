//! Arrangement input files.
//!
//! ```text
//! # two circles
//! vars: x y
//! x^2 + y^2 - 1
//! (x - 1)^2 + y^2 - 1
//! ```
//!
//! The `vars:` line comes first; every other non-blank line is one
//! polynomial. `#` starts a comment.

use carver_core::poly::{Arrangement, Polynomial};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum InputError {
    #[error("line {line}: expected a `vars:` line before any polynomial")]
    MissingVars { line: usize },
    #[error("`vars:` line lists no variables")]
    NoVariables,
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("no polynomials given")]
    Empty,
    #[error("line {line}: {message}")]
    Polynomial { line: usize, message: String },
}

/// A parsed arrangement together with the text it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct ArrangementInput {
    pub vars: Vec<String>,
    /// Source expressions, one per polynomial.
    pub exprs: Vec<String>,
    pub arrangement: Arrangement,
    /// Fixed denominator, for the built-in examples that carry one.
    pub denominator: Option<Polynomial>,
}

impl ArrangementInput {
    pub fn from_exprs(vars: Vec<String>, exprs: Vec<String>) -> Result<Self, InputError> {
        if vars.is_empty() {
            return Err(InputError::NoVariables);
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(InputError::DuplicateVariable(v.clone()));
            }
        }
        if exprs.is_empty() {
            return Err(InputError::Empty);
        }
        let names: Vec<&str> = vars.iter().map(String::as_str).collect();
        let polys = exprs
            .iter()
            .enumerate()
            .map(|(i, e)| {
                Polynomial::parse(e, &names).map_err(|err| InputError::Polynomial {
                    line: i + 1,
                    message: err.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let arrangement = Arrangement::new(vars.len(), polys).map_err(|err| InputError::Polynomial {
            line: 0,
            message: err.to_string(),
        })?;
        Ok(ArrangementInput {
            vars,
            exprs,
            arrangement,
            denominator: None,
        })
    }

    pub fn var_refs(&self) -> Vec<&str> {
        self.vars.iter().map(String::as_str).collect()
    }
}

/// Splits a variable list on whitespace and commas.
pub fn split_vars(s: &str) -> Vec<String> {
    s.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|v| !v.is_empty())
        .map(str::to_string)
        .collect()
}

pub fn parse_input(text: &str) -> Result<ArrangementInput, InputError> {
    let mut vars: Option<Vec<String>> = None;
    let mut exprs = Vec::new();
    let mut lines = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("vars:") {
            vars = Some(split_vars(rest));
            continue;
        }
        if vars.is_none() {
            return Err(InputError::MissingVars { line: no + 1 });
        }
        exprs.push(line.to_string());
        lines.push(no + 1);
    }
    let vars = vars.ok_or(InputError::Empty)?;
    ArrangementInput::from_exprs(vars, exprs).map_err(|e| match e {
        // report file lines rather than polynomial positions
        InputError::Polynomial { line, message } if line > 0 => InputError::Polynomial {
            line: lines[line - 1],
            message,
        },
        other => other,
    })
}

/// Renders an input file that [`parse_input`] reads back to the same
/// arrangement.
pub fn render_input(arr: &Arrangement, vars: &[&str], comment: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(c) = comment {
        for l in c.lines() {
            out.push_str("# ");
            out.push_str(l);
            out.push('\n');
        }
    }
    out.push_str(&format!("vars: {}\n", vars.join(" ")));
    for p in arr.polys() {
        out.push_str(&p.to_string_with(vars));
        out.push('\n');
    }
    out
}
