use serde::{Deserialize, Serialize};

use super::{PolyError, Polynomial};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub coef: f64,
}

/// `{"vars": [...], "terms": [{"exp": [..], "coef": c}, ...]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub vars: Vec<String>,
    pub terms: Vec<TermJson>,
}

impl PolynomialJson {
    pub fn from_polynomial(p: &Polynomial, vars: &[String]) -> Self {
        assert_eq!(vars.len(), p.nvars());
        PolynomialJson {
            vars: vars.to_vec(),
            terms: p
                .terms()
                .rev()
                .map(|(m, c)| TermJson {
                    exp: m.exponents().to_vec(),
                    coef: c,
                })
                .collect(),
        }
    }

    pub fn to_polynomial(&self) -> Result<Polynomial, PolyError> {
        let n = self.vars.len();
        for t in &self.terms {
            if t.exp.len() != n {
                return Err(PolyError::Json(format!(
                    "term exponent has length {}, expected {n}",
                    t.exp.len()
                )));
            }
        }
        Polynomial::from_terms(n, self.terms.iter().map(|t| (t.exp.clone(), t.coef)))
    }
}
