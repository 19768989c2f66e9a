//! Sparse multivariate polynomials with real coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic. No zero coefficient is ever stored, so two equal
//! polynomials always have identical term maps.

mod json;
mod parse;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::NumAssign;
use thiserror::Error;

pub use json::PolynomialJson;
pub use parse::ParseError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("variable index {index} out of range for {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },
    #[error("point has {got} coordinates, polynomial has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("polynomials live in different rings ({0} vs {1} variables)")]
    RingMismatch(usize, usize),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("arrangement must contain at least one polynomial")]
    EmptyArrangement,
    #[error("arrangement polynomial {0} is zero")]
    ZeroPolynomial(usize),
    #[error("invalid polynomial json: {0}")]
    Json(String),
}

/// Scalars a polynomial with real coefficients can be evaluated at.
pub trait Scalar: NumAssign + Copy + Send + Sync + fmt::Debug + 'static {
    fn from_real(c: f64) -> Self;
    fn modulus(&self) -> f64;
}

impl Scalar for f64 {
    #[inline]
    fn from_real(c: f64) -> Self {
        c
    }
    #[inline]
    fn modulus(&self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    #[inline]
    fn from_real(c: f64) -> Self {
        Complex64::new(c, 0.0)
    }
    #[inline]
    fn modulus(&self) -> f64 {
        self.norm()
    }
}

/// Exponent vector of a monomial, one entry per variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn eval<S: Scalar>(&self, x: &[S]) -> S {
        let mut acc = S::one();
        for (xi, &e) in x.iter().zip(&self.0) {
            if e > 0 {
                acc *= pow(*xi, e);
            }
        }
        acc
    }
}

/// Graded lexicographic order: total degree first, then lexicographic with
/// `x_1 > x_2 > ...`.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[inline]
pub(crate) fn pow<S: Scalar>(x: S, e: u32) -> S {
    let mut base = x;
    let mut e = e;
    let mut acc = S::one();
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        e >>= 1;
        if e > 0 {
            base *= base;
        }
    }
    acc
}

/// Total degree, with the zero polynomial sitting below every finite degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    MinusInfinity,
    Finite(u32),
}

impl Degree {
    pub fn finite(self) -> Option<u32> {
        match self {
            Degree::MinusInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(Monomial(e), 1.0);
        p
    }

    /// Builds a polynomial from (exponents, coefficient) pairs, merging
    /// duplicates and dropping zeros.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Vec<u32>, f64)>,
    {
        let mut p = Self::zero(nvars);
        for (exp, c) in terms {
            if exp.len() != nvars {
                return Err(PolyError::DimensionMismatch {
                    expected: nvars,
                    got: exp.len(),
                });
            }
            p.add_term(Monomial(exp), c);
        }
        Ok(p)
    }

    pub fn parse(src: &str, vars: &[&str]) -> Result<Self, PolyError> {
        Ok(parse::parse(src, vars)?)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: f64) {
        debug_assert_eq!(m.nvars(), self.nvars);
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s == 0.0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, f64)> + '_ {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn coefficient(&self, exponents: &[u32]) -> f64 {
        self.terms
            .get(&Monomial(exponents.to_vec()))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn degree(&self) -> Degree {
        self.terms
            .keys()
            .next_back()
            .map_or(Degree::MinusInfinity, |m| Degree::Finite(m.total_degree()))
    }

    /// Finite degree, treating the zero polynomial as degree 0.
    pub fn degree_or_zero(&self) -> u32 {
        self.degree().finite().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.degree_or_zero() == 0
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::total_degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Largest coefficient magnitude (0 for the zero polynomial).
    pub fn max_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        let mut p = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            p.add_term(m.clone(), c * s);
        }
        p
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::constant(self.nvars, 1.0);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self, i: usize) -> Result<Polynomial, PolyError> {
        if i >= self.nvars {
            return Err(PolyError::VariableOutOfRange {
                index: i,
                nvars: self.nvars,
            });
        }
        let mut p = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exp = m.0.clone();
            exp[i] -= 1;
            p.add_term(Monomial(exp), c * f64::from(e));
        }
        Ok(p)
    }

    pub fn gradient(&self) -> Vec<Polynomial> {
        (0..self.nvars)
            .map(|i| self.derivative(i).expect("index in range"))
            .collect()
    }

    pub fn eval<S: Scalar>(&self, x: &[S]) -> Result<S, PolyError> {
        if x.len() != self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                got: x.len(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked<S: Scalar>(&self, x: &[S]) -> S {
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            acc += m.eval(x) * S::from_real(*c);
        }
        acc
    }

    /// `Σ |c_α| |x^α|`, the natural scale for relative residuals.
    pub fn abs_eval<S: Scalar>(&self, x: &[S]) -> f64 {
        let ax: Vec<f64> = x.iter().map(Scalar::modulus).collect();
        self.terms
            .iter()
            .map(|(m, c)| c.abs() * m.eval(&ax))
            .sum()
    }

    /// `|p(x)|` relative to the size of its terms, floored by the largest
    /// coefficient so that a vanishing monomial still registers as zero.
    pub fn relative_value<S: Scalar>(&self, x: &[S]) -> f64 {
        self.eval_unchecked(x).modulus() / self.abs_eval(x).max(self.max_coefficient())
    }

    /// Adds a leading variable `x_0` so every term reaches the total degree.
    pub fn homogenize(&self) -> Polynomial {
        let d = self.degree_or_zero();
        let mut p = Polynomial::zero(self.nvars + 1);
        for (m, c) in &self.terms {
            let mut exp = Vec::with_capacity(self.nvars + 1);
            exp.push(d - m.total_degree());
            exp.extend_from_slice(&m.0);
            p.add_term(Monomial(exp), *c);
        }
        p
    }

    /// Sets the leading variable to 1 and drops it.
    pub fn dehomogenize(&self) -> Polynomial {
        self.specialize(0, 1.0)
    }

    /// Substitutes `x_i = value` and removes the variable.
    pub fn specialize(&self, i: usize, value: f64) -> Polynomial {
        assert!(i < self.nvars, "variable index out of range");
        let mut p = Polynomial::zero(self.nvars - 1);
        for (m, c) in &self.terms {
            let e = m.0[i];
            let factor = if e == 0 { 1.0 } else { pow(value, e) };
            if factor == 0.0 {
                continue;
            }
            let mut exp = m.0.clone();
            exp.remove(i);
            p.add_term(Monomial(exp), c * factor);
        }
        p
    }

    /// Chart `x_0 = 0, x_1 = 1` of a homogenized polynomial, a polynomial in
    /// the remaining `n - 1` variables.
    pub fn restrict_chart(&self) -> Polynomial {
        assert!(self.nvars >= 2, "chart restriction needs x_0 and x_1");
        self.specialize(0, 0.0).specialize(0, 1.0)
    }

    /// Coefficients (ascending powers of `t`) of `t ↦ p(t·dir)`.
    pub fn along_ray(&self, dir: &[f64]) -> Vec<f64> {
        assert_eq!(dir.len(), self.nvars);
        let mut coeffs = vec![0.0; self.degree_or_zero() as usize + 1];
        for (m, c) in &self.terms {
            coeffs[m.total_degree() as usize] += c * m.eval(dir);
        }
        coeffs
    }

    /// Writes the polynomial with the given variable names.
    pub fn to_string_with(&self, vars: &[&str]) -> String {
        assert_eq!(vars.len(), self.nvars);
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = *c < 0.0;
            let a = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = m
                .0
                .iter()
                .zip(vars)
                .filter(|(e, _)| **e > 0)
                .map(|(e, v)| {
                    if *e == 1 {
                        v.to_string()
                    } else {
                        format!("{v}^{e}")
                    }
                })
                .collect();
            if mono.is_empty() {
                out.push_str(&fmt_coeff(a));
            } else {
                if a != 1.0 {
                    out.push_str(&fmt_coeff(a));
                    out.push('*');
                }
                out.push_str(&mono.join("*"));
            }
        }
        out
    }

    pub fn default_var_names(nvars: usize) -> Vec<String> {
        (1..=nvars).map(|i| format!("x{i}")).collect()
    }

    fn check_ring(&self, other: &Polynomial) {
        assert_eq!(
            self.nvars, other.nvars,
            "polynomial ring mismatch: {} vs {} variables",
            self.nvars, other.nvars
        );
    }

    /// Product of a list of polynomials (1 for the empty list).
    pub fn product<'a, I: IntoIterator<Item = &'a Polynomial>>(nvars: usize, it: I) -> Polynomial {
        it.into_iter()
            .fold(Polynomial::constant(nvars, 1.0), |acc, p| &acc * p)
    }
}

fn fmt_coeff(a: f64) -> String {
    // `Display` for f64 is the shortest representation that round-trips.
    let s = format!("{a}");
    if s.contains("e") {
        format!("({s})")
    } else {
        s
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = Polynomial::default_var_names(self.nvars);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        f.write_str(&self.to_string_with(&refs))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.check_ring(rhs);
        let mut p = self.clone();
        for (m, c) in &rhs.terms {
            p.add_term(m.clone(), *c);
        }
        p
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.check_ring(rhs);
        let mut p = self.clone();
        for (m, c) in &rhs.terms {
            p.add_term(m.clone(), -*c);
        }
        p
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.check_ring(rhs);
        let mut p = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                p.add_term(ma.mul(mb), ca * cb);
            }
        }
        p
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// The input list `f_1, ..., f_k`, all nonzero and in the same `n` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Arrangement {
    nvars: usize,
    polys: Vec<Polynomial>,
}

impl Arrangement {
    pub fn new(nvars: usize, polys: Vec<Polynomial>) -> Result<Self, PolyError> {
        if polys.is_empty() {
            return Err(PolyError::EmptyArrangement);
        }
        Self::new_allow_empty(nvars, polys)
    }

    /// Arrangements produced internally (restrictions, charts at infinity)
    /// may lose every factor; the Morse machinery still works with `k = 0`.
    pub(crate) fn new_allow_empty(nvars: usize, polys: Vec<Polynomial>) -> Result<Self, PolyError> {
        for (i, p) in polys.iter().enumerate() {
            if p.nvars() != nvars {
                return Err(PolyError::RingMismatch(nvars, p.nvars()));
            }
            if p.is_zero() {
                return Err(PolyError::ZeroPolynomial(i));
            }
        }
        Ok(Arrangement { nvars, polys })
    }

    pub fn parse(exprs: &[&str], vars: &[&str]) -> Result<Self, PolyError> {
        let polys = exprs
            .iter()
            .map(|e| Polynomial::parse(e, vars))
            .collect::<Result<Vec<_>, _>>()?;
        Arrangement::new(vars.len(), polys)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.polys.iter().map(Polynomial::degree_or_zero).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xyz(s: &str) -> Polynomial {
        Polynomial::parse(s, &["x", "y", "z"]).unwrap()
    }

    #[test]
    fn grlex_order() {
        let a = Monomial::new(vec![2, 0, 0]);
        let b = Monomial::new(vec![0, 1, 1]);
        let c = Monomial::new(vec![0, 0, 3]);
        assert!(a > b);
        assert!(c > a);
    }

    #[test]
    fn degree_sentinel() {
        assert_eq!(Polynomial::zero(2).degree(), Degree::MinusInfinity);
        assert!(Degree::MinusInfinity < Degree::Finite(0));
        assert_eq!(xyz("x*y^2 + 1").degree(), Degree::Finite(3));
    }

    #[test]
    fn derivative_examples() {
        let p = Polynomial::parse("x^2+y^2-1", &["x", "y"]).unwrap();
        assert_eq!(
            p.derivative(0).unwrap(),
            Polynomial::parse("2x", &["x", "y"]).unwrap()
        );
        let f3 = xyz("100x^2 + 100y^2 + z^2 - 9");
        assert_eq!(f3.derivative(2).unwrap(), xyz("2z"));
        let c = Polynomial::constant(1, 5.0);
        assert!(c.derivative(0).unwrap().is_zero());
        assert!(matches!(
            c.derivative(1),
            Err(PolyError::VariableOutOfRange { .. })
        ));
    }

    #[test]
    fn evaluate_examples() {
        let f1 = xyz("x^2 + y^2 + z^2 - 1");
        assert_eq!(f1.eval(&[0.0, 0.0, 0.0]).unwrap(), -1.0);
        let cayley = xyz("2*x*y*z - x^2 - y^2 - z^2 + 1");
        assert_eq!(cayley.eval(&[1.0, 1.0, 1.0]).unwrap(), 0.0);
        let pt = [0.3, -1.2, 2.5];
        let cpt: Vec<Complex64> = pt.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let re = cayley.eval(&pt).unwrap();
        let c = cayley.eval(&cpt).unwrap();
        assert!((c.re - re).abs() < 1e-14 && c.im == 0.0);
        assert!(matches!(
            f1.eval(&[1.0, 2.0]),
            Err(PolyError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn homogenize_examples() {
        let p = Polynomial::parse("x^2+y^2-1", &["x", "y"]).unwrap();
        let h = p.homogenize();
        assert_eq!(
            h,
            Polynomial::parse("x^2+y^2-w^2", &["w", "x", "y"]).unwrap()
        );
        assert_eq!(h.dehomogenize(), p);
        let l = Polynomial::parse("x + 3y + 1", &["x", "y"]).unwrap();
        assert_eq!(
            l.homogenize(),
            Polynomial::parse("x + 3y + w", &["w", "x", "y"]).unwrap()
        );
        let xy = Polynomial::parse("x*y", &["x", "y"]).unwrap();
        assert_eq!(
            xy.homogenize(),
            Polynomial::parse("x*y", &["w", "x", "y"]).unwrap()
        );
        assert!(Polynomial::zero(3).homogenize().is_zero());
    }

    #[test]
    fn chart_restriction() {
        let f = xyz("x^2 + y^2 + z^2 - 1").homogenize();
        assert_eq!(
            f.restrict_chart(),
            Polynomial::parse("1 + u^2 + v^2", &["u", "v"]).unwrap()
        );
        let g = Polynomial::parse("x + y", &["x", "y"]).unwrap().homogenize();
        assert_eq!(
            g.restrict_chart(),
            Polynomial::parse("1 + u", &["u"]).unwrap()
        );
        // the plane z = 0 from the hyperboloid arrangement
        let z = xyz("z").homogenize();
        assert_eq!(
            z.restrict_chart(),
            Polynomial::parse("v", &["u", "v"]).unwrap()
        );
    }

    #[test]
    fn ray_restriction() {
        let f = xyz("x^2 + y^2 + z^2 - 1");
        assert_eq!(f.along_ray(&[1.0, 0.0, 0.0]), vec![-1.0, 0.0, 1.0]);
        let g = xyz("x*y + z");
        assert_eq!(g.along_ray(&[1.0, 2.0, 3.0]), vec![0.0, 3.0, 2.0]);
    }

    #[test]
    fn arrangement_validation() {
        assert_eq!(
            Arrangement::new(2, vec![]),
            Err(PolyError::EmptyArrangement)
        );
        assert!(matches!(
            Arrangement::new(2, vec![Polynomial::zero(2)]),
            Err(PolyError::ZeroPolynomial(0))
        ));
        let a = Arrangement::parse(&["x", "y^2 - x"], &["x", "y"]).unwrap();
        assert_eq!(a.degrees(), vec![1, 2]);
    }
}
