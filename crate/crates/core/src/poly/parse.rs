//! Recursive-descent parser for polynomial expressions.
//!
//! Grammar (left associative, usual precedence):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/' | <implicit>) unary)*
//! unary   := ('+' | '-') unary | power
//! power   := primary ('^' uint)?
//! primary := number | ident | '(' expr ')'
//! ```
//!
//! Implicit multiplication is only recognised directly after a numeric
//! literal (`3x`, `3/2z^2`). Division requires a constant divisor.

use thiserror::Error;

use super::Polynomial;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("negative exponent at position {pos}")]
    NegativeExponent { pos: usize },
    #[error("division by a non-constant or zero expression at position {pos}")]
    BadDivision { pos: usize },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' | '−' => Tok::Minus,
            '*' | '·' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            c if c.is_ascii_digit() || c == '.' => {
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                // scientific notation only when a digit follows the marker
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let v = text.parse::<f64>().map_err(|_| ParseError::Syntax {
                    pos: start,
                    msg: format!("bad number `{text}`"),
                })?;
                out.push((Tok::Num(v), start));
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                while i < chars.len()
                    && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
                {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), start));
                continue;
            }
            other => {
                return Err(ParseError::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, chars.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn syntax<T>(&self, msg: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos(),
            msg: msg.to_string(),
        })
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut last_was_literal = matches!(self.peek(), Tok::Num(_));
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    last_was_literal = matches!(self.peek(), Tok::Num(_));
                    acc = &acc * &self.unary()?;
                }
                Tok::Slash => {
                    self.bump();
                    let pos = self.pos();
                    last_was_literal = matches!(self.peek(), Tok::Num(_));
                    let d = self.unary()?;
                    if !d.is_constant() || d.is_zero() {
                        return Err(ParseError::BadDivision { pos });
                    }
                    let c = d.coefficient(&vec![0; d.nvars()]);
                    acc = acc.scale(1.0 / c);
                }
                Tok::Ident(_) | Tok::LParen if last_was_literal => {
                    last_was_literal = false;
                    acc = &acc * &self.unary()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Polynomial, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(-&self.unary()?)
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        match self.bump() {
            Tok::Minus => Err(ParseError::NegativeExponent { pos }),
            Tok::Num(v) if v.fract() == 0.0 && v >= 0.0 && v <= u32::MAX as f64 => {
                Ok(base.pow(v as u32))
            }
            Tok::LParen => {
                // allow x^(3)
                let inner = self.expr()?;
                if self.bump() != Tok::RParen {
                    return self.syntax("expected `)`");
                }
                let c = inner.coefficient(&vec![0; inner.nvars()]);
                if !inner.is_constant() {
                    return Err(ParseError::Syntax {
                        pos,
                        msg: "exponent must be a non-negative integer".into(),
                    });
                }
                if c < 0.0 {
                    return Err(ParseError::NegativeExponent { pos });
                }
                if c.fract() != 0.0 {
                    return Err(ParseError::Syntax {
                        pos,
                        msg: "exponent must be a non-negative integer".into(),
                    });
                }
                Ok(base.pow(c as u32))
            }
            _ => Err(ParseError::Syntax {
                pos,
                msg: "exponent must be a non-negative integer".into(),
            }),
        }
    }

    fn primary(&mut self) -> Result<Polynomial, ParseError> {
        let n = self.vars.len();
        let pos = self.pos();
        match self.bump() {
            Tok::Num(v) => Ok(Polynomial::constant(n, v)),
            Tok::Ident(name) => match self.vars.iter().position(|v| *v == name) {
                Some(i) => Ok(Polynomial::var(n, i)),
                None => Err(ParseError::UnknownVariable { name, pos }),
            },
            Tok::LParen => {
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return self.syntax("expected `)`");
                }
                self.bump();
                Ok(e)
            }
            Tok::End => Err(ParseError::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            }),
            other => Err(ParseError::Syntax {
                pos,
                msg: format!("unexpected token {other:?}"),
            }),
        }
    }
}

pub(super) fn parse(src: &str, vars: &[&str]) -> Result<Polynomial, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, at: 0, vars };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.syntax("trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    const XYZ: [&str; 3] = ["x", "y", "z"];

    #[test]
    fn sphere_terms() {
        let p = parse("x^2 + y^2 + z^2 - 1", &XYZ).unwrap();
        assert_eq!(p.num_terms(), 4);
        let coeffs: Vec<f64> = p.terms().rev().map(|(_, c)| c).collect();
        assert_eq!(coeffs, vec![1.0, 1.0, 1.0, -1.0]);
    }

    #[test]
    fn zero_and_identity() {
        assert!(parse("0", &XYZ).unwrap().is_zero());
        let p = parse("(x+y)^2 - x^2 - 2*x*y", &XYZ).unwrap();
        assert_eq!(p, parse("y^2", &XYZ).unwrap());
    }

    #[test]
    fn listing_style_literals() {
        let p = parse("x^2 + y^2 - 1/4 - 3/2z^2", &XYZ).unwrap();
        assert_eq!(p.coefficient(&[0, 0, 2]), -1.5);
        assert_eq!(p.coefficient(&[0, 0, 0]), -0.25);
        let q = parse("60x^5*y + 3x^2*y^4", &["x", "y"]).unwrap();
        assert_eq!(q.coefficient(&[5, 1]), 60.0);
        assert_eq!(q.coefficient(&[2, 4]), 3.0);
        let r = parse("2(x+1)", &["x"]).unwrap();
        assert_eq!(r, parse("2*x + 2", &["x"]).unwrap());
        assert_eq!(parse("1.5e2*x", &["x"]).unwrap().coefficient(&[1]), 150.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse("x + w", &XYZ),
            Err(ParseError::UnknownVariable { pos: 4, .. })
        ));
        assert!(matches!(
            parse("x^-2", &XYZ),
            Err(ParseError::NegativeExponent { .. })
        ));
        assert!(matches!(parse("x + ", &XYZ), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("(x", &XYZ), Err(ParseError::Syntax { .. })));
        assert!(matches!(
            parse("1/x", &XYZ),
            Err(ParseError::BadDivision { .. })
        ));
        // implicit product only after a literal
        assert!(matches!(parse("x y", &XYZ), Err(ParseError::Syntax { .. })));
    }
}
