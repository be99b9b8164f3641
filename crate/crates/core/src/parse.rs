//! Recursive-descent parser for polynomial strings such as `"x1^2 - 3/4*x2 + (1+i)*x1*xb1"`.

use num_traits::Zero;

use crate::error::AlgebraError;
use crate::gauss::GaussRational;
use crate::poly::{holomorphic_vars, real_analytic_vars, Polynomial};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>, AlgebraError> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Tok::Num(chars[start..i].iter().collect()));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(AlgebraError::Parse(format!("unexpected character '{c}' in '{s}'")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    vars: &'a [String],
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> AlgebraError {
        AlgebraError::Parse(format!("{msg} in '{}'", self.src))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat_op(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Polynomial, AlgebraError> {
        let mut acc = self.term()?;
        loop {
            if self.eat_op('+') {
                acc = &acc + &self.term()?;
            } else if self.eat_op('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, AlgebraError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat_op('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat_op('/') {
                let d = self.unary()?;
                if !d.is_constant() || d.is_zero() {
                    return Err(self.err("division by a non-constant or zero"));
                }
                let inv = d.constant_term().inv().ok_or_else(|| self.err("division by zero"))?;
                acc = acc.scale(&inv);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Polynomial, AlgebraError> {
        if self.eat_op('-') {
            return Ok(-&self.unary()?);
        }
        if self.eat_op('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Polynomial, AlgebraError> {
        let base = self.atom()?;
        if self.eat_op('^') {
            match self.toks.get(self.pos).cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = n.parse().map_err(|_| self.err("bad exponent"))?;
                    if e > 64 {
                        return Err(self.err("exponent too large"));
                    }
                    Ok(base.pow(e))
                }
                _ => Err(self.err("exponent must be a non-negative integer")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Polynomial, AlgebraError> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let v = crate::gauss::parse_rational(&n)?;
                Ok(Polynomial::constant(self.vars, GaussRational::from_rational(v)))
            }
            Some(Tok::Ident(id)) => {
                self.pos += 1;
                if let Some(k) = self.vars.iter().position(|v| *v == id) {
                    Ok(Polynomial::var(self.vars, k))
                } else if id == "i" {
                    Ok(Polynomial::constant(self.vars, GaussRational::i()))
                } else {
                    Err(self.err(&format!("unknown variable '{id}'")))
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat_op(')') {
                    return Err(self.err("missing ')'"));
                }
                Ok(e)
            }
            _ => Err(self.err("unexpected end or token")),
        }
    }
}

/// Parses a polynomial over the given variable names; `i` denotes the imaginary unit.
pub fn parse_polynomial(s: &str, vars: &[String]) -> Result<Polynomial, AlgebraError> {
    let toks = tokenize(s)?;
    if toks.is_empty() {
        return Err(AlgebraError::Parse("empty polynomial".into()));
    }
    let mut p = Parser { toks, pos: 0, vars, src: s };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}

/// Holomorphic polynomial in `x1..xn`.
pub fn parse_holomorphic(s: &str, n: usize) -> Result<Polynomial, AlgebraError> {
    parse_polynomial(s, &holomorphic_vars(n))
}

/// Real-analytic polynomial in `x1..xn, xb1..xbn`.
pub fn parse_real_analytic(s: &str, n: usize) -> Result<Polynomial, AlgebraError> {
    parse_polynomial(s, &real_analytic_vars(n))
}

/// True when a real-analytic polynomial takes real values: its coefficient of
/// `x^a xb^b` is the conjugate of the coefficient of `x^b xb^a`.
pub fn is_real_valued(p: &Polynomial) -> bool {
    let n = p.nvars() / 2;
    p.terms().iter().all(|(e, c)| {
        let mut swapped = e[n..].to_vec();
        swapped.extend_from_slice(&e[..n]);
        let other = p.terms().get(&swapped).cloned().unwrap_or_else(GaussRational::zero);
        other == c.conj() && !c.is_zero()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_arithmetic() {
        let p = parse_holomorphic("(x1 + x2)^2 - 2*x1*x2", 2).unwrap();
        assert_eq!(p, parse_holomorphic("x1^2 + x2^2", 2).unwrap());
        let q = parse_holomorphic("3/6*x1 - i*x2/2", 2).unwrap();
        assert_eq!(q.to_string(), "1/2*x1 - 1/2*i*x2");
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_holomorphic("x3", 2).is_err());
        assert!(parse_holomorphic("x1 +", 2).is_err());
        assert!(parse_holomorphic("x1/x2", 2).is_err());
        assert!(parse_holomorphic("x1 $ 2", 2).is_err());
    }

    #[test]
    fn real_valued_detection() {
        assert!(is_real_valued(&parse_real_analytic("x1*xb1 + x2*xb2 + 1", 2).unwrap()));
        assert!(is_real_valued(&parse_real_analytic("i*x1 - i*xb1", 1).unwrap()));
        assert!(!is_real_valued(&parse_real_analytic("x1", 1).unwrap()));
    }
}
