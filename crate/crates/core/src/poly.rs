//! Sparse multivariate polynomials over ℚ(i).
//!
//! Exponent vectors are ordered lexicographically with the first variable most
//! significant, so the last entry of the term map is the lex-leading term.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::AlgebraError;
use crate::gauss::GaussRational;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Polynomial {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, GaussRational>,
}

/// Names `x1..xn` of holomorphic coordinates.
pub fn holomorphic_vars(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// Names `x1..xn, xb1..xbn`; `xbj` stands for the conjugate of `xj`.
pub fn real_analytic_vars(n: usize) -> Vec<String> {
    let mut v = holomorphic_vars(n);
    v.extend((1..=n).map(|i| format!("xb{i}")));
    v
}

impl Polynomial {
    pub fn zero(vars: &[String]) -> Self {
        Polynomial { vars: vars.to_vec(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &[String], c: GaussRational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; vars.len()], c);
        }
        p
    }

    pub fn one(vars: &[String]) -> Self {
        Self::constant(vars, GaussRational::one())
    }

    pub fn var(vars: &[String], i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Self::monomial(vars, e, GaussRational::one())
    }

    pub fn monomial(vars: &[String], exps: Vec<u32>, c: GaussRational) -> Self {
        assert_eq!(exps.len(), vars.len());
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn from_terms(vars: &[String], terms: impl IntoIterator<Item = (Vec<u32>, GaussRational)>) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len());
            p.add_term(e, &c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: &GaussRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c.clone());
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, GaussRational> {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.constant_term().is_one()
    }

    pub fn constant_term(&self) -> GaussRational {
        self.terms.get(&vec![0; self.vars.len()]).cloned().unwrap_or_else(GaussRational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|e| e[v]).max().unwrap_or(0)
    }

    pub fn contains_var(&self, v: usize) -> bool {
        self.terms.keys().any(|e| e[v] > 0)
    }

    /// Index of the highest-numbered variable that occurs.
    pub fn highest_var(&self) -> Option<usize> {
        (0..self.vars.len()).rev().find(|&v| self.contains_var(v))
    }

    pub fn occurring_vars(&self) -> Vec<usize> {
        (0..self.vars.len()).filter(|&v| self.contains_var(v)).collect()
    }

    pub fn leading_term(&self) -> Option<(&Vec<u32>, &GaussRational)> {
        self.terms.last_key_value()
    }

    pub fn leading_coefficient(&self) -> GaussRational {
        self.leading_term().map(|(_, c)| c.clone()).unwrap_or_else(GaussRational::zero)
    }

    /// Scales so that the lex-leading coefficient is one.
    pub fn monic(&self) -> Polynomial {
        match self.leading_term() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = c.inv().expect("nonzero");
                self.scale(&inv)
            }
        }
    }

    pub fn scale(&self, c: &GaussRational) -> Polynomial {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        Polynomial { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn conj_coefficients(&self) -> Polynomial {
        Polynomial { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, v)| (e.clone(), v.conj())).collect() }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Self::one(&self.vars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn check_same_vars(&self, other: &Polynomial) -> Result<(), AlgebraError> {
        if self.vars != other.vars {
            return Err(AlgebraError::VariableMismatch(format!("{:?} vs {:?}", self.vars, other.vars)));
        }
        Ok(())
    }

    /// Re-expresses the polynomial over a larger variable list that contains all current names.
    pub fn embed(&self, vars: &[String]) -> Result<Polynomial, AlgebraError> {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| {
                vars.iter()
                    .position(|w| w == v)
                    .ok_or_else(|| AlgebraError::VariableMismatch(format!("variable {v} not in {vars:?}")))
            })
            .collect::<Result<_, _>>()?;
        let mut out = Polynomial::zero(vars);
        for (e, c) in &self.terms {
            let mut ne = vec![0; vars.len()];
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    ne[map[i]] = k;
                }
            }
            out.add_term(ne, c);
        }
        Ok(out)
    }

    pub fn eval(&self, point: &[GaussRational]) -> GaussRational {
        assert_eq!(point.len(), self.vars.len());
        let mut acc = GaussRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = &t * &point[i].pow(k);
                }
            }
            acc += &t;
        }
        acc
    }

    /// Substitutes the constant `value` for variable `v`; the variable list is kept.
    pub fn substitute_value(&self, v: usize, value: &GaussRational) -> Polynomial {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            let k = ne[v];
            ne[v] = 0;
            out.add_term(ne, &(c * &value.pow(k)));
        }
        out
    }

    /// Composes with polynomial maps: variable `i` is replaced by `images[i]`.
    /// All images must share a common variable list, which becomes the result's.
    pub fn compose(&self, images: &[Polynomial]) -> Result<Polynomial, AlgebraError> {
        if images.len() != self.vars.len() {
            return Err(AlgebraError::DimensionMismatch { expected: self.vars.len(), found: images.len() });
        }
        let target = match images.first() {
            Some(p) => p.vars.clone(),
            None => return Ok(self.clone()),
        };
        for p in images {
            if p.vars != target {
                return Err(AlgebraError::VariableMismatch("images use different variables".into()));
            }
        }
        let mut cache: Vec<Vec<Polynomial>> = images.iter().map(|p| vec![Polynomial::one(&target), p.clone()]).collect();
        let mut out = Polynomial::zero(&target);
        for (e, c) in &self.terms {
            let mut t = Polynomial::constant(&target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while cache[i].len() <= k as usize {
                    let next = &cache[i][cache[i].len() - 1] * &images[i];
                    cache[i].push(next);
                }
                if k > 0 {
                    t = &t * &cache[i][k as usize];
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// `P(x + p)`.
    pub fn translate(&self, point: &[GaussRational]) -> Polynomial {
        let images: Vec<Polynomial> = (0..self.vars.len())
            .map(|i| &Polynomial::var(&self.vars, i) + &Polynomial::constant(&self.vars, point[i].clone()))
            .collect();
        self.compose(&images).expect("same variables")
    }

    pub fn derivative(&self, v: usize) -> Polynomial {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[v] > 0 {
                let mut ne = e.clone();
                ne[v] -= 1;
                out.add_term(ne, &(c * &GaussRational::from_int(e[v] as i64)));
            }
        }
        out
    }

    /// Order of vanishing at `point`; `None` for the zero polynomial.
    pub fn order_at(&self, point: &[GaussRational]) -> Option<u32> {
        if self.is_zero() {
            return None;
        }
        let t = self.translate(point);
        t.terms.keys().map(|e| e.iter().sum::<u32>()).min()
    }

    /// Homogeneous part of the given total degree.
    pub fn homogeneous_part(&self, d: u32) -> Polynomial {
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().filter(|(e, _)| e.iter().sum::<u32>() == d).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match it.next() {
            None => true,
            Some(d) => it.all(|k| k == d),
        }
    }

    /// Coefficients as a polynomial in variable `v`: entry `k` multiplies `x_v^k`.
    pub fn coeffs_in(&self, v: usize) -> Vec<Polynomial> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![Self::zero(&self.vars); d + 1];
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            let k = ne[v] as usize;
            ne[v] = 0;
            out[k].terms.insert(ne, c.clone());
        }
        out
    }

    pub fn from_coeffs_in(vars: &[String], v: usize, coeffs: &[Polynomial]) -> Polynomial {
        let mut out = Self::zero(vars);
        for (k, c) in coeffs.iter().enumerate() {
            for (e, x) in &c.terms {
                let mut ne = e.clone();
                ne[v] += k as u32;
                out.add_term(ne, x);
            }
        }
        out
    }

    /// Leading coefficient with respect to variable `v`.
    pub fn lc_in(&self, v: usize) -> Polynomial {
        self.coeffs_in(v).pop().unwrap_or_else(|| Self::zero(&self.vars))
    }

    /// Exact quotient `self / g`, or `None` when `g` does not divide `self`.
    pub fn div_exact(&self, g: &Polynomial) -> Option<Polynomial> {
        if g.is_zero() {
            return None;
        }
        let (ge, gc) = g.leading_term().map(|(e, c)| (e.clone(), c.clone()))?;
        let ginv = gc.inv()?;
        let mut r = self.clone();
        let mut q = Self::zero(&self.vars);
        while let Some((re, rc)) = r.leading_term().map(|(e, c)| (e.clone(), c.clone())) {
            if re.iter().zip(&ge).any(|(a, b)| a < b) {
                return None;
            }
            let me: Vec<u32> = re.iter().zip(&ge).map(|(a, b)| a - b).collect();
            let mc = &rc * &ginv;
            let m = Polynomial::monomial(&self.vars, me, mc);
            r = &r - &(&m * g);
            q = &q + &m;
        }
        Some(q)
    }

    pub fn divides(&self, f: &Polynomial) -> bool {
        f.div_exact(self).is_some()
    }

    pub fn to_numeric(&self) -> NumPoly {
        NumPoly::from_poly(self)
    }

    /// True when every coefficient is real (in ℚ).
    pub fn has_rational_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.is_real())
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, o: &Polynomial) -> Polynomial {
        assert_eq!(self.vars, o.vars, "variable lists differ");
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c);
        }
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, o: &Polynomial) -> Polynomial {
        assert_eq!(self.vars, o.vars, "variable lists differ");
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), &-c);
        }
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, o: &Polynomial) -> Polynomial {
        assert_eq!(self.vars, o.vars, "variable lists differ");
        let mut out = Polynomial::zero(&self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, &(c1 * c2));
            }
        }
        out
    }
}

impl<'a> Neg for &'a Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&GaussRational::from_int(-1))
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, o: Polynomial) -> Polynomial {
        &self + &o
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, o: Polynomial) -> Polynomial {
        &self - &o
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, o: Polynomial) -> Polynomial {
        &self * &o
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let zero = num_rational::BigRational::zero();
            let negative_real = (c.is_real() && c.re < zero) || (c.re.is_zero() && c.im < zero);
            let (sign, mag) = if negative_real { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { self.vars[i].clone() } else { format!("{}^{}", self.vars[i], k) })
                .collect();
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", mag, mono.join("*"))?;
            }
        }
        Ok(())
    }
}

/// A polynomial compiled for fast floating-point evaluation.
#[derive(Clone, Debug)]
pub struct NumPoly {
    nvars: usize,
    max_exp: Vec<u32>,
    terms: Vec<(Vec<u32>, Complex64)>,
}

impl NumPoly {
    pub fn from_poly(p: &Polynomial) -> Self {
        let nvars = p.nvars();
        let terms: Vec<(Vec<u32>, Complex64)> = p.terms().iter().map(|(e, c)| (e.clone(), c.to_complex())).collect();
        let max_exp = (0..nvars).map(|v| p.degree_in(v)).collect();
        NumPoly { nvars, max_exp, terms }
    }

    pub fn zero(nvars: usize) -> Self {
        NumPoly { nvars, max_exp: vec![0; nvars], terms: Vec::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        debug_assert_eq!(x.len(), self.nvars);
        if self.terms.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        if self.terms.len() == 1 {
            let (e, c) = &self.terms[0];
            let mut t = *c;
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= x[v].powu(k);
                }
            }
            return t;
        }
        // Power tables per variable; sizes are tiny.
        let mut pows: [[Complex64; 16]; 6] = [[Complex64::new(0.0, 0.0); 16]; 6];
        let small = self.nvars <= 6 && self.max_exp.iter().all(|&m| m < 16);
        if small {
            for v in 0..self.nvars {
                pows[v][0] = Complex64::new(1.0, 0.0);
                for k in 1..=self.max_exp[v] as usize {
                    pows[v][k] = pows[v][k - 1] * x[v];
                }
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = *c;
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= if small { pows[v][k as usize] } else { x[v].powu(k) };
                }
            }
            acc += t;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_polynomial;

    fn p(s: &str) -> Polynomial {
        parse_polynomial(s, &holomorphic_vars(2)).unwrap()
    }

    #[test]
    fn arithmetic_and_division() {
        let a = p("x1^2 - x2");
        let b = p("x1 + 3*x2 - 1");
        let c = &a * &b;
        assert_eq!(c.div_exact(&b).unwrap(), a);
        assert!(c.div_exact(&p("x1 + 2")).is_none());
    }

    #[test]
    fn order_and_translate() {
        let f = p("(x1 - 1)^3*(x2 + 2)");
        let pt = [GaussRational::from_int(1), GaussRational::from_int(-2)];
        assert_eq!(f.order_at(&pt), Some(4));
        assert_eq!(f.translate(&pt), p("x1^3*x2"));
    }

    #[test]
    fn display_parses_back() {
        for s in ["x1^2*x2 - 3/4*x2 + 1", "(1+2*i)*x1 - i*x2^3", "-x1", "0"] {
            let q = p(s);
            assert_eq!(p(&q.to_string()), q, "{s} -> {q}");
        }
    }

    #[test]
    fn numeric_evaluation_matches() {
        let f = p("x1^3*x2 - 2*x2^2 + i");
        let x = [GaussRational::from_frac(1, 2), GaussRational::new(crate::gauss::rat(1, 3), crate::gauss::rat(-2, 1))];
        let exact = f.eval(&x).to_complex();
        let num = f.to_numeric().eval(&[x[0].to_complex(), x[1].to_complex()]);
        assert!((exact - num).norm() < 1e-12);
    }
}
