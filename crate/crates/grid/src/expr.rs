//! Symbolic real-valued functions that can be evaluated at arbitrary points.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use segre_core::gauss::rat_to_f64;
use segre_core::{NumPoly, Polynomial, QasDescriptor};

type Closure = Arc<dyn Fn(&[Complex64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum ScalarExpr {
    Const(f64),
    /// `c·log Σ|f_j|² + Re b(z, z̄)`; no generators means no logarithmic part.
    Qas { c: f64, generators: Vec<NumPoly>, smooth: Option<NumPoly> },
    /// `Re p(z, z̄)` for a real-analytic polynomial in `x1..xn, xb1..xbn`.
    RealPoly(NumPoly),
    Log(Box<ScalarExpr>),
    Exp(Box<ScalarExpr>),
    Sum(Vec<ScalarExpr>),
    Scaled(f64, Box<ScalarExpr>),
    Func(Closure),
}

impl fmt::Debug for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarExpr::Const(c) => write!(f, "Const({c})"),
            ScalarExpr::Qas { c, generators, .. } => write!(f, "Qas(c={c}, {} generators)", generators.len()),
            ScalarExpr::RealPoly(_) => write!(f, "RealPoly"),
            ScalarExpr::Log(e) => write!(f, "Log({e:?})"),
            ScalarExpr::Exp(e) => write!(f, "Exp({e:?})"),
            ScalarExpr::Sum(v) => write!(f, "Sum({v:?})"),
            ScalarExpr::Scaled(s, e) => write!(f, "{s}*{e:?}"),
            ScalarExpr::Func(_) => write!(f, "Func"),
        }
    }
}

fn with_conjugates(z: &[Complex64]) -> Vec<Complex64> {
    let mut v = z.to_vec();
    v.extend(z.iter().map(|c| c.conj()));
    v
}

impl ScalarExpr {
    pub fn from_qas(q: &QasDescriptor) -> Self {
        ScalarExpr::Qas {
            c: rat_to_f64(q.exponent()),
            generators: q.generators().iter().map(Polynomial::to_numeric).collect(),
            smooth: if q.smooth_part().is_zero() { None } else { Some(q.smooth_part().to_numeric()) },
        }
    }

    /// `c·log Σ|f_j|²` for holomorphic polynomials.
    pub fn log_sum_sq(c: f64, generators: &[Polynomial]) -> Self {
        ScalarExpr::Qas { c, generators: generators.iter().map(Polynomial::to_numeric).collect(), smooth: None }
    }

    /// `Re p` for a real-analytic polynomial.
    pub fn real_poly(p: &Polynomial) -> Self {
        ScalarExpr::RealPoly(p.to_numeric())
    }

    /// `|z − x|²`.
    pub fn dist_sq(x: Vec<Complex64>) -> Self {
        ScalarExpr::Func(Arc::new(move |z: &[Complex64]| z.iter().zip(&x).map(|(a, b)| (a - b).norm_sqr()).sum()))
    }

    pub fn func(f: impl Fn(&[Complex64]) -> f64 + Send + Sync + 'static) -> Self {
        ScalarExpr::Func(Arc::new(f))
    }

    pub fn eval(&self, z: &[Complex64]) -> f64 {
        match self {
            ScalarExpr::Const(c) => *c,
            ScalarExpr::Qas { c, generators, smooth } => {
                let mut v = 0.0;
                if !generators.is_empty() {
                    let s: f64 = generators.iter().map(|g| g.eval(z).norm_sqr()).sum();
                    v += c * s.ln();
                }
                if let Some(b) = smooth {
                    v += b.eval(&with_conjugates(z)).re;
                }
                v
            }
            ScalarExpr::RealPoly(p) => p.eval(&with_conjugates(z)).re,
            ScalarExpr::Log(e) => e.eval(z).ln(),
            ScalarExpr::Exp(e) => e.eval(z).exp(),
            ScalarExpr::Sum(v) => v.iter().map(|e| e.eval(z)).sum(),
            ScalarExpr::Scaled(s, e) => s * e.eval(z),
            ScalarExpr::Func(f) => f(z),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use segre_core::parse::{parse_holomorphic, parse_real_analytic};

    #[test]
    fn evaluates_qas() {
        let e = ScalarExpr::log_sum_sq(2.0, &[parse_holomorphic("x1", 1).unwrap()]);
        let z = [Complex64::new(0.5, 0.0)];
        assert!((e.eval(&z) - 2.0 * 0.25f64.ln()).abs() < 1e-14);
        assert_eq!(e.eval(&[Complex64::new(0.0, 0.0)]), f64::NEG_INFINITY);
        let r = ScalarExpr::real_poly(&parse_real_analytic("x1*xb1", 1).unwrap());
        assert!((r.eval(&[Complex64::new(0.3, 0.4)]) - 0.25).abs() < 1e-14);
    }
}
