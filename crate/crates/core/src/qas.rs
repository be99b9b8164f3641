//! Functions with analytic singularities, `ψ = c·log Σ|f_j|² + b`.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::algebra::gcd;
use crate::error::AlgebraError;
use crate::gauss::{format_rational, parse_rational, GaussRational};
use crate::parse::{is_real_valued, parse_holomorphic, parse_real_analytic};
use crate::poly::{holomorphic_vars, real_analytic_vars, Polynomial};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QasDescriptor {
    dim: usize,
    exponent: BigRational,
    generators: Vec<Polynomial>,
    smooth: Polynomial,
}

impl QasDescriptor {
    pub fn new(dim: usize, exponent: BigRational, generators: Vec<Polynomial>, smooth: Polynomial) -> Result<Self, AlgebraError> {
        if !exponent.is_positive() {
            return Err(AlgebraError::Invalid("exponent must be positive".into()));
        }
        let hv = holomorphic_vars(dim);
        for g in &generators {
            if g.vars() != hv.as_slice() {
                return Err(AlgebraError::VariableMismatch("generators must be holomorphic in x1..xn".into()));
            }
        }
        if smooth.vars() != real_analytic_vars(dim).as_slice() {
            return Err(AlgebraError::VariableMismatch("smooth part must use x1..xn, xb1..xbn".into()));
        }
        if !smooth.is_zero() && !is_real_valued(&smooth) {
            return Err(AlgebraError::Invalid("smooth part is not real-valued".into()));
        }
        if generators.iter().all(|g| g.is_zero()) && !generators.is_empty() {
            return Err(AlgebraError::Invalid("all generators vanish identically".into()));
        }
        Ok(QasDescriptor { dim, exponent, generators, smooth })
    }

    /// `c·log Σ|f_j|²` with no smooth part.
    pub fn log_sum(dim: usize, exponent: BigRational, generators: Vec<Polynomial>) -> Result<Self, AlgebraError> {
        Self::new(dim, exponent, generators, Polynomial::zero(&real_analytic_vars(dim)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn exponent(&self) -> &BigRational {
        &self.exponent
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn smooth_part(&self) -> &Polynomial {
        &self.smooth
    }

    /// True when `ψ` has no logarithmic part.
    pub fn is_smooth(&self) -> bool {
        self.generators.is_empty()
    }

    /// Greatest common divisor of the generators.
    pub fn generator_gcd(&self) -> Polynomial {
        self.generators.iter().fold(Polynomial::zero(&holomorphic_vars(self.dim)), |acc, g| gcd(&acc, g))
    }

    /// Whether `value` lies on the unbounded locus, the common zero set of the generators.
    pub fn is_singular_at(&self, x: &[GaussRational]) -> bool {
        !self.generators.is_empty() && self.generators.iter().all(|g| g.eval(x).is_zero())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "c": format_rational(&self.exponent),
            "generators": self.generators.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "smooth": self.smooth.to_string(),
        })
    }

    pub fn from_json(dim: usize, v: &Value) -> Result<Self, AlgebraError> {
        let bad = |m: &str| AlgebraError::Parse(format!("weight descriptor: {m}"));
        let c = match v.get("c") {
            None => BigRational::from_integer(1.into()),
            Some(Value::String(s)) => parse_rational(s)?,
            Some(Value::Number(n)) => parse_rational(&n.to_string())?,
            _ => return Err(bad("'c' must be a rational string")),
        };
        let gens = match v.get("generators") {
            None => Vec::new(),
            Some(Value::Array(a)) => a
                .iter()
                .map(|g| g.as_str().ok_or_else(|| bad("generators must be strings")).and_then(|s| parse_holomorphic(s, dim)))
                .collect::<Result<Vec<_>, _>>()?,
            _ => return Err(bad("'generators' must be an array")),
        };
        let smooth = match v.get("smooth") {
            None => Polynomial::zero(&real_analytic_vars(dim)),
            Some(Value::String(s)) => parse_real_analytic(s, dim)?,
            _ => return Err(bad("'smooth' must be a string")),
        };
        Self::new(dim, c, gens, smooth)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let v = serde_json::json!({"c": "3/2", "generators": ["x1^2", "x2^3"], "smooth": "x1*xb1"});
        let q = QasDescriptor::from_json(2, &v).unwrap();
        assert_eq!(QasDescriptor::from_json(2, &q.to_json()).unwrap(), q);
        assert!(q.is_singular_at(&[GaussRational::zero(), GaussRational::zero()]));
    }

    #[test]
    fn rejects_non_real_smooth_part() {
        let v = serde_json::json!({"c": "1", "generators": ["x1"], "smooth": "x1"});
        assert!(QasDescriptor::from_json(1, &v).is_err());
        let v = serde_json::json!({"c": "-1", "generators": ["x1"]});
        assert!(QasDescriptor::from_json(1, &v).is_err());
    }
}
