//! Independent closed-form references used to validate the numerical pipeline.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::cycle::QuasiCycle;
use crate::error::AlgebraError;
use crate::gauss::{rat, GaussRational};
use crate::parse::parse_holomorphic;
use crate::poly::Polynomial;

/// `dd^c log|P|² = Σ m_i [P_i]`.
pub fn poincare_lelong(p: &Polynomial) -> Result<QuasiCycle, AlgebraError> {
    if p.is_zero() {
        return Err(AlgebraError::Invalid("Poincaré–Lelong of the zero polynomial".into()));
    }
    if p.is_constant() {
        return Ok(QuasiCycle::zero(p.nvars()));
    }
    QuasiCycle::divisor(p.clone(), rat(1, 1))
}

/// `ord_x P`.
pub fn vanishing_order(p: &Polynomial, x: &[GaussRational]) -> Result<u32, AlgebraError> {
    if x.len() != p.nvars() {
        return Err(AlgebraError::DimensionMismatch { expected: p.nvars(), found: x.len() });
    }
    p.order_at(x).ok_or_else(|| AlgebraError::Invalid("vanishing order of the zero polynomial".into()))
}

pub use crate::intersection::{intersection_number, intersection_number_by_resultant, total_intersection};

/// Lelong number at the origin of `c·log Σ_j |x^{α_j}|²`, namely `c·min_j |α_j|`.
pub fn monomial_lelong(c: &BigRational, exponents: &[Vec<u32>]) -> Result<BigRational, AlgebraError> {
    if exponents.is_empty() {
        return Err(AlgebraError::Invalid("no monomials".into()));
    }
    let m = exponents.iter().map(|a| a.iter().sum::<u32>()).min().unwrap();
    Ok(c * BigRational::from_integer(BigInt::from(m)))
}

/// Mass at the origin of `(dd^c c·log Σ|x^{α_j}|²)^2` on a surface: `2·c²·` (area of the region
/// under the Newton polygon). `None` when the polygon does not meet both axes, so the origin is
/// not an isolated zero.
pub fn monomial_ma_mass(c: &BigRational, exponents: &[Vec<u32>]) -> Result<Option<BigRational>, AlgebraError> {
    if exponents.iter().any(|a| a.len() != 2) {
        return Err(AlgebraError::DimensionMismatch { expected: 2, found: exponents.first().map_or(0, |a| a.len()) });
    }
    let a = exponents.iter().filter(|e| e[1] == 0).map(|e| e[0]).min();
    let b = exponents.iter().filter(|e| e[0] == 0).map(|e| e[1]).min();
    let (Some(a), Some(b)) = (a, b) else { return Ok(None) };
    // Lower convex hull of the exponent set, from (0, b) to (a, 0).
    let mut pts: Vec<(i64, i64)> = exponents.iter().map(|e| (e[0] as i64, e[1] as i64)).filter(|&(x, y)| x <= a as i64 && y <= b as i64).collect();
    pts.sort();
    pts.dedup();
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (o, q) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (q.0 - o.0) * (p.1 - o.1) - (q.1 - o.1) * (p.0 - o.0);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    // Keep only the part from the point on the x2-axis to the point on the x1-axis.
    let start = hull.iter().position(|&(x, _)| x == 0).unwrap_or(0);
    let end = hull.iter().position(|&(_, y)| y == 0).unwrap_or(hull.len() - 1);
    let chain = &hull[start..=end];
    // Twice the area under the chain, by the trapezoid rule.
    let mut twice_area = 0i64;
    for w in chain.windows(2) {
        twice_area += (w[1].0 - w[0].0) * (w[0].1 + w[1].1);
    }
    Ok(Some(c * c * BigRational::from_integer(BigInt::from(twice_area))))
}

/// Reference currents of the diagonal morphism example `g = diag(x1, x2)` on ℂ².
#[derive(Clone, Debug)]
pub struct ChernExampleReference {
    pub s1: QuasiCycle,
    pub s2: QuasiCycle,
    pub s1_squared: QuasiCycle,
    pub c1: QuasiCycle,
    pub c2: QuasiCycle,
    pub c1_z: QuasiCycle,
    pub c2_z: QuasiCycle,
    /// Segre class `s1` of the pullback along `t ↦ (t, 0)`.
    pub pullback_s1: QuasiCycle,
    pub s1_lelong_at_origin: BigRational,
    pub s2_mass_at_origin: BigRational,
}

pub fn chern_example_reference() -> ChernExampleReference {
    let h = |s: &str| parse_holomorphic(s, 2).expect("valid");
    let origin = vec![GaussRational::zero(), GaussRational::zero()];
    let s1 = QuasiCycle::divisor(h("x1"), rat(1, 1)).and_then(|a| a.add(&QuasiCycle::divisor(h("x2"), rat(1, 1))?)).expect("valid");
    let pt = QuasiCycle::point(origin, rat(1, 1)).expect("valid");
    ChernExampleReference {
        s1: s1.clone(),
        s2: pt.clone(),
        s1_squared: pt.scale(&rat(2, 1)),
        c1: s1.neg(),
        c2: pt.clone(),
        c1_z: s1.neg(),
        c2_z: pt.neg(),
        pullback_s1: QuasiCycle::divisor(parse_holomorphic("x1", 1).expect("valid"), rat(1, 1)).expect("valid"),
        s1_lelong_at_origin: rat(2, 1),
        s2_mass_at_origin: rat(1, 1),
    }
}

/// Nearest integer to a rational, with the distance to it.
pub fn nearest_integer(r: &BigRational) -> (BigInt, BigRational) {
    let fl = r.floor();
    let frac = r - &fl;
    let n = if frac >= rat(1, 2) { fl.to_integer() + 1 } else { fl.to_integer() };
    let d = (r - BigRational::from_integer(n.clone())).abs();
    (n, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{invert, CycleAlgebra, GradedSeries};

    #[test]
    fn monomial_references() {
        assert_eq!(monomial_lelong(&rat(1, 1), &[vec![2, 0], vec![0, 3]]).unwrap(), rat(2, 1));
        assert_eq!(monomial_ma_mass(&rat(1, 1), &[vec![2, 0], vec![0, 3]]).unwrap(), Some(rat(6, 1)));
        assert_eq!(monomial_ma_mass(&rat(1, 1), &[vec![1, 0], vec![0, 1]]).unwrap(), Some(rat(1, 1)));
        // x1^4, x1*x2, x2^4: the interior exponent lowers the polygon; area 4.
        assert_eq!(monomial_ma_mass(&rat(1, 1), &[vec![4, 0], vec![1, 1], vec![0, 4]]).unwrap(), Some(rat(8, 1)));
        assert_eq!(monomial_ma_mass(&rat(1, 1), &[vec![1, 1]]).unwrap(), None);
        assert_eq!(monomial_ma_mass(&rat(1, 2), &[vec![2, 0], vec![0, 2]]).unwrap(), Some(rat(1, 1)));
    }

    #[test]
    fn chern_example_is_consistent() {
        let r = chern_example_reference();
        let ring = CycleAlgebra::new(2);
        let s = GradedSeries::new(vec![QuasiCycle::one(2), r.s1.clone(), r.s2.clone()]);
        let c = invert(&ring, &s).unwrap();
        assert_eq!(c.coeffs[1], r.c1);
        assert_eq!(c.coeffs[2], r.c2);
        assert_eq!(r.s1.mult_at(&[GaussRational::zero(), GaussRational::zero()]).unwrap()[1], r.s1_lelong_at_origin);
    }

    #[test]
    fn rounding() {
        assert_eq!(nearest_integer(&rat(19, 10)), (BigInt::from(2), rat(1, 10)));
        assert_eq!(nearest_integer(&rat(-1, 3)), (BigInt::from(0), rat(1, 3)));
    }
}
