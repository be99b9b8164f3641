//! Truncated graded series `1 + a_1 + … + a_K` with coefficients in a graded algebra, and the
//! Segre/Chern operations on them.

use serde_json::{json, Value};

use crate::cycle::{ExcessPolicy, QuasiCycle};
use crate::error::{AlgebraError, SeriesError};

/// A commutative graded algebra in which the coefficients of a series live.
pub trait GradedAlgebra {
    type Elem: Clone + std::fmt::Debug;

    fn one(&self) -> Self::Elem;
    fn zero(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, SeriesError>;
    fn neg(&self, a: &Self::Elem) -> Result<Self::Elem, SeriesError>;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, SeriesError>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn is_one(&self, a: &Self::Elem) -> bool;
    /// Bidegrees occurring in `a`; empty for zero.
    fn degrees(&self, a: &Self::Elem) -> Vec<usize>;
    fn is_smooth(&self, a: &Self::Elem) -> bool;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, SeriesError> {
        self.add(a, &self.neg(b)?)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradedSeries<E> {
    pub coeffs: Vec<E>,
}

impl<E: Clone> GradedSeries<E> {
    pub fn new(coeffs: Vec<E>) -> Self {
        assert!(!coeffs.is_empty(), "a series has at least the constant coefficient");
        GradedSeries { coeffs }
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &E {
        &self.coeffs[k]
    }
}

pub fn one_series<R: GradedAlgebra>(ring: &R, truncation: usize) -> GradedSeries<R::Elem> {
    let mut c = vec![ring.one()];
    c.extend((0..truncation).map(|_| ring.zero()));
    GradedSeries::new(c)
}

/// Checks that coefficient `k` is purely of bidegree `k`.
pub fn check_grading<R: GradedAlgebra>(ring: &R, s: &GradedSeries<R::Elem>) -> Result<(), SeriesError> {
    for (k, c) in s.coeffs.iter().enumerate() {
        for d in ring.degrees(c) {
            if d != k {
                return Err(SeriesError::Grading { index: k, found: d });
            }
        }
    }
    Ok(())
}

pub fn add<R: GradedAlgebra>(ring: &R, a: &GradedSeries<R::Elem>, b: &GradedSeries<R::Elem>) -> Result<GradedSeries<R::Elem>, SeriesError> {
    if a.truncation() != b.truncation() {
        return Err(SeriesError::MismatchedTruncation(a.truncation(), b.truncation()));
    }
    let c = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| ring.add(x, y)).collect::<Result<Vec<_>, _>>()?;
    Ok(GradedSeries::new(c))
}

/// Truncated product: `(a·b)_k = Σ_{i+j=k} a_i·b_j`.
pub fn mul<R: GradedAlgebra>(ring: &R, a: &GradedSeries<R::Elem>, b: &GradedSeries<R::Elem>) -> Result<GradedSeries<R::Elem>, SeriesError> {
    if a.truncation() != b.truncation() {
        return Err(SeriesError::MismatchedTruncation(a.truncation(), b.truncation()));
    }
    check_grading(ring, a)?;
    check_grading(ring, b)?;
    let k_max = a.truncation();
    let mut out = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let mut acc = ring.zero();
        for i in 0..=k {
            let (x, y) = (&a.coeffs[i], &b.coeffs[k - i]);
            if ring.is_zero(x) || ring.is_zero(y) {
                continue;
            }
            acc = ring.add(&acc, &ring.mul(x, y)?)?;
        }
        out.push(acc);
    }
    Ok(GradedSeries::new(out))
}

/// Inverse of a series with unit constant term: `Σ_j (−1)^j (s − 1)^j`, truncated.
pub fn invert<R: GradedAlgebra>(ring: &R, s: &GradedSeries<R::Elem>) -> Result<GradedSeries<R::Elem>, SeriesError> {
    if !ring.is_one(&s.coeffs[0]) {
        return Err(SeriesError::NonUnitConstant);
    }
    check_grading(ring, s)?;
    let k_max = s.truncation();
    let mut hat = s.clone();
    hat.coeffs[0] = ring.zero();
    let mut result = one_series(ring, k_max);
    let mut power = one_series(ring, k_max);
    for j in 1..=k_max {
        power = mul(ring, &power, &hat)?;
        let term = if j % 2 == 1 { negate(ring, &power)? } else { power.clone() };
        result = add(ring, &result, &term)?;
    }
    Ok(result)
}

pub fn negate<R: GradedAlgebra>(ring: &R, s: &GradedSeries<R::Elem>) -> Result<GradedSeries<R::Elem>, SeriesError> {
    Ok(GradedSeries::new(s.coeffs.iter().map(|c| ring.neg(c)).collect::<Result<Vec<_>, _>>()?))
}

/// Segre series of a direct sum from a smooth factor and an arbitrary factor.
pub fn whitney_smooth_product<R: GradedAlgebra>(ring: &R, smooth: &GradedSeries<R::Elem>, other: &GradedSeries<R::Elem>) -> Result<GradedSeries<R::Elem>, SeriesError> {
    if smooth.coeffs.iter().any(|c| !ring.is_smooth(c)) {
        return Err(SeriesError::Ring("first factor must have smooth coefficients".into()));
    }
    mul(ring, smooth, other)
}

/// `c(E, Z)·1 = c′ − c(E, h₀)·M·c′` with `c′ = (1_{X∖Z} s)^{-1}`.
///
/// `s` is the Segre series, `s0` the Segre series of a smooth reference metric and `m` the part
/// of `s` carried by `Z` (with zero constant term). When `Z` has no positive codimension the
/// result is `c(E, h₀)`.
pub fn chern_z<R: GradedAlgebra>(
    ring: &R,
    s: &GradedSeries<R::Elem>,
    s0: &GradedSeries<R::Elem>,
    m: &GradedSeries<R::Elem>,
    z_proper: bool,
) -> Result<GradedSeries<R::Elem>, SeriesError> {
    let k = s.truncation();
    if s0.truncation() != k {
        return Err(SeriesError::MismatchedTruncation(k, s0.truncation()));
    }
    if m.truncation() != k {
        return Err(SeriesError::MismatchedTruncation(k, m.truncation()));
    }
    let c0 = invert(ring, s0)?;
    if !z_proper {
        return Ok(c0);
    }
    if !ring.is_zero(&m.coeffs[0]) {
        return Err(SeriesError::Ring("the Z-part has a nonzero constant term".into()));
    }
    let mut restricted = s.clone();
    for j in 1..=k {
        restricted.coeffs[j] = ring.sub(&s.coeffs[j], &m.coeffs[j])?;
    }
    let c_prime = invert(ring, &restricted)?;
    let correction = mul(ring, &mul(ring, &c0, m)?, &c_prime)?;
    let neg = negate(ring, &correction)?;
    add(ring, &c_prime, &neg)
}

/// The exact coefficient ring of quasi-cycles on an `n`-dimensional chart.
#[derive(Clone, Copy, Debug)]
pub struct CycleAlgebra {
    pub dim: usize,
    pub policy: ExcessPolicy,
}

impl CycleAlgebra {
    pub fn new(dim: usize) -> Self {
        CycleAlgebra { dim, policy: ExcessPolicy::FlatReference }
    }
}

fn ring_err(e: AlgebraError) -> SeriesError {
    SeriesError::Ring(e.to_string())
}

impl GradedAlgebra for CycleAlgebra {
    type Elem = QuasiCycle;

    fn one(&self) -> QuasiCycle {
        QuasiCycle::one(self.dim)
    }
    fn zero(&self) -> QuasiCycle {
        QuasiCycle::zero(self.dim)
    }
    fn add(&self, a: &QuasiCycle, b: &QuasiCycle) -> Result<QuasiCycle, SeriesError> {
        a.add(b).map_err(ring_err)
    }
    fn neg(&self, a: &QuasiCycle) -> Result<QuasiCycle, SeriesError> {
        Ok(a.neg())
    }
    fn mul(&self, a: &QuasiCycle, b: &QuasiCycle) -> Result<QuasiCycle, SeriesError> {
        a.mul(b, self.policy).map_err(ring_err)
    }
    fn is_zero(&self, a: &QuasiCycle) -> bool {
        a.is_zero()
    }
    fn is_one(&self, a: &QuasiCycle) -> bool {
        a.is_one()
    }
    fn degrees(&self, a: &QuasiCycle) -> Vec<usize> {
        a.degrees()
    }
    fn is_smooth(&self, a: &QuasiCycle) -> bool {
        a.is_smooth()
    }
}

pub fn series_to_json(s: &GradedSeries<QuasiCycle>) -> Value {
    json!({
        "truncation": s.truncation(),
        "coefficients": s.coeffs.iter().map(QuasiCycle::to_json).collect::<Vec<_>>(),
    })
}

pub fn series_from_json(v: &Value) -> Result<GradedSeries<QuasiCycle>, AlgebraError> {
    let arr = v
        .get("coefficients")
        .and_then(Value::as_array)
        .ok_or_else(|| AlgebraError::Parse("series: missing 'coefficients'".into()))?;
    if arr.is_empty() {
        return Err(AlgebraError::Parse("series: empty coefficient list".into()));
    }
    let coeffs = arr.iter().map(QuasiCycle::from_json).collect::<Result<Vec<_>, _>>()?;
    if let Some(t) = v.get("truncation").and_then(Value::as_u64) {
        if t as usize + 1 != coeffs.len() {
            return Err(AlgebraError::Parse("series: truncation does not match coefficient count".into()));
        }
    }
    Ok(GradedSeries::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::PolyForm;
    use crate::gauss::{rat, GaussRational};
    use crate::parse::parse_holomorphic;

    fn chern_example() -> (CycleAlgebra, GradedSeries<QuasiCycle>, QuasiCycle, QuasiCycle) {
        let ring = CycleAlgebra::new(2);
        let s1 = QuasiCycle::divisor(parse_holomorphic("x1*x2", 2).unwrap(), rat(1, 1)).unwrap();
        let s2 = QuasiCycle::point(vec![GaussRational::from_int(0), GaussRational::from_int(0)], rat(1, 1)).unwrap();
        (ring, GradedSeries::new(vec![QuasiCycle::one(2), s1.clone(), s2.clone()]), s1, s2)
    }

    #[test]
    fn inverse_of_chern_example() {
        let (ring, s, s1, s2) = chern_example();
        let c = invert(&ring, &s).unwrap();
        assert_eq!(c.coeffs[1], s1.neg());
        let expected = s1.mul(&s1, ExcessPolicy::FlatReference).unwrap().sub(&s2).unwrap();
        assert_eq!(c.coeffs[2], expected);
        assert_eq!(c.coeffs[2], s2);
        let prod = mul(&ring, &c, &s).unwrap();
        assert!(prod.coeffs[0].is_one() && prod.coeffs[1].is_zero() && prod.coeffs[2].is_zero());
    }

    #[test]
    fn chern_z_of_example() {
        let (ring, s, s1, s2) = chern_example();
        let s0 = one_series(&ring, 2);
        let cz = chern_z(&ring, &s, &s0, &s, true).map(|_| ());
        assert!(cz.is_err(), "constant term must be excluded from the Z part");
        let m = GradedSeries::new(vec![QuasiCycle::zero(2), s1.clone(), s2.clone()]);
        let cz = chern_z(&ring, &s, &s0, &m, true).unwrap();
        assert_eq!(cz.coeffs[1], s1.neg());
        assert_eq!(cz.coeffs[2], s2.neg());
        let no_z = chern_z(&ring, &s, &s0, &GradedSeries::new(vec![QuasiCycle::zero(2); 3]), true).unwrap();
        assert_eq!(no_z, invert(&ring, &s).unwrap());
    }

    #[test]
    fn grading_is_checked() {
        let ring = CycleAlgebra::new(2);
        let bad = GradedSeries::new(vec![QuasiCycle::one(2), QuasiCycle::smooth(PolyForm::one(2)).unwrap()]);
        assert!(matches!(invert(&ring, &bad), Err(SeriesError::Grading { .. })));
        let nonunit = GradedSeries::new(vec![QuasiCycle::zero(2), QuasiCycle::zero(2)]);
        assert!(matches!(invert(&ring, &nonunit), Err(SeriesError::NonUnitConstant)));
    }
}
