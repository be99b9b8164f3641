//! Exact quasi-cycles: finite sums of smooth polynomial forms, divisors `m·[P]` (possibly
//! wedged with a smooth form) and point masses, with the formal product used by graded series.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::algebra::{coprime_basis, factor};
use crate::error::AlgebraError;
use crate::form::{MultiIndex, PolyForm};
use crate::gauss::{format_rational, parse_rational, GaussRational};
use crate::intersection::intersection_points;
use crate::parse::{parse_holomorphic, parse_real_analytic};
use crate::poly::{holomorphic_vars, Polynomial};
use crate::qas::QasDescriptor;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Component {
    /// A smooth (k,k)-form.
    Smooth(PolyForm),
    /// `mult·[P=0] ∧ factor`; bidegree is one plus the factor's degree.
    Divisor { poly: Polynomial, mult: BigRational, factor: Option<PolyForm> },
    /// `weight·[point]`, of bidegree (n,n).
    Point { location: Vec<GaussRational>, weight: BigRational },
}

impl Component {
    pub fn bidegree(&self, dim: usize) -> usize {
        match self {
            Component::Smooth(f) => f.degree(),
            Component::Divisor { factor, .. } => 1 + factor.as_ref().map_or(0, |f| f.degree()),
            Component::Point { .. } => dim,
        }
    }

    pub fn is_smooth(&self) -> bool {
        matches!(self, Component::Smooth(_))
    }
}

/// Treatment of products of a divisor with itself, which are not proper intersections.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ExcessPolicy {
    /// `[D]·[D]` is computed against the flat reference metric of the trivial line bundle
    /// `O(D)` on the affine chart and vanishes.
    #[default]
    FlatReference,
    /// Non-proper products are an error.
    Reject,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiCycle {
    dim: usize,
    components: Vec<Component>,
}

fn rational_zero() -> BigRational {
    BigRational::zero()
}

impl QuasiCycle {
    pub fn zero(dim: usize) -> Self {
        QuasiCycle { dim, components: Vec::new() }
    }

    pub fn one(dim: usize) -> Self {
        QuasiCycle { dim, components: vec![Component::Smooth(PolyForm::one(dim))] }
    }

    pub fn from_components(dim: usize, components: Vec<Component>) -> Result<Self, AlgebraError> {
        let c = QuasiCycle { dim, components };
        c.validate()?;
        c.normalize()
    }

    pub fn smooth(form: PolyForm) -> Result<Self, AlgebraError> {
        let dim = form.dim();
        Self::from_components(dim, vec![Component::Smooth(form)])
    }

    pub fn divisor(poly: Polynomial, mult: BigRational) -> Result<Self, AlgebraError> {
        let dim = poly.nvars();
        Self::from_components(dim, vec![Component::Divisor { poly, mult, factor: None }])
    }

    pub fn point(location: Vec<GaussRational>, weight: BigRational) -> Result<Self, AlgebraError> {
        let dim = location.len();
        Self::from_components(dim, vec![Component::Point { location, weight }])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.components.len() == 1 && matches!(&self.components[0], Component::Smooth(f) if f.as_constant().map_or(false, |c| c.is_one()))
    }

    pub fn is_smooth(&self) -> bool {
        self.components.iter().all(Component::is_smooth)
    }

    /// Distinct bidegrees of the components.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.components.iter().map(|c| c.bidegree(self.dim)).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    fn validate(&self) -> Result<(), AlgebraError> {
        let hv = holomorphic_vars(self.dim);
        for c in &self.components {
            match c {
                Component::Smooth(f) => {
                    if f.dim() != self.dim {
                        return Err(AlgebraError::DimensionMismatch { expected: self.dim, found: f.dim() });
                    }
                }
                Component::Divisor { poly, factor, .. } => {
                    if poly.vars() != hv.as_slice() {
                        return Err(AlgebraError::VariableMismatch("divisor polynomial must be holomorphic in x1..xn".into()));
                    }
                    if poly.is_constant() {
                        return Err(AlgebraError::Invalid("divisor of a constant polynomial".into()));
                    }
                    if let Some(f) = factor {
                        if f.dim() != self.dim {
                            return Err(AlgebraError::DimensionMismatch { expected: self.dim, found: f.dim() });
                        }
                    }
                }
                Component::Point { location, .. } => {
                    if location.len() != self.dim {
                        return Err(AlgebraError::DimensionMismatch { expected: self.dim, found: location.len() });
                    }
                }
            }
            if c.bidegree(self.dim) > self.dim {
                return Err(AlgebraError::Invalid("component bidegree exceeds the dimension".into()));
            }
        }
        Ok(())
    }

    /// Canonical form: divisors split into pairwise coprime squarefree factors, like terms
    /// merged, zero terms removed and components sorted.
    pub fn normalize(&self) -> Result<QuasiCycle, AlgebraError> {
        let n = self.dim;
        let mut smooth: BTreeMap<usize, PolyForm> = BTreeMap::new();
        let mut points: BTreeMap<Vec<GaussRational>, BigRational> = BTreeMap::new();
        // Divisor terms before refinement: (factor polynomial, multiplicity, optional form factor).
        let mut raw: Vec<(Polynomial, BigRational, Option<PolyForm>)> = Vec::new();
        for c in &self.components {
            match c {
                Component::Smooth(f) => {
                    if f.degree() > n || f.is_zero() {
                        continue;
                    }
                    let e = smooth.entry(f.degree()).or_insert_with(|| PolyForm::zero(n, f.degree()));
                    *e = e.add(f)?;
                }
                Component::Point { location, weight } => {
                    let e = points.entry(location.clone()).or_insert_with(rational_zero);
                    *e += weight;
                }
                Component::Divisor { poly, mult, factor: form } => {
                    if mult.is_zero() || form.as_ref().map_or(false, |f| f.is_zero()) {
                        continue;
                    }
                    for (p, e) in factor(poly)?.factors {
                        raw.push((p, mult * BigRational::from_integer(BigInt::from(e)), form.clone()));
                    }
                }
            }
        }
        // Common coprime basis for all divisor factors.
        let basis: Vec<Polynomial> = coprime_basis(raw.iter().map(|(p, _, _)| (p.clone(), 1)).collect()).into_iter().map(|(p, _)| p).collect();
        let mut plain: BTreeMap<String, (Polynomial, BigRational)> = BTreeMap::new();
        let mut factored: BTreeMap<(String, usize), (Polynomial, PolyForm)> = BTreeMap::new();
        for (p, m, form) in raw {
            for b in basis.iter().filter(|b| b.divides(&p)) {
                let key = b.to_string();
                match &form {
                    None => {
                        let e = plain.entry(key).or_insert_with(|| (b.clone(), rational_zero()));
                        e.1 += &m;
                    }
                    Some(f) => {
                        let scaled = f.scale(&GaussRational::from_rational(m.clone()));
                        if let Some(c) = scaled.as_constant().filter(|c| c.is_real()) {
                            let e = plain.entry(key).or_insert_with(|| (b.clone(), rational_zero()));
                            e.1 += &c.re;
                        } else {
                            let e = factored.entry((key, f.degree())).or_insert_with(|| (b.clone(), PolyForm::zero(n, f.degree())));
                            e.1 = e.1.add(&scaled)?;
                        }
                    }
                }
            }
        }
        let mut comps = Vec::new();
        for (_, f) in smooth {
            if !f.is_zero() {
                comps.push(Component::Smooth(f));
            }
        }
        for (_, (p, m)) in plain {
            if !m.is_zero() {
                comps.push(Component::Divisor { poly: p, mult: m, factor: None });
            }
        }
        for (_, (p, f)) in factored {
            if !f.is_zero() {
                comps.push(Component::Divisor { poly: p, mult: BigRational::one(), factor: Some(f) });
            }
        }
        for (loc, w) in points {
            if !w.is_zero() {
                comps.push(Component::Point { location: loc, weight: w });
            }
        }
        Ok(QuasiCycle { dim: n, components: comps })
    }

    pub fn add(&self, other: &QuasiCycle) -> Result<QuasiCycle, AlgebraError> {
        if self.dim != other.dim {
            return Err(AlgebraError::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let mut comps = self.components.clone();
        comps.extend(other.components.iter().cloned());
        QuasiCycle { dim: self.dim, components: comps }.normalize()
    }

    pub fn scale(&self, c: &BigRational) -> QuasiCycle {
        let g = GaussRational::from_rational(c.clone());
        let comps = self
            .components
            .iter()
            .map(|comp| match comp {
                Component::Smooth(f) => Component::Smooth(f.scale(&g)),
                Component::Divisor { poly, mult, factor } => Component::Divisor { poly: poly.clone(), mult: mult * c, factor: factor.clone() },
                Component::Point { location, weight } => Component::Point { location: location.clone(), weight: weight * c },
            })
            .collect();
        QuasiCycle { dim: self.dim, components: comps }.normalize().expect("scaling preserves validity")
    }

    pub fn neg(&self) -> QuasiCycle {
        self.scale(&-BigRational::one())
    }

    pub fn sub(&self, other: &QuasiCycle) -> Result<QuasiCycle, AlgebraError> {
        self.add(&other.neg())
    }

    /// Components of bidegree `k`.
    pub fn part(&self, k: usize) -> QuasiCycle {
        QuasiCycle { dim: self.dim, components: self.components.iter().filter(|c| c.bidegree(self.dim) == k).cloned().collect() }
    }

    /// Formal product.
    pub fn mul(&self, other: &QuasiCycle, policy: ExcessPolicy) -> Result<QuasiCycle, AlgebraError> {
        if self.dim != other.dim {
            return Err(AlgebraError::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let mut comps = Vec::new();
        for a in &self.components {
            for b in &other.components {
                comps.extend(mul_components(a, b, self.dim, policy)?);
            }
        }
        QuasiCycle { dim: self.dim, components: comps }.normalize()
    }

    /// `1_Z·c` (`inside = true`) or `1_{X∖Z}·c`, where `Z` is the common zero set of `zero_set`.
    /// An empty generator list, or one made of zero polynomials, means `Z = X`.
    pub fn restrict(&self, zero_set: &[Polynomial], inside: bool) -> Result<QuasiCycle, AlgebraError> {
        let gens: Vec<&Polynomial> = zero_set.iter().filter(|g| !g.is_zero()).collect();
        let whole = gens.is_empty();
        if gens.iter().any(|g| g.is_constant()) {
            // Z is empty.
            return Ok(if inside { QuasiCycle::zero(self.dim) } else { self.clone() });
        }
        let mut comps = Vec::new();
        for c in &self.components {
            let in_z = whole
                || match c {
                    Component::Smooth(_) => false,
                    Component::Divisor { poly, .. } => gens.iter().all(|g| poly.divides(g)),
                    Component::Point { location, .. } => gens.iter().all(|g| g.eval(location).is_zero()),
                };
            if in_z == inside {
                comps.push(c.clone());
            }
        }
        QuasiCycle { dim: self.dim, components: comps }.normalize()
    }

    /// Lelong numbers at `x`, indexed by bidegree `0..=n`.
    pub fn mult_at(&self, x: &[GaussRational]) -> Result<Vec<BigRational>, AlgebraError> {
        if x.len() != self.dim {
            return Err(AlgebraError::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        let mut out = vec![rational_zero(); self.dim + 1];
        for c in &self.components {
            match c {
                Component::Smooth(_) => {}
                Component::Divisor { poly, mult, factor } => {
                    let scale = match factor {
                        None => GaussRational::one(),
                        Some(f) if f.degree() == 0 => f.eval(x).values().next().cloned().unwrap_or_else(GaussRational::zero),
                        Some(_) => continue,
                    };
                    let ord = poly.order_at(x).unwrap_or(0);
                    out[1] += mult * &scale.re * BigRational::from_integer(BigInt::from(ord));
                }
                Component::Point { location, weight } => {
                    if location.as_slice() == x {
                        out[self.dim] += weight;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Splits into the cycle part (plain divisors and points) and the remainder.
    pub fn siu_decompose(&self) -> (QuasiCycle, QuasiCycle) {
        let (fixed, rest): (Vec<Component>, Vec<Component>) = self
            .components
            .iter()
            .cloned()
            .partition(|c| matches!(c, Component::Divisor { factor: None, .. } | Component::Point { .. }));
        (QuasiCycle { dim: self.dim, components: fixed }, QuasiCycle { dim: self.dim, components: rest })
    }

    /// Total mass of the point components and the multiplicity-weighted divisor list.
    pub fn point_masses(&self) -> Vec<(Vec<GaussRational>, BigRational)> {
        self.components
            .iter()
            .filter_map(|c| match c {
                Component::Point { location, weight } => Some((location.clone(), weight.clone())),
                _ => None,
            })
            .collect()
    }

    pub fn divisors(&self) -> Vec<(Polynomial, BigRational)> {
        self.components
            .iter()
            .filter_map(|c| match c {
                Component::Divisor { poly, mult, factor: None } => Some((poly.clone(), mult.clone())),
                _ => None,
            })
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let comps: Vec<Value> = self
            .components
            .iter()
            .map(|c| match c {
                Component::Smooth(f) => json!({"kind": "smooth", "degree": f.degree(), "coefficients": form_to_json(f)}),
                Component::Divisor { poly, mult, factor } => json!({
                    "kind": "divisor",
                    "polynomial": poly.to_string(),
                    "multiplicity": format_rational(mult),
                    "factor": factor.as_ref().map(|f| json!({"degree": f.degree(), "coefficients": form_to_json(f)})),
                }),
                Component::Point { location, weight } => json!({
                    "kind": "point",
                    "location": location.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "weight": format_rational(weight),
                }),
            })
            .collect();
        json!({"dim": self.dim, "components": comps})
    }

    pub fn from_json(v: &Value) -> Result<QuasiCycle, AlgebraError> {
        let bad = |m: &str| AlgebraError::Parse(format!("quasi-cycle: {m}"));
        let dim = v.get("dim").and_then(Value::as_u64).ok_or_else(|| bad("missing 'dim'"))? as usize;
        let arr = v.get("components").and_then(Value::as_array).ok_or_else(|| bad("missing 'components'"))?;
        let mut comps = Vec::new();
        for c in arr {
            let kind = c.get("kind").and_then(Value::as_str).ok_or_else(|| bad("missing 'kind'"))?;
            match kind {
                "smooth" => {
                    let deg = c.get("degree").and_then(Value::as_u64).ok_or_else(|| bad("missing 'degree'"))? as usize;
                    comps.push(Component::Smooth(form_from_json(dim, deg, c.get("coefficients").ok_or_else(|| bad("missing 'coefficients'"))?)?));
                }
                "divisor" => {
                    let poly = parse_holomorphic(c.get("polynomial").and_then(Value::as_str).ok_or_else(|| bad("missing 'polynomial'"))?, dim)?;
                    let mult = parse_rational(c.get("multiplicity").and_then(Value::as_str).unwrap_or("1"))?;
                    let factor = match c.get("factor") {
                        None | Some(Value::Null) => None,
                        Some(f) => {
                            let deg = f.get("degree").and_then(Value::as_u64).ok_or_else(|| bad("factor missing 'degree'"))? as usize;
                            Some(form_from_json(dim, deg, f.get("coefficients").ok_or_else(|| bad("factor missing 'coefficients'"))?)?)
                        }
                    };
                    comps.push(Component::Divisor { poly, mult, factor });
                }
                "point" => {
                    let loc = c
                        .get("location")
                        .and_then(Value::as_array)
                        .ok_or_else(|| bad("missing 'location'"))?
                        .iter()
                        .map(|x| x.as_str().ok_or_else(|| bad("location entries must be strings")).and_then(GaussRational::parse))
                        .collect::<Result<Vec<_>, _>>()?;
                    let weight = parse_rational(c.get("weight").and_then(Value::as_str).unwrap_or("1"))?;
                    comps.push(Component::Point { location: loc, weight });
                }
                other => return Err(bad(&format!("unknown kind '{other}'"))),
            }
        }
        QuasiCycle::from_components(dim, comps)
    }
}

fn form_to_json(f: &PolyForm) -> Value {
    Value::Array(
        f.coefficients()
            .iter()
            .map(|((i, j), p)| {
                json!({
                    "I": i.iter().map(|x| x + 1).collect::<Vec<_>>(),
                    "J": j.iter().map(|x| x + 1).collect::<Vec<_>>(),
                    "value": p.to_string(),
                })
            })
            .collect(),
    )
}

fn form_from_json(dim: usize, degree: usize, v: &Value) -> Result<PolyForm, AlgebraError> {
    let bad = |m: &str| AlgebraError::Parse(format!("form: {m}"));
    let arr = v.as_array().ok_or_else(|| bad("coefficients must be an array"))?;
    let mut items = Vec::new();
    for e in arr {
        let idx = |k: &str| -> Result<MultiIndex, AlgebraError> {
            e.get(k)
                .and_then(Value::as_array)
                .ok_or_else(|| bad("missing index list"))?
                .iter()
                .map(|x| x.as_u64().filter(|&x| x >= 1).map(|x| x as usize - 1).ok_or_else(|| bad("indices are 1-based integers")))
                .collect()
        };
        let p = parse_real_analytic(e.get("value").and_then(Value::as_str).ok_or_else(|| bad("missing 'value'"))?, dim)?;
        items.push((idx("I")?, idx("J")?, p));
    }
    PolyForm::from_coefficients(dim, degree, items)
}

fn eval_function(f: &PolyForm, x: &[GaussRational]) -> GaussRational {
    f.eval(x).values().next().cloned().unwrap_or_else(GaussRational::zero)
}

fn mul_components(a: &Component, b: &Component, n: usize, policy: ExcessPolicy) -> Result<Vec<Component>, AlgebraError> {
    if a.bidegree(n) + b.bidegree(n) > n {
        return Ok(Vec::new());
    }
    use Component::*;
    Ok(match (a, b) {
        (Smooth(f), Smooth(g)) => vec![Smooth(f.wedge(g)?)],
        (Smooth(f), Divisor { poly, mult, factor }) | (Divisor { poly, mult, factor }, Smooth(f)) => {
            let nf = match factor {
                None => f.clone(),
                Some(g) => g.wedge(f)?,
            };
            vec![Divisor { poly: poly.clone(), mult: mult.clone(), factor: Some(nf) }]
        }
        (Smooth(f), Point { location, weight }) | (Point { location, weight }, Smooth(f)) => {
            let v = eval_function(f, location);
            if !v.is_real() {
                return Err(AlgebraError::UnsupportedExactCase("complex weight on a point mass".into()));
            }
            vec![Point { location: location.clone(), weight: weight * &v.re }]
        }
        (Divisor { poly: p, mult: mp, factor: fp }, Divisor { poly: q, mult: mq, factor: fq }) => {
            if n != 2 {
                return Err(AlgebraError::UnsupportedExactCase("divisor products are supported on surfaces only".into()));
            }
            if p == q || !crate::algebra::gcd(p, q).is_constant() {
                return match policy {
                    ExcessPolicy::FlatReference => Ok(Vec::new()),
                    ExcessPolicy::Reject => Err(AlgebraError::NonProperIntersection(format!("[{p}]·[{q}]"))),
                };
            }
            let mut out = Vec::new();
            for (pt, i) in intersection_points(p, q)? {
                let mut w = GaussRational::from_rational(mp * mq * BigRational::from_integer(BigInt::from(i)));
                if let Some(f) = fp {
                    w = &w * &eval_function(f, &pt);
                }
                if let Some(g) = fq {
                    w = &w * &eval_function(g, &pt);
                }
                if !w.is_real() {
                    return Err(AlgebraError::UnsupportedExactCase("complex weight on a point mass".into()));
                }
                out.push(Point { location: pt, weight: w.re });
            }
            out
        }
        // Any remaining pairing has bidegree above n and was dropped above.
        _ => Vec::new(),
    })
}

/// `dd^c ψ ∧ c` for `ψ = c_q·log|G|² + b`, where the generators of `ψ` share the common factor `G`
/// and have no further common zeros. The logarithmic part must meet every divisor of `c` properly.
pub fn ddc_qas_wedge(qas: &QasDescriptor, c: &QuasiCycle) -> Result<QuasiCycle, AlgebraError> {
    let n = c.dim();
    if qas.dim() != n {
        return Err(AlgebraError::DimensionMismatch { expected: n, found: qas.dim() });
    }
    let mut out = QuasiCycle::zero(n);
    if !qas.smooth_part().is_zero() {
        let w = QuasiCycle::smooth(PolyForm::ddc(n, qas.smooth_part())?)?;
        out = out.add(&w.mul(c, ExcessPolicy::Reject)?)?;
    }
    if qas.is_smooth() {
        return Ok(out);
    }
    let g = qas.generator_gcd();
    for f in qas.generators() {
        let rest = f.div_exact(&g).expect("gcd divides");
        if !rest.is_constant() && qas.generators().len() > 1 {
            return Err(AlgebraError::UnsupportedExactCase("several generators without a common factor give a non-polynomial smooth part".into()));
        }
    }
    if g.is_constant() {
        return Ok(out);
    }
    let d = QuasiCycle::divisor(g, qas.exponent().clone())?;
    out.add(&d.mul(c, ExcessPolicy::Reject)?)
}

/// Integer rounding helper used by callers comparing exact multiplicities.
pub fn is_nonnegative_integer(r: &BigRational) -> bool {
    r.is_integer() && !r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::rat;

    fn hp(s: &str) -> Polynomial {
        parse_holomorphic(s, 2).unwrap()
    }

    fn origin() -> Vec<GaussRational> {
        vec![GaussRational::zero(), GaussRational::zero()]
    }

    #[test]
    fn normalize_splits_and_merges() {
        let c = QuasiCycle::from_components(
            2,
            vec![
                Component::Divisor { poly: hp("x1^2*x2"), mult: rat(1, 1), factor: None },
                Component::Divisor { poly: hp("2*x1"), mult: rat(-1, 1), factor: None },
            ],
        )
        .unwrap();
        assert_eq!(c.divisors(), vec![(hp("x1"), rat(1, 1)), (hp("x2"), rat(1, 1))]);
    }

    #[test]
    fn chern_example_square() {
        let s1 = QuasiCycle::divisor(hp("x1*x2"), rat(1, 1)).unwrap();
        let sq = s1.mul(&s1, ExcessPolicy::FlatReference).unwrap();
        assert_eq!(sq, QuasiCycle::point(origin(), rat(2, 1)).unwrap());
        assert!(s1.mul(&s1, ExcessPolicy::Reject).is_err());
    }

    #[test]
    fn ddc_qas_wedge_cases() {
        let q = QasDescriptor::log_sum(2, rat(1, 1), vec![hp("x1")]).unwrap();
        let line = QuasiCycle::divisor(hp("x2"), rat(1, 1)).unwrap();
        let r = ddc_qas_wedge(&q, &line).unwrap();
        assert_eq!(r, QuasiCycle::point(origin(), rat(1, 1)).unwrap());
        let same = QuasiCycle::divisor(hp("x1"), rat(1, 1)).unwrap();
        assert!(matches!(ddc_qas_wedge(&q, &same), Err(AlgebraError::NonProperIntersection(_))));
    }

    #[test]
    fn restriction_and_mult() {
        let c = QuasiCycle::divisor(hp("x1*x2"), rat(1, 1)).unwrap().add(&QuasiCycle::smooth(PolyForm::flat_kahler(2)).unwrap()).unwrap();
        let on_axis = c.restrict(&[hp("x1")], true).unwrap();
        assert_eq!(on_axis, QuasiCycle::divisor(hp("x1"), rat(1, 1)).unwrap());
        let off = c.restrict(&[hp("x1")], false).unwrap();
        assert_eq!(on_axis.add(&off).unwrap(), c);
        assert_eq!(c.mult_at(&origin()).unwrap()[1], rat(2, 1));
    }

    #[test]
    fn json_round_trip() {
        let c = QuasiCycle::divisor(hp("x1 - 1/2*x2"), rat(3, 2))
            .unwrap()
            .add(&QuasiCycle::point(vec![GaussRational::from_frac(1, 3), GaussRational::i()], rat(2, 1)).unwrap())
            .unwrap()
            .add(&QuasiCycle::smooth(PolyForm::flat_kahler(2)).unwrap())
            .unwrap();
        assert_eq!(QuasiCycle::from_json(&c.to_json()).unwrap(), c);
    }
}
