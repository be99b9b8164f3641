//! Degeneracy loci and the divisorial part of `s_1` read off exactly from the metric data.

use num_rational::BigRational;
use num_traits::{One, Zero};
use segre_core::algebra::{bareiss_det, coprime_basis, factor, gcd};
use segre_core::form::combinations;
use segre_core::intersection::intersection_points;
use segre_core::poly::holomorphic_vars;
use segre_core::{GaussRational, Polynomial, QuasiCycle};

use crate::error::BundleError;
use crate::metric::SingularMetric;

/// The set where `h(x)` is degenerate, described by generators and their exact geometry.
#[derive(Clone, Debug, PartialEq)]
pub struct DegeneracyLocus {
    pub dim: usize,
    /// `h` is degenerate at every point.
    pub everywhere: bool,
    /// Defining equations (maximal minors, or weight generators).
    pub generators: Vec<Polynomial>,
    /// Divisorial components with the multiplicity they carry in `s_1`.
    pub divisors: Vec<(Polynomial, BigRational)>,
    /// Rational points where the locus has codimension two or more, where divisorial components
    /// meet, or where a component is singular.
    pub points: Vec<Vec<GaussRational>>,
    /// Parts of the geometry that could not be resolved exactly.
    pub notes: Vec<String>,
}

impl DegeneracyLocus {
    fn empty(dim: usize) -> Self {
        DegeneracyLocus { dim, everywhere: false, generators: Vec::new(), divisors: Vec::new(), points: Vec::new(), notes: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        !self.everywhere && self.divisors.is_empty() && self.points.is_empty()
    }

    /// Divisor factors only, without multiplicities.
    pub fn divisor_factors(&self) -> Vec<Polynomial> {
        self.divisors.iter().map(|(p, _)| p.clone()).collect()
    }

    /// The divisorial part `Σ m_i [P_i = 0]` as a quasi-cycle.
    pub fn fixed_divisor(&self) -> Result<QuasiCycle, BundleError> {
        let mut out = QuasiCycle::zero(self.dim);
        for (p, m) in &self.divisors {
            out = out.add(&QuasiCycle::divisor(p.clone(), m.clone())?)?;
        }
        Ok(out)
    }

    /// Prediction for the Lelong number of `s_1` of the pullback along `τ` at `t0`:
    /// `Σ m_i · ord_{t0}(P_i ∘ τ)`, skipping components that contain the curve.
    pub fn pullback_multiplicity(&self, curve: &[Polynomial], t0: &GaussRational) -> Result<BigRational, BundleError> {
        let t_vars = holomorphic_vars(1);
        let mut total = BigRational::zero();
        for (p, m) in &self.divisors {
            let q = p.compose(curve)?.embed(&t_vars)?;
            if q.is_zero() {
                continue;
            }
            let ord = q.order_at(std::slice::from_ref(t0)).unwrap_or(0);
            total += m * BigRational::from_integer(ord.into());
        }
        Ok(total)
    }

    fn merge(&mut self, other: DegeneracyLocus) {
        self.everywhere |= other.everywhere;
        self.generators.extend(other.generators);
        for (p, m) in other.divisors {
            match self.divisors.iter_mut().find(|(q, _)| *q == p) {
                Some((_, acc)) => *acc += m,
                None => self.divisors.push((p, m)),
            }
        }
        for x in other.points {
            if !self.points.contains(&x) {
                self.points.push(x);
            }
        }
        self.notes.extend(other.notes);
    }
}

/// Computes the degeneracy locus of `metric` over a base of dimension `dim`.
pub fn degeneracy_locus(metric: &SingularMetric, dim: usize) -> Result<DegeneracyLocus, BundleError> {
    metric.validate(dim)?;
    let mut locus = match metric {
        SingularMetric::Smooth(_) => DegeneracyLocus::empty(dim),
        SingularMetric::MorphismInduced { g, .. } => {
            let r = metric.rank();
            let m = g.len();
            let vars = holomorphic_vars(dim);
            if m < r {
                let mut l = DegeneracyLocus::empty(dim);
                l.everywhere = true;
                l
            } else {
                let minors: Vec<Polynomial> = combinations(m, r)
                    .into_iter()
                    .map(|rows| bareiss_det(rows.iter().map(|&i| g[i].clone()).collect(), &vars))
                    .filter(|p| !p.is_zero())
                    .collect();
                locus_of_ideal(dim, minors, BigRational::one())?
            }
        }
        SingularMetric::DiagonalQas(weights) => {
            let mut l = DegeneracyLocus::empty(dim);
            for q in weights {
                if q.generators().is_empty() {
                    continue;
                }
                let gens: Vec<Polynomial> = q.generators().iter().filter(|p| !p.is_zero()).cloned().collect();
                l.merge(locus_of_ideal(dim, gens, q.exponent().clone())?);
            }
            l
        }
        SingularMetric::DirectSum(parts) => {
            let mut l = DegeneracyLocus::empty(dim);
            for p in parts {
                l.merge(degeneracy_locus(p, dim)?);
            }
            l
        }
    };
    if !locus.everywhere {
        add_crossings(&mut locus);
    }
    Ok(locus)
}

/// Locus of the ideal generated by `gens`; the divisor of their gcd carries weight `c`.
fn locus_of_ideal(dim: usize, gens: Vec<Polynomial>, c: BigRational) -> Result<DegeneracyLocus, BundleError> {
    let mut l = DegeneracyLocus::empty(dim);
    if gens.is_empty() {
        l.everywhere = true;
        return Ok(l);
    }
    let mut d = gens[0].clone();
    for p in &gens[1..] {
        d = gcd(&d, p);
    }
    if !d.is_constant() {
        for (p, e) in factor(&d)?.factors {
            l.divisors.push((p, &c * BigRational::from_integer(e.into())));
        }
    }
    let residual: Vec<Polynomial> = gens.iter().map(|p| p.div_exact(&d).expect("gcd divides")).collect();
    if residual.iter().any(|p| p.is_constant()) {
        l.generators = gens;
        return Ok(l);
    }
    // The residual ideal has no divisorial part; its zeros are points when dim = 2.
    match dim {
        1 => {}
        2 => match common_points(&residual) {
            Ok(points) => l.points = points,
            Err(e) => l.notes.push(format!("common zeros of the residual generators: {e}")),
        },
        _ => l.notes.push("points of the residual locus are not computed in dimension three".into()),
    }
    l.generators = gens;
    Ok(l)
}

/// Rational common zeros of polynomials in two variables without a common factor.
fn common_points(gens: &[Polynomial]) -> Result<Vec<Vec<GaussRational>>, BundleError> {
    for i in 0..gens.len() {
        for j in (i + 1)..gens.len() {
            if !gcd(&gens[i], &gens[j]).is_constant() {
                continue;
            }
            let pts = intersection_points(&gens[i], &gens[j])?;
            return Ok(pts.into_iter().map(|(x, _)| x).filter(|x| gens.iter().all(|g| g.eval(x).is_zero())).collect());
        }
    }
    Err(BundleError::Unsupported("no coprime pair among the residual generators".into()))
}

/// Adds pairwise crossings and singular points of divisor components in dimension two.
fn add_crossings(l: &mut DegeneracyLocus) {
    if l.dim != 2 {
        return;
    }
    let basis = coprime_basis(l.divisors.iter().map(|(p, _)| (p.clone(), 1)).collect());
    let comps: Vec<Polynomial> = basis.into_iter().map(|(p, _)| p).collect();
    let mut found: Vec<Vec<GaussRational>> = Vec::new();
    for i in 0..comps.len() {
        for j in (i + 1)..comps.len() {
            match intersection_points(&comps[i], &comps[j]) {
                Ok(pts) => found.extend(pts.into_iter().map(|(x, _)| x)),
                Err(e) => l.notes.push(format!("crossing of components {i} and {j}: {e}")),
            }
        }
        let p = &comps[i];
        let (d0, d1) = (p.derivative(0), p.derivative(1));
        let partial = if !d0.is_zero() && gcd(p, &d0).is_constant() { Some(&d0) } else if !d1.is_zero() && gcd(p, &d1).is_constant() { Some(&d1) } else { None };
        if let Some(q) = partial {
            match intersection_points(p, q) {
                Ok(pts) => found.extend(pts.into_iter().map(|(x, _)| x).filter(|x| d0.eval(x).is_zero() && d1.eval(x).is_zero())),
                Err(e) => l.notes.push(format!("singular points of component {i}: {e}")),
            }
        }
    }
    for x in found {
        if !l.points.contains(&x) {
            l.points.push(x);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use segre_core::gauss::rat;
    use segre_core::parse::parse_holomorphic;
    use segre_core::QasDescriptor;

    fn p(s: &str) -> Polynomial {
        parse_holomorphic(s, 2).unwrap()
    }

    #[test]
    fn chernex_locus() {
        let m = SingularMetric::MorphismInduced { g: vec![vec![p("x1"), p("0")], vec![p("0"), p("x2")]], target: None };
        let l = degeneracy_locus(&m, 2).unwrap();
        assert_eq!(l.divisors.len(), 2);
        assert!(l.divisors.iter().all(|(_, m)| m.is_one()));
        assert_eq!(l.points, vec![vec![GaussRational::from_int(0); 2]]);
        let curve = vec![parse_holomorphic("x1", 1).unwrap(), parse_holomorphic("0", 1).unwrap()];
        assert_eq!(l.pullback_multiplicity(&curve, &GaussRational::from_int(0)).unwrap(), BigRational::one());
        let diag = vec![parse_holomorphic("x1", 1).unwrap(), parse_holomorphic("x1", 1).unwrap()];
        assert_eq!(l.pullback_multiplicity(&diag, &GaussRational::from_int(0)).unwrap(), rat(2, 1));
    }

    #[test]
    fn row_vector_has_a_point_locus() {
        let m = SingularMetric::MorphismInduced { g: vec![vec![p("x1")], vec![p("x2")]], target: None };
        let l = degeneracy_locus(&m, 2).unwrap();
        assert!(l.divisors.is_empty());
        assert_eq!(l.points, vec![vec![GaussRational::from_int(0); 2]]);
    }

    #[test]
    fn identity_and_rank_deficient() {
        let id = SingularMetric::MorphismInduced { g: vec![vec![p("1"), p("0")], vec![p("0"), p("1")]], target: None };
        assert!(degeneracy_locus(&id, 2).unwrap().is_empty());
        let thin = SingularMetric::MorphismInduced { g: vec![vec![p("x1"), p("x2")]], target: None };
        assert!(degeneracy_locus(&thin, 2).unwrap().everywhere);
    }

    #[test]
    fn diagonal_weights_add_multiplicities() {
        let w1 = QasDescriptor::log_sum(2, rat(1, 1), vec![p("x1^2")]).unwrap();
        let w2 = QasDescriptor::log_sum(2, rat(1, 2), vec![p("x1*x2")]).unwrap();
        let l = degeneracy_locus(&SingularMetric::DiagonalQas(vec![w1, w2]), 2).unwrap();
        let x1 = l.divisors.iter().find(|(q, _)| *q == p("x1")).unwrap();
        assert_eq!(x1.1, rat(5, 2));
    }
}
