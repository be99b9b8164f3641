//! Exact smooth (k,k)-forms with real-analytic polynomial coefficients.
//!
//! A form is written `Σ T_IJ β_IJ`, where `β_ab = (i/2π) dz_a ∧ dz̄_b` and
//! `β_IJ = β_{i1 j1} ∧ … ∧ β_{ik jk}` for increasing index lists `I`, `J`.
//! With this basis `dd^c f` has coefficients `∂_a ∂̄_b f`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::AlgebraError;
use crate::gauss::GaussRational;
use crate::poly::{real_analytic_vars, Polynomial};

pub type MultiIndex = Vec<usize>;

/// Sign of the permutation sorting the concatenation of two disjoint increasing lists,
/// or `None` when they overlap.
pub fn merge_sign(a: &[usize], b: &[usize]) -> Option<(i32, Vec<usize>)> {
    let mut inversions = 0usize;
    for &x in a {
        for &y in b {
            if x == y {
                return None;
            }
            if x > y {
                inversions += 1;
            }
        }
    }
    let mut merged: Vec<usize> = a.iter().chain(b).copied().collect();
    merged.sort_unstable();
    Some((if inversions % 2 == 0 { 1 } else { -1 }, merged))
}

/// Sign of `β_IJ ∧ β_KL` relative to `β_{I∪K, J∪L}`; `None` when the product vanishes.
pub fn wedge_sign(i: &[usize], j: &[usize], k: &[usize], l: &[usize]) -> Option<(i32, MultiIndex, MultiIndex)> {
    let (s1, ik) = merge_sign(i, k)?;
    let (s2, jl) = merge_sign(j, l)?;
    Some((s1 * s2, ik, jl))
}

/// All increasing index lists of length `k` drawn from `0..n`.
pub fn combinations(n: usize, k: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyForm {
    dim: usize,
    degree: usize,
    coeffs: BTreeMap<(MultiIndex, MultiIndex), Polynomial>,
}

impl PolyForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        PolyForm { dim, degree, coeffs: BTreeMap::new() }
    }

    /// The 0-form given by a real-analytic polynomial.
    pub fn function(dim: usize, f: Polynomial) -> Result<Self, AlgebraError> {
        check_vars(dim, &f)?;
        let mut out = Self::zero(dim, 0);
        if !f.is_zero() {
            out.coeffs.insert((vec![], vec![]), f);
        }
        Ok(out)
    }

    pub fn constant(dim: usize, c: GaussRational) -> Self {
        Self::function(dim, Polynomial::constant(&real_analytic_vars(dim), c)).expect("valid")
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, GaussRational::one())
    }

    /// `dd^c f` for a real-analytic polynomial `f`.
    pub fn ddc(dim: usize, f: &Polynomial) -> Result<Self, AlgebraError> {
        check_vars(dim, f)?;
        let mut out = Self::zero(dim, 1);
        for a in 0..dim {
            let fa = f.derivative(a);
            for b in 0..dim {
                let c = fa.derivative(dim + b);
                if !c.is_zero() {
                    out.coeffs.insert((vec![a], vec![b]), c);
                }
            }
        }
        Ok(out)
    }

    /// `dd^c |x|²`, the flat Kähler form.
    pub fn flat_kahler(dim: usize) -> Self {
        let vars = real_analytic_vars(dim);
        let mut f = Polynomial::zero(&vars);
        for a in 0..dim {
            f = &f + &(&Polynomial::var(&vars, a) * &Polynomial::var(&vars, dim + a));
        }
        Self::ddc(dim, &f).expect("valid")
    }

    pub fn from_coefficients(dim: usize, degree: usize, coeffs: impl IntoIterator<Item = (MultiIndex, MultiIndex, Polynomial)>) -> Result<Self, AlgebraError> {
        let mut out = Self::zero(dim, degree);
        for (i, j, p) in coeffs {
            check_vars(dim, &p)?;
            if i.len() != degree || j.len() != degree || !is_increasing(&i, dim) || !is_increasing(&j, dim) {
                return Err(AlgebraError::Invalid(format!("bad index lists {i:?}, {j:?} for degree {degree}")));
            }
            out.add_coeff(i, j, &p);
        }
        Ok(out)
    }

    fn add_coeff(&mut self, i: MultiIndex, j: MultiIndex, p: &Polynomial) {
        if p.is_zero() {
            return;
        }
        let key = (i, j);
        let new = match self.coeffs.get(&key) {
            Some(old) => old + p,
            None => p.clone(),
        };
        if new.is_zero() {
            self.coeffs.remove(&key);
        } else {
            self.coeffs.insert(key, new);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficients(&self) -> &BTreeMap<(MultiIndex, MultiIndex), Polynomial> {
        &self.coeffs
    }

    pub fn coefficient(&self, i: &[usize], j: &[usize]) -> Polynomial {
        self.coeffs.get(&(i.to_vec(), j.to_vec())).cloned().unwrap_or_else(|| Polynomial::zero(&real_analytic_vars(self.dim)))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Constant value of a 0-form, when it is constant.
    pub fn as_constant(&self) -> Option<GaussRational> {
        if self.degree != 0 {
            return None;
        }
        match self.coeffs.get(&(vec![], vec![])) {
            None => Some(GaussRational::zero()),
            Some(p) if p.is_constant() => Some(p.constant_term()),
            _ => None,
        }
    }

    pub fn add(&self, other: &PolyForm) -> Result<PolyForm, AlgebraError> {
        if self.dim != other.dim || self.degree != other.degree {
            return Err(AlgebraError::Invalid("adding forms of different dimension or degree".into()));
        }
        let mut out = self.clone();
        for ((i, j), p) in &other.coeffs {
            out.add_coeff(i.clone(), j.clone(), p);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &GaussRational) -> PolyForm {
        let mut out = Self::zero(self.dim, self.degree);
        for ((i, j), p) in &self.coeffs {
            out.add_coeff(i.clone(), j.clone(), &p.scale(c));
        }
        out
    }

    pub fn neg(&self) -> PolyForm {
        self.scale(&GaussRational::from_int(-1))
    }

    pub fn wedge(&self, other: &PolyForm) -> Result<PolyForm, AlgebraError> {
        if self.dim != other.dim {
            return Err(AlgebraError::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let deg = self.degree + other.degree;
        let mut out = Self::zero(self.dim, deg);
        if deg > self.dim {
            return Ok(out);
        }
        for ((i, j), p) in &self.coeffs {
            for ((k, l), q) in &other.coeffs {
                if let Some((s, ik, jl)) = wedge_sign(i, j, k, l) {
                    let prod = p * q;
                    out.add_coeff(ik, jl, &if s > 0 { prod } else { -&prod });
                }
            }
        }
        Ok(out)
    }

    /// Value of every coefficient at `x` (conjugate variables evaluated at `x̄`).
    pub fn eval(&self, x: &[GaussRational]) -> BTreeMap<(MultiIndex, MultiIndex), GaussRational> {
        let mut pt: Vec<GaussRational> = x.to_vec();
        pt.extend(x.iter().map(|v| v.conj()));
        self.coeffs.iter().map(|(k, p)| (k.clone(), p.eval(&pt))).collect()
    }

    /// Hermitian symmetry `T_JI = conj(T_IJ)` with conjugation swapping `x` and `xb`.
    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|((i, j), p)| {
            let other = self.coefficient(j, i);
            conjugate_poly(self.dim, p) == other
        })
    }
}

/// Complex conjugate of a real-analytic polynomial: conjugate coefficients and swap `x`, `xb`.
pub fn conjugate_poly(dim: usize, p: &Polynomial) -> Polynomial {
    let vars = p.vars().to_vec();
    Polynomial::from_terms(
        &vars,
        p.terms().iter().map(|(e, c)| {
            let mut s = e[dim..].to_vec();
            s.extend_from_slice(&e[..dim]);
            (s, c.conj())
        }),
    )
}

fn is_increasing(i: &[usize], dim: usize) -> bool {
    i.windows(2).all(|w| w[0] < w[1]) && i.iter().all(|&x| x < dim)
}

fn check_vars(dim: usize, p: &Polynomial) -> Result<(), AlgebraError> {
    if p.vars() != real_analytic_vars(dim).as_slice() {
        return Err(AlgebraError::VariableMismatch(format!("expected real-analytic variables in dimension {dim}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_real_analytic;

    #[test]
    fn flat_kahler_power_is_factorial_volume() {
        let w = PolyForm::flat_kahler(2);
        let w2 = w.wedge(&w).unwrap();
        assert_eq!(w2.coefficient(&[0, 1], &[0, 1]), Polynomial::constant(&real_analytic_vars(2), GaussRational::from_int(2)));
        assert_eq!(w2.coefficients().len(), 1);
    }

    #[test]
    fn wedge_is_commutative_for_even_forms() {
        let a = PolyForm::ddc(2, &parse_real_analytic("x1*xb1*x2*xb2 + x1*xb2 + x2*xb1", 2).unwrap()).unwrap();
        let b = PolyForm::ddc(2, &parse_real_analytic("x1^2*xb1^2 + 3*x2*xb2", 2).unwrap()).unwrap();
        assert_eq!(a.wedge(&b).unwrap(), b.wedge(&a).unwrap());
        assert!(a.is_real());
    }

    #[test]
    fn determinant_identity_for_rank_one_hessian() {
        // (dd^c f)^2 = 2 det(f_ab̄) β_{12,12}.
        let f = parse_real_analytic("x1*xb1 + 2*x2*xb2 + x1*xb2 + x2*xb1", 2).unwrap();
        let a = PolyForm::ddc(2, &f).unwrap();
        let sq = a.wedge(&a).unwrap();
        assert_eq!(sq.coefficient(&[0, 1], &[0, 1]).constant_term(), GaussRational::from_int(2));
    }
}
