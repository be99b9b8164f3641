//! Gcd, squarefree factorization, rational roots and resultants over ℚ(i).

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::AlgebraError;
use crate::gauss::GaussRational;
use crate::poly::Polynomial;

/// Greatest common divisor, normalized to be monic in lex order.
pub fn gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Polynomial::one(a.vars());
    }
    let v = a.highest_var().max(b.highest_var()).expect("non-constant");
    if !a.contains_var(v) {
        return gcd(a, &content_in(b, v));
    }
    if !b.contains_var(v) {
        return gcd(&content_in(a, v), b);
    }
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let c = gcd(&ca, &cb);
    let mut p = a.div_exact(&ca).expect("content divides");
    let mut q = b.div_exact(&cb).expect("content divides");
    if p.degree_in(v) < q.degree_in(v) {
        std::mem::swap(&mut p, &mut q);
    }
    loop {
        let r = prem(&p, &q, v);
        if r.is_zero() {
            break;
        }
        if !r.contains_var(v) {
            q = Polynomial::one(a.vars());
            break;
        }
        p = q;
        q = primitive_part_in(&r, v);
    }
    let g = primitive_part_in(&q, v);
    (&c * &g).monic()
}

/// Gcd of the coefficients of `a` viewed as a polynomial in `v`.
pub fn content_in(a: &Polynomial, v: usize) -> Polynomial {
    if !a.contains_var(v) {
        return a.monic();
    }
    let mut acc = Polynomial::zero(a.vars());
    for c in a.coeffs_in(v) {
        if c.is_zero() {
            continue;
        }
        acc = gcd(&acc, &c);
        if acc.is_constant() {
            break;
        }
    }
    acc
}

pub fn primitive_part_in(a: &Polynomial, v: usize) -> Polynomial {
    if a.is_zero() {
        return a.clone();
    }
    let c = content_in(a, v);
    a.div_exact(&c).expect("content divides")
}

/// Sparse pseudo-remainder of `a` by `b` with respect to `v`.
pub fn prem(a: &Polynomial, b: &Polynomial, v: usize) -> Polynomial {
    let db = b.degree_in(v);
    let lb = b.lc_in(v);
    let mut r = a.clone();
    while !r.is_zero() && r.contains_var(v) && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lr = r.lc_in(v);
        let mut e = vec![0; a.nvars()];
        e[v] = dr - db;
        let shift = Polynomial::monomial(a.vars(), e, GaussRational::one());
        r = &(&lb * &r) - &(&(&lr * &shift) * b);
    }
    if db == 0 && !r.is_zero() {
        // b is free of v; any multiple of it reduces to zero.
        return Polynomial::zero(a.vars());
    }
    r
}

/// Yun's squarefree decomposition of a polynomial primitive in `v`.
pub fn squarefree_in(f: &Polynomial, v: usize) -> Vec<(Polynomial, u32)> {
    let mut out = Vec::new();
    if !f.contains_var(v) {
        return out;
    }
    let fp = f.derivative(v);
    let a0 = gcd(f, &fp);
    let mut b = f.div_exact(&a0).expect("gcd divides");
    let mut c = fp.div_exact(&a0).expect("gcd divides");
    let mut d = &c - &b.derivative(v);
    let mut i = 1;
    loop {
        let a = gcd(&b, &d);
        if !a.is_constant() {
            out.push((a.clone(), i));
        }
        b = b.div_exact(&a).expect("gcd divides");
        if b.is_constant() {
            break;
        }
        c = d.div_exact(&a).expect("gcd divides");
        d = &c - &b.derivative(v);
        i += 1;
        if i > 10_000 {
            break;
        }
    }
    out
}

/// Decomposition `f = unit · Π p_i^{m_i}` into pairwise coprime, squarefree, monic factors.
///
/// Factors are split as far as contents, squarefree parts, rational linear factors of
/// univariate pieces and linear factors of homogeneous bivariate pieces allow; this is not a
/// full irreducible factorization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: GaussRational,
    pub factors: Vec<(Polynomial, u32)>,
}

pub fn factor(f: &Polynomial) -> Result<Factorization, AlgebraError> {
    if f.is_zero() {
        return Err(AlgebraError::Invalid("cannot factor the zero polynomial".into()));
    }
    let mut acc = Vec::new();
    factor_rec(f, 1, &mut acc);
    let factors = coprime_basis(acc);
    let unit = f.leading_coefficient();
    Ok(Factorization { unit, factors })
}

fn factor_rec(f: &Polynomial, m: u32, out: &mut Vec<(Polynomial, u32)>) {
    if f.is_constant() {
        return;
    }
    let v = f.highest_var().expect("non-constant");
    let c = content_in(f, v);
    if !c.is_constant() {
        factor_rec(&c, m, out);
    }
    let p = f.div_exact(&c).expect("content divides");
    for (a, i) in squarefree_in(&p, v) {
        split_squarefree(&a, m * i, out);
    }
}

fn split_squarefree(a: &Polynomial, m: u32, out: &mut Vec<(Polynomial, u32)>) {
    if a.is_constant() {
        return;
    }
    let occ = a.occurring_vars();
    if occ.len() > 1 {
        for &u in &occ {
            let c = content_in(a, u);
            if !c.is_constant() {
                split_squarefree(&c, m, out);
                split_squarefree(&a.div_exact(&c).expect("content divides"), m, out);
                return;
            }
        }
    }
    if a.total_degree() >= 2 {
        if let Some(lin) = find_linear_factor(a, &occ) {
            let rest = a.div_exact(&lin).expect("linear factor divides");
            out.push((lin.monic(), m));
            split_squarefree(&rest, m, out);
            return;
        }
    }
    out.push((a.monic(), m));
}

/// A rational linear factor of a univariate, or homogeneous bivariate, polynomial.
fn find_linear_factor(a: &Polynomial, occ: &[usize]) -> Option<Polynomial> {
    let vars = a.vars();
    if occ.len() == 1 {
        let v = occ[0];
        let coeffs = univariate_coeffs(a, v)?;
        let roots = rational_roots(&coeffs);
        let (r, _) = roots.first()?;
        return Some(&Polynomial::var(vars, v) - &Polynomial::constant(vars, r.clone()));
    }
    if occ.len() == 2 && a.is_homogeneous() {
        let (u, w) = (occ[0], occ[1]);
        // a(t, 1) in the variable u.
        let de = a.substitute_value(w, &GaussRational::one());
        let coeffs = univariate_coeffs(&de, u)?;
        let roots = rational_roots(&coeffs);
        let (r, _) = roots.first()?;
        let lin = &Polynomial::var(vars, u) - &Polynomial::var(vars, w).scale(r);
        return Some(lin);
    }
    None
}

/// Refines a list of factors so that distinct entries are coprime, merging associates.
pub fn coprime_basis(list: Vec<(Polynomial, u32)>) -> Vec<(Polynomial, u32)> {
    let mut items: Vec<(Polynomial, u32)> = list.into_iter().filter(|(p, _)| !p.is_constant()).map(|(p, m)| (p.monic(), m)).collect();
    'outer: loop {
        for i in 0..items.len() {
            for j in (i + 1)..items.len() {
                if items[i].0 == items[j].0 {
                    let (_, mj) = items.remove(j);
                    items[i].1 += mj;
                    continue 'outer;
                }
                let g = gcd(&items[i].0, &items[j].0);
                if !g.is_constant() {
                    let (pj, mj) = items.remove(j);
                    let (pi, mi) = items.remove(i);
                    let qi = pi.div_exact(&g).expect("gcd divides");
                    let qj = pj.div_exact(&g).expect("gcd divides");
                    if !qi.is_constant() {
                        items.push((qi.monic(), mi));
                    }
                    if !qj.is_constant() {
                        items.push((qj.monic(), mj));
                    }
                    items.push((g, mi + mj));
                    continue 'outer;
                }
            }
        }
        break;
    }
    items.sort_by(|a, b| a.0.total_degree().cmp(&b.0.total_degree()).then_with(|| a.0.to_string().cmp(&b.0.to_string())));
    items
}

/// Coefficients of a polynomial that only involves variable `v`.
pub fn univariate_coeffs(p: &Polynomial, v: usize) -> Option<Vec<GaussRational>> {
    if p.occurring_vars().iter().any(|&u| u != v) {
        return None;
    }
    Some(p.coeffs_in(v).iter().map(|c| c.constant_term()).collect())
}

fn eval_univariate(coeffs: &[GaussRational], x: &GaussRational) -> GaussRational {
    let mut acc = GaussRational::zero();
    for c in coeffs.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

fn deflate(coeffs: &[GaussRational], r: &GaussRational) -> Vec<GaussRational> {
    // Synthetic division by (x - r), assuming r is a root.
    let n = coeffs.len();
    let mut out = vec![GaussRational::zero(); n - 1];
    let mut carry = GaussRational::zero();
    for k in (1..n).rev() {
        carry = &(&carry * r) + &coeffs[k];
        out[k - 1] = carry.clone();
    }
    out
}

fn small_divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs();
    let limit = BigInt::from(10u64.pow(14));
    if n > limit {
        return None;
    }
    let n = n.to_u64()?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Some(out)
}

/// Roots in ℚ (and, for linear inputs, in ℚ(i)) of a univariate polynomial, with multiplicity.
pub fn rational_roots(coeffs: &[GaussRational]) -> Vec<(GaussRational, u32)> {
    let mut c: Vec<GaussRational> = coeffs.to_vec();
    while c.last().map(|x| x.is_zero()).unwrap_or(false) {
        c.pop();
    }
    let mut roots = Vec::new();
    if c.len() <= 1 {
        return roots;
    }
    // Roots at zero.
    let mut zero_mult = 0;
    while c.len() > 1 && c[0].is_zero() {
        c.remove(0);
        zero_mult += 1;
    }
    if zero_mult > 0 {
        roots.push((GaussRational::zero(), zero_mult));
    }
    if c.len() == 2 {
        roots.push((-(&c[0] / &c[1]), 1));
        return roots;
    }
    if c.len() < 2 {
        return roots;
    }
    let lead = c.last().unwrap().clone();
    let monic: Vec<GaussRational> = c.iter().map(|x| x / &lead).collect();
    if monic.iter().any(|x| !x.is_real()) {
        return roots;
    }
    let denom_lcm = monic.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.re.denom()));
    let ints: Vec<BigInt> = monic.iter().map(|x| (&x.re * BigRational::from_integer(denom_lcm.clone())).to_integer()).collect();
    let (Some(p_divs), Some(q_divs)) = (small_divisors(&ints[0]), small_divisors(ints.last().unwrap())) else {
        return roots;
    };
    let mut candidates = Vec::new();
    for p in &p_divs {
        for q in &q_divs {
            for s in [Sign::Plus, Sign::Minus] {
                let num = if s == Sign::Minus { -p.clone() } else { p.clone() };
                candidates.push(BigRational::new(num, q.clone()));
            }
        }
    }
    candidates.sort();
    candidates.dedup();
    let mut work = c;
    for cand in candidates {
        let r = GaussRational::from_rational(cand);
        let mut mult = 0;
        while work.len() > 1 && eval_univariate(&work, &r).is_zero() {
            work = deflate(&work, &r);
            mult += 1;
        }
        if mult > 0 {
            roots.push((r, mult));
        }
    }
    roots.sort_by(|a, b| a.0.cmp(&b.0));
    roots
}

/// Order of vanishing of a univariate coefficient list at `x`.
pub fn univariate_order_at(coeffs: &[GaussRational], x: &GaussRational) -> Option<u32> {
    let mut c: Vec<GaussRational> = coeffs.to_vec();
    while c.last().map(|v| v.is_zero()).unwrap_or(false) {
        c.pop();
    }
    if c.is_empty() {
        return None;
    }
    let mut k = 0;
    while c.len() > 1 && eval_univariate(&c, x).is_zero() {
        c = deflate(&c, x);
        k += 1;
    }
    Some(k)
}

/// Determinant of a square polynomial matrix by fraction-free Bareiss elimination.
pub fn bareiss_det(mut m: Vec<Vec<Polynomial>>, vars: &[String]) -> Polynomial {
    let n = m.len();
    if n == 0 {
        return Polynomial::one(vars);
    }
    let mut sign = false;
    let mut prev = Polynomial::one(vars);
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            match ((k + 1)..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = !sign;
                }
                None => return Polynomial::zero(vars),
            }
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign {
        -&d
    } else {
        d
    }
}

/// Resultant of `a` and `b` with respect to variable `v` (Sylvester determinant).
pub fn resultant(a: &Polynomial, b: &Polynomial, v: usize) -> Result<Polynomial, AlgebraError> {
    a.check_same_vars(b)?;
    let vars = a.vars();
    if a.is_zero() || b.is_zero() {
        return Ok(Polynomial::zero(vars));
    }
    let ca = a.coeffs_in(v);
    let cb = b.coeffs_in(v);
    let m = ca.len() - 1;
    let k = cb.len() - 1;
    if m == 0 {
        return Ok(ca[0].pow(k as u32));
    }
    if k == 0 {
        return Ok(cb[0].pow(m as u32));
    }
    let n = m + k;
    let zero = Polynomial::zero(vars);
    let mut s = vec![vec![zero; n]; n];
    for r in 0..k {
        for i in 0..=m {
            s[r][r + (m - i)] = ca[i].clone();
        }
    }
    for r in 0..m {
        for j in 0..=k {
            s[k + r][r + (k - j)] = cb[j].clone();
        }
    }
    Ok(bareiss_det(s, vars))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_holomorphic;

    fn p(s: &str) -> Polynomial {
        parse_holomorphic(s, 2).unwrap()
    }

    #[test]
    fn gcd_finds_common_factor() {
        let g = gcd(&p("(x1 - x2)*(x1 + 2)"), &p("(x1 - x2)^2*(x2 + 1)"));
        assert_eq!(g, p("x1 - x2"));
        assert!(gcd(&p("x1"), &p("x2")).is_one());
        assert_eq!(gcd(&p("x1*x2^2"), &p("x2^3")), p("x2^2"));
    }

    #[test]
    fn factor_splits_powers_and_lines() {
        let f = p("3*x1^2*(x1 - x2)^3*(x1^2 - x2^2)");
        let fz = factor(&f).unwrap();
        let mut got: Vec<(String, u32)> = fz.factors.iter().map(|(q, m)| (q.to_string(), *m)).collect();
        got.sort();
        assert_eq!(got, vec![("x1".into(), 2), ("x1 + x2".into(), 1), ("x1 - x2".into(), 4)]);
        assert_eq!(fz.unit, GaussRational::from_int(3));
    }

    #[test]
    fn factor_handles_rational_roots() {
        let f = parse_holomorphic("x1^3 - 7/4*x1 - 3/4", 1).unwrap();
        let fz = factor(&f).unwrap();
        assert_eq!(fz.factors.len(), 3);
    }

    #[test]
    fn resultant_of_lines_and_conic() {
        // Circle and line x2 = x1 meet where 2 x1^2 = 1.
        let r = resultant(&p("x1^2 + x2^2 - 1"), &p("x2 - x1"), 1).unwrap();
        assert_eq!(r, p("2*x1^2 - 1"));
    }
}
