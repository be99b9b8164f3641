//! Local intersection multiplicities of plane curves.

use num_traits::{One, Zero};

use crate::algebra::{gcd, rational_roots, resultant, univariate_coeffs, univariate_order_at};
use crate::error::AlgebraError;
use crate::gauss::GaussRational;
use crate::poly::Polynomial;

fn check_plane(p: &Polynomial, q: &Polynomial) -> Result<(), AlgebraError> {
    p.check_same_vars(q)?;
    if p.nvars() != 2 {
        return Err(AlgebraError::DimensionMismatch { expected: 2, found: p.nvars() });
    }
    Ok(())
}

fn check_proper(p: &Polynomial, q: &Polynomial) -> Result<(), AlgebraError> {
    if p.is_zero() || q.is_zero() {
        return Err(AlgebraError::NonProperIntersection("zero polynomial".into()));
    }
    let g = gcd(p, q);
    if !g.is_constant() {
        return Err(AlgebraError::NonProperIntersection(format!("common factor {g}")));
    }
    Ok(())
}

/// Intersection multiplicity `I_point(P, Q)` by Fulton's algorithm.
pub fn intersection_number(p: &Polynomial, q: &Polynomial, point: &[GaussRational]) -> Result<u32, AlgebraError> {
    check_plane(p, q)?;
    check_proper(p, q)?;
    fulton_at_origin(p.translate(point), q.translate(point))
}

fn fulton_at_origin(mut p: Polynomial, mut q: Polynomial) -> Result<u32, AlgebraError> {
    let vars = p.vars().to_vec();
    let y = Polynomial::var(&vars, 1);
    let zero = GaussRational::zero();
    let mut acc = 0u32;
    for _ in 0..1_000_000 {
        if p.is_zero() || q.is_zero() {
            return Err(AlgebraError::NonProperIntersection("curves share a component".into()));
        }
        if !p.constant_term().is_zero() || !q.constant_term().is_zero() {
            return Ok(acc);
        }
        let p0 = p.substitute_value(1, &zero);
        let q0 = q.substitute_value(1, &zero);
        match (p0.is_zero(), q0.is_zero()) {
            (true, true) => return Err(AlgebraError::NonProperIntersection("both curves contain x2 = 0".into())),
            (true, false) => {
                // P = y·P1 and I(y, Q) is the order of Q(x, 0) at x = 0.
                let qc = univariate_coeffs(&q0, 0).expect("univariate");
                acc += univariate_order_at(&qc, &zero).expect("nonzero");
                p = p.div_exact(&y).expect("y divides");
            }
            (false, true) => std::mem::swap(&mut p, &mut q),
            (false, false) => {
                let (mut r, mut s) = (p0.degree_in(0), q0.degree_in(0));
                let (mut lp, mut lq) = (p0.lc_in(0), q0.lc_in(0));
                if r > s {
                    std::mem::swap(&mut p, &mut q);
                    std::mem::swap(&mut r, &mut s);
                    std::mem::swap(&mut lp, &mut lq);
                }
                let mut e = vec![0; 2];
                e[0] = s - r;
                let shift = Polynomial::monomial(&vars, e, lq.constant_term());
                q = &q.scale(&lp.constant_term()) - &(&shift * &p);
            }
        }
    }
    Err(AlgebraError::UnsupportedExactCase("intersection algorithm did not terminate".into()))
}

/// Parameter `t` for the shear `(x1, x2) -> (x1 + t·x2, x2)` that makes the leading
/// coefficients in `x2` of both polynomials constant.
fn shear_parameter(p: &Polynomial, q: &Polynomial, skip: usize) -> GaussRational {
    let pt = p.homogeneous_part(p.total_degree());
    let qt = q.homogeneous_part(q.total_degree());
    let mut found = 0;
    for k in 0..1000i64 {
        let t = GaussRational::from_int(if k % 2 == 0 { k / 2 } else { -(k + 1) / 2 });
        let at = [t.clone(), GaussRational::one()];
        if !pt.eval(&at).is_zero() && !qt.eval(&at).is_zero() {
            if found == skip {
                return t;
            }
            found += 1;
        }
    }
    unreachable!("a nonzero binary form has finitely many roots")
}

fn shear(p: &Polynomial, t: &GaussRational) -> Polynomial {
    let vars = p.vars().to_vec();
    let x1 = &Polynomial::var(&vars, 0) + &Polynomial::var(&vars, 1).scale(t);
    p.compose(&[x1, Polynomial::var(&vars, 1)]).expect("same variables")
}

/// Resultant in `x2` after a generic shear; its degree counts affine intersections with multiplicity.
pub fn sheared_resultant(p: &Polynomial, q: &Polynomial, skip: usize) -> Result<(GaussRational, Polynomial), AlgebraError> {
    check_plane(p, q)?;
    let t = shear_parameter(p, q, skip);
    let r = resultant(&shear(p, &t), &shear(q, &t), 1)?;
    Ok((t, r))
}

/// Total number of affine intersection points counted with multiplicity.
pub fn total_intersection(p: &Polynomial, q: &Polynomial) -> Result<u32, AlgebraError> {
    check_plane(p, q)?;
    check_proper(p, q)?;
    if p.is_constant() || q.is_constant() {
        return Ok(0);
    }
    let (_, r) = sheared_resultant(p, q, 0)?;
    Ok(r.total_degree())
}

/// Local multiplicity at `point` through the resultant of a sheared pair; an independent
/// cross-check of [`intersection_number`].
pub fn intersection_number_by_resultant(p: &Polynomial, q: &Polynomial, point: &[GaussRational]) -> Result<u32, AlgebraError> {
    check_plane(p, q)?;
    check_proper(p, q)?;
    let pp = p.translate(point);
    let qq = q.translate(point);
    if p.is_constant() || q.is_constant() {
        return Ok(0);
    }
    let mut best = u32::MAX;
    for skip in 0..5 {
        let (_, r) = sheared_resultant(&pp, &qq, skip)?;
        let c = univariate_coeffs(&r, 0).ok_or_else(|| AlgebraError::Invalid("resultant not univariate".into()))?;
        let ord = univariate_order_at(&c, &GaussRational::zero()).unwrap_or(0);
        best = best.min(ord);
    }
    Ok(best)
}

/// All affine intersection points with their multiplicities. Every point must be rational.
pub fn intersection_points(p: &Polynomial, q: &Polynomial) -> Result<Vec<(Vec<GaussRational>, u32)>, AlgebraError> {
    check_plane(p, q)?;
    check_proper(p, q)?;
    if p.is_constant() || q.is_constant() {
        return Ok(Vec::new());
    }
    let (t, r) = sheared_resultant(p, q, 0)?;
    let (ps, qs) = (shear(p, &t), shear(q, &t));
    let rc = univariate_coeffs(&r, 0).ok_or_else(|| AlgebraError::Invalid("resultant not univariate".into()))?;
    let roots = rational_roots(&rc);
    let total: u32 = roots.iter().map(|(_, m)| *m).sum();
    if total != r.total_degree() {
        return Err(AlgebraError::UnsupportedExactCase("intersection points are not all rational".into()));
    }
    let mut out = Vec::new();
    for (a, ord) in roots {
        let pa = ps.substitute_value(0, &a);
        let qa = qs.substitute_value(0, &a);
        let g = gcd(&pa, &qa);
        let gc = univariate_coeffs(&g, 1).ok_or_else(|| AlgebraError::Invalid("fiber gcd not univariate".into()))?;
        let mut found = 0;
        for (b, _) in rational_roots(&gc) {
            let pt = vec![&a + &(&t * &b), b.clone()];
            let m = intersection_number(p, q, &pt)?;
            found += m;
            out.push((pt, m));
        }
        if found != ord {
            return Err(AlgebraError::UnsupportedExactCase("intersection points are not all rational".into()));
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_holomorphic;

    fn p(s: &str) -> Polynomial {
        parse_holomorphic(s, 2).unwrap()
    }

    fn origin() -> Vec<GaussRational> {
        vec![GaussRational::zero(), GaussRational::zero()]
    }

    #[test]
    fn classic_multiplicities() {
        assert_eq!(intersection_number(&p("x1"), &p("x2"), &origin()).unwrap(), 1);
        assert_eq!(intersection_number(&p("x2 - x1^2"), &p("x2"), &origin()).unwrap(), 2);
        assert_eq!(intersection_number(&p("x1^2"), &p("x2^3"), &origin()).unwrap(), 6);
        // Cusp against its tangent line.
        assert_eq!(intersection_number(&p("x2^2 - x1^3"), &p("x2"), &origin()).unwrap(), 3);
        assert_eq!(intersection_number(&p("x1 - 1"), &p("x2"), &origin()).unwrap(), 0);
    }

    #[test]
    fn common_factor_is_rejected() {
        let e = intersection_number(&p("x1*x2"), &p("x1*(x2 - 1)"), &origin());
        assert!(matches!(e, Err(AlgebraError::NonProperIntersection(_))));
    }

    #[test]
    fn resultant_route_agrees() {
        for (a, b) in [("x2^2 - x1^3", "x2 - x1^2"), ("x1^2 - x2^2", "x1^3 + x2^5"), ("x1*x2", "x1 + x2")] {
            let (a, b) = (p(a), p(b));
            assert_eq!(intersection_number(&a, &b, &origin()).unwrap(), intersection_number_by_resultant(&a, &b, &origin()).unwrap());
        }
    }

    #[test]
    fn points_of_line_arrangements() {
        let pts = intersection_points(&p("x1*(x1 - 1)"), &p("x2*(x1 + x2 - 2)")).unwrap();
        let total: u32 = pts.iter().map(|(_, m)| m).sum();
        assert_eq!(total, 4);
        assert_eq!(total, total_intersection(&p("x1*(x1 - 1)"), &p("x2*(x1 + x2 - 2)")).unwrap());
    }
}
