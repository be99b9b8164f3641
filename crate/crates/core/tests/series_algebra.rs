use num_rational::BigRational;
use proptest::prelude::*;
use segre_core::gauss::rat;
use segre_core::parse::parse_holomorphic;
use segre_core::series::{add, chern_z, invert, mul, one_series, whitney_smooth_product};
use segre_core::{CycleAlgebra, GaussRational, GradedSeries, QuasiCycle};

fn line(a: i64, b: i64, c: i64) -> QuasiCycle {
    let p = parse_holomorphic(&format!("({a})*x1 + ({b})*x2 + ({c})"), 2).unwrap();
    QuasiCycle::divisor(p, BigRational::from_integer(1.into())).unwrap()
}

fn arb_line() -> impl Strategy<Value = (i64, i64, i64)> {
    (-3i64..=3, -3i64..=3, -2i64..=2).prop_filter("non-constant", |(a, b, _)| *a != 0 || *b != 0)
}

fn arb_mult() -> impl Strategy<Value = BigRational> {
    (-4i64..=4, 1i64..=3).prop_map(|(p, q)| rat(p, q))
}

fn arb_point() -> impl Strategy<Value = Vec<GaussRational>> {
    (-3i64..=3, 1i64..=2, -3i64..=3).prop_map(|(a, q, b)| vec![GaussRational::from_rational(rat(a, q)), GaussRational::from_int(b)])
}

/// `1 + Σ m_i[L_i] + Σ w_j[p_j]`, truncated at degree 2.
fn arb_series() -> impl Strategy<Value = GradedSeries<QuasiCycle>> {
    (prop::collection::vec((arb_line(), arb_mult()), 0..3), prop::collection::vec((arb_point(), arb_mult()), 0..3)).prop_map(|(lines, points)| {
        let mut d1 = QuasiCycle::zero(2);
        for ((a, b, c), m) in lines {
            d1 = d1.add(&line(a, b, c).scale(&m)).unwrap();
        }
        let mut d2 = QuasiCycle::zero(2);
        for (x, w) in points {
            d2 = d2.add(&QuasiCycle::point(x, w).unwrap()).unwrap();
        }
        GradedSeries::new(vec![QuasiCycle::one(2), d1, d2])
    })
}

fn assert_same(a: &GradedSeries<QuasiCycle>, b: &GradedSeries<QuasiCycle>) {
    assert_eq!(a.truncation(), b.truncation());
    for (k, (x, y)) in a.coeffs.iter().zip(&b.coeffs).enumerate() {
        assert!(x.sub(y).unwrap().is_zero(), "degree {k}: {x:?} vs {y:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inverse_is_two_sided(s in arb_series()) {
        let ring = CycleAlgebra::new(2);
        let c = invert(&ring, &s).unwrap();
        assert_same(&mul(&ring, &s, &c).unwrap(), &one_series(&ring, 2));
        assert_same(&mul(&ring, &c, &s).unwrap(), &one_series(&ring, 2));
        assert_same(&invert(&ring, &c).unwrap(), &s);
    }

    #[test]
    fn product_is_commutative_and_inverts_factorwise(a in arb_series(), b in arb_series()) {
        let ring = CycleAlgebra::new(2);
        let ab = mul(&ring, &a, &b).unwrap();
        assert_same(&ab, &mul(&ring, &b, &a).unwrap());
        let lhs = invert(&ring, &ab).unwrap();
        let rhs = mul(&ring, &invert(&ring, &a).unwrap(), &invert(&ring, &b).unwrap()).unwrap();
        assert_same(&lhs, &rhs);
    }

    #[test]
    fn empty_z_part_gives_the_plain_inverse(s in arb_series()) {
        let ring = CycleAlgebra::new(2);
        let zero = GradedSeries::new(vec![QuasiCycle::zero(2); 3]);
        let c = chern_z(&ring, &s, &one_series(&ring, 2), &zero, true).unwrap();
        assert_same(&c, &invert(&ring, &s).unwrap());
    }

    #[test]
    fn whole_series_on_z_gives_the_reference(s in arb_series()) {
        // With M = s − 1 the restricted series is 1 and c(E, Z) = c₀(1 − M) with c₀ = 1.
        let ring = CycleAlgebra::new(2);
        let mut m = s.clone();
        m.coeffs[0] = QuasiCycle::zero(2);
        let c = chern_z(&ring, &s, &one_series(&ring, 2), &m, true).unwrap();
        let mut expected = m.clone();
        for k in 1..=2 {
            expected.coeffs[k] = m.coeffs[k].neg();
        }
        expected.coeffs[0] = QuasiCycle::one(2);
        assert_same(&c, &expected);
    }
}

#[test]
fn whitney_product_with_a_trivial_line_is_the_identity() {
    let ring = CycleAlgebra::new(2);
    let s = GradedSeries::new(vec![QuasiCycle::one(2), line(1, 0, 0).add(&line(0, 1, 0)).unwrap(), QuasiCycle::zero(2)]);
    assert_same(&whitney_smooth_product(&ring, &one_series(&ring, 2), &s).unwrap(), &s);
}

#[test]
fn crossing_lines_have_a_unit_point_in_the_square() {
    let ring = CycleAlgebra::new(2);
    let s = GradedSeries::new(vec![QuasiCycle::one(2), line(1, 0, 0).add(&line(0, 1, 0)).unwrap(), QuasiCycle::zero(2)]);
    let sq = mul(&ring, &s, &s).unwrap();
    let origin = [GaussRational::from_int(0), GaussRational::from_int(0)];
    assert_eq!(sq.coeffs[2].mult_at(&origin).unwrap()[2], BigRational::from_integer(2.into()));
    let sum = add(&ring, &s, &s).unwrap();
    assert_eq!(sum.coeffs[1].mult_at(&origin).unwrap()[1], BigRational::from_integer(4.into()));
}
