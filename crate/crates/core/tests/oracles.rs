use num_rational::BigRational;
use proptest::prelude::*;
use segre_core::intersection::{intersection_number, intersection_number_by_resultant, intersection_points, total_intersection};
use segre_core::oracles::{monomial_lelong, poincare_lelong, vanishing_order};
use segre_core::parse::parse_holomorphic;
use segre_core::{GaussRational, Polynomial};

fn arb_line() -> impl Strategy<Value = Polynomial> {
    (-3i64..=3, -3i64..=3, -2i64..=2)
        .prop_filter("non-constant", |(a, b, _)| *a != 0 || *b != 0)
        .prop_map(|(a, b, c)| parse_holomorphic(&format!("({a})*x1 + ({b})*x2 + ({c})"), 2).unwrap())
}

fn arb_product() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(arb_line(), 1..4).prop_map(|ls| ls.into_iter().reduce(|a, b| &a * &b).unwrap())
}

fn origin() -> [GaussRational; 2] {
    [GaussRational::from_int(0), GaussRational::from_int(0)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn local_multiplicities_sum_to_the_total(p in arb_product(), q in arb_product()) {
        prop_assume!(segre_core::algebra::gcd(&p, &q).is_constant());
        let pts = intersection_points(&p, &q).unwrap();
        let sum: u32 = pts.iter().map(|(_, m)| m).sum();
        prop_assert_eq!(sum, total_intersection(&p, &q).unwrap());
        for (x, m) in &pts {
            prop_assert_eq!(intersection_number(&p, &q, x).unwrap(), *m);
            prop_assert_eq!(intersection_number_by_resultant(&p, &q, x).unwrap(), *m);
        }
    }

    #[test]
    fn poincare_lelong_multiplicity_is_the_vanishing_order(p in arb_product(), a in -2i64..=2, b in -2i64..=2) {
        let x = [GaussRational::from_int(a), GaussRational::from_int(b)];
        let ord = vanishing_order(&p, &x).unwrap();
        prop_assert_eq!(poincare_lelong(&p).unwrap().mult_at(&x).unwrap()[1].clone(), BigRational::from_integer(ord.into()));
    }
}

#[test]
fn coordinate_axes_meet_once() {
    let (x, y) = (parse_holomorphic("x1", 2).unwrap(), parse_holomorphic("x2", 2).unwrap());
    assert_eq!(intersection_number(&x, &y, &origin()).unwrap(), 1);
    let (x2, y3) = (parse_holomorphic("x1^2", 2).unwrap(), parse_holomorphic("x2^3", 2).unwrap());
    assert_eq!(intersection_number(&x2, &y3, &origin()).unwrap(), 6);
    let cusp = parse_holomorphic("x1^2 - x2^3", 2).unwrap();
    assert_eq!(intersection_number(&cusp, &y, &origin()).unwrap(), 2);
    assert_eq!(vanishing_order(&cusp, &origin()).unwrap(), 2);
}

#[test]
fn monomial_lelong_is_the_minimal_degree() {
    let one = BigRational::from_integer(1.into());
    assert_eq!(monomial_lelong(&one, &[vec![2, 0], vec![1, 3]]).unwrap(), BigRational::from_integer(2.into()));
    assert_eq!(monomial_lelong(&BigRational::new(1.into(), 2.into()), &[vec![2, 2]]).unwrap(), BigRational::from_integer(2.into()));
}
