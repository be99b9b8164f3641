use num_complex::Complex64;
use proptest::prelude::*;
use segre_grid::{ddc, regularize_chi, wedge, GridChart, ScalarExpr, ScalarField};

fn chart(d: usize, res: usize) -> GridChart {
    GridChart::centered(d, 1.0, res).unwrap()
}

#[test]
fn euclidean_potential_has_disc_area_mass() {
    let c = chart(1, 96);
    let t = ddc(&ScalarField::sample_with(&c, |z| z[0].norm_sqr(), None).unwrap()).unwrap();
    for r in [0.3, 0.5, 0.7] {
        let m = t.ball_mass(&[Complex64::new(0.0, 0.0)], r);
        assert!((m - r * r).abs() < 0.03 * r * r, "r = {r}: {m}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pluriharmonic_parts_are_invisible(alpha in 0.1f64..3.0, cr in -2.0f64..2.0, ci in -2.0f64..2.0) {
        let c = chart(1, 48);
        let k = Complex64::new(cr, ci);
        let with = ddc(&ScalarField::sample_with(&c, |z| alpha * z[0].norm_sqr() + (k * z[0] * z[0]).re, None).unwrap()).unwrap();
        let without = ddc(&ScalarField::sample_with(&c, |z| alpha * z[0].norm_sqr(), None).unwrap()).unwrap();
        prop_assert!(with.relative_l1(&without, 2).unwrap() < 1e-9);
    }

    #[test]
    fn ddc_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let c = chart(2, 12);
        let f = ScalarField::sample_with(&c, |z| (1.0 + z[0].norm_sqr()).ln() + z[1].norm_sqr(), None).unwrap();
        let g = ScalarField::sample_with(&c, |z| (z[0] * z[1].conj()).re + z[1].norm_sqr().powi(2), None).unwrap();
        let fg = ScalarField::sample_with(&c, |z| {
            a * ((1.0 + z[0].norm_sqr()).ln() + z[1].norm_sqr()) + b * ((z[0] * z[1].conj()).re + z[1].norm_sqr().powi(2))
        }, None).unwrap();
        let lhs = ddc(&fg).unwrap();
        let rhs = ddc(&f).unwrap().linear_combination(a, &ddc(&g).unwrap(), b).unwrap();
        let scale = lhs.total_mass().abs().max(1.0);
        prop_assert!((lhs.total_mass() - rhs.total_mass()).abs() < 1e-9 * scale);
    }

    #[test]
    fn wedge_of_one_one_forms_commutes(s in 0.1f64..2.0) {
        let c = chart(2, 10);
        let a = ddc(&ScalarField::sample_with(&c, |z| (s + z[0].norm_sqr() + z[1].norm_sqr()).ln(), None).unwrap()).unwrap();
        let b = ddc(&ScalarField::sample_with(&c, |z| z[0].norm_sqr() + 2.0 * z[1].norm_sqr(), None).unwrap()).unwrap();
        let ab = wedge(&a, &b).unwrap();
        let ba = wedge(&b, &a).unwrap();
        prop_assert!(ab.relative_l1(&ba, 2).unwrap() < 1e-12);
    }

    #[test]
    fn chi_regularization_decreases_with_eps(cexp in 0.5f64..3.0, e in 0.01f64..1.0) {
        let c = chart(1, 16);
        let psi = ScalarExpr::func(move |z| cexp * z[0].norm_sqr().ln());
        let zero = ScalarExpr::Const(0.0);
        let coarse = regularize_chi(&psi, &zero, e, &c).unwrap();
        let fine = regularize_chi(&psi, &zero, e / 4.0, &c).unwrap();
        prop_assert!(fine.values.iter().zip(&coarse.values).all(|(f, g)| f <= g));
    }

    #[test]
    fn log_distance_has_unit_mass(ax in -0.2f64..0.2, ay in -0.2f64..0.2) {
        let c = chart(1, 96);
        let a = Complex64::new(ax, ay);
        let t = ddc(&ScalarField::sample_with(&c, |z| (z[0] - a).norm_sqr().ln(), None).unwrap()).unwrap();
        prop_assert!((t.ball_mass(&[a], 0.5) - 1.0).abs() < 0.02);
    }
}
