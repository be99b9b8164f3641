use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;
use segre_bundle::fiber::FiberQuadrature;
use segre_bundle::pullback::pullback_check;
use segre_bundle::segre::{segre_current, SegreEngine, SegreOptions};
use segre_bundle::{BundleSpec, SingularMetric};
use segre_core::gauss::rat;
use segre_core::parse::{parse_holomorphic, parse_real_analytic};
use segre_core::{GaussRational, Polynomial, QasDescriptor};
use segre_grid::GridChart;

fn hol(s: &str, n: usize) -> Polynomial {
    parse_holomorphic(s, n).unwrap()
}

/// `h = I + A*A` for a 2×2 matrix of affine functions, a smooth positive metric.
fn perturbed_identity(c: &[i64]) -> SingularMetric {
    let lin = |k: usize| hol(&format!("({})/2*x1 + ({})/2*x2 + ({})/2", c[3 * k], c[3 * k + 1], c[3 * k + 2]), 2);
    SingularMetric::MorphismInduced { g: vec![vec![hol("1", 2), hol("0", 2)], vec![hol("0", 2), hol("1", 2)], vec![lin(0), lin(1)], vec![lin(2), lin(3)]], target: None }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn first_segre_form_is_ddc_log_det(c in prop::collection::vec(-2i64..=2, 12), eps in prop::sample::select(vec![1.0, 0.25])) {
        let spec = BundleSpec::new(GridChart::centered(2, 1.0, 10).unwrap(), 2, None).unwrap();
        let engine = SegreEngine::new(&spec, &perturbed_identity(&c), 1, FiberQuadrature::Exact).unwrap();
        let s1 = &engine.fields(&spec.chart, eps).unwrap()[1];
        let reference = engine.log_det_ddc(&spec.chart, eps).unwrap();
        prop_assert!(s1.relative_l1(&reference, 2).unwrap() < 0.03);
    }
}

#[test]
fn monte_carlo_fibers_agree_with_quadrature() {
    let spec = BundleSpec::new(GridChart::centered(2, 1.0, 10).unwrap(), 2, None).unwrap();
    let m = perturbed_identity(&[1, 0, 1, -1, 2, 0, 0, 1, -2, 1, 1, 0]);
    let exact = SegreEngine::new(&spec, &m, 2, FiberQuadrature::Exact).unwrap().fields(&spec.chart, 0.5).unwrap();
    let mc = SegreEngine::new(&spec, &m, 2, FiberQuadrature::MonteCarlo { samples: 4096, seed: 7 }).unwrap().fields(&spec.chart, 0.5).unwrap();
    for k in 1..=2 {
        assert!(mc[k].relative_l1(&exact[k], 2).unwrap() < 0.05, "degree {k}");
    }
}

#[test]
fn line_bundle_lelong_numbers_are_vanishing_orders() {
    let spec = BundleSpec::new(GridChart::centered(1, 1.0, 96).unwrap(), 1, None).unwrap();
    let origin = vec![Complex64::new(0.0, 0.0)];
    for k in 1..=3 {
        let m = SingularMetric::MorphismInduced { g: vec![vec![hol(&format!("x1^{k}"), 1)]], target: None };
        let mut o = SegreOptions::new(vec![1]);
        o.lelong_points = vec![origin.clone()];
        let r = segre_current(&spec, &m, &o).unwrap();
        let nu = r.lelong_at(1, &origin).unwrap().value;
        assert!((nu - k as f64).abs() < 0.2, "x1^{k}: {nu} at ε = {}", r.final_eps());
        assert!(r.converged(1));
    }
}

#[test]
fn identically_singular_weight_falls_back_to_the_reference() {
    // e^{φ} with φ = log|x2|² vanishes identically on {x2 = 0}.
    let n = 2;
    let weight = QasDescriptor::new(n, rat(1, 1), vec![hol("x2", n)], parse_real_analytic("0", n).unwrap()).unwrap();
    let one = QasDescriptor::new(n, rat(1, 1), vec![hol("1", n)], parse_real_analytic("0", n).unwrap()).unwrap();
    let m = SingularMetric::DiagonalQas(vec![weight, one]);
    let spec = BundleSpec::new(GridChart::centered(2, 1.0, 8).unwrap(), 2, None).unwrap();
    let curve = vec![hol("x1", 1), hol("0", 1)];
    let r = pullback_check(&spec, &m, &curve, &GaussRational::from_int(0), 1.0, 64, &SegreOptions::new(vec![1])).unwrap();
    assert!(r.omega_branch);
    assert_eq!(r.predicted, BigRational::from_integer(0.into()));
    assert!(r.lelong.abs() < 0.05, "{}", r.lelong);
}
