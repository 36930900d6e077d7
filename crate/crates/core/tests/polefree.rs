use ratfit::domain::{BoxDomain, SampleSet};
use ratfit::globalmin::{minimize_denominator, MultistartOptions};
use ratfit::linfit::fit_rational_onb;
use ratfit::metrics::{Evaluated, TestSet};
use ratfit::multiindex::MultiIndexOrder;
use ratfit::sampling::{dlhd, lhs, uniform_face_points, uniform_points, DesignSpec};
use ratfit::sipfit::{fit_rational_polefree, SipConfig};
use ratfit::testfns::TestFunction;

fn dlhd_samples(id: &str, m: usize, d: usize, seed: u64) -> SampleSet {
    let f = TestFunction::by_id(id).unwrap();
    let (points, _) = dlhd(&f.domain(), m, d, seed).unwrap();
    SampleSet::from_fn(f.domain(), points, |x| f.eval(x)).unwrap()
}

#[test]
fn breit_wigner_converges_quickly_without_poles() {
    let f = TestFunction::by_id("f17").unwrap();
    let s = dlhd_samples("f17", 4, 4, 1);
    let (model, report) = fit_rational_polefree(&s, 4, 4, &SipConfig::default()).unwrap();
    assert_eq!(report.converged, Some(true));
    let iterations = report.sip_iterations.unwrap();
    assert!((1..=30).contains(&iterations), "{iterations} iterations");
    assert_eq!(model.basis().kind(), "monomial");

    let tests = TestSet::generate(&f.domain(), |x| f.eval(x), 0, 100_000, 3);
    assert_eq!(Evaluated::new(&model, &tests).pole_metrics(1e2).unwrap().count(), 0);

    // fresh scan of faces and interior
    let domain = f.domain();
    let scan = uniform_face_points(&domain, 40_000, 11)
        .into_iter()
        .chain(uniform_points(&domain, 60_000, 12));
    let qmin = scan.map(|x| model.denominator(&x)).fold(f64::INFINITY, f64::min);
    assert!(qmin >= 1.0 - 1e-3, "min q = {qmin}");
}

#[test]
fn feasible_exact_class_stops_after_one_check() {
    // f12 has denominator x^3 + y^3 + 4, smallest at (-1, -1); with that
    // corner among the data the constraint there scales q to >= 1 everywhere
    let f = TestFunction::by_id("f12").unwrap();
    let domain = f.domain();
    let mut points = lhs(&DesignSpec {
        domain: domain.clone(),
        count: 30,
        seed: 4,
    })
    .unwrap();
    points.push(vec![-1.0, -1.0]);
    let s = SampleSet::from_fn(domain.clone(), points, |x| f.eval(x)).unwrap();
    let (model, report) = fit_rational_polefree(&s, 2, 3, &SipConfig::default()).unwrap();
    assert_eq!(report.sip_iterations, Some(1));
    assert_eq!(report.added_points.as_deref(), Some(&[][..]));
    assert!((model.denominator(&[-1.0, -1.0]) - 1.0).abs() < 1e-8);
    for x in uniform_points(&domain, 500, 2) {
        assert!((model.eval(&x) - f.eval(&x)).abs() < 1e-9);
    }
}

#[test]
fn noisy_poly_denominator_data_stays_pole_free() {
    let f = TestFunction::by_id("f18").unwrap();
    let domain = f.domain();
    let (points, _) = dlhd(&domain, 3, 3, 2).unwrap();
    let clean: Vec<f64> = points.iter().map(|x| f.eval(x)).collect();
    let values = ratfit::sampling::add_noise(&clean, 1e-2, 2);
    let s = SampleSet::new(domain.clone(), points, values).unwrap();
    let (model, report) = fit_rational_polefree(&s, 3, 3, &SipConfig { seed: 2, ..SipConfig::default() }).unwrap();
    assert_eq!(report.converged, Some(true));
    let tests = TestSet::generate(&domain, |x| f.eval(x), 10_000, 20_000, 5);
    assert_eq!(Evaluated::new(&model, &tests).pole_metrics(1e2).unwrap().count(), 0);
}

#[test]
fn constraint_points_hold_after_every_fit() {
    for (id, seed) in [("f4", 1), ("f21", 2), ("f1", 3)] {
        let s = dlhd_samples(id, 3, 3, seed);
        let (model, report) = fit_rational_polefree(&s, 3, 3, &SipConfig::default()).unwrap();
        for x in s.points().iter().chain(report.added_points.as_ref().unwrap()) {
            assert!(model.denominator(x) >= 1.0 - 1e-9, "{id}: q = {}", model.denominator(x));
        }
        let qmin = report.denominator_min.unwrap();
        assert!(qmin >= 1.0 - 1e-6, "{id}: final check {qmin}");
    }
}

#[test]
fn onb_and_polefree_agree_on_exact_class_data() {
    for (id, m, d) in [("f8", 2, 2), ("f13", 3, 2), ("f7", 3, 3)] {
        let s = dlhd_samples(id, m, d, 6);
        let (onb, _) = fit_rational_onb(&s, m, d).unwrap();
        // any rescaling of the exact (p, q) is the same function
        let (sip, _) = fit_rational_polefree(&s, m, d, &SipConfig::default()).unwrap();
        let f = TestFunction::by_id(id).unwrap();
        for x in uniform_points(&f.domain(), 100, 8) {
            let (a, b) = (onb.eval(&x), sip.eval(&x));
            assert!((a - b).abs() <= 1e-6 * a.abs().max(1e-300), "{id}: {a} vs {b}");
        }
    }
}

#[test]
fn random_cubic_matches_grid_scan() {
    let order = MultiIndexOrder::generate(2, 3).unwrap();
    let domain = BoxDomain::cube(2, -1.0, 1.0).unwrap();
    let coeffs = [0.3, -0.7, 0.2, 1.1, -0.4, 0.9, -0.6, 0.5, 0.8, -1.2];
    let options = MultistartOptions {
        budget: 1000,
        local_tol: 1e-10,
        seed: 3,
        stop_below: None,
    };
    let found = minimize_denominator(&coeffs, &order, &domain, &options).unwrap();
    let q = |x: &[f64]| -> f64 { order.eval_monomials(x).iter().zip(&coeffs).map(|(m, c)| m * c).sum() };
    let h = 2.0 / 499.0;
    let mut grid = f64::INFINITY;
    for i in 0..500 {
        for j in 0..500 {
            grid = grid.min(q(&[-1.0 + h * i as f64, -1.0 + h * j as f64]));
        }
    }
    // the grid can only overestimate the minimum
    assert!(found.value <= grid + 1e-6, "{} vs grid {grid}", found.value);
    assert!(found.value >= grid - 1e-4);
    assert!((q(&found.x) - found.value).abs() < 1e-12);
}
