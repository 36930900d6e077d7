use proptest::prelude::*;

use ratfit::domain::{BoxDomain, SampleSet};
use ratfit::linfit::{fit_polynomial, fit_rational_onb};
use ratfit::multiindex::{alpha, MultiIndexOrder};
use ratfit::orthobasis::OrthonormalBasis;
use ratfit::sampling::uniform_points;

fn monomial_eval(order: &MultiIndexOrder, c: &[f64], x: &[f64]) -> f64 {
    order.eval_monomials(x).iter().zip(c).map(|(m, c)| m * c).sum()
}

/// Rational function with a denominator bounded below by 1 on `[-1, 1]^n`.
fn rational(n: usize, m: usize, d: usize, raw: &[f64]) -> impl Fn(&[f64]) -> f64 {
    let pm = MultiIndexOrder::generate(n, m).unwrap();
    let pd = MultiIndexOrder::generate(n, d).unwrap();
    let a: Vec<f64> = raw.iter().cycle().take(pm.len()).copied().collect();
    let mut b: Vec<f64> = raw.iter().rev().cycle().take(pd.len()).map(|v| v / pd.len() as f64).collect();
    b[0] = 2.0;
    move |x: &[f64]| monomial_eval(&pm, &a, x) / monomial_eval(&pd, &b, x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_law_at_the_interpolation_count(
        n in 1usize..=2,
        m in 0usize..=4,
        d in 0usize..=4,
        raw in prop::collection::vec(-1.0f64..1.0, 8),
        seed in any::<u64>(),
    ) {
        let k = alpha(n, m).unwrap() + alpha(n, d).unwrap() - 1;
        let domain = BoxDomain::cube(n, -1.0, 1.0).unwrap();
        let s = SampleSet::from_fn(domain.clone(), uniform_points(&domain, k, seed), rational(n, m, d, &raw))
            .unwrap();
        let (_, report) = fit_rational_onb(&s, m, d).unwrap();
        let sv = &report.singular_values;
        // with one column the reference scale is |F V_0| = |f| / sqrt(K)
        let scale = if sv.len() == 1 {
            s.values().iter().map(|v| v * v).sum::<f64>().sqrt() / (k as f64).sqrt()
        } else {
            sv[0]
        };
        prop_assert!(sv[sv.len() - 1] <= 1e-10 * scale, "{:?}", sv);
    }

    #[test]
    fn orthonormal_columns_and_matching_recurrence(
        n in 1usize..=4,
        l in 0usize..=6,
        extra in 0usize..=20,
        lo in -2.0f64..1.0,
        width in 0.5f64..3.0,
        seed in any::<u64>(),
    ) {
        let a = alpha(n, l).unwrap();
        let domain = BoxDomain::cube(n, lo, lo + width).unwrap();
        let points = uniform_points(&domain, 2 * a + extra, seed);
        let (basis, v) = OrthonormalBasis::build(&points, l).unwrap();
        let gram = v.transpose() * &v;
        let mut worst: f64 = 0.0;
        for i in 0..a {
            for j in 0..a {
                worst = worst.max((gram[(i, j)] - f64::from(u8::from(i == j))).abs());
            }
        }
        prop_assert!(worst <= 1e-12, "orthonormality {}", worst);
        prop_assert!((basis.evaluate_matrix(&points) - &v).amax() <= 1e-10);
    }

    #[test]
    fn model_class_data_is_reproduced(
        m in 0usize..=3,
        d in 0usize..=3,
        raw in prop::collection::vec(-1.0f64..1.0, 8),
        seed in any::<u64>(),
    ) {
        let domain = BoxDomain::cube(2, -1.0, 1.0).unwrap();
        let f = rational(2, m, d, &raw);
        let k = 2 * (alpha(2, m).unwrap() + alpha(2, d).unwrap());
        let s = SampleSet::from_fn(domain.clone(), uniform_points(&domain, k, seed), &f).unwrap();
        let (model, _) = fit_rational_onb(&s, m, d).unwrap();
        for x in uniform_points(&domain, 50, seed ^ 1) {
            let (got, want) = (model.eval(&x), f(&x));
            prop_assert!((got - want).abs() <= 1e-8 * want.abs().max(1.0), "{} vs {}", got, want);
        }
    }

    #[test]
    fn polynomial_fit_is_affine_equivariant(
        degree in 0usize..=4,
        shift in -5.0f64..5.0,
        scale in 0.1f64..10.0,
        seed in any::<u64>(),
    ) {
        let domain = BoxDomain::cube(2, -1.0, 1.0).unwrap();
        let points = uniform_points(&domain, 40, seed);
        let s = SampleSet::from_fn(domain.clone(), points, |x| (x[0] - x[1]).sin()).unwrap();
        let t = s.with_values(s.values().iter().map(|v| scale * v + shift).collect()).unwrap();
        let (p, _) = fit_polynomial(&s, degree).unwrap();
        let (q, _) = fit_polynomial(&t, degree).unwrap();
        for x in uniform_points(&domain, 20, seed ^ 2) {
            let want = scale * p.eval(&x) + shift;
            prop_assert!((q.eval(&x) - want).abs() <= 1e-9 * (1.0 + want.abs()));
        }
    }
}
