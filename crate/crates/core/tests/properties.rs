use gevrey_evp::coefficients::{bound_constants, CoefficientModel, Field, ModelKind};
use gevrey_evp::eigensolver::smallest_eigenpair;
use gevrey_evp::fem::{assemble, build_mesh};
use gevrey_evp::harness::{parse_config, serialize_config, RawSection, RunConfig};
use gevrey_evp::linalg::dot;
use gevrey_evp::qmc::lattice::lattice_point;
use gevrey_evp::qmc::{pod_weight, qmc_estimate, BoxedError, LatticeRule, PodWeights};
use gevrey_evp::quad1d::gauss_legendre;
use proptest::prelude::*;

const MODELS: [&str; 4] = ["gl-analytic", "gl-gevrey3", "qmc-analytic", "qmc-gevrey2"];

fn parameters(model: &CoefficientModel, unit: &[f64]) -> Vec<f64> {
    let (lo, hi) = model.parameter_box();
    unit.iter().take(model.parameter_dim()).map(|t| lo + (hi - lo) * t).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fields_stay_in_certified_ranges(
        which in 0usize..4,
        x1 in 0.0f64..=1.0,
        x2 in 0.0f64..=1.0,
        unit in prop::collection::vec(0.0f64..=1.0, 100),
    ) {
        let model = CoefficientModel::by_name(MODELS[which]).unwrap();
        let y = parameters(&model, &unit);
        let r = model.ranges();
        let a = model.eval(Field::A, [x1, x2], &y).unwrap();
        let b = model.eval(Field::B, [x1, x2], &y).unwrap();
        let c = model.eval(Field::C, [x1, x2], &y).unwrap();
        prop_assert!(r.a_lo <= a && a <= r.a_hi, "a = {a}");
        prop_assert!(r.b_lo <= b && b <= r.b_hi, "b = {b}");
        prop_assert!(r.c_lo <= c && c <= r.c_hi, "c = {c}");
    }

    #[test]
    fn contrast_constants_agree(a in 0.5f64..5.0, b in 0.0f64..3.0, c in 1.0f64..4.0, mu in 0.05f64..0.95) {
        let model = CoefficientModel::constant(a, b, c).unwrap();
        let k = bound_constants(&model, mu).unwrap();
        let cb = k.bounds;
        let lhs = k.u1_bar * k.u1_bar * cb.c_bar / 2.0;
        prop_assert!((lhs - k.k_a * k.k_c).abs() <= 1e-12 * lhs);
        let alt = k.lambda1_bar * cb.c_bar / (2.0 * cb.a_low);
        prop_assert!((alt - k.k_a * k.k_c).abs() <= 1e-12 * alt);
        prop_assert!(k.sigma > k.sigma1 && k.rho > k.rho1);
    }

    #[test]
    fn forms_are_symmetric_and_positive(
        which in 0usize..4,
        m in 3usize..9,
        unit in prop::collection::vec(0.0f64..=1.0, 100),
        v in prop::collection::vec(-1.0f64..1.0, 64),
    ) {
        let model = CoefficientModel::by_name(MODELS[which]).unwrap();
        let y = parameters(&model, &unit);
        let sys = assemble(&build_mesh(m).unwrap(), &model, &y).unwrap();
        prop_assert!(sys.a.is_symmetric() && sys.m.is_symmetric());
        let v = &v[..sys.n_dof];
        prop_assume!(dot(v, v) > 1e-6);
        prop_assert!(sys.a.quad_form(v) > 0.0);
        prop_assert!(sys.m.quad_form(v) > 0.0);
    }

    #[test]
    fn eigenpair_is_normalized_and_consistent(which in 0usize..4, unit in prop::collection::vec(0.0f64..=1.0, 100)) {
        let model = CoefficientModel::by_name(MODELS[which]).unwrap();
        let y = parameters(&model, &unit);
        let sys = assemble(&build_mesh(8).unwrap(), &model, &y).unwrap();
        let pair = smallest_eigenpair(&sys, 1e-10, 500).unwrap();
        prop_assert!((sys.m.quad_form(&pair.u) - 1.0).abs() < 1e-10);
        let rayleigh = sys.a.quad_form(&pair.u);
        prop_assert!((rayleigh - pair.lambda).abs() <= 1e-8 * pair.lambda);
        prop_assert!(pair.lambda > 0.0);
    }

    #[test]
    fn gauss_legendre_is_exact_to_degree(n in 1usize..24, coeffs in prop::collection::vec(-1.0f64..1.0, 48)) {
        let rule = gauss_legendre(n).unwrap();
        let degree = 2 * n - 1;
        let p = |x: f64| coeffs[..=degree].iter().rev().fold(0.0, |acc, &c| acc * x + c);
        // odd powers vanish, x^k integrates to 2 / (k + 1) for even k
        let exact: f64 = coeffs[..=degree].iter().enumerate().filter(|(k, _)| k % 2 == 0).map(|(k, c)| c * 2.0 / (k as f64 + 1.0)).sum();
        prop_assert!((rule.integrate(p) - exact).abs() < 1e-12);
        for (x, y) in rule.nodes.iter().zip(rule.nodes.iter().rev()) {
            prop_assert!((x + y).abs() < 1e-14);
        }
    }

    #[test]
    fn pod_weights_reduce_to_product_form(beta in prop::collection::vec(0.01f64..1.0, 1..8), mask in 1u32..256) {
        let w = PodWeights::new(1.0, 1.0, beta.clone()).unwrap();
        let u: Vec<usize> = (1..=beta.len()).filter(|j| mask & (1 << (j - 1)) != 0).collect();
        prop_assume!(!u.is_empty());
        let factorial: f64 = (1..=u.len()).map(|k| k as f64).product();
        let expected = factorial * u.iter().map(|&j| beta[j - 1] * 6f64.sqrt()).product::<f64>();
        prop_assert!((pod_weight(&w, &u) - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn shifted_points_stay_centred(
        n in 2u64..512,
        z in prop::collection::vec(1u64..512, 1..6),
        shift in prop::collection::vec(0.0f64..1.0, 6),
        i in 1u64..512,
    ) {
        let s = z.len();
        let p = lattice_point(n, &z, Some(&shift[..s]), i);
        let q = lattice_point(n, &z, None, i);
        for j in 0..s {
            prop_assert!((-0.5..0.5).contains(&p[j]));
            let d = (p[j] - q[j] - shift[j]).rem_euclid(1.0);
            prop_assert!(!(1e-12..=1.0 - 1e-12).contains(&d));
        }
    }

    #[test]
    fn qmc_integrates_constants(c in -10.0f64..10.0, seed in any::<u64>()) {
        let rule = LatticeRule::with_random_shifts(64, vec![1, 19, 27], 4, seed).unwrap();
        let est = qmc_estimate(|_y: &[f64]| Ok::<f64, BoxedError>(c), &rule).unwrap();
        prop_assert!((est.mean - c).abs() <= 1e-14 * c.abs());
    }

    #[test]
    fn gl_config_round_trips(m in 2usize..200, n_min in 1usize..10, span in 0usize..20, extra in 1usize..40, tol_exp in 4i32..14) {
        let n_max = n_min + span;
        let mut sec = RawSection::new("gl-study");
        sec.set("m", &m.to_string());
        sec.set("n_min", &n_min.to_string());
        sec.set("n_max", &n_max.to_string());
        sec.set("n_star", &(n_max + extra).to_string());
        sec.set("tol", &format!("1e-{tol_exp}"));
        sec.set("out", "gl.csv");
        let run = RunConfig::from_section(&sec).unwrap();
        let text = serialize_config(std::slice::from_ref(&run));
        prop_assert_eq!(parse_config(&text).unwrap(), vec![run]);
    }
}

#[test]
fn custom_series_fields_match_definition() {
    let model = CoefficientModel::new(ModelKind::Custom(
        gevrey_evp::coefficients::SineSeries::parse("0, 2\n1, 0.5\n2, 0.25\n").unwrap(),
    ))
    .unwrap();
    let x = [0.3, 0.7];
    let y = [0.4, -0.2];
    let s = |k: f64| (k * std::f64::consts::PI * x[0]).sin() * (k * std::f64::consts::PI * x[1]).sin();
    let expected = 2.0 + 0.5 * s(1.0) * y[0] + 0.25 * s(2.0) * y[1];
    let a = model.eval(Field::A, x, &y).unwrap();
    assert!((a - expected).abs() < 1e-14);
}

#[test]
#[ignore = "Gauss-Legendre errors are not monotone in n; sign changes produce local dips"]
fn gl_error_decreases_after_three_points() {
    let model = CoefficientModel::by_name("gl-analytic").unwrap();
    let n_list: Vec<usize> = (2..=16).collect();
    let errors = gevrey_evp::quad1d::gl_study(&model, 16, &n_list, 40).unwrap();
    for w in errors[3..].windows(2) {
        assert!(w[1].1 < w[0].1, "n = {}: {} then {}", w[1].0, w[0].1, w[1].1);
    }
}
