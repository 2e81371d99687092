use lvyscale::exponent::{layered_psi_bound, JumpLaw, LevyExponent};
use lvyscale::sampler::{sample_increment, NoiseSpec};
use lvyscale::stats::ks_statistic;
use lvyscale::synth::{rescale, GridSpec, Operator, RescaleSpec, Synthesizer};
use lvyscale::verify::empirical_cf;
use proptest::prelude::*;

fn jump_law() -> impl Strategy<Value = JumpLaw> {
    prop_oneof![
        (0.01..10.0f64).prop_map(|variance| JumpLaw::Gaussian { variance }),
        (0.01..10.0f64).prop_map(|scale| JumpLaw::Cauchy { scale }),
        (0.05..=2.0f64, 0.01..10.0f64).prop_map(|(alpha, scale)| JumpLaw::Sas { alpha, scale }),
    ]
}

fn simple_exponent() -> impl Strategy<Value = LevyExponent> {
    prop_oneof![
        (0.01..10.0f64).prop_map(|v| LevyExponent::gaussian(v).unwrap()),
        (0.05..=2.0f64, 0.01..10.0f64).prop_map(|(a, c)| LevyExponent::sas(a, c).unwrap()),
        (0.01..10.0f64).prop_map(|s| LevyExponent::cauchy(s).unwrap()),
        (0.01..10.0f64).prop_map(|c| LevyExponent::generalized_laplace(c).unwrap()),
        (0.01..20.0f64, jump_law()).prop_map(|(r, j)| LevyExponent::compound_poisson(r, j).unwrap()),
        (0.05..1.95f64, 0.05..1.95f64).prop_map(|(a, b)| LevyExponent::layered_stable(a, b).unwrap()),
    ]
}

fn exponent() -> impl Strategy<Value = LevyExponent> {
    prop_oneof![
        3 => simple_exponent(),
        1 => prop::collection::vec(simple_exponent(), 1..4).prop_map(|c| LevyExponent::sum(c).unwrap()),
    ]
}

fn frequency() -> impl Strategy<Value = f64> {
    (-6.0..4.0f64, any::<bool>()).prop_map(|(e, neg)| if neg { -(10f64.powf(e)) } else { 10f64.powf(e) })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn psi_is_even_nonpositive_and_zero_at_origin(e in exponent(), xi in frequency()) {
        prop_assert_eq!(e.psi(0.0).unwrap(), 0.0);
        let a = e.psi(xi).unwrap();
        let b = e.psi(-xi).unwrap();
        prop_assert_eq!(a, b);
        prop_assert!(a <= 0.0 && a.is_finite());
    }

    #[test]
    fn sum_is_additive(x in simple_exponent(), y in simple_exponent(), xi in frequency()) {
        let s = LevyExponent::sum(vec![x.clone(), y.clone()]).unwrap();
        let want = x.psi(xi).unwrap() + y.psi(xi).unwrap();
        prop_assert!((s.psi(xi).unwrap() - want).abs() <= 1e-14 * want.abs());
    }

    #[test]
    fn layered_sandwich(alpha in 0.05..1.95f64, beta in 0.05..1.95f64, xi in frequency()) {
        let e = LevyExponent::layered_stable(alpha, beta).unwrap();
        let v = e.psi(xi).unwrap();
        prop_assert!(v.abs() <= layered_psi_bound(alpha, beta, xi) * (1.0 + 1e-9));
    }

    #[test]
    fn indices_stay_in_range(e in exponent()) {
        let ix = e.theoretical_indices();
        prop_assert!(ix.beta0 > 0.0 && ix.beta0 <= 2.0);
        prop_assert!((0.0..=2.0).contains(&ix.beta_inf));
    }

    #[test]
    fn exponent_serde_round_trips(e in exponent()) {
        let s = serde_json::to_string(&e).unwrap();
        prop_assert_eq!(serde_json::from_str::<LevyExponent>(&s).unwrap(), e);
    }

    #[test]
    fn ecf_is_one_at_origin_and_bounded(xs in prop::collection::vec(-1e6..1e6f64, 1..300), xi in prop::collection::vec(-50.0..50.0f64, 0..20)) {
        let mut grid = xi;
        grid.push(0.0);
        let r = empirical_cf(&xs, &grid).unwrap();
        let zero = grid.len() - 1;
        prop_assert_eq!(r.ecf[zero].re, 1.0);
        prop_assert_eq!(r.ecf[zero].im, 0.0);
        prop_assert!(r.ecf.iter().all(|z| z.norm() <= 1.0));
    }

    #[test]
    fn ks_statistic_is_a_symmetric_distance(xs in prop::collection::vec(-10.0..10.0f64, 1..100), ys in prop::collection::vec(-10.0..10.0f64, 1..100)) {
        let d = ks_statistic(&xs, &ys);
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(d, ks_statistic(&ys, &xs));
        prop_assert_eq!(ks_statistic(&xs, &xs), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sampling_is_reproducible(e in exponent(), seed in any::<u64>(), stream in any::<u64>(), vol in 0.01..10.0f64) {
        let spec = NoiseSpec { exponent: e, seed, stream };
        let a = sample_increment(&spec, vol, 64).unwrap();
        prop_assert!(a.iter().all(|x| x.is_finite()));
        prop_assert_eq!(a, sample_increment(&spec, vol, 64).unwrap());
    }

    #[test]
    fn paths_respect_zero_boundary(e in simple_exponent(), seed in any::<u64>(), n in 2usize..40, m in 2usize..40, gamma in 0.1..3.0f64) {
        let spec = NoiseSpec::new(e, seed);
        let line = GridSpec::line(0.1, n).unwrap();
        for op in [Operator::Levy, Operator::Fractional { gamma }] {
            prop_assert!(Synthesizer::new(&spec, op, line).unwrap().path(0).boundary_is_zero());
        }
        let plane = GridSpec::plane(0.1, n, m).unwrap();
        prop_assert!(Synthesizer::new(&spec, Operator::Sheet, plane).unwrap().path(0).boundary_is_zero());
    }

    #[test]
    fn rescale_composes(seed in any::<u64>(), m1 in 1usize..5, m2 in 1usize..5, h in -2.0..2.0f64, zoom_in in any::<bool>(), sheet in any::<bool>()) {
        let spec = NoiseSpec::new(LevyExponent::cauchy(1.0).unwrap(), seed);
        let (op, grid) = if sheet {
            (Operator::Sheet, GridSpec::plane(0.5, 41, 41).unwrap())
        } else {
            (Operator::Levy, GridSpec::line(0.5, 401).unwrap())
        };
        let p = Synthesizer::new(&spec, op, grid).unwrap().path(0);
        let factor = |m: usize| if zoom_in { m as f64 } else { 1.0 / m as f64 };
        let twice = rescale(&rescale(&p, &RescaleSpec::new(factor(m1), h).unwrap()).unwrap(), &RescaleSpec::new(factor(m2), h).unwrap()).unwrap();
        let once = rescale(&p, &RescaleSpec::new(factor(m1 * m2), h).unwrap()).unwrap();
        prop_assert!((twice.grid.step - once.grid.step).abs() <= 1e-12 * once.grid.step);
        let shared_n = twice.grid.n.min(once.grid.n);
        let shared_m = twice.grid.m.min(once.grid.m);
        for i in 0..shared_n {
            for j in 0..shared_m {
                let (a, b) = (twice.values[i * twice.grid.m + j], once.values[i * once.grid.m + j]);
                prop_assert!((a - b).abs() <= 1e-12 * b.abs(), "({}, {}): {} vs {}", i, j, a, b);
            }
        }
    }
}
