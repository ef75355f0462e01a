use proptest::prelude::*;
use recur_core::estimators::{estimate_jn, QSchedule};
use recur_core::ldp::bounds::{intersection_bound_combined, intersection_bound_pairwise};
use recur_core::ldp::cramer::cramer_rate_iid;
use recur_core::ldp::fit::{fit_rate, FitPoint};
use recur_core::ldp::stats::{ks_distance_exponential, wilson_interval, Z95};
use recur_core::ldp::TailSide;
use recur_core::recurrence::duality_holds;
use recur_core::sources::{power_iteration, stationary_distribution, SourceModel};
use recur_core::{Alphabet, Realization};

fn pmf_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..1.0, 2..6).prop_map(|w| {
        let s: f64 = w.iter().sum();
        w.iter().map(|x| x / s).collect()
    })
}

fn transition_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2usize..8).prop_flat_map(|size| {
        prop::collection::vec(prop::collection::vec(0.01f64..1.0, size), size).prop_map(|rows| {
            rows.into_iter()
                .map(|w| {
                    let s: f64 = w.iter().sum();
                    w.iter().map(|x| x / s).collect()
                })
                .collect()
        })
    })
}

fn realization_strategy() -> impl Strategy<Value = (Realization, usize, usize)> {
    (2usize..=3, 1usize..40, 1usize..12).prop_flat_map(|(size, past, future)| {
        (prop::collection::vec(0u8..size as u8, past + future), 1..=future, 1..=past).prop_map(
            move |(data, n, m)| (Realization::new(data, past - 1, Alphabet::new(size).unwrap()).unwrap(), n, m),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn intersection_bound_ordering(
        p1 in 1e-3f64..10.0, p2 in 1e-3f64..2.0, q1 in 1e-3f64..10.0, q2 in 1e-3f64..2.0, n in 1u32..200,
    ) {
        let n = n as f64;
        let pairwise = intersection_bound_pairwise(p1, p2, q1, q2, n);
        let combined = intersection_bound_combined(p1, p2, q1, q2, n);
        prop_assert!(pairwise >= combined - 1e-12 * (1.0 + combined.abs()));
    }

    #[test]
    fn wilson_brackets_the_point_estimate(trials in 1u64..1_000_000, frac in 0.0f64..=1.0) {
        let hits = ((trials as f64) * frac).floor() as u64;
        let (lo, hi) = wilson_interval(hits, trials, Z95);
        let p = hits as f64 / trials as f64;
        prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
    }

    #[test]
    fn schedule_is_at_least_one(c in 1e-6f64..10.0, k in 0.0f64..3.0, n in 1usize..200) {
        prop_assert!(QSchedule::new(c, k).unwrap().q(n) >= 1);
    }

    #[test]
    fn cramer_rate_is_nonnegative_convex_and_zero_at_mean(pmf in pmf_strategy(), u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let y: Vec<f64> = pmf.iter().map(|p| -p.ln()).collect();
        let (lo, hi) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        prop_assume!(hi - lo > 1e-6);
        let mean: f64 = pmf.iter().zip(&y).map(|(p, y)| p * y).sum();
        prop_assert!(cramer_rate_iid(&pmf, mean).unwrap().rate < 1e-9);
        // stay inside the bracket where the maximizer is interior
        let a = lo + (0.05 + 0.9 * u) * (hi - lo);
        let b = lo + (0.05 + 0.9 * v) * (hi - lo);
        let ia = cramer_rate_iid(&pmf, a).unwrap().rate;
        let ib = cramer_rate_iid(&pmf, b).unwrap().rate;
        let im = cramer_rate_iid(&pmf, 0.5 * (a + b)).unwrap().rate;
        prop_assert!(ia >= 0.0 && ib >= 0.0);
        prop_assert!(im <= 0.5 * (ia + ib) + 1e-7, "{im} > avg({ia}, {ib})");
    }

    #[test]
    fn fit_r2_is_a_fraction(ps in prop::collection::vec(1e-6f64..1.0, 3..8)) {
        let points: Vec<FitPoint> =
            ps.iter().enumerate().map(|(i, &p)| FitPoint { n: 4 + 2 * i, p_hat: p, hit_count: 10 }).collect();
        let fit = fit_rate(&points, 0.1, TailSide::Upper).unwrap();
        prop_assert!((0.0..=1.0).contains(&fit.r2));
    }

    #[test]
    fn ks_distance_is_a_fraction(mut xs in prop::collection::vec(0.0f64..10.0, 1..200), extra in 0usize..20) {
        xs.sort_by(f64::total_cmp);
        let d = ks_distance_exponential(&xs, xs.len() + extra, 10.0);
        prop_assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn duality_on_random_realizations((real, n, m) in realization_strategy()) {
        prop_assert!(duality_holds(&real, n, m).unwrap());
    }

    #[test]
    fn dump_load_round_trip((real, _, _) in realization_strategy()) {
        let mut buf = Vec::new();
        real.dump(&mut buf).unwrap();
        prop_assert_eq!(Realization::load(&buf[..]).unwrap(), real);
    }

    #[test]
    fn generate_is_reproducible(p in 0.01f64..0.99, len in 1usize..500, seed in any::<u64>()) {
        let model = SourceModel::bernoulli(p).unwrap();
        prop_assert_eq!(model.generate(len, seed), model.generate(len, seed));
    }

    #[test]
    fn jn_is_nonnegative(p in 0.05f64..0.95, n in 1usize..6, seed in any::<u64>()) {
        let model = SourceModel::bernoulli(p).unwrap();
        let real = model.generate_two_sided(256, 40, seed);
        let report = estimate_jn(&real, n, QSchedule::constant(16), 200).unwrap();
        prop_assert!(report.estimate >= 0.0);
        prop_assert_eq!(report.censored_count == 0, report.flag == recur_core::EstimateFlag::Exact);
    }

    #[test]
    fn stationary_is_a_power_iteration_fixed_point(transition in transition_strategy()) {
        let pi = stationary_distribution(&transition).unwrap();
        let iter = power_iteration(&transition, 1e-14, 100_000);
        for (a, b) in pi.iter().zip(&iter) {
            prop_assert!((a - b).abs() < 1e-8);
        }
    }
}
