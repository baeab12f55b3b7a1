use nakamoto_bounds::bounds::*;
use proptest::prelude::*;

/// Parameters satisfying the loner-rate condition with room to spare.
fn feasible() -> impl Strategy<Value = ProtocolParams> {
    (1e-4f64..0.05, 0.01f64..0.35, 0.5f64..30.0).prop_filter_map("loner rate", |(total, f, d)| {
        let p = ProtocolParams::from_total_rate(total, f, d).ok()?;
        let margin = p.alpha * (-2.0 * p.alpha * p.delta).exp() - p.beta;
        (margin > 0.1 * p.beta).then_some(p)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn probabilities_are_clamped(p in feasible(), m in 0.1f64..200.0) {
        let t = m / p.total_rate();
        for kind in BoundKind::ALL {
            if let Ok(r) = kind.evaluate(&p, t) {
                prop_assert!((0.0..=1.0).contains(&r.probability), "{kind:?}: {r:?}");
            }
        }
    }

    #[test]
    fn upper_bounds_decrease(p in feasible(), m in 1.0f64..100.0) {
        let t = m / p.total_rate();
        for kind in [BoundKind::ZeroDelayUpper, BoundKind::DelayUpper, BoundKind::DelayUpperUniversal] {
            let (Ok(a), Ok(b)) = (kind.evaluate(&p, t), kind.evaluate(&p, 1.5 * t)) else { continue };
            if a.raw_value < 1.0 - 1e-9 {
                prop_assert!(b.raw_value < a.raw_value, "{kind:?}: {} then {}", a.raw_value, b.raw_value);
            }
        }
    }

    #[test]
    fn lower_never_exceeds_upper(p in feasible(), m in 1.0f64..150.0) {
        let t = m / p.total_rate();
        let up = delay_upper(&p, t).unwrap();
        let uni = delay_upper_universal(&p, t).unwrap();
        prop_assert!(up.raw_value <= uni.raw_value * (1.0 + 1e-12));
        if let Ok(lo) = delay_lower(&p, t, DEFAULT_N_MAX, DEFAULT_K_MAX) {
            prop_assert!(lo.raw_value <= up.raw_value, "{} > {}", lo.raw_value, up.raw_value);
        }
        let zp = ProtocolParams { delta: 0.0, ..p };
        let (zl, zu) = (zero_delay_lower(&zp, t, DEFAULT_K_MAX).unwrap(), zero_delay_upper(&zp, t).unwrap());
        prop_assert!(zl.raw_value <= zu.raw_value);
    }

    #[test]
    fn truncation_is_conservative(p in feasible(), m in 1.0f64..50.0, k in 4usize..64) {
        let t = m / p.total_rate();
        if let (Ok(part), Ok(full)) = (
            delay_lower(&p, t, k, k),
            delay_lower(&p, t, DEFAULT_N_MAX, DEFAULT_K_MAX),
        ) {
            prop_assert!(part.raw_value <= full.raw_value * (1.0 + 1e-12));
        }
        let zp = ProtocolParams { delta: 0.0, ..p };
        let part = zero_delay_lower(&zp, t, k).unwrap().raw_value;
        let full = zero_delay_lower(&zp, t, DEFAULT_K_MAX).unwrap().raw_value;
        prop_assert!(part <= full * (1.0 + 1e-12));
    }

    #[test]
    fn exponent_sign_pattern(p in feasible()) {
        let b = DelayBound::feasible(&p).unwrap();
        let theta = b.theta();
        let u = b.universal_v();
        prop_assert!(u > 0.0 && u < theta);
        prop_assert!(b.exponent(theta * (1.0 - 1e-9)).unwrap() < 0.0);
        for i in 1..=20 {
            let v = u * i as f64 / 20.0;
            prop_assert!(b.exponent(v).unwrap() > 0.0, "psi({v}) <= 0");
        }
    }

    #[test]
    fn gain_pmf_normalized(p in feasible()) {
        let slack = p.alpha - p.beta - p.alpha * p.beta * p.delta;
        prop_assume!(slack > 0.3 * p.alpha);
        let (q, tail) = postmine_gain_pmf(&p, DEFAULT_N_MAX).unwrap();
        prop_assert!(q.iter().all(|&x| x >= -1e-12));
        let sum: f64 = q.iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-9, "sum {sum}");
        prop_assert!(tail <= 1e-9);
    }

    #[test]
    fn growth_and_liveness_monotone(p in feasible(), n in 1u64..20, m in 1.0f64..80.0) {
        let t = m / p.alpha;
        let g = growth_bound(&p, n, t).unwrap();
        prop_assert!(growth_bound(&p, n, 1.3 * t).unwrap() >= g);
        prop_assert!(growth_bound(&p, n + 1, t).unwrap() <= g);
        let l = liveness_bound(&p, n, t).unwrap();
        prop_assert!(l <= g + 1e-12, "liveness {l} above growth {g}");
        let quiet = ProtocolParams { beta: 0.0, ..p };
        prop_assert!((liveness_bound(&quiet, n, t).unwrap() - g).abs() < 1e-12);
    }

    #[test]
    fn deeper_levels_wait_longer(p in feasible(), e in 2.0f64..8.0) {
        let a = invert_latency(UpperBound::Delay, &p, 10f64.powf(-e)).unwrap();
        let b = invert_latency(UpperBound::Delay, &p, 10f64.powf(-e - 1.0)).unwrap();
        prop_assert!(b > a);
        prop_assert!(delay_upper(&p, a as f64).unwrap().probability <= 10f64.powf(-e));
        prop_assert!(a == 1 || delay_upper(&p, (a - 1) as f64).unwrap().probability > 10f64.powf(-e));
        prop_assert!(depth_from_time(&p, b as f64, 1e-3).unwrap() >= depth_from_time(&p, a as f64, 1e-3).unwrap());
    }
}

#[test]
fn growth_edges() {
    let p = ProtocolParams::from_total_rate(1.0 / 600.0, 0.25, 10.0).unwrap();
    assert_eq!(growth_bound(&p, 1, 10.0).unwrap(), 0.0);
    assert_eq!(liveness_bound(&p, 3, 35.0).unwrap(), 0.0);
    assert!(growth_bound(&p, 0, 100.0).is_err());
}

#[test]
fn infeasible_parameters_are_reported() {
    let p = ProtocolParams::from_total_rate(1.0 / 60.0, 0.47, 10.0).unwrap();
    assert!(matches!(delay_upper(&p, 3600.0), Err(nakamoto_bounds::Error::Infeasible(_))));
    assert!(matches!(
        invert_latency(UpperBound::Delay, &p, 1e-3),
        Err(nakamoto_bounds::Error::Infeasible(_))
    ));
    let minority = ProtocolParams::new(1.0, 1.2, 0.0).unwrap();
    assert!(matches!(zero_delay_upper(&minority, 1.0), Err(nakamoto_bounds::Error::Infeasible(_))));
}
