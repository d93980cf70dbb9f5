//! Property tests over seeded random objects. Strategies generate only
//! (seed, dim) pairs; all structure comes from the crate's own samplers, so
//! shrinking stays meaningful and every failure is a reproducible seed.

use std::sync::Arc;

use kd_core::config::Config;
use kd_core::frame::KDFrame;
use kd_core::qops::{self, sample, DensityOperator, KrausChannel, Povm, TraceClass};
use kd_core::repr::{
    predict, represent_channel, represent_effect, represent_state, weak_value,
};

use proptest::prelude::*;

fn cfg() -> Config {
    Config::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn states_round_trip_through_any_frame(seed in any::<u64>(), dim in 2usize..5) {
        let cfgv = cfg();
        let mut rng = sample::rng_from_seed(seed);
        let frame = Arc::new(KDFrame::haar_random(dim, &mut rng, &cfgv).unwrap());
        let rho = DensityOperator::new(sample::random_density(dim, &mut rng), &cfgv).unwrap();
        let mu = represent_state(&rho, &frame).unwrap();
        let back = mu.reconstruct();
        prop_assert!(qops::frobenius_distance(&back, rho.matrix()) < 1e-9);
        prop_assert!((mu.sum().re - 1.0).abs() < 1e-10);
        prop_assert!(mu.sum().im.abs() < 1e-10);
    }

    #[test]
    fn effects_round_trip_and_match_weak_values(seed in any::<u64>(), dim in 2usize..5) {
        let cfgv = cfg();
        let mut rng = sample::rng_from_seed(seed);
        let frame = Arc::new(KDFrame::haar_random(dim, &mut rng, &cfgv).unwrap());
        let effect = &sample::random_povm(dim, 2, &mut rng)[0];
        let xi = represent_effect(effect, &frame).unwrap();
        prop_assert!(qops::frobenius_distance(&xi.reconstruct(), effect) < 1e-9);
        for i in 0..dim {
            for ip in 0..dim {
                let wv = weak_value(
                    effect,
                    frame.pair().vector_a(i),
                    frame.pair().vector_a_prime(ip),
                    &cfgv,
                )
                .unwrap();
                prop_assert!((wv - xi.entry(i, ip)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn channels_act_identically_in_both_pictures(seed in any::<u64>(), dim in 2usize..4) {
        let cfgv = cfg();
        let mut rng = sample::rng_from_seed(seed);
        let f_in = Arc::new(KDFrame::haar_random(dim, &mut rng, &cfgv).unwrap());
        let f_out = Arc::new(KDFrame::haar_random(dim, &mut rng, &cfgv).unwrap());
        let ch = KrausChannel::new(
            sample::random_channel(dim, dim, 2, &mut rng),
            TraceClass::Preserving,
            &cfgv,
        )
        .unwrap();
        let gamma = represent_channel(&ch, &f_in, &f_out).unwrap();
        let rho = DensityOperator::new(sample::random_density(dim, &mut rng), &cfgv).unwrap();
        let pushed = gamma.apply_to(rho.matrix()).unwrap();
        prop_assert!(qops::frobenius_distance(&pushed, &ch.apply(rho.matrix()).unwrap()) < 1e-9);
        prop_assert!(gamma.max_column_sum_deviation() < 1e-10);
    }

    #[test]
    fn born_rule_holds_through_a_channel_chain(seed in any::<u64>(), dim in 2usize..4) {
        let cfgv = cfg();
        let mut rng = sample::rng_from_seed(seed);
        let f0 = Arc::new(KDFrame::haar_random(dim, &mut rng, &cfgv).unwrap());
        let f1 = Arc::new(KDFrame::haar_random(dim, &mut rng, &cfgv).unwrap());
        let f2 = Arc::new(KDFrame::haar_random(dim, &mut rng, &cfgv).unwrap());
        let rho = DensityOperator::new(sample::random_density(dim, &mut rng), &cfgv).unwrap();
        let effect = &sample::random_povm(dim, 2, &mut rng)[0];
        let ch1 = KrausChannel::new(
            sample::random_channel(dim, dim, 2, &mut rng),
            TraceClass::Preserving,
            &cfgv,
        )
        .unwrap();
        let ch2 = KrausChannel::new(
            sample::random_channel(dim, dim, 3, &mut rng),
            TraceClass::Preserving,
            &cfgv,
        )
        .unwrap();

        let mu = represent_state(&rho, &f0).unwrap();
        let g1 = represent_channel(&ch1, &f0, &f1).unwrap();
        let g2 = represent_channel(&ch2, &f1, &f2).unwrap();
        let xi = represent_effect(effect, &f2).unwrap();
        let predicted = predict(&xi, &[&g1, &g2], &mu).unwrap();

        let evolved = ch2.apply(&ch1.apply(rho.matrix()).unwrap()).unwrap();
        let oracle = qops::trace(&(effect * evolved));
        prop_assert!((predicted - oracle).norm() < 1e-10);
        prop_assert!(predicted.im.abs() < 1e-10);
        prop_assert!(predicted.re >= -1e-10 && predicted.re <= 1.0 + 1e-10);
    }

    #[test]
    fn pure_states_stay_in_the_admissible_region(seed in any::<u64>(), dim in 2usize..5) {
        let cfgv = cfg();
        let mut rng = sample::rng_from_seed(seed);
        let frame = Arc::new(KDFrame::haar_random(dim, &mut rng, &cfgv).unwrap());
        let psi = sample::random_pure(dim, &mut rng);
        let rho = DensityOperator::pure(&psi, &cfgv).unwrap();
        let mu = represent_state(&rho, &frame).unwrap();
        prop_assert!(mu.min_region_margin() >= -1e-9);
        prop_assert!(mu.max_abs_entry() <= 1.0 + 1e-12);
    }

    #[test]
    fn povm_representations_sum_to_ones(seed in any::<u64>(), dim in 2usize..4, outcomes in 2usize..5) {
        let cfgv = cfg();
        let mut rng = sample::rng_from_seed(seed);
        let frame = Arc::new(KDFrame::haar_random(dim, &mut rng, &cfgv).unwrap());
        let povm = Povm::new(sample::random_povm(dim, outcomes, &mut rng), &cfgv).unwrap();
        let mut acc = nalgebra::DVector::from_element(
            frame.n_ops(),
            num_complex::Complex64::new(0.0, 0.0),
        );
        for e in povm.effects() {
            acc += represent_effect(e, &frame).unwrap().entries();
        }
        for k in 0..frame.n_ops() {
            prop_assert!((acc[k] - num_complex::Complex64::new(1.0, 0.0)).norm() < 1e-10);
        }
    }
}
