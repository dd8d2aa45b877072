mod common;

use common::*;
use intentnav_core::baselines::{rbii_update, RbiiParams};
use intentnav_core::estimator::{
    airm_activate, airm_factor, argmax, boir_update, normalize_minmax, observation_likelihood,
    transition_predict, transition_row, AirmResidual, Belief, BoirFilter, EstimatorParams,
    NormalizedObservations, SUM_TOLERANCE,
};
use intentnav_core::world::{Goal, GoalId, Point2, Pose2D};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn belief_strategy() -> impl Strategy<Value = Belief> {
    (2usize..7)
        .prop_flat_map(|n| proptest::collection::vec(0.001f64..1.0, n))
        .prop_map(|m| Belief::from_masses(m).unwrap())
}

fn obs_strategy(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    proptest::collection::vec(
        (
            0.0..std::f64::consts::PI,
            prop_oneof![9 => 0.0f64..50.0, 1 => Just(f64::INFINITY)],
        ),
        n,
    )
}

fn valid(b: &Belief) -> bool {
    let sum: f64 = b.probs().iter().sum();
    (sum - 1.0).abs() <= SUM_TOLERANCE && b.probs().iter().all(|p| *p >= 0.0)
}

proptest! {
    #[test]
    fn update_keeps_beliefs_normalized(
        (prior, obs) in belief_strategy().prop_flat_map(|b| {
            let n = b.len();
            (Just(b), obs_strategy(n))
        }),
        click in proptest::option::of(0usize..6),
        elapsed in 0u64..150,
    ) {
        let p = EstimatorParams::default();
        let n = prior.len();
        let airm = click.filter(|c| *c < n).map(|c| airm_activate(&prior, GoalId(c), 0, &p).unwrap().1);
        let post = boir_update(&prior, &to_set(&obs), airm.as_ref(), elapsed, &p).unwrap();
        prop_assert!(valid(&post));
    }

    #[test]
    fn minmax_ignores_positive_affine_maps(
        v in proptest::collection::vec(-100.0f64..100.0, 2..8),
        a in 0.01f64..100.0,
        b in -100.0f64..100.0,
    ) {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assume!(hi - lo > 1e-3);
        let mapped: Vec<f64> = v.iter().map(|x| a * x + b).collect();
        for (x, y) in normalize_minmax(&v).iter().zip(normalize_minmax(&mapped)) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn argmax_ignores_positive_scaling(
        masses in proptest::collection::vec(0.0f64..10.0, 2..8),
        scale in 1e-6f64..1e6,
    ) {
        let scaled: Vec<f64> = masses.iter().map(|m| m * scale).collect();
        prop_assert_eq!(argmax(&masses), argmax(&scaled));
    }

    #[test]
    fn longer_path_lowers_mass(
        phi in proptest::collection::vec(0.0f64..1.0, 3),
        len in proptest::collection::vec(0.0f64..0.9, 3),
        goal in 0usize..3,
        bump in 0.01f64..0.1,
    ) {
        let p = EstimatorParams::default();
        let base = NormalizedObservations { phi: phi.clone(), path_len: len.clone() };
        let mut longer = len.clone();
        longer[goal] += bump;
        let bumped = NormalizedObservations { phi, path_len: longer };
        let before = observation_likelihood(&base, &p)[goal];
        let after = observation_likelihood(&bumped, &p)[goal];
        prop_assert!(after < before);
    }

    #[test]
    fn click_factor_bounds(n in 2usize..7, pick in 0usize..7, since in 0u64..250, unit in any::<bool>()) {
        let selected = pick % n;
        let p = EstimatorParams {
            airm_residual: if unit { AirmResidual::Unit } else { AirmResidual::Shared },
            ..Default::default()
        };
        let (_, state) = airm_activate(&Belief::uniform(n).unwrap(), GoalId(selected), 5, &p).unwrap();
        let f = airm_factor(Some(&state), n, 5 + since, &p);
        if since < p.horizon_ticks() {
            prop_assert!(f[selected] >= p.threshold_belief && f[selected] <= p.activated_belief);
            let rest = if unit { 1.0 } else { (1.0 - f[selected]) / (n - 1) as f64 };
            for (i, v) in f.iter().enumerate() {
                if i != selected {
                    prop_assert_eq!(*v, rest);
                }
            }
        } else {
            prop_assert!(f.iter().all(|v| *v == 1.0));
        }
    }

    #[test]
    fn rbii_keeps_beliefs_normalized(
        prior in belief_strategy(),
        xs in proptest::collection::vec((-20.0f64..20.0, -20.0f64..20.0), 7),
    ) {
        let n = prior.len();
        let goals: Vec<Goal> = (0..n)
            .map(|i| Goal { id: GoalId(i), label: (b'a' + i as u8) as char, position: Point2::new(xs[i].0, xs[i].1) })
            .collect();
        let pose = Pose2D::new(xs[6].0, xs[6].1, 0.0);
        prop_assert!(valid(&rbii_update(&prior, &pose, &goals, &RbiiParams::default()).unwrap()));
    }
}

#[test]
fn transition_rows_are_stochastic() {
    for n in 2..=10 {
        for delta in [0.05, 0.2, 0.5] {
            for from in 0..n {
                let sum: f64 = transition_row(n, from, delta).iter().sum();
                assert!((sum - 1.0).abs() < 1e-15, "n={n} delta={delta}: {sum}");
            }
            let u = Belief::uniform(n).unwrap();
            let out = transition_predict(&u, delta);
            for p in out.probs() {
                assert!((p - 1.0 / n as f64).abs() < 1e-15);
            }
        }
    }
}

#[test]
fn recursion_matches_path_enumeration() {
    let p = EstimatorParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..10 {
        let click = (case % 2 == 1).then_some((3u64, 2usize));
        let mut filter = BoirFilter::new(3, p).unwrap();
        let mut start = vec![1.0 / 3.0; 3];
        let mut emissions: Vec<Vec<f64>> = Vec::new();
        for t in 0..8u64 {
            if let Some((_, goal)) = click.filter(|c| c.0 == t) {
                filter.activate(GoalId(goal)).unwrap();
                start = vec![0.025; 3];
                start[goal] = 0.95;
                emissions.clear();
            }
            let obs = random_observations(&mut rng, 3);
            let mut e = likelihood(&obs);
            if let Some((at, goal)) = click.filter(|c| t >= c.0) {
                for (v, f) in e.iter_mut().zip(click_factor(3, goal, t - at)) {
                    *v *= f;
                }
            }
            emissions.push(e);
            let got = filter.update(&to_set(&obs)).unwrap().probs().to_vec();
            let want = enumerate_posterior(&start, &emissions);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-9, "case {case} tick {t}: {got:?} vs {want:?}");
            }
        }
    }
}
