//! Property tests for the order structure, the operators' monotonicity, and
//! the fixed-point induction principle.

use mdpcert_core::graph::Opt;
use mdpcert_core::model::{Mdp, MdpBuilder};
use mdpcert_core::numeric::{compare_ext, rat, ExtVal, Rank};
use mdpcert_core::ranking;
use mdpcert_core::stateset::StateSet;
use proptest::prelude::*;

/// A small random MDP built from proptest primitives: up to 6 states, up to
/// 3 actions, distributions with denominator up to 8.
fn arb_mdp() -> impl Strategy<Value = Mdp> {
    (2usize..=6).prop_flat_map(|n| {
        let action = proptest::collection::vec((0..n, 1u64..=4), 1..=3).prop_map(move |parts| {
            // Merge duplicate successors, then normalize to an exact sum of 1.
            let mut merged: Vec<(usize, u64)> = Vec::new();
            for (t, w) in parts {
                match merged.iter_mut().find(|(u, _)| *u == t) {
                    Some((_, acc)) => *acc += w,
                    None => merged.push((t, w)),
                }
            }
            let total: u64 = merged.iter().map(|(_, w)| w).sum();
            merged
                .into_iter()
                .map(|(t, w)| (t, rat(w as i64, total as i64)))
                .collect::<Vec<_>>()
        });
        let state_actions = proptest::collection::vec(action, 1..=3);
        let all = proptest::collection::vec(state_actions, n..=n);
        let targets = proptest::collection::vec(0..n, 0..=2);
        (all, targets).prop_map(move |(actions, targets)| {
            let mut b = MdpBuilder::new(n);
            for (s, acts) in actions.into_iter().enumerate() {
                for a in acts {
                    b.push_action(s, a);
                }
            }
            b.set_label("target", targets);
            b.build().expect("generated model is valid")
        })
    })
}

fn arb_rank_vec(n: usize) -> impl Strategy<Value = Vec<Rank>> {
    proptest::collection::vec(
        prop_oneof![3 => (0u64..6).prop_map(Rank::Finite), 1 => Just(Rank::Infinity)],
        n..=n,
    )
}

fn targets(m: &Mdp) -> StateSet {
    m.label("target").unwrap().clone()
}

proptest! {
    #[test]
    fn compare_ext_total_order((a, b, c) in (0i64..40, 0i64..40, 0i64..40)) {
        let to_val = |v: i64| if v == 39 { ExtVal::Infinity } else { ExtVal::from_rat(rat(v, 7)) };
        let (x, y, z) = (to_val(a), to_val(b), to_val(c));
        // Antisymmetry and transitivity on a random triple.
        if compare_ext(&x, &y).is_le() && compare_ext(&y, &x).is_le() {
            prop_assert_eq!(&x, &y);
        }
        if compare_ext(&x, &y).is_le() && compare_ext(&y, &z).is_le() {
            prop_assert!(compare_ext(&x, &z).is_le());
        }
    }

    #[test]
    fn distance_op_monotone((m, seed) in arb_mdp().prop_flat_map(|m| {
        let n = m.num_states();
        (Just(m), (arb_rank_vec(n), arb_rank_vec(n)))
    })) {
        let (r1, r2) = seed;
        let lo: Vec<Rank> = r1.iter().zip(&r2).map(|(a, b)| *a.min(b)).collect();
        let hi: Vec<Rank> = r1.iter().zip(&r2).map(|(a, b)| *a.max(b)).collect();
        let t = targets(&m);
        for opt in [Opt::Min, Opt::Max] {
            let dlo = ranking::apply_distance_op(&m, opt, &t, &lo);
            let dhi = ranking::apply_distance_op(&m, opt, &t, &hi);
            prop_assert!(ranking::rank_le(&dlo, &dhi), "distance operator not monotone");
            let clo = ranking::apply_complementary_op(&m, opt, &t, &lo);
            let chi = ranking::apply_complementary_op(&m, opt, &t, &hi);
            prop_assert!(ranking::rank_le(&clo, &chi), "complementary operator not monotone");
        }
    }

    #[test]
    fn knaster_tarski_induction((m, r) in arb_mdp().prop_flat_map(|m| {
        let n = m.num_states();
        (Just(m), arb_rank_vec(n))
    })) {
        // Any inductive rank vector dominates the unique fixed point.
        let t = targets(&m);
        for opt in [Opt::Min, Opt::Max] {
            let dr = ranking::apply_distance_op(&m, opt, &t, &r);
            if ranking::rank_le(&dr, &r) {
                let fp = ranking::fixed_point_distance(&m, opt, &t);
                prop_assert!(ranking::rank_le(&fp, &r), "inductive vector below the fixed point");
            }
            let cr = ranking::apply_complementary_op(&m, opt, &t, &r);
            if ranking::rank_le(&cr, &r) {
                let lfp = ranking::lfp_complementary(&m, opt, &t);
                prop_assert!(ranking::rank_le(&lfp, &r), "inductive vector below the least fixed point");
            }
        }
    }

    #[test]
    fn distance_fp_is_fixed_point_and_vi_limit(m in arb_mdp()) {
        let t = targets(&m);
        for opt in [Opt::Min, Opt::Max] {
            let fp = ranking::fixed_point_distance(&m, opt, &t);
            prop_assert_eq!(ranking::apply_distance_op(&m, opt, &t, &fp), fp.clone());
            // Iterating from the all-infinite vector reaches the same point.
            let mut r = vec![Rank::Infinity; m.num_states()];
            for _ in 0..=m.num_states() + 1 {
                r = ranking::apply_distance_op(&m, opt, &t, &r);
            }
            prop_assert_eq!(r, fp);
        }
    }

    #[test]
    fn lfp_complementary_is_least_fixed_point(m in arb_mdp()) {
        let t = targets(&m);
        for opt in [Opt::Min, Opt::Max] {
            let lfp = ranking::lfp_complementary(&m, opt, &t);
            prop_assert_eq!(ranking::apply_complementary_op(&m, opt, &t, &lfp), lfp.clone());
        }
    }

    #[test]
    fn induced_dtmc_preserves_validity((m, picks) in arb_mdp().prop_flat_map(|m| {
        let n = m.num_states();
        (Just(m), proptest::collection::vec(0usize..64, n..=n))
    })) {
        let choice: Vec<usize> = picks
            .iter()
            .enumerate()
            .map(|(s, p)| p % m.num_actions(s))
            .collect();
        let d = m.induced_dtmc(&mdpcert_core::model::Strategy::new(choice)).unwrap();
        prop_assert!(d.validate().is_ok());
        prop_assert!(d.is_dtmc());
    }
}

#[test]
fn model_types_are_shareable_across_threads() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<Mdp>();
    assert_send_sync::<mdpcert_core::model::Strategy>();
    assert_send_sync::<StateSet>();
    assert_send_sync::<mdpcert_core::certificate::Certificate>();
    assert_send_sync::<ExtVal>();
}
