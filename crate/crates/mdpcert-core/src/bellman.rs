//! Exact single applications of the Bellman operators. These are the
//! primitives the certificate conditions are phrased in; iteration lives in
//! the solver crate.

use crate::graph::Opt;
use crate::model::{Mdp, Strategy};
use crate::numeric::{weighted_sum, ExtVal, Rat, ValueVec};
use crate::stateset::StateSet;

fn opt_fold(opt: Opt, acc: Option<ExtVal>, v: ExtVal) -> ExtVal {
    match (acc, opt) {
        (None, _) => v,
        (Some(a), Opt::Min) => a.min(v),
        (Some(a), Opt::Max) => a.max(v),
    }
}

/// Reachability operator: `1` on targets, else the optimal one-step expected
/// value.
pub fn apply_reach(m: &Mdp, opt: Opt, target: &StateSet, x: &[ExtVal]) -> ValueVec {
    (0..m.num_states())
        .map(|s| {
            if target.contains(s) {
                ExtVal::one()
            } else {
                let mut acc = None;
                for a in 0..m.num_actions(s) {
                    acc = Some(opt_fold(opt, acc, weighted_sum(m.transitions(s, a), x)));
                }
                acc.expect("nonempty action set")
            }
        })
        .collect()
}

/// Reachability operator of the DTMC induced by `strat`.
pub fn apply_reach_strat(m: &Mdp, strat: &Strategy, target: &StateSet, x: &[ExtVal]) -> ValueVec {
    (0..m.num_states())
        .map(|s| {
            if target.contains(s) {
                ExtVal::one()
            } else {
                weighted_sum(m.transitions(s, strat.choice[s]), x)
            }
        })
        .collect()
}

/// Expected-reward operator: `0` on targets, else reward plus the optimal
/// one-step expected value. Multiplication by infinity absorbs positive
/// probabilities.
pub fn apply_reward(
    m: &Mdp,
    opt: Opt,
    target: &StateSet,
    rewards: &[Rat],
    x: &[ExtVal],
) -> ValueVec {
    (0..m.num_states())
        .map(|s| {
            if target.contains(s) {
                ExtVal::zero()
            } else {
                let mut acc = None;
                for a in 0..m.num_actions(s) {
                    acc = Some(opt_fold(opt, acc, weighted_sum(m.transitions(s, a), x)));
                }
                acc.expect("nonempty action set")
                    .add(&ExtVal::from_rat(rewards[s].clone()))
            }
        })
        .collect()
}

/// Expected-reward operator of the DTMC induced by `strat`.
pub fn apply_reward_strat(
    m: &Mdp,
    strat: &Strategy,
    target: &StateSet,
    rewards: &[Rat],
    x: &[ExtVal],
) -> ValueVec {
    (0..m.num_states())
        .map(|s| {
            if target.contains(s) {
                ExtVal::zero()
            } else {
                weighted_sum(m.transitions(s, strat.choice[s]), x)
                    .add(&ExtVal::from_rat(rewards[s].clone()))
            }
        })
        .collect()
}

/// Pointwise `a <= b`.
pub fn value_le(a: &[ExtVal], b: &[ExtVal]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}
