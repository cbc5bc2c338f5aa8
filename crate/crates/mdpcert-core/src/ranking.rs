//! Distance operators, the complementary distance operator, and the queue
//! algorithms computing their relevant fixed points.

use std::collections::VecDeque;

use thiserror::Error;

use crate::graph::{self, Opt};
use crate::model::{Mdp, Strategy};
use crate::numeric::{weighted_sum, ExtVal, Rank, RankVec, Rat};
use crate::stateset::StateSet;

/// Per-state subsets of the enabled actions. Emptiness is representable; the
/// fixed-point routines reject it, the apply routines treat an empty set as
/// "no progress possible" (rank infinity).
#[derive(Clone, Debug)]
pub struct ActionFilter {
    pub allowed: Vec<Vec<usize>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("no inductive action at state {state}")]
pub struct NoInductiveAction {
    pub state: usize,
}

impl ActionFilter {
    pub fn full(m: &Mdp) -> Self {
        ActionFilter {
            allowed: (0..m.num_states()).map(|s| (0..m.num_actions(s)).collect()).collect(),
        }
    }

    pub fn from_strategy(strat: &Strategy) -> Self {
        ActionFilter {
            allowed: strat.choice.iter().map(|a| vec![*a]).collect(),
        }
    }

    /// First state with an empty allowed set, if any.
    pub fn first_empty(&self) -> Option<usize> {
        self.allowed.iter().position(|acts| acts.is_empty())
    }
}

/// One application of the distance operator: `0` on targets, else
/// `1 + opt over actions of the minimal successor rank`.
pub fn apply_distance_op(m: &Mdp, opt: Opt, target: &StateSet, r: &[Rank]) -> RankVec {
    apply_distance_filtered(m, opt, target, &ActionFilter::full(m), r)
}

/// Distance operator restricted to the actions of `filter`.
pub fn apply_distance_filtered(
    m: &Mdp,
    opt: Opt,
    target: &StateSet,
    filter: &ActionFilter,
    r: &[Rank],
) -> RankVec {
    (0..m.num_states())
        .map(|s| {
            if target.contains(s) {
                Rank::Finite(0)
            } else {
                distance_expr(m, opt, filter, r, s)
            }
        })
        .collect()
}

fn distance_expr(m: &Mdp, opt: Opt, filter: &ActionFilter, r: &[Rank], s: usize) -> Rank {
    let mut acc: Option<Rank> = None;
    for &a in &filter.allowed[s] {
        let best = m
            .transitions(s, a)
            .iter()
            .map(|(t, _)| r[*t])
            .min()
            .unwrap_or(Rank::Infinity);
        acc = Some(match (acc, opt) {
            (None, _) => best,
            (Some(v), Opt::Min) => v.min(best),
            (Some(v), Opt::Max) => v.max(best),
        });
    }
    // An empty action set cannot make progress towards the target.
    acc.unwrap_or(Rank::Infinity).succ()
}

/// The unique fixed point of the distance operator, by the target-outward
/// queue propagation. Finite ranks are never overwritten.
pub fn fixed_point_distance(m: &Mdp, opt: Opt, target: &StateSet) -> RankVec {
    distance_fp_filtered(m, opt, target, &ActionFilter::full(m))
}

/// Fixed point of the distance operator in the sub-MDP keeping only filtered
/// actions, with `opt = min` (a strategy filter makes the choice irrelevant).
pub fn restricted_distance_fp(
    m: &Mdp,
    filter: &ActionFilter,
    target: &StateSet,
) -> Result<RankVec, NoInductiveAction> {
    if let Some(state) = filter.first_empty() {
        return Err(NoInductiveAction { state });
    }
    Ok(distance_fp_filtered(m, Opt::Min, target, filter))
}

/// Permissive variant of `restricted_distance_fp`: a state with an empty
/// allowed set simply keeps rank infinity instead of raising an error.
pub fn min_distance_fp_filtered(m: &Mdp, target: &StateSet, filter: &ActionFilter) -> RankVec {
    distance_fp_filtered(m, Opt::Min, target, filter)
}

fn distance_fp_filtered(m: &Mdp, opt: Opt, target: &StateSet, filter: &ActionFilter) -> RankVec {
    let n = m.num_states();
    let mut rank: RankVec = vec![Rank::Infinity; n];
    let mut queue = VecDeque::new();
    for s in target.iter() {
        rank[s] = Rank::Finite(0);
        queue.push_back(s);
    }
    // Predecessors over the filtered edges only.
    let mut pre: Vec<Vec<usize>> = vec![Vec::new(); n];
    for s in 0..n {
        for &a in &filter.allowed[s] {
            for (t, _) in m.transitions(s, a) {
                pre[*t].push(s);
            }
        }
    }
    for l in &mut pre {
        l.sort_unstable();
        l.dedup();
    }

    while let Some(popped) = queue.pop_front() {
        let level = rank[popped].succ();
        for &s in &pre[popped] {
            if rank[s].is_finite() || target.contains(s) {
                continue;
            }
            let tmp = distance_expr(m, opt, filter, &rank, s);
            if tmp == level {
                rank[s] = tmp;
                queue.push_back(s);
            }
        }
    }
    rank
}

/// One application of the complementary distance operator: infinity on
/// targets, else `opt` over actions of the minimal successor rank plus an
/// increment iff two successors have unequal rank (infinite ranks compare
/// equal to each other).
pub fn apply_complementary_op(m: &Mdp, opt: Opt, target: &StateSet, r: &[Rank]) -> RankVec {
    (0..m.num_states())
        .map(|s| {
            if target.contains(s) {
                Rank::Infinity
            } else {
                complementary_expr(m, opt, None, r, s)
            }
        })
        .collect()
}

/// Complementary operator of the DTMC induced by `strat`.
pub fn apply_complementary_strat(m: &Mdp, strat: &Strategy, target: &StateSet, r: &[Rank]) -> RankVec {
    (0..m.num_states())
        .map(|s| {
            if target.contains(s) {
                Rank::Infinity
            } else {
                complementary_expr(m, Opt::Min, Some(strat.choice[s]), r, s)
            }
        })
        .collect()
}

fn complementary_expr(m: &Mdp, opt: Opt, only: Option<usize>, r: &[Rank], s: usize) -> Rank {
    let mut acc: Option<Rank> = None;
    for a in 0..m.num_actions(s) {
        if let Some(fixed) = only {
            if a != fixed {
                continue;
            }
        }
        let succs = m.transitions(s, a);
        let best = succs.iter().map(|(t, _)| r[*t]).min().unwrap_or(Rank::Infinity);
        let unequal = succs.iter().any(|(t, _)| r[*t] != best);
        let value = if unequal { best.succ() } else { best };
        acc = Some(match (acc, opt) {
            (None, _) => value,
            (Some(v), Opt::Min) => v.min(value),
            (Some(v), Opt::Max) => v.max(value),
        });
    }
    acc.unwrap_or(Rank::Infinity)
}

/// Least fixed point of the complementary distance operator.
///
/// Initializes ranks to infinity exactly on the almost-sure states (standard
/// graph analysis), then propagates increases through a FIFO queue; a state
/// is re-enqueued whenever its expression strictly grows.
pub fn lfp_complementary(m: &Mdp, opt: Opt, target: &StateSet) -> RankVec {
    let p1 = graph::prob1_states(m, opt, target);
    lfp_complementary_from(m, opt, None, &p1, target)
}

/// Least fixed point of the complementary operator of an induced DTMC.
pub fn lfp_complementary_strat(m: &Mdp, strat: &Strategy, target: &StateSet) -> RankVec {
    let d = m.induced_dtmc(strat).expect("strategy must be valid");
    let p1 = graph::prob1_states(&d, Opt::Min, target);
    lfp_complementary_from(m, Opt::Min, Some(strat), &p1, target)
}

fn lfp_complementary_from(
    m: &Mdp,
    opt: Opt,
    strat: Option<&Strategy>,
    almost_sure: &StateSet,
    target: &StateSet,
) -> RankVec {
    let n = m.num_states();
    let mut rank: RankVec = vec![Rank::Finite(0); n];
    let mut queue = VecDeque::new();
    for s in almost_sure.iter() {
        rank[s] = Rank::Infinity;
        queue.push_back(s);
    }
    let pre = m.predecessors();
    while let Some(popped) = queue.pop_front() {
        for &s in &pre[popped] {
            if rank[s].is_infinite() || target.contains(s) {
                continue;
            }
            let tmp = complementary_expr(m, opt, strat.map(|st| st.choice[s]), &rank, s);
            if tmp > rank[s] {
                rank[s] = tmp;
                queue.push_back(s);
            }
        }
    }
    rank
}

/// The value-increasing actions of every state: those whose one-step expected
/// value (plus reward, when given) does not fall below the state's own value.
pub fn increasing_actions(m: &Mdp, x: &[ExtVal], rewards: Option<&[Rat]>) -> ActionFilter {
    ActionFilter {
        allowed: (0..m.num_states())
            .map(|s| {
                (0..m.num_actions(s))
                    .filter(|&a| {
                        let mut rhs = weighted_sum(m.transitions(s, a), x);
                        if let Some(rew) = rewards {
                            rhs = rhs.add(&ExtVal::from_rat(rew[s].clone()));
                        }
                        x[s] <= rhs
                    })
                    .collect()
            })
            .collect(),
    }
}

/// The value-decreasing actions: one-step expected value plus reward does not
/// exceed the state's own value.
pub fn decreasing_actions(m: &Mdp, x: &[ExtVal], rewards: &[Rat]) -> ActionFilter {
    ActionFilter {
        allowed: (0..m.num_states())
            .map(|s| {
                (0..m.num_actions(s))
                    .filter(|&a| {
                        let rhs = weighted_sum(m.transitions(s, a), x)
                            .add(&ExtVal::from_rat(rewards[s].clone()));
                        x[s] >= rhs
                    })
                    .collect()
            })
            .collect(),
    }
}

/// Pointwise `a <= b` on rank vectors.
pub fn rank_le(a: &[Rank], b: &[Rank]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;
    use crate::fixtures::{self_loop_split, three_state, half_loop_dtmc};

    fn targets(m: &Mdp) -> StateSet {
        m.label("target").unwrap().clone()
    }

    #[test]
    fn apply_distance_three_state_max() {
        // The known fixed point of the max-distance operator on this model.
        let m = three_state();
        let r = vec![Rank::Infinity, Rank::Finite(1), Rank::Finite(0)];
        let out = apply_distance_op(&m, Opt::Max, &targets(&m), &r);
        assert_eq!(out, r);
    }

    #[test]
    fn apply_distance_all_infinite() {
        let m = three_state();
        let r = vec![Rank::Infinity; 3];
        let out = apply_distance_op(&m, Opt::Max, &targets(&m), &r);
        assert_eq!(out, vec![Rank::Infinity, Rank::Infinity, Rank::Finite(0)]);
    }

    #[test]
    fn apply_distance_three_state_min_from_zero() {
        let m = three_state();
        let r = vec![Rank::Finite(0); 3];
        let out = apply_distance_op(&m, Opt::Min, &targets(&m), &r);
        assert_eq!(out, vec![Rank::Finite(1), Rank::Finite(1), Rank::Finite(0)]);
    }

    #[test]
    fn fixed_point_distance_three_state() {
        let m = three_state();
        let t = targets(&m);
        assert_eq!(
            fixed_point_distance(&m, Opt::Max, &t),
            vec![Rank::Infinity, Rank::Finite(1), Rank::Finite(0)]
        );
        assert_eq!(
            fixed_point_distance(&m, Opt::Min, &t),
            vec![Rank::Finite(1), Rank::Finite(1), Rank::Finite(0)]
        );
    }

    #[test]
    fn fixed_point_distance_all_targets() {
        let m = three_state();
        let all = StateSet::full(3);
        assert_eq!(fixed_point_distance(&m, Opt::Max, &all), vec![Rank::Finite(0); 3]);
    }

    #[test]
    fn fp_agrees_with_iteration_from_infinity() {
        let m = three_state();
        let t = targets(&m);
        for opt in [Opt::Min, Opt::Max] {
            let fp = fixed_point_distance(&m, opt, &t);
            let mut r = vec![Rank::Infinity; 3];
            for _ in 0..10 {
                r = apply_distance_op(&m, opt, &t, &r);
            }
            assert_eq!(r, fp);
            assert_eq!(apply_distance_op(&m, opt, &t, &fp), fp);
        }
    }

    #[test]
    fn apply_complementary_three_state() {
        let m = three_state();
        let t = targets(&m);
        let r = vec![Rank::Finite(0), Rank::Finite(0), Rank::Infinity];
        let out = apply_complementary_op(&m, Opt::Min, &t, &r);
        assert_eq!(out, vec![Rank::Finite(0), Rank::Finite(1), Rank::Infinity]);
    }

    #[test]
    fn complementary_trivial_fixed_point() {
        let m = three_state();
        let t = targets(&m);
        let inf = vec![Rank::Infinity; 3];
        assert_eq!(apply_complementary_op(&m, Opt::Min, &t, &inf), inf);
    }

    #[test]
    fn complementary_uniform_zero() {
        // All successors rank-uniform at zero: no increment anywhere off target.
        let m = half_loop_dtmc(rat(1, 1));
        let t = targets(&m);
        let r = vec![Rank::Finite(0), Rank::Finite(0)];
        let out = apply_complementary_op(&m, Opt::Min, &t, &r);
        assert_eq!(out[0], Rank::Finite(0));
    }

    #[test]
    fn lfp_complementary_three_state_min() {
        let m = three_state();
        let t = targets(&m);
        let lfp = lfp_complementary(&m, Opt::Min, &t);
        assert_eq!(lfp, vec![Rank::Finite(0), Rank::Finite(1), Rank::Infinity]);
        // It is a fixed point.
        assert_eq!(apply_complementary_op(&m, Opt::Min, &t, &lfp), lfp);
    }

    #[test]
    fn lfp_complementary_sure_reach() {
        let m = half_loop_dtmc(rat(1, 1));
        let t = targets(&m);
        let lfp = lfp_complementary(&m, Opt::Min, &t);
        assert!(lfp.iter().all(|r| r.is_infinite()));
    }

    #[test]
    fn lfp_complementary_self_loop_split_max() {
        let m = self_loop_split();
        let t = targets(&m);
        let lfp = lfp_complementary(&m, Opt::Max, &t);
        assert_eq!(lfp[1], Rank::Finite(0));
        assert!(lfp[0].is_finite());
        assert_eq!(lfp[2], Rank::Infinity);
    }

    #[test]
    fn increasing_actions_three_state() {
        let m = three_state();
        let x = vec![
            ExtVal::zero(),
            ExtVal::from_rat(rat(1, 2)),
            ExtVal::one(),
        ];
        let inc = increasing_actions(&m, &x, None);
        assert_eq!(inc.allowed[1], vec![0, 1]); // both actions qualify at s
    }

    #[test]
    fn increasing_actions_zero_vector() {
        let m = three_state();
        let x = vec![ExtVal::zero(); 3];
        let inc = increasing_actions(&m, &x, None);
        for s in 0..3 {
            assert_eq!(inc.allowed[s].len(), m.num_actions(s));
        }
    }

    #[test]
    fn increasing_actions_self_loop_split() {
        let m = self_loop_split();
        let x = vec![ExtVal::one(), ExtVal::zero(), ExtVal::one()];
        let inc = increasing_actions(&m, &x, None);
        assert_eq!(inc.allowed[0], vec![0]); // only the self-loop
    }

    #[test]
    fn decreasing_actions_half_loop() {
        let m = half_loop_dtmc(rat(1, 1));
        let x = vec![ExtVal::from_rat(rat(2, 1)), ExtVal::zero()];
        let dec = decreasing_actions(&m, &x, m.rewards());
        assert_eq!(dec.allowed[0], vec![0]);
    }

    #[test]
    fn decreasing_actions_infinite_values() {
        let m = self_loop_split();
        let x = vec![ExtVal::Infinity, ExtVal::Infinity, ExtVal::zero()];
        let dec = decreasing_actions(&m, &x, m.rewards());
        assert_eq!(dec.allowed[0].len(), m.num_actions(0));
        assert_eq!(dec.allowed[1].len(), m.num_actions(1));
    }

    #[test]
    fn restricted_fp_three_state() {
        let m = three_state();
        let t = targets(&m);
        let x = vec![ExtVal::zero(), ExtVal::from_rat(rat(1, 2)), ExtVal::one()];
        let filter = increasing_actions(&m, &x, None);
        let fp = restricted_distance_fp(&m, &filter, &t).unwrap();
        assert_eq!(fp, vec![Rank::Finite(1), Rank::Finite(1), Rank::Finite(0)]);
    }

    #[test]
    fn restricted_fp_self_loops_only() {
        let m = self_loop_split();
        let t = targets(&m);
        let filter = ActionFilter { allowed: vec![vec![0], vec![0], vec![0]] };
        let fp = restricted_distance_fp(&m, &filter, &t).unwrap();
        assert_eq!(fp, vec![Rank::Infinity, Rank::Infinity, Rank::Finite(0)]);
    }

    #[test]
    fn restricted_fp_full_filter_matches_min() {
        let m = three_state();
        let t = targets(&m);
        let fp = restricted_distance_fp(&m, &ActionFilter::full(&m), &t).unwrap();
        assert_eq!(fp, fixed_point_distance(&m, Opt::Min, &t));
    }

    #[test]
    fn restricted_fp_empty_filter_errors() {
        let m = three_state();
        let t = targets(&m);
        let filter = ActionFilter { allowed: vec![vec![], vec![0], vec![0]] };
        assert_eq!(
            restricted_distance_fp(&m, &filter, &t),
            Err(NoInductiveAction { state: 0 })
        );
    }
}
