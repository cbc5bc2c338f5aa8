//! Brute-force ground truth for small MDPs: enumerate all memoryless
//! deterministic strategies, solve every induced DTMC exactly, and take the
//! pointwise optimum.
//!
//! The graph analyses and the linear solver in here are written from scratch
//! so that agreement with the solver crate is a meaningful cross-check.

mod solve;

use mdpcert_core::certificate::{Objective, Query, Semantics};
use mdpcert_core::model::{Mdp, Strategy};
use mdpcert_core::numeric::{ExtVal, Rat, ValueVec};
use mdpcert_core::stateset::StateSet;
use num::traits::{One, Signed, Zero};
use thiserror::Error;

pub use solve::solve_dense;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("strategy space of size {size} exceeds the enumeration cap {cap}")]
    CapExceeded { size: u128, cap: u128 },
    #[error("operation requires a DTMC, state {state} has {actions} actions")]
    NotADtmc { state: usize, actions: usize },
}

/// Exact optimal values plus a strategy attaining them everywhere.
#[derive(Clone, Debug)]
pub struct OracleResult {
    pub values: ValueVec,
    pub arg_strategy: Strategy,
}

pub const DEFAULT_CAP: u128 = 100_000;

/// Backward-reachable set towards `to` in the DTMC graph. States of `avoid`
/// are never added: paths are only followed while they stay outside it.
fn dtmc_coreach_avoiding(d: &Mdp, to: &StateSet, avoid: Option<&StateSet>) -> StateSet {
    let n = d.num_states();
    let mut seen = to.clone();
    loop {
        let mut changed = false;
        for s in 0..n {
            if seen.contains(s) || avoid.is_some_and(|a| a.contains(s)) {
                continue;
            }
            if d.transitions(s, 0).iter().any(|(t, _)| seen.contains(*t)) {
                seen.insert(s);
                changed = true;
            }
        }
        if !changed {
            return seen;
        }
    }
}

fn dtmc_coreach_set(d: &Mdp, to: &StateSet) -> StateSet {
    dtmc_coreach_avoiding(d, to, None)
}

fn ensure_dtmc(d: &Mdp) -> Result<(), OracleError> {
    for s in 0..d.num_states() {
        if d.num_actions(s) != 1 {
            return Err(OracleError::NotADtmc { state: s, actions: d.num_actions(s) });
        }
    }
    Ok(())
}

/// Exact reachability probabilities of a DTMC: zero where the target is
/// unreachable, one where avoidance is impossible, a linear solve in between.
pub fn dtmc_reach_exact(d: &Mdp, target: &StateSet) -> Result<ValueVec, OracleError> {
    ensure_dtmc(d)?;
    let n = d.num_states();
    let can_reach = dtmc_coreach_set(d, target);
    let zero_set = can_reach.complement();
    // P(s) = 1 iff s cannot reach the zero set while avoiding the target.
    let reaches_zero = dtmc_coreach_avoiding(d, &zero_set, Some(target));
    let mut values: Vec<Option<Rat>> = vec![None; n];
    for s in 0..n {
        if target.contains(s) || !reaches_zero.contains(s) {
            values[s] = Some(Rat::one());
        } else if zero_set.contains(s) {
            values[s] = Some(Rat::zero());
        }
    }
    solve_linear(d, None, &mut values);
    Ok(values.into_iter().map(|v| ExtVal::from_rat(v.unwrap())).collect())
}

/// Fills every `None` entry by solving `x = base + P x` over the unknown
/// states, taking known entries as constants.
fn solve_linear(d: &Mdp, base: Option<&[Rat]>, values: &mut [Option<Rat>]) {
    let unknown: Vec<usize> = (0..values.len()).filter(|s| values[*s].is_none()).collect();
    if unknown.is_empty() {
        return;
    }
    let index: std::collections::HashMap<usize, usize> =
        unknown.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let k = unknown.len();
    let mut a = vec![vec![Rat::zero(); k]; k];
    let mut b = vec![Rat::zero(); k];
    for (row, &s) in unknown.iter().enumerate() {
        a[row][row] += Rat::one();
        if let Some(base) = base {
            b[row] += &base[s];
        }
        for (t, p) in d.transitions(s, 0) {
            match values[*t].as_ref() {
                Some(v) => b[row] += p * v,
                None => a[row][index[t]] -= p,
            }
        }
    }
    let x = solve_dense(a, b).expect("transient system must be non-singular");
    for (i, s) in unknown.into_iter().enumerate() {
        values[s] = Some(x[i].clone());
    }
}

/// Exact expected rewards of a DTMC until reaching `target`.
///
/// With `Inf` semantics, states that do not reach the target almost surely
/// get infinity. With `Rho` semantics, a state gets infinity exactly when it
/// can, before the target, reach a recurrent class containing positive
/// reward; all other never-reaching runs accumulate zero tail reward.
pub fn dtmc_reward_exact(
    d: &Mdp,
    target: &StateSet,
    rewards: &[Rat],
    semantics: Semantics,
) -> Result<ValueVec, OracleError> {
    ensure_dtmc(d)?;
    let n = d.num_states();
    match semantics {
        Semantics::Inf => {
            let can_reach = dtmc_coreach_set(d, target);
            let zero_set = can_reach.complement();
            let reaches_zero = dtmc_coreach_avoiding(d, &zero_set, Some(target));
            // Almost-sure states are those never reaching the zero set.
            let mut values: Vec<Option<Rat>> = vec![None; n];
            let mut out: Vec<Option<ExtVal>> = vec![None; n];
            for s in 0..n {
                if target.contains(s) {
                    values[s] = Some(Rat::zero());
                    out[s] = Some(ExtVal::zero());
                } else if reaches_zero.contains(s) {
                    values[s] = Some(Rat::zero()); // placeholder, reported as infinity
                    out[s] = Some(ExtVal::Infinity);
                }
            }
            solve_linear(d, Some(rewards), &mut values);
            Ok((0..n)
                .map(|s| out[s].clone().unwrap_or_else(|| ExtVal::from_rat(values[s].clone().unwrap())))
                .collect())
        }
        Semantics::Rho => {
            let absorbed = d.with_absorbing(target);
            let rew_t: Vec<Rat> = (0..n)
                .map(|s| if target.contains(s) { Rat::zero() } else { rewards[s].clone() })
                .collect();
            // Bottom SCCs of the absorbed chain.
            let comp = dtmc_scc_ids(&absorbed);
            let ncomp = comp.iter().max().map(|c| c + 1).unwrap_or(0);
            let mut is_bottom = vec![true; ncomp];
            for s in 0..n {
                for (t, _) in absorbed.transitions(s, 0) {
                    if comp[*t] != comp[s] {
                        is_bottom[comp[s]] = false;
                    }
                }
            }
            let mut bad_comp = vec![false; ncomp];
            for s in 0..n {
                if is_bottom[comp[s]] && rew_t[s].is_positive() {
                    bad_comp[comp[s]] = true;
                }
            }
            let bad_states =
                StateSet::from_iter(n, (0..n).filter(|&s| bad_comp[comp[s]]));
            let infinite = dtmc_coreach_set(&absorbed, &bad_states);
            let mut values: Vec<Option<Rat>> = vec![None; n];
            let mut out: Vec<Option<ExtVal>> = vec![None; n];
            for s in 0..n {
                if infinite.contains(s) {
                    values[s] = Some(Rat::zero());
                    out[s] = Some(ExtVal::Infinity);
                } else if is_bottom[comp[s]] {
                    // Zero-reward recurrent class (or absorbed target).
                    values[s] = Some(Rat::zero());
                }
            }
            solve_linear(&absorbed, Some(&rew_t), &mut values);
            Ok((0..n)
                .map(|s| out[s].clone().unwrap_or_else(|| ExtVal::from_rat(values[s].clone().unwrap())))
                .collect())
        }
    }
}

/// SCC ids of the DTMC graph (iterative Tarjan, local to the oracle).
fn dtmc_scc_ids(d: &Mdp) -> Vec<usize> {
    let n = d.num_states();
    const UNSET: usize = usize::MAX;
    let mut index = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSET; n];
    let mut stack = Vec::new();
    let mut next = 0usize;
    let mut ncomp = 0usize;
    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some((v, cursor)) = call.last_mut() {
            let v = *v;
            let succs = d.transitions(v, 0);
            if let Some((w, _)) = succs.get(*cursor) {
                let w = *w;
                *cursor += 1;
                if index[w] == UNSET {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
                call.pop();
                if let Some((p, _)) = call.last() {
                    low[*p] = low[*p].min(low[v]);
                }
            }
        }
    }
    comp
}

/// Iterator over all memoryless deterministic strategies.
struct StrategyIter {
    radix: Vec<usize>,
    current: Option<Vec<usize>>,
}

impl StrategyIter {
    fn new(m: &Mdp) -> Self {
        let radix: Vec<usize> = (0..m.num_states()).map(|s| m.num_actions(s)).collect();
        StrategyIter { current: Some(vec![0; radix.len()]), radix }
    }
}

impl Iterator for StrategyIter {
    type Item = Strategy;

    fn next(&mut self) -> Option<Strategy> {
        let current = self.current.as_mut()?;
        let out = Strategy::new(current.clone());
        // Increment the mixed-radix counter.
        let mut i = 0;
        loop {
            if i == current.len() {
                self.current = None;
                break;
            }
            current[i] += 1;
            if current[i] < self.radix[i] {
                break;
            }
            current[i] = 0;
            i += 1;
        }
        Some(out)
    }
}

pub fn strategy_space_size(m: &Mdp) -> u128 {
    let mut size: u128 = 1;
    for s in 0..m.num_states() {
        size = size.saturating_mul(m.num_actions(s) as u128);
    }
    size
}

fn values_for(d: &Mdp, q: &Query, target: &StateSet) -> Result<ValueVec, OracleError> {
    if q.objective.is_reward() {
        dtmc_reward_exact(d, target, d.rewards(), q.semantics_or_default())
    } else {
        dtmc_reach_exact(d, target)
    }
}

/// Enumerates all strategies and returns the pointwise optimum over their
/// exact DTMC values, plus one strategy attaining it everywhere.
pub fn optimal_exact(m: &Mdp, q: &Query) -> Result<OracleResult, OracleError> {
    optimal_exact_capped(m, q, DEFAULT_CAP)
}

pub fn optimal_exact_capped(m: &Mdp, q: &Query, cap: u128) -> Result<OracleResult, OracleError> {
    let size = strategy_space_size(m);
    if size > cap {
        return Err(OracleError::CapExceeded { size, cap });
    }
    let target = m
        .label(&q.target_label)
        .expect("target label must resolve")
        .clone();
    let minimize = matches!(q.objective, Objective::Pmin | Objective::Emin);

    let mut best: Option<ValueVec> = None;
    for strat in StrategyIter::new(m) {
        let d = m.induced_dtmc(&strat).expect("enumerated strategy is valid");
        let vals = values_for(&d, q, &target)?;
        best = Some(match best {
            None => vals,
            Some(acc) => acc
                .into_iter()
                .zip(vals)
                .map(|(a, v)| if minimize { a.min(v) } else { a.max(v) })
                .collect(),
        });
    }
    let values = best.expect("at least one strategy exists");

    // A single memoryless deterministic strategy attains the optimum in all
    // states at once; scan for the first one that does.
    for strat in StrategyIter::new(m) {
        let d = m.induced_dtmc(&strat).expect("enumerated strategy is valid");
        if values_for(&d, q, &target)? == values {
            return Ok(OracleResult { values, arg_strategy: strat });
        }
    }
    unreachable!("pointwise optimum must be attained by some enumerated strategy");
}

#[cfg(test)]
mod tests {
    use super::*;
    use mdpcert_core::numeric::rat;
    use mdpcert_testmodels::{self_loop_split, detour_chain, three_state, half_loop_dtmc};

    fn q(objective: Objective, semantics: Option<Semantics>) -> Query {
        Query {
            objective,
            semantics,
            target_label: "target".into(),
            bound: mdpcert_core::certificate::BoundDir::Lower,
            epsilon: rat(1, 1_000_000),
        }
    }

    fn fin(n: i64, d: i64) -> ExtVal {
        ExtVal::from_rat(rat(n, d))
    }

    #[test]
    fn dtmc_reach_half_loop() {
        let m = half_loop_dtmc(rat(1, 1));
        let t = m.label("target").unwrap().clone();
        let v = dtmc_reach_exact(&m, &t).unwrap();
        assert_eq!(v, vec![ExtVal::one(), ExtVal::one()]);
    }

    #[test]
    fn dtmc_reach_three_state_all_loops() {
        let m = three_state();
        let t = m.label("target").unwrap().clone();
        let d = m.induced_dtmc(&Strategy::new(vec![0, 0, 0])).unwrap();
        let v = dtmc_reach_exact(&d, &t).unwrap();
        assert_eq!(v, vec![ExtVal::zero(), fin(1, 2), ExtVal::one()]);
    }

    #[test]
    fn dtmc_reach_empty_target() {
        let m = half_loop_dtmc(rat(1, 1));
        let empty = StateSet::empty(2);
        let v = dtmc_reach_exact(&m, &empty).unwrap();
        assert_eq!(v, vec![ExtVal::zero(), ExtVal::zero()]);
    }

    #[test]
    fn dtmc_reward_half_loop_both_semantics() {
        let m = half_loop_dtmc(rat(1, 1));
        let t = m.label("target").unwrap().clone();
        for sem in [Semantics::Inf, Semantics::Rho] {
            let v = dtmc_reward_exact(&m, &t, m.rewards(), sem).unwrap();
            assert_eq!(v, vec![fin(2, 1), ExtVal::zero()], "{sem:?}");
        }
    }

    #[test]
    fn dtmc_reward_detour_chain_loop() {
        let m = detour_chain();
        let t = m.label("target").unwrap().clone();
        let d = m.induced_dtmc(&Strategy::new(vec![0, 0, 0])).unwrap();
        let inf = dtmc_reward_exact(&d, &t, d.rewards(), Semantics::Inf).unwrap();
        assert_eq!(inf[0], ExtVal::Infinity);
        let rho = dtmc_reward_exact(&d, &t, d.rewards(), Semantics::Rho).unwrap();
        assert_eq!(rho[0], ExtVal::zero());
    }

    #[test]
    fn dtmc_reward_zero_rewards() {
        let m = half_loop_dtmc(rat(0, 1));
        let t = m.label("target").unwrap().clone();
        let rho = dtmc_reward_exact(&m, &t, m.rewards(), Semantics::Rho).unwrap();
        assert_eq!(rho, vec![ExtVal::zero(), ExtVal::zero()]);
    }

    #[test]
    fn optimal_three_state() {
        let m = three_state();
        let res = optimal_exact(&m, &q(Objective::Pmin, None)).unwrap();
        assert_eq!(res.values, vec![ExtVal::zero(), fin(1, 2), ExtVal::one()]);
        let res = optimal_exact(&m, &q(Objective::Pmax, None)).unwrap();
        assert_eq!(res.values, vec![ExtVal::one(), ExtVal::one(), ExtVal::one()]);
    }

    #[test]
    fn optimal_self_loop_split_pmax() {
        let m = self_loop_split();
        let res = optimal_exact(&m, &q(Objective::Pmax, None)).unwrap();
        assert_eq!(res.values, vec![fin(1, 2), ExtVal::zero(), ExtVal::one()]);
    }

    #[test]
    fn optimal_detour_chain_rewards() {
        let m = detour_chain();
        let res = optimal_exact(&m, &q(Objective::Emin, Some(Semantics::Inf))).unwrap();
        assert_eq!(res.values, vec![fin(100, 1), fin(100, 1), ExtVal::zero()]);
        let res = optimal_exact(&m, &q(Objective::Emin, Some(Semantics::Rho))).unwrap();
        assert_eq!(res.values, vec![ExtVal::zero(), fin(100, 1), ExtVal::zero()]);
    }

    #[test]
    fn cap_is_enforced() {
        let m = three_state();
        let err = optimal_exact_capped(&m, &q(Objective::Pmin, None), 2).unwrap_err();
        assert!(matches!(err, OracleError::CapExceeded { size: 4, .. }));
    }
}
