//! Exact policy iteration on a prepared system. Inner linear systems are
//! solved with an exact rational LU factorization (a code path independent
//! of the oracle's fraction-free elimination).

use std::collections::VecDeque;

use mdpcert_core::graph::Opt;
use mdpcert_core::model::{Mdp, Strategy};
use mdpcert_core::numeric::{ExtVal, Rat, ValueVec};
use mdpcert_core::stateset::StateSet;
use num::traits::Zero;

use crate::prepare::{Kind, Prepared};
use crate::SolverError;

/// Solves `A x = b` by LU factorization with structural pivoting, exactly.
pub fn solve_lu(mut a: Vec<Vec<Rat>>, b: Vec<Rat>) -> Option<Vec<Rat>> {
    let n = b.len();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let pivot = (k..n).find(|&r| !a[r][k].is_zero())?;
        a.swap(k, pivot);
        perm.swap(k, pivot);
        let pivot_val = a[k][k].clone();
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = &a[i][k] / &pivot_val;
            for j in k + 1..n {
                let sub = &factor * &a[k][j];
                a[i][j] -= sub;
            }
            a[i][k] = factor; // store the multiplier in L
        }
    }
    // Forward substitution on the permuted right-hand side.
    let mut y: Vec<Rat> = perm.iter().map(|&i| b[i].clone()).collect();
    for i in 0..n {
        for j in 0..i {
            let sub = &a[i][j] * &y[j];
            y[i] -= sub;
        }
    }
    // Backward substitution.
    let mut x = vec![Rat::zero(); n];
    for i in (0..n).rev() {
        let mut acc = y[i].clone();
        for j in i + 1..n {
            acc -= &a[i][j] * &x[j];
        }
        x[i] = acc / &a[i][i];
    }
    Some(x)
}

const IMPROVEMENT_GUARD: usize = 100_000;

/// Exact optimal values and an optimal memoryless deterministic strategy.
pub fn policy_iteration(m: &Mdp, prep: &Prepared) -> Result<(ValueVec, Strategy), SolverError> {
    let q = prep.quotient();
    let nq = q.num_states();
    let free: Vec<usize> = prep.sweep_states(true);
    let is_free = StateSet::from_iter(nq, free.iter().copied());

    let mut choice: Vec<usize> = initial_strategy(prep, &free, &is_free);
    let mut values: Vec<ExtVal> = vec![ExtVal::zero(); nq];

    for _ in 0..IMPROVEMENT_GUARD {
        evaluate(prep, &free, &is_free, &choice, &mut values)?;
        let mut changed = false;
        for &s in &free {
            let current = lookahead(prep, s, choice[s], &values);
            let mut best = current.clone();
            let mut best_action = choice[s];
            for a in 0..q.num_actions(s) {
                if a == choice[s] {
                    continue;
                }
                let v = lookahead(prep, s, a, &values);
                let better = match prep.kind.opt() {
                    Opt::Min => v < best,
                    Opt::Max => v > best,
                };
                if better {
                    best = v;
                    best_action = a;
                }
            }
            if best_action != choice[s] {
                choice[s] = best_action;
                changed = true;
            }
        }
        if !changed {
            let original_values = prep.lift_values(&values, true);
            let strategy = assemble_strategy(m, prep, &choice);
            return Ok((original_values, strategy));
        }
    }
    Err(SolverError::ImprovementGuard)
}

fn initial_strategy(prep: &Prepared, free: &[usize], is_free: &StateSet) -> Vec<usize> {
    let q = prep.quotient();
    let nq = q.num_states();
    let mut choice = vec![0usize; nq];
    if prep.kind == Kind::Reach(Opt::Min) || prep.kind == Kind::Reach(Opt::Max) {
        return choice;
    }
    // Reward objectives for the minimizing player must start from a proper
    // policy with finite value: the witness that reaches the target region
    // almost surely. Its stay-inside invariant keeps it clear of the states
    // pinned at infinity.
    if prep.kind.opt() == Opt::Min {
        let (reach, witness) = mdpcert_core::graph::prob1_max_with_witness(q, &prep.q_target);
        for &s in free {
            debug_assert!(reach.contains(s), "free state must reach the target almost surely");
            if let Some(a) = witness[s] {
                choice[s] = a;
            }
        }
        let _ = is_free;
    }
    choice
}

/// One-step action value given the current evaluation.
fn lookahead(prep: &Prepared, s: usize, a: usize, values: &[ExtVal]) -> ExtVal {
    let q = prep.quotient();
    let mut acc = ExtVal::zero();
    for (t, p) in q.transitions(s, a) {
        acc = acc.add(&values[*t].scale(p));
    }
    if prep.kind.is_reward() {
        acc = acc.add(&ExtVal::from_rat(q.reward(s).clone()));
    }
    acc
}

/// Exact evaluation of the current strategy over the free states; pinned and
/// target states keep their fixed values. States from which the strategy
/// fails to reach the absorbing region are improper: infinite value for
/// rewards, handled by graph analysis for reachability they cannot occur.
fn evaluate(
    prep: &Prepared,
    free: &[usize],
    is_free: &StateSet,
    choice: &[usize],
    values: &mut [ExtVal],
) -> Result<(), SolverError> {
    let q = prep.quotient();
    let nq = q.num_states();
    let tv = if prep.kind.is_reward() { ExtVal::zero() } else { ExtVal::one() };
    for s in 0..nq {
        values[s] = if prep.q_target.contains(s) {
            tv.clone()
        } else if let Some(v) = &prep.fixed_upper[s] {
            v.clone()
        } else {
            ExtVal::zero() // placeholder, overwritten below
        };
    }

    // Free states that reach the absorbing boundary under the strategy.
    let mut proper = StateSet::empty(nq);
    let mut queue = VecDeque::new();
    for s in 0..nq {
        if !is_free.contains(s) {
            proper.insert(s);
            queue.push_back(s);
        }
    }
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); nq];
    for &s in free {
        for (t, _) in q.transitions(s, choice[s]) {
            preds[*t].push(s);
        }
    }
    while let Some(t) = queue.pop_front() {
        for &s in preds[t].clone().iter() {
            if !proper.contains(s) {
                proper.insert(s);
                queue.push_back(s);
            }
        }
    }

    // Improper free states: under the strategy they stay among free states
    // forever. For rewards this is an infinite value (collapsing removed all
    // zero-reward cycles); reachability cannot produce them.
    let mut infinite = StateSet::empty(nq);
    for &s in free {
        if !proper.contains(s) {
            if !prep.kind.is_reward() {
                return Err(SolverError::Internal("improper policy in reachability evaluation"));
            }
            infinite.insert(s);
        }
    }
    // Propagate infinity through strategy edges (the minimizing player will
    // improve away from these rows).
    loop {
        let mut changed = false;
        for &s in free {
            if infinite.contains(s) {
                continue;
            }
            let hits_inf = q
                .transitions(s, choice[s])
                .iter()
                .any(|(t, _)| infinite.contains(*t) || values[*t].is_infinite() && !is_free.contains(*t));
            if hits_inf {
                infinite.insert(s);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    for s in infinite.iter() {
        values[s] = ExtVal::Infinity;
    }

    let unknown: Vec<usize> = free.iter().copied().filter(|s| !infinite.contains(*s)).collect();
    if unknown.is_empty() {
        return Ok(());
    }
    let index: std::collections::HashMap<usize, usize> =
        unknown.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let k = unknown.len();
    let mut a = vec![vec![Rat::zero(); k]; k];
    let mut b = vec![Rat::zero(); k];
    for (row, &s) in unknown.iter().enumerate() {
        a[row][row] += Rat::from(num::BigInt::from(1));
        if prep.kind.is_reward() {
            b[row] += q.reward(s);
        }
        for (t, p) in q.transitions(s, choice[s]) {
            if let Some(col) = index.get(t) {
                a[row][*col] -= p;
            } else {
                match &values[*t] {
                    ExtVal::Finite(v) => b[row] += p * v,
                    ExtVal::Infinity => {
                        return Err(SolverError::Internal("finite row references infinity"))
                    }
                }
            }
        }
    }
    let x = solve_lu(a, b).ok_or(SolverError::Internal("singular policy evaluation"))?;
    for (i, s) in unknown.into_iter().enumerate() {
        values[s] = ExtVal::from_rat(x[i].clone());
    }
    Ok(())
}

/// Lifts the quotient strategy to the original model and fills in the
/// witness actions of pinned states.
fn assemble_strategy(m: &Mdp, prep: &Prepared, choice: &[usize]) -> Strategy {
    let mut strat = mdpcert_core::graph::lift_strategy(m, &prep.partition, &prep.collapsed, choice);
    for s in 0..m.num_states() {
        if let Some(a) = prep.pinned_action[s] {
            strat.choice[s] = a;
        }
    }
    strat
}
