//! Value iteration and interval iteration over a prepared system, with
//! optional smoothing and emulated binary rounding.

use mdpcert_core::bellman;
use mdpcert_core::graph::Opt;
use mdpcert_core::model::Mdp;
use mdpcert_core::numeric::{ExtVal, Rat, ValueVec};
use num::traits::{One, Zero};

use crate::config::{Rounding, SolverConfig};
use crate::prepare::{reward_upper_start, Kind, Prepared};
use crate::round::{round_directed, Direction};
use crate::SolverError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Below,
    Above,
}

/// Two-sided bounds, both already lifted to the original state space and
/// re-verified (co-)inductive in exact arithmetic.
#[derive(Clone, Debug)]
pub struct BoundPair {
    pub lower: ValueVec,
    pub upper: ValueVec,
}

/// Successor value source, resolved once before iterating.
enum Src {
    Target,
    Fixed(ExtVal),
    Buf(usize),
}

struct Row {
    actions: Vec<Vec<(Src, Rat)>>,
    reward: Rat,
}

struct Plan {
    rows: Vec<Row>,
    /// Quotient-state index per row.
    states: Vec<usize>,
    dir: Direction,
    bits: u32,
    repair: bool,
    gamma: Rat,
    one_minus_gamma: Rat,
    opt: Opt,
    reward: bool,
    target_value: ExtVal,
}

fn target_value(kind: Kind) -> ExtVal {
    if kind.is_reward() {
        ExtVal::zero()
    } else {
        ExtVal::one()
    }
}

impl Plan {
    fn build(prep: &Prepared, side: Side, cfg: &SolverConfig) -> Plan {
        let model = prep.quotient();
        let fixed = match side {
            Side::Below => &prep.fixed_lower,
            Side::Above => &prep.fixed_upper,
        };
        let states = prep.sweep_states(side == Side::Above);
        let rows = states
            .iter()
            .map(|&s| Row {
                reward: model.reward(s).clone(),
                actions: (0..model.num_actions(s))
                    .map(|a| {
                        model
                            .transitions(s, a)
                            .iter()
                            .map(|(t, p)| {
                                let src = if prep.q_target.contains(*t) {
                                    Src::Target
                                } else if let Some(v) = &fixed[*t] {
                                    Src::Fixed(v.clone())
                                } else {
                                    Src::Buf(*t)
                                };
                                (src, p.clone())
                            })
                            .collect()
                    })
                    .collect(),
            })
            .collect();
        let dir = match cfg.rounding {
            Rounding::Safe => match side {
                Side::Below => Direction::Down,
                Side::Above => Direction::Up,
            },
            Rounding::None => Direction::Nearest,
        };
        Plan {
            rows,
            states,
            dir,
            bits: cfg.precision_bits,
            repair: cfg.rounding == Rounding::Safe,
            gamma: cfg.gamma.clone(),
            one_minus_gamma: Rat::one() - &cfg.gamma,
            opt: prep.kind.opt(),
            reward: prep.kind.is_reward(),
            target_value: target_value(prep.kind),
        }
    }

    fn round(&self, v: Rat) -> Rat {
        round_directed(&v, self.dir, self.bits)
    }

    /// One Jacobi sweep from `prev` into `next` (both quotient-indexed).
    fn sweep(&self, prev: &[ExtVal], next: &mut [ExtVal]) {
        for (row, &s) in self.rows.iter().zip(&self.states) {
            let mut best: Option<ExtVal> = None;
            for action in &row.actions {
                let mut acc = Rat::zero();
                let mut infinite = false;
                for (src, p) in action {
                    let value = match src {
                        Src::Target => &self.target_value,
                        Src::Fixed(v) => v,
                        Src::Buf(t) => &prev[*t],
                    };
                    match value {
                        ExtVal::Infinity => {
                            infinite = true;
                            break;
                        }
                        ExtVal::Finite(v) => {
                            if !v.is_zero() {
                                let term = self.round(p * v);
                                acc = self.round(acc + term);
                            }
                        }
                    }
                }
                let value = if infinite { ExtVal::Infinity } else { ExtVal::Finite(acc) };
                best = Some(match (best, self.opt) {
                    (None, _) => value,
                    (Some(b), Opt::Min) => b.min(value),
                    (Some(b), Opt::Max) => b.max(value),
                });
            }
            let mut out = best.expect("nonempty action set");
            if self.reward && !row.reward.is_zero() {
                out = match out {
                    ExtVal::Finite(v) => ExtVal::Finite(self.round(v + &row.reward)),
                    ExtVal::Infinity => ExtVal::Infinity,
                };
            }
            if !self.gamma.is_zero() {
                out = match (&prev[s], out) {
                    (ExtVal::Finite(old), ExtVal::Finite(new)) => {
                        let a = self.round(&self.gamma * old);
                        let b = self.round(&self.one_minus_gamma * &new);
                        ExtVal::Finite(self.round(a + b))
                    }
                    _ => ExtVal::Infinity,
                };
            }
            if self.repair {
                out = match self.dir {
                    Direction::Down => out.max(prev[s].clone()),
                    Direction::Up => out.min(prev[s].clone()),
                    Direction::Nearest => out,
                };
            }
            next[s] = out;
        }
    }
}

fn initial_buffer(prep: &Prepared, side: Side, cfg: &SolverConfig) -> Vec<ExtVal> {
    let nq = prep.quotient().num_states();
    match side {
        Side::Below => vec![ExtVal::zero(); nq],
        Side::Above => {
            if prep.kind.is_reward() {
                let bound = reward_upper_start(prep);
                let rounded = round_directed(&bound, Direction::Up, cfg.precision_bits);
                vec![ExtVal::Finite(rounded); nq]
            } else {
                vec![ExtVal::one(); nq]
            }
        }
    }
}

/// `hi - lo <= eps * hi`, the relative-width test (vacuous at equality,
/// never satisfied between a finite value and infinity).
fn within_rel(lo: &ExtVal, hi: &ExtVal, eps: &Rat) -> bool {
    match (lo, hi) {
        (ExtVal::Infinity, ExtVal::Infinity) => true,
        (ExtVal::Finite(l), ExtVal::Finite(h)) => {
            if h <= l {
                return true;
            }
            (h - l) <= eps * h
        }
        _ => false,
    }
}

/// Runs one-sided value iteration until the successive relative change drops
/// below epsilon; returns the original-indexed vector.
pub fn value_iteration(
    m: &Mdp,
    prep: &Prepared,
    side: Side,
    cfg: &SolverConfig,
) -> Result<ValueVec, SolverError> {
    let _ = m;
    let plan = Plan::build(prep, side, cfg);
    let mut prev = initial_buffer(prep, side, cfg);
    let mut next = prev.clone();
    for _ in 0..cfg.max_sweeps {
        plan.sweep(&prev, &mut next);
        let converged = plan.states.iter().all(|&q| {
            let (a, b) = if next[q] <= prev[q] { (&next[q], &prev[q]) } else { (&prev[q], &next[q]) };
            within_rel(a, b, &cfg.epsilon)
        });
        std::mem::swap(&mut prev, &mut next);
        if converged {
            return Ok(prep.lift_values(&prev, side == Side::Above));
        }
    }
    Err(SolverError::NonConvergence { sweeps: cfg.max_sweeps })
}

/// Runs the two value-iteration instances in parallel until the per-state
/// relative width is within epsilon, then re-verifies the lifted pair
/// (co-)inductive in exact arithmetic.
pub fn interval_iteration(
    m: &Mdp,
    prep: &Prepared,
    cfg: &SolverConfig,
) -> Result<BoundPair, SolverError> {
    let lower_plan = Plan::build(prep, Side::Below, cfg);
    let upper_plan = Plan::build(prep, Side::Above, cfg);
    let mut lower = initial_buffer(prep, Side::Below, cfg);
    let mut upper = initial_buffer(prep, Side::Above, cfg);
    let mut lower_next = lower.clone();
    let mut upper_next = upper.clone();
    let nq = prep.quotient().num_states();

    let mut converged = false;
    for _ in 0..cfg.max_sweeps {
        lower_plan.sweep(&lower, &mut lower_next);
        upper_plan.sweep(&upper, &mut upper_next);
        std::mem::swap(&mut lower, &mut lower_next);
        std::mem::swap(&mut upper, &mut upper_next);
        let done = (0..nq).all(|q| {
            if prep.q_target.contains(q) {
                return true;
            }
            let l = prep.fixed_lower[q].as_ref().unwrap_or(&lower[q]);
            let u = prep.fixed_upper[q].as_ref().unwrap_or(&upper[q]);
            match (l.is_infinite(), u.is_infinite()) {
                (false, true) => {
                    // Only legitimate where the upper bound is pinned at a
                    // genuinely infinite value; no gap requirement applies.
                    prep.fixed_upper[q].as_ref().is_some_and(|v| v.is_infinite())
                }
                _ => {
                    let (a, b) = if l <= u { (l, u) } else { (u, l) };
                    within_rel(a, b, &cfg.epsilon)
                }
            }
        });
        if done {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(SolverError::NonConvergence { sweeps: cfg.max_sweeps });
    }

    let lower_lifted = prep.lift_values(&lower, false);
    let upper_lifted = prep.lift_values(&upper, true);
    verify_pair(m, prep, &lower_lifted, &upper_lifted)?;
    Ok(BoundPair { lower: lower_lifted, upper: upper_lifted })
}

/// Exact (co-)inductivity gate. Lower vectors must be co-inductive and upper
/// vectors inductive for the operators the certificates are checked against.
pub fn verify_pair(
    m: &Mdp,
    prep: &Prepared,
    lower: &[ExtVal],
    upper: &[ExtVal],
) -> Result<(), SolverError> {
    let opt = prep.kind.opt();
    let (b_lower, b_upper) = match prep.kind {
        Kind::Reach(_) => (
            bellman::apply_reach(m, opt, &prep.target, lower),
            bellman::apply_reach(m, opt, &prep.target, upper),
        ),
        Kind::Reward(..) => (
            // Lower reward bounds are certified against the enlarged target
            // set; upper bounds against the original one.
            bellman::apply_reward(m, opt, &prep.solve_target, m.rewards(), lower),
            bellman::apply_reward(m, opt, &prep.target, m.rewards(), upper),
        ),
    };
    for s in 0..m.num_states() {
        if lower[s] > b_lower[s] {
            return Err(SolverError::FloatBreakage { side: Side::Below, state: s });
        }
    }
    for s in 0..m.num_states() {
        if b_upper[s] > upper[s] {
            return Err(SolverError::FloatBreakage { side: Side::Above, state: s });
        }
    }
    Ok(())
}

/// Componentwise `gamma * x + (1 - gamma) * B(x)` in exact arithmetic; same
/// fixed points as the base operator and, over probability vectors,
/// equivalent (co-)inductivity.
pub fn smooth_step(
    m: &Mdp,
    kind: Kind,
    target: &mdpcert_core::stateset::StateSet,
    gamma: &Rat,
    x: &[ExtVal],
) -> ValueVec {
    let opt = kind.opt();
    let bx = match kind {
        Kind::Reach(_) => bellman::apply_reach(m, opt, target, x),
        Kind::Reward(..) => bellman::apply_reward(m, opt, target, m.rewards(), x),
    };
    if gamma.is_zero() {
        return bx;
    }
    let one_minus = Rat::one() - gamma;
    x.iter()
        .zip(bx)
        .map(|(xv, bv)| xv.scale(gamma).add(&bv.scale(&one_minus)))
        .collect()
}
