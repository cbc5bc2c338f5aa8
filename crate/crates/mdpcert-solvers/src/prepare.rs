//! Objective-specific preprocessing shared by the iterative solvers and
//! policy iteration: qualitative pinning, end-component collapsing, and the
//! bookkeeping to lift results back to the original model.

use mdpcert_core::certificate::{Objective, Query, Semantics};
use mdpcert_core::graph::{self, Collapsed, MecPartition, Opt};
use mdpcert_core::model::Mdp;
use mdpcert_core::numeric::{ExtVal, Rat, ValueVec};
use mdpcert_core::stateset::StateSet;
use num::traits::Zero;

/// What a prepared system computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Reach(Opt),
    Reward(Opt, Semantics),
}

impl Kind {
    pub fn from_query(q: &Query) -> Kind {
        match q.objective {
            Objective::Pmin => Kind::Reach(Opt::Min),
            Objective::Pmax => Kind::Reach(Opt::Max),
            Objective::Emin => Kind::Reward(Opt::Min, q.semantics_or_default()),
            Objective::Emax => Kind::Reward(Opt::Max, q.semantics_or_default()),
        }
    }

    pub fn opt(self) -> Opt {
        match self {
            Kind::Reach(o) => o,
            Kind::Reward(o, _) => o,
        }
    }

    pub fn is_reward(self) -> bool {
        matches!(self, Kind::Reward(..))
    }
}

/// A pinned-and-collapsed system ready for iteration or policy iteration.
pub struct Prepared {
    pub kind: Kind,
    /// The original model and target set.
    pub target: StateSet,
    /// Enlarged target used while solving (reward zero-value states join the
    /// target under accumulate-forever semantics); equals `target` otherwise.
    pub solve_target: StateSet,
    pub partition: MecPartition,
    pub collapsed: Collapsed,
    /// Quotient image of `solve_target`.
    pub q_target: StateSet,
    /// Quotient states with a pinned value in from-below sweeps.
    pub fixed_lower: Vec<Option<ExtVal>>,
    /// Quotient states with a pinned value in from-above sweeps (and in
    /// policy iteration).
    pub fixed_upper: Vec<Option<ExtVal>>,
    /// Original-state witness actions realizing the pinned values (used when
    /// assembling a strategy).
    pub pinned_action: Vec<Option<usize>>,
}

impl Prepared {
    pub fn quotient(&self) -> &Mdp {
        &self.collapsed.mdp
    }

    /// Quotient states actually swept from the given side.
    pub fn sweep_states(&self, from_above: bool) -> Vec<usize> {
        let fixed = if from_above { &self.fixed_upper } else { &self.fixed_lower };
        (0..self.quotient().num_states())
            .filter(|&q| fixed[q].is_none() && !self.q_target.contains(q))
            .collect()
    }

    /// Assembles an original-indexed value vector from a quotient-indexed
    /// buffer, target values, and pinned values.
    pub fn lift_values(&self, buffer: &[ExtVal], from_above: bool) -> ValueVec {
        let fixed = if from_above { &self.fixed_upper } else { &self.fixed_lower };
        let target_value = if self.kind.is_reward() { ExtVal::zero() } else { ExtVal::one() };
        (0..self.target.universe())
            .map(|s| {
                let q = self.collapsed.lift[s];
                if self.q_target.contains(q) {
                    target_value.clone()
                } else if let Some(v) = &fixed[q] {
                    v.clone()
                } else {
                    buffer[q].clone()
                }
            })
            .collect()
    }
}

/// Builds the prepared system for a query kind over `m` with target `target`.
pub fn prepare(m: &Mdp, target: &StateSet, kind: Kind) -> Prepared {
    match kind {
        Kind::Reach(opt) => prepare_reach(m, target, opt),
        Kind::Reward(opt, Semantics::Inf) => prepare_reward_inf(m, target, opt),
        Kind::Reward(opt, Semantics::Rho) => prepare_reward_rho(m, target, opt),
    }
}

fn prepare_reach(m: &Mdp, target: &StateSet, opt: Opt) -> Prepared {
    let n = m.num_states();
    let s0 = graph::prob0_states(m, opt, target);
    let (s1, s1_witness) = match opt {
        Opt::Max => graph::prob1_max_with_witness(m, target),
        Opt::Min => (graph::prob1_states(m, Opt::Min, target), vec![None; n]),
    };
    let mut free = StateSet::empty(n);
    for s in 0..n {
        if !s0.contains(s) && !s1.contains(s) {
            free.insert(s);
        }
    }
    // End components among free states are what makes the Bellman operator's
    // fixed point non-unique; collapse them. (For minimizing there are none.)
    let partition = graph::mec_decomposition_restricted(m, &free, |_, _| true);
    let collapsed = graph::collapse_mecs(m, &partition, target);
    let nq = collapsed.mdp.num_states();

    let mut fixed_lower = vec![None; nq];
    let mut fixed_upper = vec![None; nq];
    for s in s0.iter() {
        fixed_lower[collapsed.lift[s]] = Some(ExtVal::zero());
        fixed_upper[collapsed.lift[s]] = Some(ExtVal::zero());
    }
    for s in s1.iter() {
        if !target.contains(s) {
            // Pinning the almost-sure states at one is sound for upper
            // vectors but would break co-inductivity of lower vectors, so
            // the from-below sweep leaves them free.
            fixed_upper[collapsed.lift[s]] = Some(ExtVal::one());
        }
    }

    let stay = graph::staying_actions(m, &s0);
    let mut pinned_action = vec![None; n];
    for s in 0..n {
        if s0.contains(s) {
            pinned_action[s] = match opt {
                Opt::Min => stay[s],
                Opt::Max => Some(0),
            };
        } else if s1.contains(s) && !target.contains(s) {
            pinned_action[s] = match opt {
                Opt::Max => s1_witness[s],
                Opt::Min => Some(0),
            };
        }
    }

    let q_target = StateSet::from_iter(nq, target.iter().map(|s| collapsed.lift[s]));
    Prepared {
        kind: Kind::Reach(opt),
        target: target.clone(),
        solve_target: target.clone(),
        partition,
        collapsed,
        q_target,
        fixed_lower,
        fixed_upper,
        pinned_action,
    }
}

/// States with infinite expected reward under the infinity semantics: those
/// where the opposite player cannot force reaching the target almost surely.
fn reward_inf_infinite_set(m: &Mdp, target: &StateSet, opt: Opt) -> StateSet {
    graph::prob1_states(m, opt.flip(), target).complement()
}

/// A witness action per state of `inf_set` under which the strategy realizes
/// an infinite expected reward (maximizing case): walk, avoiding the target,
/// towards the region where the target can be avoided surely, then stay.
fn infinite_witness_max(m: &Mdp, target: &StateSet, inf_set: &StateSet) -> Vec<Option<usize>> {
    let avoid_core = graph::prob0_states(m, Opt::Min, target);
    let stay = graph::staying_actions(m, &avoid_core);
    let mut witness: Vec<Option<usize>> = stay.clone();
    // Backward layers: pick an action with a successor already covered.
    let mut covered: StateSet = avoid_core;
    loop {
        let mut changed = false;
        for s in inf_set.iter() {
            if covered.contains(s) || target.contains(s) {
                continue;
            }
            for a in 0..m.num_actions(s) {
                if m.transitions(s, a).iter().any(|(t, _)| covered.contains(*t)) {
                    witness[s] = Some(a);
                    covered.insert(s);
                    changed = true;
                    break;
                }
            }
        }
        if !changed {
            break;
        }
    }
    witness
}

/// States with expected reward exactly zero: the target is reached almost
/// surely without ever visiting a positive-reward state (for the maximizing
/// player: under every strategy).
fn reward_zero_set(m: &Mdp, target: &StateSet, opt: Opt) -> StateSet {
    let n = m.num_states();
    let blocked = StateSet::from_iter(
        n,
        (0..n).filter(|&s| !target.contains(s) && num::traits::Signed::is_positive(m.reward(s))),
    );
    let m0 = m.with_absorbing(&blocked);
    match opt {
        Opt::Min => graph::prob1_states(&m0, Opt::Max, target),
        Opt::Max => {
            // Every strategy accumulates zero before the target: positive
            // reward is unreachable in the target-absorbed model, and the
            // target is reached almost surely by all strategies.
            let mt = m.with_absorbing(target);
            let pos = mt.positive_reward_states();
            let no_positive = graph::prob0_states(&mt, Opt::Max, &pos);
            let surely = graph::prob1_states(&m0, Opt::Min, target);
            StateSet::from_iter(n, surely.iter().filter(|&s| no_positive.contains(s)))
        }
    }
}

fn prepare_reward_inf(m: &Mdp, target: &StateSet, opt: Opt) -> Prepared {
    let n = m.num_states();
    let inf_set = reward_inf_infinite_set(m, target, opt);
    // Pin the exact-zero states: their relative gap would otherwise never
    // close under iteration, and pinning gives certificates exact zeros.
    let zero_set = reward_zero_set(m, target, opt);
    let mut free = StateSet::empty(n);
    for s in 0..n {
        if !inf_set.contains(s) && !target.contains(s) && !zero_set.contains(s) {
            free.insert(s);
        }
    }
    // Zero-reward end components hide spurious fixed points from the
    // minimizing player; the maximizing remainder has no end components.
    let partition = match opt {
        Opt::Min => graph::zero_reward_mecs(m, &free),
        Opt::Max => graph::MecPartition {
            components: Vec::new(),
            component_of: vec![None; n],
        },
    };
    let collapsed = graph::collapse_mecs(m, &partition, target);
    let nq = collapsed.mdp.num_states();

    let mut fixed_lower = vec![None; nq];
    let mut fixed_upper = vec![None; nq];
    for s in inf_set.iter() {
        fixed_lower[collapsed.lift[s]] = Some(ExtVal::Infinity);
        fixed_upper[collapsed.lift[s]] = Some(ExtVal::Infinity);
    }
    for s in zero_set.iter() {
        if !target.contains(s) {
            fixed_lower[collapsed.lift[s]] = Some(ExtVal::zero());
            fixed_upper[collapsed.lift[s]] = Some(ExtVal::zero());
        }
    }

    let mut pinned_action = vec![None; n];
    match opt {
        Opt::Max => {
            let witness = infinite_witness_max(m, target, &inf_set);
            for s in inf_set.iter() {
                pinned_action[s] = witness[s].or(Some(0));
            }
            for s in zero_set.iter() {
                if !target.contains(s) {
                    pinned_action[s] = Some(0);
                }
            }
        }
        Opt::Min => {
            for s in inf_set.iter() {
                pinned_action[s] = Some(0);
            }
            // Witness reaching the target almost surely through zero reward.
            let blocked = StateSet::from_iter(
                n,
                (0..n).filter(|&s| {
                    !target.contains(s) && num::traits::Signed::is_positive(m.reward(s))
                }),
            );
            let m0 = m.with_absorbing(&blocked);
            let (_, witness) = graph::prob1_max_with_witness(&m0, target);
            for s in zero_set.iter() {
                if !target.contains(s) {
                    pinned_action[s] = witness[s].or(Some(0));
                }
            }
        }
    }

    let q_target = StateSet::from_iter(nq, target.iter().map(|s| collapsed.lift[s]));
    Prepared {
        kind: Kind::Reward(opt, Semantics::Inf),
        target: target.clone(),
        solve_target: target.clone(),
        partition,
        collapsed,
        q_target,
        fixed_lower,
        fixed_upper,
        pinned_action,
    }
}

fn prepare_reward_rho(m: &Mdp, target: &StateSet, opt: Opt) -> Prepared {
    let n = m.num_states();
    // Analyse "before reaching the target" properties on the absorbed copy.
    let mt = m.with_absorbing(target);
    let pos = mt.positive_reward_states();

    let (zero_set, inf_set) = match opt {
        Opt::Min => {
            // Zero value: positive reward avoidable forever.
            let z = graph::prob0_states(&mt, Opt::Min, &pos);
            // Finite value requires being able to almost surely reach the
            // zero region (which contains the absorbed target states).
            let inf = graph::prob1_states(&mt, Opt::Max, &z).complement();
            (z, inf)
        }
        Opt::Max => {
            let z = graph::prob0_states(&mt, Opt::Max, &pos);
            // Infinite value: some end component containing positive reward
            // is reachable.
            let mecs = graph::mec_decomposition(&mt);
            let pos_rec = StateSet::from_iter(
                n,
                pos.iter().filter(|&s| mecs.component_of[s].is_some()),
            );
            let mut inf = pos_rec.clone();
            loop {
                let mut changed = false;
                for s in 0..n {
                    if inf.contains(s) {
                        continue;
                    }
                    let reaches = (0..mt.num_actions(s)).any(|a| {
                        mt.transitions(s, a).iter().any(|(t, _)| inf.contains(*t))
                    });
                    if reaches {
                        inf.insert(s);
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            (z, inf)
        }
    };

    let mut solve_target = zero_set.clone();
    solve_target.union_with(target);
    let mut free = StateSet::empty(n);
    for s in 0..n {
        if !inf_set.contains(s) && !solve_target.contains(s) {
            free.insert(s);
        }
    }
    // Any zero-reward cycle among free states would be avoidable forever and
    // hence part of the zero set for the minimizing player; only the
    // maximizing case needs collapsing.
    let partition = match opt {
        Opt::Max => graph::zero_reward_mecs(m, &free),
        Opt::Min => graph::MecPartition {
            components: Vec::new(),
            component_of: vec![None; n],
        },
    };
    let collapsed = graph::collapse_mecs(m, &partition, &solve_target);
    let nq = collapsed.mdp.num_states();

    let mut fixed_lower = vec![None; nq];
    let mut fixed_upper = vec![None; nq];
    for s in inf_set.iter() {
        fixed_upper[collapsed.lift[s]] = Some(ExtVal::Infinity);
        // The from-below sweep of the maximizing case stays finite so that
        // the emitted lower vectors satisfy the rank conditions; see the
        // generation module.
        if opt == Opt::Min {
            fixed_lower[collapsed.lift[s]] = Some(ExtVal::Infinity);
        }
    }

    let mut pinned_action = vec![None; n];
    let stay = graph::staying_actions(&mt, &zero_set);
    for s in zero_set.iter() {
        if !target.contains(s) {
            pinned_action[s] = stay[s].or(Some(0));
        }
    }
    match opt {
        Opt::Max => {
            // Reach a positive-reward end component, then cycle through its
            // positive state forever.
            let mecs = graph::mec_decomposition(&mt);
            let mut choice = vec![0usize; n];
            let mut have = vec![false; n];
            for (c, mec) in mecs.components.iter().enumerate() {
                if let Some(p) = mec.states.iter().find(|&s| pos.contains(s)) {
                    graph::route_inside_mec(&mt, mec, p, &mut choice);
                    // At the positive state itself, keep cycling inside.
                    if let Some((_, acts)) = mec.internal.iter().find(|(s, _)| *s == p) {
                        choice[p] = acts[0];
                    }
                    for s in mec.states.iter() {
                        have[s] = true;
                    }
                    let _ = c;
                }
            }
            // Walk towards the covered components.
            loop {
                let mut changed = false;
                for s in inf_set.iter() {
                    if have[s] || target.contains(s) {
                        continue;
                    }
                    for a in 0..mt.num_actions(s) {
                        if mt.transitions(s, a).iter().any(|(t, _)| have[*t]) {
                            choice[s] = a;
                            have[s] = true;
                            changed = true;
                            break;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            for s in inf_set.iter() {
                if have[s] {
                    pinned_action[s] = Some(choice[s]);
                }
            }
        }
        Opt::Min => {
            for s in inf_set.iter() {
                pinned_action[s] = Some(0);
            }
        }
    }

    let q_target = StateSet::from_iter(nq, solve_target.iter().map(|s| collapsed.lift[s]));
    Prepared {
        kind: Kind::Reward(opt, Semantics::Rho),
        target: target.clone(),
        solve_target,
        partition,
        collapsed,
        q_target,
        fixed_lower,
        fixed_upper,
        pinned_action,
    }
}

/// A finite upper bound on the expected reward of every properly absorbing
/// strategy: maximum reward times the expected absorption time bound
/// `|F| / p_min^{|F|}`.
pub fn reward_upper_start(prep: &Prepared) -> Rat {
    use num::traits::One;
    let q = prep.quotient();
    let sweep = prep.sweep_states(true);
    if sweep.is_empty() {
        return Rat::zero();
    }
    let mut p_min: Option<Rat> = None;
    let mut rew_max = Rat::zero();
    for &s in &sweep {
        if q.reward(s) > &rew_max {
            rew_max = q.reward(s).clone();
        }
        for a in 0..q.num_actions(s) {
            for (_, p) in q.transitions(s, a) {
                if p_min.as_ref().is_none_or(|m| p < m) {
                    p_min = Some(p.clone());
                }
            }
        }
    }
    if rew_max.is_zero() {
        return Rat::zero();
    }
    let p_min = p_min.unwrap_or_else(Rat::one);
    let mut denom = Rat::one();
    for _ in 0..sweep.len() {
        denom *= &p_min;
    }
    Rat::from(num::BigInt::from(sweep.len() as u64)) * rew_max / denom
}
