//! The MDP model type, strategies, and well-formedness checking.

use std::collections::BTreeMap;

use num::traits::{One, Signed, Zero};
use thiserror::Error;

use crate::numeric::Rat;
use crate::stateset::StateSet;

/// One enabled action of a state: a sparse probability distribution over
/// successor states. Probabilities are strictly positive and sum to exactly 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Action {
    pub transitions: Vec<(usize, Rat)>,
}

/// A finite MDP over dense state indices `0..n`.
///
/// Labels map names to state sets; rewards default to the zero function and
/// are ignored by reachability queries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mdp {
    n: usize,
    actions: Vec<Vec<Action>>,
    labels: BTreeMap<String, StateSet>,
    rewards: Vec<Rat>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MdpError {
    #[error("state {state} has an empty action set")]
    EmptyActionSet { state: usize },
    #[error("distribution-sum mismatch at state {state}, action {action}: sum is {sum}")]
    DistributionSum { state: usize, action: usize, sum: String },
    #[error("non-positive probability at state {state}, action {action}")]
    NonPositiveProbability { state: usize, action: usize },
    #[error("out-of-range successor {succ} at state {state}, action {action}")]
    SuccessorOutOfRange { state: usize, action: usize, succ: usize },
    #[error("duplicate successor {succ} at state {state}, action {action}")]
    DuplicateSuccessor { state: usize, action: usize, succ: usize },
    #[error("negative reward at state {state}")]
    NegativeReward { state: usize },
    #[error("label '{label}' mentions out-of-range state")]
    LabelOutOfRange { label: String },
    #[error("strategy picks action {action} at state {state}, but only {enabled} enabled")]
    InvalidStrategyChoice { state: usize, action: usize, enabled: usize },
}

impl Mdp {
    /// Builds and validates an MDP in one step.
    pub fn new(
        actions: Vec<Vec<Action>>,
        labels: BTreeMap<String, StateSet>,
        rewards: Option<Vec<Rat>>,
    ) -> Result<Self, MdpError> {
        let n = actions.len();
        let rewards = rewards.unwrap_or_else(|| vec![Rat::zero(); n]);
        let m = Mdp { n, actions, labels, rewards };
        m.validate()?;
        Ok(m)
    }

    /// Checks all structural invariants, naming the first violation.
    pub fn validate(&self) -> Result<(), MdpError> {
        for (s, acts) in self.actions.iter().enumerate() {
            if acts.is_empty() {
                return Err(MdpError::EmptyActionSet { state: s });
            }
            for (a, act) in acts.iter().enumerate() {
                let mut sum = Rat::zero();
                let mut seen = vec![false; self.n];
                for (succ, p) in &act.transitions {
                    if *succ >= self.n {
                        return Err(MdpError::SuccessorOutOfRange { state: s, action: a, succ: *succ });
                    }
                    if seen[*succ] {
                        return Err(MdpError::DuplicateSuccessor { state: s, action: a, succ: *succ });
                    }
                    seen[*succ] = true;
                    if !p.is_positive() {
                        return Err(MdpError::NonPositiveProbability { state: s, action: a });
                    }
                    sum += p;
                }
                if !sum.is_one() {
                    return Err(MdpError::DistributionSum { state: s, action: a, sum: sum.to_string() });
                }
            }
        }
        if self.rewards.len() != self.n {
            return Err(MdpError::NegativeReward { state: self.rewards.len() });
        }
        for (s, r) in self.rewards.iter().enumerate() {
            if r.is_negative() {
                return Err(MdpError::NegativeReward { state: s });
            }
        }
        for (name, set) in &self.labels {
            if set.universe() != self.n {
                return Err(MdpError::LabelOutOfRange { label: name.clone() });
            }
        }
        Ok(())
    }

    pub fn num_states(&self) -> usize {
        self.n
    }

    pub fn enabled(&self, s: usize) -> &[Action] {
        &self.actions[s]
    }

    pub fn num_actions(&self, s: usize) -> usize {
        self.actions[s].len()
    }

    pub fn transitions(&self, s: usize, a: usize) -> &[(usize, Rat)] {
        &self.actions[s][a].transitions
    }

    pub fn labels(&self) -> &BTreeMap<String, StateSet> {
        &self.labels
    }

    pub fn label(&self, name: &str) -> Option<&StateSet> {
        self.labels.get(name)
    }

    pub fn reward(&self, s: usize) -> &Rat {
        &self.rewards[s]
    }

    pub fn rewards(&self) -> &[Rat] {
        &self.rewards
    }

    pub fn has_positive_reward(&self) -> bool {
        self.rewards.iter().any(|r| r.is_positive())
    }

    /// States with strictly positive reward.
    pub fn positive_reward_states(&self) -> StateSet {
        StateSet::from_iter(
            self.n,
            self.rewards
                .iter()
                .enumerate()
                .filter(|(_, r)| r.is_positive())
                .map(|(s, _)| s),
        )
    }

    /// True iff every state has exactly one enabled action.
    pub fn is_dtmc(&self) -> bool {
        self.actions.iter().all(|a| a.len() == 1)
    }

    /// Predecessor lists: `pre[t]` holds every `s` with an action reaching `t`.
    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pre = vec![Vec::new(); self.n];
        for s in 0..self.n {
            for act in &self.actions[s] {
                for (succ, _) in &act.transitions {
                    if pre[*succ].last() != Some(&s) {
                        pre[*succ].push(s);
                    }
                }
            }
        }
        for l in &mut pre {
            l.sort_unstable();
            l.dedup();
        }
        pre
    }

    /// The DTMC induced by a strategy: every state retains only the chosen
    /// action; labels and rewards are preserved.
    pub fn induced_dtmc(&self, strat: &Strategy) -> Result<Mdp, MdpError> {
        strat.validate(self)?;
        let actions = (0..self.n)
            .map(|s| vec![self.actions[s][strat.choice[s]].clone()])
            .collect();
        Ok(Mdp {
            n: self.n,
            actions,
            labels: self.labels.clone(),
            rewards: self.rewards.clone(),
        })
    }

    /// A copy in which every state of `absorb` keeps a single self-loop and a
    /// zero reward. Used to analyse "before reaching T" properties.
    pub fn with_absorbing(&self, absorb: &StateSet) -> Mdp {
        let mut out = self.clone();
        for s in absorb.iter() {
            out.actions[s] = vec![Action { transitions: vec![(s, Rat::one())] }];
            out.rewards[s] = Rat::zero();
        }
        out
    }
}

/// Memoryless deterministic strategy: one enabled action index per state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    pub choice: Vec<usize>,
}

impl Strategy {
    pub fn new(choice: Vec<usize>) -> Self {
        Strategy { choice }
    }

    pub fn validate(&self, m: &Mdp) -> Result<(), MdpError> {
        if self.choice.len() != m.num_states() {
            return Err(MdpError::InvalidStrategyChoice {
                state: self.choice.len(),
                action: 0,
                enabled: 0,
            });
        }
        for (s, a) in self.choice.iter().enumerate() {
            if *a >= m.num_actions(s) {
                return Err(MdpError::InvalidStrategyChoice {
                    state: s,
                    action: *a,
                    enabled: m.num_actions(s),
                });
            }
        }
        Ok(())
    }
}

/// Convenience builder used by tests and the model parser.
pub struct MdpBuilder {
    n: usize,
    actions: Vec<Vec<Action>>,
    labels: BTreeMap<String, Vec<usize>>,
    rewards: Vec<Rat>,
}

impl MdpBuilder {
    pub fn new(n: usize) -> Self {
        MdpBuilder {
            n,
            actions: vec![Vec::new(); n],
            labels: BTreeMap::new(),
            rewards: vec![Rat::zero(); n],
        }
    }

    pub fn action(mut self, state: usize, transitions: Vec<(usize, Rat)>) -> Self {
        self.actions[state].push(Action { transitions });
        self
    }

    pub fn push_action(&mut self, state: usize, transitions: Vec<(usize, Rat)>) {
        self.actions[state].push(Action { transitions });
    }

    pub fn label(mut self, name: &str, states: Vec<usize>) -> Self {
        self.labels.insert(name.to_string(), states);
        self
    }

    pub fn set_label(&mut self, name: &str, states: Vec<usize>) {
        self.labels.insert(name.to_string(), states);
    }

    pub fn reward(mut self, state: usize, r: Rat) -> Self {
        self.rewards[state] = r;
        self
    }

    pub fn set_reward(&mut self, state: usize, r: Rat) {
        self.rewards[state] = r;
    }

    pub fn build(self) -> Result<Mdp, MdpError> {
        let labels = self
            .labels
            .into_iter()
            .map(|(k, v)| (k, StateSet::from_iter(self.n, v)))
            .collect();
        Mdp::new(self.actions, labels, Some(self.rewards))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn three_state() -> Mdp {
        // States 0=z, 1=s, 2=t; solid action first, dashed second.
        MdpBuilder::new(3)
            .action(0, vec![(0, rat(1, 1))])
            .action(0, vec![(2, rat(1, 1))])
            .action(1, vec![(0, rat(1, 3)), (1, rat(1, 3)), (2, rat(1, 3))])
            .action(1, vec![(2, rat(1, 1))])
            .action(2, vec![(2, rat(1, 1))])
            .label("target", vec![2])
            .build()
            .unwrap()
    }

    #[test]
    fn three_state_is_valid() {
        let m = three_state();
        assert_eq!(m.num_states(), 3);
        assert!(m.validate().is_ok());
    }

    #[test]
    fn smallest_legal_mdp() {
        let m = MdpBuilder::new(1)
            .action(0, vec![(0, rat(1, 1))])
            .label("target", vec![0])
            .build()
            .unwrap();
        assert!(m.is_dtmc());
    }

    #[test]
    fn distribution_sum_mismatch() {
        let err = MdpBuilder::new(2)
            .action(0, vec![(0, rat(9, 10))])
            .action(1, vec![(1, rat(1, 1))])
            .build()
            .unwrap_err();
        assert!(matches!(err, MdpError::DistributionSum { state: 0, action: 0, .. }));
    }

    #[test]
    fn empty_action_set() {
        let err = MdpBuilder::new(1).build().unwrap_err();
        assert_eq!(err, MdpError::EmptyActionSet { state: 0 });
    }

    #[test]
    fn out_of_range_successor() {
        let err = MdpBuilder::new(1)
            .action(0, vec![(3, rat(1, 1))])
            .build()
            .unwrap_err();
        assert!(matches!(err, MdpError::SuccessorOutOfRange { succ: 3, .. }));
    }

    #[test]
    fn negative_reward_rejected() {
        let err = MdpBuilder::new(1)
            .action(0, vec![(0, rat(1, 1))])
            .reward(0, rat(-1, 2))
            .build()
            .unwrap_err();
        assert_eq!(err, MdpError::NegativeReward { state: 0 });
    }

    #[test]
    fn induced_dtmc_dashed() {
        // Dashed where defined (z, s), solid at t: both z and s jump to t.
        let m = three_state();
        let d = m.induced_dtmc(&Strategy::new(vec![1, 1, 0])).unwrap();
        assert!(d.is_dtmc());
        assert_eq!(d.transitions(0, 0), &[(2, rat(1, 1))]);
        assert_eq!(d.transitions(1, 0), &[(2, rat(1, 1))]);
        assert!(d.validate().is_ok());
    }

    #[test]
    fn induced_dtmc_solid() {
        // Solid everywhere: z absorbing, s cycles through {z, s, t}.
        let m = three_state();
        let d = m.induced_dtmc(&Strategy::new(vec![0, 0, 0])).unwrap();
        assert_eq!(d.transitions(0, 0), &[(0, rat(1, 1))]);
        assert_eq!(d.transitions(1, 0).len(), 3);
    }

    #[test]
    fn induced_dtmc_idempotent_on_dtmc() {
        let m = three_state();
        let d = m.induced_dtmc(&Strategy::new(vec![0, 1, 0])).unwrap();
        let again = d.induced_dtmc(&Strategy::new(vec![0, 0, 0])).unwrap();
        assert_eq!(d, again);
    }

    #[test]
    fn invalid_strategy_rejected() {
        let m = three_state();
        assert!(m.induced_dtmc(&Strategy::new(vec![0, 2, 0])).is_err());
    }
}
