//! Qualitative graph analyses: almost-sure/zero reachability sets, maximal
//! end component decomposition, and end-component collapsing.
//!
//! Everything here is exact set computation; no numerics are involved.

use std::collections::VecDeque;

use num::traits::Zero;
use num::One;

use crate::model::{Action, Mdp, Strategy};
use crate::numeric::{Rank, Rat};
use crate::ranking;
use crate::stateset::StateSet;

/// Optimization direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Opt {
    Min,
    Max,
}

impl Opt {
    pub fn flip(self) -> Opt {
        match self {
            Opt::Min => Opt::Max,
            Opt::Max => Opt::Min,
        }
    }
}

/// `{s | P_s^opt(eventually T) = 0}`.
///
/// Realized through the unique fixed point of the distance operator for the
/// opposite direction: the zero-probability states are exactly those with
/// infinite distance.
pub fn prob0_states(m: &Mdp, opt: Opt, target: &StateSet) -> StateSet {
    let fp = ranking::fixed_point_distance(m, opt.flip(), target);
    StateSet::from_iter(
        m.num_states(),
        fp.iter().enumerate().filter(|(_, r)| r.is_infinite()).map(|(s, _)| s),
    )
}

/// `{s | P_s^opt(eventually T) = 1}` by the classical set iterations.
pub fn prob1_states(m: &Mdp, opt: Opt, target: &StateSet) -> StateSet {
    match opt {
        Opt::Max => prob1_max_with_witness(m, target).0,
        Opt::Min => prob1_min(m, target),
    }
}

/// Prob1 for the maximizing player, together with a memoryless witness
/// action for every non-target state of the result. Following the witness
/// reaches the target almost surely.
pub fn prob1_max_with_witness(m: &Mdp, target: &StateSet) -> (StateSet, Vec<Option<usize>>) {
    let n = m.num_states();
    let mut u = StateSet::full(n);
    let mut witness = vec![None; n];
    loop {
        // R := states that can reach T with positive probability while
        // staying inside U.
        let mut r = target.clone();
        let mut wit = vec![None; n];
        loop {
            let mut changed = false;
            for s in 0..n {
                if r.contains(s) || !u.contains(s) {
                    continue;
                }
                for (a, act) in m.enabled(s).iter().enumerate() {
                    let stays = act.transitions.iter().all(|(t, _)| u.contains(*t));
                    let progress = act.transitions.iter().any(|(t, _)| r.contains(*t));
                    if stays && progress {
                        r.insert(s);
                        wit[s] = Some(a);
                        changed = true;
                        break;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if r == u {
            witness = wit;
            break;
        }
        u = r;
    }
    (u, witness)
}

/// Prob1 for the minimizing player: the complement of the states from which
/// some strategy reaches, avoiding `T`, a state where `T` can be avoided
/// surely.
fn prob1_min(m: &Mdp, target: &StateSet) -> StateSet {
    let zero = prob0_states(m, Opt::Min, target);
    // Backward existential closure of `zero` through non-target states.
    let pre = m.predecessors();
    let mut bad = zero.clone();
    let mut queue: VecDeque<usize> = bad.iter().collect();
    while let Some(t) = queue.pop_front() {
        for &s in &pre[t] {
            if bad.contains(s) || target.contains(s) {
                continue;
            }
            let reaches = m
                .enabled(s)
                .iter()
                .any(|act| act.transitions.iter().any(|(succ, _)| bad.contains(*succ)));
            if reaches {
                bad.insert(s);
                queue.push_back(s);
            }
        }
    }
    bad.complement()
}

/// For every state of `z` (a set closed under some action) returns the lowest
/// action whose support stays inside `z`, if one exists.
pub fn staying_actions(m: &Mdp, z: &StateSet) -> Vec<Option<usize>> {
    (0..m.num_states())
        .map(|s| {
            if !z.contains(s) {
                return None;
            }
            m.enabled(s)
                .iter()
                .position(|act| act.transitions.iter().all(|(t, _)| z.contains(*t)))
        })
        .collect()
}

/// A maximal end component: its states plus the retained (internal) actions.
#[derive(Clone, Debug)]
pub struct Mec {
    pub states: StateSet,
    /// Per member state, the action indices whose support stays inside.
    pub internal: Vec<(usize, Vec<usize>)>,
}

/// Result of MEC decomposition. States in no nontrivial MEC map to `None`.
#[derive(Clone, Debug)]
pub struct MecPartition {
    pub components: Vec<Mec>,
    pub component_of: Vec<Option<usize>>,
}

/// All maximal end components of `m`.
pub fn mec_decomposition(m: &Mdp) -> MecPartition {
    mec_decomposition_restricted(m, &StateSet::full(m.num_states()), |_, _| true)
}

/// MEC decomposition of the sub-MDP induced by `states` and the actions
/// accepted by `action_ok` (actions whose support leaves `states` are
/// discarded regardless).
pub fn mec_decomposition_restricted(
    m: &Mdp,
    states: &StateSet,
    action_ok: impl Fn(usize, usize) -> bool,
) -> MecPartition {
    let n = m.num_states();
    let mut retained: Vec<Vec<usize>> = (0..n)
        .map(|s| {
            if !states.contains(s) {
                return Vec::new();
            }
            m.enabled(s)
                .iter()
                .enumerate()
                .filter(|(a, act)| {
                    action_ok(s, *a)
                        && act.transitions.iter().all(|(t, _)| states.contains(*t))
                })
                .map(|(a, _)| a)
                .collect()
        })
        .collect();

    loop {
        let scc = scc_ids(n, |s| {
            retained[s]
                .iter()
                .flat_map(|a| m.transitions(s, *a).iter().map(|(t, _)| *t))
                .collect::<Vec<_>>()
        });
        let mut changed = false;
        for s in 0..n {
            retained[s].retain(|a| {
                let ok = m
                    .transitions(s, *a)
                    .iter()
                    .all(|(t, _)| scc[*t] == scc[s]);
                if !ok {
                    changed = true;
                }
                ok
            });
        }
        if !changed {
            // Nontrivial SCCs of the stable graph are the MECs.
            let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
            for s in 0..n {
                if !retained[s].is_empty() {
                    groups[scc[s]].push(s);
                }
            }
            let mut components = Vec::new();
            let mut component_of = vec![None; n];
            for group in groups.into_iter().filter(|g| !g.is_empty()) {
                let nontrivial = group.len() > 1
                    || m.transitions(group[0], retained[group[0]][0])
                        .iter()
                        .any(|(t, _)| *t == group[0]);
                // A single state whose retained actions are all self-loops is
                // a legitimate (trivial-cycle) MEC; a state that lost all its
                // actions is not.
                if !nontrivial {
                    continue;
                }
                let idx = components.len();
                for &s in &group {
                    component_of[s] = Some(idx);
                }
                components.push(Mec {
                    states: StateSet::from_iter(n, group.iter().copied()),
                    internal: group.iter().map(|&s| (s, retained[s].clone())).collect(),
                });
            }
            return MecPartition { components, component_of };
        }
    }
}

/// Iterative Tarjan SCC; returns a component id per vertex.
fn scc_ids(n: usize, succ: impl Fn(usize) -> Vec<usize>) -> Vec<usize> {
    const UNSET: usize = usize::MAX;
    let mut index = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSET; n];
    let mut stack = Vec::new();
    let mut next_index = 0usize;
    let mut next_comp = 0usize;

    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        // Explicit DFS stack of (vertex, successor list, cursor).
        let mut call: Vec<(usize, Vec<usize>, usize)> = vec![(root, succ(root), 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some((v, succs, cursor)) = call.last_mut() {
            if let Some(&w) = succs.get(*cursor) {
                *cursor += 1;
                if index[w] == UNSET {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, succ(w), 0));
                } else if on_stack[w] {
                    let v = *v;
                    low[v] = low[v].min(index[w]);
                }
            } else {
                let v = *v;
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
                call.pop();
                if let Some((parent, _, _)) = call.last() {
                    let p = *parent;
                    low[p] = low[p].min(low[v]);
                }
            }
        }
    }
    comp
}

/// Quotient of `m` under `partition` plus the lift map and, per quotient
/// action, the original `(state, action)` it came from.
#[derive(Clone, Debug)]
pub struct Collapsed {
    pub mdp: Mdp,
    /// Original state -> quotient state.
    pub lift: Vec<usize>,
    /// Per quotient state and action: originating (state, action), or `None`
    /// for an artificial absorbing self-loop.
    pub action_origin: Vec<Vec<Option<(usize, usize)>>>,
}

/// Collapses each component of `partition` into a single state, keeping only
/// component-leaving actions. A component containing a target state is
/// target. Components with no leaving action become absorbing.
pub fn collapse_mecs(m: &Mdp, partition: &MecPartition, target: &StateSet) -> Collapsed {
    let n = m.num_states();
    let mut lift = vec![usize::MAX; n];
    let mut comp_repr: Vec<Option<usize>> = vec![None; partition.components.len()];
    let mut nq = 0usize;
    for s in 0..n {
        match partition.component_of[s] {
            Some(c) => match comp_repr[c] {
                Some(q) => lift[s] = q,
                None => {
                    comp_repr[c] = Some(nq);
                    lift[s] = nq;
                    nq += 1;
                }
            },
            None => {
                lift[s] = nq;
                nq += 1;
            }
        }
    }

    let mut actions: Vec<Vec<Action>> = vec![Vec::new(); nq];
    let mut origin: Vec<Vec<Option<(usize, usize)>>> = vec![Vec::new(); nq];
    for s in 0..n {
        let comp = partition.component_of[s].map(|c| &partition.components[c]);
        for (a, act) in m.enabled(s).iter().enumerate() {
            if let Some(mec) = comp {
                if act.transitions.iter().all(|(t, _)| mec.states.contains(*t)) {
                    continue; // fully internal, dropped
                }
            }
            let q = lift[s];
            let mut merged: Vec<(usize, Rat)> = Vec::new();
            for (t, p) in &act.transitions {
                let qt = lift[*t];
                match merged.iter_mut().find(|(u, _)| *u == qt) {
                    Some((_, acc)) => *acc += p,
                    None => merged.push((qt, p.clone())),
                }
            }
            actions[q].push(Action { transitions: merged });
            origin[q].push(Some((s, a)));
        }
    }
    for q in 0..nq {
        if actions[q].is_empty() {
            actions[q].push(Action { transitions: vec![(q, Rat::one())] });
            origin[q].push(None);
        }
    }

    // Labels transfer member-wise; rewards transfer from singletons and are
    // zero on multi-state components (reward collapse is only applied to
    // zero-reward components).
    let mut rewards = vec![Rat::zero(); nq];
    let mut member_count = vec![0usize; nq];
    for s in 0..n {
        member_count[lift[s]] += 1;
    }
    for s in 0..n {
        if member_count[lift[s]] == 1 {
            rewards[lift[s]] = m.reward(s).clone();
        }
    }
    // Labels transfer member-wise; the quotient target is derived from the
    // given set (a component containing a target state is target).
    let mut labels: std::collections::BTreeMap<String, StateSet> = m
        .labels()
        .iter()
        .map(|(name, set)| {
            (
                name.clone(),
                StateSet::from_iter(nq, set.iter().map(|s| lift[s])),
            )
        })
        .collect();
    labels.insert(
        "target".to_string(),
        StateSet::from_iter(nq, target.iter().map(|s| lift[s])),
    );

    let mdp = Mdp::new(actions, labels, Some(rewards)).expect("quotient must be well-formed");
    Collapsed { mdp, lift, action_origin: origin }
}

/// Zero-reward MECs inside `within`: components of the sub-MDP restricted to
/// zero-reward states. Collapsing them removes the spurious fixed points that
/// reward operators have on such components.
pub fn zero_reward_mecs(m: &Mdp, within: &StateSet) -> MecPartition {
    let zero_states = StateSet::from_iter(
        m.num_states(),
        within.iter().filter(|s| m.reward(*s).is_zero()),
    );
    mec_decomposition_restricted(m, &zero_states, |_, _| true)
}

/// A strategy that, inside component `mec`, reaches `goal` almost surely
/// using only internal actions. Entries outside the component are untouched.
pub fn route_inside_mec(m: &Mdp, mec: &Mec, goal: usize, choice: &mut [usize]) {
    // Backward BFS from the goal over internal edges.
    let mut dist: Vec<Rank> = vec![Rank::Infinity; m.num_states()];
    dist[goal] = Rank::Finite(0);
    let mut frontier = VecDeque::from([goal]);
    while let Some(t) = frontier.pop_front() {
        for &(s, ref acts) in &mec.internal {
            if dist[s].is_finite() || s == goal {
                continue;
            }
            for &a in acts {
                if m.transitions(s, a).iter().any(|(u, _)| *u == t) {
                    dist[s] = dist[t].succ();
                    choice[s] = a;
                    frontier.push_back(s);
                    break;
                }
            }
        }
    }
}

/// Extends a quotient strategy to the original MDP.
///
/// States whose group is a singleton take the chosen origin action directly;
/// other members of a component route internally (almost surely) to the state
/// that owns the chosen leaving action.
pub fn lift_strategy(
    m: &Mdp,
    partition: &MecPartition,
    collapsed: &Collapsed,
    quotient_choice: &[usize],
) -> Strategy {
    let mut choice = vec![0usize; m.num_states()];
    for s in 0..m.num_states() {
        let q = collapsed.lift[s];
        match collapsed.action_origin[q][quotient_choice[q]] {
            Some((owner, act)) => {
                if owner == s {
                    choice[s] = act;
                } else if let Some(c) = partition.component_of[s] {
                    route_inside_mec(m, &partition.components[c], owner, &mut choice);
                    choice[owner] = act;
                }
            }
            None => {
                // Absorbing quotient state: any internal action keeps the
                // component closed; pick the first.
                if let Some(c) = partition.component_of[s] {
                    let mec = &partition.components[c];
                    if let Some((_, acts)) = mec.internal.iter().find(|(t, _)| *t == s) {
                        choice[s] = acts[0];
                    }
                }
            }
        }
    }
    Strategy::new(choice)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self_loop_split, three_state};

    #[test]
    fn prob1_three_state() {
        let m = three_state();
        let t = m.label("target").unwrap().clone();
        let p1max = prob1_states(&m, Opt::Max, &t);
        assert_eq!(p1max, StateSet::from_iter(3, [0, 1, 2]));
        let p1min = prob1_states(&m, Opt::Min, &t);
        assert_eq!(p1min, StateSet::from_iter(3, [2]));
    }

    #[test]
    fn prob1_all_targets() {
        let m = three_state();
        let all = StateSet::full(3);
        assert_eq!(prob1_states(&m, Opt::Max, &all), all);
        assert_eq!(prob1_states(&m, Opt::Min, &all), all);
    }

    #[test]
    fn prob0_three_state() {
        let m = three_state();
        let t = m.label("target").unwrap().clone();
        // z can avoid the target via its solid self-loop, so Pmin(z) = 0.
        assert_eq!(prob0_states(&m, Opt::Min, &t), StateSet::from_iter(3, [0]));
        assert_eq!(prob0_states(&m, Opt::Max, &t), StateSet::empty(3));
    }

    #[test]
    fn prob0_empty_target() {
        let m = three_state();
        let none = StateSet::empty(3);
        assert_eq!(prob0_states(&m, Opt::Min, &none), StateSet::full(3));
        assert_eq!(prob0_states(&m, Opt::Max, &none), StateSet::full(3));
    }

    #[test]
    fn prob0_self_loop_split() {
        let m = self_loop_split();
        let t = m.label("target").unwrap().clone();
        assert_eq!(prob0_states(&m, Opt::Max, &t), StateSet::from_iter(3, [1]));
    }

    #[test]
    fn mec_self_loop_split_singletons() {
        let m = self_loop_split();
        let mecs = mec_decomposition(&m);
        assert_eq!(mecs.components.len(), 3);
        for mec in &mecs.components {
            assert_eq!(mec.states.len(), 1);
        }
        assert!(mecs.component_of.iter().all(|c| c.is_some()));
    }

    #[test]
    fn mec_cycle_dtmc() {
        use crate::fixtures::cycle_dtmc;
        let m = cycle_dtmc(4);
        let mecs = mec_decomposition(&m);
        assert_eq!(mecs.components.len(), 1);
        assert_eq!(mecs.components[0].states.len(), 4);
    }

    #[test]
    fn mec_three_state() {
        let m = three_state();
        let mecs = mec_decomposition(&m);
        // {z} via its solid self-loop and {t}; s's solid action leaves {s}.
        assert_eq!(mecs.components.len(), 2);
        assert!(mecs.component_of[0].is_some());
        assert!(mecs.component_of[1].is_none());
        assert!(mecs.component_of[2].is_some());
    }

    #[test]
    fn mec_components_are_closed_and_connected() {
        let m = three_state();
        let mecs = mec_decomposition(&m);
        for mec in &mecs.components {
            for (s, acts) in &mec.internal {
                assert!(!acts.is_empty());
                for &a in acts {
                    for (t, _) in m.transitions(*s, a) {
                        assert!(mec.states.contains(*t), "EC not closed");
                    }
                }
            }
        }
    }

    #[test]
    fn collapse_self_loop_split() {
        let m = self_loop_split();
        let t = m.label("target").unwrap().clone();
        let mecs = mec_decomposition(&m);
        let collapsed = collapse_mecs(&m, &mecs, &t);
        // Self-loops dropped; s0 keeps beta, s1 and s2 become absorbing.
        assert_eq!(collapsed.mdp.num_states(), 3);
        let q0 = collapsed.lift[0];
        assert_eq!(collapsed.mdp.num_actions(q0), 1);
        assert_eq!(collapsed.mdp.transitions(q0, 0).len(), 2);
        let qt = collapsed.lift[2];
        assert!(collapsed.mdp.label("target").unwrap().contains(qt));
    }

    #[test]
    fn collapse_cycle_with_target() {
        use crate::fixtures::cycle_dtmc;
        let m = cycle_dtmc(3);
        let t = m.label("target").unwrap().clone();
        let mecs = mec_decomposition(&m);
        let collapsed = collapse_mecs(&m, &mecs, &t);
        assert_eq!(collapsed.mdp.num_states(), 1);
        assert!(collapsed.mdp.label("target").unwrap().contains(0));
        // Absorbing self-loop, since the single component has no exits.
        assert_eq!(collapsed.mdp.transitions(0, 0), &[(0, num::BigRational::from_integer(1.into()))]);
    }

    #[test]
    fn staying_actions_on_prob0() {
        let m = three_state();
        let t = m.label("target").unwrap().clone();
        let z = prob0_states(&m, Opt::Min, &t);
        let stay = staying_actions(&m, &z);
        assert_eq!(stay[0], Some(0)); // z's solid self-loop
        assert_eq!(stay[1], None);
    }
}
