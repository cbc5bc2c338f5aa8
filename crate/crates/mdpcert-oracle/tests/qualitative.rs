//! Cross-checks of the graph analyses and ranking fixed points against
//! oracle-derived qualitative sets, both optimization directions.

use mdpcert_core::certificate::{BoundDir, Objective, Query};
use mdpcert_core::graph::{self, Opt};
use mdpcert_core::model::Mdp;
use mdpcert_core::numeric::{rat, ExtVal};
use mdpcert_core::ranking;
use mdpcert_core::stateset::StateSet;
use mdpcert_oracle::optimal_exact;
use mdpcert_testmodels::{random_mdp, GenConfig};

fn reach_query(objective: Objective) -> Query {
    Query {
        objective,
        semantics: None,
        target_label: "target".into(),
        bound: BoundDir::Lower,
        epsilon: rat(1, 1_000_000),
    }
}

/// Oracle-derived per-state qualitative facts.
struct Qualitative {
    min_values: Vec<ExtVal>,
    max_values: Vec<ExtVal>,
}

impl Qualitative {
    fn of(m: &Mdp) -> Qualitative {
        Qualitative {
            min_values: optimal_exact(m, &reach_query(Objective::Pmin)).unwrap().values,
            max_values: optimal_exact(m, &reach_query(Objective::Pmax)).unwrap().values,
        }
    }

    fn values(&self, opt: Opt) -> &[ExtVal] {
        match opt {
            Opt::Min => &self.min_values,
            Opt::Max => &self.max_values,
        }
    }

    fn zero_set(&self, m: &Mdp, opt: Opt) -> StateSet {
        StateSet::from_iter(
            m.num_states(),
            self.values(opt).iter().enumerate().filter(|(_, v)| v.is_zero()).map(|(s, _)| s),
        )
    }

    fn one_set(&self, m: &Mdp, opt: Opt) -> StateSet {
        StateSet::from_iter(
            m.num_states(),
            self.values(opt)
                .iter()
                .enumerate()
                .filter(|(_, v)| **v == ExtVal::one())
                .map(|(s, _)| s),
        )
    }
}

#[test]
fn prob0_prob1_match_oracle() {
    let gen = GenConfig::default();
    for seed in 0..150 {
        let m = random_mdp(seed, &gen);
        let t = m.label("target").unwrap().clone();
        let q = Qualitative::of(&m);
        for opt in [Opt::Min, Opt::Max] {
            assert_eq!(
                graph::prob0_states(&m, opt, &t),
                q.zero_set(&m, opt),
                "prob0 mismatch at seed {seed} {opt:?}"
            );
            assert_eq!(
                graph::prob1_states(&m, opt, &t),
                q.one_set(&m, opt),
                "prob1 mismatch at seed {seed} {opt:?}"
            );
        }
    }
}

#[test]
fn distance_fixed_point_infinite_iff_opposite_zero() {
    // The unique fixed point of the distance operator is infinite exactly
    // where the opposite player's reachability probability vanishes.
    let gen = GenConfig::default();
    for seed in 0..150 {
        let m = random_mdp(seed, &gen);
        let t = m.label("target").unwrap().clone();
        let q = Qualitative::of(&m);
        for opt in [Opt::Min, Opt::Max] {
            let fp = ranking::fixed_point_distance(&m, opt, &t);
            let zero = q.zero_set(&m, opt.flip());
            for s in 0..m.num_states() {
                assert_eq!(
                    fp[s].is_infinite(),
                    zero.contains(s),
                    "distance lemma mismatch at seed {seed} {opt:?} state {s}"
                );
            }
        }
    }
}

#[test]
fn complementary_lfp_infinite_iff_almost_sure() {
    let gen = GenConfig::default();
    for seed in 0..150 {
        let m = random_mdp(seed, &gen);
        let t = m.label("target").unwrap().clone();
        let q = Qualitative::of(&m);
        for opt in [Opt::Min, Opt::Max] {
            let lfp = ranking::lfp_complementary(&m, opt, &t);
            let one = q.one_set(&m, opt);
            let zero = q.zero_set(&m, opt);
            for s in 0..m.num_states() {
                assert_eq!(
                    lfp[s].is_infinite(),
                    one.contains(s),
                    "complementary lemma mismatch at seed {seed} {opt:?} state {s}"
                );
                // Rank zero exactly on the zero-probability core.
                assert_eq!(
                    lfp[s] == mdpcert_core::numeric::Rank::Finite(0),
                    zero.contains(s),
                    "zero-rank mismatch at seed {seed} {opt:?} state {s}"
                );
            }
        }
    }
}

#[test]
fn mec_components_maximal_and_collapse_preserves_values() {
    let gen = GenConfig::default();
    for seed in 0..60 {
        let m = random_mdp(seed, &gen);
        let t = m.label("target").unwrap().clone();
        let mecs = graph::mec_decomposition(&m);

        // Closure and strong connectivity hold by the unit tests; maximality
        // is checked by attempting single-state extensions.
        for mec in &mecs.components {
            for extra in 0..m.num_states() {
                if mec.states.contains(extra) {
                    continue;
                }
                let mut extended = mec.states.clone();
                extended.insert(extra);
                assert!(
                    !is_end_component(&m, &extended),
                    "seed {seed}: component can be extended by {extra}"
                );
            }
        }

        // Collapsing preserves optimal reachability values.
        let collapsed = graph::collapse_mecs(&m, &mecs, &t);
        let qn = collapsed.mdp.num_states();
        let q_target = StateSet::from_iter(qn, t.iter().map(|s| collapsed.lift[s]));
        let mut quotient = collapsed.mdp.clone();
        let mut labels = std::collections::BTreeMap::new();
        labels.insert("target".to_string(), q_target);
        quotient = mdpcert_core::model::Mdp::new(
            (0..qn).map(|s| quotient.enabled(s).to_vec()).collect(),
            labels,
            Some(quotient.rewards().to_vec()),
        )
        .unwrap();
        // Bare collapse preserves maximal reachability on any model; the
        // minimizing case additionally needs the zero-probability states
        // excluded from the partition first (which is how the solvers use
        // it), since a component would otherwise lose its stay-forever
        // option.
        {
            let original = optimal_exact(&m, &reach_query(Objective::Pmax)).unwrap().values;
            let on_quotient =
                optimal_exact(&quotient, &reach_query(Objective::Pmax)).unwrap().values;
            for s in 0..m.num_states() {
                assert_eq!(
                    original[s],
                    on_quotient[collapsed.lift[s]],
                    "seed {seed} Pmax: collapse changed the value of {s}"
                );
            }
        }
        {
            let zero = graph::prob0_states(&m, Opt::Min, &t);
            let one = graph::prob1_states(&m, Opt::Min, &t);
            let free = StateSet::from_iter(
                m.num_states(),
                (0..m.num_states()).filter(|&s| !zero.contains(s) && !one.contains(s)),
            );
            let restricted = graph::mec_decomposition_restricted(&m, &free, |_, _| true);
            let collapsed_min = graph::collapse_mecs(&m, &restricted, &t);
            let qn = collapsed_min.mdp.num_states();
            let mut labels = std::collections::BTreeMap::new();
            labels.insert(
                "target".to_string(),
                StateSet::from_iter(qn, t.iter().map(|s| collapsed_min.lift[s])),
            );
            let quotient_min = mdpcert_core::model::Mdp::new(
                (0..qn).map(|s| collapsed_min.mdp.enabled(s).to_vec()).collect(),
                labels,
                Some(collapsed_min.mdp.rewards().to_vec()),
            )
            .unwrap();
            let original = optimal_exact(&m, &reach_query(Objective::Pmin)).unwrap().values;
            let on_quotient =
                optimal_exact(&quotient_min, &reach_query(Objective::Pmin)).unwrap().values;
            for s in free.iter() {
                assert_eq!(
                    original[s],
                    on_quotient[collapsed_min.lift[s]],
                    "seed {seed} Pmin: restricted collapse changed the value of {s}"
                );
            }
        }
    }
}

/// Literal end-component predicate: some nonempty action sub-assignment is
/// closed and strongly connected.
fn is_end_component(m: &Mdp, states: &StateSet) -> bool {
    let retained: Vec<Vec<usize>> = (0..m.num_states())
        .map(|s| {
            if !states.contains(s) {
                return Vec::new();
            }
            (0..m.num_actions(s))
                .filter(|&a| m.transitions(s, a).iter().all(|(t, _)| states.contains(*t)))
                .collect()
        })
        .collect();
    if states.iter().any(|s| retained[s].is_empty()) {
        return false;
    }
    // Strong connectivity over the retained edges.
    for root in states.iter() {
        let mut seen = StateSet::empty(m.num_states());
        seen.insert(root);
        let mut stack = vec![root];
        while let Some(s) = stack.pop() {
            for &a in &retained[s] {
                for (tt, _) in m.transitions(s, a) {
                    if !seen.contains(*tt) {
                        seen.insert(*tt);
                        stack.push(*tt);
                    }
                }
            }
        }
        if states.iter().any(|s| !seen.contains(s)) {
            return false;
        }
    }
    true
}

#[test]
fn rho_below_inf_and_equal_on_almost_sure() {
    use mdpcert_core::certificate::Semantics;
    let gen = GenConfig::default();
    for seed in 0..80 {
        let m = random_mdp(seed, &gen);
        for objective in [Objective::Emin, Objective::Emax] {
            let mut q = reach_query(objective);
            q.semantics = Some(Semantics::Inf);
            let inf = optimal_exact(&m, &q).unwrap().values;
            q.semantics = Some(Semantics::Rho);
            let rho = optimal_exact(&m, &q).unwrap().values;
            let reach = Qualitative::of(&m);
            let opt = objective.opt();
            for s in 0..m.num_states() {
                assert!(rho[s] <= inf[s], "seed {seed} {objective} state {s}");
                // Where every strategy reaches the target almost surely the
                // two semantics agree pathwise.
                let _ = opt;
                if reach.values(Opt::Min)[s] == ExtVal::one() {
                    assert_eq!(rho[s], inf[s], "seed {seed} {objective} state {s}");
                }
            }
        }
    }
}
