//! Certificate generation: runs a solver, derives the required ranking
//! functions on the original (uncollapsed) model, and re-checks the result
//! before handing it out. An invalid certificate is never emitted silently.

use mdpcert_core::bellman;
use mdpcert_core::certificate::{
    check_certificate, BoundDir, Certificate, CheckError, Meta, Objective, Query, Semantics,
    Verdict,
};
use mdpcert_core::graph::Opt;
use mdpcert_core::model::{Mdp, Strategy};
use mdpcert_core::numeric::{ExtVal, Rank, RankVec, ValueVec};
use mdpcert_core::ranking;
use mdpcert_core::stateset::StateSet;
use thiserror::Error;

use crate::config::{Method, Rounding, SolverConfig};
use crate::pi::policy_iteration;
use crate::prepare::{prepare, Kind, Prepared};
use crate::vi::interval_iteration;
use crate::SolverError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundReq {
    Lower,
    Upper,
    Both,
}

impl BoundReq {
    fn directions(self) -> Vec<BoundDir> {
        match self {
            BoundReq::Lower => vec![BoundDir::Lower],
            BoundReq::Upper => vec![BoundDir::Upper],
            BoundReq::Both => vec![BoundDir::Lower, BoundDir::Upper],
        }
    }
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("unknown target label '{0}'")]
    UnknownLabel(String),
    #[error("solver failed: {0}")]
    Solver(#[from] SolverError),
    #[error("generated {bound} certificate failed exact re-verification: {verdict:?}")]
    Reverify { bound: BoundDir, verdict: Verdict },
    #[error("certificate assembly error: {0}")]
    Check(#[from] CheckError),
}

/// Generates certificates for the requested bound(s). The value vector comes
/// from exact policy iteration or interval iteration; every rank vector is
/// recomputed on the original MDP; the assembled certificates are re-checked
/// in exact arithmetic before being returned.
pub fn generate_certificates(
    m: &Mdp,
    objective: Objective,
    semantics: Option<Semantics>,
    target_label: &str,
    req: BoundReq,
    cfg: &SolverConfig,
) -> Result<Vec<Certificate>, GenerateError> {
    let target = m
        .label(target_label)
        .ok_or_else(|| GenerateError::UnknownLabel(target_label.to_string()))?
        .clone();
    let sem = if objective.is_reward() {
        Some(semantics.unwrap_or(Semantics::Inf))
    } else {
        None
    };
    let kind = match (objective, sem) {
        (Objective::Pmin, _) => Kind::Reach(Opt::Min),
        (Objective::Pmax, _) => Kind::Reach(Opt::Max),
        (Objective::Emin, Some(s)) => Kind::Reward(Opt::Min, s),
        (Objective::Emax, Some(s)) => Kind::Reward(Opt::Max, s),
        _ => unreachable!(),
    };
    let prep = prepare(m, &target, kind);

    let (lower_x, upper_x) = match cfg.method {
        Method::Pi => {
            let (values, _strategy) = policy_iteration(m, &prep)?;
            (values.clone(), values)
        }
        Method::Ii => {
            let pair = interval_iteration(m, &prep, cfg)?;
            (pair.lower, pair.upper)
        }
    };

    let meta = Meta {
        generator: match cfg.method {
            Method::Pi => "pi".into(),
            Method::Ii => "ii".into(),
        },
        config: format!(
            "epsilon={} gamma={} rounding={} bits={}",
            cfg.epsilon,
            cfg.gamma,
            match cfg.rounding {
                Rounding::Safe => "safe",
                Rounding::None => "none",
            },
            cfg.precision_bits
        ),
    };

    let mut certificates = Vec::new();
    for dir in req.directions() {
        let x = if dir == BoundDir::Lower { lower_x.clone() } else { upper_x.clone() };
        let query = Query {
            objective,
            semantics: sem,
            target_label: target_label.to_string(),
            bound: dir,
            epsilon: cfg.epsilon.clone(),
        };
        let cert = build_certificate(m, &prep, &target, query, x, meta.clone())?;
        let verdict = check_certificate(m, &cert)?;
        if !verdict.is_valid() {
            return Err(GenerateError::Reverify { bound: dir, verdict });
        }
        certificates.push(cert);
    }
    Ok(certificates)
}

fn build_certificate(
    m: &Mdp,
    prep: &Prepared,
    target: &StateSet,
    query: Query,
    x: ValueVec,
    meta: Meta,
) -> Result<Certificate, GenerateError> {
    let mut cert = Certificate {
        query,
        x,
        rank: None,
        rank2: None,
        strategy: None,
        declared_target: None,
        meta,
    };
    match (cert.query.objective, cert.query.semantics, cert.query.bound) {
        (Objective::Pmin | Objective::Pmax, _, BoundDir::Upper) => {}
        (Objective::Pmin, _, BoundDir::Lower) => {
            cert.rank = Some(ranking::fixed_point_distance(m, Opt::Max, target));
        }
        (Objective::Pmax, _, BoundDir::Lower) => {
            let (x2, rank) = assemble_increasing_rank(m, target, cert.x.clone());
            cert.x = x2;
            cert.rank = Some(rank);
        }
        (Objective::Emin | Objective::Emax, Some(Semantics::Inf), BoundDir::Lower) => {
            let opt = cert.query.objective.opt();
            cert.rank = Some(ranking::lfp_complementary(m, opt.flip(), target));
        }
        (Objective::Emax, Some(Semantics::Inf), BoundDir::Upper) => {
            cert.rank = Some(ranking::fixed_point_distance(m, Opt::Max, target));
        }
        (Objective::Emin, Some(Semantics::Inf), BoundDir::Upper) => {
            let (x2, rank) = assemble_decreasing_rank(m, target, cert.x.clone());
            cert.x = x2;
            cert.rank = Some(rank);
        }
        (Objective::Emin | Objective::Emax, Some(Semantics::Rho), BoundDir::Upper) => {}
        (Objective::Emin, Some(Semantics::Rho), BoundDir::Lower) => {
            let declared = prep.solve_target.clone();
            let pos = m.positive_reward_states();
            cert.rank = Some(ranking::lfp_complementary(m, Opt::Max, &declared));
            cert.rank2 = Some(ranking::fixed_point_distance(m, Opt::Max, &pos));
            cert.declared_target = Some(declared);
        }
        (Objective::Emax, Some(Semantics::Rho), BoundDir::Lower) => {
            let finite = finite_lower_patch(m, &prep.solve_target, cert.x.clone());
            let parts = assemble_rho_max_lower(m, finite);
            cert.x = parts.x;
            cert.rank = Some(parts.rank1);
            cert.rank2 = Some(parts.rank2);
            cert.strategy = Some(parts.strategy);
            cert.declared_target = Some(parts.declared);
        }
        _ => unreachable!("invalid query shape"),
    }
    Ok(cert)
}

/// Lower bounds on max-reachability: rank over the x-increasing actions.
/// States whose positive claim cannot be ranked (possible for approximate
/// vectors whose increasing actions lag behind) are weakened to zero until
/// the pair is consistent.
fn assemble_increasing_rank(m: &Mdp, target: &StateSet, mut x: ValueVec) -> (ValueVec, RankVec) {
    loop {
        let bx = bellman::apply_reach(m, Opt::Max, target, &x);
        if zero_out_violations(&mut x, &bx) {
            continue;
        }
        let filter = ranking::increasing_actions(m, &x, None);
        let rank = ranking::min_distance_fp_filtered(m, target, &filter);
        let mut changed = false;
        for s in 0..m.num_states() {
            if !target.contains(s) && !x[s].is_zero() && rank[s].is_infinite() {
                x[s] = ExtVal::zero();
                changed = true;
            }
        }
        if !changed {
            return (x, rank);
        }
    }
}

/// Upper bounds on min-expected rewards: rank over the x-decreasing actions.
/// Unrankable finite entries are weakened to the trivial bound infinity.
fn assemble_decreasing_rank(m: &Mdp, target: &StateSet, mut x: ValueVec) -> (ValueVec, RankVec) {
    loop {
        let bx = bellman::apply_reward(m, Opt::Min, target, m.rewards(), &x);
        let mut changed = false;
        for s in 0..m.num_states() {
            if bx[s] > x[s] {
                x[s] = ExtVal::Infinity;
                changed = true;
            }
        }
        if changed {
            continue;
        }
        let filter = ranking::decreasing_actions(m, &x, m.rewards());
        let rank = ranking::min_distance_fp_filtered(m, target, &filter);
        for s in 0..m.num_states() {
            if x[s].is_finite() && rank[s].is_infinite() {
                x[s] = ExtVal::Infinity;
                changed = true;
            }
        }
        if !changed {
            return (x, rank);
        }
    }
}

fn zero_out_violations(x: &mut ValueVec, bx: &[ExtVal]) -> bool {
    let mut changed = false;
    for s in 0..x.len() {
        if x[s] > bx[s] && !x[s].is_zero() {
            x[s] = ExtVal::zero();
            changed = true;
        }
    }
    changed
}

/// Replaces infinite entries of a lower vector by finite under-approximations
/// obtained by iterating the maximizing reward rows from below, keeping the
/// finite entries fixed. Any number of sweeps yields a co-inductive vector.
fn finite_lower_patch(m: &Mdp, solve_target: &StateSet, x: ValueVec) -> ValueVec {
    let infinite: Vec<usize> = (0..x.len()).filter(|&s| x[s].is_infinite()).collect();
    if infinite.is_empty() {
        return x;
    }
    let mut y: ValueVec = x
        .iter()
        .map(|v| if v.is_infinite() { ExtVal::zero() } else { v.clone() })
        .collect();
    let sweeps = 2 * m.num_states() + 16;
    for _ in 0..sweeps {
        let snapshot = y.clone();
        for &s in &infinite {
            let mut best: Option<ExtVal> = None;
            for a in 0..m.num_actions(s) {
                let mut acc = ExtVal::zero();
                for (t, p) in m.transitions(s, a) {
                    let v = if solve_target.contains(*t) { ExtVal::zero() } else { snapshot[*t].clone() };
                    acc = acc.add(&v.scale(p));
                }
                best = Some(match best {
                    None => acc,
                    Some(b) => b.max(acc),
                });
            }
            y[s] = best.unwrap().add(&ExtVal::from_rat(m.reward(s).clone()));
        }
    }
    y
}

struct RhoMaxParts {
    x: ValueVec,
    rank1: RankVec,
    rank2: RankVec,
    strategy: Strategy,
    declared: StateSet,
}

/// Lower bounds on max-expected rewards under accumulate-forever semantics:
/// declared target is the zero set of the (finite) value vector, the witness
/// strategy follows reward-increasing actions of minimal distance towards
/// positive reward, and both ranking functions are the induced fixed points.
/// Entries that cannot be made consistent are weakened to zero.
fn assemble_rho_max_lower(m: &Mdp, mut x: ValueVec) -> RhoMaxParts {
    let n = m.num_states();
    let rewards = m.rewards();
    let pos = m.positive_reward_states();
    loop {
        let declared = StateSet::from_iter(n, (0..n).filter(|&s| x[s].is_zero()));
        let bx = bellman::apply_reward(m, Opt::Max, &declared, rewards, &x);
        if zero_out_violations(&mut x, &bx) {
            continue;
        }
        let mut filter = ranking::increasing_actions(m, &x, Some(rewards));
        for s in declared.iter() {
            // Progress from declared-target states is irrelevant; give them
            // their full action set so the rank computation is total.
            filter.allowed[s] = (0..m.num_actions(s)).collect();
        }
        let rank_to_pos = ranking::min_distance_fp_filtered(m, &pos, &filter);
        let mut changed = false;
        for s in 0..n {
            if !declared.contains(s) && !x[s].is_zero() && rank_to_pos[s].is_infinite() {
                x[s] = ExtVal::zero();
                changed = true;
            }
        }
        if changed {
            continue;
        }
        // Witness strategy: among the increasing actions, head for positive
        // reward along the minimal ranked successor (lowest index on ties).
        let choice: Vec<usize> = (0..n)
            .map(|s| {
                let mut best_action = filter.allowed[s].first().copied().unwrap_or(0);
                let mut best_rank = Rank::Infinity;
                let mut first = true;
                for &a in &filter.allowed[s] {
                    let r = m
                        .transitions(s, a)
                        .iter()
                        .map(|(t, _)| rank_to_pos[*t])
                        .min()
                        .unwrap_or(Rank::Infinity);
                    if first || r < best_rank {
                        best_rank = r;
                        best_action = a;
                        first = false;
                    }
                }
                best_action
            })
            .collect();
        let strategy = Strategy::new(choice);
        let d = m.induced_dtmc(&strategy).expect("assembled strategy is valid");
        let rank2 = ranking::fixed_point_distance(&d, Opt::Min, &pos);
        let bad: Vec<usize> = (0..n)
            .filter(|&s| !declared.contains(s) && rank2[s].is_infinite() && !x[s].is_zero())
            .collect();
        if !bad.is_empty() {
            for s in bad {
                x[s] = ExtVal::zero();
            }
            continue;
        }
        let rank1 = ranking::lfp_complementary_strat(m, &strategy, &declared);
        return RhoMaxParts { x, rank1, rank2, strategy, declared };
    }
}
