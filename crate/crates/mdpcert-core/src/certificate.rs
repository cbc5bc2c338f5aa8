//! Certificate data model and validity checking.
//!
//! Every checker evaluates its proposition state by state in exact rational
//! arithmetic and reports the failing conditions. The checkers never invoke
//! solver code; a valid verdict rests only on the model, the certificate
//! fields, and the operator applications in this crate.

use std::fmt;

use thiserror::Error;

use crate::bellman;
use crate::graph::Opt;
use crate::model::{Mdp, Strategy};
use crate::numeric::{ExtVal, Rank, RankVec, Rat, ValueVec};
use crate::ranking::{self, ActionFilter};
use crate::stateset::StateSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    Pmin,
    Pmax,
    Emin,
    Emax,
}

impl Objective {
    pub fn is_reward(self) -> bool {
        matches!(self, Objective::Emin | Objective::Emax)
    }

    pub fn opt(self) -> Opt {
        match self {
            Objective::Pmin | Objective::Emin => Opt::Min,
            Objective::Pmax | Objective::Emax => Opt::Max,
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Objective::Pmin => "Pmin",
            Objective::Pmax => "Pmax",
            Objective::Emin => "Emin",
            Objective::Emax => "Emax",
        };
        write!(f, "{}", s)
    }
}

/// Reward semantics: `Inf` assigns infinite reward to paths never reaching
/// the target; `Rho` lets them accumulate forever.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Semantics {
    Inf,
    Rho,
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if *self == Semantics::Inf { "inf" } else { "rho" })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundDir {
    Lower,
    Upper,
}

impl fmt::Display for BoundDir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if *self == BoundDir::Lower { "lower" } else { "upper" })
    }
}

/// What is being certified: objective, bound direction, target label, and
/// the generator's gap target (metadata only; the checker verifies
/// inequalities, never gap width).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub objective: Objective,
    pub semantics: Option<Semantics>,
    pub target_label: String,
    pub bound: BoundDir,
    pub epsilon: Rat,
}

impl Query {
    pub fn semantics_or_default(&self) -> Semantics {
        self.semantics.unwrap_or(Semantics::Inf)
    }
}

/// Generator tag and configuration echo carried along for audit purposes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Meta {
    pub generator: String,
    pub config: String,
}

/// A self-contained fixed-point certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub query: Query,
    pub x: ValueVec,
    pub rank: Option<RankVec>,
    pub rank2: Option<RankVec>,
    pub strategy: Option<Strategy>,
    /// Declared over-approximation of the redefined target set (accumulate-
    /// forever lower bounds only).
    pub declared_target: Option<StateSet>,
    pub meta: Meta,
}

/// A single failed condition: which check, where, and the two sides of the
/// violated comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub condition: &'static str,
    pub state: usize,
    pub lhs: String,
    pub rhs: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.condition, self.state, self.lhs, self.rhs)
    }
}

/// Outcome of a check. Valid iff no condition failed. At most the first 32
/// failures are recorded.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Verdict {
    pub failures: Vec<Failure>,
}

const MAX_FAILURES: usize = 32;

impl Verdict {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, condition: &'static str, state: usize, lhs: String, rhs: String) {
        if self.failures.len() < MAX_FAILURES {
            self.failures.push(Failure { condition, state, lhs, rhs });
        }
    }

    fn merge(&mut self, other: Verdict) {
        for f in other.failures {
            if self.failures.len() < MAX_FAILURES {
                self.failures.push(f);
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CheckError {
    #[error("unknown target label '{0}'")]
    UnknownLabel(String),
    #[error("dimension mismatch: certificate has {cert} states, model has {model}")]
    DimensionMismatch { cert: usize, model: usize },
    #[error("missing field '{field}' for this certificate kind")]
    MissingField { field: &'static str },
    #[error("unexpected field '{field}' for this certificate kind")]
    UnexpectedField { field: &'static str },
    #[error("reward semantics given for a reachability objective")]
    SemanticsOnReachability,
}

fn require_rank(cert: &Certificate) -> Result<&RankVec, CheckError> {
    cert.rank.as_ref().ok_or(CheckError::MissingField { field: "rank" })
}

/// Pointwise `lhs <= rhs` over ranks, recording failures.
fn rank_le_check(v: &mut Verdict, condition: &'static str, lhs: &[Rank], rhs: &[Rank]) {
    for (s, (l, r)) in lhs.iter().zip(rhs).enumerate() {
        if l > r {
            v.record(condition, s, l.to_string(), r.to_string());
        }
    }
}

fn value_le_check(v: &mut Verdict, condition: &'static str, lhs: &[ExtVal], rhs: &[ExtVal]) {
    for (s, (l, r)) in lhs.iter().zip(rhs).enumerate() {
        if l > r {
            v.record(condition, s, l.to_string(), r.to_string());
        }
    }
}

fn probability_range_check(v: &mut Verdict, x: &[ExtVal]) {
    use num::traits::{One, Signed};
    for (s, val) in x.iter().enumerate() {
        let ok = match val {
            ExtVal::Finite(r) => !r.is_negative() && *r <= Rat::one(),
            ExtVal::Infinity => false,
        };
        if !ok {
            v.record("probability_range", s, val.to_string(), "[0,1]".into());
        }
    }
}

fn strategy_check(v: &mut Verdict, m: &Mdp, strat: &Strategy) -> bool {
    if strat.choice.len() != m.num_states() {
        v.record("strategy_enabled", 0, strat.choice.len().to_string(), m.num_states().to_string());
        return false;
    }
    let mut ok = true;
    for (s, &a) in strat.choice.iter().enumerate() {
        if a >= m.num_actions(s) {
            v.record("strategy_enabled", s, a.to_string(), m.num_actions(s).to_string());
            ok = false;
        }
    }
    ok
}

/// Upper bounds on optimal reachability: the Bellman operator decreases `x`.
pub fn check_reach_upper(m: &Mdp, opt: Opt, target: &StateSet, x: &[ExtVal]) -> Verdict {
    let mut v = Verdict::default();
    probability_range_check(&mut v, x);
    if !v.is_valid() {
        return v;
    }
    let bx = bellman::apply_reach(m, opt, target, x);
    value_le_check(&mut v, "bellman_decrease", &bx, x);
    v
}

/// Positive reachability: inductive rank for the opposite direction's
/// distance operator. A finite rank at `s` then witnesses positive
/// probability under `opt`.
pub fn check_positive_reach(m: &Mdp, opt: Opt, target: &StateSet, r: &[Rank]) -> Verdict {
    let mut v = Verdict::default();
    let dr = ranking::apply_distance_op(m, opt.flip(), target, r);
    rank_le_check(&mut v, "distance_inductive", &dr, r);
    v
}

/// Non-almost-sure reachability: inductive rank for the complementary
/// operator. A finite rank at `s` witnesses probability strictly below one.
pub fn check_non_as_reach(m: &Mdp, opt: Opt, target: &StateSet, r: &[Rank]) -> Verdict {
    let mut v = Verdict::default();
    let cr = ranking::apply_complementary_op(m, opt, target, r);
    rank_le_check(&mut v, "complementary_inductive", &cr, r);
    v
}

/// Lower bounds on minimal reachability.
pub fn check_reach_lower_min(m: &Mdp, target: &StateSet, x: &[ExtVal], r: &[Rank]) -> Verdict {
    let mut v = Verdict::default();
    probability_range_check(&mut v, x);
    if !v.is_valid() {
        return v;
    }
    let dr = ranking::apply_distance_op(m, Opt::Max, target, r);
    rank_le_check(&mut v, "distance_inductive", &dr, r);
    let bx = bellman::apply_reach(m, Opt::Min, target, x);
    value_le_check(&mut v, "bellman_increase", x, &bx);
    positive_needs_finite_rank(&mut v, target, x, r);
    v
}

fn positive_needs_finite_rank(v: &mut Verdict, target: &StateSet, x: &[ExtVal], r: &[Rank]) {
    for s in 0..x.len() {
        if !target.contains(s) && !x[s].is_zero() && r[s].is_infinite() {
            v.record("positive_needs_finite_rank", s, x[s].to_string(), "inf".into());
        }
    }
}

/// Lower bounds on maximal reachability without a witness strategy: the rank
/// must be inductive for the distance operator over the x-increasing actions.
pub fn check_reach_lower_max(m: &Mdp, target: &StateSet, x: &[ExtVal], r: &[Rank]) -> Verdict {
    let mut v = Verdict::default();
    probability_range_check(&mut v, x);
    if !v.is_valid() {
        return v;
    }
    let filter = ranking::increasing_actions(m, x, None);
    let dr = ranking::apply_distance_filtered(m, Opt::Min, target, &filter, r);
    rank_le_check(&mut v, "restricted_distance_inductive", &dr, r);
    let bx = bellman::apply_reach(m, Opt::Max, target, x);
    value_le_check(&mut v, "bellman_increase", x, &bx);
    positive_needs_finite_rank(&mut v, target, x, r);
    v
}

/// Lower bounds on maximal reachability with an explicit witness strategy.
pub fn check_reach_lower_max_witness(
    m: &Mdp,
    target: &StateSet,
    x: &[ExtVal],
    r: &[Rank],
    strat: &Strategy,
) -> Verdict {
    let mut v = Verdict::default();
    if !strategy_check(&mut v, m, strat) {
        return v;
    }
    probability_range_check(&mut v, x);
    if !v.is_valid() {
        return v;
    }
    let filter = ActionFilter::from_strategy(strat);
    let dr = ranking::apply_distance_filtered(m, Opt::Min, target, &filter, r);
    rank_le_check(&mut v, "distance_inductive", &dr, r);
    let bx = bellman::apply_reach_strat(m, strat, target, x);
    value_le_check(&mut v, "bellman_increase", x, &bx);
    positive_needs_finite_rank(&mut v, target, x, r);
    v
}

/// Lower bounds on optimal expected rewards (infinity semantics).
pub fn check_rew_inf_lower(
    m: &Mdp,
    opt: Opt,
    target: &StateSet,
    rewards: &[Rat],
    x: &[ExtVal],
    r: &[Rank],
) -> Verdict {
    let mut v = Verdict::default();
    let cr = ranking::apply_complementary_op(m, opt.flip(), target, r);
    rank_le_check(&mut v, "complementary_inductive", &cr, r);
    let bx = bellman::apply_reward(m, opt, target, rewards, x);
    value_le_check(&mut v, "bellman_increase", x, &bx);
    for s in 0..x.len() {
        if x[s].is_infinite() && r[s].is_infinite() {
            v.record("infinite_needs_finite_rank", s, "inf".into(), "inf".into());
        }
    }
    v
}

/// Upper bounds on maximal expected rewards (infinity semantics).
pub fn check_rew_inf_upper_max(
    m: &Mdp,
    target: &StateSet,
    rewards: &[Rat],
    x: &[ExtVal],
    r: &[Rank],
) -> Verdict {
    let mut v = Verdict::default();
    let dr = ranking::apply_distance_op(m, Opt::Max, target, r);
    rank_le_check(&mut v, "distance_inductive", &dr, r);
    let bx = bellman::apply_reward(m, Opt::Max, target, rewards, x);
    value_le_check(&mut v, "bellman_decrease", &bx, x);
    finite_needs_finite_rank(&mut v, x, r);
    v
}

fn finite_needs_finite_rank(v: &mut Verdict, x: &[ExtVal], r: &[Rank]) {
    for s in 0..x.len() {
        if x[s].is_finite() && r[s].is_infinite() {
            v.record("finite_needs_finite_rank", s, x[s].to_string(), "inf".into());
        }
    }
}

/// Upper bounds on minimal expected rewards without a witness strategy:
/// the rank is inductive for the distance operator over x-decreasing actions.
pub fn check_rew_inf_upper_min(
    m: &Mdp,
    target: &StateSet,
    rewards: &[Rat],
    x: &[ExtVal],
    r: &[Rank],
) -> Verdict {
    let mut v = Verdict::default();
    let filter = ranking::decreasing_actions(m, x, rewards);
    let dr = ranking::apply_distance_filtered(m, Opt::Min, target, &filter, r);
    rank_le_check(&mut v, "restricted_distance_inductive", &dr, r);
    let bx = bellman::apply_reward(m, Opt::Min, target, rewards, x);
    value_le_check(&mut v, "bellman_decrease", &bx, x);
    finite_needs_finite_rank(&mut v, x, r);
    v
}

/// Upper bounds on minimal expected rewards with a witness strategy.
pub fn check_rew_inf_upper_min_witness(
    m: &Mdp,
    target: &StateSet,
    rewards: &[Rat],
    x: &[ExtVal],
    r: &[Rank],
    strat: &Strategy,
) -> Verdict {
    let mut v = Verdict::default();
    if !strategy_check(&mut v, m, strat) {
        return v;
    }
    let filter = ActionFilter::from_strategy(strat);
    let dr = ranking::apply_distance_filtered(m, Opt::Min, target, &filter, r);
    rank_le_check(&mut v, "distance_inductive", &dr, r);
    let bx = bellman::apply_reward_strat(m, strat, target, rewards, x);
    value_le_check(&mut v, "bellman_decrease", &bx, x);
    finite_needs_finite_rank(&mut v, x, r);
    v
}

/// Upper bounds on optimal expected rewards with accumulate-forever
/// semantics: these are a least fixed point, so the single Bellman-decrease
/// condition suffices.
pub fn check_rew_rho_upper(
    m: &Mdp,
    opt: Opt,
    target: &StateSet,
    rewards: &[Rat],
    x: &[ExtVal],
) -> Verdict {
    let mut v = Verdict::default();
    let bx = bellman::apply_reward(m, opt, target, rewards, x);
    value_le_check(&mut v, "bellman_decrease", &bx, x);
    v
}

fn declared_target_checks(
    v: &mut Verdict,
    target: &StateSet,
    declared: &StateSet,
    r2: &[Rank],
) {
    for s in target.iter() {
        if !declared.contains(s) {
            v.record("target_in_declared", s, "target".into(), "declared".into());
        }
    }
    for (s, rank) in r2.iter().enumerate() {
        if rank.is_infinite() && !declared.contains(s) {
            v.record("rank2_infinite_needs_declared", s, "inf".into(), "declared".into());
        }
    }
}

fn rank_infinite_needs_finite_value(v: &mut Verdict, x: &[ExtVal], r1: &[Rank]) {
    for s in 0..x.len() {
        if r1[s].is_infinite() && x[s].is_infinite() {
            v.record("rank_infinite_needs_finite_value", s, "inf".into(), "inf".into());
        }
    }
}

/// Lower bounds on minimal expected rewards with accumulate-forever
/// semantics. `declared` over-approximates the redefined target set; the
/// rank conditions certify that over-approximation.
pub fn check_rew_rho_lower_min(
    m: &Mdp,
    target: &StateSet,
    rewards: &[Rat],
    x: &[ExtVal],
    r1: &[Rank],
    r2: &[Rank],
    declared: &StateSet,
) -> Verdict {
    let mut v = Verdict::default();
    let pos = m.positive_reward_states();
    declared_target_checks(&mut v, target, declared, r2);
    let cr = ranking::apply_complementary_op(m, Opt::Max, declared, r1);
    rank_le_check(&mut v, "complementary_inductive", &cr, r1);
    let bx = bellman::apply_reward(m, Opt::Min, declared, rewards, x);
    value_le_check(&mut v, "bellman_increase", x, &bx);
    rank_infinite_needs_finite_value(&mut v, x, r1);
    let dr = ranking::apply_distance_op(m, Opt::Max, &pos, r2);
    rank_le_check(&mut v, "distance_inductive", &dr, r2);
    v
}

/// Lower bounds on maximal expected rewards (accumulate-forever semantics)
/// with an explicit witness strategy.
#[allow(clippy::too_many_arguments)] // the quintuple certificate has five parts
pub fn check_rew_rho_lower_max(
    m: &Mdp,
    target: &StateSet,
    rewards: &[Rat],
    x: &[ExtVal],
    r1: &[Rank],
    r2: &[Rank],
    strat: &Strategy,
    declared: &StateSet,
) -> Verdict {
    let mut v = Verdict::default();
    if !strategy_check(&mut v, m, strat) {
        return v;
    }
    let pos = m.positive_reward_states();
    declared_target_checks(&mut v, target, declared, r2);
    let cr = ranking::apply_complementary_strat(m, strat, declared, r1);
    rank_le_check(&mut v, "complementary_inductive", &cr, r1);
    let bx = bellman::apply_reward_strat(m, strat, declared, rewards, x);
    value_le_check(&mut v, "bellman_increase", x, &bx);
    rank_infinite_needs_finite_value(&mut v, x, r1);
    let filter = ActionFilter::from_strategy(strat);
    let dr = ranking::apply_distance_filtered(m, Opt::Min, &pos, &filter, r2);
    rank_le_check(&mut v, "distance_inductive", &dr, r2);
    v
}

/// Lower bounds on maximal expected rewards (accumulate-forever semantics)
/// without a witness strategy: a strategy consistent with both ranking
/// functions must exist among the reward-increasing actions; certificates
/// with an empty per-state intersection are rejected.
pub fn check_rew_rho_lower_max_nostrat(
    m: &Mdp,
    target: &StateSet,
    rewards: &[Rat],
    x: &[ExtVal],
    r1: &[Rank],
    r2: &[Rank],
    declared: &StateSet,
) -> Verdict {
    let mut v = Verdict::default();
    let pos = m.positive_reward_states();
    declared_target_checks(&mut v, target, declared, r2);
    let filter = ranking::increasing_actions(m, x, Some(rewards));
    consistency_check(&mut v, m, &filter, r1, r2);
    let cr = ranking::apply_complementary_op(m, Opt::Max, declared, r1);
    rank_le_check(&mut v, "complementary_inductive", &cr, r1);
    let bx = bellman::apply_reward(m, Opt::Max, declared, rewards, x);
    value_le_check(&mut v, "bellman_increase", x, &bx);
    rank_infinite_needs_finite_value(&mut v, x, r1);
    let dr = ranking::apply_distance_filtered(m, Opt::Max, &pos, &filter, r2);
    rank_le_check(&mut v, "distance_inductive", &dr, r2);
    v
}

/// Per state, the actions of `filter` maximizing the minimal successor rank
/// under `r1` and `r2` must intersect.
fn consistency_check(v: &mut Verdict, m: &Mdp, filter: &ActionFilter, r1: &[Rank], r2: &[Rank]) {
    for s in 0..m.num_states() {
        if filter.allowed[s].is_empty() {
            v.record("consistent_strategy", s, "no-increasing-action".into(), String::new());
            continue;
        }
        let arg = |r: &[Rank]| -> Vec<usize> {
            let vals: Vec<Rank> = filter.allowed[s]
                .iter()
                .map(|&a| {
                    m.transitions(s, a)
                        .iter()
                        .map(|(t, _)| r[*t])
                        .min()
                        .unwrap_or(Rank::Infinity)
                })
                .collect();
            let best = vals.iter().max().copied().unwrap();
            filter.allowed[s]
                .iter()
                .zip(&vals)
                .filter(|(_, v)| **v == best)
                .map(|(a, _)| *a)
                .collect()
        };
        let a1 = arg(r1);
        let a2 = arg(r2);
        if !a1.iter().any(|a| a2.contains(a)) {
            v.record(
                "consistent_strategy",
                s,
                format!("{:?}", a1),
                format!("{:?}", a2),
            );
        }
    }
}

/// Dispatches a certificate to the matching proposition checker, after
/// validating the field pattern for its kind.
pub fn check_certificate(m: &Mdp, cert: &Certificate) -> Result<Verdict, CheckError> {
    if cert.x.len() != m.num_states() {
        return Err(CheckError::DimensionMismatch { cert: cert.x.len(), model: m.num_states() });
    }
    for (name, vec_len) in [
        ("rank", cert.rank.as_ref().map(|r| r.len())),
        ("rank2", cert.rank2.as_ref().map(|r| r.len())),
        ("strategy", cert.strategy.as_ref().map(|s| s.choice.len())),
    ] {
        if let Some(len) = vec_len {
            if len != m.num_states() {
                let _ = name;
                return Err(CheckError::DimensionMismatch { cert: len, model: m.num_states() });
            }
        }
    }
    if let Some(d) = &cert.declared_target {
        if d.universe() != m.num_states() {
            return Err(CheckError::DimensionMismatch { cert: d.universe(), model: m.num_states() });
        }
    }
    let target = m
        .label(&cert.query.target_label)
        .ok_or_else(|| CheckError::UnknownLabel(cert.query.target_label.clone()))?
        .clone();
    let q = &cert.query;
    if !q.objective.is_reward() && q.semantics.is_some() {
        return Err(CheckError::SemanticsOnReachability);
    }

    let forbid =
        |field: Option<bool>, name: &'static str| -> Result<(), CheckError> {
            match field {
                Some(true) => Err(CheckError::UnexpectedField { field: name }),
                _ => Ok(()),
            }
        };
    let no_rank2 = || forbid(Some(cert.rank2.is_some()), "rank2");
    let no_declared = || forbid(Some(cert.declared_target.is_some()), "tin");
    let no_strategy = || forbid(Some(cert.strategy.is_some()), "strategy");
    let no_rank = || forbid(Some(cert.rank.is_some()), "rank");

    match (q.objective, q.semantics_or_default(), q.bound) {
        (Objective::Pmin | Objective::Pmax, _, BoundDir::Upper) => {
            no_rank()?;
            no_rank2()?;
            no_declared()?;
            no_strategy()?;
            Ok(check_reach_upper(m, q.objective.opt(), &target, &cert.x))
        }
        (Objective::Pmin, _, BoundDir::Lower) => {
            no_rank2()?;
            no_declared()?;
            no_strategy()?;
            let r = require_rank(cert)?;
            Ok(check_reach_lower_min(m, &target, &cert.x, r))
        }
        (Objective::Pmax, _, BoundDir::Lower) => {
            no_rank2()?;
            no_declared()?;
            let r = require_rank(cert)?;
            Ok(match &cert.strategy {
                Some(s) => check_reach_lower_max_witness(m, &target, &cert.x, r, s),
                None => check_reach_lower_max(m, &target, &cert.x, r),
            })
        }
        (Objective::Emin | Objective::Emax, Semantics::Inf, BoundDir::Lower) => {
            no_rank2()?;
            no_declared()?;
            no_strategy()?;
            let r = require_rank(cert)?;
            Ok(check_rew_inf_lower(m, q.objective.opt(), &target, m.rewards(), &cert.x, r))
        }
        (Objective::Emax, Semantics::Inf, BoundDir::Upper) => {
            no_rank2()?;
            no_declared()?;
            no_strategy()?;
            let r = require_rank(cert)?;
            Ok(check_rew_inf_upper_max(m, &target, m.rewards(), &cert.x, r))
        }
        (Objective::Emin, Semantics::Inf, BoundDir::Upper) => {
            no_rank2()?;
            no_declared()?;
            let r = require_rank(cert)?;
            Ok(match &cert.strategy {
                Some(s) => check_rew_inf_upper_min_witness(m, &target, m.rewards(), &cert.x, r, s),
                None => check_rew_inf_upper_min(m, &target, m.rewards(), &cert.x, r),
            })
        }
        (Objective::Emin | Objective::Emax, Semantics::Rho, BoundDir::Upper) => {
            no_rank()?;
            no_rank2()?;
            no_declared()?;
            no_strategy()?;
            Ok(check_rew_rho_upper(m, q.objective.opt(), &target, m.rewards(), &cert.x))
        }
        (Objective::Emin, Semantics::Rho, BoundDir::Lower) => {
            no_strategy()?;
            let r1 = require_rank(cert)?;
            let r2 = cert.rank2.as_ref().ok_or(CheckError::MissingField { field: "rank2" })?;
            let declared = cert
                .declared_target
                .as_ref()
                .ok_or(CheckError::MissingField { field: "tin" })?;
            Ok(check_rew_rho_lower_min(m, &target, m.rewards(), &cert.x, r1, r2, declared))
        }
        (Objective::Emax, Semantics::Rho, BoundDir::Lower) => {
            let r1 = require_rank(cert)?;
            let r2 = cert.rank2.as_ref().ok_or(CheckError::MissingField { field: "rank2" })?;
            let declared = cert
                .declared_target
                .as_ref()
                .ok_or(CheckError::MissingField { field: "tin" })?;
            Ok(match &cert.strategy {
                Some(s) => {
                    check_rew_rho_lower_max(m, &target, m.rewards(), &cert.x, r1, r2, s, declared)
                }
                None => check_rew_rho_lower_max_nostrat(
                    m,
                    &target,
                    m.rewards(),
                    &cert.x,
                    r1,
                    r2,
                    declared,
                ),
            })
        }
    }
}

/// Merges the verdicts of several certificates (used by internal re-checks).
pub fn merge_verdicts(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
    let mut out = Verdict::default();
    for v in verdicts {
        out.merge(v);
    }
    out
}
