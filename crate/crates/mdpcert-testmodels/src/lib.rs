//! Small canned models used across the test suites, plus a seeded random
//! model generator for the desk-scale corpora.

use mdpcert_core::model::{Mdp, MdpBuilder};
use mdpcert_core::numeric::{rat, Rat};
use num::traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Three-state MDP with a branching and a direct action per state.
/// States: 0 = z, 1 = s, 2 = t; target {t}. Action 0 is solid, action 1 is
/// dashed where it exists (t only has its solid self-loop).
pub fn three_state() -> Mdp {
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

/// Three states s0, s1, s2 with self-loops (action 0 everywhere) and one
/// extra action at s0 splitting 1/2-1/2 between s1 and s2; target {s2}.
/// The modified max operator has a whole family of fixed points here.
pub fn self_loop_split() -> Mdp {
    MdpBuilder::new(3)
        .action(0, vec![(0, rat(1, 1))])
        .action(0, vec![(1, rat(1, 2)), (2, rat(1, 2))])
        .action(1, vec![(1, rat(1, 1))])
        .action(2, vec![(2, rat(1, 1))])
        .label("target", vec![2])
        .build()
        .unwrap()
}

/// States s0 (loop or step to s1), s1 (to s2), s2 absorbing target; rewards
/// (0, 100, 0). Minimal expected reward from s0 is 100 with the infinity
/// semantics and 0 with the accumulate-forever semantics.
pub fn detour_chain() -> Mdp {
    MdpBuilder::new(3)
        .action(0, vec![(0, rat(1, 1))])
        .action(0, vec![(1, rat(1, 1))])
        .action(1, vec![(2, rat(1, 1))])
        .action(2, vec![(2, rat(1, 1))])
        .reward(1, rat(100, 1))
        .label("target", vec![2])
        .build()
        .unwrap()
}

/// Two-state DTMC: s loops with probability 1/2 or moves to the absorbing
/// target t; `reward` is the state reward of s. Expected reward is twice the
/// state reward.
pub fn half_loop_dtmc(reward: Rat) -> Mdp {
    let mut b = MdpBuilder::new(2)
        .action(0, vec![(0, rat(1, 2)), (1, rat(1, 2))])
        .action(1, vec![(1, rat(1, 1))])
        .label("target", vec![1]);
    b.set_reward(0, reward);
    b.build().unwrap()
}

/// A deterministic cycle 0 -> 1 -> ... -> n-1 -> 0 with target {0}.
pub fn cycle_dtmc(n: usize) -> Mdp {
    let mut b = MdpBuilder::new(n);
    for s in 0..n {
        b.push_action(s, vec![((s + 1) % n, rat(1, 1))]);
    }
    b.set_label("target", vec![0]);
    b.build().unwrap()
}

/// A chain 0 -> 1 -> ... -> n-1 where each interior state moves forward with
/// probability 2/3 and restarts at 0 with probability 1/3; the last state is
/// the absorbing target. Used by the linear-scaling checks.
pub fn chain(n: usize) -> Mdp {
    assert!(n >= 2);
    let mut b = MdpBuilder::new(n);
    for s in 0..n - 1 {
        b.push_action(s, vec![(s + 1, rat(2, 3)), (0, rat(1, 3))]);
    }
    b.push_action(n - 1, vec![(n - 1, rat(1, 1))]);
    b.set_label("target", vec![n - 1]);
    b.build().unwrap()
}

/// Configuration for the random corpus.
#[derive(Clone, Debug)]
pub struct GenConfig {
    pub max_states: usize,
    pub max_actions: usize,
    pub max_denominator: u64,
    /// Probability that a state carries a positive reward.
    pub reward_density: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_states: 8,
            max_actions: 3,
            max_denominator: 10,
            reward_density: 0.4,
        }
    }
}

/// Deterministic random MDP for a given seed. Distributions are exact: a
/// random denominator `d <= max_denominator` is split into positive integer
/// parts, so probabilities always sum to exactly one.
pub fn random_mdp(seed: u64, cfg: &GenConfig) -> Mdp {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=cfg.max_states);
    let mut b = MdpBuilder::new(n);
    for s in 0..n {
        let n_actions = rng.gen_range(1..=cfg.max_actions);
        for _ in 0..n_actions {
            b.push_action(s, random_distribution(&mut rng, n, cfg.max_denominator));
        }
    }
    // Random target set; bias towards small nonempty sets but allow empty.
    let mut targets = Vec::new();
    for s in 0..n {
        if rng.gen_bool(0.25) {
            targets.push(s);
        }
    }
    if targets.is_empty() && rng.gen_bool(0.8) {
        targets.push(rng.gen_range(0..n));
    }
    b.set_label("target", targets);
    for s in 0..n {
        if rng.gen_bool(cfg.reward_density) {
            let den = rng.gen_range(1..=cfg.max_denominator);
            let num = rng.gen_range(0..=3 * den);
            let r = Rat::new(num.into(), den.into());
            if !r.is_zero() {
                b.set_reward(s, r);
            }
        }
    }
    b.build().expect("generated model must be valid")
}

fn random_distribution(rng: &mut ChaCha8Rng, n: usize, max_den: u64) -> Vec<(usize, Rat)> {
    let support_size = rng.gen_range(1..=3.min(n));
    let mut support = Vec::new();
    while support.len() < support_size {
        let t = rng.gen_range(0..n);
        if !support.contains(&t) {
            support.push(t);
        }
    }
    support.sort_unstable();
    let den = rng.gen_range(support_size as u64..=max_den.max(support_size as u64));
    // Split `den` into `support_size` positive parts.
    let mut parts = vec![1u64; support_size];
    let mut rest = den - support_size as u64;
    for i in 0..support_size {
        if rest == 0 {
            break;
        }
        let take = if i + 1 == support_size { rest } else { rng.gen_range(0..=rest) };
        parts[i] += take;
        rest -= take;
    }
    support
        .into_iter()
        .zip(parts)
        .map(|(t, p)| (t, Rat::new(p.into(), den.into())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canned_models_are_valid() {
        for m in [three_state(), self_loop_split(), detour_chain(), half_loop_dtmc(rat(1, 1)), cycle_dtmc(5), chain(4)] {
            assert!(m.validate().is_ok());
        }
    }

    #[test]
    fn random_models_are_valid_and_deterministic() {
        let cfg = GenConfig::default();
        for seed in 0..200 {
            let m = random_mdp(seed, &cfg);
            assert!(m.validate().is_ok());
            assert_eq!(m, random_mdp(seed, &cfg));
        }
    }
}
