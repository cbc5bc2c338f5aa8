//! Canned models for the unit tests of this crate. Downstream crates use
//! the richer `mdpcert-testmodels` instead.

use crate::model::{Mdp, MdpBuilder};
use crate::numeric::{rat, Rat};

/// Three states 0 = z, 1 = s, 2 = t; action 0 solid, action 1 dashed.
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

/// Self-loops everywhere plus a 1/2-1/2 split from s0; target {s2}.
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

/// Loop-or-step chain with rewards (0, 100, 0); target {s2}.
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

/// Two-state DTMC with a 1/2 self-loop at s and the given reward there.
pub fn half_loop_dtmc(reward: Rat) -> Mdp {
    let mut b = MdpBuilder::new(2)
        .action(0, vec![(0, rat(1, 2)), (1, rat(1, 2))])
        .action(1, vec![(1, rat(1, 1))])
        .label("target", vec![1]);
    b.set_reward(0, reward);
    b.build().unwrap()
}

/// Deterministic cycle with target {0}.
pub fn cycle_dtmc(n: usize) -> Mdp {
    let mut b = MdpBuilder::new(n);
    for s in 0..n {
        b.push_action(s, vec![((s + 1) % n, rat(1, 1))]);
    }
    b.set_label("target", vec![0]);
    b.build().unwrap()
}
