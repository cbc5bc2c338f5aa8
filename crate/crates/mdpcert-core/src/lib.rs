//! Exact-arithmetic building blocks for certified MDP model checking.
//!
//! The crate deliberately contains no numeric solver code: everything here is
//! either a model type, a graph algorithm, a ranking-function computation, or
//! a certificate condition evaluated in exact rational arithmetic. A
//! certificate checker built on this crate therefore has a small trust base.

#[cfg(test)]
pub(crate) mod fixtures;

pub mod bellman;
pub mod certificate;
pub mod graph;
pub mod model;
pub mod numeric;
pub mod ranking;
pub mod stateset;

pub use model::{Mdp, MdpError, Strategy};
pub use numeric::{ExtVal, Rank, RankVec, Rat, ValueVec};
pub use stateset::StateSet;
