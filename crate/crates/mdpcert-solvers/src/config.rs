//! Solver configuration.

use mdpcert_core::numeric::{rat, Rat};

/// How intermediate arithmetic is rounded during iteration.
///
/// `None` emulates plain floating point: every operation rounds to the
/// nearest representable binary rational of the configured precision.
/// `Safe` rounds towards zero in from-below sweeps and towards infinity in
/// from-above sweeps, preserving (co-)inductivity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounding {
    None,
    Safe,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Pi,
    Ii,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Relative gap target for interval iteration.
    pub epsilon: Rat,
    /// Smoothing parameter in `[0, 1)`.
    pub gamma: Rat,
    pub rounding: Rounding,
    /// Significand width of the emulated binary arithmetic.
    pub precision_bits: u32,
    pub method: Method,
    pub max_sweeps: usize,
}

impl SolverConfig {
    /// The smoothing default depends on the rounding regime: a small gamma
    /// pairs best with safe rounding, a large one with plain rounding.
    pub fn default_gamma(rounding: Rounding) -> Rat {
        match rounding {
            Rounding::Safe => rat(1, 20),
            Rounding::None => rat(9, 10),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        use num::traits::{One, Signed};
        if !self.epsilon.is_positive() {
            return Err("epsilon must be positive".into());
        }
        if self.gamma.is_negative() || self.gamma >= Rat::one() {
            return Err("gamma must lie in [0, 1)".into());
        }
        if self.precision_bits < 2 {
            return Err("precision_bits must be at least 2".into());
        }
        Ok(())
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: rat(1, 1_000_000),
            gamma: rat(1, 20),
            rounding: Rounding::Safe,
            precision_bits: 53,
            method: Method::Pi,
            max_sweeps: 1_000_000,
        }
    }
}
