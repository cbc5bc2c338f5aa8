//! The value domains: exact rationals, extended non-negative values, and
//! extended naturals (ranks).

use std::cmp::Ordering;
use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};

/// Arbitrary-precision rational. Stored in lowest terms with a positive
/// denominator (maintained by `num`).
pub type Rat = BigRational;

/// Builds a rational from machine integers.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Extended non-negative value: a finite rational `>= 0` or infinity.
///
/// The derived order places every finite value below `Infinity`, and
/// compares finite values exactly.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExtVal {
    Finite(Rat),
    Infinity,
}

impl ExtVal {
    pub fn zero() -> Self {
        ExtVal::Finite(Rat::zero())
    }

    pub fn one() -> Self {
        ExtVal::Finite(Rat::one())
    }

    pub fn from_rat(r: Rat) -> Self {
        debug_assert!(!r.is_negative(), "ExtVal must be non-negative");
        ExtVal::Finite(r)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtVal::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtVal::Infinity)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtVal::Finite(r) if r.is_zero())
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            ExtVal::Finite(r) => Some(r),
            ExtVal::Infinity => None,
        }
    }

    /// `self + other` with absorbing infinity: `a + inf = inf`.
    pub fn add(&self, other: &ExtVal) -> ExtVal {
        match (self, other) {
            (ExtVal::Finite(a), ExtVal::Finite(b)) => ExtVal::Finite(a + b),
            _ => ExtVal::Infinity,
        }
    }

    /// `p * self` for a rational weight `p >= 0`.
    ///
    /// Multiplication by infinity absorbs positive weights; `0 * inf = 0` so
    /// that sums over distributions stay well-defined even if a weight of
    /// zero ever shows up.
    pub fn scale(&self, p: &Rat) -> ExtVal {
        match self {
            ExtVal::Finite(r) => ExtVal::Finite(p * r),
            ExtVal::Infinity => {
                if p.is_zero() {
                    ExtVal::zero()
                } else {
                    ExtVal::Infinity
                }
            }
        }
    }
}

impl fmt::Display for ExtVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtVal::Finite(r) => write!(f, "{}", r),
            ExtVal::Infinity => write!(f, "inf"),
        }
    }
}

/// Total-order comparison on extended values; exact on rationals.
pub fn compare_ext(a: &ExtVal, b: &ExtVal) -> Ordering {
    a.cmp(b)
}

/// Extended natural number used by ranking functions: `1 + inf = inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rank {
    Finite(u64),
    Infinity,
}

impl Rank {
    pub fn is_finite(&self) -> bool {
        matches!(self, Rank::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Rank::Infinity)
    }

    /// `1 + self`, saturating at infinity.
    pub fn succ(&self) -> Rank {
        match self {
            Rank::Finite(n) => Rank::Finite(n + 1),
            Rank::Infinity => Rank::Infinity,
        }
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Finite(n) => write!(f, "{}", n),
            Rank::Infinity => write!(f, "inf"),
        }
    }
}

/// Per-state extended values.
pub type ValueVec = Vec<ExtVal>;
/// Per-state ranks.
pub type RankVec = Vec<Rank>;

/// Sum of `p * x(succ)` over a sparse distribution.
pub fn weighted_sum(dist: &[(usize, Rat)], x: &[ExtVal]) -> ExtVal {
    let mut acc = ExtVal::zero();
    for (succ, p) in dist {
        acc = acc.add(&x[*succ].scale(p));
    }
    acc
}

/// True iff every entry is a finite rational in `[0, 1]`.
pub fn is_probability_vector(x: &[ExtVal]) -> bool {
    x.iter().all(|v| match v {
        ExtVal::Finite(r) => !r.is_negative() && *r <= Rat::one(),
        ExtVal::Infinity => false,
    })
}
