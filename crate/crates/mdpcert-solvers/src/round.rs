//! Software-emulated binary rounding.
//!
//! Numbers are rounded to the nearest binary rational whose significand fits
//! the configured bit width, with an unbounded exponent. This reproduces the
//! direction behaviour of IEEE rounding modes deterministically and without
//! touching hardware state.

use mdpcert_core::numeric::Rat;
use num::bigint::BigInt;
use num::traits::{Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Down,
    Up,
    Nearest,
}

/// Rounds `v >= 0` to a binary rational with a significand of at most `bits`
/// bits. Exactly representable values are returned unchanged.
pub fn round_directed(v: &Rat, direction: Direction, bits: u32) -> Rat {
    debug_assert!(!v.is_negative());
    if v.is_zero() {
        return v.clone();
    }
    let numer = v.numer();
    let denom = v.denom();
    // Choose e with 2^(bits-1) <= v / 2^e < 2^bits, i.e. the significand
    // m = floor(v / 2^e) is a `bits`-bit integer.
    let e: i64 = numer.bits() as i64 - denom.bits() as i64 - bits as i64;
    let (mut scaled_num, mut scaled_den) = (numer.clone(), denom.clone());
    if e >= 0 {
        scaled_den <<= e as u64;
    } else {
        scaled_num <<= (-e) as u64;
    }
    let mut e = e;
    let mut quot = &scaled_num / &scaled_den;
    // The bit-length estimate can be off by one in either direction.
    while quot.bits() > bits as u64 {
        e += 1;
        quot = shift_den(&scaled_num, &mut scaled_den) ;
    }
    while quot.bits() < bits as u64 {
        e -= 1;
        scaled_num <<= 1u32;
        quot = &scaled_num / &scaled_den;
    }
    let rem = &scaled_num - &quot * &scaled_den;
    if rem.is_zero() {
        return pow2(&quot, e);
    }
    match direction {
        Direction::Down => pow2(&quot, e),
        Direction::Up => pow2(&(quot + 1), e),
        Direction::Nearest => {
            // Ties to even, like the IEEE default.
            let twice = &rem << 1u32;
            if twice > scaled_den || (twice == scaled_den && quot.is_odd()) {
                pow2(&(quot + 1), e)
            } else {
                pow2(&quot, e)
            }
        }
    }
}

fn shift_den(num: &BigInt, den: &mut BigInt) -> BigInt {
    *den <<= 1u32;
    num / &*den
}

fn pow2(m: &BigInt, e: i64) -> Rat {
    if e >= 0 {
        Rat::new(m << e as u64, BigInt::from(1))
    } else {
        Rat::new(m.clone(), BigInt::from(1) << (-e) as u64)
    }
}

trait OddExt {
    fn is_odd(&self) -> bool;
}

impl OddExt for BigInt {
    fn is_odd(&self) -> bool {
        use num::Integer;
        Integer::is_odd(self)
    }
}
