//! Exact parsing and printing of rationals: `num/den`, integers, and
//! base-10 decimals (converted exactly).

use mdpcert_core::numeric::Rat;
use num::bigint::BigInt;
use num::traits::{Signed, Zero};
use std::str::FromStr;

pub fn parse_rat(token: &str) -> Result<Rat, String> {
    if let Some((num, den)) = token.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| format!("malformed rational '{token}'"))?;
        let d = BigInt::from_str(den.trim()).map_err(|_| format!("malformed rational '{token}'"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in '{token}'"));
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int, frac)) = token.split_once('.') {
        let int = if int.is_empty() { "0" } else { int };
        let neg = int.starts_with('-');
        let i = BigInt::from_str(int).map_err(|_| format!("malformed decimal '{token}'"))?;
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("malformed decimal '{token}'"));
        }
        let f = BigInt::from_str(frac).map_err(|_| format!("malformed decimal '{token}'"))?;
        let scale = num::pow::pow(BigInt::from(10), frac.len());
        let mut value = Rat::new(i.abs() * &scale + f, scale);
        if neg {
            value = -value;
        }
        return Ok(value);
    }
    let n = BigInt::from_str(token).map_err(|_| format!("malformed rational '{token}'"))?;
    Ok(Rat::from(n))
}

pub fn format_rat(r: &Rat) -> String {
    r.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use mdpcert_core::numeric::rat;

    #[test]
    fn parses_fraction_integer_decimal() {
        assert_eq!(parse_rat("1/3").unwrap(), rat(1, 3));
        assert_eq!(parse_rat("2/4").unwrap(), rat(1, 2));
        assert_eq!(parse_rat("5").unwrap(), rat(5, 1));
        assert_eq!(parse_rat("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rat("1.5").unwrap(), rat(3, 2));
        assert_eq!(parse_rat("-0.5").unwrap(), rat(-1, 2));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("a/b").is_err());
        assert!(parse_rat("1.x").is_err());
    }
}
