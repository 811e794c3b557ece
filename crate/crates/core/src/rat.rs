//! Exact rational scalars and the `"p/q"` wire format used in all JSON reports.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::str::FromStr;

pub type Rat = BigRational;

/// `p/q` as an exact rational. Panics if `q == 0`; use for literals only.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(p: i64) -> Rat {
    Rat::from_integer(BigInt::from(p))
}

/// Canonical display: `"p"` for integers, `"p/q"` otherwise (q > 0, sign on p).
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p"`, `"p/q"`, or a plain decimal like `"-0.25"` into an exact rational.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let num = BigInt::from_str(p.trim()).ok()?;
        let den = BigInt::from_str(q.trim()).ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rat::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int_part.trim_start().starts_with('-');
        let int = if int_part.is_empty() || int_part == "-" || int_part == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(int_part).ok()?
        };
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac = BigInt::from_str(frac_part).ok()?;
        let numer = int.abs() * &scale + frac;
        let signed = if negative { -numer } else { numer };
        return Some(Rat::new(signed, scale));
    }
    BigInt::from_str(s).ok().map(Rat::from_integer)
}

/// Exact conversion of a finite binary64 value (every finite f64 is rational).
pub fn rat_from_f64(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["3/2", "-7/4", "5", "0", "-12"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(rat_to_string(&r), s);
        }
        assert_eq!(parse_rat("6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_rat("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rat("-0.125").unwrap(), rat(-1, 8));
        assert!(parse_rat("1/0").is_none());
        assert!(parse_rat("a/b").is_none());
    }

    #[test]
    fn f64_conversion_is_exact_for_dyadics() {
        assert_eq!(rat_from_f64(0.5).unwrap(), rat(1, 2));
        assert_eq!(rat_from_f64(-2.75).unwrap(), rat(-11, 4));
    }
}
