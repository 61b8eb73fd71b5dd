//! Arbitrary-precision rational scalars.
//!
//! All arithmetic in this crate is exact; `Rat` is a reduced fraction of
//! `BigInt`s with positive denominator (the representation `num` maintains
//! on every operation). Parsing and formatting use the plain text form
//! `p/q`, with `/q` omitted when the denominator is one.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

/// Exact rational scalar, always in lowest terms with positive denominator.
pub type Rat = BigRational;

/// `n` as a rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `n/d` as a rational. Panics on `d == 0`; use [`parse_rat`] for input data.
pub fn ratio(n: i64, d: i64) -> Rat {
    assert!(d != 0, "zero denominator");
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p` or `p/q` with optional sign, rejecting `q == 0`.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let numer: BigInt = num_str
        .parse()
        .map_err(|_| format!("bad numerator {num_str:?}"))?;
    let denom: BigInt = match den_str {
        Some(d) => d.parse().map_err(|_| format!("bad denominator {d:?}"))?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err("zero denominator".to_string());
    }
    Ok(Rat::new(numer, denom))
}

/// Formats as `p/q`, or plain `p` when the denominator is one.
pub fn fmt_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Largest integer `<= x`.
pub fn floor_int(x: &Rat) -> BigInt {
    x.floor().to_integer()
}

/// Smallest integer `>= x`.
pub fn ceil_int(x: &Rat) -> BigInt {
    x.ceil().to_integer()
}

/// True when `x` is an integer.
pub fn is_integer(x: &Rat) -> bool {
    x.denom().is_one()
}

/// Sign of `x` as -1, 0, 1.
pub fn sign(x: &Rat) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_roundtrip() {
        for s in ["0", "7", "-3", "1/2", "-5/8", "22/7"] {
            let x = parse_rat(s).unwrap();
            assert_eq!(fmt_rat(&x), s);
        }
        // Reduction and denominator-sign normalization happen on parse.
        assert_eq!(fmt_rat(&parse_rat("4/8").unwrap()), "1/2");
        assert_eq!(fmt_rat(&parse_rat("3/-6").unwrap()), "-1/2");
        assert_eq!(fmt_rat(&parse_rat(" 2 / 4 ").unwrap()), "1/2");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("").is_err());
        assert!(parse_rat("a/2").is_err());
        assert!(parse_rat("1/2/3").is_err());
        assert!(parse_rat("1.5").is_err());
    }

    #[test]
    fn floor_ceil() {
        assert_eq!(floor_int(&ratio(7, 2)), BigInt::from(3));
        assert_eq!(ceil_int(&ratio(7, 2)), BigInt::from(4));
        assert_eq!(floor_int(&ratio(-7, 2)), BigInt::from(-4));
        assert_eq!(ceil_int(&ratio(-7, 2)), BigInt::from(-3));
        assert_eq!(floor_int(&rat(5)), BigInt::from(5));
        assert_eq!(ceil_int(&rat(5)), BigInt::from(5));
    }
}
