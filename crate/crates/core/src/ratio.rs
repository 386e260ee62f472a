//! Rationals as `"num/den"` strings in JSON payloads.
//!
//! Exact coordinates must survive serialization byte for byte, so every
//! rational crossing a JSON boundary is written as a string like `"-3/2"`
//! (always with an explicit positive denominator) and parsed back without
//! loss.  A bare integer string like `"7"` is accepted on input.

use num::{BigInt, BigRational};

pub(crate) fn format_rat(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub(crate) fn parse_rat(s: &str) -> Result<BigRational, String> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
    let den: BigInt = den.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
    if den == BigInt::from(0) {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(num, den))
}

pub(crate) fn format_vec(v: &[BigRational]) -> Vec<String> {
    v.iter().map(format_rat).collect()
}

pub(crate) fn parse_vec(v: &[String]) -> Result<Vec<BigRational>, String> {
    v.iter().map(|s| parse_rat(s)).collect()
}
