//! C99-style hexadecimal float text (`0x1.8p+1`), used wherever a real
//! number has to survive a file round trip bit for bit.
//!
//! Formatting always produces the canonical form: `0x1.<hex>p<exp>` for
//! normal numbers, `0x0.<hex>p-1022` for subnormals, `0x0p+0` for zero and
//! `inf`/`-inf`. NaN has no representation. Parsing accepts any hex float
//! (arbitrary digit count, optional fraction, upper or lower case) and rounds
//! to nearest, ties to even.

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserializer, Serializer};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HexFloatError {
    #[error("empty hex float")]
    Empty,
    #[error("missing 0x prefix in {0:?}")]
    MissingPrefix(String),
    #[error("malformed hex float {0:?}")]
    Malformed(String),
    #[error("NaN is not representable")]
    NotANumber,
}

const MANT_BITS: u32 = 52;
const MANT_MASK: u64 = (1 << MANT_BITS) - 1;

pub fn format(v: f64) -> Result<String, HexFloatError> {
    if v.is_nan() {
        return Err(HexFloatError::NotANumber);
    }
    let sign = if v.is_sign_negative() { "-" } else { "" };
    if v.is_infinite() {
        return Ok(format!("{sign}inf"));
    }
    if v == 0.0 {
        return Ok(format!("{sign}0x0p+0"));
    }
    let bits = v.to_bits();
    let biased = ((bits >> MANT_BITS) & 0x7ff) as i32;
    let mant = bits & MANT_MASK;
    let (lead, exp) = if biased == 0 { (0, -1022) } else { (1, biased - 1023) };
    let mut digits = format!("{mant:013x}");
    while digits.ends_with('0') {
        digits.pop();
    }
    let frac = if digits.is_empty() { String::new() } else { format!(".{digits}") };
    let esign = if exp >= 0 { "+" } else { "-" };
    Ok(format!("{sign}0x{lead}{frac}p{esign}{}", exp.unsigned_abs()))
}

pub fn parse(s: &str) -> Result<f64, HexFloatError> {
    if s.is_empty() {
        return Err(HexFloatError::Empty);
    }
    let (neg, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let lower = body.to_ascii_lowercase();
    if lower == "inf" || lower == "infinity" {
        return Ok(if neg { f64::NEG_INFINITY } else { f64::INFINITY });
    }
    if lower == "nan" {
        return Err(HexFloatError::NotANumber);
    }
    let rest = lower
        .strip_prefix("0x")
        .ok_or_else(|| HexFloatError::MissingPrefix(s.to_string()))?;
    let malformed = || HexFloatError::Malformed(s.to_string());

    let (mantissa_txt, exp_txt) = rest.split_once('p').ok_or_else(malformed)?;
    let (int_txt, frac_txt) = match mantissa_txt.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa_txt, ""),
    };
    if int_txt.is_empty() && frac_txt.is_empty() {
        return Err(malformed());
    }

    // Keep the first 16 significant hex digits, fold the rest into a sticky bit.
    let mut mant: u64 = 0;
    let mut kept = 0u32;
    let mut sticky = false;
    let mut exp2: i64 = 0;
    let mut seen_nonzero = false;
    for (i, c) in int_txt.chars().chain(frac_txt.chars()).enumerate() {
        let d = c.to_digit(16).ok_or_else(malformed)? as u64;
        let in_frac = i >= int_txt.len();
        if !seen_nonzero && d == 0 {
            if in_frac {
                exp2 -= 4;
            }
            continue;
        }
        seen_nonzero = true;
        if kept < 16 {
            mant = (mant << 4) | d;
            kept += 1;
            if in_frac {
                exp2 -= 4;
            }
        } else {
            sticky |= d != 0;
            if !in_frac {
                exp2 += 4;
            }
        }
    }

    let exp_val = parse_exponent(exp_txt).ok_or_else(malformed)?;
    if mant == 0 {
        return Ok(if neg { -0.0 } else { 0.0 });
    }
    let v = assemble(mant, sticky, exp2.saturating_add(exp_val));
    Ok(if neg { -v } else { v })
}

fn parse_exponent(txt: &str) -> Option<i64> {
    let (neg, digits) = match txt.as_bytes().first()? {
        b'-' => (true, &txt[1..]),
        b'+' => (false, &txt[1..]),
        _ => (false, txt),
    };
    if digits.is_empty() {
        return None;
    }
    let mut e: i64 = 0;
    for c in digits.chars() {
        let d = c.to_digit(10)? as i64;
        // saturate far beyond any representable exponent
        e = (e * 10 + d).min(1 << 40);
    }
    Some(if neg { -e } else { e })
}

/// Rounds `(mant + sticky) * 2^exp2` to the nearest f64, ties to even.
fn assemble(mant: u64, sticky: bool, exp2: i64) -> f64 {
    let lz = mant.leading_zeros();
    let mant = mant << lz;
    let e = exp2 - lz as i64 + 63; // unbiased exponent of the leading bit
    if e > 1023 {
        return f64::INFINITY;
    }
    let drop = 11 + (-1022 - e).max(0);
    if drop > 64 {
        // below half the smallest subnormal
        return 0.0;
    }
    if drop == 64 {
        // in [2^-1075, 2^-1074): an exact half ties to zero
        let exact_half = mant == 1 << 63 && !sticky;
        return if exact_half { 0.0 } else { f64::from_bits(1) };
    }
    let wide = ((mant as u128) << 64) | sticky as u128;
    let shift = (drop + 64) as u32;
    let mut kept = (wide >> shift) as u64;
    let rem = wide & ((1u128 << shift) - 1);
    let half = 1u128 << (shift - 1);
    if rem > half || (rem == half && kept & 1 == 1) {
        kept += 1;
    }
    if drop > 11 {
        // subnormal; a carry into bit 52 lands on the smallest normal exactly
        return f64::from_bits(kept);
    }
    let mut e = e;
    if kept == 1 << 53 {
        kept >>= 1;
        e += 1;
        if e > 1023 {
            return f64::INFINITY;
        }
    }
    f64::from_bits((((e + 1023) as u64) << MANT_BITS) | (kept & MANT_MASK))
}

struct HexVisitor;

impl Visitor<'_> for HexVisitor {
    type Value = f64;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a hex-float string or a number")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
        parse(v).map_err(E::custom)
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
        Ok(v)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
        Ok(v as f64)
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
        Ok(v as f64)
    }
}

/// `#[serde(with = "hexfloat::scalar")]` for an `f64` field. Deserialization
/// also accepts plain JSON numbers.
pub mod scalar {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        let txt = format(*v).map_err(serde::ser::Error::custom)?;
        s.serialize_str(&txt)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(HexVisitor)
    }
}

/// `#[serde(with = "hexfloat::option")]` for an `Option<f64>` field.
pub mod option {
    use super::*;
    use serde::{Deserialize, Serialize};

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(HexF64).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<HexF64>::deserialize(d)?.map(|h| h.0))
    }
}

/// `#[serde(with = "hexfloat::vec")]` for a `Vec<f64>` field.
pub mod vec {
    use super::*;
    use serde::{Deserialize, Serialize};

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let wrapped: Vec<HexF64> = v.iter().copied().map(HexF64).collect();
        wrapped.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Ok(Vec::<HexF64>::deserialize(d)?.into_iter().map(|h| h.0).collect())
    }
}

/// An `f64` that serializes as a hex-float string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexF64(pub f64);

impl serde::Serialize for HexF64 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        scalar::serialize(&self.0, s)
    }
}

impl<'de> serde::Deserialize<'de> for HexF64 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        scalar::deserialize(d).map(HexF64)
    }
}
