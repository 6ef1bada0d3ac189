//! Exact rational helpers shared by ingestion, rounding and reporting.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::de::{self, Deserializer, Visitor};
use serde::Serializer;
use std::fmt;

/// Exact rational used at API boundaries.
pub type Q = Ratio<i64>;

/// Parses `"3"`, `"-2.75"`, `"1e3"` or `"5/8"` without going through floats.
pub fn parse_rational(text: &str) -> Option<Q> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: i64 = n.trim().parse().ok()?;
        let d: i64 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Q::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let negative = mantissa.starts_with('-');
    let digits = mantissa.trim_start_matches(['-', '+']);
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let mut num: i128 = 0;
    for c in int_part.chars().chain(frac_part.chars()) {
        num = num.checked_mul(10)?.checked_add(c as i128 - '0' as i128)?;
    }
    let mut den: i128 = 1;
    for _ in 0..frac_part.len() {
        den = den.checked_mul(10)?;
    }
    if exp >= 0 {
        for _ in 0..exp {
            num = num.checked_mul(10)?;
        }
    } else {
        for _ in 0..(-exp) {
            den = den.checked_mul(10)?;
        }
    }
    if negative {
        num = -num;
    }
    let g = num.gcd(&den).max(1);
    let (n, d) = (num / g, den / g);
    Some(Q::new(i64::try_from(n).ok()?, i64::try_from(d).ok()?))
}

/// Floor of `x` as an integer.
pub fn floor_q(x: &Q) -> i64 {
    Integer::div_floor(x.numer(), x.denom())
}

/// Ceiling of `x` as an integer.
pub fn ceil_q(x: &Q) -> i64 {
    -Integer::div_floor(&-x.numer(), x.denom())
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `p/q` for non-integers, plain integer text otherwise.
pub fn format_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Integer `⌈√(num/den)·scale⌉` computed exactly, for nonnegative `num/den`.
pub fn ceil_sqrt_scaled(num: i128, den: i128, scale: i128) -> i128 {
    // smallest c >= 0 with c^2 * den >= num * scale^2
    let target = num * scale * scale;
    let approx = ((target as f64) / (den as f64)).sqrt();
    let mut c = approx.floor() as i128;
    c = c.max(0);
    while c > 0 && (c - 1) * (c - 1) * den >= target {
        c -= 1;
    }
    while c * c * den < target {
        c += 1;
    }
    c
}

pub fn serialize_q<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_q(x))
}

pub fn serialize_opt_q<S: Serializer>(x: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&format_q(v)),
        None => s.serialize_none(),
    }
}

struct QVisitor;

impl<'de> Visitor<'de> for QVisitor {
    type Value = Q;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a number or a \"p/q\" string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Q, E> {
        Ok(Q::from_integer(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Q, E> {
        i64::try_from(v).map(Q::from_integer).map_err(E::custom)
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Q, E> {
        parse_rational(&v.to_string()).ok_or_else(|| E::custom("unrepresentable number"))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Q, E> {
        parse_rational(v).ok_or_else(|| E::custom(format!("bad rational {v:?}")))
    }

    fn visit_map<A: de::MapAccess<'de>>(self, mut map: A) -> Result<Q, A::Error> {
        // arbitrary_precision numbers arrive as a single-entry map
        let key: Option<String> = map.next_key()?;
        if key.is_none() {
            return Err(de::Error::custom("empty map for number"));
        }
        let text: String = map.next_value()?;
        parse_rational(&text).ok_or_else(|| de::Error::custom(format!("bad number {text}")))
    }
}

pub fn deserialize_q<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
    d.deserialize_any(QVisitor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_and_fraction_forms() {
        assert_eq!(parse_rational("1.05"), Some(Q::new(21, 20)));
        assert_eq!(parse_rational("-3"), Some(Q::from_integer(-3)));
        assert_eq!(parse_rational("5/8"), Some(Q::new(5, 8)));
        assert_eq!(parse_rational("2e2"), Some(Q::from_integer(200)));
        assert_eq!(parse_rational("1.5e-1"), Some(Q::new(3, 20)));
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn floor_and_ceil_round_toward_the_right_side() {
        assert_eq!(floor_q(&Q::new(-7, 2)), -4);
        assert_eq!(ceil_q(&Q::new(-7, 2)), -3);
        assert_eq!(ceil_q(&Q::new(7, 2)), 4);
    }

    #[test]
    fn ceil_sqrt_is_exact_on_squares() {
        assert_eq!(ceil_sqrt_scaled(25, 1, 1), 5);
        assert_eq!(ceil_sqrt_scaled(2, 1, 1000), 1415);
        assert_eq!(ceil_sqrt_scaled(1, 4, 10), 5);
    }
}
