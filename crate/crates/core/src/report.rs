//! JSON representation of exact values.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Rational;

/// A rational as `{"num": p, "den": q}` in lowest terms with `q > 0`.
///
/// Parts that do not fit `i64` are written as decimal strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalJson(pub Rational);

impl RationalJson {
    pub fn to_rational(&self) -> Rational {
        self.0.clone()
    }
}

impl From<&Rational> for RationalJson {
    fn from(q: &Rational) -> Self {
        RationalJson(q.clone())
    }
}

impl From<Rational> for RationalJson {
    fn from(q: Rational) -> Self {
        RationalJson(q)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Int {
    Small(i64),
    Big(String),
}

impl From<&BigInt> for Int {
    fn from(v: &BigInt) -> Self {
        v.to_i64().map_or_else(|| Int::Big(v.to_string()), Int::Small)
    }
}

impl Int {
    fn to_big(&self) -> Option<BigInt> {
        match self {
            Int::Small(v) => Some(BigInt::from(*v)),
            Int::Big(s) => s.parse().ok(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Parts {
    num: Int,
    den: Int,
}

impl Serialize for RationalJson {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Parts {
            num: self.0.numer().into(),
            den: self.0.denom().into(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalJson {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let p = Parts::deserialize(d)?;
        let num = p.num.to_big().ok_or_else(|| D::Error::custom("bad numerator"))?;
        let den = p.den.to_big().ok_or_else(|| D::Error::custom("bad denominator"))?;
        if den == BigInt::from(0) {
            return Err(D::Error::custom("zero denominator"));
        }
        Ok(RationalJson(Rational::new(num, den)))
    }
}

/// Parses `p/q` or an integer `p`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (n, d) = text.split_once('/').unwrap_or((text, "1"));
    let n: BigInt = n.trim().parse().ok()?;
    let d: BigInt = d.trim().parse().ok()?;
    if d == BigInt::from(0) {
        return None;
    }
    Some(Rational::new(n, d))
}

/// `p/q`, or just `p` for integers.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Largest channel saturation level of the form `7/(2^k - 1)` strictly
/// below `|τ|`, for negative `τ`. Saturating the channel there keeps every
/// trajectory of the set out of a bad equilibrium.
pub fn deactivation_lch(tau: &Rational) -> Option<Rational> {
    if !tau.is_negative() {
        return None;
    }
    let mag = -tau.clone();
    (3..=62u32)
        .map(|k| Rational::new(BigInt::from(7), (BigInt::from(1u64) << k) - 1))
        .find(|l| *l < mag)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deactivation_levels() {
        let q = |s| parse_rational(s).unwrap();
        assert_eq!(deactivation_lch(&q("-1/3")), Some(q("7/31")));
        assert_eq!(deactivation_lch(&q("-1/2")), Some(q("7/15")));
        assert_eq!(deactivation_lch(&q("-1")), Some(q("7/15")));
        assert_eq!(deactivation_lch(&q("-1/9")), Some(q("7/127")));
        assert_eq!(deactivation_lch(&q("0")), None);
        assert_eq!(deactivation_lch(&q("1")), None);
    }

    #[test]
    fn json_round_trip() {
        let q = parse_rational("-2/6").unwrap();
        let text = serde_json::to_string(&RationalJson::from(&q)).unwrap();
        assert_eq!(text, r#"{"num":-1,"den":3}"#);
        let back: RationalJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.0, q);
    }

    #[test]
    fn huge_parts_become_strings() {
        let big = Rational::from_integer(BigInt::from(10).pow(40));
        let text = serde_json::to_string(&RationalJson::from(&big)).unwrap();
        assert!(text.contains('"'));
        let back: RationalJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.0, big);
    }

    #[test]
    fn parsing() {
        assert_eq!(format_rational(&parse_rational("4/2").unwrap()), "2");
        assert_eq!(format_rational(&parse_rational(" -7/31 ").unwrap()), "-7/31");
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }
}
