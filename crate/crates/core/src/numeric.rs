//! Numbers written either as decimals or as multiples of pi (`0.4pi`,
//! `pi`, `-pi/2`, `3pi/4`).

use std::f64::consts::PI;

use serde::{Deserialize, Deserializer};

use crate::error::{Error, Result};

pub fn parse_real(text: &str) -> Result<f64> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a number: `{text}`"));
    let value = if let Some(pos) = s.find("pi") {
        let (coeff, rest) = (&s[..pos], &s[pos + 2..]);
        let coeff = coeff.trim().trim_end_matches('*').trim();
        let factor = match coeff {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| bad())?,
        };
        let divisor = match rest.trim() {
            "" => 1.0,
            r => r
                .strip_prefix('/')
                .ok_or_else(bad)?
                .trim()
                .parse::<f64>()
                .map_err(|_| bad())?,
        };
        factor * PI / divisor
    } else {
        s.parse::<f64>().map_err(|_| bad())?
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RealRepr {
    Number(f64),
    Text(String),
}

fn resolve(repr: RealRepr) -> Result<f64> {
    match repr {
        RealRepr::Number(v) => Ok(v),
        RealRepr::Text(t) => parse_real(&t),
    }
}

/// Serde helper accepting a JSON number or a string such as `"0.4pi"`.
pub fn de_real<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    resolve(RealRepr::deserialize(d)?).map_err(serde::de::Error::custom)
}

pub fn de_real_vec<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<f64>, D::Error> {
    Vec::<RealRepr>::deserialize(d)?
        .into_iter()
        .map(|r| resolve(r).map_err(serde::de::Error::custom))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_and_pi_forms() {
        assert_eq!(parse_real("1.5").unwrap(), 1.5);
        assert_eq!(parse_real("pi").unwrap(), PI);
        assert_eq!(parse_real("0.4pi").unwrap(), 0.4 * PI);
        assert_eq!(parse_real("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(parse_real("3*pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_real(" 2e-3 ").unwrap(), 2e-3);
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "abc", "0.4pie", "pi/", "inf", "xpi"] {
            assert!(parse_real(s).is_err(), "{s}");
        }
    }
}
