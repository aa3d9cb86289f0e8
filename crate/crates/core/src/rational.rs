//! Exact probabilities.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Non-negative reduced fraction.
pub type Ratio = num_rational::Ratio<u64>;

#[derive(Serialize, Deserialize)]
struct RatioJson {
    num: u64,
    den: u64,
}

/// `#[serde(with = "crate::rational::json")]` helper: `{"num": .., "den": ..}`.
pub mod json {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Ratio, s: S) -> Result<S::Ok, S::Error> {
        RatioJson {
            num: *r.numer(),
            den: *r.denom(),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio, D::Error> {
        let raw = RatioJson::deserialize(d)?;
        if raw.den == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Ratio::new(raw.num, raw.den))
    }
}
