//! JSON documents exchanged with the command line.
//!
//! * family: `{"n": 13, "sets": [[1, 12], [4, 9], [3, 10]]}`
//! * shares: `{"p": 13, "k": 2, "n": 3, "shares": [{"x": 1, "y": 0}, ..]}`
//! * plain scheme: `{"p": 13, "k": 2, "n": 3}`
//! * composed scheme: `{"family": {..}, "k": 2, "n": 3}`, shares live in `F_p` with `p`
//!   the family's group order.
//!
//! Every input may be given inline (text starting with `{`) or as a file path.

use std::fs;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::shamir::Polynomial;
use crate::{
    AmdCode, ComposedScheme, Error, FieldElement, PlainShamir, PrimeField, Recovery, Result,
    SetFamily, Share, ShareVector, SharingScheme, ThresholdParams,
};

/// Inline JSON is returned as is; anything else is read as a path.
pub fn read_input(arg: &str) -> Result<String> {
    if arg.trim_start().starts_with('{') {
        return Ok(arg.to_owned());
    }
    fs::read_to_string(arg).map_err(|e| Error::Parse(format!("{arg}: {e}")))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDoc {
    pub n: u64,
    pub sets: Vec<Vec<u64>>,
}

impl FamilyDoc {
    pub fn into_family(self) -> Result<SetFamily> {
        SetFamily::new(self.n, self.sets)
    }
}

pub fn parse_family(json: &str) -> Result<SetFamily> {
    serde_json::from_str::<FamilyDoc>(json)?.into_family()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShareDoc {
    pub x: u64,
    pub y: u64,
}

/// A subset of the shares of one dealing, any order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShareFile {
    pub p: u64,
    pub k: usize,
    pub n: usize,
    pub shares: Vec<ShareDoc>,
}

impl ShareFile {
    pub fn from_vector(v: &ShareVector) -> Self {
        let params = v.params();
        ShareFile {
            p: params.field().modulus(),
            k: params.threshold(),
            n: params.participants(),
            shares: v
                .shares()
                .iter()
                .map(|s| ShareDoc { x: s.x.value(), y: s.y.value() })
                .collect(),
        }
    }

    /// Checks `1 <= x <= n`, `y < p` and distinct identifiers.
    pub fn decode(&self) -> Result<(ThresholdParams, Vec<Share>)> {
        let params = ThresholdParams::new(self.k, self.n, PrimeField::new(self.p)?)?;
        let field = params.field();
        let mut seen = vec![false; self.n + 1];
        let shares = self
            .shares
            .iter()
            .map(|s| {
                if s.x == 0 || s.x > self.n as u64 {
                    return Err(Error::out_of_range("x", s.x, format!("1 <= x <= {}", self.n)));
                }
                if s.y >= self.p {
                    return Err(Error::out_of_range("y", s.y, format!("y < {}", self.p)));
                }
                if std::mem::replace(&mut seen[s.x as usize], true) {
                    return Err(Error::DuplicateIdentifier(s.x));
                }
                Ok(Share { x: field.elem(s.x), y: field.elem(s.y) })
            })
            .collect::<Result<_>>()?;
        Ok((params, shares))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SchemeDoc {
    Composed {
        family: FamilyDoc,
        k: usize,
        n: usize,
    },
    Plain {
        p: u64,
        k: usize,
        n: usize,
    },
}

impl SchemeDoc {
    pub fn build(self) -> Result<AnyScheme> {
        match self {
            SchemeDoc::Plain { p, k, n } => Ok(AnyScheme::Plain(PlainShamir::new(
                ThresholdParams::new(k, n, PrimeField::new(p)?)?,
            ))),
            SchemeDoc::Composed { family, k, n } => {
                let family = family.into_family()?;
                let params = ThresholdParams::new(k, n, PrimeField::new(family.order())?)?;
                Ok(AnyScheme::Composed(ComposedScheme::new(AmdCode::new(family), params)?))
            }
        }
    }
}

pub fn parse_scheme(json: &str) -> Result<AnyScheme> {
    serde_json::from_str::<SchemeDoc>(json)
        .map_err(|_| {
            Error::Parse(r#"expected {"p", "k", "n"} or {"family", "k", "n"}"#.into())
        })?
        .build()
}

/// Either scheme, chosen at run time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyScheme {
    Plain(PlainShamir),
    Composed(ComposedScheme),
}

impl AnyScheme {
    fn inner(&self) -> &dyn SharingScheme {
        match self {
            AnyScheme::Plain(s) => s,
            AnyScheme::Composed(s) => s,
        }
    }
}

impl SharingScheme for AnyScheme {
    fn params(&self) -> &ThresholdParams {
        self.inner().params()
    }

    fn secret_count(&self) -> u64 {
        self.inner().secret_count()
    }

    fn encodings(&self, secret: u64) -> Result<Vec<FieldElement>> {
        self.inner().encodings(secret)
    }

    fn decode(&self, encoded: FieldElement) -> Option<u64> {
        self.inner().decode(encoded)
    }

    fn name(&self) -> &'static str {
        self.inner().name()
    }

    fn share_traced(
        &self,
        secret: u64,
        rng: &mut dyn RngCore,
    ) -> Result<(ShareVector, FieldElement, Polynomial)> {
        self.inner().share_traced(secret, rng)
    }

    fn recover(&self, shares: &[Share]) -> Result<Recovery> {
        self.inner().recover(shares)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const EX: &str = r#"{"n": 13, "sets": [[1, 12], [4, 9], [3, 10]]}"#;

    #[test]
    fn family_round_trip() {
        let f = parse_family(EX).unwrap();
        assert_eq!(f.sets()[1], vec![4, 9]);
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"{"n":13,"sets":[[1,12],[4,9],[3,10]]}"#);
        assert_eq!(parse_family(&json).unwrap(), f);
        assert!(parse_family(r#"{"n": 13, "sets": [[1, 12], [12, 9]]}"#).is_err());
        assert!(matches!(parse_family(r#"{"n": 13, "sets": [[1,"#), Err(Error::Parse(_))));
        assert!(read_input("/nonexistent/family.json").is_err());
    }

    #[test]
    fn schemes() {
        let plain = parse_scheme(r#"{"p": 13, "k": 2, "n": 3}"#).unwrap();
        assert_eq!((plain.name(), plain.secret_count()), ("plain-shamir", 13));
        let composed = parse_scheme(&format!(r#"{{"family": {EX}, "k": 2, "n": 3}}"#)).unwrap();
        assert_eq!((composed.name(), composed.secret_count()), ("composed", 3));
        assert_eq!(composed.params().field().modulus(), 13);
        assert!(parse_scheme(r#"{"p": 15, "k": 2, "n": 3}"#).is_err());
        assert!(parse_scheme(r#"{"k": 2, "n": 3}"#).is_err());
    }

    #[test]
    fn share_file_round_trip() {
        let scheme = parse_scheme(&format!(r#"{{"family": {EX}, "k": 2, "n": 3}}"#)).unwrap();
        let v = scheme.share(2, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let file = ShareFile::from_vector(&v);
        let text = serde_json::to_string(&file).unwrap();
        let back: ShareFile = serde_json::from_str(&text).unwrap();
        let (params, shares) = back.decode().unwrap();
        assert_eq!(&params, scheme.params());
        assert_eq!(scheme.recover(&shares[1..]).unwrap(), Recovery::Secret(2));

        let mut dup = file.clone();
        dup.shares[1].x = dup.shares[0].x;
        assert_eq!(dup.decode().unwrap_err(), Error::DuplicateIdentifier(dup.shares[0].x));
        let mut big = file;
        big.shares[0].y = 13;
        assert!(big.decode().is_err());
    }
}
