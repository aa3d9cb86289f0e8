//! Sharing schemes the security games run against.
//!
//! [`ComposedScheme`] encodes a secret `s` in `[0, m)` as a uniform `K` in `A_s` of an
//! AMD code over `Z_p`, then Shamir-shares `K`. Recovery interpolates `K` and decodes;
//! a `K` outside every `A_s` is reported as [`Recovery::ManipulationDetected`].
//! [`PlainShamir`] shares the secret directly, so every field element is a valid secret.

use rand::{Rng, RngCore};
use serde::Serialize;

use crate::shamir::{self, Polynomial};
use crate::{AmdCode, Error, FieldElement, Result, Share, ShareVector, ThresholdParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Recovery {
    Secret(u64),
    ManipulationDetected { encoded: u64 },
}

impl Recovery {
    pub fn secret(self) -> Option<u64> {
        match self {
            Recovery::Secret(s) => Some(s),
            Recovery::ManipulationDetected { .. } => None,
        }
    }
}

/// A threshold scheme whose shares are Shamir shares of an encoded secret.
pub trait SharingScheme: Sync {
    fn params(&self) -> &ThresholdParams;

    /// Size of the secret space; secrets are `0..secret_count()`.
    fn secret_count(&self) -> u64;

    /// Every encoded value `secret` may be dealt as; the dealer picks one uniformly.
    fn encodings(&self, secret: u64) -> Result<Vec<FieldElement>>;

    /// The secret an encoded value stands for, if any.
    fn decode(&self, encoded: FieldElement) -> Option<u64>;

    fn name(&self) -> &'static str;

    /// Picks an encoding uniformly, then deals it.
    fn share_traced(
        &self,
        secret: u64,
        rng: &mut dyn RngCore,
    ) -> Result<(ShareVector, FieldElement, Polynomial)> {
        let encodings = self.encodings(secret)?;
        let encoded = encodings[rng.gen_range(0..encodings.len())];
        let (shares, poly) = shamir::deal(self.params(), encoded, rng)?;
        Ok((shares, encoded, poly))
    }

    fn share(&self, secret: u64, rng: &mut dyn RngCore) -> Result<ShareVector> {
        Ok(self.share_traced(secret, rng)?.0)
    }

    fn recover(&self, shares: &[Share]) -> Result<Recovery> {
        let encoded = shamir::reconstruct(self.params(), shares)?;
        Ok(match self.decode(encoded) {
            Some(s) => Recovery::Secret(s),
            None => Recovery::ManipulationDetected {
                encoded: encoded.value(),
            },
        })
    }
}

fn check_secret(secret: u64, count: u64) -> Result<()> {
    if secret >= count {
        return Err(Error::out_of_range("secret", secret, format!("0 <= s < {count}")));
    }
    Ok(())
}

/// Shamir's scheme with secrets in `Z_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlainShamir {
    params: ThresholdParams,
}

impl PlainShamir {
    pub fn new(params: ThresholdParams) -> Self {
        PlainShamir { params }
    }
}

impl SharingScheme for PlainShamir {
    fn params(&self) -> &ThresholdParams {
        &self.params
    }

    fn secret_count(&self) -> u64 {
        self.params.field().modulus()
    }

    fn encodings(&self, secret: u64) -> Result<Vec<FieldElement>> {
        check_secret(secret, self.secret_count())?;
        Ok(vec![self.params.field().elem(secret)])
    }

    fn decode(&self, encoded: FieldElement) -> Option<u64> {
        Some(encoded.value())
    }

    fn name(&self) -> &'static str {
        "plain-shamir"
    }
}

/// Shamir sharing of an AMD-encoded secret.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComposedScheme {
    code: AmdCode,
    params: ThresholdParams,
}

impl ComposedScheme {
    /// The code's group order must equal the field order.
    pub fn new(code: AmdCode, params: ThresholdParams) -> Result<Self> {
        if code.group_order() != params.field().modulus() {
            return Err(Error::params(format!(
                "code lives in Z_{}, shares in F_{}",
                code.group_order(),
                params.field().modulus()
            )));
        }
        Ok(ComposedScheme { code, params })
    }

    pub fn code(&self) -> &AmdCode {
        &self.code
    }

    pub fn share_secret(&self, secret: u64, rng: &mut dyn RngCore) -> Result<ShareVector> {
        self.share(secret, rng)
    }

    pub fn recover_secret(&self, shares: &[Share]) -> Result<Recovery> {
        self.recover(shares)
    }
}

impl SharingScheme for ComposedScheme {
    fn params(&self) -> &ThresholdParams {
        &self.params
    }

    fn secret_count(&self) -> u64 {
        self.code.sources() as u64
    }

    fn encodings(&self, secret: u64) -> Result<Vec<FieldElement>> {
        check_secret(secret, self.secret_count())?;
        let field = self.params.field();
        Ok(self
            .code
            .family()
            .set(secret as usize)
            .iter()
            .map(|&g| field.elem(g))
            .collect())
    }

    fn decode(&self, encoded: FieldElement) -> Option<u64> {
        self.code.decode(encoded.value()).map(|s| s as u64)
    }

    fn name(&self) -> &'static str {
        "composed"
    }
}

/// Single offset on the first share with the same effect on the interpolated value as
/// adding `deltas[i]` to share `i`: `delta = (sum_i b_i delta_i) / b_1`.
///
/// `lagrange` holds the coefficients of all `k` shares used in reconstruction; at most
/// `k - 1` shares may be offset.
pub fn collapse_to_single_delta(
    deltas: &[FieldElement],
    lagrange: &[FieldElement],
) -> Result<FieldElement> {
    if deltas.is_empty() || deltas.len() >= lagrange.len() {
        return Err(Error::params(format!(
            "need 1 <= t <= k - 1 offsets, got t = {} with k = {}",
            deltas.len(),
            lagrange.len()
        )));
    }
    let b1 = lagrange[0];
    let shift = deltas
        .iter()
        .zip(lagrange)
        .try_fold(b1.field().zero(), |acc, (&d, &b)| acc.checked_add(b.checked_mul(d)?))?;
    shift.checked_div(b1)
}
