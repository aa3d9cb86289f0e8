//! Threshold secret sharing that resists targeted tampering.
//!
//! The crate is layered bottom-up:
//!
//! * [`field`]: arithmetic modulo an odd prime with primitive-root and residue tests.
//! * [`diff_family`]: external differences over `Z_n` and verifiers for circular,
//!   `S`-external and strong circular difference families.
//! * [`amd`]: algebraic manipulation detection codes built on a [`SetFamily`] and the
//!   exact adversary advantage in each AMD game.
//! * [`shamir`]: the `(k, n)` threshold scheme over a prime field.
//! * [`scheme`]: Shamir sharing of an AMD-encoded secret.
//! * [`games`]: the robustness and relation-malleability games with concrete adversaries.
//! * [`cyclotomic`]: cyclotomic families with their success predicates, plus the
//!   exhaustive search drivers.
//! * [`formats`]: the JSON documents read and written by the `nmshare` binary.
//!
//! All arithmetic is exact; probabilities are reported as reduced fractions.

pub mod amd;
pub mod cyclotomic;
pub mod diff_family;
mod error;
pub mod field;
pub mod formats;
pub mod games;
pub mod rational;
pub mod scheme;
pub mod shamir;

pub use amd::{AdvantageReport, AmdCode, Game};
pub use diff_family::{DifferenceMultiset, SetFamily, VerificationReport, Violation};
pub use error::{Error, Result};
pub use field::{FieldElement, PrimeField};
pub use rational::Ratio;
pub use scheme::{ComposedScheme, PlainShamir, Recovery, SharingScheme};
pub use shamir::{Polynomial, Share, ShareVector, ThresholdParams};
