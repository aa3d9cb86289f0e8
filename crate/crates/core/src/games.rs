//! The robustness and relation-malleability games.
//!
//! One round: the dealer draws a secret (uniform unless a prior is given) and deals it.
//! The adversary controls the shares of participants `1..=t`, nominates the
//! identifiers of `k - t` good shares before seeing anything, then rewrites its `t`
//! ordinates. It only ever sees a [`TamperView`] holding its own shares plus the public
//! data of the reconstruction set. The `k` shares are interpolated
//! and decoded; the adversary wins when the result is a valid secret `s' != s` with
//! `s' ~ s`. Robustness is the special case `~ = !=`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::shamir::lagrange_coefficients;
use crate::{
    AdvantageReport, Error, FieldElement, Game, Ratio, Recovery, Result, Share, SharingScheme,
    ThresholdParams,
};

type Predicate = dyn Fn(u64, u64) -> bool + Send + Sync;

/// An irreflexive relation `s' ~ s` on the secret space `[0, m)`.
#[derive(Clone)]
pub enum Relation {
    NotEqual,
    /// `s' = s + c mod m`, `0 < c < m`.
    AdditiveShift { c: u64, m: u64 },
    /// `s' - s mod m` lies in the shift set.
    ShiftSet { shifts: BTreeSet<u64>, m: u64 },
    Custom { m: u64, label: String, holds: Arc<Predicate> },
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Relation {
    pub fn additive_shift(c: u64, m: u64) -> Result<Self> {
        if c == 0 || c >= m {
            return Err(Error::out_of_range("c", c, format!("0 < c < {m}")));
        }
        Ok(Relation::AdditiveShift { c, m })
    }

    pub fn shift_set(shifts: impl IntoIterator<Item = u64>, m: u64) -> Result<Self> {
        let shifts: BTreeSet<u64> = shifts.into_iter().collect();
        if shifts.is_empty() {
            return Err(Error::params("shift set must be nonempty"));
        }
        if let Some(&c) = shifts.iter().find(|&&c| c == 0 || c >= m) {
            return Err(Error::out_of_range("shift", c, format!("0 < c < {m}")));
        }
        Ok(Relation::ShiftSet { shifts, m })
    }

    /// Rejects predicates with `s ~ s`. Checked for every secret when `m <= 4096`,
    /// otherwise on 4096 seeded samples.
    pub fn custom(
        m: u64,
        label: impl Into<String>,
        holds: impl Fn(u64, u64) -> bool + Send + Sync + 'static,
    ) -> Result<Self> {
        const EXHAUSTIVE: u64 = 4096;
        let reflexive_at = if m <= EXHAUSTIVE {
            (0..m).find(|&s| holds(s, s))
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(m);
            (0..EXHAUSTIVE).map(|_| rng.gen_range(0..m)).find(|&s| holds(s, s))
        };
        if let Some(s) = reflexive_at {
            return Err(Error::params(format!("relation is reflexive at s = {s}")));
        }
        Ok(Relation::Custom {
            m,
            label: label.into(),
            holds: Arc::new(holds),
        })
    }

    /// Parses `neq`, `shift:C` or `set:C1,C2,..` for a secret space of size `m`.
    pub fn parse(text: &str, m: u64) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown relation {text:?}; expected neq, shift:C or set:C1,C2"));
        let num = |s: &str| s.trim().parse::<u64>().map_err(|_| bad());
        match text.split_once(':') {
            None if text == "neq" => Ok(Relation::NotEqual),
            Some(("shift", c)) => Relation::additive_shift(num(c)?, m),
            Some(("set", list)) => {
                let shifts = list.split(',').map(num).collect::<Result<Vec<_>>>()?;
                Relation::shift_set(shifts, m)
            }
            _ => Err(bad()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Relation::NotEqual => "neq".into(),
            Relation::AdditiveShift { c, .. } => format!("shift:{c}"),
            Relation::ShiftSet { shifts, .. } => {
                let list: Vec<String> = shifts.iter().map(u64::to_string).collect();
                format!("set:{}", list.join(","))
            }
            Relation::Custom { label, .. } => label.clone(),
        }
    }

    /// Size of the secret space the relation is defined on; `None` for `NotEqual`.
    pub fn domain(&self) -> Option<u64> {
        match self {
            Relation::NotEqual => None,
            Relation::AdditiveShift { m, .. }
            | Relation::ShiftSet { m, .. }
            | Relation::Custom { m, .. } => Some(*m),
        }
    }

    /// Does `s_prime ~ s` hold?
    pub fn holds(&self, s_prime: u64, s: u64) -> bool {
        match self {
            Relation::NotEqual => s_prime != s,
            Relation::AdditiveShift { c, m } => s_prime == (s + c) % m,
            Relation::ShiftSet { shifts, m } => shifts.contains(&((s_prime + m - s % m) % m)),
            Relation::Custom { holds, .. } => holds(s_prime, s),
        }
    }
}

/// What an adversary is allowed to see when rewriting its shares.
#[derive(Debug)]
pub struct TamperView<'a> {
    controlled: &'a [Share],
    good_identifiers: &'a [FieldElement],
    lagrange: &'a [FieldElement],
}

impl<'a> TamperView<'a> {
    /// The adversary's own shares, in identifier order.
    pub fn controlled(&self) -> &'a [Share] {
        self.controlled
    }

    pub fn good_identifiers(&self) -> &'a [FieldElement] {
        self.good_identifiers
    }

    /// Coefficients for the reconstruction set, controlled shares first.
    pub fn lagrange(&self) -> &'a [FieldElement] {
        self.lagrange
    }
}

pub trait Adversary: Sync {
    /// Identifiers of the `k - t` good shares used in reconstruction, chosen before any
    /// share is seen. Defaults to the lowest identifiers not controlled.
    fn nominate(&self, params: &ThresholdParams, controlled: &[FieldElement]) -> Vec<FieldElement> {
        (1..=params.participants())
            .map(|i| params.identifier(i))
            .filter(|x| !controlled.contains(x))
            .take(params.threshold() - controlled.len())
            .collect()
    }

    /// Replacement ordinates for the controlled shares.
    fn tamper(&self, view: &TamperView<'_>) -> Vec<FieldElement>;
}

/// Returns the controlled shares unchanged.
#[derive(Clone, Copy, Debug, Default)]
pub struct Replay;

impl Adversary for Replay {
    fn tamper(&self, view: &TamperView<'_>) -> Vec<FieldElement> {
        view.controlled().iter().map(|s| s.y).collect()
    }
}

/// Adds a fixed `delta` to the first controlled ordinate.
#[derive(Clone, Copy, Debug)]
pub struct ShareOffset {
    delta: FieldElement,
}

impl Adversary for ShareOffset {
    fn tamper(&self, view: &TamperView<'_>) -> Vec<FieldElement> {
        let mut ys: Vec<FieldElement> = view.controlled().iter().map(|s| s.y).collect();
        ys[0] = ys[0] + self.delta;
        ys
    }
}

/// Moves the interpolated value by `shift`: adds `shift / b_1` to the first controlled
/// ordinate, where `b_1` is that share's public Lagrange coefficient.
#[derive(Clone, Copy, Debug)]
pub struct EncodedOffset {
    shift: u64,
}

impl EncodedOffset {
    pub fn new(shift: u64) -> Self {
        EncodedOffset { shift }
    }
}

impl Adversary for EncodedOffset {
    fn tamper(&self, view: &TamperView<'_>) -> Vec<FieldElement> {
        let b1 = view.lagrange()[0];
        let delta = b1
            .field()
            .elem(self.shift)
            .checked_div(b1)
            .expect("Lagrange coefficients are nonzero");
        let mut ys: Vec<FieldElement> = view.controlled().iter().map(|s| s.y).collect();
        ys[0] = ys[0] + delta;
        ys
    }
}

/// Adds a nonzero `delta` to one share; against plain Shamir the secret becomes
/// `s + b_1 delta`.
pub fn shamir_offset_attack(delta: FieldElement) -> Result<ShareOffset> {
    if delta.is_zero() {
        return Err(Error::params("offset must be nonzero"));
    }
    Ok(ShareOffset { delta })
}

/// Uses `delta = c / b_1`, so plain Shamir reconstructs `s + c`.
pub fn additive_relation_attack(c: u64) -> Result<EncodedOffset> {
    if c == 0 {
        return Err(Error::params("c = 0 targets a reflexive relation"));
    }
    Ok(EncodedOffset::new(c))
}

/// Distribution of the dealt secret.
#[derive(Clone, Debug, Default)]
pub enum SecretPrior {
    #[default]
    Uniform,
    /// Relative weight of each secret `0..m`.
    Weighted(Vec<u64>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GameTranscript {
    pub seed: u64,
    pub secret: u64,
    pub outcome: Recovery,
    pub win: bool,
}

fn check_t(params: &ThresholdParams, t: usize) -> Result<()> {
    if t == 0 || t >= params.threshold() {
        return Err(Error::out_of_range(
            "t",
            t as u64,
            format!("1 <= t < k = {}", params.threshold()),
        ));
    }
    Ok(())
}

fn check_relation<S: SharingScheme + ?Sized>(scheme: &S, relation: &Relation) -> Result<()> {
    match relation.domain() {
        Some(m) if m != scheme.secret_count() => Err(Error::params(format!(
            "relation is on [0, {m}), scheme secrets are [0, {})",
            scheme.secret_count()
        ))),
        _ => Ok(()),
    }
}

fn draw_secret(prior: &SecretPrior, m: u64, rng: &mut ChaCha8Rng) -> Result<u64> {
    match prior {
        SecretPrior::Uniform => Ok(rng.gen_range(0..m)),
        SecretPrior::Weighted(w) => {
            if w.len() as u64 != m {
                return Err(Error::params(format!("prior has {} weights, need {m}", w.len())));
            }
            let dist = WeightedIndex::new(w).map_err(|e| Error::params(e.to_string()))?;
            Ok(dist.sample(rng) as u64)
        }
    }
}

/// One round of the malleability game with a uniform secret.
pub fn play_malleability<S: SharingScheme + ?Sized, A: Adversary + ?Sized>(
    scheme: &S,
    relation: &Relation,
    adversary: &A,
    t: usize,
    seed: u64,
) -> Result<GameTranscript> {
    play_malleability_with_prior(scheme, relation, adversary, t, &SecretPrior::Uniform, seed)
}

pub fn play_malleability_with_prior<S: SharingScheme + ?Sized, A: Adversary + ?Sized>(
    scheme: &S,
    relation: &Relation,
    adversary: &A,
    t: usize,
    prior: &SecretPrior,
    seed: u64,
) -> Result<GameTranscript> {
    let params = *scheme.params();
    check_t(&params, t)?;
    check_relation(scheme, relation)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let secret = draw_secret(prior, scheme.secret_count(), &mut rng)?;
    let dealt = scheme.share(secret, &mut rng)?;

    let controlled: Vec<Share> = dealt.shares()[..t].to_vec();
    let controlled_ids: Vec<FieldElement> = controlled.iter().map(|s| s.x).collect();
    let good_ids = adversary.nominate(&params, &controlled_ids);
    if good_ids.len() != params.threshold() - t {
        return Err(Error::params(format!(
            "adversary nominated {} good shares, need {}",
            good_ids.len(),
            params.threshold() - t
        )));
    }
    let all_ids: Vec<FieldElement> = controlled_ids.iter().chain(&good_ids).copied().collect();
    let lagrange = lagrange_coefficients(&all_ids)?;
    let good: Vec<Share> = good_ids
        .iter()
        .map(|&x| {
            dealt.by_identifier(x).ok_or_else(|| {
                Error::params(format!("nominated identifier {x} is not a participant"))
            })
        })
        .collect::<Result<_>>()?;

    let view = TamperView {
        controlled: &controlled,
        good_identifiers: &good_ids,
        lagrange: &lagrange,
    };
    let bad_ys = adversary.tamper(&view);
    if bad_ys.len() != t {
        return Err(Error::params(format!("adversary returned {} shares, controls {t}", bad_ys.len())));
    }
    let mut reconstruction: Vec<Share> = controlled
        .iter()
        .zip(&bad_ys)
        .map(|(s, &y)| Share { x: s.x, y })
        .collect();
    reconstruction.extend(good);

    let outcome = scheme.recover(&reconstruction)?;
    let win = match outcome {
        Recovery::Secret(s_prime) => s_prime != secret && relation.holds(s_prime, secret),
        Recovery::ManipulationDetected { .. } => false,
    };
    Ok(GameTranscript {
        seed,
        secret,
        outcome,
        win,
    })
}

/// The robustness game: the malleability game for `!=`.
pub fn play_robustness<S: SharingScheme + ?Sized, A: Adversary + ?Sized>(
    scheme: &S,
    adversary: &A,
    t: usize,
    seed: u64,
) -> Result<GameTranscript> {
    play_malleability(scheme, &Relation::NotEqual, adversary, t, seed)
}

/// Best additive adversary's exact win probability.
///
/// Any rewriting of at most `k - 1` Shamir shares moves the interpolated value by a
/// fixed `Delta`, so maximizing over `Delta != 0` covers every adversary. The secret is
/// uniform and its encoding uniform within its set.
pub fn exact_win_probability<S: SharingScheme + ?Sized>(
    scheme: &S,
    relation: &Relation,
    t: usize,
) -> Result<AdvantageReport> {
    let params = *scheme.params();
    check_t(&params, t)?;
    check_relation(scheme, relation)?;
    let field = params.field();
    let m = scheme.secret_count();
    let support: Vec<(u64, Vec<FieldElement>)> = (0..m)
        .map(|s| Ok((s, scheme.encodings(s)?)))
        .collect::<Result<_>>()?;

    let mut best = Ratio::new(0, 1);
    let mut best_deltas = Vec::new();
    for delta in 1..field.modulus() {
        let shift = field.elem(delta);
        let mut p = Ratio::new(0, 1);
        for (s, encodings) in &support {
            let hits = encodings
                .iter()
                .filter(|&&k| {
                    scheme
                        .decode(k + shift)
                        .is_some_and(|s_prime| s_prime != *s && relation.holds(s_prime, *s))
                })
                .count() as u64;
            p += Ratio::new(hits, m * encodings.len() as u64);
        }
        if p > best {
            best = p;
            best_deltas.clear();
        }
        if p == best {
            best_deltas.push(delta);
        }
    }
    Ok(AdvantageReport {
        game: Game::Malleability(relation.label()),
        epsilon: best,
        best_deltas,
    })
}

/// Empirical win count over `trials` independent rounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Estimate {
    pub wins: u64,
    pub trials: u64,
}

impl Estimate {
    pub fn frequency(&self) -> Ratio {
        Ratio::new(self.wins, self.trials)
    }
}

/// Seed of round `trial`, derived with a SplitMix64 step so rounds are independent of
/// how they are scheduled.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    let mut z = seed ^ trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Plays `trials` rounds in parallel; the count does not depend on the thread count.
pub fn estimate_win_probability<S: SharingScheme + ?Sized, A: Adversary + ?Sized>(
    scheme: &S,
    relation: &Relation,
    adversary: &A,
    t: usize,
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    if trials == 0 {
        return Err(Error::params("need at least one trial"));
    }
    let wins = (0..trials)
        .into_par_iter()
        .map(|i| {
            play_malleability(scheme, relation, adversary, t, trial_seed(seed, i))
                .map(|tr| tr.win as u64)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(Estimate { wins, trials })
}
