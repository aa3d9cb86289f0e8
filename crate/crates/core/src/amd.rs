//! Algebraic manipulation detection codes over a [`SetFamily`].
//!
//! Source `i` is encoded as a uniformly random element of `A_i`; decoding returns the
//! index of the set containing a group element. An adversary picks an offset
//! `Delta != 0` and wins when `g + Delta` decodes to a different source (or, in the
//! circular games, exactly to source `i + c mod m`). The advantage is computed by
//! enumerating every `(Delta, i, x)`.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::{Error, Ratio, Result, SetFamily};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmdCode {
    family: SetFamily,
}

/// Which security game an [`AdvantageReport`] describes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Game {
    Weak,
    Strong,
    CircularWeak(usize),
    CircularStrong(usize),
    /// A relation-malleability game played against a sharing scheme; the label names
    /// the relation (see [`crate::games::Relation::label`]).
    Malleability(String),
}

impl fmt::Display for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Game::Weak => write!(f, "weak"),
            Game::Strong => write!(f, "strong"),
            Game::CircularWeak(c) => write!(f, "circular-weak({c})"),
            Game::CircularStrong(c) => write!(f, "circular-strong({c})"),
            Game::Malleability(rel) => write!(f, "malleability({rel})"),
        }
    }
}

impl Serialize for Game {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Exact adversary advantage with every maximizing offset, in increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdvantageReport {
    pub game: Game,
    #[serde(with = "crate::rational::json")]
    pub epsilon: Ratio,
    pub best_deltas: Vec<u64>,
}

impl AmdCode {
    pub fn new(family: SetFamily) -> Self {
        AmdCode { family }
    }

    pub fn family(&self) -> &SetFamily {
        &self.family
    }

    pub fn group_order(&self) -> u64 {
        self.family.order()
    }

    pub fn sources(&self) -> usize {
        self.family.num_sets()
    }

    fn check_source(&self, i: usize) -> Result<()> {
        if i >= self.sources() {
            return Err(Error::out_of_range(
                "source",
                i as u64,
                format!("0 <= i < {}", self.sources()),
            ));
        }
        Ok(())
    }

    fn check_shift(&self, c: usize) -> Result<()> {
        let m = self.sources();
        if c == 0 || c >= m {
            return Err(Error::out_of_range("c", c as u64, format!("1 <= c <= {}", m - 1)));
        }
        Ok(())
    }

    /// Uniform element of `A_i`.
    pub fn encode<R: Rng + ?Sized>(&self, i: usize, rng: &mut R) -> Result<u64> {
        self.check_source(i)?;
        Ok(*self
            .family
            .set(i)
            .choose(rng)
            .expect("sets are nonempty"))
    }

    /// Source whose set contains `g`, or `None` when the manipulation is detected.
    pub fn decode(&self, g: u64) -> Option<usize> {
        self.family.owner_of(g)
    }

    /// Winning `(i, x)` counts per source for offset `delta`.
    fn wins_per_source(&self, delta: u64, wins: impl Fn(usize, usize) -> bool) -> Vec<u64> {
        (0..self.sources())
            .map(|i| {
                self.family
                    .set(i)
                    .iter()
                    .filter(|&&x| self.decode(x + delta).is_some_and(|j| wins(i, j)))
                    .count() as u64
            })
            .collect()
    }

    fn advantage(
        &self,
        game: Game,
        wins: impl Fn(usize, usize) -> bool,
        strong: bool,
    ) -> AdvantageReport {
        let n = self.group_order();
        let m = self.sources() as u64;
        let l = self.family.set_size() as u64;
        let mut best = 0;
        let mut best_deltas = Vec::new();
        for delta in 1..n {
            let per_source = self.wins_per_source(delta, &wins);
            let score = if strong {
                per_source.into_iter().max().unwrap_or(0)
            } else {
                per_source.into_iter().sum()
            };
            if score > best {
                best = score;
                best_deltas.clear();
            }
            if score == best {
                best_deltas.push(delta);
            }
        }
        let den = if strong { l } else { m * l };
        AdvantageReport {
            game,
            epsilon: Ratio::new(best, den),
            best_deltas,
        }
    }

    /// Uniform source, offset chosen first; win iff `g + Delta` lands in another set.
    pub fn weak_advantage(&self) -> AdvantageReport {
        self.advantage(Game::Weak, |i, j| i != j, false)
    }

    /// Source known to the adversary before choosing the offset.
    pub fn strong_advantage(&self) -> AdvantageReport {
        self.advantage(Game::Strong, |i, j| i != j, true)
    }

    pub fn circular_weak_advantage(&self, c: usize) -> Result<AdvantageReport> {
        self.check_shift(c)?;
        let m = self.sources();
        Ok(self.advantage(Game::CircularWeak(c), move |i, j| j == (i + c) % m, false))
    }

    pub fn circular_strong_advantage(&self, c: usize) -> Result<AdvantageReport> {
        self.check_shift(c)?;
        let m = self.sources();
        Ok(self.advantage(Game::CircularStrong(c), move |i, j| j == (i + c) % m, true))
    }

    /// Lower bound `l (m - 1) / (n - 1)` on the weak advantage.
    pub fn weak_bound(&self) -> Ratio {
        let l = self.family.set_size() as u64;
        let m = self.sources() as u64;
        Ratio::new(l * (m - 1), self.group_order() - 1)
    }

    /// Lower bound `l / (n - 1)` on the circular weak advantage.
    pub fn circular_bound(&self) -> Ratio {
        Ratio::new(self.family.set_size() as u64, self.group_order() - 1)
    }

    pub fn is_r_optimal_weak(&self) -> bool {
        self.weak_advantage().epsilon == self.weak_bound()
    }

    pub fn is_r_optimal_circular(&self, c: usize) -> Result<bool> {
        Ok(self.circular_weak_advantage(c)?.epsilon == self.circular_bound())
    }
}
