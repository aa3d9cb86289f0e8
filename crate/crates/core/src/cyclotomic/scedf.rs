//! Exhaustive search for strong circular external difference families.
//!
//! Every pair `D(A_{j+c}, A_j)` has `l^2` elements spread evenly over `n - 1` values, so
//! only orders with `(n - 1) | l^2` and `m l <= n` are searched. Families are taken up
//! to translation by requiring `0` in `A_0`. A subtree is cut as soon as a completed pair
//! fails; its leaves are credited to `pruned`, so `visited + pruned` equals the size of
//! the space for every fully searched order.

use serde::Serialize;

use crate::diff_family::verify_scedf;
use crate::{Error, Result, SetFamily};

/// Largest order the bitmask enumeration handles.
pub const MAX_ORDER: u64 = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ScedfSearch {
    pub n_max: u64,
    pub m: usize,
    pub l: usize,
    pub c: usize,
    /// Cap on leaves visited plus subtrees pruned, over the whole run.
    pub budget: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// `(n - 1)` does not divide `l^2`.
    Indivisible,
    /// Fewer than `m l` elements.
    TooSmall,
    Complete,
    /// Budget ran out inside or before this order.
    Incomplete,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScedfRecord {
    pub n: u64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<u64>,
    /// `C(n-1, l-1) * prod_{j=1}^{m-1} C(n - j l, l)`; zero when filtered out.
    pub space: u128,
    pub visited: u128,
    pub pruned: u128,
    pub found: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScedfCertificate {
    pub search: ScedfSearch,
    pub records: Vec<ScedfRecord>,
    pub families: Vec<SetFamily>,
    /// Every order was filtered out or searched to the end.
    pub conclusive: bool,
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of leaves below a node with `placed` sets chosen.
fn leaves_below(n: u64, m: usize, l: usize, placed: usize) -> u128 {
    (placed..m)
        .map(|j| {
            if j == 0 {
                binomial(n - 1, l as u64 - 1)
            } else {
                binomial(n.saturating_sub((j * l) as u64), l as u64)
            }
        })
        .product()
}

/// Size of the search space for order `n`.
pub fn space_size(n: u64, m: usize, l: usize) -> u128 {
    leaves_below(n, m, l, 0)
}

fn prefilter(n: u64, m: usize, l: usize) -> std::result::Result<u64, Status> {
    let l2 = (l * l) as u64;
    if !l2.is_multiple_of(n - 1) {
        Err(Status::Indivisible)
    } else if (m * l) as u64 > n {
        Err(Status::TooSmall)
    } else {
        Ok(l2 / (n - 1))
    }
}

impl ScedfCertificate {
    /// Recomputes every count and re-verifies every family.
    pub fn is_consistent(&self) -> bool {
        let ScedfSearch { n_max, m, l, c, .. } = self.search;
        let orders: Vec<u64> = self.records.iter().map(|r| r.n).collect();
        if orders != (2..=n_max).collect::<Vec<_>>() {
            return false;
        }
        let records_ok = self.records.iter().all(|r| {
            let found = self.families.iter().filter(|f| f.order() == r.n).count();
            match (prefilter(r.n, m, l), r.status) {
                (Err(s), status) => {
                    s == status && r.space == 0 && r.visited == 0 && r.pruned == 0 && found == 0
                }
                (Ok(lambda), status) => {
                    r.lambda == Some(lambda)
                        && r.space == space_size(r.n, m, l)
                        && r.found == found
                        && r.visited == found as u128
                        && match status {
                            Status::Complete => r.visited + r.pruned == r.space,
                            Status::Incomplete => r.visited + r.pruned < r.space,
                            _ => false,
                        }
                }
            }
        });
        let families_ok = self.families.iter().all(|f| {
            f.num_sets() == m
                && f.set_size() == l
                && f.set(0).contains(&0)
                && verify_scedf(f, c).is_ok_and(|r| {
                    r.valid && r.lambda == prefilter(f.order(), m, l).ok()
                })
        });
        let conclusive = self
            .records
            .iter()
            .all(|r| r.status != Status::Incomplete);
        records_ok && families_ok && conclusive == self.conclusive
    }
}

struct Walker<'a> {
    n: u64,
    m: usize,
    l: usize,
    c: usize,
    lambda: u64,
    sets: Vec<Vec<u64>>,
    counts: Vec<u64>,
    visited: u128,
    pruned: u128,
    work: &'a mut u64,
    budget: u64,
    found: Vec<Vec<Vec<u64>>>,
}

impl Walker<'_> {
    fn out_of_budget(&self) -> bool {
        *self.work >= self.budget
    }

    fn pair_is_uniform(&mut self, a: usize, b: usize) -> bool {
        self.counts.iter_mut().for_each(|x| *x = 0);
        let n = self.n;
        for &x in &self.sets[a] {
            for &y in &self.sets[b] {
                self.counts[((x + n - y) % n) as usize] += 1;
            }
        }
        self.counts[0] == 0 && self.counts[1..].iter().all(|&x| x == self.lambda)
    }

    /// Pairs completed by placing set `i`.
    fn new_pairs_ok(&mut self, i: usize) -> bool {
        let (m, c) = (self.m, self.c);
        (i < c || self.pair_is_uniform(i, i - c)) && (i + c < m || self.pair_is_uniform(i + c - m, i))
    }

    fn place(&mut self, i: usize, set: Vec<u64>, used: u128) {
        if self.out_of_budget() {
            return;
        }
        self.sets.push(set);
        if !self.new_pairs_ok(i) {
            self.pruned += leaves_below(self.n, self.m, self.l, i + 1);
            *self.work += 1;
        } else if i + 1 == self.m {
            self.visited += 1;
            *self.work += 1;
            self.found.push(self.sets.clone());
        } else {
            self.extend(i + 1, used);
        }
        self.sets.pop();
    }

    fn extend(&mut self, i: usize, used: u128) {
        let mut chosen = Vec::with_capacity(self.l);
        self.choose(i, used, 0, &mut chosen);
    }

    /// Chooses the remaining elements of set `i` in increasing order from `start`.
    fn choose(&mut self, i: usize, used: u128, start: u64, chosen: &mut Vec<u64>) {
        if chosen.len() == self.l {
            let mask = chosen.iter().fold(used, |acc, &x| acc | 1u128 << x);
            self.place(i, chosen.clone(), mask);
            return;
        }
        let need = (self.l - chosen.len()) as u64;
        for x in start..self.n {
            if self.n - x < need || self.out_of_budget() {
                break;
            }
            if used & (1u128 << x) == 0 {
                chosen.push(x);
                self.choose(i, used, x + 1, chosen);
                chosen.pop();
            }
        }
    }
}

/// Searches every order `2 <= n <= n_max`.
pub fn search_scedf(search: ScedfSearch) -> Result<ScedfCertificate> {
    let ScedfSearch { n_max, m, l, c, budget } = search;
    if m < 2 || l == 0 {
        return Err(Error::params(format!("need m >= 2 and l >= 1, got m = {m}, l = {l}")));
    }
    if c == 0 || c >= m {
        return Err(Error::out_of_range("c", c as u64, format!("1 <= c <= {}", m - 1)));
    }
    if !(2..=MAX_ORDER).contains(&n_max) {
        return Err(Error::out_of_range("n_max", n_max, format!("2 <= n_max <= {MAX_ORDER}")));
    }
    let mut work = 0u64;
    let mut records = Vec::new();
    let mut families = Vec::new();
    for n in 2..=n_max {
        let lambda = match prefilter(n, m, l) {
            Err(status) => {
                records.push(ScedfRecord { n, status, lambda: None, space: 0, visited: 0, pruned: 0, found: 0 });
                continue;
            }
            Ok(lambda) => lambda,
        };
        let mut walker = Walker {
            n,
            m,
            l,
            c,
            lambda,
            sets: Vec::with_capacity(m),
            counts: vec![0; n as usize],
            visited: 0,
            pruned: 0,
            work: &mut work,
            budget,
            found: Vec::new(),
        };
        let mut chosen = vec![0];
        walker.choose(0, 1, 1, &mut chosen);
        let space = space_size(n, m, l);
        let (visited, pruned) = (walker.visited, walker.pruned);
        let found = std::mem::take(&mut walker.found);
        records.push(ScedfRecord {
            n,
            status: if visited + pruned == space { Status::Complete } else { Status::Incomplete },
            lambda: Some(lambda),
            space,
            visited,
            pruned,
            found: found.len(),
        });
        for sets in found {
            families.push(SetFamily::new(n, sets)?);
        }
    }
    let conclusive = records.iter().all(|r| r.status != Status::Incomplete);
    Ok(ScedfCertificate { search, records, families, conclusive })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(n_max: u64, m: usize, l: usize, c: usize, budget: u64) -> ScedfCertificate {
        search_scedf(ScedfSearch { n_max, m, l, c, budget }).unwrap()
    }

    #[test]
    fn space_formula() {
        assert_eq!(space_size(10, 2, 3), 36 * 35);
        assert_eq!(space_size(10, 3, 3), 36 * 35 * 4);
        assert_eq!(space_size(2, 2, 1), 1);
        assert_eq!(space_size(10, 4, 3), 0);
    }

    #[test]
    fn triples_in_z10() {
        let cert = run(19, 2, 3, 1, u64::MAX);
        assert!(cert.conclusive && cert.is_consistent());
        let r = &cert.records[8];
        assert_eq!((r.n, r.status, r.lambda, r.space, r.found), (10, Status::Complete, Some(1), 1260, 6));
        assert!(cert
            .families
            .iter()
            .any(|f| f.sets() == [vec![0, 1, 2], vec![3, 6, 9]]));
        assert_eq!(cert.records[2].status, Status::TooSmall);
        assert_eq!(cert.records[3].status, Status::Indivisible);

        let cert = run(19, 3, 3, 1, u64::MAX);
        assert!(cert.conclusive && cert.is_consistent());
        assert_eq!((cert.records[8].space, cert.records[8].found), (5040, 0));
    }

    #[test]
    fn singletons() {
        let cert = run(12, 2, 1, 1, u64::MAX);
        assert!(cert.is_consistent());
        assert_eq!(cert.families.len(), 1);
        assert_eq!(cert.families[0].sets(), [vec![0], vec![1]]);
        assert!(cert.records[1..].iter().all(|r| r.found == 0));
    }

    #[test]
    fn budget_makes_result_inconclusive() {
        let cert = run(10, 2, 3, 1, 100);
        assert!(!cert.conclusive);
        assert_eq!(cert.records[8].status, Status::Incomplete);
        assert!(cert.is_consistent());
    }

    #[test]
    fn tampered_certificate_is_rejected() {
        let mut cert = run(10, 2, 3, 1, u64::MAX);
        cert.records[8].pruned -= 1;
        assert!(!cert.is_consistent());
        let mut cert = run(10, 2, 3, 1, u64::MAX);
        cert.families.pop();
        assert!(!cert.is_consistent());
    }

    #[test]
    fn bad_arguments() {
        assert!(search_scedf(ScedfSearch { n_max: 129, m: 2, l: 3, c: 1, budget: 1 }).is_err());
        assert!(search_scedf(ScedfSearch { n_max: 10, m: 2, l: 3, c: 2, budget: 1 }).is_err());
        assert!(search_scedf(ScedfSearch { n_max: 10, m: 1, l: 3, c: 1, budget: 1 }).is_err());
    }
}
