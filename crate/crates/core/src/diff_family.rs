//! External differences in `Z_n` and the circular difference family verifiers.
//!
//! A [`SetFamily`] is an ordered tuple `(A_0, .., A_{m-1})` of pairwise-disjoint
//! `l`-subsets of `Z_n`. It is read both as an AMD code and as a candidate difference
//! family. For a shift `c` the c-circular union is the multiset sum of
//! `D(A_{j+c mod m}, A_j)` over all `j`, where `D(X, Y) = {x - y : x in X, y in Y}`.
//!
//! * c-CEDF: the c-circular union equals `lambda * (Z_n \ {0})`.
//! * S-EDF: the same, summed over every shift `c` in `S`.
//! * c-SCEDF: every single `D(A_{j+c mod m}, A_j)` equals `lambda * (Z_n \ {0})`.
//!
//! Multisets are dense count arrays of length `n`.

use std::collections::BTreeSet;

use num_integer::Integer;
use serde::Serialize;

use crate::{Error, Result};

/// Upper bound on the group order; multisets and membership tables are dense.
pub const MAX_GROUP_ORDER: u64 = 1 << 24;

const NO_OWNER: u32 = u32::MAX;

/// Serializes as `{"n": .., "sets": [[..], ..]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetFamily {
    n: u64,
    sets: Vec<Vec<u64>>,
    #[serde(skip)]
    owner: Vec<u32>,
}

impl SetFamily {
    /// Validates `m >= 2`, a common positive set size, elements in `[0, n)`,
    /// no repeats inside a set, and pairwise disjointness.
    pub fn new(n: u64, sets: Vec<Vec<u64>>) -> Result<Self> {
        if !(2..=MAX_GROUP_ORDER).contains(&n) {
            return Err(Error::out_of_range(
                "n",
                n,
                format!("2 <= n <= {MAX_GROUP_ORDER}"),
            ));
        }
        if sets.len() < 2 {
            return Err(Error::InvalidFamily(format!(
                "need at least two sets, got {}",
                sets.len()
            )));
        }
        let l = sets[0].len();
        if l == 0 {
            return Err(Error::InvalidFamily("sets must be nonempty".into()));
        }
        let mut owner = vec![NO_OWNER; n as usize];
        for (i, set) in sets.iter().enumerate() {
            if set.len() != l {
                return Err(Error::InvalidFamily(format!(
                    "set {i} has {} elements, set 0 has {l}",
                    set.len()
                )));
            }
            for &x in set {
                if x >= n {
                    return Err(Error::InvalidFamily(format!(
                        "element {x} of set {i} is not a residue mod {n}"
                    )));
                }
                match owner[x as usize] {
                    NO_OWNER => owner[x as usize] = i as u32,
                    j if j as usize == i => {
                        return Err(Error::InvalidFamily(format!(
                            "element {x} repeated in set {i}"
                        )))
                    }
                    _ => return Err(Error::Overlap(x)),
                }
            }
        }
        Ok(SetFamily { n, sets, owner })
    }

    /// Group order `n`.
    pub fn order(&self) -> u64 {
        self.n
    }

    /// Number of sets `m`.
    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    /// Common set size `l`.
    pub fn set_size(&self) -> usize {
        self.sets[0].len()
    }

    pub fn sets(&self) -> &[Vec<u64>] {
        &self.sets
    }

    pub fn set(&self, i: usize) -> &[u64] {
        &self.sets[i]
    }

    pub fn into_sets(self) -> Vec<Vec<u64>> {
        self.sets
    }

    /// Index of the set containing `g` (reduced mod `n`), if any.
    pub fn owner_of(&self, g: u64) -> Option<usize> {
        match self.owner[(g % self.n) as usize] {
            NO_OWNER => None,
            j => Some(j as usize),
        }
    }

    /// Same sets in the order `perm[0], perm[1], ..`.
    pub fn reordered(&self, perm: &[usize]) -> Result<SetFamily> {
        let m = self.num_sets();
        let distinct: BTreeSet<usize> = perm.iter().copied().collect();
        if perm.len() != m || distinct.len() != m || distinct.iter().any(|&i| i >= m) {
            return Err(Error::params(format!(
                "{perm:?} is not a permutation of 0..{m}"
            )));
        }
        SetFamily::new(self.n, perm.iter().map(|&i| self.sets[i].clone()).collect())
    }

    /// Equality of the ordered tuple of sets, ignoring element order inside each set.
    pub fn same_sets_as(&self, other: &SetFamily) -> bool {
        self.n == other.n
            && self.num_sets() == other.num_sets()
            && self.sets.iter().zip(&other.sets).all(|(a, b)| {
                a.iter().collect::<BTreeSet<_>>() == b.iter().collect::<BTreeSet<_>>()
            })
    }

    fn check_shift(&self, c: usize) -> Result<()> {
        let m = self.num_sets();
        if c == 0 || c >= m {
            return Err(Error::out_of_range(
                "c",
                c as u64,
                format!("1 <= c <= {}", m - 1),
            ));
        }
        Ok(())
    }

    /// Multiset sum of `D(A_{j+c mod m}, A_j)` over `j` and over every `c` in `shifts`.
    pub fn circular_union(&self, shifts: &[usize]) -> DifferenceMultiset {
        let m = self.num_sets();
        let mut acc = DifferenceMultiset::empty(self.n);
        for &c in shifts {
            for j in 0..m {
                acc.accumulate(&self.sets[(j + c) % m], &self.sets[j]);
            }
        }
        acc
    }
}

/// Multiplicities of the elements of `Z_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceMultiset {
    n: u64,
    counts: Vec<u64>,
}

impl DifferenceMultiset {
    pub fn empty(n: u64) -> Self {
        DifferenceMultiset {
            n,
            counts: vec![0; n as usize],
        }
    }

    /// Adds every `x - y` for `x` in `a`, `y` in `b`. No validation.
    fn accumulate(&mut self, a: &[u64], b: &[u64]) {
        let n = self.n;
        for &x in a {
            for &y in b {
                self.counts[((x + n - y) % n) as usize] += 1;
            }
        }
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn count(&self, x: u64) -> u64 {
        self.counts[(x % self.n) as usize]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Multiset with every element negated.
    pub fn negated(&self) -> DifferenceMultiset {
        let n = self.n as usize;
        let counts = (0..n).map(|x| self.counts[(n - x) % n]).collect();
        DifferenceMultiset { n: self.n, counts }
    }

    pub fn merge(&mut self, other: &DifferenceMultiset) {
        assert_eq!(self.n, other.n, "multisets over different groups");
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    /// First departure from `expected * (Z_n \ {0})`, scanning from 0 upward.
    fn first_deviation(&self, expected: u64) -> Option<(u64, u64, u64)> {
        if self.counts[0] != 0 {
            return Some((0, self.counts[0], 0));
        }
        self.counts
            .iter()
            .enumerate()
            .skip(1)
            .find(|(_, &c)| c != expected)
            .map(|(x, &c)| (x as u64, c, expected))
    }

    /// `Ok(lambda)` when the multiset is `lambda * (Z_n \ {0})`, otherwise the first
    /// violation. The candidate `lambda` is the multiplicity of element 1.
    fn uniformity(&self) -> std::result::Result<u64, Violation> {
        let lambda = self.counts.get(1).copied().unwrap_or(0);
        match self.first_deviation(lambda) {
            None => Ok(lambda),
            Some((element, observed, expected)) => Err(Violation {
                pair: None,
                element,
                observed,
                expected,
            }),
        }
    }
}

/// `D(a, b)`: the multiset of all `x - y mod n`, `x` in `a`, `y` in `b`.
pub fn external_difference(a: &[u64], b: &[u64], n: u64) -> Result<DifferenceMultiset> {
    if !(2..=MAX_GROUP_ORDER).contains(&n) {
        return Err(Error::out_of_range("n", n, format!("2 <= n <= {MAX_GROUP_ORDER}")));
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidFamily("sets must be nonempty".into()));
    }
    if let Some(&x) = a.iter().chain(b).find(|&&x| x >= n) {
        return Err(Error::InvalidFamily(format!("{x} is not a residue mod {n}")));
    }
    let left: BTreeSet<u64> = a.iter().copied().collect();
    if let Some(&x) = b.iter().find(|x| left.contains(x)) {
        return Err(Error::Overlap(x));
    }
    let mut d = DifferenceMultiset::empty(n);
    d.accumulate(a, b);
    Ok(d)
}

/// Where a verification first failed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// For per-pair checks, the index `j` of the failing `D(A_{j+c}, A_j)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<usize>,
    pub element: u64,
    pub observed: u64,
    pub expected: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub valid: bool,
    /// Set iff `valid`.
    pub lambda: Option<u64>,
    pub violation: Option<Violation>,
}

impl VerificationReport {
    fn from_uniformity(result: std::result::Result<u64, Violation>) -> Self {
        match result {
            Ok(lambda) => VerificationReport {
                valid: true,
                lambda: Some(lambda),
                violation: None,
            },
            Err(v) => VerificationReport {
                valid: false,
                lambda: None,
                violation: Some(v),
            },
        }
    }
}

/// Checks the c-CEDF multiset identity. When valid, `m l^2 = lambda (n - 1)`.
pub fn verify_cedf(family: &SetFamily, c: usize) -> Result<VerificationReport> {
    family.check_shift(c)?;
    let report = VerificationReport::from_uniformity(family.circular_union(&[c]).uniformity());
    debug_assert!(report.lambda.is_none_or(|lambda| {
        let m = family.num_sets() as u64;
        let l = family.set_size() as u64;
        m * l * l == lambda * (family.order() - 1)
    }));
    Ok(report)
}

/// Checks the S-EDF identity for the shift set `shifts`. When valid,
/// `|S| m l^2 = lambda (n - 1)`.
pub fn verify_sedf(family: &SetFamily, shifts: &[usize]) -> Result<VerificationReport> {
    if shifts.is_empty() {
        return Err(Error::params("shift set S must be nonempty"));
    }
    let mut seen = BTreeSet::new();
    for &c in shifts {
        family.check_shift(c)?;
        if !seen.insert(c) {
            return Err(Error::params(format!("shift {c} listed twice in S")));
        }
    }
    let report = VerificationReport::from_uniformity(family.circular_union(shifts).uniformity());
    debug_assert!(report.lambda.is_none_or(|lambda| {
        let m = family.num_sets() as u64;
        let l = family.set_size() as u64;
        shifts.len() as u64 * m * l * l == lambda * (family.order() - 1)
    }));
    Ok(report)
}

/// Checks that every `D(A_{j+c mod m}, A_j)` on its own equals `lambda (Z_n \ {0})`
/// with one common `lambda`.
pub fn verify_scedf(family: &SetFamily, c: usize) -> Result<VerificationReport> {
    family.check_shift(c)?;
    let m = family.num_sets();
    let mut common = None;
    for j in 0..m {
        let mut d = DifferenceMultiset::empty(family.order());
        d.accumulate(family.set((j + c) % m), family.set(j));
        let lambda = *common.get_or_insert(d.count(1));
        if let Some((element, observed, expected)) = d.first_deviation(lambda) {
            return Ok(VerificationReport {
                valid: false,
                lambda: None,
                violation: Some(Violation {
                    pair: Some(j),
                    element,
                    observed,
                    expected,
                }),
            });
        }
    }
    Ok(VerificationReport {
        valid: true,
        lambda: common,
        violation: None,
    })
}

/// Reindexes a 1-CEDF into a c-CEDF: `A'_i = A_{i c^{-1} mod m}` for `gcd(c, m) = 1`.
pub fn shift_family(family: &SetFamily, c: usize) -> Result<SetFamily> {
    let m = family.num_sets();
    family.check_shift(c)?;
    let (g, inv) = mod_inverse(c as i64, m as i64);
    if g != 1 {
        return Err(Error::params(format!("gcd(c, m) = gcd({c}, {m}) = {g}, need 1")));
    }
    if !verify_cedf(family, 1)?.valid {
        return Err(Error::params("input family is not a 1-CEDF"));
    }
    let perm: Vec<usize> = (0..m).map(|i| (i * inv) % m).collect();
    family.reordered(&perm)
}

/// Returns `(gcd(a, m), a^{-1} mod m)`; the inverse is meaningful only when the gcd is 1.
fn mod_inverse(a: i64, m: i64) -> (i64, usize) {
    let e = a.extended_gcd(&m);
    (e.gcd, e.x.rem_euclid(m) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn ex_13() -> SetFamily {
        SetFamily::new(13, vec![vec![1, 12], vec![4, 9], vec![3, 10]]).unwrap()
    }

    fn ex_29() -> SetFamily {
        SetFamily::new(
            29,
            vec![
                vec![1, 28],
                vec![4, 25],
                vec![16, 13],
                vec![6, 23],
                vec![24, 5],
                vec![9, 20],
                vec![7, 22],
            ],
        )
        .unwrap()
    }

    /// Independent oracle: materialize the difference list, sort, compare to the target.
    fn naive_is_uniform(n: u64, diffs: &mut Vec<u64>) -> Option<u64> {
        diffs.sort_unstable();
        if diffs.is_empty() || !(diffs.len() as u64).is_multiple_of(n - 1) {
            return None;
        }
        let lambda = diffs.len() as u64 / (n - 1);
        let target: Vec<u64> = (1..n)
            .flat_map(|x| std::iter::repeat_n(x, lambda as usize))
            .collect();
        (*diffs == target).then_some(lambda)
    }

    fn naive_union(sets: &[Vec<u64>], n: u64, shifts: &[usize]) -> Vec<u64> {
        let m = sets.len();
        let mut out = Vec::new();
        for &c in shifts {
            for j in 0..m {
                for &x in &sets[(j + c) % m] {
                    for &y in &sets[j] {
                        out.push((x + n - y) % n);
                    }
                }
            }
        }
        out
    }

    fn elements(d: &DifferenceMultiset) -> Vec<(u64, u64)> {
        (0..d.order())
            .filter(|&x| d.count(x) > 0)
            .map(|x| (x, d.count(x)))
            .collect()
    }

    #[test]
    fn external_difference_examples() {
        let d = external_difference(&[4, 9], &[1, 12], 13).unwrap();
        assert_eq!(elements(&d), vec![(3, 1), (5, 1), (8, 1), (10, 1)]);
        let d = external_difference(&[3, 10], &[4, 9], 13).unwrap();
        assert_eq!(elements(&d), vec![(1, 1), (6, 1), (7, 1), (12, 1)]);
        let d = external_difference(&[1], &[2], 5).unwrap();
        assert_eq!(elements(&d), vec![(4, 1)]);
    }

    #[test]
    fn external_difference_errors() {
        assert_eq!(external_difference(&[1, 2], &[2, 3], 7), Err(Error::Overlap(2)));
        assert!(external_difference(&[], &[1], 7).is_err());
        assert!(external_difference(&[9], &[1], 7).is_err());
    }

    #[test]
    fn family_validation() {
        assert!(matches!(SetFamily::new(13, vec![vec![1, 12]]), Err(Error::InvalidFamily(_))));
        assert_eq!(
            SetFamily::new(13, vec![vec![1, 12], vec![12, 3]]),
            Err(Error::Overlap(12))
        );
        assert!(SetFamily::new(13, vec![vec![1, 12], vec![3]]).is_err());
        assert!(SetFamily::new(13, vec![vec![1, 13], vec![3, 4]]).is_err());
        assert!(SetFamily::new(13, vec![vec![1, 1], vec![3, 4]]).is_err());
        assert!(SetFamily::new(13, vec![vec![], vec![]]).is_err());
        let f = ex_13();
        assert_eq!((f.order(), f.num_sets(), f.set_size()), (13, 3, 2));
        assert_eq!(f.owner_of(9), Some(1));
        assert_eq!(f.owner_of(2), None);
    }

    #[test]
    fn cedf_examples() {
        let r = verify_cedf(&ex_13(), 1).unwrap();
        assert_eq!((r.valid, r.lambda), (true, Some(1)));
        let f17 = SetFamily::new(17, vec![vec![1, 16], vec![9, 8], vec![13, 4], vec![15, 2]]).unwrap();
        assert_eq!(verify_cedf(&f17, 1).unwrap().lambda, Some(1));

        let broken = SetFamily::new(13, vec![vec![1, 11], vec![4, 9], vec![3, 10]]).unwrap();
        let r = verify_cedf(&broken, 1).unwrap();
        assert!(!r.valid);
        assert_eq!(r.lambda, None);
        // union multiplicities for elements 0..13: [0, 2, 0, 1, 1, 0, 2, 1, 2, 0, 0, 2, 1]
        assert_eq!(
            r.violation,
            Some(Violation { pair: None, element: 2, observed: 0, expected: 2 })
        );
    }

    #[test]
    fn cedf_rejects_bad_shift() {
        assert!(matches!(verify_cedf(&ex_13(), 0), Err(Error::OutOfRange { .. })));
        assert!(matches!(verify_cedf(&ex_13(), 3), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn sedf_examples() {
        let f = SetFamily::new(
            29,
            vec![
                vec![1, 28],
                vec![9, 20],
                vec![23, 6],
                vec![4, 25],
                vec![7, 22],
                vec![5, 24],
                vec![13, 16],
            ],
        )
        .unwrap();
        assert_eq!(verify_sedf(&f, &[1, 2]).unwrap().lambda, Some(2));
        let f37 = SetFamily::new(
            37,
            vec![vec![1, 26, 10], vec![8, 23, 6], vec![27, 36, 11], vec![31, 29, 14]],
        )
        .unwrap();
        assert_eq!(verify_sedf(&f37, &[1, 2]).unwrap().lambda, Some(2));
        assert_eq!(verify_sedf(&ex_13(), &[1]).unwrap(), verify_cedf(&ex_13(), 1).unwrap());
        assert!(verify_sedf(&ex_13(), &[]).is_err());
        assert!(verify_sedf(&ex_13(), &[1, 1]).is_err());
    }

    #[test]
    fn scedf_examples() {
        // each D(A_{j+1}, A_j) hits only 4 of the 12 nonzero residues
        let r = verify_scedf(&ex_13(), 1).unwrap();
        assert!(!r.valid);
        assert_eq!(
            r.violation,
            Some(Violation { pair: Some(0), element: 3, observed: 1, expected: 0 })
        );

        let tiny = SetFamily::new(5, vec![vec![1], vec![2]]).unwrap();
        assert!(!verify_scedf(&tiny, 1).unwrap().valid);

        // n - 1 = l^2, m = 2: A_0 = {0, 1}, A_1 = {2, 4} has D(A_1, A_0) = {2, 1, 4, 3}
        let strong = SetFamily::new(5, vec![vec![0, 1], vec![2, 4]]).unwrap();
        let r = verify_scedf(&strong, 1).unwrap();
        assert_eq!((r.valid, r.lambda), (true, Some(1)));
    }

    #[test]
    fn shift_family_examples() {
        let shifted = shift_family(&ex_29(), 2).unwrap();
        let expected = ex_29().reordered(&[0, 4, 1, 5, 2, 6, 3]).unwrap();
        assert_eq!(shifted, expected);
        assert_eq!(verify_cedf(&shifted, 2).unwrap().lambda, Some(1));
        assert_eq!(shift_family(&ex_29(), 1).unwrap(), ex_29());
        // m - 1 shift holds without reordering
        assert_eq!(verify_cedf(&ex_13(), 2).unwrap().lambda, Some(1));
    }

    #[test]
    fn shift_family_errors() {
        let f = SetFamily::new(17, vec![vec![1, 16], vec![9, 8], vec![13, 4], vec![15, 2]]).unwrap();
        assert!(shift_family(&f, 2).is_err()); // gcd(2, 4) = 2
        let broken = SetFamily::new(13, vec![vec![1, 11], vec![4, 9], vec![3, 10]]).unwrap();
        assert!(shift_family(&broken, 2).is_err());
    }

    #[test]
    fn first_shift_theorem_over_coprime_shifts() {
        for c in 1..7 {
            let shifted = shift_family(&ex_29(), c).unwrap();
            assert_eq!(verify_cedf(&shifted, c).unwrap().lambda, Some(1), "c = {c}");
        }
    }

    fn arb_family() -> impl Strategy<Value = SetFamily> {
        (3u64..=60, 2usize..=5, 1usize..=4, any::<u64>()).prop_filter_map(
            "family must fit",
            |(n, m, l, seed)| {
                if (m * l) as u64 > n {
                    return None;
                }
                use rand::seq::SliceRandom;
                use rand::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let mut pool: Vec<u64> = (0..n).collect();
                pool.shuffle(&mut rng);
                let sets = pool.chunks(l).take(m).map(|c| c.to_vec()).collect();
                SetFamily::new(n, sets).ok()
            },
        )
    }

    proptest! {
        #[test]
        fn difference_negation(f in arb_family()) {
            let d01 = external_difference(f.set(0), f.set(1), f.order()).unwrap();
            let d10 = external_difference(f.set(1), f.set(0), f.order()).unwrap();
            prop_assert_eq!(d01.negated(), d10);
        }

        #[test]
        fn union_total(f in arb_family(), c in 1usize..5) {
            let m = f.num_sets();
            let c = 1 + (c - 1) % (m - 1);
            let l = f.set_size() as u64;
            prop_assert_eq!(f.circular_union(&[c]).total(), m as u64 * l * l);
        }

        #[test]
        fn verifiers_match_sorted_list_oracle(f in arb_family(), c in 1usize..5) {
            let m = f.num_sets();
            let c = 1 + (c - 1) % (m - 1);
            let n = f.order();
            let r = verify_cedf(&f, c).unwrap();
            prop_assert_eq!(r.lambda, naive_is_uniform(n, &mut naive_union(f.sets(), n, &[c])));
            let all: Vec<usize> = (1..m).collect();
            let r = verify_sedf(&f, &all).unwrap();
            prop_assert_eq!(r.lambda, naive_is_uniform(n, &mut naive_union(f.sets(), n, &all)));
            let r = verify_scedf(&f, c).unwrap();
            let per_pair: Vec<Option<u64>> = (0..m)
                .map(|j| {
                    let mut d = Vec::new();
                    for &x in f.set((j + c) % m) { for &y in f.set(j) { d.push((x + n - y) % n); } }
                    naive_is_uniform(n, &mut d)
                })
                .collect();
            let oracle = if per_pair.iter().all(|l| l.is_some() && *l == per_pair[0]) { per_pair[0] } else { None };
            prop_assert_eq!(r.lambda, oracle);
            if let Some(ls) = r.lambda {
                prop_assert_eq!(verify_cedf(&f, c).unwrap().lambda, Some(m as u64 * ls));
            }
        }

        #[test]
        fn second_shift_theorem(f in arb_family()) {
            let m = f.num_sets();
            if verify_cedf(&f, 1).unwrap().valid {
                prop_assert_eq!(verify_cedf(&f, m - 1).unwrap().lambda, verify_cedf(&f, 1).unwrap().lambda);
            }
        }
    }
}
