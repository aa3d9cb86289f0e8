//! Cyclotomic circular difference families in `F_q` for primes `q = m l^2 + 1`.
//!
//! With `alpha` primitive, `C_0 = {alpha^(i l m) : 0 <= i < l}` is the subgroup of
//! order `l`, and `C_j = alpha^(l j) C_0`. The family `(C_0, .., C_{m-1})` is a
//! `(q, m, l; 1)`-1-CEDF exactly when [`coset_predicate`] holds; for `l = 2` that is
//! the same as `alpha^4 - 1` being a non-residue ([`quadratic_predicate`]).

mod scedf;
mod table1;

pub use scedf::{search_scedf, ScedfCertificate, ScedfRecord, ScedfSearch};
pub use table1::{KnownRow, KNOWN_ROWS};

use std::collections::BTreeSet;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::diff_family::{verify_cedf, verify_sedf};
use crate::field::is_prime;
use crate::{Error, FieldElement, PrimeField, Result, SetFamily};

/// Largest `m` for which [`search_sedf_permutations`] enumerates all `(m - 1)!` orders.
pub const MAX_PERMUTATION_SETS: usize = 9;

/// Checks `q` prime and `q - 1 = m l^2` with `m >= 2`, `l >= 1`.
pub fn check_shape(q: u64, m: usize, l: usize) -> Result<PrimeField> {
    if m < 2 || l == 0 {
        return Err(Error::params(format!("need m >= 2 and l >= 1, got m = {m}, l = {l}")));
    }
    let field = PrimeField::new(q)?;
    if (m as u64).checked_mul((l * l) as u64) != Some(q - 1) {
        return Err(Error::params(format!("q - 1 = {} but m l^2 = {}", q - 1, m * l * l)));
    }
    Ok(field)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConstructionParams {
    m: usize,
    l: usize,
    alpha: FieldElement,
}

impl ConstructionParams {
    pub fn new(q: u64, m: usize, l: usize, alpha: u64) -> Result<Self> {
        let field = check_shape(q, m, l)?;
        let alpha = field.elem(alpha);
        if !alpha.is_primitive()? {
            return Err(Error::params(format!("{alpha} is not a primitive root mod {q}")));
        }
        Ok(ConstructionParams { m, l, alpha })
    }

    pub fn q(&self) -> u64 {
        self.alpha.field().modulus()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn alpha(&self) -> FieldElement {
        self.alpha
    }

    /// `beta = alpha^l`, a generator of the subgroup `H` of order `l m`.
    pub fn beta(&self) -> FieldElement {
        self.alpha.pow_unchecked(self.l as u64)
    }
}

/// Builds `(C_0, .., C_{m-1})`.
pub fn cyclotomic_family(params: &ConstructionParams) -> Result<SetFamily> {
    let (m, l, alpha) = (params.m as u64, params.l as u64, params.alpha);
    let c0: Vec<FieldElement> = (0..l).map(|i| alpha.pow_unchecked(i * l * m)).collect();
    let sets = (0..m)
        .map(|j| {
            let shift = alpha.pow_unchecked(l * j);
            c0.iter().map(|&x| (shift * x).value()).collect()
        })
        .collect();
    SetFamily::new(params.q(), sets)
}

/// `alpha^4 - 1` is a quadratic non-residue. Requires `q = 1 mod 4`.
pub fn quadratic_predicate(alpha: FieldElement) -> Result<bool> {
    let q = alpha.field().modulus();
    if q % 4 != 1 {
        return Err(Error::params(format!("q = {q} is not 1 mod 4")));
    }
    let x = alpha.pow_unchecked(4) - alpha.field().one();
    if x.is_zero() {
        return Err(Error::domain(format!("{alpha}^4 = 1 in F_{q}")));
    }
    Ok(!x.is_quadratic_residue()?)
}

/// The `l` values `beta^(i m + 1) - 1` are nonzero and lie in distinct cosets of `H`.
///
/// `H` is the unique subgroup of order `l m`, so `x H = y H` iff `x^(l m) = y^(l m)`.
pub fn coset_predicate(params: &ConstructionParams) -> bool {
    let (m, l) = (params.m as u64, params.l as u64);
    let beta = params.beta();
    let one = beta.field().one();
    let mut seen = BTreeSet::new();
    (0..l).all(|i| {
        let r = beta.pow_unchecked(i * m + 1) - one;
        !r.is_zero() && seen.insert(r.pow_unchecked(l * m).value())
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    pub q: u64,
    pub m: usize,
    pub l: usize,
    /// Primitive roots giving a 1-CEDF, increasing.
    pub witnesses: Vec<u64>,
    /// Number of primitive roots tried.
    pub examined: usize,
    /// Roots where [`coset_predicate`] and the verifier disagree. Always empty.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub disagreements: Vec<u64>,
}

/// Tries every primitive root of `q`, checking each with both the verifier and
/// [`coset_predicate`].
pub fn search_parameter_set(q: u64, m: usize, l: usize) -> Result<SearchResult> {
    let field = check_shape(q, m, l)?;
    let roots = field.primitive_roots();
    let outcomes: Vec<(u64, bool, bool)> = roots
        .par_iter()
        .map(|alpha| {
            let params = ConstructionParams { m, l, alpha: *alpha };
            let verified = verify_cedf(&cyclotomic_family(&params)?, 1)?.valid;
            Ok((alpha.value(), verified, coset_predicate(&params)))
        })
        .collect::<Result<_>>()?;
    Ok(SearchResult {
        q,
        m,
        l,
        witnesses: outcomes.iter().filter(|o| o.1).map(|o| o.0).collect(),
        examined: roots.len(),
        disagreements: outcomes.iter().filter(|o| o.1 != o.2).map(|o| o.0).collect(),
    })
}

/// Searches every `(m, l)` with `m <= m_max`, `2 <= l <= l_max` and `m l^2 + 1` prime.
pub fn sweep(m_max: usize, l_max: usize) -> Result<Vec<SearchResult>> {
    let mut out = Vec::new();
    for m in 2..=m_max {
        for l in 2..=l_max {
            let q = (m * l * l + 1) as u64;
            if is_prime(q) {
                out.push(search_parameter_set(q, m, l)?);
            }
        }
    }
    Ok(out)
}

/// The classes `C_0, .., C_{m-1}` built from the smallest primitive root.
fn classes(q: u64, m: usize, l: usize) -> Result<SetFamily> {
    let field = check_shape(q, m, l)?;
    let alpha = field.smallest_primitive_root();
    cyclotomic_family(&ConstructionParams { m, l, alpha })
}

/// Every ordering of the cyclotomic classes, with `C_0` first, that is an `S`-EDF.
///
/// Fixing `C_0` removes the rotations, which preserve the property. Results follow the
/// lexicographic order of the permutations.
pub fn search_sedf_permutations(q: u64, m: usize, l: usize, shifts: &[usize]) -> Result<Vec<SetFamily>> {
    if m > MAX_PERMUTATION_SETS {
        return Err(Error::params(format!(
            "m = {m} is too large for exhaustive ordering search (max {MAX_PERMUTATION_SETS}); use the randomized search"
        )));
    }
    let base = classes(q, m, l)?;
    verify_sedf(&base, shifts)?;
    let orders: Vec<Vec<usize>> = (1..m)
        .permutations(m - 1)
        .map(|rest| std::iter::once(0).chain(rest).collect())
        .collect();
    let hits: Vec<Option<SetFamily>> = orders
        .par_iter()
        .map(|perm| {
            let family = base.reordered(perm)?;
            Ok(verify_sedf(&family, shifts)?.valid.then_some(family))
        })
        .collect::<Result<_>>()?;
    Ok(hits.into_iter().flatten().collect())
}

/// Random orderings of the classes (with `C_0` first), keeping the distinct ones that
/// are `S`-EDFs, sorted by ordering.
pub fn search_sedf_random(
    q: u64,
    m: usize,
    l: usize,
    shifts: &[usize],
    restarts: u64,
    seed: u64,
) -> Result<Vec<SetFamily>> {
    let base = classes(q, m, l)?;
    verify_sedf(&base, shifts)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found = BTreeSet::new();
    let mut perm: Vec<usize> = (0..m).collect();
    for _ in 0..restarts {
        perm[1..].shuffle(&mut rng);
        if !found.contains(&perm) && verify_sedf(&base.reordered(&perm)?, shifts)?.valid {
            found.insert(perm.clone());
        }
    }
    found.into_iter().map(|p| base.reordered(&p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::AmdCode;

    fn family(q: u64, m: usize, l: usize, alpha: u64) -> SetFamily {
        cyclotomic_family(&ConstructionParams::new(q, m, l, alpha).unwrap()).unwrap()
    }

    fn sets(f: &SetFamily) -> Vec<Vec<u64>> {
        f.sets().to_vec()
    }

    #[test]
    fn construction_examples() {
        assert_eq!(sets(&family(13, 3, 2, 2)), vec![vec![1, 12], vec![4, 9], vec![3, 10]]);
        assert_eq!(sets(&family(17, 4, 2, 3)), vec![vec![1, 16], vec![9, 8], vec![13, 4], vec![15, 2]]);
        assert_eq!(
            sets(&family(29, 7, 2, 2)),
            vec![vec![1, 28], vec![4, 25], vec![16, 13], vec![6, 23], vec![24, 5], vec![9, 20], vec![7, 22]]
        );
    }

    #[test]
    fn parameter_checks() {
        assert!(ConstructionParams::new(13, 3, 2, 3).is_err());
        assert!(ConstructionParams::new(13, 4, 2, 2).is_err());
        assert!(ConstructionParams::new(15, 7, 1, 2).is_err());
        assert!(ConstructionParams::new(5, 1, 2, 2).is_err());
        assert!(search_parameter_set(13, 2, 2).is_err());
    }

    #[test]
    fn predicates() {
        let f13 = PrimeField::new(13).unwrap();
        let f17 = PrimeField::new(17).unwrap();
        let f29 = PrimeField::new(29).unwrap();
        assert!(quadratic_predicate(f13.elem(2)).unwrap());
        assert!(!quadratic_predicate(f29.elem(3)).unwrap());
        assert!(quadratic_predicate(f17.elem(3)).unwrap());
        assert!(quadratic_predicate(PrimeField::new(7).unwrap().elem(3)).is_err());
        assert!(quadratic_predicate(PrimeField::new(5).unwrap().elem(2)).is_err());

        let p = ConstructionParams::new(13, 3, 2, 2).unwrap();
        assert_eq!(p.beta().value(), 4);
        assert!(coset_predicate(&p));
        assert!(!coset_predicate(&ConstructionParams::new(29, 7, 2, 3).unwrap()));
        assert!(coset_predicate(&ConstructionParams::new(7, 6, 1, 3).unwrap()));
    }

    #[test]
    fn witness_lists() {
        let r = search_parameter_set(29, 7, 2).unwrap();
        assert_eq!((r.witnesses, r.examined), (vec![2, 14, 15, 27], 12));
        assert!(r.disagreements.is_empty());
        let r = search_parameter_set(1217, 19, 8).unwrap();
        assert!(r.witnesses.contains(&642));
        assert_eq!(&r.witnesses[..5], &[5, 22, 34, 59, 95]);
        assert_eq!(search_parameter_set(13, 3, 2).unwrap().witnesses, vec![2, 6, 7, 11]);
    }

    #[test]
    fn known_rows_verify() {
        for row in KNOWN_ROWS {
            let f = family(row.p, row.m, row.l, row.alpha);
            assert_eq!(verify_cedf(&f, 1).unwrap().lambda, Some(1), "{row:?}");
        }
    }

    #[test]
    fn predicates_agree_with_verifier_below_2000() {
        for q in (3..2000u64).filter(|&q| is_prime(q)) {
            let field = PrimeField::new(q).unwrap();
            let roots = field.primitive_roots();
            for l in (1..).take_while(|l| l * l < q as usize) {
                let ll = (l * l) as u64;
                if (q - 1) % ll != 0 || (q - 1) / ll < 2 {
                    continue;
                }
                let m = ((q - 1) / ll) as usize;
                for &alpha in &roots {
                    let params = ConstructionParams { m, l, alpha };
                    let f = cyclotomic_family(&params).unwrap();
                    let valid = verify_cedf(&f, 1).unwrap().valid;
                    assert_eq!(valid, coset_predicate(&params), "q={q} l={l} alpha={alpha}");
                    if l == 2 {
                        assert_eq!(valid, quadratic_predicate(alpha).unwrap(), "q={q} alpha={alpha}");
                    }
                    if l == 1 {
                        assert!(valid);
                    }
                }
            }
        }
    }

    #[test]
    fn classes_do_not_depend_on_alpha() {
        let field = PrimeField::new(73).unwrap();
        let canon = |f: SetFamily| -> BTreeSet<BTreeSet<u64>> {
            f.sets().iter().map(|s| s.iter().copied().collect()).collect()
        };
        let first = canon(family(73, 8, 3, 5));
        for alpha in field.primitive_roots() {
            let f = cyclotomic_family(&ConstructionParams { m: 8, l: 3, alpha }).unwrap();
            let c0: BTreeSet<u64> = f.set(0).iter().copied().collect();
            assert_eq!(c0, [1, 8, 64].into_iter().collect());
            assert_eq!(canon(f), first);
        }
    }

    #[test]
    fn sweep_finds_exactly_the_known_rows() {
        let hits: BTreeSet<(u64, usize, usize)> = sweep(50, 10)
            .unwrap()
            .into_iter()
            .filter(|r| !r.witnesses.is_empty())
            .map(|r| (r.q, r.m, r.l))
            .collect();
        let known: BTreeSet<_> = KNOWN_ROWS.iter().map(|r| (r.p, r.m, r.l)).collect();
        assert_eq!(hits, known);
        assert_eq!(sweep(50, 10).unwrap().len(), 127);
    }

    #[test]
    fn sedf_orderings() {
        let ex14 = SetFamily::new(
            29,
            vec![vec![1, 28], vec![9, 20], vec![23, 6], vec![4, 25], vec![7, 22], vec![5, 24], vec![13, 16]],
        )
        .unwrap();
        let found = search_sedf_permutations(29, 7, 2, &[1, 2]).unwrap();
        assert_eq!(found.len(), 2);
        assert!(found.iter().any(|f| f.same_sets_as(&ex14)));
        for f in &found {
            assert_eq!(verify_sedf(f, &[1, 2]).unwrap().lambda, Some(2));
        }

        let ex15 = SetFamily::new(37, vec![vec![1, 26, 10], vec![8, 23, 6], vec![27, 36, 11], vec![31, 29, 14]]).unwrap();
        let found = search_sedf_permutations(37, 4, 3, &[1, 2]).unwrap();
        assert_eq!(found.len(), 2);
        assert!(found.iter().any(|f| f.same_sets_as(&ex15)));

        assert!(search_sedf_permutations(181, 45, 2, &[1, 2]).is_err());
        assert_eq!(found, search_sedf_permutations(37, 4, 3, &[1, 2]).unwrap());
    }

    #[test]
    fn all_shifts_lambda_identity() {
        // S = {1..m-1} sums every ordered pair of distinct classes
        assert_eq!(verify_sedf(&family(13, 3, 2, 2), &[1, 2]).unwrap().lambda, Some(2));
        for row in KNOWN_ROWS.iter().filter(|r| r.m <= 16) {
            let all: Vec<usize> = (1..row.m).collect();
            let report = verify_sedf(&family(row.p, row.m, row.l, row.alpha), &all).unwrap();
            if let Some(lambda) = report.lambda {
                assert_eq!(lambda * (row.p - 1), ((row.m - 1) * row.m * row.l * row.l) as u64);
            }
        }
    }

    #[test]
    fn random_orderings_agree_with_exhaustive() {
        let exhaustive = search_sedf_permutations(29, 7, 2, &[1, 2]).unwrap();
        let random = search_sedf_random(29, 7, 2, &[1, 2], 20_000, 3).unwrap();
        assert_eq!(random, exhaustive);
    }

    #[test]
    fn known_row_codes_are_r_optimal() {
        for row in KNOWN_ROWS.iter().filter(|r| r.p < 200) {
            let code = AmdCode::new(family(row.p, row.m, row.l, row.alpha));
            assert!(code.is_r_optimal_circular(1).unwrap());
        }
    }
}
