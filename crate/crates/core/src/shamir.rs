//! Shamir's `(k, n)` threshold scheme over a prime field.
//!
//! The dealer picks `f(x) = s + a_1 x + .. + a_{k-1} x^{k-1}` with every `a_i` uniform
//! (the leading coefficient may be zero) and hands participant `i` the share
//! `(i, f(i))`. Any `k` shares give back `s = sum_j b_j y_j` with the Lagrange
//! coefficients `b_j = prod_{h != j} x_h / (x_h - x_j)`.

use std::collections::BTreeSet;

use rand::Rng;

use crate::{Error, FieldElement, PrimeField, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThresholdParams {
    k: usize,
    n: usize,
    field: PrimeField,
}

impl ThresholdParams {
    /// Requires `2 <= k <= n` and `p >= n + 1`.
    pub fn new(k: usize, n: usize, field: PrimeField) -> Result<Self> {
        if k < 2 || k > n {
            return Err(Error::params(format!("threshold needs 2 <= k <= n, got k = {k}, n = {n}")));
        }
        if field.modulus() < n as u64 + 1 {
            return Err(Error::params(format!(
                "field of order {} is too small for {n} participants",
                field.modulus()
            )));
        }
        Ok(ThresholdParams { k, n, field })
    }

    pub fn threshold(&self) -> usize {
        self.k
    }

    pub fn participants(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// Public identifier of participant `i` (1-based).
    pub fn identifier(&self, i: usize) -> FieldElement {
        self.field.elem(i as u64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Share {
    pub x: FieldElement,
    pub y: FieldElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShareVector {
    params: ThresholdParams,
    shares: Vec<Share>,
}

impl ShareVector {
    /// Checks that there are `n` shares in the right field with distinct nonzero `x`.
    pub fn new(params: ThresholdParams, shares: Vec<Share>) -> Result<Self> {
        if shares.len() != params.participants() {
            return Err(Error::params(format!(
                "expected {} shares, got {}",
                params.participants(),
                shares.len()
            )));
        }
        check_identifiers(params.field(), shares.iter().map(|s| s.x))?;
        for s in &shares {
            if s.y.field() != params.field() {
                return Err(Error::FieldMismatch(params.field().modulus(), s.y.field().modulus()));
            }
        }
        Ok(ShareVector { params, shares })
    }

    pub fn params(&self) -> &ThresholdParams {
        &self.params
    }

    pub fn shares(&self) -> &[Share] {
        &self.shares
    }

    /// Share held by participant with identifier `x`.
    pub fn by_identifier(&self, x: FieldElement) -> Option<Share> {
        self.shares.iter().copied().find(|s| s.x == x)
    }
}

/// Coefficients, constant term first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    coefficients: Vec<FieldElement>,
}

impl Polynomial {
    pub fn new(coefficients: Vec<FieldElement>) -> Result<Self> {
        let Some(first) = coefficients.first() else {
            return Err(Error::params("a polynomial needs at least one coefficient"));
        };
        let field = first.field();
        if let Some(c) = coefficients.iter().find(|c| c.field() != field) {
            return Err(Error::FieldMismatch(field.modulus(), c.field().modulus()));
        }
        Ok(Polynomial { coefficients })
    }

    /// Degree `< len` polynomial with uniform coefficients above the constant term.
    pub fn random<R: Rng + ?Sized>(constant: FieldElement, len: usize, rng: &mut R) -> Self {
        let field = constant.field();
        let mut coefficients = Vec::with_capacity(len);
        coefficients.push(constant);
        coefficients.extend((1..len).map(|_| field.elem(rng.gen_range(0..field.modulus()))));
        Polynomial { coefficients }
    }

    pub fn coefficients(&self) -> &[FieldElement] {
        &self.coefficients
    }

    pub fn constant(&self) -> FieldElement {
        self.coefficients[0]
    }

    /// Horner evaluation.
    pub fn eval(&self, x: FieldElement) -> FieldElement {
        let zero = x.field().zero();
        self.coefficients.iter().rev().fold(zero, |acc, &c| acc * x + c)
    }
}

fn check_identifiers(field: PrimeField, xs: impl IntoIterator<Item = FieldElement>) -> Result<()> {
    let mut seen = BTreeSet::new();
    for x in xs {
        if x.field() != field {
            return Err(Error::FieldMismatch(field.modulus(), x.field().modulus()));
        }
        if x.is_zero() {
            return Err(Error::params("share identifier x = 0 is reserved for the secret"));
        }
        if !seen.insert(x.value()) {
            return Err(Error::DuplicateIdentifier(x.value()));
        }
    }
    Ok(())
}

/// Shares `(i, f(i))` for `i = 1..=n`.
pub fn shares_from_polynomial(params: &ThresholdParams, poly: &Polynomial) -> Result<ShareVector> {
    if poly.coefficients().len() != params.threshold() {
        return Err(Error::params(format!(
            "polynomial has {} coefficients, threshold is {}",
            poly.coefficients().len(),
            params.threshold()
        )));
    }
    if poly.constant().field() != params.field() {
        return Err(Error::FieldMismatch(
            params.field().modulus(),
            poly.constant().field().modulus(),
        ));
    }
    let shares = (1..=params.participants())
        .map(|i| {
            let x = params.identifier(i);
            Share { x, y: poly.eval(x) }
        })
        .collect();
    Ok(ShareVector {
        params: *params,
        shares,
    })
}

/// Deals `secret`, returning the shares and the polynomial used.
pub fn deal<R: Rng + ?Sized>(
    params: &ThresholdParams,
    secret: FieldElement,
    rng: &mut R,
) -> Result<(ShareVector, Polynomial)> {
    if secret.field() != params.field() {
        return Err(Error::FieldMismatch(params.field().modulus(), secret.field().modulus()));
    }
    let poly = Polynomial::random(secret, params.threshold(), rng);
    let shares = shares_from_polynomial(params, &poly)?;
    Ok((shares, poly))
}

/// Lagrange coefficients for evaluating at 0 from the points `xs`.
pub fn lagrange_coefficients(xs: &[FieldElement]) -> Result<Vec<FieldElement>> {
    let Some(first) = xs.first() else {
        return Err(Error::params("need at least one identifier"));
    };
    let field = first.field();
    check_identifiers(field, xs.iter().copied())?;
    xs.iter()
        .enumerate()
        .map(|(j, &xj)| {
            let mut num = field.one();
            let mut den = field.one();
            for (h, &xh) in xs.iter().enumerate() {
                if h != j {
                    num = num * xh;
                    den = den * (xh - xj);
                }
            }
            num.checked_div(den)
        })
        .collect()
}

/// `sum_j b_j y_j` over the first `k` of `shares`.
pub fn reconstruct(params: &ThresholdParams, shares: &[Share]) -> Result<FieldElement> {
    let k = params.threshold();
    if shares.len() < k {
        return Err(Error::NotEnoughShares {
            needed: k,
            got: shares.len(),
        });
    }
    let used = &shares[..k];
    let xs: Vec<FieldElement> = used.iter().map(|s| s.x).collect();
    if xs[0].field() != params.field() {
        return Err(Error::FieldMismatch(params.field().modulus(), xs[0].field().modulus()));
    }
    let b = lagrange_coefficients(&xs)?;
    used.iter().zip(&b).try_fold(params.field().zero(), |acc, (s, &bj)| {
        acc.checked_add(bj.checked_mul(s.y)?)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p13() -> PrimeField {
        PrimeField::new(13).unwrap()
    }

    fn share(f: PrimeField, x: u64, y: u64) -> Share {
        Share { x: f.elem(x), y: f.elem(y) }
    }

    fn pairs(v: &ShareVector) -> Vec<(u64, u64)> {
        v.shares().iter().map(|s| (s.x.value(), s.y.value())).collect()
    }

    #[test]
    fn params_validation() {
        assert!(ThresholdParams::new(1, 3, p13()).is_err());
        assert!(ThresholdParams::new(4, 3, p13()).is_err());
        assert!(ThresholdParams::new(2, 13, p13()).is_err());
        assert!(ThresholdParams::new(2, 12, p13()).is_ok());
    }

    #[test]
    fn deal_with_fixed_polynomial() {
        let f = p13();
        let params = ThresholdParams::new(2, 3, f).unwrap();
        let poly = Polynomial::new(vec![f.elem(5), f.elem(3)]).unwrap();
        let v = shares_from_polynomial(&params, &poly).unwrap();
        assert_eq!(pairs(&v), vec![(1, 8), (2, 11), (3, 1)]);

        let params22 = ThresholdParams::new(2, 2, f).unwrap();
        let zero = Polynomial::new(vec![f.zero(), f.zero()]).unwrap();
        let v = shares_from_polynomial(&params22, &zero).unwrap();
        assert_eq!(pairs(&v), vec![(1, 0), (2, 0)]);
        assert_eq!(reconstruct(&params22, v.shares()).unwrap().value(), 0);
    }

    #[test]
    fn lagrange_examples() {
        let f = p13();
        let vals = |xs: &[u64]| -> Vec<u64> {
            let xs: Vec<_> = xs.iter().map(|&x| f.elem(x)).collect();
            lagrange_coefficients(&xs).unwrap().iter().map(|b| b.value()).collect()
        };
        assert_eq!(vals(&[1, 2]), vec![2, 12]);
        assert_eq!(vals(&[2, 3]), vec![3, 11]);
        assert_eq!(vals(&[5]), vec![1]);
        assert_eq!(
            lagrange_coefficients(&[f.elem(1), f.elem(1)]),
            Err(Error::DuplicateIdentifier(1))
        );
        assert!(lagrange_coefficients(&[f.elem(0), f.elem(1)]).is_err());
        assert!(lagrange_coefficients(&[]).is_err());
    }

    #[test]
    fn reconstruct_examples() {
        let f = p13();
        let params = ThresholdParams::new(2, 3, f).unwrap();
        assert_eq!(reconstruct(&params, &[share(f, 2, 11), share(f, 3, 1)]).unwrap().value(), 5);
        assert_eq!(reconstruct(&params, &[share(f, 1, 8), share(f, 2, 11)]).unwrap().value(), 5);
        assert_eq!(
            reconstruct(&params, &[share(f, 1, 8)]),
            Err(Error::NotEnoughShares { needed: 2, got: 1 })
        );
        assert_eq!(
            reconstruct(&params, &[share(f, 1, 8), share(f, 1, 9)]),
            Err(Error::DuplicateIdentifier(1))
        );
    }

    #[test]
    fn every_k_subset_reconstructs() {
        for (p, k, n) in [(13, 2, 3), (29, 3, 5), (101, 5, 8), (17, 4, 4), (31, 2, 8)] {
            let f = PrimeField::new(p).unwrap();
            let params = ThresholdParams::new(k, n, f).unwrap();
            for seed in 0..25 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let secret = f.elem(rng.gen_range(0..p));
                let (v, poly) = deal(&params, secret, &mut rng).unwrap();
                assert_eq!(poly.constant(), secret);
                assert_eq!(poly.coefficients().len(), k);
                for subset in v.shares().iter().copied().combinations(k) {
                    assert_eq!(reconstruct(&params, &subset).unwrap(), secret);
                }
            }
        }
    }

    #[test]
    fn lagrange_coefficients_are_nonzero() {
        let f = PrimeField::new(31).unwrap();
        let xs: Vec<_> = (1..=8).map(|x| f.elem(x)).collect();
        for subset in xs.iter().copied().combinations(5) {
            assert!(lagrange_coefficients(&subset).unwrap().iter().all(|b| !b.is_zero()));
        }
    }

    #[test]
    fn single_share_is_uniform_for_each_secret() {
        // every polynomial 5 + a x for a in F_13: each share ordinate takes every value once
        let f = p13();
        let params = ThresholdParams::new(2, 3, f).unwrap();
        for s in 0..13 {
            let mut counts = [[0u32; 13]; 3];
            for a in 0..13 {
                let poly = Polynomial::new(vec![f.elem(s), f.elem(a)]).unwrap();
                for (i, sh) in shares_from_polynomial(&params, &poly).unwrap().shares().iter().enumerate() {
                    counts[i][sh.y.value() as usize] += 1;
                }
            }
            assert!(counts.iter().all(|c| c.iter().all(|&k| k == 1)));
        }
    }

    proptest! {
        #[test]
        fn reconstruction_is_linear(ys in prop::collection::vec(0u64..101, 4), zs in prop::collection::vec(0u64..101, 4)) {
            let f = PrimeField::new(101).unwrap();
            let params = ThresholdParams::new(4, 6, f).unwrap();
            let mk = |v: &[u64]| -> Vec<Share> {
                v.iter().enumerate().map(|(i, &y)| share(f, i as u64 + 2, y)).collect()
            };
            let sum: Vec<u64> = ys.iter().zip(&zs).map(|(a, b)| a + b).collect();
            let lhs = reconstruct(&params, &mk(&sum)).unwrap();
            let rhs = reconstruct(&params, &mk(&ys)).unwrap() + reconstruct(&params, &mk(&zs)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
