//! Arithmetic in `Z_p` for odd primes `p < 2^31`.
//!
//! A [`PrimeField`] is a validated modulus; a [`FieldElement`] carries its value and
//! the modulus it lives in. Mixing elements of different fields is a usage error: the
//! `checked_*` methods report it, the operator impls panic on it.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::{Error, Result};

/// Largest modulus accepted. Products of two residues fit in a `u64`.
pub const MAX_MODULUS: u64 = 1 << 31;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeField {
    p: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    p: u64,
}

/// Deterministic Miller-Rabin; the witness set {2, 3, 5, 7} is exact below 3 215 031 751.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13] {
        if n == small {
            return true;
        }
        if n.is_multiple_of(small) {
            return false;
        }
    }
    if n >= 3_215_031_751 {
        // outside the range the witness set is proven for
        let mut d = 17;
        while d * d <= n {
            if n.is_multiple_of(d) {
                return false;
            }
            d += 2;
        }
        return true;
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = x * x % n;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// Distinct prime divisors of `n` in increasing order, by trial division.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !(3..MAX_MODULUS).contains(&p) || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(self) -> u64 {
        self.p
    }

    /// The residue class of `v`.
    pub fn elem(self, v: u64) -> FieldElement {
        FieldElement {
            value: v % self.p,
            p: self.p,
        }
    }

    pub fn from_i64(self, v: i64) -> FieldElement {
        self.elem(v.rem_euclid(self.p as i64) as u64)
    }

    pub fn zero(self) -> FieldElement {
        self.elem(0)
    }

    pub fn one(self) -> FieldElement {
        self.elem(1)
    }

    pub fn elements(self) -> impl Iterator<Item = FieldElement> {
        (0..self.p).map(move |v| self.elem(v))
    }

    /// Distinct primes dividing `p - 1`.
    pub fn group_order_primes(self) -> Vec<u64> {
        prime_divisors(self.p - 1)
    }

    /// All generators of the multiplicative group, in increasing value order.
    pub fn primitive_roots(self) -> Vec<FieldElement> {
        let primes = self.group_order_primes();
        (1..self.p)
            .filter(|&a| is_generator(a, self.p, &primes))
            .map(|a| self.elem(a))
            .collect()
    }

    pub fn smallest_primitive_root(self) -> FieldElement {
        let primes = self.group_order_primes();
        let a = (1..self.p)
            .find(|&a| is_generator(a, self.p, &primes))
            .expect("the multiplicative group of a prime field is cyclic");
        self.elem(a)
    }
}

fn is_generator(a: u64, p: u64, primes: &[u64]) -> bool {
    !a.is_multiple_of(p) && primes.iter().all(|&r| pow_mod(a, (p - 1) / r, p) != 1)
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

impl FieldElement {
    pub fn value(self) -> u64 {
        self.value
    }

    pub fn field(self) -> PrimeField {
        PrimeField { p: self.p }
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn same_field(self, other: FieldElement) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.p, other.p))
        }
    }

    pub fn checked_add(self, rhs: FieldElement) -> Result<FieldElement> {
        self.same_field(rhs)?;
        Ok(self.field().elem(self.value + rhs.value))
    }

    pub fn checked_sub(self, rhs: FieldElement) -> Result<FieldElement> {
        self.same_field(rhs)?;
        Ok(self.field().elem(self.value + self.p - rhs.value))
    }

    pub fn checked_mul(self, rhs: FieldElement) -> Result<FieldElement> {
        self.same_field(rhs)?;
        Ok(self.field().elem(self.value * rhs.value))
    }

    pub fn checked_div(self, rhs: FieldElement) -> Result<FieldElement> {
        self.checked_mul(rhs.invert()?)
    }

    /// Multiplicative inverse via Fermat: `a^(p-2)`.
    pub fn invert(self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::domain("zero has no multiplicative inverse"));
        }
        Ok(self.pow_unchecked(self.p - 2))
    }

    /// Square-and-multiply exponentiation. `0^0` is rejected.
    pub fn pow(self, e: u64) -> Result<FieldElement> {
        if self.is_zero() && e == 0 {
            return Err(Error::domain("0^0 is undefined"));
        }
        Ok(self.pow_unchecked(e))
    }

    pub(crate) fn pow_unchecked(self, e: u64) -> FieldElement {
        FieldElement {
            value: pow_mod(self.value, e, self.p),
            p: self.p,
        }
    }

    /// Euler's criterion.
    pub fn is_quadratic_residue(self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::domain("quadratic character of zero is undefined"));
        }
        Ok(self.pow_unchecked((self.p - 1) / 2).value == 1)
    }

    /// True iff the multiplicative order of `self` is `p - 1`.
    pub fn is_primitive(self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::domain("zero has no multiplicative order"));
        }
        Ok(is_generator(
            self.value,
            self.p,
            &self.field().group_order_primes(),
        ))
    }

    /// Multiplicative order, by stepping through powers. Test-scale fields only.
    pub fn multiplicative_order(self) -> Result<u64> {
        if self.is_zero() {
            return Err(Error::domain("zero has no multiplicative order"));
        }
        let mut x = self;
        let mut order = 1;
        while x.value != 1 {
            x = x * self;
            order += 1;
        }
        Ok(order)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

fn expect_same(a: FieldElement, b: FieldElement) {
    assert!(
        a.p == b.p,
        "field mismatch: p = {} and p = {}",
        a.p,
        b.p
    );
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        expect_same(self, rhs);
        self.field().elem(self.value + rhs.value)
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        expect_same(self, rhs);
        self.field().elem(self.value + self.p - rhs.value)
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        expect_same(self, rhs);
        self.field().elem(self.value * rhs.value)
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.field().elem(self.p - self.value)
    }
}
