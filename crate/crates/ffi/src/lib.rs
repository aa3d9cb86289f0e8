//! C ABI for `nmshare`.
//!
//! Objects are opaque heap handles released with their `*_free` function. Every fallible
//! call returns an [`NmsStatus`]; on failure the message is available through
//! [`nms_last_error`] on the same thread. Outputs are written only on success.
//! Panics are caught at the boundary and reported as [`NmsStatus::Panic`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::CStr;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use libc::{c_char, size_t};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nmshare::cyclotomic::{cyclotomic_family, ConstructionParams};
use nmshare::diff_family::{verify_cedf, verify_scedf, verify_sedf};
use nmshare::formats::{parse_family, AnyScheme};
use nmshare::shamir::{deal, reconstruct};
use nmshare::{
    AmdCode, ComposedScheme, Error, PlainShamir, PrimeField, Recovery, SetFamily, Share,
    SharingScheme, ThresholdParams, VerificationReport,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NmsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotPrime = 3,
    OutOfRange = 4,
    InvalidFamily = 5,
    Parse = 6,
    Domain = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NmsGame {
    Weak = 0,
    Strong = 1,
    CircularWeak = 2,
    CircularStrong = 3,
}

/// Outcome of a difference-family check. `lambda` is 0 when `valid` is false.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NmsReport {
    pub valid: bool,
    pub lambda: u64,
}

/// An ordered family of disjoint equal-size subsets of `Z_n`.
pub struct NmsFamily(SetFamily);

/// A threshold scheme, plain or AMD-composed.
pub struct NmsScheme(AnyScheme);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> NmsStatus {
    match e {
        Error::NotPrime(_) => NmsStatus::NotPrime,
        Error::OutOfRange { .. } => NmsStatus::OutOfRange,
        Error::Overlap(_) | Error::InvalidFamily(_) => NmsStatus::InvalidFamily,
        Error::Parse(_) => NmsStatus::Parse,
        Error::Domain(_) => NmsStatus::Domain,
        _ => NmsStatus::InvalidArgument,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
    Buffer(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> NmsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => NmsStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("{name} is null"));
            NmsStatus::NullPointer
        }
        Ok(Err(Failure::Buffer(needed))) => {
            set_error(format!("buffer too small, need {needed} bytes"));
            NmsStatus::BufferTooSmall
        }
        Err(_) => {
            set_error("internal panic".into());
            NmsStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(name))
}

unsafe fn out<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(name))
}

unsafe fn array<'a, T>(p: *const T, len: usize, name: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn array_mut<'a, T>(p: *mut T, len: usize, name: &'static str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

/// Copies `text` plus a terminating NUL into `buf`; `needed` receives the full size.
unsafe fn write_c_string(text: &str, buf: *mut c_char, cap: size_t, needed: *mut size_t) -> Result<(), Failure> {
    let size = text.len() + 1;
    if let Some(needed) = needed.as_mut() {
        *needed = size;
    }
    if cap < size || buf.is_null() {
        return Err(Failure::Buffer(size));
    }
    ptr::copy_nonoverlapping(text.as_ptr(), buf.cast::<u8>(), text.len());
    *buf.add(text.len()) = 0;
    Ok(())
}

fn report(r: VerificationReport) -> NmsReport {
    NmsReport {
        valid: r.valid,
        lambda: r.lambda.unwrap_or(0),
    }
}

/// Copies the calling thread's last error message, NUL-terminated, into `buf`.
/// Returns the size needed including the NUL; nothing is written if `cap` is smaller.
#[no_mangle]
pub unsafe extern "C" fn nms_last_error(buf: *mut c_char, cap: size_t) -> size_t {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let size = msg.len() + 1;
        if !buf.is_null() && cap >= size {
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), msg.len());
            *buf.add(msg.len()) = 0;
        }
        size
    })
}

/// Builds a family of `m` sets of size `l` from `elements`, row-major (`m * l` values).
#[no_mangle]
pub unsafe extern "C" fn nms_family_new(
    n: u64,
    elements: *const u64,
    m: size_t,
    l: size_t,
    family: *mut *mut NmsFamily,
) -> NmsStatus {
    guard(|| {
        let family = out(family, "family")?;
        let total = m.checked_mul(l).ok_or(Error::InvalidFamily("m * l overflows".into()))?;
        let elements = array(elements, total, "elements")?;
        let sets = if l == 0 { vec![vec![]; m] } else { elements.chunks(l).map(<[u64]>::to_vec).collect() };
        *family = Box::into_raw(Box::new(NmsFamily(SetFamily::new(n, sets)?)));
        Ok(())
    })
}

/// Parses `{"n": .., "sets": [[..], ..]}`.
#[no_mangle]
pub unsafe extern "C" fn nms_family_from_json(json: *const c_char, family: *mut *mut NmsFamily) -> NmsStatus {
    guard(|| {
        let family = out(family, "family")?;
        let text = CStr::from_ptr(deref(json, "json")?)
            .to_str()
            .map_err(|e| Error::Parse(e.to_string()))?;
        *family = Box::into_raw(Box::new(NmsFamily(parse_family(text)?)));
        Ok(())
    })
}

/// Writes the family as JSON. `needed`, if not null, receives the required size.
#[no_mangle]
pub unsafe extern "C" fn nms_family_to_json(
    family: *const NmsFamily,
    buf: *mut c_char,
    cap: size_t,
    needed: *mut size_t,
) -> NmsStatus {
    guard(|| {
        let text = serde_json::to_string(&deref(family, "family")?.0).map_err(Error::from)?;
        write_c_string(&text, buf, cap, needed)
    })
}

/// Shape of a family: group order, number of sets, set size.
#[no_mangle]
pub unsafe extern "C" fn nms_family_shape(
    family: *const NmsFamily,
    n: *mut u64,
    m: *mut size_t,
    l: *mut size_t,
) -> NmsStatus {
    guard(|| {
        let f = &deref(family, "family")?.0;
        let (n, m, l) = (out(n, "n")?, out(m, "m")?, out(l, "l")?);
        (*n, *m, *l) = (f.order(), f.num_sets(), f.set_size());
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn nms_family_free(family: *mut NmsFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

#[no_mangle]
pub unsafe extern "C" fn nms_verify_cedf(family: *const NmsFamily, c: size_t, result: *mut NmsReport) -> NmsStatus {
    guard(|| {
        let r = verify_cedf(&deref(family, "family")?.0, c)?;
        *out(result, "result")? = report(r);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn nms_verify_sedf(
    family: *const NmsFamily,
    shifts: *const size_t,
    count: size_t,
    result: *mut NmsReport,
) -> NmsStatus {
    guard(|| {
        let r = verify_sedf(&deref(family, "family")?.0, array(shifts, count, "shifts")?)?;
        *out(result, "result")? = report(r);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn nms_verify_scedf(family: *const NmsFamily, c: size_t, result: *mut NmsReport) -> NmsStatus {
    guard(|| {
        let r = verify_scedf(&deref(family, "family")?.0, c)?;
        *out(result, "result")? = report(r);
        Ok(())
    })
}

/// Cyclotomic family for `q = m l^2 + 1` and primitive root `alpha`.
#[no_mangle]
pub unsafe extern "C" fn nms_cyclotomic_family(
    q: u64,
    m: size_t,
    l: size_t,
    alpha: u64,
    family: *mut *mut NmsFamily,
) -> NmsStatus {
    guard(|| {
        let family = out(family, "family")?;
        let f = cyclotomic_family(&ConstructionParams::new(q, m, l, alpha)?)?;
        *family = Box::into_raw(Box::new(NmsFamily(f)));
        Ok(())
    })
}

/// Exact advantage as a reduced fraction. `c` is ignored for the non-circular games.
#[no_mangle]
pub unsafe extern "C" fn nms_advantage(
    family: *const NmsFamily,
    game: NmsGame,
    c: size_t,
    num: *mut u64,
    den: *mut u64,
) -> NmsStatus {
    guard(|| {
        let code = AmdCode::new(deref(family, "family")?.0.clone());
        let r = match game {
            NmsGame::Weak => code.weak_advantage(),
            NmsGame::Strong => code.strong_advantage(),
            NmsGame::CircularWeak => code.circular_weak_advantage(c)?,
            NmsGame::CircularStrong => code.circular_strong_advantage(c)?,
        };
        let (num, den) = (out(num, "num")?, out(den, "den")?);
        (*num, *den) = (*r.epsilon.numer(), *r.epsilon.denom());
        Ok(())
    })
}

/// Shamir-shares `secret` in `F_p`; writes the `n` ordinates for `x = 1..n` to `ys`.
#[no_mangle]
pub unsafe extern "C" fn nms_shamir_deal(
    p: u64,
    k: size_t,
    n: size_t,
    secret: u64,
    seed: u64,
    ys: *mut u64,
    ys_len: size_t,
) -> NmsStatus {
    guard(|| {
        let params = ThresholdParams::new(k, n, PrimeField::new(p)?)?;
        if secret >= p {
            return Err(Error::OutOfRange { name: "secret", value: secret, expected: format!("secret < {p}") }.into());
        }
        if ys_len != n {
            return Err(Error::InvalidParams(format!("ys holds {ys_len} values, need {n}")).into());
        }
        let ys = array_mut(ys, n, "ys")?;
        let (shares, _) = deal(&params, params.field().elem(secret), &mut ChaCha8Rng::seed_from_u64(seed))?;
        for (y, s) in ys.iter_mut().zip(shares.shares()) {
            *y = s.y.value();
        }
        Ok(())
    })
}

unsafe fn read_shares(params: &ThresholdParams, xs: *const u64, ys: *const u64, count: usize) -> Result<Vec<Share>, Failure> {
    let field = params.field();
    let (xs, ys) = (array(xs, count, "xs")?, array(ys, count, "ys")?);
    xs.iter()
        .zip(ys)
        .map(|(&x, &y)| {
            if y >= field.modulus() || x >= field.modulus() {
                return Err(Error::OutOfRange { name: "share", value: x.max(y), expected: format!("< {}", field.modulus()) }.into());
            }
            Ok(Share { x: field.elem(x), y: field.elem(y) })
        })
        .collect()
}

/// Interpolates the secret from the first `k` of `count` shares.
#[no_mangle]
pub unsafe extern "C" fn nms_shamir_reconstruct(
    p: u64,
    k: size_t,
    n: size_t,
    xs: *const u64,
    ys: *const u64,
    count: size_t,
    secret: *mut u64,
) -> NmsStatus {
    guard(|| {
        let params = ThresholdParams::new(k, n, PrimeField::new(p)?)?;
        let shares = read_shares(&params, xs, ys, count)?;
        *out(secret, "secret")? = reconstruct(&params, &shares)?.value();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn nms_scheme_plain(p: u64, k: size_t, n: size_t, scheme: *mut *mut NmsScheme) -> NmsStatus {
    guard(|| {
        let scheme = out(scheme, "scheme")?;
        let s = PlainShamir::new(ThresholdParams::new(k, n, PrimeField::new(p)?)?);
        *scheme = Box::into_raw(Box::new(NmsScheme(AnyScheme::Plain(s))));
        Ok(())
    })
}

/// Shamir sharing of secrets `0..m` encoded with the AMD code on `family`; shares live
/// in `F_p` with `p` the family's (prime) group order.
#[no_mangle]
pub unsafe extern "C" fn nms_scheme_composed(
    family: *const NmsFamily,
    k: size_t,
    n: size_t,
    scheme: *mut *mut NmsScheme,
) -> NmsStatus {
    guard(|| {
        let scheme = out(scheme, "scheme")?;
        let f = deref(family, "family")?.0.clone();
        let params = ThresholdParams::new(k, n, PrimeField::new(f.order())?)?;
        let s = ComposedScheme::new(AmdCode::new(f), params)?;
        *scheme = Box::into_raw(Box::new(NmsScheme(AnyScheme::Composed(s))));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn nms_scheme_free(scheme: *mut NmsScheme) {
    if !scheme.is_null() {
        drop(Box::from_raw(scheme));
    }
}

/// Number of secrets; valid secrets are `0..count`.
#[no_mangle]
pub unsafe extern "C" fn nms_scheme_secret_count(scheme: *const NmsScheme, count: *mut u64) -> NmsStatus {
    guard(|| {
        *out(count, "count")? = deref(scheme, "scheme")?.0.secret_count();
        Ok(())
    })
}

/// Shares `secret`; writes the `n` ordinates for `x = 1..n` to `ys`.
#[no_mangle]
pub unsafe extern "C" fn nms_scheme_share(
    scheme: *const NmsScheme,
    secret: u64,
    seed: u64,
    ys: *mut u64,
    ys_len: size_t,
) -> NmsStatus {
    guard(|| {
        let s = &deref(scheme, "scheme")?.0;
        let n = s.params().participants();
        if ys_len != n {
            return Err(Error::InvalidParams(format!("ys holds {ys_len} values, need {n}")).into());
        }
        let ys = array_mut(ys, n, "ys")?;
        let shares = s.share(secret, &mut ChaCha8Rng::seed_from_u64(seed))?;
        for (y, sh) in ys.iter_mut().zip(shares.shares()) {
            *y = sh.y.value();
        }
        Ok(())
    })
}

/// Recovers from the first `k` of `count` shares. On detected tampering `detected` is
/// set and `secret` receives the invalid interpolated value.
#[no_mangle]
pub unsafe extern "C" fn nms_scheme_recover(
    scheme: *const NmsScheme,
    xs: *const u64,
    ys: *const u64,
    count: size_t,
    secret: *mut u64,
    detected: *mut bool,
) -> NmsStatus {
    guard(|| {
        let s = &deref(scheme, "scheme")?.0;
        let shares = read_shares(s.params(), xs, ys, count)?;
        let (value, flag) = match s.recover(&shares)? {
            Recovery::Secret(v) => (v, false),
            Recovery::ManipulationDetected { encoded } => (encoded, true),
        };
        let (secret, detected) = (out(secret, "secret")?, out(detected, "detected")?);
        (*secret, *detected) = (value, flag);
        Ok(())
    })
}
