//! Independent high-precision oracles shared by the integration tests.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Fixed-point scale: values are integers in units of `2^-SCALE`.
pub const SCALE: u32 = 256;

/// Bound on the oracle's absolute error, in fixed-point units (`2^-200`).
pub fn ln_error() -> BigInt {
    BigInt::one() << (SCALE - 200)
}

pub fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// `floor(q · 2^SCALE)`.
pub fn to_fixed(q: &BigRational) -> BigInt {
    let shifted = q * BigRational::from_integer(BigInt::one() << SCALE);
    shifted.floor().to_integer()
}

/// `atanh(z)` for `0 ≤ z < 1/2`, given `z` in fixed point.
fn atanh_fixed(z: &BigInt) -> BigInt {
    let z2 = (z * z) >> SCALE;
    let mut power = z.clone();
    let mut sum = BigInt::zero();
    let mut k = 1u32;
    while !power.is_zero() {
        sum += &power / BigInt::from(k);
        power = (&power * &z2) >> SCALE;
        k += 2;
    }
    sum
}

pub fn ln2_fixed() -> BigInt {
    let third = to_fixed(&BigRational::new(1.into(), 3.into()));
    atanh_fixed(&third) * 2
}

/// `ln q` in fixed point for rational `q > 0`, via `q = m 2^e`, `m ∈ [1, 2)`
/// and `ln m = 2 atanh((m - 1)/(m + 1))`.
pub fn ln_fixed(q: &BigRational) -> BigInt {
    assert!(q.is_positive(), "ln oracle needs a positive argument");
    let two = BigRational::from_integer(2.into());
    let mut m = q.clone();
    let mut e: i64 = (q.numer().bits() as i64) - (q.denom().bits() as i64);
    if e >= 0 {
        m /= BigRational::from_integer(BigInt::one() << e as u32);
    } else {
        m *= BigRational::from_integer(BigInt::one() << (-e) as u32);
    }
    while m >= two {
        m /= &two;
        e += 1;
    }
    while m < BigRational::one() {
        m *= &two;
        e -= 1;
    }
    let one = BigRational::one();
    let z = (&m - &one) / (&m + &one);
    ln2_fixed() * BigInt::from(e) + atanh_fixed(&to_fixed(&z)) * 2
}

/// Whether `ln q` certainly lies in `[lo, hi]`.
pub fn ln_within(q: &BigRational, lo: f64, hi: f64) -> bool {
    let l = ln_fixed(q);
    let err = ln_error();
    to_fixed(&exact(lo)) <= &l - &err && &l + &err <= to_fixed(&exact(hi))
}

/// Whether `exp(x)` certainly lies in `[lo, hi]`, checked as
/// `ln lo ≤ x ≤ ln hi` (with `lo = 0` accepted on the left).
pub fn exp_within(x: f64, lo: f64, hi: f64) -> bool {
    let xf = to_fixed(&exact(x));
    let err = ln_error();
    let left = lo == 0.0 || ln_fixed(&exact(lo)) + &err <= xf;
    let right = hi > 0.0 && hi.is_finite() && xf <= ln_fixed(&exact(hi)) - &err;
    left && right
}
