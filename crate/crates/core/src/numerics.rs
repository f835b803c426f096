//! Outward-rounded interval arithmetic over `f64`.
//!
//! Every operation rounds the computed lower endpoint one ulp down and the
//! upper endpoint one ulp up, so the result encloses the exact real result
//! for any reals drawn from the operands. Transcendental functions rely on
//! the platform `ln`/`exp` and widen by two ulps per endpoint.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A closed interval `[lo, hi]` of reals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

fn down(x: f64) -> f64 {
    x.next_down()
}

fn up(x: f64) -> f64 {
    x.next_up()
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::Domain(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    /// The degenerate interval `[x, x]`. Panics on NaN.
    pub fn point(x: f64) -> Self {
        assert!(!x.is_nan(), "NaN interval endpoint");
        Interval { lo: x, hi: x }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        self.lo + 0.5 * (self.hi - self.lo)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Intersection, or `None` when the intervals are disjoint.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// Convex hull of both intervals.
    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Widens both endpoints by `r` (rounded outward).
    pub fn widen(&self, r: f64) -> Interval {
        Interval {
            lo: down(self.lo - r),
            hi: up(self.hi + r),
        }
    }

    /// Smallest float interval containing the rational `r`.
    pub fn from_ratio(r: &BigRational) -> Interval {
        let approx = r.to_f64().unwrap_or_else(|| {
            if r.is_positive() {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }
        });
        let mut lo = approx;
        while lo.is_finite() && exact(lo) > *r {
            lo = down(lo);
        }
        if lo == f64::INFINITY {
            lo = f64::MAX;
        }
        let mut hi = approx;
        while hi.is_finite() && exact(hi) < *r {
            hi = up(hi);
        }
        if hi == f64::NEG_INFINITY {
            hi = f64::MIN;
        }
        Interval { lo, hi }
    }

    pub fn from_biguint(x: &BigUint) -> Interval {
        Self::from_ratio(&BigRational::from_integer(BigInt::from(x.clone())))
    }

    pub fn from_u64(x: u64) -> Interval {
        let f = x as f64;
        if f as u128 == x as u128 {
            Interval::point(f)
        } else if (f as u128) < x as u128 {
            Interval { lo: f, hi: up(f) }
        } else {
            Interval { lo: down(f), hi: f }
        }
    }

    /// Enclosure of `1/x` for a positive integer of any size.
    pub fn recip_biguint(x: &BigUint) -> Result<Interval> {
        if x.is_zero() {
            return Err(Error::Domain("reciprocal of zero".into()));
        }
        let bits = x.bits();
        if bits <= 1000 {
            Ok(Self::from_ratio(&BigRational::new(
                BigInt::one(),
                BigInt::from(x.clone()),
            )))
        } else {
            // x ≥ 2^(bits-1) ≥ 2^999, so 1/x lies in (0, 2^-999].
            Ok(Interval {
                lo: 0.0,
                hi: 2f64.powi(-999),
            })
        }
    }

    /// Enclosure of `ln x` for a positive integer of any size.
    pub fn ln_biguint(x: &BigUint) -> Result<Interval> {
        if x.is_zero() {
            return Err(Error::Domain("logarithm of zero".into()));
        }
        let bits = x.bits();
        if bits <= 1000 {
            return Self::from_biguint(x).ln();
        }
        // x lies in [m·2^s, (m+1)·2^s) with a 64-bit leading chunk m.
        let shift = bits - 64;
        let m = (x >> shift).to_u64().expect("64-bit leading chunk");
        let m_lo = Interval::from_u64(m);
        let m_hi = Interval::from_ratio(&BigRational::from_integer(BigInt::from(m) + 1));
        let s = Interval::point(shift as f64);
        let lo = m_lo.ln()? + s * ln2();
        let hi = m_hi.ln()? + s * ln2();
        Ok(Interval {
            lo: lo.lo,
            hi: hi.hi,
        })
    }

    pub fn recip(self) -> Result<Interval> {
        Interval::ONE.checked_div(self)
    }

    pub fn checked_div(self, rhs: Interval) -> Result<Interval> {
        if rhs.lo <= 0.0 && rhs.hi >= 0.0 {
            return Err(Error::Domain(format!(
                "division by interval [{}, {}] containing zero",
                rhs.lo, rhs.hi
            )));
        }
        let q = [
            self.lo / rhs.lo,
            self.lo / rhs.hi,
            self.hi / rhs.lo,
            self.hi / rhs.hi,
        ];
        Ok(hull4(q))
    }

    /// Natural logarithm.
    pub fn ln(self) -> Result<Interval> {
        if self.lo <= 0.0 {
            return Err(Error::Domain(format!(
                "logarithm of interval with nonpositive lower bound {}",
                self.lo
            )));
        }
        Ok(Interval {
            lo: down(down(self.lo.ln())),
            hi: up(up(self.hi.ln())),
        })
    }

    pub fn exp(self) -> Interval {
        Interval {
            lo: down(down(self.lo.exp())).max(0.0),
            hi: up(up(self.hi.exp())),
        }
    }

    pub fn sqrt(self) -> Result<Interval> {
        if self.lo < 0.0 {
            return Err(Error::Domain("square root of negative interval".into()));
        }
        // sqrt is correctly rounded.
        Ok(Interval {
            lo: down(self.lo.sqrt()).max(0.0),
            hi: up(self.hi.sqrt()),
        })
    }

    pub fn abs(self) -> Interval {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Interval {
                lo: 0.0,
                hi: (-self.lo).max(self.hi),
            }
        }
    }

    /// Integer power. Negative exponents require `0 ∉ self`.
    pub fn powi(self, k: i32) -> Result<Interval> {
        if k < 0 {
            return self.powi(-k)?.recip();
        }
        if k == 0 {
            return Ok(Interval::ONE);
        }
        let odd = k % 2 == 1;
        let base = if odd { self } else { self.abs() };
        let mut acc = Interval::ONE;
        let mut sq = base;
        let mut e = k as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * sq;
            }
            e >>= 1;
            if e > 0 {
                sq = sq * sq;
            }
        }
        if !odd {
            acc.lo = acc.lo.max(0.0);
        }
        Ok(acc)
    }

    /// Clamps the upper endpoint to at most `bound` (used when an a-priori
    /// bound on the enclosed quantity is known).
    pub fn clamp_hi(self, bound: f64) -> Interval {
        Interval {
            lo: self.lo.min(bound),
            hi: self.hi.min(bound),
        }
    }

    pub fn clamp_lo(self, bound: f64) -> Interval {
        Interval {
            lo: self.lo.max(bound),
            hi: self.hi.max(bound),
        }
    }
}

fn exact(x: f64) -> BigRational {
    BigRational::from_f64(x).expect("finite float")
}

fn hull4(v: [f64; 4]) -> Interval {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for x in v {
        // 0·∞ style NaNs cannot arise from finite operands.
        lo = lo.min(x);
        hi = hi.max(x);
    }
    Interval {
        lo: down(lo),
        hi: up(hi),
    }
}

/// Enclosure of `ln 2`.
pub fn ln2() -> Interval {
    Interval {
        lo: down(std::f64::consts::LN_2),
        hi: up(std::f64::consts::LN_2),
    }
}

/// Enclosure of `π`.
pub fn pi() -> Interval {
    Interval {
        lo: down(std::f64::consts::PI),
        hi: up(std::f64::consts::PI),
    }
}

/// Enclosure of `ln p` for a small positive integer.
pub fn ln_u64(p: u64) -> Interval {
    Interval::from_u64(p).ln().expect("ln of positive integer")
}

impl Add for Interval {
    type Output = Interval;

    fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: down(self.lo + rhs.lo),
            hi: up(self.hi + rhs.hi),
        }
    }
}

impl Sub for Interval {
    type Output = Interval;

    fn sub(self, rhs: Interval) -> Interval {
        Interval {
            lo: down(self.lo - rhs.hi),
            hi: up(self.hi - rhs.lo),
        }
    }
}

impl Mul for Interval {
    type Output = Interval;

    fn mul(self, rhs: Interval) -> Interval {
        hull4([
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ])
    }
}

impl Neg for Interval {
    type Output = Interval;

    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl std::iter::Sum for Interval {
    fn sum<I: Iterator<Item = Interval>>(iter: I) -> Interval {
        iter.fold(Interval::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", self.lo, self.hi)
    }
}

/// A certified enclosure together with its truncation bookkeeping.
///
/// `value` always contains the exact quantity: the omitted terms are already
/// folded in. `tail_bound` records how much of the width is due to truncation
/// at order exponent `truncation_level`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifiedValue {
    pub value: Interval,
    pub truncation_level: u32,
    pub tail_bound: f64,
}

impl CertifiedValue {
    pub fn new(value: Interval, truncation_level: u32, tail_bound: f64) -> Self {
        debug_assert!(tail_bound >= 0.0);
        CertifiedValue {
            value,
            truncation_level,
            tail_bound,
        }
    }
}
