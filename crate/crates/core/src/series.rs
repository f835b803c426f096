//! Level-by-level summation over isomorphism classes and certified tail
//! bounds for the omitted levels.

use std::ops::{Add, RangeInclusive};
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{ln_u64, pi, Interval};
use crate::partitions::{for_each_partition, partition_counts};

/// Highest level used by the exact part of a tail bound.
pub const MAX_TAIL_LEVEL: u32 = 4096;

fn partition_count_enclosures() -> &'static [Interval] {
    static TABLE: OnceLock<Vec<Interval>> = OnceLock::new();
    TABLE.get_or_init(|| {
        partition_counts(MAX_TAIL_LEVEL)
            .iter()
            .map(Interval::from_biguint)
            .collect()
    })
}

/// Enclosure of `c = π·sqrt(2/3)`, with `π(n) ≤ exp(c·sqrt(n))` for all `n`.
pub(crate) fn hardy_ramanujan_constant() -> Interval {
    let two_thirds = Interval::point(2.0)
        .checked_div(Interval::point(3.0))
        .expect("nonzero");
    pi() * two_thirds.sqrt().expect("positive")
}

/// A real exponent `t` for powers `p^{-t}`.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Exponent {
    Int(i64),
    Real(Interval),
}

impl Exponent {
    /// `u·scale + shift` for a unit rank given as a float.
    pub(crate) fn affine(u: f64, scale: i64, shift: i64) -> Exponent {
        if u.fract() == 0.0 && u.abs() < 1e6 {
            Exponent::Int(u as i64 * scale + shift)
        } else {
            Exponent::Real(
                Interval::point(u) * Interval::point(scale as f64) + Interval::point(shift as f64),
            )
        }
    }
}

/// Enclosure of `p^{-t}`.
pub(crate) fn p_pow_neg(p: u32, t: Exponent) -> Interval {
    match t {
        Exponent::Int(k) if k.unsigned_abs() <= 1000 => {
            let pk = BigInt::from(p).pow(k.unsigned_abs() as u32);
            let r = if k >= 0 {
                BigRational::new(BigInt::one(), pk)
            } else {
                BigRational::from_integer(pk)
            };
            Interval::from_ratio(&r)
        }
        Exponent::Int(k) => (-(Interval::point(k as f64) * ln_u64(u64::from(p)))).exp(),
        Exponent::Real(t) => (-(t * ln_u64(u64::from(p)))).exp(),
    }
}

/// Fast enclosure of `ln #Aut A` from the part sequence, using a table of
/// `Σ_{k ≤ m} ln(p^k - 1)`.
pub(crate) struct AutLogs {
    ln_p: Interval,
    cumulative: Vec<Interval>,
}

impl AutLogs {
    pub(crate) fn new(p: u32, max_multiplicity: u32) -> Self {
        let mut cumulative = Vec::with_capacity(max_multiplicity as usize + 1);
        cumulative.push(Interval::ZERO);
        let mut pk = BigUint::one();
        let mut acc = Interval::ZERO;
        for _ in 1..=max_multiplicity {
            pk *= p;
            let term = if pk == BigUint::from(2u32) {
                // ln(2 - 1) = 0
                Interval::ZERO
            } else {
                Interval::ln_biguint(&(&pk - 1u32)).expect("positive")
            };
            acc = acc + term;
            cumulative.push(acc);
        }
        AutLogs {
            ln_p: ln_u64(u64::from(p)),
            cumulative,
        }
    }

    pub(crate) fn ln_p(&self) -> Interval {
        self.ln_p
    }

    pub(crate) fn ln_aut(&self, parts: &[u32]) -> Interval {
        let mut size = 0u64;
        let mut n_lambda = 0u64;
        let mut cleared = 0u64;
        let mut acc = Interval::ZERO;
        let mut i = 0;
        while i < parts.len() {
            let mut j = i;
            while j < parts.len() && parts[j] == parts[i] {
                size += u64::from(parts[j]);
                n_lambda += j as u64 * u64::from(parts[j]);
                j += 1;
            }
            let m = (j - i) as u64;
            cleared += m * (m + 1) / 2;
            acc = acc + self.cumulative[m as usize];
            i = j;
        }
        let e = size + 2 * n_lambda - cleared;
        if e == 0 {
            acc
        } else {
            acc + Interval::point(e as f64) * self.ln_p
        }
    }
}

/// Sums `term(n, parts)` over every partition of every level in `levels`.
///
/// Levels are evaluated in parallel; each level is accumulated in canonical
/// partition order and the level sums are then added in ascending order, so
/// the result does not depend on the worker count.
pub(crate) fn sum_levels<T, F>(levels: RangeInclusive<u32>, zero: T, term: F) -> T
where
    T: Copy + Send + Sync + Add<Output = T>,
    F: Fn(u32, &[u32]) -> T + Sync,
{
    let per_level: Vec<T> = levels
        .into_par_iter()
        .map(|n| {
            let mut acc = zero;
            for_each_partition(n, |parts| acc = acc + term(n, parts));
            acc
        })
        .collect();
    per_level.into_iter().fold(zero, |a, b| a + b)
}

/// Terms `coeff · p^{-κ n} · (a + b n)` bounding the contribution of one
/// isomorphism class at level `n`.
#[derive(Debug, Clone, Copy)]
pub struct LevelTerms {
    pub coeff: Interval,
    pub kappa: Interval,
    pub a: Interval,
    pub b: Interval,
}

impl LevelTerms {
    fn at(&self, p_ln: Interval, n: f64) -> Interval {
        let n = Interval::point(n);
        self.coeff * (-(self.kappa * n * p_ln)).exp() * (self.a + self.b * n)
    }
}

/// Certified upper bound on `Σ_{n > level} π(n) · coeff · p^{-κ n} · (a + b n)`.
///
/// Levels up to an adaptively chosen `M` use exact partition counts; beyond
/// `M` the sum is closed geometrically using `π(n) ≤ exp(c sqrt n)`.
pub fn level_tail_bound(p: u32, level: u32, terms: &LevelTerms) -> Result<f64> {
    if terms.kappa.lo() <= 0.0 {
        return Err(Error::Refused(format!(
            "tail decay exponent must be positive, got {}",
            terms.kappa
        )));
    }
    if terms.coeff.lo() < 0.0 || terms.b.lo() < 0.0 {
        return Err(Error::InvalidParameter(
            "tail coefficients must be nonnegative".into(),
        ));
    }
    if terms.coeff.hi() == 0.0 || (terms.a.hi() == 0.0 && terms.b.hi() == 0.0) {
        return Ok(0.0);
    }
    let first = f64::from(level) + 1.0;
    if (terms.a + terms.b * Interval::point(first)).lo() <= 0.0 {
        return Err(Error::Refused(format!(
            "tail terms are not positive beyond level {level}"
        )));
    }

    let ln_p = ln_u64(u64::from(p));
    let c = hardy_ramanujan_constant();
    let decay = (-(terms.kappa * ln_p)).exp();

    // ratio bound for n ≥ m + 1:
    // exp(c/(2 sqrt(m+1))) · p^{-κ} · (1 + b / (a + b(m+1)))
    let ratio_after = |m: u32| -> Result<Interval> {
        let next = Interval::point(f64::from(m) + 1.0);
        let growth = (c.checked_div(Interval::point(2.0) * next.sqrt()?))?.exp();
        let affine = Interval::ONE + terms.b.checked_div(terms.a + terms.b * next)?;
        Ok(growth * decay * affine)
    };

    let mut m = (level + 32).min(MAX_TAIL_LEVEL);
    let mut ratio = ratio_after(m)?;
    while ratio.hi() >= 0.75 && m < MAX_TAIL_LEVEL {
        m = (m * 2).min(MAX_TAIL_LEVEL);
        ratio = ratio_after(m)?;
    }
    if ratio.hi() >= 1.0 {
        return Err(Error::Refused(format!(
            "geometric tail closure fails (ratio {:.6} >= 1 at level {m}); decay p^-κ = {} too slow",
            ratio.hi(),
            decay
        )));
    }

    let counts = partition_count_enclosures();
    let mut exact = Interval::ZERO;
    for n in (level + 1)..=m {
        exact = exact + counts[n as usize] * terms.at(ln_p, f64::from(n));
    }
    let next = Interval::point(f64::from(m) + 1.0);
    let head = (c * next.sqrt()?).exp() * terms.at(ln_p, f64::from(m) + 1.0);
    let closure = head.checked_div(Interval::ONE - ratio)?;
    Ok((exact + closure).hi().max(0.0))
}
