//! Cohen-Lenstra measures: the normalizing constants `F_u`, per-class
//! masses, Hall sums and the certified total mass.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use crate::error::{Error, Result};
use crate::groups::{check_prime, AbelianPGroup};
use crate::numerics::{ln_u64, CertifiedValue, Interval};
use crate::partitions::{for_each_partition, partition_counts};
use crate::series::{
    level_tail_bound, p_pow_neg, sum_levels, AutLogs, Exponent, LevelTerms,
};

/// Largest order exponent `N` any summation will enumerate up to.
pub const MAX_ORDER_EXPONENT: u32 = 60;

/// The unit rank `u` of a Cohen-Lenstra measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UnitRank {
    Integral(u32),
    /// Extended mode: any real `u > -1`.
    Real(f64),
}

impl UnitRank {
    /// Classifies `u`: nonnegative integers become [`UnitRank::Integral`].
    pub fn from_f64(u: f64) -> Result<Self> {
        if !u.is_finite() || u <= -1.0 {
            return Err(Error::InvalidParameter(format!(
                "unit rank must be a finite real > -1, got {u}"
            )));
        }
        if u >= 0.0 && u.fract() == 0.0 && u <= f64::from(u16::MAX) {
            Ok(UnitRank::Integral(u as u32))
        } else {
            Ok(UnitRank::Real(u))
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            UnitRank::Integral(u) => f64::from(u),
            UnitRank::Real(u) => u,
        }
    }

    pub fn is_integral(&self) -> bool {
        matches!(self, UnitRank::Integral(_))
    }

    pub(crate) fn interval(&self) -> Interval {
        Interval::point(self.value())
    }

    /// `u + 1` as an interval.
    pub(crate) fn kappa(&self) -> Interval {
        self.interval() + Interval::ONE
    }
}

/// Parameters `(p, u)` of the measure `ν^u_CL`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CLParams {
    p: u32,
    u: UnitRank,
}

impl CLParams {
    pub fn new(p: u32, u: UnitRank) -> Result<Self> {
        check_prime(p)?;
        if let UnitRank::Real(x) = u {
            if !x.is_finite() || x <= -1.0 {
                return Err(Error::InvalidParameter(format!(
                    "unit rank must be a finite real > -1, got {x}"
                )));
            }
        }
        Ok(CLParams { p, u })
    }

    pub fn integral(p: u32, u: u32) -> Result<Self> {
        Self::new(p, UnitRank::Integral(u))
    }

    pub fn from_f64(p: u32, u: f64) -> Result<Self> {
        Self::new(p, UnitRank::from_f64(u)?)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn u(&self) -> UnitRank {
        self.u
    }
}

/// Enclosure of `p^{-(u + shift)}`.
pub(crate) fn p_pow_neg_u(params: &CLParams, shift: i64) -> Interval {
    p_pow_neg(params.p, Exponent::affine(params.u.value(), 1, shift))
}

/// Smallest depth `J ≥ 1` with `p^{-u-J}/(p-1) < tol`.
pub fn fu_depth(params: &CLParams, tol: f64) -> Result<u32> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let pm1 = Interval::point(f64::from(params.p - 1));
    for j in 1..=4096u32 {
        let bound = p_pow_neg_u(params, i64::from(j)).checked_div(pm1)?;
        if bound.hi() < tol {
            return Ok(j);
        }
    }
    Err(Error::Refused(format!("no product depth reaches tolerance {tol}")))
}

/// Enclosure of `F_u = ∏_{i ≥ 1} (1 - p^{-u-i})` from the first `depth`
/// factors.
///
/// The omitted factors lie in `[exp(-p^{-u-J} / ((p-1)(1 - p^{-u-J-1}))), 1]`
/// by `log(1 - x) ≥ -x/(1 - x)`.
pub fn normalizing_constant(params: &CLParams, depth: u32) -> Result<Interval> {
    if depth == 0 {
        return Err(Error::InvalidParameter("product depth must be >= 1".into()));
    }
    let mut prod = Interval::ONE;
    for i in 1..=i64::from(depth) {
        prod = prod * (Interval::ONE - p_pow_neg_u(params, i));
    }
    let last = p_pow_neg_u(params, i64::from(depth));
    let next = p_pow_neg_u(params, i64::from(depth) + 1);
    let pm1 = Interval::point(f64::from(params.p - 1));
    let omitted = last.checked_div(pm1 * (Interval::ONE - next))?;
    let lower = prod * (-omitted).exp();
    Interval::new(lower.lo(), prod.hi().min(1.0))
}

/// The a-priori bracket `[(1 - p^{-k})^{p/(p-1)}, 1]` for `∏_{j ≥ k} (1 - p^{-j})`,
/// at `k = u + 1`.
pub fn fu_bracket(params: &CLParams) -> Result<Interval> {
    let x = p_pow_neg_u(params, 1);
    let p = Interval::point(f64::from(params.p));
    let power = p.checked_div(p - Interval::ONE)?;
    let lo = ((Interval::ONE - x).ln()? * power).exp();
    Interval::new(lo.lo(), 1.0)
}

/// Enclosure of `ν^u_CL(A) = F_u / (#A^u · #Aut A)`.
pub fn cl_measure(params: &CLParams, group: &AbelianPGroup, depth: u32) -> Result<Interval> {
    if group.p() != params.p {
        return Err(Error::InvalidParameter(format!(
            "group is a {}-group but the measure is for p = {}",
            group.p(),
            params.p
        )));
    }
    let f = normalizing_constant(params, depth)?;
    if group.is_trivial() {
        return Ok(f);
    }
    match params.u {
        UnitRank::Integral(u) => {
            let denom = group.order().pow(u) * group.aut_order();
            Ok(f * Interval::recip_biguint(&denom)?)
        }
        UnitRank::Real(u) => {
            let n = f64::from(group.order_exponent());
            let order_pow = (Interval::point(u) * Interval::point(n) * ln_u64(u64::from(params.p)))
                .exp();
            let denom = order_pow * Interval::from_biguint(&group.aut_order());
            f.checked_div(denom)
        }
    }
}

/// Exact partial Hall sums over all classes with `#A ≤ p^N`:
/// `(Σ 1/#Aut A, Σ_{n ≤ N} π(n)/p^n)`.
pub fn hall_sum_partial(p: u32, max_order_exponent: u32) -> Result<(BigRational, BigRational)> {
    check_prime(p)?;
    let counts = partition_counts(max_order_exponent);
    let mut by_order = BigRational::zero();
    for (n, count) in counts.iter().enumerate() {
        let pn = BigInt::from(p).pow(n as u32);
        by_order += BigRational::new(BigInt::from(count.clone()), pn);
    }
    let mut by_aut = BigRational::zero();
    for n in 0..=max_order_exponent {
        // sum the level over a common denominator before reducing
        let mut level = BigRational::zero();
        for_each_partition(n, |parts| {
            let aut = crate::groups::aut_order_of_parts(p, parts);
            level += BigRational::new(BigInt::one(), BigInt::from(aut));
        });
        by_aut += level;
    }
    Ok((by_aut, by_order))
}

/// Certified bounds on the omitted parts of the two Hall sums beyond level
/// `N`: `Σ_{#A > p^N} 1/#Aut A ≤ Σ_{n>N} π(n) p^{1-n}` (from
/// `#Aut A ≥ p^{n-1}`) and `Σ_{n>N} π(n) p^{-n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HallTails {
    pub by_aut: f64,
    pub by_order: f64,
}

pub fn hall_tail_bounds(p: u32, max_order_exponent: u32) -> Result<HallTails> {
    check_prime(p)?;
    let base = LevelTerms {
        coeff: Interval::point(f64::from(p)),
        kappa: Interval::ONE,
        a: Interval::ONE,
        b: Interval::ZERO,
    };
    let by_aut = level_tail_bound(p, max_order_exponent, &base)?;
    let by_order = level_tail_bound(
        p,
        max_order_exponent,
        &LevelTerms {
            coeff: Interval::ONE,
            ..base
        },
    )?;
    Ok(HallTails { by_aut, by_order })
}

/// Terms bounding `ν^u_CL` mass per class at level `n`:
/// `ν(A) ≤ F_u · p^{1 - (u+1) n}`.
pub(crate) fn mass_tail_terms(params: &CLParams, f: Interval) -> LevelTerms {
    LevelTerms {
        coeff: f * Interval::point(f64::from(params.p)),
        kappa: params.u.kappa(),
        a: Interval::ONE,
        b: Interval::ZERO,
    }
}

/// Shared per-class evaluation data for summations.
pub(crate) struct ClassSums {
    pub(crate) logs: AutLogs,
    pub(crate) u: Interval,
}

impl ClassSums {
    pub(crate) fn new(params: &CLParams, max_order_exponent: u32) -> Self {
        ClassSums {
            logs: AutLogs::new(params.p, max_order_exponent.max(1)),
            u: params.u.interval(),
        }
    }

    /// `ln(#A^u · #Aut A)`.
    pub(crate) fn ln_weight(&self, n: u32, parts: &[u32]) -> Interval {
        let ln_aut = self.logs.ln_aut(parts);
        if n == 0 {
            return ln_aut;
        }
        self.u * Interval::point(f64::from(n)) * self.logs.ln_p() + ln_aut
    }
}

pub(crate) fn check_order_exponent(max_order_exponent: u32) -> Result<()> {
    if max_order_exponent > MAX_ORDER_EXPONENT {
        return Err(Error::Refused(format!(
            "order exponent {max_order_exponent} exceeds the enumeration limit {MAX_ORDER_EXPONENT}"
        )));
    }
    Ok(())
}

/// Certified enclosure of the total mass `Σ_A ν^u_CL(A)`, which is 1.
///
/// Classes with `#A ≤ p^N` are summed; the remaining mass is bounded by
/// `F_u Σ_{n>N} π(n) p^{1-(u+1)n}`.
pub fn total_mass(params: &CLParams, max_order_exponent: u32, depth: u32) -> Result<CertifiedValue> {
    if max_order_exponent == 0 {
        return Err(Error::InvalidParameter(
            "order exponent must be >= 1".into(),
        ));
    }
    check_order_exponent(max_order_exponent)?;
    let f = normalizing_constant(params, depth)?;
    let tail = level_tail_bound(params.p, max_order_exponent, &mass_tail_terms(params, f))?;
    let sums = ClassSums::new(params, max_order_exponent);
    let partial = sum_levels(0..=max_order_exponent, Interval::ZERO, |n, parts| {
        f * (-sums.ln_weight(n, parts)).exp()
    });
    Ok(CertifiedValue::new(
        partial + Interval::new(0.0, tail)?,
        max_order_exponent,
        tail,
    ))
}

/// Truncation depths `(J, N)` for a target tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Depths {
    /// Number of factors of the `F_u` product.
    pub product_depth: u32,
    /// Largest order exponent summed exactly.
    pub max_order_exponent: u32,
}

/// `J` minimal with `p^{-u-J}/(p-1) < ε/4`; `N` minimal with mass tail `< ε/2`.
pub fn auto_depth(params: &CLParams, eps: f64) -> Result<Depths> {
    let product_depth = fu_depth(params, eps / 4.0)?;
    let f = normalizing_constant(params, product_depth)?;
    let terms = mass_tail_terms(params, f);
    for n in 1..=MAX_ORDER_EXPONENT {
        if level_tail_bound(params.p, n, &terms)? < eps / 2.0 {
            return Ok(Depths {
                product_depth,
                max_order_exponent: n,
            });
        }
    }
    Err(Error::Refused(format!(
        "mass tail does not fall below {} by order exponent {MAX_ORDER_EXPONENT}",
        eps / 2.0
    )))
}
