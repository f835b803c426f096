//! The Cohen-Lenstra zeta function `ζ_k(s) = Σ_A w_k(A) / #A^s`, its product
//! formula and derivative, and the KL divergence between Cohen-Lenstra
//! measures.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use crate::error::{Error, Result};
use crate::groups::{check_prime, AbelianPGroup};
use crate::measures::{
    check_order_exponent, fu_depth, normalizing_constant, CLParams, ClassSums, UnitRank,
    MAX_ORDER_EXPONENT,
};
use crate::numerics::{ln_u64, CertifiedValue, Interval};
use crate::series::{level_tail_bound, p_pow_neg, sum_levels, Exponent, LevelTerms};

/// Truncation level `k` of the zeta function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZetaLevel {
    Finite(u32),
    /// The `k → ∞` limit, where `w_k(A)` becomes `1/#Aut A`.
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaParams {
    p: u32,
    k: ZetaLevel,
    s: f64,
}

impl ZetaParams {
    pub fn new(p: u32, k: ZetaLevel, s: f64) -> Result<Self> {
        check_prime(p)?;
        if !(s.is_finite() && s > -1.0) {
            return Err(Error::InvalidParameter(format!(
                "zeta evaluation point must be a finite real > -1, got {s}"
            )));
        }
        if k == ZetaLevel::Finite(0) {
            return Err(Error::InvalidParameter("zeta level k must be >= 1".into()));
        }
        Ok(ZetaParams { p, k, s })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> ZetaLevel {
        self.k
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// The Cohen-Lenstra parameters with unit rank `s`.
    fn as_measure(&self) -> Result<CLParams> {
        CLParams::from_f64(self.p, self.s)
    }
}

/// `w_k(A) = (1/#Aut A) ∏_{i=k-r+1}^{k} (1 - p^{-i})` when `k ≥ r = rank A`,
/// and 0 otherwise.
pub fn w_k_weight(group: &AbelianPGroup, k: u32) -> Result<BigRational> {
    if k == 0 {
        return Err(Error::InvalidParameter("zeta level k must be >= 1".into()));
    }
    let r = group.rank() as u32;
    if r > k {
        return Ok(BigRational::zero());
    }
    let p = BigInt::from(group.p());
    let mut w = BigRational::new(BigInt::one(), BigInt::from(group.aut_order()));
    for i in (k - r + 1)..=k {
        let pi = p.clone().pow(i);
        w *= BigRational::new(&pi - 1, pi);
    }
    Ok(w)
}

/// Enclosure of `p^{-(s + i)}`.
fn p_pow_neg_shift(p: u32, s: f64, i: i64) -> Interval {
    p_pow_neg(p, Exponent::affine(s, 1, i))
}

/// `∏_{i=1}^{k} (1 - p^{-s-i})^{-1}`; for `k = ∞` this is `1/F_s`.
pub fn zeta_product(params: &ZetaParams) -> Result<Interval> {
    match params.k {
        ZetaLevel::Finite(k) => {
            let mut prod = Interval::ONE;
            for i in 1..=i64::from(k) {
                prod = prod * (Interval::ONE - p_pow_neg_shift(params.p, params.s, i));
            }
            prod.recip()
        }
        ZetaLevel::Infinite => {
            let measure = params.as_measure()?;
            normalizing_constant(&measure, fu_depth(&measure, 1e-15)?)?.recip()
        }
    }
}

/// `Σ_{#A ≤ p^N} w_k(A)/#A^s` with the omitted classes bounded through
/// `w_k(A) ≤ 1/#Aut A ≤ p^{1-n}`.
pub fn zeta_sum(params: &ZetaParams, max_order_exponent: u32) -> Result<CertifiedValue> {
    check_order_exponent(max_order_exponent)?;
    let p = params.p;
    let measure = params.as_measure()?;
    let sums = ClassSums::new(&measure, max_order_exponent);

    // prefix[i] = Σ_{t ≤ i} log(1 - p^{-t})
    let k_max = match params.k {
        ZetaLevel::Finite(k) => k,
        ZetaLevel::Infinite => 0,
    };
    let mut prefix = vec![Interval::ZERO];
    for t in 1..=i64::from(k_max) {
        let last = *prefix.last().expect("nonempty");
        prefix.push(last + (Interval::ONE - p_pow_neg(p, Exponent::Int(t))).ln()?);
    }

    let partial = sum_levels(0..=max_order_exponent, Interval::ZERO, |n, parts| {
        let r = parts.len() as u32;
        let level_factor = match params.k {
            ZetaLevel::Finite(k) if r > k => return Interval::ZERO,
            ZetaLevel::Finite(k) => prefix[k as usize] - prefix[(k - r) as usize],
            ZetaLevel::Infinite => Interval::ZERO,
        };
        (level_factor - sums.ln_weight(n, parts)).exp()
    });

    let terms = LevelTerms {
        coeff: Interval::point(f64::from(p)),
        kappa: Interval::point(params.s) + Interval::ONE,
        a: Interval::ONE,
        b: Interval::ZERO,
    };
    let tail = level_tail_bound(p, max_order_exponent, &terms)?;
    Ok(CertifiedValue::new(
        partial + Interval::new(0.0, tail)?,
        max_order_exponent,
        tail,
    ))
}

/// `Σ_{i ≥ 1} log p / (p^{u+i} - 1)`, truncated once the remainder drops
/// below `tol`. Returns the enclosure and the number of terms summed.
///
/// For `i ≥ 2` each term is at most `log p · p/(p-1) · p^{-(u+i)}`.
pub fn log_series(p: u32, u: f64, tol: f64) -> Result<(Interval, u32)> {
    check_prime(p)?;
    if !(u > -1.0 && u.is_finite()) {
        return Err(Error::InvalidParameter(format!("need u > -1, got {u}")));
    }
    let ln_p = ln_u64(u64::from(p));
    let pf = Interval::point(f64::from(p));
    let pm1 = pf - Interval::ONE;
    let tail_scale = ln_p * pf.checked_div(pm1 * pm1)?;
    let mut acc = Interval::ZERO;
    for i in 1..=4096i64 {
        let q = p_pow_neg_shift(p, u, i);
        acc = acc + ln_p * q.checked_div(Interval::ONE - q)?;
        // Σ_{j > i} p^{-(u+j)} = p^{-(u+i)} / (p - 1)
        let tail = (tail_scale * q).hi();
        if tail < tol {
            return Ok((acc + Interval::new(0.0, tail)?, i as u32));
        }
    }
    Err(Error::Refused(format!("log series did not reach tolerance {tol}")))
}

/// `ζ_k'(s) = ζ_k(s) · (-Σ_{i=1}^{k} log p / (p^{s+i} - 1))`.
pub fn zeta_log_derivative(params: &ZetaParams) -> Result<Interval> {
    let p = params.p;
    let ln_p = ln_u64(u64::from(p));
    match params.k {
        ZetaLevel::Finite(k) => {
            let mut sum = Interval::ZERO;
            for i in 1..=i64::from(k) {
                let q = p_pow_neg_shift(p, params.s, i);
                sum = sum + ln_p * q.checked_div(Interval::ONE - q)?;
            }
            Ok(zeta_product(params)? * -sum)
        }
        ZetaLevel::Infinite => {
            let (sum, _) = log_series(p, params.s, 1e-15)?;
            Ok(zeta_product(params)? * -sum)
        }
    }
}

fn same_prime(u1: &CLParams, u2: &CLParams) -> Result<()> {
    if u1.p() != u2.p() {
        return Err(Error::InvalidParameter("measures on different primes".into()));
    }
    Ok(())
}

/// `D_KL(ν^{u1} || ν^{u2}) = log(F_{u1}/F_{u2}) + (u2 - u1) Σ_{i≥1} log p / (p^{u1+i} - 1)`.
pub fn kl_closed(p: u32, u1: UnitRank, u2: UnitRank, tol: f64) -> Result<CertifiedValue> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let m1 = CLParams::new(p, u1)?;
    let m2 = CLParams::new(p, u2)?;
    let f1 = normalizing_constant(&m1, fu_depth(&m1, tol / 8.0)?)?;
    let f2 = normalizing_constant(&m2, fu_depth(&m2, tol / 8.0)?)?;
    let du = m2.u().interval() - m1.u().interval();
    let scale = du.abs().hi().max(1.0);
    let (series, terms) = log_series(p, u1.value(), tol / (4.0 * scale))?;
    let value = f1.ln()? - f2.ln()? + du * series;
    let tail = if u1.value() == u2.value() {
        0.0
    } else {
        (du.abs() * Interval::new(0.0, tol / (4.0 * scale))?).hi()
    };
    Ok(CertifiedValue::new(value, terms, tail))
}

/// The KL divergence summed class by class:
/// `Σ_A ν^{u1}(A) (log(F_{u1}/F_{u2}) + (u2 - u1) n log p)` over `#A ≤ p^N`,
/// with `|term| ≤ F_{u1} p^{1-(u1+1)n} (|log(F_{u1}/F_{u2})| + |u2 - u1| n log p)`
/// bounding the rest.
pub fn kl_direct(p: u32, u1: UnitRank, u2: UnitRank, max_order_exponent: u32) -> Result<CertifiedValue> {
    check_order_exponent(max_order_exponent)?;
    let m1 = CLParams::new(p, u1)?;
    let m2 = CLParams::new(p, u2)?;
    same_prime(&m1, &m2)?;
    let f1 = normalizing_constant(&m1, fu_depth(&m1, 1e-15)?)?;
    let f2 = normalizing_constant(&m2, fu_depth(&m2, 1e-15)?)?;
    let log_ratio = f1.ln()? - f2.ln()?;
    let ln_p = ln_u64(u64::from(p));
    let du = m2.u().interval() - m1.u().interval();
    let sums = ClassSums::new(&m1, max_order_exponent);
    let partial = sum_levels(0..=max_order_exponent, Interval::ZERO, |n, parts| {
        let nu = f1 * (-sums.ln_weight(n, parts)).exp();
        nu * (log_ratio + du * Interval::point(f64::from(n)) * ln_p)
    });
    let tail = kl_direct_tail(&m1, f1, log_ratio, du, max_order_exponent)?;
    Ok(CertifiedValue::new(
        partial + Interval::new(-tail, tail)?,
        max_order_exponent,
        tail,
    ))
}

fn kl_direct_tail(
    m1: &CLParams,
    f1: Interval,
    log_ratio: Interval,
    du: Interval,
    max_order_exponent: u32,
) -> Result<f64> {
    let p = m1.p();
    let terms = LevelTerms {
        coeff: f1 * Interval::point(f64::from(p)),
        kappa: m1.u().kappa(),
        a: Interval::point(log_ratio.abs().hi()),
        b: (du.abs() * ln_u64(u64::from(p))).clamp_lo(0.0),
    };
    level_tail_bound(p, max_order_exponent, &terms)
}

/// [`kl_direct`] at the smallest order exponent whose tail is below `tol/2`.
pub fn kl_direct_auto(p: u32, u1: UnitRank, u2: UnitRank, tol: f64) -> Result<CertifiedValue> {
    let m1 = CLParams::new(p, u1)?;
    let m2 = CLParams::new(p, u2)?;
    let f1 = normalizing_constant(&m1, fu_depth(&m1, 1e-15)?)?;
    let f2 = normalizing_constant(&m2, fu_depth(&m2, 1e-15)?)?;
    let log_ratio = f1.ln()? - f2.ln()?;
    let du = m2.u().interval() - m1.u().interval();
    for n in 1..=MAX_ORDER_EXPONENT {
        if kl_direct_tail(&m1, f1, log_ratio, du, n)? < tol / 2.0 {
            return kl_direct(p, u1, u2, n);
        }
    }
    Err(Error::Refused(format!(
        "KL tail does not fall below {} by order exponent {MAX_ORDER_EXPONENT}",
        tol / 2.0
    )))
}

/// Outcome of comparing `-ζ_k'(u1)` with `(1/F_{u1}) Σ_i log p / (p^{u1+i} - 1)`
/// for growing `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitReport {
    pub converged: bool,
    /// First `k` at which `-ζ_k'(u1)` entered the widened limit interval, or
    /// the last `k` tried.
    pub k: u32,
    pub lhs: Interval,
    pub limit: Interval,
}

pub const LIMIT_MAX_LEVEL: u32 = 200;

pub fn limit_derivative_identity(p: u32, u1: f64, tol: f64) -> Result<LimitReport> {
    let measure = CLParams::from_f64(p, u1)?;
    let f = normalizing_constant(&measure, fu_depth(&measure, tol / 100.0)?)?;
    let (series, _) = log_series(p, u1, tol / 100.0)?;
    let limit = series.checked_div(f)?;
    let window = limit.widen(tol);
    let mut lhs = Interval::ZERO;
    for k in 1..=LIMIT_MAX_LEVEL {
        lhs = -zeta_log_derivative(&ZetaParams::new(p, ZetaLevel::Finite(k), u1)?)?;
        if window.contains_interval(&lhs) {
            return Ok(LimitReport {
                converged: true,
                k,
                lhs,
                limit,
            });
        }
    }
    Ok(LimitReport {
        converged: false,
        k: LIMIT_MAX_LEVEL,
        lhs,
        limit,
    })
}
