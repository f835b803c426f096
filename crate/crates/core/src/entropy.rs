//! Certified Shannon entropy of `ν^u_CL` and the ingredients of its
//! monotonicity in `u`: the per-class decreasing inequality, its exceptional
//! classes, the margins covering those exceptions, and the upper bound that
//! forces the entropy to 0.

use std::f64::consts::E;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Pow, ToPrimitive};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::groups::{check_prime, is_prime, AbelianPGroup};
use crate::measures::{
    check_order_exponent, fu_depth, hall_sum_partial, hall_tail_bounds, normalizing_constant,
    CLParams, ClassSums, UnitRank, MAX_ORDER_EXPONENT,
};
use crate::numerics::{ln_u64, CertifiedValue, Interval};
use crate::partitions::enumerate_partitions;
use crate::series::{level_tail_bound, p_pow_neg, sum_levels, Exponent, LevelTerms};
use crate::Partition;

/// Entropy together with its decomposition
/// `H = -log F_u + F_u Σ_{A≠1} log(#A^u #Aut A) / (#A^u #Aut A)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyResult {
    pub params: CLParams,
    pub h: CertifiedValue,
    pub minus_log_fu: Interval,
    pub weighted_sum: CertifiedValue,
}

/// Smallest order exponent at which the entropy tail is well defined.
fn min_order_exponent(params: &CLParams) -> u32 {
    let kappa = params.u().value() + 1.0;
    2 + (1.0 / kappa).ceil() as u32
}

/// Bound on `Σ_{n>N} π(n) h(F_u p^{1-(u+1)n})` with `h(x) = -x log x`.
///
/// Each class at level `n` has mass at most `b_n = F_u p^{1-(u+1)n}`; when
/// `b_n < 1/e` monotonicity of `h` on `(0, 1/e]` bounds its entropy
/// contribution by `h(b_n) = F_u p · p^{-(u+1)n} · ((u+1) n log p - log F_u - log p)`.
pub(crate) fn entropy_tail(params: &CLParams, f: Interval, max_order_exponent: u32) -> Result<f64> {
    let p = params.p();
    let kappa = params.u().kappa();
    let ln_p = ln_u64(u64::from(p));
    let next = Interval::point(f64::from(max_order_exponent) + 1.0);
    let largest_omitted = f * Interval::point(f64::from(p)) * (-(kappa * next * ln_p)).exp();
    if largest_omitted.hi() >= (1.0 / E.next_up()).next_down() {
        return Err(Error::Refused(format!(
            "omitted classes beyond order exponent {max_order_exponent} may carry mass >= 1/e"
        )));
    }
    let terms = LevelTerms {
        coeff: f * Interval::point(f64::from(p)),
        kappa,
        a: -f.ln()? - ln_p,
        b: kappa * ln_p,
    };
    level_tail_bound(p, max_order_exponent, &terms)
}

fn check_entropy_depth(params: &CLParams, max_order_exponent: u32) -> Result<()> {
    check_order_exponent(max_order_exponent)?;
    let min = min_order_exponent(params);
    if max_order_exponent < min {
        return Err(Error::Refused(format!(
            "entropy tail needs order exponent >= {min}, got {max_order_exponent}"
        )));
    }
    Ok(())
}

/// Entropy via the `-log F_u + weighted sum` identity, summing classes with
/// `#A ≤ p^N` and bounding the rest.
pub fn entropy_truncated(
    params: &CLParams,
    max_order_exponent: u32,
    depth: u32,
) -> Result<EntropyResult> {
    check_entropy_depth(params, max_order_exponent)?;
    let f = normalizing_constant(params, depth)?;
    let tail = entropy_tail(params, f, max_order_exponent)?;
    let sums = ClassSums::new(params, max_order_exponent);
    let partial = sum_levels(1..=max_order_exponent, Interval::ZERO, |n, parts| {
        let l = sums.ln_weight(n, parts);
        f * l * (-l).exp()
    });
    let weighted = partial + Interval::new(0.0, tail)?;
    let minus_log_fu = -f.ln()?;
    let h = (minus_log_fu + weighted).clamp_lo(0.0);
    Ok(EntropyResult {
        params: *params,
        h: CertifiedValue::new(h, max_order_exponent, tail),
        minus_log_fu,
        weighted_sum: CertifiedValue::new(weighted, max_order_exponent, tail),
    })
}

/// Entropy straight from the definition `-Σ ν(A) log ν(A)`.
pub fn entropy_direct(
    params: &CLParams,
    max_order_exponent: u32,
    depth: u32,
) -> Result<CertifiedValue> {
    check_entropy_depth(params, max_order_exponent)?;
    let f = normalizing_constant(params, depth)?;
    let ln_f = f.ln()?;
    let tail = entropy_tail(params, f, max_order_exponent)?;
    let sums = ClassSums::new(params, max_order_exponent);
    let partial = sum_levels(0..=max_order_exponent, Interval::ZERO, |n, parts| {
        let l = sums.ln_weight(n, parts);
        let ln_nu = ln_f - l;
        -(ln_nu.exp() * ln_nu)
    });
    let h = (partial + Interval::new(0.0, tail)?).clamp_lo(0.0);
    Ok(CertifiedValue::new(h, max_order_exponent, tail))
}

/// Cross entropy `-Σ ν^{u1}(A) log ν^{u2}(A)` by direct summation.
pub fn cross_entropy(
    from: &CLParams,
    to: &CLParams,
    max_order_exponent: u32,
    depth: u32,
) -> Result<CertifiedValue> {
    if from.p() != to.p() {
        return Err(Error::InvalidParameter("measures on different primes".into()));
    }
    check_order_exponent(max_order_exponent)?;
    if max_order_exponent < 2 {
        return Err(Error::Refused("cross entropy tail needs order exponent >= 2".into()));
    }
    let p = from.p();
    let f1 = normalizing_constant(from, depth)?;
    let f2 = normalizing_constant(to, depth)?;
    let ln_f2 = f2.ln()?;
    let ln_p = ln_u64(u64::from(p));
    let u1 = from.u().interval();
    let u2 = to.u().interval();
    let sums = ClassSums::new(from, max_order_exponent);
    let partial = sum_levels(0..=max_order_exponent, Interval::ZERO, |n, parts| {
        let ln_aut = sums.logs.ln_aut(parts);
        let n = Interval::point(f64::from(n));
        let nu1 = f1 * (-(u1 * n * ln_p + ln_aut)).exp();
        nu1 * (u2 * n * ln_p + ln_aut - ln_f2)
    });
    // ν1(A)·log #Aut A ≤ F_{u1} p^{-u1 n} · (n-1) log p / p^{n-1}, since
    // x ↦ log x / x decreases for x ≥ e and #Aut A ≥ p^{n-1} ≥ e at n ≥ 3.
    let terms = LevelTerms {
        coeff: f1 * Interval::point(f64::from(p)),
        kappa: from.u().kappa(),
        a: -ln_f2 - ln_p,
        b: (u2 + Interval::ONE) * ln_p,
    };
    let tail = level_tail_bound(p, max_order_exponent.max(2), &terms)?;
    Ok(CertifiedValue::new(
        partial + Interval::new(0.0, tail)?,
        max_order_exponent,
        tail,
    ))
}

/// Certified entropy of `ν^u_CL` with interval width at most `eps`.
///
/// The product depth and order exponent are chosen from the tolerance; the
/// budget is halved and the computation repeated if rounding pushes the width
/// over `eps`.
pub fn entropy(params: &CLParams, eps: f64) -> Result<EntropyResult> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "eps must be a positive finite number, got {eps}"
        )));
    }
    let mut budget = eps;
    for _ in 0..8 {
        let depth = fu_depth(params, budget / 8.0)?;
        let f = normalizing_constant(params, depth)?;
        let mut level = min_order_exponent(params);
        loop {
            if level > MAX_ORDER_EXPONENT {
                return Err(Error::Refused(format!(
                    "entropy tail does not fall below {:e} by order exponent {MAX_ORDER_EXPONENT}",
                    budget / 2.0
                )));
            }
            match entropy_tail(params, f, level) {
                Ok(t) if t < budget / 2.0 => break,
                Ok(_) => {}
                Err(Error::Refused(_)) if level < MAX_ORDER_EXPONENT => {}
                Err(e) => return Err(e),
            }
            level += 1;
        }
        let result = entropy_truncated(params, level, depth)?;
        if result.h.value.width() <= eps {
            return Ok(result);
        }
        budget /= 2.0;
    }
    Err(Error::Refused(format!(
        "could not certify entropy to width {eps:e}"
    )))
}

/// The upper bound
/// `Σ_k 1/(k (p^k - 1) p^{ku}) + u F_u/p^{u-1} Σ_{A≠1} 1/#Aut A + F_u/p^{u-1} Σ_{A≠1} 1/#A`
/// on the entropy, valid for `u ≥ 2`. The first series equals `-log F_u`;
/// the Hall sums are taken from exact partial sums plus certified tails.
pub fn entropy_upper_bound_iii(
    params: &CLParams,
    max_order_exponent: u32,
    depth: u32,
) -> Result<Interval> {
    let u = params.u().value();
    if u < 2.0 {
        return Err(Error::Refused(format!(
            "the entropy upper bound is stated for u >= 2, got u = {u}"
        )));
    }
    let p = params.p();
    let f = normalizing_constant(params, depth)?;

    // Σ_k (1/k) p^{-k(u+1)} / (1 - p^{-k}); terms beyond K are at most 2 p^{-k(u+1)}
    const K: i64 = 64;
    let mut log_series = Interval::ZERO;
    for k in 1..=K {
        let decay = p_pow_neg(p, Exponent::affine(u, k, k));
        let denom = Interval::point(k as f64) * (Interval::ONE - p_pow_neg(p, Exponent::Int(k)));
        log_series = log_series + decay.checked_div(denom)?;
    }
    let ratio = p_pow_neg(p, Exponent::affine(u, 1, 1));
    let series_tail = (Interval::point(2.0) * p_pow_neg(p, Exponent::affine(u, K + 1, K + 1)))
        .checked_div(Interval::ONE - ratio)?;
    let log_series = log_series + Interval::new(0.0, series_tail.hi())?;

    let (by_aut, by_order) = hall_sum_partial(p, max_order_exponent)?;
    let tails = hall_tail_bounds(p, max_order_exponent)?;
    let nontrivial = |s: Interval, tail: f64| -> Result<Interval> {
        Ok(s - Interval::ONE + Interval::new(0.0, tail)?)
    };
    let sum_aut = nontrivial(Interval::from_ratio(&by_aut), tails.by_aut)?;
    let sum_order = nontrivial(Interval::from_ratio(&by_order), tails.by_order)?;

    let scale = f * p_pow_neg(p, Exponent::affine(u, 1, -1));
    Ok(log_series + params.u().interval() * scale * sum_aut + scale * sum_order)
}

/// Tests `#A^{u+1} #Aut A ≤ (#A^u #Aut A)^{(1 - p^{-(u+1)}) #A}` exactly.
///
/// With `x = #A^u #Aut A`, `L = #A · x` and the exponent written as
/// `num/den` in lowest terms, the inequality is `L^den ≤ x^num`. It is
/// decided from bit lengths when possible, then from certified logarithms,
/// and only then by computing both powers.
pub fn check_decreasing_inequality(p: u32, u: u32, group: &AbelianPGroup) -> Result<bool> {
    if group.p() != p {
        return Err(Error::InvalidParameter(format!(
            "group is a {}-group, expected p = {p}",
            group.p()
        )));
    }
    if group.is_trivial() {
        return Err(Error::InvalidParameter(
            "the decreasing inequality concerns nontrivial groups".into(),
        ));
    }
    let order = group.order();
    let x = order.clone().pow(u) * group.aut_order();
    let lhs = &order * &x;
    let q = BigUint::from(p).pow(u + 1);
    let g = order.gcd(&q);
    let num = (&order / &g) * (&q - 1u32);
    let den = &q / &g;
    Ok(power_le(&lhs, &den, &x, &num))
}

/// Decides `a^m ≤ b^k` for positive integers.
fn power_le(a: &BigUint, m: &BigUint, b: &BigUint, k: &BigUint) -> bool {
    if b.is_one() {
        return a.is_one() || m == &BigUint::ZERO;
    }
    let (ba, bb) = (BigUint::from(a.bits()), BigUint::from(b.bits()));
    // 2^{bits-1} ≤ v < 2^{bits}
    if m * &ba <= k * (&bb - 1u32) {
        return true;
    }
    if m * (&ba - 1u32) >= k * &bb {
        return false;
    }
    if let (Some(m64), Some(k64)) = (m.to_f64(), k.to_f64()) {
        let la = Interval::ln_biguint(a).expect("positive") * Interval::point(m64);
        let lb = Interval::ln_biguint(b).expect("positive") * Interval::point(k64);
        // m64, k64 are exact below 2^53
        if m.bits() <= 53 && k.bits() <= 53 {
            if la.hi() < lb.lo() {
                return true;
            }
            if la.lo() > lb.hi() {
                return false;
            }
        }
    }
    let m = m.to_u32().expect("exponent small enough for exact powers");
    let k = k.to_u32().expect("exponent small enough for exact powers");
    a.pow(m) <= b.pow(k)
}

/// One of the `(p, u, A)` cases where the decreasing inequality fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InequalityException {
    pub p: u32,
    pub u: u32,
    pub lambda_prime: Partition,
}

/// Every `(p, u, A)` with prime `p ≤ p_max`, `#A ≤ p^{n_max}`, `u ≤ u_max`
/// that violates the decreasing inequality, ordered by `p`, `u`, order and
/// canonical partition order.
pub fn scan_exceptions(p_max: u32, n_max: u32, u_max: u32) -> Result<Vec<InequalityException>> {
    let cells: Vec<(u32, u32)> = (2..=p_max)
        .filter(|&p| is_prime(u64::from(p)))
        .flat_map(|p| (0..=u_max).map(move |u| (p, u)))
        .collect();
    let found: Vec<Vec<InequalityException>> = cells
        .par_iter()
        .map(|&(p, u)| -> Result<Vec<InequalityException>> {
            let mut out = Vec::new();
            for n in 1..=n_max {
                for lambda_prime in enumerate_partitions(n) {
                    let group = AbelianPGroup::new(p, lambda_prime)?;
                    if !check_decreasing_inequality(p, u, &group)? {
                        out.push(InequalityException {
                            p,
                            u,
                            lambda_prime: group.lambda_prime().clone(),
                        });
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

/// A certified lower-bound check for one exceptional comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Margin {
    pub label: &'static str,
    pub p: u32,
    /// The comparison is between unit ranks `u` and `u + 1`.
    pub u: u32,
    pub value: Interval,
    pub claimed_lower_bound: f64,
}

impl Margin {
    pub fn holds(&self) -> bool {
        self.value.lo() >= self.claimed_lower_bound
    }
}

/// `F_u log(x)/x` for `x = #A^u #Aut A`.
fn class_term(f: Interval, group: &AbelianPGroup, u: u32) -> Result<Interval> {
    let x = group.order().pow(u) * group.aut_order();
    let ln_x = Interval::ln_biguint(&x)?;
    Ok(f * ln_x * Interval::recip_biguint(&x)?)
}

/// The contribution of `-log F` and the listed classes to `H(u) - H(u+1)`.
fn margin(p: u32, u: u32, groups: &[AbelianPGroup]) -> Result<Interval> {
    const DEPTH: u32 = 80;
    let f_u = normalizing_constant(&CLParams::integral(p, u)?, DEPTH)?;
    let f_next = normalizing_constant(&CLParams::integral(p, u + 1)?, DEPTH)?;
    let mut total = f_next.ln()? - f_u.ln()?;
    for group in groups {
        total = total + class_term(f_u, group, u)? - class_term(f_next, group, u + 1)?;
    }
    Ok(total)
}

/// The three margins covering the exceptional classes:
/// `Z/2, Z/4` between `u = 0, 1` at `p = 2` (at least 0.44), `Z/2` between
/// `u = 1, 2` at `p = 2` (at least 0.21) and `Z/3` between `u = 0, 1` at
/// `p = 3` (at least 0.34).
pub fn exceptional_margins() -> Result<[Margin; 3]> {
    let z = |p, e| AbelianPGroup::cyclic(p, e);
    Ok([
        Margin {
            label: "p=2 u=0->1 {Z/2, Z/4}",
            p: 2,
            u: 0,
            value: margin(2, 0, &[z(2, 1)?, z(2, 2)?])?,
            claimed_lower_bound: 0.44,
        },
        Margin {
            label: "p=2 u=1->2 {Z/2}",
            p: 2,
            u: 1,
            value: margin(2, 1, &[z(2, 1)?])?,
            claimed_lower_bound: 0.21,
        },
        Margin {
            label: "p=3 u=0->1 {Z/3}",
            p: 3,
            u: 0,
            value: margin(3, 0, &[z(3, 1)?])?,
            claimed_lower_bound: 0.34,
        },
    ])
}

/// `F_u log(x)/x` versus `F_{u+1} log(x')/x'` for one class; returns the
/// two enclosures.
pub fn class_terms_at(p: u32, u: u32, group: &AbelianPGroup, depth: u32) -> Result<(Interval, Interval)> {
    check_prime(p)?;
    let f_u = normalizing_constant(&CLParams::integral(p, u)?, depth)?;
    let f_next = normalizing_constant(&CLParams::integral(p, u + 1)?, depth)?;
    Ok((class_term(f_u, group, u)?, class_term(f_next, group, u + 1)?))
}

/// Strict separation `H(u).lo > H(u+1).hi` for integral `u`, shrinking the
/// width until the intervals separate or `eps` drops below `1e-10`.
pub fn entropy_strictly_decreasing(p: u32, u: u32, eps: f64) -> Result<(EntropyResult, EntropyResult, bool)> {
    let here = CLParams::new(p, UnitRank::Integral(u))?;
    let next = CLParams::new(p, UnitRank::Integral(u + 1))?;
    let mut eps = eps;
    loop {
        let a = entropy(&here, eps)?;
        let b = entropy(&next, eps)?;
        let separated = a.h.value.lo() > b.h.value.hi();
        if separated || eps < 1e-10 {
            return Ok((a, b, separated));
        }
        eps /= 10.0;
    }
}
