#![allow(clippy::excessive_precision)]

use cl_entropy::groups::groups_of_order;
use cl_entropy::measures::normalizing_constant;
use cl_entropy::zeta::{
    kl_closed, kl_direct, kl_direct_auto, limit_derivative_identity, w_k_weight,
    zeta_log_derivative, zeta_product, zeta_sum, ZetaLevel, ZetaParams,
};
use cl_entropy::{CLParams, Interval, UnitRank};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;

fn zp(p: u32, k: u32, s: f64) -> ZetaParams {
    ZetaParams::new(p, ZetaLevel::Finite(k), s).unwrap()
}

#[test]
fn product_and_sum_agree_on_grid() {
    for p in [2, 3] {
        for k in [1, 2, 3, 5] {
            for s in [-0.5, 0.0, 1.0, 2.0] {
                let params = zp(p, k, s);
                let sum = zeta_sum(&params, 30).unwrap();
                let prod = zeta_product(&params).unwrap();
                assert!(sum.value.overlaps(&prod), "p={p} k={k} s={s}: {} vs {prod}", sum.value);
            }
        }
    }
}

#[test]
fn large_k_approaches_hall_limit() {
    let inv_f0 = 3.462_746_619_455_063_611_537_957_342_92;
    let inf = zeta_product(&ZetaParams::new(2, ZetaLevel::Infinite, 0.0).unwrap()).unwrap();
    assert!(inf.contains(inv_f0));
    let mut prev = 0.0;
    for k in [1, 5, 10, 20] {
        let v = zeta_product(&zp(2, k, 0.0)).unwrap();
        assert!(v.lo() > prev && v.hi() < inf.lo(), "k={k}: {v}");
        prev = v.lo();
    }
    let v = zeta_product(&zp(2, 60, 0.0)).unwrap();
    assert!(v.overlaps(&inf) && (v.mid() - inv_f0).abs() < 1e-14);
}

#[test]
fn weights_increase_to_automorphism_weight() {
    for p in [2u32, 3] {
        for n in 0..=6 {
            for g in groups_of_order(p, n).unwrap() {
                let full = BigRational::new(BigInt::one(), BigInt::from(g.aut_order()));
                let mut prev = w_k_weight(&g, 1).unwrap();
                for k in 2..=50 {
                    let w = w_k_weight(&g, k).unwrap();
                    assert!(w >= prev && w <= full, "{g} k={k}");
                    prev = w;
                }
                // gap ∏ (1 - p^{-i}) over r factors ending at 50
                let gap = Interval::from_ratio(&(&prev / &full));
                assert!(gap.lo() > 1.0 - 1e-12, "{g}");
            }
        }
    }
}

#[test]
fn kl_closed_matches_reference_values() {
    let d = kl_closed(2, UnitRank::Integral(0), UnitRank::Integral(1), 1e-10).unwrap();
    assert!(d.value.contains(0.420_529_034_356_045_779_784_736_930_407), "{}", d.value);
    assert!(d.value.width() <= 1e-10);
    let d = kl_closed(3, UnitRank::Integral(1), UnitRank::Integral(4), 1e-10).unwrap();
    assert!(d.value.contains(0.432_402_345_520_371_584_599_206_722_702), "{}", d.value);
}

#[test]
fn kl_routes_agree_and_are_nonnegative() {
    for p in [2, 3, 5] {
        for u1 in 0..=5 {
            for u2 in 0..=5 {
                let (a, b) = (UnitRank::Integral(u1), UnitRank::Integral(u2));
                let closed = kl_closed(p, a, b, 1e-9).unwrap();
                let direct = kl_direct_auto(p, a, b, 1e-6).unwrap();
                assert!(closed.value.overlaps(&direct.value), "p={p} {u1} {u2}");
                assert!(closed.value.lo() >= -1e-9);
                if u1 != u2 {
                    assert!(closed.value.lo() > 0.0);
                }
            }
        }
    }
}

#[test]
fn kl_is_not_symmetric() {
    let a = kl_direct(2, UnitRank::Integral(0), UnitRank::Integral(2), 40).unwrap();
    let b = kl_direct(2, UnitRank::Integral(2), UnitRank::Integral(0), 40).unwrap();
    assert!(a.value.intersect(&b.value).is_none(), "{} {}", a.value, b.value);
}

#[test]
fn kl_with_real_unit_ranks() {
    let (a, b) = (UnitRank::Real(0.5), UnitRank::Real(1.75));
    let closed = kl_closed(3, a, b, 1e-9).unwrap();
    let direct = kl_direct_auto(3, a, b, 1e-6).unwrap();
    assert!(closed.value.overlaps(&direct.value));
}

#[test]
fn derivative_limit_identity() {
    for (p, u, tol, k_max) in [(2, 0.0, 1e-8, 45), (5, 3.0, 1e-10, 20), (2, -0.5, 1e-6, 200)] {
        let r = limit_derivative_identity(p, u, tol).unwrap();
        assert!(r.converged && r.k <= k_max, "p={p} u={u}: {r:?}");
    }
    let f = normalizing_constant(&CLParams::integral(2, 0).unwrap(), 80).unwrap();
    let r = limit_derivative_identity(2, 0.0, 1e-8).unwrap();
    // the limit is positive and of order 1/F_0
    assert!(r.limit.lo() > 0.0 && r.limit.hi() < 2.0 / f.lo());
}

#[test]
fn derivative_is_negative() {
    for p in [2, 3, 5] {
        for k in [1, 3, 10] {
            for s in [-0.75, 0.0, 2.0] {
                assert!(zeta_log_derivative(&zp(p, k, s)).unwrap().hi() < 0.0);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn derivative_matches_central_difference(pi in 0usize..4, k in 1u32..12, s in -0.9f64..4.0) {
        let p = [2, 3, 5, 7][pi];
        let h = 1e-6;
        let f = |s: f64| zeta_product(&zp(p, k, s)).unwrap().mid();
        let fd = (f(s + h) - f(s - h)) / (2.0 * h);
        let d = zeta_log_derivative(&zp(p, k, s)).unwrap().widen(1e-4);
        prop_assert!(d.contains(fd), "{} not in {}", fd, d);
    }
}
