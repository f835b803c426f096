use cl_entropy::partitions::{
    dual_partition, enumerate_partitions, for_each_partition, n_lambda, partition_count,
    partition_counts,
};
use cl_entropy::Partition;
use num_bigint::BigUint;
use proptest::prelude::*;

#[test]
fn enumeration_matches_counts_up_to_40() {
    let counts = partition_counts(40);
    for n in 0..=40u32 {
        let mut seen = 0u64;
        for_each_partition(n, |_| seen += 1);
        assert_eq!(BigUint::from(seen), counts[n as usize], "n = {n}");
    }
    assert_eq!(counts[40], BigUint::from(37_338u32));
    assert_eq!(partition_count(100), BigUint::from(190_569_292u64));
}

#[test]
fn enumeration_is_reverse_lexicographic_and_distinct() {
    for n in 1..=15 {
        let all = enumerate_partitions(n);
        for pair in all.windows(2) {
            assert!(pair[0].parts() > pair[1].parts(), "{} !> {}", pair[0], pair[1]);
        }
        assert!(all.iter().all(|l| l.size() == n));
    }
}

/// Coefficients of `∏_{i≤N} (1 - x^i)^{-1}` up to degree `N`, by
/// multiplying in one geometric series at a time.
fn product_series(n: usize) -> Vec<BigUint> {
    let mut coeffs = vec![BigUint::from(0u32); n + 1];
    coeffs[0] = BigUint::from(1u32);
    for i in 1..=n {
        for d in i..=n {
            let add = coeffs[d - i].clone();
            coeffs[d] += add;
        }
    }
    coeffs
}

#[test]
fn generating_function_to_degree_30() {
    assert_eq!(partition_counts(30), product_series(30));
}

#[test]
fn dual_of_small_shapes() {
    let p = |v: Vec<u32>| Partition::new(v).unwrap();
    assert_eq!(dual_partition(&p(vec![3, 1])), p(vec![2, 1, 1]));
    assert_eq!(dual_partition(&p(vec![])), p(vec![]));
    assert_eq!(n_lambda(&p(vec![2, 1])), 1);
    assert_eq!(n_lambda(&p(vec![1, 1, 1])), 3);
}

fn small_partition() -> impl Strategy<Value = Partition> {
    (0u32..=20, any::<prop::sample::Index>()).prop_map(|(n, idx)| {
        let all = enumerate_partitions(n);
        all[idx.index(all.len())].clone()
    })
}

proptest! {
    #[test]
    fn dual_is_an_involution(l in small_partition()) {
        let d = l.dual();
        prop_assert_eq!(d.size(), l.size());
        prop_assert_eq!(d.dual(), l.clone());
        prop_assert_eq!(d.len() as u32, l.parts().first().copied().unwrap_or(0));
    }

    #[test]
    fn n_lambda_formulas_agree(l in small_partition()) {
        let direct: u64 = l.parts().iter().enumerate().map(|(i, &x)| i as u64 * u64::from(x)).sum();
        let via_dual: u64 = l.dual().parts().iter().map(|&x| u64::from(x) * u64::from(x - 1) / 2).sum();
        prop_assert_eq!(n_lambda(&l), direct);
        prop_assert_eq!(direct, via_dual);
    }

    #[test]
    fn multiplicities_are_dual_differences(l in small_partition()) {
        let dual = l.dual();
        let d = dual.parts();
        let m = l.multiplicities();
        for j in 0..d.len() {
            let next = d.get(j + 1).copied().unwrap_or(0);
            prop_assert_eq!(m[j], d[j] - next);
        }
    }
}

#[test]
fn rejects_invalid_partitions() {
    assert!(Partition::new(vec![1, 2]).is_err());
    assert!(Partition::new(vec![2, 0]).is_err());
}
