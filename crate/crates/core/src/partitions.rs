//! Integer partitions: enumeration, counting, conjugation and the `n(λ)`
//! statistic.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// A weakly decreasing sequence of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidPartition(format!("{parts:?} has a zero part")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!(
                "{parts:?} is not weakly decreasing"
            )));
        }
        Ok(Partition(parts))
    }

    /// The empty partition of 0.
    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// `|λ|`, the sum of the parts.
    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The conjugate partition (transpose of the Young diagram).
    pub fn dual(&self) -> Partition {
        let first = self.0.first().copied().unwrap_or(0);
        let dual = (1..=first)
            .map(|j| self.0.iter().take_while(|&&part| part >= j).count() as u32)
            .collect();
        Partition(dual)
    }

    /// `n(λ) = Σ_i (i-1) λ_i`. Checked against `Σ_j C(λ*_j, 2)` over the
    /// conjugate.
    pub fn n_lambda(&self) -> u64 {
        let direct = n_lambda_raw(&self.0);
        let via_dual: u64 = self
            .dual()
            .0
            .iter()
            .map(|&l| u64::from(l) * u64::from(l.saturating_sub(1)) / 2)
            .sum();
        assert_eq!(direct, via_dual, "n(λ) formulas disagree for {self}");
        direct
    }

    /// Multiplicity of each part value: entry `j - 1` is `#{i : λ_i = j}`,
    /// for `j = 1..=λ_1`. Equals `λ*_j - λ*_{j+1}` for the conjugate `λ*`.
    pub fn multiplicities(&self) -> Vec<u32> {
        multiplicities_raw(&self.0)
    }
}

pub(crate) fn n_lambda_raw(parts: &[u32]) -> u64 {
    parts
        .iter()
        .enumerate()
        .map(|(i, &part)| i as u64 * u64::from(part))
        .sum()
}

pub(crate) fn multiplicities_raw(parts: &[u32]) -> Vec<u32> {
    let first = parts.first().copied().unwrap_or(0) as usize;
    let mut m = vec![0u32; first];
    for &part in parts {
        m[part as usize - 1] += 1;
    }
    m
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, part) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{part}")?;
        }
        write!(f, ")")
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;

    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Partition::new(parts)
    }
}

/// Calls `visit` on every partition of `n` in reverse-lexicographic order,
/// without allocating a `Partition` per item.
pub fn for_each_partition<F: FnMut(&[u32])>(n: u32, mut visit: F) {
    let mut parts = Vec::with_capacity(n as usize);
    walk(n, n, &mut parts, &mut visit);
}

fn walk<F: FnMut(&[u32])>(remaining: u32, max_part: u32, parts: &mut Vec<u32>, visit: &mut F) {
    if remaining == 0 {
        visit(parts);
        return;
    }
    for part in (1..=remaining.min(max_part)).rev() {
        parts.push(part);
        walk(remaining - part, part, parts, visit);
        parts.pop();
    }
}

/// All partitions of `n`, reverse-lexicographic.
pub fn enumerate_partitions(n: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    for_each_partition(n, |parts| out.push(Partition(parts.to_vec())));
    out
}

/// `π(0), …, π(n_max)` by Euler's pentagonal-number recurrence.
pub fn partition_counts(n_max: u32) -> Vec<BigUint> {
    let n_max = n_max as usize;
    let mut table: Vec<BigInt> = Vec::with_capacity(n_max + 1);
    table.push(BigInt::from(1));
    for n in 1..=n_max {
        let mut acc = BigInt::zero();
        for k in 1.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > n {
                break;
            }
            let positive = k % 2 == 1;
            let mut term = table[n - g1].clone();
            let g2 = k * (3 * k + 1) / 2;
            if g2 <= n {
                term += &table[n - g2];
            }
            if positive {
                acc += term;
            } else {
                acc -= term;
            }
        }
        table.push(acc);
    }
    table
        .into_iter()
        .map(|v| {
            debug_assert!(!v.is_negative());
            v.to_biguint().expect("partition counts are nonnegative")
        })
        .collect()
}

/// `π(n)`.
pub fn partition_count(n: u32) -> BigUint {
    partition_counts(n).pop().expect("nonempty table")
}

pub fn dual_partition(lambda: &Partition) -> Partition {
    lambda.dual()
}

pub fn n_lambda(lambda: &Partition) -> u64 {
    lambda.n_lambda()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn rejects_malformed() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
        assert!(Partition::new(vec![]).is_ok());
    }

    #[test]
    fn enumeration_order() {
        assert_eq!(enumerate_partitions(0), vec![Partition::empty()]);
        assert_eq!(
            enumerate_partitions(4),
            vec![p(&[4]), p(&[3, 1]), p(&[2, 2]), p(&[2, 1, 1]), p(&[1, 1, 1, 1])]
        );
        assert_eq!(enumerate_partitions(10).len(), 42);
    }

    #[test]
    fn counts() {
        assert_eq!(partition_count(0), BigUint::from(1u32));
        assert_eq!(partition_count(5), BigUint::from(7u32));
        assert_eq!(partition_count(100), BigUint::from(190_569_292u64));
    }

    #[test]
    fn duals() {
        assert_eq!(Partition::empty().dual(), Partition::empty());
        assert_eq!(p(&[3, 1]).dual(), p(&[2, 1, 1]));
        assert_eq!(p(&[2, 2]).dual(), p(&[2, 2]));
    }

    #[test]
    fn n_lambda_values() {
        assert_eq!(Partition::empty().n_lambda(), 0);
        assert_eq!(p(&[1, 1, 1]).n_lambda(), 3);
        assert_eq!(p(&[2, 1]).n_lambda(), 1);
    }

    #[test]
    fn multiplicities_match_dual_differences() {
        for n in 0..=12 {
            for lambda in enumerate_partitions(n) {
                let dual = lambda.dual();
                let d = dual.parts();
                let m = lambda.multiplicities();
                for (j, &mj) in m.iter().enumerate() {
                    let next = d.get(j + 1).copied().unwrap_or(0);
                    assert_eq!(mj, d[j] - next, "{lambda}");
                }
            }
        }
    }

    #[test]
    fn display() {
        assert_eq!(p(&[2, 1]).to_string(), "(2,1)");
        assert_eq!(Partition::empty().to_string(), "()");
    }
}
