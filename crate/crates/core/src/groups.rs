//! Finite abelian p-groups up to isomorphism and their automorphism counts.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Pow};

use crate::error::{Error, Result};
use crate::partitions::{enumerate_partitions, multiplicities_raw, n_lambda_raw, Partition};

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn check_prime(p: u32) -> Result<()> {
    if is_prime(u64::from(p)) {
        Ok(())
    } else {
        Err(Error::NotPrime(u64::from(p)))
    }
}

/// The group `∏_i Z/p^{λ'_i}` of type `λ'`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianPGroup {
    p: u32,
    lambda_prime: Partition,
}

impl AbelianPGroup {
    pub fn new(p: u32, lambda_prime: Partition) -> Result<Self> {
        check_prime(p)?;
        Ok(AbelianPGroup { p, lambda_prime })
    }

    pub fn trivial(p: u32) -> Result<Self> {
        Self::new(p, Partition::empty())
    }

    /// `Z/p^e`.
    pub fn cyclic(p: u32, e: u32) -> Result<Self> {
        let parts = if e == 0 { vec![] } else { vec![e] };
        Self::new(p, Partition::new(parts)?)
    }

    pub fn from_parts(p: u32, parts: &[u32]) -> Result<Self> {
        Self::new(p, Partition::new(parts.to_vec())?)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn lambda_prime(&self) -> &Partition {
        &self.lambda_prime
    }

    /// `n` with `#A = p^n`.
    pub fn order_exponent(&self) -> u32 {
        self.lambda_prime.size()
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.p).pow(self.order_exponent())
    }

    /// Minimal number of generators, i.e. the number of cyclic factors.
    pub fn rank(&self) -> usize {
        self.lambda_prime.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.lambda_prime.is_empty()
    }

    /// Exact `#Aut A`.
    pub fn aut_order(&self) -> BigUint {
        aut_order_of_parts(self.p, self.lambda_prime.parts())
    }
}

impl fmt::Display for AbelianPGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "1");
        }
        for (i, e) in self.lambda_prime.parts().iter().enumerate() {
            if i > 0 {
                write!(f, " x ")?;
            }
            write!(f, "Z/{}^{}", self.p, e)?;
        }
        Ok(())
    }
}

/// Exponent of `p` in the integerized automorphism formula:
/// `|λ'| + 2n(λ') - Σ_j m_j(m_j+1)/2`, with `m_j` the part multiplicities.
pub(crate) fn aut_p_exponent(parts: &[u32]) -> u64 {
    let n: u64 = parts.iter().map(|&x| u64::from(x)).sum();
    let cleared: u64 = multiplicities_raw(parts)
        .iter()
        .map(|&m| u64::from(m) * (u64::from(m) + 1) / 2)
        .sum();
    let e = n + 2 * n_lambda_raw(parts);
    assert!(e >= cleared, "negative p-exponent in automorphism count");
    e - cleared
}

pub(crate) fn aut_order_of_parts(p: u32, parts: &[u32]) -> BigUint {
    let big_p = BigUint::from(p);
    let mut result = big_p.clone().pow(aut_p_exponent(parts));
    for m in multiplicities_raw(parts) {
        let mut pk = BigUint::one();
        for _ in 0..m {
            pk *= p;
            result *= &pk - 1u32;
        }
    }
    result
}

pub fn group_order(a: &AbelianPGroup) -> BigUint {
    a.order()
}

pub fn rank(a: &AbelianPGroup) -> usize {
    a.rank()
}

pub fn aut_order(a: &AbelianPGroup) -> BigUint {
    a.aut_order()
}

/// All isomorphism classes of order `p^n`, in canonical partition order.
pub fn groups_of_order(p: u32, n: u32) -> Result<Vec<AbelianPGroup>> {
    check_prime(p)?;
    Ok(enumerate_partitions(n)
        .into_iter()
        .map(|lambda_prime| AbelianPGroup { p, lambda_prime })
        .collect())
}

/// Largest group order accepted by [`aut_order_bruteforce`].
pub const BRUTEFORCE_MAX_ORDER: u32 = 256;

type Bits = [u64; 4];

fn bit_set(b: &mut Bits, i: usize) {
    b[i >> 6] |= 1 << (i & 63);
}

fn bit_get(b: &Bits, i: usize) -> bool {
    b[i >> 6] >> (i & 63) & 1 == 1
}

fn members(b: &Bits, order: usize) -> Vec<usize> {
    (0..order).filter(|&i| bit_get(b, i)).collect()
}

/// Counts automorphisms by exhaustive search, independently of the closed
/// formula.
///
/// A homomorphism is fixed by images `g_i` of the standard generators with
/// `p^{λ'_i} g_i = 0`; it is an automorphism iff the images generate `A`.
/// Image tuples are enumerated generator by generator, merging partial
/// tuples that generate the same subgroup.
pub fn aut_order_bruteforce(a: &AbelianPGroup) -> Result<BigUint> {
    let order = a.order();
    if order > BigUint::from(BRUTEFORCE_MAX_ORDER) {
        return Err(Error::Refused(format!(
            "brute-force automorphism count limited to order <= {BRUTEFORCE_MAX_ORDER}, got {order}"
        )));
    }
    let table = CayleyTable::new(a.p, a.lambda_prime.parts());
    let size = table.order;

    let mut trivial: Bits = [0; 4];
    bit_set(&mut trivial, 0);
    let mut states: HashMap<Bits, u128> = HashMap::from([(trivial, 1)]);

    for &exponent in a.lambda_prime.parts() {
        let bound = u64::from(a.p).pow(exponent);
        let mut next: HashMap<Bits, u128> = HashMap::new();
        for (sub, count) in &states {
            let sub_members = members(sub, size);
            let mut seen = *sub;
            // the coset H itself
            let admissible_in_h = sub_members
                .iter()
                .filter(|&&x| table.elem_order[x] <= bound)
                .count() as u128;
            if admissible_in_h > 0 {
                *next.entry(*sub).or_default() += count * admissible_in_h;
            }
            for g in 0..size {
                if bit_get(&seen, g) {
                    continue;
                }
                let mut admissible = 0u128;
                for &h in &sub_members {
                    let x = table.add(h, g);
                    bit_set(&mut seen, x);
                    if table.elem_order[x] <= bound {
                        admissible += 1;
                    }
                }
                if admissible > 0 {
                    let generated = table.join(sub, &sub_members, g);
                    *next.entry(generated).or_default() += count * admissible;
                }
            }
        }
        states = next;
    }

    let mut full: Bits = [0; 4];
    for i in 0..size {
        bit_set(&mut full, i);
    }
    Ok(BigUint::from(states.get(&full).copied().unwrap_or(0)))
}

struct CayleyTable {
    order: usize,
    sum: Vec<u16>,
    elem_order: Vec<u64>,
}

impl CayleyTable {
    fn new(p: u32, parts: &[u32]) -> Self {
        let moduli: Vec<usize> = parts.iter().map(|&e| (p as usize).pow(e)).collect();
        let order: usize = moduli.iter().product();
        let decode = |mut x: usize| -> Vec<usize> {
            moduli
                .iter()
                .map(|&m| {
                    let c = x % m;
                    x /= m;
                    c
                })
                .collect()
        };
        let encode = |coords: &[usize]| -> usize {
            coords
                .iter()
                .zip(&moduli)
                .rev()
                .fold(0, |acc, (&c, &m)| acc * m + c)
        };
        let coords: Vec<Vec<usize>> = (0..order).map(decode).collect();
        let mut sum = vec![0u16; order * order];
        for x in 0..order {
            for y in 0..order {
                let s: Vec<usize> = coords[x]
                    .iter()
                    .zip(&coords[y])
                    .zip(&moduli)
                    .map(|((a, b), m)| (a + b) % m)
                    .collect();
                sum[x * order + y] = encode(&s) as u16;
            }
        }
        let mut table = CayleyTable {
            order,
            sum,
            elem_order: vec![1; order],
        };
        for x in 0..order {
            let mut k = 1u64;
            let mut y = x;
            while y != 0 {
                y = table.add(y, x);
                k += 1;
            }
            table.elem_order[x] = k;
        }
        table
    }

    fn add(&self, x: usize, y: usize) -> usize {
        self.sum[x * self.order + y] as usize
    }

    /// `⟨H, g⟩` as the union of the cosets `H + kg`.
    fn join(&self, sub: &Bits, sub_members: &[usize], g: usize) -> Bits {
        let mut out = *sub;
        let mut cur = g;
        while !bit_get(&out, cur) {
            for &h in sub_members {
                bit_set(&mut out, self.add(h, cur));
            }
            cur = self.add(cur, g);
        }
        out
    }
}

/// Outcome of checking `#Aut A ≥ #A(1 - 1/p)` and, for rank at least 2,
/// `#Aut A ≥ #A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lemma1Report {
    pub lower_bound_ok: bool,
    /// `None` when the rank is below 2.
    pub rank2_bound_ok: Option<bool>,
}

impl Lemma1Report {
    pub fn holds(&self) -> bool {
        self.lower_bound_ok && self.rank2_bound_ok.unwrap_or(true)
    }
}

/// Evaluates the automorphism lower bounds with exact integers.
pub fn lemma1_holds(a: &AbelianPGroup) -> Result<Lemma1Report> {
    if a.is_trivial() {
        return Err(Error::InvalidParameter(
            "the automorphism lower bound concerns nontrivial groups".into(),
        ));
    }
    let aut = a.aut_order();
    let order = a.order();
    let lower_bound_ok = &aut * a.p >= &order * (a.p - 1);
    let rank2_bound_ok = (a.rank() >= 2).then(|| aut >= order);
    Ok(Lemma1Report {
        lower_bound_ok,
        rank2_bound_ok,
    })
}
