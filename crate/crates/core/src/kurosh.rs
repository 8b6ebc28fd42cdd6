//! Layer ranks of free products of cyclic `p`-groups and a free group,
//! computed from their structure instead of a coset table.
//!
//! For `H = Z_{p^{a_1}} * … * Z_{p^{a_c}} * F_k` (all `a_j ≥ 1`) the mod-`p`
//! abelianisation has rank `d = c + k`. The kernel `K` of `H -> (Z/p)^d` is
//! normal of index `p^d`; by the Kurosh subgroup theorem it is again such a
//! free product, with `p^{d-1}` copies of `Z_{p^{a_j - 1}}` for each factor,
//! and its free rank follows from multiplicativity of the Euler
//! characteristic: `k' = 1 + p^d (k + c - 1) - c p^{d-1}`.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::presentation::Presentation;
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CyclicFreeProduct {
    pub prime: u32,
    /// `a -> number of free factors isomorphic to Z_{p^a}`, `a ≥ 1`.
    pub factors: BTreeMap<u32, u128>,
    pub free_rank: u128,
}

impl CyclicFreeProduct {
    pub fn free(prime: u32, rank: u128) -> Self {
        CyclicFreeProduct { prime, factors: BTreeMap::new(), free_rank: rank }
    }

    pub fn n_factors(&self) -> u128 {
        self.factors.values().sum()
    }

    pub fn layer_rank(&self) -> Result<u128> {
        self.n_factors()
            .checked_add(self.free_rank)
            .ok_or_else(|| Error::Overflow("layer rank".into()))
    }

    /// Structure of the next term of the series.
    pub fn delta1(&self) -> Result<CyclicFreeProduct> {
        let overflow = || Error::Overflow(format!("layer rank {:?} too large for index arithmetic", self.layer_rank()));
        let d = self.layer_rank()?;
        let c = self.n_factors();
        if d == 0 {
            return Ok(self.clone());
        }
        let p = self.prime as u128;
        let d32 = u32::try_from(d).map_err(|_| overflow())?;
        let pd = p.checked_pow(d32).ok_or_else(overflow)?;
        let pd1 = pd / p;
        let mut factors = BTreeMap::new();
        for (&a, &count) in &self.factors {
            if a >= 2 {
                *factors.entry(a - 1).or_insert(0) += count.checked_mul(pd1).ok_or_else(overflow)?;
            }
        }
        // k + c - 1 >= 0 since d = k + c >= 1.
        let free_rank = pd
            .checked_mul(self.free_rank + c - 1)
            .and_then(|x| x.checked_add(1))
            .and_then(|x| x.checked_sub(c.checked_mul(pd1)?))
            .ok_or_else(overflow)?;
        Ok(CyclicFreeProduct { prime: self.prime, factors, free_rank })
    }
}

/// `Some(a)` when `n = p^a`.
fn p_valuation_exact(mut n: u64, p: u64) -> Option<u32> {
    let mut a = 0;
    while n > 1 {
        if !n.is_multiple_of(p) {
            return None;
        }
        n /= p;
        a += 1;
    }
    (n == 1).then_some(a)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Recognises presentations of the form `<X | u_1^{n_1}, …>` where every
/// `n_j` is a power of `p` and each root `u_j` has a generator occurring
/// exactly once in it and in no other root; such roots extend to a free
/// basis, so the group is `*_j Z_{n_j} * F_{|X| - #roots}`.
pub fn recognise(p: &Presentation, prime: u32) -> Option<CyclicFreeProduct> {
    // Root (by cyclic key) -> (root, gcd of exponents).
    let mut roots: Vec<(Word, u64)> = Vec::new();
    let mut index: HashMap<Word, usize> = HashMap::new();
    for r in p.relators() {
        let (root, n) = r.primitive_root();
        let key = root.cyclic_key();
        match index.get(&key) {
            Some(&i) => roots[i].1 = gcd(roots[i].1, n as u64),
            None => {
                index.insert(key, roots.len());
                roots.push((root, n as u64));
            }
        }
    }
    let mut total = vec![0usize; p.ngens()];
    for (u, _) in &roots {
        for l in u.letters() {
            total[l.generator()] += 1;
        }
    }
    for (u, _) in &roots {
        let private = (0..p.ngens()).any(|g| {
            let here = u.occurrences(g);
            here == 1 && total[g] == 1
        });
        if !private {
            return None;
        }
    }
    let mut factors = BTreeMap::new();
    for (_, n) in &roots {
        let a = p_valuation_exact(*n, prime as u64)?;
        if a >= 1 {
            *factors.entry(a).or_insert(0) += 1;
        }
    }
    Some(CyclicFreeProduct { prime, factors, free_rank: (p.ngens() - roots.len()) as u128 })
}
