//! Exact membership in the exponent-`p` series of a free group without
//! building coset tables.
//!
//! A coset of the `(j+1)`-th term is determined by the `j`-th coset together
//! with the mod-`p` signed edge counts of the path traced in the Schreier
//! graph of the `j`-th term (the cycle space of that graph is the first
//! homology of the `j`-th term). Only the vertices a word actually visits
//! are ever named, so the cost grows with the word length, not the index.

use std::collections::{BTreeMap, HashMap};

use crate::word::Word;

type Chain = Vec<((u32, u32), u32)>;

/// Smallest `v` with `w ∉ δ_v(F)`, where `w` is a word over a free basis of
/// `F`. `None` for the empty word or when `max_depth` levels are exhausted.
pub fn free_membership_level(w: &Word, prime: u32, max_depth: usize) -> Option<usize> {
    if w.is_empty() {
        return None;
    }
    let letters = w.letters();
    let n = letters.len();
    let mut ids = vec![0u32; n + 1];
    for j in 1..=max_depth {
        let mut intern: HashMap<(u32, Chain), u32> = HashMap::new();
        let mut chain: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        let mut next = Vec::with_capacity(n + 1);
        let mut name = |c: u32, chain: &BTreeMap<(u32, u32), u32>| -> u32 {
            let key = (c, chain.iter().map(|(&e, &k)| (e, k)).collect::<Chain>());
            let fresh = intern.len() as u32;
            *intern.entry(key).or_insert(fresh)
        };
        next.push(name(ids[0], &chain));
        for (t, l) in letters.iter().enumerate() {
            let g = l.generator() as u32;
            let (edge, step) = if l.is_inverse() { ((ids[t + 1], g), prime - 1) } else { ((ids[t], g), 1) };
            let entry = chain.entry(edge).or_insert(0);
            *entry = (*entry + step) % prime;
            if *entry == 0 {
                chain.remove(&edge);
            }
            next.push(name(ids[t + 1], &chain));
        }
        ids = next;
        if ids[n] != ids[0] {
            return Some(j);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::{commutator, Letter};

    fn a() -> Word {
        Word::letter(Letter::gen(0))
    }

    fn b() -> Word {
        Word::letter(Letter::gen(1))
    }

    #[test]
    fn powers_of_a_generator() {
        for k in 0..6 {
            assert_eq!(free_membership_level(&a().pow(1 << k), 2, 64), Some(k + 1));
        }
        assert_eq!(free_membership_level(&a().pow(9), 3, 64), Some(3));
        assert_eq!(free_membership_level(&a().pow(6), 2, 64), Some(2));
    }

    #[test]
    fn commutators_sink_one_level_per_nesting() {
        let c = commutator(&a(), &b());
        assert_eq!(free_membership_level(&c, 2, 64), Some(2));
        assert_eq!(free_membership_level(&c, 3, 64), Some(2));
        let cc = commutator(&c, &commutator(&a(), &b().pow(-1)));
        assert!(free_membership_level(&cc, 2, 64).unwrap() >= 3);
        assert_eq!(free_membership_level(&c.mul(&a().pow(2)), 2, 64), Some(2));
    }

    #[test]
    fn trivial_and_capped() {
        assert_eq!(free_membership_level(&Word::identity(), 2, 64), None);
        assert_eq!(free_membership_level(&a().pow(8), 2, 3), None);
    }

    #[test]
    fn conjugation_invariant() {
        let w = a().pow(4).mul(&b().pow(2));
        let v = free_membership_level(&w, 2, 64);
        for c in [a(), b(), a().mul(&b().pow(-3))] {
            let conj = c.mul(&w).mul(&c.inverse());
            assert_eq!(free_membership_level(&conj, 2, 64), v);
        }
    }
}
