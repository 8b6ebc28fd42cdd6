//! Exact normal forms in a free product of two finite cyclic groups
//! `<x | x^m1> * <y | y^m2>`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::word::Word;

/// Alternating sequence of syllables `(factor, exponent)` with
/// `factor ∈ {0, 1}` and `1 <= exponent < order[factor]`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SyllableWord {
    orders: [u32; 2],
    syllables: Vec<(u8, u32)>,
}

impl SyllableWord {
    pub fn identity(orders: [u32; 2]) -> Self {
        SyllableWord { orders, syllables: Vec::new() }
    }

    pub fn orders(&self) -> [u32; 2] {
        self.orders
    }

    pub fn syllables(&self) -> &[(u8, u32)] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    fn push(&mut self, factor: u8, exponent: i64) {
        let m = self.orders[factor as usize] as i64;
        let e = exponent.rem_euclid(m) as u32;
        if e == 0 {
            return;
        }
        match self.syllables.last_mut() {
            Some((f, old)) if *f == factor => {
                let sum = (*old + e) % m as u32;
                if sum == 0 {
                    self.syllables.pop();
                } else {
                    *old = sum;
                }
            }
            _ => self.syllables.push((factor, e)),
        }
    }

    /// Product in the free product, re-reduced at the seam.
    pub fn mul(&self, other: &SyllableWord) -> SyllableWord {
        assert_eq!(self.orders, other.orders);
        let mut out = self.clone();
        for &(f, e) in &other.syllables {
            out.push(f, e as i64);
        }
        out
    }

    /// Expands back into a positive word over `x = generator 0`, `y = generator 1`.
    pub fn to_word(&self) -> Word {
        Word::from_letters(self.syllables.iter().flat_map(|&(f, e)| {
            std::iter::repeat_n(crate::word::Letter::gen(f as usize), e as usize)
        }))
    }
}

impl fmt::Debug for SyllableWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return write!(f, "ε");
        }
        let names = ["x", "y"];
        let parts: Vec<String> = self
            .syllables
            .iter()
            .map(|&(k, e)| if e == 1 { names[k as usize].to_string() } else { format!("{}^{e}", names[k as usize]) })
            .collect();
        write!(f, "{}", parts.join("·"))
    }
}

/// Normal form of a word over `{x, y}` in `<x>_{m1} * <y>_{m2}`.
/// Letters beyond generator 1 are rejected.
pub fn fp_normal_form(w: &Word, orders: [u32; 2]) -> Result<SyllableWord> {
    let mut out = SyllableWord::identity(orders);
    for l in w.letters() {
        if l.generator() > 1 {
            return Err(Error::AlphabetMismatch { generator: l.generator(), ngens: 2 });
        }
        out.push(l.generator() as u8, l.sign());
    }
    Ok(out)
}

/// Equality in the free product.
pub fn equal_in_free_product(a: &Word, b: &Word, orders: [u32; 2]) -> Result<bool> {
    Ok(fp_normal_form(a, orders)? == fp_normal_form(b, orders)?)
}
