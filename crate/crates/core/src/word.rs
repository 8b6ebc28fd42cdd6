//! Letters and freely reduced words over a finite alphabet.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A signed generator symbol. Generator `i` is stored as `i + 1`, its formal
/// inverse as `-(i + 1)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Letter(i32);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        let v = generator as i32 + 1;
        Letter(if inverse { -v } else { v })
    }

    pub fn gen(generator: usize) -> Self {
        Letter::new(generator, false)
    }

    pub fn inv(generator: usize) -> Self {
        Letter::new(generator, true)
    }

    #[inline]
    pub fn generator(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    #[inline]
    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    #[inline]
    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    /// +1 or -1.
    #[inline]
    pub fn sign(self) -> i64 {
        self.0.signum() as i64
    }

    /// Column of this letter in a coset table: `2 * generator + is_inverse`.
    #[inline]
    pub fn column(self) -> usize {
        2 * self.generator() + self.is_inverse() as usize
    }

    #[inline]
    pub fn from_column(column: usize) -> Letter {
        Letter::new(column / 2, column % 2 == 1)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inverse() {
            write!(f, "g{}^-1", self.generator())
        } else {
            write!(f, "g{}", self.generator())
        }
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<Letter>);

/// Freely reduces a letter sequence with a single stack pass.
pub fn free_reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word(out)
}

/// `[u, v] = u v u^-1 v^-1`, freely reduced.
pub fn commutator(u: &Word, v: &Word) -> Word {
    u.mul(v).mul(&u.inverse()).mul(&v.inverse())
}

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        free_reduce(letters)
    }

    /// Word consisting of a single generator (or its inverse).
    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    /// Builds a word from signed 1-based integers (`2` is generator 1, `-1`
    /// the inverse of generator 0). Zero entries are ignored.
    pub fn from_signed(v: &[i32]) -> Self {
        free_reduce(v.iter().filter(|&&x| x != 0).map(|&x| Letter(x)))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        for &l in &other.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Appends `other` in place, cancelling at the seam.
    pub fn mul_assign(&mut self, other: &Word) {
        for &l in &other.0 {
            if self.0.last() == Some(&l.inverse()) {
                self.0.pop();
            } else {
                self.0.push(l);
            }
        }
    }

    pub fn push(&mut self, l: Letter) {
        if self.0.last() == Some(&l.inverse()) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let (conj, core) = base.cyclic_decomposition();
        let mut body = Vec::with_capacity(core.len() * n.unsigned_abs() as usize);
        for _ in 0..n.unsigned_abs() {
            body.extend_from_slice(core.letters());
        }
        conj.mul(&Word(body)).mul(&conj.inverse())
    }

    /// Writes the word as `c · core · c^-1` with `core` cyclically reduced.
    pub fn cyclic_decomposition(&self) -> (Word, Word) {
        let n = self.0.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.0[k] == self.0[n - 1 - k].inverse() {
            k += 1;
        }
        (Word(self.0[..k].to_vec()), Word(self.0[k..n - k].to_vec()))
    }

    pub fn cyclically_reduced(&self) -> Word {
        self.cyclic_decomposition().1
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.0.len() < 2 || self.0[0] != self.0[self.0.len() - 1].inverse()
    }

    /// Cyclic rotation by `k` letters to the left. Only meaningful on
    /// cyclically reduced words, where the result is again reduced.
    pub fn rotate(&self, k: usize) -> Word {
        if self.0.is_empty() {
            return Word::identity();
        }
        let k = k % self.0.len();
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }

    /// Lexicographically least rotation of the word or of its inverse.
    /// Two cyclically reduced relators with equal keys define the same
    /// normal closure.
    pub fn cyclic_key(&self) -> Word {
        let w = self.cyclically_reduced();
        let inv = w.inverse();
        (0..w.len().max(1))
            .flat_map(|k| [w.rotate(k), inv.rotate(k)])
            .min()
            .unwrap_or_default()
    }

    /// Exponent sum of every generator below `ngens`.
    pub fn exponent_sums(&self, ngens: usize) -> Vec<i64> {
        let mut v = vec![0i64; ngens];
        for l in &self.0 {
            v[l.generator()] += l.sign();
        }
        v
    }

    /// Largest generator index used, if any.
    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|l| l.generator()).max()
    }

    /// Number of occurrences of generator `g` (either sign).
    pub fn occurrences(&self, g: usize) -> usize {
        self.0.iter().filter(|l| l.generator() == g).count()
    }

    /// Replaces every generator `g` by `images[g]`.
    pub fn substitute(&self, images: &[Word]) -> Word {
        let mut out = Word::identity();
        for &l in &self.0 {
            let img = &images[l.generator()];
            if l.is_inverse() {
                out.mul_assign(&img.inverse());
            } else {
                out.mul_assign(img);
            }
        }
        out
    }

    /// For a cyclically reduced word, the shortest `root` with
    /// `self = root^k`, together with `k`.
    pub fn primitive_root(&self) -> (Word, usize) {
        let n = self.0.len();
        for d in 1..=n {
            if n.is_multiple_of(d) && (d..n).all(|i| self.0[i] == self.0[i - d]) {
                return (Word(self.0[..d].to_vec()), n / d);
            }
        }
        (Word::identity(), 1)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "·")?;
            }
            write!(f, "{l:?}")?;
        }
        Ok(())
    }
}

impl From<Letter> for Word {
    fn from(l: Letter) -> Self {
        Word::letter(l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x() -> Word {
        Word::letter(Letter::gen(0))
    }
    fn y() -> Word {
        Word::letter(Letter::gen(1))
    }

    #[test]
    fn cancellation() {
        let w = free_reduce([Letter::gen(0), Letter::inv(0)]);
        assert!(w.is_empty());
    }

    #[test]
    fn already_reduced() {
        let w = free_reduce([Letter::gen(0), Letter::gen(1), Letter::inv(0), Letter::inv(1)]);
        assert_eq!(w.len(), 4);
    }

    #[test]
    fn commutator_examples() {
        assert!(commutator(&x(), &x()).is_empty());
        let c = commutator(&x(), &y());
        assert_eq!(c, Word::from_signed(&[1, 2, -1, -2]));
    }

    #[test]
    fn powers_of_conjugates_stay_reduced() {
        let w = Word::from_signed(&[2, 1, 1, -2]);
        assert_eq!(w.pow(3), Word::from_signed(&[2, 1, 1, 1, 1, 1, 1, -2]));
        assert_eq!(w.pow(-1), w.inverse());
        assert!(w.pow(0).is_empty());
    }

    #[test]
    fn primitive_roots() {
        let w = Word::from_signed(&[1, 2, 1, 2, 1, 2]);
        assert_eq!(w.primitive_root(), (Word::from_signed(&[1, 2]), 3));
        let w = Word::from_signed(&[1, 1, 2]);
        assert_eq!(w.primitive_root().1, 1);
    }

    #[test]
    fn cyclic_keys_identify_rotations_and_inverses() {
        let w = Word::from_signed(&[1, 2, -1, 2]);
        assert_eq!(w.cyclic_key(), w.rotate(1).cyclic_key());
        assert_eq!(w.cyclic_key(), w.inverse().rotate(3).cyclic_key());
        assert_ne!(w.cyclic_key(), Word::from_signed(&[1, 2, 1, 2]).cyclic_key());
    }

    fn raw_letters(max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
        prop::collection::vec((0usize..3, any::<bool>()), 0..=max_len)
            .prop_map(|v| v.into_iter().map(|(g, i)| Letter::new(g, i)).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn word_times_inverse_is_identity(raw in raw_letters(64)) {
            let w = free_reduce(raw);
            prop_assert!(w.mul(&w.inverse()).is_empty());
        }

        #[test]
        fn reduction_is_idempotent_and_shortening(raw in raw_letters(64)) {
            let w = free_reduce(raw.clone());
            prop_assert!(w.len() <= raw.len());
            prop_assert_eq!(free_reduce(w.letters().to_vec()), w.clone());
            for pair in w.letters().windows(2) {
                prop_assert_ne!(pair[0], pair[1].inverse());
            }
        }

        #[test]
        fn commutator_inverse_swaps(a in raw_letters(12), b in raw_letters(12)) {
            let (u, v) = (free_reduce(a), free_reduce(b));
            prop_assert_eq!(commutator(&u, &v).inverse(), commutator(&v, &u));
        }
    }
}
