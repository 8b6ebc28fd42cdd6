//! Reidemeister–Schreier subgroup presentations and a conservative Tietze
//! simplifier.

use std::collections::HashMap;

use crate::coset::{CosetTable, Transversal};
use crate::error::{Error, Result};
use crate::presentation::{Alphabet, Presentation};
use crate::word::{Letter, Word};

/// Presentation of a finite-index subgroup together with the bookkeeping
/// needed to rewrite ambient words into it and back.
#[derive(Debug, Clone)]
pub struct SubgroupPresentation {
    /// Presentation over the surviving Schreier generators.
    pub presentation: Presentation,
    /// Raw Schreier symbol `k` (named `s{k+1}`) is the edge `(coset, generator)`.
    pub schreier_generators: Vec<(usize, usize)>,
    /// Raw Schreier symbol → word over the current generators.
    pub schreier_images: Vec<Word>,
    /// Current generator → raw symbol it descends from.
    pub origin: Vec<usize>,
    /// Raw symbol → ambient word `t · g · t'^-1`.
    pub raw_ambient: Vec<Word>,
    /// Every ambient relator rewritten from every coset, over raw symbols,
    /// including those that reduce to the empty word.
    pub raw_relators: Vec<Word>,
    pub table: CosetTable,
    pub transversal: Transversal,
    /// `true` once Tietze simplification has reached a fixpoint.
    pub simplified: bool,
    pub tietze_steps: usize,
    edge_symbol: Vec<Option<u32>>,
}

impl SubgroupPresentation {
    pub fn ngens(&self) -> usize {
        self.presentation.ngens()
    }

    pub fn nrels(&self) -> usize {
        self.presentation.relators().len()
    }

    pub fn relator_lengths(&self) -> Vec<usize> {
        self.presentation.relators().iter().map(Word::len).collect()
    }

    /// Ambient word of each current generator.
    pub fn ambient_words(&self) -> Vec<Word> {
        self.origin.iter().map(|&k| self.raw_ambient[k].clone()).collect()
    }

    /// Rewrites an ambient word lying in the subgroup as a word over the raw
    /// Schreier symbols.
    pub fn rewrite_raw(&self, w: &Word) -> Result<Word> {
        let (raw, end) = self.rewrite_from(w, 0);
        if end != 0 {
            return Err(Error::NotInSubgroup { coset: end });
        }
        Ok(raw)
    }

    fn rewrite_from(&self, w: &Word, start: usize) -> (Word, usize) {
        let ngens = self.table.ngens();
        let mut c = start;
        let mut out = Word::identity();
        for &l in w.letters() {
            let g = l.generator();
            if l.is_inverse() {
                let d = self.table.act(c, l);
                if let Some(k) = self.edge_symbol[d * ngens + g] {
                    out.push(Letter::inv(k as usize));
                }
                c = d;
            } else {
                if let Some(k) = self.edge_symbol[c * ngens + g] {
                    out.push(Letter::gen(k as usize));
                }
                c = self.table.act(c, l);
            }
        }
        (out, c)
    }

    /// Rewrites an ambient word lying in the subgroup over the current
    /// generators.
    pub fn rewrite(&self, w: &Word) -> Result<Word> {
        Ok(self.rewrite_raw(w)?.substitute(&self.schreier_images))
    }

    /// Maps a word over the current generators back to the ambient group.
    pub fn to_ambient(&self, w: &Word) -> Word {
        w.substitute(&self.ambient_words())
    }
}

/// Nielsen–Schreier rank of an index-`index` subgroup of a free group of
/// rank `rank`.
pub fn schreier_rank(rank: u64, index: u64) -> u64 {
    (rank.saturating_sub(1)) * index + 1
}

/// Reidemeister–Schreier presentation read off a closed coset table.
/// Schreier generators on spanning-tree edges are trivial and never
/// introduced. The result is unsimplified.
pub fn subgroup_presentation(p: &Presentation, t: &CosetTable) -> Result<SubgroupPresentation> {
    if p.ngens() != t.ngens() {
        return Err(Error::InvalidTable("generator count differs from presentation".into()));
    }
    let ngens = p.ngens();
    let n = t.n_cosets();
    let transversal = t.transversal();
    let mut edge_symbol = vec![None; n * ngens];
    let mut schreier_generators = Vec::new();
    let mut raw_ambient = Vec::new();
    for c in 0..n {
        for g in 0..ngens {
            if transversal.is_tree_edge(t, c, g) {
                continue;
            }
            let d = t.act(c, Letter::gen(g));
            edge_symbol[c * ngens + g] = Some(schreier_generators.len() as u32);
            schreier_generators.push((c, g));
            let mut w = transversal.reps[c].clone();
            w.push(Letter::gen(g));
            raw_ambient.push(w.mul(&transversal.reps[d].inverse()));
        }
    }
    let nraw = schreier_generators.len();
    let mut sp = SubgroupPresentation {
        presentation: Presentation::free(Alphabet::numbered("s", nraw)),
        schreier_generators,
        schreier_images: (0..nraw).map(|k| Word::letter(Letter::gen(k))).collect(),
        origin: (0..nraw).collect(),
        raw_ambient,
        raw_relators: Vec::with_capacity(p.relators().len() * n),
        table: t.clone(),
        transversal,
        simplified: false,
        tietze_steps: 0,
        edge_symbol,
    };
    for r in p.relators() {
        for c in 0..n {
            let (w, end) = sp.rewrite_from(r, c);
            if end != c {
                return Err(Error::InvalidTable(format!("relator does not close at coset {c}")));
            }
            sp.raw_relators.push(w);
        }
    }
    sp.presentation = Presentation::new_lossy(sp.presentation.alphabet().clone(), sp.raw_relators.clone())?;
    Ok(sp)
}

/// Outcome of [`tietze`]: which original generators survive, the remaining
/// relators over the survivors, and every original generator's image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TietzeResult {
    pub origin: Vec<usize>,
    pub relators: Vec<Word>,
    pub images: Vec<Word>,
    pub steps: usize,
    pub complete: bool,
}

/// Tietze moves on a presentation with `ngens` generators: length-one
/// relators eliminate their generator, and a generator occurring exactly
/// once across all relators is solved for and substituted. Relators are
/// kept cyclically reduced, and relators that are rotations or inverses of
/// earlier ones are dropped. At most `budget` eliminations are performed.
pub fn tietze(ngens: usize, relators: &[Word], budget: usize) -> TietzeResult {
    let mut state = TietzeState::new(ngens, relators);
    let mut steps = 0;
    let complete = loop {
        let Some((ri, g, value)) = state.next_move() else {
            break true;
        };
        if steps == budget {
            break false;
        }
        steps += 1;
        state.eliminate(ri, g, value);
    };
    state.finish(steps, complete)
}

struct TietzeState {
    alive: Vec<bool>,
    rels: Vec<Option<Word>>,
    keys: HashMap<Word, usize>,
    /// Eliminated generators in order, with their value at elimination time.
    eliminated: Vec<(usize, Word)>,
}

impl TietzeState {
    fn new(ngens: usize, relators: &[Word]) -> Self {
        let mut st = TietzeState {
            alive: vec![true; ngens],
            rels: Vec::with_capacity(relators.len()),
            keys: HashMap::new(),
            eliminated: Vec::new(),
        };
        for r in relators {
            let i = st.rels.len();
            st.rels.push(None);
            st.store(i, r.clone());
        }
        st
    }

    /// Stores a relator at slot `i` unless it is trivial or a duplicate.
    fn store(&mut self, i: usize, r: Word) {
        let r = r.cyclically_reduced();
        if r.is_empty() {
            self.rels[i] = None;
            return;
        }
        let key = r.cyclic_key();
        if let std::collections::hash_map::Entry::Vacant(e) = self.keys.entry(key) {
            e.insert(i);
            self.rels[i] = Some(r);
        } else {
            self.rels[i] = None;
        }
    }

    fn drop_slot(&mut self, i: usize) {
        if let Some(r) = self.rels[i].take() {
            self.keys.remove(&r.cyclic_key());
        }
    }

    /// `(relator slot, generator, value)` of the next elimination.
    fn next_move(&self) -> Option<(usize, usize, Word)> {
        let live = || self.rels.iter().enumerate().filter_map(|(i, r)| r.as_ref().map(|r| (i, r)));
        if let Some((ri, r)) = live().find(|(_, r)| r.len() == 1) {
            return Some((ri, r.letters()[0].generator(), Word::identity()));
        }
        let mut count = vec![0usize; self.alive.len()];
        let mut home = vec![0usize; self.alive.len()];
        for (ri, r) in live() {
            for l in r.letters() {
                count[l.generator()] += 1;
                home[l.generator()] = ri;
            }
        }
        let (g, ri) = (0..self.alive.len())
            .filter(|&g| count[g] == 1)
            .map(|g| (g, home[g]))
            .min_by_key(|&(g, ri)| (self.rels[ri].as_ref().map_or(0, Word::len), ri, g))?;
        let r = self.rels[ri].as_ref().unwrap();
        let pos = r.letters().iter().position(|l| l.generator() == g).unwrap();
        // Rotate to g^e · rest, so g^e = rest^-1.
        let rotated = r.rotate(pos);
        let rest = Word::from_letters(rotated.letters()[1..].iter().copied());
        let value = if rotated.letters()[0].is_inverse() { rest } else { rest.inverse() };
        Some((ri, g, value))
    }

    fn eliminate(&mut self, ri: usize, g: usize, value: Word) {
        self.drop_slot(ri);
        self.alive[g] = false;
        let mut subst: Vec<Word> = (0..self.alive.len()).map(|h| Word::letter(Letter::gen(h))).collect();
        subst[g] = value.clone();
        let touched: Vec<usize> = (0..self.rels.len())
            .filter(|&i| self.rels[i].as_ref().is_some_and(|r| r.occurrences(g) > 0))
            .collect();
        for i in touched {
            let r = self.rels[i].as_ref().unwrap().substitute(&subst);
            self.drop_slot(i);
            self.store(i, r);
        }
        self.eliminated.push((g, value));
    }

    fn finish(self, steps: usize, complete: bool) -> TietzeResult {
        let n = self.alive.len();
        let origin: Vec<usize> = (0..n).filter(|&g| self.alive[g]).collect();
        let mut images = vec![Word::identity(); n];
        for (new, &g) in origin.iter().enumerate() {
            images[g] = Word::letter(Letter::gen(new));
        }
        // A value only mentions generators alive when it was eliminated, so
        // resolving in reverse order sees only finished images.
        for (g, value) in self.eliminated.iter().rev() {
            images[*g] = value.substitute(&images);
        }
        let relators = self.rels.into_iter().flatten().map(|r| r.substitute(&images)).collect();
        TietzeResult { origin, relators, images, steps, complete }
    }
}

/// Applies [`tietze`] to a subgroup presentation, keeping the rewriting data
/// in step. The result is flagged non-final when the budget runs out.
pub fn tietze_simplify(sp: &SubgroupPresentation, budget: usize) -> SubgroupPresentation {
    let res = tietze(sp.ngens(), sp.presentation.relators(), budget);
    let names = sp.presentation.alphabet().names();
    let alphabet = Alphabet::new(res.origin.iter().map(|&i| names[i].clone())).expect("names stay distinct");
    let mut out = sp.clone();
    out.presentation = Presentation::new(alphabet, res.relators).expect("normalised relators are non-empty");
    out.schreier_images = sp.schreier_images.iter().map(|w| w.substitute(&res.images)).collect();
    out.origin = res.origin.iter().map(|&i| sp.origin[i]).collect();
    out.simplified = res.complete;
    out.tietze_steps = sp.tietze_steps + res.steps;
    out
}

/// Simplifies an arbitrary presentation; returns the new presentation and
/// the image of every old generator.
pub fn simplify_presentation(p: &Presentation, budget: usize) -> (Presentation, Vec<Word>, bool) {
    let res = tietze(p.ngens(), p.relators(), budget);
    let names = p.alphabet().names();
    let alphabet = Alphabet::new(res.origin.iter().map(|&i| names[i].clone())).expect("names stay distinct");
    let q = Presentation::new(alphabet, res.relators).expect("normalised relators are non-empty");
    (q, res.images, res.complete)
}

/// [`SubgroupPresentation::rewrite`] as a free function.
pub fn rewrite_in_subgroup(sp: &SubgroupPresentation, w: &Word) -> Result<Word> {
    sp.rewrite(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset::{enumerate, table_from_homomorphism, EnumLimits};
    use crate::free_product::fp_normal_form;
    use crate::word::commutator;
    use proptest::prelude::*;

    const BUDGET: usize = 10_000;

    fn a_group() -> Presentation {
        Presentation::parse("gens: x,y\nrels: x^2, y^4").unwrap()
    }

    fn b_gens(p: &Presentation) -> Vec<Word> {
        let x = p.word("x").unwrap();
        let y = p.word("y").unwrap();
        (1..=3).map(|k| commutator(&x, &y.pow(k))).collect()
    }

    fn cartesian() -> SubgroupPresentation {
        let a = a_group();
        let t = enumerate(&a, &b_gens(&a), EnumLimits::default()).unwrap().table;
        tietze_simplify(&subgroup_presentation(&a, &t).unwrap(), BUDGET)
    }

    #[test]
    fn rank_formula() {
        assert_eq!(schreier_rank(3, 8), 17);
        assert_eq!(schreier_rank(5, 1), 5);
        assert_eq!(schreier_rank(2, 4), 5);
    }

    #[test]
    fn cartesian_subgroup_is_free_of_rank_3() {
        let sp = cartesian();
        assert!(sp.simplified);
        assert_eq!((sp.ngens(), sp.nrels()), (3, 0));
        for w in sp.ambient_words() {
            assert!(sp.table.trace(&w, 0) == 0);
        }
    }

    #[test]
    fn raw_relators_close_in_ambient_group() {
        let a = a_group();
        let t = enumerate(&a, &b_gens(&a), EnumLimits::default()).unwrap().table;
        let sp = subgroup_presentation(&a, &t).unwrap();
        assert_eq!(sp.raw_relators.len(), a.relators().len() * t.index());
        assert_eq!(sp.schreier_generators.len(), 2 * 8 - 7);
        for r in &sp.raw_relators {
            let amb = r.substitute(&sp.raw_ambient);
            assert_eq!(t.trace(&amb, 0), 0);
            assert!(fp_normal_form(&amb, [2, 4]).unwrap().is_identity());
        }
    }

    #[test]
    fn index_one_is_tietze_equivalent() {
        let p = Presentation::parse("gens: a,b\nrels: a^3, b^2, (a*b)^4").unwrap();
        let t = enumerate(&p, &[p.word("a").unwrap(), p.word("b").unwrap()], EnumLimits::default()).unwrap().table;
        let sp = subgroup_presentation(&p, &t).unwrap();
        assert_eq!(sp.ngens(), 2);
        assert_eq!(sp.presentation.relators(), p.relators());
    }

    #[test]
    fn length_one_relator_is_eliminated() {
        let p = Presentation::parse("gens: a,b\nrels: a, a*b^2*a^-1*b^-2, a*b^3").unwrap();
        let (q, images, complete) = simplify_presentation(&p, BUDGET);
        assert!(complete);
        assert_eq!(q.to_string(), "gens: b\nrels: b^3\n");
        assert!(images[0].is_empty());
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let p = Presentation::parse("gens: a,b,c\nrels: a, b, c").unwrap();
        let (q, _, complete) = simplify_presentation(&p, 1);
        assert!(!complete);
        assert_eq!(q.ngens(), 2);
    }

    #[test]
    fn free_group_subgroups_match_rank_formula() {
        // Kernels of maps F_r -> (Z/2)^d with generators sent to an
        // arbitrary spanning set.
        for r in 1..=3usize {
            for d in 0..=3usize.min(r) {
                let f = Presentation::free(Alphabet::numbered("g", r));
                let images: Vec<Vec<u32>> =
                    (0..r).map(|g| (0..d).map(|k| u32::from(g == k || (g >= d && k == 0))).collect()).collect();
                let t = table_from_homomorphism(&f, &images, 2, d).unwrap();
                let sp = tietze_simplify(&subgroup_presentation(&f, &t).unwrap(), BUDGET);
                assert_eq!(sp.ngens() as u64, schreier_rank(r as u64, 1 << d), "r={r} d={d}");
                assert_eq!(sp.nrels(), 0);
            }
        }
        // Index 3, 5, 6, 7 via cyclic quotients of F_2.
        for (p, n) in [(3u32, 3u64), (5, 5), (7, 7)] {
            let f = Presentation::free(Alphabet::numbered("g", 2));
            let t = table_from_homomorphism(&f, &[vec![1], vec![1]], p, 1).unwrap();
            let sp = subgroup_presentation(&f, &t).unwrap();
            assert_eq!(sp.ngens() as u64, schreier_rank(2, n));
        }
    }

    #[test]
    fn squares_subgroup_of_free_rank_two() {
        let f = Presentation::parse("gens: a,b\nrels:").unwrap();
        let t = table_from_homomorphism(&f, &[vec![1, 0], vec![0, 1]], 2, 2).unwrap();
        let sp = subgroup_presentation(&f, &t).unwrap();
        assert_eq!((sp.ngens(), sp.nrels()), (5, 0));
    }

    #[test]
    fn xy_powers_in_cartesian_basis() {
        let a = a_group();
        let sp = cartesian();
        let xy = a.word("x*y").unwrap();
        let w4 = sp.rewrite(&xy.pow(4)).unwrap();
        let w8 = sp.rewrite(&xy.pow(8)).unwrap();
        assert_eq!(w8, w4.mul(&w4));
        assert!(sp.rewrite(&xy).is_err());
        assert!(sp.rewrite(&Word::identity()).unwrap().is_empty());
    }

    fn word_strategy(max_len: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec((0usize..2, any::<bool>()), 0..=max_len)
            .prop_map(|v| Word::from_letters(v.into_iter().map(|(g, i)| Letter::new(g, i))))
    }

    proptest! {
        #[test]
        fn rewrite_then_back_substitute_is_identity(w in word_strategy(16)) {
            let sp = cartesian();
            let end = sp.table.trace(&w, 0);
            // Multiply by the inverse transversal element so the word lies in B.
            let w = w.mul(&sp.transversal.reps[end].inverse());
            let r = sp.rewrite(&w).unwrap();
            let back = sp.to_ambient(&r);
            prop_assert_eq!(fp_normal_form(&back, [2, 4]).unwrap(), fp_normal_form(&w, [2, 4]).unwrap());
            let raw = sp.rewrite_raw(&w).unwrap();
            prop_assert_eq!(raw.substitute(&sp.raw_ambient), w);
        }
    }
}
