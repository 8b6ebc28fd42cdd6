//! Coset tables and Todd–Coxeter enumeration (HLT strategy with immediate
//! coincidence processing).

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, LimitExceeded, Result};
use crate::presentation::Presentation;
use crate::word::{Letter, Word};

const UNDEF: u32 = u32::MAX;

/// Resource limits shared by enumeration and everything built on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumLimits {
    /// Maximum number of coset rows ever allocated (including rows later
    /// found coincident).
    pub max_cosets: usize,
    pub max_time: Option<Duration>,
}

impl EnumLimits {
    pub fn new(max_cosets: usize) -> Self {
        EnumLimits { max_cosets: max_cosets.max(1), max_time: None }
    }

    pub fn with_time(mut self, t: Duration) -> Self {
        self.max_time = Some(t);
        self
    }
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits::new(200_000)
    }
}

/// Closed permutation action of the signed generators on cosets.
/// Coset 0 is the subgroup itself.
#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct CosetTable {
    ngens: usize,
    n_cosets: usize,
    action: Vec<u32>,
}

impl std::fmt::Debug for CosetTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "CosetTable({} cosets)", self.n_cosets)?;
        for c in 0..self.n_cosets {
            writeln!(f, "  {c}: {:?}", self.row(c))?;
        }
        Ok(())
    }
}

/// A prefix-closed set of coset representatives with the spanning tree it
/// came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transversal {
    pub reps: Vec<Word>,
    /// `tree[c] = (parent, letter)` with `parent · letter = c`; `None` for
    /// coset 0.
    pub tree: Vec<Option<(usize, Letter)>>,
}

impl Transversal {
    /// Whether the positive generator edge `c --g--> c·g` belongs to the
    /// spanning tree (in either direction).
    pub fn is_tree_edge(&self, table: &CosetTable, c: usize, g: usize) -> bool {
        let d = table.act(c, Letter::gen(g));
        self.tree[d] == Some((c, Letter::gen(g))) || self.tree[c] == Some((d, Letter::inv(g)))
    }
}

impl CosetTable {
    /// Builds a table from explicit per-column images. `rows[c][col]` is the
    /// image of coset `c` under the letter with column `col`.
    pub fn from_rows(ngens: usize, rows: &[Vec<usize>]) -> Result<Self> {
        let cols = 2 * ngens;
        let mut action = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::InvalidTable(format!("row has {} columns, expected {cols}", row.len())));
            }
            for &d in row {
                if d >= rows.len() {
                    return Err(Error::InvalidTable(format!("entry {d} out of range")));
                }
                action.push(d as u32);
            }
        }
        let t = CosetTable { ngens, n_cosets: rows.len(), action };
        t.check_permutation()?;
        Ok(t)
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn n_cosets(&self) -> usize {
        self.n_cosets
    }

    /// Index of the subgroup.
    pub fn index(&self) -> usize {
        self.n_cosets
    }

    #[inline]
    pub fn act(&self, coset: usize, l: Letter) -> usize {
        self.action[coset * 2 * self.ngens + l.column()] as usize
    }

    pub fn row(&self, coset: usize) -> &[u32] {
        let cols = 2 * self.ngens;
        &self.action[coset * cols..(coset + 1) * cols]
    }

    /// Traces `w` letter by letter from `start`.
    pub fn trace(&self, w: &Word, start: usize) -> usize {
        w.letters().iter().fold(start, |c, &l| self.act(c, l))
    }

    fn check_permutation(&self) -> Result<()> {
        for c in 0..self.n_cosets {
            for col in 0..2 * self.ngens {
                let l = Letter::from_column(col);
                let d = self.act(c, l);
                if self.act(d, l.inverse()) != c {
                    return Err(Error::InvalidTable(format!("column {col} is not inverted at coset {c}")));
                }
            }
        }
        Ok(())
    }

    /// Exhaustive check: permutation action, every relator closes at every
    /// coset, every subgroup generator fixes coset 0.
    pub fn validate(&self, p: &Presentation, subgroup_gens: &[Word]) -> Result<()> {
        if p.ngens() != self.ngens {
            return Err(Error::InvalidTable("generator count differs from presentation".into()));
        }
        self.check_permutation()?;
        for (i, r) in p.relators().iter().enumerate() {
            for c in 0..self.n_cosets {
                if self.trace(r, c) != c {
                    return Err(Error::InvalidTable(format!("relator {i} moves coset {c}")));
                }
            }
        }
        for (i, w) in subgroup_gens.iter().enumerate() {
            let d = self.trace(w, 0);
            if d != 0 {
                return Err(Error::InvalidTable(format!("subgroup generator {i} sends coset 0 to {d}")));
            }
        }
        Ok(())
    }

    /// Breadth-first Schreier transversal, scanning letters in column order.
    pub fn transversal(&self) -> Transversal {
        let n = self.n_cosets;
        let mut reps: Vec<Option<Word>> = vec![None; n];
        let mut tree = vec![None; n];
        reps[0] = Some(Word::identity());
        let mut queue = VecDeque::from([0usize]);
        while let Some(c) = queue.pop_front() {
            for col in 0..2 * self.ngens {
                let l = Letter::from_column(col);
                let d = self.act(c, l);
                if reps[d].is_none() {
                    let mut w = reps[c].clone().unwrap();
                    w.push(l);
                    reps[d] = Some(w);
                    tree[d] = Some((c, l));
                    queue.push_back(d);
                }
            }
        }
        Transversal {
            reps: reps.into_iter().map(|r| r.expect("coset table is connected")).collect(),
            tree,
        }
    }

    /// Renumbers cosets in breadth-first order from coset 0.
    pub fn standardized(&self) -> CosetTable {
        let n = self.n_cosets;
        let mut order = Vec::with_capacity(n);
        let mut new_id = vec![UNDEF; n];
        new_id[0] = 0;
        order.push(0);
        let mut i = 0;
        while i < order.len() {
            let c = order[i];
            for col in 0..2 * self.ngens {
                let d = self.act(c, Letter::from_column(col));
                if new_id[d] == UNDEF {
                    new_id[d] = order.len() as u32;
                    order.push(d);
                }
            }
            i += 1;
        }
        let mut action = Vec::with_capacity(self.action.len());
        for &c in &order {
            action.extend(self.row(c).iter().map(|&d| new_id[d as usize]));
        }
        CosetTable { ngens: self.ngens, n_cosets: order.len(), action }
    }
}

/// [`CosetTable::trace`] as a free function.
pub fn coset_action(t: &CosetTable, w: &Word, start: usize) -> usize {
    t.trace(w, start)
}

/// Representatives of a breadth-first Schreier transversal, coset 0 first.
pub fn schreier_transversal(t: &CosetTable) -> Vec<Word> {
    t.transversal().reps
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EnumStats {
    pub n_defined: usize,
    pub n_coincidences: usize,
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    pub table: CosetTable,
    pub stats: EnumStats,
}

/// Enumerates the cosets of `<subgroup_gens>` in the group presented by `p`.
///
/// The result is validated before it is returned. Hitting a limit is an
/// ordinary error value so callers can degrade.
pub fn enumerate(p: &Presentation, subgroup_gens: &[Word], limits: EnumLimits) -> Result<Enumeration> {
    if p.ngens() == 0 {
        return Err(Error::EmptyAlphabet);
    }
    for w in subgroup_gens {
        p.alphabet().check_word(w)?;
    }
    let mut e = Enumerator::new(p.ngens(), limits);
    let relators: Vec<Vec<usize>> = p.relators().iter().map(columns).collect();
    let subgroup: Vec<Vec<usize>> = subgroup_gens.iter().map(columns).collect();
    e.run(&relators, &subgroup)?;
    let table = e.compact();
    table.validate(p, subgroup_gens)?;
    Ok(Enumeration { table, stats: e.stats })
}

fn columns(w: &Word) -> Vec<usize> {
    w.letters().iter().map(|l| l.column()).collect()
}

struct Enumerator {
    cols: usize,
    table: Vec<u32>,
    parent: Vec<u32>,
    queue: Vec<u32>,
    limits: EnumLimits,
    started: Instant,
    stats: EnumStats,
}

impl Enumerator {
    fn new(ngens: usize, limits: EnumLimits) -> Self {
        let cols = 2 * ngens;
        Enumerator {
            cols,
            table: vec![UNDEF; cols],
            parent: vec![0],
            queue: Vec::new(),
            limits,
            started: Instant::now(),
            stats: EnumStats::default(),
        }
    }

    #[inline]
    fn get(&self, c: u32, col: usize) -> u32 {
        self.table[c as usize * self.cols + col]
    }

    #[inline]
    fn set(&mut self, c: u32, col: usize, d: u32) {
        self.table[c as usize * self.cols + col] = d;
    }

    fn n_alloc(&self) -> usize {
        self.parent.len()
    }

    fn live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut r = c;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        let mut c = c;
        while self.parent[c as usize] != r {
            let next = self.parent[c as usize];
            self.parent[c as usize] = r;
            c = next;
        }
        r
    }

    fn define(&mut self, c: u32, col: usize) -> Result<()> {
        if self.n_alloc() >= self.limits.max_cosets {
            return Err(LimitExceeded::Cosets { max_cosets: self.limits.max_cosets }.into());
        }
        if let Some(limit) = self.limits.max_time {
            if self.stats.n_defined.is_multiple_of(256) && self.started.elapsed() > limit {
                return Err(LimitExceeded::Time { limit }.into());
            }
        }
        let d = self.parent.len() as u32;
        self.parent.push(d);
        self.table.extend(std::iter::repeat_n(UNDEF, self.cols));
        self.set(c, col, d);
        self.set(d, col ^ 1, c);
        self.stats.n_defined += 1;
        Ok(())
    }

    fn scan_and_fill(&mut self, c: u32, w: &[usize]) -> Result<()> {
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0usize, w.len());
        loop {
            while i < j && self.get(f, w[i]) != UNDEF {
                f = self.get(f, w[i]);
                i += 1;
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j > i && self.get(b, w[j - 1] ^ 1) != UNDEF {
                b = self.get(b, w[j - 1] ^ 1);
                j -= 1;
            }
            if j == i {
                self.coincidence(f, b);
                return Ok(());
            } else if j == i + 1 {
                self.set(f, w[i], b);
                self.set(b, w[i] ^ 1, f);
                return Ok(());
            }
            self.define(f, w[i])?;
        }
    }

    fn merge(&mut self, a: u32, b: u32) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (keep, kill) = if a < b { (a, b) } else { (b, a) };
        self.parent[kill as usize] = keep;
        self.queue.push(kill);
        self.stats.n_coincidences += 1;
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.merge(a, b);
        let mut qi = 0;
        while qi < self.queue.len() {
            let e = self.queue[qi];
            qi += 1;
            for col in 0..self.cols {
                let f = self.get(e, col);
                if f == UNDEF {
                    continue;
                }
                self.set(f, col ^ 1, UNDEF);
                let e1 = self.rep(e);
                let f1 = self.rep(f);
                let e1x = self.get(e1, col);
                if e1x != UNDEF {
                    self.merge(f1, e1x);
                } else {
                    let f1x = self.get(f1, col ^ 1);
                    if f1x != UNDEF {
                        self.merge(e1, f1x);
                    } else {
                        self.set(e1, col, f1);
                        self.set(f1, col ^ 1, e1);
                    }
                }
            }
        }
        self.queue.clear();
    }

    fn pass(&mut self, relators: &[Vec<usize>]) -> Result<()> {
        let mut c = 0u32;
        while (c as usize) < self.n_alloc() {
            if self.live(c) {
                for r in relators {
                    self.scan_and_fill(c, r)?;
                    if !self.live(c) {
                        break;
                    }
                }
                if self.live(c) {
                    for col in 0..self.cols {
                        if self.get(c, col) == UNDEF {
                            self.define(c, col)?;
                        }
                    }
                }
            }
            c += 1;
        }
        Ok(())
    }

    fn consistent(&self, relators: &[Vec<usize>], subgroup: &[Vec<usize>]) -> bool {
        let trace = |start: u32, w: &[usize]| -> Option<u32> {
            let mut c = start;
            for &col in w {
                c = self.get(c, col);
                if c == UNDEF || !self.live(c) {
                    return None;
                }
            }
            Some(c)
        };
        if subgroup.iter().any(|w| trace(0, w) != Some(0)) {
            return false;
        }
        (0..self.n_alloc() as u32).filter(|&c| self.live(c)).all(|c| {
            (0..self.cols).all(|col| {
                let d = self.get(c, col);
                d != UNDEF && self.live(d)
            }) && relators.iter().all(|r| trace(c, r) == Some(c))
        })
    }

    fn run(&mut self, relators: &[Vec<usize>], subgroup: &[Vec<usize>]) -> Result<()> {
        loop {
            for w in subgroup {
                self.scan_and_fill(0, w)?;
            }
            self.pass(relators)?;
            if self.consistent(relators, subgroup) {
                return Ok(());
            }
            log::debug!("enumeration not yet consistent, re-tracing");
        }
    }

    /// Live cosets renumbered in definition order.
    fn compact(&self) -> CosetTable {
        let n = self.n_alloc();
        let mut new_id = vec![UNDEF; n];
        let mut count = 0u32;
        for c in 0..n as u32 {
            if self.live(c) {
                new_id[c as usize] = count;
                count += 1;
            }
        }
        let mut action = Vec::with_capacity(count as usize * self.cols);
        for c in 0..n as u32 {
            if self.live(c) {
                for col in 0..self.cols {
                    action.push(new_id[self.get(c, col) as usize]);
                }
            }
        }
        CosetTable { ngens: self.cols / 2, n_cosets: count as usize, action }
    }
}

/// Coset table of the kernel of `G -> (Z/p)^d` given by generator images.
/// Cosets are the vectors of `(Z/p)^d`, numbered by their base-`p` digits;
/// coset 0 is the zero vector.
pub fn table_from_homomorphism(p: &Presentation, images: &[Vec<u32>], prime: u32, d: usize) -> Result<CosetTable> {
    if images.len() != p.ngens() {
        return Err(Error::InvalidTable(format!("{} images for {} generators", images.len(), p.ngens())));
    }
    if let Some(bad) = images.iter().find(|v| v.len() != d || v.iter().any(|&a| a >= prime)) {
        return Err(Error::InvalidTable(format!("image {bad:?} is not a vector in (Z/{prime})^{d}")));
    }
    for (index, r) in p.relators().iter().enumerate() {
        let image = image_of(r, images, prime, d);
        if image.iter().any(|&a| a != 0) {
            return Err(Error::InconsistentHomomorphism { index, image });
        }
    }
    let n = (prime as u64)
        .checked_pow(d as u32)
        .filter(|&n| n < UNDEF as u64)
        .ok_or_else(|| Error::Overflow(format!("{prime}^{d} cosets")))? as usize;
    let ngens = p.ngens();
    let mut action = vec![0u32; n * 2 * ngens];
    let mut digits = vec![0u32; d];
    for c in 0..n {
        let mut rest = c;
        for digit in digits.iter_mut() {
            *digit = (rest % prime as usize) as u32;
            rest /= prime as usize;
        }
        for (g, img) in images.iter().enumerate() {
            for (inverse, col) in [(false, 2 * g), (true, 2 * g + 1)] {
                let mut code = 0usize;
                for k in (0..d).rev() {
                    let shift = if inverse { prime - img[k] } else { img[k] };
                    code = code * prime as usize + ((digits[k] + shift) % prime) as usize;
                }
                action[c * 2 * ngens + col] = code as u32;
            }
        }
    }
    Ok(CosetTable { ngens, n_cosets: n, action })
}

/// Image of a word under generator images in `(Z/p)^d`.
pub fn image_of(w: &Word, images: &[Vec<u32>], prime: u32, d: usize) -> Vec<u32> {
    let mut v = vec![0u32; d];
    for l in w.letters() {
        let img = &images[l.generator()];
        for k in 0..d {
            v[k] = if l.is_inverse() { (v[k] + prime - img[k]) % prime } else { (v[k] + img[k]) % prime };
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::commutator;

    fn free_product_2_4() -> Presentation {
        Presentation::parse("gens: x,y\nrels: x^2, y^4").unwrap()
    }

    fn cartesian_generators(p: &Presentation) -> Vec<Word> {
        let x = p.word("x").unwrap();
        let y = p.word("y").unwrap();
        (1..=3).map(|k| commutator(&x, &y.pow(k))).collect()
    }

    #[test]
    fn cartesian_subgroup_has_index_8() {
        let p = free_product_2_4();
        let e = enumerate(&p, &cartesian_generators(&p), EnumLimits::default()).unwrap();
        assert_eq!(e.table.index(), 8);
    }

    #[test]
    fn whole_group_has_index_1() {
        for text in ["gens: x,y\nrels: x^2, y^4, (x*y)^8", "gens: a,b,c\nrels:", "gens: a\nrels: a^5"] {
            let p = Presentation::parse(text).unwrap();
            let gens: Vec<Word> = (0..p.ngens()).map(|g| Word::letter(Letter::gen(g))).collect();
            let e = enumerate(&p, &gens, EnumLimits::default()).unwrap();
            assert_eq!(e.table.index(), 1);
            assert_eq!(schreier_transversal(&e.table), vec![Word::identity()]);
        }
    }

    #[test]
    fn trivial_subgroup_of_finite_group() {
        let p = Presentation::parse("gens: a,b\nrels: a^2, b^2, (a*b)^3").unwrap();
        let e = enumerate(&p, &[], EnumLimits::default()).unwrap();
        assert_eq!(e.table.index(), 6);
        let p = Presentation::parse("gens: x,y\nrels: x^2, y^3, (x*y)^5").unwrap();
        assert_eq!(enumerate(&p, &[], EnumLimits::default()).unwrap().table.index(), 60);
    }

    #[test]
    fn limits_are_reported() {
        let p = free_product_2_4();
        let err = enumerate(&p, &cartesian_generators(&p), EnumLimits::new(4)).unwrap_err();
        assert_eq!(err, Error::Limit(LimitExceeded::Cosets { max_cosets: 4 }));
        let free = Presentation::parse("gens: a,b\nrels:").unwrap();
        assert!(matches!(enumerate(&free, &[], EnumLimits::new(1000)), Err(Error::Limit(_))));
    }

    #[test]
    fn empty_alphabet_is_rejected() {
        let p = Presentation::free(crate::presentation::Alphabet::new(Vec::<String>::new()).unwrap());
        assert_eq!(enumerate(&p, &[], EnumLimits::default()).unwrap_err(), Error::EmptyAlphabet);
    }

    #[test]
    fn transversal_is_prefix_closed_and_faithful() {
        let p = free_product_2_4();
        let t = enumerate(&p, &cartesian_generators(&p), EnumLimits::default()).unwrap().table;
        let reps = schreier_transversal(&t);
        assert_eq!(reps.len(), 8);
        assert!(reps[0].is_empty());
        for (c, r) in reps.iter().enumerate() {
            assert_eq!(t.trace(r, 0), c);
            let prefix = Word::from_letters(r.letters()[..r.len().saturating_sub(1)].iter().copied());
            assert!(reps.contains(&prefix));
        }
    }

    #[test]
    fn rotated_and_inverted_relators_give_same_index() {
        let p = free_product_2_4();
        let sub = cartesian_generators(&p);
        let q = Presentation::parse("gens: x,y\nrels: x^-2, y^-4").unwrap();
        assert_eq!(enumerate(&q, &sub, EnumLimits::default()).unwrap().table.index(), 8);
        let g = Presentation::parse("gens: x,y\nrels: x^2, y^4, (x*y)^8").unwrap();
        let g2 = Presentation::parse("gens: x,y\nrels: x^2, y^-4, (y*x)^-8").unwrap();
        let n1 = enumerate(&g, &sub, EnumLimits::default()).unwrap().table.index();
        let n2 = enumerate(&g2, &sub, EnumLimits::default()).unwrap().table.index();
        assert_eq!(n1, n2);
    }

    #[test]
    fn homomorphism_tables() {
        let f2 = Presentation::parse("gens: a,b\nrels:").unwrap();
        let t = table_from_homomorphism(&f2, &[vec![1, 0], vec![0, 1]], 2, 2).unwrap();
        assert_eq!(t.index(), 4);
        t.validate(&f2, &[f2.word("a^2").unwrap(), f2.word("a*b*a^-1*b^-1").unwrap()]).unwrap();
        let t0 = table_from_homomorphism(&f2, &[vec![], vec![]], 2, 0).unwrap();
        assert_eq!(t0.index(), 1);
        let b3 = Presentation::parse("gens: b1,b2,b3\nrels:").unwrap();
        let t = table_from_homomorphism(&b3, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]], 2, 3).unwrap();
        assert_eq!(t.index(), 8);
        let c3 = Presentation::parse("gens: a\nrels: a^3").unwrap();
        let t = table_from_homomorphism(&c3, &[vec![1]], 3, 1).unwrap();
        assert_eq!(t.trace(&c3.word("a^-1").unwrap(), 0), 2);
    }

    #[test]
    fn inconsistent_homomorphism_is_rejected() {
        let p = Presentation::parse("gens: a\nrels: a^3").unwrap();
        assert!(matches!(
            table_from_homomorphism(&p, &[vec![1]], 2, 1),
            Err(Error::InconsistentHomomorphism { index: 0, .. })
        ));
    }
}
