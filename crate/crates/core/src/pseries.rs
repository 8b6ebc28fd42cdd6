//! The exponent-`p` series `δ_0 = G`, `δ_{i+1} = [δ_i, δ_i] δ_i^p`: layer
//! ranks, orders `|G/δ_t|`, and the depth at which an element leaves it.
//!
//! Each level keeps a presentation of `δ_i`. Its mod-`p` abelianisation
//! gives the layer rank `d_i`; the next level is the kernel of that map,
//! read off the regular coset table of `(Z/p)^{d_i}` by Reidemeister–Schreier.
//! When a table would exceed the coset limit and the group is recognisably a
//! free product of cyclic `p`-groups and a free group, ranks continue from
//! its structure (see [`crate::kurosh`]); membership in free levels is
//! decided exactly by [`crate::free_layers`].

use std::time::Instant;

use serde::Serialize;

use crate::coset::{image_of, table_from_homomorphism, EnumLimits};
use crate::error::{Error, Result};
use crate::free_layers::free_membership_level;
use crate::kurosh::{recognise, CyclicFreeProduct};
use crate::linalg::{check_prime, reduce, rref};
use crate::presentation::Presentation;
use crate::schreier::{subgroup_presentation, tietze_simplify, SubgroupPresentation};
use crate::word::Word;

/// Default number of Tietze eliminations per level.
pub const TIETZE_BUDGET: usize = 1_000_000;

/// Deepest level any search will look at.
pub const MAX_DEPTH: usize = 64;

/// The map `G -> (Z/p)^d` onto the largest elementary abelian `p`-quotient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayerMap {
    pub prime: u32,
    pub d: usize,
    /// Image of each generator.
    pub images: Vec<Vec<u32>>,
}

impl LayerMap {
    pub fn image(&self, w: &Word) -> Vec<u32> {
        image_of(w, &self.images, self.prime, self.d)
    }
}

/// Solves the relator exponent-sum matrix over F_p: free columns of its
/// reduced echelon form are the coordinates, and a pivot column is minus
/// its row restricted to them.
pub fn layer_map(pr: &Presentation, prime: u32) -> Result<LayerMap> {
    check_prime(prime)?;
    let n = pr.ngens();
    let rows: Vec<Vec<u32>> = pr
        .relators()
        .iter()
        .map(|r| r.exponent_sums(n).into_iter().map(|a| reduce(a, prime)).collect())
        .collect();
    let e = rref(rows, n, prime);
    let free = e.free_columns();
    let d = free.len();
    let mut images = vec![vec![0u32; d]; n];
    for (k, &c) in free.iter().enumerate() {
        images[c][k] = 1;
    }
    for (row, &c) in e.rows.iter().zip(&e.pivots) {
        images[c] = free.iter().map(|&f| (prime - row[f]) % prime).collect();
    }
    Ok(LayerMap { prime, d, images })
}

/// `d = ngens - rank_p(relator exponent-sum matrix)`.
pub fn mod_p_layer_rank(pr: &Presentation, prime: u32) -> Result<usize> {
    Ok(layer_map(pr, prime)?.d)
}

/// One materialised level of the series.
#[derive(Debug, Clone)]
pub struct Rung {
    pub presentation: Presentation,
    pub layer: LayerMap,
    /// How this level sits inside the previous one (absent at level 0).
    pub embedding: Option<SubgroupPresentation>,
}

/// Lazily materialised levels `δ_0, δ_1, …` of one group.
#[derive(Debug, Clone)]
pub struct DeltaLadder {
    prime: u32,
    limits: EnumLimits,
    budget: usize,
    started: Instant,
    rungs: Vec<Rung>,
    blocked: Option<String>,
}

impl DeltaLadder {
    pub fn new(pr: &Presentation, prime: u32, limits: EnumLimits) -> Result<Self> {
        let layer = layer_map(pr, prime)?;
        Ok(DeltaLadder {
            prime,
            limits,
            budget: TIETZE_BUDGET,
            started: Instant::now(),
            rungs: vec![Rung { presentation: pr.clone(), layer, embedding: None }],
            blocked: None,
        })
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    /// Why the ladder could not be extended, once it has stopped.
    pub fn blocked(&self) -> Option<&str> {
        self.blocked.as_deref()
    }

    pub fn materialised(&self) -> usize {
        self.rungs.len()
    }

    pub fn rung(&self, i: usize) -> Option<&Rung> {
        self.rungs.get(i)
    }

    /// Materialises levels up to `i`. Returns `false` when that is not
    /// possible within the limits; the reason is kept in [`Self::blocked`].
    pub fn reach(&mut self, i: usize) -> bool {
        while self.rungs.len() <= i {
            if self.blocked.is_some() {
                return false;
            }
            if let Err(reason) = self.descend() {
                self.blocked = Some(reason);
                return false;
            }
        }
        true
    }

    fn descend(&mut self) -> std::result::Result<(), String> {
        let level = self.rungs.len();
        let top = self.rungs.last().unwrap();
        let d = top.layer.d;
        let index = (self.prime as u64).checked_pow(d as u32).filter(|&n| n <= self.limits.max_cosets as u64);
        let Some(index) = index else {
            return Err(format!(
                "level {level} needs {}^{d} cosets, above max_cosets = {}",
                self.prime, self.limits.max_cosets
            ));
        };
        if let Some(limit) = self.limits.max_time {
            if self.started.elapsed() > limit {
                return Err(format!("time limit of {limit:?} exceeded before level {level}"));
            }
        }
        log::debug!("descending to level {level} through {index} cosets");
        let table = table_from_homomorphism(&top.presentation, &top.layer.images, self.prime, d)
            .map_err(|e| e.to_string())?;
        let sp = subgroup_presentation(&top.presentation, &table).map_err(|e| e.to_string())?;
        let sp = tietze_simplify(&sp, self.budget);
        let layer = layer_map(&sp.presentation, self.prime).map_err(|e| e.to_string())?;
        self.rungs.push(Rung { presentation: sp.presentation.clone(), layer, embedding: Some(sp) });
        Ok(())
    }

    /// Layer rank `d_i` and how it was obtained; `Err(reason)` when neither
    /// route applies.
    fn layer_rank(&mut self, i: usize, structure: &mut Option<(usize, CyclicFreeProduct)>) -> std::result::Result<(u128, LevelMethod), String> {
        if let Some((j, h)) = structure.as_ref() {
            let mut h = h.clone();
            for _ in *j..i {
                h = h.delta1().map_err(|e| e.to_string())?;
            }
            let d = h.layer_rank().map_err(|e| e.to_string())?;
            *structure = Some((i, h));
            return Ok((d, LevelMethod::Structure));
        }
        if self.reach(i) {
            return Ok((self.rungs[i].layer.d as u128, LevelMethod::Presentation));
        }
        let last = self.rungs.len() - 1;
        let reason = self.blocked.clone().unwrap_or_default();
        let Some(h) = recognise(&self.rungs[last].presentation, self.prime) else {
            return Err(reason);
        };
        log::debug!("continuing from the structure of level {last}: {h:?}");
        *structure = Some((last, h));
        self.layer_rank(i, structure)
    }

    /// Orders of the quotients by the first `depth` levels.
    pub fn orders(&mut self, depth: usize) -> PSeriesReport {
        let mut levels = Vec::with_capacity(depth + 1);
        let mut structure = None;
        let mut e = 0u128;
        let mut reason = None;
        for i in 0..=depth {
            if i == depth {
                levels.push(LevelReport { i, e, d: None, method: None });
                break;
            }
            match self.layer_rank(i, &mut structure) {
                Ok((d, method)) => {
                    levels.push(LevelReport { i, e, d: Some(d), method: Some(method) });
                    match e.checked_add(d) {
                        Some(next) => e = next,
                        None => {
                            reason = Some(format!("order exponent overflows after level {i}"));
                            break;
                        }
                    }
                }
                Err(why) => {
                    levels.push(LevelReport { i, e, d: None, method: None });
                    reason = Some(why);
                    break;
                }
            }
        }
        PSeriesReport { p: self.prime, truncated: reason.is_some(), reason, levels }
    }

    /// Smallest `v` with `w ∉ δ_v`.
    pub fn membership(&mut self, w: &Word) -> Result<Membership> {
        self.rungs[0].presentation.alphabet().check_word(w)?;
        let mut w = w.clone();
        for i in 0..MAX_DEPTH {
            let rung = &self.rungs[i];
            if w.is_empty() {
                return Ok(Membership::InAllComputed { depth: i });
            }
            if rung.layer.image(&w).iter().any(|&a| a != 0) {
                return Ok(Membership::Level { level: i + 1 });
            }
            if rung.layer.d == 0 {
                // δ_{i+1} = δ_i, so the series is constant from here.
                return Ok(Membership::InAllComputed { depth: i });
            }
            if rung.presentation.relators().is_empty() {
                return Ok(match free_membership_level(&w, self.prime, MAX_DEPTH - i) {
                    Some(v) => Membership::Level { level: i + v },
                    None => Membership::Undecided { last_level: MAX_DEPTH, reason: "depth cap reached".into() },
                });
            }
            if !self.reach(i + 1) {
                return Ok(Membership::Undecided { last_level: i, reason: self.blocked.clone().unwrap_or_default() });
            }
            w = self.rungs[i + 1].embedding.as_ref().unwrap().rewrite(&w)?;
        }
        Ok(Membership::Undecided { last_level: MAX_DEPTH, reason: "depth cap reached".into() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelMethod {
    /// From a presentation of the level.
    Presentation,
    /// From the free-product structure of an earlier level.
    Structure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub i: usize,
    /// `|G/δ_i| = p^e`.
    pub e: u128,
    /// Layer rank `d_i = e_{i+1} - e_i`; absent at the last level.
    pub d: Option<u128>,
    pub method: Option<LevelMethod>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PSeriesReport {
    pub p: u32,
    pub levels: Vec<LevelReport>,
    pub truncated: bool,
    pub reason: Option<String>,
}

impl PSeriesReport {
    pub fn e(&self, i: usize) -> Option<u128> {
        self.levels.get(i).map(|l| l.e)
    }

    pub fn exponents(&self) -> Vec<u128> {
        self.levels.iter().map(|l| l.e).collect()
    }

    /// Deepest level with a known order.
    pub fn depth(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    /// Orders `p^{e_i}` that fit in a `u128`.
    pub fn orders(&self) -> Vec<Option<u128>> {
        self.levels.iter().map(|l| (self.p as u128).checked_pow(u32::try_from(l.e).ok()?)).collect()
    }
}

/// Orders `|G/δ_i|` for `i = 0..=depth`.
pub fn delta_orders(pr: &Presentation, prime: u32, depth: usize, limits: EnumLimits) -> Result<PSeriesReport> {
    Ok(DeltaLadder::new(pr, prime, limits)?.orders(depth))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Comparison {
    Identical { common_depth: usize },
    Differ { level: usize, e_a: u128, e_b: u128 },
}

/// First level at which two reports disagree.
pub fn compare_invariants(a: &PSeriesReport, b: &PSeriesReport) -> Result<Comparison> {
    if a.p != b.p {
        return Err(Error::PrimeMismatch(a.p, b.p));
    }
    for (la, lb) in a.levels.iter().zip(&b.levels) {
        if la.e != lb.e {
            return Ok(Comparison::Differ { level: la.i, e_a: la.e, e_b: lb.e });
        }
    }
    Ok(Comparison::Identical { common_depth: a.depth().min(b.depth()) })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Membership {
    /// The smallest `v` with `w ∉ δ_v`.
    Level { level: usize },
    /// `w` lies in every level up to `depth`, after which the series is
    /// constant (or `w` is trivial).
    InAllComputed { depth: usize },
    Undecided { last_level: usize, reason: String },
}

/// Smallest `v` with `w ∉ δ_v(G)`.
pub fn membership_level(pr: &Presentation, prime: u32, w: &Word, limits: EnumLimits) -> Result<Membership> {
    DeltaLadder::new(pr, prime, limits)?.membership(w)
}
