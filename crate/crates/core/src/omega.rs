//! Finite prefixes of the branch construction: along a bit string, adjoin
//! relators `g^{p^s}` (bit 0) or `g^{p^q}` (bit 1) and audit the resulting
//! changes in the exponent-`p` series of the image of `N`.
//!
//! The largeness constant `m` of each step is not computable and comes from
//! the schedule. "Infinite order" of a candidate is replaced by a checkable
//! proxy: the candidate must be non-trivial in some layer of the free group
//! on the same generators, and no adjoined relator may be a power of a
//! conjugate of its primitive root.

use serde::Serialize;

use crate::coset::{enumerate, EnumLimits};
use crate::error::{Error, Result};
use crate::linalg::check_prime;
use crate::presentation::{Alphabet, Presentation};
use crate::pseries::{delta_orders, DeltaLadder, Membership, PSeriesReport};
use crate::schreier::{subgroup_presentation, tietze_simplify, SubgroupPresentation};
use crate::word::{Letter, Word};

/// Relators longer than this are refused rather than built.
pub const MAX_RELATOR_LEN: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleEntry {
    pub candidate: Word,
    pub m: usize,
    pub s_override: Option<usize>,
}

/// Parses a schedule: one `candidate_word m [s_override]` per line; blank
/// lines and `#` comments are ignored.
pub fn parse_schedule(text: &str, alphabet: &Alphabet) -> Result<Vec<ScheduleEntry>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = |msg: &str| Error::Schedule(format!("line {}: {msg}", n + 1));
        if !(2..=3).contains(&fields.len()) {
            return Err(bad("expected `candidate m [s_override]`"));
        }
        let candidate = alphabet.parse_word(fields[0])?;
        let m: usize = fields[1].parse().map_err(|_| bad("m is not a non-negative integer"))?;
        if m == 0 {
            return Err(bad("m must be at least 1"));
        }
        let s_override = match fields.get(2) {
            Some(s) => Some(s.parse().map_err(|_| bad("s_override is not a non-negative integer"))?),
            None => None,
        };
        out.push(ScheduleEntry { candidate, m, s_override });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HistoryEntry {
    #[serde(skip)]
    pub relator: Word,
    /// `relator = g^{p^exponent}`.
    pub exponent: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchState {
    pub base: Presentation,
    pub quotient: Presentation,
    pub subgroup_gens: Vec<Word>,
    pub r: usize,
    pub q: usize,
    pub history: Vec<HistoryEntry>,
}

impl BranchState {
    pub fn new(base: &Presentation, subgroup_gens: &[Word]) -> Result<Self> {
        for w in subgroup_gens {
            base.alphabet().check_word(w)?;
        }
        Ok(BranchState {
            base: base.clone(),
            quotient: base.clone(),
            subgroup_gens: subgroup_gens.to_vec(),
            r: 0,
            q: 0,
            history: Vec::new(),
        })
    }

    /// Presentation of the image of `N` in the current quotient, and the
    /// rewriting into it (absent when `N` is everything).
    pub fn n_image(&self, limits: EnumLimits) -> Result<NImage> {
        if self.subgroup_gens.is_empty() {
            return Ok(NImage { presentation: self.quotient.clone(), embedding: None });
        }
        let table = enumerate(&self.quotient, &self.subgroup_gens, limits)?.table;
        if table.index() == 1 {
            return Ok(NImage { presentation: self.quotient.clone(), embedding: None });
        }
        let sp = tietze_simplify(&subgroup_presentation(&self.quotient, &table)?, crate::pseries::TIETZE_BUDGET);
        Ok(NImage { presentation: sp.presentation.clone(), embedding: Some(sp) })
    }
}

/// The image of `N` in a quotient.
#[derive(Debug, Clone)]
pub struct NImage {
    pub presentation: Presentation,
    pub embedding: Option<SubgroupPresentation>,
}

impl NImage {
    pub fn rewrite(&self, w: &Word) -> Result<Word> {
        match &self.embedding {
            Some(sp) => sp.rewrite(w),
            None => Ok(w.clone()),
        }
    }
}

/// Audit record of one step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepAudit {
    pub bit: u8,
    pub candidate: String,
    pub m: usize,
    pub relator: String,
    /// `relator = g^{p^exponent}` with `g = candidate^{p^r}` (parent `r`).
    pub exponent: usize,
    pub s: usize,
    pub v: usize,
    pub r: usize,
    pub q: usize,
    /// How the infinite-order requirement on the candidate was checked.
    pub proxy: String,
}

fn p_power(w: &Word, p: u32, k: usize) -> Result<Word> {
    let n = (p as u64)
        .checked_pow(k as u32)
        .filter(|&n| (n as u128) * (w.len() as u128) <= MAX_RELATOR_LEN as u128)
        .ok_or_else(|| Error::StepRefused(format!("power {p}^{k} of a word of length {} is too long", w.len())))?;
    Ok(w.pow(n as i64))
}

/// One step of the construction from `st` with the given bit.
pub fn branch_step(st: &BranchState, bit: u8, entry: &ScheduleEntry, p: u32, limits: EnumLimits) -> Result<(BranchState, StepAudit)> {
    check_prime(p)?;
    if bit > 1 {
        return Err(Error::Schedule(format!("bit {bit} is not 0 or 1")));
    }
    let alphabet = st.quotient.alphabet();
    alphabet.check_word(&entry.candidate)?;
    let proxy = infinite_order_proxy(st, &entry.candidate, p, limits)?;

    let g = p_power(&entry.candidate, p, st.r)?;
    let r_next = st.r + entry.m;
    let s_min = r_next.max(st.q);
    let s = match entry.s_override {
        Some(s) if s < s_min => {
            return Err(Error::Schedule(format!("s_override {s} is below max(r + m, q) = {s_min}")));
        }
        Some(s) => s,
        None => s_min,
    };
    let probe = p_power(&g, p, s)?;
    let n = st.n_image(limits).map_err(|e| Error::StepRefused(format!("image of N: {e}")))?;
    let probe_n = n.rewrite(&probe).map_err(|_| Error::Schedule("candidate does not lie in N".into()))?;
    let v = match DeltaLadder::new(&n.presentation, p, limits)?.membership(&probe_n)? {
        Membership::Level { level: v } => v,
        Membership::InAllComputed { .. } => {
            return Err(Error::Schedule(format!(
                "{} is trivial in the current quotient",
                alphabet.format_word(&probe)
            )))
        }
        Membership::Undecided { last_level, reason } => {
            return Err(Error::StepRefused(format!("membership undecided after level {last_level}: {reason}")))
        }
    };
    debug_assert!(v > s);
    let exponent = if bit == 0 { s } else { v };
    let relator = p_power(&g, p, exponent)?;
    let mut next = st.clone();
    next.quotient = st.quotient.with_relators([relator.clone()])?;
    next.r = r_next;
    next.q = v;
    next.history.push(HistoryEntry { relator: relator.clone(), exponent });
    let audit = StepAudit {
        bit,
        candidate: alphabet.format_word(&entry.candidate),
        m: entry.m,
        relator: alphabet.format_word(&relator),
        exponent,
        s,
        v,
        r: next.r,
        q: next.q,
        proxy,
    };
    Ok((next, audit))
}

fn infinite_order_proxy(st: &BranchState, candidate: &Word, p: u32, limits: EnumLimits) -> Result<String> {
    let free = Presentation::free(st.quotient.alphabet().clone());
    let level = match DeltaLadder::new(&free, p, limits)?.membership(candidate)? {
        Membership::Level { level: v } => v,
        _ => {
            return Err(Error::Schedule(format!(
                "candidate {} is trivial in every computed layer of the free group",
                st.quotient.format_word(candidate)
            )))
        }
    };
    let root = candidate.cyclically_reduced().primitive_root().0.cyclic_key();
    for (k, h) in st.history.iter().enumerate() {
        if h.relator.cyclically_reduced().primitive_root().0.cyclic_key() == root {
            return Err(Error::Schedule(format!(
                "candidate {} has finite order forced by adjoined relator {}",
                st.quotient.format_word(candidate),
                k + 1
            )));
        }
    }
    Ok(format!(
        "non-trivial in layer {level} of the free group; not a power of an adjoined relator's root"
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Divergence {
    pub level: usize,
    pub e0: Option<u128>,
    pub e1: Option<u128>,
    pub strict: bool,
    /// Why the comparison could not be made, if it could not.
    pub inconclusive: Option<String>,
}

/// Compares `|N_0/δ_v(N_0)|` and `|N_1/δ_v(N_1)|` at the children's `v`.
pub fn divergence_check(st0: &BranchState, st1: &BranchState, p: u32, limits: EnumLimits) -> Result<Divergence> {
    let level = st0.q.max(st1.q);
    let order = |st: &BranchState| -> Result<std::result::Result<u128, String>> {
        let n = match st.n_image(limits) {
            Ok(n) => n,
            Err(Error::Limit(e)) => return Ok(Err(e.to_string())),
            Err(e) => return Err(e),
        };
        let report = delta_orders(&n.presentation, p, level, limits)?;
        Ok(match report.e(level) {
            Some(e) if report.depth() == level && !report.truncated => Ok(e),
            _ => Err(report.reason.unwrap_or_else(|| "truncated".into())),
        })
    };
    let (a, b) = (order(st0)?, order(st1)?);
    Ok(match (a, b) {
        (Ok(e0), Ok(e1)) => Divergence { level, e0: Some(e0), e1: Some(e1), strict: e0 < e1, inconclusive: None },
        (a, b) => Divergence {
            level,
            e0: a.as_ref().ok().copied(),
            e1: b.as_ref().ok().copied(),
            strict: false,
            inconclusive: Some(a.err().or(b.err()).unwrap()),
        },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OmegaRun {
    pub p: u32,
    pub bits: String,
    pub steps: Vec<StepAudit>,
    pub report: PSeriesReport,
    #[serde(skip)]
    pub states: Vec<BranchState>,
}

/// Folds [`branch_step`] along `bits` and reports the series of the final
/// image of `N` to `depth` levels (default: the final `q`, at least 1).
pub fn run_omega(
    base: &Presentation,
    subgroup_gens: &[Word],
    p: u32,
    bits: &[u8],
    schedule: &[ScheduleEntry],
    limits: EnumLimits,
    depth: Option<usize>,
) -> Result<OmegaRun> {
    check_prime(p)?;
    if schedule.len() < bits.len() {
        return Err(Error::Schedule(format!("{} bits but only {} schedule entries", bits.len(), schedule.len())));
    }
    let mut states = vec![BranchState::new(base, subgroup_gens)?];
    let mut steps = Vec::new();
    for (&bit, entry) in bits.iter().zip(schedule) {
        let (next, audit) = branch_step(states.last().unwrap(), bit, entry, p, limits)?;
        log::info!("bit {bit}: adjoined {} (s = {}, v = {})", audit.relator, audit.s, audit.v);
        states.push(next);
        steps.push(audit);
    }
    let last = states.last().unwrap();
    let depth = depth.unwrap_or(last.q.max(1));
    let report = delta_orders(&last.n_image(limits)?.presentation, p, depth, limits)?;
    let bits = bits.iter().map(|b| char::from(b'0' + b)).collect();
    Ok(OmegaRun { p, bits, steps, report, states })
}

/// Parses a bit string such as `"0110"`.
pub fn parse_bits(text: &str) -> Result<Vec<u8>> {
    text.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(Error::Schedule(format!("bit string contains {c:?}"))),
        })
        .collect()
}

/// The shipped demonstration: `G = N = F_2 = <a, b>`, `p = 2`, candidates
/// `a` then `b`, each with `m = 1`.
pub fn demo_instance() -> (Presentation, Vec<Word>, Vec<ScheduleEntry>) {
    let f2 = Presentation::free(Alphabet::new(["a", "b"]).expect("valid names"));
    let schedule = [0, 1]
        .into_iter()
        .map(|g| ScheduleEntry { candidate: Word::letter(Letter::gen(g)), m: 1, s_override: None })
        .collect();
    (f2, Vec::new(), schedule)
}

/// Schedule text of [`demo_instance`].
pub const DEMO_SCHEDULE: &str = "# candidate m [s_override]\na 1\nb 1\n";

#[cfg(test)]
mod tests {
    use super::*;

    fn limits() -> EnumLimits {
        EnumLimits::new(5000)
    }

    #[test]
    fn schedule_parsing() {
        let (f2, _, schedule) = demo_instance();
        assert_eq!(parse_schedule(DEMO_SCHEDULE, f2.alphabet()).unwrap(), schedule);
        let s = parse_schedule("a*b^2 3 7 # comment\n\n", f2.alphabet()).unwrap();
        assert_eq!(s[0].s_override, Some(7));
        assert!(parse_schedule("a 0", f2.alphabet()).is_err());
        assert!(parse_schedule("a", f2.alphabet()).is_err());
        assert!(parse_schedule("c 1", f2.alphabet()).is_err());
        assert_eq!(parse_bits("0110").unwrap(), [0, 1, 1, 0]);
        assert!(parse_bits("012").is_err());
    }

    #[test]
    fn empty_prefix_is_the_base() {
        let (f2, n, schedule) = demo_instance();
        let run = run_omega(&f2, &n, 2, &[], &schedule, limits(), None).unwrap();
        assert_eq!(run.states.len(), 1);
        assert_eq!(run.states[0].quotient, f2);
        assert_eq!(run.report.exponents(), [0, 2]);
    }

    #[test]
    fn first_step_on_the_demo() {
        let (f2, n, schedule) = demo_instance();
        let st = BranchState::new(&f2, &n).unwrap();
        let (s0, a0) = branch_step(&st, 0, &schedule[0], 2, limits()).unwrap();
        let (s1, a1) = branch_step(&st, 1, &schedule[0], 2, limits()).unwrap();
        assert_eq!((a0.s, a0.v, a0.r, a0.q), (1, 2, 1, 2));
        assert_eq!((a1.s, a1.v, a1.r, a1.q), (1, 2, 1, 2));
        assert_eq!(a0.relator, "a^2");
        assert_eq!(a1.relator, "a^4");
        assert!(s1.q > a1.s);
        let div = divergence_check(&s0, &s1, 2, limits()).unwrap();
        assert_eq!(div, Divergence { level: 2, e0: Some(5), e1: Some(7), strict: true, inconclusive: None });
    }

    #[test]
    fn identical_histories_do_not_diverge() {
        let (f2, n, schedule) = demo_instance();
        let st = BranchState::new(&f2, &n).unwrap();
        let (s0, _) = branch_step(&st, 0, &schedule[0], 2, limits()).unwrap();
        let div = divergence_check(&s0, &s0, 2, limits()).unwrap();
        assert!(!div.strict);
        assert_eq!(div.e0, div.e1);
    }

    #[test]
    fn forced_torsion_and_bad_overrides_are_refused() {
        let (f2, n, schedule) = demo_instance();
        let st = BranchState::new(&f2, &n).unwrap();
        let (s0, _) = branch_step(&st, 0, &schedule[0], 2, limits()).unwrap();
        let again = ScheduleEntry { candidate: f2.word("b*a*b^-1").unwrap(), m: 1, s_override: None };
        assert!(matches!(branch_step(&s0, 0, &again, 2, limits()), Err(Error::Schedule(_))));
        let low = ScheduleEntry { candidate: f2.word("b").unwrap(), m: 1, s_override: Some(1) };
        assert!(matches!(branch_step(&s0, 0, &low, 2, limits()), Err(Error::Schedule(_))));
        let trivial = ScheduleEntry { candidate: Word::identity(), m: 1, s_override: None };
        assert!(matches!(branch_step(&st, 0, &trivial, 2, limits()), Err(Error::Schedule(_))));
    }

    #[test]
    fn refusal_when_membership_is_undecided() {
        let (f2, n, schedule) = demo_instance();
        let st = BranchState::new(&f2, &n).unwrap();
        let (s0, _) = branch_step(&st, 1, &schedule[0], 2, limits()).unwrap();
        // Z4 * Z needs a 4-coset table to look past level 1.
        let r = branch_step(&s0, 0, &schedule[1], 2, EnumLimits::new(3));
        assert!(matches!(r, Err(Error::StepRefused(_))), "{r:?}");
    }
}
