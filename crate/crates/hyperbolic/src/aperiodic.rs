//! Search for long periodic paths near geodesics.

use serde::Serialize;

use cgt_core::{Letter, Word};

use crate::ball::CayleyBall;
use crate::error::{LabError, Result};

/// Periods whose matrix has no power `≤ INFINITE_ORDER_CAP` at the identity
/// are treated as having infinite order.
pub const INFINITE_ORDER_CAP: u32 = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Aperiodicity {
    /// No witness within the caps.
    AperiodicAtScale { periods_checked: usize, period_cap: usize, paths_checked: usize },
    /// A path labelled by a `Z`-periodic word of length `length ≥ t‖Z‖`
    /// with both ends within `Λ` of the geodesic.
    PeriodicWitness { period: String, start: String, length: usize },
    Undecided { reason: String },
}

/// Cyclically reduced words of length `1..=cap` in shortlex order. Every
/// rotation is kept, since a periodic path may start anywhere in its period.
fn periods(ngens: usize, cap: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut layer = vec![Word::identity()];
    for _ in 0..cap {
        let mut next = Vec::new();
        for w in &layer {
            for c in 0..2 * ngens {
                let mut v = w.clone();
                v.push(Letter::from_column(c));
                if v.len() > w.len() {
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().filter(|w| w.is_cyclically_reduced()).cloned());
        layer = next;
    }
    out
}

/// Looks for a `(Λ, t)`-periodicity witness for `g` inside the ball.
pub fn aperiodicity_scan(ball: &CayleyBall, g: &Word, lambda: usize, t: f64, period_cap: usize) -> Result<Aperiodicity> {
    let target = ball.locate(g).ok_or_else(|| LabError::OutsideBall(ball.alphabet.format_word(g)))?;
    let geo = ball.geodesic(0, target).expect("located vertices are connected");
    let near_dist = ball.distances_from(&geo);
    let near: Vec<usize> = (0..ball.len()).filter(|&v| near_dist[v] as usize <= lambda).collect();
    let mut periods_checked = 0;
    let mut paths_checked = 0;
    for z in periods(ball.gens.len(), period_cap) {
        let Some(zv) = ball.locate(&z) else { continue };
        if ball.vertices[zv].matrix.order(INFINITE_ORDER_CAP, 1e-6).is_some() {
            continue;
        }
        periods_checked += 1;
        let need = (t * z.len() as f64).ceil().max(1.0) as usize;
        for &s in &near {
            let mut v = s;
            // A path longer than the ball has vertices is cycling.
            for step in 1..=ball.len() {
                let l = z.letters()[(step - 1) % z.len()];
                match ball.neighbour(v, l) {
                    Some(w) => v = w,
                    None => break,
                }
                if step >= need {
                    if step == need {
                        paths_checked += 1;
                    }
                    if near_dist[v] as usize <= lambda {
                        return Ok(Aperiodicity::PeriodicWitness {
                            period: ball.alphabet.format_word(&z),
                            start: ball.word_string(s),
                            length: step,
                        });
                    }
                }
            }
        }
    }
    if paths_checked == 0 {
        return Ok(Aperiodicity::Undecided {
            reason: format!(
                "no infinite-order period up to length {period_cap} fits {t}·‖Z‖ letters inside the ball"
            ),
        });
    }
    Ok(Aperiodicity::AperiodicAtScale { periods_checked, period_cap, paths_checked })
}
