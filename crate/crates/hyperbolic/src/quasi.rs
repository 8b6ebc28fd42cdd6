//! Quasigeodesic constants of periodic words.

use serde::Serialize;

use cgt_core::Word;

use crate::ball::CayleyBall;
use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuasiFit {
    /// Largest `λ` on the grid `0.05k` admitting a `c`; `0` if none does.
    pub lambda: f64,
    pub c: f64,
    pub requested_power: usize,
    pub effective_power: usize,
    pub c_max: f64,
    /// Subword `(start, end)` positions on the path attaining the bound.
    pub witness: Option<(usize, usize)>,
}

impl QuasiFit {
    /// `λ‖q‖ − c ≤ d(q₋, q₊)` for every subpath of the first `power`
    /// periods.
    pub fn holds_for(&self, dist: &[Vec<u32>], period: usize, power: usize) -> bool {
        let n = period * power;
        (0..=n).all(|i| (i..=n).all(|j| self.lambda * (j - i) as f64 - self.c <= dist[i][j] as f64 + 1e-9))
    }
}

/// Vertices along the path of `B^power` from the identity, stopping at the
/// largest power whose path stays within half the radius (so that ball
/// distances between its points are group distances).
fn periodic_path(ball: &CayleyBall, b: &Word, power: usize) -> (Vec<usize>, usize) {
    let half = ball.radius / 2;
    let mut path = vec![0usize];
    let mut done = 0;
    'outer: for _ in 0..power {
        let mut ext = Vec::with_capacity(b.len());
        let mut v = *path.last().unwrap();
        for &l in b.letters() {
            match ball.neighbour(v, l) {
                Some(w) if ball.vertices[w].dist <= half => {
                    v = w;
                    ext.push(w);
                }
                _ => break 'outer,
            }
        }
        path.extend(ext);
        done += 1;
    }
    (path, done)
}

/// Pairwise ball distances between the points of a path.
pub fn path_distances(ball: &CayleyBall, path: &[usize]) -> Vec<Vec<u32>> {
    path.iter()
        .map(|&a| {
            let d = ball.distances_from(&[a]);
            path.iter().map(|&b| d[b]).collect()
        })
        .collect()
}

/// Checks that `b` is non-trivial and has no shorter conjugate `u b u⁻¹`
/// with `u` in the ball of radius `R/2`.
pub fn check_cyclically_minimal(ball: &CayleyBall, b: &Word) -> Result<()> {
    let name = ball.alphabet.format_word(b);
    let v = ball.locate(b).ok_or_else(|| LabError::OutsideBall(name.clone()))?;
    if v == 0 {
        return Err(LabError::Precondition(format!("{name} represents the identity")));
    }
    if ball.vertices[v].dist < b.len() {
        return Err(LabError::Precondition(format!("{name} is not geodesic")));
    }
    let m = ball.vertices[v].matrix;
    for u in ball.vertices.iter().filter(|u| u.dist <= ball.radius / 2) {
        let conj = u.matrix * m * u.matrix.inverse();
        if let Some(w) = ball.find(&conj) {
            if ball.vertices[w].dist < b.len() {
                return Err(LabError::Precondition(format!(
                    "{name} is conjugate to the shorter {}",
                    ball.word_string(w)
                )));
            }
        }
    }
    Ok(())
}

/// Tightest `(λ, c)` on the grid `λ ∈ {0.05k}`, `c ∈ {0.5k} ∩ [0, c_max]`
/// (larger `λ` first, then smaller `c`) with `λ‖q‖ − c ≤ d(q₋, q₊)` for all
/// subpaths `q` of the path of `B^m`.
pub fn quasigeodesic_fit(ball: &CayleyBall, b: &Word, max_power: usize, c_max: Option<f64>) -> Result<QuasiFit> {
    check_cyclically_minimal(ball, b)?;
    let c_max = c_max.unwrap_or(2.0 * b.len() as f64);
    let (path, effective_power) = periodic_path(ball, b, max_power);
    if effective_power == 0 {
        return Err(LabError::OutsideBall(ball.alphabet.format_word(b)));
    }
    let dist = path_distances(ball, &path);
    let n = path.len() - 1;
    for k in (1..=20).rev() {
        let lambda = 0.05 * k as f64;
        let mut need = 0.0f64;
        let mut witness = None;
        for i in 0..=n {
            for j in i + 1..=n {
                let slack = lambda * (j - i) as f64 - dist[i][j] as f64;
                if slack > need + 1e-12 {
                    need = slack;
                    witness = Some((i, j));
                }
            }
        }
        let c = (need / 0.5 - 1e-9).ceil().max(0.0) * 0.5;
        if c <= c_max {
            return Ok(QuasiFit { lambda, c, requested_power: max_power, effective_power, c_max, witness });
        }
    }
    Ok(QuasiFit { lambda: 0.0, c: 0.0, requested_power: max_power, effective_power, c_max, witness: None })
}

/// Distances along the path of `B^m` for nestedness checks.
pub fn periodic_distances(ball: &CayleyBall, b: &Word, power: usize) -> (Vec<Vec<u32>>, usize) {
    let (path, done) = periodic_path(ball, b, power);
    (path_distances(ball, &path), done)
}
