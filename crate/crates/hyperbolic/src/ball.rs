//! Breadth-first balls in Cayley graphs of matrix groups.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use cgt_core::{Alphabet, Letter, Word};

use crate::error::{LabError, Result};
use crate::isometry::Isometry;

const NONE: u32 = u32::MAX;

/// Matches closer than `dedup_tol` are the same element; the nearest
/// non-match must be at least this many tolerances away, otherwise the
/// identification is ambiguous.
pub const AMBIGUITY_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, Serialize)]
pub struct Vertex {
    #[serde(skip)]
    pub word: Word,
    pub matrix: Isometry,
    pub dist: usize,
}

#[derive(Debug, Clone)]
pub struct CayleyBall {
    pub alphabet: Alphabet,
    pub gens: Vec<Isometry>,
    pub radius: usize,
    pub dedup_tol: f64,
    pub vertices: Vec<Vertex>,
    /// `vertex * columns + letter column -> vertex`, or `NONE` outside.
    nbr: Vec<u32>,
    index: MatrixIndex,
}

#[derive(Debug, Clone)]
struct MatrixIndex {
    weights: [[f64; 3]; 3],
    bucket: f64,
    buckets: HashMap<i64, Vec<u32>>,
}

impl MatrixIndex {
    fn new(tol: f64) -> Self {
        let mut weights = [[0.0; 3]; 3];
        for (k, w) in weights.iter_mut().flatten().enumerate() {
            *w = 1.0 + (k as f64 * std::f64::consts::SQRT_2).fract();
        }
        let total: f64 = weights.iter().flatten().sum();
        MatrixIndex { weights, bucket: 2.0 * AMBIGUITY_FACTOR * tol * total, buckets: HashMap::new() }
    }

    fn key(&self, m: &Isometry) -> i64 {
        let s: f64 = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| self.weights[i][j] * m.m[i][j]).sum();
        (s / self.bucket).floor() as i64
    }

    fn insert(&mut self, m: &Isometry, v: u32) {
        let k = self.key(m);
        self.buckets.entry(k).or_default().push(v);
    }

    /// Vertices within the ambiguity radius of `m`.
    fn near<'a>(&'a self, m: &Isometry) -> impl Iterator<Item = u32> + 'a {
        let k = self.key(m);
        (k - 1..=k + 1).flat_map(move |k| self.buckets.get(&k).into_iter().flatten().copied())
    }
}

impl CayleyBall {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn columns(&self) -> usize {
        2 * self.gens.len()
    }

    pub fn generator_matrix(&self, l: Letter) -> Isometry {
        let g = self.gens[l.generator()];
        if l.is_inverse() {
            g.inverse()
        } else {
            g
        }
    }

    pub fn neighbour(&self, v: usize, l: Letter) -> Option<usize> {
        let w = self.nbr[v * self.columns() + l.column()];
        (w != NONE).then_some(w as usize)
    }

    /// All edges `(v, letter, w)` in vertex then column order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, Letter, usize)> + '_ {
        (0..self.len()).flat_map(move |v| {
            (0..self.columns()).filter_map(move |c| {
                let l = Letter::from_column(c);
                self.neighbour(v, l).map(|w| (v, l, w))
            })
        })
    }

    /// Follows `w` from vertex `start`; `None` if the path leaves the ball.
    pub fn trace_from(&self, start: usize, w: &Word) -> Option<usize> {
        w.letters().iter().try_fold(start, |v, &l| self.neighbour(v, l))
    }

    pub fn locate(&self, w: &Word) -> Option<usize> {
        self.trace_from(0, w)
    }

    /// Vertex carrying (approximately) this matrix.
    pub fn find(&self, m: &Isometry) -> Option<usize> {
        self.index
            .near(m)
            .find(|&v| self.vertices[v as usize].matrix.distance(m) <= self.dedup_tol)
            .map(|v| v as usize)
    }

    pub fn word_string(&self, v: usize) -> String {
        self.alphabet.format_word(&self.vertices[v].word)
    }

    /// Breadth-first distances inside the ball from a set of sources;
    /// `u32::MAX` marks unreachable vertices.
    pub fn distances_from(&self, sources: &[usize]) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            for c in 0..self.columns() {
                let w = self.nbr[v * self.columns() + c];
                if w != NONE && dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[v] + 1;
                    queue.push_back(w as usize);
                }
            }
        }
        dist
    }

    /// A shortest path from `a` to `b` inside the ball (vertices in order),
    /// preferring lower generator columns, as a deterministic geodesic.
    pub fn geodesic(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        let dist = self.distances_from(&[b]);
        if dist[a] == u32::MAX {
            return None;
        }
        let mut path = vec![a];
        let mut v = a;
        while v != b {
            v = (0..self.columns())
                .map(|c| self.nbr[v * self.columns() + c])
                .find(|&w| w != NONE && dist[w as usize] + 1 == dist[v])
                .expect("distance decreases along some edge") as usize;
            path.push(v);
        }
        Some(path)
    }

    /// Adjacency export: `(vertex, canonical word, generator symbol, vertex)`.
    pub fn adjacency(&self) -> Vec<(usize, String, String, usize)> {
        self.edges().map(|(v, l, w)| (v, self.word_string(v), self.alphabet.symbol(l), w)).collect()
    }
}

/// Ball of word-length radius `radius` in the group generated by `gens`
/// (and their inverses). Vertices appear in breadth-first order with
/// columns scanned in letter order, so canonical words are shortlex-least.
pub fn cayley_ball(gens: &[Isometry], alphabet: &Alphabet, radius: usize, dedup_tol: f64) -> Result<CayleyBall> {
    if gens.len() != alphabet.len() {
        return Err(LabError::Precondition(format!("{} matrices for {} symbols", gens.len(), alphabet.len())));
    }
    let cols = 2 * gens.len();
    let mut ball = CayleyBall {
        alphabet: alphabet.clone(),
        gens: gens.to_vec(),
        radius,
        dedup_tol,
        vertices: vec![Vertex { word: Word::identity(), matrix: Isometry::identity(), dist: 0 }],
        nbr: vec![NONE; cols],
        index: MatrixIndex::new(dedup_tol),
    };
    ball.index.insert(&Isometry::identity(), 0);
    let letter_mats: Vec<Isometry> = (0..cols).map(|c| ball.generator_matrix(Letter::from_column(c))).collect();
    let mut v = 0;
    while v < ball.vertices.len() {
        for c in 0..cols {
            if ball.nbr[v * cols + c] != NONE {
                continue;
            }
            let m = ball.vertices[v].matrix * letter_mats[c];
            let mut hit = None;
            let mut nearest_miss = f64::INFINITY;
            for u in ball.index.near(&m) {
                let d = ball.vertices[u as usize].matrix.distance(&m);
                if d <= dedup_tol {
                    if hit.is_some() {
                        nearest_miss = d;
                    }
                    hit = Some(u);
                } else {
                    nearest_miss = nearest_miss.min(d);
                }
            }
            if nearest_miss <= AMBIGUITY_FACTOR * dedup_tol {
                let mut word = ball.vertices[v].word.clone();
                word.push(Letter::from_column(c));
                return Err(LabError::DedupAmbiguity {
                    word: alphabet.format_word(&word),
                    distance: nearest_miss,
                    tol: dedup_tol,
                });
            }
            let w = match hit {
                Some(u) => u,
                None if ball.vertices[v].dist < radius => {
                    let u = ball.vertices.len() as u32;
                    let mut word = ball.vertices[v].word.clone();
                    word.push(Letter::from_column(c));
                    ball.vertices.push(Vertex { word, matrix: m, dist: ball.vertices[v].dist + 1 });
                    ball.nbr.extend(std::iter::repeat_n(NONE, cols));
                    ball.index.insert(&m, u);
                    u
                }
                None => continue,
            };
            ball.nbr[v * cols + c] = w;
            ball.nbr[w as usize * cols + (c ^ 1)] = v as u32;
        }
        v += 1;
    }
    Ok(ball)
}
