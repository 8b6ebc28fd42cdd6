//! Empirical thinness of geodesic triangles in a Cayley ball.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ball::CayleyBall;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlimnessReport {
    pub delta_hat: u32,
    pub samples: usize,
    pub evaluated: usize,
    pub skipped: usize,
    pub seed: u64,
    /// Triangle vertices are drawn from this radius.
    pub inner_radius: usize,
}

impl SlimnessReport {
    pub fn skip_rate(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.skipped as f64 / self.samples as f64
        }
    }
}

/// Largest distance from a point of one side to the union of the other two
/// sides, for the triangle with the ball's canonical geodesics as sides.
/// `None` if a side cannot be drawn inside the ball.
pub fn triangle_thinness(ball: &CayleyBall, [x, y, z]: [usize; 3]) -> Option<u32> {
    let sides = [ball.geodesic(x, y)?, ball.geodesic(y, z)?, ball.geodesic(z, x)?];
    let mut worst = 0;
    for k in 0..3 {
        let others: Vec<usize> = sides[(k + 1) % 3].iter().chain(&sides[(k + 2) % 3]).copied().collect();
        let dist = ball.distances_from(&others);
        for &v in &sides[k] {
            worst = worst.max(dist[v]);
        }
    }
    Some(worst)
}

/// Samples triples from the ball of radius `R/2`. A triple is skipped when
/// two of its vertices have word lengths summing past `R`, since a geodesic
/// between them could then leave the ball.
pub fn empirical_slimness(ball: &CayleyBall, samples: usize, seed: u64) -> SlimnessReport {
    let inner_radius = ball.radius / 2;
    let inner: Vec<usize> = (0..ball.len()).filter(|&v| ball.vertices[v].dist <= inner_radius).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut delta_hat = 0;
    let (mut evaluated, mut skipped) = (0, 0);
    for _ in 0..samples {
        let t = [0, 1, 2].map(|_| *inner.choose(&mut rng).expect("ball is non-empty"));
        let len = |v: usize| ball.vertices[v].dist;
        let inside = (0..3).all(|i| len(t[i]) + len(t[(i + 1) % 3]) <= ball.radius);
        match triangle_thinness(ball, t).filter(|_| inside) {
            Some(d) => {
                delta_hat = delta_hat.max(d);
                evaluated += 1;
            }
            None => skipped += 1,
        }
    }
    SlimnessReport { delta_hat, samples, evaluated, skipped, seed, inner_radius }
}
