use std::collections::BTreeMap;

use serde::Serialize;

use crate::ball::CayleyBall;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TorsionProfile {
    pub max_order: u32,
    /// Finite order -> number of orientation-preserving vertices with it.
    pub orders: BTreeMap<u32, usize>,
    /// Orientation-preserving vertices with no power `≤ max_order` at the
    /// identity.
    pub exceeding: usize,
    pub examined: usize,
}

impl TorsionProfile {
    pub fn all_divide(&self, n: u32) -> bool {
        self.orders.keys().all(|&k| n.is_multiple_of(k))
    }
}

/// Orders of the orientation-preserving torsion elements of the ball.
pub fn torsion_profile(ball: &CayleyBall, max_order: u32, tol: f64) -> TorsionProfile {
    let mut orders = BTreeMap::new();
    let mut exceeding = 0;
    let mut examined = 0;
    for v in &ball.vertices {
        if v.matrix.det() < 0.0 {
            continue;
        }
        examined += 1;
        match v.matrix.order(max_order, tol) {
            Some(k) => *orders.entry(k).or_insert(0) += 1,
            None => exceeding += 1,
        }
    }
    TorsionProfile { max_order, orders, exceeding, examined }
}
