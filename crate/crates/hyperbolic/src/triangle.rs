//! Reflections in the sides of a hyperbolic triangle with angles
//! `π/p, π/q, π/r`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use cgt_core::Alphabet;

use crate::ball::{cayley_ball, CayleyBall};
use crate::error::{LabError, Result};
use crate::isometry::Isometry;

/// Angles `π/p` between mirrors a and b, `π/q` between b and c, and `π/r`
/// between a and c, so that `(ab)^p = (bc)^q = (ac)^r = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleGroupSpec {
    pub p: u32,
    pub q: u32,
    pub r: u32,
}

impl TriangleGroupSpec {
    pub fn new(p: u32, q: u32, r: u32) -> Result<Self> {
        if p < 2 || q < 2 || r < 2 {
            return Err(LabError::InvalidSpec(format!("angles must be π/n with n ≥ 2, got ({p},{q},{r})")));
        }
        // 1/p + 1/q + 1/r < 1  <=>  qr + pr + pq < pqr, exactly in integers.
        let (p64, q64, r64) = (p as u64, q as u64, r as u64);
        if q64 * r64 + p64 * r64 + p64 * q64 >= p64 * q64 * r64 {
            return Err(LabError::NotHyperbolic { p, q, r });
        }
        Ok(TriangleGroupSpec { p, q, r })
    }

    /// Parses `"2,4,8"`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<u32> = text
            .split(',')
            .map(|s| s.trim().parse::<u32>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| LabError::InvalidSpec(format!("expected three integers, got {text:?}")))?;
        match parts[..] {
            [p, q, r] => TriangleGroupSpec::new(p, q, r),
            _ => Err(LabError::InvalidSpec(format!("expected three integers, got {text:?}"))),
        }
    }
}

/// The three reflections, from unit normals with Gram matrix entries
/// `−cos(π/p)`, `−cos(π/q)`, `−cos(π/r)`.
pub fn build_reflections(spec: TriangleGroupSpec) -> Result<[Isometry; 3]> {
    let spec = TriangleGroupSpec::new(spec.p, spec.q, spec.r)?;
    let (cp, sp) = ((PI / spec.p as f64).cos(), (PI / spec.p as f64).sin());
    let cq = (PI / spec.q as f64).cos();
    let cr = (PI / spec.r as f64).cos();
    let na = [1.0, 0.0, 0.0];
    let nb = [-cp, sp, 0.0];
    let u = -cr;
    let v = (-cq + cp * u) / sp;
    let w2 = u * u + v * v - 1.0;
    if w2 <= 0.0 {
        return Err(LabError::NotHyperbolic { p: spec.p, q: spec.q, r: spec.r });
    }
    let nc = [u, v, w2.sqrt()];
    Ok([Isometry::reflection(na), Isometry::reflection(nb), Isometry::reflection(nc)])
}

/// `‖(ab)^p − I‖, ‖(bc)^q − I‖, ‖(ac)^r − I‖` in max-norm.
pub fn relation_residuals(spec: TriangleGroupSpec, [a, b, c]: &[Isometry; 3]) -> [f64; 3] {
    let id = Isometry::identity();
    [
        (*a * *b).pow(spec.p).distance(&id),
        (*b * *c).pow(spec.q).distance(&id),
        (*a * *c).pow(spec.r).distance(&id),
    ]
}

/// Generators `x = ab`, `y = bc` of the orientation-preserving subgroup;
/// `xy = ac`.
pub fn rotation_generators(refl: &[Isometry; 3]) -> [Isometry; 2] {
    let [a, b, c] = *refl;
    [a * b, b * c]
}

/// Ball of the full reflection group on generators `a, b, c`.
pub fn reflection_ball(spec: TriangleGroupSpec, radius: usize, tol: f64) -> Result<CayleyBall> {
    let refl = build_reflections(spec)?;
    cayley_ball(&refl, &Alphabet::new(["a", "b", "c"])?, radius, tol)
}

/// Ball of the orientation-preserving subgroup on generators `x = ab`,
/// `y = bc`.
pub fn rotation_ball(spec: TriangleGroupSpec, radius: usize, tol: f64) -> Result<CayleyBall> {
    let rot = rotation_generators(&build_reflections(spec)?);
    cayley_ball(&rot, &Alphabet::new(["x", "y"])?, radius, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyperbolic_condition() {
        assert!(TriangleGroupSpec::new(2, 4, 8).is_ok());
        assert_eq!(TriangleGroupSpec::new(2, 3, 6), Err(LabError::NotHyperbolic { p: 2, q: 3, r: 6 }));
        assert!(TriangleGroupSpec::new(2, 3, 5).is_err());
        assert!(TriangleGroupSpec::new(2, 3, 7).is_ok());
        assert!(TriangleGroupSpec::new(1, 3, 7).is_err());
        assert_eq!(TriangleGroupSpec::parse("2, 4,8").unwrap(), TriangleGroupSpec { p: 2, q: 4, r: 8 });
        assert!(TriangleGroupSpec::parse("2,4").is_err());
    }

    #[test]
    fn reflections_of_the_248_triangle() {
        let spec = TriangleGroupSpec::new(2, 4, 8).unwrap();
        let refl = build_reflections(spec).unwrap();
        for m in &refl {
            assert!((m.det() + 1.0).abs() < 1e-12);
            assert!((m.trace() - 1.0).abs() < 1e-12);
            assert!(m.form_residual() < 1e-12);
        }
        assert!(relation_residuals(spec, &refl).iter().all(|&r| r <= 1e-9));
        let [a, b, c] = refl;
        assert_eq!((a * b).order(16, 1e-9), Some(2));
        assert_eq!((b * c).order(16, 1e-9), Some(4));
        assert_eq!((a * c).order(16, 1e-9), Some(8));
    }

    #[test]
    fn other_triangles() {
        for (p, q, r) in [(2, 3, 7), (3, 3, 4), (4, 4, 4), (2, 5, 5)] {
            let spec = TriangleGroupSpec::new(p, q, r).unwrap();
            let refl = build_reflections(spec).unwrap();
            assert!(relation_residuals(spec, &refl).iter().all(|&x| x <= 1e-9), "{spec:?}");
        }
    }
}
