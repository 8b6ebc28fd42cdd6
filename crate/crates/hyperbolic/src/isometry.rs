//! Isometries of the hyperboloid model `x² + y² − t² = −1`.

use std::ops::Mul;

use serde::Serialize;

pub type Mat3 = [[f64; 3]; 3];

/// The form `J = diag(1, 1, −1)`.
pub const J: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]];
pub const IDENTITY: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Isometry {
    pub m: Mat3,
}

fn matmul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[0.0; 3]; 3];
    for (i, row) in c.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

impl Isometry {
    pub fn identity() -> Self {
        Isometry { m: IDENTITY }
    }

    pub fn new(m: Mat3) -> Self {
        Isometry { m }
    }

    /// Reflection in the line orthogonal to the spacelike unit vector `n`:
    /// `x ↦ x − 2⟨x, n⟩ n`, i.e. `I − 2 n nᵀ J`.
    pub fn reflection(n: [f64; 3]) -> Self {
        let jn = [n[0], n[1], -n[2]];
        let mut m = IDENTITY;
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] -= 2.0 * n[i] * jn[j];
            }
        }
        Isometry { m }
    }

    /// `M⁻¹ = J Mᵀ J` for form-preserving `M`.
    pub fn inverse(&self) -> Self {
        let mut t = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                t[i][j] = J[i][i] * self.m[j][i] * J[j][j];
            }
        }
        Isometry { m: t }
    }

    pub fn det(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    /// Largest absolute entry.
    pub fn norm(&self) -> f64 {
        self.m.iter().flatten().fold(0.0, |a, &x| a.max(x.abs()))
    }

    /// `‖MᵀJM − J‖_max`.
    pub fn form_residual(&self) -> f64 {
        let mt = {
            let mut t = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    t[i][j] = self.m[j][i];
                }
            }
            t
        };
        let g = matmul(&matmul(&mt, &J), &self.m);
        let mut r: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                r = r.max((g[i][j] - J[i][j]).abs());
            }
        }
        r
    }

    /// Max-norm distance between matrices.
    pub fn distance(&self, other: &Isometry) -> f64 {
        let mut r: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                r = r.max((self.m[i][j] - other.m[i][j]).abs());
            }
        }
        r
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.distance(&Isometry::identity()) <= tol
    }

    pub fn pow(&self, n: u32) -> Isometry {
        (0..n).fold(Isometry::identity(), |acc, _| acc * *self)
    }

    /// Smallest `k ≤ max_order` with `M^k ≈ I`. The tolerance is scaled
    /// by `1 + ‖M‖²`: powers of an elliptic `M` are conjugates of rotations
    /// by matrices of that size, and so is their round-off.
    pub fn order(&self, max_order: u32, tol: f64) -> Option<u32> {
        let tol = tol * (1.0 + self.norm().powi(2));
        let mut acc = *self;
        for k in 1..=max_order {
            if acc.is_identity(tol) {
                return Some(k);
            }
            acc = acc * *self;
        }
        None
    }
}

impl Mul for Isometry {
    type Output = Isometry;

    fn mul(self, rhs: Isometry) -> Isometry {
        Isometry { m: matmul(&self.m, &rhs.m) }
    }
}
