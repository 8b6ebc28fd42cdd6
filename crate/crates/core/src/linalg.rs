//! Dense linear algebra over the prime field F_p.

use crate::error::{Error, Result};

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d: &u32| d * d <= p).all(|d| !p.is_multiple_of(d))
}

pub fn check_prime(p: u32) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Reduces a signed integer into `0..p`.
pub fn reduce(a: i64, p: u32) -> u32 {
    a.rem_euclid(p as i64) as u32
}

pub fn inv_mod(a: u32, p: u32) -> u32 {
    // Fermat; p is small.
    pow_mod(a, p - 2, p)
}

fn pow_mod(a: u32, mut e: u32, p: u32) -> u32 {
    let mut acc = 1u64;
    let mut base = a as u64 % p as u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

/// Reduced row echelon form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    /// Non-zero rows, one per pivot.
    pub rows: Vec<Vec<u32>>,
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Columns without a pivot, in increasing order.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|c| !self.pivots.contains(c)).collect()
    }
}

/// Gauss–Jordan elimination of `rows`, each of length `ncols`.
pub fn rref(mut rows: Vec<Vec<u32>>, ncols: usize, p: u32) -> Rref {
    let p64 = p as u64;
    rows.iter_mut().flatten().for_each(|v| *v %= p);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(k) = (r..rows.len()).find(|&k| rows[k][c] != 0) else {
            continue;
        };
        rows.swap(r, k);
        let s = inv_mod(rows[r][c], p) as u64;
        for v in rows[r].iter_mut() {
            *v = (*v as u64 * s % p64) as u32;
        }
        let pivot_row = rows[r].clone();
        for (k, row) in rows.iter_mut().enumerate() {
            if k != r && row[c] != 0 {
                let f = row[c] as u64;
                for (v, &a) in row.iter_mut().zip(&pivot_row) {
                    *v = ((*v as u64 + (p64 - f) * a as u64) % p64) as u32;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    Rref { rows, pivots, ncols }
}

pub fn rank(rows: &[Vec<u32>], ncols: usize, p: u32) -> usize {
    rref(rows.to_vec(), ncols, p).rank()
}

/// Inverse of a square matrix, if it is invertible.
pub fn inverse(m: &[Vec<u32>], p: u32) -> Option<Vec<Vec<u32>>> {
    let n = m.len();
    let aug: Vec<Vec<u32>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| u32::from(i == j)));
            r
        })
        .collect();
    let e = rref(aug, 2 * n, p);
    if e.rank() < n || e.pivots[n - 1] != n - 1 {
        return None;
    }
    Some(e.rows.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Row vector times matrix.
pub fn vec_mul(v: &[u32], m: &[Vec<u32>], p: u32) -> Vec<u32> {
    let ncols = m.first().map_or(0, Vec::len);
    (0..ncols)
        .map(|j| (v.iter().zip(m).map(|(&a, row)| a as u64 * row[j] as u64).sum::<u64>() % p as u64) as u32)
        .collect()
}
