//! Short-vector enumeration for positive-definite Gram matrices.
//!
//! The quadratic form is first LLL-reduced (floating Gram–Schmidt, exact integer basis
//! updates), then enumerated Fincke–Pohst style. The completed-square coefficients come from
//! an exact rational decomposition; the search box is widened by a small margin and every
//! candidate is re-checked with exact integer arithmetic, so no vector on the boundary is lost.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::arith;
use crate::error::Result;
use crate::lattice::IntLattice;

pub type Vector = Vec<i64>;

fn norm_i128(g: &[Vec<i64>], v: &[i64]) -> i128 {
    let n = v.len();
    let mut s: i128 = 0;
    for i in 0..n {
        if v[i] == 0 {
            continue;
        }
        let mut t: i128 = 0;
        for j in 0..n {
            t += g[i][j] as i128 * v[j] as i128;
        }
        s += v[i] as i128 * t;
    }
    s
}

/// LLL-reduces a positive-definite Gram matrix. Returns `(reduced, u)` with
/// `reduced = uᵀ·g·u` and `u` unimodular (columns are the new basis in old coordinates).
pub fn lll_reduce(g: &[Vec<i64>]) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let n = g.len();
    let mut gram: Vec<Vec<i64>> = g.to_vec();
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    if n <= 1 {
        return (gram, u);
    }
    let delta = 0.99;
    let mut k = 1;
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        if guard > 100_000 {
            break;
        }
        let (mu, bstar) = gram_schmidt(&gram);
        // size reduction of b_k
        let mut changed = false;
        let mut mu_k = mu[k].clone();
        for j in (0..k).rev() {
            let q = mu_k[j].round();
            if q != 0.0 {
                let q = q as i64;
                sub_multiple(&mut gram, &mut u, k, j, q);
                for i in 0..j {
                    mu_k[i] -= q as f64 * mu[j][i];
                }
                mu_k[j] -= q as f64;
                changed = true;
            }
        }
        let (mu, bstar) = if changed { gram_schmidt(&gram) } else { (mu, bstar) };
        if bstar[k] < (delta - mu[k][k - 1] * mu[k][k - 1]) * bstar[k - 1] {
            swap_basis(&mut gram, &mut u, k, k - 1);
            k = k.saturating_sub(1).max(1);
        } else {
            k += 1;
        }
    }
    (gram, u)
}

fn gram_schmidt(g: &[Vec<i64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = g.len();
    let mut mu = vec![vec![0.0; n]; n];
    let mut r = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for i in 0..n {
        for j in 0..i {
            let mut s = g[i][j] as f64;
            for k in 0..j {
                s -= mu[j][k] * r[i][k];
            }
            r[i][j] = s;
            mu[i][j] = s / b[j];
        }
        let mut s = g[i][i] as f64;
        for k in 0..i {
            s -= mu[i][k] * r[i][k];
        }
        b[i] = s;
    }
    (mu, b)
}

/// `b_k ← b_k − q·b_j`
fn sub_multiple(gram: &mut [Vec<i64>], u: &mut [Vec<i64>], k: usize, j: usize, q: i64) {
    let n = gram.len();
    let gkk = gram[k][k] - 2 * q * gram[k][j] + q * q * gram[j][j];
    for i in 0..n {
        if i != k {
            let v = gram[k][i] - q * gram[j][i];
            gram[k][i] = v;
            gram[i][k] = v;
        }
    }
    gram[k][k] = gkk;
    for row in u.iter_mut() {
        row[k] -= q * row[j];
    }
}

fn swap_basis(gram: &mut [Vec<i64>], u: &mut [Vec<i64>], a: usize, b: usize) {
    gram.swap(a, b);
    for r in gram.iter_mut() {
        r.swap(a, b);
    }
    for r in u.iter_mut() {
        r.swap(a, b);
    }
}

/// Completed-square coefficients `q` with `Q(x) = Σᵢ q[i][i]·(xᵢ + Σ_{j>i} q[i][j]·xⱼ)²`,
/// computed exactly and then rounded to `f64`.
fn completed_square(g: &[Vec<i64>]) -> Vec<Vec<f64>> {
    let n = g.len();
    let mut q: Vec<Vec<BigRational>> = arith::to_rat_matrix(&arith::to_int_matrix(g));
    for i in 0..n {
        for j in i + 1..n {
            let v = &q[i][j] / &q[i][i];
            q[j][i] = q[i][j].clone();
            q[i][j] = v;
        }
        for k in i + 1..n {
            for l in k..n {
                let v = &q[k][i] * &q[i][l];
                q[k][l] -= v;
            }
        }
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if j >= i { q[i][j].to_f64().unwrap_or(f64::NAN) } else { 0.0 })
                .collect()
        })
        .collect()
}

struct Enumerator<'a> {
    q: &'a [Vec<f64>],
    gram: &'a [Vec<i64>],
    bound: i64,
    margin: f64,
    x: Vec<i64>,
    out: Vec<(Vector, i64)>,
}

impl Enumerator<'_> {
    fn level(&mut self, i: usize, remaining: f64) {
        let n = self.x.len();
        let mut c = 0.0;
        for j in i + 1..n {
            c -= self.q[i][j] * self.x[j] as f64;
        }
        let r = ((remaining + self.margin).max(0.0) / self.q[i][i]).sqrt();
        let lo = (c - r - 1e-9).ceil() as i64;
        let hi = (c + r + 1e-9).floor() as i64;
        for v in lo..=hi {
            self.x[i] = v;
            let d = v as f64 - c;
            let used = self.q[i][i] * d * d;
            let rest = remaining - used;
            if rest < -self.margin {
                continue;
            }
            if i == 0 {
                let nm = norm_i128(self.gram, &self.x);
                if nm <= self.bound as i128 {
                    self.out.push((self.x.clone(), nm as i64));
                }
            } else {
                self.level(i - 1, rest);
            }
        }
        self.x[i] = 0;
    }
}

/// Every nonzero vector of norm at most `bound`, with its norm, in lexicographic order of
/// coordinates in the basis of `g`.
pub fn short_vectors(g: &[Vec<i64>], bound: i64) -> Vec<(Vector, i64)> {
    let n = g.len();
    if n == 0 || bound <= 0 {
        return Vec::new();
    }
    let (red, u) = lll_reduce(g);
    let q = completed_square(&red);
    let margin = 1e-7 * (1.0 + bound as f64);
    let top = n - 1;
    let r = ((bound as f64 + margin) / q[top][top]).sqrt();
    let hi = (r + 1e-9).floor() as i64;
    let mut found: Vec<(Vector, i64)> = (-hi..=hi)
        .into_par_iter()
        .flat_map_iter(|v| {
            let mut e = Enumerator { q: &q, gram: &red, bound, margin, x: vec![0; n], out: Vec::new() };
            e.x[top] = v;
            let used = q[top][top] * (v as f64) * (v as f64);
            if n == 1 {
                let nm = norm_i128(&red, &e.x);
                if nm <= bound as i128 {
                    e.out.push((e.x.clone(), nm as i64));
                }
            } else {
                e.level(top - 1, bound as f64 - used);
            }
            e.out
        })
        .filter(|(v, _)| v.iter().any(|&c| c != 0))
        .map(|(y, nm)| {
            let x: Vector = (0..n).map(|i| (0..n).map(|j| u[i][j] * y[j]).sum()).collect();
            (x, nm)
        })
        .collect();
    found.sort();
    found
}

/// All vectors with `vᵀ·gram·v = m`, lexicographically ordered.
pub fn vectors_of_norm(l: &IntLattice, m: i64) -> Result<Vec<Vector>> {
    l.require_positive_definite()?;
    let g = l.small_gram()?;
    Ok(short_vectors(&g, m).into_iter().filter(|(_, nm)| *nm == m).map(|(v, _)| v).collect())
}

/// `counts[k]` = number of vectors of norm `k` for `k ≤ bound` (`counts[0] = 1`).
pub fn norm_counts(g: &[Vec<i64>], bound: i64) -> Vec<u64> {
    let mut counts = vec![0u64; bound.max(0) as usize + 1];
    counts[0] = 1;
    for (_, nm) in short_vectors(g, bound) {
        counts[nm as usize] += 1;
    }
    counts
}

pub fn minimum(g: &[Vec<i64>]) -> i64 {
    let (red, _) = lll_reduce(g);
    let cap = (0..red.len()).map(|i| red[i][i]).min().unwrap_or(0);
    short_vectors(&red, cap).iter().map(|(_, n)| *n).min().unwrap_or(cap)
}
