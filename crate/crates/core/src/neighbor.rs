//! Kneser p-neighbours of even positive-definite lattices.
//!
//! For an isotropic `v ∈ L` (`v·v ≡ 0 mod 2p²` after adjustment) the neighbour is
//! `L_v + ℤ·v/p` with `L_v = {x : x·v ≡ 0 mod p}`. Isotropic lines mod p are swept in a fixed
//! order; under a group acting mod p only one line per orbit is reported.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::arith;
use crate::error::{Error, Result};
use crate::lattice::IntLattice;
use crate::shortvec;

/// Largest `p^n` the line sweep accepts.
pub const MAX_SWEEP: u64 = 1 << 31;

fn inv_mod(a: i64, p: i64) -> i64 {
    let (mut r0, mut r1, mut s0, mut s1) = (p, a.rem_euclid(p), 0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    s0.rem_euclid(p)
}

fn check_prime(l: &IntLattice, p: u64) -> Result<()> {
    if !arith::is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    if (l.det() % BigInt::from(p)).is_zero() {
        return Err(Error::Domain(format!("{p} divides the determinant")));
    }
    if !l.is_even() {
        return Err(Error::Domain("neighbours are defined here for even lattices".into()));
    }
    Ok(())
}

/// The p-neighbour along `v` (coordinates in the basis of `l`), LLL-reduced.
pub fn neighbor_along(l: &IntLattice, v: &[i64], p: u64) -> Result<IntLattice> {
    let g = l.small_gram()?;
    let n = g.len();
    let pi = p as i64;
    let a: Vec<i128> = (0..n).map(|i| (0..n).map(|j| g[i][j] as i128 * v[j] as i128).sum()).collect();
    let vv: i128 = (0..n).map(|i| v[i] as i128 * a[i]).sum();
    let modulus = if p == 2 { 4 } else { p as i128 };
    if vv.rem_euclid(modulus) != 0 {
        return Err(Error::Domain("vector is not isotropic mod p".into()));
    }
    let j = (0..n)
        .find(|&j| a[j].rem_euclid(p as i128) != 0)
        .ok_or_else(|| Error::Domain("vector lies in pL".into()))?;
    let aj = (a[j].rem_euclid(p as i128)) as i64;
    // v' = v + p·t·e_j with v'·v' ≡ 0 (mod 2p²)
    let t = if p == 2 {
        ((vv / 4) % 2).rem_euclid(2) as i64
    } else {
        let c = (vv / p as i128).rem_euclid(p as i128) as i64;
        (-c * inv_mod(2 * aj, pi)).rem_euclid(pi)
    };
    let mut vp: Vec<i64> = v.to_vec();
    vp[j] += pi * t;
    let aj_inv = inv_mod(aj, pi);
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut r = vec![BigInt::zero(); n];
        if i == j {
            r[j] = BigInt::from(pi * pi);
        } else {
            let c = (a[i].rem_euclid(p as i128) as i64 * aj_inv).rem_euclid(pi);
            r[i] = BigInt::from(pi);
            r[j] = BigInt::from(-pi * c);
        }
        rows.push(r);
    }
    rows.push(vp.iter().map(|&x| BigInt::from(x)).collect());
    let h = arith::hnf_rows(rows);
    debug_assert_eq!(h.len(), n);
    let gb = arith::to_int_matrix(&g);
    let ht = arith::transpose(&h);
    let raw = arith::mat_mul_int(&arith::mat_mul_int(&h, &gb), &ht);
    let p2 = BigInt::from(pi * pi);
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for k in 0..n {
            let x = &raw[i][k];
            if !(x % &p2).is_zero() {
                return Err(Error::Domain("neighbour is not integral".into()));
            }
            out[i][k] = (x / &p2).to_i64().ok_or_else(|| Error::Overflow("neighbour Gram entry".into()))?;
        }
    }
    let (red, _) = shortvec::lll_reduce(&out);
    IntLattice::from_i64(&red, "neighbour")
}

/// Sweeps the normalized isotropic vectors of `L/pL` (first nonzero coordinate 1).
pub struct LineSweep {
    p: i64,
    n: usize,
    g: Vec<Vec<i64>>,
    digits: Vec<i64>,
    gv: Vec<i64>,
    q: i64,
    qmod: i64,
    done: bool,
}

impl LineSweep {
    pub fn new(l: &IntLattice, p: u64) -> Result<Self> {
        check_prime(l, p)?;
        let n = l.rank();
        let total = (p as f64).powi(n as i32);
        if total > MAX_SWEEP as f64 {
            return Err(Error::Unsupported(format!("{p}^{n} residue vectors exceed the sweep limit")));
        }
        let g = l.small_gram()?;
        let p = p as i64;
        Ok(LineSweep {
            p,
            n,
            g,
            digits: vec![0; n],
            gv: vec![0; n],
            q: 0,
            qmod: if p == 2 { 4 } else { p },
            done: n == 0,
        })
    }

    /// Residue index `Σ v_i p^i`.
    pub fn index_of(&self, v: &[i64]) -> u64 {
        v.iter().rev().fold(0u64, |acc, &d| acc * self.p as u64 + d as u64)
    }

    fn add_unit(&mut self, i: usize) {
        let p = self.p;
        self.q = (self.q + 2 * self.gv[i] + self.g[i][i]).rem_euclid(self.qmod);
        for k in 0..self.n {
            self.gv[k] = (self.gv[k] + self.g[k][i]).rem_euclid(p);
        }
        self.digits[i] = (self.digits[i] + 1) % p;
    }

    fn step(&mut self) -> bool {
        for i in 0..self.n {
            let carry = self.digits[i] == self.p - 1;
            self.add_unit(i);
            if !carry {
                return true;
            }
        }
        false
    }
}

impl Iterator for LineSweep {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        if self.done {
            return None;
        }
        loop {
            if !self.step() {
                self.done = true;
                return None;
            }
            if self.q == 0 && self.digits.iter().find(|&&d| d != 0) == Some(&1) {
                return Some(self.digits.clone());
            }
        }
    }
}

/// All p-neighbours of `l`, one per isotropic line mod p.
pub fn kneser_neighbors(l: &IntLattice, p: u64) -> Result<Vec<IntLattice>> {
    l.require_positive_definite()?;
    let sweep = LineSweep::new(l, p)?;
    sweep.map(|v| neighbor_along(l, &v, p)).collect()
}

/// Marks whole orbits of lines under a matrix group acting mod p.
pub struct OrbitMarker {
    p: i64,
    n: usize,
    action: Action,
    visited: Vec<u64>,
}

enum Action {
    /// Column-major generators mod p.
    Generic(Vec<Vec<Vec<i64>>>),
    /// p = 3, n ≤ 16: vectors packed four bits per coordinate; for every generator and every
    /// pair of coordinates, the image of each byte.
    Ternary { tables: Vec<Vec<[u64; 256]>>, index: Vec<[u64; 256]> },
}

const LOW: u64 = 0x1111_1111_1111_1111;
const HIGH: u64 = 0x2222_2222_2222_2222;

/// Lane-wise addition mod 3 of packed ternary vectors.
#[inline]
fn add3(a: u64, b: u64) -> u64 {
    let s = a + b;
    let over = ((s + LOW) >> 2) & LOW;
    s - 3 * over
}

#[inline]
fn neg3(a: u64) -> u64 {
    ((a & LOW) << 1) | ((a & HIGH) >> 1)
}

fn pack3(v: &[i64]) -> u64 {
    v.iter().enumerate().fold(0u64, |acc, (i, &d)| acc | (d as u64) << (4 * i))
}

impl OrbitMarker {
    /// `generators` act on coordinate columns.
    pub fn new(generators: &[Vec<Vec<i64>>], n: usize, p: u64) -> Self {
        let p = p as i64;
        let size = (p as u64).pow(n as u32);
        let cols: Vec<Vec<Vec<i64>>> = generators
            .iter()
            .map(|m| (0..n).map(|c| (0..n).map(|r| m[r][c].rem_euclid(p)).collect()).collect())
            .collect();
        let action = if p == 3 && n <= 16 {
            let chunks = n.div_ceil(2);
            let tables = cols
                .iter()
                .map(|col| {
                    (0..chunks)
                        .map(|c| {
                            let mut t = [0u64; 256];
                            for d0 in 0..3i64 {
                                for d1 in 0..3i64 {
                                    let mut img = vec![0i64; n];
                                    for (k, d) in [(2 * c, d0), (2 * c + 1, d1)] {
                                        if k < n {
                                            for (x, &m) in img.iter_mut().zip(&col[k]) {
                                                *x = (*x + d * m) % 3;
                                            }
                                        }
                                    }
                                    t[(d0 | d1 << 4) as usize] = pack3(&img);
                                }
                            }
                            t
                        })
                        .collect()
                })
                .collect();
            let index = (0..chunks)
                .map(|c| {
                    let mut t = [0u64; 256];
                    for d0 in 0..3u64 {
                        for d1 in 0..3u64 {
                            t[(d0 | d1 << 4) as usize] = (d0 + 3 * d1) * 9u64.pow(c as u32);
                        }
                    }
                    t
                })
                .collect();
            Action::Ternary { tables, index }
        } else {
            Action::Generic(cols)
        };
        OrbitMarker { p, n, action, visited: vec![0; size.div_ceil(64) as usize] }
    }

    fn index(&self, v: &[i64]) -> u64 {
        v.iter().rev().fold(0u64, |acc, &d| acc * self.p as u64 + d as u64)
    }

    pub fn is_visited(&self, v: &[i64]) -> bool {
        let i = self.index(v);
        self.visited[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    fn set(&mut self, i: u64) -> bool {
        let (w, b) = ((i / 64) as usize, i % 64);
        let was = self.visited[w] >> b & 1 == 1;
        self.visited[w] |= 1 << b;
        !was
    }

    fn normalize(&self, v: &mut [i64]) {
        if let Some(&lead) = v.iter().find(|&&d| d != 0) {
            let inv = inv_mod(lead, self.p);
            for d in v.iter_mut() {
                *d = *d * inv % self.p;
            }
        }
    }

    /// Marks the orbit of the normalized line `v`; returns its size.
    pub fn mark_orbit(&mut self, v: &[i64]) -> usize {
        let start = self.index(v);
        if !self.set(start) {
            return 0;
        }
        let action = std::mem::replace(&mut self.action, Action::Generic(Vec::new()));
        let size = match &action {
            Action::Ternary { tables, index } => self.mark_ternary(pack3(v), tables, index),
            Action::Generic(gens) => self.mark_generic(v, gens),
        };
        self.action = action;
        size
    }

    fn mark_ternary(&mut self, start: u64, tables: &[Vec<[u64; 256]>], index: &[[u64; 256]]) -> usize {
        let mut size = 1;
        let mut queue = vec![start];
        while let Some(x) = queue.pop() {
            for t in tables {
                let mut img = 0u64;
                for (c, tc) in t.iter().enumerate() {
                    img = add3(img, tc[((x >> (8 * c)) & 0xff) as usize]);
                }
                if img == 0 {
                    continue;
                }
                // scale so the first nonzero coordinate is 1
                if (img >> (img.trailing_zeros() & !3)) & 0xf == 2 {
                    img = neg3(img);
                }
                let i: u64 = index.iter().enumerate().map(|(c, tc)| tc[((img >> (8 * c)) & 0xff) as usize]).sum();
                if self.set(i) {
                    size += 1;
                    queue.push(img);
                }
            }
        }
        size
    }

    fn mark_generic(&mut self, v: &[i64], gens: &[Vec<Vec<i64>>]) -> usize {
        let mut size = 1;
        let mut queue = vec![v.to_vec()];
        let mut img = vec![0i64; self.n];
        while let Some(x) = queue.pop() {
            for g in gens {
                img.iter_mut().for_each(|d| *d = 0);
                for (c, &xc) in x.iter().enumerate() {
                    if xc != 0 {
                        for (d, &m) in img.iter_mut().zip(&g[c]) {
                            *d += xc * m;
                        }
                    }
                }
                for d in img.iter_mut() {
                    *d %= self.p;
                }
                self.normalize(&mut img);
                let i = self.index(&img);
                if self.set(i) {
                    size += 1;
                    queue.push(img.clone());
                }
            }
        }
        size
    }
}

/// Normalized isotropic lines mod p, one per orbit of the group generated by `generators`.
pub struct OrbitLines {
    sweep: LineSweep,
    marker: OrbitMarker,
}

impl OrbitLines {
    pub fn new(l: &IntLattice, p: u64, generators: &[Vec<Vec<i64>>]) -> Result<Self> {
        let sweep = LineSweep::new(l, p)?;
        let marker = OrbitMarker::new(generators, l.rank(), p);
        Ok(OrbitLines { sweep, marker })
    }
}

impl Iterator for OrbitLines {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        for v in self.sweep.by_ref() {
            if !self.marker.is_visited(&v) {
                self.marker.mark_orbit(&v);
                return Some(v);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genus::same_genus;
    use crate::isom::is_isometric;
    use crate::lattice::{e8, rescale, root_lattice};
    use crate::lie::LieType;

    #[test]
    fn e8_two_neighbours() {
        let l = e8();
        let ns = kneser_neighbors(&l, 2).unwrap();
        // isotropic lines of the even quadratic form on E8/2E8
        assert_eq!(ns.len(), 135);
        for nb in ns.iter().take(10) {
            assert!(is_isometric(nb, &l).unwrap().matrix.is_some());
        }
    }

    #[test]
    fn neighbours_stay_in_genus() {
        let l = root_lattice(LieType::D, 4).unwrap();
        let ns = kneser_neighbors(&l, 3).unwrap();
        assert!(!ns.is_empty());
        for nb in &ns {
            assert!(nb.is_even());
            assert!(same_genus(nb, &l).unwrap());
        }
        let a = rescale(&root_lattice(LieType::A, 2).unwrap(), 2);
        assert!(kneser_neighbors(&a, 2).is_err());
    }

    #[test]
    fn sweep_counts_isotropic_lines() {
        // brute-force count of normalized isotropic vectors
        let l = root_lattice(LieType::A, 4).unwrap();
        let g = l.small_gram().unwrap();
        let p = 3i64;
        let mut count = 0;
        let mut v = vec![0i64; 4];
        loop {
            let mut i = 0;
            while i < 4 {
                v[i] += 1;
                if v[i] < p {
                    break;
                }
                v[i] = 0;
                i += 1;
            }
            if i == 4 {
                break;
            }
            let q: i64 = (0..4).map(|a| (0..4).map(|b| v[a] * g[a][b] * v[b]).sum::<i64>()).sum();
            if q % p == 0 && v.iter().find(|&&d| d != 0) == Some(&1) {
                count += 1;
            }
        }
        assert_eq!(LineSweep::new(&l, 3).unwrap().count(), count);
    }

    #[test]
    fn orbit_lines_cover_fewer() {
        let l = e8();
        let gens = crate::isom::aut_order(&l).unwrap().generators;
        let reps: Vec<_> = OrbitLines::new(&l, 3, &gens).unwrap().collect();
        assert!(!reps.is_empty() && reps.len() < 20);
        for v in reps {
            assert!(is_isometric(&neighbor_along(&l, &v, 3).unwrap(), &l).unwrap().matrix.is_some());
        }
    }
}
