//! Automorphism groups and isometries of positive-definite lattices.
//!
//! Both searches assign images to a generating sequence `b_1..b_m` of short vectors, level by
//! level, keeping for every later level the list of vectors whose inner products with the
//! images chosen so far match. Candidates are pre-filtered by a fingerprint: the histogram of
//! inner products with all vectors of minimal norm. The automorphism group order comes from a
//! stabilizer chain (orbit of `b_i` under the pointwise stabilizer of `b_1..b_{i-1}`).

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use crate::arith::{self, IntMatrix};
use crate::error::{Error, Result};
use crate::lattice::IntLattice;
use crate::shortvec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutResult {
    pub order: BigInt,
    /// Matrices `g` acting on coordinate columns, with `gᵀ·gram·g = gram`.
    pub generators: Vec<Vec<Vec<i64>>>,
}

/// `matrixᵀ·gram₁·matrix = gram₂` when present.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsometryWitness {
    pub matrix: Option<Vec<Vec<i64>>>,
}

type Fingerprint = Vec<(i64, u32)>;

struct VectorSet {
    n: usize,
    coords: Vec<i64>,
    dual: Vec<i64>,
    norms: Vec<i64>,
    index: HashMap<Vec<i64>, u32>,
    fingerprints: Vec<Fingerprint>,
}

impl VectorSet {
    fn new(g: &[Vec<i64>], bound: i64) -> Self {
        let n = g.len();
        let list = shortvec::short_vectors(g, bound);
        let mut coords = Vec::with_capacity(list.len() * n);
        let mut dual = Vec::with_capacity(list.len() * n);
        let mut norms = Vec::with_capacity(list.len());
        let mut index = HashMap::with_capacity(list.len());
        for (i, (v, nm)) in list.iter().enumerate() {
            coords.extend_from_slice(v);
            for row in g {
                dual.push(row.iter().zip(v).map(|(a, b)| a * b).sum());
            }
            norms.push(*nm);
            index.insert(v.clone(), i as u32);
        }
        let mut s = VectorSet { n, coords, dual, norms, index, fingerprints: Vec::new() };
        let min = s.norms.iter().copied().min().unwrap_or(0);
        let shortest: Vec<u32> = (0..s.len() as u32).filter(|&i| s.norms[i as usize] == min).collect();
        s.fingerprints = (0..s.len() as u32)
            .into_par_iter()
            .map(|v| {
                let mut h: HashMap<i64, u32> = HashMap::new();
                for &w in &shortest {
                    *h.entry(s.ip(v, w)).or_insert(0) += 1;
                }
                let mut fp: Fingerprint = h.into_iter().collect();
                fp.sort();
                fp
            })
            .collect();
        s
    }

    fn len(&self) -> usize {
        self.norms.len()
    }

    fn coords(&self, i: u32) -> &[i64] {
        let i = i as usize;
        &self.coords[i * self.n..(i + 1) * self.n]
    }

    #[inline]
    fn ip(&self, i: u32, j: u32) -> i64 {
        let (i, j, n) = (i as usize, j as usize, self.n);
        self.coords[i * n..(i + 1) * n].iter().zip(&self.dual[j * n..(j + 1) * n]).map(|(a, b)| a * b).sum()
    }

    fn lookup(&self, v: &[i64]) -> Option<u32> {
        self.index.get(v).copied()
    }

    /// Per norm, the sorted multiset of fingerprints: an isometry invariant.
    fn profile(&self) -> Vec<(i64, Vec<Fingerprint>)> {
        let mut by: std::collections::BTreeMap<i64, Vec<Fingerprint>> = Default::default();
        for i in 0..self.len() {
            by.entry(self.norms[i]).or_default().push(self.fingerprints[i].clone());
        }
        by.into_iter()
            .map(|(k, mut v)| {
                v.sort();
                (k, v)
            })
            .collect()
    }
}

const MOD_P: i128 = (1 << 61) - 1;

fn mod_inv(a: i128) -> i128 {
    let (mut r, mut base, mut e) = (1i128, a.rem_euclid(MOD_P), MOD_P - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % MOD_P;
        }
        base = base * base % MOD_P;
        e >>= 1;
    }
    r
}

/// Incremental echelon form mod a large prime; independence mod p implies independence over ℚ.
struct ModEchelon {
    rows: Vec<(usize, Vec<i128>)>,
}

impl ModEchelon {
    fn reduce(&self, v: &[i64]) -> Vec<i128> {
        let mut x: Vec<i128> = v.iter().map(|&c| (c as i128).rem_euclid(MOD_P)).collect();
        for (piv, row) in &self.rows {
            let f = x[*piv];
            if f != 0 {
                for (a, b) in x.iter_mut().zip(row) {
                    *a = (*a - f * b).rem_euclid(MOD_P);
                }
            }
        }
        x
    }

    fn try_add(&mut self, v: &[i64]) -> bool {
        let x = self.reduce(v);
        let Some(piv) = x.iter().position(|&c| c != 0) else { return false };
        let inv = mod_inv(x[piv]);
        let row: Vec<i128> = x.iter().map(|&c| c * inv % MOD_P).collect();
        for (_, r) in self.rows.iter_mut() {
            let f = r[piv];
            if f != 0 {
                for (a, b) in r.iter_mut().zip(&row) {
                    *a = (*a - f * b).rem_euclid(MOD_P);
                }
            }
        }
        self.rows.push((piv, row));
        true
    }

    fn independent(&self, v: &[i64]) -> bool {
        self.reduce(v).iter().any(|&c| c != 0)
    }
}

/// Tests membership in the ℤ-span of the rows of a full-rank matrix.
struct Membership {
    adj: Vec<Vec<i128>>,
    det: i128,
}

impl Membership {
    fn new(rows: &[Vec<i64>]) -> Self {
        let h = arith::hnf_rows(rows.iter().map(|r| r.iter().map(|&c| BigInt::from(c)).collect()).collect());
        let (adj, det) = adjugate(&h);
        Membership { adj, det }
    }

    fn is_everything(&self) -> bool {
        self.det.abs() == 1
    }

    /// `v = y·H` with `y` integral ⇔ `v·adj(H) ≡ 0 (mod det)`.
    fn contains(&self, v: &[i64]) -> bool {
        (0..v.len()).all(|j| {
            let s: i128 = v.iter().enumerate().map(|(i, &c)| c as i128 * self.adj[i][j]).sum();
            s % self.det == 0
        })
    }
}

/// `(adj(M), det M)` for a square integer matrix, as `i128`.
fn adjugate(m: &IntMatrix) -> (Vec<Vec<i128>>, i128) {
    let det = arith::det_int(m);
    let inv = arith::inverse_rat(&arith::to_rat_matrix(m)).expect("nonsingular");
    let d = BigRational::from_integer(det.clone());
    let adj = inv
        .iter()
        .map(|r| r.iter().map(|x| (x * &d).to_integer().to_i128().expect("adjugate entry fits")).collect())
        .collect();
    (adj, det.to_i128().expect("determinant fits"))
}

/// Short vectors together with a sequence drawn from them spanning `L ⊗ ℚ`.
struct Frame {
    set: VectorSet,
    /// Indices into `set`; `basis[off..off + n]` are linearly independent.
    basis: Vec<u32>,
    off: usize,
    /// `adj(B)` and `det(B)` for the matrix `B` whose columns are `basis[off..off + n]`.
    adj: Vec<Vec<i128>>,
    det: i128,
    /// For level `k < n`, `det·w_k` where `w_k` spans `L ∩ ⟨b_0..b_k⟩` modulo `L ∩ ⟨b_0..b_{k−1}⟩`
    /// in basis coordinates; `None` when `w_k = b_k`.
    glue: Vec<Option<Vec<i128>>>,
}

/// An order of the frame's independent vectors in which the elements of `L / ⟨b⟩` with small
/// support are completed early, so that integrality prunes high in the search tree.
fn glue_order(adj: &[Vec<i128>], det: i128) -> Option<Vec<usize>> {
    const MAX_INDEX: i128 = 1 << 12;
    let n = adj.len();
    let d = det.abs();
    if d == 1 || d > MAX_INDEX {
        return None;
    }
    let reduce = |v: Vec<i128>| -> Vec<i128> { v.into_iter().map(|x| x.rem_euclid(d)).collect() };
    let gens: Vec<Vec<i128>> = (0..n).map(|c| reduce((0..n).map(|j| adj[j][c]).collect())).collect();
    let closure = |start: &HashSet<Vec<i128>>, extra: &[Vec<i128>]| -> HashSet<Vec<i128>> {
        let mut seen = start.clone();
        let mut queue: Vec<Vec<i128>> = seen.iter().cloned().collect();
        while let Some(v) = queue.pop() {
            for g in extra {
                let w = reduce(v.iter().zip(g).map(|(a, b)| a + b).collect());
                if seen.insert(w.clone()) {
                    queue.push(w);
                }
            }
        }
        seen
    };
    let zero: HashSet<Vec<i128>> = HashSet::from([vec![0; n]]);
    let group = closure(&zero, &gens);
    let mut sub = zero;
    let mut chosen: Vec<usize> = Vec::new();
    while sub.len() < group.len() {
        let fresh = |e: &Vec<i128>| (0..n).filter(|&j| e[j] != 0 && !chosen.contains(&j)).count();
        let e = group
            .iter()
            .filter(|e| !sub.contains(*e))
            .min_by_key(|e| (fresh(e), e.iter().filter(|&&x| x != 0).count(), (*e).clone()))?
            .clone();
        let new: Vec<usize> = (0..n).filter(|&j| e[j] != 0 && !chosen.contains(&j)).collect();
        chosen.extend(new);
        sub = closure(&sub, &[e]);
    }
    let rest: Vec<usize> = (0..n).filter(|j| !chosen.contains(j)).collect();
    chosen.extend(rest);
    Some(chosen)
}

/// Lower-triangular basis of `B⁻¹ℤⁿ` (the lattice in frame coordinates), scaled by `det B`.
fn glue_vectors(adj: &[Vec<i128>], det: i128) -> Vec<Option<Vec<i128>>> {
    let n = adj.len();
    // columns of adj(B), coordinates reversed so that row echelon form is lower triangular
    let rows: IntMatrix = (0..n).map(|c| (0..n).rev().map(|j| BigInt::from(adj[j][c])).collect()).collect();
    let h = arith::hnf_rows(rows);
    (0..n)
        .map(|k| {
            let w: Vec<i128> = h[n - 1 - k].iter().rev().take(k + 1).map(|x| x.to_i128().expect("fits")).collect();
            let trivial = w[..k].iter().all(|x| x % det == 0) && (w[k] - det) % det == 0;
            (!trivial).then_some(w)
        })
        .collect()
}

fn choose_frame(g: &[Vec<i64>]) -> Result<Frame> {
    let n = g.len();
    let (red, _) = shortvec::lll_reduce(g);
    let top = (0..n).map(|i| red[i][i]).max().unwrap_or(0);
    let even = (0..n).all(|i| g[i][i] % 2 == 0);
    let mut bound = shortvec::minimum(g);
    loop {
        let set = VectorSet::new(g, bound);
        if let Some(mut basis) = spanning_sequence(&set) {
            let columns = |basis: &[u32]| -> IntMatrix {
                (0..n).map(|i| (0..n).map(|j| BigInt::from(set.coords(basis[j])[i])).collect()).collect()
            };
            let (mut adj, mut det) = adjugate(&columns(&basis));
            if let Some(order) = glue_order(&adj, det) {
                let head: Vec<u32> = order.iter().map(|&j| basis[j]).collect();
                basis[..n].copy_from_slice(&head);
                (adj, det) = adjugate(&columns(&basis));
            }
            if det.abs() != 1 && basis.len() == n {
                if let Some(f) = generating_frame(g, bound + if even { 2 } else { 1 }, &set, &basis[..n], &adj, det) {
                    return Ok(f);
                }
            }
            let glue = glue_vectors(&adj, det);
            return Ok(Frame { set, basis, off: 0, adj, det, glue });
        }
        if bound >= top {
            return Err(Error::Domain("short vectors do not span".into()));
        }
        bound += if even { 2 } else { 1 };
    }
}

/// Vectors from the next shell generating `L` modulo `⟨b⟩`, placed ahead of the independent
/// vectors so that every later image is tied to their images from the start.
fn generating_frame(g: &[Vec<i64>], bound: i64, small: &VectorSet, indep: &[u32], adj: &[Vec<i128>], det: i128) -> Option<Frame> {
    const MAX_SET: u64 = 1 << 16;
    if shortvec::norm_counts(g, bound).iter().sum::<u64>() > MAX_SET {
        return None;
    }
    let set = VectorSet::new(g, bound);
    let mut rows: Vec<Vec<i64>> = indep.iter().map(|&b| small.coords(b).to_vec()).collect();
    let mut class_size: HashMap<(i64, &Fingerprint), usize> = HashMap::new();
    for i in 0..set.len() {
        *class_size.entry((set.norms[i], &set.fingerprints[i])).or_insert(0) += 1;
    }
    let mut order: Vec<u32> = (0..set.len() as u32).collect();
    order.sort_by_key(|&i| (set.norms[i as usize], class_size[&(set.norms[i as usize], &set.fingerprints[i as usize])], i));
    let mut extras = Vec::new();
    loop {
        let mem = Membership::new(&rows);
        if mem.is_everything() {
            break;
        }
        let v = order.iter().copied().find(|&v| !mem.contains(set.coords(v)))?;
        rows.push(set.coords(v).to_vec());
        extras.push(v);
    }
    let off = extras.len();
    let mut basis = extras;
    for &b in indep {
        basis.push(set.lookup(small.coords(b))?);
    }
    let n = g.len();
    Some(Frame { set, basis, off, adj: adj.to_vec(), det, glue: vec![None; off + n] })
}

/// Independent vectors first, then vectors of the set lying outside their span, while any.
fn spanning_sequence(set: &VectorSet) -> Option<Vec<u32>> {
    let n = set.n;
    let mut class_size: HashMap<(i64, &Fingerprint), usize> = HashMap::new();
    for i in 0..set.len() {
        *class_size.entry((set.norms[i], &set.fingerprints[i])).or_insert(0) += 1;
    }
    let size_of = |v: u32| class_size[&(set.norms[v as usize], &set.fingerprints[v as usize])];
    let mut order: Vec<u32> = (0..set.len() as u32).collect();
    order.sort_by_key(|&i| (set.norms[i as usize], size_of(i), i));
    let mut ech = ModEchelon { rows: Vec::new() };
    let mut basis: Vec<u32> = Vec::new();
    let mut lo = 0;
    while basis.len() < n {
        // lowest norm that still has a vector outside the span
        while lo < order.len() && !ech.independent(set.coords(order[lo])) {
            lo += 1;
        }
        if lo == order.len() {
            return None;
        }
        let norm = set.norms[order[lo] as usize];
        // prefer vectors that pair nontrivially with what is already chosen
        let pick = order[lo..]
            .iter()
            .copied()
            .take_while(|&v| set.norms[v as usize] == norm)
            .filter(|&v| ech.independent(set.coords(v)))
            .min_by_key(|&v| {
                let linked = basis.iter().any(|&b| set.ip(v, b) != 0);
                (size_of(v), !linked, v)
            })?;
        ech.try_add(set.coords(pick));
        basis.push(pick);
    }
    loop {
        let rows: Vec<Vec<i64>> = basis.iter().map(|&b| set.coords(b).to_vec()).collect();
        let mem = Membership::new(&rows);
        if mem.is_everything() {
            return Some(basis);
        }
        match order.iter().copied().find(|&v| !mem.contains(set.coords(v))) {
            Some(extra) => basis.push(extra),
            // the set spans but does not generate; completions are checked for integrality
            None => return Some(basis),
        }
    }
}

struct Search<'a> {
    frame: &'a Frame,
    target: &'a VectorSet,
    gram_b: Vec<Vec<i64>>,
    initial: Vec<Vec<u32>>,
}

impl<'a> Search<'a> {
    fn new(source: &'a Frame, target: &'a VectorSet) -> Self {
        let b = &source.basis;
        let gram_b: Vec<Vec<i64>> = b.iter().map(|&x| b.iter().map(|&y| source.set.ip(x, y)).collect()).collect();
        let initial = b
            .iter()
            .map(|&x| {
                let (nm, fp) = (source.set.norms[x as usize], &source.set.fingerprints[x as usize]);
                (0..target.len() as u32)
                    .filter(|&v| target.norms[v as usize] == nm && &target.fingerprints[v as usize] == fp)
                    .collect()
            })
            .collect();
        Search { frame: source, target, gram_b, initial }
    }

    fn m(&self) -> usize {
        self.gram_b.len()
    }

    /// Candidate lists for levels `prefix.len()..m` given the images in `prefix`.
    fn candidates(&self, prefix: &[u32]) -> Option<Vec<Vec<u32>>> {
        let k = prefix.len();
        let mut out = Vec::with_capacity(self.m() - k);
        for l in k..self.m() {
            let c: Vec<u32> = self.initial[l]
                .iter()
                .copied()
                .filter(|&w| prefix.iter().enumerate().all(|(j, &x)| self.target.ip(w, x) == self.gram_b[l][j]))
                .collect();
            if c.is_empty() {
                return None;
            }
            out.push(c);
        }
        Some(out)
    }

    /// Whether the glue vector completed at level `k` has an integral image.
    fn glue_ok(&self, x: &[u32], k: usize) -> bool {
        let f = self.frame;
        let Some(Some(w)) = f.glue.get(k) else { return true };
        (0..f.set.n).all(|i| {
            let s: i128 = w.iter().zip(x).map(|(c, &v)| c * self.target.coords(v)[i] as i128).sum();
            s % f.det == 0
        })
    }

    fn extend(&self, prefix: &[u32]) -> Option<Vec<u32>> {
        if !(0..prefix.len()).all(|k| self.glue_ok(prefix, k)) {
            return None;
        }
        let cands = self.candidates(prefix)?;
        let mut x = prefix.to_vec();
        if self.dfs(&cands, &mut x) {
            Some(x)
        } else {
            None
        }
    }

    /// Whether `b_j ↦ x_j` is integral on `L`: `X·adj(B) ≡ 0 (mod det B)`.
    fn integral(&self, x: &[u32]) -> bool {
        let f = self.frame;
        let n = f.set.n;
        if f.det.abs() == 1 {
            return true;
        }
        (0..n).all(|i| {
            (0..n).all(|k| {
                let s: i128 = (0..n).map(|j| self.target.coords(x[f.off + j])[i] as i128 * f.adj[j][k]).sum();
                s % f.det == 0
            })
        })
    }

    fn dfs(&self, cands: &[Vec<u32>], x: &mut Vec<u32>) -> bool {
        let level = x.len();
        if cands.is_empty() {
            return self.integral(x);
        }
        'next: for &v in &cands[0] {
            let mut rest = Vec::with_capacity(cands.len() - 1);
            for (t, c) in cands[1..].iter().enumerate() {
                let want = self.gram_b[level + 1 + t][level];
                let f: Vec<u32> = c.iter().copied().filter(|&w| self.target.ip(w, v) == want).collect();
                if f.is_empty() {
                    continue 'next;
                }
                rest.push(f);
            }
            x.push(v);
            if !self.glue_ok(x, level) {
                x.pop();
                continue;
            }
            if self.dfs(&rest, x) {
                return true;
            }
            x.pop();
        }
        false
    }
}

/// The integer matrix sending each source basis vector `b_j` to `target[x_j]`.
fn images_to_matrix(source: &Frame, target: &VectorSet, x: &[u32]) -> Vec<Vec<i64>> {
    let n = source.set.n;
    (0..n)
        .map(|i| {
            (0..n)
                .map(|k| {
                    let s: i128 = (0..n).map(|j| target.coords(x[source.off + j])[i] as i128 * source.adj[j][k]).sum();
                    debug_assert_eq!(s % source.det, 0);
                    (s / source.det) as i64
                })
                .collect()
        })
        .collect()
}

fn apply(a: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    a.iter().map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

fn permutation(a: &[Vec<i64>], set: &VectorSet) -> Vec<u32> {
    (0..set.len() as u32)
        .map(|i| set.lookup(&apply(a, set.coords(i))).expect("automorphisms permute the short vectors"))
        .collect()
}

fn orbit(start: u32, gens: &[Vec<u32>], size: usize) -> (Vec<u32>, Vec<bool>) {
    let mut seen = vec![false; size];
    seen[start as usize] = true;
    let mut orb = vec![start];
    let mut i = 0;
    while i < orb.len() {
        let v = orb[i];
        for g in gens {
            let w = g[v as usize];
            if !seen[w as usize] {
                seen[w as usize] = true;
                orb.push(w);
            }
        }
        i += 1;
    }
    (orb, seen)
}

fn check_gram(g: &[Vec<i64>], a: &[Vec<i64>], h: &[Vec<i64>]) -> bool {
    let gi = arith::to_int_matrix(g);
    let ai = arith::to_int_matrix(a);
    arith::congruence_int(&gi, &ai) == arith::to_int_matrix(h)
}

/// Order and generators of `O(L)`.
pub fn aut_order(l: &IntLattice) -> Result<AutResult> {
    l.require_positive_definite()?;
    if l.rank() == 0 {
        return Err(Error::Domain("automorphisms of the zero lattice".into()));
    }
    let g = l.small_gram()?;
    let frame = choose_frame(&g)?;
    let search = Search::new(&frame, &frame.set);
    let m = search.m();
    let size = frame.set.len();
    // generators, each tagged with the deepest level whose prefix it fixes
    let mut gens: Vec<(usize, Vec<Vec<i64>>, Vec<u32>)> = Vec::new();
    let mut order = BigInt::one();
    for level in (0..m).rev() {
        let prefix = &frame.basis[..level];
        let level_cands = search.candidates(prefix).expect("identity survives");
        let here: Vec<Vec<u32>> = gens.iter().filter(|(lv, _, _)| *lv >= level).map(|(_, _, p)| p.clone()).collect();
        let mut active = here;
        let (mut orb, mut in_orbit) = orbit(frame.basis[level], &active, size);
        let mut failed = vec![false; size];
        for &v in &level_cands[0] {
            if in_orbit[v as usize] || failed[v as usize] {
                continue;
            }
            let mut pre = prefix.to_vec();
            pre.push(v);
            match search.extend(&pre) {
                Some(x) => {
                    let a = images_to_matrix(&frame, &frame.set, &x);
                    debug_assert!(check_gram(&g, &a, &g));
                    let p = permutation(&a, &frame.set);
                    active.push(p.clone());
                    gens.push((level, a, p));
                    let o = orbit(frame.basis[level], &active, size);
                    orb = o.0;
                    in_orbit = o.1;
                }
                None => {
                    for w in orbit(v, &active, size).0 {
                        failed[w as usize] = true;
                    }
                }
            }
        }
        order *= orb.len();
    }
    Ok(AutResult { order, generators: gens.into_iter().map(|(_, a, _)| a).collect() })
}

/// Finds `T` with `Tᵀ·G₁·T = G₂`, or reports that none exists.
pub fn is_isometric(l1: &IntLattice, l2: &IntLattice) -> Result<IsometryWitness> {
    l1.require_positive_definite()?;
    l2.require_positive_definite()?;
    let none = IsometryWitness { matrix: None };
    if l1.rank() != l2.rank() || l1.det() != l2.det() {
        return Ok(none);
    }
    let n = l1.rank();
    if l1.gram() == l2.gram() {
        return Ok(IsometryWitness { matrix: Some((0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()) });
    }
    let (g1, g2) = (l1.small_gram()?, l2.small_gram()?);
    if shortvec::minimum(&g1) != shortvec::minimum(&g2) {
        return Ok(none);
    }
    let source = choose_frame(&g2)?;
    let bound = source.set.norms.iter().copied().max().unwrap_or(0);
    let target = VectorSet::new(&g1, bound);
    if target.len() != source.set.len() || target.profile() != source.set.profile() {
        return Ok(none);
    }
    let search = Search::new(&source, &target);
    match search.extend(&[]) {
        Some(x) => {
            let t = images_to_matrix(&source, &target, &x);
            if !check_gram(&g1, &t, &g2) {
                return Err(Error::Domain("isometry witness failed verification".into()));
            }
            Ok(IsometryWitness { matrix: Some(t) })
        }
        None => Ok(none),
    }
}
