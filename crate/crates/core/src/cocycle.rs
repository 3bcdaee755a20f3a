//! Bilinear sign cocycles on even lattices and the twisted group algebra they define.
//!
//! Group elements are integer coordinate vectors in the ℤ-basis of the span
//! ([`RationalSpan::module_basis`]). For a degenerate span the cocycle is pulled back from the
//! nondegenerate quotient by the radical.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{self, IntMatrix, RatMatrix};
use crate::error::{domain, Error, Result};
use crate::lattice::{lattice_from_generators, IntLattice, RationalSpan};

/// Quotient of the span by its radical.
#[derive(Clone, Debug)]
pub struct RadicalQuotient {
    pub lattice: IntLattice,
    /// ℤ-basis of the span in ambient coordinates.
    pub basis: Vec<Vec<BigRational>>,
    /// Integer matrix taking basis coordinates to quotient coordinates.
    pub basis_projection: IntMatrix,
    /// Rational matrix taking ambient coordinates (of span elements) to quotient coordinates.
    pub projection: RatMatrix,
}

#[derive(Clone, Debug)]
pub struct Cocycle {
    pub rank: usize,
    pub bits: Vec<Vec<u8>>,
    pub radical_projection: RatMatrix,
    pub basis: Vec<Vec<BigRational>>,
    /// Gram matrix of the span in basis coordinates.
    pub gram: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedElement {
    pub group_element: Vec<i64>,
    pub scalar: BigRational,
}

impl TwistedElement {
    pub fn basis(a: Vec<i64>) -> Self {
        TwistedElement { group_element: a, scalar: BigRational::one() }
    }
}

fn check_pairings(span: &RationalSpan) -> Result<()> {
    let g = &span.generators;
    for i in 0..g.len() {
        for j in 0..=i {
            let p = span.pair(&g[i], &g[j]);
            if !p.is_integer() {
                return Err(Error::NonIntegral(j, i));
            }
            if i == j && p.to_integer().is_odd() {
                return Err(Error::NotEven(i));
            }
        }
    }
    Ok(())
}

fn ambient_to_basis(basis: &[Vec<BigRational>], ambient_dim: usize) -> RatMatrix {
    // coordinates c with x = Σ c_i basis_i, read off the pivot columns of the basis
    let k = basis.len();
    if k == 0 {
        return Vec::new();
    }
    let (_, piv) = arith::rref(&basis.to_vec());
    let square: RatMatrix = basis.iter().map(|r| piv.iter().map(|&c| r[c].clone()).collect()).collect();
    let inv = arith::inverse_rat(&square).expect("basis rows are independent");
    // c = x[piv] · inv, as a k × m matrix acting on column vectors
    let mut out = vec![vec![BigRational::zero(); ambient_dim]; k];
    for (i, row) in out.iter_mut().enumerate() {
        for (a, &c) in piv.iter().enumerate() {
            row[c] = inv[a][i].clone();
        }
    }
    out
}

pub fn radical_quotient(span: &RationalSpan) -> Result<RadicalQuotient> {
    check_pairings(span)?;
    let basis = span.module_basis();
    let k = basis.len();
    let gram: IntMatrix = basis
        .iter()
        .map(|x| basis.iter().map(|y| span.pair(x, y).to_integer()).collect())
        .collect();
    let to_basis = ambient_to_basis(&basis, span.ambient_gram.len());
    let (h, t) = arith::hnf_with_transform(&gram);
    let q = h.iter().filter(|r| r.iter().any(|x| !x.is_zero())).count();
    let (qgram, pmat): (IntMatrix, IntMatrix) = if q == k {
        let id = (0..k).map(|i| (0..k).map(|j| BigInt::from((i == j) as i64)).collect()).collect();
        (gram.clone(), id)
    } else {
        // rows of t are a new basis whose last k − q vectors span the radical
        let full = arith::congruence_int(&gram, &arith::transpose(&t));
        let qgram = full[..q].iter().map(|r| r[..q].to_vec()).collect();
        let tt = arith::to_rat_matrix(&arith::transpose(&t));
        let inv = arith::inverse_rat(&tt).expect("unimodular transform");
        let p = inv[..q].iter().map(|r| r.iter().map(|x| x.to_integer()).collect()).collect();
        (qgram, p)
    };
    let projection = if k == 0 {
        Vec::new()
    } else {
        arith::mat_mul_rat(&arith::to_rat_matrix(&pmat), &to_basis)
    };
    let lattice = IntLattice::new(qgram, Some("quotient".into()))?;
    Ok(RadicalQuotient { lattice, basis, basis_projection: pmat, projection })
}

pub fn build_cocycle(span: &RationalSpan) -> Result<Cocycle> {
    let rq = radical_quotient(span)?;
    let k = rq.basis.len();
    let q = rq.lattice.rank();
    let qg = rq.lattice.gram();
    let p = &rq.basis_projection;
    let mut bits = vec![vec![0u8; k]; k];
    for (i, row) in bits.iter_mut().enumerate() {
        for (j, b) in row.iter_mut().enumerate() {
            let mut s = BigInt::zero();
            for a in 0..q {
                for c in 0..a {
                    s += &p[a][i] * &qg[a][c] * &p[c][j];
                }
            }
            *b = s.is_odd() as u8;
        }
    }
    let gram = rq
        .basis
        .iter()
        .map(|x| rq.basis.iter().map(|y| span.pair(x, y).to_integer()).collect())
        .collect();
    Ok(Cocycle { rank: k, bits, radical_projection: rq.projection, basis: rq.basis, gram })
}

/// Cocycle of an even lattice given by its Gram matrix, in its own basis.
pub fn lattice_cocycle(l: &IntLattice) -> Result<Cocycle> {
    let n = l.rank();
    let unit: Vec<Vec<BigInt>> = (0..n).map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect()).collect();
    build_cocycle(&RationalSpan::from_lattice_vectors(l.gram(), &unit)?)
}

impl Cocycle {
    /// Exponent of `f(a,b) = (−1)^e`.
    pub fn exponent(&self, a: &[i64], b: &[i64]) -> u8 {
        let mut s = 0i64;
        for (i, &ai) in a.iter().enumerate() {
            if ai & 1 == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                s ^= (self.bits[i][j] as i64) & bj;
            }
        }
        (s & 1) as u8
    }

    pub fn value(&self, a: &[i64], b: &[i64]) -> i64 {
        1 - 2 * self.exponent(a, b) as i64
    }

    /// `(a, b) mod 2` from the span's Gram matrix.
    pub fn pairing_parity(&self, a: &[i64], b: &[i64]) -> u8 {
        let mut s = BigInt::zero();
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                if bj != 0 {
                    s += &self.gram[i][j] * (ai * bj);
                }
            }
        }
        s.is_odd() as u8
    }
}

pub fn twisted_multiply(c: &Cocycle, x: &TwistedElement, y: &TwistedElement) -> TwistedElement {
    let a = &x.group_element;
    let b = &y.group_element;
    let sum = a.iter().zip(b).map(|(p, q)| p + q).collect();
    let scalar = &x.scalar * &y.scalar * BigRational::from_integer(BigInt::from(c.value(a, b)));
    TwistedElement { group_element: sum, scalar }
}

/// Outcome of the sample verification of a cocycle.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CocycleReport {
    pub sample_size: usize,
    pub triples_checked: u64,
    pub normalized: bool,
    pub cocycle_identity: bool,
    pub commutator_identity: bool,
    pub bilinear: bool,
}

impl CocycleReport {
    pub fn ok(&self) -> bool {
        self.normalized && self.cocycle_identity && self.commutator_identity && self.bilinear
    }
}

/// Coefficient vectors with entries in `[−bound, bound]`: all of them for rank ≤ 3, otherwise
/// multiples of single basis vectors.
pub fn coefficient_sample(rank: usize, bound: i64) -> Vec<Vec<i64>> {
    if rank <= 3 {
        let mut out = vec![Vec::new()];
        for _ in 0..rank {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (-bound..=bound).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out
    } else {
        let mut out = vec![vec![0; rank]];
        for i in 0..rank {
            for x in (-bound..=bound).filter(|&x| x != 0) {
                let mut v = vec![0; rank];
                v[i] = x;
                out.push(v);
            }
        }
        out
    }
}

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn verify_cocycle(c: &Cocycle, bound: i64) -> CocycleReport {
    let sample = coefficient_sample(c.rank, bound);
    let zero = vec![0; c.rank];
    let mut r = CocycleReport {
        sample_size: sample.len(),
        normalized: true,
        cocycle_identity: true,
        commutator_identity: true,
        bilinear: true,
        ..Default::default()
    };
    for a in &sample {
        if c.exponent(&zero, a) != 0 || c.exponent(a, &zero) != 0 {
            r.normalized = false;
        }
        for b in &sample {
            let ab = c.exponent(a, b);
            if ab ^ c.exponent(b, a) != c.pairing_parity(a, b) {
                r.commutator_identity = false;
            }
            let apb = add(a, b);
            for x in &sample {
                r.triples_checked += 1;
                let lhs = ab ^ c.exponent(&apb, x);
                let rhs = c.exponent(a, &add(b, x)) ^ c.exponent(b, x);
                if lhs != rhs {
                    r.cocycle_identity = false;
                }
                if c.exponent(&apb, x) != c.exponent(a, x) ^ c.exponent(b, x)
                    || c.exponent(x, &apb) != c.exponent(x, a) ^ c.exponent(x, b)
                {
                    r.bilinear = false;
                }
            }
        }
    }
    r
}

/// A sign rescaling `e_a ↦ (−1)^{q(a)} e_a` with
/// `q(a) = Σ_{i<j} quad[i][j] a_i a_j + Σ quad[i][i] C(a_i, 2) + Σ lin[i] a_i`.
/// The binomial diagonal is what makes `δq(a, b) = a_i b_i` reachable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignRescaling {
    pub quad: Vec<Vec<u8>>,
    pub lin: Vec<u8>,
}

impl SignRescaling {
    pub fn exponent(&self, a: &[i64]) -> u8 {
        let mut s = 0i64;
        for i in 0..a.len() {
            s += self.lin[i] as i64 * a[i];
            s += self.quad[i][i] as i64 * (a[i] * (a[i] - 1) / 2);
            for j in i + 1..a.len() {
                s += self.quad[i][j] as i64 * a[i] * a[j];
            }
        }
        s.rem_euclid(2) as u8
    }
}

/// Searches for a sign rescaling taking the twisted algebra of `c2` to that of `c1` along `t`
/// (the columns of `t` are the images of the basis of `c2` in the basis of `c1`), i.e.
/// `f1(ta, tb) = f2(a, b)·ε(a)ε(b)/ε(a+b)` on the coefficient sample. Rank at most 3.
pub fn find_coboundary(c1: &Cocycle, c2: &Cocycle, t: &[Vec<i64>], bound: i64) -> Result<Option<SignRescaling>> {
    let n = c2.rank;
    if n > 3 {
        return domain("coboundary search is limited to rank 3");
    }
    if c1.rank != n || t.len() != n || t.iter().any(|r| r.len() != n) {
        return domain("isometry does not match the cocycle ranks");
    }
    let sample = coefficient_sample(n, bound);
    let image = |a: &[i64]| -> Vec<i64> { (0..n).map(|i| (0..n).map(|j| t[i][j] * a[j]).sum()).collect() };
    let images: Vec<Vec<i64>> = sample.iter().map(|a| image(a)).collect();
    let pairs: Vec<(usize, usize)> = (0..sample.len()).flat_map(|i| (0..sample.len()).map(move |j| (i, j))).collect();
    let quad_slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let slots = quad_slots.len() + n;
    for mask in 0u32..(1 << slots) {
        let mut quad = vec![vec![0u8; n]; n];
        for (s, &(i, j)) in quad_slots.iter().enumerate() {
            quad[i][j] = (mask >> s & 1) as u8;
        }
        let lin = (0..n).map(|i| (mask >> (quad_slots.len() + i) & 1) as u8).collect();
        let eps = SignRescaling { quad, lin };
        let ok = pairs.iter().all(|&(i, j)| {
            let (a, b) = (&sample[i], &sample[j]);
            let lhs = c1.exponent(&images[i], &images[j]);
            let rhs = c2.exponent(a, b) ^ eps.exponent(a) ^ eps.exponent(b) ^ eps.exponent(&add(a, b));
            lhs == rhs
        });
        if ok {
            return Ok(Some(eps));
        }
    }
    Ok(None)
}

/// `M ∩ (−M)` for the monoid generated by `span.generators`, witnessed with coefficients up
/// to `witness_bound`.
#[derive(Clone, Debug)]
pub struct MonoidUnits {
    pub lattice: IntLattice,
    /// ℤ-basis of the unit group in ambient coordinates.
    pub basis: Vec<Vec<BigRational>>,
    pub witness_bound: u32,
}

pub const MONOID_SEARCH_LIMIT: usize = 2_000_000;

pub fn monoid_units(span: &RationalSpan, witness_bound: u32) -> Result<MonoidUnits> {
    if witness_bound == 0 {
        return domain("witness bound must be positive");
    }
    let den = arith::common_denominator(span.generators.iter().flatten());
    let gens: Vec<Vec<i64>> = span
        .generators
        .iter()
        .map(|g| {
            g.iter()
                .map(|x| (x * &den).to_integer().to_i64().ok_or_else(|| Error::Overflow("generator".into())))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let m = span.ambient_gram.len();
    let mut reach: HashSet<Vec<i64>> = HashSet::from([vec![0; m]]);
    for g in &gens {
        let mut next = HashSet::with_capacity(reach.len() * (witness_bound as usize + 1));
        for v in &reach {
            let mut w = v.clone();
            next.insert(w.clone());
            for _ in 0..witness_bound {
                for (x, y) in w.iter_mut().zip(g) {
                    *x += y;
                }
                next.insert(w.clone());
            }
        }
        if next.len() > MONOID_SEARCH_LIMIT {
            return Err(Error::Unsupported(format!(
                "monoid search exceeds {MONOID_SEARCH_LIMIT} elements at witness bound {witness_bound}"
            )));
        }
        reach = next;
    }
    let mut units: Vec<Vec<BigRational>> = reach
        .iter()
        .filter(|v| v.iter().any(|&x| x != 0) && reach.contains(&v.iter().map(|x| -x).collect::<Vec<_>>()))
        .map(|v| v.iter().map(|&x| BigRational::new(BigInt::from(x), den.clone())).collect())
        .collect();
    units.sort();
    if units.is_empty() {
        return Ok(MonoidUnits { lattice: IntLattice::empty(), basis: Vec::new(), witness_bound });
    }
    let sub = RationalSpan::new(span.ambient_gram.clone(), units)?;
    let sl = lattice_from_generators(&sub)?;
    let basis = sl.basis.clone();
    let lattice = sl.into_lattice()?;
    Ok(MonoidUnits { lattice, basis, witness_bound })
}
