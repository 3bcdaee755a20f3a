//! Graded dimensions of lattice vertex algebras: `dim Vₙ = Σ_{α∈L} p_r(n − (α,α)/2)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::lattice::IntLattice;
use crate::shortvec;

/// Coefficients of `Π_{i≥1} (1 − qⁱ)^{−r}` up to `q^{n_max}`.
pub fn colored_partitions(r: usize, n_max: usize) -> Vec<BigInt> {
    // n·a(n) = r·Σ_{k=1}^{n} σ(k)·a(n−k)
    let sigma: Vec<u64> = (0..=n_max as u64).map(|k| (1..=k).filter(|d| k % d == 0).sum()).collect();
    let mut a = vec![BigInt::one()];
    for n in 1..=n_max {
        let mut s = BigInt::zero();
        for k in 1..=n {
            s += &a[n - k] * sigma[k];
        }
        s *= r;
        let (q, rem) = s.div_rem(&BigInt::from(n));
        debug_assert!(rem.is_zero());
        a.push(q);
    }
    a
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedDims {
    pub rank: usize,
    /// `(n, dim Vₙ)` for `n = 0..=n_max`.
    pub by_degree: Vec<(usize, BigInt)>,
    /// `dim Vₙ^α` for `n = 0..=n_max`, for every `α` with `(α,α) ≤ 2·n_max`.
    pub per_alpha: BTreeMap<Vec<i64>, Vec<BigInt>>,
}

pub fn lattice_voa_dims(l: &IntLattice, n_max: usize) -> Result<GradedDims> {
    l.require_positive_definite()?;
    let r = l.rank();
    let p = colored_partitions(r, n_max);
    let g = l.small_gram()?;
    let mut vectors = vec![(vec![0i64; r], 0i64)];
    vectors.extend(shortvec::short_vectors(&g, 2 * n_max as i64));
    let mut per_alpha = BTreeMap::new();
    let mut totals = vec![BigInt::zero(); n_max + 1];
    for (v, nm) in vectors {
        let h = (nm / 2) as usize;
        let dims: Vec<BigInt> = (0..=n_max).map(|n| if n >= h { p[n - h].clone() } else { BigInt::zero() }).collect();
        for (t, d) in totals.iter_mut().zip(&dims) {
            *t += d;
        }
        per_alpha.insert(v, dims);
    }
    Ok(GradedDims { rank: r, by_degree: totals.into_iter().enumerate().collect(), per_alpha })
}

/// Every `α` with `(α,α) ≤ 2·n_max` has `dim V^α = 1` at degree `(α,α)/2` and 0 below, and
/// these are exactly the lattice vectors of that norm range.
pub fn cartan_max_check(l: &IntLattice, n_max: usize) -> Result<bool> {
    let d = lattice_voa_dims(l, n_max)?;
    let g = l.small_gram()?;
    let mut boundary = 0u64;
    for (v, dims) in &d.per_alpha {
        let h = (crate::lattice::norm_i64(&g, v) / 2) as usize;
        if dims[..h].iter().any(|x| !x.is_zero()) || !dims[h].is_one() {
            return Ok(false);
        }
        boundary += 1;
    }
    let expected: u64 = shortvec::norm_counts(&g, 2 * n_max as i64).iter().sum();
    Ok(boundary == expected)
}
