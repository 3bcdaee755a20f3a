//! Exact integer and rational linear algebra used throughout the crate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type RatMatrix = Vec<Vec<BigRational>>;

pub fn int(x: i64) -> BigInt {
    BigInt::from(x)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_int_matrix(m: &[Vec<i64>]) -> IntMatrix {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn to_rat_matrix(m: &IntMatrix) -> RatMatrix {
    m.iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect()
}

/// Converts to machine integers, failing if any entry does not fit.
pub fn to_i64_matrix(m: &IntMatrix) -> Option<Vec<Vec<i64>>> {
    m.iter()
        .map(|r| r.iter().map(|x| x.to_i64()).collect::<Option<Vec<_>>>())
        .collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|r| r[j].clone()).collect())
        .collect()
}

pub fn mat_mul_int(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = BigInt::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() {
                            s += &row[k] * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn mat_mul_rat(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = BigRational::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() {
                            s += &row[k] * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// `bᵀ·g·b` where the columns of `b` are vectors.
pub fn congruence_int(g: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    mat_mul_int(&transpose(b), &mat_mul_int(g, b))
}

/// Fraction-free (Bareiss) determinant.
pub fn det_int(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Row Hermite normal form; returns the nonzero rows, which form a basis of the row module.
pub fn hnf_rows(rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let mut rows = hnf_rows_full(rows);
    rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    rows
}

/// Row Hermite normal form keeping every row (zero rows last).
pub fn hnf_rows_full(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut piv = 0;
    for c in 0..ncols {
        if piv == rows.len() {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for r in piv..rows.len() {
                if !rows[r][c].is_zero()
                    && best.is_none_or(|b| rows[r][c].abs() < rows[b][c].abs())
                {
                    best = Some(r);
                }
            }
            let Some(b) = best else { break };
            rows.swap(piv, b);
            let mut clean = true;
            for r in piv + 1..rows.len() {
                if rows[r][c].is_zero() {
                    continue;
                }
                let q = rows[r][c].div_floor(&rows[piv][c]);
                let (head, tail) = rows.split_at_mut(r);
                axpy(&mut tail[0], &q, &head[piv]);
                if !tail[0][c].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if rows[piv][c].is_zero() {
            continue;
        }
        if rows[piv][c].is_negative() {
            for x in rows[piv].iter_mut() {
                *x = -&*x;
            }
        }
        for r in 0..piv {
            let q = rows[r][c].div_floor(&rows[piv][c]);
            if !q.is_zero() {
                let (head, tail) = rows.split_at_mut(piv);
                axpy(&mut head[r], &q, &tail[0]);
            }
        }
        piv += 1;
    }
    rows
}

/// `row -= q * other`
fn axpy(row: &mut [BigInt], q: &BigInt, other: &[BigInt]) {
    for (x, y) in row.iter_mut().zip(other) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

/// Returns `(h, t)` with `t` unimodular and `t·a = h` in row Hermite form. Rows of `t`
/// whose `h` row vanishes span the integer left kernel of `a`.
pub fn hnf_with_transform(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let m = a.len();
    let k = a.first().map_or(0, |r| r.len());
    let aug: Vec<Vec<BigInt>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..m).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            r
        })
        .collect();
    let red = hnf_rows_full(aug);
    let h = red.iter().map(|r| r[..k].to_vec()).collect();
    let t = red.iter().map(|r| r[k..].to_vec()).collect();
    (h, t)
}

/// Elementary divisors of an integer matrix (nonzero diagonal of the Smith form).
pub fn smith_diagonal(m: &IntMatrix) -> Vec<BigInt> {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero entry in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        for r in a.iter_mut() {
            r.swap(t, bj);
        }
        loop {
            let mut changed = false;
            for i in t + 1..rows {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    let (head, tail) = a.split_at_mut(i);
                    axpy(&mut tail[0], &q, &head[t]);
                    if !a[i][t].is_zero() {
                        a.swap(t, i);
                        changed = true;
                    }
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    for r in a.iter_mut() {
                        let v = &q * &r[t];
                        r[j] -= v;
                    }
                    if !a[t][j].is_zero() {
                        for r in a.iter_mut() {
                            r.swap(t, j);
                        }
                        changed = true;
                    }
                }
            }
            if changed {
                continue;
            }
            // enforce divisibility of the rest of the block
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !(&a[i][j] % &a[t][t]).is_zero());
            match bad {
                Some((i, _)) => {
                    let (head, tail) = a.split_at_mut(i);
                    for (x, y) in head[t].iter_mut().zip(tail[0].iter()) {
                        *x += y;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

/// Gaussian elimination over ℚ; returns the reduced row echelon form and pivot columns.
pub fn rref(m: &RatMatrix) -> (RatMatrix, Vec<usize>) {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let (src, dst) = if i < r {
                    let (h, t) = a.split_at_mut(r);
                    (&t[0], &mut h[i])
                } else {
                    let (h, t) = a.split_at_mut(i);
                    (&h[r], &mut t[0])
                };
                for (x, y) in dst.iter_mut().zip(src.iter()) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank_rat(m: &RatMatrix) -> usize {
    rref(m).1.len()
}

/// Inverse of a square rational matrix, `None` when singular.
pub fn inverse_rat(m: &RatMatrix) -> Option<RatMatrix> {
    let n = m.len();
    let aug: RatMatrix = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    let (red, piv) = rref(&aug);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(red.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Least common multiple of all denominators.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(x: &BigInt, p: u64) -> u32 {
    assert!(!x.is_zero(), "valuation of zero");
    let p = BigInt::from(p);
    let mut v = 0;
    let mut y = x.clone();
    while (&y % &p).is_zero() {
        y /= &p;
        v += 1;
    }
    v
}

pub fn valuation_rat(x: &BigRational, p: u64) -> i64 {
    valuation(x.numer(), p) as i64 - valuation(x.denom(), p) as i64
}

/// Kronecker symbol `(a | p)` for a prime `p`; for `p = 2` it is the class of `a` mod 8.
pub fn kronecker_prime(a: &BigInt, p: u64) -> i32 {
    let pb = BigInt::from(p);
    let r = a.mod_floor(&pb);
    if r.is_zero() {
        return 0;
    }
    if p == 2 {
        let m = a.mod_floor(&BigInt::from(8)).to_u32().unwrap();
        return if m == 1 || m == 7 { 1 } else { -1 };
    }
    let e = r.modpow(&BigInt::from((p - 1) / 2), &pb);
    if e.is_one() {
        1
    } else {
        -1
    }
}

/// Kronecker symbol `(d | n)` for arbitrary integer `d` and positive `n`.
pub fn kronecker(d: &BigInt, n: u64) -> i32 {
    prime_factors_u64(n)
        .into_iter()
        .map(|(p, e)| kronecker_prime(d, p).pow(e))
        .product()
}

pub fn prime_factors_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Prime divisors of a nonzero integer by trial division.
pub fn prime_divisors(x: &BigInt) -> Vec<u64> {
    let mut n = x.abs();
    let mut out = Vec::new();
    let mut p: u64 = 2;
    while BigInt::from(p) * BigInt::from(p) <= n {
        let pb = BigInt::from(p);
        if (&n % &pb).is_zero() {
            out.push(p);
            while (&n % &pb).is_zero() {
                n /= &pb;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > BigInt::one() {
        out.push(n.to_u64().expect("prime factor exceeds u64"));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && prime_factors_u64(n).len() == 1 && prime_factors_u64(n)[0].1 == 1
}

/// Exact square root of a nonnegative rational when it is a perfect square.
pub fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn bareiss_determinants() {
        assert_eq!(det_int(&m(&[&[2, -1], &[-1, 2]])), int(3));
        assert_eq!(det_int(&m(&[&[0, -1], &[-1, 0]])), int(-1));
        assert_eq!(det_int(&m(&[&[0, 1, 2], &[3, 4, 5], &[6, 7, 8]])), int(0));
        assert_eq!(det_int(&m(&[&[0, 2, 0], &[1, 0, 0], &[0, 0, 5]])), int(-10));
        assert_eq!(det_int(&Vec::new()), int(1));
    }

    #[test]
    fn hnf_of_dependent_rows() {
        let h = hnf_rows(m(&[&[2, 0], &[3, 0], &[0, 4], &[0, 6]]));
        assert_eq!(h, m(&[&[1, 0], &[0, 2]]));
    }

    #[test]
    fn transform_exposes_kernel() {
        let a = m(&[&[1, 2], &[2, 4], &[0, 1]]);
        let (h, t) = hnf_with_transform(&a);
        assert_eq!(mat_mul_int(&t, &a), h);
        assert_eq!(det_int(&t).abs(), int(1));
        assert!(h[2].iter().all(|x| x.is_zero()));
        assert_eq!(mat_mul_int(&vec![t[2].clone()], &a)[0], vec![int(0), int(0)]);
    }

    #[test]
    fn smith_divisors() {
        assert_eq!(smith_diagonal(&m(&[&[2, 4], &[6, 8]])), vec![int(2), int(4)]);
        assert_eq!(smith_diagonal(&m(&[&[2, 1], &[1, 2]])), vec![int(1), int(3)]);
        assert_eq!(smith_diagonal(&m(&[&[4, 0], &[0, 6]])), vec![int(2), int(12)]);
    }

    #[test]
    fn kronecker_values() {
        assert_eq!(kronecker_prime(&int(7), 2), 1);
        assert_eq!(kronecker_prime(&int(3), 2), -1);
        assert_eq!(kronecker_prime(&int(2), 3), -1);
        assert_eq!(kronecker_prime(&int(4), 5), 1);
        assert_eq!(kronecker(&int(-3), 4), 1);
    }

    #[test]
    fn inverse_and_sqrt() {
        let a = to_rat_matrix(&m(&[&[2, -1], &[-1, 2]]));
        let inv = inverse_rat(&a).unwrap();
        assert_eq!(inv[0][0], rat(2, 3));
        assert_eq!(rational_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rational_sqrt(&rat(2, 1)), None);
    }
}
