//! Root data of the simple Lie algebras, normalized so long roots have norm 2.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{self, rat, RatMatrix};
use crate::error::{domain, Result};
use crate::lattice::IntLattice;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LieType {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for LieType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            LieType::A => 'A',
            LieType::B => 'B',
            LieType::C => 'C',
            LieType::D => 'D',
            LieType::E => 'E',
            LieType::F => 'F',
            LieType::G => 'G',
        };
        write!(f, "{c}")
    }
}

impl LieType {
    pub fn from_letter(c: char) -> Option<LieType> {
        Some(match c.to_ascii_uppercase() {
            'A' => LieType::A,
            'B' => LieType::B,
            'C' => LieType::C,
            'D' => LieType::D,
            'E' => LieType::E,
            'F' => LieType::F,
            'G' => LieType::G,
            _ => return None,
        })
    }
}

pub fn validate(t: LieType, n: usize) -> Result<()> {
    let ok = match t {
        LieType::A => n >= 1,
        LieType::B | LieType::C => n >= 2,
        LieType::D => n >= 3,
        LieType::E => (6..=8).contains(&n),
        LieType::F => n == 4,
        LieType::G => n == 2,
    };
    if ok {
        Ok(())
    } else {
        domain(format!("{t}{n} is not a simple Lie type"))
    }
}

/// Pairings `(αᵢ, αⱼ)` of the simple roots (Bourbaki numbering, long roots of norm 2).
pub fn simple_root_products(t: LieType, n: usize) -> Result<RatMatrix> {
    validate(t, n)?;
    let mut s = vec![vec![BigRational::zero(); n]; n];
    let bond = |s: &mut RatMatrix, i: usize, j: usize, v: BigRational| {
        s[i][j] = v.clone();
        s[j][i] = v;
    };
    let norms: Vec<BigRational> = (0..n)
        .map(|i| match t {
            LieType::B if i == n - 1 => rat(1, 1),
            LieType::C if i < n - 1 => rat(1, 1),
            LieType::F if i >= 2 => rat(1, 1),
            LieType::G if i == 0 => rat(2, 3),
            _ => rat(2, 1),
        })
        .collect();
    for (i, v) in norms.iter().enumerate() {
        s[i][i] = v.clone();
    }
    match t {
        LieType::A | LieType::B => {
            for i in 0..n - 1 {
                bond(&mut s, i, i + 1, rat(-1, 1));
            }
        }
        LieType::C => {
            for i in 0..n - 2 {
                bond(&mut s, i, i + 1, rat(-1, 2));
            }
            bond(&mut s, n - 2, n - 1, rat(-1, 1));
        }
        LieType::D => {
            for i in 0..n - 2 {
                bond(&mut s, i, i + 1, rat(-1, 1));
            }
            bond(&mut s, n - 3, n - 1, rat(-1, 1));
        }
        LieType::E => {
            bond(&mut s, 0, 2, rat(-1, 1));
            bond(&mut s, 1, 3, rat(-1, 1));
            for i in 2..n - 1 {
                bond(&mut s, i, i + 1, rat(-1, 1));
            }
        }
        LieType::F => {
            bond(&mut s, 0, 1, rat(-1, 1));
            bond(&mut s, 1, 2, rat(-1, 1));
            bond(&mut s, 2, 3, rat(-1, 2));
        }
        LieType::G => bond(&mut s, 0, 1, rat(-1, 1)),
    }
    Ok(s)
}

/// Cartan integers `aᵢⱼ = ⟨αⱼ, αᵢ^∨⟩ = 2(αᵢ,αⱼ)/(αᵢ,αᵢ)`.
pub fn cartan_matrix(t: LieType, n: usize) -> Result<Vec<Vec<i64>>> {
    let s = simple_root_products(t, n)?;
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = rat(2, 1) * &s[i][j] / &s[i][i];
                    num_traits::ToPrimitive::to_i64(&v.to_integer()).expect("Cartan entry")
                })
                .collect()
        })
        .collect())
}

/// All roots in simple-root coordinates, sorted.
pub fn roots(t: LieType, n: usize) -> Result<Vec<Vec<i64>>> {
    let a = cartan_matrix(t, n)?;
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut stack: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    while let Some(b) = stack.pop() {
        if !seen.insert(b.clone()) {
            continue;
        }
        for i in 0..n {
            let c: i64 = (0..n).map(|j| b[j] * a[i][j]).sum();
            if c != 0 {
                let mut r = b.clone();
                r[i] -= c;
                if !seen.contains(&r) {
                    stack.push(r);
                }
            }
        }
    }
    Ok(seen.into_iter().collect())
}

pub fn root_norm(s: &RatMatrix, r: &[i64]) -> BigRational {
    let mut acc = BigRational::zero();
    for i in 0..r.len() {
        for j in 0..r.len() {
            acc += rat(r[i] * r[j], 1) * &s[i][j];
        }
    }
    acc
}

/// Coefficients of the highest root in the simple roots.
pub fn highest_root_marks(t: LieType, n: usize) -> Result<Vec<i64>> {
    let rs = roots(t, n)?;
    Ok(rs
        .into_iter()
        .max_by_key(|r| r.iter().sum::<i64>())
        .expect("nonempty root system"))
}

pub fn long_root_count(t: LieType, n: usize) -> Result<usize> {
    let s = simple_root_products(t, n)?;
    Ok(roots(t, n)?.iter().filter(|r| root_norm(&s, r) == rat(2, 1)).count())
}

/// Closed-form long-root counts.
pub fn long_root_count_formula(t: LieType, n: usize) -> Result<usize> {
    validate(t, n)?;
    Ok(match t {
        LieType::A => n * (n + 1),
        LieType::B | LieType::D => 2 * n * (n - 1),
        LieType::C => 2 * n,
        LieType::E => [72, 126, 240][n - 6],
        LieType::F => 24,
        LieType::G => 6,
    })
}

/// Fundamental-weight indices (1-based) with highest-root mark 1, preceded by 0.
pub fn cominimal_weights(t: LieType, n: usize) -> Result<Vec<usize>> {
    let marks = highest_root_marks(t, n)?;
    let mut out = vec![0];
    out.extend(marks.iter().enumerate().filter(|(_, &m)| m == 1).map(|(i, _)| i + 1));
    Ok(out)
}

/// Gram matrix of the simple coroots `2α/(α,α)`: the lattice `Q_g`.
pub fn coroot_gram(t: LieType, n: usize) -> Result<RatMatrix> {
    let s = simple_root_products(t, n)?;
    Ok((0..n)
        .map(|i| (0..n).map(|j| rat(4, 1) * &s[i][j] / (&s[i][i] * &s[j][j])).collect())
        .collect())
}

/// `Q_g`: the root lattice for A/D/E, `D_n` for `B_n`, `A₁ⁿ` for `C_n`, `D₄` for `F₄`, `A₂` for `G₂`.
pub fn long_root_lattice(t: LieType, n: usize) -> Result<IntLattice> {
    let g = coroot_gram(t, n)?;
    let gram = g.iter().map(|r| r.iter().map(|x| x.to_integer()).collect()).collect();
    IntLattice::new(gram, Some(format!("Q({t}{n})")))
}

/// Simple-coroot vectors in simple-root coordinates (row `i` is `αᵢ^∨`).
pub fn coroot_vectors(t: LieType, n: usize) -> Result<RatMatrix> {
    let s = simple_root_products(t, n)?;
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { rat(2, 1) / &s[i][i] } else { BigRational::zero() })
                .collect()
        })
        .collect())
}

/// Fundamental weight `Λⱼ` (1-based; 0 gives the zero weight) in simple-root coordinates.
pub fn fundamental_weight(t: LieType, n: usize, j: usize) -> Result<Vec<BigRational>> {
    validate(t, n)?;
    if j == 0 {
        return Ok(vec![BigRational::zero(); n]);
    }
    if j > n {
        return domain(format!("{t}{n} has no fundamental weight {j}"));
    }
    let a = cartan_matrix(t, n)?;
    let am: RatMatrix = a.iter().map(|r| r.iter().map(|&x| rat(x, 1)).collect()).collect();
    let inv = arith::inverse_rat(&am).expect("Cartan matrix is invertible");
    // (Λⱼ, αᵢ^∨) = Σₐ xₐ aᵢₐ = δᵢⱼ  ⇒  x = A⁻¹ eⱼ
    Ok((0..n).map(|a| inv[a][j - 1].clone()).collect())
}

pub fn weight_norm(t: LieType, n: usize, w: &[BigRational]) -> Result<BigRational> {
    let s = simple_root_products(t, n)?;
    let mut acc = BigRational::zero();
    for i in 0..n {
        for j in 0..n {
            acc += &w[i] * &s[i][j] * &w[j];
        }
    }
    Ok(acc)
}

pub fn dual_coxeter_number(t: LieType, n: usize) -> Result<usize> {
    // h∨ = 1 + Σ comarks; with the long-norm-2 normalization comarks are marks·(αᵢ,αᵢ)/2
    let marks = highest_root_marks(t, n)?;
    let s = simple_root_products(t, n)?;
    let mut h = BigRational::one();
    for (i, &m) in marks.iter().enumerate() {
        h += rat(m, 1) * &s[i][i] / rat(2, 1);
    }
    Ok(num_traits::ToPrimitive::to_usize(&h.to_integer()).expect("small"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TYPES: &[(LieType, usize)] = &[
        (LieType::A, 1),
        (LieType::A, 4),
        (LieType::B, 2),
        (LieType::B, 5),
        (LieType::C, 3),
        (LieType::D, 4),
        (LieType::D, 7),
        (LieType::E, 6),
        (LieType::E, 7),
        (LieType::E, 8),
        (LieType::F, 4),
        (LieType::G, 2),
    ];

    #[test]
    fn root_counts_match_closed_forms() {
        for &(t, n) in TYPES {
            assert_eq!(long_root_count(t, n).unwrap(), long_root_count_formula(t, n).unwrap(), "{t}{n}");
        }
        assert_eq!(roots(LieType::E, 8).unwrap().len(), 240);
        assert_eq!(roots(LieType::G, 2).unwrap().len(), 12);
        assert_eq!(roots(LieType::F, 4).unwrap().len(), 48);
    }

    #[test]
    fn marks_and_cominimal() {
        assert_eq!(highest_root_marks(LieType::E, 8).unwrap(), vec![2, 3, 4, 6, 5, 4, 3, 2]);
        assert_eq!(cominimal_weights(LieType::E, 8).unwrap(), vec![0]);
        assert_eq!(cominimal_weights(LieType::A, 3).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(cominimal_weights(LieType::D, 6).unwrap(), vec![0, 1, 5, 6]);
        assert_eq!(cominimal_weights(LieType::B, 4).unwrap(), vec![0, 1]);
        assert_eq!(cominimal_weights(LieType::C, 4).unwrap(), vec![0, 4]);
        assert_eq!(cominimal_weights(LieType::E, 6).unwrap(), vec![0, 1, 6]);
        assert_eq!(cominimal_weights(LieType::E, 7).unwrap(), vec![0, 7]);
    }

    #[test]
    fn q_g_determinants() {
        let det = |t, n| long_root_lattice(t, n).unwrap().det();
        assert_eq!(det(LieType::A, 1), arith::int(2));
        assert_eq!(det(LieType::B, 12), arith::int(4));
        assert_eq!(det(LieType::C, 5), arith::int(32));
        assert_eq!(det(LieType::F, 4), arith::int(4));
        assert_eq!(det(LieType::G, 2), arith::int(3));
        assert_eq!(det(LieType::E, 8), arith::int(1));
        assert!(long_root_lattice(LieType::E, 9).is_err());
        assert!(long_root_lattice(LieType::B, 1).is_err());
    }

    #[test]
    fn fundamental_weights_are_dual_to_coroots() {
        for &(t, n) in TYPES {
            let s = simple_root_products(t, n).unwrap();
            let cor = coroot_vectors(t, n).unwrap();
            for j in 1..=n {
                let w = fundamental_weight(t, n, j).unwrap();
                for (i, c) in cor.iter().enumerate() {
                    let mut p = BigRational::zero();
                    for a in 0..n {
                        for b in 0..n {
                            p += &w[a] * &s[a][b] * &c[b];
                        }
                    }
                    assert_eq!(p, rat(i64::from(i + 1 == j), 1));
                }
            }
        }
        // Λ₁ of B_n is e₁, norm 1
        let w = fundamental_weight(LieType::B, 12, 1).unwrap();
        assert_eq!(weight_norm(LieType::B, 12, &w).unwrap(), rat(1, 1));
    }

    #[test]
    fn dual_coxeter_numbers() {
        assert_eq!(dual_coxeter_number(LieType::E, 8).unwrap(), 30);
        assert_eq!(dual_coxeter_number(LieType::B, 12).unwrap(), 23);
        assert_eq!(dual_coxeter_number(LieType::A, 4).unwrap(), 5);
        assert_eq!(dual_coxeter_number(LieType::G, 2).unwrap(), 4);
        assert_eq!(dual_coxeter_number(LieType::C, 3).unwrap(), 4);
    }
}
