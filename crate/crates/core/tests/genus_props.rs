use proptest::prelude::*;
use vhgenus::arith;
use vhgenus::genus::{format_symbol, genus_symbol, parse_symbol, same_genus};
use vhgenus::lattice::{direct_sum, rescale, root_lattice};
use vhgenus::lie::LieType;
use vhgenus::IntLattice;

fn lat(g: &[Vec<i64>]) -> IntLattice {
    IntLattice::from_i64(g, "t").unwrap()
}

fn modp(x: i64, m: i64) -> i64 {
    x.rem_euclid(m)
}

/// Brute-force `ℤ/m`-congruence of binary Gram matrices: some `A` invertible mod `p` with
/// `Aᵀ·G·A ≡ H (mod m)`.
fn congruent_mod(g: &[Vec<i64>], h: &[Vec<i64>], m: i64, p: i64) -> bool {
    let q = |x: i64, y: i64| g[0][0] * x * x + 2 * g[0][1] * x * y + g[1][1] * y * y;
    let b = |x: (i64, i64), y: (i64, i64)| g[0][0] * x.0 * y.0 + g[0][1] * (x.0 * y.1 + x.1 * y.0) + g[1][1] * x.1 * y.1;
    let mut firsts = Vec::new();
    for x0 in 0..m {
        for x1 in 0..m {
            if (x0 % p != 0 || x1 % p != 0) && modp(q(x0, x1) - h[0][0], m) == 0 {
                firsts.push((x0, x1));
            }
        }
    }
    for &x in &firsts {
        for y0 in 0..m {
            for y1 in 0..m {
                if (x.0 * y1 - x.1 * y0) % p == 0 {
                    continue;
                }
                if modp(q(y0, y1) - h[1][1], m) == 0 && modp(b(x, (y0, y1)) - h[0][1], m) == 0 {
                    return true;
                }
            }
        }
    }
    false
}

fn locally_equivalent(g: &[Vec<i64>], h: &[Vec<i64>]) -> bool {
    let d = g[0][0] * g[1][1] - g[0][1] * g[0][1];
    let primes = arith::prime_divisors(&arith::int(2 * d));
    primes.into_iter().all(|p| {
        let p = p as i64;
        let v = arith::valuation(&arith::int(d), p as u64);
        let k = if p == 2 { v + 3 } else { v + 1 };
        congruent_mod(g, h, p.pow(k), p)
    })
}

fn binary() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1i64..8, -7i64..8, 1i64..8)
        .prop_filter("positive definite, det ≤ 40", |(a, b, c)| {
            let d = a * c - b * b;
            d > 0 && d <= 40
        })
        .prop_map(|(a, b, c)| vec![vec![a, b], vec![b, c]])
}

/// Reduced binary forms `[[a,b],[b,c]]` of determinant `d` (`|2b| ≤ a ≤ c`).
fn forms_of_det(d: i64) -> Vec<Vec<Vec<i64>>> {
    let mut out = Vec::new();
    for a in 1..=d {
        for b in -a / 2..=a / 2 {
            if (d + b * b) % a == 0 {
                let c = (d + b * b) / a;
                if a <= c {
                    out.push(vec![vec![a, b], vec![b, c]]);
                }
            }
        }
    }
    out
}

fn unimodular(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec((0..n, 0..n, -2i64..3), 0..12).prop_map(move |ops| {
        let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        for (i, j, c) in ops {
            if i != j {
                for row in u.iter_mut() {
                    row[i] += c * row[j];
                }
            }
        }
        u
    })
}

fn base_lattices() -> Vec<Vec<Vec<i64>>> {
    vec![
        vec![vec![1, 0, 0], vec![0, 2, 0], vec![0, 0, 4]],
        vec![vec![2, 1, 0], vec![1, 2, 0], vec![0, 0, 6]],
        vec![vec![3, 0, 0], vec![0, 6, 0], vec![0, 0, 24]],
        vec![vec![5, 0, 0], vec![0, 10, 2], vec![0, 2, 12]],
        vec![vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 2]],
        vec![vec![1, 0, 0], vec![0, 3, 0], vec![0, 0, 8]],
        vec![vec![4, 2, 0], vec![2, 4, 1], vec![0, 1, 18]],
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symbol_invariant_under_basis_change(idx in 0usize..7, u in unimodular(3)) {
        let g = &base_lattices()[idx];
        let l = lat(g);
        let t = l.transform(&arith::to_int_matrix(&u));
        prop_assert_eq!(genus_symbol(&l).unwrap(), genus_symbol(&t).unwrap());
    }

    #[test]
    fn binary_genus_matches_local_congruence(g in binary(), k in 0usize..64) {
        let d = g[0][0] * g[1][1] - g[0][1] * g[0][1];
        let forms = forms_of_det(d);
        let h = &forms[k % forms.len()];
        prop_assert_eq!(same_genus(&lat(&g), &lat(h)).unwrap(), locally_equivalent(&g, h));
    }

    #[test]
    fn format_parse_round_trip(idx in 0usize..7, scale in 1u64..4) {
        let l = rescale(&lat(&base_lattices()[idx]), scale);
        let s = genus_symbol(&l).unwrap();
        prop_assert_eq!(parse_symbol(&format_symbol(&s)).unwrap(), s);
    }
}

#[test]
fn binary_genera_of_discriminant_minus_56() {
    let a = lat(&[vec![1, 0], vec![0, 14]]);
    let b = lat(&[vec![2, 0], vec![0, 7]]);
    let c = lat(&[vec![3, 1], vec![1, 5]]);
    assert!(same_genus(&a, &b).unwrap());
    assert!(!same_genus(&a, &c).unwrap());
}

#[test]
fn root_lattice_symbols() {
    let a2 = root_lattice(LieType::A, 2).unwrap();
    assert_eq!(format_symbol(&genus_symbol(&a2).unwrap()), "II_{2,0}(3^-1)");
    let d4 = root_lattice(LieType::D, 4).unwrap();
    assert_eq!(format_symbol(&genus_symbol(&d4).unwrap()), "II_{4,0}(2^-2)");
    let a1a1 = direct_sum(&root_lattice(LieType::A, 1).unwrap(), &root_lattice(LieType::A, 1).unwrap());
    let s = genus_symbol(&a1a1).unwrap();
    assert_eq!(parse_symbol(&format_symbol(&s)).unwrap(), s);
}
