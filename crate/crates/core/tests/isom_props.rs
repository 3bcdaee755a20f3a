use num_bigint::BigInt;
use proptest::prelude::*;
use vhgenus::isom::{aut_order, is_isometric};
use vhgenus::lattice::{direct_sum, named_lattice};
use vhgenus::IntLattice;

fn gram(l: &IntLattice) -> Vec<Vec<i64>> {
    l.small_gram().unwrap()
}

fn pair(g: &[Vec<i64>], a: &[i64], b: &[i64]) -> i64 {
    (0..a.len()).map(|i| (0..b.len()).map(|j| a[i] * g[i][j] * b[j]).sum::<i64>()).sum()
}

/// `Tᵀ·G·T` with the columns of `T` as new basis vectors.
fn transform(g: &[Vec<i64>], t: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = g.len();
    let col = |j: usize| -> Vec<i64> { (0..n).map(|r| t[r][j]).collect() };
    (0..n).map(|i| (0..n).map(|j| pair(g, &col(i), &col(j))).collect()).collect()
}

fn unimodular(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec((0..n, 0..n, -2i64..=2), 0..8).prop_map(move |ops| {
        let mut t: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
        for (i, j, c) in ops {
            if i == j {
                t.iter_mut().for_each(|r| r[i] = -r[i]);
            } else {
                t.iter_mut().for_each(|r| r[i] += c * r[j]);
            }
        }
        t
    })
}

/// Brute-force `|O(L)|` for small rank: tuples of box vectors reproducing the Gram matrix.
fn brute_aut(g: &[Vec<i64>], r: i64) -> u64 {
    let n = g.len();
    let mut box_vectors = vec![vec![]];
    for _ in 0..n {
        box_vectors = box_vectors
            .into_iter()
            .flat_map(|v: Vec<i64>| (-r..=r).map(move |x| [v.clone(), vec![x]].concat()))
            .collect();
    }
    let by_norm = |m: i64| -> Vec<Vec<i64>> { box_vectors.iter().filter(|v| pair(g, v, v) == m).cloned().collect() };
    let cands: Vec<Vec<Vec<i64>>> = (0..n).map(|i| by_norm(g[i][i])).collect();
    fn go(g: &[Vec<i64>], cands: &[Vec<Vec<i64>>], x: &mut Vec<Vec<i64>>) -> u64 {
        let k = x.len();
        if k == cands.len() {
            return 1;
        }
        let mut total = 0;
        for v in &cands[k] {
            if (0..k).all(|j| pair(g, v, &x[j]) == g[k][j]) {
                x.push(v.clone());
                total += go(g, cands, x);
                x.pop();
            }
        }
        total
    }
    go(g, &cands, &mut Vec::new())
}

const SMALL: [&str; 6] = ["A2", "A3", "A1+A2", "sqrt2A2+A1", "A1^3", "D4"];

#[test]
fn orders_match_brute_force() {
    for name in SMALL {
        let l = named_lattice(name).unwrap();
        // reduced bases of these lattices have coordinates of absolute value at most 2 on short vectors
        assert_eq!(aut_order(&l).unwrap().order, BigInt::from(brute_aut(&gram(&l), 2)), "{name}");
    }
}

#[test]
fn generators_preserve_the_form() {
    for name in ["E8", "D4", "A1+A2", "sqrt2E8"] {
        let l = named_lattice(name).unwrap();
        let g = gram(&l);
        for a in aut_order(&l).unwrap().generators {
            assert_eq!(transform(&g, &a), g, "{name}");
        }
    }
}

#[test]
fn doubling_divides() {
    for name in ["A2", "A1+A2", "D4"] {
        let l = named_lattice(name).unwrap();
        let a = aut_order(&l).unwrap().order;
        let aa = aut_order(&direct_sum(&l, &l)).unwrap().order;
        assert_eq!(&aa % (BigInt::from(2) * &a * &a), BigInt::from(0), "{name}");
    }
}

#[test]
fn distinct_lattices_are_told_apart() {
    let pairs = [("E8+E8", "D16+"), ("sqrt2D12", "sqrt2E8+sqrt2D4"), ("A3", "A1^3"), ("A1+A2", "sqrt2A1+A2")];
    for (a, b) in pairs {
        let w = is_isometric(&named_lattice(a).unwrap(), &named_lattice(b).unwrap()).unwrap();
        assert!(w.matrix.is_none(), "{a} {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn basis_changes_are_found_and_verified(
        (idx, t) in (0usize..SMALL.len()).prop_flat_map(|i| (Just(i), unimodular(named_lattice(SMALL[i]).unwrap().rank())))
    ) {
        let l = named_lattice(SMALL[idx]).unwrap();
        let g = gram(&l);
        let h = transform(&g, &t);
        let m = IntLattice::from_i64(&h, "m").unwrap();
        let w = is_isometric(&l, &m).unwrap().matrix.expect("isometric");
        prop_assert_eq!(transform(&g, &w), h.clone());
        let back = is_isometric(&m, &l).unwrap().matrix.expect("symmetric");
        prop_assert_eq!(transform(&h, &back), g);
        prop_assert_eq!(aut_order(&m).unwrap().order, aut_order(&l).unwrap().order);
    }
}
