use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use vhgenus::arith::{to_int_matrix, to_rat_matrix};
use vhgenus::cocycle::{
    build_cocycle, coefficient_sample, find_coboundary, lattice_cocycle, monoid_units, twisted_multiply,
    verify_cocycle, TwistedElement,
};
use vhgenus::lattice::{named_lattice, RationalSpan};
use vhgenus::IntLattice;

fn gram_pair(g: &[Vec<i64>], a: &[i64], b: &[i64]) -> i64 {
    (0..a.len()).map(|i| (0..b.len()).map(|j| a[i] * g[i][j] * b[j]).sum::<i64>()).sum()
}

fn transform(g: &[Vec<i64>], t: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = g.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let ci: Vec<i64> = (0..n).map(|r| t[r][i]).collect();
                    let cj: Vec<i64> = (0..n).map(|r| t[r][j]).collect();
                    gram_pair(g, &ci, &cj)
                })
                .collect()
        })
        .collect()
}

fn even_gram(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (prop::collection::vec(-3i64..=3, n * n), prop::collection::vec(-2i64..=2, n)).prop_map(move |(off, diag)| {
        let mut g = vec![vec![0; n]; n];
        for i in 0..n {
            g[i][i] = 2 * diag[i];
            for j in 0..i {
                g[i][j] = off[i * n + j];
                g[j][i] = off[i * n + j];
            }
        }
        g
    })
}

/// Unimodular matrices as products of elementary operations.
fn unimodular(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec((0..n, 0..n, -1i64..=1), 0..6).prop_map(move |ops| {
        let mut t: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
        for (i, j, c) in ops {
            if i != j {
                for r in 0..n {
                    t[r][i] += c * t[r][j];
                }
            } else {
                for r in 0..n {
                    t[r][i] = -t[r][i];
                }
            }
        }
        t
    })
}

#[test]
fn corpus_lattices_of_small_rank() {
    for name in ["A1", "A2", "A3", "A1^3", "A1+A2", "II1,1", "sqrt2A2", "A1+II1,1"] {
        let l = named_lattice(name).unwrap();
        let c = lattice_cocycle(&l).unwrap();
        let r = verify_cocycle(&c, 2);
        assert!(r.ok(), "{name}: {r:?}");
        assert_eq!(r.triples_checked, 5u64.pow(3 * l.rank() as u32));
    }
}

#[test]
fn degenerate_span_in_a_hyperbolic_plane() {
    // z and 2z + (1,1)-directions: the span has a one-dimensional radical
    let h = to_rat_matrix(&to_int_matrix(&[vec![2, 0, 0], vec![0, 0, 1], vec![0, 1, 0]]));
    let r = |x: i64| BigRational::from_integer(BigInt::from(x));
    let span = RationalSpan::new(h, vec![vec![r(1), r(0), r(0)], vec![r(0), r(1), r(0)], vec![r(1), r(2), r(0)]]).unwrap();
    let c = build_cocycle(&span).unwrap();
    assert_eq!(c.rank, 2);
    let rep = verify_cocycle(&c, 2);
    assert!(rep.ok(), "{rep:?}");
}

#[test]
fn commutators_match_gram_parity() {
    let l = named_lattice("A3").unwrap();
    let g = vhgenus::arith::to_i64_matrix(l.gram()).unwrap();
    let c = lattice_cocycle(&l).unwrap();
    for a in coefficient_sample(3, 2) {
        for b in coefficient_sample(3, 2) {
            let ea = TwistedElement::basis(a.clone());
            let eb = TwistedElement::basis(b.clone());
            let ab = twisted_multiply(&c, &ea, &eb);
            let ba = twisted_multiply(&c, &eb, &ea);
            let sign = if gram_pair(&g, &a, &b).rem_euclid(2) == 0 { 1 } else { -1 };
            assert_eq!(ab.scalar, ba.scalar * BigRational::from_integer(BigInt::from(sign)));
        }
    }
}

#[test]
fn units_of_a_coset_monoid() {
    // 2A2 together with the coset (α1+α2) + 2A2, closed under negation
    let a2 = to_rat_matrix(&to_int_matrix(&[vec![2, -1], vec![-1, 2]]));
    let r = |x: i64| BigRational::from_integer(BigInt::from(x));
    let gens: Vec<Vec<BigRational>> = [[2, 0], [-2, 0], [0, 2], [0, -2], [1, 1], [-1, -1]]
        .iter()
        .map(|v| v.iter().map(|&x| r(x)).collect())
        .collect();
    let u = monoid_units(&RationalSpan::new(a2, gens).unwrap(), 2).unwrap();
    // the subgroup ⟨2α1, 2α2, α1+α2⟩ has index 2 in A2
    assert_eq!(u.lattice.rank(), 2);
    assert_eq!(u.lattice.det(), BigInt::from(12));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cocycle_identities_hold(g in (1usize..=3).prop_flat_map(even_gram)) {
        let span = RationalSpan::from_lattice_vectors(
            &to_int_matrix(&g),
            &(0..g.len()).map(|i| (0..g.len()).map(|j| BigInt::from((i == j) as i64)).collect()).collect::<Vec<_>>(),
        ).unwrap();
        let c = build_cocycle(&span).unwrap();
        let r = verify_cocycle(&c, 2);
        prop_assert!(r.ok(), "{:?} {:?}", g, r);
    }

    #[test]
    fn isometric_lattices_have_cohomologous_cocycles(
        (g, t) in (1usize..=3).prop_flat_map(|n| (even_gram(n), unimodular(n)))
    ) {
        let g2 = transform(&g, &t);
        let c1 = lattice_cocycle(&IntLattice::from_i64(&g, "a").unwrap()).unwrap();
        let c2 = lattice_cocycle(&IntLattice::from_i64(&g2, "b").unwrap()).unwrap();
        let eps = find_coboundary(&c1, &c2, &t, 2).unwrap();
        prop_assert!(eps.is_some());
    }
}
