use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use vhgenus::genus::genus_symbol;
use vhgenus::mass::sms_mass;
use vhgenus::IntLattice;

/// GL₂(ℤ)-reduced forms `[[a,b],[b,c]]`, `0 ≤ 2b ≤ a ≤ c`, of determinant `d`, with the order
/// of their automorphism group.
fn reduced_binary(d: i64) -> Vec<(Vec<Vec<i64>>, i64)> {
    let mut out = Vec::new();
    for a in 1..=d {
        for b in 0..=a / 2 {
            if (d + b * b) % a != 0 {
                continue;
            }
            let c = (d + b * b) / a;
            if c < a {
                continue;
            }
            let aut = match (b == 0, 2 * b == a, a == c) {
                (true, _, true) => 8,
                (false, true, true) => 12,
                (true, _, false) | (false, true, false) | (false, false, true) => 4,
                _ => 2,
            };
            out.push((vec![vec![a, b], vec![b, c]], aut));
        }
    }
    out
}

#[test]
fn binary_masses_match_class_sums() {
    for d in 1..=80 {
        let mut genera: BTreeMap<String, BigRational> = BTreeMap::new();
        let mut syms = BTreeMap::new();
        for (g, aut) in reduced_binary(d) {
            let l = IntLattice::from_i64(&g, "f").unwrap();
            let s = genus_symbol(&l).unwrap();
            let key = format!("{s:?}");
            *genera.entry(key.clone()).or_insert_with(BigRational::zero) += BigRational::new(1.into(), BigInt::from(aut));
            syms.insert(key, s);
        }
        for (key, total) in genera {
            let m = sms_mass(&syms[&key]).unwrap().value;
            assert_eq!(m, total, "det {d}, genus {}", syms[&key]);
        }
    }
}

#[test]
fn mass_depends_only_on_the_symbol() {
    let a = IntLattice::from_i64(&[vec![1, 0], vec![0, 14]], "a").unwrap();
    let b = IntLattice::from_i64(&[vec![2, 0], vec![0, 7]], "b").unwrap();
    let sa = genus_symbol(&a).unwrap();
    assert_eq!(sa, genus_symbol(&b).unwrap());
    assert_eq!(sms_mass(&sa).unwrap().value, BigRational::new(1.into(), 2.into()));
}
