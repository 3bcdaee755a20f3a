use num_bigint::BigInt;
use proptest::prelude::*;
use vhgenus::gradedchar::{cartan_max_check, colored_partitions, lattice_voa_dims};
use vhgenus::lattice::{named_lattice, root_lattice};
use vhgenus::lie::LieType;
use vhgenus::voa::{affine_floor, maximal_lattice, norm2_longroot_check, AffineComponent, AffineVoaSpec};
use vhgenus::genus::same_genus;

fn pair(g: &[Vec<i64>], a: &[i64], b: &[i64]) -> i64 {
    (0..a.len()).map(|i| (0..b.len()).map(|j| a[i] * g[i][j] * b[j]).sum::<i64>()).sum()
}

/// Theta coefficients by scanning a coordinate box, for lattices given in simple-root bases.
fn theta_box(g: &[Vec<i64>], r: i64, max_norm: i64) -> Vec<u64> {
    let n = g.len();
    let mut counts = vec![0u64; (max_norm / 2 + 1) as usize];
    let mut v = vec![-r; n];
    loop {
        let m = pair(g, &v, &v);
        if m <= max_norm {
            counts[(m / 2) as usize] += 1;
        }
        let mut i = 0;
        while i < n && v[i] == r {
            v[i] = -r;
            i += 1;
        }
        if i == n {
            return counts;
        }
        v[i] += 1;
    }
}

#[test]
fn degree_totals_are_theta_times_partitions() {
    for (name, r) in [("A2", 4), ("D4", 4), ("A1+A2", 4)] {
        let l = named_lattice(name).unwrap();
        let g = l.small_gram().unwrap();
        let n_max = 3;
        let theta = theta_box(&g, r, 2 * n_max as i64);
        let p = colored_partitions(l.rank(), n_max);
        let d = lattice_voa_dims(&l, n_max).unwrap();
        for n in 0..=n_max {
            let want: BigInt = (0..=n).map(|h| &p[n - h] * theta[h]).sum();
            assert_eq!(d.by_degree[n].1, want, "{name} degree {n}");
        }
    }
}

#[test]
fn cartan_max_on_scaled_lattices() {
    for name in ["E8", "sqrt2E8", "sqrt2D12", "A1+A2"] {
        assert!(cartan_max_check(&named_lattice(name).unwrap(), 3).unwrap(), "{name}");
    }
}

#[test]
fn floors_and_maximal_lattices_share_rank() {
    let c = |t, rank, level| AffineComponent { lie_type: t, rank, level };
    let s = AffineVoaSpec::new(vec![c(LieType::A, 1, 1); 4], vec![vec![1, 1, 1, 1]]).unwrap();
    let m = maximal_lattice(&s).unwrap();
    let f = affine_floor(&s).unwrap();
    assert_eq!(m.rank(), f.rank());
    assert_eq!(f.det(), m.det() * BigInt::from(4));
    assert!(norm2_longroot_check(&AffineVoaSpec::new(vec![c(LieType::D, 4, 1)], vec![]).unwrap()).unwrap());
    let e = AffineVoaSpec::new(vec![c(LieType::E, 8, 2), c(LieType::B, 8, 1)], vec![]).unwrap();
    assert!(same_genus(&affine_floor(&e).unwrap(), &named_lattice("sqrt2E8+D8").unwrap()).unwrap());
}

fn simply_laced() -> impl Strategy<Value = (LieType, usize)> {
    prop_oneof![
        (1usize..=7).prop_map(|n| (LieType::A, n)),
        (4usize..=7).prop_map(|n| (LieType::D, n)),
        (6usize..=8).prop_map(|n| (LieType::E, n)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn weight_one_is_the_lie_algebra((t, n) in simply_laced()) {
        let l = root_lattice(t, n).unwrap();
        let d = lattice_voa_dims(&l, 1).unwrap();
        let count = match t {
            LieType::A => n * (n + 1),
            LieType::D => 2 * n * (n - 1),
            _ => [72, 126, 240][n - 6],
        };
        prop_assert_eq!(d.by_degree[1].1.clone(), BigInt::from(count + n));
    }
}
