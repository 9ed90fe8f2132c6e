use proptest::prelude::*;
use yf::exact_core::*;
use yf::quatlat::order::{lattice_product, to_quat};
use yf::quatlat::short::brute_force_vectors;
use yf::quatlat::*;

fn cs(n1: u64, n2: u64) -> IdealClassSet {
    let alg = build_algebra(n1).unwrap();
    class_set(&build_order(&alg, n2).unwrap()).unwrap()
}

#[test]
fn class_set_level_11() {
    let c = cs(11, 1);
    assert_eq!(c.h(), 2);
    assert_eq!(c.mass(), rq(5, 12));
    let mut e = c.unit_counts.clone();
    e.sort();
    assert_eq!(e, vec![4, 6]);
}

#[test]
fn class_sets_mass_identity() {
    for (n1, n2) in [(2u64, 1u64), (3, 1), (5, 1), (7, 1), (13, 1), (37, 1), (2, 3), (3, 2), (2, 5), (11, 2)] {
        let c = cs(n1, n2);
        assert_eq!(c.mass(), eichler_mass(n1, n2), "level {}·{}", n1, n2);
    }
}

#[test]
fn right_orders_are_rings_and_products_compose() {
    let c = cs(37, 1);
    let alg = c.algebra().clone();
    for r in &c.right_orders {
        assert!(yf::quatlat::order::is_order(&alg, r));
    }
    // Λ_ij·Λ_jk ⊆ Λ_ik
    for i in 0..c.h() {
        for j in 0..c.h() {
            for k in 0..c.h() {
                let (a, _) = c.pair_lattice(i, j);
                let (b, _) = c.pair_lattice(j, k);
                let (ik, _) = c.pair_lattice(i, k);
                assert!(ik.contains_lattice(&lattice_product(&alg, &a, &b)));
            }
        }
    }
}

#[test]
fn unit_counts_match_short_vectors() {
    let c = cs(11, 1);
    for (i, r) in c.right_orders.iter().enumerate() {
        let g = yf::quatlat::order::norm_gram(c.algebra(), r);
        assert_eq!(short_vectors(&g, &ri(1)).unwrap().len() as u64, c.unit_counts[i]);
    }
}

#[test]
fn norm_two_vectors_match_row_sums() {
    // Σ_j #{β ∈ Λ_ij : n(β) = 2 n_ij}/e_j = 3 for each i
    let c = cs(11, 1);
    for i in 0..c.h() {
        let mut s = Rational::from_integer(0.into());
        for j in 0..c.h() {
            let v = c.pair_vectors(i, j, &ri(2)).unwrap();
            s += Rational::new((v.len() as i64).into(), (c.unit_counts[j] as i64).into());
        }
        assert_eq!(s, ri(3));
    }
}

#[test]
fn fincke_pohst_complete_against_box_scan() {
    let c = cs(11, 1);
    let g = yf::quatlat::order::norm_gram(c.algebra(), &c.order.lattice);
    for m in 0..6 {
        let fp = short_vectors(&g, &ri(m)).unwrap();
        let bf = brute_force_vectors(&g, &ri(m), 5);
        assert_eq!(fp, bf, "norm {}", m);
    }
}

proptest! {
    #[test]
    fn norm_multiplicative(x in prop::collection::vec(-9i64..9, 4), y in prop::collection::vec(-9i64..9, 4), d in 1i64..5) {
        let alg = build_algebra(11).unwrap();
        let qx = to_quat(&x.iter().map(|&v| rq(v, d)).collect::<Vec<_>>());
        let qy = to_quat(&y.iter().map(|&v| ri(v)).collect::<Vec<_>>());
        prop_assert_eq!(alg.norm(&alg.mul(&qx, &qy)), alg.norm(&qx) * alg.norm(&qy));
    }
}
