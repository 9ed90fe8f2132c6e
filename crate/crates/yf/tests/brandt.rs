use std::sync::OnceLock;

use yf::brandt::*;
use yf::exact_core::linalg;
use yf::exact_core::rational::{ri, Rational};
use yf::exact_core::{NfElem, Poly};
use yf::quatlat::algebra::build_algebra;
use yf::quatlat::classes::{class_set, IdealClassSet};
use yf::quatlat::order::build_order;

fn cs(n1: u64, n2: u64) -> IdealClassSet {
    let alg = build_algebra(n1).unwrap();
    class_set(&build_order(&alg, n2).unwrap()).unwrap()
}

fn cs11() -> &'static IdealClassSet {
    static C: OnceLock<IdealClassSet> = OnceLock::new();
    C.get_or_init(|| cs(11, 1))
}

fn eigenvalues_rational(m: &linalg::Matrix<Rational>) -> Vec<Rational> {
    linalg::charpoly(m).rational_roots()
}

#[test]
fn weight_two_level_eleven_matrices() {
    let c = cs11();
    let b2 = brandt_matrix(c, 0, 2).unwrap();
    for row in &b2.matrix {
        assert_eq!(row.iter().sum::<Rational>(), ri(3));
    }
    assert_eq!(eigenvalues_rational(&b2.matrix), vec![ri(-2), ri(3)]);
    let b3 = brandt_matrix(c, 0, 3).unwrap();
    assert_eq!(eigenvalues_rational(&b3.matrix), vec![ri(-1), ri(4)]);
    assert!(brandt_matrix(c, 0, 11).is_err());
    assert!(brandt_matrix(c, 0, 4).is_err());
}

#[test]
fn commuting_and_self_adjoint() {
    let c = cs11();
    for nu in [0, 1, 2] {
        let ms = brandt_matrices(c, nu, &[2, 3, 5]).unwrap();
        let d = block_form(c, nu).unwrap();
        for a in &ms {
            let da = linalg::mat_mul(&d, &a.matrix);
            assert_eq!(da, linalg::mat_mul(&linalg::transpose(&a.matrix), &d), "nu = {} p = {}", nu, a.p);
            for b in &ms {
                assert_eq!(linalg::mat_mul(&a.matrix, &b.matrix), linalg::mat_mul(&b.matrix, &a.matrix));
            }
        }
    }
}

#[test]
fn essential_eigenvalues_are_real_and_bounded() {
    let c = cs11();
    let nu = 2;
    let b2 = brandt_matrix(c, nu, 2).unwrap();
    let ess = essential_part(c, nu).unwrap();
    let r = restrict(&b2.matrix, &ess).unwrap();
    let cp = linalg::charpoly(&r);
    assert_eq!(linalg::real_roots_f64(&cp).len(), 4);
    for x in linalg::real_roots_f64(&cp) {
        assert!(x.abs() <= 2.0 * 2f64.powf(2.5));
    }
}

#[test]
fn essential_dimensions() {
    let c = cs11();
    assert_eq!(essential_part(c, 0).unwrap().len(), 1);
    assert_eq!(essential_part(c, 2).unwrap().len(), 4);
    assert_eq!(essential_part(&cs(2, 1), 0).unwrap().len(), 0);
    // new subspaces at levels 22, 14 and 15 have dimensions 0, 1, 1
    assert_eq!(essential_part(&cs(11, 2), 0).unwrap().len(), 0);
    assert_eq!(essential_part(&cs(2, 7), 0).unwrap().len(), 1);
    assert_eq!(essential_part(&cs(3, 5), 0).unwrap().len(), 1);
}

#[test]
fn weight_six_cubic() {
    let c = cs11();
    let b2 = brandt_matrix(c, 2, 2).unwrap();
    let ess = essential_part(c, 2).unwrap();
    let r = restrict(&b2.matrix, &ess).unwrap();
    let cp = linalg::charpoly(&r);
    let cubic = Poly::from_ints(&[188, -90, 0, 1]);
    assert!(cp.exact_div(&cubic).is_some(), "charpoly {}", cp.display("x"));
}

#[test]
fn eigensystems_level_eleven() {
    let c = cs11();
    let ms = brandt_matrices(c, 0, &[2, 3, 5, 7]).unwrap();
    let es = eigensystems(&ms, &essential_part(c, 0).unwrap(), 11).unwrap();
    assert_eq!(es.len(), 1);
    let g = &es[0];
    assert_eq!(g.eigenvalue(2), Some(&NfElem::rational(ri(-2))));
    assert_eq!(g.eigenvalue(3), Some(&NfElem::rational(ri(-1))));
    assert_eq!(g.eigenvalue(5), Some(&NfElem::rational(ri(1))));
    assert_eq!(g.eigenvalue(7), Some(&NfElem::rational(ri(-2))));
    let w = atkin_lehner(c, 0, 11).unwrap();
    assert_eq!(atkin_lehner_sign(&w, g).unwrap(), -1);

    let ms = brandt_matrices(c, 2, &[2, 3]).unwrap();
    let es = eigensystems(&ms, &essential_part(c, 2).unwrap(), 11).unwrap();
    assert_eq!(es.len(), 2);
    assert_eq!(es[0].degree(), 1);
    assert_eq!(es[1].minpoly, Poly::from_ints(&[188, -90, 0, 1]));
    assert!(es.iter().all(|e| e.multiplicity_one && e.irreducibility_certified));
    for e in &es {
        let v: Vec<NfElem> = e.vector.clone();
        assert!(yf::brandt::AutomorphicVector::from_flat(2, &v).is_unit_invariant(c).unwrap());
    }
}

#[test]
fn single_matrix_system() {
    let m = BrandtMatrix {
        p: 2,
        nu: 0,
        h: 1,
        d: 1,
        matrix: vec![vec![ri(7)]],
    };
    let es = eigensystems(&[m], &[vec![ri(1)]], 1).unwrap_err();
    // 7 exceeds the Ramanujan bound 2√2 for p = 2
    assert!(matches!(es, yf::Error::Invariant(_)));
    let m = BrandtMatrix {
        p: 5,
        nu: 0,
        h: 1,
        d: 1,
        matrix: vec![vec![ri(3)]],
    };
    let es = eigensystems(&[m], &[vec![ri(1)]], 1).unwrap();
    assert_eq!(es[0].eigenvalue(5), Some(&NfElem::rational(ri(3))));
}
