use proptest::prelude::*;
use yf::exact_core::multipoly::MultiPoly;
use yf::exact_core::nf::complex_conj;
use yf::exact_core::rational::{ri, rq, Rational};
use yf::exact_core::{NfElem, Ring};
use yf::harmonics::*;
use yf::quatlat::algebra::{build_algebra, Quat, QuaternionAlgebra};

fn alg11() -> QuaternionAlgebra {
    build_algebra(11).unwrap()
}

fn quat(c: [i64; 4], d: i64) -> Quat {
    [rq(c[0], d), rq(c[1], d), rq(c[2], d), rq(c[3], d)]
}

fn random_harmonic(s: &HarmonicSpace, seed: &[i64]) -> MultiPoly<Rational> {
    let c: Vec<Rational> = (0..s.dim()).map(|i| ri(seed[i % seed.len()] + i as i64 % 3)).collect();
    s.from_coords(&c)
}

#[test]
fn dimension_is_two_nu_plus_one() {
    for alg in [
        alg11(),
        QuaternionAlgebra::with_params(1, 1).unwrap(),
        QuaternionAlgebra::with_params(2, 3).unwrap(),
    ] {
        let g = pure_weights(&alg);
        for nu in 0..=8 {
            let (free, basis) = harmonic_basis(&g, nu);
            assert_eq!(free.len(), 2 * nu as usize + 1);
            for b in &basis {
                assert!(laplacian(b, &g).is_zero());
            }
        }
    }
}

#[test]
fn gegenbauer_low_degrees() {
    let alg = alg11();
    let g = pure_weights(&alg);
    let s0 = HarmonicSpace::new(&alg, 0).unwrap();
    assert_eq!(s0.gram.gram, vec![vec![ri(1)]]);
    // ν = 1: G = 2·Γ(3/2)/Γ(1/2)·B(x,y) = B(x,y)
    let s1 = HarmonicSpace::new(&alg, 1).unwrap();
    let vars = pair_vars();
    let mut bxy = MultiPoly::zero(&vars);
    for v in 0..3 {
        bxy = bxy.add(&MultiPoly::var(&vars, v).mul(&MultiPoly::var(&vars, v + 3)).scale_rat(&(ri(2) * &g[v])));
    }
    assert_eq!(s1.kernel.kernel, bxy);
    for nu in 0..=5 {
        let s = HarmonicSpace::new(&alg, nu).unwrap();
        let k = &s.kernel.kernel;
        // harmonic in both variable blocks, symmetric under x ↔ y
        let w: Vec<Rational> = g.iter().map(|x| x.recip()).collect();
        assert!(k.weighted_laplacian(&[0, 1, 2], &w).is_zero());
        assert!(k.weighted_laplacian(&[3, 4, 5], &w).is_zero());
        let swapped = k.embed(&vars, &[3, 4, 5, 0, 1, 2]);
        assert_eq!(&swapped, k);
    }
}

/// c_α(y): the coefficient of the free monomial α in x of G(x, y), as a polynomial in y.
fn kernel_coords(s: &HarmonicSpace) -> Vec<MultiPoly<Rational>> {
    let vars = pure_vars();
    s.free
        .iter()
        .map(|f| {
            let mut out = MultiPoly::zero(&vars);
            for (e, c) in s.kernel.kernel.terms() {
                if &e[..3] == f.as_slice() {
                    out.add_term(e[3..].to_vec(), c.clone());
                }
            }
            out
        })
        .collect()
}

#[test]
fn reproducing_property_symbolic() {
    let alg = alg11();
    for nu in 0..=4 {
        let s = HarmonicSpace::new(&alg, nu).unwrap();
        let c = kernel_coords(&s);
        let d = s.dim();
        for (gamma, b) in s.basis.iter().enumerate() {
            // ⟨b_γ, G(·, y)⟩ = Σ_α M_{γα} c_α(y)
            let mut lhs = MultiPoly::zero(&pure_vars());
            for a in 0..d {
                lhs = lhs.add(&c[a].scale_rat(&s.gram.gram[gamma][a]));
            }
            assert_eq!(&lhs, b, "nu = {}", nu);
        }
        // ⟨G(·,y), G(·,z)⟩ = G(y,z)
        let vars = pair_vars();
        let cy: Vec<MultiPoly<Rational>> = c.iter().map(|p| p.embed(&vars, &[0, 1, 2])).collect();
        let cz: Vec<MultiPoly<Rational>> = c.iter().map(|p| p.embed(&vars, &[3, 4, 5])).collect();
        let mut lhs = MultiPoly::zero(&vars);
        for a in 0..d {
            for b in 0..d {
                lhs = lhs.add(&cy[a].mul(&cz[b]).scale_rat(&s.gram.gram[a][b]));
            }
        }
        assert_eq!(lhs, s.kernel.kernel);
    }
}

#[test]
fn gram_is_positive_definite() {
    let alg = alg11();
    for nu in 0..=5 {
        let s = HarmonicSpace::new(&alg, nu).unwrap();
        let m = &s.gram.gram;
        for k in 1..=m.len() {
            let minor: Vec<Vec<Rational>> = m[..k].iter().map(|r| r[..k].to_vec()).collect();
            assert!(yf::exact_core::linalg::det(&minor) > ri(0));
        }
    }
}

#[test]
fn tau_trivial_cases() {
    let alg = alg11();
    let g = pure_weights(&alg);
    let s = HarmonicSpace::new(&alg, 3).unwrap();
    let p = HarmonicPoly::new(&g, 3, random_harmonic(&s, &[1, -2, 5])).unwrap();
    let one = quat([1, 0, 0, 0], 1);
    assert_eq!(tau_action(&alg, &one, &p).unwrap(), p);
    let s0 = HarmonicSpace::new(&alg, 0).unwrap();
    let c = HarmonicPoly::new(&g, 0, s0.from_coords(&[ri(7)])).unwrap();
    assert_eq!(tau_action(&alg, &quat([1, 2, -1, 3], 5), &c).unwrap(), c);
    assert!(tau_action(&alg, &quat([0, 0, 0, 0], 1), &c).is_err());
}

#[test]
fn isotropic_vectors_and_b() {
    let alg = alg11();
    let g = pure_weights(&alg);
    let a = find_isotropic(&g, 8).unwrap();
    assert!(pure_norm_nf(&g, &a).ris_zero());
    let b = find_b(&alg, &a).unwrap();
    let aq = [NfElem::rzero(), a[0].clone(), a[1].clone(), a[2].clone()];
    let ab = alg.mul_gen(&aq, &b);
    assert!(ab.iter().all(|c| c.ris_zero()));
    assert_eq!(alg.mul_gen(&aq, &alg.conj_gen(&b)), aq);
    for nu in 0..=6 {
        let ga = eval_Ga(&g, nu, &a).unwrap();
        assert!(laplacian(&ga, &g).is_zero());
    }
    assert!(eval_Ga(&g, 2, &[NfElem::rone(), NfElem::rzero(), NfElem::rzero()]).is_err());
}

#[test]
fn gegenbauer_norm_of_ga_two() {
    let alg = alg11();
    let g = pure_weights(&alg);
    let a = find_isotropic(&g, 8).unwrap();
    let s = HarmonicSpace::new(&alg, 2).unwrap();
    let ga = s.kernel_at(&a);
    let ac = [complex_conj(&a[0]), complex_conj(&a[1]), complex_conj(&a[2])];
    let lhs = s.inner_hermitian(&ga, &ga).unwrap();
    let k: MultiPoly<NfElem> = s.kernel.kernel.map_coeffs(NfElem::from_rat);
    let mut pt = a.to_vec();
    pt.extend(ac);
    assert_eq!(lhs, k.eval(&pt));
    // G_a = binom(2ν, ν)/2^ν · G̃_a for isotropic a
    assert_eq!(ga, eval_Ga(&g, 2, &a).unwrap().scale_rat(&rq(6, 4)));
}

fn small_quat() -> impl Strategy<Value = Quat> {
    (prop::array::uniform4(-6i64..=6), 1i64..=4)
        .prop_filter("nonzero", |(c, _)| c.iter().any(|&x| x != 0))
        .prop_map(|(c, d)| quat(c, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tau_is_a_left_action(y1 in small_quat(), y2 in small_quat(), seed in prop::collection::vec(-5i64..=5, 5)) {
        let alg = alg11();
        let g = pure_weights(&alg);
        let s = harmonic_space(&alg, 2).unwrap();
        let p = HarmonicPoly::new(&g, 2, random_harmonic(&s, &seed)).unwrap();
        let lhs = tau_action(&alg, &y1, &tau_action(&alg, &y2, &p).unwrap()).unwrap();
        let rhs = tau_action(&alg, &alg.mul(&y1, &y2), &p).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn tau_is_orthogonal(y in small_quat(), s1 in prop::collection::vec(-5i64..=5, 7), s2 in prop::collection::vec(-5i64..=5, 7)) {
        let alg = alg11();
        let g = pure_weights(&alg);
        let s = harmonic_space(&alg, 3).unwrap();
        let p = HarmonicPoly::new(&g, 3, random_harmonic(&s, &s1)).unwrap();
        let q = HarmonicPoly::new(&g, 3, random_harmonic(&s, &s2)).unwrap();
        let tp = tau_action(&alg, &y, &p).unwrap();
        let tq = tau_action(&alg, &y, &q).unwrap();
        prop_assert_eq!(s.inner(&tp.poly, &tq.poly).unwrap(), s.inner(&p.poly, &q.poly).unwrap());
    }

    #[test]
    fn ga_harmonic_for_conjugated_isotropic(y in small_quat(), nu in 0u32..=6) {
        let alg = alg11();
        let g = pure_weights(&alg);
        let a = find_isotropic(&g, 8).unwrap();
        // ȳ a y stays isotropic
        let aq = [NfElem::rzero(), a[0].clone(), a[1].clone(), a[2].clone()];
        let yq = [0, 1, 2, 3].map(|t| NfElem::rational(y[t].clone()));
        let c = alg.mul_gen(&alg.mul_gen(&alg.conj_gen(&yq), &aq), &yq);
        prop_assert!(c[0].ris_zero());
        let a2 = [c[1].clone(), c[2].clone(), c[3].clone()];
        let ga = eval_Ga(&g, nu, &a2).unwrap();
        prop_assert!(laplacian(&ga, &g).is_zero());
    }
}
