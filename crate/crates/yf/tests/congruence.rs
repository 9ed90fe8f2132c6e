use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use yf::brandt::{brandt_matrices, eigensystems, essential_part, EigenSystem};
use yf::congruence::*;
use yf::exact_core::rational::{factorize, rbig, ri, rq, Rational};
use yf::exact_core::{nf_norm, Field, NfElem, NumberField, Poly, Ring};
use yf::quatlat::algebra::build_algebra;
use yf::quatlat::classes::class_set;
use yf::quatlat::order::build_order;

fn systems(nu: u32) -> Vec<EigenSystem> {
    let c = class_set(&build_order(&build_algebra(11).unwrap(), 1).unwrap()).unwrap();
    let ms = brandt_matrices(&c, nu, &[2, 3, 5, 7, 13]).unwrap();
    eigensystems(&ms, &essential_part(&c, nu).unwrap(), 11).unwrap()
}

fn tables() -> &'static (Vec<EigenTable>, EigenTable) {
    static T: OnceLock<(Vec<EigenTable>, EigenTable)> = OnceLock::new();
    T.get_or_init(|| {
        let six = systems(2).iter().map(|s| EigenTable::from_system(s, 11).unwrap()).collect();
        let two = EigenTable::from_system(&systems(0)[0], 11).unwrap();
        (six, two)
    })
}

fn cubic() -> &'static EigenTable {
    tables().0.iter().find(|t| t.field.as_ref().map(|f| f.degree()) == Some(3)).unwrap()
}

fn rational_table(label: &str, level: u64, vals: &[(u64, i64)]) -> EigenTable {
    let entries = vals.iter().map(|&(p, a)| (p, NfElem::rational(ri(a)))).collect();
    EigenTable::new(label, Weight::Elliptic(2), level, None, entries).unwrap()
}

#[test]
fn lifted_eigenvalues() {
    let f = cubic();
    let g = &tables().1;
    let y = lift_eigen_table(f, g, 6, 2).unwrap();
    assert_eq!(y.weight, Weight::Siegel { j: 0, kappa: 4 });
    let beta = f.field.as_ref().unwrap().generator();
    assert_eq!(f.entries[&2], beta);
    assert_eq!(y.entries[&2], beta.rsub(&NfElem::rational(ri(8))));
    assert_eq!(g.entries[&3], NfElem::rational(ri(-1)));
    assert_eq!(y.entries[&3], f.entries[&3].rsub(&NfElem::rational(ri(9))));
    // zero g gives f back
    let zero = EigenTable {
        label: "0".into(),
        entries: g.entries.keys().map(|p| (*p, NfElem::rzero())).collect(),
        ..g.clone()
    };
    assert_eq!(lift_eigen_table(f, &zero, 6, 2).unwrap().entries, f.entries);
    assert!(matches!(lift_eigen_table(f, g, 5, 2), Err(yf::Error::Domain(_))));
    assert!(matches!(lift_eigen_table(g, f, 2, 6), Err(yf::Error::Domain(_))));
    let other = rational_table("h", 13, &[(2, 1)]);
    assert!(matches!(lift_eigen_table(f, &other, 6, 2), Err(yf::Error::Domain(_))));
}

#[test]
fn compositum_of_two_quadratics() {
    let k = NumberField::from_ints(&[-2, 0, 1]).unwrap();
    let l = NumberField::from_ints(&[-3, 0, 1]).unwrap();
    let c = compositum(&Some(k.clone()), &Some(l.clone())).unwrap();
    let m = c.field.clone().unwrap();
    assert_eq!(m.degree(), 4);
    let a = c.map_k(&k.generator());
    let b = c.map_l(&l.generator());
    assert_eq!(a.rmul(&a), NfElem::rational(ri(2)));
    assert_eq!(b.rmul(&b), NfElem::rational(ri(3)));
    // √2·√3 squared is 6 and it is not rational
    let ab = a.rmul(&b);
    assert_eq!(ab.rmul(&ab), NfElem::rational(ri(6)));
    assert!(ab.coords().iter().skip(1).any(|c| !c.ris_zero()));
    // the map is a ring homomorphism on K
    let x = NfElem::from_coords(&k, vec![rq(1, 3), ri(5)]);
    let y = NfElem::from_coords(&k, vec![ri(-2), rq(7, 2)]);
    assert_eq!(c.map_k(&x.rmul(&y)), c.map_k(&x).rmul(&c.map_k(&y)));
    assert_eq!(c.map_k(&x.radd(&y)), c.map_k(&x).radd(&c.map_k(&y)));
}

#[test]
fn compositum_of_isomorphic_fields_collapses() {
    // ℚ(√2) twice, presented by x² − 2 and x² − 8
    let k = NumberField::from_ints(&[-2, 0, 1]).unwrap();
    let l = NumberField::from_ints(&[-8, 0, 1]).unwrap();
    let c = compositum(&Some(k.clone()), &Some(l.clone())).unwrap();
    assert_eq!(c.field.as_ref().unwrap().degree(), 2);
    let a = c.map_k(&k.generator());
    let b = c.map_l(&l.generator());
    assert_eq!(a.rmul(&a), NfElem::rational(ri(2)));
    assert_eq!(b.rmul(&b), NfElem::rational(ri(8)));
    let r = b.rdiv(&a).unwrap();
    assert!(r == NfElem::rational(ri(2)) || r == NfElem::rational(ri(-2)));
}

/// Oracle for a generating a and rational b = u/v: |c_a·v^{d_a}·N(a − b)|.
fn rational_resultant(a: &NfElem, b: &Rational) -> BigInt {
    let m = integral_minpoly(a);
    let ca = m.lead();
    let d = m.degree() as u32;
    let v = rbig(b.denom().clone());
    let norm = nf_norm(&a.rsub(&NfElem::rational(b.clone())));
    let r = &ca * yf::exact_core::rational::rpow(&v, d as i64) * norm;
    assert!(r.is_integer());
    r.to_integer().abs()
}

#[test]
fn resultants_match_norm_oracle() {
    let f = cubic();
    let g = &tables().1;
    for p in [2u64, 3, 5, 7, 13] {
        let (a, b) = (&f.entries[&p], &g.entries[&p]);
        let via_norm = rational_resultant(a, &b.coords().first().cloned().unwrap_or_else(|| ri(0)));
        assert_eq!(eigen_resultant(a, b), via_norm, "p = {}", p);
        assert_eq!(eigen_resultant(b, a), via_norm);
    }
    let k = NumberField::from_ints(&[-5, 0, 1]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..40 {
        let a = NfElem::from_coords(
            &k,
            vec![rq(rng.gen_range(-20..20), rng.gen_range(1..4)), rq(rng.gen_range(1..9), rng.gen_range(1..4))],
        );
        let b = rq(rng.gen_range(-30..30), rng.gen_range(1..6));
        assert_eq!(eigen_resultant(&a, &NfElem::rational(b.clone())), rational_resultant(&a, &b));
    }
}

#[test]
fn identical_tables_are_exact() {
    let f = cubic();
    let r = scan(f, f, &[2, 3, 5]).unwrap();
    assert!(r.exact);
    assert!(r.modulus.is_zero());
    assert!(r.candidates.is_empty());
    let g = &tables().1;
    assert!(scan(g, g, &[2, 3, 5, 7]).unwrap().exact);
}

#[test]
fn probe_sets_must_overlap() {
    let a = rational_table("a", 11, &[(2, 1), (3, 1)]);
    let b = rational_table("b", 11, &[(5, 1), (7, 1)]);
    assert!(matches!(scan(&a, &b, &[2, 3, 5, 7]), Err(yf::Error::Domain(_))));
    let c = rational_table("c", 13, &[(2, 1)]);
    assert!(scan(&a, &c, &[2]).is_err());
    assert!(EigenTable::new("bad", Weight::Elliptic(2), 11, None, [(11u64, NfElem::rational(ri(1)))].into()).is_err());
}

fn random_prime(rng: &mut ChaCha8Rng) -> u64 {
    loop {
        let l = rng.gen_range(7..400);
        if yf::exact_core::rational::is_prime_u64(l) {
            return l;
        }
    }
}

fn random_field(rng: &mut ChaCha8Rng) -> Option<Arc<NumberField>> {
    match rng.gen_range(0..3) {
        0 => None,
        1 => {
            let d = loop {
                let d = rng.gen_range(-40i64..40);
                if d != 0 && d != 1 && yf::exact_core::rational::is_squarefree_u64(d.unsigned_abs()) {
                    break d;
                }
            };
            Some(NumberField::from_ints(&[-d, 0, 1]).unwrap())
        }
        _ => loop {
            let f = [rng.gen_range(-9..10), rng.gen_range(-9..10), 0, 1];
            if let Ok(k) = NumberField::from_ints(&f) {
                if Poly::from_ints(&f).rational_roots().is_empty() {
                    break Some(k);
                }
            }
        },
    }
}

fn random_element(rng: &mut ChaCha8Rng, k: &Option<Arc<NumberField>>) -> NfElem {
    match k {
        None => NfElem::rational(ri(rng.gen_range(-50..50))),
        Some(k) => NfElem::from_coords(k, (0..k.degree()).map(|_| ri(rng.gen_range(-12..13))).collect()),
    }
}

fn planted(seed: u64) -> (EigenTable, EigenTable, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = random_field(&mut rng);
    let ell = random_prime(&mut rng);
    let primes = [2u64, 3, 5, 7, 13, 17];
    let mut ea = BTreeMap::new();
    let mut eb = BTreeMap::new();
    for p in primes {
        let a = random_element(&mut rng, &k);
        let n = loop {
            let n = rng.gen_range(-5i64..6);
            if n != 0 {
                break n;
            }
        };
        eb.insert(p, a.radd(&NfElem::rational(ri(ell as i64 * n))));
        ea.insert(p, a);
    }
    let a = EigenTable::new("A", Weight::Elliptic(4), 11, k.clone(), ea).unwrap();
    let b = EigenTable::new("B", Weight::Elliptic(4), 11, k, eb).unwrap();
    (a, b, ell)
}

#[test]
fn planted_congruences_are_found() {
    for seed in 0..100 {
        let (a, b, ell) = planted(seed);
        let r = scan(&a, &b, &[2, 3, 5, 7, 13, 17]).unwrap();
        assert!(!r.exact, "seed {}", seed);
        assert!(
            r.moduli().contains(&BigInt::from(ell)),
            "seed {}: planted {} not in {:?}",
            seed,
            ell,
            r.moduli()
        );
        // every candidate divides every witness
        for c in &r.candidates {
            assert!(r.resultants.iter().all(|(_, w)| (w % &c.ell).is_zero()));
            assert_eq!(c.likely_noise, c.ell <= BigInt::from(DEFAULT_FLOOR));
        }
        // resultant symmetry
        assert_eq!(scan(&b, &a, &[2, 3, 5, 7, 13, 17]).unwrap().moduli(), r.moduli());
    }
}

#[test]
fn candidates_are_the_primes_of_the_gcd() {
    let (a, b, _) = planted(1000);
    let r = scan(&a, &b, &[2, 3, 5]).unwrap();
    let g = r.resultants.iter().fold(BigInt::zero(), |acc, (_, x)| num_integer::Integer::gcd(&acc, x));
    let want: Vec<BigInt> = factorize(&g).into_iter().map(|(p, _)| p).collect();
    assert_eq!(r.moduli(), want);
    for c in &r.candidates {
        let v = r.resultants.iter().map(|(_, x)| {
            let (mut x, mut v) = (x.clone(), 0);
            while (&x % &c.ell).is_zero() {
                x /= &c.ell;
                v += 1;
            }
            v
        });
        assert_eq!(c.min_exponent, v.min().unwrap());
    }
}

#[test]
fn integer_factorization_agrees_with_trial_division() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let n = BigInt::from(rng.gen_range(2u64..5_000_000));
        assert_eq!(factor_integer(&n), factorize(&n));
    }
    let big = BigInt::from(1_000_003u64) * BigInt::from(1_000_033u64);
    assert_eq!(factor_integer(&big), vec![(BigInt::from(1_000_003u64), 1), (BigInt::from(1_000_033u64), 1)]);
    assert_eq!(factor_integer(&BigInt::one()), vec![]);
    assert_eq!(factor_integer(&BigInt::from(-12)), vec![(BigInt::from(2), 2), (BigInt::from(3), 1)]);
}

#[test]
fn detector_on_small_spaces() {
    let g = &tables().1;
    assert!(congruence_prime_detector(std::slice::from_ref(g), g, &[2, 3, 5]).unwrap().is_empty());
    let six = &tables().0;
    let target = cubic();
    let got = congruence_prime_detector(six, target, &[2, 3, 5]).unwrap();
    // independent evaluation against each rational system through field norms
    let mut want = std::collections::BTreeSet::new();
    for other in six.iter().filter(|t| t.label != target.label) {
        let mut gcd = BigInt::zero();
        for p in [2u64, 3, 5] {
            let b = &other.entries[&p];
            let r = if b.field().is_none() {
                rational_resultant(&target.entries[&p], &b.coords().first().cloned().unwrap_or_else(|| ri(0)))
            } else {
                eigen_resultant(&target.entries[&p], b)
            };
            assert!(!r.is_zero());
            gcd = num_integer::Integer::gcd(&gcd, &r);
        }
        want.extend(factorize(&gcd).into_iter().map(|(p, _)| p));
    }
    assert_eq!(got, want.into_iter().collect::<Vec<_>>());
    assert!(six.len() >= 2, "weight 6 has more than the cubic system");
}

#[test]
fn norm_fixture_field_gate() {
    let k = NumberField::from_ints(&[-1969, 0, 1]).unwrap();
    let alpha = NfElem::from_coords(&k, vec![rq(-467, 35640), Rational::new(BigInt::from(-2119), BigInt::from(140350320u64))]);
    let want = Rational::new(BigInt::from(7u64 * 271 * 461 * 653), BigInt::from(2u64.pow(8) * 3u64.pow(7) * 25 * 1331 * 179));
    assert_eq!(nf_norm(&alpha), want);
    assert!(nf_norm(&alpha).is_positive());
}
