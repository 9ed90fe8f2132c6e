//! The twelve acceptance criteria, one test each.
//!
//! Every test writes a single `PASS`/`FAIL` line straight to stderr (bypassing
//! the harness capture) and then asserts its outcome.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use yf::brandt::{brandt_matrices, brandt_matrix, eigensystems, essential_part, restrict, AutomorphicVector, EigenSystem};
use yf::cli_io::{run_pipeline_with_threads, RunConfig};
use yf::congruence::{scan, EigenTable, Weight, DEFAULT_FLOOR};
use yf::exact_core::linalg;
use yf::exact_core::multipoly::{names, MultiPoly};
use yf::exact_core::rational::{ri, rq, Rational};
use yf::exact_core::{nf_norm, NfElem, NumberField, Poly, Ring, SymbolicConstant};
use yf::harmonics::harmonic_space;
use yf::kernels::constants::{c6, c7, c8_inv, c_wald};
use yf::kernels::{audit_denominators, build_P_Geg, denominator_bound, main_term, solved_normalized, GegKernel, L_operator};
use yf::quatlat::algebra::build_algebra;
use yf::quatlat::classes::{class_set, IdealClassSet};
use yf::quatlat::order::build_order;
use yf::waldspurger::factorization_check;
use yf::yoshida::forms::{self, Mat2};
use yf::yoshida::hecke::verify_eigen;
use yf::yoshida::norms::{limit_gegenbauer_constant, norm_comparison_factor, pmap_gegenbauer_constant};
use yf::yoshida::{SiegelCoeffTable, YoshidaLift};

fn report(n: u32, name: &str, pass: bool, detail: &str) {
    let line = format!("{} criterion {:>2} ({}): {}\n", if pass { "PASS" } else { "FAIL" }, n, name, detail);
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "criterion {} failed: {}", n, detail);
}

fn within(t: Instant, limit: u64) -> (bool, String) {
    let e = t.elapsed();
    (e <= Duration::from_secs(limit), format!("{:.2}s of {}s", e.as_secs_f64(), limit))
}

fn cs11() -> &'static IdealClassSet {
    static C: OnceLock<IdealClassSet> = OnceLock::new();
    C.get_or_init(|| class_set(&build_order(&build_algebra(11).unwrap(), 1).unwrap()).unwrap())
}

/// f: the cubic weight-6 system; g: the weight-2 system.
fn inputs() -> &'static (EigenSystem, EigenSystem) {
    static I: OnceLock<(EigenSystem, EigenSystem)> = OnceLock::new();
    I.get_or_init(|| {
        let c = cs11();
        let sys = |nu| eigensystems(&brandt_matrices(c, nu, &[2, 3, 5]).unwrap(), &essential_part(c, nu).unwrap(), 11).unwrap();
        (sys(2).into_iter().find(|e| e.degree() == 3).unwrap(), sys(0).remove(0))
    })
}

fn phis() -> (AutomorphicVector<NfElem>, AutomorphicVector<NfElem>) {
    let (f, g) = inputs();
    (AutomorphicVector::from_flat(2, &f.vector), AutomorphicVector::from_flat(0, &g.vector))
}

fn lift() -> &'static (YoshidaLift, SiegelCoeffTable) {
    static L: OnceLock<(YoshidaLift, SiegelCoeffTable)> = OnceLock::new();
    L.get_or_init(|| {
        let (p1, p2) = phis();
        let l = YoshidaLift::new(cs11(), &p1, &p2, 12).unwrap();
        let t = l.table(12).unwrap();
        (l, t)
    })
}

#[test]
fn criterion_01_class_set() {
    let t = Instant::now();
    let c = class_set(&build_order(&build_algebra(11).unwrap(), 1).unwrap()).unwrap();
    let mut e = c.unit_counts.clone();
    e.sort();
    // mass oracle with full unit groups: (1/24)·∏_{p | N}(p − 1) for the maximal order of discriminant N
    let oracle = rq(11 - 1, 24);
    let (fast, time) = within(t, 5);
    let pass = c.h() == 2 && c.mass() == rq(5, 12) && c.mass() == oracle && e == vec![4, 6] && fast;
    report(
        1,
        "class set N = 11",
        pass,
        &format!("h = {}, mass = {}, unit counts {:?}, {}", c.h(), c.mass(), e, time),
    );
}

fn essential_eigenvalues(nu: u32, p: u64) -> Poly<Rational> {
    let c = cs11();
    let b = brandt_matrix(c, nu, p).unwrap();
    linalg::charpoly(&restrict(&b.matrix, &essential_part(c, nu).unwrap()).unwrap())
}

#[test]
fn criterion_02_brandt_weight_two() {
    let t = Instant::now();
    let r2 = essential_eigenvalues(0, 2).rational_roots();
    let r3 = essential_eigenvalues(0, 3).rational_roots();
    let (fast, time) = within(t, 5);
    let pass = r2.contains(&ri(-2)) && r3.contains(&ri(-1)) && fast;
    let show = |r: &[Rational]| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
    report(
        2,
        "Brandt nu = 0, N = 11",
        pass,
        &format!("B(2) roots [{}], B(3) roots [{}], {}", show(&r2), show(&r3), time),
    );
}

#[test]
fn criterion_03_brandt_weight_six() {
    let t = Instant::now();
    let cp = essential_eigenvalues(2, 2);
    let cubic = Poly::from_ints(&[188, -90, 0, 1]);
    let q = cp.exact_div(&cubic);
    let (fast, time) = within(t, 60);
    let pass = q.is_some() && fast;
    report(
        3,
        "Brandt nu = 2, N = 11",
        pass,
        &format!("charpoly {} divisible by x^3 - 90x + 188: {}, {}", cp.display("x"), q.is_some(), time),
    );
}

const SUITE: [(u32, u32); 5] = [(0, 0), (0, 2), (1, 0), (2, 0), (1, 2)];

fn diag_form() -> Vec<Rational> {
    vec![ri(1), ri(1), ri(3), ri(3)]
}

/// Δ_rs P for every symbolic pair of rows, in either block.
fn pluriharmonic(g: &GegKernel) -> bool {
    let inv: Vec<Rational> = diag_form().iter().map(|x| x.recip()).collect();
    let vv = names(&["a0", "a1", "a2", "a3", "b0", "b1", "b2", "b3", "X0", "X1", "Y0", "Y1"]);
    let v = |i| MultiPoly::<Rational>::var(&vv, i);
    let sym: Vec<Vec<MultiPoly<Rational>>> = (0..2).map(|r| (0..4).map(|c| v(4 * r + c)).collect()).collect();
    let num: Vec<Vec<MultiPoly<Rational>>> = [[2, -1, 0, 1], [1, 1, -3, 2]]
        .iter()
        .map(|r| r.iter().map(|&x| MultiPoly::constant(&vv, ri(x))).collect())
        .collect();
    [false, true].iter().all(|&swap| {
        let rows: Vec<_> = if swap {
            num.iter().chain(&sym).cloned().collect()
        } else {
            sym.iter().chain(&num).cloned().collect()
        };
        let p = g.at_vectors(&diag_form(), &rows, &[v(8), v(9)], &[v(10), v(11)]);
        [(0, 0), (0, 1), (1, 1)].iter().all(|&(r, s)| {
            let a: Vec<usize> = (0..4).map(|c| 4 * r + c).collect();
            let b: Vec<usize> = (0..4).map(|c| 4 * s + c).collect();
            p.mixed_laplacian(&a, &b, &inv).is_zero()
        })
    })
}

/// Invariance under coordinate maps preserving x₀² + x₁² + 3x₂² + 3x₃² applied to every vector.
fn orthogonal_invariant(g: &GegKernel) -> bool {
    let p = g.vector_form(&diag_form());
    let vv = p.vars().clone();
    let maps: [([usize; 4], [i64; 4]); 4] = [
        ([1, 0, 2, 3], [1; 4]),
        ([0, 1, 3, 2], [1; 4]),
        ([0, 1, 2, 3], [1, 1, -1, 1]),
        ([1, 0, 3, 2], [-1, 1, 1, -1]),
    ];
    maps.iter().all(|(perm, sign)| {
        let mut images: Vec<MultiPoly<Rational>> = (0..vv.len()).map(|i| MultiPoly::var(&vv, i)).collect();
        for a in 0..4 {
            for c in 0..4 {
                images[4 * a + c] = MultiPoly::var(&vv, 4 * a + perm[c]).scale_rat(&ri(sign[c]));
            }
        }
        p.compose(&images) == p
    })
}

#[test]
fn criterion_04_kernel_suite() {
    let t = Instant::now();
    let alpha = ri(2);
    let mut bad = Vec::new();
    for (mu, nu) in SUITE {
        let g = build_P_Geg(2, 2, mu, nu, &alpha).unwrap();
        if g.pure_t2_part() != main_term(&alpha, mu, nu, 2).unwrap() {
            bad.push(format!("main term at ({}, {})", mu, nu));
        }
        if !pluriharmonic(&g) {
            bad.push(format!("pluriharmonicity at ({}, {})", mu, nu));
        }
        if !orthogonal_invariant(&g) {
            bad.push(format!("orthogonal invariance at ({}, {})", mu, nu));
        }
        if mu == 0 && solved_normalized(&alpha, 2, 0, nu).unwrap() != L_operator(&alpha, nu, 2).unwrap() {
            bad.push(format!("solver vs closed form at ({}, {})", mu, nu));
        }
    }
    let (fast, time) = within(t, 120);
    let pass = bad.is_empty() && fast;
    report(
        4,
        "kernel suite",
        pass,
        &format!("{} types checked, mismatches {:?}, {}", SUITE.len(), bad, time),
    );
}

fn factorial(n: u32) -> i64 {
    (1..=n as i64).product()
}

#[test]
fn criterion_05_p_map_suite() {
    let alg = build_algebra(11).unwrap();
    let mut notes = Vec::new();
    let mut pass = true;
    for (nu1, nu2) in [(2u32, 0u32), (4, 2)] {
        // shape is checked inside: Err unless the two sides are proportional
        let c = pmap_gegenbauer_constant(&alg, nu1, nu2).unwrap();
        let stated = NfElem::rational(rq(factorial(nu1), factorial(nu2)));
        pass &= c == stated;
        notes.push(format!("P-map constant at ({}, {}) is {} vs stated {}", nu1, nu2, c, stated));
        let l = limit_gegenbauer_constant(&alg, nu1, nu2).unwrap();
        let c6v = NfElem::rational(c6(nu1, nu2).unwrap());
        pass &= l == c6v;
        notes.push(format!("limit constant at ({}, {}) is {} vs c6 = {}", nu1, nu2, l, c6v));
    }
    let want = c7(2, 0).unwrap();
    let s2 = harmonic_space(&alg, 2).unwrap();
    let s0 = harmonic_space(&alg, 0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xc7);
    let mut factors = std::collections::BTreeSet::new();
    for _ in 0..20 {
        let c1: Vec<Rational> = loop {
            let c: Vec<Rational> = (0..s2.dim()).map(|_| rq(rng.gen_range(-9..10), rng.gen_range(1..6))).collect();
            if c.iter().any(|x| !x.is_zero()) {
                break c;
            }
        };
        let c2 = rq(rng.gen_range(1..20) * if rng.gen() { 1 } else { -1 }, rng.gen_range(1..6));
        let r1 = s2.harmonic(&c1);
        let r2 = s0.harmonic(&[c2]);
        factors.insert(norm_comparison_factor(&alg, &r1.poly, &r2.poly, 2, 0).unwrap());
    }
    pass &= factors.len() == 1 && factors.contains(&want);
    notes.push(format!(
        "norm comparison factors {:?} vs c7 = {}",
        factors.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        want
    ));
    report(5, "P-map suite", pass, &notes.join("; "));
}

#[test]
fn criterion_06_yoshida_lift() {
    let t = Instant::now();
    let (l, tab) = lift();
    let (f, _) = inputs();
    let nonzero = !tab.is_zero();
    let cusp = tab.is_cuspidal();
    let gens: [Mat2; 4] = [[[0, 1], [1, 0]], [[1, 1], [0, 1]], [[1, 0], [0, -1]], [[1, -1], [1, 0]]];
    let mut equivariant = true;
    let mut checked = 0;
    for key in tab.nonzero_keys() {
        for u in gens {
            let s = forms::transform(&key, &u);
            if s[0] > 12 || s[2] > 12 {
                continue;
            }
            checked += 1;
            equivariant &= Some(l.coefficient(&s).unwrap()) == tab.lookup(&s).unwrap();
        }
    }
    let symmetric = l.terms(12).unwrap().symmetric();
    let beta = f.eigenvalue(2).unwrap().clone();
    let a3 = f.eigenvalue(3).unwrap().clone();
    let beta_is_generator = beta
        .field()
        .map(|k| *k.modulus() == Poly::from_ints(&[188, -90, 0, 1]) && beta == k.generator())
        .unwrap_or(false);
    let mu2 = verify_eigen(tab, 2, 6).unwrap().eigenvalue;
    let mu3 = verify_eigen(tab, 3, 4).unwrap().eigenvalue;
    let ok2 = mu2 == beta.rsub(&NfElem::rational(ri(8)));
    let ok3 = mu3 == a3.rsub(&NfElem::rational(ri(9)));
    let (fast, time) = within(t, 600);
    let pass = nonzero && cusp && equivariant && checked > 0 && symmetric && beta_is_generator && ok2 && ok3 && fast;
    report(
        6,
        "Yoshida lift N = 11, (2, 0), bound 12",
        pass,
        &format!(
            "{} nonzero keys, cuspidal {}, GL2 equivariant on {} transforms {}, swap symmetric {}, mu(2) = {} ({}), mu(3) = {} ({}), {}",
            tab.nonzero_keys().len(),
            cusp,
            checked,
            equivariant,
            symmetric,
            mu2,
            ok2,
            mu3,
            ok3,
            time
        ),
    );
}

#[test]
fn criterion_07_waldspurger_factorization() {
    let t = Instant::now();
    let (p1, p2) = phis();
    let (_, tab) = lift();
    let r = factorization_check(tab, cs11(), &p1, &p2, 4).unwrap();
    let (fast, time) = within(t, 300);
    let pass = r.equal && r.lhs == r.rhs && !r.lhs.is_zero() && fast;
    report(7, "factorization N = 11, d = 4", pass, &format!("lhs {} ; rhs {} ; {}", r.lhs, r.rhs, time));
}

#[test]
fn criterion_08_denominator_audit() {
    let mut failures = Vec::new();
    let mut audited = 0;
    for k in 1..=14u32 {
        for nu in 0..=6u32 {
            match L_operator(&ri(k as i64), nu, 2) {
                Ok(l) => {
                    audited += 1;
                    let rep = audit_denominators(&l, &denominator_bound(k, 0, nu));
                    if !rep.holds {
                        failures.push(format!(
                            "(k={}, nu={}): odd lcm {} vs bound {}",
                            k,
                            nu,
                            rep.odd_lcm,
                            denominator_bound(k, 0, nu)
                        ));
                    }
                }
                Err(e) => failures.push(format!("(k={}, nu={}): {}", k, nu, e)),
            }
        }
    }
    let pass = failures.is_empty();
    report(
        8,
        "denominator audit",
        pass,
        &format!("{} operators audited, {} exceed the bound: {}", audited, failures.len(), failures.join(", ")),
    );
}

#[test]
fn criterion_09_norm_fixture() {
    let k = NumberField::from_ints(&[-1969, 0, 1]).unwrap();
    let alpha = NfElem::from_coords(&k, vec![rq(-467, 35640), Rational::new(BigInt::from(-2119), BigInt::from(140350320u64))]);
    let want = Rational::new(BigInt::from(7u64 * 271 * 461 * 653), BigInt::from(2u64.pow(8) * 3u64.pow(7) * 25 * 1331 * 179));
    let got = nf_norm(&alpha);
    report(9, "field norm fixture", got == want, &format!("Norm = {} vs {}", got, want));
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
            if Poly::from_ints(&f).rational_roots().is_empty() {
                if let Ok(k) = NumberField::from_ints(&f) {
                    break Some(k);
                }
            }
        },
    }
}

#[test]
fn criterion_10_scanner_soundness() {
    let t = Instant::now();
    let primes = [2u64, 3, 5, 7, 13, 17];
    let mut missed = Vec::new();
    let mut asymmetric = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xacce97 + seed);
        let k = random_field(&mut rng);
        let ell = loop {
            let l = rng.gen_range(7u64..400);
            if yf::exact_core::rational::is_prime_u64(l) {
                break l;
            }
        };
        let (mut ea, mut eb) = (BTreeMap::new(), BTreeMap::new());
        for p in primes {
            let a = match &k {
                None => NfElem::rational(ri(rng.gen_range(-50..50))),
                Some(k) => NfElem::from_coords(k, (0..k.degree()).map(|_| ri(rng.gen_range(-12..13))).collect()),
            };
            let n = [-3i64, -2, -1, 1, 2, 3][rng.gen_range(0..6)];
            eb.insert(p, a.radd(&NfElem::rational(ri(ell as i64 * n))));
            ea.insert(p, a);
        }
        let a = EigenTable::new("A", Weight::Elliptic(4), 11, k.clone(), ea).unwrap();
        let b = EigenTable::new("B", Weight::Elliptic(4), 11, k, eb).unwrap();
        let r = scan(&a, &b, &primes).unwrap();
        if r.exact || !r.moduli().contains(&BigInt::from(ell)) {
            missed.push(seed);
        }
        let r2 = scan(&b, &a, &primes).unwrap();
        if r2.resultants != r.resultants || r2.moduli() != r.moduli() {
            asymmetric += 1;
        }
        // noise flags follow the floor
        assert!(r.candidates.iter().all(|c| c.likely_noise == (c.ell <= BigInt::from(DEFAULT_FLOOR))));
    }
    let ident = scan(
        &EigenTable::from_system(&inputs().0, 11).unwrap(),
        &EigenTable::from_system(&inputs().0, 11).unwrap(),
        &[2, 3, 5],
    )
    .unwrap();
    let (fast, time) = within(t, 30);
    let pass = missed.is_empty() && asymmetric == 0 && ident.exact && ident.modulus.is_zero() && fast;
    report(
        10,
        "scanner soundness",
        pass,
        &format!(
            "100 planted, missed {:?}, asymmetric {}, identical exact {}, {}",
            missed, asymmetric, ident.exact, time
        ),
    );
}

#[test]
fn criterion_11_constants() {
    let mut notes = Vec::new();
    let mut pass = true;
    for (nu1, nu2) in [(2u32, 0u32), (4, 2)] {
        let want_c8 = SymbolicConstant::pi_power(ri(64 * (nu2 as i64 + 1).pow(2)), 2 + 2 * nu1 as i32 + 2 * nu2 as i32);
        let sign = if nu2 % 2 == 0 { 1 } else { -1 };
        let want_c = SymbolicConstant::pi_power(rq(sign * 2, 2 * nu2 as i64 + 2), 1);
        let (g8, gc) = (c8_inv(nu1, nu2), c_wald(nu2));
        pass &= g8 == want_c8 && gc == want_c;
        notes.push(format!("({}, {}): c8^-1 = {}, c = {}", nu1, nu2, g8, gc));
    }
    // the displayed value at (2, 0)
    pass &= c8_inv(2, 0).to_string() == "64*pi^6";
    report(11, "constants ledger", pass, &notes.join("; "));
}

#[test]
fn criterion_12_determinism() {
    let cfg = RunConfig::new(11, 1, 2, 0, 12);
    let one = run_pipeline_with_threads(cfg.clone(), 1).unwrap();
    let eight = run_pipeline_with_threads(cfg, 8).unwrap();
    let differing: Vec<&String> = one.artifacts.keys().filter(|k| one.artifacts.get(*k) != eight.artifacts.get(*k)).collect();
    let pass = one.artifacts.len() == eight.artifacts.len() && differing.is_empty() && one.passed() && eight.passed();
    report(
        12,
        "determinism",
        pass,
        &format!("{} artifacts, differing {:?}", one.artifacts.len(), differing),
    );
}
