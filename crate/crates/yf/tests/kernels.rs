use num_bigint::BigInt;
use proptest::prelude::*;
use yf::exact_core::multipoly::MultiPoly;
use yf::exact_core::rational::{ri, rq, Rational};
use yf::exact_core::SymbolicConstant;
use yf::kernels::constants::*;
use yf::kernels::*;

const SUITE: [(u32, u32); 5] = [(0, 0), (0, 2), (1, 0), (2, 0), (1, 2)];

fn form() -> Vec<Rational> {
    vec![ri(1), ri(1), ri(3), ri(3)]
}

#[test]
fn l_operator_small_cases() {
    let kv = kernel_vars(2);
    for a in [ri(2), ri(5), rq(7, 2)] {
        assert_eq!(L_operator(&a, 0, 2).unwrap(), MultiPoly::one(&kv.vars));
        let expect = xt2y(&kv)
            .pow(2)
            .scale_rat(&ri(2))
            .sub(&t1x(&kv).mul(&t4y(&kv)).scale_rat(&a.recip()))
            .scale_rat(&(&a * (&a + ri(1))).recip());
        assert_eq!(L_operator(&a, 2, 2).unwrap(), expect);
    }
}

#[test]
fn l_operator_excluded_weights() {
    assert!(matches!(L_operator(&ri(0), 2, 2), Err(yf::Error::ExcludedWeight(_))));
    // (2 − α − ν)^{[1]} = 0 at α = 0 for ν = 2; at α = −1 for ν = 3 α^{[3]} vanishes first
    assert!(matches!(L_operator(&ri(-2), 4, 2), Err(yf::Error::ExcludedWeight(_))));
    assert!(L_operator(&rq(1, 2), 4, 2).is_ok());
}

#[test]
fn main_term_of_l_operator() {
    for a in [ri(2), ri(3), rq(5, 2)] {
        for nu in 0..=6 {
            let l = L_operator(&a, nu, 2).unwrap();
            assert_eq!(pure_t2_part(&l, 2), main_term(&a, 0, nu, 2).unwrap());
            assert_eq!(
                c_alpha(2, &a, 0, nu).unwrap(),
                (yf::exact_core::rational::rising(&a, nu) * ri((1..=nu as i64).product())).recip()
            );
        }
    }
}

#[test]
fn solver_matches_l_operator_when_mu_is_zero() {
    for nu in [0, 1, 2, 3, 4] {
        for a in [ri(2), ri(3)] {
            assert_eq!(solved_normalized(&a, 2, 0, nu).unwrap(), L_operator(&a, nu, 2).unwrap(), "nu = {}", nu);
        }
    }
    assert_eq!(solved_normalized(&ri(2), 1, 0, 4).unwrap(), L_operator(&ri(2), 4, 1).unwrap());
}

#[test]
fn main_term_normalization_across_suite() {
    for (mu, nu) in SUITE {
        let g = build_P_Geg(2, 2, mu, nu, &ri(2)).unwrap();
        assert_eq!(g.pure_t2_part(), main_term(&ri(2), mu, nu, 2).unwrap());
    }
    let g = build_P_Geg(2, 2, 2, 0, &ri(2)).unwrap();
    assert_eq!(c_alpha(2, &ri(2), 2, 0).unwrap(), rq(9, 2));
    assert_eq!(g.pure_t2_part(), det_t2(&kernel_vars(2)).pow(2).scale_rat(&rq(9, 2)));
}

/// Kernel at symbolic y_0, y_1 (8 coordinates) with numeric y′ rows, over y-coords and markers.
fn half_symbolic(g: &GegKernel, yp: &[[i64; 4]; 2], swap: bool) -> (MultiPoly<Rational>, usize) {
    let vv = yf::exact_core::multipoly::names(&["a0", "a1", "a2", "a3", "b0", "b1", "b2", "b3", "X0", "X1", "Y0", "Y1"]);
    let v = |i| MultiPoly::var(&vv, i);
    let cst = |x: i64| MultiPoly::constant(&vv, ri(x));
    let sym: Vec<Vec<MultiPoly<Rational>>> = (0..2).map(|r| (0..4).map(|c| v(4 * r + c)).collect()).collect();
    let num: Vec<Vec<MultiPoly<Rational>>> = yp.iter().map(|r| r.iter().map(|&x| cst(x)).collect()).collect();
    let rows: Vec<_> = if swap {
        num.into_iter().chain(sym).collect()
    } else {
        sym.into_iter().chain(num).collect()
    };
    let xm = [v(8), v(9)];
    let ym = [v(10), v(11)];
    (g.at_vectors(&form(), &rows, &xm, &ym), 8)
}

#[test]
fn pluriharmonic_in_each_block() {
    let inv: Vec<Rational> = form().iter().map(|x| x.recip()).collect();
    let yp = [[1, -2, 1, 0], [0, 3, -1, 2]];
    for (mu, nu) in SUITE {
        let g = build_P_Geg(2, 2, mu, nu, &ri(2)).unwrap();
        for swap in [false, true] {
            let (p, _) = half_symbolic(&g, &yp, swap);
            for (r, s) in [(0, 0), (0, 1), (1, 1)] {
                let a: Vec<usize> = (0..4).map(|c| 4 * r + c).collect();
                let b: Vec<usize> = (0..4).map(|c| 4 * s + c).collect();
                assert!(
                    p.mixed_laplacian(&a, &b, &inv).is_zero(),
                    "(mu,nu)=({},{}) block {} r={} s={}",
                    mu,
                    nu,
                    swap as u8,
                    r,
                    s
                );
            }
        }
    }
}

#[test]
fn orthogonal_invariance_and_swap_symmetry() {
    let gf = form();
    for (mu, nu) in SUITE {
        let g = build_P_Geg(2, 2, mu, nu, &ri(2)).unwrap();
        let p = g.vector_form(&gf);
        let vv = p.vars().clone();
        let idx = |a: usize, c: usize| a * 4 + c;
        // coordinate swaps inside equal-weight pairs and a sign change
        let maps: [Box<dyn Fn(usize, usize) -> (usize, i64)>; 3] = [
            Box::new(|a, c| (idx(a, [1, 0, 2, 3][c]), 1)),
            Box::new(|a, c| (idx(a, [0, 1, 3, 2][c]), 1)),
            Box::new(|a, c| (idx(a, c), if c == 2 { -1 } else { 1 })),
        ];
        for m in maps.iter() {
            let mut images: Vec<MultiPoly<Rational>> = (0..vv.len()).map(|i| MultiPoly::var(&vv, i)).collect();
            for a in 0..4 {
                for c in 0..4 {
                    let (j, s) = m(a, c);
                    images[idx(a, c)] = MultiPoly::var(&vv, j).scale_rat(&ri(s));
                }
            }
            assert_eq!(p.compose(&images), p);
        }
        // (y, X) ↔ (y′, Y)
        let mut images: Vec<MultiPoly<Rational>> = (0..vv.len()).map(|i| MultiPoly::var(&vv, i)).collect();
        for a in 0..4 {
            for c in 0..4 {
                images[idx(a, c)] = MultiPoly::var(&vv, idx((a + 2) % 4, c));
            }
        }
        for r in 0..2 {
            images[16 + r] = MultiPoly::var(&vv, 18 + r);
            images[18 + r] = MultiPoly::var(&vv, 16 + r);
        }
        assert_eq!(p.compose(&images), p);
    }
}

fn numeric_eval(g: &GegKernel, rows: &[[Rational; 4]], xm: &[MultiPoly<Rational>], ym: &[MultiPoly<Rational>]) -> MultiPoly<Rational> {
    let vars = xm[0].vars().clone();
    let r: Vec<Vec<MultiPoly<Rational>>> = rows
        .iter()
        .map(|row| row.iter().map(|x| MultiPoly::constant(&vars, x.clone())).collect())
        .collect();
    g.at_vectors(&form(), &r, xm, ym)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn gl2_equivariance(a in prop::array::uniform4(-3i64..4), b in prop::array::uniform4(-3i64..4),
                        ys in prop::array::uniform16(-4i64..5), which in 0usize..5) {
        let (mu, nu) = SUITE[which];
        let g = build_P_Geg(2, 2, mu, nu, &ri(2)).unwrap();
        let mv = yf::exact_core::multipoly::names(&["X0", "X1", "Y0", "Y1"]);
        let v = |i| MultiPoly::<Rational>::var(&mv, i);
        let rows: Vec<[Rational; 4]> = (0..4).map(|r| std::array::from_fn(|c| ri(ys[4 * r + c]))).collect();
        let mix = |m: &[i64; 4], r0: &[Rational; 4], r1: &[Rational; 4]| -> [[Rational; 4]; 2] {
            [std::array::from_fn(|c| ri(m[0]) * &r0[c] + ri(m[1]) * &r1[c]),
             std::array::from_fn(|c| ri(m[2]) * &r0[c] + ri(m[3]) * &r1[c])]
        };
        let [m0, m1] = mix(&a, &rows[0], &rows[1]);
        let [m2, m3] = mix(&b, &rows[2], &rows[3]);
        let lhs = numeric_eval(&g, &[m0, m1, m2, m3], &[v(0), v(1)], &[v(2), v(3)]);
        // markers transform by X ↦ XA
        let xa = [v(0).scale_rat(&ri(a[0])).add(&v(1).scale_rat(&ri(a[2]))), v(0).scale_rat(&ri(a[1])).add(&v(1).scale_rat(&ri(a[3])))];
        let yb = [v(2).scale_rat(&ri(b[0])).add(&v(3).scale_rat(&ri(b[2]))), v(2).scale_rat(&ri(b[1])).add(&v(3).scale_rat(&ri(b[3])))];
        let det = ri(a[0] * a[3] - a[1] * a[2]) * ri(b[0] * b[3] - b[1] * b[2]);
        let rhs = numeric_eval(&g, &rows, &xa, &yb).scale_rat(&yf::exact_core::rational::rpow(&det, mu as i64));
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn solution_space_is_one_dimensional_elsewhere() {
    for (a, mu, nu) in [(ri(3), 1, 1), (ri(3), 1, 2), (ri(4), 2, 2)] {
        solve_kernel(&a, 2, mu, nu).unwrap();
    }
}

#[test]
fn constant_values() {
    assert_eq!(c_n(2, &ri(1)), rq(3, 2));
    assert_eq!(c_n(2, &rq(3, 2)), ri(3));
    assert_eq!(a_const(2, &ri(2), 1).unwrap(), rq(3, 2));
    assert_eq!(c7(2, 0).unwrap(), ri(54));
    assert_eq!(c8_inv(2, 0), SymbolicConstant::pi_power(ri(64), 6));
    assert_eq!(c8_inv(4, 2), SymbolicConstant::pi_power(ri(576), 14));
    assert_eq!(c8(2, 0).mul(&c8_inv(2, 0)), SymbolicConstant::one());
    assert_eq!(c_wald(0), SymbolicConstant::pi_power(ri(1), 1));
    assert_eq!(c_wald(2), SymbolicConstant::pi_power(rq(1, 3), 1));
    assert_eq!(c_wald(1), SymbolicConstant::pi_power(rq(-1, 2), 1));
    // B_{2,1} = 1/(−2πi) · 2/1 = i/π
    let b = b_const(&ri(2), 1).unwrap();
    assert_eq!(b, SymbolicConstant::imag_unit().scale(&ri(1)).mul(&SymbolicConstant::pi_power(ri(1), -1)));
    assert_eq!(
        c3(6, 14).unwrap(),
        SymbolicConstant::new(yf::exact_core::NfElem::rational(ri(256)), 8, 8, BigInt::from(1)).unwrap()
    );
}

#[test]
fn hua_integral_rationality() {
    // n = 2, α = 1, ν = 0: π³/3 · 5/(2·Γ(6)) = π³/144
    assert_eq!(hua_integral(2, &ri(1), 0).unwrap(), SymbolicConstant::pi_power(rq(1, 144), 3));
    // 2α = 1/2 leaves a single √π from Γ(ν+n+j+2α+1); 2α = 1/4 is outside the half-integer lattice
    assert!(hua_integral(2, &rq(1, 4), 0).is_err());
    assert!(hua_integral(2, &rq(1, 8), 0).is_err());
    assert!(hua_integral(2, &rq(1, 2), 0).is_ok());
    // n = 1 has no Γ factor
    assert_eq!(hua_integral(1, &rq(1, 2), 3).unwrap(), SymbolicConstant::pi_power(rq(2, 9), 1));
}

#[test]
fn gamma_n_readings_differ_by_a_power_of_two() {
    let (a, b) = gamma_n_const(2, 2, 1, 2, &ri(0)).unwrap();
    let r = a.div(&b).unwrap();
    assert_eq!(r.pi_power, 0);
    let q = r.rational_part().unwrap();
    // E₁ − E₂ = n − 1
    assert_eq!(q, ri(2));
}

#[test]
fn ledger_records_and_reverifies() {
    let mut l = ConstantsLedger::new();
    l.record("c7", &["2", "0"]).unwrap();
    l.record("c8_inv", &["4", "2"]).unwrap();
    l.record("C_alpha", &["2", "2", "2", "0"]).unwrap();
    l.record("c", &["2"]).unwrap();
    assert_eq!(l.entries().len(), 4);
    assert_eq!(l.entries()[0].value, SymbolicConstant::rational(ri(54)));
    assert!(l.verify().unwrap());
    assert!(l.record("B", &["1", "1"]).is_err());
    assert!(l.record("nope", &[]).is_err());
    assert_eq!(l.entries().len(), 4);
}

proptest! {
    #[test]
    fn c_n_is_a_gamma_n_shift(num in -20i64..40, den in 1i64..7, n in 1u32..5) {
        let s = rq(num, den);
        let t = &s + rq(n as i64 - 1, 2);
        prop_assert_eq!(c_n(n, &s), gamma_n_shift(n, &t, 1).unwrap());
    }

    #[test]
    fn gamma_n_shift_composes(num in 1i64..40, den in 1i64..5, m1 in 0i64..4, m2 in 0i64..4) {
        let s = rq(num, den) + ri(3);
        let lhs = gamma_n_shift(2, &s, m1 + m2).unwrap();
        let rhs = gamma_n_shift(2, &s, m1).unwrap() * gamma_n_shift(2, &(&s + ri(m1)), m2).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(gamma_n_shift(2, &(&s + ri(m1)), -m1).unwrap() * gamma_n_shift(2, &s, m1).unwrap(), ri(1));
    }
}

#[test]
fn denominator_bound_values() {
    assert_eq!(denominator_bound(7, 0, 0), BigInt::from(1));
    assert_eq!(denominator_bound(4, 0, 2), BigInt::from(40));
    assert_eq!(denominator_bound(4, 0, 4), BigInt::from(4 * 5 * 6 * 7 * 24 * 6));
    let rep = audit_denominators(&L_operator(&ri(4), 2, 2).unwrap(), &denominator_bound(4, 0, 2));
    assert!(rep.holds);
}

#[test]
fn stated_bound_misses_a_factor_at_k4_nu4() {
    // j = 2 coefficient 1/(4^{[4]}·2!·(−6)(−5)) has 5² in its denominator
    let l = L_operator(&ri(4), 4, 2).unwrap();
    let rep = audit_denominators(&l, &denominator_bound(4, 0, 4));
    assert!(!rep.holds);
    assert_eq!(rep.odd_lcm, BigInt::from(3 * 3 * 5 * 5 * 7));
    assert!(audit_denominators(&l, &denominator_bound_corrected(4, 0, 4)).holds);
}

#[test]
fn corrected_bound_covers_all_small_weights() {
    for k in 1..=14u32 {
        for nu in 0..=6u32 {
            let Ok(l) = L_operator(&ri(k as i64), nu, 1) else { continue };
            assert!(audit_denominators(&l, &denominator_bound_corrected(k, 0, nu)).holds, "k={} nu={}", k, nu);
        }
    }
}
