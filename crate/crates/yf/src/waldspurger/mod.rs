//! Waldspurger lifts of automorphic vectors, averaged lift coefficients and
//! the factorization of a(F, d) into a product of Waldspurger coefficients.
//!
//! Moment integrals. For a homogeneous p of degree m and Q(x) = xᵗTx ≤ 1 in ℝ²,
//! ∫_{Q≤1} p dx = Γ(m/2 + 2)⁻¹ ∫ p e^{−Q} dx, and the Gaussian integral is
//! (π/√det T)·E[p] for x ~ N(0, T⁻¹/2). With det T = d/4 the prefactor √d/2
//! cancels, so (√d/2)∫_{T[x]≤1} x₁^i x₂^j dx = π·E[x₁^i x₂^j]/((i+j)/2 + 1)!.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::brandt::AutomorphicVector;
use crate::exact_core::rational::{factorial, factorize_u64, ri, rpow, Rational};
use crate::exact_core::{Field, MultiPoly, NfElem, Ring, SymbolicConstant};
use crate::harmonics::harmonic_space;
use crate::kernels::constants::c_wald;
use crate::quatlat::classes::IdealClassSet;
use crate::quatlat::lattice::{hnf, Lattice};
use crate::quatlat::short::IntForm;
use crate::yoshida::forms::{self, Form, Mat2};
use crate::yoshida::table::SiegelCoeffTable;
use crate::Error;

/// Σ a(n) qⁿ for 1 ≤ n ≤ bound.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfIntegralQExpansion {
    pub nu: u32,
    pub bound: u64,
    pub coeffs: BTreeMap<u64, NfElem>,
}

impl HalfIntegralQExpansion {
    pub fn coeff(&self, n: u64) -> Result<NfElem, Error> {
        if n > self.bound {
            return Err(Error::Truncation(format!("coefficient {} beyond the bound {}", n, self.bound)));
        }
        Ok(self.coeffs.get(&n).cloned().unwrap_or_else(NfElem::rzero))
    }

    pub fn add(&self, o: &Self) -> Self {
        let bound = self.bound.min(o.bound);
        let mut coeffs = BTreeMap::new();
        for n in 1..=bound {
            let v = self.coeff(n).unwrap().radd(&o.coeff(n).unwrap());
            if !v.ris_zero() {
                coeffs.insert(n, v);
            }
        }
        HalfIntegralQExpansion { nu: self.nu, bound, coeffs }
    }
}

/// L = D⁽⁰⁾ ∩ (ℤ1 + 2R) as a rank-3 basis of pure quaternions (coordinates 1..3).
pub fn trace_zero_lattice(r: &Lattice) -> Vec<[Rational; 3]> {
    let mut gens: Vec<Vec<Rational>> = vec![vec![ri(1), ri(0), ri(0), ri(0)]];
    gens.extend(r.basis().iter().map(|row| row.iter().map(|x| x * ri(2)).collect()));
    let l = Lattice::from_generators(&gens);
    let (den, ints) = l.scaled_integer_basis();
    // integer kernel of c ↦ (c·B)₀ read off the HNF of [B₀ | I]
    let aug: Vec<Vec<BigInt>> = ints
        .iter()
        .enumerate()
        .map(|(t, row)| {
            let mut v = vec![row[0].clone()];
            v.extend((0..4).map(|u| BigInt::from((u == t) as i64)));
            v
        })
        .collect();
    let h = hnf(&aug);
    let dr = Rational::from_integer(den);
    h.iter()
        .filter(|row| row[0] == BigInt::from(0))
        .map(|row| {
            let mut x = [ri(0), ri(0), ri(0)];
            for t in 0..4 {
                let c = Rational::from_integer(row[t + 1].clone());
                for u in 0..3 {
                    x[u] += &c * Rational::from_integer(ints[t][u + 1].clone()) / &dr;
                }
            }
            x
        })
        .collect()
}

/// a(W(φ), n) = Σ_j e_j⁻¹ Σ_{x ∈ L_j, n(x) = n} φ(y_j)(x) for n ≤ bound.
pub fn waldspurger_lift(cs: &IdealClassSet, phi: &AutomorphicVector<NfElem>, bound: u64) -> Result<HalfIntegralQExpansion, Error> {
    let alg = cs.algebra();
    let g = crate::harmonics::pure_weights(alg);
    let sp = harmonic_space(alg, phi.nu)?;
    if phi.values.len() != cs.h() {
        return Err(Error::Domain("class-set mismatch".into()));
    }
    let mut coeffs: BTreeMap<u64, NfElem> = BTreeMap::new();
    for (j, r) in cs.right_orders.iter().enumerate() {
        let p: MultiPoly<NfElem> = sp.from_coords(&phi.values[j]);
        if p.is_zero() {
            continue;
        }
        let basis = trace_zero_lattice(r);
        let gram: Vec<Vec<Rational>> = (0..3)
            .map(|s| (0..3).map(|t| (0..3).map(|v| &g[v] * &basis[s][v] * &basis[t][v]).sum()).collect())
            .collect();
        let form = IntForm::new(&gram)?;
        let w = Rational::new(1.into(), (cs.unit_counts[j] as i64).into());
        for (c, val) in form.enumerate_up_to(&ri(bound as i64)) {
            if val == 0 {
                continue;
            }
            let n = Rational::new(val.into(), form.scale.into());
            if !n.is_integer() {
                return Err(Error::Invariant(format!("norm {} on L_{} is not integral", n, j)));
            }
            let n = n.to_integer().to_u64().unwrap();
            let x: Vec<NfElem> = (0..3).map(|u| NfElem::rational((0..3).map(|s| ri(c[s]) * &basis[s][u]).sum())).collect();
            let v = p.eval(&x).rscale(&w);
            let e = coeffs.entry(n).or_insert_with(NfElem::rzero);
            *e = e.radd(&v);
        }
    }
    coeffs.retain(|_, v| !v.ris_zero());
    Ok(HalfIntegralQExpansion { nu: phi.nu, bound, coeffs })
}

/// E[x₁^i x₂^j] for x ~ N(0, S), S = T⁻¹/2, from the moment generating function
/// exp(½ sᵗSs): i!·j!·Σ (S₁₁/2)^p S₁₂^r (S₂₂/2)^q / (p! q! r!) over 2p + r = i, 2q + r = j.
fn gaussian_moment(t: &Form, i: u32, j: u32) -> Rational {
    let det4 = ri(4 * t[0] * t[2] - t[1] * t[1]);
    // T⁻¹ = (4/Δ)·[[c, −b/2], [−b/2, a]], S = T⁻¹/2
    let s11 = ri(2 * t[2]) / &det4;
    let s22 = ri(2 * t[0]) / &det4;
    let s12 = ri(-t[1]) / &det4;
    let fr = |n: u32| Rational::from_integer(factorial(n));
    let mut acc = ri(0);
    for r in 0..=i.min(j) {
        if !(i - r).is_multiple_of(2) || !(j - r).is_multiple_of(2) {
            continue;
        }
        let (p, q) = ((i - r) / 2, (j - r) / 2);
        acc += rpow(&(&s11 / ri(2)), p as i64) * rpow(&s12, r as i64) * rpow(&(&s22 / ri(2)), q as i64) / (fr(p) * fr(q) * fr(r));
    }
    acc * fr(i) * fr(j)
}

/// (√d/2)·∫_{T[x] ≤ 1} x₁^i x₂^j dx₁dx₂ with d = 4ac − b², as rational·π.
pub fn moment_integral(t: &Form, i: u32, j: u32) -> Result<SymbolicConstant, Error> {
    Ok(SymbolicConstant::pi_power(moment_rational(t, i, j)?, 1))
}

/// The rational factor of [`moment_integral`].
pub fn moment_rational(t: &Form, i: u32, j: u32) -> Result<Rational, Error> {
    if !(t[0] > 0 && forms::discriminant(t) < 0) {
        return Err(Error::Domain(format!("form {:?} is not positive definite", t)));
    }
    if (i + j) % 2 == 1 {
        return Ok(ri(0));
    }
    Ok(gaussian_moment(t, i, j) / Rational::from_integer(factorial((i + j) / 2 + 1)))
}

/// −d is a fundamental discriminant.
pub fn is_fundamental(d: u64) -> bool {
    if d == 0 {
        return false;
    }
    let sqfree = |n: u64| factorize_u64(n).iter().all(|&(_, e)| e == 1);
    // −d ≡ 1 mod 4 ⇔ d ≡ 3 mod 4
    if d % 4 == 3 {
        return sqfree(d);
    }
    if d.is_multiple_of(4) {
        let m = d / 4;
        // −m ≡ 2, 3 mod 4 ⇔ m ≡ 2, 1 mod 4
        return (m % 4 == 1 || m % 4 == 2) && sqfree(m);
    }
    false
}

pub fn sigma0(n: u64) -> u64 {
    factorize_u64(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

/// Kronecker symbol (D/p) for a prime p.
pub fn kronecker(dd: i64, p: u64) -> i64 {
    let p = p as i64;
    if p == 2 {
        if dd % 2 == 0 {
            return 0;
        }
        return match dd.rem_euclid(8) {
            1 | 7 => 1,
            _ => -1,
        };
    }
    let a = dd.rem_euclid(p);
    if a == 0 {
        return 0;
    }
    // Euler's criterion
    let mut r: i128 = 1;
    let mut b = a as i128;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as i128;
        }
        b = b * b % p as i128;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

/// GL₂(ℤ)-reduced positive definite forms of discriminant −d.
pub fn reduced_forms_of_disc(d: u64) -> Vec<Form> {
    let d = d as i64;
    let mut out = Vec::new();
    let mut a = 1;
    while 3 * a * a <= d {
        for b in 0..=a {
            let num = b * b + d;
            if num % (4 * a) == 0 {
                let c = num / (4 * a);
                if c >= a {
                    out.push([a, b, c]);
                }
            }
        }
        a += 1;
    }
    out
}

/// Automorphs g of T in GL₂(ℤ) (gᵗTg = T), as (all, determinant one).
pub fn automorphs(t: &Form) -> (Vec<Mat2>, usize) {
    let d = -forms::discriminant(t);
    let q = |x: i64, y: i64| t[0] * x * x + t[1] * x * y + t[2] * y * y;
    // columns have T-norms a and c; x² ≤ 4cQ/d and y² ≤ 4aQ/d
    let cols = |n: i64| -> Vec<(i64, i64)> {
        let bx = ((4 * t[2] * n) as f64 / d as f64).sqrt().ceil() as i64 + 1;
        let by = ((4 * t[0] * n) as f64 / d as f64).sqrt().ceil() as i64 + 1;
        let mut v = Vec::new();
        for x in -bx..=bx {
            for y in -by..=by {
                if q(x, y) == n {
                    v.push((x, y));
                }
            }
        }
        v
    };
    let mut out = Vec::new();
    for (p, r) in cols(t[0]) {
        for (qq, s) in cols(t[2]) {
            let g: Mat2 = [[p, qq], [r, s]];
            let dg = forms::det(&g);
            if (dg == 1 || dg == -1) && forms::transform(t, &g) == *t {
                out.push(g);
            }
        }
    }
    let proper = out.iter().filter(|g| forms::det(g) == 1).count();
    (out, proper)
}

/// a(F, d) up to the table's scale: value·π·scale/√scale_root.
#[derive(Clone, Debug, PartialEq)]
pub struct AveragedCoefficient {
    pub d: u64,
    /// the full value divided by √scale_root
    pub value: SymbolicConstant,
    pub scale_root: NfElem,
    /// (T, ε(T)) over GL₂(ℤ)-classes of discriminant −d
    pub class_data: Vec<(Form, u32)>,
}

/// (√d/2) Σ_{T} ε(T)⁻¹ ∫_{T[x]≤1} A(F,T)(x₁,x₂) dx over GL₂(ℤ)-classes of
/// discriminant −d, with ε(T) the number of automorphs in GL₂(ℤ).
pub fn averaged_coefficient(f: &SiegelCoeffTable, d: u64) -> Result<AveragedCoefficient, Error> {
    if !is_fundamental(d) {
        return Err(Error::Domain(format!("−{} is not a fundamental discriminant", d)));
    }
    let mut sum = NfElem::rzero();
    let mut class_data = Vec::new();
    let j = f.j;
    for t in reduced_forms_of_disc(d) {
        let Some(a) = f.lookup(&t)? else {
            return Err(Error::Truncation(format!("class {:?} of discriminant −{} lies beyond trace {}", t, d, f.bound)));
        };
        let eps = automorphs(&t).0.len() as u32;
        class_data.push((t, eps));
        let mut s = NfElem::rzero();
        for (k, c) in a.iter().enumerate() {
            if c.ris_zero() {
                continue;
            }
            s = s.radd(&c.rscale(&moment_rational(&t, j - k as u32, k as u32)?));
        }
        sum = sum.radd(&s.rscale(&Rational::new(1.into(), (eps as i64).into())));
    }
    let value = SymbolicConstant::new(sum, 1, 0, 1.into())?.mul(&f.scale);
    Ok(AveragedCoefficient {
        d,
        value,
        scale_root: f.scale_root.clone(),
        class_data,
    })
}

/// Outcome of comparing (d/4)^{(ν₁+ν₂)/2} σ₀(N_d) a(F,d) with (c/2) a(W(φ₁),d) a(W(φ₂),d).
#[derive(Clone, Debug, PartialEq)]
pub struct FactorizationReport {
    pub d: u64,
    pub lhs: SymbolicConstant,
    /// the left side is lhs/√lhs_root
    pub lhs_root: NfElem,
    pub rhs: SymbolicConstant,
    /// (lhs/rhs)², exact
    pub ratio_squared: Option<NfElem>,
    pub equal: bool,
    /// the form of the discriminant hypothesis that was verified
    pub hypothesis: String,
}

/// Hypothesis (−d/p)·ε_p = 1 for every p | N_d = N/gcd(N, d), with ε_p = −1 exactly for p | N₁.
pub fn check_hypothesis(cs: &IdealClassSet, d: u64) -> Result<String, Error> {
    let n = cs.order.level();
    let nd = n / num_integer::gcd(n, d);
    let mut parts = Vec::new();
    for (p, _) in factorize_u64(nd) {
        let eps = if cs.order.n1.is_multiple_of(p) { -1 } else { 1 };
        let k = kronecker(-(d as i64), p);
        if k * eps != 1 {
            return Err(Error::Domain(format!(
                "hypothesis (−d/p)·ε_p = 1 fails at p = {} for d = {}: (−d/p) = {}, ε_p = {}",
                p, d, k, eps
            )));
        }
        parts.push(format!("(-{}/{})*eps_{} = {}*{} = 1", d, p, p, k, eps));
    }
    Ok(parts.join("; "))
}

pub fn factorization_check(
    f_can: &SiegelCoeffTable,
    cs: &IdealClassSet,
    phi1: &AutomorphicVector<NfElem>,
    phi2: &AutomorphicVector<NfElem>,
    d: u64,
) -> Result<FactorizationReport, Error> {
    let (n1, n2) = (phi1.nu.max(phi2.nu), phi1.nu.min(phi2.nu));
    if n1 % 2 != 0 || n2 % 2 != 0 {
        return Err(Error::Domain("factorization needs even ν₁, ν₂".into()));
    }
    let hypothesis = check_hypothesis(cs, d)?;
    let n = cs.order.level();
    let nd = n / num_integer::gcd(n, d);
    let avg = averaged_coefficient(f_can, d)?;
    let pre = rpow(&Rational::new(d.into(), 4.into()), ((n1 + n2) / 2) as i64) * ri(sigma0(nd) as i64);
    let lhs = avg.value.scale(&pre);
    let w1 = waldspurger_lift(cs, phi1, d)?.coeff(d)?;
    let w2 = waldspurger_lift(cs, phi2, d)?.coeff(d)?;
    let rhs = c_wald(n2).scale(&Rational::new(1.into(), 2.into())).scale_nf(&w1.rmul(&w2));
    let (equal, ratio_squared) = compare(&lhs, &avg.scale_root, &rhs);
    Ok(FactorizationReport {
        d,
        lhs,
        lhs_root: avg.scale_root,
        rhs,
        ratio_squared,
        equal,
        hypothesis,
    })
}

/// lhs/√root against rhs: equal iff the ratio squared is 1 with a positive sign
/// in every real embedding.
fn compare(lhs: &SymbolicConstant, root: &NfElem, rhs: &SymbolicConstant) -> (bool, Option<NfElem>) {
    if lhs.is_zero() && rhs.is_zero() {
        return (true, Some(NfElem::rone()));
    }
    if lhs.is_zero() != rhs.is_zero() {
        return (false, None);
    }
    if !lhs.same_shape(rhs) {
        return (false, None);
    }
    let q = lhs.coefficient.rdiv(&rhs.coefficient).unwrap();
    let r2 = q.rmul(&q).rdiv(root).unwrap();
    let pos = q.real_embeddings().iter().all(|&x| x > 0.0) && root.real_embeddings().iter().all(|&x| x > 0.0);
    (r2 == NfElem::rone() && pos, Some(r2))
}
