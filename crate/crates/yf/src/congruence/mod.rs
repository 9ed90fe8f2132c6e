//! Hecke eigenvalue congruences by resultants.
//!
//! Everything here is a necessary-condition test: a rational prime ℓ is reported
//! when it divides Res(m_A(p), m_B(p)) for every probe p, where m_X(p) is the
//! primitive integral minimal polynomial of a_p^X. Whether a prime above ℓ in a
//! common field realizes the congruence is not decided.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::brandt::EigenSystem;
use crate::exact_core::factor::factor_over_q;
use crate::exact_core::linalg::{self, Matrix};
use crate::exact_core::rational::{common_denominator, rbig, ri, Rational};
use crate::exact_core::{NfElem, NumberField, Poly, Ring};
use crate::Error;

mod factorint;
pub use factorint::{factor_integer, is_probable_prime};

/// Primes at or below this are reported but flagged as likely noise.
pub const DEFAULT_FLOOR: u64 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weight {
    /// Elliptic weight k.
    Elliptic(u32),
    /// Sym^j ⊗ det^κ.
    Siegel { j: u32, kappa: u32 },
}

/// Hecke eigenvalues p ↦ a_p for p ∤ N in one declared field.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenTable {
    pub label: String,
    pub weight: Weight,
    pub level: u64,
    /// None means ℚ.
    pub field: Option<Arc<NumberField>>,
    pub entries: BTreeMap<u64, NfElem>,
}

impl EigenTable {
    pub fn new(label: &str, weight: Weight, level: u64, field: Option<Arc<NumberField>>, entries: BTreeMap<u64, NfElem>) -> Result<Self, Error> {
        for (&p, a) in &entries {
            if level.is_multiple_of(p) {
                return Err(Error::Domain(format!("{}: entry at p = {} divides the level {}", label, p, level)));
            }
            if let Some(k) = a.field() {
                if field.as_ref().map(|f| f.modulus() != k.modulus()).unwrap_or(true) {
                    return Err(Error::Domain(format!("{}: entry at p = {} is not in the declared field", label, p)));
                }
            }
        }
        Ok(EigenTable {
            label: label.into(),
            weight,
            level,
            field,
            entries,
        })
    }

    /// The table of a Brandt eigensystem of weight 2ν + 2.
    pub fn from_system(s: &EigenSystem, level: u64) -> Result<Self, Error> {
        let entries = s
            .eigenvalues
            .iter()
            .filter(|(p, _)| !level.is_multiple_of(**p))
            .map(|(p, a)| (*p, a.clone()))
            .collect();
        EigenTable::new(&s.label, Weight::Elliptic(2 * s.nu + 2), level, s.field.clone(), entries)
    }

    pub fn primes(&self) -> Vec<u64> {
        self.entries.keys().copied().collect()
    }
}

/// A field containing K and L, with the images of their generators.
#[derive(Clone, Debug)]
pub struct Compositum {
    pub field: Option<Arc<NumberField>>,
    pub image_k: Option<NfElem>,
    pub image_l: Option<NfElem>,
}

impl Compositum {
    fn map(field: &Option<Arc<NumberField>>, img: &Option<NfElem>, x: &NfElem) -> NfElem {
        match (x.field(), img) {
            (None, _) => x.clone(),
            (Some(_), Some(g)) => {
                // Horner in the image of the generator
                let c = x.coords();
                let mut acc = NfElem::rzero();
                for a in c.iter().rev() {
                    acc = acc.rmul(g).radd(&NfElem::rational(a.clone()));
                }
                if acc.field().is_none() {
                    if let Some(f) = field {
                        return NfElem::from_coords(f, acc.coords());
                    }
                }
                acc
            }
            (Some(_), None) => unreachable!("element of a field with no image"),
        }
    }

    pub fn map_k(&self, x: &NfElem) -> NfElem {
        Self::map(&self.field, &self.image_k, x)
    }

    pub fn map_l(&self, x: &NfElem) -> NfElem {
        Self::map(&self.field, &self.image_l, x)
    }
}

fn kron(a: &Matrix<Rational>, b: &Matrix<Rational>) -> Matrix<Rational> {
    let (m, n) = (a.len(), b.len());
    let mut out = linalg::zeros(m * n, m * n);
    for i in 0..m {
        for j in 0..m {
            if a[i][j].ris_zero() {
                continue;
            }
            for k in 0..n {
                for l in 0..n {
                    out[i * n + k][j * n + l] = &a[i][j] * &b[k][l];
                }
            }
        }
    }
    out
}

/// Companion matrix acting on column coordinates in the power basis.
fn companion(f: &Poly<Rational>) -> Matrix<Rational> {
    let d = f.degree() as usize;
    let mut m = linalg::zeros(d, d);
    for i in 1..d {
        m[i][i - 1] = ri(1);
    }
    for i in 0..d {
        m[i][d - 1] = f.coeff(i).rneg();
    }
    m
}

/// Builds a compositum from a primitive element α⊗1 + t·1⊗β of K ⊗ L.
///
/// K ⊗ L splits as a product of fields, one per irreducible factor of the
/// characteristic polynomial of the primitive element; the factor of least degree
/// (then lexicographically least) is chosen, so the result is deterministic.
pub fn compositum(k: &Option<Arc<NumberField>>, l: &Option<Arc<NumberField>>) -> Result<Compositum, Error> {
    let (k, l) = match (k, l) {
        (None, None) => {
            return Ok(Compositum {
                field: None,
                image_k: None,
                image_l: None,
            })
        }
        (Some(k), None) => {
            return Ok(Compositum {
                field: Some(k.clone()),
                image_k: Some(k.generator()),
                image_l: None,
            })
        }
        (None, Some(l)) => {
            return Ok(Compositum {
                field: Some(l.clone()),
                image_k: None,
                image_l: Some(l.generator()),
            })
        }
        (Some(k), Some(l)) => (k, l),
    };
    if k.modulus() == l.modulus() {
        return Ok(Compositum {
            field: Some(k.clone()),
            image_k: Some(k.generator()),
            image_l: Some(k.generator()),
        });
    }
    let (m, n) = (k.degree(), l.degree());
    let ma = kron(&companion(k.modulus()), &linalg::identity(n));
    let mb = kron(&linalg::identity(m), &companion(l.modulus()));
    for t in 1..=64i64 {
        let g = linalg::mat_add(&ma, &linalg::mat_scale(&mb, &ri(t)));
        let cp = linalg::charpoly(&g);
        if !cp.is_squarefree() {
            continue;
        }
        // columns γ^i·e₀ form a basis because γ is cyclic
        let dim = m * n;
        let mut e = vec![ri(0); dim];
        e[0] = ri(1);
        let mut cols = vec![e.clone()];
        for _ in 1..dim {
            let next = linalg::mat_vec(&g, cols.last().unwrap());
            cols.push(next);
        }
        let basis: Matrix<Rational> = linalg::transpose(&cols);
        let solve_for = |target: usize| -> Result<Poly<Rational>, Error> {
            let mut rhs = vec![ri(0); dim];
            rhs[target] = ri(1);
            let c = linalg::solve(&basis, &rhs).ok_or_else(|| Error::Invariant("primitive element does not generate K ⊗ L".into()))?;
            Ok(Poly::new(c))
        };
        // α⊗1 is basis index n (α¹β⁰), 1⊗β is index 1
        let pa = solve_for(n)?;
        let pb = solve_for(1)?;
        let fac = factor_over_q(&cp);
        let mut factors: Vec<Poly<Rational>> = fac.factors.into_iter().map(|(f, _)| f).collect();
        factors.sort_by(|a, b| {
            a.degree()
                .cmp(&b.degree())
                .then_with(|| format!("{:?}", a.coeffs()).cmp(&format!("{:?}", b.coeffs())))
        });
        let h = factors.into_iter().next().unwrap();
        let field = NumberField::new(integral_monic(&h))?;
        // rescaling y ↦ c·y to make h integral changes the generator by c
        let c = integral_scale(&h);
        let y = NfElem::from_poly(&field, &Poly::x()).rscale(&Rational::new(BigInt::one(), c));
        let eval = |p: &Poly<Rational>| {
            let mut acc = NfElem::rzero();
            for a in p.coeffs().iter().rev() {
                acc = acc.rmul(&y).radd(&NfElem::rational(a.clone()));
            }
            acc
        };
        let (ia, ib) = (eval(&pa), eval(&pb));
        if !k.modulus().map(|r| NfElem::rational(r.clone())).eval(&ia).ris_zero() || !l.modulus().map(|r| NfElem::rational(r.clone())).eval(&ib).ris_zero() {
            return Err(Error::Invariant("compositum images do not satisfy the defining polynomials".into()));
        }
        return Ok(Compositum {
            field: Some(field),
            image_k: Some(ia),
            image_l: Some(ib),
        });
    }
    Err(Error::SearchBound("no primitive element α + tβ with t ≤ 64".into()))
}

/// Least positive integer c with c^deg·h(y/c) integral.
fn integral_scale(h: &Poly<Rational>) -> BigInt {
    let d = h.degree() as usize;
    let mut c = BigInt::one();
    loop {
        let ok = (0..d).all(|i| {
            let v = h.coeff(i) * rbig(c.pow((d - i) as u32));
            v.is_integer()
        });
        if ok {
            return c;
        }
        c += 1;
    }
}

fn integral_monic(h: &Poly<Rational>) -> Poly<Rational> {
    let d = h.degree() as usize;
    let c = integral_scale(h);
    Poly::new((0..=d).map(|i| h.coeff(i) * rbig(c.pow((d - i) as u32))).collect())
}

/// a_p(f) + p^{(k′−k)/2}·a_p(g) on the common primes, in the compositum.
pub fn lift_eigen_table(f: &EigenTable, g: &EigenTable, k_big: u32, k: u32) -> Result<EigenTable, Error> {
    if f.level != g.level {
        return Err(Error::Domain(format!("levels {} and {} differ", f.level, g.level)));
    }
    if k_big <= k || !(k_big - k).is_multiple_of(2) {
        return Err(Error::Domain(format!("need k′ > k and k′ ≡ k mod 2, got ({}, {})", k_big, k)));
    }
    let c = compositum(&f.field, &g.field)?;
    let e = (k_big - k) / 2;
    let mut entries = BTreeMap::new();
    for (p, a) in &f.entries {
        let Some(b) = g.entries.get(p) else { continue };
        let w = Rational::from_integer(BigInt::from(*p).pow(e));
        entries.insert(*p, c.map_k(a).radd(&c.map_l(b).rscale(&w)));
    }
    let weight = Weight::Siegel { j: k - 2, kappa: e + 2 };
    EigenTable::new(&format!("Y({}, {})", f.label, g.label), weight, f.level, c.field, entries)
}

/// Primitive integral minimal polynomial, positive leading coefficient.
pub fn integral_minpoly(a: &NfElem) -> Poly<Rational> {
    let cp = a.charpoly();
    let g = cp.gcd(&cp.derivative());
    let m = cp.exact_div(&g).expect("gcd divides").monic();
    let den = common_denominator(m.coeffs().iter());
    let ints: Vec<BigInt> = m.coeffs().iter().map(|c| (c * rbig(den.clone())).to_integer()).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    Poly::new(ints.into_iter().map(|x| rbig(x / &content)).collect())
}

/// |Res(m_a, m_b)| for primitive integral minimal polynomials; zero iff a and b are conjugate.
pub fn eigen_resultant(a: &NfElem, b: &NfElem) -> BigInt {
    let r = integral_minpoly(a).resultant(&integral_minpoly(b));
    debug_assert!(r.is_integer());
    r.to_integer().abs()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub ell: BigInt,
    /// Least ℓ-adic valuation over the nonzero resultants.
    pub min_exponent: u32,
    pub likely_noise: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceReport {
    pub labels: (String, String),
    pub probe_primes: Vec<u64>,
    pub resultants: Vec<(u64, BigInt)>,
    /// Every probe resultant vanished: the eigenvalues agree up to conjugacy.
    pub exact: bool,
    pub modulus: BigInt,
    pub candidates: Vec<Candidate>,
    pub method: String,
}

impl CongruenceReport {
    pub fn moduli(&self) -> Vec<BigInt> {
        self.candidates.iter().map(|c| c.ell.clone()).collect()
    }
}

pub fn scan(a: &EigenTable, b: &EigenTable, probe_primes: &[u64]) -> Result<CongruenceReport, Error> {
    scan_with_floor(a, b, probe_primes, DEFAULT_FLOOR)
}

pub fn scan_with_floor(a: &EigenTable, b: &EigenTable, probe_primes: &[u64], floor: u64) -> Result<CongruenceReport, Error> {
    if a.level != b.level {
        return Err(Error::Domain(format!("levels {} and {} differ", a.level, b.level)));
    }
    let mut probes: Vec<u64> = probe_primes
        .iter()
        .copied()
        .filter(|p| a.entries.contains_key(p) && b.entries.contains_key(p))
        .collect();
    probes.sort_unstable();
    probes.dedup();
    if probes.is_empty() {
        return Err(Error::Domain(format!("no probe prime has entries in both {} and {}", a.label, b.label)));
    }
    let resultants: Vec<(u64, BigInt)> = probes.par_iter().map(|p| (*p, eigen_resultant(&a.entries[p], &b.entries[p]))).collect();
    let modulus = resultants.iter().fold(BigInt::zero(), |acc, (_, r)| acc.gcd(r));
    let exact = modulus.is_zero();
    let mut candidates = Vec::new();
    if !exact {
        for (ell, _) in factor_integer(&modulus) {
            let min_exponent = resultants
                .iter()
                .filter(|(_, r)| !r.is_zero())
                .map(|(_, r)| {
                    let mut r = r.clone();
                    let mut v = 0;
                    while (&r % &ell).is_zero() {
                        r /= &ell;
                        v += 1;
                    }
                    v
                })
                .min()
                .unwrap_or(0);
            let likely_noise = ell.to_u64().map(|l| l <= floor).unwrap_or(false);
            candidates.push(Candidate {
                ell,
                min_exponent,
                likely_noise,
            });
        }
    }
    Ok(CongruenceReport {
        labels: (a.label.clone(), b.label.clone()),
        probe_primes: probes,
        resultants,
        exact,
        modulus,
        candidates,
        method: "resultant of primitive integral minimal polynomials".into(),
    })
}

/// Rational primes ℓ at which the target is congruent to some other member of the space.
///
/// For each other table the candidates are the primes dividing every probe
/// resultant; the result is their union. Members with the target's label are
/// skipped, and a member agreeing exactly with the target contributes nothing.
pub fn congruence_prime_detector(space: &[EigenTable], target: &EigenTable, probe_primes: &[u64]) -> Result<Vec<BigInt>, Error> {
    let mut out = std::collections::BTreeSet::new();
    for other in space {
        if other.label == target.label {
            continue;
        }
        let r = scan(target, other, probe_primes)?;
        out.extend(r.moduli());
    }
    Ok(out.into_iter().collect())
}
