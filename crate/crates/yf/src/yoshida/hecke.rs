//! The degree-p Hecke operator T(p) on truncated expansions.
//!
//! Left cosets of Γ diag(1,1,p,p) Γ are represented by M = [[A, B], [0, D]]
//! with AᵗD = pI, in four families:
//!
//! | D               | A                | B                      | count |
//! |-----------------|------------------|------------------------|-------|
//! | I               | pI               | 0                      | 1     |
//! | pI              | I                | symmetric mod p        | p³    |
//! | [[1, b], [0, p]] | [[p, 0], [−b, 1]] | [[0, 0], [0, w]], w mod p | p²    |
//! | [[p, 0], [0, 1]] | [[1, 0], [0, p]]  | [[x, 0], [0, 0]], x mod p | p     |
//!
//! With F|M(Z) = p^{2κ+j−3} ρ(D)⁻¹ F((AZ + B)D⁻¹) and ρ(D) acting on binary
//! forms by det(D)^{κ+j}·P(X·D⁻¹) the coefficient of F|T(p) at T′ is
//!
//!   b(T′) = p^{2κ+j−3} Σ_M e(tr(T B D⁻¹)) det(D)^{−κ−j} a(T)(X·D),  T = D T′ Dᵗ / p,
//!
//! where a(T) = 0 unless T is half-integral. For j = 0 this collapses to
//! a(pT′) + p^{κ−2} Σ_D a(D T′ Dᵗ / p) + p^{2κ−3} a(T′/p).

use std::collections::BTreeMap;

use crate::exact_core::rational::{ri, rpow, Rational};
use crate::exact_core::{Field, NfElem, Ring};
use crate::Error;

use super::forms::{self, Form, Mat2};
use super::table::SiegelCoeffTable;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeCoset {
    pub a: Mat2,
    pub b: Mat2,
    pub d: Mat2,
}

impl HeckeCoset {
    /// The 4×4 integer matrix [[A, B], [0, D]].
    pub fn matrix(&self) -> [[i64; 4]; 4] {
        let mut m = [[0i64; 4]; 4];
        for r in 0..2 {
            for c in 0..2 {
                m[r][c] = self.a[r][c];
                m[r][c + 2] = self.b[r][c];
                m[r + 2][c + 2] = self.d[r][c];
            }
        }
        m
    }
}

/// The p³ + p² + p + 1 left coset representatives of degree p.
pub fn hecke_cosets(p: u64) -> Vec<HeckeCoset> {
    let p = p as i64;
    let mut out = vec![HeckeCoset {
        a: [[p, 0], [0, p]],
        b: [[0, 0], [0, 0]],
        d: forms::IDENTITY,
    }];
    for x in 0..p {
        for y in 0..p {
            for z in 0..p {
                out.push(HeckeCoset {
                    a: forms::IDENTITY,
                    b: [[x, y], [y, z]],
                    d: [[p, 0], [0, p]],
                });
            }
        }
    }
    for b in 0..p {
        for w in 0..p {
            out.push(HeckeCoset {
                a: [[p, 0], [-b, 1]],
                b: [[0, 0], [0, w]],
                d: [[1, b], [0, p]],
            });
        }
    }
    for x in 0..p {
        out.push(HeckeCoset {
            a: [[1, 0], [0, p]],
            b: [[x, 0], [0, 0]],
            d: [[p, 0], [0, 1]],
        });
    }
    out
}

/// D T′ Dᵗ / p, or None when it is not half-integral.
fn pulled_back(t: &Form, d: &Mat2, p: i64) -> Option<Form> {
    let u = forms::transform(t, &forms::transpose(d));
    if u.iter().all(|x| x % p == 0) {
        Some([u[0] / p, u[1] / p, u[2] / p])
    } else {
        None
    }
}

/// p·tr(T B D⁻¹) mod p; the trace always has denominator dividing p on these cosets.
fn phase(t: &Form, c: &HeckeCoset, p: i64) -> Result<i64, Error> {
    let dd = forms::det(&c.d);
    let adj: Mat2 = [[c.d[1][1], -c.d[0][1]], [-c.d[1][0], c.d[0][0]]];
    let m = forms::mat_mul(&c.b, &adj);
    // 2·tr(T·m) with T = [[a, b/2], [b/2, c]]
    let twice = 2 * t[0] * m[0][0] + t[1] * (m[0][1] + m[1][0]) + 2 * t[2] * m[1][1];
    let tr = Rational::new(twice.into(), (2 * dd).into());
    let scaled = tr * ri(p);
    if !scaled.is_integer() {
        return Err(Error::Invariant(format!("character of coset {:?} at {:?} is not a p-th root of unity", c, t)));
    }
    let s: i64 = scaled.to_integer().try_into().unwrap();
    Ok(s.rem_euclid(p))
}

/// The coefficient of F|T(p) at T′.
pub fn hecke_coefficient(f: &SiegelCoeffTable, p: u64, t: &Form, cosets: &[HeckeCoset]) -> Result<Vec<NfElem>, Error> {
    let pi = p as i64;
    let e = f.det_exponent() as i64;
    let jl = f.j as usize + 1;
    // Σ over cosets grouped by the residue r of the character e(r/p)
    let mut by_res: BTreeMap<i64, Vec<NfElem>> = BTreeMap::new();
    for c in cosets {
        let Some(tt) = pulled_back(t, &c.d, pi) else { continue };
        if !forms::is_psd(&tt) {
            continue;
        }
        let Some(a) = f.lookup(&tt)? else {
            return Err(Error::Truncation(format!(
                "T(p) at {:?} needs the coefficient at {:?}, beyond trace {}",
                t, tt, f.bound
            )));
        };
        if a.iter().all(|x| x.ris_zero()) {
            continue;
        }
        let r = phase(&tt, c, pi)?;
        let w = rpow(&ri(forms::det(&c.d)), -e);
        let term = forms::twist(&a, &c.d, 0);
        let slot = by_res.entry(r).or_insert_with(|| vec![NfElem::rzero(); jl]);
        for k in 0..jl {
            slot[k] = slot[k].radd(&term[k].rscale(&w));
        }
    }
    // Σ_r ζ^r V_r is rational only when V_1 = … = V_{p−1}; it equals V_0 − V_1
    let zero = vec![NfElem::rzero(); jl];
    let v0 = by_res.get(&0).unwrap_or(&zero).clone();
    let v1 = by_res.get(&1).unwrap_or(&zero).clone();
    for r in 2..pi {
        if by_res.get(&r).unwrap_or(&zero) != &v1 {
            return Err(Error::Invariant(format!("character sum at {:?} is not rational", t)));
        }
    }
    let scale = rpow(&ri(pi), 2 * f.kappa as i64 + f.j as i64 - 3);
    Ok(v0.iter().zip(&v1).map(|(x, y)| x.rsub(y).rscale(&scale)).collect())
}

/// F|T(p) on all reduced T′ with trace at most `out_bound`.
#[allow(non_snake_case)]
pub fn apply_T_p(f: &SiegelCoeffTable, p: u64, out_bound: i64) -> Result<SiegelCoeffTable, Error> {
    if p == 1 {
        return Ok(f.restrict(out_bound));
    }
    if !crate::exact_core::rational::is_prime_u64(p) {
        return Err(Error::Domain(format!("T(p) needs a prime, got {}", p)));
    }
    if f.level.is_multiple_of(p) {
        return Err(Error::Domain(format!("p = {} divides the level {}", p, f.level)));
    }
    if out_bound > f.bound {
        return Err(Error::Truncation(format!("output bound {} exceeds the input bound {}", out_bound, f.bound)));
    }
    let cosets = hecke_cosets(p);
    let mut out = SiegelCoeffTable::new(f.j, f.kappa, f.level, out_bound);
    out.scale = f.scale.clone();
    out.scale_root = f.scale_root.clone();
    for t in forms::reduced_forms(out_bound) {
        out.coeffs.insert(t, hecke_coefficient(f, p, &t, &cosets)?);
    }
    Ok(out)
}

/// F|T(p) = μF on the keys that were checked.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenCertificate {
    pub p: u64,
    pub eigenvalue: NfElem,
    pub checked: Vec<Form>,
}

/// The largest output trace for which every coefficient of F|T(p) is available.
pub fn max_output_bound(f: &SiegelCoeffTable, p: u64) -> i64 {
    let mut b = 0;
    let cosets = hecke_cosets(p);
    'outer: for out in 0..=f.bound {
        for t in forms::reduced_forms(out) {
            if hecke_coefficient(f, p, &t, &cosets).is_err() {
                break 'outer;
            }
        }
        b = out;
    }
    b
}

/// Certifies F|T(p) = μF on every reduced key of trace at most `out_bound`.
pub fn verify_eigen(f: &SiegelCoeffTable, p: u64, out_bound: i64) -> Result<EigenCertificate, Error> {
    let img = apply_T_p(f, p, out_bound)?;
    let mut mu: Option<NfElem> = None;
    for (t, v) in &img.coeffs {
        let base = f.coeffs.get(t).cloned().unwrap_or_else(|| f.zero_form());
        for (x, y) in v.iter().zip(&base) {
            if y.ris_zero() {
                if !x.ris_zero() {
                    return Err(Error::NotEigenform(format!("F|T({}) is nonzero at {:?} where F vanishes", p, t)));
                }
                continue;
            }
            let r = x.rdiv(y).unwrap();
            match &mu {
                None => mu = Some(r),
                Some(m) if *m != r => {
                    return Err(Error::NotEigenform(format!("ratios {:?} and {:?} differ at {:?}", m, r, t)));
                }
                _ => {}
            }
        }
    }
    let Some(eigenvalue) = mu else {
        return Err(Error::NotEigenform(format!("F vanishes on every key of trace at most {}", out_bound)));
    };
    Ok(EigenCertificate {
        p,
        eigenvalue,
        checked: img.coeffs.keys().copied().collect(),
    })
}
