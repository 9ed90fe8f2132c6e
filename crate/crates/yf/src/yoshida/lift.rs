//! Fourier coefficients of the Yoshida lift from pair theta series.
//!
//! A(F, T) = ½ Σ_{i,j} (e_i e_j)⁻¹ n_ij^{−ν₁} Σ_{x ∈ Λ_ij², q(x) = n_ij·T}
//!     [𝒫(φ₁(i)⊗φ₂(j))(x) + 𝒫(φ₁(j)⊗φ₂(i))(x̄)]
//! with Λ_ij = conj(I_j : I_i), n_ij = N(I_i)/N(I_j) and q(x) the Gram matrix of
//! the norm form. The two halves agree term by term after reindexing (i, j),
//! which is checked rather than assumed.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::brandt::AutomorphicVector;
use crate::exact_core::multipoly::Exponent;
use crate::exact_core::rational::{ri, rpow, Rational};
use crate::exact_core::{MultiPoly, NfElem, Ring};
use crate::harmonics::harmonic_space;
use crate::quatlat::algebra::{qconj, Quat, QuaternionAlgebra};
use crate::quatlat::classes::IdealClassSet;
use crate::quatlat::order::norm_gram;
use crate::quatlat::short::IntForm;
use crate::Error;

use super::forms::{self, Form};
use super::pmap::{binary_coeffs, p_map_at};
use super::table::SiegelCoeffTable;

type IQuat = [i128; 4];

/// Product in the algebra with i² = −a, j² = −b on integer coordinates.
pub(crate) fn qmul_i128(a: i128, b: i128, x: &IQuat, y: &IQuat) -> IQuat {
    [
        x[0] * y[0] - a * x[1] * y[1] - b * x[2] * y[2] - a * b * x[3] * y[3],
        x[0] * y[1] + x[1] * y[0] + b * (x[2] * y[3] - x[3] * y[2]),
        x[0] * y[2] + x[2] * y[0] + a * (x[3] * y[1] - x[1] * y[3]),
        x[0] * y[3] + x[3] * y[0] + x[1] * y[2] - x[2] * y[1],
    ]
}

fn iconj(x: &IQuat) -> IQuat {
    [x[0], -x[1], -x[2], -x[3]]
}

struct PairData {
    i: usize,
    j: usize,
    /// n_ij = num/den
    num: i128,
    den: i128,
    /// common denominator L of Λ_ij; vectors are stored as L·x
    lden: i128,
    weight: Rational,
    by_norm: BTreeMap<i64, Vec<IQuat>>,
}

/// Precomputed pair lattices and class values for one lift.
pub struct YoshidaLift {
    alg: QuaternionAlgebra,
    level: u64,
    nu1: u32,
    nu2: u32,
    phi1: Vec<MultiPoly<NfElem>>,
    phi2: Vec<MultiPoly<NfElem>>,
    pairs: Vec<PairData>,
    max_diag: i64,
    generic: bool,
}

/// Direct and conjugated halves of the coefficient formula.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftTerms {
    pub direct: SiegelCoeffTable,
    pub swapped: SiegelCoeffTable,
}

impl LiftTerms {
    pub fn symmetric(&self) -> bool {
        self.direct.coeffs == self.swapped.coeffs
    }
}

impl YoshidaLift {
    /// `max_diag` bounds the diagonal entries a, c of the coefficients asked for.
    pub fn new(cs: &IdealClassSet, phi1: &AutomorphicVector<NfElem>, phi2: &AutomorphicVector<NfElem>, max_diag: i64) -> Result<Self, Error> {
        let (phi1, phi2) = if phi1.nu >= phi2.nu { (phi1, phi2) } else { (phi2, phi1) };
        let h = cs.h();
        if phi1.values.len() != h || phi2.values.len() != h {
            return Err(Error::Domain(format!(
                "class-set mismatch: vectors have {} and {} values, class number {}",
                phi1.values.len(),
                phi2.values.len(),
                h
            )));
        }
        let alg = cs.algebra().clone();
        let polys = |phi: &AutomorphicVector<NfElem>| -> Result<Vec<MultiPoly<NfElem>>, Error> {
            let sp = harmonic_space(&alg, phi.nu)?;
            phi.values
                .iter()
                .map(|v| {
                    if v.len() != sp.dim() {
                        return Err(Error::Domain(format!(
                            "value has {} coordinates, U_{} has dimension {}",
                            v.len(),
                            phi.nu,
                            sp.dim()
                        )));
                    }
                    Ok(sp.from_coords(v))
                })
                .collect()
        };
        let p1 = polys(phi1)?;
        let p2 = polys(phi2)?;
        let nu1 = phi1.nu;

        let pairs: Vec<PairData> = (0..h)
            .flat_map(|i| (0..h).map(move |j| (i, j)))
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(i, j)| pair_data(cs, i, j, nu1, max_diag))
            .collect::<Result<_, _>>()?;

        Ok(YoshidaLift {
            alg,
            level: cs.order.level(),
            nu1,
            nu2: phi2.nu,
            phi1: p1,
            phi2: p2,
            pairs,
            max_diag,
            generic: phi2.nu > 0,
        })
    }

    /// Evaluates every term through the symbolic map 𝒫 instead of the
    /// moment sums used when ν₂ = 0.
    pub fn force_generic(mut self) -> Self {
        self.generic = true;
        self
    }

    pub fn j(&self) -> u32 {
        2 * self.nu2
    }

    pub fn kappa(&self) -> u32 {
        self.nu1 - self.nu2 + 2
    }

    fn empty_table(&self, bound: i64) -> SiegelCoeffTable {
        SiegelCoeffTable::new(self.j(), self.kappa(), self.level, bound)
    }

    /// Both halves for all b in `bs` at fixed diagonal (a, c).
    fn accumulate(&self, a: i64, c: i64, bs: &[i64]) -> Result<BTreeMap<i64, (Vec<NfElem>, Vec<NfElem>)>, Error> {
        if a > self.max_diag || c > self.max_diag || a < 0 || c < 0 {
            return Err(Error::Truncation(format!(
                "diagonal ({}, {}) exceeds the enumerated norms {}",
                a, c, self.max_diag
            )));
        }
        let want: BTreeSet<i64> = bs.iter().copied().collect();
        let jl = self.j() as usize + 1;
        let mut out: BTreeMap<i64, (Vec<NfElem>, Vec<NfElem>)> = want.iter().map(|&b| (b, (vec![NfElem::rzero(); jl], vec![NfElem::rzero(); jl]))).collect();
        let w = [1i128, self.alg.a as i128, self.alg.b as i128, (self.alg.a * self.alg.b) as i128];
        let (aa, bb) = (self.alg.a as i128, self.alg.b as i128);
        let exps: Vec<Exponent> = crate::exact_core::multipoly::exponents_of_degree(3, self.nu1);

        for pd in &self.pairs {
            let empty = Vec::new();
            let zero = vec![[0i128; 4]];
            let v1 = if a == 0 { &zero } else { pd.by_norm.get(&a).unwrap_or(&empty) };
            let v2 = if c == 0 { &zero } else { pd.by_norm.get(&c).unwrap_or(&empty) };
            let l2 = pd.lden * pd.lden;
            let unit = pd.num * l2;
            // moment sums Σ z^e for the direct and conjugated halves, per b
            let mut moments: BTreeMap<i64, (Vec<i128>, Vec<i128>)> = BTreeMap::new();
            let mut matches: BTreeMap<i64, Vec<(IQuat, IQuat)>> = BTreeMap::new();
            for x1 in v1 {
                for x2 in v2 {
                    let bil: i128 = (0..4).map(|t| w[t] * x1[t] * x2[t]).sum();
                    let bx = 2 * bil * pd.den;
                    if bx % unit != 0 {
                        continue;
                    }
                    let b = (bx / unit) as i64;
                    if !want.contains(&b) {
                        continue;
                    }
                    if self.generic {
                        matches.entry(b).or_default().push((*x1, *x2));
                        continue;
                    }
                    let zd = qmul_i128(aa, bb, x1, &iconj(x2));
                    let zs = qmul_i128(aa, bb, &iconj(x1), x2);
                    let m = moments.entry(b).or_insert_with(|| (vec![0; exps.len()], vec![0; exps.len()]));
                    for (k, e) in exps.iter().enumerate() {
                        m.0[k] = m.0[k].checked_add(monomial(&zd, e)?).ok_or_else(overflow)?;
                        m.1[k] = m.1[k].checked_add(monomial(&zs, e)?).ok_or_else(overflow)?;
                    }
                }
            }
            for (b, (md, ms)) in moments {
                // z = 2·pure(x₁x̄₂) = (2/L²)·pure(X₁X̄₂)
                let f = rpow(&Rational::new(2.into(), l2.into()), self.nu1 as i64) * &pd.weight;
                let r2d = self.phi2[pd.j].coeff(&[0, 0, 0]);
                let r2s = self.phi2[pd.i].coeff(&[0, 0, 0]);
                let mut sd = NfElem::rzero();
                let mut ss = NfElem::rzero();
                for (k, e) in exps.iter().enumerate() {
                    let cd = self.phi1[pd.i].coeff(e);
                    let cs = self.phi1[pd.j].coeff(e);
                    if md[k] != 0 {
                        sd = sd.radd(&cd.rscale(&Rational::from_integer(md[k].into())));
                    }
                    if ms[k] != 0 {
                        ss = ss.radd(&cs.rscale(&Rational::from_integer(ms[k].into())));
                    }
                }
                let slot = out.get_mut(&b).unwrap();
                slot.0[0] = slot.0[0].radd(&sd.rmul(&r2d).rscale(&f));
                slot.1[0] = slot.1[0].radd(&ss.rmul(&r2s).rscale(&f));
            }
            for (b, list) in matches {
                let lr = Rational::new(1.into(), pd.lden.into());
                let toq = |x: &IQuat| -> Quat { [0, 1, 2, 3].map(|t| Rational::from_integer(x[t].into()) * &lr) };
                let slot = out.get_mut(&b).unwrap();
                for (x1, x2) in list {
                    let (q1, q2) = (toq(&x1), toq(&x2));
                    let d = p_map_at(&self.alg, &self.phi1[pd.i], &self.phi2[pd.j], &q1, &q2);
                    let s = p_map_at(&self.alg, &self.phi1[pd.j], &self.phi2[pd.i], &qconj(&q1), &qconj(&q2));
                    let dc = binary_coeffs(&d, self.j())?;
                    let sc = binary_coeffs(&s, self.j())?;
                    for k in 0..jl {
                        slot.0[k] = slot.0[k].radd(&dc[k].rscale(&pd.weight));
                        slot.1[k] = slot.1[k].radd(&sc[k].rscale(&pd.weight));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Direct and conjugated halves at an arbitrary positive semidefinite T.
    pub fn coefficient_terms(&self, t: &Form) -> Result<(Vec<NfElem>, Vec<NfElem>), Error> {
        if !forms::is_psd(t) {
            return Err(Error::Domain(format!("form {:?} is not positive semidefinite", t)));
        }
        let mut m = self.accumulate(t[0], t[2], &[t[1]])?;
        Ok(m.remove(&t[1]).unwrap())
    }

    /// A(F, T) at an arbitrary positive semidefinite T, by direct enumeration.
    pub fn coefficient(&self, t: &Form) -> Result<Vec<NfElem>, Error> {
        let (d, s) = self.coefficient_terms(t)?;
        Ok(average(&d, &s))
    }

    pub fn terms(&self, bound: i64) -> Result<LiftTerms, Error> {
        if bound > self.max_diag {
            return Err(Error::Truncation(format!("bound {} exceeds the enumerated norms {}", bound, self.max_diag)));
        }
        let mut groups: BTreeMap<(i64, i64), Vec<i64>> = BTreeMap::new();
        for t in forms::reduced_forms(bound) {
            groups.entry((t[0], t[2])).or_default().push(t[1]);
        }
        let groups: Vec<_> = groups.into_iter().collect();
        let parts: Vec<Vec<(Form, (Vec<NfElem>, Vec<NfElem>))>> = groups
            .par_iter()
            .map(|((a, c), bs)| Ok(self.accumulate(*a, *c, bs)?.into_iter().map(|(b, v)| ([*a, b, *c], v)).collect()))
            .collect::<Result<_, Error>>()?;
        let mut direct = self.empty_table(bound);
        let mut swapped = self.empty_table(bound);
        for (t, (d, s)) in parts.into_iter().flatten() {
            direct.coeffs.insert(t, d);
            swapped.coeffs.insert(t, s);
        }
        Ok(LiftTerms { direct, swapped })
    }

    pub fn table(&self, bound: i64) -> Result<SiegelCoeffTable, Error> {
        let t = self.terms(bound)?;
        let mut out = t.direct.clone();
        for (k, v) in out.coeffs.iter_mut() {
            *v = average(v, &t.swapped.coeffs[k]);
        }
        Ok(out)
    }
}

fn average(d: &[NfElem], s: &[NfElem]) -> Vec<NfElem> {
    let half = Rational::new(1.into(), 2.into());
    d.iter().zip(s).map(|(x, y)| x.radd(y).rscale(&half)).collect()
}

fn overflow() -> Error {
    Error::Invariant("moment sum overflows i128".into())
}

fn monomial(z: &IQuat, e: &[u16]) -> Result<i128, Error> {
    let mut acc: i128 = 1;
    for v in 0..3 {
        for _ in 0..e[v] {
            acc = acc.checked_mul(z[v + 1]).ok_or_else(overflow)?;
        }
    }
    Ok(acc)
}

fn pair_data(cs: &IdealClassSet, i: usize, j: usize, nu1: u32, max_diag: i64) -> Result<PairData, Error> {
    let alg = cs.algebra();
    let (lat, nij) = cs.pair_lattice(i, j);
    let form = IntForm::new(&norm_gram(alg, &lat))?;
    let vecs = form.enumerate_up_to(&(ri(max_diag) * &nij));
    let lden = lat.denominator();
    let lr = Rational::from_integer(lden.clone());
    let basis: Vec<IQuat> = lat
        .basis()
        .iter()
        .map(|row| [0, 1, 2, 3].map(|t| (&row[t] * &lr).to_integer().to_i128().expect("scaled basis fits i128")))
        .collect();
    let scale_nij = Rational::from_integer(form.scale.into()) * &nij;
    let mut by_norm: BTreeMap<i64, Vec<IQuat>> = BTreeMap::new();
    for (c, v) in vecs {
        if v == 0 {
            continue;
        }
        let m = Rational::from_integer(v.into()) / &scale_nij;
        if !m.is_integer() {
            return Err(Error::Invariant(format!("norm {} in Λ_{}{} is not a multiple of n_ij", v, i, j)));
        }
        let mut x = [0i128; 4];
        for (t, &ct) in c.iter().enumerate() {
            for u in 0..4 {
                x[u] += ct as i128 * basis[t][u];
            }
        }
        by_norm.entry(m.to_integer().to_i64().unwrap()).or_default().push(x);
    }
    let e = Rational::from_integer(((cs.unit_counts[i] * cs.unit_counts[j]) as i64).into());
    let weight = rpow(&nij, -(nu1 as i64)) / e;
    Ok(PairData {
        i,
        j,
        num: nij.numer().to_i128().unwrap(),
        den: nij.denom().to_i128().unwrap(),
        lden: lden.to_i128().unwrap(),
        weight,
        by_norm,
    })
}

/// Y⁽²⁾(φ₁, φ₂) on all reduced T with trace at most `bound`.
pub fn yoshida_lift(cs: &IdealClassSet, phi1: &AutomorphicVector<NfElem>, phi2: &AutomorphicVector<NfElem>, bound: i64) -> Result<SiegelCoeffTable, Error> {
    YoshidaLift::new(cs, phi1, phi2, bound)?.table(bound)
}
