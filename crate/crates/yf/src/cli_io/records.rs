//! JSON records. Every integer is a decimal string and every rational "p/q" or "p".
//!
//! A record owns at most one number field; each element in it is a coordinate list
//! of length deg K in the power basis (length 1 over ℚ).

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::brandt::{BrandtMatrix, EigenSystem};
use crate::congruence::{Candidate, CongruenceReport, EigenTable, Weight};
use crate::exact_core::rational::Rational;
use crate::exact_core::{MultiPoly, NfElem, NumberField, Poly, SymbolicConstant};
use crate::quatlat::IdealClassSet;
use crate::waldspurger::{AveragedCoefficient, FactorizationReport, HalfIntegralQExpansion};
use crate::yoshida::{EigenCertificate, SiegelCoeffTable};
use crate::Error;

pub fn s<T: ToString>(x: T) -> String {
    x.to_string()
}

fn bad(what: &str, v: &str) -> Error {
    Error::Format(format!("cannot parse {} from '{}'", what, v))
}

pub fn parse_int<T: FromStr>(v: &str) -> Result<T, Error> {
    v.parse().map_err(|_| bad("an integer", v))
}

pub fn parse_big(v: &str) -> Result<BigInt, Error> {
    BigInt::from_str(v).map_err(|_| bad("an integer", v))
}

pub fn parse_rat(v: &str) -> Result<Rational, Error> {
    Rational::from_str(v).map_err(|_| bad("a rational", v))
}

fn rats(v: &[String]) -> Result<Vec<Rational>, Error> {
    v.iter().map(|x| parse_rat(x)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldRec {
    pub minpoly: Vec<String>,
}

pub fn field_rec(k: &Option<Arc<NumberField>>) -> Option<FieldRec> {
    k.as_ref().map(|k| FieldRec {
        minpoly: k.modulus().coeffs().iter().map(s).collect(),
    })
}

pub fn field_of(r: &Option<FieldRec>) -> Result<Option<Arc<NumberField>>, Error> {
    match r {
        None => Ok(None),
        Some(f) => Ok(Some(NumberField::new(Poly::new(rats(&f.minpoly)?))?)),
    }
}

pub fn coords(x: &NfElem, k: &Option<Arc<NumberField>>) -> Vec<String> {
    let deg = k.as_ref().map(|k| k.degree()).unwrap_or(1);
    let mut c = x.coords();
    c.resize(deg, Rational::from_integer(0.into()));
    c.iter().map(s).collect()
}

pub fn elem(v: &[String], k: &Option<Arc<NumberField>>) -> Result<NfElem, Error> {
    let c = rats(v)?;
    match k {
        None => {
            if c.len() != 1 {
                return Err(Error::Format(format!("rational element needs one coordinate, got {}", c.len())));
            }
            Ok(NfElem::rational(c[0].clone()))
        }
        Some(k) => {
            if c.len() != k.degree() {
                return Err(Error::Format(format!("element needs {} coordinates, got {}", k.degree(), c.len())));
            }
            Ok(NfElem::from_coords(k, c))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymRec {
    pub coefficient: Vec<String>,
    pub pi_power: String,
    pub i_power: String,
    pub sqrt_part: String,
    pub display: String,
}

pub fn sym_rec(x: &SymbolicConstant, k: &Option<Arc<NumberField>>) -> SymRec {
    SymRec {
        coefficient: coords(&x.coefficient, k),
        pi_power: s(x.pi_power),
        i_power: s(x.i_power),
        sqrt_part: s(&x.sqrt_part),
        display: s(x),
    }
}

pub fn sym_of(r: &SymRec, k: &Option<Arc<NumberField>>) -> Result<SymbolicConstant, Error> {
    let i: i64 = parse_int(&r.i_power)?;
    SymbolicConstant::new(elem(&r.coefficient, k)?, parse_int(&r.pi_power)?, i, parse_big(&r.sqrt_part)?)
}

fn rat_matrix(m: &[Vec<Rational>]) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(s).collect()).collect()
}

fn rat_matrix_of(m: &[Vec<String>]) -> Result<Vec<Vec<Rational>>, Error> {
    m.iter().map(|r| rats(r)).collect()
}

// ---------- class set ----------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSetRec {
    pub n1: String,
    pub n2: String,
    /// i² = −a, j² = −b
    pub a: String,
    pub b: String,
    pub ramified_primes: Vec<String>,
    pub order_basis: Vec<Vec<String>>,
    pub h: String,
    pub mass: String,
    pub unit_counts: Vec<String>,
    pub ideal_norms: Vec<String>,
    pub ideals: Vec<Vec<Vec<String>>>,
    pub right_orders: Vec<Vec<Vec<String>>>,
}

pub fn class_set_rec(cs: &IdealClassSet) -> ClassSetRec {
    let alg = cs.algebra();
    ClassSetRec {
        n1: s(cs.order.n1),
        n2: s(cs.order.n2),
        a: s(alg.a),
        b: s(alg.b),
        ramified_primes: alg.ramified_primes.iter().map(s).collect(),
        order_basis: rat_matrix(cs.order.lattice.basis()),
        h: s(cs.h()),
        mass: s(cs.mass()),
        unit_counts: cs.unit_counts.iter().map(s).collect(),
        ideal_norms: cs.ideal_norms.iter().map(s).collect(),
        ideals: cs.ideals.iter().map(|l| rat_matrix(l.basis())).collect(),
        right_orders: cs.right_orders.iter().map(|l| rat_matrix(l.basis())).collect(),
    }
}

// ---------- Brandt matrices ----------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixRec {
    pub p: String,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrandtRec {
    pub level: String,
    pub nu: String,
    pub h: String,
    pub harmonic_dim: String,
    pub matrices: Vec<MatrixRec>,
}

pub fn brandt_rec(level: u64, nu: u32, ms: &[BrandtMatrix]) -> BrandtRec {
    BrandtRec {
        level: s(level),
        nu: s(nu),
        h: s(ms.first().map(|m| m.h).unwrap_or(0)),
        harmonic_dim: s(ms.first().map(|m| m.d).unwrap_or(0)),
        matrices: ms
            .iter()
            .map(|m| MatrixRec {
                p: s(m.p),
                rows: rat_matrix(&m.matrix),
            })
            .collect(),
    }
}

pub fn brandt_of(r: &BrandtRec) -> Result<Vec<BrandtMatrix>, Error> {
    let (nu, h, d) = (parse_int(&r.nu)?, parse_int(&r.h)?, parse_int(&r.harmonic_dim)?);
    r.matrices
        .iter()
        .map(|m| {
            Ok(BrandtMatrix {
                p: parse_int(&m.p)?,
                nu,
                h,
                d,
                matrix: rat_matrix_of(&m.rows)?,
            })
        })
        .collect()
}

// ---------- eigensystems and eigen tables ----------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryRec {
    pub p: String,
    pub coords: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyRec {
    pub p: String,
    pub coeffs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenSystemRec {
    pub label: String,
    pub nu: String,
    pub level: String,
    pub field: Option<FieldRec>,
    pub minpoly: Vec<String>,
    pub generator_prime: String,
    pub dim: String,
    pub multiplicity_one: bool,
    pub irreducibility_certified: bool,
    pub eigenvalues: Vec<EntryRec>,
    pub charpolys: Vec<PolyRec>,
    pub vector: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenRec {
    pub level: String,
    pub nu: String,
    pub systems: Vec<EigenSystemRec>,
}

pub fn eigen_system_rec(e: &EigenSystem, level: u64) -> EigenSystemRec {
    let k = &e.field;
    EigenSystemRec {
        label: e.label.clone(),
        nu: s(e.nu),
        level: s(level),
        field: field_rec(k),
        minpoly: e.minpoly.coeffs().iter().map(s).collect(),
        generator_prime: s(e.generator_prime),
        dim: s(e.dim),
        multiplicity_one: e.multiplicity_one,
        irreducibility_certified: e.irreducibility_certified,
        eigenvalues: e.eigenvalues.iter().map(|(p, a)| EntryRec { p: s(p), coords: coords(a, k) }).collect(),
        charpolys: e
            .charpolys
            .iter()
            .map(|(p, c)| PolyRec {
                p: s(p),
                coeffs: c.coeffs().iter().map(s).collect(),
            })
            .collect(),
        vector: e.vector.iter().map(|x| coords(x, k)).collect(),
    }
}

pub fn eigen_system_of(r: &EigenSystemRec) -> Result<EigenSystem, Error> {
    let k = field_of(&r.field)?;
    let mut eigenvalues = BTreeMap::new();
    for e in &r.eigenvalues {
        eigenvalues.insert(parse_int(&e.p)?, elem(&e.coords, &k)?);
    }
    let mut charpolys = BTreeMap::new();
    for c in &r.charpolys {
        charpolys.insert(parse_int(&c.p)?, Poly::new(rats(&c.coeffs)?));
    }
    Ok(EigenSystem {
        label: r.label.clone(),
        nu: parse_int(&r.nu)?,
        minpoly: Poly::new(rats(&r.minpoly)?),
        generator_prime: parse_int(&r.generator_prime)?,
        field: k.clone(),
        eigenvalues,
        charpolys,
        dim: parse_int(&r.dim)?,
        multiplicity_one: r.multiplicity_one,
        irreducibility_certified: r.irreducibility_certified,
        vector: r.vector.iter().map(|x| elem(x, &k)).collect::<Result<_, _>>()?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightRec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenTableRec {
    pub label: String,
    pub level: String,
    pub weight: WeightRec,
    pub field: Option<FieldRec>,
    pub entries: Vec<EntryRec>,
}

pub fn eigen_table_rec(t: &EigenTable) -> EigenTableRec {
    let weight = match t.weight {
        Weight::Elliptic(k) => WeightRec {
            k: Some(s(k)),
            j: None,
            kappa: None,
        },
        Weight::Siegel { j, kappa } => WeightRec {
            k: None,
            j: Some(s(j)),
            kappa: Some(s(kappa)),
        },
    };
    EigenTableRec {
        label: t.label.clone(),
        level: s(t.level),
        weight,
        field: field_rec(&t.field),
        entries: t
            .entries
            .iter()
            .map(|(p, a)| EntryRec {
                p: s(p),
                coords: coords(a, &t.field),
            })
            .collect(),
    }
}

pub fn eigen_table_of(r: &EigenTableRec) -> Result<EigenTable, Error> {
    let weight = match (&r.weight.k, &r.weight.j, &r.weight.kappa) {
        (Some(k), None, None) => Weight::Elliptic(parse_int(k)?),
        (None, Some(j), Some(kappa)) => Weight::Siegel {
            j: parse_int(j)?,
            kappa: parse_int(kappa)?,
        },
        _ => return Err(Error::Format("weight needs either k or both j and kappa".into())),
    };
    let k = field_of(&r.field)?;
    let mut entries = BTreeMap::new();
    for e in &r.entries {
        entries.insert(parse_int(&e.p)?, elem(&e.coords, &k)?);
    }
    EigenTable::new(&r.label, weight, parse_int(&r.level)?, k, entries)
}

// ---------- Siegel tables and lift data ----------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffRec {
    /// (a, b, c) for ax² + bxy + cy²
    pub t: Vec<String>,
    pub value: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiegelRec {
    pub j: String,
    pub kappa: String,
    pub level: String,
    pub bound: String,
    pub field: Option<FieldRec>,
    pub scale: SymRec,
    pub scale_root: Vec<String>,
    pub coeffs: Vec<CoeffRec>,
}

/// The field of a table: the first non-rational element met, if any.
pub fn table_field(f: &SiegelCoeffTable) -> Option<Arc<NumberField>> {
    std::iter::once(&f.scale.coefficient)
        .chain(std::iter::once(&f.scale_root))
        .chain(f.coeffs.values().flatten())
        .find_map(|x| x.field().cloned())
}

pub fn siegel_rec(f: &SiegelCoeffTable) -> SiegelRec {
    let k = table_field(f);
    SiegelRec {
        j: s(f.j),
        kappa: s(f.kappa),
        level: s(f.level),
        bound: s(f.bound),
        field: field_rec(&k),
        scale: sym_rec(&f.scale, &k),
        scale_root: coords(&f.scale_root, &k),
        coeffs: f
            .coeffs
            .iter()
            .map(|(t, v)| CoeffRec {
                t: t.iter().map(s).collect(),
                value: v.iter().map(|x| coords(x, &k)).collect(),
            })
            .collect(),
    }
}

pub fn siegel_of(r: &SiegelRec) -> Result<SiegelCoeffTable, Error> {
    let k = field_of(&r.field)?;
    let mut f = SiegelCoeffTable::new(parse_int(&r.j)?, parse_int(&r.kappa)?, parse_int(&r.level)?, parse_int(&r.bound)?);
    f.scale = sym_of(&r.scale, &k)?;
    f.scale_root = elem(&r.scale_root, &k)?;
    for c in &r.coeffs {
        if c.t.len() != 3 {
            return Err(Error::Format("a key needs three entries".into()));
        }
        let t = [parse_int(&c.t[0])?, parse_int(&c.t[1])?, parse_int(&c.t[2])?];
        f.coeffs.insert(t, c.value.iter().map(|x| elem(x, &k)).collect::<Result<_, _>>()?);
    }
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeckeRec {
    pub p: String,
    pub out_bound: String,
    pub field: Option<FieldRec>,
    pub eigenvalue: Vec<String>,
    pub predicted: Vec<String>,
    pub agrees: bool,
    pub checked: Vec<Vec<String>>,
}

pub fn hecke_rec(c: &EigenCertificate, out_bound: i64, predicted: &NfElem, k: &Option<Arc<NumberField>>) -> HeckeRec {
    HeckeRec {
        p: s(c.p),
        out_bound: s(out_bound),
        field: field_rec(k),
        eigenvalue: coords(&c.eigenvalue, k),
        predicted: coords(predicted, k),
        agrees: c.eigenvalue == *predicted,
        checked: c.checked.iter().map(|t| t.iter().map(s).collect()).collect(),
    }
}

// ---------- Waldspurger data ----------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QCoeffRec {
    pub n: String,
    pub coords: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaldRec {
    pub label: String,
    pub nu: String,
    pub bound: String,
    pub field: Option<FieldRec>,
    pub coeffs: Vec<QCoeffRec>,
}

pub fn wald_rec(label: &str, w: &HalfIntegralQExpansion, k: &Option<Arc<NumberField>>) -> WaldRec {
    WaldRec {
        label: label.into(),
        nu: s(w.nu),
        bound: s(w.bound),
        field: field_rec(k),
        coeffs: w.coeffs.iter().map(|(n, a)| QCoeffRec { n: s(n), coords: coords(a, k) }).collect(),
    }
}

pub fn wald_of(r: &WaldRec) -> Result<HalfIntegralQExpansion, Error> {
    let k = field_of(&r.field)?;
    let mut coeffs = BTreeMap::new();
    for c in &r.coeffs {
        coeffs.insert(parse_int(&c.n)?, elem(&c.coords, &k)?);
    }
    Ok(HalfIntegralQExpansion {
        nu: parse_int(&r.nu)?,
        bound: parse_int(&r.bound)?,
        coeffs,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRec {
    pub t: Vec<String>,
    pub epsilon: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvgRec {
    pub d: String,
    pub field: Option<FieldRec>,
    pub value: SymRec,
    pub scale_root: Vec<String>,
    pub classes: Vec<ClassRec>,
}

pub fn avg_rec(a: &AveragedCoefficient, k: &Option<Arc<NumberField>>) -> AvgRec {
    AvgRec {
        d: s(a.d),
        field: field_rec(k),
        value: sym_rec(&a.value, k),
        scale_root: coords(&a.scale_root, k),
        classes: a
            .class_data
            .iter()
            .map(|(t, e)| ClassRec {
                t: t.iter().map(s).collect(),
                epsilon: s(e),
            })
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationRec {
    pub d: String,
    pub field: Option<FieldRec>,
    pub lhs: SymRec,
    pub lhs_root: Vec<String>,
    pub rhs: SymRec,
    pub ratio_squared: Option<Vec<String>>,
    pub equal: bool,
    pub hypothesis: String,
}

pub fn factorization_rec(r: &FactorizationReport, k: &Option<Arc<NumberField>>) -> FactorizationRec {
    FactorizationRec {
        d: s(r.d),
        field: field_rec(k),
        lhs: sym_rec(&r.lhs, k),
        lhs_root: coords(&r.lhs_root, k),
        rhs: sym_rec(&r.rhs, k),
        ratio_squared: r.ratio_squared.as_ref().map(|x| coords(x, k)),
        equal: r.equal,
        hypothesis: r.hypothesis.clone(),
    }
}

// ---------- congruence scans ----------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateRec {
    pub ell: String,
    pub min_exponent: String,
    pub likely_noise: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultantRec {
    pub p: String,
    pub resultant: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRec {
    pub labels: Vec<String>,
    pub probe_primes: Vec<String>,
    pub resultants: Vec<ResultantRec>,
    pub exact: bool,
    pub modulus: String,
    pub candidates: Vec<CandidateRec>,
    pub method: String,
}

pub fn scan_rec(r: &CongruenceReport) -> ScanRec {
    ScanRec {
        labels: vec![r.labels.0.clone(), r.labels.1.clone()],
        probe_primes: r.probe_primes.iter().map(s).collect(),
        resultants: r.resultants.iter().map(|(p, x)| ResultantRec { p: s(p), resultant: s(x) }).collect(),
        exact: r.exact,
        modulus: s(&r.modulus),
        candidates: r
            .candidates
            .iter()
            .map(|c| CandidateRec {
                ell: s(&c.ell),
                min_exponent: s(c.min_exponent),
                likely_noise: c.likely_noise,
            })
            .collect(),
        method: r.method.clone(),
    }
}

pub fn scan_of(r: &ScanRec) -> Result<CongruenceReport, Error> {
    if r.labels.len() != 2 {
        return Err(Error::Format("a scan names two tables".into()));
    }
    Ok(CongruenceReport {
        labels: (r.labels[0].clone(), r.labels[1].clone()),
        probe_primes: r.probe_primes.iter().map(|p| parse_int(p)).collect::<Result<_, _>>()?,
        resultants: r
            .resultants
            .iter()
            .map(|x| Ok((parse_int(&x.p)?, parse_big(&x.resultant)?)))
            .collect::<Result<_, Error>>()?,
        exact: r.exact,
        modulus: parse_big(&r.modulus)?,
        candidates: r
            .candidates
            .iter()
            .map(|c| {
                Ok(Candidate {
                    ell: parse_big(&c.ell)?,
                    min_exponent: parse_int(&c.min_exponent)?,
                    likely_noise: c.likely_noise,
                })
            })
            .collect::<Result<_, Error>>()?,
        method: r.method.clone(),
    })
}

// ---------- kernels and constants ----------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRec {
    pub exponent: Vec<String>,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelRec {
    pub k: String,
    pub n: String,
    pub mu: String,
    pub nu: String,
    pub alpha: String,
    pub vars: Vec<String>,
    pub terms: Vec<TermRec>,
}

pub fn poly_terms(p: &MultiPoly<Rational>) -> Vec<TermRec> {
    p.terms()
        .iter()
        .map(|(e, c)| TermRec {
            exponent: e.iter().map(s).collect(),
            coeff: s(c),
        })
        .collect()
}

pub fn poly_of(vars: &[String], terms: &[TermRec]) -> Result<MultiPoly<Rational>, Error> {
    let names = Arc::new(vars.to_vec());
    let mut out = MultiPoly::zero(&names);
    for t in terms {
        let e = t.exponent.iter().map(|x| parse_int(x)).collect::<Result<Vec<u16>, _>>()?;
        if e.len() != vars.len() {
            return Err(Error::Format("exponent length differs from the variable count".into()));
        }
        out.add_term(e, parse_rat(&t.coeff)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantRec {
    pub symbol: String,
    pub params: Vec<String>,
    pub value: SymRec,
}

pub fn to_json<T: Serialize>(x: &T) -> String {
    let mut out = serde_json::to_string_pretty(x).expect("records serialize");
    out.push('\n');
    out
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, Error> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}
