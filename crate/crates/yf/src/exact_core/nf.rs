use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::poly::Poly;
use super::rational::Rational;
use super::ring::{Field, Ring};
use crate::Error;

/// ℚ[x]/(f) for a caller-supplied monic squarefree integer polynomial f.
#[derive(Clone, Debug, PartialEq)]
pub struct NumberField {
    modulus: Poly<Rational>,
}

impl NumberField {
    pub fn new(modulus: Poly<Rational>) -> Result<Arc<Self>, Error> {
        if !modulus.is_integral_monic() || modulus.degree() < 1 {
            return Err(Error::Domain("defining polynomial must be monic with integer coefficients".into()));
        }
        if !modulus.is_squarefree() {
            return Err(Error::Domain("defining polynomial is not squarefree".into()));
        }
        Ok(Arc::new(NumberField { modulus }))
    }

    pub fn from_ints(c: &[i64]) -> Result<Arc<Self>, Error> {
        Self::new(Poly::from_ints(c))
    }

    pub fn modulus(&self) -> &Poly<Rational> {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree() as usize
    }

    /// The class of x in the field.
    pub fn generator(self: &Arc<Self>) -> NfElem {
        NfElem::from_poly(self, &Poly::x())
    }
}

/// Element of a number field in the power basis.
///
/// A `None` field marks a rational constant that adopts the field of any operand
/// it meets; coords then has length at most one.
#[derive(Clone)]
pub struct NfElem {
    field: Option<Arc<NumberField>>,
    coords: Vec<Rational>,
}

impl NfElem {
    pub fn rational(r: Rational) -> Self {
        NfElem {
            field: None,
            coords: if r.ris_zero() { vec![] } else { vec![r] },
        }
    }

    pub fn from_poly(field: &Arc<NumberField>, p: &Poly<Rational>) -> Self {
        let r = p.rem(field.modulus());
        NfElem {
            field: Some(field.clone()),
            coords: r.coeffs().to_vec(),
        }
    }

    pub fn from_coords(field: &Arc<NumberField>, c: Vec<Rational>) -> Self {
        Self::from_poly(field, &Poly::new(c))
    }

    pub fn field(&self) -> Option<&Arc<NumberField>> {
        self.field.as_ref()
    }

    pub fn as_poly(&self) -> Poly<Rational> {
        Poly::new(self.coords.clone())
    }

    /// Coordinates padded to the field degree (one entry for rational constants).
    pub fn coords(&self) -> Vec<Rational> {
        let n = self.field.as_ref().map(|f| f.degree()).unwrap_or(1);
        let mut v = self.coords.clone();
        v.resize(n.max(v.len()), Rational::zero());
        v
    }

    fn join(&self, o: &Self) -> Option<Arc<NumberField>> {
        match (&self.field, &o.field) {
            (Some(a), Some(b)) => {
                assert!(Arc::ptr_eq(a, b) || a == b, "number field mismatch");
                Some(a.clone())
            }
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (None, None) => None,
        }
    }

    fn make(field: Option<Arc<NumberField>>, p: Poly<Rational>) -> Self {
        match field {
            Some(f) => Self::from_poly(&f, &p),
            None => NfElem {
                field: None,
                coords: p.coeffs().to_vec(),
            },
        }
    }

    /// Field norm as the resultant Res(f, x) for monic f, equal to the product of
    /// x over all roots of f.
    pub fn norm(&self) -> Rational {
        match &self.field {
            None => self.coords.first().cloned().unwrap_or_else(Rational::zero),
            Some(f) => f.modulus().resultant(&self.as_poly()),
        }
    }

    /// Trace: sum of x over the roots of f, from the characteristic polynomial.
    pub fn trace(&self) -> Rational {
        let cp = self.charpoly();
        let n = cp.degree() as usize;
        -cp.coeff(n - 1)
    }

    /// Characteristic polynomial of multiplication by x on the power basis.
    pub fn charpoly(&self) -> Poly<Rational> {
        match &self.field {
            None => Poly::new(vec![-self.coords.first().cloned().unwrap_or_else(Rational::zero), Rational::one()]),
            Some(f) => {
                let n = f.degree();
                let mut m = vec![vec![Rational::zero(); n]; n];
                let g = self.as_poly();
                for j in 0..n {
                    let basis = Poly::new((0..=j).map(|t| if t == j { Rational::one() } else { Rational::zero() }).collect());
                    let col = g.mul(&basis).rem(f.modulus());
                    for i in 0..n {
                        m[i][j] = col.coeff(i);
                    }
                }
                super::linalg::charpoly(&m)
            }
        }
    }

    /// Real embeddings evaluated numerically, for sanity bounds only.
    pub fn real_embeddings(&self) -> Vec<f64> {
        match &self.field {
            None => vec![num_traits::ToPrimitive::to_f64(&self.norm()).unwrap()],
            Some(f) => {
                let roots = super::linalg::real_roots_f64(f.modulus());
                let c: Vec<f64> = self.as_poly().to_f64();
                roots.iter().map(|&r| c.iter().rev().fold(0.0, |acc, &a| acc * r + a)).collect()
            }
        }
    }
}

impl PartialEq for NfElem {
    fn eq(&self, o: &Self) -> bool {
        if let (Some(a), Some(b)) = (&self.field, &o.field) {
            if !(Arc::ptr_eq(a, b) || a == b) {
                return false;
            }
        }
        let n = self.coords.len().max(o.coords.len());
        (0..n).all(|i| self.coords.get(i).cloned().unwrap_or_else(Rational::zero) == o.coords.get(i).cloned().unwrap_or_else(Rational::zero))
    }
}

impl fmt::Debug for NfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for NfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_poly().display("b"))
    }
}

impl Ring for NfElem {
    fn rzero() -> Self {
        NfElem { field: None, coords: vec![] }
    }
    fn rone() -> Self {
        NfElem::rational(Rational::one())
    }
    fn from_rat(r: &Rational) -> Self {
        NfElem::rational(r.clone())
    }
    fn ris_zero(&self) -> bool {
        self.coords.iter().all(|c| c.ris_zero())
    }
    fn radd(&self, o: &Self) -> Self {
        Self::make(self.join(o), self.as_poly().add(&o.as_poly()))
    }
    fn rsub(&self, o: &Self) -> Self {
        Self::make(self.join(o), self.as_poly().sub(&o.as_poly()))
    }
    fn rmul(&self, o: &Self) -> Self {
        Self::make(self.join(o), self.as_poly().mul(&o.as_poly()))
    }
    fn rneg(&self) -> Self {
        NfElem {
            field: self.field.clone(),
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
    fn rscale(&self, r: &Rational) -> Self {
        Self::make(self.field.clone(), self.as_poly().scale(r))
    }
    fn as_rational(&self) -> Option<Rational> {
        if self.coords.iter().skip(1).all(|c| c.ris_zero()) {
            Some(self.coords.first().cloned().unwrap_or_else(Rational::zero))
        } else {
            None
        }
    }
}

impl Field for NfElem {
    fn rinv(&self) -> Option<Self> {
        if self.ris_zero() {
            return None;
        }
        match &self.field {
            None => Some(NfElem::rational(self.coords[0].recip())),
            Some(f) => {
                let (g, s, _) = self.as_poly().ext_gcd(f.modulus());
                if g.degree() != 0 {
                    return None;
                }
                Some(Self::from_poly(f, &s))
            }
        }
    }
}

/// Field norm through the resultant; see [`NfElem::norm`].
pub fn nf_norm(x: &NfElem) -> Rational {
    x.norm()
}

/// ℚ(i) = ℚ[x]/(x² + 1), shared so that equality checks are pointer-fast.
pub fn gaussian_field() -> Arc<NumberField> {
    static F: std::sync::OnceLock<Arc<NumberField>> = std::sync::OnceLock::new();
    F.get_or_init(|| NumberField::from_ints(&[1, 0, 1]).expect("x^2 + 1 is squarefree")).clone()
}

/// re + i·im in ℚ(i).
pub fn gauss(re: Rational, im: Rational) -> NfElem {
    NfElem::from_coords(&gaussian_field(), vec![re, im])
}

/// Complex conjugation on ℚ(i); rational constants are fixed.
pub fn complex_conj(x: &NfElem) -> NfElem {
    match x.field() {
        None => x.clone(),
        Some(f) => {
            assert_eq!(f.modulus(), gaussian_field().modulus(), "complex conjugation needs Q(i)");
            let c = x.coords();
            gauss(c[0].clone(), -c[1].clone())
        }
    }
}
