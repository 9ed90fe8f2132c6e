use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::nf::NfElem;
use super::rational::{squarefree_decompose, Rational};
use super::ring::{Field, Ring};
use crate::Error;

/// A value coefficient·π^pi_power·i^i_power·√sqrt_part.
///
/// Canonical form: i_power ∈ {0, 1} (i² folded into the coefficient sign),
/// sqrt_part a positive squarefree integer, and zero stored with
/// pi_power = i_power = 0 and sqrt_part = 1. Equality is structural on this form.
#[derive(Clone, PartialEq)]
pub struct SymbolicConstant {
    pub coefficient: NfElem,
    pub pi_power: i32,
    pub i_power: u8,
    pub sqrt_part: BigInt,
}

impl SymbolicConstant {
    pub fn new(coefficient: NfElem, pi_power: i32, i_power: i64, sqrt_part: BigInt) -> Result<Self, Error> {
        if sqrt_part.is_zero() {
            return Ok(Self::zero());
        }
        let (s, r) = squarefree_decompose(&sqrt_part);
        let mut c = coefficient.rscale(&Rational::from_integer(r));
        let mut ip = i_power.rem_euclid(4);
        let mut s = s;
        if s.is_negative() {
            s = -s;
            ip += 1;
        }
        if ip >= 2 {
            c = c.rneg();
            ip -= 2;
        }
        if ip >= 2 {
            c = c.rneg();
            ip -= 2;
        }
        Ok(Self::canonical(c, pi_power, ip as u8, s))
    }

    fn canonical(c: NfElem, pi_power: i32, i_power: u8, sqrt_part: BigInt) -> Self {
        if c.ris_zero() {
            return Self::zero();
        }
        SymbolicConstant {
            coefficient: c,
            pi_power,
            i_power,
            sqrt_part,
        }
    }

    pub fn zero() -> Self {
        SymbolicConstant {
            coefficient: NfElem::rzero(),
            pi_power: 0,
            i_power: 0,
            sqrt_part: BigInt::one(),
        }
    }

    pub fn one() -> Self {
        Self::rational(Rational::one())
    }

    pub fn rational(r: Rational) -> Self {
        Self::canonical(NfElem::rational(r), 0, 0, BigInt::one())
    }

    pub fn from_nf(x: NfElem) -> Self {
        Self::canonical(x, 0, 0, BigInt::one())
    }

    pub fn pi_power(r: Rational, k: i32) -> Self {
        Self::canonical(NfElem::rational(r), k, 0, BigInt::one())
    }

    pub fn imag_unit() -> Self {
        Self::canonical(NfElem::rone(), 0, 1, BigInt::one())
    }

    /// Exact square root of a rational, with i for negative inputs.
    pub fn sqrt_rational(r: &Rational) -> Self {
        if r.ris_zero() {
            return Self::zero();
        }
        let n = r.numer() * r.denom();
        let (s, t) = squarefree_decompose(&n);
        let c = Rational::new(t, r.denom().clone());
        let (s, ip) = if s.is_negative() { (-s, 1u8) } else { (s, 0u8) };
        Self::canonical(NfElem::rational(c), 0, ip, s)
    }

    pub fn is_zero(&self) -> bool {
        self.coefficient.ris_zero()
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let g = self.sqrt_part.gcd(&o.sqrt_part);
        let s = (&self.sqrt_part / &g) * (&o.sqrt_part / &g);
        let mut c = self.coefficient.rmul(&o.coefficient).rscale(&Rational::from_integer(g));
        let mut ip = self.i_power + o.i_power;
        if ip >= 2 {
            c = c.rneg();
            ip -= 2;
        }
        Self::canonical(c, self.pi_power + o.pi_power, ip, s)
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // 1/(c π^a i^b √s) = (1/(c s)) π^{-a} i^{-b} √s
        let mut c = self.coefficient.rinv()?.rscale(&Rational::from_integer(self.sqrt_part.clone()).recip());
        if self.i_power == 1 {
            c = c.rneg();
        }
        Some(Self::canonical(c, -self.pi_power, self.i_power, self.sqrt_part.clone()))
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|i| self.mul(&i))
    }

    pub fn pow(&self, e: i32) -> Option<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Some(acc)
    }

    pub fn neg(&self) -> Self {
        Self::canonical(self.coefficient.rneg(), self.pi_power, self.i_power, self.sqrt_part.clone())
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self::canonical(self.coefficient.rscale(r), self.pi_power, self.i_power, self.sqrt_part.clone())
    }

    pub fn scale_nf(&self, x: &NfElem) -> Self {
        Self::canonical(self.coefficient.rmul(x), self.pi_power, self.i_power, self.sqrt_part.clone())
    }

    /// Whether two constants differ only in the coefficient.
    pub fn same_shape(&self, o: &Self) -> bool {
        self.pi_power == o.pi_power && self.i_power == o.i_power && self.sqrt_part == o.sqrt_part
    }

    /// Sum, defined when both summands share π-power, i-power and radical (or one is zero).
    pub fn add(&self, o: &Self) -> Result<Self, Error> {
        if self.is_zero() {
            return Ok(o.clone());
        }
        if o.is_zero() {
            return Ok(self.clone());
        }
        if !self.same_shape(o) {
            return Err(Error::Domain(format!("cannot add {} and {} in closed form", self, o)));
        }
        Ok(Self::canonical(
            self.coefficient.radd(&o.coefficient),
            self.pi_power,
            self.i_power,
            self.sqrt_part.clone(),
        ))
    }

    /// The coefficient as a rational when the value is rational·π^pi_power.
    pub fn rational_part(&self) -> Option<Rational> {
        if self.i_power != 0 || !self.sqrt_part.is_one() {
            return None;
        }
        self.coefficient.as_rational()
    }
}

impl fmt::Debug for SymbolicConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for SymbolicConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        match self.coefficient.as_rational() {
            Some(r) => write!(f, "{}", r)?,
            None => write!(f, "({})", self.coefficient)?,
        }
        if self.pi_power == 1 {
            write!(f, "*pi")?;
        } else if self.pi_power != 0 {
            write!(f, "*pi^{}", self.pi_power)?;
        }
        if self.i_power == 1 {
            write!(f, "*i")?;
        }
        if !self.sqrt_part.is_one() {
            write!(f, "*sqrt({})", self.sqrt_part)?;
        }
        Ok(())
    }
}
