use std::fmt::Debug;

use num_traits::{One, Zero};

use super::rational::Rational;

/// Commutative ring with a canonical embedding of the rationals.
///
/// Methods use an `r` prefix so they never collide with `std::ops`.
pub trait Ring: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn rzero() -> Self;
    fn rone() -> Self;
    fn from_rat(r: &Rational) -> Self;
    fn ris_zero(&self) -> bool;
    fn radd(&self, o: &Self) -> Self;
    fn rsub(&self, o: &Self) -> Self;
    fn rmul(&self, o: &Self) -> Self;
    fn rneg(&self) -> Self;
    fn rscale(&self, r: &Rational) -> Self {
        self.rmul(&Self::from_rat(r))
    }
    fn rpow(&self, e: u32) -> Self {
        let mut acc = Self::rone();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.rmul(&base);
            }
            base = base.rmul(&base);
            e >>= 1;
        }
        acc
    }
    /// Returns the value as a rational when it lies in the prime field.
    fn as_rational(&self) -> Option<Rational>;
}

/// A ring in which every nonzero element is invertible.
pub trait Field: Ring {
    fn rinv(&self) -> Option<Self>;
    fn rdiv(&self, o: &Self) -> Option<Self> {
        o.rinv().map(|i| self.rmul(&i))
    }
}

impl Ring for Rational {
    fn rzero() -> Self {
        <Rational as Zero>::zero()
    }
    fn rone() -> Self {
        <Rational as One>::one()
    }
    fn from_rat(r: &Rational) -> Self {
        r.clone()
    }
    fn ris_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn radd(&self, o: &Self) -> Self {
        self + o
    }
    fn rsub(&self, o: &Self) -> Self {
        self - o
    }
    fn rmul(&self, o: &Self) -> Self {
        self * o
    }
    fn rneg(&self) -> Self {
        -self
    }
    fn rscale(&self, r: &Rational) -> Self {
        self * r
    }
    fn as_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
}

impl Field for Rational {
    fn rinv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}
