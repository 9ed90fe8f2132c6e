use num_traits::Zero;

use crate::exact_core::rational::{factorize_u64, is_squarefree_u64, ri, Rational};
use crate::exact_core::{MultiPoly, NfElem, Ring};
use crate::Error;

/// Element 1·x0 + i·x1 + j·x2 + k·x3.
pub type Quat = [Rational; 4];

/// Definite algebra with i² = −a, j² = −b, k = ij.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct QuaternionAlgebra {
    pub a: i64,
    pub b: i64,
    /// Finite ramified primes, ascending; ∞ is always ramified.
    pub ramified_primes: Vec<u64>,
}

pub fn qzero() -> Quat {
    [Rational::zero(), Rational::zero(), Rational::zero(), Rational::zero()]
}

pub fn qone() -> Quat {
    [ri(1), Rational::zero(), Rational::zero(), Rational::zero()]
}

pub fn qint(c: [i64; 4]) -> Quat {
    [ri(c[0]), ri(c[1]), ri(c[2]), ri(c[3])]
}

pub fn qadd(x: &Quat, y: &Quat) -> Quat {
    [&x[0] + &y[0], &x[1] + &y[1], &x[2] + &y[2], &x[3] + &y[3]]
}

pub fn qsub(x: &Quat, y: &Quat) -> Quat {
    [&x[0] - &y[0], &x[1] - &y[1], &x[2] - &y[2], &x[3] - &y[3]]
}

pub fn qscale(x: &Quat, s: &Rational) -> Quat {
    [&x[0] * s, &x[1] * s, &x[2] * s, &x[3] * s]
}

pub fn qconj(x: &Quat) -> Quat {
    [x[0].clone(), -&x[1], -&x[2], -&x[3]]
}

impl QuaternionAlgebra {
    pub fn with_params(a: i64, b: i64) -> Result<Self, Error> {
        if a <= 0 || b <= 0 {
            return Err(Error::Domain("definite algebra needs a, b > 0".into()));
        }
        let mut ram: Vec<u64> = Vec::new();
        let mut cands: Vec<u64> = vec![2];
        for n in [a as u64, b as u64] {
            for (p, _) in factorize_u64(n) {
                cands.push(p);
            }
        }
        cands.sort_unstable();
        cands.dedup();
        for p in cands {
            if hilbert_symbol(-a, -b, p) == -1 {
                ram.push(p);
            }
        }
        Ok(QuaternionAlgebra { a, b, ramified_primes: ram })
    }

    /// Product in the basis (1, i, j, k).
    pub fn mul(&self, x: &Quat, y: &Quat) -> Quat {
        let a = ri(self.a);
        let b = ri(self.b);
        let ab = &a * &b;
        [
            &x[0] * &y[0] - &a * &x[1] * &y[1] - &b * &x[2] * &y[2] - &ab * &x[3] * &y[3],
            &x[0] * &y[1] + &x[1] * &y[0] + &b * (&x[2] * &y[3] - &x[3] * &y[2]),
            &x[0] * &y[2] + &x[2] * &y[0] + &a * (&x[3] * &y[1] - &x[1] * &y[3]),
            &x[0] * &y[3] + &x[3] * &y[0] + &x[1] * &y[2] - &x[2] * &y[1],
        ]
    }

    pub fn norm(&self, x: &Quat) -> Rational {
        &x[0] * &x[0] + ri(self.a) * &x[1] * &x[1] + ri(self.b) * &x[2] * &x[2] + ri(self.a * self.b) * &x[3] * &x[3]
    }

    pub fn trace(&self, x: &Quat) -> Rational {
        ri(2) * &x[0]
    }

    /// B(x, y) = trd(x ȳ)/2, so that B(x, x) = n(x).
    pub fn bilinear(&self, x: &Quat, y: &Quat) -> Rational {
        &x[0] * &y[0] + ri(self.a) * &x[1] * &y[1] + ri(self.b) * &x[2] * &y[2] + ri(self.a * self.b) * &x[3] * &y[3]
    }

    /// Diagonal of the norm form in (1, i, j, k).
    pub fn norm_diag(&self) -> [Rational; 4] {
        [ri(1), ri(self.a), ri(self.b), ri(self.a * self.b)]
    }

    pub fn inverse(&self, x: &Quat) -> Option<Quat> {
        let n = self.norm(x);
        if n.is_zero() {
            return None;
        }
        Some(qscale(&qconj(x), &n.recip()))
    }

    /// Matrix M with x·y = y·M for row vectors y.
    pub fn left_mult_matrix(&self, x: &Quat) -> Vec<Vec<Rational>> {
        let mut m = Vec::with_capacity(4);
        for t in 0..4 {
            let mut e = qzero();
            e[t] = ri(1);
            m.push(self.mul(x, &e).to_vec());
        }
        m
    }

    /// Matrix M with y·x = y·M for row vectors y.
    pub fn right_mult_matrix(&self, x: &Quat) -> Vec<Vec<Rational>> {
        let mut m = Vec::with_capacity(4);
        for t in 0..4 {
            let mut e = qzero();
            e[t] = ri(1);
            m.push(self.mul(&e, x).to_vec());
        }
        m
    }
}

fn legendre(a: i64, p: i64) -> i64 {
    let a = a.rem_euclid(p);
    if a == 0 {
        return 0;
    }
    let mut r = 1i64;
    let mut base = a as i128;
    let mut e = (p - 1) / 2;
    let m = p as i128;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as i128 * base) % m) as i64;
        }
        base = base * base % m;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

fn split_p(x: i64, p: i64) -> (u32, i64) {
    let mut v = 0;
    let mut u = x;
    while u % p == 0 {
        u /= p;
        v += 1;
    }
    (v, u)
}

/// Hilbert symbol (x, y)_p for nonzero integers and a finite prime p.
pub fn hilbert_symbol(x: i64, y: i64, p: u64) -> i64 {
    let p = p as i64;
    let (al, u) = split_p(x, p);
    let (be, v) = split_p(y, p);
    if p == 2 {
        let eps = |t: i64| ((t.rem_euclid(8) - 1) / 2).rem_euclid(2);
        let omega = |t: i64| {
            let r = t.rem_euclid(8);
            ((r * r - 1) / 8).rem_euclid(2)
        };
        let e = eps(u) * eps(v) + al as i64 * omega(v) + be as i64 * omega(u);
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    } else {
        let sgn = if (al as i64 * be as i64 * ((p - 1) / 2)) % 2 == 0 { 1 } else { -1 };
        let lu = if be % 2 == 1 { legendre(u, p) } else { 1 };
        let lv = if al % 2 == 1 { legendre(v, p) } else { 1 };
        sgn * lu * lv
    }
}

/// Bounded search for (a, b) ramified exactly at the primes of N1 and ∞.
pub fn build_algebra(n1: u64) -> Result<QuaternionAlgebra, Error> {
    build_algebra_bounded(n1, 500)
}

pub fn build_algebra_bounded(n1: u64, bound: i64) -> Result<QuaternionAlgebra, Error> {
    if !is_squarefree_u64(n1) {
        return Err(Error::Domain(format!("N1 = {} is not squarefree", n1)));
    }
    let primes: Vec<u64> = factorize_u64(n1).into_iter().map(|(p, _)| p).collect();
    if primes.len().is_multiple_of(2) {
        return Err(Error::Domain(format!("N1 = {} must have an odd number of prime factors", n1)));
    }
    for m in 1..=bound {
        for a in 1..=m {
            let b = m;
            if !is_squarefree_u64(a as u64) || !is_squarefree_u64(b as u64) {
                continue;
            }
            let alg = QuaternionAlgebra::with_params(a, b)?;
            if alg.ramified_primes == primes {
                return Ok(alg);
            }
        }
    }
    Err(Error::SearchBound(format!(
        "no (a, b) with max(a, b) <= {} ramifies exactly at {:?}",
        bound, primes
    )))
}


/// Scalars that quaternion coordinates may take: rationals, number-field
/// elements, or polynomials over either.
pub trait QScalar: Clone {
    fn qs_add(&self, o: &Self) -> Self;
    fn qs_sub(&self, o: &Self) -> Self;
    fn qs_mul(&self, o: &Self) -> Self;
    fn qs_neg(&self) -> Self;
    fn qs_scale(&self, r: &Rational) -> Self;
}

macro_rules! ring_qscalar {
    ($t:ty) => {
        impl QScalar for $t {
            fn qs_add(&self, o: &Self) -> Self {
                Ring::radd(self, o)
            }
            fn qs_sub(&self, o: &Self) -> Self {
                Ring::rsub(self, o)
            }
            fn qs_mul(&self, o: &Self) -> Self {
                Ring::rmul(self, o)
            }
            fn qs_neg(&self) -> Self {
                Ring::rneg(self)
            }
            fn qs_scale(&self, r: &Rational) -> Self {
                Ring::rscale(self, r)
            }
        }
    };
}
ring_qscalar!(Rational);
ring_qscalar!(NfElem);

impl<R: Ring> QScalar for MultiPoly<R> {
    fn qs_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn qs_sub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn qs_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn qs_neg(&self) -> Self {
        self.neg()
    }
    fn qs_scale(&self, r: &Rational) -> Self {
        self.scale_rat(r)
    }
}

impl QuaternionAlgebra {
    /// The product formula of [`QuaternionAlgebra::mul`] over any scalar type.
    pub fn mul_gen<T: QScalar>(&self, x: &[T; 4], y: &[T; 4]) -> [T; 4] {
        let a = ri(self.a);
        let b = ri(self.b);
        let ab = ri(self.a * self.b);
        let m = |p: &T, q: &T| p.qs_mul(q);
        [
            m(&x[0], &y[0])
                .qs_sub(&m(&x[1], &y[1]).qs_scale(&a))
                .qs_sub(&m(&x[2], &y[2]).qs_scale(&b))
                .qs_sub(&m(&x[3], &y[3]).qs_scale(&ab)),
            m(&x[0], &y[1])
                .qs_add(&m(&x[1], &y[0]))
                .qs_add(&m(&x[2], &y[3]).qs_sub(&m(&x[3], &y[2])).qs_scale(&b)),
            m(&x[0], &y[2])
                .qs_add(&m(&x[2], &y[0]))
                .qs_add(&m(&x[3], &y[1]).qs_sub(&m(&x[1], &y[3])).qs_scale(&a)),
            m(&x[0], &y[3]).qs_add(&m(&x[3], &y[0])).qs_add(&m(&x[1], &y[2])).qs_sub(&m(&x[2], &y[1])),
        ]
    }

    pub fn conj_gen<T: QScalar>(&self, x: &[T; 4]) -> [T; 4] {
        [x[0].clone(), x[1].qs_neg(), x[2].qs_neg(), x[3].qs_neg()]
    }

    /// Bilinear extension of B(x, y) = trd(x ȳ)/2.
    pub fn bilinear_gen<T: QScalar>(&self, x: &[T; 4], y: &[T; 4]) -> T {
        let w = self.norm_diag();
        let mut s = x[0].qs_mul(&y[0]);
        for t in 1..4 {
            s = s.qs_add(&x[t].qs_mul(&y[t]).qs_scale(&w[t]));
        }
        s
    }

    pub fn norm_gen<T: QScalar>(&self, x: &[T; 4]) -> T {
        self.bilinear_gen(x, x)
    }
}
