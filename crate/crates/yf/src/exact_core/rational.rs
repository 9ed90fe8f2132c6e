use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational in lowest terms with positive denominator.
pub type Rational = BigRational;

pub fn ri(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rq(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rbig(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

/// Rising factorial a(a+1)...(a+j-1).
pub fn rising(a: &Rational, j: u32) -> Rational {
    let mut acc = Rational::one();
    for t in 0..j {
        acc *= a + ri(t as i64);
    }
    acc
}

pub fn factorial(n: u32) -> BigInt {
    let mut acc = BigInt::one();
    for t in 2..=n {
        acc *= BigInt::from(t);
    }
    acc
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Γ(h + 1/2)/Γ(1/2) = (1/2)(3/2)...(h - 1/2) for h ≥ 0.
pub fn half_gamma_ratio(h: u32) -> Rational {
    rising(&rq(1, 2), h)
}

/// Integer power of a rational, negative exponents allowed for nonzero bases.
pub fn rpow(b: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(b.clone(), e as usize)
    } else {
        num_traits::pow(b.recip(), (-e) as usize)
    }
}

/// Least common multiple of all denominators.
pub fn common_denominator<'a, I: IntoIterator<Item = &'a Rational>>(it: I) -> BigInt {
    let mut l = BigInt::one();
    for r in it {
        l = l.lcm(r.denom());
    }
    l
}

/// Squarefree part s and square root r with n = s·r², s carrying the sign of n.
pub fn squarefree_decompose(n: &BigInt) -> (BigInt, BigInt) {
    if n.is_zero() {
        return (BigInt::zero(), BigInt::one());
    }
    let sign = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    let mut m = n.abs();
    let mut s = BigInt::one();
    let mut r = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        let mut e = 0u32;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        for _ in 0..e / 2 {
            r *= &p;
        }
        if e % 2 == 1 {
            s *= &p;
        }
        p += 1;
    }
    s *= m;
    (sign * s, r)
}

/// Prime factorization by trial division (inputs here stay small).
pub fn factorize(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut m = n.abs();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        let mut e = 0u32;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += 1;
    }
    if m > BigInt::one() {
        out.push((m, 1));
    }
    out
}

pub fn factorize_u64(n: u64) -> Vec<(u64, u32)> {
    let mut m = n;
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= m {
        let mut e = 0;
        while m.is_multiple_of(p) {
            m /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return false;
        }
        p += 1;
    }
    true
}

pub fn is_squarefree_u64(n: u64) -> bool {
    n > 0 && factorize_u64(n).iter().all(|&(_, e)| e == 1)
}

/// Floor of a rational.
pub fn rfloor(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

pub fn rceil(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}
