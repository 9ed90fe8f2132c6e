use super::rational::Rational;
use super::ring::{Field, Ring};

/// Dense univariate polynomial, coefficients from low to high degree, no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<R: Ring> {
    c: Vec<R>,
}

impl<R: Ring> Poly<R> {
    pub fn new(mut c: Vec<R>) -> Self {
        while c.last().map(|x| x.ris_zero()).unwrap_or(false) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { c: vec![R::rone()] }
    }

    pub fn constant(a: R) -> Self {
        Poly::new(vec![a])
    }

    /// The monomial x.
    pub fn x() -> Self {
        Poly {
            c: vec![R::rzero(), R::rone()],
        }
    }

    pub fn coeffs(&self) -> &[R] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; the zero polynomial has degree -1.
    pub fn degree(&self) -> isize {
        self.c.len() as isize - 1
    }

    pub fn lead(&self) -> R {
        self.c.last().cloned().unwrap_or_else(R::rzero)
    }

    pub fn coeff(&self, i: usize) -> R {
        self.c.get(i).cloned().unwrap_or_else(R::rzero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i).radd(&o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i).rsub(&o.coeff(i))).collect())
    }

    pub fn neg(&self) -> Self {
        Poly::new(self.c.iter().map(|a| a.rneg()).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![R::rzero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.ris_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = out[i + j].radd(&a.rmul(b));
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, s: &R) -> Self {
        Poly::new(self.c.iter().map(|a| a.rmul(s)).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &R) -> R {
        let mut acc = R::rzero();
        for a in self.c.iter().rev() {
            acc = acc.rmul(x).radd(a);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a.rscale(&Rational::from_integer((i as i64).into())))
                .collect(),
        )
    }

    /// Substitute another polynomial for x.
    pub fn compose(&self, g: &Self) -> Self {
        let mut acc = Poly::zero();
        for a in self.c.iter().rev() {
            acc = acc.mul(g).add(&Poly::constant(a.clone()));
        }
        acc
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Poly<S> {
        Poly::new(self.c.iter().map(f).collect())
    }
}

impl<F: Field> Poly<F> {
    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dl = d.lead().rinv().expect("nonzero leading coefficient");
        let mut r = self.c.clone();
        let dd = d.c.len() - 1;
        if r.len() < d.c.len() {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![F::rzero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let t = r[k + dd].rmul(&dl);
            if !t.ris_zero() {
                for (j, b) in d.c.iter().enumerate() {
                    r[k + j] = r[k + j].rsub(&t.rmul(b));
                }
            }
            q[k] = t;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead().rinv().unwrap();
        self.scale(&l)
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns (g, s, t) with s·self + t·o = g monic.
    pub fn ext_gcd(&self, o: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let l = r0.lead().rinv().unwrap();
        (r0.scale(&l), s0.scale(&l), t0.scale(&l))
    }

    /// Resultant by the Euclidean recurrence over a field.
    pub fn resultant(&self, o: &Self) -> F {
        if self.is_zero() || o.is_zero() {
            return F::rzero();
        }
        let m = self.degree();
        let n = o.degree();
        if n == 0 {
            return o.lead().rpow(m as u32);
        }
        if m == 0 {
            return self.lead().rpow(n as u32);
        }
        let r = self.rem(o);
        if r.is_zero() {
            return F::rzero();
        }
        let k = r.degree();
        // Res(f, g) = (-1)^{mn} lc(g)^{m-k} Res(g, f mod g)
        let sign = if (m * n) % 2 == 1 { F::rone().rneg() } else { F::rone() };
        sign.rmul(&o.lead().rpow((m - k) as u32)).rmul(&o.resultant(&r))
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == 0
    }

    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.divrem(d);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }
}

impl Poly<Rational> {
    pub fn from_ints(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&a| Rational::from_integer(a.into())).collect())
    }

    /// All rational roots, with multiplicity, via the rational root theorem on the primitive part.
    pub fn rational_roots(&self) -> Vec<Rational> {
        use num_integer::Integer;
        use num_traits::{Signed, Zero};
        let mut out = Vec::new();
        let mut f = self.clone();
        if f.is_zero() {
            return out;
        }
        while f.coeff(0).ris_zero() && f.degree() > 0 {
            out.push(Rational::zero());
            f = Poly::new(f.c[1..].to_vec());
        }
        if f.degree() <= 0 {
            return out;
        }
        let den = super::rational::common_denominator(f.c.iter());
        let ints: Vec<num_bigint::BigInt> = f.c.iter().map(|a| (a * Rational::from_integer(den.clone())).to_integer()).collect();
        let a0 = ints[0].abs();
        let an = ints[ints.len() - 1].abs();
        let divs = |n: &num_bigint::BigInt| -> Vec<num_bigint::BigInt> {
            let mut v = Vec::new();
            let mut d = num_bigint::BigInt::from(1);
            while &d * &d <= *n {
                if (n % &d).is_zero() {
                    v.push(d.clone());
                    let e = n / &d;
                    if e != d {
                        v.push(e);
                    }
                }
                d += 1;
            }
            v
        };
        let pa = divs(&a0);
        let qa = divs(&an);
        let mut cands: Vec<Rational> = Vec::new();
        for p in &pa {
            for q in &qa {
                if p.gcd(q) != num_bigint::BigInt::from(1) {
                    continue;
                }
                let r = Rational::new(p.clone(), q.clone());
                cands.push(r.clone());
                cands.push(-r);
            }
        }
        cands.sort();
        cands.dedup();
        for r in cands {
            let lin = Poly::new(vec![-r.clone(), Rational::from_integer(1.into())]);
            while f.degree() > 0 && f.eval(&r).ris_zero() {
                f = f.exact_div(&lin).unwrap();
                out.push(r.clone());
            }
        }
        out.sort();
        out
    }

    pub fn is_integral_monic(&self) -> bool {
        use num_traits::One;
        !self.is_zero() && self.lead().is_one() && self.c.iter().all(super::rational::is_integer)
    }

    /// Sturm-free real root count is not needed; numeric roots for sanity bounds.
    pub fn to_f64(&self) -> Vec<f64> {
        use num_traits::ToPrimitive;
        self.c.iter().map(|a| a.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn display(&self, var: &str) -> String {
        use num_traits::{One, Signed};
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, a) in self.c.iter().enumerate().rev() {
            if a.ris_zero() {
                continue;
            }
            let neg = a.is_negative();
            let mag = a.abs();
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let show_coeff = !(mag.is_one() && i > 0);
            if show_coeff {
                s.push_str(&mag.to_string());
                if i > 0 {
                    s.push('*');
                }
            }
            if i == 1 {
                s.push_str(var);
            } else if i > 1 {
                s.push_str(&format!("{}^{}", var, i));
            }
        }
        s
    }
}
