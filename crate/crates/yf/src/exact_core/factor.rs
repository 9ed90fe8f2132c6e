//! Factorization of rational polynomials into irreducibles.
//!
//! Candidate factors come from grouping numerically computed complex roots; every
//! factor is confirmed by exact division, and irreducibility of each factor is
//! certified by a Rabin irreducibility test modulo some small prime when one succeeds.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use super::poly::Poly;
use super::rational::{common_denominator, factorize_u64, is_prime_u64, ri, Rational};

/// Monic irreducible factors with multiplicities and a certification flag.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub unit: Rational,
    pub factors: Vec<(Poly<Rational>, u32)>,
    /// True when every factor of degree ≥ 2 passed a modular irreducibility test.
    pub certified: bool,
}

/// Yun's algorithm: f = lc · ∏ a_i^i with a_i monic, squarefree and pairwise coprime.
pub fn squarefree_factorization(f: &Poly<Rational>) -> Vec<(Poly<Rational>, u32)> {
    let f = f.monic();
    let mut out = Vec::new();
    if f.degree() <= 0 {
        return out;
    }
    let fp = f.derivative();
    let mut a = f.gcd(&fp);
    let mut b = f.exact_div(&a).unwrap();
    let mut c = fp.exact_div(&a).unwrap();
    let mut d = c.sub(&b.derivative());
    let mut i = 1;
    while b.degree() > 0 {
        a = b.gcd(&d);
        if a.degree() > 0 {
            out.push((a.monic(), i));
        }
        b = b.exact_div(&a).unwrap();
        c = d.exact_div(&a).unwrap();
        d = c.sub(&b.derivative());
        i += 1;
    }
    out
}

type C = (f64, f64);

fn cmul(a: C, b: C) -> C {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

/// All complex roots of a monic real polynomial by Durand–Kerner plus Newton polishing.
fn complex_roots(c: &[f64]) -> Vec<C> {
    let n = c.len() - 1;
    let r = 1.0 + c[..n].iter().map(|x| x.abs()).fold(0.0, f64::max).powf(1.0 / n as f64);
    let mut z: Vec<C> = (0..n)
        .map(|k| {
            let t = 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            (r * t.cos(), r * t.sin())
        })
        .collect();
    let eval = |x: C| -> (C, C) {
        let mut v = (0.0, 0.0);
        let mut dv = (0.0, 0.0);
        for a in c.iter().rev() {
            dv = cmul(dv, x);
            dv.0 += v.0;
            dv.1 += v.1;
            v = cmul(v, x);
            v.0 += a;
        }
        (v, dv)
    };
    let cdiv = |a: C, b: C| {
        let d = b.0 * b.0 + b.1 * b.1;
        ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
    };
    for _ in 0..5000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let (v, _) = eval(z[i]);
            let mut den = (1.0, 0.0);
            for j in 0..n {
                if j != i {
                    den = cmul(den, (z[i].0 - z[j].0, z[i].1 - z[j].1));
                }
            }
            if den.0 == 0.0 && den.1 == 0.0 {
                z[i].0 += 1e-9;
                continue;
            }
            let s = cdiv(v, den);
            z[i] = (z[i].0 - s.0, z[i].1 - s.1);
            delta = delta.max((s.0.abs() + s.1.abs()) / (1.0 + z[i].0.abs() + z[i].1.abs()));
        }
        if delta < 1e-14 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (v, dv) = eval(*zi);
            if dv.0 == 0.0 && dv.1 == 0.0 {
                break;
            }
            let s = cdiv(v, dv);
            *zi = (zi.0 - s.0, zi.1 - s.1);
        }
    }
    z
}

/// Monic integral candidate from a root subset, when its coefficients look integral.
fn candidate(roots: &[C], idx: &[usize]) -> Option<Poly<Rational>> {
    let mut p: Vec<C> = vec![(1.0, 0.0)];
    for &i in idx {
        let mut q = vec![(0.0, 0.0); p.len() + 1];
        for (k, &a) in p.iter().enumerate() {
            q[k + 1].0 += a.0;
            q[k + 1].1 += a.1;
            let m = cmul(a, roots[i]);
            q[k].0 -= m.0;
            q[k].1 -= m.1;
        }
        p = q;
    }
    let mut c = Vec::with_capacity(p.len());
    for a in p {
        let r = a.0.round();
        let tol = 1e-6 * (1.0 + a.0.abs());
        if a.1.abs() > tol || (a.0 - r).abs() > tol || !r.is_finite() {
            return None;
        }
        c.push(Rational::from_integer(BigInt::from(r as i128)));
    }
    Some(Poly::new(c))
}

fn next_combo(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Splits a squarefree monic integral polynomial into factors found by root grouping.
fn split_integral(f: &Poly<Rational>, out: &mut Vec<Poly<Rational>>) {
    let d = f.degree() as usize;
    if d <= 1 {
        if d == 1 {
            out.push(f.clone());
        }
        return;
    }
    if let Some(r) = f.rational_roots().into_iter().next() {
        let lin = Poly::new(vec![-r, ri(1)]);
        let q = f.exact_div(&lin).unwrap();
        out.push(lin);
        split_integral(&q, out);
        return;
    }
    let c: Vec<f64> = f.coeffs().iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
    if c.iter().any(|x| !x.is_finite()) {
        out.push(f.clone());
        return;
    }
    let roots = complex_roots(&c);
    for k in 2..=d / 2 {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            if let Some(g) = candidate(&roots, &idx) {
                if let Some(q) = f.exact_div(&g) {
                    split_integral(&g, out);
                    split_integral(&q, out);
                    return;
                }
            }
            if !next_combo(&mut idx, d) {
                break;
            }
        }
    }
    out.push(f.clone());
}

/// f(x) monic rational ↦ (D, D^d f(y/D)) monic integral.
fn integralize(f: &Poly<Rational>) -> (BigInt, Poly<Rational>) {
    let mut dd = BigInt::one();
    let d = f.degree() as usize;
    // smallest D with D^{d−i} c_i integral for all i, found by growing the lcm
    loop {
        let dr = Rational::from_integer(dd.clone());
        let c: Vec<Rational> = (0..=d).map(|i| f.coeff(i) * num_traits::pow(dr.clone(), d - i)).collect();
        let den = common_denominator(c.iter());
        if den.is_one() {
            return (dd, Poly::new(c));
        }
        dd *= den;
    }
}

/// Rabin test: f monic of degree d is irreducible mod p iff x^{p^d} ≡ x and gcd(x^{p^{d/q}} − x, f) = 1.
fn irreducible_mod_p(f: &[u64], p: u64) -> bool {
    let d = f.len() - 1;
    let x = vec![0, 1];
    let mut powers = Vec::with_capacity(d + 1);
    let mut cur = x.clone();
    powers.push(cur.clone());
    for _ in 0..d {
        cur = fp_powmod(&cur, p, f, p);
        powers.push(cur.clone());
    }
    if fp_trim(fp_sub(&powers[d], &x, p)) != Vec::<u64>::new() {
        return false;
    }
    for (q, _) in factorize_u64(d as u64) {
        let h = fp_sub(&powers[d / q as usize], &x, p);
        let g = fp_gcd(f.to_vec(), h, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

fn fp_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    fp_trim(
        (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
            .collect(),
    )
}

fn fp_inv(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn fp_rem(mut a: Vec<u64>, m: &[u64], p: u64) -> Vec<u64> {
    let dm = m.len() - 1;
    let li = fp_inv(m[dm], p);
    a = fp_trim(a);
    while a.len() > dm {
        let top = a.len() - 1;
        let c = a[top] * li % p;
        for i in 0..=dm {
            a[top - dm + i] = (a[top - dm + i] + p - c * m[i] % p) % p;
        }
        a = fp_trim(a);
    }
    a
}

fn fp_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut c = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            c[i + j] = (c[i + j] + x * y) % p;
        }
    }
    fp_rem(c, m, p)
}

fn fp_powmod(a: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut r = vec![1u64];
    let mut b = fp_rem(a.to_vec(), m, p);
    while e > 0 {
        if e & 1 == 1 {
            r = fp_mulmod(&r, &b, m, p);
        }
        b = fp_mulmod(&b, &b, m, p);
        e >>= 1;
    }
    r
}

fn fp_gcd(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    a = fp_trim(a);
    b = fp_trim(b);
    while !b.is_empty() {
        let r = fp_rem(a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Proves irreducibility of a monic integral polynomial of degree ≥ 2 via some prime p < 400.
pub fn certify_irreducible(f: &Poly<Rational>) -> bool {
    let d = f.degree();
    if d <= 1 {
        return d == 1;
    }
    for p in (3u64..400).filter(|&p| is_prime_u64(p)) {
        let pb = BigInt::from(p);
        let c: Vec<u64> = f
            .coeffs()
            .iter()
            .map(|x| {
                let r = ((x.to_integer() % &pb) + &pb) % &pb;
                r.to_u64().unwrap()
            })
            .collect();
        if c[c.len() - 1] == 0 {
            continue;
        }
        if irreducible_mod_p(&c, p) {
            return true;
        }
    }
    false
}

/// Factors a nonzero rational polynomial into monic irreducibles.
pub fn factor_over_q(f: &Poly<Rational>) -> Factorization {
    assert!(!f.is_zero());
    let unit = f.lead();
    let mut factors = Vec::new();
    let mut certified = true;
    for (g, m) in squarefree_factorization(f) {
        let (dd, h) = integralize(&g);
        let mut parts = Vec::new();
        split_integral(&h, &mut parts);
        for part in parts {
            if part.degree() >= 2 && !certify_irreducible(&part) {
                certified = false;
            }
            // undo y = D·x: part(Dx)/D^deg
            let k = part.degree() as usize;
            let dr = Rational::from_integer(dd.clone());
            let c: Vec<Rational> = (0..=k)
                .map(|i| part.coeff(i) * num_traits::pow(dr.clone(), i) / num_traits::pow(dr.clone(), k))
                .collect();
            factors.push((Poly::new(c), m));
        }
    }
    factors.sort_by(|a, b| (a.0.degree(), format!("{:?}", a.0)).cmp(&(b.0.degree(), format!("{:?}", b.0))));
    Factorization { unit, factors, certified }
}
