use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::rational::{ri, Rational};
use super::ring::Ring;
use crate::Error;

pub type Exponent = Vec<u16>;

/// Sparse multivariate polynomial over named indeterminates.
///
/// Invariant: no stored coefficient is zero and every exponent vector has one
/// entry per variable.
#[derive(Clone, PartialEq)]
pub struct MultiPoly<R: Ring> {
    vars: Arc<Vec<String>>,
    terms: BTreeMap<Exponent, R>,
}

pub fn var_names(prefix: &str, n: usize) -> Arc<Vec<String>> {
    Arc::new((0..n).map(|i| format!("{}{}", prefix, i)).collect())
}

pub fn names(list: &[&str]) -> Arc<Vec<String>> {
    Arc::new(list.iter().map(|s| s.to_string()).collect())
}

impl<R: Ring> MultiPoly<R> {
    pub fn zero(vars: &Arc<Vec<String>>) -> Self {
        MultiPoly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Arc<Vec<String>>, c: R) -> Self {
        let mut p = Self::zero(vars);
        if !c.ris_zero() {
            p.terms.insert(vec![0; vars.len()], c);
        }
        p
    }

    pub fn one(vars: &Arc<Vec<String>>) -> Self {
        Self::constant(vars, R::rone())
    }

    pub fn var(vars: &Arc<Vec<String>>, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Self::monomial(vars, e, R::rone())
    }

    pub fn var_named(vars: &Arc<Vec<String>>, name: &str) -> Result<Self, Error> {
        let i = vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::Domain(format!("unknown variable {}", name)))?;
        Ok(Self::var(vars, i))
    }

    pub fn monomial(vars: &Arc<Vec<String>>, e: Exponent, c: R) -> Self {
        assert_eq!(e.len(), vars.len());
        let mut p = Self::zero(vars);
        if !c.ris_zero() {
            p.terms.insert(e, c);
        }
        p
    }

    pub fn from_terms(vars: &Arc<Vec<String>>, it: impl IntoIterator<Item = (Exponent, R)>) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn vars(&self) -> &Arc<Vec<String>> {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, R> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[u16]) -> R {
        self.terms.get(e).cloned().unwrap_or_else(R::rzero)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    fn check_vars(&self, o: &Self) {
        assert!(Arc::ptr_eq(&self.vars, &o.vars) || self.vars == o.vars, "variable sets differ");
    }

    pub fn add_term(&mut self, e: Exponent, c: R) {
        if c.ris_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                let s = v.radd(&c);
                if s.ris_zero() {
                    self.terms.remove(&e);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn add_assign(&mut self, o: &Self) {
        self.check_vars(o);
        for (e, c) in &o.terms {
            self.add_term(e.clone(), c.clone());
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut p = self.clone();
        p.add_assign(o);
        p
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.rneg())).collect(),
        }
    }

    pub fn scale(&self, s: &R) -> Self {
        if s.ris_zero() {
            return Self::zero(&self.vars);
        }
        let terms = self
            .terms
            .iter()
            .filter_map(|(e, c)| {
                let v = c.rmul(s);
                if v.ris_zero() {
                    None
                } else {
                    Some((e.clone(), v))
                }
            })
            .collect();
        MultiPoly {
            vars: self.vars.clone(),
            terms,
        }
    }

    pub fn scale_rat(&self, s: &Rational) -> Self {
        self.scale(&R::from_rat(s))
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check_vars(o);
        let mut out = Self::zero(&self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.rmul(c2));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.vars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().map(|&x| x as u32).sum()).max()
    }

    /// Degree in the given variable group, if the polynomial is homogeneous in it.
    pub fn homogeneous_degree_in(&self, idx: &[usize]) -> Option<u32> {
        let mut d = None;
        for e in self.terms.keys() {
            let t: u32 = idx.iter().map(|&i| e[i] as u32).sum();
            match d {
                None => d = Some(t),
                Some(x) if x != t => return None,
                _ => {}
            }
        }
        d.or(Some(0))
    }

    pub fn is_homogeneous(&self) -> bool {
        let all: Vec<usize> = (0..self.nvars()).collect();
        self.homogeneous_degree_in(&all).is_some()
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut f = e.clone();
            f[i] -= 1;
            out.add_term(f, c.rscale(&ri(e[i] as i64)));
        }
        out
    }

    /// Σ_v w_v ∂²p/∂x_v² over the listed variables.
    pub fn weighted_laplacian(&self, idx: &[usize], weights: &[Rational]) -> Self {
        let mut out = Self::zero(&self.vars);
        for (k, &i) in idx.iter().enumerate() {
            out.add_assign(&self.derivative(i).derivative(i).scale_rat(&weights[k]));
        }
        out
    }

    /// Σ_v ∂²p/∂x_v ∂y_v over paired variable lists.
    pub fn mixed_laplacian(&self, a: &[usize], b: &[usize], weights: &[Rational]) -> Self {
        let mut out = Self::zero(&self.vars);
        for k in 0..a.len() {
            out.add_assign(&self.derivative(a[k]).derivative(b[k]).scale_rat(&weights[k]));
        }
        out
    }

    pub fn eval(&self, x: &[R]) -> R {
        assert_eq!(x.len(), self.nvars());
        let mut acc = R::rzero();
        let mut cache: Vec<Vec<R>> = x.iter().map(|v| vec![R::rone(), v.clone()]).collect();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while cache[i].len() <= k as usize {
                    let nxt = cache[i].last().unwrap().rmul(&x[i]);
                    cache[i].push(nxt);
                }
                t = t.rmul(&cache[i][k as usize]);
            }
            acc = acc.radd(&t);
        }
        acc
    }

    /// Substitutes polynomial images (over a common variable set) for every variable.
    pub fn compose(&self, images: &[MultiPoly<R>]) -> MultiPoly<R> {
        assert_eq!(images.len(), self.nvars());
        let target = images.first().map(|p| p.vars.clone()).unwrap_or_else(|| self.vars.clone());
        let mut cache: Vec<Vec<MultiPoly<R>>> = images.iter().map(|p| vec![MultiPoly::one(&target), p.clone()]).collect();
        let mut out = MultiPoly::zero(&target);
        for (e, c) in &self.terms {
            let mut t = MultiPoly::constant(&target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while cache[i].len() <= k as usize {
                    let nxt = cache[i].last().unwrap().mul(&images[i]);
                    cache[i].push(nxt);
                }
                t = t.mul(&cache[i][k as usize]);
            }
            out.add_assign(&t);
        }
        out
    }

    /// Fixes some variables to values, keeping the variable set.
    pub fn partial_eval(&self, assign: &[(usize, R)]) -> Self {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            let mut t = c.clone();
            let mut f = e.clone();
            for (i, v) in assign {
                t = t.rmul(&v.rpow(e[*i] as u32));
                f[*i] = 0;
            }
            out.add_term(f, t);
        }
        out
    }

    /// Re-expresses the polynomial over a larger variable set via an index map.
    pub fn embed(&self, target: &Arc<Vec<String>>, map: &[usize]) -> Self {
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut f = vec![0u16; target.len()];
            for (i, &k) in e.iter().enumerate() {
                f[map[i]] += k;
            }
            out.add_term(f, c.clone());
        }
        out
    }

    pub fn map_coeffs<S: Ring>(&self, f: impl Fn(&R) -> S) -> MultiPoly<S> {
        let mut out = MultiPoly::zero(&self.vars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// Keeps the terms whose exponents satisfy a predicate.
    pub fn filter_terms(&self, pred: impl Fn(&Exponent) -> bool) -> Self {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().filter(|(e, _)| pred(e)).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    /// Applies the constant-coefficient operator S(w_1 ∂_1, ..., w_n ∂_n) to self.
    pub fn apply_operator(&self, s: &MultiPoly<R>, weights: &[Rational]) -> Self {
        self.check_vars(s);
        let mut out = Self::zero(&self.vars);
        for (es, cs) in &s.terms {
            let mut scale = cs.clone();
            for (i, &k) in es.iter().enumerate() {
                if k > 0 {
                    scale = scale.rscale(&super::rational::rpow(&weights[i], k as i64));
                }
            }
            for (e, c) in &self.terms {
                if e.iter().zip(es).any(|(a, b)| a < b) {
                    continue;
                }
                let mut f = Rational::from_integer(1.into());
                let mut ne = e.clone();
                for i in 0..e.len() {
                    for t in 0..es[i] {
                        f *= ri((e[i] - t) as i64);
                    }
                    ne[i] = e[i] - es[i];
                }
                out.add_term(ne, c.rmul(&scale).rscale(&f));
            }
        }
        out
    }
}

impl<R: Ring> fmt::Debug for MultiPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl<R: Ring> fmt::Display for MultiPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:?})", c)?;
            for (i, &k) in e.iter().enumerate() {
                if k == 1 {
                    write!(f, "*{}", self.vars[i])?;
                } else if k > 1 {
                    write!(f, "*{}^{}", self.vars[i], k)?;
                }
            }
        }
        Ok(())
    }
}

/// Σ_v ∂²p/∂v² over variables given by name.
pub fn poly_apply_laplacian<R: Ring>(p: &MultiPoly<R>, vars: &[&str]) -> Result<MultiPoly<R>, Error> {
    let idx: Result<Vec<usize>, Error> = vars
        .iter()
        .map(|v| p.index_of(v).ok_or_else(|| Error::Domain(format!("unknown variable {}", v))))
        .collect();
    let idx = idx?;
    let w = vec![ri(1); idx.len()];
    Ok(p.weighted_laplacian(&idx, &w))
}

/// All exponent vectors of total degree d in n variables, in lexicographic order.
pub fn exponents_of_degree(n: usize, d: u32) -> Vec<Exponent> {
    let mut out = Vec::new();
    let mut cur = vec![0u16; n];
    fn rec(i: usize, rem: u32, cur: &mut Vec<u16>, out: &mut Vec<Exponent>) {
        let n = cur.len();
        if i == n - 1 {
            cur[i] = rem as u16;
            out.push(cur.clone());
            return;
        }
        for k in (0..=rem).rev() {
            cur[i] = k as u16;
            rec(i + 1, rem - k, cur, out);
        }
    }
    if n == 0 {
        if d == 0 {
            out.push(vec![]);
        }
        return out;
    }
    rec(0, d, &mut cur, &mut out);
    out
}
