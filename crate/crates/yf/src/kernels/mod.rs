//! Gegenbauer-type kernels Q_α^{(μ,ν)} written in formal Gram entries, and their constants.
//!
//! A kernel lives in the variables t_ab (a ≤ b < 2n) of a symmetric 2n×2n matrix
//! T = (T₁ T₂; T₂ᵗ T₄) together with markers X_0..X_{n−1}, Y_0..Y_{n−1}. For
//! vectors y_0..y_{2n−1} in a space with diagonal form Σ g_v x_v², T is their
//! Gram matrix T_ab = Σ g_v y_av y_bv.

pub mod constants;

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exact_core::linalg::SparseEchelon;
use crate::exact_core::multipoly::Exponent;
use crate::exact_core::rational::{factorial, ri, rising, Rational};
use crate::exact_core::{MultiPoly, Ring};
use crate::Error;

pub use constants::{c_alpha, c_n, ConstantsLedger};

/// Variable layout for kernels with n vectors per side.
#[derive(Debug)]
pub struct KernelVars {
    pub n: usize,
    pub vars: Arc<Vec<String>>,
    pub markers: Arc<Vec<String>>,
}

impl KernelVars {
    fn new(n: usize) -> Self {
        let mut v = Vec::new();
        for a in 0..2 * n {
            for b in a..2 * n {
                v.push(format!("T{}{}", a, b));
            }
        }
        let mut m = Vec::new();
        for r in 0..n {
            m.push(format!("X{}", r));
        }
        for r in 0..n {
            m.push(format!("Y{}", r));
        }
        v.extend(m.iter().cloned());
        KernelVars {
            n,
            vars: Arc::new(v),
            markers: Arc::new(m),
        }
    }

    /// Number of Gram entries n(2n+1).
    pub fn nt(&self) -> usize {
        self.n * (2 * self.n + 1)
    }

    pub fn t(&self, a: usize, b: usize) -> usize {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let m = 2 * self.n;
        // row a starts at Σ_{c<a}(2n−c)
        a * m - a * a.saturating_sub(1) / 2 + (b - a)
    }

    pub fn x(&self, r: usize) -> usize {
        self.nt() + r
    }

    pub fn y(&self, r: usize) -> usize {
        self.nt() + self.n + r
    }

    /// The pair (a, b) behind a Gram variable index.
    pub fn t_pair(&self, idx: usize) -> (usize, usize) {
        let m = 2 * self.n;
        let mut i = idx;
        for a in 0..m {
            if i < m - a {
                return (a, a + i);
            }
            i -= m - a;
        }
        panic!("not a Gram variable index");
    }

    /// Whether both indices lie in the same block.
    pub fn is_diagonal_block(&self, idx: usize) -> bool {
        let (a, b) = self.t_pair(idx);
        (a < self.n) == (b < self.n)
    }

    /// Exponents of the markers are in positions nt..nt+2n.
    pub fn swap_index(&self, i: usize) -> usize {
        let n = self.n;
        if i < self.nt() {
            let (a, b) = self.t_pair(i);
            let s = |c: usize| if c < n { c + n } else { c - n };
            self.t(s(a), s(b))
        } else if i < self.nt() + n {
            i + n
        } else {
            i - n
        }
    }
}

static KVARS: OnceLock<Mutex<HashMap<usize, Arc<KernelVars>>>> = OnceLock::new();

pub fn kernel_vars(n: usize) -> Arc<KernelVars> {
    let m = KVARS.get_or_init(|| Mutex::new(HashMap::new()));
    m.lock().unwrap().entry(n).or_insert_with(|| Arc::new(KernelVars::new(n))).clone()
}

fn tvar(kv: &KernelVars, a: usize, b: usize) -> MultiPoly<Rational> {
    MultiPoly::var(&kv.vars, kv.t(a, b))
}

/// T₁[X] = Σ T_rs X_r X_s over the first block.
pub fn t1x(kv: &KernelVars) -> MultiPoly<Rational> {
    let n = kv.n;
    let mut p = MultiPoly::zero(&kv.vars);
    for r in 0..n {
        for s in 0..n {
            let m = tvar(kv, r, s).mul(&MultiPoly::var(&kv.vars, kv.x(r))).mul(&MultiPoly::var(&kv.vars, kv.x(s)));
            p.add_assign(&m);
        }
    }
    p
}

/// T₄[Y].
pub fn t4y(kv: &KernelVars) -> MultiPoly<Rational> {
    let n = kv.n;
    let mut p = MultiPoly::zero(&kv.vars);
    for r in 0..n {
        for s in 0..n {
            let m = tvar(kv, n + r, n + s)
                .mul(&MultiPoly::var(&kv.vars, kv.y(r)))
                .mul(&MultiPoly::var(&kv.vars, kv.y(s)));
            p.add_assign(&m);
        }
    }
    p
}

/// X T₂ Yᵗ = Σ T_{r,n+s} X_r Y_s.
pub fn xt2y(kv: &KernelVars) -> MultiPoly<Rational> {
    let n = kv.n;
    let mut p = MultiPoly::zero(&kv.vars);
    for r in 0..n {
        for s in 0..n {
            let m = tvar(kv, r, n + s)
                .mul(&MultiPoly::var(&kv.vars, kv.x(r)))
                .mul(&MultiPoly::var(&kv.vars, kv.y(s)));
            p.add_assign(&m);
        }
    }
    p
}

/// det(T₂) by Laplace expansion along the first row.
pub fn det_t2(kv: &KernelVars) -> MultiPoly<Rational> {
    let n = kv.n;
    let m: Vec<Vec<MultiPoly<Rational>>> = (0..n).map(|r| (0..n).map(|s| tvar(kv, r, n + s)).collect()).collect();
    det_poly(&m)
}

fn det_poly(m: &[Vec<MultiPoly<Rational>>]) -> MultiPoly<Rational> {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = MultiPoly::zero(m[0][0].vars());
    for c in 0..n {
        let minor: Vec<Vec<MultiPoly<Rational>>> = (1..n).map(|r| (0..n).filter(|&s| s != c).map(|s| m[r][s].clone()).collect()).collect();
        let t = m[0][c].mul(&det_poly(&minor));
        acc = if c % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
    }
    acc
}

/// Q_α^{(0,ν)}(T) = 1/α^{[ν]} Σ_{2j ≤ ν} (T₁[X]T₄[Y])^j (2XT₂Yᵗ)^{ν−2j} / (j!(ν−2j)!(2−α−ν)^{[j]}).
#[allow(non_snake_case)]
pub fn L_operator(alpha: &Rational, nu: u32, n: usize) -> Result<MultiPoly<Rational>, Error> {
    let kv = kernel_vars(n);
    let an = rising(alpha, nu);
    if an.is_zero() {
        return Err(Error::ExcludedWeight(format!("alpha^[{}] vanishes at alpha = {}", nu, alpha)));
    }
    let quad = t1x(&kv).mul(&t4y(&kv));
    let lin = xt2y(&kv).scale_rat(&ri(2));
    let mut out = MultiPoly::zero(&kv.vars);
    for j in 0..=nu / 2 {
        let pj = rising(&(ri(2) - alpha - ri(nu as i64)), j);
        if pj.is_zero() {
            return Err(Error::ExcludedWeight(format!("(2-alpha-nu)^[{}] vanishes at alpha = {}", j, alpha)));
        }
        let c = (&an * Rational::from_integer(factorial(j) * factorial(nu - 2 * j)) * pj).recip();
        out.add_assign(&quad.pow(j).mul(&lin.pow(nu - 2 * j)).scale_rat(&c));
    }
    Ok(out)
}

/// C_α(μ,ν)·(2XT₂Yᵗ)^ν·det(T₂)^μ.
pub fn main_term(alpha: &Rational, mu: u32, nu: u32, n: usize) -> Result<MultiPoly<Rational>, Error> {
    let kv = kernel_vars(n);
    let c = c_alpha(n as u32, alpha, mu, nu)?;
    Ok(xt2y(&kv).scale_rat(&ri(2)).pow(nu).mul(&det_t2(&kv).pow(mu)).scale_rat(&c))
}

/// Terms free of T₁ and T₄ entries.
pub fn pure_t2_part(p: &MultiPoly<Rational>, n: usize) -> MultiPoly<Rational> {
    let kv = kernel_vars(n);
    let diag: Vec<usize> = (0..kv.nt()).filter(|&i| kv.is_diagonal_block(i)).collect();
    p.filter_terms(|e| diag.iter().all(|&i| e[i] == 0))
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u16>> {
    if parts == 1 {
        return vec![vec![total as u16]];
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions(total - first, parts - 1) {
            let mut v = vec![first as u16];
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

/// Gram monomials in which index a occurs deg[a] times (t_aa counts twice).
fn t_monomials(kv: &KernelVars, deg: &[u16]) -> Vec<Vec<u16>> {
    let m = 2 * kv.n;
    let pairs: Vec<(usize, usize)> = (0..kv.nt()).map(|i| kv.t_pair(i)).collect();
    let mut out = Vec::new();
    let mut rem: Vec<u16> = deg.to_vec();
    let mut cur = vec![0u16; kv.nt()];
    fn rec(i: usize, pairs: &[(usize, usize)], m: usize, rem: &mut Vec<u16>, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if i == pairs.len() {
            if rem.iter().all(|&r| r == 0) {
                out.push(cur.clone());
            }
            return;
        }
        let (a, b) = pairs[i];
        let hi = if a == b { rem[a] / 2 } else { rem[a].min(rem[b]) };
        let last_in_row = b == m - 1;
        for e in 0..=hi {
            if a == b {
                rem[a] -= 2 * e;
            } else {
                rem[a] -= e;
                rem[b] -= e;
            }
            if !(last_in_row && rem[a] != 0) {
                cur[i] = e;
                rec(i + 1, pairs, m, rem, cur, out);
            }
            if a == b {
                rem[a] += 2 * e;
            } else {
                rem[a] += e;
                rem[b] += e;
            }
        }
        cur[i] = 0;
    }
    rec(0, &pairs, m, &mut rem, &mut cur, &mut out);
    out
}

/// Unknown monomials: Sym^ν markers in each block and degree μ + deg_{X_r} in index r.
fn unknown_monomials(kv: &KernelVars, mu: u32, nu: u32) -> Vec<Exponent> {
    let n = kv.n;
    let mut out = Vec::new();
    for xe in compositions(nu, n) {
        for ye in compositions(nu, n) {
            let mut deg: Vec<u16> = xe.iter().map(|&d| d + mu as u16).collect();
            deg.extend(ye.iter().map(|&d| d + mu as u16));
            for tm in t_monomials(kv, &deg) {
                let mut e = tm;
                e.extend(xe.iter().copied());
                e.extend(ye.iter().copied());
                out.push(e);
            }
        }
    }
    out.sort();
    out
}

/// ∂̃_ab = (1+δ_ab)/2 · ∂/∂t_ab on a monomial.
fn dt(kv: &KernelVars, e: &Exponent, a: usize, b: usize) -> Option<(Exponent, Rational)> {
    let v = kv.t(a, b);
    if e[v] == 0 {
        return None;
    }
    let mut f = e.clone();
    f[v] -= 1;
    let c = if a == b {
        ri(e[v] as i64)
    } else {
        Rational::new((e[v] as i64).into(), 2.into())
    };
    Some((f, c))
}

type EqRows = BTreeMap<(u32, Exponent), BTreeMap<usize, Rational>>;

fn push(eqs: &mut EqRows, id: u32, e: Exponent, u: usize, c: Rational) {
    if c.is_zero() {
        return;
    }
    let row = eqs.entry((id, e)).or_default();
    let s = row.entry(u).or_insert_with(Rational::zero);
    *s += c;
}

/// The T-side of the mixed Laplacian Δ_rs in formal Gram entries:
/// (2 Σ_{c,d} T_cd ∂̃_rc ∂̃_sd + m ∂̃_rs), with m the real dimension 2α.
fn laplacian_terms(kv: &KernelVars, e: &Exponent, r: usize, s: usize, m: &Rational) -> Vec<(Exponent, Rational)> {
    let mut out = Vec::new();
    let dim = 2 * kv.n;
    for d in 0..dim {
        let Some((e1, c1)) = dt(kv, e, s, d) else { continue };
        for c in 0..dim {
            let Some((mut e2, c2)) = dt(kv, &e1, r, c) else { continue };
            e2[kv.t(c, d)] += 1;
            out.push((e2, ri(2) * &c1 * c2));
        }
    }
    if let Some((f, c)) = dt(kv, e, r, s) {
        out.push((f, m * c));
    }
    out
}

/// Solves for the unique (up to scalar) kernel of type (α, μ, ν) with n vectors per side.
pub fn solve_kernel(alpha: &Rational, n: usize, mu: u32, nu: u32) -> Result<MultiPoly<Rational>, Error> {
    let kv = kernel_vars(n);
    let unknowns = unknown_monomials(&kv, mu, nu);
    let m = ri(2) * alpha;
    let mut eqs: EqRows = BTreeMap::new();
    let mut next_id = 0u32;
    let mut ids = HashMap::new();
    let mut id_of = |key: (u8, usize, usize, usize)| -> u32 {
        *ids.entry(key).or_insert_with(|| {
            next_id += 1;
            next_id
        })
    };
    for (u, e) in unknowns.iter().enumerate() {
        for blk in 0..2usize {
            let off = blk * n;
            let mk = |r: usize| if blk == 0 { kv.x(r) } else { kv.y(r) };
            for r in 0..n {
                for s in r..n {
                    let id = id_of((0, blk, r, s));
                    for (f, c) in laplacian_terms(&kv, e, off + r, off + s, &m) {
                        push(&mut eqs, id, f, u, c);
                    }
                }
            }
            // 2 Σ_d T_{r d} ∂̃_{s d} P − M_s ∂P/∂M_r for r ≠ s
            for r in 0..n {
                for s in 0..n {
                    if r == s {
                        continue;
                    }
                    let id = id_of((1, blk, r, s));
                    for d in 0..2 * n {
                        if let Some((mut f, c)) = dt(&kv, e, off + s, d) {
                            f[kv.t(off + r, d)] += 1;
                            push(&mut eqs, id, f, u, ri(2) * c);
                        }
                    }
                    let (mr, ms) = (mk(r), mk(s));
                    if e[mr] > 0 {
                        let mut f = e.clone();
                        f[mr] -= 1;
                        f[ms] += 1;
                        push(&mut eqs, id, f, u, -ri(e[mr] as i64));
                    }
                }
            }
        }
        // P = σP: c_e = c_{σe}, one equation per swap orbit
        let mut se = vec![0u16; e.len()];
        for (i, &k) in e.iter().enumerate() {
            se[kv.swap_index(i)] = k;
        }
        if *e < se {
            let id = id_of((2, 0, 0, 0));
            let b = unknowns
                .binary_search(&se)
                .map_err(|_| Error::Invariant("swap image outside the monomial set".into()))?;
            push(&mut eqs, id, e.clone(), u, ri(1));
            push(&mut eqs, id, e.clone(), b, ri(-1));
        }
    }
    let mut ech = SparseEchelon::new();
    for (_, row) in eqs {
        ech.insert(row);
    }
    let ns = ech.nullspace(unknowns.len());
    if ns.len() != 1 {
        return Err(Error::Invariant(format!("kernel solution space has dimension {}", ns.len())));
    }
    Ok(MultiPoly::from_terms(&kv.vars, unknowns.into_iter().zip(ns.into_iter().next().unwrap())))
}

/// A constructed kernel Q_α^{(μ,ν)} for 2k-dimensional vectors.
#[derive(Clone, Debug)]
pub struct GegKernel {
    pub k: u32,
    pub n: usize,
    pub mu: u32,
    pub nu: u32,
    pub alpha: Rational,
    pub poly: MultiPoly<Rational>,
}

static KERNELS: OnceLock<Mutex<HashMap<(u32, usize, u32, u32, Rational), Arc<GegKernel>>>> = OnceLock::new();

/// Kernel of type (μ, ν): from L_operator when μ = 0, from the constraint system otherwise.
#[allow(non_snake_case)]
pub fn build_P_Geg(k: u32, n: usize, mu: u32, nu: u32, alpha: &Rational) -> Result<Arc<GegKernel>, Error> {
    if (k as usize) < n {
        return Err(Error::Domain(format!("2k = {} is below 2n = {}", 2 * k, 2 * n)));
    }
    let key = (k, n, mu, nu, alpha.clone());
    let cache = KERNELS.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(g) = cache.lock().unwrap().get(&key) {
        return Ok(g.clone());
    }
    let poly = if mu == 0 {
        L_operator(alpha, nu, n)?
    } else {
        solved_normalized(alpha, n, mu, nu)?
    };
    let g = Arc::new(GegKernel {
        k,
        n,
        mu,
        nu,
        alpha: alpha.clone(),
        poly,
    });
    cache.lock().unwrap().insert(key, g.clone());
    Ok(g)
}

/// The solver output scaled so its pure-T₂ part is the main term.
pub fn solved_normalized(alpha: &Rational, n: usize, mu: u32, nu: u32) -> Result<MultiPoly<Rational>, Error> {
    let p = solve_kernel(alpha, n, mu, nu)?;
    let target = main_term(alpha, mu, nu, n)?;
    let got = pure_t2_part(&p, n);
    let (e, c) = target.terms().iter().next().ok_or_else(|| Error::Invariant("empty main term".into()))?;
    let have = got.coeff(e);
    if have.is_zero() {
        return Err(Error::Invariant("solved kernel has no main term".into()));
    }
    let p = p.scale_rat(&(c / have));
    if pure_t2_part(&p, n) != target {
        return Err(Error::Invariant(
            "pure-T2 part of the solved kernel is not proportional to the main term".into(),
        ));
    }
    Ok(p)
}

/// Gram matrix T_ab = Σ_v g_v y_av y_bv of rows y_a with entries in any ring.
pub fn gram_matrix<R: Ring>(g: &[Rational], rows: &[Vec<MultiPoly<R>>]) -> Vec<Vec<MultiPoly<R>>> {
    let m = rows.len();
    let vars = rows[0][0].vars().clone();
    let mut t = vec![vec![MultiPoly::zero(&vars); m]; m];
    for a in 0..m {
        for b in a..m {
            let mut s = MultiPoly::zero(&vars);
            for v in 0..g.len() {
                s.add_assign(&rows[a][v].mul(&rows[b][v]).scale_rat(&g[v]));
            }
            t[a][b] = s.clone();
            t[b][a] = s;
        }
    }
    t
}

impl GegKernel {
    pub fn vars(&self) -> Arc<KernelVars> {
        kernel_vars(self.n)
    }

    /// Substitutes a Gram matrix and marker images, all over one variable set.
    pub fn substitute<R: Ring>(&self, t: &[Vec<MultiPoly<R>>], xm: &[MultiPoly<R>], ym: &[MultiPoly<R>]) -> MultiPoly<R> {
        let kv = self.vars();
        let mut images = Vec::with_capacity(kv.vars.len());
        for i in 0..kv.nt() {
            let (a, b) = kv.t_pair(i);
            images.push(t[a][b].clone());
        }
        images.extend(xm.iter().cloned());
        images.extend(ym.iter().cloned());
        self.poly.map_coeffs(|c| R::from_rat(c)).compose(&images)
    }

    /// Value at vectors (y_0..y_{n−1}, y′_0..y′_{n−1}) for the form Σ g_v x_v², as a polynomial in the markers.
    pub fn at_vectors<R: Ring>(&self, g: &[Rational], rows: &[Vec<MultiPoly<R>>], xm: &[MultiPoly<R>], ym: &[MultiPoly<R>]) -> MultiPoly<R> {
        self.substitute(&gram_matrix(g, rows), xm, ym)
    }

    pub fn pure_t2_part(&self) -> MultiPoly<Rational> {
        pure_t2_part(&self.poly, self.n)
    }
}

/// Variables y{a}_{v} for 2n vectors of dimension dim, then the 2n markers.
pub fn vector_vars(n: usize, dim: usize) -> Arc<Vec<String>> {
    let mut v = Vec::new();
    for a in 0..2 * n {
        for c in 0..dim {
            v.push(format!("y{}_{}", a, c));
        }
    }
    for r in 0..n {
        v.push(format!("X{}", r));
    }
    for r in 0..n {
        v.push(format!("Y{}", r));
    }
    Arc::new(v)
}

impl GegKernel {
    /// The kernel as a polynomial in vector coordinates and markers.
    pub fn vector_form(&self, g: &[Rational]) -> MultiPoly<Rational> {
        let dim = g.len();
        let vv = vector_vars(self.n, dim);
        let rows: Vec<Vec<MultiPoly<Rational>>> = (0..2 * self.n).map(|a| (0..dim).map(|c| MultiPoly::var(&vv, a * dim + c)).collect()).collect();
        let base = 2 * self.n * dim;
        let xm: Vec<_> = (0..self.n).map(|r| MultiPoly::var(&vv, base + r)).collect();
        let ym: Vec<_> = (0..self.n).map(|r| MultiPoly::var(&vv, base + self.n + r)).collect();
        self.at_vectors(g, &rows, &xm, &ym)
    }
}

/// (k+μ)^{[ν]} · ν! · (k+μ+ν−2)···(k+μ+ν−⌊ν/2⌋), empty products being 1.
pub fn denominator_bound(k: u32, mu: u32, nu: u32) -> BigInt {
    let km = (k + mu) as i64;
    let mut b = rising(&ri(km), nu).to_integer() * factorial(nu);
    for i in 2..=nu / 2 {
        b *= BigInt::from(km + nu as i64 - i as i64);
    }
    b
}

/// The bound with the factor k+μ+ν−1−⌊ν/2⌋ from the last Pochhammer symbol restored.
pub fn denominator_bound_corrected(k: u32, mu: u32, nu: u32) -> BigInt {
    let km = (k + mu) as i64;
    let mut b = denominator_bound(k, mu, nu);
    if nu >= 2 {
        b *= BigInt::from(km + nu as i64 - 1 - (nu / 2) as i64);
    }
    b
}

pub fn odd_part(x: &BigInt) -> BigInt {
    let mut x = x.abs();
    if x.is_zero() {
        return x;
    }
    let two = BigInt::from(2);
    while x.is_even() {
        x /= &two;
    }
    x
}

/// Outcome of comparing coefficient denominators against a bound.
#[derive(Clone, Debug)]
pub struct DenominatorAudit {
    pub bound: BigInt,
    /// lcm of the odd parts of all coefficient denominators.
    pub odd_lcm: BigInt,
    pub holds: bool,
}

pub fn audit_denominators(p: &MultiPoly<Rational>, bound: &BigInt) -> DenominatorAudit {
    let mut l = BigInt::one();
    for c in p.terms().values() {
        l = l.lcm(&odd_part(c.denom()));
    }
    let holds = (odd_part(bound) % &l).is_zero();
    DenominatorAudit {
        bound: bound.clone(),
        odd_lcm: l,
        holds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_indexing_round_trips() {
        for n in 1..4 {
            let kv = kernel_vars(n);
            for i in 0..kv.nt() {
                let (a, b) = kv.t_pair(i);
                assert_eq!(kv.t(a, b), i);
                assert_eq!(kv.t(b, a), i);
                assert_eq!(kv.swap_index(kv.swap_index(i)), i);
            }
        }
    }
}
