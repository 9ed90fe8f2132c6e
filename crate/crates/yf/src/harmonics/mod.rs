//! Harmonic polynomials U_ν on the trace-zero quaternions, the action τ_ν, the
//! Gegenbauer kernel and its reproducing inner product.
//!
//! A pure quaternion x1·i + x2·j + x3·k is written in the coordinates (x1, x2, x3);
//! the norm form there is Σ g_v x_v² with g = (a, b, ab). "Harmonic" means
//! annihilated by Σ g_v⁻¹ ∂²/∂x_v², which is the flat Laplacian in the
//! orthonormal coordinates t_v = √g_v·x_v. Every computation stays rational.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Zero;

use crate::exact_core::linalg::{self, Matrix};
use crate::exact_core::multipoly::{exponents_of_degree, names, Exponent};
use crate::exact_core::nf::{complex_conj, gauss};
use crate::exact_core::rational::{factorial, half_gamma_ratio, ri, rpow, Rational};
use crate::exact_core::{MultiPoly, NfElem, Ring};
use crate::quatlat::algebra::{qconj, Quat, QuaternionAlgebra};
use crate::Error;

pub fn pure_vars() -> Arc<Vec<String>> {
    static V: OnceLock<Arc<Vec<String>>> = OnceLock::new();
    V.get_or_init(|| names(&["x1", "x2", "x3"])).clone()
}

pub fn pair_vars() -> Arc<Vec<String>> {
    static V: OnceLock<Arc<Vec<String>>> = OnceLock::new();
    V.get_or_init(|| names(&["x1", "x2", "x3", "y1", "y2", "y3"])).clone()
}

/// (a, b, ab), the diagonal norm form on pure quaternions.
pub fn pure_weights(alg: &QuaternionAlgebra) -> [Rational; 3] {
    [ri(alg.a), ri(alg.b), ri(alg.a * alg.b)]
}

/// Σ g_v⁻¹ ∂²p/∂x_v² over the first three variables.
pub fn laplacian<R: Ring>(p: &MultiPoly<R>, g: &[Rational; 3]) -> MultiPoly<R> {
    let w: Vec<Rational> = g.iter().map(|x| x.recip()).collect();
    p.weighted_laplacian(&[0, 1, 2], &w)
}

/// A homogeneous harmonic polynomial of degree `degree` in (x1, x2, x3).
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicPoly<R: Ring = Rational> {
    pub degree: u32,
    pub poly: MultiPoly<R>,
}

impl<R: Ring> HarmonicPoly<R> {
    pub fn new(g: &[Rational; 3], degree: u32, poly: MultiPoly<R>) -> Result<Self, Error> {
        if poly.nvars() != 3 {
            return Err(Error::Domain("harmonic polynomials live in three variables".into()));
        }
        if poly.terms().keys().any(|e| e.iter().map(|&k| k as u32).sum::<u32>() != degree) {
            return Err(Error::Domain(format!("polynomial is not homogeneous of degree {}", degree)));
        }
        if !laplacian(&poly, g).is_zero() {
            return Err(Error::Domain("polynomial is not harmonic".into()));
        }
        Ok(HarmonicPoly { degree, poly })
    }
}

/// U_ν with a monomial-projected basis, the Gegenbauer kernel G^(ν) and the
/// Gram matrix of the inner product for which G^(ν) reproduces.
///
/// `basis[r]` has coefficient 1 at `free[r]` and 0 at every other free
/// monomial, so coordinates of a harmonic polynomial are its coefficients at
/// the free monomials.
#[derive(Clone, Debug)]
pub struct HarmonicSpace {
    pub nu: u32,
    pub weights: [Rational; 3],
    pub free: Vec<Exponent>,
    pub basis: Vec<MultiPoly<Rational>>,
    pub kernel: GegenbauerKernel1D,
    pub gram: InnerProductGram,
}

/// G^(ν)(x, y) in the variables (x1, x2, x3, y1, y2, y3).
#[derive(Clone, Debug, PartialEq)]
pub struct GegenbauerKernel1D {
    pub degree: u32,
    pub kernel: MultiPoly<Rational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InnerProductGram {
    pub degree: u32,
    pub gram: Matrix<Rational>,
}

fn monomial_laplacian_matrix(g: &[Rational; 3], nu: u32) -> (Vec<Exponent>, Matrix<Rational>) {
    let cols = exponents_of_degree(3, nu);
    if nu < 2 {
        return (cols, vec![]);
    }
    let rows = exponents_of_degree(3, nu - 2);
    let index: HashMap<&Exponent, usize> = rows.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let mut m = vec![vec![Rational::zero(); cols.len()]; rows.len()];
    for (c, e) in cols.iter().enumerate() {
        for v in 0..3 {
            if e[v] >= 2 {
                let mut f = e.clone();
                f[v] -= 2;
                m[index[&f]][c] += ri(e[v] as i64 * (e[v] as i64 - 1)) / &g[v];
            }
        }
    }
    (cols, m)
}

/// Free monomials and the dual basis of ker(Δ) on degree-ν forms.
pub fn harmonic_basis(g: &[Rational; 3], nu: u32) -> (Vec<Exponent>, Vec<MultiPoly<Rational>>) {
    let (cols, m) = monomial_laplacian_matrix(g, nu);
    let vars = pure_vars();
    let ker = linalg::kernel(&m, cols.len());
    let pivots = if m.is_empty() {
        vec![]
    } else {
        let mut a = m.clone();
        linalg::rref(&mut a)
    };
    let free_cols: Vec<usize> = (0..cols.len()).filter(|c| !pivots.contains(c)).collect();
    let mut free = Vec::new();
    let mut basis = Vec::new();
    // kernel() returns one vector per free column, in order, with 1 there and 0 at the others
    for (v, &f) in ker.into_iter().zip(&free_cols) {
        free.push(cols[f].clone());
        basis.push(MultiPoly::from_terms(&vars, cols.iter().cloned().zip(v)));
    }
    (free, basis)
}

/// G^(ν)(x,y) = 2^ν Σ_j (−1)^j Γ(ν−j+½)/Γ(½) / (j!(ν−2j)!) · B(x,y)^{ν−2j} (n(x)n(y))^j
/// with B(x, y) = tr(x ȳ) = 2Σ g_v x_v y_v on pure quaternions.
pub fn gegenbauer_polynomial(g: &[Rational; 3], nu: u32) -> MultiPoly<Rational> {
    let vars = pair_vars();
    let xv = |i: usize| MultiPoly::<Rational>::var(&vars, i);
    let mut bxy = MultiPoly::zero(&vars);
    let mut nx = MultiPoly::zero(&vars);
    let mut ny = MultiPoly::zero(&vars);
    for v in 0..3 {
        bxy = bxy.add(&xv(v).mul(&xv(v + 3)).scale_rat(&(ri(2) * &g[v])));
        nx = nx.add(&xv(v).mul(&xv(v)).scale_rat(&g[v]));
        ny = ny.add(&xv(v + 3).mul(&xv(v + 3)).scale_rat(&g[v]));
    }
    let nxy = nx.mul(&ny);
    let mut out = MultiPoly::zero(&vars);
    for j in 0..=nu / 2 {
        let sign = if j % 2 == 0 { ri(1) } else { ri(-1) };
        let c = sign * rpow(&ri(2), nu as i64) * half_gamma_ratio(nu - j) / Rational::from_integer(factorial(j) * factorial(nu - 2 * j));
        out = out.add(&bxy.pow(nu - 2 * j).mul(&nxy.pow(j)).scale_rat(&c));
    }
    out
}

impl HarmonicSpace {
    pub fn new(alg: &QuaternionAlgebra, nu: u32) -> Result<Self, Error> {
        Self::with_weights(pure_weights(alg), nu)
    }

    pub fn with_weights(g: [Rational; 3], nu: u32) -> Result<Self, Error> {
        let (free, basis) = harmonic_basis(&g, nu);
        if free.len() != 2 * nu as usize + 1 {
            return Err(Error::Invariant(format!("harmonic space of degree {} has dimension {}", nu, free.len())));
        }
        let kernel = gegenbauer_polynomial(&g, nu);
        // K_{αβ}: coefficient of x^{free α} y^{free β}; G = Σ K_{αβ} b_α(x) b_β(y)
        let d = free.len();
        let mut k = vec![vec![Rational::zero(); d]; d];
        for (a, ea) in free.iter().enumerate() {
            for (b, eb) in free.iter().enumerate() {
                let mut e = ea.clone();
                e.extend(eb.iter().cloned());
                k[a][b] = kernel.coeff(&e);
            }
        }
        let gram = linalg::inverse(&k).ok_or_else(|| Error::Invariant(format!("Gegenbauer coefficient matrix of degree {} is singular", nu)))?;
        Ok(HarmonicSpace {
            nu,
            weights: g,
            free,
            basis,
            kernel: GegenbauerKernel1D { degree: nu, kernel },
            gram: InnerProductGram { degree: nu, gram },
        })
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// Coordinates in `basis`; errors if p is not in U_ν.
    pub fn coords<R: Ring>(&self, p: &MultiPoly<R>) -> Result<Vec<R>, Error> {
        let c: Vec<R> = self.free.iter().map(|e| p.coeff(e)).collect();
        if &self.from_coords(&c) != p {
            return Err(Error::Domain(format!("polynomial is not a harmonic form of degree {}", self.nu)));
        }
        Ok(c)
    }

    /// Coordinates without the membership check, for polynomials known to lie in U_ν.
    pub fn coords_unchecked<R: Ring>(&self, p: &MultiPoly<R>) -> Vec<R> {
        self.free.iter().map(|e| p.coeff(e)).collect()
    }

    pub fn from_coords<R: Ring>(&self, c: &[R]) -> MultiPoly<R> {
        let vars = pure_vars();
        let mut out = MultiPoly::zero(&vars);
        for (ci, b) in c.iter().zip(&self.basis) {
            if ci.ris_zero() {
                continue;
            }
            for (e, x) in b.terms() {
                out.add_term(e.clone(), ci.rscale(x));
            }
        }
        out
    }

    pub fn harmonic(&self, c: &[Rational]) -> HarmonicPoly {
        HarmonicPoly {
            degree: self.nu,
            poly: self.from_coords(c),
        }
    }

    /// pᵗ M q on coordinate vectors.
    pub fn inner_coords<R: Ring>(&self, p: &[R], q: &[R]) -> R {
        let mut s = R::rzero();
        for (a, pa) in p.iter().enumerate() {
            if pa.ris_zero() {
                continue;
            }
            for (b, qb) in q.iter().enumerate() {
                let m = &self.gram.gram[a][b];
                if !m.is_zero() {
                    s = s.radd(&pa.rmul(qb).rscale(m));
                }
            }
        }
        s
    }

    pub fn inner(&self, p: &MultiPoly<Rational>, q: &MultiPoly<Rational>) -> Result<Rational, Error> {
        Ok(self.inner_coords(&self.coords(p)?, &self.coords(q)?))
    }

    /// Σ p_α M_{αβ} conj(q_β) for polynomials over ℚ(i).
    pub fn inner_hermitian(&self, p: &MultiPoly<NfElem>, q: &MultiPoly<NfElem>) -> Result<NfElem, Error> {
        let pc = self.coords(p)?;
        let qc: Vec<NfElem> = self.coords(q)?.iter().map(complex_conj).collect();
        Ok(self.inner_coords(&pc, &qc))
    }

    /// G(·, y) as a polynomial in x for a fixed y.
    pub fn kernel_at<R: Ring>(&self, y: &[R; 3]) -> MultiPoly<R> {
        let vars = pure_vars();
        let k: MultiPoly<R> = self.kernel.kernel.map_coeffs(R::from_rat);
        let mut images: Vec<MultiPoly<R>> = (0..3).map(|i| MultiPoly::var(&vars, i)).collect();
        images.extend(y.iter().map(|c| MultiPoly::constant(&vars, c.clone())));
        k.compose(&images)
    }

    /// Matrix of the unnormalized action P ↦ P(ȳ x y) on coordinate columns.
    pub fn tau_matrix(&self, alg: &QuaternionAlgebra, y: &Quat) -> Matrix<Rational> {
        let d = self.dim();
        let mut m = vec![vec![Rational::zero(); d]; d];
        for (b, p) in self.basis.iter().enumerate() {
            let img = tau_unnormalized(alg, y, p);
            for (a, c) in self.coords_unchecked(&img).into_iter().enumerate() {
                m[a][b] = c;
            }
        }
        m
    }
}

/// Row v holds the pure coordinates of ȳ·e_v·y for e = (i, j, k).
pub fn conjugation_matrix(alg: &QuaternionAlgebra, y: &Quat) -> [[Rational; 3]; 3] {
    let yb = qconj(y);
    let mut out: [[Rational; 3]; 3] = Default::default();
    for v in 0..3 {
        let mut e: Quat = Default::default();
        e[v + 1] = ri(1);
        let z = alg.mul(&alg.mul(&yb, &e), y);
        debug_assert!(z[0].is_zero());
        out[v] = [z[1].clone(), z[2].clone(), z[3].clone()];
    }
    out
}

/// P(ȳ x y), homogeneous of the same degree and equal to n(y)^ν·P(y⁻¹xy).
pub fn tau_unnormalized<R: Ring>(alg: &QuaternionAlgebra, y: &Quat, p: &MultiPoly<R>) -> MultiPoly<R> {
    let c = conjugation_matrix(alg, y);
    let vars = p.vars().clone();
    let images: Vec<MultiPoly<R>> = (0..3)
        .map(|u| {
            let mut s = MultiPoly::zero(&vars);
            for (v, row) in c.iter().enumerate() {
                s = s.add(&MultiPoly::var(&vars, v).scale(&R::from_rat(&row[u])));
            }
            s
        })
        .collect();
    let mut all = images;
    for i in 3..p.nvars() {
        all.push(MultiPoly::var(&vars, i));
    }
    p.compose(&all)
}

/// (τ_ν(y)P)(x) = P(y⁻¹xy), computed as P(ȳxy)/n(y)^ν.
pub fn tau_action<R: Ring>(alg: &QuaternionAlgebra, y: &Quat, p: &HarmonicPoly<R>) -> Result<HarmonicPoly<R>, Error> {
    let n = alg.norm(y);
    if n.is_zero() {
        return Err(Error::Domain("tau_action needs n(y) != 0".into()));
    }
    let q = tau_unnormalized(alg, y, &p.poly).scale_rat(&rpow(&n, -(p.degree as i64)));
    Ok(HarmonicPoly { degree: p.degree, poly: q })
}

static SPACES: OnceLock<Mutex<HashMap<(i64, i64, u32), Arc<HarmonicSpace>>>> = OnceLock::new();

/// Process-wide immutable cache of harmonic spaces per (a, b, ν).
pub fn harmonic_space(alg: &QuaternionAlgebra, nu: u32) -> Result<Arc<HarmonicSpace>, Error> {
    let store = SPACES.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (alg.a, alg.b, nu);
    if let Some(s) = store.lock().unwrap().get(&key) {
        return Ok(s.clone());
    }
    let s = Arc::new(HarmonicSpace::new(alg, nu)?);
    store.lock().unwrap().insert(key, s.clone());
    Ok(s)
}

/// Both outputs of the Gegenbauer construction for degree ν.
pub fn build_gegenbauer(alg: &QuaternionAlgebra, nu: u32) -> Result<(GegenbauerKernel1D, InnerProductGram), Error> {
    let s = harmonic_space(alg, nu)?;
    Ok((s.kernel.clone(), s.gram.clone()))
}

/// B(a, x) = 2Σ g_v a_v x_v as a linear form in x over ℚ(i).
pub fn b_linear_form(g: &[Rational; 3], a: &[NfElem; 3]) -> MultiPoly<NfElem> {
    let vars = pure_vars();
    let mut s = MultiPoly::zero(&vars);
    for v in 0..3 {
        s = s.add(&MultiPoly::var(&vars, v).scale(&a[v].rscale(&(ri(2) * &g[v]))));
    }
    s
}

pub fn pure_norm_nf(g: &[Rational; 3], a: &[NfElem; 3]) -> NfElem {
    let mut s = NfElem::rzero();
    for v in 0..3 {
        s = s.radd(&a[v].rmul(&a[v]).rscale(&g[v]));
    }
    s
}

/// G̃_a^(ν)(x) = B(a, x)^ν for an isotropic a ∈ D_ℂ⁽⁰⁾ with ℚ(i) coordinates.
#[allow(non_snake_case)]
pub fn eval_Ga(g: &[Rational; 3], nu: u32, a: &[NfElem; 3]) -> Result<MultiPoly<NfElem>, Error> {
    if !pure_norm_nf(g, a).ris_zero() || a.iter().all(|c| c.ris_zero()) {
        return Err(Error::Domain("eval_Ga needs a nonzero a with n(a) = 0".into()));
    }
    Ok(b_linear_form(g, a).pow(nu))
}

/// A nonzero isotropic a = u + i·v with integer u, v: n(u) = n(v), B(u, v) = 0.
///
/// The search visits integer vectors by increasing box size and returns the
/// first hit in a fixed order.
pub fn find_isotropic(g: &[Rational; 3], bound: i64) -> Result<[NfElem; 3], Error> {
    let gi: Vec<i128> = g.iter().map(|x| x.to_integer().try_into().unwrap()).collect();
    let n = |u: &[i64; 3]| -> i128 { (0..3).map(|t| gi[t] * (u[t] as i128).pow(2)).sum() };
    let dot = |u: &[i64; 3], v: &[i64; 3]| -> i128 { (0..3).map(|t| gi[t] * u[t] as i128 * v[t] as i128).sum() };
    for box_b in 1..=bound {
        let mut vecs: Vec<[i64; 3]> = Vec::new();
        for x in -box_b..=box_b {
            for y in -box_b..=box_b {
                for z in -box_b..=box_b {
                    if (x, y, z) != (0, 0, 0) {
                        vecs.push([x, y, z]);
                    }
                }
            }
        }
        let mut by_norm: HashMap<i128, Vec<[i64; 3]>> = HashMap::new();
        for v in &vecs {
            by_norm.entry(n(v)).or_default().push(*v);
        }
        for u in &vecs {
            for v in &by_norm[&n(u)] {
                if dot(u, v) == 0 {
                    return Ok([0, 1, 2].map(|t| gauss(ri(u[t]), ri(v[t]))));
                }
            }
        }
    }
    Err(Error::SearchBound(format!(
        "no isotropic vector over Q(i) with coordinates in [-{0}, {0}]",
        bound
    )))
}

/// Rational coefficients lifted to ℚ(i).
pub fn to_gauss_quat(x: &Quat) -> [NfElem; 4] {
    [0, 1, 2, 3].map(|t| NfElem::rational(x[t].clone()))
}

/// Some b ∈ D_ℂ with a·b = 0 and a·b̄ = a, found as a solution of the linear
/// system; n(b) = 0 is then checked.
pub fn find_b(alg: &QuaternionAlgebra, a: &[NfElem; 3]) -> Result<[NfElem; 4], Error> {
    let aq: [NfElem; 4] = [NfElem::rzero(), a[0].clone(), a[1].clone(), a[2].clone()];
    // columns: images of the unit vectors e_t under b ↦ (a·b, a·b̄)
    let mut rows: Matrix<NfElem> = vec![Vec::new(); 8];
    for t in 0..4 {
        let mut e: [NfElem; 4] = [0, 1, 2, 3].map(|_| NfElem::rzero());
        e[t] = NfElem::rone();
        let ab = alg.mul_gen(&aq, &e);
        let abb = alg.mul_gen(&aq, &alg.conj_gen(&e));
        for r in 0..4 {
            rows[r].push(ab[r].clone());
            rows[r + 4].push(abb[r].clone());
        }
    }
    let rhs: Vec<NfElem> = (0..8).map(|r| if r < 4 { NfElem::rzero() } else { aq[r - 4].clone() }).collect();
    let sol = linalg::solve(&rows, &rhs).ok_or_else(|| Error::Invariant("no b with ab = 0, a conj(b) = a".into()))?;
    let b = [sol[0].clone(), sol[1].clone(), sol[2].clone(), sol[3].clone()];
    if !alg.norm_gen(&b).ris_zero() {
        return Err(Error::Invariant("solution b is not isotropic".into()));
    }
    Ok(b)
}
