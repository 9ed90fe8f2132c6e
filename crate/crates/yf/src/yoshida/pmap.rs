//! The intertwining map 𝒫 from U_ν₁ ⊗ U_ν₂ into pluriharmonic polynomials on
//! pairs of quaternions.
//!
//! For w = d₁X₁ + d₂X₂ the inner polynomial is S(t) = R₂(w̄ t w), which equals
//! n(w)^ν₂·(τ(w)R₂)(t) with τ(w)P = P(w⁻¹·w). 𝒫(R₁⊗R₂)(d₁, d₂) is
//! (𝒟(S)R₁)(d₁d̄₂ − d₂d̄₁), where 𝒟(S) = S̃(g⁻¹∂) in the diagonal coordinates.
//! The result has degree 2ν₁ in (d₁, d₂) and 2ν₂ in the markers.

use std::sync::{Arc, OnceLock};

use crate::exact_core::multipoly::{names, Exponent};
use crate::exact_core::rational::Rational;
use crate::exact_core::{MultiPoly, Ring};
use crate::harmonics::{pure_vars, pure_weights, HarmonicPoly};
use crate::quatlat::algebra::{Quat, QuaternionAlgebra};
use crate::Error;

/// d1_0..d1_3, d2_0..d2_3 then the markers X1, X2.
pub fn pmap_vars() -> Arc<Vec<String>> {
    static V: OnceLock<Arc<Vec<String>>> = OnceLock::new();
    V.get_or_init(|| names(&["d1_0", "d1_1", "d1_2", "d1_3", "d2_0", "d2_1", "d2_2", "d2_3", "X1", "X2"]))
        .clone()
}

pub fn marker_vars() -> Arc<Vec<String>> {
    static V: OnceLock<Arc<Vec<String>>> = OnceLock::new();
    V.get_or_init(|| names(&["X1", "X2"])).clone()
}

/// 𝒫(R₁⊗R₂) as a polynomial in [`pmap_vars`].
#[derive(Clone, Debug, PartialEq)]
pub struct PMapImage<R: Ring = Rational> {
    pub nu1: u32,
    pub nu2: u32,
    pub poly: MultiPoly<R>,
}

impl<R: Ring> PMapImage<R> {
    /// Specializes (d₁, d₂), leaving a binary form in the markers.
    pub fn at(&self, x1: &[R; 4], x2: &[R; 4]) -> MultiPoly<R> {
        let mv = marker_vars();
        let mut images: Vec<MultiPoly<R>> = x1.iter().chain(x2.iter()).map(|c| MultiPoly::constant(&mv, c.clone())).collect();
        images.push(MultiPoly::var(&mv, 0));
        images.push(MultiPoly::var(&mv, 1));
        self.poly.compose(&images)
    }
}

fn quat_const<R: Ring>(vars: &Arc<Vec<String>>, x: &[R; 4]) -> [MultiPoly<R>; 4] {
    [0, 1, 2, 3].map(|t| MultiPoly::constant(vars, x[t].clone()))
}

/// Shared evaluation: d₁, d₂ and the markers are polynomials over one variable set.
pub(crate) fn p_map_core<R: Ring>(
    alg: &QuaternionAlgebra,
    r1: &MultiPoly<R>,
    r2: &MultiPoly<R>,
    d1: &[MultiPoly<R>; 4],
    d2: &[MultiPoly<R>; 4],
    m: [&MultiPoly<R>; 2],
) -> MultiPoly<R> {
    let vars = d1[0].vars().clone();
    let g = pure_weights(alg);
    let ginv: Vec<Rational> = g.iter().map(|x| x.recip()).collect();
    let pv = pure_vars();

    let q = alg.mul_gen(d1, &alg.conj_gen(d2));
    let z: Vec<MultiPoly<R>> = (1..4).map(|u| q[u].scale_rat(&Rational::from_integer(2.into()))).collect();

    // S split by its t-exponent: S = Σ_α t^α C_α(d, X)
    let mut parts: Vec<(Exponent, MultiPoly<R>)> = Vec::new();
    if r2.terms().keys().all(|e| e.iter().all(|&k| k == 0)) {
        parts.push((vec![0, 0, 0], MultiPoly::constant(&vars, r2.coeff(&[0, 0, 0]))));
    } else {
        let w: [MultiPoly<R>; 4] = [0, 1, 2, 3].map(|t| d1[t].mul(m[0]).add(&d2[t].mul(m[1])));
        let wb = alg.conj_gen(&w);
        let mut ext_names: Vec<String> = vec!["t1".into(), "t2".into(), "t3".into()];
        ext_names.extend(vars.iter().cloned());
        let ext = Arc::new(ext_names);
        let map: Vec<usize> = (0..vars.len()).map(|i| i + 3).collect();
        // coordinate u of w̄ t w = Σ_v t_v (w̄ e_v w)_u
        let mut images: Vec<MultiPoly<R>> = vec![MultiPoly::zero(&ext); 3];
        for v in 0..3 {
            let mut e: [R; 4] = [R::rzero(), R::rzero(), R::rzero(), R::rzero()];
            e[v + 1] = R::rone();
            let ev = quat_const(&vars, &e);
            let c = alg.mul_gen(&alg.mul_gen(&wb, &ev), &w);
            let tv = MultiPoly::var(&ext, v);
            for u in 0..3 {
                images[u] = images[u].add(&c[u + 1].embed(&ext, &map).mul(&tv));
            }
        }
        let s = r2.compose(&images);
        let mut by_alpha: std::collections::BTreeMap<Exponent, MultiPoly<R>> = Default::default();
        for (e, c) in s.terms() {
            let alpha = e[..3].to_vec();
            let rest = e[3..].to_vec();
            by_alpha.entry(alpha).or_insert_with(|| MultiPoly::zero(&vars)).add_term(rest, c.clone());
        }
        parts.extend(by_alpha);
    }

    let mut out = MultiPoly::zero(&vars);
    for (alpha, c) in parts {
        let op = MultiPoly::monomial(&pv, alpha, R::rone());
        let d = r1.apply_operator(&op, &ginv);
        if d.is_zero() {
            continue;
        }
        out.add_assign(&d.compose(&z).mul(&c));
    }
    out
}

/// Symbolic 𝒫(R₁⊗R₂) in the variables of [`pmap_vars`].
pub fn p_map<R: Ring>(alg: &QuaternionAlgebra, r1: &HarmonicPoly<R>, r2: &HarmonicPoly<R>) -> Result<PMapImage<R>, Error> {
    if r1.degree < r2.degree {
        return Err(Error::Domain(format!("p_map needs nu1 >= nu2, got {} < {}", r1.degree, r2.degree)));
    }
    let v = pmap_vars();
    let d1 = [0, 1, 2, 3].map(|t| MultiPoly::var(&v, t));
    let d2 = [0, 1, 2, 3].map(|t| MultiPoly::var(&v, 4 + t));
    let x1 = MultiPoly::var(&v, 8);
    let x2 = MultiPoly::var(&v, 9);
    let poly = p_map_core(alg, &r1.poly, &r2.poly, &d1, &d2, [&x1, &x2]);
    Ok(PMapImage {
        nu1: r1.degree,
        nu2: r2.degree,
        poly,
    })
}

/// 𝒫(R₁⊗R₂)(x₁, x₂) at rational quaternions, as a binary form in X1, X2.
pub fn p_map_at<R: Ring>(alg: &QuaternionAlgebra, r1: &MultiPoly<R>, r2: &MultiPoly<R>, x1: &Quat, x2: &Quat) -> MultiPoly<R> {
    let mv = marker_vars();
    let lift = |x: &Quat| [0, 1, 2, 3].map(|t| MultiPoly::constant(&mv, R::from_rat(&x[t])));
    let m1 = MultiPoly::var(&mv, 0);
    let m2 = MultiPoly::var(&mv, 1);
    p_map_core(alg, r1, r2, &lift(x1), &lift(x2), [&m1, &m2])
}

/// Coefficients of X1^{j−k} X2^k for k = 0..=j.
pub fn binary_coeffs<R: Ring>(p: &MultiPoly<R>, j: u32) -> Result<Vec<R>, Error> {
    let mut out = vec![R::rzero(); j as usize + 1];
    for (e, c) in p.terms() {
        if e.len() != 2 || (e[0] + e[1]) as u32 != j {
            return Err(Error::Invariant(format!("expected a binary form of degree {}", j)));
        }
        out[e[1] as usize] = c.clone();
    }
    Ok(out)
}

pub fn binary_poly<R: Ring>(c: &[R]) -> MultiPoly<R> {
    let mv = marker_vars();
    let j = c.len() as u16 - 1;
    MultiPoly::from_terms(&mv, c.iter().enumerate().map(|(k, x)| (vec![j - k as u16, k as u16], x.clone())))
}
