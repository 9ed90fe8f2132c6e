//! Automorphic norms, the canonical scaling of a lift and the constants
//! comparing 𝒫 with Gegenbauer kernels.

use std::sync::Arc;

use crate::brandt::AutomorphicVector;
use crate::exact_core::linalg::{inverse, mat_vec, rank, Matrix};
use crate::exact_core::multipoly::names;
use crate::exact_core::rational::{ri, Rational};
use crate::exact_core::{Field, MultiPoly, NfElem, Ring};
use crate::harmonics::{b_linear_form, eval_Ga, find_b, find_isotropic, harmonic_space, pure_weights, HarmonicPoly};
use crate::kernels::build_P_Geg;
use crate::kernels::constants::c7;
use crate::quatlat::algebra::{Quat, QuaternionAlgebra};
use crate::quatlat::classes::IdealClassSet;
use crate::Error;

use super::lift::YoshidaLift;
use super::pmap::{p_map, p_map_at, pmap_vars};
use super::table::SiegelCoeffTable;

/// ⟨φ, φ⟩ = Σ_i e_i⁻¹ ⟨φ(y_i), φ(y_i)⟩ with the bilinear reproducing Gram of U_ν.
pub fn automorphic_norm(cs: &IdealClassSet, phi: &AutomorphicVector<NfElem>) -> Result<NfElem, Error> {
    let sp = harmonic_space(cs.algebra(), phi.nu)?;
    if phi.values.len() != cs.h() {
        return Err(Error::Domain("class-set mismatch".into()));
    }
    let mut s = NfElem::rzero();
    for (v, &e) in phi.values.iter().zip(&cs.unit_counts) {
        s = s.radd(&sp.inner_coords(v, v).rscale(&Rational::new(1.into(), (e as i64).into())));
    }
    Ok(s)
}

/// F scaled by 1/(c₇ √(⟨φ₁,φ₁⟩⟨φ₂,φ₂⟩)); the square root is kept in `scale_root`.
pub fn canonical_scale(
    f: &SiegelCoeffTable,
    cs: &IdealClassSet,
    phi1: &AutomorphicVector<NfElem>,
    phi2: &AutomorphicVector<NfElem>,
) -> Result<SiegelCoeffTable, Error> {
    let q1 = automorphic_norm(cs, phi1)?;
    let q2 = automorphic_norm(cs, phi2)?;
    if q1.ris_zero() || q2.ris_zero() {
        return Err(Error::Domain("canonical scaling of a lift with a zero-norm input".into()));
    }
    let (n1, n2) = (phi1.nu.max(phi2.nu), phi1.nu.min(phi2.nu));
    let c = c7(n1, n2)?;
    let mut out = f.clone();
    out.scale = f.scale.scale(&c.recip());
    out.scale_root = f.scale_root.rmul(&q1).rmul(&q2);
    Ok(out)
}

/// The lift on trace ≤ `bound`, canonically scaled.
pub fn canonical_lift(cs: &IdealClassSet, phi1: &AutomorphicVector<NfElem>, phi2: &AutomorphicVector<NfElem>, bound: i64) -> Result<SiegelCoeffTable, Error> {
    let raw = YoshidaLift::new(cs, phi1, phi2, bound)?.table(bound)?;
    canonical_scale(&raw, cs, phi1, phi2)
}

/// ⟨𝒫(R₁⊗R₂), 𝒫(R₁⊗R₂)⟩ / (⟨R₁,R₁⟩⟨R₂,R₂⟩) for scalar-valued images (ν₂ = 0).
///
/// The numerator uses the inner product reproduced by the kernel of type
/// (ν₁, 0) in 2×4 variables: on points x¹..x^m whose kernel values K_ab are
/// nonsingular and span the image space, ⟨P, P⟩ = pᵗK⁻¹p with p_a = P(x^a).
/// Membership of P in that span is checked at further points.
pub fn norm_comparison_factor(alg: &QuaternionAlgebra, r1: &MultiPoly<Rational>, r2: &MultiPoly<Rational>, nu1: u32, nu2: u32) -> Result<Rational, Error> {
    if nu2 != 0 {
        return Err(Error::Domain("norm comparison is implemented for scalar-valued images only".into()));
    }
    let s1 = harmonic_space(alg, nu1)?;
    let s2 = harmonic_space(alg, nu2)?;
    let n1 = s1.inner(r1, r1)?;
    let n2 = s2.inner(r2, r2)?;
    if n1.ris_zero() || n2.ris_zero() {
        return Err(Error::Domain("zero harmonic input".into()));
    }
    let kern = build_P_Geg(2, 2, nu1 - nu2, 2 * nu2, &ri(2))?;
    let g: Vec<Rational> = alg.norm_diag().to_vec();
    let mv = names(&["X0", "X1", "Y0", "Y1"]);
    let one = MultiPoly::one(&mv);
    let markers = vec![one.clone(), one.clone()];
    let kval = |x: &[Quat; 2], y: &[Quat; 2]| -> Rational {
        let rows: Vec<Vec<MultiPoly<Rational>>> = [&x[0], &x[1], &y[0], &y[1]]
            .iter()
            .map(|q| q.iter().map(|c| MultiPoly::constant(&mv, c.clone())).collect())
            .collect();
        kern.at_vectors(&g, &rows, &markers, &markers).coeff(&[0, 0, 0, 0])
    };
    let pval = |x: &[Quat; 2]| -> Rational { p_map_at(alg, r1, r2, &x[0], &x[1]).coeff(&[0, 0]) };

    let mut pts: Vec<[Quat; 2]> = Vec::new();
    let mut kmat: Matrix<Rational> = Vec::new();
    let mut misses = 0;
    let mut seed: u64 = 0x9e37_79b9;
    let mut next = move || -> i64 {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((seed >> 33) % 7) as i64 - 3
    };
    let mut extra: Vec<[Quat; 2]> = Vec::new();
    while misses < 40 {
        let cand: [Quat; 2] = [[0; 4].map(|_| ri(next())), [0; 4].map(|_| ri(next()))];
        let mut trial = kmat.clone();
        for (r, p) in trial.iter_mut().zip(&pts) {
            r.push(kval(p, &cand));
        }
        let mut last: Vec<Rational> = pts.iter().map(|p| kval(&cand, p)).collect();
        last.push(kval(&cand, &cand));
        trial.push(last);
        if rank(&trial) == trial.len() {
            pts.push(cand);
            kmat = trial;
            misses = 0;
        } else {
            misses += 1;
            if extra.len() < 5 {
                extra.push(cand);
            }
        }
    }
    let kinv = inverse(&kmat).ok_or_else(|| Error::Invariant("kernel matrix is singular".into()))?;
    let p: Vec<Rational> = pts.iter().map(pval).collect();
    let c = mat_vec(&kinv, &p);
    for y in &extra {
        let rec: Rational = pts.iter().zip(&c).map(|(x, ci)| kval(y, x) * ci).sum();
        if rec != pval(y) {
            return Err(Error::Invariant("image of P is not spanned by kernel translates".into()));
        }
    }
    let pp: Rational = p.iter().zip(&c).map(|(a, b)| a * b).sum();
    Ok(pp / (n1 * n2))
}

/// The fixed isotropic a ∈ D_ℂ⁽⁰⁾ and its quaternion (0, a).
fn isotropic(alg: &QuaternionAlgebra) -> Result<([NfElem; 3], [NfElem; 4]), Error> {
    let g = pure_weights(alg);
    let a = find_isotropic(&g, 6)?;
    let aq = [NfElem::rzero(), a[0].clone(), a[1].clone(), a[2].clone()];
    Ok((a, aq))
}

fn ratio(lhs: &MultiPoly<NfElem>, rhs: &MultiPoly<NfElem>) -> Result<NfElem, Error> {
    let (e, c) = rhs.terms().iter().next().ok_or_else(|| Error::Invariant("comparison target vanishes".into()))?;
    let r = lhs.coeff(e).rdiv(c).unwrap();
    if lhs != &rhs.scale(&r) {
        return Err(Error::Invariant("the two sides are not proportional".into()));
    }
    Ok(r)
}

/// B(a, d) = trd(a d̄) with d a generic quaternion.
fn b_full(alg: &QuaternionAlgebra, aq: &[NfElem; 4], d: &[MultiPoly<NfElem>; 4]) -> MultiPoly<NfElem> {
    let vars = d[0].vars().clone();
    let a = aq.clone().map(|c| MultiPoly::constant(&vars, c));
    alg.bilinear_gen(&a, d).scale_rat(&ri(2))
}

/// G̃_a^{(m)}(Im(d₁d̄₂)) with Im(d₁d̄₂) = d₁d̄₂ − d₂d̄₁.
fn ga_at_im(alg: &QuaternionAlgebra, a: &[NfElem; 3], m: u32, d1: &[MultiPoly<NfElem>; 4], d2: &[MultiPoly<NfElem>; 4]) -> MultiPoly<NfElem> {
    let g = pure_weights(alg);
    let q = alg.mul_gen(d1, &alg.conj_gen(d2));
    let z: Vec<MultiPoly<NfElem>> = (1..4).map(|u| q[u].scale_rat(&ri(2))).collect();
    b_linear_form(&g, a).pow(m).compose(&z)
}

/// The constant c with 𝒫(G̃_a^{(ν₁)}⊗G̃_a^{(ν₂)}) = c·(B(a,d₁)X₁+B(a,d₂)X₂)^{2ν₂}·G̃_a^{(ν₁−ν₂)}(Im(d₁d̄₂)),
/// computed symbolically in (d₁, d₂, X).
pub fn pmap_gegenbauer_constant(alg: &QuaternionAlgebra, nu1: u32, nu2: u32) -> Result<NfElem, Error> {
    let g = pure_weights(alg);
    let (a, aq) = isotropic(alg)?;
    let r1 = HarmonicPoly::new(&g, nu1, eval_Ga(&g, nu1, &a)?)?;
    let r2 = HarmonicPoly::new(&g, nu2, eval_Ga(&g, nu2, &a)?)?;
    let lhs = p_map(alg, &r1, &r2)?.poly;
    let v = pmap_vars();
    let d1 = [0, 1, 2, 3].map(|t| MultiPoly::var(&v, t));
    let d2 = [0, 1, 2, 3].map(|t| MultiPoly::var(&v, 4 + t));
    let lin = b_full(alg, &aq, &d1)
        .mul(&MultiPoly::var(&v, 8))
        .add(&b_full(alg, &aq, &d2).mul(&MultiPoly::var(&v, 9)));
    let rhs = lin.pow(2 * nu2).mul(&ga_at_im(alg, &a, nu1 - nu2, &d1, &d2));
    ratio(&lhs, &rhs)
}

/// The constant c with
/// lim_{λ→0} λ^{−(ν₁−ν₂)} P_Geg((a, a+λb), (d₁, d₂)) = c·(B(a,d₁)Y₀+B(a,d₂)Y₁)^{2ν₂}·G̃_a^{(ν₁−ν₂)}(Im(d₁d̄₂))·(X₀+X₁)^{2ν₂}
/// for the kernel of type (ν₁−ν₂, 2ν₂), markers X on the block (a, a+λb).
/// Lower powers of λ are checked to vanish.
pub fn limit_gegenbauer_constant(alg: &QuaternionAlgebra, nu1: u32, nu2: u32) -> Result<NfElem, Error> {
    if nu1 < nu2 {
        return Err(Error::Domain("limit comparison needs nu1 >= nu2".into()));
    }
    let mu = nu1 - nu2;
    let (a, aq) = isotropic(alg)?;
    let b = find_b(alg, &a)?;
    let kern = build_P_Geg(2, 2, mu, 2 * nu2, &ri(2))?;
    let v: Arc<Vec<String>> = names(&["d1_0", "d1_1", "d1_2", "d1_3", "d2_0", "d2_1", "d2_2", "d2_3", "lam", "X0", "X1", "Y0", "Y1"]);
    let var = |i: usize| MultiPoly::<NfElem>::var(&v, i);
    let lam = var(8);
    let d1 = [0, 1, 2, 3].map(&var);
    let d2 = [0, 1, 2, 3].map(|t| var(4 + t));
    let y0: Vec<MultiPoly<NfElem>> = aq.iter().map(|c| MultiPoly::constant(&v, c.clone())).collect();
    let y1: Vec<MultiPoly<NfElem>> = (0..4).map(|t| y0[t].add(&lam.scale(&b[t]))).collect();
    let rows = vec![y0, y1, d1.to_vec(), d2.to_vec()];
    let g: Vec<Rational> = alg.norm_diag().to_vec();
    let val = kern.at_vectors(&g, &rows, &[var(9), var(10)], &[var(11), var(12)]);
    let mut lead = MultiPoly::zero(&v);
    for (e, c) in val.terms() {
        let k = e[8] as u32;
        if k < mu && !c.ris_zero() {
            return Err(Error::Invariant(format!("λ^{} term survives below the limit order", k)));
        }
        if k == mu {
            let mut e2 = e.clone();
            e2[8] = 0;
            lead.add_term(e2, c.clone());
        }
    }
    let lin = b_full(alg, &aq, &d1).mul(&var(11)).add(&b_full(alg, &aq, &d2).mul(&var(12)));
    let rhs = lin.pow(2 * nu2).mul(&ga_at_im(alg, &a, mu, &d1, &d2)).mul(&var(9).add(&var(10)).pow(2 * nu2));
    ratio(&lead, &rhs)
}
