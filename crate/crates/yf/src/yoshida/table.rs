use std::collections::BTreeMap;

use crate::exact_core::{NfElem, Ring, SymbolicConstant};
use crate::Error;

use super::forms::{self, Form, Mat2};

/// Truncated Fourier expansion of a Siegel form of weight Sym^j ⊗ det^κ.
///
/// A coefficient is a binary form of degree j in (X1, X2), stored as the
/// coefficients of X1^{j−k} X2^k. The true expansion is
/// coeffs · scale / √scale_root. Keys are the reduced (a, b, c) with
/// a + c ≤ bound, b being the doubled off-diagonal entry.
#[derive(Clone, Debug, PartialEq)]
pub struct SiegelCoeffTable {
    pub j: u32,
    pub kappa: u32,
    pub level: u64,
    pub bound: i64,
    pub coeffs: BTreeMap<Form, Vec<NfElem>>,
    pub scale: SymbolicConstant,
    pub scale_root: NfElem,
}

impl SiegelCoeffTable {
    pub fn new(j: u32, kappa: u32, level: u64, bound: i64) -> Self {
        SiegelCoeffTable {
            j,
            kappa,
            level,
            bound,
            coeffs: BTreeMap::new(),
            scale: SymbolicConstant::one(),
            scale_root: NfElem::rone(),
        }
    }

    pub fn zero_form(&self) -> Vec<NfElem> {
        vec![NfElem::rzero(); self.j as usize + 1]
    }

    /// Exponent of det(U) in A(U T Uᵗ)(X) = det(U)^e · A(T)(X·U) for U ∈ GL₂(ℤ).
    pub fn det_exponent(&self) -> u32 {
        self.kappa + self.j
    }

    /// A(F, T) for any half-integral T, or None when its reduced form lies
    /// beyond the truncation. Uses T = Wᵗ T_red W ⇒ A(T) = det(W)^e A(T_red)(X·Wᵗ).
    pub fn lookup(&self, t: &Form) -> Result<Option<Vec<NfElem>>, Error> {
        let (red, v) = forms::reduce(t)?;
        if forms::trace(&red) > self.bound {
            return Ok(None);
        }
        let base = self.coeffs.get(&red).cloned().unwrap_or_else(|| self.zero_form());
        let w: Mat2 = forms::unimodular_inverse(&v);
        Ok(Some(forms::twist(&base, &forms::transpose(&w), self.det_exponent())))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|f| f.iter().all(|c| c.ris_zero()))
    }

    /// Every singular key carries the zero form.
    pub fn is_cuspidal(&self) -> bool {
        self.coeffs
            .iter()
            .filter(|(t, _)| forms::discriminant(t) == 0)
            .all(|(_, f)| f.iter().all(|c| c.ris_zero()))
    }

    pub fn nonzero_keys(&self) -> Vec<Form> {
        self.coeffs.iter().filter(|(_, f)| f.iter().any(|c| !c.ris_zero())).map(|(t, _)| *t).collect()
    }

    pub fn scale_by(&self, s: &NfElem) -> Self {
        let mut out = self.clone();
        for f in out.coeffs.values_mut() {
            for c in f.iter_mut() {
                *c = c.rmul(s);
            }
        }
        out
    }

    pub fn restrict(&self, bound: i64) -> Self {
        let mut out = self.clone();
        out.bound = bound.min(self.bound);
        out.coeffs.retain(|t, _| forms::trace(t) <= out.bound);
        out
    }

    /// Equality of the scaled expansions on common keys: both tables stand for
    /// the same series when A·s/√r agree, which is tested as a positive
    /// proportionality A' = λA with λ² = (s/s')²·r'/r.
    pub fn same_scaled_series(&self, o: &Self) -> Result<bool, Error> {
        use crate::exact_core::Field;
        let (s1, s2) = (&self.scale, &o.scale);
        if !s1.same_shape(s2) {
            return Ok(false);
        }
        let mut lambda: Option<NfElem> = None;
        for (t, f) in &self.coeffs {
            let Some(g) = o.coeffs.get(t) else { continue };
            for (a, b) in f.iter().zip(g) {
                if a.ris_zero() != b.ris_zero() {
                    return Ok(false);
                }
                if a.ris_zero() {
                    continue;
                }
                let r = b.rdiv(a).unwrap();
                match &lambda {
                    None => lambda = Some(r),
                    Some(l) if *l != r => return Ok(false),
                    _ => {}
                }
            }
        }
        let Some(l) = lambda else { return Ok(true) };
        let k = s1.coefficient.rdiv(&s2.coefficient).unwrap();
        let want = k.rmul(&k).rmul(&o.scale_root).rdiv(&self.scale_root).unwrap();
        Ok(l.rmul(&l) == want && l.rmul(&k).real_embeddings().iter().all(|&x| x > 0.0))
    }
}
