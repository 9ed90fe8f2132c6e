//! Half-integral binary forms T = [a, b/2; b/2, c], written (a, b, c) for
//! a x² + b xy + c y², and their GL₂(ℤ) reduction.

use crate::exact_core::{MultiPoly, Ring};
use crate::Error;

use super::pmap::{binary_coeffs, binary_poly, marker_vars};

pub type Form = [i64; 3];
pub type Mat2 = [[i64; 2]; 2];

pub const IDENTITY: Mat2 = [[1, 0], [0, 1]];

pub fn mat_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    let mut out = [[0i64; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = x[r][0] * y[0][c] + x[r][1] * y[1][c];
        }
    }
    out
}

pub fn det(m: &Mat2) -> i64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn transpose(m: &Mat2) -> Mat2 {
    [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
}

/// Inverse of a unimodular matrix.
pub fn unimodular_inverse(m: &Mat2) -> Mat2 {
    let d = det(m);
    assert!(d == 1 || d == -1, "matrix is not unimodular");
    [[m[1][1] * d, -m[0][1] * d], [-m[1][0] * d, m[0][0] * d]]
}

/// Vᵗ T V.
pub fn transform(t: &Form, v: &Mat2) -> Form {
    let [a, b, c] = *t;
    let (p, q, r, s) = (v[0][0], v[0][1], v[1][0], v[1][1]);
    [
        a * p * p + b * p * r + c * r * r,
        2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
        a * q * q + b * q * s + c * s * s,
    ]
}

pub fn discriminant(t: &Form) -> i64 {
    t[1] * t[1] - 4 * t[0] * t[2]
}

pub fn is_psd(t: &Form) -> bool {
    t[0] >= 0 && t[2] >= 0 && discriminant(t) <= 0
}

pub fn is_reduced(t: &Form) -> bool {
    0 <= t[1] && t[1] <= t[0] && t[0] <= t[2]
}

pub fn trace(t: &Form) -> i64 {
    t[0] + t[2]
}

/// (T_red, V) with T_red = Vᵗ T V and 0 ≤ b ≤ a ≤ c.
pub fn reduce(t: &Form) -> Result<(Form, Mat2), Error> {
    if !is_psd(t) {
        return Err(Error::Domain(format!("form {:?} is not positive semidefinite", t)));
    }
    let mut f = *t;
    let mut v = IDENTITY;
    let apply = |f: &mut Form, v: &mut Mat2, s: Mat2| {
        *f = transform(f, &s);
        *v = mat_mul(v, &s);
    };
    loop {
        if f[2] < f[0] {
            apply(&mut f, &mut v, [[0, 1], [1, 0]]);
        }
        if f[0] == 0 {
            // semidefinite with a = 0 forces b = 0
            break;
        }
        let a2 = 2 * f[0];
        let k = (f[0] - f[1]).div_euclid(a2);
        if k != 0 {
            apply(&mut f, &mut v, [[1, k], [0, 1]]);
        }
        if f[2] >= f[0] {
            break;
        }
    }
    if f[1] < 0 {
        apply(&mut f, &mut v, [[1, 0], [0, -1]]);
    }
    debug_assert!(is_reduced(&f));
    Ok((f, v))
}

/// All reduced forms with trace at most `bound`, singular ones included.
pub fn reduced_forms(bound: i64) -> Vec<Form> {
    let mut out = Vec::new();
    for a in 0..=bound / 2 {
        for c in a..=bound - a {
            for b in 0..=a {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// det(M)^e · P(X·M) for a binary form P given by its coefficient list.
pub fn twist<R: Ring>(coeffs: &[R], m: &Mat2, det_power: u32) -> Vec<R> {
    let j = coeffs.len() as u32 - 1;
    let p = binary_poly(coeffs);
    let mv = marker_vars();
    let c = |x: i64| R::from_rat(&crate::exact_core::rational::ri(x));
    let x1 = MultiPoly::var(&mv, 0);
    let x2 = MultiPoly::var(&mv, 1);
    let img1 = x1.scale(&c(m[0][0])).add(&x2.scale(&c(m[1][0])));
    let img2 = x1.scale(&c(m[0][1])).add(&x2.scale(&c(m[1][1])));
    let q = p.compose(&[img1, img2]);
    let s = c(det(m)).rpow(det_power);
    binary_coeffs(&q.scale(&s), j).expect("substitution keeps the degree")
}
