use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::exact_core::linalg::Matrix;
use crate::exact_core::rational::{common_denominator, Rational};
use crate::Error;

/// Positive definite quadratic form x ↦ xᵗQx scaled to integers.
///
/// `scale` is the common denominator D with int_gram = D·Q.
#[derive(Clone, Debug)]
pub struct IntForm {
    pub gram: Vec<Vec<i128>>,
    pub scale: i128,
    chol_diag: Vec<f64>,
    chol_mu: Vec<Vec<f64>>,
}

impl IntForm {
    pub fn new(q: &Matrix<Rational>) -> Result<Self, Error> {
        let n = q.len();
        let d = common_denominator(q.iter().flatten());
        let dr = Rational::from_integer(d.clone());
        let gram: Vec<Vec<i128>> = q
            .iter()
            .map(|r| r.iter().map(|x| (x * &dr).to_integer().to_i128().expect("Gram entry fits i128")).collect())
            .collect();
        // q_ii and μ_ij from the square-completion Q(x) = Σ q_ii (x_i + Σ_{j>i} μ_ij x_j)²
        let mut a: Vec<Vec<f64>> = gram.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
        let mut diag = vec![0.0; n];
        let mut mu = vec![vec![0.0; n]; n];
        for i in 0..n {
            if a[i][i] <= 0.0 {
                return Err(Error::Domain("quadratic form is not positive definite".into()));
            }
            diag[i] = a[i][i];
            for j in i + 1..n {
                mu[i][j] = a[i][j] / a[i][i];
            }
            for j in i + 1..n {
                for k in i + 1..n {
                    a[j][k] -= mu[i][j] * a[i][k];
                }
            }
        }
        Ok(IntForm {
            gram,
            scale: d.to_i128().unwrap(),
            chol_diag: diag,
            chol_mu: mu,
        })
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    pub fn eval_int(&self, x: &[i64]) -> i128 {
        let n = self.dim();
        let mut s = 0i128;
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            let mut t = 0i128;
            for j in 0..n {
                t += self.gram[i][j] * x[j] as i128;
            }
            s += x[i] as i128 * t;
        }
        s
    }

    pub fn eval(&self, x: &[i64]) -> Rational {
        Rational::new(self.eval_int(x).into(), self.scale.into())
    }

    /// All x with xᵗQx ≤ bound, sorted lexicographically, with their scaled values.
    ///
    /// Enumeration runs in floating point over a slightly enlarged ellipsoid;
    /// membership is then decided by exact integer evaluation.
    pub fn enumerate_up_to(&self, bound: &Rational) -> Vec<(Vec<i64>, i128)> {
        let n = self.dim();
        let b_int = (bound * Rational::from_integer(self.scale.into())).floor().to_integer().to_i128().unwrap();
        if b_int < 0 {
            return vec![];
        }
        if n == 0 {
            return vec![(vec![], 0)];
        }
        let budget = b_int as f64 * (1.0 + 1e-9) + 1e-6;
        let top = n - 1;
        let r = (budget / self.chol_diag[top]).sqrt();
        let lo = (-r).floor() as i64;
        let hi = r.ceil() as i64;
        let mut out: Vec<(Vec<i64>, i128)> = (lo..=hi)
            .into_par_iter()
            .flat_map_iter(|xt| {
                let mut acc = Vec::new();
                let mut x = vec![0i64; n];
                x[top] = xt;
                let rem = budget - self.chol_diag[top] * (xt as f64).powi(2);
                if rem >= 0.0 {
                    self.recurse(top, rem, &mut x, b_int, &mut acc);
                }
                acc
            })
            .collect();
        out.sort();
        out
    }

    fn recurse(&self, level: usize, rem: f64, x: &mut Vec<i64>, b_int: i128, acc: &mut Vec<(Vec<i64>, i128)>) {
        if level == 0 {
            let v = self.eval_int(x);
            if v <= b_int {
                acc.push((x.clone(), v));
            }
            return;
        }
        let i = level - 1;
        let n = self.dim();
        let mut c = 0.0;
        for j in i + 1..n {
            c -= self.chol_mu[i][j] * x[j] as f64;
        }
        let r = (rem.max(0.0) / self.chol_diag[i]).sqrt();
        let lo = (c - r).floor() as i64;
        let hi = (c + r).ceil() as i64;
        for xi in lo..=hi {
            let t = xi as f64 - c;
            let nrem = rem - self.chol_diag[i] * t * t;
            if nrem < -1e-6 * (1.0 + rem.abs()) {
                continue;
            }
            x[i] = xi;
            self.recurse(i, nrem, x, b_int, acc);
        }
        x[i] = 0;
    }
}

/// All lattice coordinate vectors of exactly the target norm xᵗQx = target.
pub fn short_vectors(q: &Matrix<Rational>, target: &Rational) -> Result<Vec<Vec<i64>>, Error> {
    let f = IntForm::new(q)?;
    let t = target * Rational::from_integer(f.scale.into());
    if !t.is_integer() {
        return Ok(vec![]);
    }
    let ti = t.to_integer().to_i128().unwrap();
    Ok(f.enumerate_up_to(target).into_iter().filter(|(_, v)| *v == ti).map(|(x, _)| x).collect())
}

/// Direct box scan used as a completeness oracle on small inputs.
pub fn brute_force_vectors(q: &Matrix<Rational>, target: &Rational, box_bound: i64) -> Vec<Vec<i64>> {
    let n = q.len();
    let f = IntForm::new(q).unwrap();
    let mut out = Vec::new();
    let mut x = vec![-box_bound; n];
    loop {
        if &f.eval(&x) == target {
            out.push(x.clone());
        }
        let mut i = 0;
        loop {
            if i == n {
                out.sort();
                return out;
            }
            if x[i] < box_bound {
                x[i] += 1;
                break;
            }
            x[i] = -box_bound;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_core::rational::ri;

    #[test]
    fn zero_target_gives_origin() {
        let q = vec![vec![ri(1), ri(0)], vec![ri(0), ri(1)]];
        assert_eq!(short_vectors(&q, &ri(0)).unwrap(), vec![vec![0, 0]]);
    }

    #[test]
    fn sum_of_four_squares() {
        let q: Matrix<Rational> = (0..4).map(|i| (0..4).map(|j| ri((i == j) as i64)).collect()).collect();
        // r_4(n) = 8 σ(n) for odd n, 24 σ(odd part) for even n
        assert_eq!(short_vectors(&q, &ri(1)).unwrap().len(), 8);
        assert_eq!(short_vectors(&q, &ri(2)).unwrap().len(), 24);
        assert_eq!(short_vectors(&q, &ri(3)).unwrap().len(), 32);
        assert_eq!(short_vectors(&q, &ri(5)).unwrap().len(), 48);
    }
}
