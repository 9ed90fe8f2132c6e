use std::collections::BTreeMap;

use super::poly::Poly;
use super::rational::Rational;
use super::ring::{Field, Ring};

pub type Matrix<F> = Vec<Vec<F>>;

pub fn zeros<F: Ring>(r: usize, c: usize) -> Matrix<F> {
    vec![vec![F::rzero(); c]; r]
}

pub fn identity<F: Ring>(n: usize) -> Matrix<F> {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = F::rone();
    }
    m
}

pub fn mat_mul<F: Ring>(a: &Matrix<F>, b: &Matrix<F>) -> Matrix<F> {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out: Matrix<F> = zeros(n, m);
    for i in 0..n {
        for t in 0..k {
            let x = &a[i][t];
            if x.ris_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] = out[i][j].radd(&x.rmul(&b[t][j]));
            }
        }
    }
    out
}

pub fn mat_vec<F: Ring>(a: &Matrix<F>, v: &[F]) -> Vec<F> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(F::rzero(), |acc, (x, y)| acc.radd(&x.rmul(y))))
        .collect()
}

pub fn transpose<F: Ring>(a: &Matrix<F>) -> Matrix<F> {
    if a.is_empty() {
        return vec![];
    }
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_add<F: Ring>(a: &Matrix<F>, b: &Matrix<F>) -> Matrix<F> {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x.radd(y)).collect()).collect()
}

pub fn mat_sub<F: Ring>(a: &Matrix<F>, b: &Matrix<F>) -> Matrix<F> {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x.rsub(y)).collect()).collect()
}

pub fn mat_scale<F: Ring>(a: &Matrix<F>, s: &F) -> Matrix<F> {
    a.iter().map(|r| r.iter().map(|x| x.rmul(s)).collect()).collect()
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref<F: Field>(m: &mut Matrix<F>) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].ris_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].rinv().unwrap();
        for j in c..cols {
            m[r][j] = m[r][j].rmul(&inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].ris_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let t = m[r][j].rmul(&f);
                    m[i][j] = m[i][j].rsub(&t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<F: Field>(m: &Matrix<F>) -> usize {
    let mut a = m.clone();
    rref(&mut a).len()
}

/// Basis of the right null space {v : m v = 0}.
pub fn kernel<F: Field>(m: &Matrix<F>, ncols: usize) -> Vec<Vec<F>> {
    let mut a = m.clone();
    if a.is_empty() {
        return (0..ncols)
            .map(|i| (0..ncols).map(|j| if i == j { F::rone() } else { F::rzero() }).collect())
            .collect();
    }
    let piv = rref(&mut a);
    let free: Vec<usize> = (0..ncols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![F::rzero(); ncols];
            v[f] = F::rone();
            for (r, &pc) in piv.iter().enumerate() {
                v[pc] = a[r][f].rneg();
            }
            v
        })
        .collect()
}

/// Solves m x = b; returns one solution if consistent.
pub fn solve<F: Field>(m: &Matrix<F>, b: &[F]) -> Option<Vec<F>> {
    let n = if m.is_empty() { 0 } else { m[0].len() };
    let mut a: Matrix<F> = m
        .iter()
        .zip(b)
        .map(|(r, x)| r.iter().cloned().chain(std::iter::once(x.clone())).collect())
        .collect();
    let piv = rref(&mut a);
    if piv.contains(&n) {
        return None;
    }
    let mut x = vec![F::rzero(); n];
    for (r, &pc) in piv.iter().enumerate() {
        x[pc] = a[r][n].clone();
    }
    Some(x)
}

pub fn inverse<F: Field>(m: &Matrix<F>) -> Option<Matrix<F>> {
    let n = m.len();
    let mut a: Matrix<F> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { F::rone() } else { F::rzero() }));
            row
        })
        .collect();
    let piv = rref(&mut a);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn det<F: Field>(m: &Matrix<F>) -> F {
    let n = m.len();
    let mut a = m.clone();
    let mut d = F::rone();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].ris_zero()) else { return F::rzero() };
        if p != c {
            a.swap(p, c);
            d = d.rneg();
        }
        d = d.rmul(&a[c][c]);
        let inv = a[c][c].rinv().unwrap();
        for i in c + 1..n {
            if a[i][c].ris_zero() {
                continue;
            }
            let f = a[i][c].rmul(&inv);
            for j in c..n {
                let t = a[c][j].rmul(&f);
                a[i][j] = a[i][j].rsub(&t);
            }
        }
    }
    d
}

/// Characteristic polynomial det(xI - m) via Hessenberg reduction.
pub fn charpoly<F: Field>(m: &Matrix<F>) -> Poly<F> {
    let n = m.len();
    let mut h = m.clone();
    for c in 0..n.saturating_sub(2) {
        let Some(p) = (c + 1..n).find(|&i| !h[i][c].ris_zero()) else { continue };
        if p != c + 1 {
            h.swap(p, c + 1);
            for row in h.iter_mut() {
                row.swap(p, c + 1);
            }
        }
        let inv = h[c + 1][c].rinv().unwrap();
        for i in c + 2..n {
            if h[i][c].ris_zero() {
                continue;
            }
            let f = h[i][c].rmul(&inv);
            for j in 0..n {
                let t = h[c + 1][j].rmul(&f);
                h[i][j] = h[i][j].rsub(&t);
            }
            for r in 0..n {
                let t = h[r][i].rmul(&f);
                h[r][c + 1] = h[r][c + 1].radd(&t);
            }
        }
    }
    let mut ps: Vec<Poly<F>> = vec![Poly::one()];
    for k in 0..n {
        let lin = Poly::new(vec![h[k][k].rneg(), F::rone()]);
        let mut pk = lin.mul(&ps[k]);
        let mut prod = F::rone();
        for i in (0..k).rev() {
            prod = prod.rmul(&h[i + 1][i]);
            let t = ps[i].scale(&h[i][k].rmul(&prod));
            pk = pk.sub(&t);
        }
        ps.push(pk);
    }
    ps.pop().unwrap()
}

/// Evaluates a rational polynomial at a square matrix.
pub fn poly_at_matrix<F: Field>(p: &Poly<F>, m: &Matrix<F>) -> Matrix<F> {
    let n = m.len();
    let mut acc: Matrix<F> = zeros(n, n);
    for a in p.coeffs().iter().rev() {
        acc = mat_mul(&acc, m);
        for i in 0..n {
            acc[i][i] = acc[i][i].radd(a);
        }
    }
    acc
}

/// Real roots by Durand–Kerner iteration, for numeric sanity checks only.
pub fn real_roots_f64(p: &Poly<Rational>) -> Vec<f64> {
    let c = p.to_f64();
    let n = c.len() - 1;
    if n == 0 {
        return vec![];
    }
    let lead = c[n];
    let c: Vec<f64> = c.iter().map(|x| x / lead).collect();
    let mut z: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let t = 0.4 + 0.9 * k as f64;
            let r = 1.0 + c.iter().map(|x| x.abs()).fold(0.0, f64::max);
            (r * t.cos() * 0.7, r * t.sin() * 0.7)
        })
        .collect();
    let cmul = |a: (f64, f64), b: (f64, f64)| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
    let cdiv = |a: (f64, f64), b: (f64, f64)| {
        let d = b.0 * b.0 + b.1 * b.1;
        ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
    };
    for _ in 0..2000 {
        let mut delta = 0.0;
        for i in 0..n {
            let mut v = (0.0, 0.0);
            for a in c.iter().rev() {
                v = cmul(v, z[i]);
                v.0 += a;
            }
            let mut den = (1.0, 0.0);
            for j in 0..n {
                if j != i {
                    den = cmul(den, (z[i].0 - z[j].0, z[i].1 - z[j].1));
                }
            }
            let step = cdiv(v, den);
            z[i] = (z[i].0 - step.0, z[i].1 - step.1);
            delta += step.0.abs() + step.1.abs();
        }
        if delta < 1e-15 {
            break;
        }
    }
    let mut out: Vec<f64> = z.iter().filter(|w| w.1.abs() < 1e-7 * (1.0 + w.0.abs())).map(|w| w.0).collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Incremental echelon basis of sparse rational row vectors.
///
/// Rows are kept fully reduced with respect to each other's pivots.
#[derive(Default, Debug, Clone)]
pub struct SparseEchelon {
    rows: BTreeMap<usize, BTreeMap<usize, Rational>>,
}

impl SparseEchelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces a row against the basis and inserts it if independent.
    pub fn insert(&mut self, mut row: BTreeMap<usize, Rational>) -> bool {
        use num_traits::Zero;
        row.retain(|_, v| !v.ris_zero());
        // stored rows are fully reduced, so eliminating one pivot never reintroduces another
        let hit: Vec<usize> = row.keys().copied().filter(|k| self.rows.contains_key(k)).collect();
        for p in hit {
            if let Some(c) = row.get(&p).cloned() {
                for (&j, v) in &self.rows[&p] {
                    let e = row.entry(j).or_insert_with(Rational::zero);
                    *e -= &c * v;
                }
            }
        }
        row.retain(|_, v| !v.ris_zero());
        let Some((&p, _)) = row.iter().next() else { return false };
        let inv = row[&p].recip();
        for v in row.values_mut() {
            *v *= &inv;
        }
        for prow in self.rows.values_mut() {
            if let Some(c) = prow.get(&p).cloned() {
                for (&j, v) in &row {
                    let e = prow.entry(j).or_insert_with(Rational::zero);
                    *e -= &c * v;
                }
                prow.retain(|_, v| !v.ris_zero());
            }
        }
        self.rows.insert(p, row);
        true
    }

    /// Basis of {v : r·v = 0 for all stored rows} in dimension n.
    pub fn nullspace(&self, n: usize) -> Vec<Vec<Rational>> {
        use num_traits::{One, Zero};
        let free: Vec<usize> = (0..n).filter(|c| !self.rows.contains_key(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); n];
                v[f] = Rational::one();
                for (&p, prow) in &self.rows {
                    if let Some(c) = prow.get(&f) {
                        v[p] = -c.clone();
                    }
                }
                v
            })
            .collect()
    }
}
