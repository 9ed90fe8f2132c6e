use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::exact_core::linalg::{self, Matrix};
use crate::exact_core::rational::{common_denominator, Rational};

/// Full-rank lattice in ℚⁿ stored as rows of its Hermite normal form.
///
/// The HNF is computed on the integer matrix d·basis for the least common
/// denominator d, so two lattices are equal iff their stored bases are equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lattice {
    basis: Vec<Vec<Rational>>,
}

/// Row-style Hermite normal form of an integer matrix; zero rows dropped.
///
/// The result is upper triangular with positive pivots and entries above each
/// pivot reduced into [0, pivot).
pub fn hnf(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    if rows.is_empty() {
        return vec![];
    }
    let ncols = rows[0].len();
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        // gcd-combine every row below into row r
        for i in r + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let a = m[r][c].clone();
            let b = m[i][c].clone();
            let e = a.extended_gcd(&b);
            let (g, x, y) = (e.gcd, e.x, e.y);
            let (ag, bg) = (&a / &g, &b / &g);
            for j in c..ncols {
                let u = &x * &m[r][j] + &y * &m[i][j];
                let v = &ag * &m[i][j] - &bg * &m[r][j];
                m[r][j] = u;
                m[i][j] = v;
            }
        }
        if m[r][c].is_zero() {
            continue;
        }
        if m[r][c].is_negative() {
            for j in c..ncols {
                m[r][j] = -&m[r][j];
            }
        }
        for i in 0..r {
            let q = m[i][c].div_floor(&m[r][c]);
            if !q.is_zero() {
                for j in c..ncols {
                    let t = &q * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    m.truncate(r);
    m.retain(|row| row.iter().any(|x| !x.is_zero()));
    m
}

impl Lattice {
    /// Lattice generated by the given rows (must span full rank).
    pub fn from_generators(gens: &[Vec<Rational>]) -> Self {
        let d = common_denominator(gens.iter().flatten());
        let dr = Rational::from_integer(d.clone());
        let ints: Vec<Vec<BigInt>> = gens.iter().map(|r| r.iter().map(|x| (x * &dr).to_integer()).collect()).collect();
        let h = hnf(&ints);
        let basis: Vec<Vec<Rational>> = h.into_iter().map(|r| r.into_iter().map(|x| Rational::new(x, d.clone())).collect()).collect();
        Lattice { basis }
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn dim(&self) -> usize {
        self.basis.first().map(|r| r.len()).unwrap_or(0)
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim()
    }

    /// |det| of the basis, the covolume in ℚⁿ.
    pub fn covolume(&self) -> Rational {
        linalg::det(&self.basis).abs()
    }

    pub fn sum(&self, o: &Self) -> Self {
        let mut g = self.basis.clone();
        g.extend(o.basis.iter().cloned());
        Self::from_generators(&g)
    }

    /// Dual lattice for the standard dot product.
    pub fn dual(&self) -> Self {
        let inv = linalg::inverse(&self.basis).expect("full-rank lattice");
        Self::from_generators(&linalg::transpose(&inv))
    }

    pub fn intersect(&self, o: &Self) -> Self {
        self.dual().sum(&o.dual()).dual()
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let g: Vec<Vec<Rational>> = self.basis.iter().map(|r| r.iter().map(|x| x * s).collect()).collect();
        Self::from_generators(&g)
    }

    /// Coordinates of v in the stored basis.
    pub fn coords(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        let bt = linalg::transpose(&self.basis);
        linalg::solve(&bt, v)
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.coords(v).map(|c| c.iter().all(|x| x.is_integer())).unwrap_or(false)
    }

    pub fn contains_lattice(&self, o: &Self) -> bool {
        o.basis.iter().all(|v| self.contains(v))
    }

    /// [self : o] for a sublattice o.
    pub fn index_of(&self, o: &Self) -> Rational {
        o.covolume() / self.covolume()
    }

    /// Vector from integer coordinates.
    pub fn vector(&self, c: &[BigInt]) -> Vec<Rational> {
        let n = self.dim();
        let mut v = vec![Rational::zero(); n];
        for (ci, row) in c.iter().zip(&self.basis) {
            if ci.is_zero() {
                continue;
            }
            let cr = Rational::from_integer(ci.clone());
            for j in 0..n {
                v[j] += &cr * &row[j];
            }
        }
        v
    }

    /// Gram matrix of a diagonal form Σ w_t x_t² on the basis.
    pub fn gram_diag(&self, w: &[Rational]) -> Matrix<Rational> {
        let n = self.rank();
        let mut g = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let mut s = Rational::zero();
                for t in 0..w.len() {
                    s += &w[t] * &self.basis[i][t] * &self.basis[j][t];
                }
                g[i][j] = s.clone();
                g[j][i] = s;
            }
        }
        g
    }

    /// {y : y·C has integer entries}, for a matrix C with full row rank.
    pub fn integral_solutions(c: &Matrix<Rational>) -> Self {
        let cols = linalg::transpose(c);
        Self::from_generators(&cols).dual()
    }

    pub fn is_integral(&self) -> bool {
        self.basis.iter().flatten().all(|x| x.is_integer())
    }

    pub fn denominator(&self) -> BigInt {
        common_denominator(self.basis.iter().flatten())
    }

    /// Integer matrix d·basis together with d.
    pub fn scaled_integer_basis(&self) -> (BigInt, Vec<Vec<BigInt>>) {
        let d = self.denominator();
        let dr = Rational::from_integer(d.clone());
        (d, self.basis.iter().map(|r| r.iter().map(|x| (x * &dr).to_integer()).collect()).collect())
    }
}
