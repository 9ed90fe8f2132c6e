use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::algebra::{qconj, Quat, QuaternionAlgebra};
use super::lattice::Lattice;
use crate::exact_core::linalg::{self, Matrix};
use crate::exact_core::rational::{factorize_u64, ri, Rational};
use crate::Error;

pub fn to_quat(v: &[Rational]) -> Quat {
    [v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()]
}

/// An order in a definite quaternion algebra, with its level N1·N2.
#[derive(Clone, Debug, PartialEq)]
pub struct QuatOrder {
    pub algebra: QuaternionAlgebra,
    pub lattice: Lattice,
    pub n1: u64,
    pub n2: u64,
}

impl QuatOrder {
    pub fn level(&self) -> u64 {
        self.n1 * self.n2
    }

    pub fn basis_quats(&self) -> Vec<Quat> {
        self.lattice.basis().iter().map(|r| to_quat(r)).collect()
    }
}

pub fn element(l: &Lattice, c: &[i64]) -> Quat {
    let bc: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
    to_quat(&l.vector(&bc))
}

/// Gram matrix of the reduced norm on a lattice basis.
pub fn norm_gram(alg: &QuaternionAlgebra, l: &Lattice) -> Matrix<Rational> {
    l.gram_diag(&alg.norm_diag())
}

/// Reduced discriminant: √det of the trace-form Gram matrix trd(e_r ē_s).
pub fn reduced_discriminant(alg: &QuaternionAlgebra, l: &Lattice) -> Rational {
    let g = norm_gram(alg, l);
    let d = linalg::det(&g) * ri(16);
    rational_sqrt(&d.abs()).expect("trace-form determinant of a ring lattice is a square")
}

/// Exact square root of a nonnegative rational square.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

pub fn lattice_product(alg: &QuaternionAlgebra, a: &Lattice, b: &Lattice) -> Lattice {
    let mut gens = Vec::with_capacity(16);
    for x in a.basis() {
        for y in b.basis() {
            gens.push(alg.mul(&to_quat(x), &to_quat(y)).to_vec());
        }
    }
    Lattice::from_generators(&gens)
}

pub fn conj_lattice(l: &Lattice) -> Lattice {
    let g: Vec<Vec<Rational>> = l.basis().iter().map(|r| qconj(&to_quat(r)).to_vec()).collect();
    Lattice::from_generators(&g)
}

fn block_solutions(alg: &QuaternionAlgebra, src: &Lattice, dst: &Lattice, left: bool) -> Lattice {
    let binv = linalg::inverse(&dst.basis().to_vec()).expect("full-rank lattice");
    let mut c: Matrix<Rational> = vec![Vec::new(); 4];
    for e in src.basis() {
        let m = if left {
            alg.left_mult_matrix(&to_quat(e))
        } else {
            alg.right_mult_matrix(&to_quat(e))
        };
        let blk = linalg::mat_mul(&m, &binv);
        for (r, row) in blk.into_iter().enumerate() {
            c[r].extend(row);
        }
    }
    Lattice::integral_solutions(&c)
}

/// (I : J) = {y : I·y ⊆ J}.
pub fn right_colon(alg: &QuaternionAlgebra, i: &Lattice, j: &Lattice) -> Lattice {
    block_solutions(alg, i, j, true)
}

/// {y : y·I ⊆ J}.
pub fn left_colon(alg: &QuaternionAlgebra, i: &Lattice, j: &Lattice) -> Lattice {
    block_solutions(alg, i, j, false)
}

pub fn right_order(alg: &QuaternionAlgebra, i: &Lattice) -> Lattice {
    right_colon(alg, i, i)
}

pub fn left_order(alg: &QuaternionAlgebra, i: &Lattice) -> Lattice {
    left_colon(alg, i, i)
}

/// Reduced norm of a lattice I relative to an order O: √(covol(I)/covol(O)).
pub fn ideal_norm(order: &Lattice, i: &Lattice) -> Rational {
    rational_sqrt(&(i.covolume() / order.covolume())).expect("ideal index is a square")
}

pub fn standard_order(_alg: &QuaternionAlgebra) -> Lattice {
    let g: Vec<Vec<Rational>> = (0..4).map(|i| (0..4).map(|j| ri((i == j) as i64)).collect()).collect();
    Lattice::from_generators(&g)
}

pub fn is_integral_element_pub(alg: &QuaternionAlgebra, x: &Quat) -> bool {
    is_integral_element(alg, x)
}

fn is_integral_element(alg: &QuaternionAlgebra, x: &Quat) -> bool {
    alg.trace(x).is_integer() && alg.norm(x).is_integer()
}

/// Smallest ring containing l, or None if products escape integrality.
pub fn ring_closure(alg: &QuaternionAlgebra, l: &Lattice) -> Option<Lattice> {
    let mut cur = l.clone();
    for _ in 0..12 {
        if cur.basis().iter().any(|e| !is_integral_element(alg, &to_quat(e))) {
            return None;
        }
        let next = cur.sum(&lattice_product(alg, &cur, &cur));
        if next == cur {
            return Some(cur);
        }
        cur = next;
    }
    None
}

pub fn is_order(alg: &QuaternionAlgebra, l: &Lattice) -> bool {
    let one = vec![ri(1), ri(0), ri(0), ri(0)];
    l.is_full_rank() && l.contains(&one) && lattice_product(alg, l, l) == *l && l.basis().iter().all(|e| is_integral_element(alg, &to_quat(e)))
}

/// A maximal order, by enlarging ℤ⟨1,i,j,k⟩ one prime at a time.
pub fn maximal_order(alg: &QuaternionAlgebra) -> Result<Lattice, Error> {
    let n1: u64 = alg.ramified_primes.iter().product();
    let target = ri(n1 as i64);
    let mut o = standard_order(alg);
    'outer: loop {
        let d = reduced_discriminant(alg, &o);
        if d == target {
            return Ok(o);
        }
        let q = &d / &target;
        if !q.is_integer() {
            return Err(Error::Invariant(format!("order discriminant {} not a multiple of {}", d, n1)));
        }
        let qi: u64 = num_traits::ToPrimitive::to_u64(&q.to_integer()).unwrap();
        for (p, _) in factorize_u64(qi) {
            let pr = Rational::new(BigInt::one(), BigInt::from(p));
            let pi = p as i64;
            for c0 in 0..pi {
                for c1 in 0..pi {
                    for c2 in 0..pi {
                        for c3 in 0..pi {
                            if c0 == 0 && c1 == 0 && c2 == 0 && c3 == 0 {
                                continue;
                            }
                            let v = element(&o, &[c0, c1, c2, c3]);
                            let x: Quat = [&v[0] * &pr, &v[1] * &pr, &v[2] * &pr, &v[3] * &pr];
                            if o.contains(&x) || !is_integral_element(alg, &x) {
                                continue;
                            }
                            let gen = o.sum(&Lattice::from_generators(&[x.to_vec()]));
                            if let Some(c) = ring_closure(alg, &gen) {
                                let dc = reduced_discriminant(alg, &c);
                                if (&dc / &target).is_integer() && dc < d {
                                    o = c;
                                    continue 'outer;
                                }
                            }
                        }
                    }
                }
            }
        }
        return Err(Error::Invariant(format!("could not enlarge order of discriminant {}", d)));
    }
}

/// Eichler order O ∩ O′ of level N2 inside the maximal order O.
pub fn eichler_order(alg: &QuaternionAlgebra, o: &Lattice, n2: u64) -> Result<Lattice, Error> {
    let mut r = o.clone();
    for (p, e) in factorize_u64(n2) {
        if e > 1 {
            return Err(Error::Domain(format!("N2 = {} is not squarefree", n2)));
        }
        if alg.ramified_primes.contains(&p) {
            return Err(Error::Domain(format!("N2 shares the prime {} with N1", p)));
        }
        let pi = p as i64;
        let pr = ri(pi);
        let po = o.scale(&pr);
        let mut found = None;
        'search: for c0 in 0..pi {
            for c1 in 0..pi {
                for c2 in 0..pi {
                    for c3 in 0..pi {
                        let x = element(o, &[c0, c1, c2, c3]);
                        if po.contains(&x) {
                            continue;
                        }
                        if !(alg.norm(&x) / &pr).is_integer() {
                            continue;
                        }
                        let ox = lattice_product(alg, o, &Lattice::from_generators(&[x.to_vec()]).sum(&po));
                        let ideal = ox.sum(&po);
                        if o.index_of(&ideal) == ri(pi * pi) {
                            found = Some(ideal);
                            break 'search;
                        }
                    }
                }
            }
        }
        let ideal = found.ok_or_else(|| Error::Invariant(format!("no norm-{} left ideal found", p)))?;
        let o2 = right_order(alg, &ideal);
        r = r.intersect(&o2);
    }
    Ok(r)
}

/// Eichler order of level N1·N2 in the algebra ramified at N1.
pub fn build_order(alg: &QuaternionAlgebra, n2: u64) -> Result<QuatOrder, Error> {
    let n1: u64 = alg.ramified_primes.iter().product();
    if num_integer::gcd(n1, n2) != 1 {
        return Err(Error::Domain("N1 and N2 must be coprime".into()));
    }
    let o = maximal_order(alg)?;
    let r = eichler_order(alg, &o, n2)?;
    let d = reduced_discriminant(alg, &r);
    if d != ri((n1 * n2) as i64) || !is_order(alg, &r) {
        return Err(Error::Invariant(format!("constructed order has discriminant {}, expected {}", d, n1 * n2)));
    }
    Ok(QuatOrder {
        algebra: alg.clone(),
        lattice: r,
        n1,
        n2,
    })
}

pub fn is_zero_quat(x: &Quat) -> bool {
    x.iter().all(|c| c.is_zero())
}
