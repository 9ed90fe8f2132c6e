use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;

use super::algebra::{Quat, QuaternionAlgebra};
use super::lattice::Lattice;
use super::order::{conj_lattice, element, ideal_norm, lattice_product, norm_gram, right_colon, right_order, QuatOrder};
use super::short::short_vectors;
use crate::exact_core::rational::{factorize_u64, is_prime_u64, ri, Rational};
use crate::Error;

/// Left ideal classes of an Eichler order with their right orders and unit groups.
#[derive(Clone, Debug)]
pub struct IdealClassSet {
    pub order: QuatOrder,
    /// Left R-ideals I_1 = R, ..., I_h.
    pub ideals: Vec<Lattice>,
    pub ideal_norms: Vec<Rational>,
    /// R_i = O_r(I_i).
    pub right_orders: Vec<Lattice>,
    pub units: Vec<Vec<Quat>>,
    pub unit_counts: Vec<u64>,
    pub neighbor_prime: u64,
}

/// Σ 1/e_i = ∏_{p|N1}(p−1)·∏_{p|N2}(p+1)/24.
pub fn eichler_mass(n1: u64, n2: u64) -> Rational {
    let mut m = ri(1);
    for (p, _) in factorize_u64(n1) {
        m *= ri(p as i64 - 1);
    }
    for (p, _) in factorize_u64(n2) {
        m *= ri(p as i64 + 1);
    }
    m / ri(24)
}

/// All norm-one elements of an order lattice.
pub fn unit_group(alg: &QuaternionAlgebra, o: &Lattice) -> Result<Vec<Quat>, Error> {
    let g = norm_gram(alg, o);
    let vs = short_vectors(&g, &ri(1))?;
    Ok(vs.iter().map(|c| element(o, c)).collect())
}

/// J ≅ I as left ideals iff some α ∈ (I : J) has n(α) = N(J)/N(I); then I·α = J.
pub fn ideals_isomorphic(alg: &QuaternionAlgebra, i: &Lattice, ni: &Rational, j: &Lattice, nj: &Rational) -> Result<bool, Error> {
    let colon = right_colon(alg, i, j);
    let g = norm_gram(alg, &colon);
    let v = short_vectors(&g, &(nj / ni))?;
    Ok(!v.is_empty())
}

/// The left R-ideals J ⊂ I with [I : J] = p², in HNF order.
pub fn p_neighbors(alg: &QuaternionAlgebra, r: &Lattice, i: &Lattice, ni: &Rational, p: u64) -> Vec<Lattice> {
    let pi = p as i64;
    let pr = ri(pi);
    let pi_lat = i.scale(&pr);
    let mut out = BTreeSet::new();
    let n = 4;
    let total = pi.pow(n as u32);
    for idx in 1..total {
        let mut c = [0i64; 4];
        let mut t = idx;
        for slot in c.iter_mut() {
            *slot = t % pi;
            t /= pi;
        }
        let bc: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
        let v = i.vector(&bc);
        let q = alg.norm(&[v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()]) / ni;
        if !(q / &pr).is_integer() {
            continue;
        }
        let rv = lattice_product(alg, r, &Lattice::from_generators(std::slice::from_ref(&v)).sum(&pi_lat));
        let j = rv.sum(&pi_lat);
        if i.index_of(&j) == ri(pi * pi) {
            out.insert(j);
        }
    }
    out.into_iter().collect()
}

/// Class set by p-neighbour traversal, stopping when the mass is reached.
pub fn class_set(order: &QuatOrder) -> Result<IdealClassSet, Error> {
    let alg = &order.algebra;
    let n = order.level();
    let p = (2..).find(|&q| is_prime_u64(q) && !n.is_multiple_of(q)).unwrap();
    let mass = eichler_mass(order.n1, order.n2);
    let r = order.lattice.clone();

    let mut cs = IdealClassSet {
        order: order.clone(),
        ideals: vec![],
        ideal_norms: vec![],
        right_orders: vec![],
        units: vec![],
        unit_counts: vec![],
        neighbor_prime: p,
    };
    let mut acc = Rational::zero();
    let push = |cs: &mut IdealClassSet, i: Lattice, ni: Rational| -> Result<Rational, Error> {
        let ro = right_order(alg, &i);
        let u = unit_group(alg, &ro)?;
        let e = u.len() as u64;
        cs.ideals.push(i);
        cs.ideal_norms.push(ni);
        cs.right_orders.push(ro);
        cs.units.push(u);
        cs.unit_counts.push(e);
        Ok(Rational::new(1.into(), (e as i64).into()))
    };
    acc += push(&mut cs, r.clone(), ri(1))?;
    let mut frontier = 0;
    while acc < mass && frontier < cs.ideals.len() {
        let i = cs.ideals[frontier].clone();
        let ni = cs.ideal_norms[frontier].clone();
        frontier += 1;
        for j in p_neighbors(alg, &r, &i, &ni, p) {
            let nj = ideal_norm(&r, &j);
            let mut new = true;
            for (k, ik) in cs.ideals.iter().enumerate() {
                if ideals_isomorphic(alg, ik, &cs.ideal_norms[k], &j, &nj)? {
                    new = false;
                    break;
                }
            }
            if new {
                acc += push(&mut cs, j, nj)?;
                if acc >= mass {
                    break;
                }
            }
        }
    }
    if acc != mass {
        return Err(Error::Invariant(format!("class set mass {} differs from Eichler mass {}", acc, mass)));
    }
    Ok(cs)
}

impl IdealClassSet {
    pub fn h(&self) -> usize {
        self.ideals.len()
    }

    pub fn algebra(&self) -> &QuaternionAlgebra {
        &self.order.algebra
    }

    pub fn mass(&self) -> Rational {
        self.unit_counts.iter().map(|&e| Rational::new(1.into(), (e as i64).into())).sum()
    }

    /// Λ_ij = conj(I_j : I_i), a left R_i- and right R_j-module, and n_ij = N(I_i)/N(I_j).
    ///
    /// Elements β ∈ Λ_ij with n(β) = p·n_ij correspond to the index-p² sublattices
    /// of I_i isomorphic to I_j.
    pub fn pair_lattice(&self, i: usize, j: usize) -> (Lattice, Rational) {
        let c = right_colon(self.algebra(), &self.ideals[j], &self.ideals[i]);
        (conj_lattice(&c), &self.ideal_norms[i] / &self.ideal_norms[j])
    }

    /// Lattice vectors of Λ_ij with n(β) = m·n_ij.
    pub fn pair_vectors(&self, i: usize, j: usize, m: &Rational) -> Result<Vec<Quat>, Error> {
        let (l, nij) = self.pair_lattice(i, j);
        let g = norm_gram(self.algebra(), &l);
        let vs = short_vectors(&g, &(m * nij))?;
        Ok(vs.iter().map(|c| element(&l, c)).collect())
    }
}
