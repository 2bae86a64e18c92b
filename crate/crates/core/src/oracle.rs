//! Brute-force verification oracles.
//!
//! Everything here works by direct enumeration and plain residue arithmetic,
//! deliberately independent of the Smith-normal-form machinery it is used to
//! check. Intended for tests and the acceptance suite; only practical for
//! modules with a few hundred elements.

use crate::matrix::IntMatrix;
use crate::module::FiniteModule;
use crate::pairing::FinitePairing;
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use std::collections::HashSet;

/// All elements of the module, as coordinate vectors.
pub fn elements(m: &FiniteModule) -> Vec<Vec<BigUint>> {
    let ring = m.ring();
    let mut out: Vec<Vec<BigUint>> = vec![Vec::new()];
    for &e in m.exponents() {
        let order = ring.modulus(e);
        let mut next = Vec::with_capacity(out.len());
        for prefix in &out {
            let mut c = BigUint::zero();
            while c < order {
                let mut v = prefix.clone();
                v.push(c.clone());
                next.push(v);
                c += 1u32;
            }
        }
        out = next;
    }
    out
}

/// Coefficient tuples of Hom(M, Lambda_j): coefficient i ranges over
/// [0, l^{e_i}), and the tuple c acts by x -> sum_i c_i l^{j-e_i} x_i.
pub fn hom_tuples(m: &FiniteModule, hom_level: u32) -> Vec<Vec<BigUint>> {
    assert!(hom_level >= m.exponents().first().copied().unwrap_or(1));
    elements(m)
}

/// Value of the hom tuple `c` on the element `x`, in Lambda_j.
pub fn hom_eval(m: &FiniteModule, hom_level: u32, c: &[BigUint], x: &[BigUint]) -> BigUint {
    let ring = m.ring();
    let mut acc = BigUint::zero();
    for ((ci, xi), &e) in c.iter().zip(x).zip(m.exponents()) {
        acc += ci * xi * ring.modulus(hom_level - e);
    }
    acc % ring.modulus(hom_level)
}

/// Pairing value e(h, t) = h^T G t in Lambda_n.
pub fn pairing_value(p: &FinitePairing, h: &[BigUint], t: &[BigUint]) -> BigUint {
    let ring = p.left().ring();
    let n = p.level();
    let g = p.gram();
    let mut acc = BigUint::zero();
    for (i, hi) in h.iter().enumerate() {
        for (j, tj) in t.iter().enumerate() {
            let gij = g[(i, j)].to_biguint().expect("canonical gram entry");
            acc += hi * tj * gij;
        }
    }
    acc % ring.modulus(n)
}

/// Brute-force perfectness: the left adjoint h -> e(h, .) must hit every
/// homomorphism T -> Lambda_n exactly once. Functionals are fingerprinted by
/// their values on the standard generators of T.
pub fn adjoint_is_bijective(p: &FinitePairing) -> bool {
    let n = p.level();
    let t = p.right();
    let t_gens: Vec<Vec<BigUint>> = (0..t.generator_count())
        .map(|j| {
            (0..t.generator_count())
                .map(|k| {
                    if k == j {
                        BigUint::from(1u32)
                    } else {
                        BigUint::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut image: HashSet<Vec<BigUint>> = HashSet::new();
    for h in elements(p.left()) {
        let fingerprint: Vec<BigUint> = t_gens.iter().map(|tg| pairing_value(p, &h, tg)).collect();
        if !image.insert(fingerprint) {
            return false; // not injective
        }
    }
    let mut homs: HashSet<Vec<BigUint>> = HashSet::new();
    for c in hom_tuples(t, n) {
        let fingerprint: Vec<BigUint> = t_gens.iter().map(|tg| hom_eval(t, n, &c, tg)).collect();
        homs.insert(fingerprint);
    }
    image == homs
}

/// Order of the subgroup of `ambient` generated by the columns of `gens`,
/// by breadth-first closure.
pub fn spanned_subgroup_order(ambient: &FiniteModule, gens: &IntMatrix) -> BigUint {
    assert_eq!(gens.rows(), ambient.generator_count());
    let zero: Vec<BigUint> =
        ambient.reduce_coords(&vec![BigInt::zero(); ambient.generator_count()]);
    let mut seen: HashSet<Vec<BigUint>> = HashSet::new();
    seen.insert(zero.clone());
    let mut frontier = vec![zero];
    let cols: Vec<Vec<BigInt>> = (0..gens.cols()).map(|j| gens.col(j)).collect();
    while let Some(x) = frontier.pop() {
        for c in &cols {
            let raw: Vec<BigInt> = x
                .iter()
                .zip(c)
                .map(|(a, b)| BigInt::from(a.clone()) + b)
                .collect();
            let y = ambient.reduce_coords(&raw);
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    BigUint::from(seen.len())
}
