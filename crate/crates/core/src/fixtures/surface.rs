//! Simplicial cohomology towers of closed oriented surfaces.
//!
//! For a built-in triangulation this computes H^1 and H^2 with Z/l^n
//! coefficients from the ordered cochain complex, the pairing
//! H^1 x H^1 -> H^2 = Lambda_n induced by the front-face/back-face cup
//! product evaluated against the fundamental class, and the coefficient
//! reduction transitions, assembling them into a tower. An independent
//! universal-coefficients oracle from the integer Smith normal forms of the
//! coboundary matrices cross-checks every cohomology order.

use super::{FixtureError, GroundTruth};
use crate::matrix::IntMatrix;
use crate::module::{decompose, express_in_basis, subquotient_structure, FiniteModule, ModuleMap};
use crate::pairing::FinitePairing;
use crate::ring::LocalRing;
use crate::snf::{kernel_basis, snf, SnfMode};
use crate::tower::{Tower, TowerLevel};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceKind {
    Sphere,
    Torus,
    GenusTwo,
}

impl SurfaceKind {
    pub fn parse(name: &str) -> Option<SurfaceKind> {
        match name {
            "sphere" => Some(SurfaceKind::Sphere),
            "torus" => Some(SurfaceKind::Torus),
            "genus2" | "genus-2" => Some(SurfaceKind::GenusTwo),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SurfaceSpec {
    pub kind: SurfaceKind,
    pub ring: LocalRing,
    pub horizon: u32,
}

/// A closed combinatorial surface with a coherent orientation and a fixed
/// global vertex order; simplices are stored sorted.
#[derive(Debug, Clone)]
pub struct SurfaceComplex {
    vertex_count: usize,
    edges: Vec<[usize; 2]>,
    faces: Vec<[usize; 3]>,
    /// Sign of each face against its sorted vertex order; summing the
    /// oriented faces gives the fundamental class.
    orientation: Vec<i8>,
    edge_index: HashMap<[usize; 2], usize>,
}

impl SurfaceComplex {
    /// Validate a face list as a closed oriented surface and orient it.
    pub fn new(vertex_count: usize, face_list: &[[usize; 3]]) -> Result<Self, FixtureError> {
        let mut faces: Vec<[usize; 3]> = face_list
            .iter()
            .map(|f| {
                let mut g = *f;
                g.sort_unstable();
                g
            })
            .collect();
        faces.sort_unstable();
        for f in &faces {
            if f[0] == f[1] || f[1] == f[2] {
                return Err(FixtureError::InvalidSpec(format!("degenerate face {f:?}")));
            }
            if f[2] >= vertex_count {
                return Err(FixtureError::InvalidSpec(format!(
                    "face {f:?} exceeds vertex count"
                )));
            }
        }
        let mut edge_set: HashMap<[usize; 2], Vec<usize>> = HashMap::new();
        for (fi, f) in faces.iter().enumerate() {
            for e in [[f[0], f[1]], [f[0], f[2]], [f[1], f[2]]] {
                edge_set.entry(e).or_default().push(fi);
            }
        }
        let mut edges: Vec<[usize; 2]> = edge_set.keys().copied().collect();
        edges.sort_unstable();
        for e in &edges {
            let count = edge_set[e].len();
            if count != 2 {
                return Err(FixtureError::InvalidSpec(format!(
                    "not a closed surface: edge {e:?} lies in {count} faces"
                )));
            }
        }
        let edge_index: HashMap<[usize; 2], usize> =
            edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let complex = SurfaceComplex {
            vertex_count,
            edges,
            faces,
            orientation: Vec::new(),
            edge_index,
        };
        complex.check_vertex_links()?;
        let orientation = complex.orient(&edge_set)?;
        Ok(SurfaceComplex {
            orientation,
            ..complex
        })
    }

    // link of every vertex must be a single cycle through all its neighbors
    fn check_vertex_links(&self) -> Result<(), FixtureError> {
        for v in 0..self.vertex_count {
            let mut degree: HashMap<usize, usize> = HashMap::new();
            let mut link: Vec<[usize; 2]> = Vec::new();
            for f in &self.faces {
                if let Some(pos) = f.iter().position(|&x| x == v) {
                    let mut other = [0usize; 2];
                    let mut k = 0;
                    for (i, &x) in f.iter().enumerate() {
                        if i != pos {
                            other[k] = x;
                            k += 1;
                        }
                    }
                    link.push(other);
                    *degree.entry(other[0]).or_insert(0) += 1;
                    *degree.entry(other[1]).or_insert(0) += 1;
                }
            }
            if link.is_empty() {
                return Err(FixtureError::InvalidSpec(format!("isolated vertex {v}")));
            }
            if degree.values().any(|&d| d != 2) {
                return Err(FixtureError::InvalidSpec(format!(
                    "link of vertex {v} is not a union of cycles"
                )));
            }
            // connectivity of the link graph
            let mut reach: Vec<usize> = vec![link[0][0]];
            let mut seen: std::collections::HashSet<usize> = reach.iter().copied().collect();
            while let Some(x) = reach.pop() {
                for e in &link {
                    if e.contains(&x) {
                        for &y in e {
                            if seen.insert(y) {
                                reach.push(y);
                            }
                        }
                    }
                }
            }
            if seen.len() != degree.len() {
                return Err(FixtureError::InvalidSpec(format!(
                    "link of vertex {v} is disconnected"
                )));
            }
        }
        Ok(())
    }

    // breadth-first propagation of face signs; opposite induced directions
    // on every shared edge
    fn orient(
        &self,
        edge_faces: &HashMap<[usize; 2], Vec<usize>>,
    ) -> Result<Vec<i8>, FixtureError> {
        let f_count = self.faces.len();
        let mut orient: Vec<i8> = vec![0; f_count];
        let mut queue = Vec::new();
        for start in 0..f_count {
            if orient[start] != 0 {
                continue;
            }
            orient[start] = 1;
            queue.push(start);
            while let Some(fi) = queue.pop() {
                let f = self.faces[fi];
                for e in [[f[0], f[1]], [f[0], f[2]], [f[1], f[2]]] {
                    let pair = &edge_faces[&e];
                    let gi = if pair[0] == fi { pair[1] } else { pair[0] };
                    let want = -edge_sign(&self.faces[fi], &e)
                        * orient[fi]
                        * edge_sign(&self.faces[gi], &e);
                    if orient[gi] == 0 {
                        orient[gi] = want;
                        queue.push(gi);
                    } else if orient[gi] != want {
                        return Err(FixtureError::InvalidSpec(
                            "surface is not orientable".into(),
                        ));
                    }
                }
            }
        }
        Ok(orient)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn orientation(&self) -> &[i8] {
        &self.orientation
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    pub fn genus(&self) -> u32 {
        ((2 - self.euler_characteristic()) / 2) as u32
    }

    /// Coboundary C^0 -> C^1 (rows indexed by edges).
    pub fn coboundary0(&self) -> IntMatrix {
        IntMatrix::from_fn(self.edges.len(), self.vertex_count, |e, v| {
            let [a, b] = self.edges[e];
            if v == b {
                BigInt::one()
            } else if v == a {
                -BigInt::one()
            } else {
                BigInt::zero()
            }
        })
    }

    /// Coboundary C^1 -> C^2 (rows indexed by faces).
    pub fn coboundary1(&self) -> IntMatrix {
        IntMatrix::from_fn(self.faces.len(), self.edges.len(), |fi, e| {
            let [a, b, c] = self.faces[fi];
            if self.edges[e] == [b, c] {
                BigInt::one()
            } else if self.edges[e] == [a, c] {
                -BigInt::one()
            } else if self.edges[e] == [a, b] {
                BigInt::one()
            } else {
                BigInt::zero()
            }
        })
    }

    /// Pairing of two edge cochains: the cup product x([v0,v1]) * y([v1,v2])
    /// summed over the coherently oriented faces.
    pub fn cup_pairing(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        let mut acc = BigInt::zero();
        for (fi, f) in self.faces.iter().enumerate() {
            let front = self.edge_index[&[f[0], f[1]]];
            let back = self.edge_index[&[f[1], f[2]]];
            acc += BigInt::from(self.orientation[fi]) * &x[front] * &y[back];
        }
        acc
    }

    /// Boundary of the tetrahedron.
    pub fn sphere() -> SurfaceComplex {
        SurfaceComplex::new(4, &[[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]])
            .expect("tetrahedron is a closed oriented surface")
    }

    /// The 7-vertex triangulation of the torus on the complete graph K7.
    pub fn torus() -> SurfaceComplex {
        let mut faces = Vec::new();
        for i in 0..7usize {
            faces.push([i, (i + 1) % 7, (i + 3) % 7]);
            faces.push([i, (i + 2) % 7, (i + 3) % 7]);
        }
        SurfaceComplex::new(7, &faces).expect("7-vertex torus is a closed oriented surface")
    }

    /// Genus-2 surface: two copies of the 7-vertex torus, a face removed
    /// from each, glued along the boundary triangle.
    pub fn genus_two() -> SurfaceComplex {
        let removed = [0usize, 1, 3];
        let mut faces: Vec<[usize; 3]> = Vec::new();
        for i in 0..7usize {
            for f in [[i, (i + 1) % 7, (i + 3) % 7], [i, (i + 2) % 7, (i + 3) % 7]] {
                let mut g = f;
                g.sort_unstable();
                if g != removed {
                    faces.push(g);
                }
            }
        }
        // second copy: keep 0, 1, 3 (the glued triangle), relabel the rest
        let relabel = |v: usize| -> usize {
            match v {
                0 => 0,
                1 => 1,
                3 => 3,
                2 => 7,
                4 => 8,
                5 => 9,
                _ => 10,
            }
        };
        for i in 0..7usize {
            for f in [[i, (i + 1) % 7, (i + 3) % 7], [i, (i + 2) % 7, (i + 3) % 7]] {
                let mut g = f;
                g.sort_unstable();
                if g != removed {
                    let mut mapped = [relabel(g[0]), relabel(g[1]), relabel(g[2])];
                    mapped.sort_unstable();
                    faces.push(mapped);
                }
            }
        }
        SurfaceComplex::new(11, &faces).expect("glued tori form a closed oriented surface")
    }

    /// The 6-vertex projective plane; not orientable, used to exercise the
    /// orientability error path.
    pub fn projective_plane_faces() -> (usize, Vec<[usize; 3]>) {
        (
            6,
            vec![
                [0, 1, 2],
                [0, 1, 3],
                [0, 2, 4],
                [0, 3, 5],
                [0, 4, 5],
                [1, 2, 5],
                [1, 3, 4],
                [1, 4, 5],
                [2, 3, 4],
                [2, 3, 5],
            ],
        )
    }

    pub fn build(kind: SurfaceKind) -> SurfaceComplex {
        match kind {
            SurfaceKind::Sphere => Self::sphere(),
            SurfaceKind::Torus => Self::torus(),
            SurfaceKind::GenusTwo => Self::genus_two(),
        }
    }
}

fn edge_sign(face: &[usize; 3], edge: &[usize; 2]) -> i8 {
    let [a, b, c] = *face;
    if *edge == [b, c] || *edge == [a, b] {
        1
    } else {
        debug_assert_eq!(*edge, [a, c]);
        -1
    }
}

/// H^1 with Z/l^n coefficients: the module, chosen cocycle representatives
/// of its generators, the cup-product Gram matrix, and the orders of H^1
/// and H^2 for cross-checking.
#[derive(Debug, Clone)]
pub struct SurfaceLevelData {
    pub module: FiniteModule,
    pub generators: IntMatrix,
    pub gram: IntMatrix,
    pub h1_order: BigUint,
    pub h2_order: BigUint,
}

pub fn surface_level(
    complex: &SurfaceComplex,
    ring: LocalRing,
    n: u32,
) -> Result<SurfaceLevelData, FixtureError> {
    let e_count = complex.edge_count();
    let d0 = complex.coboundary0();
    let d1 = complex.coboundary1();
    // cocycles mod l^n: integer kernel of [d1 | l^n I]
    let pad = IntMatrix::from_fn(complex.face_count(), complex.face_count(), |i, j| {
        if i == j {
            ring.modulus_int(n)
        } else {
            BigInt::zero()
        }
    });
    let full = kernel_basis(&d1.hstack(&pad));
    let cocycles = IntMatrix::from_fn(e_count, full.cols(), |i, j| full[(i, j)].clone());
    let ambient = FiniteModule::free(ring, n, e_count);
    let h1 = subquotient_structure(&ambient, &cocycles, &d0);
    if h1.module.exponents().iter().any(|&e| e != n) {
        return Err(FixtureError::SelfCheck(format!(
            "H^1 mod l^{n} is not free: exponents {:?}",
            h1.module.exponents()
        )));
    }
    let rank = h1.module.generator_count();
    let gens = h1.generators.clone();
    let modulus = ring.modulus(n);
    let gram = IntMatrix::from_fn(rank, rank, |i, j| {
        complex.cup_pairing(&gens.col(i), &gens.col(j))
    })
    .reduce_mod(&modulus);
    let (h2, _) = decompose(ring, n, &d1);
    Ok(SurfaceLevelData {
        h1_order: h1.module.order(),
        h2_order: h2.order(),
        module: h1.module,
        generators: gens,
        gram,
    })
}

/// Integral cohomology of the cochain complex, from integer Smith normal
/// forms of the coboundary matrices. This is the independent side of the
/// universal-coefficients cross-check.
#[derive(Debug, Clone)]
pub struct IntegralOracle {
    pub b0: usize,
    pub b1: usize,
    pub b2: usize,
    pub torsion1: Vec<BigInt>,
    pub torsion2: Vec<BigInt>,
}

pub fn integral_oracle(complex: &SurfaceComplex) -> IntegralOracle {
    let d0 = complex.coboundary0();
    let d1 = complex.coboundary1();
    let f0 = snf(&d0, &SnfMode::Integer);
    let f1 = snf(&d1, &SnfMode::Integer);
    let r0 = f0.rank();
    let r1 = f1.rank();
    let torsion1: Vec<BigInt> = f0
        .diagonal()
        .into_iter()
        .filter(|d| !d.is_zero() && !d.is_one())
        .collect();
    let torsion2: Vec<BigInt> = f1
        .diagonal()
        .into_iter()
        .filter(|d| !d.is_zero() && !d.is_one())
        .collect();
    IntegralOracle {
        b0: complex.vertex_count() - r0,
        b1: complex.edge_count() - r1 - r0,
        b2: complex.face_count() - r1,
        torsion1,
        torsion2,
    }
}

/// |H^degree(X; Z/l^n)| predicted by universal coefficients from the
/// integral data: tensor and Tor contributions.
pub fn predicted_order(oracle: &IntegralOracle, ring: LocalRing, n: u32, degree: usize) -> BigUint {
    let empty = Vec::new();
    let (b, tors, tors_next) = match degree {
        0 => (oracle.b0, &empty, &oracle.torsion1),
        1 => (oracle.b1, &oracle.torsion1, &oracle.torsion2),
        2 => (oracle.b2, &oracle.torsion2, &empty),
        _ => return BigUint::one(),
    };
    let mut exp = n * b as u32;
    for d in tors.iter().chain(tors_next.iter()) {
        let v = ring.valuation_capped(&d.abs(), n + 1);
        exp += v.value.min(n);
    }
    ring.modulus(exp)
}

/// Assemble the cohomology tower of a surface with its cup-product pairing;
/// every level is cross-checked against the integral oracle before the
/// tower is returned.
pub fn surface_tower(spec: &SurfaceSpec) -> Result<(Tower, GroundTruth), FixtureError> {
    if spec.horizon < 1 {
        return Err(FixtureError::InvalidSpec(
            "horizon must be at least 1".into(),
        ));
    }
    let complex = SurfaceComplex::build(spec.kind);
    let ring = spec.ring;
    let oracle = integral_oracle(&complex);
    let genus = complex.genus();
    if oracle.b0 != 1 || oracle.b2 != 1 || oracle.b1 != 2 * genus as usize {
        return Err(FixtureError::SelfCheck(format!(
            "Betti numbers ({}, {}, {}) disagree with genus {genus}",
            oracle.b0, oracle.b1, oracle.b2
        )));
    }
    let mut data = Vec::with_capacity(spec.horizon as usize);
    for n in 1..=spec.horizon {
        let lvl = surface_level(&complex, ring, n)?;
        if lvl.h1_order != predicted_order(&oracle, ring, n, 1)
            || lvl.h2_order != predicted_order(&oracle, ring, n, 2)
        {
            return Err(FixtureError::SelfCheck(format!(
                "cohomology orders at level {n} disagree with the integral oracle"
            )));
        }
        data.push(lvl);
    }
    let d0 = complex.coboundary0();
    let mut levels = Vec::with_capacity(spec.horizon as usize);
    for n in 1..=spec.horizon {
        let here = &data[(n - 1) as usize];
        let pairing =
            FinitePairing::new(here.module.clone(), here.module.clone(), here.gram.clone())
                .map_err(|e| FixtureError::SelfCheck(format!("level {n} cup pairing: {e}")))?;
        let trans = if n < spec.horizon {
            let up = &data[n as usize];
            let rank = here.module.generator_count();
            let ambient = FiniteModule::free(ring, n, complex.edge_count());
            let mut cols = Vec::with_capacity(up.module.generator_count());
            for j in 0..up.module.generator_count() {
                let target: Vec<BigInt> = up.generators.col(j);
                let coeffs = express_in_basis(&ambient, &here.generators, &d0, &target)
                    .ok_or_else(|| {
                        FixtureError::SelfCheck(format!(
                            "reduction of level-{} class {j} is not a level-{n} class",
                            n + 1
                        ))
                    })?;
                cols.push(coeffs);
            }
            let m = IntMatrix::from_cols(rank, cols).reduce_mod(&ring.modulus(n));
            Some(
                ModuleMap::new(up.module.clone(), here.module.clone(), m)
                    .map_err(|e| FixtureError::SelfCheck(format!("level {n} transition: {e}")))?,
            )
        } else {
            None
        };
        levels.push(TowerLevel {
            h: here.module.clone(),
            t: here.module.clone(),
            pairing,
            trans_h: trans.clone(),
            trans_t: trans,
        });
    }
    let tower = Tower::new(ring, levels).map_err(|e| FixtureError::SelfCheck(e.to_string()))?;
    let validation = tower.validate();
    if !validation.ok() {
        return Err(FixtureError::SelfCheck(format!(
            "surface tower violates the axioms: {:?}",
            validation
                .violations
                .first()
                .map(|v| (v.level, v.kind, v.detail.clone()))
        )));
    }
    let truth = GroundTruth {
        prime: ring.prime(),
        rank: 2 * genus as usize,
        torsion: Vec::new(),
        noise_levels: 0,
        n0: 1,
        min_window: 2,
        core: None,
    };
    Ok((tower, truth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::{replay_certificate, stabilize, verify_duality, DualityOutcome, Side};

    fn ring(l: u64) -> LocalRing {
        LocalRing::new(l).unwrap()
    }

    #[test]
    fn complex_invariants() {
        let s = SurfaceComplex::sphere();
        assert_eq!(s.euler_characteristic(), 2);
        assert_eq!(s.genus(), 0);
        let t = SurfaceComplex::torus();
        assert_eq!(
            (t.vertex_count(), t.edge_count(), t.face_count()),
            (7, 21, 14)
        );
        assert_eq!(t.euler_characteristic(), 0);
        assert_eq!(t.genus(), 1);
        let g2 = SurfaceComplex::genus_two();
        assert_eq!(g2.euler_characteristic(), -2);
        assert_eq!(g2.genus(), 2);
    }

    #[test]
    fn fundamental_class_is_a_cycle() {
        for c in [
            SurfaceComplex::sphere(),
            SurfaceComplex::torus(),
            SurfaceComplex::genus_two(),
        ] {
            // the oriented face sum has zero boundary: every edge cancels
            let d1 = c.coboundary1();
            for e in 0..c.edge_count() {
                let mut acc = BigInt::zero();
                for f in 0..c.face_count() {
                    acc += &d1[(f, e)] * BigInt::from(c.orientation()[f]);
                }
                assert!(acc.is_zero(), "edge {e} does not cancel");
            }
        }
    }

    #[test]
    fn projective_plane_is_rejected() {
        let (v, faces) = SurfaceComplex::projective_plane_faces();
        let err = SurfaceComplex::new(v, &faces).unwrap_err();
        assert!(err.to_string().contains("not orientable"));
    }

    #[test]
    fn open_disk_is_rejected() {
        // single triangle: its edges lie in one face only
        let err = SurfaceComplex::new(3, &[[0, 1, 2]]).unwrap_err();
        assert!(err.to_string().contains("closed"));
    }

    #[test]
    fn betti_and_orders_match_oracle() {
        for (c, genus) in [
            (SurfaceComplex::sphere(), 0usize),
            (SurfaceComplex::torus(), 1),
            (SurfaceComplex::genus_two(), 2),
        ] {
            let oracle = integral_oracle(&c);
            assert_eq!((oracle.b0, oracle.b1, oracle.b2), (1, 2 * genus, 1));
            assert!(oracle.torsion1.is_empty());
            assert!(oracle.torsion2.is_empty());
            for l in [2u64, 5] {
                for n in 1..=3 {
                    let data = surface_level(&c, ring(l), n).unwrap();
                    assert_eq!(data.h1_order, predicted_order(&oracle, ring(l), n, 1));
                    assert_eq!(data.h2_order, predicted_order(&oracle, ring(l), n, 2));
                    assert_eq!(data.module.generator_count(), 2 * genus);
                }
            }
        }
    }

    #[test]
    fn cup_product_is_skew_on_classes() {
        for c in [SurfaceComplex::torus(), SurfaceComplex::genus_two()] {
            for l in [2u64, 3, 5] {
                for n in 1..=3 {
                    let data = surface_level(&c, ring(l), n).unwrap();
                    let m = ring(l).modulus(n);
                    let skew = data.gram.transpose().map(|x| -x).reduce_mod(&m);
                    assert_eq!(data.gram.reduce_mod(&m), skew, "l={l} n={n}");
                }
            }
        }
    }

    #[test]
    fn torus_tower_certifies() {
        let spec = SurfaceSpec {
            kind: SurfaceKind::Torus,
            ring: ring(5),
            horizon: 4,
        };
        let (tower, truth) = surface_tower(&spec).unwrap();
        assert_eq!(truth.rank, 2);
        let stab = stabilize(&tower, Side::H, 2);
        assert_eq!(stab.n0, Some(1));
        let report = verify_duality(&tower, 2);
        let DualityOutcome::Certified(cert) = &report.outcome else {
            panic!("torus should certify: {:?}", report.outcome)
        };
        assert_eq!(cert.h.rank, 2);
        assert!(cert.h.torsion.is_empty());
        // determinant of the limit Gram is a unit
        let det = cert.gram.determinant();
        assert!(!(det % BigInt::from(5)).is_zero());
        assert!(replay_certificate(cert, &tower).is_ok());
    }

    #[test]
    fn sphere_tower_is_vacuous() {
        let spec = SurfaceSpec {
            kind: SurfaceKind::Sphere,
            ring: ring(3),
            horizon: 4,
        };
        let (tower, truth) = surface_tower(&spec).unwrap();
        assert_eq!(truth.rank, 0);
        let report = verify_duality(&tower, 2);
        let DualityOutcome::Certified(cert) = &report.outcome else {
            panic!("sphere should certify vacuously: {:?}", report.outcome)
        };
        assert_eq!(cert.h.rank, 0);
    }

    #[test]
    fn genus_two_tower_has_rank_four() {
        let spec = SurfaceSpec {
            kind: SurfaceKind::GenusTwo,
            ring: ring(3),
            horizon: 4,
        };
        let (tower, _) = surface_tower(&spec).unwrap();
        let report = verify_duality(&tower, 2);
        let DualityOutcome::Certified(cert) = &report.outcome else {
            panic!("genus 2 should certify: {:?}", report.outcome)
        };
        assert_eq!(cert.h.rank, 4);
        assert!(!(cert.gram.determinant() % BigInt::from(3)).is_zero());
    }
}
