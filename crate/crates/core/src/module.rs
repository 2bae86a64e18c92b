//! Finite modules over the truncated rings in invariant-factor normal form,
//! homomorphisms between them, and the structural computations (cokernels,
//! kernels, images, duals) that reduce to integer Smith normal form on
//! lifted matrices with adjoined relation rows.

use crate::matrix::IntMatrix;
use crate::ring::{LocalRing, Residue, RingError};
use crate::snf::{kernel_basis, snf, solve, Snf, SnfMode};
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum ModuleError {
    #[error("exponent {exponent} outside 1..={level}")]
    ExponentOutOfRange { exponent: u32, level: u32 },
    #[error("matrix is {found_rows}x{found_cols}, expected {rows}x{cols}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        found_rows: usize,
        found_cols: usize,
    },
    #[error(
        "entry ({row},{col}) has valuation {found} < required {required}: \
             a generator of order l^{dom_exp} must map into the l^{required}-multiples"
    )]
    IllDefinedEntry {
        row: usize,
        col: usize,
        required: u32,
        found: u32,
        dom_exp: u32,
    },
    #[error("modules live at different levels: {0} vs {1}")]
    LevelMismatch(u32, u32),
    #[error("hom level {given} is below the largest exponent {needed}")]
    DualLevelTooSmall { needed: u32, given: u32 },
    #[error("maps are not composable")]
    NotComposable,
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// A finite module over Lambda_n, recorded as the direct sum of the cyclic
/// summands Lambda_{e_1} >= Lambda_{e_2} >= ... with all e_i in [1, n].
/// Elements are coordinate vectors, coordinate i taken mod l^{e_i}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteModule {
    ring: LocalRing,
    level: u32,
    exponents: Vec<u32>,
}

impl FiniteModule {
    pub fn new(ring: LocalRing, level: u32, mut exponents: Vec<u32>) -> Result<Self, ModuleError> {
        assert!(level >= 1, "ambient level must be positive");
        exponents.sort_unstable_by(|a, b| b.cmp(a));
        for &e in &exponents {
            if e < 1 || e > level {
                return Err(ModuleError::ExponentOutOfRange { exponent: e, level });
            }
        }
        Ok(FiniteModule {
            ring,
            level,
            exponents,
        })
    }

    pub fn zero(ring: LocalRing, level: u32) -> Self {
        FiniteModule {
            ring,
            level,
            exponents: Vec::new(),
        }
    }

    /// Lambda_n^rank.
    pub fn free(ring: LocalRing, level: u32, rank: usize) -> Self {
        FiniteModule {
            ring,
            level,
            exponents: vec![level; rank],
        }
    }

    pub fn ring(&self) -> LocalRing {
        self.ring
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn generator_count(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_zero(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn order(&self) -> BigUint {
        self.ring.modulus(self.exponents.iter().sum())
    }

    /// diag(l^{e_1}, ..., l^{e_g}) as an integer matrix.
    pub fn relation_matrix(&self) -> IntMatrix {
        let g = self.generator_count();
        IntMatrix::from_fn(g, g, |i, j| {
            if i == j {
                self.ring.modulus_int(self.exponents[i])
            } else {
                BigInt::zero()
            }
        })
    }

    /// Coordinate-wise canonical reduction mod the generator orders.
    pub fn reduce_coords(&self, coords: &[BigInt]) -> Vec<BigUint> {
        assert_eq!(coords.len(), self.generator_count());
        coords
            .iter()
            .zip(&self.exponents)
            .map(|(c, &e)| self.ring.residue(e, c.clone()).value().clone())
            .collect()
    }

    pub fn coords_are_zero(&self, coords: &[BigInt]) -> bool {
        self.reduce_coords(coords).iter().all(Zero::is_zero)
    }

    /// The same summands clipped to a lower ambient level: exponents
    /// min(e_i, n). This is the module tensored down to Lambda_n.
    pub fn clip(&self, level: u32) -> FiniteModule {
        let exps = self.exponents.iter().map(|&e| e.min(level)).collect();
        FiniteModule {
            ring: self.ring,
            level,
            exponents: exps,
        }
    }

    /// Hom(M, Lambda_j) in invariant-factor form, with the generator-wise
    /// isomorphism given by the cyclic-dual multipliers l^{j - e_i}.
    pub fn dual(&self, hom_level: u32) -> Result<DualModule, ModuleError> {
        let needed = self.exponents.first().copied().unwrap_or(1);
        if hom_level < needed {
            return Err(ModuleError::DualLevelTooSmall {
                needed,
                given: hom_level,
            });
        }
        let multipliers = self
            .exponents
            .iter()
            .map(|&e| self.ring.modulus(hom_level - e))
            .collect();
        let module = self.clone();
        let iso = ModuleMap::new(
            self.clone(),
            module.clone(),
            IntMatrix::identity(self.generator_count()),
        )?;
        Ok(DualModule {
            module,
            hom_level,
            multipliers,
            iso,
        })
    }
}

/// Hom(M, Lambda_j) presented on the dual generators delta_i, where delta_i
/// sends x to l^{j - e_i} * x_i. Same exponents and cardinality as M.
#[derive(Debug, Clone)]
pub struct DualModule {
    pub module: FiniteModule,
    pub hom_level: u32,
    pub multipliers: Vec<BigUint>,
    pub iso: ModuleMap,
}

impl DualModule {
    /// Apply the functional with dual coordinates `func` to the element `x`.
    pub fn evaluate(&self, func: &[BigUint], x: &[BigUint]) -> Residue {
        let ring = self.module.ring();
        let mut acc = BigInt::zero();
        for ((c, m), xi) in func.iter().zip(&self.multipliers).zip(x) {
            acc += BigInt::from(c * m * xi);
        }
        ring.residue(self.hom_level, acc)
    }
}

/// A homomorphism of modules given by the codomain coordinates of the
/// generator images (columns). Domain and codomain may live at different
/// ambient levels; both levels are recorded. Entry (i, j) is canonical mod
/// the order of codomain generator i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleMap {
    domain: FiniteModule,
    codomain: FiniteModule,
    matrix: IntMatrix,
}

impl ModuleMap {
    /// Checked constructor: validates dimensions and well-definedness.
    pub fn new(
        domain: FiniteModule,
        codomain: FiniteModule,
        matrix: IntMatrix,
    ) -> Result<Self, ModuleError> {
        let m = Self::from_parts(domain, codomain, matrix)?;
        m.well_definedness()?;
        Ok(m)
    }

    /// Dimension-checked constructor; value-level validation is deferred to
    /// [`ModuleMap::well_definedness`].
    pub fn from_parts(
        domain: FiniteModule,
        codomain: FiniteModule,
        matrix: IntMatrix,
    ) -> Result<Self, ModuleError> {
        if matrix.rows() != codomain.generator_count() || matrix.cols() != domain.generator_count()
        {
            return Err(ModuleError::DimensionMismatch {
                rows: codomain.generator_count(),
                cols: domain.generator_count(),
                found_rows: matrix.rows(),
                found_cols: matrix.cols(),
            });
        }
        // canonicalize row i mod the order of codomain generator i
        let ring = codomain.ring();
        let canon = IntMatrix::from_fn(matrix.rows(), matrix.cols(), |i, j| {
            BigInt::from(
                ring.residue(codomain.exponents[i], matrix[(i, j)].clone())
                    .value()
                    .clone(),
            )
        });
        Ok(ModuleMap {
            domain,
            codomain,
            matrix: canon,
        })
    }

    pub fn identity(m: &FiniteModule) -> Self {
        ModuleMap {
            domain: m.clone(),
            codomain: m.clone(),
            matrix: IntMatrix::identity(m.generator_count()),
        }
    }

    /// A generator of order l^e must map to an element killed by l^e: entry
    /// (i, j) needs valuation at least max(0, f_i - e_j).
    pub fn well_definedness(&self) -> Result<(), ModuleError> {
        let ring = self.codomain.ring();
        for i in 0..self.matrix.rows() {
            let fi = self.codomain.exponents[i];
            for j in 0..self.matrix.cols() {
                let ej = self.domain.exponents[j];
                if fi > ej {
                    let required = fi - ej;
                    let v = ring.valuation_capped(&self.matrix[(i, j)], fi);
                    if v.exact && v.value < required {
                        return Err(ModuleError::IllDefinedEntry {
                            row: i,
                            col: j,
                            required,
                            found: v.value,
                            dom_exp: ej,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> &FiniteModule {
        &self.domain
    }

    pub fn codomain(&self) -> &FiniteModule {
        &self.codomain
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, coords: &[BigUint]) -> Vec<BigUint> {
        assert_eq!(coords.len(), self.domain.generator_count());
        let raw: Vec<BigInt> = (0..self.matrix.rows())
            .map(|i| {
                let mut acc = BigInt::zero();
                for (j, c) in coords.iter().enumerate() {
                    acc += &self.matrix[(i, j)] * BigInt::from(c.clone());
                }
                acc
            })
            .collect();
        self.codomain.reduce_coords(&raw)
    }

    /// self after other.
    pub fn compose(&self, other: &ModuleMap) -> Result<ModuleMap, ModuleError> {
        if self.domain != other.codomain {
            return Err(ModuleError::NotComposable);
        }
        ModuleMap::from_parts(
            other.domain.clone(),
            self.codomain.clone(),
            self.matrix.mul(&other.matrix),
        )
    }

    pub fn kernel(&self) -> Submodule {
        let lifted = self.matrix.hstack(&self.codomain.relation_matrix());
        let full = kernel_basis(&lifted);
        let g = self.domain.generator_count();
        let proj = IntMatrix::from_fn(g, full.cols(), |i, j| full[(i, j)].clone());
        submodule_structure(&self.domain, &proj)
    }

    pub fn image(&self) -> Submodule {
        submodule_structure(&self.codomain, &self.matrix)
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().module.is_zero()
    }

    /// The induced map Hom(codomain, Lambda_j) -> Hom(domain, Lambda_j) in
    /// dual coordinates; both modules must share an ambient level.
    pub fn dual(&self, hom_level: u32) -> Result<ModuleMap, ModuleError> {
        if self.domain.level != self.codomain.level {
            return Err(ModuleError::LevelMismatch(
                self.domain.level,
                self.codomain.level,
            ));
        }
        let dual_dom = self.codomain.dual(hom_level)?;
        let dual_cod = self.domain.dual(hom_level)?;
        let ring = self.domain.ring();
        let m = IntMatrix::from_fn(
            self.domain.generator_count(),
            self.codomain.generator_count(),
            |jj, ii| {
                let e = self.domain.exponents[jj];
                let f = self.codomain.exponents[ii];
                if e >= f {
                    &self.matrix[(ii, jj)] * ring.modulus_int(e - f)
                } else {
                    let d = ring.modulus_int(f - e);
                    debug_assert!((&self.matrix[(ii, jj)] % &d).is_zero());
                    &self.matrix[(ii, jj)] / d
                }
            },
        );
        ModuleMap::new(dual_dom.module, dual_cod.module, m)
    }
}

/// A submodule (or subquotient) of an ambient module: its own invariant
/// factors plus generators expressed in ambient coordinates (columns,
/// aligned with the exponent list).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Submodule {
    pub module: FiniteModule,
    pub generators: IntMatrix,
}

impl Submodule {
    pub fn zero(ambient: &FiniteModule) -> Self {
        Submodule {
            module: FiniteModule::zero(ambient.ring(), ambient.level()),
            generators: IntMatrix::zeros(ambient.generator_count(), 0),
        }
    }
}

/// The cokernel of a presentation matrix (rows = generators, columns =
/// relations) at the given level, with the ambient relations l^n adjoined
/// implicitly. Returns the module together with the basis matrix whose
/// columns express the normal-form generators in the original generators.
pub fn decompose(
    ring: LocalRing,
    level: u32,
    presentation: &IntMatrix,
) -> (FiniteModule, IntMatrix) {
    let g = presentation.rows();
    let mode = SnfMode::Local { ring, level };
    let f = snf(presentation, &mode);
    let diag = f.diagonal();
    // quotient exponent of generator slot i: valuation of the diagonal entry
    // (level for a zero entry or a slot beyond the diagonal)
    let mut slots: Vec<(u32, usize)> = Vec::with_capacity(g);
    for i in 0..g {
        let e = match diag.get(i) {
            Some(d) if !d.is_zero() => ring.valuation_capped(d, level).value,
            _ => level,
        };
        if e >= 1 {
            slots.push((e, i));
        }
    }
    slots.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let exponents: Vec<u32> = slots.iter().map(|s| s.0).collect();
    let keep: Vec<usize> = slots.iter().map(|s| s.1).collect();
    let basis = f.u.select_cols(&keep).reduce_mod(&ring.modulus(level));
    let module = FiniteModule::new(ring, level, exponents).expect("valid cokernel exponents");
    (module, basis)
}

/// Structure of the submodule of `ambient` generated by the columns of
/// `gens` (ambient coordinates).
pub fn submodule_structure(ambient: &FiniteModule, gens: &IntMatrix) -> Submodule {
    assert_eq!(gens.rows(), ambient.generator_count());
    if gens.cols() == 0 {
        return Submodule::zero(ambient);
    }
    // K = { z : gens * z = 0 in the ambient module }, as an integer lattice
    let lifted = gens.hstack(&ambient.relation_matrix());
    let full = kernel_basis(&lifted);
    let k = gens.cols();
    let kmat = IntMatrix::from_fn(k, full.cols(), |i, j| full[(i, j)].clone());
    quotient_by_lattice(ambient, gens, &kmat)
}

/// Structure of (span(numerator) + R) / (span(denominator) + R) inside the
/// ambient module, where R is the ambient relation lattice. The denominator
/// span must be contained in the numerator span for the result to be the
/// subquotient.
pub fn subquotient_structure(
    ambient: &FiniteModule,
    numerator: &IntMatrix,
    denominator: &IntMatrix,
) -> Submodule {
    assert_eq!(numerator.rows(), ambient.generator_count());
    assert_eq!(denominator.rows(), ambient.generator_count());
    if numerator.cols() == 0 {
        return Submodule::zero(ambient);
    }
    let lifted = numerator
        .hstack(denominator)
        .hstack(&ambient.relation_matrix());
    let full = kernel_basis(&lifted);
    let k = numerator.cols();
    let kmat = IntMatrix::from_fn(k, full.cols(), |i, j| full[(i, j)].clone());
    quotient_by_lattice(ambient, numerator, &kmat)
}

// Z^k / span(kmat) realized on ambient elements via gens; the quotient must
// be finite (kmat of full rank k), which holds whenever gens lie in a finite
// module.
fn quotient_by_lattice(ambient: &FiniteModule, gens: &IntMatrix, kmat: &IntMatrix) -> Submodule {
    let ring = ambient.ring();
    let level = ambient.level();
    let k = gens.cols();
    let f: Snf = snf(kmat, &SnfMode::Integer);
    let diag = f.diagonal();
    assert_eq!(
        f.rank(),
        k,
        "subgroup of a finite module has a full relation lattice"
    );
    let mut slots: Vec<(u32, usize)> = Vec::new();
    for (i, d) in diag.iter().enumerate() {
        let mag = d.magnitude();
        let v = ring.valuation_capped(&BigInt::from(mag.clone()), level + 1);
        assert!(
            v.exact && ring.modulus(v.value) == *mag,
            "cyclic order must be a power of l"
        );
        if v.value >= 1 {
            slots.push((v.value, i));
        }
    }
    slots.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let exponents: Vec<u32> = slots.iter().map(|s| s.0).collect();
    let keep: Vec<usize> = slots.iter().map(|s| s.1).collect();
    let new_gens = gens.mul(&f.u.select_cols(&keep));
    // canonicalize each generator coordinate-wise in the ambient module
    let canon = IntMatrix::from_fn(new_gens.rows(), new_gens.cols(), |i, j| {
        BigInt::from(
            ring.residue(ambient.exponents()[i], new_gens[(i, j)].clone())
                .value()
                .clone(),
        )
    });
    let module = FiniteModule::new(ring, level, exponents).expect("valid submodule exponents");
    Submodule {
        module,
        generators: canon,
    }
}

/// Express `target` (an ambient element) in the given basis, modulo the span
/// of `extra` and the ambient relations. Returns raw integer coefficients of
/// length `basis.cols()`.
pub fn express_in_basis(
    ambient: &FiniteModule,
    basis: &IntMatrix,
    extra: &IntMatrix,
    target: &[BigInt],
) -> Option<Vec<BigInt>> {
    let g = ambient.generator_count();
    assert_eq!(basis.rows(), g);
    assert_eq!(extra.rows(), g);
    assert_eq!(target.len(), g);
    let a = basis.hstack(extra).hstack(&ambient.relation_matrix());
    let b = IntMatrix::from_fn(g, 1, |i, _| target[i].clone());
    let x = solve(&a, &b)?;
    Some((0..basis.cols()).map(|i| x[(i, 0)].clone()).collect())
}
