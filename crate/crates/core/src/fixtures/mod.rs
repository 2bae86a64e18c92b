//! Tower generators with known ground truth: synthetic block towers with
//! prescribed rank, torsion and transient noise, randomized towers with the
//! block structure hidden by unit changes of generators, and simplicial
//! surface towers (see [`surface`]).
//!
//! Block design of the synthetic towers, per side and level n:
//!
//! * free block: r generators of full order, paired by the core matrix,
//!   identity transitions;
//! * torsion block of exponent c: a survivor generator (identity
//!   transitions, alive in the limit) and a transient partner whose
//!   transitions gain a factor of l once the level reaches c. The pairing
//!   couples each side's survivor to the other side's transient with value
//!   w * l^(n - min(n,c)). Perfectness at each level forces this shape: the
//!   pairing values on a fixed generator pair form a sequence compatible
//!   with reduction, so if both sides had identity transitions the value
//!   would be a single constant of Z_l killed by l^c, i.e. zero, and the
//!   level pairings could not be perfect. The transient partner is why a
//!   Mittag-Leffler window of at least c + 1 is necessary.
//! * noise block (levels n <= m only): one generator of order l per side,
//!   paired by l^(n-1), annihilated by every transition. It leaves the
//!   stable image immediately and vanishes from the tower above level m,
//!   which is exactly what stabilization detection reports as n0 = m + 1.

use crate::matrix::IntMatrix;
use crate::module::{FiniteModule, ModuleMap};
use crate::pairing::FinitePairing;
use crate::ring::LocalRing;
use crate::tower::{Tower, TowerLevel};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

pub mod surface;

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("invalid fixture spec: {0}")]
    InvalidSpec(String),
    #[error("generated tower failed its own validation: {0}")]
    SelfCheck(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorsionBlock {
    pub exponent: u32,
    pub unit: u64,
}

/// Specification of a synthetic tower: free rank r with a unit-determinant
/// core matrix, torsion exponents with unit multipliers, a noise horizon m,
/// and the tower horizon N >= m + max(c, 1) + 2.
#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub ring: LocalRing,
    pub rank: usize,
    pub core: IntMatrix,
    pub torsion: Vec<TorsionBlock>,
    pub noise_levels: u32,
    pub horizon: u32,
}

/// What the generator knows about its tower; the pipeline must recover it.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub prime: u64,
    pub rank: usize,
    pub torsion: Vec<u32>,
    pub noise_levels: u32,
    /// Level from which the per-level deficit is constant: all transients
    /// have died.
    pub n0: u32,
    /// Smallest Mittag-Leffler window that certifies this tower.
    pub min_window: u32,
    /// Limit Gram matrix of the free parts, when prescribed (up to the
    /// basis changes recorded in a certificate).
    pub core: Option<IntMatrix>,
}

impl SyntheticSpec {
    fn check(&self) -> Result<(), FixtureError> {
        if self.core.rows() != self.rank || self.core.cols() != self.rank {
            return Err(FixtureError::InvalidSpec(format!(
                "core matrix is {}x{}, rank is {}",
                self.core.rows(),
                self.core.cols(),
                self.rank
            )));
        }
        let p = BigInt::from(self.ring.prime());
        if (self.core.determinant() % &p).is_zero() {
            return Err(FixtureError::InvalidSpec(
                "core determinant is divisible by the prime".into(),
            ));
        }
        for b in &self.torsion {
            if b.exponent < 1 {
                return Err(FixtureError::InvalidSpec(
                    "torsion exponent must be positive".into(),
                ));
            }
            if b.unit % self.ring.prime() == 0 {
                return Err(FixtureError::InvalidSpec(format!(
                    "torsion multiplier {} is not a unit",
                    b.unit
                )));
            }
        }
        let cmax = self
            .torsion
            .iter()
            .map(|b| b.exponent)
            .max()
            .unwrap_or(0)
            .max(1);
        if self.horizon < self.noise_levels + cmax + 2 {
            return Err(FixtureError::InvalidSpec(format!(
                "horizon {} too small: need at least noise + max(c,1) + 2 = {}",
                self.horizon,
                self.noise_levels + cmax + 2
            )));
        }
        Ok(())
    }

    fn ground_truth(&self) -> GroundTruth {
        let mut torsion: Vec<u32> = self.torsion.iter().map(|b| b.exponent).collect();
        torsion.sort_unstable_by_key(|&c| std::cmp::Reverse(c));
        let cmax = torsion.first().copied().unwrap_or(0);
        GroundTruth {
            prime: self.ring.prime(),
            rank: self.rank,
            torsion,
            noise_levels: self.noise_levels,
            n0: (self.noise_levels + 1).max(cmax.max(1)),
            min_window: (cmax + 1).max(2),
            core: Some(self.core.clone()),
        }
    }
}

/// Build the block tower for a spec; the result is validated before it is
/// returned.
pub fn synthetic_tower(spec: &SyntheticSpec) -> Result<(Tower, GroundTruth), FixtureError> {
    spec.check()?;
    let ring = spec.ring;
    let horizon = spec.horizon;
    let mut torsion = spec.torsion.clone();
    torsion.sort_unstable_by_key(|b| std::cmp::Reverse(b.exponent));
    let mut levels = Vec::with_capacity(horizon as usize);
    for n in 1..=horizon {
        let module = level_module(&ring, n, spec, &torsion);
        let gram = level_gram(&ring, n, spec, &torsion, module.generator_count());
        let pairing = FinitePairing::new(module.clone(), module.clone(), gram)
            .map_err(|e| FixtureError::SelfCheck(format!("level {n} pairing: {e}")))?;
        let trans = if n < horizon {
            let up = level_module(&ring, n + 1, spec, &torsion);
            let m = transition_matrix(
                &ring,
                n,
                spec,
                &torsion,
                module.generator_count(),
                up.generator_count(),
            );
            Some(
                ModuleMap::new(up, module.clone(), m)
                    .map_err(|e| FixtureError::SelfCheck(format!("level {n} transition: {e}")))?,
            )
        } else {
            None
        };
        levels.push(TowerLevel {
            h: module.clone(),
            t: module,
            pairing,
            trans_h: trans.clone(),
            trans_t: trans,
        });
    }
    let tower = Tower::new(ring, levels).map_err(|e| FixtureError::SelfCheck(e.to_string()))?;
    let validation = tower.validate();
    if !validation.ok() {
        return Err(FixtureError::SelfCheck(format!(
            "synthetic tower violates the axioms: {:?}",
            validation
                .violations
                .first()
                .map(|v| (v.level, v.kind, v.detail.clone()))
        )));
    }
    Ok((tower, spec.ground_truth()))
}

fn has_noise(spec: &SyntheticSpec, n: u32) -> bool {
    spec.noise_levels >= 1 && n <= spec.noise_levels
}

fn level_module(
    ring: &LocalRing,
    n: u32,
    spec: &SyntheticSpec,
    torsion: &[TorsionBlock],
) -> FiniteModule {
    let mut exps = vec![n; spec.rank];
    for b in torsion {
        let e = b.exponent.min(n);
        exps.push(e);
        exps.push(e);
    }
    if has_noise(spec, n) {
        exps.push(1);
    }
    FiniteModule::new(*ring, n, exps).expect("synthetic exponents")
}

fn level_gram(
    ring: &LocalRing,
    n: u32,
    spec: &SyntheticSpec,
    torsion: &[TorsionBlock],
    dim: usize,
) -> IntMatrix {
    let mut g = IntMatrix::zeros(dim, dim);
    for i in 0..spec.rank {
        for j in 0..spec.rank {
            g[(i, j)] = spec.core[(i, j)].clone();
        }
    }
    let mut ofs = spec.rank;
    for b in torsion {
        let c = b.exponent.min(n);
        let value = BigInt::from(b.unit) * ring.modulus_int(n - c);
        // survivor pairs the other side's transient and vice versa
        g[(ofs, ofs + 1)] = value.clone();
        g[(ofs + 1, ofs)] = value;
        ofs += 2;
    }
    if has_noise(spec, n) {
        g[(ofs, ofs)] = ring.modulus_int(n - 1);
    }
    g
}

fn transition_matrix(
    ring: &LocalRing,
    n: u32,
    spec: &SyntheticSpec,
    torsion: &[TorsionBlock],
    rows: usize,
    cols: usize,
) -> IntMatrix {
    let mut m = IntMatrix::zeros(rows, cols);
    for i in 0..spec.rank {
        m[(i, i)] = BigInt::one();
    }
    let mut ofs = spec.rank;
    for b in torsion {
        m[(ofs, ofs)] = BigInt::one();
        // the transient partner gains a factor of l once the level crosses c
        m[(ofs + 1, ofs + 1)] = if n >= b.exponent {
            BigInt::from(ring.prime())
        } else {
            BigInt::one()
        };
        ofs += 2;
    }
    // noise columns and rows stay zero: every transition annihilates it
    m
}

/// Bounds for [`random_tower`]. Sampled torsion exponents are clamped so the
/// requested window certifies the tower: a transient of exponent c needs a
/// window of c + 1.
#[derive(Debug, Clone)]
pub struct RandomBounds {
    pub primes: Vec<u64>,
    pub max_rank: usize,
    pub max_torsion_blocks: usize,
    pub max_torsion_exponent: u32,
    pub max_noise_levels: u32,
    pub window: u32,
}

impl Default for RandomBounds {
    fn default() -> Self {
        RandomBounds {
            primes: vec![2, 3, 5],
            max_rank: 4,
            max_torsion_blocks: 2,
            max_torsion_exponent: 3,
            max_noise_levels: 3,
            window: 2,
        }
    }
}

/// A synthetic spec drawn within the bounds, then conjugated at every level
/// by independently chosen unit changes of generators on both sides, with
/// the transitions transported; the block structure is hidden but the
/// ground truth is retained. Deterministic in (seed, bounds).
pub fn random_tower(
    seed: u64,
    bounds: &RandomBounds,
) -> Result<(Tower, GroundTruth), FixtureError> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let prime = bounds.primes[rng.gen_range(0..bounds.primes.len())];
    let ring = LocalRing::new(prime)
        .map_err(|e| FixtureError::InvalidSpec(format!("bounds contain a non-prime: {e}")))?;
    let rank = rng.gen_range(0..=bounds.max_rank);
    let noise = rng.gen_range(0..=bounds.max_noise_levels);
    let horizon = noise + 2 * bounds.window.max(2);
    // clamp so the requested window certifies: c <= window - 1, and the
    // horizon invariant keeps c <= horizon - noise - 2
    let cmax = bounds
        .max_torsion_exponent
        .min(bounds.window.saturating_sub(1))
        .min(horizon.saturating_sub(noise + 2));
    let blocks = if cmax >= 1 {
        rng.gen_range(0..=bounds.max_torsion_blocks)
    } else {
        0
    };
    let torsion: Vec<TorsionBlock> = (0..blocks)
        .map(|_| TorsionBlock {
            exponent: rng.gen_range(1..=cmax),
            unit: sample_unit(&mut rng, prime),
        })
        .collect();
    let core = random_unit_matrix(&mut rng, ring, rank, horizon);
    let spec = SyntheticSpec {
        ring,
        rank,
        core,
        torsion,
        noise_levels: noise,
        horizon,
    };
    let (plain, truth) = synthetic_tower(&spec)?;
    let tower = conjugate_tower(&mut rng, &plain)?;
    let validation = tower.validate();
    if !validation.ok() {
        return Err(FixtureError::SelfCheck(format!(
            "conjugated tower violates the axioms: {:?}",
            validation
                .violations
                .first()
                .map(|v| (v.level, v.kind, v.detail.clone()))
        )));
    }
    Ok((tower, truth))
}

fn sample_unit(rng: &mut ChaCha20Rng, prime: u64) -> u64 {
    if prime == 2 {
        1
    } else {
        rng.gen_range(1..prime)
    }
}

// L D U with unitriangular L, U and a diagonal of units: determinant a unit.
fn random_unit_matrix(
    rng: &mut ChaCha20Rng,
    ring: LocalRing,
    rank: usize,
    level: u32,
) -> IntMatrix {
    let p = ring.prime();
    let span = (p * p) as i64;
    let mut m = IntMatrix::zeros(rank, rank);
    for i in 0..rank {
        m[(i, i)] = BigInt::from(sample_unit(rng, p));
    }
    let lower = IntMatrix::from_fn(rank, rank, |i, j| {
        if i == j {
            BigInt::one()
        } else if i > j {
            BigInt::from(rng.gen_range(0..span))
        } else {
            BigInt::zero()
        }
    });
    let upper = IntMatrix::from_fn(rank, rank, |i, j| {
        if i == j {
            BigInt::one()
        } else if i < j {
            BigInt::from(rng.gen_range(0..span))
        } else {
            BigInt::zero()
        }
    });
    lower.mul(&m).mul(&upper).reduce_mod(&ring.modulus(level))
}

// A module automorphism and its inverse, as a product of elementary moves.
fn random_automorphism(rng: &mut ChaCha20Rng, module: &FiniteModule) -> (IntMatrix, IntMatrix) {
    let ring = module.ring();
    let g = module.generator_count();
    let exps = module.exponents().to_vec();
    let mut c = IntMatrix::identity(g);
    let mut c_inv = IntMatrix::identity(g);
    if g == 0 {
        return (c, c_inv);
    }
    let p = ring.prime();
    let moves = 2 * g + 2;
    for _ in 0..moves {
        match rng.gen_range(0..3u8) {
            0 => {
                // new gen j += lambda * gen i, with the valuation the orders demand
                let i = rng.gen_range(0..g);
                let j = rng.gen_range(0..g);
                if i == j {
                    continue;
                }
                let need = exps[i].saturating_sub(exps[j]);
                let lambda =
                    ring.modulus_int(need) * BigInt::from(rng.gen_range(0..(p * p) as i64));
                for a in 0..g {
                    let add = &c[(a, i)] * &lambda;
                    c[(a, j)] += add;
                }
                for b in 0..g {
                    let sub = &c_inv[(j, b)] * &lambda;
                    c_inv[(i, b)] -= sub;
                }
            }
            1 => {
                // swap generators of equal order
                let i = rng.gen_range(0..g);
                let j = rng.gen_range(0..g);
                if i != j && exps[i] == exps[j] {
                    c.swap_cols(i, j);
                    c_inv.swap_rows(i, j);
                }
            }
            _ => {
                let j = rng.gen_range(0..g);
                let u = BigInt::from(sample_unit(rng, p));
                let u_inv = BigInt::from(ring.invert_mod(&u, module.level()).expect("unit scale"));
                for a in 0..g {
                    c[(a, j)] = &c[(a, j)] * &u;
                }
                for b in 0..g {
                    c_inv[(j, b)] = &c_inv[(j, b)] * &u_inv;
                }
            }
        }
    }
    let modulus = ring.modulus(module.level());
    (c.reduce_mod(&modulus), c_inv.reduce_mod(&modulus))
}

fn conjugate_tower(rng: &mut ChaCha20Rng, tower: &Tower) -> Result<Tower, FixtureError> {
    use crate::tower::Side;
    let horizon = tower.horizon();
    let mut changes: Vec<[(IntMatrix, IntMatrix); 2]> = Vec::with_capacity(horizon as usize);
    for n in 1..=horizon {
        let h = random_automorphism(rng, tower.module(Side::H, n));
        let t = random_automorphism(rng, tower.module(Side::T, n));
        changes.push([h, t]);
    }
    let mut levels = Vec::with_capacity(horizon as usize);
    for n in 1..=horizon {
        let lvl = tower.level(n);
        let [(ch, ch_inv), (ct, ct_inv)] = &changes[(n - 1) as usize];
        let gram = ch.transpose().mul(lvl.pairing.gram()).mul(ct);
        let pairing = FinitePairing::new(lvl.h.clone(), lvl.t.clone(), gram).map_err(|e| {
            FixtureError::SelfCheck(format!("conjugated pairing at level {n}: {e}"))
        })?;
        let (trans_h, trans_t) = if n < horizon {
            let [(ch_up, _), (ct_up, _)] = &changes[n as usize];
            let th = ch_inv
                .mul(
                    lvl.trans_h
                        .as_ref()
                        .expect("transition below the horizon")
                        .matrix(),
                )
                .mul(ch_up);
            let tt = ct_inv
                .mul(
                    lvl.trans_t
                        .as_ref()
                        .expect("transition below the horizon")
                        .matrix(),
                )
                .mul(ct_up);
            let up = tower.level(n + 1);
            (
                Some(
                    ModuleMap::new(up.h.clone(), lvl.h.clone(), th).map_err(|e| {
                        FixtureError::SelfCheck(format!("conjugated transition at level {n}: {e}"))
                    })?,
                ),
                Some(
                    ModuleMap::new(up.t.clone(), lvl.t.clone(), tt).map_err(|e| {
                        FixtureError::SelfCheck(format!("conjugated transition at level {n}: {e}"))
                    })?,
                ),
            )
        } else {
            (None, None)
        };
        levels.push(TowerLevel {
            h: lvl.h.clone(),
            t: lvl.t.clone(),
            pairing,
            trans_h,
            trans_t,
        });
    }
    Tower::new(tower.ring(), levels).map_err(|e| FixtureError::SelfCheck(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::{
        dual_partner, replay_certificate, stabilize, verify_duality, DualityOutcome, Side,
    };

    fn ring(l: u64) -> LocalRing {
        LocalRing::new(l).unwrap()
    }

    fn spec(
        l: u64,
        rank: usize,
        core: &[&[i64]],
        torsion: &[(u32, u64)],
        noise: u32,
        horizon: u32,
    ) -> SyntheticSpec {
        SyntheticSpec {
            ring: ring(l),
            rank,
            core: if rank == 0 {
                IntMatrix::zeros(0, 0)
            } else {
                IntMatrix::from_i64_rows(core)
            },
            torsion: torsion
                .iter()
                .map(|&(e, u)| TorsionBlock {
                    exponent: e,
                    unit: u,
                })
                .collect(),
            noise_levels: noise,
            horizon,
        }
    }

    #[test]
    fn plain_free_tower_certifies_with_its_core() {
        let s = spec(3, 2, &[&[1, 2], &[3, 4]], &[], 0, 5);
        let (tower, truth) = synthetic_tower(&s).unwrap();
        let report = verify_duality(&tower, 2);
        let DualityOutcome::Certified(cert) = &report.outcome else {
            panic!("expected certificate: {:?}", report.outcome)
        };
        assert_eq!(cert.h.rank, truth.rank);
        assert!(cert.h.torsion.is_empty());
        assert!(replay_certificate(cert, &tower).is_ok());
    }

    #[test]
    fn rank_zero_torsion_tower_is_vacuous() {
        let s = spec(2, 0, &[], &[(2, 1), (1, 1)], 0, 7);
        let (tower, _) = synthetic_tower(&s).unwrap();
        // torsion exponent 2 needs window 3
        let report = verify_duality(&tower, 3);
        let DualityOutcome::Certified(cert) = &report.outcome else {
            panic!("expected vacuous certificate: {:?}", report.outcome)
        };
        assert_eq!(cert.h.rank, 0);
        assert_eq!(cert.h.torsion, vec![2, 1]);
    }

    #[test]
    fn noise_sets_the_stabilization_level() {
        let s = spec(5, 1, &[&[2]], &[(1, 1)], 2, 7);
        let (tower, truth) = synthetic_tower(&s).unwrap();
        assert_eq!(truth.n0, 3);
        let stab = stabilize(&tower, Side::H, 2);
        assert!(stab.certified);
        assert_eq!(stab.n0, Some(3));
        let stab_t = stabilize(&tower, Side::T, 2);
        assert_eq!(stab_t.n0, Some(3));
    }

    #[test]
    fn recovered_structure_matches_ground_truth() {
        for (s, window) in [
            (spec(3, 2, &[&[1, 2], &[3, 4]], &[(1, 2)], 1, 6), 2),
            (spec(2, 1, &[&[1]], &[(2, 1)], 0, 7), 3),
            (spec(5, 0, &[], &[], 3, 7), 2),
        ] {
            let (tower, truth) = synthetic_tower(&s).unwrap();
            let report = verify_duality(&tower, window);
            let DualityOutcome::Certified(cert) = &report.outcome else {
                panic!("{s:?}: {:?}", report.outcome)
            };
            assert_eq!(cert.h.rank, truth.rank, "{s:?}");
            assert_eq!(cert.h.torsion, truth.torsion, "{s:?}");
            assert_eq!(cert.t.rank, truth.rank);
            assert_eq!(cert.t.torsion, truth.torsion);
            let stab = report.stab_h.as_ref().unwrap();
            assert_eq!(stab.n0, Some(truth.n0), "{s:?}");
        }
    }

    #[test]
    fn torsion_window_requirement() {
        // exponent-2 torsion: window 2 must be inconclusive, window 3 certifies
        let s = spec(3, 1, &[&[1]], &[(2, 1)], 0, 7);
        let (tower, truth) = synthetic_tower(&s).unwrap();
        assert_eq!(truth.min_window, 3);
        let report = verify_duality(&tower, 2);
        assert!(matches!(
            report.outcome,
            DualityOutcome::Inconclusive { .. }
        ));
        let report = verify_duality(&tower, 3);
        assert!(report.outcome.is_certified());
    }

    #[test]
    fn one_dimensional_dual_partner() {
        let s = spec(3, 1, &[&[2]], &[], 0, 5);
        let (tower, _) = synthetic_tower(&s).unwrap();
        let partner = dual_partner(&tower, 2, &[BigInt::from(1)]).unwrap();
        // e(h, t) = 1 pins t to the inverse of the core entry
        let report = verify_duality(&tower, 2);
        let DualityOutcome::Certified(cert) = report.outcome else {
            panic!()
        };
        let g = cert.gram[(0, 0)].clone();
        let prod =
            (g * BigInt::from(partner.coords[0].clone())) % ring(3).modulus_int(partner.precision);
        assert_eq!(prod, BigInt::from(1));
    }

    #[test]
    fn horizon_invariant_is_enforced() {
        let s = spec(3, 1, &[&[1]], &[(2, 1)], 1, 4);
        assert!(matches!(
            synthetic_tower(&s),
            Err(FixtureError::InvalidSpec(_))
        ));
    }

    #[test]
    fn random_towers_are_deterministic_and_valid() {
        let bounds = RandomBounds::default();
        for seed in 0..12u64 {
            let (a, truth) = random_tower(seed, &bounds).unwrap();
            let (b, _) = random_tower(seed, &bounds).unwrap();
            // byte-identical reproduction
            for n in 1..=a.horizon() {
                assert_eq!(a.level(n).pairing.gram(), b.level(n).pairing.gram());
                if n < a.horizon() {
                    assert_eq!(
                        a.transition(Side::H, n).unwrap().matrix(),
                        b.transition(Side::H, n).unwrap().matrix()
                    );
                }
            }
            assert!(a.validate().ok(), "seed {seed}");
            let report = verify_duality(&a, bounds.window);
            let DualityOutcome::Certified(cert) = &report.outcome else {
                panic!("seed {seed}: {:?}", report.outcome)
            };
            assert_eq!(cert.h.rank, truth.rank, "seed {seed}");
            assert_eq!(cert.h.torsion, truth.torsion, "seed {seed}");
            assert_eq!(
                report.stab_h.as_ref().unwrap().n0,
                Some(truth.n0),
                "seed {seed}"
            );
            assert!(replay_certificate(cert, &a).is_ok());
        }
    }

    #[test]
    fn stabilization_is_monotone_in_horizon() {
        for extra in [0u32, 1, 2] {
            let s = spec(3, 2, &[&[1, 1], &[1, 2]], &[(1, 1)], 2, 6 + extra);
            let (tower, truth) = synthetic_tower(&s).unwrap();
            let stab = stabilize(&tower, Side::H, 2);
            assert!(stab.certified);
            assert_eq!(stab.n0, Some(truth.n0));
        }
    }
}
