//! Projective towers of perfect pairings: validation of the tower axioms,
//! stabilization detection, limit modules, the limit pairing on the free
//! parts, unimodularity certification with replay, and dual-partner search.

use crate::matrix::IntMatrix;
use crate::module::{
    decompose, submodule_structure, FiniteModule, ModuleError, ModuleMap, Submodule,
};
use crate::pairing::DivisorReport;
use crate::pairing::{
    FinitePairing, FreePairing, PairingError, PerfectnessCertificate, ReplayError,
    UnimodularCertificate, UnimodularOutcome,
};
use crate::ring::{LocalRing, RingError, Valuation};
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    H,
    T,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::H => Side::T,
            Side::T => Side::H,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::H => write!(f, "H"),
            Side::T => write!(f, "T"),
        }
    }
}

#[derive(Debug, Error)]
pub enum TowerError {
    #[error("tower must contain at least one level")]
    Empty,
    #[error("level {0} out of range")]
    LevelOutOfRange(u32),
    #[error("stabilization for side {side} is not certified: {reason}")]
    Uncertified { side: Side, reason: String },
    #[error("limit sides were computed at different top levels: {0} vs {1}")]
    TopLevelMismatch(u32, u32),
    #[error("no usable precision left at the limit")]
    PrecisionExhausted,
    #[error("element is divisible by the prime; dual partners need an indivisible element")]
    DivisibleElement,
    #[error("free rank is zero; there is no indivisible element")]
    NoFreePart,
    #[error("expected {expected} coordinates, found {found}")]
    BadCoordinates { expected: usize, found: usize },
    #[error("no dual partner in the stable image: tower or stabilization defect")]
    NoDualPartner,
    #[error("pipeline did not certify: {0}")]
    NotCertified(String),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Pairing(#[from] PairingError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// One level of a tower: the two modules, their pairing, and the transition
/// maps from the next level up (absent at the top level).
#[derive(Debug, Clone)]
pub struct TowerLevel {
    pub h: FiniteModule,
    pub t: FiniteModule,
    pub pairing: FinitePairing,
    pub trans_h: Option<ModuleMap>,
    pub trans_t: Option<ModuleMap>,
}

/// A projective system of pairings (H_n, T_n, e_n) for n = 1..=horizon,
/// finitely presented up to the horizon.
#[derive(Debug, Clone)]
pub struct Tower {
    ring: LocalRing,
    levels: Vec<TowerLevel>,
}

impl Tower {
    pub fn new(ring: LocalRing, levels: Vec<TowerLevel>) -> Result<Self, TowerError> {
        if levels.is_empty() {
            return Err(TowerError::Empty);
        }
        Ok(Tower { ring, levels })
    }

    pub fn ring(&self) -> LocalRing {
        self.ring
    }

    pub fn horizon(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn level(&self, n: u32) -> &TowerLevel {
        assert!(n >= 1 && n <= self.horizon());
        &self.levels[(n - 1) as usize]
    }

    pub fn level_mut(&mut self, n: u32) -> &mut TowerLevel {
        assert!(n >= 1 && n <= self.horizon());
        &mut self.levels[(n - 1) as usize]
    }

    pub fn module(&self, side: Side, n: u32) -> &FiniteModule {
        match side {
            Side::H => &self.level(n).h,
            Side::T => &self.level(n).t,
        }
    }

    /// Transition from level n+1 down to level n.
    pub fn transition(&self, side: Side, n: u32) -> Option<&ModuleMap> {
        let lvl = self.level(n);
        match side {
            Side::H => lvl.trans_h.as_ref(),
            Side::T => lvl.trans_t.as_ref(),
        }
    }

    /// Matrix of the composite transition from level `source` down to level
    /// `target` (identity when equal).
    pub fn composite_transition(&self, side: Side, target: u32, source: u32) -> IntMatrix {
        assert!(target <= source && source <= self.horizon());
        let mut acc = IntMatrix::identity(self.module(side, target).generator_count());
        for k in target..source {
            let step = self
                .transition(side, k)
                .unwrap_or_else(|| panic!("missing transition at level {k}"))
                .matrix();
            acc = acc.mul(step);
        }
        acc.reduce_mod(&self.ring.modulus(target))
    }

    /// Check the tower axioms: finite modules at the right levels with
    /// well-defined transition maps, a perfect pairing at every level, and
    /// generator-wise compatibility of the pairings with the transitions.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let mut perfectness = Vec::new();
        let horizon = self.horizon();
        for n in 1..=horizon {
            let lvl = self.level(n);
            for (side, m) in [(Side::H, &lvl.h), (Side::T, &lvl.t)] {
                if m.level() != n {
                    violations.push(Violation {
                        level: n,
                        kind: ViolationKind::Structure,
                        detail: format!("side {side} module is declared at level {}", m.level()),
                        divisor_valuations: None,
                    });
                }
            }
            if let Err(e) = lvl.pairing.well_definedness() {
                violations.push(Violation {
                    level: n,
                    kind: ViolationKind::PairingDefinition,
                    detail: e.to_string(),
                    divisor_valuations: None,
                });
                continue;
            }
            match lvl.pairing.certify_perfect() {
                Ok(cert) => {
                    if !cert.perfect {
                        violations.push(Violation {
                            level: n,
                            kind: ViolationKind::Perfectness,
                            detail: format!(
                                "adjoint kernel has exponents {:?}, orders {} vs {}",
                                cert.kernel_exponents, cert.left_order, cert.right_order
                            ),
                            divisor_valuations: Some(cert.divisor_valuations.clone()),
                        });
                    }
                    perfectness.push((n, cert));
                }
                Err(e) => violations.push(Violation {
                    level: n,
                    kind: ViolationKind::PairingDefinition,
                    detail: e.to_string(),
                    divisor_valuations: None,
                }),
            }
            if n < horizon {
                let next = self.level(n + 1);
                let mut trans_ok = true;
                for (side, trans, dom, cod) in [
                    (Side::H, &lvl.trans_h, &next.h, &lvl.h),
                    (Side::T, &lvl.trans_t, &next.t, &lvl.t),
                ] {
                    match trans {
                        None => {
                            trans_ok = false;
                            violations.push(Violation {
                                level: n,
                                kind: ViolationKind::TransitionDefinition,
                                detail: format!(
                                    "side {side} transition from level {} is missing",
                                    n + 1
                                ),
                                divisor_valuations: None,
                            });
                        }
                        Some(f) => {
                            if f.domain() != dom || f.codomain() != cod {
                                trans_ok = false;
                                violations.push(Violation {
                                    level: n,
                                    kind: ViolationKind::TransitionDefinition,
                                    detail: format!(
                                        "side {side} transition endpoints do not match the levels"
                                    ),
                                    divisor_valuations: None,
                                });
                            } else if let Err(e) = f.well_definedness() {
                                trans_ok = false;
                                violations.push(Violation {
                                    level: n,
                                    kind: ViolationKind::TransitionDefinition,
                                    detail: format!("side {side}: {e}"),
                                    divisor_valuations: None,
                                });
                            }
                        }
                    }
                }
                if trans_ok {
                    // e_n(rho h, rho t) = e_{n+1}(h, t) reduced, on all generators
                    let a = lvl.trans_h.as_ref().expect("checked").matrix();
                    let b = lvl.trans_t.as_ref().expect("checked").matrix();
                    let lhs = a.transpose().mul(lvl.pairing.gram()).mul(b);
                    let rhs = next.pairing.gram();
                    let m = self.ring.modulus(n);
                    let (lhs, rhs) = (lhs.reduce_mod(&m), rhs.reduce_mod(&m));
                    'compat: for j in 0..lhs.rows() {
                        for k in 0..lhs.cols() {
                            if lhs[(j, k)] != rhs[(j, k)] {
                                violations.push(Violation {
                                    level: n,
                                    kind: ViolationKind::Compatibility,
                                    detail: format!(
                                        "e_{n}(rho h_{j}, rho t_{k}) = {} but e_{}(h_{j}, t_{k}) reduces to {}",
                                        lhs[(j, k)],
                                        n + 1,
                                        rhs[(j, k)]
                                    ),
                                    divisor_valuations: None,
                                });
                                break 'compat;
                            }
                        }
                    }
                }
            }
        }
        ValidationReport {
            horizon,
            violations,
            perfectness,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    Structure,
    PairingDefinition,
    Perfectness,
    TransitionDefinition,
    Compatibility,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::Structure => "structure",
            ViolationKind::PairingDefinition => "pairing-definition",
            ViolationKind::Perfectness => "perfectness",
            ViolationKind::TransitionDefinition => "transition-definition",
            ViolationKind::Compatibility => "compatibility",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub level: u32,
    pub kind: ViolationKind,
    pub detail: String,
    /// For perfectness violations: the elementary-divisor valuations of the
    /// level Gram matrix (the finite-cokernel profile).
    pub divisor_valuations: Option<Vec<Valuation>>,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub horizon: u32,
    pub violations: Vec<Violation>,
    pub perfectness: Vec<(u32, PerfectnessCertificate)>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Per-level stabilization data for one side.
#[derive(Debug, Clone)]
pub struct LevelStability {
    pub level: u32,
    /// image(M_{n+w} -> M_n) agrees with image(M_{n+w-1} -> M_n).
    pub window_ok: bool,
    /// Invariant factors of M_n / (stable image).
    pub deficit: Vec<u32>,
    /// Injectivity of (top stable image)/l^n -> M_n, order-checked.
    pub injective: bool,
    /// Kernel exponents when the injectivity check fails.
    pub kernel_exponents: Vec<u32>,
    pub stable: Submodule,
}

/// Stabilization detection for one side of a tower. `n0` is the least level
/// from which, through the top testable level, the window test passes and
/// the deficit of the stable image inside the level module has stopped
/// changing (all transient components have died). Certification additionally
/// needs a full window of such levels and the injectivity checks above n0.
#[derive(Debug, Clone)]
pub struct StabilizationReport {
    pub side: Side,
    pub window: u32,
    pub horizon: u32,
    pub top: u32,
    pub n0: Option<u32>,
    pub certified: bool,
    pub reason: Option<String>,
    pub levels: Vec<LevelStability>,
}

pub fn stabilize(tower: &Tower, side: Side, window: u32) -> StabilizationReport {
    assert!(window >= 1, "window must be at least 1");
    let horizon = tower.horizon();
    if horizon <= window {
        return StabilizationReport {
            side,
            window,
            horizon,
            top: 0,
            n0: None,
            certified: false,
            reason: Some(format!(
                "inconclusive at horizon {horizon}: no level has a full window above it"
            )),
            levels: Vec::new(),
        };
    }
    let top = horizon - window;
    let ring = tower.ring();
    let mut levels = Vec::with_capacity(top as usize);
    for n in 1..=top {
        let ambient = tower.module(side, n);
        let wide = submodule_structure(ambient, &tower.composite_transition(side, n, n + window));
        let narrow = submodule_structure(
            ambient,
            &tower.composite_transition(side, n, n + window - 1),
        );
        // the wider image is always contained in the narrower one
        let window_ok = wide.module.order() == narrow.module.order();
        let relations = ambient.relation_matrix();
        let (quot, _) = decompose(ring, n, &wide.generators.hstack(&relations));
        levels.push(LevelStability {
            level: n,
            window_ok,
            deficit: quot.exponents().to_vec(),
            injective: true,
            kernel_exponents: Vec::new(),
            stable: wide,
        });
    }
    // injectivity of (top stable image)/l^n -> M_n at each level, checked by
    // comparing orders against the top invariant factors
    let top_entry = &levels[(top - 1) as usize];
    let top_exponents: Vec<u32> = top_entry.stable.module.exponents().to_vec();
    let top_generators = top_entry.stable.generators.clone();
    let top_module = top_entry.stable.module.clone();
    for entry in levels.iter_mut() {
        let predicted: u32 = top_exponents.iter().map(|&e| e.min(entry.level)).sum();
        entry.injective = entry.stable.module.order() == ring.modulus(predicted);
        if !entry.injective {
            let n = entry.level;
            let pushed = tower
                .composite_transition(side, n, top)
                .mul(&top_generators);
            if let Ok(map) =
                ModuleMap::new(top_module.clip(n), tower.module(side, n).clone(), pushed)
            {
                entry.kernel_exponents = map.kernel().module.exponents().to_vec();
            }
        }
    }
    let top_deficit = levels[(top - 1) as usize].deficit.clone();
    let mut n0: Option<u32> = None;
    for entry in levels.iter().rev() {
        if entry.window_ok && entry.deficit == top_deficit {
            n0 = Some(entry.level);
        } else {
            break;
        }
    }
    let (certified, reason) = match n0 {
        None => (
            false,
            Some(format!(
                "inconclusive at horizon {horizon}: the window test fails at the top testable level"
            )),
        ),
        Some(n0v) => {
            if top - n0v < window - 1 {
                (
                    false,
                    Some(format!(
                        "inconclusive at horizon {horizon}: only {} stable level(s) above n0 = {n0v}, need {}",
                        top - n0v,
                        window - 1
                    )),
                )
            } else if let Some(bad) = levels[(n0v - 1) as usize..].iter().find(|e| !e.injective) {
                (
                    false,
                    Some(format!(
                        "injectivity of the reduced limit into level {} fails above n0 = {n0v}",
                        bad.level
                    )),
                )
            } else {
                (true, None)
            }
        }
    };
    StabilizationReport {
        side,
        window,
        horizon,
        top,
        n0,
        certified,
        reason,
        levels,
    }
}

/// A limit module read off from the certified stable image at the top
/// testable level: generators of exponent equal to the level are the free
/// part (their exponent is only a floor), smaller exponents are exact
/// torsion.
#[derive(Debug, Clone)]
pub struct LimitModule {
    pub side: Side,
    pub top_level: u32,
    pub rank: usize,
    pub torsion: Vec<u32>,
    /// Number of generators whose exponent sits at the precision bound.
    pub floor_only: usize,
    /// Columns: the limit generators inside the top-level module, free part
    /// first, then torsion, matching `rank` and `torsion`.
    pub section: IntMatrix,
}

impl LimitModule {
    pub fn free_section(&self) -> IntMatrix {
        self.section
            .select_cols(&(0..self.rank).collect::<Vec<_>>())
    }

    pub fn torsion_section(&self) -> IntMatrix {
        self.section
            .select_cols(&(self.rank..self.rank + self.torsion.len()).collect::<Vec<_>>())
    }
}

pub fn limit_module(
    tower: &Tower,
    side: Side,
    report: &StabilizationReport,
) -> Result<LimitModule, TowerError> {
    if !report.certified {
        return Err(TowerError::Uncertified {
            side,
            reason: report
                .reason
                .clone()
                .unwrap_or_else(|| "not certified".into()),
        });
    }
    let top = report.top;
    let stable = &report.levels[(top - 1) as usize].stable;
    let exps = stable.module.exponents();
    let rank = exps.iter().filter(|&&e| e == top).count();
    let torsion: Vec<u32> = exps.iter().copied().filter(|&e| e < top).collect();
    let _ = tower;
    Ok(LimitModule {
        side,
        top_level: top,
        rank,
        torsion,
        floor_only: rank,
        section: stable.generators.clone(),
    })
}

/// One torsion-annihilation check of the limit pairing: the pairing value of
/// a torsion generator against any limit generator must vanish to the
/// precision available for it, which for torsion exponent c is top - c (the
/// lift of the generator is only determined modulo l^(top-c) times the rest).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TorsionKillCheck {
    pub side: Side,
    pub torsion_index: usize,
    pub against_index: usize,
    pub exponent: u32,
    pub required_valuation: u32,
    pub observed: Valuation,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct LimitPairingData {
    pub free: FreePairing,
    pub torsion_kill: Vec<TorsionKillCheck>,
    /// Precision lost against the horizon (the stabilization window).
    pub slack: u32,
}

pub fn limit_pairing(
    tower: &Tower,
    lim_h: &LimitModule,
    lim_t: &LimitModule,
) -> Result<LimitPairingData, TowerError> {
    if lim_h.top_level != lim_t.top_level {
        return Err(TowerError::TopLevelMismatch(
            lim_h.top_level,
            lim_t.top_level,
        ));
    }
    let top = lim_h.top_level;
    if top < 1 {
        return Err(TowerError::PrecisionExhausted);
    }
    let ring = tower.ring();
    let gram_top = tower.level(top).pairing.gram();
    let modulus = ring.modulus_int(top);
    let value = |hi: usize, tj: usize| -> BigInt {
        let mut acc = BigInt::zero();
        for a in 0..lim_h.section.rows() {
            for b in 0..lim_t.section.rows() {
                acc += &lim_h.section[(a, hi)] * &gram_top[(a, b)] * &lim_t.section[(b, tj)];
            }
        }
        let mut r = acc % &modulus;
        if r < BigInt::zero() {
            r += &modulus;
        }
        r
    };
    let gram = IntMatrix::from_fn(lim_h.rank, lim_t.rank, &value);
    let mut torsion_kill = Vec::new();
    for (i, &c) in lim_h.torsion.iter().enumerate() {
        let col = lim_h.rank + i;
        for j in 0..lim_t.rank + lim_t.torsion.len() {
            let v = ring.valuation_capped(&value(col, j), top);
            let required = top - c;
            torsion_kill.push(TorsionKillCheck {
                side: Side::H,
                torsion_index: i,
                against_index: j,
                exponent: c,
                required_valuation: required,
                observed: v,
                ok: v.value >= required,
            });
        }
    }
    for (j, &c) in lim_t.torsion.iter().enumerate() {
        let col = lim_t.rank + j;
        for i in 0..lim_h.rank + lim_h.torsion.len() {
            let v = ring.valuation_capped(&value(i, col), top);
            let required = top - c;
            torsion_kill.push(TorsionKillCheck {
                side: Side::T,
                torsion_index: j,
                against_index: i,
                exponent: c,
                required_valuation: required,
                observed: v,
                ok: v.value >= required,
            });
        }
    }
    Ok(LimitPairingData {
        free: FreePairing::new(ring, top, gram),
        torsion_kill,
        slack: tower.horizon() - top,
    })
}

/// Full evidence for one pipeline run: enough to replay every claimed
/// congruence from the tower file alone, without recomputing limits.
#[derive(Debug, Clone)]
pub struct DualityCertificate {
    pub prime: u64,
    pub window: u32,
    pub top_level: u32,
    pub precision: u32,
    pub h: CertificateSide,
    pub t: CertificateSide,
    pub gram: IntMatrix,
    pub left_transform: IntMatrix,
    pub right_transform: IntMatrix,
    pub torsion_kill: Vec<TorsionKillCheck>,
}

#[derive(Debug, Clone)]
pub struct CertificateSide {
    pub rank: usize,
    pub torsion: Vec<u32>,
    pub floor_only: usize,
    pub section: IntMatrix,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertReplayError {
    #[error("certificate does not fit the tower: {0}")]
    Shape(String),
    #[error(
        "gram entry ({row},{col}) does not match the sections pushed through the level pairing"
    )]
    GramMismatch { row: usize, col: usize },
    #[error("torsion-kill congruence {index} fails: valuation {found} < {required}")]
    TorsionKill {
        index: usize,
        found: u32,
        required: u32,
    },
    #[error(transparent)]
    Unimodularity(#[from] ReplayError),
}

/// Re-check a certificate against a tower: recompute the Gram entries from
/// the stored sections and the top-level pairing, re-verify the torsion
/// annihilation valuations, and replay the unimodularity congruence.
pub fn replay_certificate(cert: &DualityCertificate, tower: &Tower) -> Result<(), CertReplayError> {
    let ring = tower.ring();
    if ring.prime() != cert.prime {
        return Err(CertReplayError::Shape("prime mismatch".into()));
    }
    if cert.top_level < 1 || cert.top_level > tower.horizon() {
        return Err(CertReplayError::Shape(format!(
            "top level {} outside the tower horizon {}",
            cert.top_level,
            tower.horizon()
        )));
    }
    let lvl = tower.level(cert.top_level);
    let gram_top = lvl.pairing.gram();
    for (side, data, module) in [(Side::H, &cert.h, &lvl.h), (Side::T, &cert.t, &lvl.t)] {
        if data.section.rows() != module.generator_count()
            || data.section.cols() != data.rank + data.torsion.len()
        {
            return Err(CertReplayError::Shape(format!(
                "side {side} section is {}x{}, expected {}x{}",
                data.section.rows(),
                data.section.cols(),
                module.generator_count(),
                data.rank + data.torsion.len()
            )));
        }
    }
    if cert.gram.rows() != cert.h.rank || cert.gram.cols() != cert.t.rank {
        return Err(CertReplayError::Shape(
            "gram dimensions do not match the ranks".into(),
        ));
    }
    let modulus = ring.modulus_int(cert.top_level);
    let value = |hi: usize, tj: usize| -> BigInt {
        let mut acc = BigInt::zero();
        for a in 0..cert.h.section.rows() {
            for b in 0..cert.t.section.rows() {
                acc += &cert.h.section[(a, hi)] * &gram_top[(a, b)] * &cert.t.section[(b, tj)];
            }
        }
        let mut r = acc % &modulus;
        if r < BigInt::zero() {
            r += &modulus;
        }
        r
    };
    for i in 0..cert.h.rank {
        for j in 0..cert.t.rank {
            if value(i, j) != cert.gram[(i, j)] {
                return Err(CertReplayError::GramMismatch { row: i, col: j });
            }
        }
    }
    for (index, check) in cert.torsion_kill.iter().enumerate() {
        let (hi, tj) = match check.side {
            Side::H => (cert.h.rank + check.torsion_index, check.against_index),
            Side::T => (check.against_index, cert.t.rank + check.torsion_index),
        };
        if hi >= cert.h.section.cols() || tj >= cert.t.section.cols() {
            return Err(CertReplayError::Shape(format!(
                "torsion-kill check {index} out of range"
            )));
        }
        let v = ring.valuation_capped(&value(hi, tj), cert.top_level);
        if v.value < check.required_valuation {
            return Err(CertReplayError::TorsionKill {
                index,
                found: v.value,
                required: check.required_valuation,
            });
        }
    }
    let unimod = UnimodularCertificate {
        prime: cert.prime,
        precision: cert.precision,
        left_transform: cert.left_transform.clone(),
        right_transform: cert.right_transform.clone(),
    };
    unimod.replay(&cert.gram)?;
    Ok(())
}

#[derive(Debug, Clone)]
pub enum DualityOutcome {
    Certified(Box<DualityCertificate>),
    /// The tower violates the axioms; details in the validation report.
    InvalidTower,
    /// Stabilization could not be certified within the horizon.
    Inconclusive {
        side: Side,
    },
    /// The limit pairing failed the unimodularity check. On a tower that
    /// passed validation this contradicts the stabilized-limit guarantee and
    /// indicates a defect beyond the checked horizon (or a bug).
    NotUnimodular {
        report: DivisorReport,
        after_valid_tower: bool,
    },
    /// A torsion generator pairs above the allowed valuation.
    TorsionNotKilled {
        detail: String,
    },
}

impl DualityOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, DualityOutcome::Certified(_))
    }
}

#[derive(Debug, Clone)]
pub struct DualityReport {
    pub window: u32,
    pub validation: ValidationReport,
    pub stab_h: Option<StabilizationReport>,
    pub stab_t: Option<StabilizationReport>,
    pub limit_h: Option<LimitModule>,
    pub limit_t: Option<LimitModule>,
    pub pairing: Option<LimitPairingData>,
    pub outcome: DualityOutcome,
}

/// The full pipeline: validate, stabilize both sides, read off the limits,
/// form the limit pairing on the free parts, and certify unimodularity.
pub fn verify_duality(tower: &Tower, window: u32) -> DualityReport {
    let validation = tower.validate();
    let mut report = DualityReport {
        window,
        validation,
        stab_h: None,
        stab_t: None,
        limit_h: None,
        limit_t: None,
        pairing: None,
        outcome: DualityOutcome::InvalidTower,
    };
    if !report.validation.ok() {
        return report;
    }
    let stab_h = stabilize(tower, Side::H, window);
    let stab_t = stabilize(tower, Side::T, window);
    let h_ok = stab_h.certified;
    let t_ok = stab_t.certified;
    report.stab_h = Some(stab_h);
    report.stab_t = Some(stab_t);
    if !h_ok {
        report.outcome = DualityOutcome::Inconclusive { side: Side::H };
        return report;
    }
    if !t_ok {
        report.outcome = DualityOutcome::Inconclusive { side: Side::T };
        return report;
    }
    let lim_h =
        limit_module(tower, Side::H, report.stab_h.as_ref().expect("set")).expect("certified");
    let lim_t =
        limit_module(tower, Side::T, report.stab_t.as_ref().expect("set")).expect("certified");
    let pairing = match limit_pairing(tower, &lim_h, &lim_t) {
        Ok(p) => p,
        Err(e) => {
            report.limit_h = Some(lim_h);
            report.limit_t = Some(lim_t);
            report.outcome = DualityOutcome::TorsionNotKilled {
                detail: e.to_string(),
            };
            return report;
        }
    };
    if let Some(bad) = pairing.torsion_kill.iter().find(|c| !c.ok) {
        report.outcome = DualityOutcome::TorsionNotKilled {
            detail: format!(
                "side {} torsion generator {} pairs with valuation {} < required {}",
                bad.side, bad.torsion_index, bad.observed.value, bad.required_valuation
            ),
        };
        report.limit_h = Some(lim_h);
        report.limit_t = Some(lim_t);
        report.pairing = Some(pairing);
        return report;
    }
    let outcome = match pairing.free.check_unimodular() {
        UnimodularOutcome::Unimodular(cert) => {
            DualityOutcome::Certified(Box::new(DualityCertificate {
                prime: tower.ring().prime(),
                window,
                top_level: lim_h.top_level,
                precision: cert.precision,
                h: CertificateSide {
                    rank: lim_h.rank,
                    torsion: lim_h.torsion.clone(),
                    floor_only: lim_h.floor_only,
                    section: lim_h.section.clone(),
                },
                t: CertificateSide {
                    rank: lim_t.rank,
                    torsion: lim_t.torsion.clone(),
                    floor_only: lim_t.floor_only,
                    section: lim_t.section.clone(),
                },
                gram: pairing.free.gram().clone(),
                left_transform: cert.left_transform,
                right_transform: cert.right_transform,
                torsion_kill: pairing.torsion_kill.clone(),
            }))
        }
        UnimodularOutcome::NotUnimodular(divisors) => DualityOutcome::NotUnimodular {
            report: divisors,
            after_valid_tower: true,
        },
    };
    report.limit_h = Some(lim_h);
    report.limit_t = Some(lim_t);
    report.pairing = Some(pairing);
    report.outcome = outcome;
    report
}

/// A dual partner: coordinates of t with e(h, t) = 1 at the reported
/// precision, both in the free limit basis and inside the top-level module.
#[derive(Debug, Clone)]
pub struct DualPartner {
    pub coords: Vec<BigUint>,
    pub ambient: Vec<BigUint>,
    pub precision: u32,
    pub pairing_value: BigUint,
}

/// Solve e(h, t) = 1 for an indivisible h given in the free limit basis of
/// the H side, running the pipeline first.
pub fn dual_partner(tower: &Tower, window: u32, h: &[BigInt]) -> Result<DualPartner, TowerError> {
    let report = verify_duality(tower, window);
    let cert = match report.outcome {
        DualityOutcome::Certified(cert) => cert,
        DualityOutcome::InvalidTower => {
            return Err(TowerError::NotCertified("tower failed validation".into()))
        }
        DualityOutcome::Inconclusive { side } => {
            return Err(TowerError::Uncertified {
                side,
                reason: "stabilization inconclusive".into(),
            })
        }
        other => return Err(TowerError::NotCertified(format!("{other:?}"))),
    };
    dual_partner_from_certificate(tower, &cert, h)
}

pub fn dual_partner_from_certificate(
    tower: &Tower,
    cert: &DualityCertificate,
    h: &[BigInt],
) -> Result<DualPartner, TowerError> {
    let ring = tower.ring();
    let r = cert.h.rank;
    if r == 0 {
        return Err(TowerError::NoFreePart);
    }
    if h.len() != r {
        return Err(TowerError::BadCoordinates {
            expected: r,
            found: h.len(),
        });
    }
    let prec = cert.precision;
    let modulus = ring.modulus_int(prec);
    let p = BigInt::from(ring.prime());
    if h.iter().all(|c| (c % &p).is_zero()) {
        return Err(TowerError::DivisibleElement);
    }
    // row = h^T G; an indivisible h against a unimodular G has a unit entry
    let row: Vec<BigInt> = (0..cert.t.rank)
        .map(|j| {
            let mut acc = BigInt::zero();
            for (i, hi) in h.iter().enumerate() {
                acc += hi * &cert.gram[(i, j)];
            }
            let mut v = acc % &modulus;
            if v < BigInt::zero() {
                v += &modulus;
            }
            v
        })
        .collect();
    let Some(j) = row.iter().position(|v| !(v % &p).is_zero()) else {
        return Err(TowerError::NoDualPartner);
    };
    let inv = ring.invert_mod(&row[j], prec)?;
    let mut coords = vec![BigUint::zero(); cert.t.rank];
    coords[j] = inv.clone();
    // postcondition e(h, t) = 1 mod l^prec
    let check = (&row[j] * BigInt::from(inv)) % &modulus;
    debug_assert_eq!(check, BigInt::from(1));
    let top_module = tower.module(Side::T, cert.top_level);
    let raw: Vec<BigInt> = (0..cert.t.section.rows())
        .map(|a| {
            (0..cert.t.rank)
                .map(|k| &cert.t.section[(a, k)] * BigInt::from(coords[k].clone()))
                .sum()
        })
        .collect();
    let ambient = top_module.reduce_coords(&raw);
    Ok(DualPartner {
        coords,
        ambient,
        precision: prec,
        pairing_value: BigUint::from(1u32),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::LocalRing;

    fn ring(l: u64) -> LocalRing {
        LocalRing::new(l).unwrap()
    }

    /// H_n = T_n = Lambda_n with gram [1] and identity transitions.
    fn constant_tower(l: u64, horizon: u32) -> Tower {
        let r = ring(l);
        let mut levels = Vec::new();
        for n in 1..=horizon {
            let m = FiniteModule::free(r, n, 1);
            let pairing = FinitePairing::new(m.clone(), m.clone(), IntMatrix::identity(1)).unwrap();
            let trans = if n < horizon {
                let up = FiniteModule::free(r, n + 1, 1);
                Some(ModuleMap::new(up, m.clone(), IntMatrix::identity(1)).unwrap())
            } else {
                None
            };
            levels.push(TowerLevel {
                h: m.clone(),
                t: m,
                pairing,
                trans_h: trans.clone(),
                trans_t: trans,
            });
        }
        Tower::new(r, levels).unwrap()
    }

    fn zero_tower(l: u64, horizon: u32) -> Tower {
        let r = ring(l);
        let mut levels = Vec::new();
        for n in 1..=horizon {
            let m = FiniteModule::zero(r, n);
            let pairing = FinitePairing::new(m.clone(), m.clone(), IntMatrix::zeros(0, 0)).unwrap();
            let trans = if n < horizon {
                let up = FiniteModule::zero(r, n + 1);
                Some(ModuleMap::new(up, m.clone(), IntMatrix::zeros(0, 0)).unwrap())
            } else {
                None
            };
            levels.push(TowerLevel {
                h: m.clone(),
                t: m,
                pairing,
                trans_h: trans.clone(),
                trans_t: trans,
            });
        }
        Tower::new(r, levels).unwrap()
    }

    #[test]
    fn constant_tower_pipeline() {
        let t = constant_tower(3, 4);
        assert!(t.validate().ok());
        let stab = stabilize(&t, Side::H, 2);
        assert_eq!(stab.n0, Some(1));
        assert!(stab.certified);
        let report = verify_duality(&t, 2);
        match &report.outcome {
            DualityOutcome::Certified(cert) => {
                assert_eq!(cert.h.rank, 1);
                assert!(cert.h.torsion.is_empty());
                assert!(replay_certificate(cert, &t).is_ok());
            }
            other => panic!("expected certificate, got {other:?}"),
        }
    }

    #[test]
    fn zero_tower_is_vacuously_certified() {
        let t = zero_tower(2, 4);
        assert!(t.validate().ok());
        let report = verify_duality(&t, 2);
        match &report.outcome {
            DualityOutcome::Certified(cert) => {
                assert_eq!(cert.h.rank, 0);
                assert!(replay_certificate(cert, &t).is_ok());
            }
            other => panic!("expected vacuous certificate, got {other:?}"),
        }
    }

    #[test]
    fn broken_perfectness_is_flagged_at_its_level() {
        let mut t = constant_tower(3, 4);
        // overwrite the level-2 gram with the prime: not perfect there
        let lvl = t.level_mut(2);
        lvl.pairing = FinitePairing::new(
            lvl.h.clone(),
            lvl.t.clone(),
            IntMatrix::from_i64_rows(&[&[3]]),
        )
        .unwrap();
        let v = t.validate();
        assert!(!v.ok());
        assert!(v
            .violations
            .iter()
            .any(|x| x.level == 2 && x.kind == ViolationKind::Perfectness));
        let bad = v
            .violations
            .iter()
            .find(|x| x.kind == ViolationKind::Perfectness)
            .unwrap();
        assert_eq!(
            bad.divisor_valuations.as_ref().unwrap()[0],
            Valuation {
                value: 1,
                exact: true
            }
        );
        assert!(matches!(
            verify_duality(&t, 2).outcome,
            DualityOutcome::InvalidTower
        ));
    }

    #[test]
    fn broken_compatibility_is_flagged_at_its_level() {
        let mut t = constant_tower(3, 4);
        let up = FiniteModule::free(ring(3), 3, 1);
        let down = FiniteModule::free(ring(3), 2, 1);
        t.level_mut(2).trans_h =
            Some(ModuleMap::new(up, down, IntMatrix::from_i64_rows(&[&[4]])).unwrap());
        let v = t.validate();
        assert!(v
            .violations
            .iter()
            .any(|x| x.level == 2 && x.kind == ViolationKind::Compatibility));
    }

    #[test]
    fn short_horizon_is_inconclusive() {
        let t = constant_tower(3, 2);
        let report = verify_duality(&t, 2);
        assert!(matches!(
            report.outcome,
            DualityOutcome::Inconclusive { .. }
        ));
    }

    #[test]
    fn dual_partner_on_constant_tower() {
        let t = constant_tower(5, 5);
        let partner = dual_partner(&t, 2, &[BigInt::from(1)]).unwrap();
        assert_eq!(partner.coords, vec![BigUint::from(1u32)]);
        assert!(matches!(
            dual_partner(&t, 2, &[BigInt::from(5)]),
            Err(TowerError::DivisibleElement)
        ));
    }

    #[test]
    fn replay_rejects_tampering() {
        let t = constant_tower(3, 4);
        let report = verify_duality(&t, 2);
        let DualityOutcome::Certified(cert) = report.outcome else {
            panic!()
        };
        let mut bad = (*cert).clone();
        bad.gram[(0, 0)] += 1;
        assert!(replay_certificate(&bad, &t).is_err());
        let mut bad = (*cert).clone();
        bad.left_transform[(0, 0)] += 3;
        assert!(replay_certificate(&bad, &t).is_err());
        let mut bad = (*cert).clone();
        bad.h.section[(0, 0)] += 1;
        assert!(replay_certificate(&bad, &t).is_err());
    }
}
