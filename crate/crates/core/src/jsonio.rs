//! JSON schemas for towers, ground-truth sidecars, certificates, run
//! reports and the one-shot utility payloads. All integers travel as
//! decimal strings: moduli overflow 64-bit machine words long before the
//! interesting range ends. Every file carries a `"format": 1` tag.

use crate::matrix::IntMatrix;
use crate::module::FiniteModule;
use crate::pairing::{DivisorReport, FinitePairing};
use crate::ring::{LocalRing, Valuation};
use crate::tower::{
    CertificateSide, DualityCertificate, Side, TorsionKillCheck, Tower, TowerLevel,
};
use crate::{fixtures::GroundTruth, module::ModuleMap};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

pub const FORMAT: u32 = 1;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("{0}")]
    Malformed(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for JsonError {
    fn from(e: serde_json::Error) -> Self {
        JsonError::Malformed(e.to_string())
    }
}

fn parse_u32(s: &str, what: &str) -> Result<u32, JsonError> {
    s.parse::<u32>().map_err(|_| {
        JsonError::Malformed(format!(
            "{what}: expected a small nonnegative integer, got {s:?}"
        ))
    })
}

fn parse_u64(s: &str, what: &str) -> Result<u64, JsonError> {
    s.parse::<u64>().map_err(|_| {
        JsonError::Malformed(format!("{what}: expected a nonnegative integer, got {s:?}"))
    })
}

fn parse_usize(s: &str, what: &str) -> Result<usize, JsonError> {
    s.parse::<usize>().map_err(|_| {
        JsonError::Malformed(format!("{what}: expected a nonnegative integer, got {s:?}"))
    })
}

fn parse_bigint(s: &str, what: &str) -> Result<BigInt, JsonError> {
    s.parse::<BigInt>()
        .map_err(|_| JsonError::Malformed(format!("{what}: expected a decimal integer, got {s:?}")))
}

pub type MatrixJson = Vec<Vec<String>>;

pub fn matrix_to_json(m: &IntMatrix) -> MatrixJson {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)].to_string()).collect())
        .collect()
}

pub fn matrix_from_json(
    rows: &MatrixJson,
    expect_rows: usize,
    expect_cols: usize,
    what: &str,
) -> Result<IntMatrix, JsonError> {
    if rows.len() != expect_rows {
        return Err(JsonError::Malformed(format!(
            "{what}: expected {expect_rows} rows, found {}",
            rows.len()
        )));
    }
    let mut data = Vec::with_capacity(expect_rows);
    for (i, r) in rows.iter().enumerate() {
        if r.len() != expect_cols {
            return Err(JsonError::Malformed(format!(
                "{what}: row {i} has {} entries, expected {expect_cols}",
                r.len()
            )));
        }
        let mut row = Vec::with_capacity(expect_cols);
        for (j, s) in r.iter().enumerate() {
            row.push(parse_bigint(s, &format!("{what}[{i}][{j}]"))?);
        }
        data.push(row);
    }
    Ok(IntMatrix::from_rows(data))
}

fn default_format() -> u32 {
    FORMAT
}

// ---------------------------------------------------------------- tower file

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModuleJson {
    pub exponents: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelJson {
    pub n: String,
    #[serde(rename = "H")]
    pub h: ModuleJson,
    #[serde(rename = "T")]
    pub t: ModuleJson,
    pub gram: MatrixJson,
    #[serde(rename = "transH", skip_serializing_if = "Option::is_none")]
    pub trans_h: Option<MatrixJson>,
    #[serde(rename = "transT", skip_serializing_if = "Option::is_none")]
    pub trans_t: Option<MatrixJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TowerFile {
    #[serde(default = "default_format")]
    pub format: u32,
    pub prime: String,
    pub horizon: String,
    pub levels: Vec<LevelJson>,
}

pub fn tower_to_file(tower: &Tower) -> TowerFile {
    let levels = (1..=tower.horizon())
        .map(|n| {
            let lvl = tower.level(n);
            LevelJson {
                n: n.to_string(),
                h: ModuleJson {
                    exponents: lvl.h.exponents().iter().map(|e| e.to_string()).collect(),
                },
                t: ModuleJson {
                    exponents: lvl.t.exponents().iter().map(|e| e.to_string()).collect(),
                },
                gram: matrix_to_json(lvl.pairing.gram()),
                trans_h: lvl.trans_h.as_ref().map(|f| matrix_to_json(f.matrix())),
                trans_t: lvl.trans_t.as_ref().map(|f| matrix_to_json(f.matrix())),
            }
        })
        .collect();
    TowerFile {
        format: FORMAT,
        prime: tower.ring().prime().to_string(),
        horizon: tower.horizon().to_string(),
        levels,
    }
}

fn module_from_json(
    ring: LocalRing,
    level: u32,
    m: &ModuleJson,
    what: &str,
) -> Result<FiniteModule, JsonError> {
    let mut exps = Vec::with_capacity(m.exponents.len());
    for (i, s) in m.exponents.iter().enumerate() {
        exps.push(parse_u32(s, &format!("{what} exponent {i}"))?);
    }
    // the file order defines the generator order; re-sorting would silently
    // permute the gram and transition indices
    if exps.windows(2).any(|w| w[0] < w[1]) {
        return Err(JsonError::Malformed(format!(
            "{what}: exponents must be nonincreasing"
        )));
    }
    FiniteModule::new(ring, level, exps).map_err(|e| JsonError::Malformed(format!("{what}: {e}")))
}

pub fn tower_from_file(file: &TowerFile) -> Result<Tower, JsonError> {
    if file.format != FORMAT {
        return Err(JsonError::Malformed(format!(
            "unsupported format {}",
            file.format
        )));
    }
    let prime = parse_u64(&file.prime, "prime")?;
    let ring = LocalRing::new(prime).map_err(|e| JsonError::Malformed(e.to_string()))?;
    let horizon = parse_u32(&file.horizon, "horizon")?;
    if horizon < 1 || file.levels.len() != horizon as usize {
        return Err(JsonError::Malformed(format!(
            "horizon {horizon} does not match the {} levels present",
            file.levels.len()
        )));
    }
    // first pass: modules per level
    let mut modules = Vec::with_capacity(file.levels.len());
    for (idx, lvl) in file.levels.iter().enumerate() {
        let n = idx as u32 + 1;
        let declared = parse_u32(&lvl.n, &format!("levels[{idx}].n"))?;
        if declared != n {
            return Err(JsonError::Malformed(format!(
                "levels[{idx}] declares n = {declared}, expected {n}"
            )));
        }
        let h = module_from_json(ring, n, &lvl.h, &format!("level {n} H"))?;
        let t = module_from_json(ring, n, &lvl.t, &format!("level {n} T"))?;
        modules.push((h, t));
    }
    let mut levels = Vec::with_capacity(file.levels.len());
    for (idx, lvl) in file.levels.iter().enumerate() {
        let n = idx as u32 + 1;
        let (h, t) = modules[idx].clone();
        let gram = matrix_from_json(
            &lvl.gram,
            h.generator_count(),
            t.generator_count(),
            &format!("level {n} gram"),
        )?;
        let pairing = FinitePairing::from_parts(h.clone(), t.clone(), gram)
            .map_err(|e| JsonError::Malformed(format!("level {n} gram: {e}")))?;
        let (trans_h, trans_t) = if n < horizon {
            let (up_h, up_t) = modules[idx + 1].clone();
            let mh = lvl
                .trans_h
                .as_ref()
                .ok_or_else(|| JsonError::Malformed(format!("level {n} is missing transH")))?;
            let mt = lvl
                .trans_t
                .as_ref()
                .ok_or_else(|| JsonError::Malformed(format!("level {n} is missing transT")))?;
            let mh = matrix_from_json(
                mh,
                h.generator_count(),
                up_h.generator_count(),
                &format!("level {n} transH"),
            )?;
            let mt = matrix_from_json(
                mt,
                t.generator_count(),
                up_t.generator_count(),
                &format!("level {n} transT"),
            )?;
            (
                Some(
                    ModuleMap::from_parts(up_h, h.clone(), mh)
                        .map_err(|e| JsonError::Malformed(format!("level {n} transH: {e}")))?,
                ),
                Some(
                    ModuleMap::from_parts(up_t, t.clone(), mt)
                        .map_err(|e| JsonError::Malformed(format!("level {n} transT: {e}")))?,
                ),
            )
        } else {
            (None, None)
        };
        levels.push(TowerLevel {
            h,
            t,
            pairing,
            trans_h,
            trans_t,
        });
    }
    Tower::new(ring, levels).map_err(|e| JsonError::Malformed(e.to_string()))
}

pub fn read_tower(path: &Path) -> Result<Tower, JsonError> {
    let text = std::fs::read_to_string(path)?;
    let file: TowerFile = serde_json::from_str(&text)?;
    tower_from_file(&file)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), JsonError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

// ------------------------------------------------------- ground truth file

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TruthFile {
    #[serde(default = "default_format")]
    pub format: u32,
    pub kind: String,
    pub prime: String,
    pub rank: String,
    pub torsion: Vec<String>,
    pub noise_horizon: String,
    pub n0: String,
    pub min_window: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub core: Option<MatrixJson>,
}

pub fn truth_to_file(kind: &str, truth: &GroundTruth) -> TruthFile {
    TruthFile {
        format: FORMAT,
        kind: kind.to_string(),
        prime: truth.prime.to_string(),
        rank: truth.rank.to_string(),
        torsion: truth.torsion.iter().map(|c| c.to_string()).collect(),
        noise_horizon: truth.noise_levels.to_string(),
        n0: truth.n0.to_string(),
        min_window: truth.min_window.to_string(),
        core: truth.core.as_ref().map(matrix_to_json),
    }
}

// ---------------------------------------------------------- certificate file

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateSideJson {
    pub rank: String,
    pub torsion: Vec<String>,
    pub floor_only: String,
    pub section: MatrixJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TorsionKillJson {
    pub side: String,
    pub torsion_index: String,
    pub against_index: String,
    pub exponent: String,
    pub required_valuation: String,
    pub observed_valuation: String,
    pub observed_exact: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateFile {
    #[serde(default = "default_format")]
    pub format: u32,
    pub prime: String,
    pub window: String,
    pub top_level: String,
    pub precision: String,
    pub h: CertificateSideJson,
    pub t: CertificateSideJson,
    pub gram: MatrixJson,
    pub left_transform: MatrixJson,
    pub right_transform: MatrixJson,
    pub torsion_kill: Vec<TorsionKillJson>,
}

fn side_to_json(side: &CertificateSide) -> CertificateSideJson {
    CertificateSideJson {
        rank: side.rank.to_string(),
        torsion: side.torsion.iter().map(|c| c.to_string()).collect(),
        floor_only: side.floor_only.to_string(),
        section: matrix_to_json(&side.section),
    }
}

pub fn certificate_to_file(cert: &DualityCertificate) -> CertificateFile {
    CertificateFile {
        format: FORMAT,
        prime: cert.prime.to_string(),
        window: cert.window.to_string(),
        top_level: cert.top_level.to_string(),
        precision: cert.precision.to_string(),
        h: side_to_json(&cert.h),
        t: side_to_json(&cert.t),
        gram: matrix_to_json(&cert.gram),
        left_transform: matrix_to_json(&cert.left_transform),
        right_transform: matrix_to_json(&cert.right_transform),
        torsion_kill: cert
            .torsion_kill
            .iter()
            .map(|c| TorsionKillJson {
                side: c.side.to_string(),
                torsion_index: c.torsion_index.to_string(),
                against_index: c.against_index.to_string(),
                exponent: c.exponent.to_string(),
                required_valuation: c.required_valuation.to_string(),
                observed_valuation: c.observed.value.to_string(),
                observed_exact: c.observed.exact,
            })
            .collect(),
    }
}

fn side_from_json(
    json: &CertificateSideJson,
    rows: usize,
    what: &str,
) -> Result<CertificateSide, JsonError> {
    let rank = parse_usize(&json.rank, &format!("{what} rank"))?;
    let mut torsion = Vec::with_capacity(json.torsion.len());
    for (i, s) in json.torsion.iter().enumerate() {
        torsion.push(parse_u32(s, &format!("{what} torsion {i}"))?);
    }
    let section = matrix_from_json(
        &json.section,
        rows,
        rank + torsion.len(),
        &format!("{what} section"),
    )?;
    Ok(CertificateSide {
        rank,
        torsion,
        floor_only: parse_usize(&json.floor_only, &format!("{what} floor_only"))?,
        section,
    })
}

/// Reconstruct a certificate; the tower supplies the expected dimensions.
pub fn certificate_from_file(
    file: &CertificateFile,
    tower: &Tower,
) -> Result<DualityCertificate, JsonError> {
    if file.format != FORMAT {
        return Err(JsonError::Malformed(format!(
            "unsupported format {}",
            file.format
        )));
    }
    let prime = parse_u64(&file.prime, "prime")?;
    let top_level = parse_u32(&file.top_level, "top_level")?;
    if top_level < 1 || top_level > tower.horizon() {
        return Err(JsonError::Malformed(format!(
            "certificate top level {top_level} outside the tower horizon {}",
            tower.horizon()
        )));
    }
    let lvl = tower.level(top_level);
    let h = side_from_json(&file.h, lvl.h.generator_count(), "H side")?;
    let t = side_from_json(&file.t, lvl.t.generator_count(), "T side")?;
    let gram = matrix_from_json(&file.gram, h.rank, t.rank, "gram")?;
    let left = matrix_from_json(&file.left_transform, h.rank, h.rank, "left_transform")?;
    let right = matrix_from_json(&file.right_transform, t.rank, t.rank, "right_transform")?;
    let mut torsion_kill = Vec::with_capacity(file.torsion_kill.len());
    for (i, c) in file.torsion_kill.iter().enumerate() {
        let side = match c.side.as_str() {
            "H" => Side::H,
            "T" => Side::T,
            other => {
                return Err(JsonError::Malformed(format!(
                    "torsion_kill[{i}].side must be H or T, got {other:?}"
                )))
            }
        };
        torsion_kill.push(TorsionKillCheck {
            side,
            torsion_index: parse_usize(&c.torsion_index, "torsion_index")?,
            against_index: parse_usize(&c.against_index, "against_index")?,
            exponent: parse_u32(&c.exponent, "exponent")?,
            required_valuation: parse_u32(&c.required_valuation, "required_valuation")?,
            observed: Valuation {
                value: parse_u32(&c.observed_valuation, "observed_valuation")?,
                exact: c.observed_exact,
            },
            ok: true,
        });
    }
    Ok(DualityCertificate {
        prime,
        window: parse_u32(&file.window, "window")?,
        top_level,
        precision: parse_u32(&file.precision, "precision")?,
        h,
        t,
        gram,
        left_transform: left,
        right_transform: right,
        torsion_kill,
    })
}

// ----------------------------------------------------------------- reports

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageJson {
    pub name: String,
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub wall_ms: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ViolationJson {
    pub level: String,
    pub kind: String,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divisor_valuations: Option<Vec<ValuationJson>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValuationJson {
    pub valuation: String,
    pub exact: bool,
}

pub fn valuation_to_json(v: &Valuation) -> ValuationJson {
    ValuationJson {
        valuation: v.value.to_string(),
        exact: v.exact,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilizationLevelJson {
    pub n: String,
    pub window_ok: bool,
    pub deficit: Vec<String>,
    pub injective: bool,
    pub stable_image_order: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilizationJson {
    pub side: String,
    pub window: String,
    pub top: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n0: Option<String>,
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub levels: Vec<StabilizationLevelJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LimitJson {
    pub side: String,
    pub top_level: String,
    pub rank: String,
    pub torsion: Vec<String>,
    pub floor_only: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrecisionLossJson {
    pub stage: String,
    pub loss: String,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub format: u32,
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub options: Vec<(String, String)>,
    pub verdict: String,
    pub stages: Vec<StageJson>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub violations: Vec<ViolationJson>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub stabilization: Vec<StabilizationJson>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub limits: Vec<LimitJson>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub divisor_valuations: Vec<ValuationJson>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub torsion_kill: Vec<TorsionKillJson>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub precision_ledger: Vec<PrecisionLossJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateFile>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hex_string(&hasher.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

// ------------------------------------------------------------ util payloads

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SnfModeJson {
    Keyword(String),
    Local { local: LocalModeJson },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalModeJson {
    pub prime: String,
    pub level: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SnfRequest {
    pub matrix: MatrixJson,
    pub mode: SnfModeJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SnfResponse {
    pub format: u32,
    pub u: MatrixJson,
    pub s: MatrixJson,
    pub v: MatrixJson,
    pub diagonal: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecomposeRequest {
    pub prime: String,
    pub level: String,
    pub presentation: MatrixJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecomposeResponse {
    pub format: u32,
    pub exponents: Vec<String>,
    pub basis: MatrixJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairingCheckRequest {
    pub prime: String,
    pub precision: String,
    pub gram: MatrixJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairingCheckResponse {
    pub format: u32,
    pub unimodular: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub left_transform: Option<MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right_transform: Option<MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub left_rank: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right_rank: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divisor_valuations: Option<Vec<ValuationJson>>,
}

pub fn divisor_report_to_json(report: &DivisorReport) -> (String, String, Vec<ValuationJson>) {
    (
        report.left_rank.to_string(),
        report.right_rank.to_string(),
        report.valuations.iter().map(valuation_to_json).collect(),
    )
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualPartnerRequest {
    pub tower: TowerFile,
    #[serde(default)]
    pub window: Option<String>,
    pub h: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualPartnerResponse {
    pub format: u32,
    pub t: Vec<String>,
    pub t_ambient: Vec<String>,
    pub precision: String,
    pub pairing_value: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorObject {
    pub error: ErrorBody,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
}

pub fn parse_h_coords(h: &[String]) -> Result<Vec<BigInt>, JsonError> {
    h.iter()
        .enumerate()
        .map(|(i, s)| parse_bigint(s, &format!("h[{i}]")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{random_tower, RandomBounds};
    use crate::tower::{replay_certificate, verify_duality, DualityOutcome};

    #[test]
    fn tower_roundtrip_preserves_everything() {
        let (tower, _) = random_tower(7, &RandomBounds::default()).unwrap();
        let file = tower_to_file(&tower);
        let text = serde_json::to_string(&file).unwrap();
        let parsed: TowerFile = serde_json::from_str(&text).unwrap();
        let back = tower_from_file(&parsed).unwrap();
        assert_eq!(back.horizon(), tower.horizon());
        for n in 1..=tower.horizon() {
            assert_eq!(back.level(n).pairing.gram(), tower.level(n).pairing.gram());
            assert_eq!(back.level(n).h.exponents(), tower.level(n).h.exponents());
            if n < tower.horizon() {
                assert_eq!(
                    back.transition(crate::tower::Side::H, n).unwrap().matrix(),
                    tower.transition(crate::tower::Side::H, n).unwrap().matrix()
                );
            }
        }
    }

    #[test]
    fn certificate_roundtrip_replays() {
        let (tower, _) = random_tower(3, &RandomBounds::default()).unwrap();
        let report = verify_duality(&tower, 2);
        let DualityOutcome::Certified(cert) = report.outcome else {
            panic!()
        };
        let file = certificate_to_file(&cert);
        let text = serde_json::to_string(&file).unwrap();
        let parsed: CertificateFile = serde_json::from_str(&text).unwrap();
        let back = certificate_from_file(&parsed, &tower).unwrap();
        assert!(replay_certificate(&back, &tower).is_ok());
    }

    #[test]
    fn malformed_tower_files_are_rejected() {
        // wrong level count
        let bad = r#"{"format":1,"prime":"3","horizon":"2","levels":[]}"#;
        let parsed: TowerFile = serde_json::from_str(bad).unwrap();
        assert!(tower_from_file(&parsed).is_err());
        // composite modulus
        let bad = r#"{"format":1,"prime":"4","horizon":"1","levels":[{"n":"1","H":{"exponents":[]},"T":{"exponents":[]},"gram":[]}]}"#;
        let parsed: TowerFile = serde_json::from_str(bad).unwrap();
        assert!(tower_from_file(&parsed).is_err());
        // gram dimensions disagree with the exponents
        let bad = r#"{"format":1,"prime":"3","horizon":"1","levels":[{"n":"1","H":{"exponents":["1"]},"T":{"exponents":["1"]},"gram":[]}]}"#;
        let parsed: TowerFile = serde_json::from_str(bad).unwrap();
        assert!(tower_from_file(&parsed).is_err());
        // exponent order defines generator order and must be canonical
        let bad = r#"{"format":1,"prime":"3","horizon":"1","levels":[{"n":"1","H":{"exponents":["1","2"]},"T":{"exponents":["2","1"]},"gram":[["0","0"],["0","0"]]}]}"#;
        let parsed: TowerFile = serde_json::from_str(bad).unwrap();
        assert!(tower_from_file(&parsed).is_err());
    }
}
