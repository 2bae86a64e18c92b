//! Command-line front door: generate fixtures, verify towers, replay
//! certificates, and run one-shot utilities on JSON payloads.
//!
//! Exit codes: 0 = pass, 1 = verified violation / non-unimodular outcome /
//! domain error, 2 = malformed input or bad spec, 3 = inconclusive
//! (stabilization not certified at the horizon).

use crate::fixtures::surface::{surface_tower, SurfaceKind, SurfaceSpec};
use crate::fixtures::{random_tower, synthetic_tower, RandomBounds, SyntheticSpec, TorsionBlock};
use crate::jsonio::{self, CertificateFile, JsonError, RunReport};
use crate::matrix::IntMatrix;
use crate::module::decompose;
use crate::pairing::{FreePairing, UnimodularOutcome};
use crate::ring::LocalRing;
use crate::snf::{snf, SnfMode};
use crate::tower::{
    dual_partner_from_certificate, replay_certificate, verify_duality, DualityOutcome,
    DualityReport, Tower, TowerError,
};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "elladic",
    version,
    about = "Exact l-adic duality toolkit: towers of perfect pairings, limit unimodularity certificates, and fixture generators"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a tower fixture plus its ground-truth sidecar
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Validate a tower and certify its limit pairing
    Verify(VerifyArgs),
    /// Re-check a stored certificate against a tower file
    Replay(ReplayArgs),
    /// One-shot utilities on JSON payloads (stdin or --input)
    Util {
        #[command(subcommand)]
        op: UtilOp,
    },
}

#[derive(Subcommand)]
enum GenerateKind {
    /// Block tower with prescribed rank, torsion and noise
    Synthetic(SyntheticArgs),
    /// Cohomology tower of a built-in closed oriented surface
    Surface(SurfaceArgs),
    /// Randomized synthetic tower with hidden block structure
    Random(RandomArgs),
}

#[derive(Args)]
struct SyntheticArgs {
    #[arg(long)]
    prime: u64,
    #[arg(long, default_value_t = 0)]
    rank: usize,
    /// Core matrix entries, comma-separated row-major (rank * rank values)
    #[arg(long, default_value = "")]
    core: String,
    /// Torsion exponents, comma-separated
    #[arg(long, default_value = "")]
    torsion: String,
    /// Unit multiplier per torsion block (defaults to all 1)
    #[arg(long, default_value = "")]
    torsion_units: String,
    /// Noise horizon: transient summands live at levels 1..=noise
    #[arg(long, default_value_t = 0)]
    noise: u32,
    #[arg(long)]
    horizon: u32,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct SurfaceArgs {
    /// sphere | torus | genus2
    #[arg(long)]
    surface: String,
    #[arg(long)]
    prime: u64,
    #[arg(long)]
    horizon: u32,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct RandomArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Candidate primes, comma-separated
    #[arg(long, default_value = "2,3,5")]
    primes: String,
    #[arg(long, default_value_t = 4)]
    max_rank: usize,
    #[arg(long, default_value_t = 2)]
    max_torsion_blocks: usize,
    #[arg(long, default_value_t = 3)]
    max_torsion_exponent: u32,
    #[arg(long, default_value_t = 3)]
    max_noise: u32,
    #[arg(long, default_value_t = 2)]
    window: u32,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    tower: PathBuf,
    /// Mittag-Leffler window
    #[arg(long, default_value_t = 2)]
    window: u32,
    /// Write the machine-readable run report here
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct ReplayArgs {
    /// Certificate file (or a run report containing one)
    certificate: PathBuf,
    tower: PathBuf,
}

#[derive(Subcommand)]
enum UtilOp {
    /// Smith normal form of an integer matrix
    Snf(UtilInput),
    /// Invariant factors of a presented module
    Decompose(UtilInput),
    /// Unimodularity check of a free pairing
    PairingCheck(UtilInput),
    /// Dual partner of an indivisible element against a tower
    DualPartner(UtilInput),
}

#[derive(Args)]
struct UtilInput {
    /// JSON payload file; stdin when absent
    #[arg(long)]
    input: Option<PathBuf>,
}

pub const EXIT_PASS: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_MALFORMED: u8 = 2;
pub const EXIT_INCONCLUSIVE: u8 = 3;

pub fn run() -> u8 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.exit_code() == 0 {
                0
            } else {
                EXIT_MALFORMED
            };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Generate { kind } => cmd_generate(kind),
        Command::Verify(args) => cmd_verify(&args),
        Command::Replay(args) => cmd_replay(&args),
        Command::Util { op } => cmd_util(op),
    }
}

fn fail_malformed(msg: &str) -> u8 {
    eprintln!("error: {msg}");
    EXIT_MALFORMED
}

// ------------------------------------------------------------------ generate

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<T>()
                .map_err(|_| format!("bad {what} entry {x:?}"))
        })
        .collect()
}

fn truth_path(out: &Path, truth: &Option<PathBuf>) -> PathBuf {
    truth.clone().unwrap_or_else(|| {
        let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("tower");
        out.with_file_name(format!("{stem}.truth.json"))
    })
}

fn cmd_generate(kind: GenerateKind) -> u8 {
    let built = match kind {
        GenerateKind::Synthetic(args) => generate_synthetic(&args),
        GenerateKind::Surface(args) => generate_surface(&args),
        GenerateKind::Random(args) => generate_random(&args),
    };
    let (tower, truth_file, out, truth_out) = match built {
        Ok(x) => x,
        Err(msg) => return fail_malformed(&msg),
    };
    let file = jsonio::tower_to_file(&tower);
    if let Err(e) = jsonio::write_json(&out, &file) {
        return fail_malformed(&format!("writing {}: {e}", out.display()));
    }
    if let Err(e) = jsonio::write_json(&truth_out, &truth_file) {
        return fail_malformed(&format!("writing {}: {e}", truth_out.display()));
    }
    println!("wrote {} and {}", out.display(), truth_out.display());
    EXIT_PASS
}

type Built = (Tower, jsonio::TruthFile, PathBuf, PathBuf);

fn generate_synthetic(args: &SyntheticArgs) -> Result<Built, String> {
    let ring = LocalRing::new(args.prime).map_err(|e| e.to_string())?;
    let entries: Vec<i64> = parse_list(&args.core, "core")?;
    if entries.len() != args.rank * args.rank {
        return Err(format!(
            "core needs {} entries for rank {}, found {}",
            args.rank * args.rank,
            args.rank,
            entries.len()
        ));
    }
    let core = IntMatrix::from_fn(args.rank, args.rank, |i, j| {
        BigInt::from(entries[i * args.rank + j])
    });
    let exponents: Vec<u32> = parse_list(&args.torsion, "torsion")?;
    let units: Vec<u64> = parse_list(&args.torsion_units, "torsion-units")?;
    if !units.is_empty() && units.len() != exponents.len() {
        return Err("torsion-units must match the torsion list".into());
    }
    let torsion = exponents
        .iter()
        .enumerate()
        .map(|(i, &e)| TorsionBlock {
            exponent: e,
            unit: units.get(i).copied().unwrap_or(1),
        })
        .collect();
    let spec = SyntheticSpec {
        ring,
        rank: args.rank,
        core,
        torsion,
        noise_levels: args.noise,
        horizon: args.horizon,
    };
    let (tower, truth) = synthetic_tower(&spec).map_err(|e| e.to_string())?;
    Ok((
        tower,
        jsonio::truth_to_file("synthetic", &truth),
        args.out.clone(),
        truth_path(&args.out, &args.truth),
    ))
}

fn generate_surface(args: &SurfaceArgs) -> Result<Built, String> {
    let ring = LocalRing::new(args.prime).map_err(|e| e.to_string())?;
    let kind = SurfaceKind::parse(&args.surface).ok_or_else(|| {
        format!(
            "unknown surface {:?}; use sphere, torus or genus2",
            args.surface
        )
    })?;
    let spec = SurfaceSpec {
        kind,
        ring,
        horizon: args.horizon,
    };
    let (tower, truth) = surface_tower(&spec).map_err(|e| e.to_string())?;
    Ok((
        tower,
        jsonio::truth_to_file("surface", &truth),
        args.out.clone(),
        truth_path(&args.out, &args.truth),
    ))
}

fn generate_random(args: &RandomArgs) -> Result<Built, String> {
    let primes: Vec<u64> = parse_list(&args.primes, "primes")?;
    if primes.is_empty() {
        return Err("primes must not be empty".into());
    }
    let bounds = RandomBounds {
        primes,
        max_rank: args.max_rank,
        max_torsion_blocks: args.max_torsion_blocks,
        max_torsion_exponent: args.max_torsion_exponent,
        max_noise_levels: args.max_noise,
        window: args.window,
    };
    let (tower, truth) = random_tower(args.seed, &bounds).map_err(|e| e.to_string())?;
    Ok((
        tower,
        jsonio::truth_to_file("random", &truth),
        args.out.clone(),
        truth_path(&args.out, &args.truth),
    ))
}

// -------------------------------------------------------------------- verify

struct StageLog {
    stages: Vec<jsonio::StageJson>,
}

impl StageLog {
    fn new() -> Self {
        StageLog { stages: Vec::new() }
    }

    fn push(&mut self, name: &str, outcome: &str, detail: Option<String>, start: Instant) {
        self.stages.push(jsonio::StageJson {
            name: name.to_string(),
            outcome: outcome.to_string(),
            detail,
            wall_ms: start.elapsed().as_millis().to_string(),
        });
    }
}

fn input_digest(path: &Path) -> jsonio::InputDigest {
    let bytes = std::fs::read(path).unwrap_or_default();
    jsonio::InputDigest {
        path: path.display().to_string(),
        sha256: jsonio::sha256_hex(&bytes),
    }
}

fn cmd_verify(args: &VerifyArgs) -> u8 {
    let mut log = StageLog::new();
    let start = Instant::now();
    let tower = match jsonio::read_tower(&args.tower) {
        Ok(t) => {
            log.push("parse", "pass", None, start);
            t
        }
        Err(e) => {
            log.push("parse", "fail", Some(e.to_string()), start);
            eprintln!("error: {e}");
            if let Some(path) = &args.report {
                let report = RunReport {
                    format: jsonio::FORMAT,
                    command: "verify".into(),
                    inputs: vec![input_digest(&args.tower)],
                    options: vec![("window".into(), args.window.to_string())],
                    verdict: "malformed-input".into(),
                    stages: log.stages,
                    violations: Vec::new(),
                    stabilization: Vec::new(),
                    limits: Vec::new(),
                    divisor_valuations: Vec::new(),
                    torsion_kill: Vec::new(),
                    precision_ledger: Vec::new(),
                    certificate: None,
                };
                let _ = jsonio::write_json(path, &report);
            }
            return EXIT_MALFORMED;
        }
    };
    let report = run_pipeline(&tower, args.window, &mut log);
    let (verdict, code) = verdict_of(&report.outcome);
    print_summary(&report);
    if let Some(path) = &args.report {
        let run = build_run_report(
            "verify",
            vec![input_digest(&args.tower)],
            vec![("window".into(), args.window.to_string())],
            verdict,
            log.stages,
            &report,
        );
        if let Err(e) = jsonio::write_json(path, &run) {
            eprintln!("error: writing report: {e}");
        }
    }
    code
}

fn run_pipeline(tower: &Tower, window: u32, log: &mut StageLog) -> DualityReport {
    let t0 = Instant::now();
    let report = verify_duality(tower, window);
    // reconstruct per-stage outcomes from the composed report
    let v_ok = report.validation.ok();
    log.push(
        "validate",
        if v_ok { "pass" } else { "fail" },
        (!v_ok).then(|| format!("{} violation(s)", report.validation.violations.len())),
        t0,
    );
    for (name, stab) in [
        ("stabilize-H", &report.stab_h),
        ("stabilize-T", &report.stab_t),
    ] {
        match stab {
            None => log.push(name, "skipped", None, t0),
            Some(s) => log.push(
                name,
                if s.certified { "pass" } else { "fail" },
                s.reason.clone(),
                t0,
            ),
        }
    }
    for (name, lim) in [("limit-H", &report.limit_h), ("limit-T", &report.limit_t)] {
        match lim {
            None => log.push(name, "skipped", None, t0),
            Some(l) => log.push(
                name,
                "pass",
                Some(format!("rank {}, torsion {:?}", l.rank, l.torsion)),
                t0,
            ),
        }
    }
    match &report.pairing {
        None => log.push("pairing", "skipped", None, t0),
        Some(p) => log.push(
            name_for_pairing(&report.outcome),
            if matches!(report.outcome, DualityOutcome::TorsionNotKilled { .. }) {
                "fail"
            } else {
                "pass"
            },
            Some(format!(
                "{}x{} gram at precision {}, slack {}",
                p.free.left_rank(),
                p.free.right_rank(),
                p.free.precision(),
                p.slack
            )),
            t0,
        ),
    }
    log.push(
        "unimodularity",
        match &report.outcome {
            DualityOutcome::Certified(_) => "pass",
            DualityOutcome::NotUnimodular { .. } => "fail",
            _ => "skipped",
        },
        None,
        t0,
    );
    report
}

fn name_for_pairing(_outcome: &DualityOutcome) -> &'static str {
    "pairing"
}

fn verdict_of(outcome: &DualityOutcome) -> (&'static str, u8) {
    match outcome {
        DualityOutcome::Certified(_) => ("pass", EXIT_PASS),
        DualityOutcome::InvalidTower => ("violation", EXIT_VIOLATION),
        DualityOutcome::NotUnimodular { .. } => ("not-unimodular", EXIT_VIOLATION),
        DualityOutcome::TorsionNotKilled { .. } => ("torsion-not-killed", EXIT_VIOLATION),
        DualityOutcome::Inconclusive { .. } => ("inconclusive", EXIT_INCONCLUSIVE),
    }
}

fn print_summary(report: &DualityReport) {
    if !report.validation.ok() {
        for v in &report.validation.violations {
            println!("violation at level {}: {} ({})", v.level, v.kind, v.detail);
        }
    }
    for stab in [&report.stab_h, &report.stab_t].into_iter().flatten() {
        match stab.n0 {
            Some(n0) => println!(
                "stabilize {}: n0 = {n0}, {} (window {}, top level {})",
                stab.side,
                if stab.certified {
                    "certified"
                } else {
                    "not certified"
                },
                stab.window,
                stab.top
            ),
            None => println!(
                "stabilize {}: {}",
                stab.side,
                stab.reason.as_deref().unwrap_or("inconclusive")
            ),
        }
    }
    for lim in [&report.limit_h, &report.limit_t].into_iter().flatten() {
        println!(
            "limit {}: rank {}, torsion {:?} at precision level {}",
            lim.side, lim.rank, lim.torsion, lim.top_level
        );
    }
    match &report.outcome {
        DualityOutcome::Certified(cert) => {
            println!(
                "verdict: pass (unimodularity certificate at precision l^{}, slack {})",
                cert.precision,
                report.pairing.as_ref().map(|p| p.slack).unwrap_or(0)
            );
        }
        DualityOutcome::InvalidTower => println!("verdict: violation (tower axioms fail)"),
        DualityOutcome::NotUnimodular {
            report: div,
            after_valid_tower,
        } => {
            let vals: Vec<String> = div
                .valuations
                .iter()
                .map(|v| {
                    if v.exact {
                        v.value.to_string()
                    } else {
                        format!(">={}", v.value)
                    }
                })
                .collect();
            println!(
                "verdict: not-unimodular (elementary-divisor valuations [{}]){}",
                vals.join(", "),
                if *after_valid_tower {
                    " -- the tower passed validation, so this indicates a defect beyond the horizon or a bug"
                } else {
                    ""
                }
            );
        }
        DualityOutcome::TorsionNotKilled { detail } => {
            println!("verdict: torsion-not-killed ({detail})")
        }
        DualityOutcome::Inconclusive { side } => {
            println!("verdict: inconclusive (side {side} not stabilized at this horizon)")
        }
    }
}

fn build_run_report(
    command: &str,
    inputs: Vec<jsonio::InputDigest>,
    options: Vec<(String, String)>,
    verdict: &str,
    stages: Vec<jsonio::StageJson>,
    report: &DualityReport,
) -> RunReport {
    let violations = report
        .validation
        .violations
        .iter()
        .map(|v| jsonio::ViolationJson {
            level: v.level.to_string(),
            kind: v.kind.to_string(),
            detail: v.detail.clone(),
            divisor_valuations: v
                .divisor_valuations
                .as_ref()
                .map(|vals| vals.iter().map(jsonio::valuation_to_json).collect()),
        })
        .collect();
    let stabilization = [&report.stab_h, &report.stab_t]
        .into_iter()
        .flatten()
        .map(|s| jsonio::StabilizationJson {
            side: s.side.to_string(),
            window: s.window.to_string(),
            top: s.top.to_string(),
            n0: s.n0.map(|n| n.to_string()),
            certified: s.certified,
            reason: s.reason.clone(),
            levels: s
                .levels
                .iter()
                .map(|l| jsonio::StabilizationLevelJson {
                    n: l.level.to_string(),
                    window_ok: l.window_ok,
                    deficit: l.deficit.iter().map(|d| d.to_string()).collect(),
                    injective: l.injective,
                    stable_image_order: l.stable.module.order().to_string(),
                })
                .collect(),
        })
        .collect();
    let limits = [&report.limit_h, &report.limit_t]
        .into_iter()
        .flatten()
        .map(|l| jsonio::LimitJson {
            side: l.side.to_string(),
            top_level: l.top_level.to_string(),
            rank: l.rank.to_string(),
            torsion: l.torsion.iter().map(|c| c.to_string()).collect(),
            floor_only: l.floor_only.to_string(),
        })
        .collect();
    let divisor_valuations = match &report.outcome {
        DualityOutcome::NotUnimodular { report: div, .. } => div
            .valuations
            .iter()
            .map(jsonio::valuation_to_json)
            .collect(),
        _ => Vec::new(),
    };
    let torsion_kill = report
        .pairing
        .as_ref()
        .map(|p| {
            p.torsion_kill
                .iter()
                .map(|c| jsonio::TorsionKillJson {
                    side: c.side.to_string(),
                    torsion_index: c.torsion_index.to_string(),
                    against_index: c.against_index.to_string(),
                    exponent: c.exponent.to_string(),
                    required_valuation: c.required_valuation.to_string(),
                    observed_valuation: c.observed.value.to_string(),
                    observed_exact: c.observed.exact,
                })
                .collect()
        })
        .unwrap_or_default();
    let mut precision_ledger = Vec::new();
    if let Some(p) = &report.pairing {
        precision_ledger.push(jsonio::PrecisionLossJson {
            stage: "stabilize".into(),
            loss: p.slack.to_string(),
            reason: "window of levels above the top testable level".into(),
        });
        for c in &p.torsion_kill {
            if c.exponent > 0 {
                precision_ledger.push(jsonio::PrecisionLossJson {
                    stage: "torsion-kill".into(),
                    loss: c.exponent.to_string(),
                    reason: format!(
                        "side {} torsion generator {} is determined only up to l^{} times a lift",
                        c.side, c.torsion_index, c.required_valuation
                    ),
                });
            }
        }
    }
    let certificate = match &report.outcome {
        DualityOutcome::Certified(cert) => Some(jsonio::certificate_to_file(cert)),
        _ => None,
    };
    RunReport {
        format: jsonio::FORMAT,
        command: command.to_string(),
        inputs,
        options,
        verdict: verdict.to_string(),
        stages,
        violations,
        stabilization,
        limits,
        divisor_valuations,
        torsion_kill,
        precision_ledger,
        certificate,
    }
}

// -------------------------------------------------------------------- replay

fn cmd_replay(args: &ReplayArgs) -> u8 {
    let cert_text = match std::fs::read_to_string(&args.certificate) {
        Ok(t) => t,
        Err(e) => return fail_malformed(&format!("reading {}: {e}", args.certificate.display())),
    };
    // accept either a bare certificate or a run report embedding one
    let cert_file: CertificateFile = match serde_json::from_str::<CertificateFile>(&cert_text) {
        Ok(c) => c,
        Err(_) => match serde_json::from_str::<RunReport>(&cert_text) {
            Ok(run) => match run.certificate {
                Some(c) => c,
                None => return fail_malformed("run report carries no certificate"),
            },
            Err(e) => return fail_malformed(&format!("not a certificate or report: {e}")),
        },
    };
    let tower = match jsonio::read_tower(&args.tower) {
        Ok(t) => t,
        Err(e) => return fail_malformed(&e.to_string()),
    };
    let cert = match jsonio::certificate_from_file(&cert_file, &tower) {
        Ok(c) => c,
        Err(JsonError::Malformed(msg)) => {
            // a well-formed certificate that does not fit this tower is a
            // replay failure, not a parse failure
            println!("replay: FAIL ({msg})");
            return EXIT_VIOLATION;
        }
        Err(e) => return fail_malformed(&e.to_string()),
    };
    match replay_certificate(&cert, &tower) {
        Ok(()) => {
            println!(
                "replay: ok (all congruences hold at precision l^{})",
                cert.precision
            );
            EXIT_PASS
        }
        Err(e) => {
            println!("replay: FAIL ({e})");
            EXIT_VIOLATION
        }
    }
}

// ---------------------------------------------------------------------- util

fn read_payload(input: &Option<PathBuf>) -> Result<String, String> {
    match input {
        Some(path) => {
            std::fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))
        }
        None => {
            use std::io::Read;
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| format!("reading stdin: {e}"))?;
            Ok(buf)
        }
    }
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable")
    );
}

fn domain_error(kind: &str, message: String) -> u8 {
    print_json(&jsonio::ErrorObject {
        error: jsonio::ErrorBody {
            kind: kind.into(),
            message,
        },
    });
    EXIT_VIOLATION
}

fn cmd_util(op: UtilOp) -> u8 {
    let input = match &op {
        UtilOp::Snf(i)
        | UtilOp::Decompose(i)
        | UtilOp::PairingCheck(i)
        | UtilOp::DualPartner(i) => &i.input,
    };
    let text = match read_payload(input) {
        Ok(t) => t,
        Err(e) => return fail_malformed(&e),
    };
    match op {
        UtilOp::Snf(_) => util_snf(&text),
        UtilOp::Decompose(_) => util_decompose(&text),
        UtilOp::PairingCheck(_) => util_pairing_check(&text),
        UtilOp::DualPartner(_) => util_dual_partner(&text),
    }
}

fn parse_free_matrix(rows: &jsonio::MatrixJson, what: &str) -> Result<IntMatrix, String> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    jsonio::matrix_from_json(rows, r, c, what).map_err(|e| e.to_string())
}

fn util_snf(text: &str) -> u8 {
    let req: jsonio::SnfRequest = match serde_json::from_str(text) {
        Ok(r) => r,
        Err(e) => return fail_malformed(&format!("snf payload: {e}")),
    };
    let matrix = match parse_free_matrix(&req.matrix, "matrix") {
        Ok(m) => m,
        Err(e) => return fail_malformed(&e),
    };
    let mode = match &req.mode {
        jsonio::SnfModeJson::Keyword(k) if k == "integer" => SnfMode::Integer,
        jsonio::SnfModeJson::Keyword(k) => {
            return fail_malformed(&format!(
                "unknown mode {k:?}; use \"integer\" or {{\"local\": ...}}"
            ))
        }
        jsonio::SnfModeJson::Local { local } => {
            let prime = match local.prime.parse::<u64>() {
                Ok(p) => p,
                Err(_) => return fail_malformed("local.prime must be an integer"),
            };
            let ring = match LocalRing::new(prime) {
                Ok(r) => r,
                Err(e) => return fail_malformed(&e.to_string()),
            };
            let level = match local.level.parse::<u32>() {
                Ok(l) if l >= 1 => l,
                _ => return fail_malformed("local.level must be a positive integer"),
            };
            SnfMode::Local { ring, level }
        }
    };
    let f = snf(&matrix, &mode);
    print_json(&jsonio::SnfResponse {
        format: jsonio::FORMAT,
        u: jsonio::matrix_to_json(&f.u),
        s: jsonio::matrix_to_json(&f.s),
        v: jsonio::matrix_to_json(&f.v),
        diagonal: f.diagonal().iter().map(|d| d.to_string()).collect(),
    });
    EXIT_PASS
}

fn util_decompose(text: &str) -> u8 {
    let req: jsonio::DecomposeRequest = match serde_json::from_str(text) {
        Ok(r) => r,
        Err(e) => return fail_malformed(&format!("decompose payload: {e}")),
    };
    let prime = match req.prime.parse::<u64>() {
        Ok(p) => p,
        Err(_) => return fail_malformed("prime must be an integer"),
    };
    let ring = match LocalRing::new(prime) {
        Ok(r) => r,
        Err(e) => return fail_malformed(&e.to_string()),
    };
    let level = match req.level.parse::<u32>() {
        Ok(l) if l >= 1 => l,
        _ => return fail_malformed("level must be a positive integer"),
    };
    let presentation = match parse_free_matrix(&req.presentation, "presentation") {
        Ok(m) => m,
        Err(e) => return fail_malformed(&e),
    };
    let (module, basis) = decompose(ring, level, &presentation);
    print_json(&jsonio::DecomposeResponse {
        format: jsonio::FORMAT,
        exponents: module.exponents().iter().map(|e| e.to_string()).collect(),
        basis: jsonio::matrix_to_json(&basis),
    });
    EXIT_PASS
}

fn util_pairing_check(text: &str) -> u8 {
    let req: jsonio::PairingCheckRequest = match serde_json::from_str(text) {
        Ok(r) => r,
        Err(e) => return fail_malformed(&format!("pairing-check payload: {e}")),
    };
    let prime = match req.prime.parse::<u64>() {
        Ok(p) => p,
        Err(_) => return fail_malformed("prime must be an integer"),
    };
    let ring = match LocalRing::new(prime) {
        Ok(r) => r,
        Err(e) => return fail_malformed(&e.to_string()),
    };
    let precision = match req.precision.parse::<u32>() {
        Ok(p) if p >= 1 => p,
        _ => return fail_malformed("precision must be a positive integer"),
    };
    let gram = match parse_free_matrix(&req.gram, "gram") {
        Ok(m) => m,
        Err(e) => return fail_malformed(&e),
    };
    let pairing = FreePairing::new(ring, precision, gram);
    let response = match pairing.check_unimodular() {
        UnimodularOutcome::Unimodular(cert) => jsonio::PairingCheckResponse {
            format: jsonio::FORMAT,
            unimodular: true,
            left_transform: Some(jsonio::matrix_to_json(&cert.left_transform)),
            right_transform: Some(jsonio::matrix_to_json(&cert.right_transform)),
            left_rank: None,
            right_rank: None,
            divisor_valuations: None,
        },
        UnimodularOutcome::NotUnimodular(report) => {
            let (left, right, vals) = jsonio::divisor_report_to_json(&report);
            jsonio::PairingCheckResponse {
                format: jsonio::FORMAT,
                unimodular: false,
                left_transform: None,
                right_transform: None,
                left_rank: Some(left),
                right_rank: Some(right),
                divisor_valuations: Some(vals),
            }
        }
    };
    print_json(&response);
    EXIT_PASS
}

fn util_dual_partner(text: &str) -> u8 {
    let req: jsonio::DualPartnerRequest = match serde_json::from_str(text) {
        Ok(r) => r,
        Err(e) => return fail_malformed(&format!("dual-partner payload: {e}")),
    };
    let tower = match jsonio::tower_from_file(&req.tower) {
        Ok(t) => t,
        Err(e) => return fail_malformed(&e.to_string()),
    };
    let window = match &req.window {
        None => 2,
        Some(s) => match s.parse::<u32>() {
            Ok(w) if w >= 1 => w,
            _ => return fail_malformed("window must be a positive integer"),
        },
    };
    let h = match jsonio::parse_h_coords(&req.h) {
        Ok(h) => h,
        Err(e) => return fail_malformed(&e.to_string()),
    };
    let report = verify_duality(&tower, window);
    let cert = match report.outcome {
        DualityOutcome::Certified(cert) => cert,
        DualityOutcome::Inconclusive { side } => {
            return domain_error(
                "inconclusive",
                format!("stabilization for side {side} not certified at this horizon"),
            )
        }
        other => return domain_error("not-certified", format!("{other:?}")),
    };
    match dual_partner_from_certificate(&tower, &cert, &h) {
        Ok(partner) => {
            print_json(&jsonio::DualPartnerResponse {
                format: jsonio::FORMAT,
                t: partner.coords.iter().map(|c| c.to_string()).collect(),
                t_ambient: partner.ambient.iter().map(|c| c.to_string()).collect(),
                precision: partner.precision.to_string(),
                pairing_value: partner.pairing_value.to_string(),
            });
            EXIT_PASS
        }
        Err(e @ TowerError::DivisibleElement) => domain_error("divisible", e.to_string()),
        Err(e @ TowerError::NoFreePart) => domain_error("no-free-part", e.to_string()),
        Err(e @ TowerError::BadCoordinates { .. }) => {
            domain_error("bad-coordinates", e.to_string())
        }
        Err(e) => domain_error("domain", e.to_string()),
    }
}
