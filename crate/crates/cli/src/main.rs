//! `trijord` — build generalized triangular matrix rings from instance
//! files, solve their derivation-style map spaces exactly, and check the
//! structural identities behind the Jordan-vs-ordinary comparison.
//!
//! Exit codes are a stable contract: 0 success, 1 usage or I/O problem,
//! 2 axiom or identity failure, 3 parse failure, 4 cap refusal.

use std::collections::BTreeSet;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use trijord::derivlab::{is_member, solve_space, space_members, DerivError, DerivKind};
use trijord::linmap::{enumerate_addmaps, EnumerationOverflow, SystemError};
use trijord_cli::{presets, report};

use trijord_cli::instance::{lower, CapsOverride, LowerError, LoweredInstance};

#[derive(Parser)]
#[command(
    name = "trijord",
    version,
    about = "Exact derivation and Jordan-derivation spaces of generalized \
             triangular matrix rings over finite base rings"
)]
struct Cli {
    /// Seed for every sampled check (overrides the instance file).
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Largest element count the per-element scans will walk (overrides
    /// the instance file).
    #[arg(long, global = true, value_name = "N")]
    element_cap: Option<u64>,

    /// Largest map count the enumeration oracle will walk (overrides the
    /// instance file).
    #[arg(long, global = true, value_name = "N")]
    oracle_cap: Option<u64>,

    /// Worker threads for parallel scans (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an instance file and validate every algebraic axiom.
    Validate {
        /// Instance file path, or `preset:NAME`.
        file: String,
    },
    /// Solve one map space and print it as JSON.
    Solve {
        /// Instance file path, or `preset:NAME`.
        file: String,
        /// Which defining identity to solve for.
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Also enumerate every additive map, filter by the identity, and
        /// assert the result equals the solved space.
        #[arg(long)]
        oracle: bool,
    },
    /// Solve both the derivation and linearized Jordan spaces and report
    /// inclusion, equality, and any Jordan-only witnesses.
    Compare {
        /// Instance file path, or `preset:NAME`.
        file: String,
    },
    /// Run every structural identity checker against every generator of
    /// the linearized Jordan space.
    Lemmas {
        /// Instance file path, or `preset:NAME`.
        file: String,
    },
    /// Bundle validation, hypotheses, all four spaces, the comparison,
    /// and the identity suite into one JSON report file.
    Report {
        /// Instance file path, or `preset:NAME`.
        file: String,
        /// Output path for the JSON report.
        #[arg(short, long, value_name = "PATH")]
        out: String,
    },
    /// List the embedded example instances.
    Presets,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    /// D(ab) = D(a)b + aD(b)
    Deriv,
    /// D(ab + ba) = D(a)b + aD(b) + D(b)a + bD(a)
    JordanLin,
    /// D(a^2) = D(a)a + aD(a), scanned over every element
    JordanSq,
    /// D(ab) = D(b)a + bD(a)
    Antideriv,
}

impl KindArg {
    fn kind(self) -> DerivKind {
        match self {
            KindArg::Deriv => DerivKind::Derivation,
            KindArg::JordanLin => DerivKind::JordanLinearized,
            KindArg::JordanSq => DerivKind::JordanSquared,
            KindArg::Antideriv => DerivKind::Antiderivation,
        }
    }
}

/// A command failure carrying its contract exit code.
struct CmdError {
    code: u8,
    message: String,
}

impl CmdError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        CmdError {
            code,
            message: message.into(),
        }
    }
}

impl From<LowerError> for CmdError {
    fn from(e: LowerError) -> Self {
        let code = match e {
            LowerError::Parse(_) => 3,
            LowerError::Axiom(_) => 2,
        };
        CmdError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<DerivError> for CmdError {
    fn from(e: DerivError) -> Self {
        let code = match e {
            DerivError::ElementCap { .. } | DerivError::OracleCap { .. } => 4,
            DerivError::System(SystemError::ModulusTooLarge { .. }) => 4,
            _ => 2,
        };
        CmdError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<EnumerationOverflow> for CmdError {
    fn from(e: EnumerationOverflow) -> Self {
        CmdError {
            code: 4,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .is_err()
        {
            eprintln!("thread pool already initialized; --threads ignored");
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CmdError> {
    let over = CapsOverride {
        element_cap: cli.element_cap,
        oracle_cap: cli.oracle_cap,
        seed: cli.seed,
    };
    match &cli.command {
        Command::Validate { file } => cmd_validate(file, &over),
        Command::Solve { file, kind, oracle } => cmd_solve(file, &over, kind.kind(), *oracle),
        Command::Compare { file } => cmd_compare(file, &over),
        Command::Lemmas { file } => cmd_lemmas(file, &over),
        Command::Report { file, out } => cmd_report(file, &over, out),
        Command::Presets => cmd_presets(),
    }
}

/// Loads an instance argument (path or `preset:NAME`), classifying read
/// failures as usage problems (exit 1) and lowering failures by class.
fn load(file: &str, over: &CapsOverride) -> Result<(LoweredInstance, String), CmdError> {
    let (text, display) = presets::resolve_source(file).map_err(|m| CmdError::new(1, m))?;
    let lowered = lower(&text, over)?;
    Ok((lowered, display))
}

fn emit<T: Serialize>(value: &T) -> Result<(), CmdError> {
    let bytes = report::to_bytes(value);
    std::io::stdout()
        .write_all(&bytes)
        .map_err(|e| CmdError::new(1, format!("cannot write to stdout: {e}")))
}

fn note_elapsed(started: Instant) {
    eprintln!("elapsed: {:.3}s", started.elapsed().as_secs_f64());
}

fn cmd_validate(file: &str, over: &CapsOverride) -> Result<(), CmdError> {
    let (lowered, display) = load(file, over)?;
    let v = lowered.spec.validation();
    let mode = if v.sampled { "sampled" } else { "exhaustive" };
    println!(
        "ok: {display} (digest {}): n = {}, {} generators, {} validation over {} tuples",
        &lowered.digest[..12],
        lowered.spec.size(),
        lowered.spec.basis().len(),
        mode,
        v.tuples_checked,
    );
    Ok(())
}

#[derive(Serialize)]
struct SolveJson {
    digest: String,
    #[serde(flatten)]
    space: report::SpaceJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleJson>,
}

#[derive(Serialize)]
struct OracleJson {
    maps_enumerated: u64,
    members_found: usize,
    matched: bool,
}

fn cmd_solve(
    file: &str,
    over: &CapsOverride,
    kind: DerivKind,
    oracle: bool,
) -> Result<(), CmdError> {
    let (lowered, _) = load(file, over)?;
    let started = Instant::now();
    let space = solve_space(&lowered.spec, kind, &lowered.caps)?;
    let oracle_json = if oracle {
        Some(run_oracle(&lowered, kind, &space)?)
    } else {
        None
    };
    let mismatch = matches!(&oracle_json, Some(o) if !o.matched);
    let out = SolveJson {
        digest: lowered.digest.clone(),
        space: report::space_json(kind, &space),
        oracle: oracle_json,
    };
    emit(&out)?;
    note_elapsed(started);
    if mismatch {
        return Err(CmdError::new(
            2,
            format!(
                "oracle mismatch: the solved {kind} space differs from brute-force enumeration"
            ),
        ));
    }
    Ok(())
}

/// Walks every additive map, keeps the ones satisfying the identity, and
/// compares that set against the solved space's full member list.
fn run_oracle(
    lowered: &LoweredInstance,
    kind: DerivKind,
    space: &trijord::linmap::SolutionSpace<trijord::AddMap>,
) -> Result<OracleJson, CmdError> {
    let spec = &lowered.spec;
    let caps = &lowered.caps;
    let basis = spec.basis().clone();
    let mut brute: BTreeSet<Vec<Vec<u64>>> = BTreeSet::new();
    let mut maps_enumerated: u64 = 0;
    for map in enumerate_addmaps(&basis, caps.oracle_cap)? {
        maps_enumerated += 1;
        if is_member(spec, &map, kind, caps)?.is_none() {
            brute.insert(report::render_map(&map));
        }
    }
    let solved: BTreeSet<Vec<Vec<u64>>> = space_members(&basis, space, caps.oracle_cap)?
        .iter()
        .map(report::render_map)
        .collect();
    Ok(OracleJson {
        maps_enumerated,
        members_found: brute.len(),
        matched: brute == solved,
    })
}

#[derive(Serialize)]
struct CompareOut {
    digest: String,
    hypotheses: report::HypothesesJson,
    #[serde(flatten)]
    compare: report::CompareJson,
}

fn cmd_compare(file: &str, over: &CapsOverride) -> Result<(), CmdError> {
    let (lowered, _) = load(file, over)?;
    let started = Instant::now();
    let hyp = trijord::derivlab::check_hypotheses(&lowered.spec);
    let compare = report::compare_json(&lowered.spec, &lowered.caps)?;
    let out = CompareOut {
        digest: lowered.digest.clone(),
        hypotheses: report::hypotheses_json(&hyp),
        compare,
    };
    emit(&out)?;
    note_elapsed(started);
    Ok(())
}

#[derive(Serialize)]
struct LemmasOut {
    digest: String,
    hypotheses: report::HypothesesJson,
    maps: Vec<report::MapLemmasJson>,
}

fn cmd_lemmas(file: &str, over: &CapsOverride) -> Result<(), CmdError> {
    let (lowered, _) = load(file, over)?;
    let started = Instant::now();
    let hyp = trijord::derivlab::check_hypotheses(&lowered.spec);
    let maps = report::lemmas_json(&lowered.spec, &lowered.caps)?;
    let failed: usize = maps
        .iter()
        .flat_map(|m| &m.entries)
        .filter(|e| e.status == "fail")
        .count();
    let out = LemmasOut {
        digest: lowered.digest.clone(),
        hypotheses: report::hypotheses_json(&hyp),
        maps,
    };
    emit(&out)?;
    note_elapsed(started);
    if failed > 0 {
        return Err(CmdError::new(
            2,
            format!("{failed} identity check(s) failed"),
        ));
    }
    Ok(())
}

fn cmd_report(file: &str, over: &CapsOverride, out_path: &str) -> Result<(), CmdError> {
    let (lowered, _) = load(file, over)?;
    let started = Instant::now();
    let report = report::build_report(&lowered.spec, &lowered.caps, &lowered.digest)?;
    let bytes = report::to_bytes(&report);
    std::fs::write(out_path, &bytes)
        .map_err(|e| CmdError::new(1, format!("cannot write {out_path}: {e}")))?;
    eprintln!("report written to {out_path} ({} bytes)", bytes.len());
    note_elapsed(started);
    Ok(())
}

fn cmd_presets() -> Result<(), CmdError> {
    for p in presets::PRESETS {
        println!("{:<14} {}", p.name, p.summary);
    }
    Ok(())
}
