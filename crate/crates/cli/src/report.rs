use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use pcgroup::catalog;
use pcgroup::identities::{ClaimOptions, ClaimReport};
use pcgroup::structure::GroupStats;
use pcgroup::{CheckMode, Error, Limits, Mode, PcGroup, Presentation, Verdict};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::{Common, ModeArg};

pub const SCHEMA: &str = "pcg-run-report";
pub const SCHEMA_VERSION: u32 = 1;

/// Everything needed to reproduce a run. Only fields named `elapsed_ms` vary
/// between identical invocations.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub input: Option<InputInfo>,
    pub settings: Settings,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub group: Option<GroupStats>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub claims: Vec<ClaimReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub data: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<ReportError>,
    pub exit_status: u8,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputInfo {
    /// `file` or `catalog`.
    pub kind: String,
    /// Path as given, or the catalog spec.
    pub source: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub name: Option<String>,
    /// SHA-256 of the file bytes, or of the canonical text for catalog entries.
    pub sha256: String,
    /// SHA-256 of the canonical serialization.
    pub canonical_sha256: String,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub metadata: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Settings {
    pub mode: CheckMode,
    pub seed: u64,
    pub samples: u64,
    pub witness_budget: usize,
    pub exhaustive_budget: u64,
    pub limits: Limits,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportError {
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub details: Option<Value>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn limits(c: &Common) -> Limits {
    let mut l = Limits::default();
    if let Some(cap) = c.cap {
        l.enum_cap = cap;
        l.pair_cap = l.pair_cap.min(cap);
        l.oracle_cap = l.oracle_cap.min(cap);
    }
    l
}

pub fn mode(c: &Common) -> Mode {
    match c.mode {
        ModeArg::Exhaustive => Mode::Exhaustive,
        ModeArg::Sampled => Mode::sampled(c.seed, c.samples),
    }
}

pub fn claim_options(c: &Common) -> ClaimOptions {
    ClaimOptions {
        mode: mode(c),
        fallback: Some((c.seed, c.samples)),
        witness_budget: c.witness_budget,
        exhaustive_budget: c.exhaustive_budget,
        limits: limits(c),
        ..ClaimOptions::default()
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Capacity(_) => 3,
        _ => 2,
    }
}

pub struct Loaded {
    pub pres: Presentation,
    pub info: InputInfo,
}

/// Reads `--input` or `--catalog`, falling back to `default` when both are absent.
pub fn load(c: &Common, default: Option<&str>) -> Result<Loaded, Error> {
    let (kind, source, bytes, pres) = if let Some(path) = &c.input {
        let bytes = std::fs::read(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        let text = String::from_utf8_lossy(&bytes).into_owned();
        let pres = pcgroup::parse(&text)?;
        ("file", path.display().to_string(), bytes, pres)
    } else if let Some(spec) = c.catalog.as_deref().or(default) {
        let pres = catalog::get_spec(spec)?;
        let bytes = pres.serialize().into_bytes();
        ("catalog", spec.to_string(), bytes, pres)
    } else {
        return Err(Error::InvalidArgument("one of --input or --catalog is required".into()));
    };
    let canonical = pres.serialize();
    let info = InputInfo {
        kind: kind.into(),
        source,
        name: pres.name().map(str::to_string),
        sha256: sha256_hex(&bytes),
        canonical_sha256: sha256_hex(canonical.as_bytes()),
        metadata: pres.metadata.clone(),
    };
    Ok(Loaded { pres, info })
}

/// A report under construction plus the text printed for it.
pub struct Outcome {
    pub report: RunReport,
    pub text: Vec<String>,
    start: Instant,
}

impl Outcome {
    pub fn new(command: &str, c: &Common) -> Self {
        let opts = claim_options(c);
        Outcome {
            report: RunReport {
                schema: SCHEMA.into(),
                schema_version: SCHEMA_VERSION,
                tool_version: env!("CARGO_PKG_VERSION").into(),
                command: command.into(),
                input: None,
                settings: Settings {
                    mode: mode(c).into(),
                    seed: c.seed,
                    samples: c.samples,
                    witness_budget: c.witness_budget,
                    exhaustive_budget: opts.exhaustive_budget,
                    limits: opts.limits,
                },
                group: None,
                verdicts: Vec::new(),
                claims: Vec::new(),
                data: None,
                error: None,
                exit_status: 0,
                elapsed_ms: 0,
            },
            text: Vec::new(),
            start: Instant::now(),
        }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    /// Records `e` and the matching exit status.
    pub fn fail(&mut self, e: Error) {
        let details = match &e {
            Error::Inconsistent(fs) => serde_json::to_value(fs).ok(),
            _ => None,
        };
        if let Error::Inconsistent(fs) = &e {
            for f in fs {
                self.line(format!("overlap {:?} on {}: {f}", f.kind, f.generators.join(",")));
            }
        }
        self.line(format!("error [{}]: {e}", e.code()));
        self.report.exit_status = self.report.exit_status.max(exit_code(&e));
        self.report.error = Some(ReportError { code: e.code().into(), message: e.to_string(), details });
    }

    /// Raises the exit status to 1 unless a worse status is already set.
    pub fn mark_failed(&mut self) {
        self.report.exit_status = self.report.exit_status.max(1);
    }

    pub fn finish(mut self, json: Option<&Path>) -> ExitCode {
        self.report.elapsed_ms = self.start.elapsed().as_millis() as u64;
        let mut stdout = std::io::stdout().lock();
        for l in &self.text {
            if writeln!(stdout, "{l}").is_err() {
                break;
            }
        }
        if let Some(path) = json {
            let body = serde_json::to_string_pretty(&self.report).expect("report serializes");
            if let Err(e) = std::fs::write(path, body + "\n") {
                eprintln!("pcg: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        ExitCode::from(self.report.exit_status)
    }
}

/// Builds the group from `--input`/`--catalog` (or `default`) with consistency
/// checked, then runs `body`. Errors become the report's error and exit status.
pub fn with_group(
    command: &str,
    c: &Common,
    default: Option<&str>,
    body: impl FnOnce(&mut Outcome, &PcGroup) -> Result<(), Error>,
) -> Outcome {
    let mut out = Outcome::new(command, c);
    let loaded = match load(c, default) {
        Ok(l) => l,
        Err(e) => {
            out.fail(e);
            return out;
        }
    };
    out.report.input = Some(loaded.info);
    let g = match PcGroup::build(&loaded.pres, true) {
        Ok(g) => g,
        Err(e) => {
            out.fail(e);
            return out;
        }
    };
    if let Err(e) = body(&mut out, &g) {
        out.fail(e);
    }
    out
}
