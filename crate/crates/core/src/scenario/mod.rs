//! Declarative scenario files: parsing, validation, dispatch to the protocol
//! and certification modules, and the `traces.csv` / `report.json` /
//! `sweep.csv` artifacts.
//!
//! A scenario is a TOML document with `schema_version = 1`, a `kind`
//! (`echo`, `slowlight`, `certify` or `sweep`) and the matching section.
//! Unknown keys are rejected everywhere.

mod artifacts;
mod catalog;
mod run;
mod schema;

use std::path::{Path, PathBuf};

use crate::certify::{ChainModel, DetectorModel, TvProtocol};
use crate::echo::EchoProtocol;
use crate::numcore::ComplexEnvelope;

pub use artifacts::{format_float, sweep_csv, traces_csv};
pub use catalog::{bundled, list_scenarios, CatalogEntry};
pub use run::{ArchetypeEntry, ChainEntry, Comparator, EfficiencyEntry, Outcome, Report, SweepTable};
pub use schema::*;

/// Failure of a scenario run, mapped onto the runner's exit codes.
#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("cannot parse scenario: {0}")]
    Parse(String),
    #[error("invalid scenario: {0}")]
    Validation(String),
    #[error(transparent)]
    Model(#[from] crate::Error),
    #[error("numeric-regime warning escalated by --strict: {0}")]
    Regime(String),
    #[error("cannot write artifacts: {0}")]
    Write(String),
}

impl ScenarioError {
    pub const VALIDATION: i32 = 2;
    pub const CONVERGENCE: i32 = 3;
    pub const REGIME: i32 = 4;

    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Model(e) if e.is_convergence_failure() => Self::CONVERGENCE,
            ScenarioError::Model(crate::Error::GridTooShort { .. } | crate::Error::TruncationOverflow { .. }) => {
                Self::CONVERGENCE
            }
            ScenarioError::Model(e) if e.is_regime_warning() => Self::REGIME,
            ScenarioError::Regime(_) => Self::REGIME,
            _ => Self::VALIDATION,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            Self::CONVERGENCE => "convergence",
            Self::REGIME => "regime",
            _ => match self {
                ScenarioError::Read { .. } | ScenarioError::Write(_) => "io",
                ScenarioError::Parse(_) => "parse",
                _ => "validation",
            },
        }
    }

    /// `{"error": {"kind", "code", "message"}}`, printed on failure.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "error": { "kind": self.kind(), "code": self.exit_code(), "message": self.to_string() }
        })
    }
}

/// Labelled field traces, written in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TraceSet {
    pub fields: Vec<(String, ComplexEnvelope)>,
}

impl TraceSet {
    pub fn push(&mut self, label: String, env: ComplexEnvelope) {
        self.fields.push((label, env));
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    fn push_report(&mut self, prefix: &str, r: &crate::echo::EfficiencyReport) {
        let Some(t) = &r.traces else { return };
        self.push(format!("{prefix}input"), t.input.clone());
        self.push(format!("{prefix}output"), t.output.clone());
        if let Some(x) = &t.reference {
            self.push(format!("{prefix}reference"), x.clone());
        }
        if let Some(x) = &t.control {
            self.push(format!("{prefix}control"), x.clone());
        }
    }
}

/// Run-time switches of [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Overrides the scenario's `output`.
    pub out: Option<PathBuf>,
    pub validate_only: bool,
    /// Multiplies every grid density.
    pub grid_scale: f64,
    /// Turn numeric-regime warnings into failures.
    pub strict: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { out: None, validate_only: false, grid_scale: 1.0, strict: false }
    }
}

/// What a successful [`run`] produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub scenario: String,
    /// `None` for `--validate-only`.
    pub out_dir: Option<PathBuf>,
    pub outcome: Option<Outcome>,
    pub warnings: Vec<String>,
}

pub fn parse_scenario(text: &str) -> Result<ScenarioFile, ScenarioError> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    validate(&file)?;
    Ok(file)
}

/// Read a scenario from disk, or from the bundled catalog if `path` names an
/// entry there and no such file exists.
pub fn load_scenario(path: &Path) -> Result<ScenarioFile, ScenarioError> {
    match std::fs::read_to_string(path) {
        Ok(text) => parse_scenario(&text),
        Err(e) => {
            let key = path.to_string_lossy();
            let key = key.strip_suffix(".toml").unwrap_or(&key);
            match bundled(key) {
                Some(text) => parse_scenario(text),
                None => Err(ScenarioError::Read { path: path.display().to_string(), message: e.to_string() }),
            }
        }
    }
}

fn invalid(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation(msg.into())
}

/// Structural checks plus every module precondition that can be checked
/// before running.
pub fn validate(file: &ScenarioFile) -> Result<(), ScenarioError> {
    if file.schema_version != SCHEMA_VERSION {
        return Err(invalid(format!("unsupported schema_version {} (expected {SCHEMA_VERSION})", file.schema_version)));
    }
    if file.name.trim().is_empty() {
        return Err(invalid("name must not be empty"));
    }
    let present = [
        ("echo", file.echo.is_some()),
        ("slowlight", !file.slowlight.is_empty()),
        ("certify", file.certify.is_some()),
        ("sweep", file.sweep.is_some()),
    ];
    let wanted = match file.kind {
        ScenarioKind::Echo => "echo",
        ScenarioKind::Slowlight => "slowlight",
        ScenarioKind::Certify => "certify",
        ScenarioKind::Sweep => "sweep",
    };
    for (name, is) in present {
        if is != (name == wanted) {
            return Err(invalid(if is {
                format!("section [{name}] does not belong to kind = \"{wanted}\"")
            } else {
                format!("kind = \"{wanted}\" needs a [{wanted}] section")
            }));
        }
    }
    match file.kind {
        ScenarioKind::Echo => validate_echo(file.echo.as_ref().unwrap()),
        ScenarioKind::Slowlight => file.slowlight.iter().try_for_each(validate_slowlight),
        ScenarioKind::Certify => validate_certify(file.certify.as_ref().unwrap()),
        ScenarioKind::Sweep => validate_sweep(file.sweep.as_ref().unwrap()),
    }
}

fn check_depth(d: f64) -> Result<(), ScenarioError> {
    if !(d >= 0.0 && d.is_finite()) {
        return Err(invalid(format!("optical depth must be finite and >= 0, got {d}")));
    }
    Ok(())
}

fn validate_echo(e: &EchoSection) -> Result<(), ScenarioError> {
    check_depth(e.d)?;
    e.numerics.settings(e.d, 1.0).propagation.validate()?;
    e.signal.validate()?;
    let needs = |ok: bool, what: &str| if ok { Ok(()) } else { Err(invalid(what)) };
    match e.protocol {
        EchoKind::TwoPulse => {
            needs(e.tau.is_some(), "2pe needs tau")?;
            needs(e.pi_pulse.is_some(), "2pe needs pi_pulse")?;
            e.pi_pulse.unwrap().validate()?;
            needs(e.direction.is_none() && e.rose.is_none(), "2pe takes neither direction nor rose")?;
        }
        EchoKind::Crib => {
            needs(e.tau.is_some(), "crib needs tau")?;
            needs(e.pi_pulse.is_none() && e.rose.is_none(), "crib takes neither pi_pulse nor rose")?;
        }
        EchoKind::Rose => {
            needs(e.rose.is_some(), "rose needs [echo.rose]")?;
            needs(e.tau.is_none() && e.pi_pulse.is_none(), "rose takes its pulse times from [echo.rose]")?;
        }
    }
    if let Some(t) = e.tau {
        if !(t > 0.0) {
            return Err(invalid(format!("tau must be positive, got {t}")));
        }
    }
    Ok(())
}

fn validate_slowlight(s: &SlowLightSection) -> Result<(), ScenarioError> {
    match s.method {
        SlowLightMethod::Simulate => {
            let sc = s.preset_scenario().ok_or_else(|| invalid("a simulated slow-light run needs a preset"))?;
            if s.transfer.is_some() || s.cut.is_some() {
                return Err(invalid("transfer and cut belong to method = \"transfer\""));
            }
            sc.validate()?;
            sc.grid()?;
        }
        SlowLightMethod::Transfer => {
            let (tf, signal, cut) = s
                .transfer_setup()
                .ok_or_else(|| invalid("a transfer run needs a preset or transfer, signal and cut"))?;
            tf.validate()?;
            signal.validate()?;
            if !cut.is_finite() {
                return Err(invalid("cut must be finite"));
            }
            if !(s.samples_per_width >= 1.0) {
                return Err(invalid("samples_per_width must be >= 1"));
            }
        }
    }
    Ok(())
}

fn validate_certify(c: &CertifySection) -> Result<(), ScenarioError> {
    match c {
        CertifySection::Chain { atoms, depths, n_max, .. } => {
            if atoms.is_empty() || depths.is_empty() {
                return Err(invalid("chain needs at least one atom count and one depth"));
            }
            for &n in atoms {
                for &d in depths {
                    ChainModel::new(n, d)?;
                }
            }
            if *n_max < 1 {
                return Err(invalid("n_max must be >= 1"));
            }
        }
        CertifySection::Tv { protocols, scan } => {
            if protocols.is_empty() && scan.is_none() {
                return Err(invalid("tv needs protocols or a scan"));
            }
            for p in protocols {
                match *p {
                    TvProtocol::Crib { d } | TvProtocol::TwoPulseEcho { d } => check_depth(d)?,
                    TvProtocol::SlowLight { alpha, beta, length } => {
                        crate::certify::slowlight_noise(alpha, beta, length)?;
                    }
                }
            }
            if let Some(s) = scan {
                validate_scan(s)?;
            }
        }
        CertifySection::Counting { checks } => {
            if checks.is_empty() {
                return Err(invalid("counting needs at least one check"));
            }
            for c in checks {
                match c {
                    CountingCheck::G2Memory { detector } => detector.validate()?,
                    CountingCheck::G2TwoPulse { d, eta_d, .. } => {
                        check_depth(*d)?;
                        DetectorModel::new(*eta_d, 0.0, 1.0)?;
                    }
                    CountingCheck::CauchySchwarz { a, b, p } | CountingCheck::BellVisibility { a, b, p } => {
                        a.validate()?;
                        b.validate()?;
                        if !(*p > 0.0 && *p < 1.0) {
                            return Err(invalid(format!("pair parameter p must lie in (0, 1), got {p}")));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn validate_scan(s: &DepthScan) -> Result<(), ScenarioError> {
    check_depth(s.from)?;
    check_depth(s.to)?;
    if s.points == 0 || s.to < s.from {
        return Err(invalid("scan needs points >= 1 and to >= from"));
    }
    Ok(())
}

fn validate_sweep(s: &SweepSection) -> Result<(), ScenarioError> {
    if let Some(scan) = &s.scan {
        validate_scan(scan)?;
    }
    let depths = s.depth_values();
    if depths.is_empty() {
        return Err(invalid("sweep needs depths or a scan"));
    }
    depths.iter().try_for_each(|&d| check_depth(d))?;
    if s.analytic.is_empty() && s.numeric.is_none() {
        return Err(invalid("sweep needs analytic curves or a numeric series"));
    }
    if let Some(n) = &s.numeric {
        n.signal.validate()?;
        match n.protocol {
            EchoProtocol::TwoPulse => {
                if n.ratios.is_empty() || n.ratios.iter().any(|r| !(*r > 0.0)) {
                    return Err(invalid("a 2pe sweep needs positive pulse-duration ratios"));
                }
            }
            EchoProtocol::CribFwd | EchoProtocol::CribBwd => {
                if !n.ratios.is_empty() {
                    return Err(invalid("ratios apply to 2pe sweeps only"));
                }
            }
            EchoProtocol::RoseFwd => return Err(invalid("ROSE needs explicit pulses; use an echo scenario")),
        }
        if !(n.tau > 0.0) {
            return Err(invalid("tau must be positive"));
        }
    }
    Ok(())
}

/// Regime warnings that can be read off the configuration.
pub fn regime_warnings(file: &ScenarioFile) -> Vec<String> {
    let mut w = vec![];
    for s in &file.slowlight {
        if s.method == SlowLightMethod::Simulate {
            if let Some(sc) = s.preset_scenario() {
                w.extend(sc.regime_warnings().iter().map(|e| e.to_string()));
            }
        }
    }
    if let Some(CertifySection::Chain { atoms, depths, .. }) = &file.certify {
        for &n in atoms {
            for &d in depths {
                if let Ok(m) = ChainModel::new(n, d) {
                    w.extend(m.warnings().into_iter().map(|s| format!("N={n}, d={d}: {s}")));
                }
            }
        }
    }
    w
}

/// Execute a parsed scenario without touching the file system.
pub fn execute(file: &ScenarioFile, grid_scale: f64) -> Result<Outcome, ScenarioError> {
    if !(grid_scale > 0.0 && grid_scale.is_finite()) {
        return Err(invalid(format!("grid scale must be positive, got {grid_scale}")));
    }
    run::execute(file, grid_scale)
}

/// Load, validate, run and write artifacts.
pub fn run(path: &Path, opts: &RunOptions) -> Result<RunSummary, ScenarioError> {
    let file = load_scenario(path)?;
    run_file(&file, opts)
}

pub fn run_file(file: &ScenarioFile, opts: &RunOptions) -> Result<RunSummary, ScenarioError> {
    if !(opts.grid_scale > 0.0 && opts.grid_scale.is_finite()) {
        return Err(invalid(format!("grid scale must be positive, got {}", opts.grid_scale)));
    }
    let warnings = regime_warnings(file);
    if opts.strict && !warnings.is_empty() {
        return Err(ScenarioError::Regime(warnings.join("; ")));
    }
    if opts.validate_only {
        return Ok(RunSummary { scenario: file.name.clone(), out_dir: None, outcome: None, warnings });
    }
    let out_dir = opts
        .out
        .clone()
        .or_else(|| file.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out").join(&file.name));
    let outcome = execute(file, opts.grid_scale)?;
    artifacts::write_all(&out_dir, &outcome)?;
    Ok(RunSummary { scenario: file.name.clone(), out_dir: Some(out_dir), warnings: outcome.report.warnings.clone(), outcome: Some(outcome) })
}
