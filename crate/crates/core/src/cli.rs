//! Batch front-end. Every subcommand is deterministic in its inputs and seed;
//! files are written to a temporary sibling and renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::beta::{self, BetaShiftSpec, BetaValue};
use crate::classify::{evaluate_certificate, ClassifyConfig, RecurrenceReport};
use crate::error::{Error, Result};
use crate::par::Mode;
use crate::potential::{Potential, PotentialDef};
use crate::shift::{ln_big, ShiftDef, ShiftSpace, Word};
use crate::spectrum::{curve_csv, spectrum_curve};
use crate::synthesis::{
    certify, parse_stream, stream_text, synthesize_with, Certificate, GapClass, OrbitPrefix, SynthesisParams,
};

/// Largest horizon `synthesize` accepts.
pub const MAX_HORIZON: usize = 1 << 26;
pub const ORBIT_FILE: &str = "orbit.txt";
pub const CERTIFICATE_FILE: &str = "certificate.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const LOG_BASE_NOTE: &str = "natural logarithm (base e) for all entropies and pressures";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NOT_PRIMITIVE: i32 = 3;
pub const EXIT_CERTIFICATE: i32 = 4;
pub const EXIT_VERDICT: i32 = 5;

const CAPS_HELP: &str = "\
Instance caps:
  synthesize --horizon     at most 2^26 symbols
  proper subshift search   block length <= 12, presentation <= 128 nodes
  beta expansion           period detected within 512 digits
  Legendre bracket         |q| <= 500 before EndpointSaturation
Exit codes: 0 ok, 2 invalid input, 3 not primitive, 4 certificate mismatch, 5 verdict failure.
All logarithms are natural.";

#[derive(Debug, Parser)]
#[command(name = "symdyn", version, about = "Shift spaces, entropy, Birkhoff spectra and witness orbits", after_help = CAPS_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Topological entropy of an SFT or a β-shift.
    Entropy(EntropyArgs),
    /// Birkhoff spectrum Ψ on a grid of levels, written as CSV.
    Spectrum(SpectrumArgs),
    /// Witness orbit prefix and certificate for a gap class.
    Synthesize(SynthesizeArgs),
    /// Recurrence report for a synthesized orbit.
    Classify(ClassifyArgs),
    /// Certificate check followed by the report verdicts.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Log of the spectral radius.
    Spectral,
    /// `(1/n) log #words(n)`.
    Words,
    /// `(1/n) log #{x : T^n x = x}`.
    Periodic,
}

impl Method {
    fn label(self) -> &'static str {
        match self {
            Method::Spectral => "spectral",
            Method::Words => "words",
            Method::Periodic => "periodic",
        }
    }
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["shift", "beta"]))]
pub struct EntropyArgs {
    /// Shift definition JSON.
    #[arg(long)]
    pub shift: Option<PathBuf>,
    /// Decimal β > 1, or `golden` / `e`.
    #[arg(long)]
    pub beta: Option<String>,
    /// Repeatable; all applicable methods when omitted.
    #[arg(long, value_enum)]
    pub method: Vec<Method>,
    /// Word length for the growth estimates (defaults: 24 words, 30 periodic, 22 for β).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub shift: PathBuf,
    #[arg(long)]
    pub potential: PathBuf,
    #[arg(long, default_value_t = 33)]
    pub points: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Defaults to `<out>.manifest.json`.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct SynthesizeArgs {
    #[arg(long)]
    pub shift: PathBuf,
    /// Gap class, e.g. I_NOT_QW.
    #[arg(long)]
    pub class: String,
    #[arg(long)]
    pub potential: PathBuf,
    #[arg(long, default_value_t = crate::classify::DEFAULT_HORIZON)]
    pub horizon: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Admissible word the orbit must start with, as digits.
    #[arg(long)]
    pub prefix: Option<String>,
    /// Entropy slack ε; certified entropy is at least (1-ε)·h_top.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Directory written by `synthesize`.
    #[arg(long)]
    pub orbit: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub orbit: PathBuf,
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub version: String,
    pub log_base: String,
    pub outputs: Vec<String>,
    /// Set only from `SOURCE_DATE_EPOCH`, so reruns stay byte-identical.
    pub timestamps: Option<Value>,
}

impl RunManifest {
    pub const SCHEMA: &'static str = "symdyn.manifest/1";

    fn new(command: &str, inputs: Value, results: Value, outputs: Vec<String>) -> Self {
        let timestamps = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|s| s.trim().parse::<u64>().ok())
            .map(|t| json!({ "source_date_epoch": t }));
        RunManifest {
            schema: Self::SCHEMA.to_string(),
            command: command.to_string(),
            inputs,
            results,
            version: env!("CARGO_PKG_VERSION").to_string(),
            log_base: LOG_BASE_NOTE.to_string(),
            outputs,
            timestamps,
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotPrimitive => EXIT_NOT_PRIMITIVE,
        Error::CertificateMismatch(_) => EXIT_CERTIFICATE,
        _ => EXIT_INPUT,
    }
}

/// Writes `bytes` to a hidden sibling of `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidInput(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn load_shift(path: &Path) -> Result<(ShiftDef, ShiftSpace)> {
    let def: ShiftDef = read_json(path)?;
    if def.schema != ShiftDef::SCHEMA {
        return Err(Error::InvalidInput(format!("{}: schema {:?}", path.display(), def.schema)));
    }
    let s = ShiftSpace::from_def(&def)?;
    Ok((def, s))
}

fn load_potential(path: &Path, s: &ShiftSpace) -> Result<(PotentialDef, Potential)> {
    let def: PotentialDef = read_json(path)?;
    if def.schema != PotentialDef::SCHEMA {
        return Err(Error::InvalidInput(format!("{}: schema {:?}", path.display(), def.schema)));
    }
    let phi = Potential::from_def(s, &def)?;
    Ok((def, phi))
}

fn pretty<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn mode(sequential: bool) -> Mode {
    if sequential {
        Mode::Sequential
    } else {
        Mode::Parallel
    }
}

fn digit_string(w: &[usize]) -> String {
    w.iter().map(|&d| char::from_digit(d as u32, 36).unwrap_or('?')).collect()
}

fn display(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

/// Parses the process arguments, runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_INPUT;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match run(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Entropy(a) => entropy(a, out),
        Command::Spectrum(a) => spectrum(a, out),
        Command::Synthesize(a) => synthesize(a, out),
        Command::Classify(a) => classify(a, out),
        Command::Verify(a) => verify(a, out),
    }
}

fn entropy(a: EntropyArgs, out: &mut dyn Write) -> Result<i32> {
    let methods = if a.method.is_empty() { vec![Method::Spectral, Method::Words, Method::Periodic] } else { a.method.clone() };
    if a.n == Some(0) {
        return Err(Error::InvalidInput("--n must be at least 1".into()));
    }
    writeln!(out, "# {LOG_BASE_NOTE}")?;
    let mut results = serde_json::Map::new();
    let inputs;
    if let Some(path) = &a.shift {
        let (def, s) = load_shift(path)?;
        inputs = json!({ "shift": def, "methods": methods, "n": a.n });
        for m in &methods {
            let (n, v) = match m {
                Method::Spectral => (None, s.topological_entropy()),
                Method::Words => {
                    let n = a.n.unwrap_or(24);
                    (Some(n), ln_big(&s.count_words(n)) / n as f64)
                }
                Method::Periodic => {
                    if !s.is_primitive() {
                        return Err(Error::NotPrimitive);
                    }
                    let n = a.n.unwrap_or(30);
                    (Some(n), ln_big(&s.count_periodic(n)) / n as f64)
                }
            };
            match n {
                Some(n) => writeln!(out, "{:<9} {v:.12}  (n = {n})", m.label())?,
                None => writeln!(out, "{:<9} {v:.12}", m.label())?,
            }
            results.insert(m.label().to_string(), json!(v));
        }
    } else {
        let b = BetaValue::parse(a.beta.as_deref().unwrap_or_default())?;
        let spec = BetaShiftSpec::new(&b, beta::DEFAULT_HORIZON, false)?;
        inputs = json!({
            "beta": b.literal(),
            "methods": methods,
            "n": a.n,
            "digits": { "preperiod": digit_string(&spec.preperiod), "period": digit_string(&spec.period), "validity": spec.validity },
        });
        for m in &methods {
            let (n, v) = match m {
                Method::Spectral => match beta::beta_entropy_spectral(&spec) {
                    Ok(v) => (None, v),
                    Err(e @ Error::PeriodNotDetected { .. }) if a.method.is_empty() => {
                        writeln!(out, "{:<9} unavailable: {e}", m.label())?;
                        continue;
                    }
                    Err(e) => return Err(e),
                },
                Method::Words => {
                    let n = a.n.unwrap_or(22);
                    (Some(n), beta::beta_entropy_estimate(&spec, n)?)
                }
                Method::Periodic => {
                    if a.method.is_empty() {
                        continue;
                    }
                    return Err(Error::InvalidInput("periodic growth is available for SFTs only".into()));
                }
            };
            match n {
                Some(n) => writeln!(out, "{:<9} {v:.12}  (n = {n})", m.label())?,
                None => writeln!(out, "{:<9} {v:.12}", m.label())?,
            }
            results.insert(m.label().to_string(), json!(v));
        }
        writeln!(out, "{:<9} {:.12}  (log {})", "log-beta", b.ln(), b.literal())?;
        results.insert("log_beta".into(), json!(b.ln()));
    }
    if let Some(path) = &a.manifest {
        let m = RunManifest::new("entropy", inputs, Value::Object(results), Vec::new());
        write_atomic(path, &pretty(&m)?)?;
    }
    Ok(EXIT_OK)
}

fn spectrum(a: SpectrumArgs, out: &mut dyn Write) -> Result<i32> {
    let (sdef, s) = load_shift(&a.shift)?;
    if !s.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let (pdef, phi) = load_potential(&a.potential, &s)?;
    let curve = spectrum_curve(&s, &phi, a.points, mode(a.sequential))?;
    write_atomic(&a.out, curve_csv(&curve).as_bytes())?;
    let manifest_path = a.manifest.clone().unwrap_or_else(|| {
        let mut p = a.out.clone().into_os_string();
        p.push(".manifest.json");
        PathBuf::from(p)
    });
    let m = RunManifest::new(
        "spectrum",
        json!({ "shift": sdef, "potential": pdef, "points": a.points }),
        json!({ "l_phi": curve.interval, "h_top": curve.h_top, "parry_integral": curve.parry_integral }),
        vec![display(&a.out)],
    );
    write_atomic(&manifest_path, &pretty(&m)?)?;
    writeln!(out, "# {LOG_BASE_NOTE}")?;
    writeln!(out, "L_phi = [{:.12}, {:.12}]  h_top = {:.12}", curve.interval.lo, curve.interval.hi, curve.h_top)?;
    writeln!(out, "wrote {} rows to {}", curve.points.len(), a.out.display())?;
    Ok(EXIT_OK)
}

fn synthesize(a: SynthesizeArgs, out: &mut dyn Write) -> Result<i32> {
    let (sdef, s) = load_shift(&a.shift)?;
    let class: GapClass = a.class.parse()?;
    let (pdef, phi) = load_potential(&a.potential, &s)?;
    if a.horizon > MAX_HORIZON {
        return Err(Error::InvalidInput(format!("horizon {} exceeds the cap {MAX_HORIZON}", a.horizon)));
    }
    let prefix = a.prefix.as_deref().map(Word::from_digits).transpose()?;
    let mut params = SynthesisParams { mode: mode(a.sequential), ..SynthesisParams::default() };
    if let Some(eps) = a.epsilon {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidInput(format!("epsilon must lie in (0, 1), got {eps}")));
        }
        params.entropy_slack = eps;
    }
    let orbit = synthesize_with(&s, class, &phi, a.horizon, a.seed, prefix.as_ref(), &params)?;
    fs::create_dir_all(&a.out)?;
    let orbit_path = a.out.join(ORBIT_FILE);
    let cert_path = a.out.join(CERTIFICATE_FILE);
    write_atomic(&orbit_path, stream_text(&orbit.word)?.as_bytes())?;
    write_atomic(&cert_path, &pretty(&orbit.certificate)?)?;
    let m = RunManifest::new(
        "synthesize",
        json!({
            "shift": sdef,
            "potential": pdef,
            "class": class,
            "horizon": a.horizon,
            "seed": a.seed,
            "prefix": a.prefix,
            "epsilon": params.entropy_slack,
        }),
        json!({
            "h_top": orbit.certificate.h_top,
            "inf_entropy_over_k": orbit.certificate.inf_entropy_over_k,
            "segments": orbit.certificate.schedule.segments.len(),
        }),
        vec![ORBIT_FILE.to_string(), CERTIFICATE_FILE.to_string()],
    );
    write_atomic(&a.out.join(MANIFEST_FILE), &pretty(&m)?)?;
    writeln!(
        out,
        "{} horizon {} seed {}: inf entropy over K {:.12} (h_top {:.12})",
        class, a.horizon, a.seed, orbit.certificate.inf_entropy_over_k, orbit.certificate.h_top
    )?;
    Ok(EXIT_OK)
}

/// Reads `orbit.txt` and `certificate.json` from a synthesize directory.
pub fn load_orbit(dir: &Path) -> Result<OrbitPrefix> {
    let word = parse_stream(&read_text(&dir.join(ORBIT_FILE))?)?;
    let certificate: Certificate = read_json(&dir.join(CERTIFICATE_FILE))?;
    Ok(OrbitPrefix { word, certificate })
}

fn report_for(o: &OrbitPrefix, sequential: bool) -> Result<RecurrenceReport> {
    let cfg = ClassifyConfig { mode: mode(sequential), ..ClassifyConfig::default() };
    evaluate_certificate(&o.word, &o.certificate, &cfg)
}

fn classify(a: ClassifyArgs, out: &mut dyn Write) -> Result<i32> {
    let o = load_orbit(&a.orbit)?;
    let report = report_for(&o, a.sequential)?;
    write_atomic(&a.out, &pretty(&report)?)?;
    if let Some(path) = &a.manifest {
        let m = RunManifest::new(
            "classify",
            json!({ "certificate": o.certificate, "symbols": o.word.len() }),
            json!({ "all_pass": report.all_pass() }),
            vec![display(&a.out)],
        );
        write_atomic(path, &pretty(&m)?)?;
    }
    write!(out, "{}", report.table())?;
    Ok(EXIT_OK)
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let o = load_orbit(&a.orbit)?;
    let checks = certify(&o)?;
    writeln!(out, "certificate: {} checks passed", checks.checks.len())?;
    let report = report_for(&o, a.sequential)?;
    write!(out, "{}", report.table())?;
    if report.all_pass() {
        writeln!(out, "verify: ok")?;
        Ok(EXIT_OK)
    } else {
        writeln!(out, "verify: verdict failure")?;
        Ok(EXIT_VERDICT)
    }
}
