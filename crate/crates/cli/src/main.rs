use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use geomeas::format::{is_state_document, StateFile, TensorFile};
use geomeas::shopm::{gap_from_spectrum, guaranteed_shift_bound, DEFAULT_MAX_ITER};
use geomeas::states::{self, MeasureOptions, Method, PureState};
use geomeas::{restart_radius, z_spectrum_with_tol, AnyTensor, Error, RestartConfig, ShopmConfig};

const EXIT_VALIDATION: u8 = 2;
const EXIT_CAPABILITY: u8 = 3;

#[derive(Parser)]
#[command(name = "geomeas", version, about = "Geometric measure of entanglement for nonnegative pure states")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Also print a human-readable report to stderr.
    #[arg(long, global = true)]
    pretty: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Geometric measure of a state given as a file or a named builder.
    Gm(GmArgs),
    /// Full nonnegative Z-spectrum of a symmetric tensor (dimension 2 or 3).
    Spectrum(SpectrumArgs),
    /// Z-spectral radius by the shifted power method with restarts.
    Power(PowerArgs),
    /// Structural checks on a tensor or state file.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Builder {
    W,
    InvertedW,
    Ghz,
    Dicke,
    QutritGhz,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum MethodArg {
    Auto,
    Elim,
    Power,
    Embed,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Auto => Method::Auto,
            MethodArg::Elim => Method::Elim,
            MethodArg::Power => Method::Power,
            MethodArg::Embed => Method::Embed,
        }
    }
}

/// Accepts fraction literals such as `1/3` (parsed exactly) and decimals.
fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if s.contains('/') {
        let r = Ratio::<i64>::from_str(s).map_err(|e| format!("bad fraction {s:?}: {e}"))?;
        return Ok(*r.numer() as f64 / *r.denom() as f64);
    }
    s.parse::<f64>().map_err(|e| format!("bad number {s:?}: {e}"))
}

#[derive(Args, Serialize)]
struct GmArgs {
    /// State JSON file.
    #[arg(required_unless_present = "builder", conflicts_with = "builder")]
    file: Option<PathBuf>,
    #[arg(long, value_enum)]
    builder: Option<Builder>,
    /// Number of parties (ghz, dicke).
    #[arg(long)]
    m: Option<usize>,
    /// Number of parties in |0⟩ (dicke).
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated α,β,γ (qutrit-ghz); fractions allowed.
    #[arg(long, value_delimiter = ',', value_parser = parse_number)]
    abc: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodArg,
    #[arg(long, default_value_t = geomeas::shopm::DEFAULT_STARTS)]
    restarts: usize,
    #[arg(long, value_parser = parse_number, default_value = "1e-10")]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    #[arg(long, env = "GEOMEAS_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Serialize)]
struct SpectrumArgs {
    /// Tensor JSON file.
    file: PathBuf,
    /// Residual bound for admitting an eigenpair, relative to max(1, λ).
    #[arg(long, value_parser = parse_number, default_value = "1e-8")]
    tol: f64,
}

#[derive(Args, Serialize)]
struct PowerArgs {
    /// Tensor JSON file.
    file: PathBuf,
    #[arg(long, default_value_t = geomeas::shopm::DEFAULT_STARTS)]
    restarts: usize,
    /// Shift: `auto` for (m−1)‖T‖_F + 1e−6, or a value.
    #[arg(long, default_value = "auto")]
    alpha: String,
    #[arg(long, value_parser = parse_number, default_value = "1e-10")]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    #[arg(long, env = "GEOMEAS_SEED", default_value_t = 0)]
    seed: u64,
    /// Record λ at every iteration of every start.
    #[arg(long)]
    trace: bool,
}

#[derive(Args, Serialize)]
struct ValidateArgs {
    /// Tensor or state JSON file.
    file: PathBuf,
}

#[derive(Serialize)]
struct RunReport {
    command: &'static str,
    input_digest: String,
    config: Value,
    result: Value,
    wall_time: f64,
    seed: Option<u64>,
}

struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let (code, kind) = if e.is_capability() {
            (EXIT_CAPABILITY, "capability")
        } else {
            (EXIT_VALIDATION, "validation")
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

fn validation(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_VALIDATION,
        kind: "validation",
        message: message.into(),
    }
}

fn capability(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_CAPABILITY,
        kind: "capability",
        message: message.into(),
    }
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read_input(path: &Path) -> Result<(String, String), Failure> {
    let bytes = std::fs::read(path).map_err(|e| validation(format!("cannot read {}: {e}", path.display())))?;
    let d = digest(&bytes);
    let text = String::from_utf8(bytes).map_err(|_| validation(format!("{} is not UTF-8", path.display())))?;
    Ok((text, d))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn build_state(a: &GmArgs) -> Result<PureState, Failure> {
    let builder = a.builder.expect("clap requires a file or a builder");
    let need = |v: Option<usize>, name: &str| v.ok_or_else(|| validation(format!("--{name} is required for this builder")));
    let state = match builder {
        Builder::W => Ok(states::w()),
        Builder::InvertedW => Ok(states::inverted_w()),
        Builder::Ghz => states::ghz(a.m.unwrap_or(3)),
        Builder::Dicke => states::dicke(need(a.m, "m")?, need(a.k, "k")?),
        Builder::QutritGhz => match a.abc.as_deref() {
            Some(&[x, y, z]) => states::general_ghz_qutrit(x, y, z),
            _ => return Err(validation("--abc needs exactly three values α,β,γ")),
        },
    };
    Ok(state?)
}

fn cmd_gm(a: &GmArgs) -> Result<(String, Value, u8), Failure> {
    let (state, input_digest) = match &a.file {
        Some(path) => {
            let (text, d) = read_input(path)?;
            let file: StateFile = serde_json::from_str(&text).map_err(|e| validation(format!("state file: {e}")))?;
            (file.into_state()?, d)
        }
        None => {
            let spec = json!({"builder": a.builder, "m": a.m, "k": a.k, "abc": a.abc});
            (build_state(a)?, digest(spec.to_string().as_bytes()))
        }
    };
    let opts = MeasureOptions {
        method: a.method.into(),
        restarts: a.restarts,
        tol: a.tol,
        seed: a.seed,
        max_iter: a.max_iter,
        alpha: None,
    };
    let r = states::geometric_measure(&state, &opts)?;
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    let mut result = to_value(&r);
    result["label"] = json!(state.label());
    Ok((input_digest, result, 0))
}

fn read_tensor(path: &Path) -> Result<(AnyTensor, String), Failure> {
    let (text, d) = read_input(path)?;
    let file: TensorFile = serde_json::from_str(&text).map_err(|e| validation(format!("tensor file: {e}")))?;
    Ok((file.into_tensor()?, d))
}

fn require_symmetric(t: AnyTensor) -> Result<geomeas::SymTensor, Failure> {
    match t {
        AnyTensor::Symmetric(s) => Ok(s),
        AnyTensor::General(g) => Err(validation(format!(
            "tensor with dims {:?} is not symmetric; use `geomeas gm` on a state for the nonsymmetric path",
            g.dims()
        ))),
    }
}

fn cmd_spectrum(a: &SpectrumArgs) -> Result<(String, Value, u8), Failure> {
    let (t, d) = read_tensor(&a.file)?;
    let t = require_symmetric(t)?;
    if t.dim() > 3 {
        return Err(capability(format!(
            "elimination handles dimensions 2 and 3 only (got {}); use `geomeas power` for the radius",
            t.dim()
        )));
    }
    let spec = z_spectrum_with_tol(&t, a.tol)?;
    let gap = gap_from_spectrum(&t, &spec);
    let mut result = to_value(&spec);
    result["gap"] = to_value(&gap);
    Ok((d, result, 0))
}

fn cmd_power(a: &PowerArgs) -> Result<(String, Value, u8), Failure> {
    let (t, d) = read_tensor(&a.file)?;
    let t = require_symmetric(t)?;
    let alpha = match a.alpha.trim() {
        "auto" => None,
        s => Some(parse_number(s).map_err(validation)?),
    };
    let bound = guaranteed_shift_bound(&t);
    let mut flags = Vec::new();
    if alpha.is_some_and(|v| v <= bound) {
        flags.push("shift below guaranteed bound".to_string());
        eprintln!("warning: shift {} is not above (m−1)‖T‖_F = {bound}; monotonicity is not guaranteed", a.alpha);
    }
    let cfg = RestartConfig {
        starts: a.restarts,
        seed: a.seed,
        shopm: ShopmConfig {
            alpha,
            tol: a.tol,
            max_iter: a.max_iter,
            record_trace: a.trace,
        },
        ..Default::default()
    };
    let r = restart_radius(&t, &cfg)?;
    for w in &r.audit.warnings {
        eprintln!("warning: {w}");
    }
    let mut result = to_value(&r);
    result["alpha"] = json!(alpha.unwrap_or_else(|| geomeas::shopm::default_shift(&t)));
    result["guaranteed_shift_bound"] = json!(bound);
    result["flags"] = json!(flags);
    Ok((d, result, 0))
}

fn cmd_validate(a: &ValidateArgs) -> Result<(String, Value, u8), Failure> {
    let (text, d) = read_input(&a.file)?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| validation(format!("invalid JSON: {e}")))?;
    let is_state = is_state_document(&doc);
    let tensor = if is_state {
        let s: StateFile = serde_json::from_value(doc).map_err(|e| validation(format!("state file: {e}")))?;
        TensorFile {
            order: s.dims.len(),
            dims: s.dims,
            entries: s.amplitudes,
            symmetrize: false,
        }
        .into_tensor()?
    } else {
        let t: TensorFile = serde_json::from_value(doc).map_err(|e| validation(format!("tensor file: {e}")))?;
        t.into_tensor()?
    };
    let g = tensor.general();
    let symmetric = matches!(tensor, AnyTensor::Symmetric(_));
    let negative = g.first_negative();
    let nonneg_pass = negative.is_none();
    let irreducible = match g.is_irreducible() {
        Ok(v) => json!({"value": v, "note": null}),
        Err(e) => json!({"value": null, "note": e.to_string()}),
    };
    let mut checks = json!({
        "symmetric": {"pass": symmetric},
        "nonnegative": {
            "pass": nonneg_pass,
            "first_negative": negative.map(|(idx, value)| json!({
                "idx": idx.iter().map(|i| i + 1).collect::<Vec<_>>(),
                "value": value,
            })),
        },
        "irreducible": irreducible,
    });
    let mut valid = nonneg_pass;
    if is_state {
        let norm_sq: f64 = g.data().iter().map(|v| v * v).sum();
        let dev = (norm_sq - 1.0).abs();
        let status = if dev <= states::NORM_EXACT_TOL {
            "normalized"
        } else if dev <= states::NORM_RENORMALIZE_TOL {
            "renormalizable"
        } else {
            "not-normalized"
        };
        valid &= status != "not-normalized";
        checks["normalization"] = json!({"pass": status != "not-normalized", "status": status, "norm_sq": norm_sq});
    } else {
        checks["normalization"] = json!({"frobenius_norm": g.frobenius_norm()});
    }
    if !nonneg_pass {
        eprintln!("validation failed: {}", if is_state { "state not nonnegative in given basis" } else { "negative tensor entry" });
    }
    let result = json!({
        "kind": if is_state { "state" } else { "tensor" },
        "dims": g.dims(),
        "checks": checks,
        "valid": valid,
    });
    Ok((d, result, if valid { 0 } else { EXIT_VALIDATION }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (command, config, seed, outcome) = match &cli.command {
        Command::Gm(a) => ("gm", to_value(a), Some(a.seed), cmd_gm(a)),
        Command::Spectrum(a) => ("spectrum", to_value(a), None, cmd_spectrum(a)),
        Command::Power(a) => ("power", to_value(a), Some(a.seed), cmd_power(a)),
        Command::Validate(a) => ("validate", to_value(a), None, cmd_validate(a)),
    };
    let (input_digest, result, code) = match outcome {
        Ok(ok) => ok,
        Err(f) => {
            eprintln!("error ({}): {}", f.kind, f.message);
            (String::new(), json!({"error": {"kind": f.kind, "message": f.message}}), f.code)
        }
    };
    let report = RunReport {
        command,
        input_digest,
        config,
        result,
        wall_time: start.elapsed().as_secs_f64(),
        seed,
    };
    if cli.pretty {
        eprintln!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    }
    let mut out = std::io::stdout().lock();
    // A closed pipe on stdout is not an error worth a panic.
    let _ = writeln!(out, "{}", serde_json::to_string(&report).expect("report serializes"));
    ExitCode::from(code)
}
