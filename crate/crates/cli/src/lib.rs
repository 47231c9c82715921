//! Command-line front end. [`dispatch`] parses arguments, runs one
//! subcommand and returns the process exit code: 0 on success, 1 when a
//! verification fails or a target is infeasible, 2 on bad usage or input.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{json, Value};

use semireg_core::analysis::{verify_inequality, verify_inequality_negated, Lemma};
use semireg_core::geometry::{circumscriptible_from_angles, corner_functional, AngleSet, Polygon};
use semireg_core::heat::{
    cutoff_for_accuracy, expansion, isospectral_test, polygon_invariants, rectangle_invariants,
    rectangle_trace, BoundaryCondition, TRUNCATION_TARGET,
};
use semireg_core::optimize::{solve_full, solve_two_angle};
use semireg_core::sampler::{build_hair, envelope_curve, render_svg, scatter, write_csv};
use semireg_core::semiregular::{envelope_area, from_s, s_from_S};
use semireg_core::Error;

/// Relative artifact paths are resolved against this directory when set.
pub const OUT_DIR_ENV: &str = "SEMIREG_OUT_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "semireg",
    version,
    about = "Semi-regular polygons, heat-trace invariants and the area maximization at fixed S"
)]
struct Cli {
    /// Worker threads (default: all cores for scatter and verify, one otherwise).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    /// Output format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write a run manifest (arguments, seeds, artifacts, timing) to this path.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Heat-trace invariants and expansion coefficients of a polygon.
    Invariants(InvariantsArgs),
    /// The semi-regular polygon with parameter s.
    Semiregular(SemiregularArgs),
    /// Grid-certify one of the inequalities behind the maximizer.
    Verify(VerifyArgs),
    /// Multi-start maximization of area over n angles at fixed S.
    Maximize(MaximizeArgs),
    /// Grid minimization of the two-angle objective.
    Maximize2(Maximize2Args),
    /// Random convex polygons in the (S, area) plane, as CSV and SVG.
    Scatter(ScatterArgs),
    /// Rectangle heat trace against its short-time expansion.
    Heattrace(HeattraceArgs),
    /// Non-convex polygon with prescribed S and area from a convex base.
    Hair(HairArgs),
    /// Compare the heat invariants of two polygons.
    Isospectral(IsospectralArgs),
}

#[derive(Args, Debug)]
struct InvariantsArgs {
    /// JSON file with {"vertices": [[x, y], ...]} or {"angles": [...]}.
    #[arg(long)]
    polygon: PathBuf,
    #[arg(long, default_value = "dirichlet")]
    bc: BoundaryCondition,
}

#[derive(Args, Debug)]
struct SemiregularArgs {
    #[arg(long)]
    s: f64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    lemma: Lemma,
    /// Family parameter, for the lemmas that depend on it.
    #[arg(long)]
    s: Option<f64>,
    #[arg(long, default_value_t = 1e-4)]
    step: f64,
    /// Certify the negated quantity (exercises the failure path).
    #[arg(long, hide = true)]
    negate: bool,
}

#[derive(Args, Debug)]
struct MaximizeArgs {
    #[arg(long)]
    s: f64,
    /// Number of angles (default: ceil(s)).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct Maximize2Args {
    #[arg(long)]
    s: f64,
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
}

#[derive(Args, Debug)]
struct ScatterArgs {
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    #[arg(long, default_value_t = 3)]
    min_sides: usize,
    #[arg(long, default_value_t = 12)]
    max_sides: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output with columns S,area,sides.
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG figure with the scatter and the envelope.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct HeattraceArgs {
    /// Rectangle side lengths as AxB.
    #[arg(long, value_parser = parse_rect)]
    rect: (f64, f64),
    #[arg(long, default_value = "dirichlet")]
    bc: BoundaryCondition,
    #[arg(long)]
    t: f64,
    /// Largest eigenvalue included (default: enough for a 1e-10 tail bound).
    #[arg(long)]
    cutoff: Option<f64>,
}

#[derive(Args, Debug)]
struct HairArgs {
    /// Base polygon file; a regular polygon is used when absent.
    #[arg(long, conflicts_with = "regular")]
    base: Option<PathBuf>,
    /// Sides of the regular base polygon.
    #[arg(long, default_value_t = 5)]
    regular: usize,
    /// Target value of S.
    #[arg(
        long,
        required_unless_present = "target_polygon",
        conflicts_with = "target_polygon"
    )]
    target_s: Option<f64>,
    /// Take the target S from this convex polygon.
    #[arg(long)]
    target_polygon: Option<PathBuf>,
    #[arg(long)]
    target_area: f64,
}

#[derive(Args, Debug)]
struct IsospectralArgs {
    #[arg(long)]
    first: PathBuf,
    #[arg(long)]
    second: PathBuf,
    #[arg(long, default_value = "dirichlet")]
    bc: BoundaryCondition,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

fn parse_rect(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected AxB, got '{s}'"))?;
    let a: f64 = a
        .trim()
        .parse()
        .map_err(|e| format!("bad side '{a}': {e}"))?;
    let b: f64 = b
        .trim()
        .parse()
        .map_err(|e| format!("bad side '{b}': {e}"))?;
    Ok((a, b))
}

/// Failure of a subcommand, mapped to an exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Failed(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Failed(_) => 1,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Infeasible(_) | Error::Numerical(_) => Failure::Failed(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// What a subcommand produced: the stdout document, whether it counts as a
/// pass, and any files written.
struct Outcome {
    value: Value,
    pass: bool,
    artifacts: Vec<Artifact>,
    seeds: Vec<u64>,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct Artifact {
    path: String,
    kind: &'static str,
    bytes: u64,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    subcommand: &'a str,
    args: Vec<String>,
    seeds: Vec<u64>,
    artifacts: Vec<Artifact>,
    version: &'static str,
    duration_seconds: f64,
}

impl Outcome {
    fn value(value: Value) -> Self {
        Self {
            value,
            pass: true,
            artifacts: Vec::new(),
            seeds: Vec::new(),
            warnings: Vec::new(),
        }
    }

    fn of<T: Serialize>(v: &T) -> Result<Self, Failure> {
        Ok(Self::value(to_value(v)?))
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, Failure> {
    serde_json::to_value(v).map_err(|e| Failure::Failed(e.to_string()))
}

/// Writes floats with 17 significant digits.
struct Digits17;

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(v))
    }
}

/// Serializes `v` as one line of JSON with 17-digit floats.
pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17);
    v.serialize(&mut ser).expect("serializing to memory");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

fn text_lines(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                text_lines(&key, x, out);
            }
        }
        Value::Array(xs) if xs.iter().all(|x| !x.is_object()) => {
            let items: Vec<String> = xs.iter().map(scalar_text).collect();
            out.push_str(&format!("{prefix}: [{}]\n", items.join(", ")));
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                text_lines(&format!("{prefix}[{i}]"), x, out);
            }
        }
        _ => out.push_str(&format!("{prefix}: {}\n", scalar_text(v))),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(xs) => {
            let items: Vec<String> = xs.iter().map(scalar_text).collect();
            format!("[{}]", items.join(", "))
        }
        _ => v.to_string(),
    }
}

fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn read_shape(path: &Path) -> Result<Polygon, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let raw: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{}: not JSON ({e})", path.display())))?;
    let bad = |e: serde_json::Error| Failure::Usage(format!("{}: {e}", path.display()));
    if raw.get("vertices").is_some() {
        Ok(serde_json::from_value::<Polygon>(raw).map_err(bad)?)
    } else if raw.get("angles").is_some() {
        let angles: AngleSet = serde_json::from_value(raw).map_err(bad)?;
        Ok(circumscriptible_from_angles(&angles)?)
    } else {
        Err(Failure::Usage(format!(
            "{}: expected an object with \"vertices\" or \"angles\"",
            path.display()
        )))
    }
}

fn finite(name: &str, v: f64) -> Result<f64, Failure> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::Usage(format!("--{name} must be finite, got {v}")))
    }
}

fn write_file(path: &Path, bytes: &[u8], kind: &'static str) -> Result<Artifact, Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::Failed(format!("cannot create {}: {e}", dir.display())))?;
    }
    std::fs::write(path, bytes)
        .map_err(|e| Failure::Failed(format!("cannot write {}: {e}", path.display())))?;
    Ok(Artifact {
        path: path.display().to_string(),
        kind,
        bytes: bytes.len() as u64,
    })
}

fn invariants(a: &InvariantsArgs) -> Result<Outcome, Failure> {
    let p = read_shape(&a.polygon)?;
    let inv = polygon_invariants(&p, a.bc)?;
    let mut v = to_value(&inv)?;
    v["S"] = json!(corner_functional(&p.interior_angles())?);
    v["expansion"] = to_value(&expansion(&inv))?;
    Ok(Outcome::value(v))
}

fn semiregular(a: &SemiregularArgs) -> Result<Outcome, Failure> {
    let spec = from_s(finite("s", a.s)?)?;
    let poly = spec.polygon()?;
    Ok(Outcome::value(json!({
        "s": spec.s,
        "n": spec.n,
        "theta_small": spec.theta_small,
        "theta_big": spec.theta_big,
        "S": spec.s_value(),
        "area": spec.area(),
        "vertices": poly.vertices(),
    })))
}

fn verify(a: &VerifyArgs) -> Result<Outcome, Failure> {
    let cert = if a.negate {
        verify_inequality_negated(a.lemma, a.s, a.step)?
    } else {
        verify_inequality(a.lemma, a.s, a.step)?
    };
    let mut out = Outcome::of(&cert)?;
    out.pass = cert.passed();
    Ok(out)
}

fn maximize(a: &MaximizeArgs) -> Result<Outcome, Failure> {
    let s = finite("s", a.s)?;
    let n = a.n.unwrap_or(s.ceil().max(3.0) as usize);
    let r = solve_full(s, n, a.restarts, a.seed)?;
    let mut out = Outcome::of(&r)?;
    out.seeds = vec![a.seed];
    Ok(out)
}

fn maximize2(a: &Maximize2Args) -> Result<Outcome, Failure> {
    Outcome::of(&solve_two_angle(finite("s", a.s)?, a.step)?)
}

fn scatter_cmd(a: &ScatterArgs) -> Result<Outcome, Failure> {
    let records = scatter(a.samples, a.min_sides, a.max_sides, a.seed)?;
    let mut excess = f64::NEG_INFINITY;
    for r in &records {
        excess = excess.max(r.area - envelope_area(s_from_S(r.s_value)?)?);
    }
    let mut artifacts = Vec::new();
    if let Some(path) = &a.out {
        let mut buf = Vec::new();
        write_csv(&mut buf, &records).map_err(|e| Failure::Failed(e.to_string()))?;
        artifacts.push(write_file(&resolve(path), &buf, "csv")?);
    }
    if let Some(path) = &a.svg {
        let curve = envelope_curve(2.1, a.max_sides.max(12) as f64, 400)?;
        let svg = render_svg(&records, &curve);
        artifacts.push(write_file(&resolve(path), svg.as_bytes(), "svg")?);
    }
    let below = records.is_empty() || excess <= 1e-9;
    Ok(Outcome {
        value: json!({
            "samples": records.len(),
            "min_sides": a.min_sides,
            "max_sides": a.max_sides,
            "seed": a.seed,
            "max_excess_over_envelope": if records.is_empty() { Value::Null } else { json!(excess) },
            "below_envelope": below,
            "csv": a.out.as_ref().map(|p| resolve(p).display().to_string()),
            "svg": a.svg.as_ref().map(|p| resolve(p).display().to_string()),
        }),
        pass: below,
        artifacts,
        seeds: vec![a.seed],
        warnings: Vec::new(),
    })
}

fn heattrace(a: &HeattraceArgs) -> Result<Outcome, Failure> {
    let (w, h) = a.rect;
    let t = finite("t", a.t)?;
    let cutoff = match a.cutoff {
        Some(c) => c,
        None => cutoff_for_accuracy(w, h, t, TRUNCATION_TARGET)?,
    };
    let trace = rectangle_trace(w, h, a.bc, t, cutoff)?;
    let model = expansion(&rectangle_invariants(w, h, a.bc)?).evaluate(t);
    let mut out = Outcome::value(json!({
            "a": w,
            "b": h,
            "bc": a.bc,
            "t": t,
            "cutoff": cutoff,
            "terms": trace.terms,
            "partial_sum": trace.partial_sum,
            "expansion_value": model,
            "residual": trace.partial_sum - model,
            "truncation_bound": trace.truncation_bound,
    }));
    out.warnings.extend(trace.warning);
    Ok(out)
}

fn hair(a: &HairArgs) -> Result<Outcome, Failure> {
    let base = match &a.base {
        Some(path) => read_shape(path)?,
        None => Polygon::regular(a.regular)?,
    };
    let target_s = match (&a.target_polygon, a.target_s) {
        (Some(path), _) => {
            let t = read_shape(path)?;
            if !t.is_convex() {
                return Err(Failure::Usage(format!("{} is not convex", path.display())));
            }
            corner_functional(&t.interior_angles())?
        }
        (None, Some(s)) => finite("target-s", s)?,
        (None, None) => return Err(Failure::Usage("give --target-s or --target-polygon".into())),
    };
    let h = build_hair(&base, target_s, finite("target-area", a.target_area)?)?;
    let mut v = to_value(&h)?;
    v["convex"] = json!(h.polygon.is_convex());
    v["perimeter"] = json!(h.polygon.perimeter());
    Ok(Outcome::value(v))
}

fn isospectral(a: &IsospectralArgs) -> Result<Outcome, Failure> {
    let p = polygon_invariants(&read_shape(&a.first)?, a.bc)?;
    let q = polygon_invariants(&read_shape(&a.second)?, a.bc)?;
    Outcome::of(&isospectral_test(&p, &q, a.tol)?)
}

fn run(cmd: &Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Invariants(a) => invariants(a),
        Command::Semiregular(a) => semiregular(a),
        Command::Verify(a) => verify(a),
        Command::Maximize(a) => maximize(a),
        Command::Maximize2(a) => maximize2(a),
        Command::Scatter(a) => scatter_cmd(a),
        Command::Heattrace(a) => heattrace(a),
        Command::Hair(a) => hair(a),
        Command::Isospectral(a) => isospectral(a),
    }
}

fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Invariants(_) => "invariants",
        Command::Semiregular(_) => "semiregular",
        Command::Verify(_) => "verify",
        Command::Maximize(_) => "maximize",
        Command::Maximize2(_) => "maximize2",
        Command::Scatter(_) => "scatter",
        Command::Heattrace(_) => "heattrace",
        Command::Hair(_) => "hair",
        Command::Isospectral(_) => "isospectral",
    }
}

/// Runs the command line `args` (program name first), writing results to
/// `out` and diagnostics to `err`. Returns the exit code.
pub fn dispatch_to<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let start = Instant::now();
    let parallel = matches!(cli.command, Command::Scatter(_) | Command::Verify(_));
    let threads = cli
        .threads
        .map(usize::from)
        .unwrap_or(if parallel { 0 } else { 1 });
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start thread pool: {e}");
            return 1;
        }
    };
    let result = pool.install(|| run(&cli.command));
    let mut outcome = match result {
        Ok(o) => o,
        Err(f) => {
            let (Failure::Usage(msg) | Failure::Failed(msg)) = &f;
            let _ = writeln!(err, "error: {msg}");
            return f.code();
        }
    };
    for w in &outcome.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let doc = match cli.format {
        Format::Json => to_json(&outcome.value) + "\n",
        Format::Text => {
            let mut s = String::new();
            text_lines("", &outcome.value, &mut s);
            s
        }
    };
    if out.write_all(doc.as_bytes()).is_err() {
        return 1;
    }
    let subcommand = name(&cli.command);
    let manifest_path = cli.manifest.clone().or_else(|| {
        // files written without an explicit manifest get one next to the first
        outcome
            .artifacts
            .first()
            .map(|a| PathBuf::from(format!("{}.manifest.json", a.path)))
    });
    if let Some(path) = manifest_path {
        let manifest = RunManifest {
            subcommand,
            args: args
                .iter()
                .skip(1)
                .map(|a| a.to_string_lossy().into_owned())
                .collect(),
            seeds: std::mem::take(&mut outcome.seeds),
            artifacts: std::mem::take(&mut outcome.artifacts),
            version: env!("CARGO_PKG_VERSION"),
            duration_seconds: start.elapsed().as_secs_f64(),
        };
        let path = if cli.manifest.is_some() {
            resolve(&path)
        } else {
            path
        };
        if let Err(Failure::Usage(m) | Failure::Failed(m)) =
            write_file(&path, (to_json(&manifest) + "\n").as_bytes(), "manifest")
        {
            let _ = writeln!(err, "error: {m}");
            return 1;
        }
    }
    if outcome.pass {
        0
    } else {
        let _ = writeln!(err, "{subcommand}: check failed");
        1
    }
}

/// [`dispatch_to`] on the process's stdout and stderr.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    dispatch_to(args, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        let s = to_json(&json!({"x": 0.1, "n": 3, "v": [1.0 / 3.0]}));
        assert_eq!(
            s,
            r#"{"n":3,"v":[3.3333333333333331e-1],"x":1.0000000000000001e-1}"#
        );
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["v"][0].as_f64().unwrap(), 1.0 / 3.0);
        assert_eq!(back["x"].as_f64().unwrap(), 0.1);
    }

    #[test]
    fn rect_parser() {
        assert_eq!(parse_rect("1x2").unwrap(), (1.0, 2.0));
        assert_eq!(parse_rect("0.5X3").unwrap(), (0.5, 3.0));
        assert!(parse_rect("12").is_err());
        assert!(parse_rect("ax2").is_err());
    }

    #[test]
    fn text_format_flattens() {
        let mut s = String::new();
        text_lines("", &json!({"a": {"b": 1}, "c": [1, 2], "d": "x"}), &mut s);
        assert_eq!(s, "a.b: 1\nc: [1, 2]\nd: x\n");
    }
}
