//! Command-line front end: exact self-tests, family members, scale recovery,
//! ray classification and gallery verification, all reporting JSON.
//!
//! Exit codes: `0` everything passed, `1` a verification failed, `2` the
//! input or the invocation was malformed.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use g2tractor::forms::KForm;
use g2tractor::g2core::{standard_exact, standard_structure, G2Structure};
use g2tractor::gallery::{verify_example, Overrides, Params};
use g2tractor::scalars::{ExactScalar, Scalar, ScalarText};
use g2tractor::stabilizer::witnesses::reference_s;
use g2tractor::stabilizer::{classify_ray, family_member, make_stabilizer, recover_scale, Branch, FamilyParam, RecoveryError};
use g2tractor::suites;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "g2tractor", version, about = "Split G2 algebra and almost Einstein (2,3,5) verification")]
pub struct Cli {
    /// Plain-text `key = value` configuration; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact identity suites of the algebra, decompositions, families and recovery.
    Selftest {
        /// Run the suites at full size (200 forms, 50 cycles, 10^4 rays per causality type).
        #[arg(long)]
        full: bool,
    },
    /// Emit a member of the family of 3-forms sharing `K` with the standard one.
    Family(FamilyArgs),
    /// Recover the scale and family parameters relating two 3-forms.
    Recover {
        #[arg(long, value_name = "FILE")]
        phi: PathBuf,
        #[arg(long = "phi-prime", value_name = "FILE")]
        phi_prime: PathBuf,
    },
    /// Orbit of an isotropic ray under the stabilizer of `S`.
    Classify {
        /// Comma-separated exact coordinates of `S`.
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        /// Comma-separated exact coordinates of `X`.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Verification suites of the explicit examples.
    Gallery {
        #[command(subcommand)]
        action: GalleryAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum GalleryAction {
    /// Run one example's checks: rolling, rolling-para, dirichlet or submaximal.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub name: String,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tolerance for every continuous check.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Comma-separated `υ` values (rolling).
    #[arg(long, allow_hyphen_values = true)]
    pub upsilon: Option<String>,
    /// Comma-separated `t` values (dirichlet).
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    /// Comma-separated invariants `I` (submaximal).
    #[arg(long = "i-values", allow_hyphen_values = true)]
    pub i_values: Option<String>,
    /// Add `σ = x²` to the submaximal scales (expected to fail).
    #[arg(long)]
    pub inject_nonsolution: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Exact,
    Float,
}

#[derive(Args, Debug)]
pub struct FamilyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub eps: i8,
    #[arg(long, value_enum)]
    pub backend: Option<Backend>,
    /// Raw parameters `Φ′ = Φ + Ā Φ_I + B Φ_J` (exact text).
    #[arg(long, allow_hyphen_values = true)]
    pub abar: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Angle `υ` of a circle member (`ε = −1`, float backend).
    #[arg(long, allow_hyphen_values = true)]
    pub upsilon: Option<f64>,
    /// Time `t` of a hyperbola member (`ε = +1`, float backend).
    #[arg(long, allow_hyphen_values = true)]
    pub time: Option<f64>,
    #[arg(long, value_parser = ["-", "+"], allow_hyphen_values = true)]
    pub branch: Option<String>,
    /// Parameter `s` of a parabolic member (`ε = 0`, exact text).
    #[arg(long = "param-s", allow_hyphen_values = true)]
    pub param_s: Option<String>,
    /// Comma-separated `S` (default: the reference vector for `ε`).
    #[arg(long = "s-vector", allow_hyphen_values = true)]
    pub s_vector: Option<String>,
}

/// A failure to interpret the input; maps to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

/// `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected `key = value`", n + 1))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

const CONFIG_KEYS: [&str; 9] = ["points", "seed", "tol", "backend", "upsilon", "t", "i_values", "out", "inject_nonsolution"];

fn config_value<T: std::str::FromStr>(cfg: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, UsageError>
where
    T::Err: std::fmt::Display,
{
    cfg.get(key)
        .map(|v| v.parse::<T>().map_err(|e| UsageError(format!("config `{key}`: {e}"))))
        .transpose()
}

fn parse_list<T: std::str::FromStr>(field: &str, s: &str) -> Result<Vec<T>, UsageError>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|e| UsageError(format!("`{field}`: cannot parse {x:?}: {e}"))))
        .collect()
}

fn exact_text(field: &str, s: &str) -> Result<ExactScalar, UsageError> {
    s.parse::<ExactScalar>().map_err(|e| UsageError(format!("`{field}`: {e}")))
}

fn exact_vector(field: &str, s: &str) -> Result<Vec<ExactScalar>, UsageError> {
    let v = parse_list::<ExactScalar>(field, s)?;
    if v.len() != 7 {
        return Err(UsageError(format!("`{field}`: expected 7 coordinates, got {}", v.len())));
    }
    Ok(v)
}

fn vec_json<T: ScalarText>(v: &[T]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(x.to_text())).collect())
}

/// Result of one command: its JSON and whether everything it checked passed.
pub struct Outcome {
    pub json: Value,
    pub pass: bool,
}

fn selftest(full: bool) -> Outcome {
    let checks = if full {
        let mut c = suites::algebra();
        c.extend(suites::decomposition(200, 1));
        c.extend(suites::family(30));
        c.extend(suites::recovery(50));
        c.extend(suites::classifier(10_000, 5));
        c
    } else {
        suites::selftest()
    };
    let pass = checks.iter().all(|c| c.pass);
    Outcome { json: json!({"checks": checks, "overall": pass}), pass }
}

fn family_exact(a: &FamilyArgs) -> Result<Value, UsageError> {
    if a.upsilon.is_some() || a.time.is_some() {
        return Err(UsageError("`upsilon`/`time` are transcendental parameters; use --backend float".into()));
    }
    let g = standard_exact();
    let s = match &a.s_vector {
        Some(v) => exact_vector("s-vector", v)?,
        None => reference_s(a.eps),
    };
    let sd = make_stabilizer(&g, &s)?;
    if sd.eps != a.eps {
        return Err(UsageError(format!("`s-vector` has eps = {}, not {}", sd.eps, a.eps)));
    }
    let p = match (&a.abar, &a.b, &a.param_s) {
        (Some(x), Some(y), None) => FamilyParam::Raw { abar: exact_text("abar", x)?, b: exact_text("b", y)? },
        (None, None, Some(s)) => FamilyParam::Parabolic { s: exact_text("param-s", s)? },
        _ => return Err(UsageError("give either --abar and --b, or --param-s".into())),
    };
    let phi = family_member(&sd, &g, &p)?;
    Ok(family_json(a.eps, &s, p.to_json(), &g.phi, &phi))
}

fn family_float(a: &FamilyArgs) -> Result<Value, UsageError> {
    let g: G2Structure<f64> = standard_structure();
    let s: Vec<f64> = match &a.s_vector {
        Some(v) => parse_list::<f64>("s-vector", v)?,
        None => reference_s(a.eps).iter().map(|x| x.to_f64()).collect(),
    };
    if s.len() != 7 {
        return Err(UsageError(format!("`s-vector`: expected 7 coordinates, got {}", s.len())));
    }
    let sd = make_stabilizer(&g, &s)?;
    if sd.eps != a.eps {
        return Err(UsageError(format!("`s-vector` has eps = {}, not {}", sd.eps, a.eps)));
    }
    let branch = match a.branch.as_deref() {
        Some("+") => Branch::Plus,
        _ => Branch::Minus,
    };
    let num = |f: &str, s: &str| f64::from_text(s).map_err(|e| UsageError(format!("`{f}`: {e}")));
    let p = match (a.upsilon, a.time, &a.abar, &a.b, &a.param_s) {
        (Some(u), None, None, None, None) => FamilyParam::circle_angle(u),
        (None, Some(t), None, None, None) => FamilyParam::hyperbolic_time(branch, t),
        (None, None, Some(x), Some(y), None) => FamilyParam::Raw { abar: num("abar", x)?, b: num("b", y)? },
        (None, None, None, None, Some(s)) => FamilyParam::Parabolic { s: num("param-s", s)? },
        _ => return Err(UsageError("give exactly one of --upsilon, --time, --abar with --b, or --param-s".into())),
    };
    let phi = family_member(&sd, &g, &p)?;
    Ok(family_json(a.eps, &s, p.to_json(), &g.phi, &phi))
}

fn family_json<T: Scalar + ScalarText>(eps: i8, s: &[T], params: Value, phi: &KForm<T>, phi_prime: &KForm<T>) -> Value {
    json!({"eps": eps, "S": vec_json(s), "params": params, "phi": phi.to_json(), "phi_prime": phi_prime.to_json()})
}

fn read_form(path: &Path, key: &str) -> Result<KForm<ExactScalar>, UsageError> {
    let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| UsageError(format!("{}: invalid JSON: {e}", path.display())))?;
    // Either a bare list of terms, or an object carrying the form under `key`.
    let terms = match &v {
        Value::Array(_) => &v,
        Value::Object(m) => m.get(key).ok_or_else(|| UsageError(format!("{}: missing field `{key}`", path.display())))?,
        _ => return Err(UsageError(format!("{}: expected a list of terms or an object", path.display()))),
    };
    KForm::from_json(7, 3, terms).map_err(|e| UsageError(format!("{}: field `{key}`: {e}", path.display())))
}

fn recover(phi: &Path, phi_prime: &Path) -> Result<Outcome, UsageError> {
    let base = read_form(phi, "phi")?;
    let other = read_form(phi_prime, "phi_prime")?;
    let g = G2Structure::from_phi(base).map_err(|e| UsageError(format!("`phi`: {e}")))?;
    Ok(match recover_scale(&g, &other) {
        Ok(r) => Outcome { json: r.to_json(), pass: true },
        Err(e @ (RecoveryError::Identical | RecoveryError::NotInFamily(_) | RecoveryError::NotRepresentable(_))) => {
            Outcome { json: json!({"error": e.to_string()}), pass: false }
        }
    })
}

fn classify(s: &str, x: &str) -> Result<Outcome, UsageError> {
    let s = exact_vector("s", s)?;
    let x = exact_vector("x", x)?;
    let g = standard_exact();
    let label = classify_ray(&g, &s, &x, None, 0.0)?;
    Ok(Outcome { json: json!({"label": label.as_str()}), pass: true })
}

fn gallery(v: &VerifyArgs, cfg: &BTreeMap<String, String>) -> Result<Outcome, UsageError> {
    let list = |flag: &Option<String>, key: &str| -> Result<Option<Vec<f64>>, UsageError> {
        match flag.as_ref().or(cfg.get(key)) {
            Some(s) => parse_list::<f64>(key, s).map(Some),
            None => Ok(None),
        }
    };
    let mut params = Params::default();
    if let Some(u) = list(&v.upsilon, "upsilon")? {
        params.upsilon = u;
    }
    if let Some(t) = list(&v.t, "t")? {
        params.t = t;
    }
    if let Some(i) = list(&v.i_values, "i_values")? {
        params.i_values = i;
    }
    let ov = Overrides {
        points: v.points.or(config_value(cfg, "points")?),
        seed: v.seed.or(config_value(cfg, "seed")?),
        tol: v.tol.or(config_value(cfg, "tol")?),
        params: Some(params),
        inject_nonsolution: v.inject_nonsolution || config_value::<bool>(cfg, "inject_nonsolution")?.unwrap_or(false),
    };
    let r = verify_example(&v.name, &ov)?;
    let json = serde_json::to_value(&r)?;
    Ok(Outcome { json, pass: r.overall })
}

fn dispatch(cli: &Cli, cfg: &BTreeMap<String, String>) -> Result<Outcome, UsageError> {
    match &cli.command {
        Command::Selftest { full } => Ok(selftest(*full)),
        Command::Family(a) => {
            let backend = match a.backend {
                Some(b) => b,
                None => match cfg.get("backend").map(String::as_str) {
                    None | Some("exact") => Backend::Exact,
                    Some("float") => Backend::Float,
                    Some(o) => return Err(UsageError(format!("config `backend`: unknown value {o:?}"))),
                },
            };
            if ![-1, 0, 1].contains(&a.eps) {
                return Err(UsageError(format!("`eps` must be -1, 0 or 1, got {}", a.eps)));
            }
            let json = match backend {
                Backend::Exact => family_exact(a)?,
                Backend::Float => family_float(a)?,
            };
            Ok(Outcome { json, pass: true })
        }
        Command::Recover { phi, phi_prime } => recover(phi, phi_prime),
        Command::Classify { s, x } => classify(s, x),
        Command::Gallery { action: GalleryAction::Verify(v) } => gallery(v, cfg),
    }
}

/// Runs the command line `argv` (including the program name).
pub fn run<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let cfg = match &cli.config {
        Some(path) => match std::fs::read_to_string(path).map_err(|e| e.to_string()).and_then(|t| parse_config(&t)) {
            Ok(c) => c,
            Err(e) => {
                let _ = writeln!(stderr, "error: config {}: {e}", path.display());
                return EXIT_USAGE;
            }
        },
        None => BTreeMap::new(),
    };
    if let Some(k) = cfg.keys().find(|k| !CONFIG_KEYS.contains(&k.as_str())) {
        let _ = writeln!(stderr, "error: config: unknown key `{k}`");
        return EXIT_USAGE;
    }
    let outcome = match dispatch(&cli, &cfg) {
        Ok(o) => o,
        Err(UsageError(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let mut text = serde_json::to_string_pretty(&outcome.json).expect("JSON values serialize");
    text.push('\n');
    let out = cli.out.clone().or(cfg.get("out").map(PathBuf::from));
    let written = match out {
        Some(path) => std::fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        return EXIT_USAGE;
    }
    if outcome.pass {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectors_need_seven_exact_entries() {
        assert_eq!(exact_vector("s", "0,1,0,0,1/2,0,0").unwrap()[4], ExactScalar::from_ratio(1, 2));
        assert!(exact_vector("s", "0,1").unwrap_err().0.contains("7 coordinates"));
        assert!(exact_vector("x", "0,1,0,0,q,0,0").unwrap_err().0.contains("`x`"));
    }

    #[test]
    fn run_writes_to_the_given_streams() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(["g2tractor", "classify", "--s", "1,0,0,0,0,0,0", "--x", "0,0,0,0,0,0,1"], &mut out, &mut err);
        assert_eq!(code, EXIT_OK, "{}", String::from_utf8_lossy(&err));
        let v: Value = serde_json::from_slice(&out).unwrap();
        assert!(v["label"].is_string());
        assert!(err.is_empty());
    }
}
