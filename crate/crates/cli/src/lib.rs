//! Command-line front end. [`run`] parses arguments and returns the exit
//! code with everything that would be printed, so tests can drive it
//! without spawning a process.

pub mod cases;
pub mod verify;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use twistpar::characters::{local_behavior, local_class, twist_norm};
use twistpar::parity::{delta_infinity_closed_form, global_consistency_sides, DensityMode};
use twistpar::poly::real_root_signature;
use twistpar::search::{find_shift_primes, load_recipes, Direction, TwistRecipe};
use twistpar::symbols::sign_of;
use twistpar::torsion::rational_two_torsion_dim;
use twistpar::{
    galois_classify, parse_curve, parse_profiles, prime_scan, CurveSpec, Error, ParityEngine, Place,
    PrimeCache, ProfileSet, QuadTwist, ScanFilter,
};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShiftDirection {
    Up,
    Down,
}

#[derive(Debug, Parser)]
#[command(name = "twistpar", version, about = "Parity of 2-Selmer ranks in quadratic twist families")]
pub struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Cycle-type cache file (defaults to `<curve>.cache`).
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Discriminant, bad set, real signature, Galois label and 2-torsion.
    Analyze {
        #[arg(long)]
        curve: PathBuf,
        /// Primes sampled for the Galois certificate.
        #[arg(long, default_value_t = 1000)]
        sample_bound: u64,
    },
    /// Re-derive the reference checks on the bundled curves.
    VerifyPaper,
    /// Frobenius cycle types of good primes up to a limit.
    ClassifyPrimes {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        limit: u64,
        /// Keep only class i (Frobenius with i + 1 orbits).
        #[arg(long)]
        class: Option<usize>,
    },
    /// Square-free kernel, norm and local behavior of a twist.
    Character {
        #[arg(long, allow_hyphen_values = true)]
        d: String,
        /// Report behavior at this curve's bad places.
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// Predicted parity flip of one twist.
    Parity {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        d: String,
        #[arg(long)]
        profiles: Option<PathBuf>,
    },
    /// Fraction of twists with even predicted parity.
    Scan {
        #[arg(long)]
        curve: PathBuf,
        /// Enumerate every character of norm below this bound.
        #[arg(long, conflicts_with_all = ["sample", "bound"])]
        max_norm: Option<u64>,
        /// Number of random square-free twists.
        #[arg(long, requires = "bound")]
        sample: Option<u64>,
        /// Bound on |d| for sampled twists.
        #[arg(long, requires = "sample")]
        bound: Option<u64>,
        #[arg(long)]
        profiles: Option<PathBuf>,
        /// Parity of the untwisted rank.
        #[arg(long, default_value_t = 0)]
        r1_parity: u8,
    },
    /// Primes l whose twist d = l can move the 2-Selmer rank.
    FindTwist {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, value_enum)]
        direction: ShiftDirection,
        #[arg(long)]
        limit: u64,
        /// Print the recipes as a bare JSON array.
        #[arg(long)]
        emit_json: bool,
        /// Instead of searching, re-verify the recipes in this file.
        #[arg(long)]
        verify: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Analyze { .. } => "analyze",
            Command::VerifyPaper => "verify-paper",
            Command::ClassifyPrimes { .. } => "classify-primes",
            Command::Character { .. } => "character",
            Command::Parity { .. } => "parity",
            Command::Scan { .. } => "scan",
            Command::FindTwist { .. } => "find-twist",
        }
    }
}

/// Everything a run produced.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Serialize)]
struct Report<'a> {
    schema_version: u32,
    tool: &'a str,
    version: &'a str,
    command: &'a str,
    seed: u64,
    inputs: Value,
    outputs: Value,
}

/// What a command hands back for rendering.
struct Done {
    code: i32,
    inputs: Value,
    outputs: Value,
    text: String,
    /// Printed verbatim instead of the report.
    raw: Option<String>,
    warnings: Vec<String>,
}

impl Done {
    fn new(inputs: Value, outputs: Value, text: String) -> Self {
        Done {
            code: EXIT_OK,
            inputs,
            outputs,
            text,
            raw: None,
            warnings: Vec::new(),
        }
    }
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = std::result::Result<Done, Failure>;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ResourceLimit(_) => EXIT_RESOURCE,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    run_cli(&cli)
}

pub fn run_cli(cli: &Cli) -> Outcome {
    let result = match cli.threads {
        Some(0) => Err(Failure::Usage("--threads must be positive".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(cli)),
            Err(e) => Err(Failure::Usage(format!("cannot start thread pool: {e}"))),
        },
        None => dispatch(cli),
    };
    match result {
        Ok(done) => render(cli, done),
        Err(Failure::Usage(msg)) => Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
        Err(Failure::Lib(e)) => Outcome {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn render(cli: &Cli, done: Done) -> Outcome {
    let mut stderr = String::new();
    for w in &done.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let stdout = if let Some(raw) = done.raw {
        raw
    } else {
        match cli.format {
            Format::Text => done.text,
            Format::Json => {
                let report = Report {
                    schema_version: SCHEMA_VERSION,
                    tool: "twistpar",
                    version: env!("CARGO_PKG_VERSION"),
                    command: cli.command.name(),
                    seed: cli.seed,
                    inputs: done.inputs,
                    outputs: done.outputs,
                };
                let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
                s.push('\n');
                s
            }
        }
    };
    Outcome {
        code: done.code,
        stdout,
        stderr,
    }
}

fn read_file(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_curve(path: &Path) -> std::result::Result<CurveSpec, Failure> {
    parse_curve(&read_file(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_profiles(path: Option<&Path>) -> std::result::Result<ProfileSet, Failure> {
    match path {
        None => Ok(ProfileSet::new()),
        Some(p) => parse_profiles(&read_file(p)?).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
    }
}

fn parse_twist(d: &str) -> std::result::Result<QuadTwist, Failure> {
    let n: BigInt = d
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("`{d}` is not an integer")))?;
    Ok(QuadTwist::new(&n)?)
}

/// Opens the cache; a cache that cannot be opened only costs speed.
fn open_cache(cli: &Cli, curve_path: &Path, warnings: &mut Vec<String>) -> Option<PrimeCache> {
    let path = cli.cache.clone().unwrap_or_else(|| {
        let mut p = curve_path.as_os_str().to_owned();
        p.push(".cache");
        PathBuf::from(p)
    });
    match PrimeCache::open(&path) {
        Ok(c) => Some(c),
        Err(e) => {
            warnings.push(format!("running without cache: {e}"));
            None
        }
    }
}

fn dispatch(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Analyze { curve, sample_bound } => analyze(curve, *sample_bound),
        Command::VerifyPaper => Ok(verify_paper(cli.seed)),
        Command::ClassifyPrimes { curve, limit, class } => classify_primes(cli, curve, *limit, *class),
        Command::Character { d, curve } => character(d, curve.as_deref()),
        Command::Parity { curve, d, profiles } => parity(cli, curve, d, profiles.as_deref()),
        Command::Scan {
            curve,
            max_norm,
            sample,
            bound,
            profiles,
            r1_parity,
        } => {
            let mode = match (max_norm, sample, bound) {
                (Some(x), None, None) => DensityMode::Exhaustive { max_norm: *x },
                (None, Some(n), Some(b)) => DensityMode::Sample {
                    samples: *n,
                    bound: *b,
                },
                _ => return Err(Failure::Usage("give either --max-norm or --sample with --bound".into())),
            };
            scan(cli, curve, mode, profiles.as_deref(), *r1_parity)
        }
        Command::FindTwist {
            curve,
            direction,
            limit,
            emit_json,
            verify,
        } => find_twist(curve, *direction, *limit, *emit_json, verify.as_deref()),
    }
}

fn analyze(path: &Path, sample_bound: u64) -> CmdResult {
    let curve = load_curve(path)?;
    let disc = curve.discriminant();
    let sigma = curve.sigma()?;
    let (r, k1, k2) = real_root_signature(curve.f())?;
    let galois = galois_classify(&curve, sample_bound)?;
    let delta_inf = match ParityEngine::new(&curve, &ProfileSet::new()) {
        Ok(engine) => {
            let brute = engine.delta_v(Place::Infinity)?;
            let closed = delta_infinity_closed_form(curve.degree())?;
            json!({ "enumerated": brute.to_string(), "closed_form": closed.to_string() })
        }
        Err(e) => json!({ "unavailable": e.to_string() }),
    };
    let torsion = match rational_two_torsion_dim(&curve) {
        Ok(d) => json!({ "dim": d }),
        Err(e) => json!({ "unknown": e.to_string() }),
    };
    let sigma_places: Vec<String> = sigma.places().iter().map(ToString::to_string).collect();
    let outputs = json!({
        "degree": curve.degree(),
        "p": curve.p(),
        "curve_hash": curve.hash(),
        "discriminant": disc.to_string(),
        "discriminant_sign": sign_of(&(disc.numer() * disc.denom())),
        "discriminant_is_square": galois.evidence.disc_is_square,
        "real_roots": r,
        "signature": { "k1": k1, "k2": k2 },
        "bad_places": sigma_places,
        "delta_infinity": delta_inf,
        "galois": galois,
        "two_torsion": torsion,
    });
    let mut text = String::new();
    let _ = writeln!(text, "f = {}", curve.f());
    let _ = writeln!(text, "degree {}  p = {}  hash {}", curve.degree(), curve.p(), curve.hash());
    let _ = writeln!(text, "discriminant {disc}");
    let _ = writeln!(text, "real roots {r}  signature ({k1}, {k2})");
    let _ = writeln!(text, "bad places {sigma}");
    let _ = writeln!(text, "delta_inf {}", outputs["delta_infinity"]);
    let _ = writeln!(text, "galois {}", galois.label);
    for note in &galois.evidence.notes {
        let _ = writeln!(text, "  {note}");
    }
    let _ = writeln!(text, "two-torsion {}", outputs["two_torsion"]);
    let inputs = json!({ "curve": path.display().to_string(),
        "curve_hash": curve.hash(), "sample_bound": sample_bound });
    Ok(Done::new(inputs, outputs, text))
}

fn verify_paper(seed: u64) -> Done {
    let checks = verify::verify_paper(seed);
    let ok = checks.iter().all(|c| c.status.ok());
    let mut text = String::new();
    for c in &checks {
        let status = serde_json::to_value(c.status).expect("status serializes");
        let _ = writeln!(text, "({}) {:<8} {}", c.id, status.as_str().unwrap_or_default(), c.name);
        if c.status != verify::CheckStatus::Pass {
            let _ = writeln!(text, "    {}", c.details);
        }
    }
    let _ = writeln!(text, "{}", if ok { "all checks passed" } else { "verification FAILED" });
    let mut done = Done::new(json!({}), json!({ "all_passed": ok, "checks": checks }), text);
    if !ok {
        done.code = EXIT_VERIFY;
    }
    done
}

fn classify_primes(cli: &Cli, path: &Path, limit: u64, class: Option<usize>) -> CmdResult {
    let curve = load_curve(path)?;
    let mut warnings = Vec::new();
    let cache = open_cache(cli, path, &mut warnings);
    let filter = match class {
        Some(i) => ScanFilter::class(i),
        None => ScanFilter::default(),
    };
    let mut scan = prime_scan(&curve, filter, 3, limit).with_cache(cache.as_ref()).with_seed(cli.seed);
    let primes: Vec<_> = scan.by_ref().collect();
    if let Some(e) = scan.error() {
        return Err(e.clone().into());
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    let mut text = String::new();
    for pc in &primes {
        *counts.entry(pc.class_index).or_default() += 1;
        let _ = writeln!(text, "{}\t{}\tP{}", pc.prime, pc.cycle_type, pc.class_index);
    }
    for (i, n) in &counts {
        let _ = writeln!(text, "# P{i}: {n}");
    }
    let inputs = json!({ "curve": path.display().to_string(),
        "curve_hash": curve.hash(), "limit": limit, "class": class });
    let outputs = json!({ "curve_hash": curve.hash(), "primes": primes, "class_counts": counts });
    let mut done = Done::new(inputs, outputs, text);
    done.warnings = warnings;
    Ok(done)
}

fn character(d: &str, curve_path: Option<&Path>) -> CmdResult {
    let t = parse_twist(d)?;
    let places: Vec<Place> = match curve_path {
        Some(p) => load_curve(p)?.sigma()?.places(),
        None => {
            let mut v = vec![Place::Infinity, Place::Finite(2)];
            v.extend(t.odd_primes().iter().map(|&q| Place::Finite(q)));
            v
        }
    };
    let mut text = String::new();
    let _ = writeln!(text, "d = {t}  norm {}", twist_norm(&t));
    let _ = writeln!(text, "ramified {:?}", t.ramified_primes());
    let mut local = Vec::new();
    for v in places {
        let b = local_behavior(&t, v);
        let class = local_class(&t, v);
        let _ = writeln!(text, "{v}\t{b}\tclass {class}");
        local.push(json!({ "place": v, "behavior": b, "class": class }));
    }
    let inputs = json!({ "d": d, "curve": curve_path.map(|p| p.display().to_string()) });
    let outputs = json!({
        "d": t,
        "norm": twist_norm(&t),
        "ramified": t.ramified_primes(),
        "local": local,
    });
    Ok(Done::new(inputs, outputs, text))
}

fn parity(cli: &Cli, path: &Path, d: &str, profiles_path: Option<&Path>) -> CmdResult {
    let curve = load_curve(path)?;
    let profiles = load_profiles(profiles_path)?;
    let t = parse_twist(d)?;
    let engine = ParityEngine::new(&curve, &profiles)?;
    let verdict = engine.parity_flip(&t);
    let mut warnings = Vec::new();
    let cache = open_cache(cli, path, &mut warnings);
    let (lhs, rhs) = global_consistency_sides(&curve, &t, cache.as_ref())?;
    let mut text = String::new();
    let _ = writeln!(text, "d = {}  flip {:+}  status {}", t, verdict.flip, serde_json::to_value(&verdict.status).expect("status")["kind"].as_str().unwrap_or_default());
    for c in &verdict.contributions {
        let h = c.h.map_or("unknown".to_string(), |h| h.to_string());
        let omega = c.omega.map_or("?".to_string(), |w| format!("{w:+}"));
        let _ = writeln!(
            text,
            "  {}\tclass {}\t{}\th = {} ({})\thilbert {:+}\tomega {}",
            c.place, c.label, c.behavior, h, c.h_source, c.hilbert, omega
        );
    }
    let _ = writeln!(text, "consistency {lhs:+} = {rhs:+}");
    let inputs = json!({
        "curve": path.display().to_string(),
        "curve_hash": curve.hash(),
        "d": d,
        "profiles": profiles_path.map(|p| p.display().to_string()),
    });
    let outputs = json!({
        "verdict": verdict,
        "consistency": { "good_prime_side": lhs, "bad_set_side": rhs, "holds": lhs == rhs },
    });
    let mut done = Done::new(inputs, outputs, text);
    done.warnings = warnings;
    if lhs != rhs {
        done.code = EXIT_VERIFY;
    }
    Ok(done)
}

fn scan(cli: &Cli, path: &Path, mode: DensityMode, profiles_path: Option<&Path>, r1_parity: u8) -> CmdResult {
    let curve = load_curve(path)?;
    let profiles = load_profiles(profiles_path)?;
    let engine = ParityEngine::new(&curve, &profiles)?;
    let report = engine.density_scan(mode.clone(), r1_parity, cli.seed)?;
    let disparity = if engine.is_complete() {
        Some(engine.delta(r1_parity)?)
    } else {
        None
    };
    let mut text = String::new();
    let _ = writeln!(text, "even {} of {} = {}", report.even, report.total, report.fraction);
    if let Some(p) = &report.predicted {
        let _ = writeln!(text, "predicted {p}");
    }
    if let Some(s) = report.surjective_on_sigma {
        let _ = writeln!(text, "surjective on bad set: {s}");
    }
    if let Some(d) = &disparity {
        for pd in &d.per_place {
            let _ = writeln!(text, "  delta_{} = {}", pd.place, pd.delta);
        }
        let _ = writeln!(text, "delta {}", d.delta);
    }
    let inputs = json!({
        "curve": path.display().to_string(),
        "curve_hash": curve.hash(),
        "mode": mode,
        "profiles": profiles_path.map(|p| p.display().to_string()),
        "r1_parity": r1_parity,
    });
    let outputs = json!({ "density": report, "disparity": disparity });
    let mut done = Done::new(inputs, outputs, text);
    done.warnings = report.warnings.clone();
    Ok(done)
}

fn find_twist(path: &Path, direction: ShiftDirection, limit: u64, emit_json: bool, verify: Option<&Path>) -> CmdResult {
    let curve = load_curve(path)?;
    let dir = match direction {
        ShiftDirection::Up => Direction::Raise2,
        ShiftDirection::Down => Direction::Lower2,
    };
    let inputs = json!({
        "curve": path.display().to_string(),
        "curve_hash": curve.hash(),
        "direction": dir,
        "limit": limit,
        "verify": verify.map(|p| p.display().to_string()),
    });
    if let Some(vpath) = verify {
        let text = read_file(vpath)?;
        return match load_recipes(&text, &curve) {
            Ok(recipes) => {
                let msg = format!("{} recipes re-verified\n", recipes.len());
                Ok(Done::new(inputs, json!({ "verified": recipes.len(), "ok": true }), msg))
            }
            Err(e) => {
                let mut done = Done::new(
                    inputs,
                    json!({ "ok": false, "error": e.to_string() }),
                    format!("recipe verification failed: {e}\n"),
                );
                done.code = EXIT_VERIFY;
                Ok(done)
            }
        };
    }
    let mut stream = find_shift_primes(&curve, dir, limit)?;
    let recipes: Vec<TwistRecipe> = stream.by_ref().collect::<twistpar::Result<_>>()?;
    if let Some(e) = stream.scan_error() {
        return Err(e.clone().into());
    }
    let mut text = String::new();
    for r in &recipes {
        let _ = writeln!(text, "{}\t{}", r.prime, r.cycle_type);
    }
    let _ = writeln!(text, "# {} primes up to {limit}", recipes.len());
    let mut done = Done::new(inputs, json!({ "recipes": recipes }), text);
    if emit_json {
        let mut s = serde_json::to_string_pretty(&recipes).expect("recipes serialize");
        s.push('\n');
        done.raw = Some(s);
    }
    Ok(done)
}

