//! Command-line front end. Every command writes one JSON report; `--pretty`
//! adds a short summary on stderr.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{AlgebraJson, AlgebraSpec, StarAlgebra};
use crate::error::{FuncordError, Result};
use crate::functional::{Functional, FunctionalJson};
use crate::gns::GnsTriple;
use crate::intervals::{infimum_with, is_extreme_in_interval, Backend};
use crate::lebesgue::{lebesgue_decompose_with, RegularMethod, DEFAULT_TOL};
use crate::linalg::CMat;
use crate::oracles::truncated_counterexample_trend;
use crate::parallel_sum::{is_singular, parallel_sum};
use crate::sweep::{run_suite, Suite};
use crate::VERSION;

pub const SEED_ENV: &str = "FUNCORD_SEED";
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_CASES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    Gram,
    Gns,
    Parsum,
    Lebesgue,
    Extreme,
    Infimum,
    OracleCheck,
    Trend,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Gram => "gram",
            Command::Gns => "gns",
            Command::Parsum => "parsum",
            Command::Lebesgue => "lebesgue",
            Command::Extreme => "extreme",
            Command::Infimum => "infimum",
            Command::OracleCheck => "oracle-check",
            Command::Trend => "trend",
        }
    }

    /// Input flags that must be present.
    fn required(self) -> &'static [&'static str] {
        match self {
            Command::Validate => &["--algebra"],
            Command::Gram | Command::Gns => &["--f"],
            Command::Parsum | Command::Lebesgue | Command::Infimum => &["--f", "--g"],
            Command::Extreme => &["--h", "--lo", "--hi"],
            Command::OracleCheck => &["--suite"],
            Command::Trend => &[],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Inputs {
    /// Constructor label such as `matrix(2)` or a path to an algebra file.
    pub algebra: Option<String>,
    pub f: Option<PathBuf>,
    pub g: Option<PathBuf>,
    pub h: Option<PathBuf>,
    pub lo: Option<PathBuf>,
    pub hi: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub inputs: Inputs,
    pub tol: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub pretty: bool,
    pub suite: Option<Suite>,
    pub cases: usize,
    pub backend: Backend,
    pub method: RegularMethod,
    pub max_dim: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown command {0:?}")]
    UnknownCommand(String),
    #[error("missing input {0}")]
    MissingInput(String),
    #[error("bad tolerance {0}: must be a positive number")]
    BadTolerance(String),
    #[error("{0}")]
    Usage(String),
    /// `--help` or `--version`; the payload is the text to print.
    #[error("{0}")]
    Info(String),
}

#[derive(Parser, Debug)]
#[command(name = "funcord", version, about = "Order calculus of representable functionals")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Check the structure constants of an algebra.
    Validate(Flags),
    /// Gram matrix and positivity of a functional.
    Gram(Flags),
    /// Representability and GNS triple.
    Gns(Flags),
    /// Parallel sum f:g.
    Parsum(Flags),
    /// Lebesgue-type decomposition of f with respect to g.
    Lebesgue(Flags),
    /// Is h an extreme point of [lo, hi]?
    Extreme(Flags),
    /// Infimum of f and g.
    Infimum(Flags),
    /// Differential check of the generic pipeline against an oracle.
    OracleCheck(Flags),
    /// Domination constants of the truncated diagonal example.
    Trend(Flags),
}

#[derive(Args, Debug)]
struct Flags {
    /// Constructor label such as `matrix(2)`, or a JSON file.
    #[arg(long)]
    algebra: Option<String>,
    /// Functional JSON file.
    #[arg(long)]
    f: Option<PathBuf>,
    #[arg(long)]
    g: Option<PathBuf>,
    #[arg(long)]
    h: Option<PathBuf>,
    #[arg(long)]
    lo: Option<PathBuf>,
    #[arg(long)]
    hi: Option<PathBuf>,
    /// Doubling stop tolerance (default 1e-7).
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also print a one-line summary to stderr.
    #[arg(long)]
    pretty: bool,
    #[arg(long, value_enum)]
    suite: Option<Suite>,
    /// Number of random cases for oracle-check.
    #[arg(long, default_value_t = DEFAULT_CASES)]
    cases: usize,
    #[arg(long, value_enum, default_value_t = Backend::Generic)]
    backend: Backend,
    #[arg(long, value_enum, default_value_t = RegularMethod::Limit)]
    method: RegularMethod,
    /// Shorthand for `--method commutant`.
    #[arg(long)]
    exact: bool,
    /// Largest truncation for trend.
    #[arg(long, default_value_t = 32)]
    max_dim: usize,
}

/// Parses `argv` (including the program name). `FUNCORD_SEED` overrides `--seed`.
pub fn parse_config<I, T>(argv: I) -> std::result::Result<RunConfig, ConfigError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = Cli::try_parse_from(&argv).map_err(|e| match e.kind() {
        ErrorKind::InvalidSubcommand => {
            let name = argv
                .get(1)
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            ConfigError::UnknownCommand(name)
        }
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ConfigError::Info(e.to_string()),
        ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand | ErrorKind::MissingSubcommand => {
            ConfigError::Usage(e.to_string())
        }
        _ => ConfigError::Usage(e.to_string()),
    })?;
    let (command, flags) = match cli.command {
        Sub::Validate(x) => (Command::Validate, x),
        Sub::Gram(x) => (Command::Gram, x),
        Sub::Gns(x) => (Command::Gns, x),
        Sub::Parsum(x) => (Command::Parsum, x),
        Sub::Lebesgue(x) => (Command::Lebesgue, x),
        Sub::Extreme(x) => (Command::Extreme, x),
        Sub::Infimum(x) => (Command::Infimum, x),
        Sub::OracleCheck(x) => (Command::OracleCheck, x),
        Sub::Trend(x) => (Command::Trend, x),
    };

    let tol = match &flags.tol {
        None => DEFAULT_TOL,
        Some(raw) => match raw.parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => t,
            _ => return Err(ConfigError::BadTolerance(raw.clone())),
        },
    };

    let inputs = Inputs {
        algebra: flags.algebra,
        f: flags.f,
        g: flags.g,
        h: flags.h,
        lo: flags.lo,
        hi: flags.hi,
    };
    for flag in command.required() {
        let present = match *flag {
            "--algebra" => inputs.algebra.is_some(),
            "--f" => inputs.f.is_some(),
            "--g" => inputs.g.is_some(),
            "--h" => inputs.h.is_some(),
            "--lo" => inputs.lo.is_some(),
            "--hi" => inputs.hi.is_some(),
            "--suite" => flags.suite.is_some(),
            _ => true,
        };
        if !present {
            return Err(ConfigError::MissingInput((*flag).to_string()));
        }
    }

    let seed = match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| ConfigError::Usage(format!("{SEED_ENV}={v:?} is not an unsigned integer")))?,
        Err(_) => flags.seed.unwrap_or(DEFAULT_SEED),
    };

    Ok(RunConfig {
        command,
        inputs,
        tol,
        seed,
        out: flags.out,
        pretty: flags.pretty,
        suite: flags.suite,
        cases: flags.cases,
        backend: flags.backend,
        method: if flags.exact { RegularMethod::Commutant } else { flags.method },
        max_dim: flags.max_dim,
    })
}

/// Exit status and the JSON report of one run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit_code: i32,
    pub report: Value,
    pub summary: String,
}

pub fn execute(cfg: &RunConfig) -> Outcome {
    let mut envelope = json!({
        "command": cfg.command.name(),
        "version": VERSION,
        "tolerance": cfg.tol,
        "seed": cfg.seed,
    });
    let (exit_code, summary) = match dispatch(cfg) {
        Ok((result, ok, summary)) => {
            envelope["status"] = json!(if ok { "ok" } else { "failed" });
            envelope["result"] = result;
            (if ok { 0 } else { 2 }, summary)
        }
        Err(e) => {
            envelope["status"] = json!("error");
            let mut err = json!({ "kind": e.kind(), "message": e.to_string() });
            if let FuncordError::NotRepresentable { condition, detail } = &e {
                err["condition"] = json!(condition);
                err["detail"] = json!(detail);
            }
            envelope["error"] = err;
            (if e.is_mathematical() { 2 } else { 1 }, e.to_string())
        }
    };
    Outcome {
        exit_code,
        report: envelope,
        summary,
    }
}

/// Parses, executes and writes the report. Returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match parse_config(argv) {
        Ok(cfg) => cfg,
        Err(ConfigError::Info(text)) => {
            print!("{text}");
            return 0;
        }
        Err(e) => {
            eprintln!("funcord: {e}");
            return 1;
        }
    };
    let outcome = execute(&cfg);
    let text = serde_json::to_string_pretty(&outcome.report).expect("report serializes") + "\n";
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("funcord: cannot write report: {e}");
        return 1;
    }
    if cfg.pretty {
        eprintln!("{}", outcome.summary);
    }
    outcome.exit_code
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        FuncordError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn load_algebra(arg: &str) -> Result<StarAlgebra> {
    if let Ok(spec) = AlgebraSpec::parse(arg) {
        return StarAlgebra::construct(&spec);
    }
    let json: AlgebraJson = serde_json::from_str(&read_to_string(Path::new(arg))?)?;
    StarAlgebra::from_json(&json)
}

struct Loader {
    fallback: Option<Arc<StarAlgebra>>,
}

impl Loader {
    fn new(cfg: &RunConfig) -> Result<Self> {
        let fallback = match &cfg.inputs.algebra {
            Some(arg) => Some(Arc::new(load_algebra(arg)?)),
            None => None,
        };
        Ok(Loader { fallback })
    }

    fn functional(&self, path: &Option<PathBuf>) -> Result<Functional> {
        let path = path.as_ref().expect("required inputs checked by parse_config");
        let json: FunctionalJson = serde_json::from_str(&read_to_string(path)?)?;
        Functional::from_json(&json, self.fallback.as_ref())
    }
}

fn pairs(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    m.row_iter()
        .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

fn values(f: &Functional) -> Value {
    json!(f.to_json().values.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
}

fn dispatch(cfg: &RunConfig) -> Result<(Value, bool, String)> {
    let load = Loader::new(cfg)?;
    let inputs = &cfg.inputs;
    Ok(match cfg.command {
        Command::Validate => {
            let alg = load_algebra(inputs.algebra.as_deref().expect("checked"))?;
            let report = alg.validate_structure();
            let ok = report.is_valid();
            let summary = format!("{} (dim {}): {}", alg.label(), alg.dim(), report);
            (
                json!({
                    "algebra": alg.label(),
                    "dim": alg.dim(),
                    "unital": alg.unit().is_some(),
                    "commutative": alg.is_commutative(),
                    "valid": ok,
                    "violations": report.violations,
                }),
                ok,
                summary,
            )
        }
        Command::Gram => {
            let f = load.functional(&inputs.f)?;
            let gram = f.gram();
            let pos = f.is_positive();
            let summary = format!(
                "Gram {}x{}, min eigenvalue {:.6e}, positive: {}",
                gram.entries.nrows(),
                gram.entries.ncols(),
                pos.min_eigenvalue,
                pos.positive
            );
            (
                json!({
                    "gram": pairs(&gram.entries),
                    "eigenvalues": gram.eigen().values,
                    "rank": gram.rank(),
                    "positivity": pos,
                }),
                true,
                summary,
            )
        }
        Command::Gns => {
            let f = load.functional(&inputs.f)?;
            let t = GnsTriple::build(&f)?;
            let summary = format!(
                "GNS space dimension {}, Hilbert bound {:.12}",
                t.space_dim,
                t.cyclic_norm_sqr()
            );
            (
                json!({
                    "representable": true,
                    "space_dim": t.space_dim,
                    "hilbert_bound": t.cyclic_norm_sqr(),
                    "cyclic": t.cyclic.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                    "representation": t.rep.iter().map(pairs).collect::<Vec<_>>(),
                    "residual": t.residual,
                }),
                true,
                summary,
            )
        }
        Command::Parsum => {
            let f = load.functional(&inputs.f)?;
            let g = load.functional(&inputs.g)?;
            let ps = parallel_sum(&f, &g)?;
            let singular = is_singular(&f, &g)?;
            let summary = format!(
                "f:g = {:?}, singular: {singular}",
                ps.value.values().iter().map(|z| z.re).collect::<Vec<_>>()
            );
            (
                json!({
                    "value": values(&ps.value),
                    "projection_rank": ps.projection_rank,
                    "invariance_residual": ps.residual,
                    "singular": singular,
                }),
                true,
                summary,
            )
        }
        Command::Lebesgue => {
            let f = load.functional(&inputs.f)?;
            let g = load.functional(&inputs.g)?;
            let r = lebesgue_decompose_with(&f, &g, cfg.tol, cfg.method)?;
            let summary = format!(
                "regular {:?}\nsingular {:?}\nc = {:.6}, {} doubling steps",
                r.regular.values().iter().map(|z| z.re).collect::<Vec<_>>(),
                r.singular.values().iter().map(|z| z.re).collect::<Vec<_>>(),
                r.domination_constant,
                r.iterations
            );
            (
                json!({
                    "regular": values(&r.regular),
                    "singular": values(&r.singular),
                    "domination_constant": r.domination_constant,
                    "iterations": r.iterations,
                    "extrapolated": r.extrapolated,
                    "residual_singularity": r.residual_singularity,
                    "method": cfg.method,
                    "commutant_divergence": r.commutant_divergence,
                }),
                true,
                summary,
            )
        }
        Command::Extreme => {
            let h = load.functional(&inputs.h)?;
            let lo = load.functional(&inputs.lo)?;
            let hi = load.functional(&inputs.hi)?;
            let extreme = is_extreme_in_interval(&h, &lo, &hi)?;
            (json!({ "extreme": extreme }), true, format!("extreme: {extreme}"))
        }
        Command::Infimum => {
            let f = load.functional(&inputs.f)?;
            let g = load.functional(&inputs.g)?;
            let r = infimum_with(&f, &g, cfg.tol, cfg.backend)?;
            let summary = format!("{:?}: {}", r.status, r.reason);
            (
                json!({
                    "backend": cfg.backend,
                    "status": r.status,
                    "value": r.value.as_ref().map(values),
                    "reason": r.reason,
                    "equal": r.equal,
                }),
                true,
                summary,
            )
        }
        Command::OracleCheck => {
            let suite = cfg.suite.expect("checked");
            let report = run_suite(suite, cfg.cases, cfg.seed, cfg.tol);
            let ok = report.all_passed();
            let mut summary = format!("{:?}: {} passed, {} failed", suite, report.passed, report.failed);
            if let Some(points) = &report.trend {
                for p in points {
                    summary.push_str(&format!("\n  d = {:>3}  c_min = {:.6}", p.dim, p.c_min));
                }
            }
            (serde_json::to_value(&report)?, ok, summary)
        }
        Command::Trend => {
            let points = truncated_counterexample_trend(cfg.max_dim);
            let summary = points
                .iter()
                .map(|p| format!("d = {:>3}  c_min = {:.6}", p.dim, p.c_min))
                .collect::<Vec<_>>()
                .join("\n");
            (json!({ "points": points }), true, summary)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let cfg = parse_config(["funcord", "lebesgue", "--f", "f.json", "--g", "g.json"]).unwrap();
        assert_eq!(cfg.command, Command::Lebesgue);
        assert_eq!(cfg.tol, 1e-7);
        assert_eq!(cfg.method, RegularMethod::Limit);
    }

    #[test]
    fn missing_input_names_flag() {
        let err = parse_config(["funcord", "infimum", "--f", "a.json"]).unwrap_err();
        assert_eq!(err, ConfigError::MissingInput("--g".into()));
    }

    #[test]
    fn bad_tolerance() {
        for tol in ["-1", "0", "abc", "inf"] {
            let err = parse_config(["funcord", "parsum", "--tol", tol, "--f", "a", "--g", "b"]).unwrap_err();
            assert!(matches!(err, ConfigError::BadTolerance(_)), "{tol}");
        }
    }

    #[test]
    fn unknown_command() {
        let err = parse_config(["funcord", "frobnicate"]).unwrap_err();
        assert_eq!(err, ConfigError::UnknownCommand("frobnicate".into()));
    }

    #[test]
    fn exact_flag() {
        let cfg = parse_config(["funcord", "lebesgue", "--f", "a", "--g", "b", "--exact"]).unwrap();
        assert_eq!(cfg.method, RegularMethod::Commutant);
    }
}
