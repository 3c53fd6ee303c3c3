//! The `isolat` command line.
//!
//! Exit codes: 0 success, 1 usage, 2 invalid input or I/O failure, 3 failed
//! invariant or oracle mismatch. Errors are written to stderr as
//! `{"error":{"code","path","message"}}`.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::adjoint::{ann_h, ann_isotropy_json, isotropy_on_ann, SubspaceDescriptor};
use crate::io::{error_record, parse_spec_with, subgroup_json, IoError, Limits, ProblemSpec};
use crate::lattice::build_lattice;
use crate::lift::{lift_witness_check, lifted_lattice, AmbientGroup};
use crate::momentum::{mu_closure, mu_lattice, relative_equilibria_lattice, MomentumValue};
use crate::oracle::{check_action, ConcreteAction, SamplePlan, DEFAULT_SAMPLES};
use crate::subgroup::canonical_rep;
use crate::tag::{is_subconjugate, ClassTag, DEFAULT_N_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "isolat", version, about = "Isotropy lattices of lifted actions of SO(3) and its subgroups")]
struct Cli {
    /// Largest n accepted for cyclic and dihedral classes.
    #[arg(long, global = true, default_value_t = DEFAULT_N_CAP)]
    n_cap: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lattice of the tangent (or cotangent) lifted action.
    Lift {
        #[command(flatten)]
        input: InputArg,
        /// Label the result as the cotangent lift.
        #[arg(long)]
        cotangent: bool,
        /// Also write the lifted Hasse diagram in DOT format.
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
    },
    /// Lattice of a momentum level set at a totally isotropic value.
    Mu {
        #[command(flatten)]
        input: InputArg,
        /// Comma-separated components: three for SO(3), one for the circle.
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        /// Also print the μ-closure of this class.
        #[arg(long, value_name = "TAG")]
        closure: Option<String>,
    },
    /// Lattice of the possible relative equilibria.
    Requilibria {
        #[command(flatten)]
        input: InputArg,
    },
    /// Compare predictions with sampled stabilizers on a concrete action.
    Check {
        #[arg(long)]
        action: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
    },
    /// Stabilizer classes of a subgroup on the annihilator of its Lie algebra.
    Adjoint { tag: String },
    /// Subconjugation table and canonical representatives.
    Catalog {
        /// Largest n listed for cyclic and dihedral classes.
        #[arg(long, default_value_t = 6)]
        max_n: u32,
    },
}

#[derive(Args, Debug)]
struct InputArg {
    /// Problem file (JSON).
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
}

struct Failure {
    exit: i32,
    code: &'static str,
    path: String,
    message: String,
}

impl Failure {
    fn invalid(path: impl Into<String>, message: impl Into<String>) -> Failure {
        Failure { exit: EXIT_INVALID, code: "validation_error", path: path.into(), message: message.into() }
    }

    fn invariant(message: impl Into<String>) -> Failure {
        Failure { exit: EXIT_INVARIANT, code: "invariant_failure", path: "$".into(), message: message.into() }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Failure {
        let message = match &e {
            IoError::Schema { message, .. } | IoError::Validation { message, .. } => message.clone(),
        };
        Failure { exit: EXIT_INVALID, code: e.code(), path: e.path().to_string(), message }
    }
}

/// Runs one invocation; `args` includes the program name.
pub fn run_command<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let stream: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(stream, "{}", e.render());
            return code;
        }
    };
    let limits = Limits { n_cap: cli.n_cap, ..Limits::default() };
    let mut report = |v: &Value| {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(v).expect("json"));
    };
    let result = match &cli.command {
        Command::Lift { input, cotangent, dot } => lift(&input.input, *cotangent, dot.as_deref(), &limits, &mut report),
        Command::Mu { input, mu, closure } => momentum(&input.input, mu, closure.as_deref(), &limits, &mut report),
        Command::Requilibria { input } => requilibria(&input.input, &limits, &mut report),
        Command::Check { action, seed, samples } => check(action, *seed, *samples, &mut report),
        Command::Adjoint { tag } => adjoint(tag, &limits, &mut report),
        Command::Catalog { max_n } => {
            report(&catalog(*max_n));
            Ok(EXIT_OK)
        }
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "{}", error_record(f.code, &f.path, &f.message));
            f.exit
        }
    }
}

fn load(path: &std::path::Path, limits: &Limits) -> Result<ProblemSpec, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        exit: EXIT_INVALID,
        code: "io_error",
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Ok(parse_spec_with(&text, limits)?)
}

fn lift(
    path: &std::path::Path,
    cotangent: bool,
    dot: Option<&std::path::Path>,
    limits: &Limits,
    report: &mut dyn FnMut(&Value),
) -> Result<i32, Failure> {
    let spec = load(path, limits)?;
    let result = lifted_lattice(&spec.ambient, spec.lattice()).map_err(|e| Failure::invalid("$", e.to_string()))?;
    if !lift_witness_check(&result) {
        return Err(Failure::invariant("a lift witness failed re-validation"));
    }
    if !spec.lattice().classes().iter().all(|&t| result.lifted.contains(t)) {
        return Err(Failure::invariant("the base lattice is not contained in the lifted lattice"));
    }
    let bundle = if cotangent { "cotangent" } else { "tangent" };
    if let Some(dot_path) = dot {
        let name = format!("{} lift over {}", bundle, spec.ambient.name());
        std::fs::write(dot_path, result.lifted.to_dot(&name)).map_err(|e| Failure {
            exit: EXIT_INVALID,
            code: "io_error",
            path: dot_path.display().to_string(),
            message: e.to_string(),
        })?;
    }
    let mut v = result.lifted.to_json_value();
    v["group"] = json!(spec.ambient.name());
    v["lift"] = json!(bundle);
    v["base"] = spec.lattice().to_json_value();
    v["witnesses"] = result.witnesses.iter().map(|w| w.to_json_value()).collect();
    report(&v);
    Ok(EXIT_OK)
}

fn parse_mu(text: &str, ambient: &AmbientGroup) -> Result<MomentumValue, Failure> {
    let parts: Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let parts = parts.map_err(|_| Failure::invalid("--mu", format!("expected comma-separated numbers, got {text:?}")))?;
    match (ambient, parts.as_slice()) {
        (AmbientGroup::Circle, &[s]) => Ok(MomentumValue::Scalar(s)),
        (AmbientGroup::So3, &[x, y, z]) | (AmbientGroup::Finite(_), &[x, y, z]) => Ok(MomentumValue::Vector([x, y, z])),
        (AmbientGroup::Finite(_), &[s]) => Ok(MomentumValue::Scalar(s)),
        _ => Err(Failure::invalid("--mu", format!("wrong number of components for {}", ambient.name()))),
    }
}

fn parse_tag(text: &str, path: &str, limits: &Limits) -> Result<ClassTag, Failure> {
    let tag: ClassTag = text.parse().map_err(|e: crate::tag::TagError| Failure::invalid(path, e.to_string()))?;
    tag.check_cap(limits.n_cap).map_err(|e| Failure::invalid(path, e.to_string()))
}

fn momentum(
    path: &std::path::Path,
    mu: &str,
    closure: Option<&str>,
    limits: &Limits,
    report: &mut dyn FnMut(&Value),
) -> Result<i32, Failure> {
    let spec = load(path, limits)?;
    let value = parse_mu(mu, &spec.ambient)?;
    let lattice = mu_lattice(&spec.ambient, spec.lattice(), &value).map_err(|e| Failure::invalid("--mu", e.to_string()))?;
    let mut v = lattice.to_json_value();
    v["mu"] = json!(value.to_string());
    if let Some(text) = closure {
        let h = parse_tag(text, "--closure", limits)?;
        let up = mu_closure(&spec.ambient, spec.lattice(), &value, h)
            .map_err(|e| Failure::invalid("--closure", e.to_string()))?;
        v["closure"] = json!({"class": h, "classes": up});
    }
    report(&v);
    Ok(EXIT_OK)
}

fn requilibria(path: &std::path::Path, limits: &Limits, report: &mut dyn FnMut(&Value)) -> Result<i32, Failure> {
    let spec = load(path, limits)?;
    let lattice =
        relative_equilibria_lattice(&spec.ambient, spec.lattice()).map_err(|e| Failure::invalid("$", e.to_string()))?;
    let mut v = lattice.to_json_value();
    v["group"] = json!(spec.ambient.name());
    report(&v);
    Ok(EXIT_OK)
}

fn check(action: &str, seed: u64, samples: usize, report: &mut dyn FnMut(&Value)) -> Result<i32, Failure> {
    let action: ConcreteAction = action.parse().map_err(|e: crate::oracle::OracleError| Failure::invalid("--action", e.to_string()))?;
    let plan = SamplePlan::for_action(&action, seed, samples);
    let result = check_action(&action, &plan).map_err(|e| Failure::invariant(e.to_string()))?;
    let v = result.to_json_value();
    report(&v);
    Ok(if result.all_match() { EXIT_OK } else { EXIT_INVARIANT })
}

fn adjoint(tag: &str, limits: &Limits, report: &mut dyn FnMut(&Value)) -> Result<i32, Failure> {
    let t = parse_tag(tag, "tag", limits)?;
    let rep = canonical_rep(t);
    let ann = match ann_h(&rep) {
        SubspaceDescriptor::Zero => json!({"dim": 0}),
        SubspaceDescriptor::Plane(axis) => json!({"dim": 2, "normal": axis}),
        SubspaceDescriptor::Full3 => json!({"dim": 3}),
    };
    report(&json!({
        "class": t,
        "representative": subgroup_json(&rep),
        "ann": ann,
        "isotropy": ann_isotropy_json(&isotropy_on_ann(&rep)),
    }));
    Ok(EXIT_OK)
}

/// Classes with n ≤ `max_n`, the strict subconjugation pairs `[i, j]` and
/// one canonical representative per class.
pub fn catalog(max_n: u32) -> Value {
    let classes = ClassTag::catalog(max_n.max(2));
    let mut pairs = Vec::new();
    for (i, &a) in classes.iter().enumerate() {
        for (j, &b) in classes.iter().enumerate() {
            if i != j && is_subconjugate(a, b) {
                pairs.push(json!([i, j]));
            }
        }
    }
    let hasse = build_lattice(classes.iter().copied()).map(|l| l.to_json_value()["hasse"].clone()).unwrap_or(Value::Null);
    json!({
        "classes": classes,
        "subconjugate": pairs,
        "hasse": hasse,
        "representatives": classes.iter().map(|&t| subgroup_json(&canonical_rep(t))).collect::<Vec<_>>(),
    })
}
