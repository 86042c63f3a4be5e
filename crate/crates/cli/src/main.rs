//! `obslab`: exact computations from the command line, JSON in and JSON out.

mod jobs;
mod limits;

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::mpsc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use jobs::{invalid, GmOptions, JobError};
use limits::Limits;

#[derive(Parser, Debug)]
#[command(name = "obslab", version, about = "Exact deformation-theory computations")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Input: a file path, "-" for stdin, or inline JSON
    #[arg(long, global = true)]
    input: Option<String>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true)]
    degree_cap: Option<u32>,
    /// Override the truncation order of a family
    #[arg(long, global = true)]
    trunc: Option<usize>,
    /// Wall-clock budget in seconds
    #[arg(long, global = true)]
    time_budget: Option<u64>,
    /// Emit JSON (the only format; accepted for scripts)
    #[arg(long, global = true, default_value_t = true)]
    json: bool,
}

#[derive(Subcommand, Debug, Clone)]
enum Cmd {
    /// Descending chain I ⊋ I^[p] ⊋ … of the PD ideal
    PdChain {
        #[arg(long)]
        prime: Option<u32>,
    },
    /// Is γ_p nilpotent on the PD ideal?
    GammaNilpotent {
        #[arg(long)]
        prime: Option<u32>,
    },
    /// Weight pieces of the de Rham complex, or a Künneth check
    Derham {
        /// Adjoin this variable and test the Künneth quasi-isomorphism
        #[arg(long)]
        kunneth: Option<String>,
    },
    /// Newton polynomials θ_i or Chern characters
    Chern {
        #[arg(long)]
        theta: Option<usize>,
    },
    /// Atiyah classes of split bundles on the projective line
    Atiyah {
        #[arg(long, allow_hyphen_values = true)]
        line: Option<i64>,
    },
    /// Super-trace of a chain endomorphism
    Trace,
    /// Kodaira–Spencer class of an Artinian family
    Obstruction,
    /// Gauss–Manin connection of a hypersurface family
    Gm {
        /// Same as --input; a corpus name is also accepted
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        picard_fuchs: bool,
        #[arg(long)]
        lift: bool,
        #[arg(long)]
        obstruction: Option<usize>,
        /// Basis index of the class
        #[arg(long, default_value_t = 0)]
        class: usize,
        /// Use the algebraic class h^j instead
        #[arg(long)]
        algebraic: Option<usize>,
        #[arg(long, default_value_t = 4)]
        max_order: usize,
    },
    /// Hochschild dimensions from a Hodge diamond
    Hkr {
        #[arg(long)]
        kunneth: bool,
        #[arg(long)]
        injectivity: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print a frozen example corpus
    Corpus { name: String },
    /// Run the acceptance suite
    Selftest,
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::PdChain { .. } => "pd-chain",
            Cmd::GammaNilpotent { .. } => "gamma-nilpotent",
            Cmd::Derham { .. } => "derham",
            Cmd::Chern { .. } => "chern",
            Cmd::Atiyah { .. } => "atiyah",
            Cmd::Trace => "trace",
            Cmd::Obstruction => "obstruction",
            Cmd::Gm { .. } => "gm",
            Cmd::Hkr { .. } => "hkr",
            Cmd::Corpus { .. } => "corpus",
            Cmd::Selftest => "selftest",
        }
    }

    /// Flags that change the result, echoed into the report and the hash.
    fn options(&self) -> Value {
        match self {
            Cmd::PdChain { prime } | Cmd::GammaNilpotent { prime } => json!({ "prime": prime }),
            Cmd::Derham { kunneth } => json!({ "kunneth": kunneth }),
            Cmd::Chern { theta } => json!({ "theta": theta }),
            Cmd::Atiyah { line } => json!({ "line": line }),
            Cmd::Gm { picard_fuchs, lift, obstruction, class, algebraic, max_order, .. } => json!({
                "picard_fuchs": picard_fuchs, "lift": lift, "obstruction": obstruction,
                "class": class, "algebraic": algebraic, "max_order": max_order,
            }),
            Cmd::Hkr { kunneth, injectivity, seed } => json!({ "kunneth": kunneth, "injectivity": injectivity, "seed": seed }),
            Cmd::Corpus { name } => json!({ "name": name }),
            Cmd::Trace | Cmd::Obstruction | Cmd::Selftest => json!({}),
        }
    }
}

/// Fixed conventions of the library, reported with every result.
fn design_toggles() -> Value {
    json!({
        "exact_arithmetic": true,
        "scalar_encoding": "decimal-string",
        "chern_sign": "c1 = -t",
        "pole_filtration": "pole order k lies in F^(n-k)",
        "obstruction_sign": "(m-1)*de_rham = -bloch",
        "hkr_grading": "HH_i = sum over q-p=i of h^{p,q}",
        "legendre_centre": "lambda = -1",
    })
}

/// Inline JSON, "-" for stdin, or a path.
fn load(spec: &str) -> Result<Value, JobError> {
    let text = if spec == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| invalid(format!("stdin: {e}")))?;
        s
    } else if spec.trim_start().starts_with(['{', '[']) {
        spec.to_string()
    } else {
        std::fs::read_to_string(spec).map_err(|e| invalid(format!("{spec}: {e}")))?
    };
    let v: Value = serde_json::from_str(&text).map_err(|e| invalid(format!("malformed JSON: {e}")))?;
    // a previous report feeds back in through its echoed input
    Ok(match v {
        Value::Object(ref m) if m.contains_key("command") && m.contains_key("result") => m.get("input").cloned().unwrap_or(Value::Null),
        v => v,
    })
}

fn family_input(spec: &str) -> Result<Value, JobError> {
    if std::path::Path::new(spec).exists() || spec == "-" || spec.trim_start().starts_with('{') {
        return load(spec);
    }
    let name = spec.trim_end_matches(".json");
    obslab::corpus::corpus(name).map_err(JobError::from)
}

fn dispatch(cmd: &Cmd, input: Option<&Value>, limits: &Limits) -> Result<Value, JobError> {
    match cmd {
        Cmd::PdChain { prime } => jobs::pd_chain(input, *prime),
        Cmd::GammaNilpotent { prime } => jobs::gamma_nilpotent(input, *prime),
        Cmd::Derham { kunneth } => jobs::derham(input, kunneth.as_deref(), limits),
        Cmd::Chern { theta } => jobs::chern(input, *theta, limits),
        Cmd::Atiyah { line } => jobs::atiyah(input, *line),
        Cmd::Trace => jobs::trace(input),
        Cmd::Obstruction => jobs::obstruction(input),
        Cmd::Gm { picard_fuchs, lift, obstruction, class, algebraic, max_order, .. } => {
            let opts = GmOptions {
                picard_fuchs: *picard_fuchs,
                lift: *lift,
                obstruction: *obstruction,
                class: *class,
                algebraic: *algebraic,
                max_order: *max_order,
            };
            jobs::gm(input, &opts, limits)
        }
        Cmd::Hkr { kunneth, injectivity, seed } => jobs::hkr(input, *kunneth, *injectivity, *seed),
        Cmd::Corpus { name } => Ok(obslab::corpus::corpus(name)?),
        Cmd::Selftest => {
            let results = obslab::acceptance::run_all();
            let failed = results.iter().filter(|r| !r.passed).count();
            for r in &results {
                eprintln!("{}", r.line());
            }
            Ok(json!({
                "passed": results.len() - failed,
                "failed": failed,
                "criteria": results.iter().map(|r| json!({"id": r.id, "name": r.name, "passed": r.passed, "detail": r.detail})).collect::<Vec<_>>(),
            }))
        }
    }
}

fn limits_from(global: &Global) -> Result<Limits, JobError> {
    let mut l = Limits::default();
    if let Ok(env) = std::env::var("OBSLAB_LIMITS") {
        l.apply_env(&env).map_err(invalid)?;
    }
    if let Some(d) = global.degree_cap {
        l.degree_cap = d;
    }
    if global.trunc.is_some() {
        l.trunc = global.trunc;
    }
    if let Some(t) = global.time_budget {
        l.time_budget = t;
    }
    l.validate().map_err(invalid)?;
    Ok(l)
}

/// Runs the job under the time budget and returns the report and exit code.
fn run(cli: Cli) -> Result<(Value, i32), JobError> {
    let limits = limits_from(&cli.global)?;
    let input = match (&cli.cmd, &cli.global.input) {
        (Cmd::Gm { family: Some(f), .. }, _) => Some(family_input(f)?),
        (_, Some(s)) => Some(load(s)?),
        _ => None,
    };
    let cmd = cli.cmd.clone();
    let job = json!({ "command": cmd.name(), "options": cmd.options(), "input": input, "limits": limits });
    let hash = hex::encode(Sha256::digest(serde_json::to_vec(&job).expect("json")));

    let (tx, rx) = mpsc::channel();
    let worker_input = input.clone();
    let worker_cmd = cmd.clone();
    std::thread::spawn(move || {
        let _ = tx.send(dispatch(&worker_cmd, worker_input.as_ref(), &limits));
    });
    let result = match rx.recv_timeout(Duration::from_secs(limits.time_budget)) {
        Ok(r) => r?,
        Err(_) => return Err(JobError { code: 3, message: format!("time budget of {} s exceeded", limits.time_budget) }),
    };
    if let Cmd::Corpus { .. } = cmd {
        return Ok((result, 0));
    }
    let code = match (&cmd, result.get("failed").and_then(Value::as_u64)) {
        (Cmd::Selftest, Some(f)) if f > 0 => 1,
        _ => 0,
    };
    let report = json!({
        "command": cmd.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "input_sha256": hash,
        "limits": limits,
        "options": cmd.options(),
        "design_decisions": design_toggles(),
        "input": input,
        "result": result,
    });
    Ok((report, code))
}

fn emit(v: &Value, out: Option<&PathBuf>) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(v).expect("json");
    text.push('\n');
    match out {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.global.output.clone();
    let (value, code) = match run(cli) {
        Ok(r) => r,
        Err(e) => (json!({ "error": e.message, "exit_code": e.code }), e.code),
    };
    if let Err(e) = emit(&value, out.as_ref()) {
        eprintln!("obslab: cannot write output: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code as u8)
}
