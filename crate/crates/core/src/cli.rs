//! The `inacc` command line. [`run`] is a pure function from argv to output
//! so it can be driven from tests.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expr::{eval, eval_list};
use crate::inaccessibility::{chi, chi_c, chi_c_recursive, property_report, ProbVector};
use crate::lattice::{
    classical_sublattice, ideal_configuration, is_admissible_access, to_dot, Configuration,
    Statement,
};
use crate::mes::{
    build, in_mes_set, marginals, mes_violations, reconstruct_with_tolerance, sample,
    samples_to_csv, AccessibleMarginals, Membership,
};
use crate::models::{
    allowed_inflations, allowed_inflations_printed, classify, compose, inflate, Model,
};
use crate::quasiprob::{check_rules, g_counterexample, g_monotonicity_scan, Valuation};
use crate::qubit::{
    is_positive_semidefinite, purity_relation, q_to_rho, rho_to_q, DensityMatrix, Matrix2,
};
use crate::verify::run_all;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandResult {
    fn ok(stdout: String) -> Self {
        Self {
            exit_code: 0,
            stdout,
            stderr: String::new(),
        }
    }

    fn check(passed: bool, stdout: String) -> Self {
        Self {
            exit_code: if passed { 0 } else { 1 },
            stdout,
            stderr: if passed {
                String::new()
            } else {
                "check failed\n".into()
            },
        }
    }
}

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "inacc",
    version,
    about = "Accessibility lattices, MES quasi-probability models and the qubit frame"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Statement lattices and accessibility configurations
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Model classification, composition and inflation
    #[command(subcommand)]
    Model(ModelCmd),
    /// MES models: partitions, marginals, membership and sampling
    #[command(subcommand)]
    Mes(MesCmd),
    /// Inaccessibility measures
    #[command(subcommand)]
    Chi(ChiCmd),
    /// Quasi-probability valuations and conditionals
    #[command(subcommand)]
    Qp(QpCmd),
    /// Qubit density matrices and the four-atom frame
    #[command(subcommand)]
    Qubit(QubitCmd),
    /// Run the verification sweeps
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Number of atoms
    #[arg(long = "D", default_value_t = 4)]
    dim: usize,
    /// Accessibility depth
    #[arg(long = "d", default_value_t = 2)]
    depth: usize,
}

#[derive(Subcommand, Debug)]
enum LatticeCmd {
    /// Describe a configuration (ideal unless --blocks is given)
    Show {
        #[command(flatten)]
        model: ModelArgs,
        /// Generating statements, e.g. "0|1,2|3"
        #[arg(long)]
        blocks: Option<String>,
    },
    /// Check an explicit set of accessible statements
    Check {
        #[command(flatten)]
        model: ModelArgs,
        /// Accessible statements, e.g. "⊥,0|1,2|3,⊤"
        #[arg(long, conflicts_with = "file")]
        accessible: Option<String>,
        /// JSON array of atom lists
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Hasse diagram in DOT syntax
    Dot {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        blocks: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
    },
}

#[derive(Subcommand, Debug)]
enum ModelCmd {
    Classify {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Compose two models given as "D,d"
    Compose {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Inflate a classical model of dimension m with parameter c
    Inflate {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        c: u32,
    },
    /// Dimensions a classical model of dimension m can be inflated to
    Inflations {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long = "d", default_value_t = 2)]
        depth: usize,
    },
}

#[derive(Args, Debug)]
struct StateArgs {
    /// Comma-separated entries; fractions and sqrt(...) are accepted
    #[arg(long, allow_hyphen_values = true, conflicts_with = "file")]
    q: Option<String>,
    /// JSON array of numbers
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Blocks,
    All,
}

impl From<Mode> for Membership {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Blocks => Membership::BlocksOnly,
            Mode::All => Membership::AllLevelD,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Subcommand, Debug)]
enum MesCmd {
    Build {
        #[arg(long = "d", default_value_t = 2)]
        d: usize,
    },
    Marginals {
        #[arg(long = "d", default_value_t = 2)]
        d: usize,
        #[command(flatten)]
        state: StateArgs,
    },
    Reconstruct {
        #[arg(long = "d", default_value_t = 2)]
        d: usize,
        /// One vector per partition separated by ';', e.g. "1,0;1/2,1/2;1/2,1/2"
        #[arg(long, conflicts_with = "file")]
        marginals: Option<String>,
        /// JSON array of arrays
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = crate::DEFAULT_TOL)]
        tol: f64,
    },
    Member {
        #[arg(long = "d", default_value_t = 2)]
        d: usize,
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, value_enum, default_value_t = Mode::Blocks)]
        mode: Mode,
        #[arg(long, default_value_t = crate::DEFAULT_TOL)]
        tol: f64,
    },
    Sample {
        #[arg(long = "d", default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, default_value_t = crate::DEFAULT_TOL)]
        tol: f64,
    },
}

#[derive(Subcommand, Debug)]
enum ChiCmd {
    /// X_c of a probability vector, or 1/Σq² of a quasi-probability state
    Eval {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value = "2")]
        c: String,
    },
    /// X_c recovered from the accessible marginals
    Recursive {
        #[arg(long = "d", default_value_t = 3)]
        d: usize,
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = 2)]
        c: u32,
    },
    /// Randomised property checks
    Properties {
        /// Comma-separated vector lengths
        #[arg(long, default_value = "2,3,4,6")]
        dims: String,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
enum QpCmd {
    Value {
        #[command(flatten)]
        state: StateArgs,
        /// Statement such as "0|2"
        #[arg(long)]
        s: String,
    },
    /// Q(y | x)
    Conditional {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        y: String,
        #[arg(long)]
        x: String,
    },
    /// Sum, product and Bayes rules on random statement triples
    Rules {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// The monotonicity counterexample at one x, or the full scan
    Counterexample {
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        #[arg(long, default_value_t = 100)]
        n: usize,
    },
}

#[derive(Args, Debug)]
struct RhoArgs {
    /// identity/2, |0>, |1>, |+>, |->, |+i>, |-i> or bloch:x,y,z
    #[arg(long, allow_hyphen_values = true, conflicts_with = "file")]
    rho: Option<String>,
    /// JSON {"re": [[..]], "im": [[..]]}
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum QubitCmd {
    ToQ {
        #[command(flatten)]
        rho: RhoArgs,
    },
    ToRho {
        #[command(flatten)]
        state: StateArgs,
    },
    Purity {
        #[command(flatten)]
        rho: RhoArgs,
    },
    Roundtrip {
        #[command(flatten)]
        rho: RhoArgs,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    All {
        #[arg(long = "max-d", default_value_t = 8)]
        max_d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CommandResult {
                    exit_code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                CommandResult::ok(text)
            };
        }
    };
    match dispatch(cli.command) {
        Ok(r) => r,
        Err(e) => CommandResult {
            exit_code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

/// Serialises with integral floats written without a fractional part.
fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    tidy(&mut v);
    let mut s = serde_json::to_string(&v).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn tidy(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(f) = n.as_f64().filter(|_| n.is_f64()) {
                if f.fract() == 0.0 && f.abs() < 9.0e15 {
                    *v = json!(f as i64);
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(tidy),
        Value::Object(map) => map.values_mut().for_each(tidy),
        _ => {}
    }
}

fn read_file(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn read_state(args: &StateArgs) -> Result<Vec<f64>> {
    match (&args.q, &args.file) {
        (Some(q), _) => eval_list(q),
        (None, Some(path)) => parse_json(&read_file(path)?),
        (None, None) => Err(Error::InvalidArgument("give --q or --file".into())),
    }
}

fn parse_statements(dim: usize, text: &str) -> Result<Vec<Statement>> {
    text.split(',').map(|t| Statement::parse(dim, t)).collect()
}

fn configuration(model: &ModelArgs, blocks: &Option<String>) -> Result<Configuration> {
    match blocks {
        Some(b) => {
            Configuration::generated(model.dim, model.depth, parse_statements(model.dim, b)?)
        }
        None => ideal_configuration(model.dim, model.depth),
    }
}

fn parse_model(text: &str) -> Result<Model> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad model {text:?}, expected \"D,d\"")))
    };
    match parts.as_slice() {
        [dim, depth] => Model::new(num(dim)?, num(depth)?),
        _ => Err(Error::Parse(format!(
            "bad model {text:?}, expected \"D,d\""
        ))),
    }
}

/// Named single-qubit states.
pub fn parse_rho(text: &str) -> Result<DensityMatrix> {
    let t = text.trim();
    let bloch = match t {
        "identity/2" | "I/2" | "mixed" => [0.0, 0.0, 0.0],
        "|0>" => [0.0, 0.0, 1.0],
        "|1>" => [0.0, 0.0, -1.0],
        "|+>" => [1.0, 0.0, 0.0],
        "|->" => [-1.0, 0.0, 0.0],
        "|+i>" => [0.0, 1.0, 0.0],
        "|-i>" => [0.0, -1.0, 0.0],
        _ => {
            let Some(rest) = t.strip_prefix("bloch:") else {
                return Err(Error::Parse(format!("unknown state {t:?}")));
            };
            let v = eval_list(rest)?;
            let [x, y, z] = v[..] else {
                return Err(Error::Parse(format!(
                    "bloch vector needs 3 entries, got {}",
                    v.len()
                )));
            };
            [x, y, z]
        }
    };
    DensityMatrix::from_bloch(bloch)
}

fn read_rho(args: &RhoArgs) -> Result<DensityMatrix> {
    match (&args.rho, &args.file) {
        (Some(r), _) => parse_rho(r),
        (None, Some(path)) => parse_json(&read_file(path)?),
        (None, None) => Err(Error::InvalidArgument("give --rho or --file".into())),
    }
}

fn matrix_json(m: &Matrix2) -> Value {
    json!({
        "re": m.0.map(|row| row.map(|z| z.re)),
        "im": m.0.map(|row| row.map(|z| z.im)),
    })
}

fn dispatch(cmd: Command) -> Result<CommandResult> {
    match cmd {
        Command::Lattice(c) => lattice(c),
        Command::Model(c) => model(c),
        Command::Mes(c) => mes(c),
        Command::Chi(c) => chi_cmd(c),
        Command::Qp(c) => qp(c),
        Command::Qubit(c) => qubit(c),
        Command::Verify(c) => verify(c),
    }
}

fn lattice(cmd: LatticeCmd) -> Result<CommandResult> {
    match cmd {
        LatticeCmd::Show { model, blocks } => {
            let cfg = configuration(&model, &blocks)?;
            let admissibility = is_admissible_access(&cfg)?;
            let level_blocks = cfg.level_blocks();
            let accessible = cfg.accessible_statements()?;
            let class = classify(Model::new(model.dim, model.depth)?);
            let classical_m = classical_sublattice(&cfg).map(|s| s.m()).ok();
            Ok(CommandResult::ok(to_json(&json!({
                "model": Model::new(model.dim, model.depth)?,
                "class": class,
                "level_blocks": level_blocks,
                "accessible": accessible,
                "classical_m": classical_m,
                "admissible": admissibility.admissible,
            }))?))
        }
        LatticeCmd::Check {
            model,
            accessible,
            file,
        } => {
            let statements = match (accessible, file) {
                (Some(a), _) => parse_statements(model.dim, &a)?,
                (None, Some(path)) => parse_json::<Vec<Vec<usize>>>(&read_file(&path)?)?
                    .into_iter()
                    .map(|atoms| Statement::from_atoms(model.dim, atoms))
                    .collect::<Result<_>>()?,
                (None, None) => {
                    return Err(Error::InvalidArgument("give --accessible or --file".into()))
                }
            };
            let cfg = Configuration::from_accessible(model.dim, model.depth, statements)?;
            let report = is_admissible_access(&cfg)?;
            Ok(CommandResult::check(report.admissible, to_json(&report)?))
        }
        LatticeCmd::Dot {
            model,
            blocks,
            format,
        } => {
            if format != Format::Dot {
                return Err(Error::InvalidArgument(
                    "lattice dot only emits --format dot".into(),
                ));
            }
            Ok(CommandResult::ok(to_dot(&configuration(&model, &blocks)?)?))
        }
    }
}

fn model(cmd: ModelCmd) -> Result<CommandResult> {
    let out = match cmd {
        ModelCmd::Classify { model } => {
            let m = Model::new(model.dim, model.depth)?;
            to_json(&json!({ "model": m, "classification": classify(m) }))?
        }
        ModelCmd::Compose { left, right } => {
            to_json(&compose(parse_model(&left)?, parse_model(&right)?)?)?
        }
        ModelCmd::Inflate { m, c } => to_json(&inflate(m, c)?)?,
        ModelCmd::Inflations { m, depth } => to_json(&json!({
            "m": m,
            "d": depth,
            "dims": allowed_inflations(m, depth)?,
            "closed_form": allowed_inflations_printed(m, depth),
        }))?,
    };
    Ok(CommandResult::ok(out))
}

fn parse_marginals(text: &str) -> Result<AccessibleMarginals> {
    Ok(AccessibleMarginals(
        text.split(';').map(eval_list).collect::<Result<_>>()?,
    ))
}

fn mes(cmd: MesCmd) -> Result<CommandResult> {
    match cmd {
        MesCmd::Build { d } => Ok(CommandResult::ok(to_json(&build(d)?)?)),
        MesCmd::Marginals { d, state } => {
            let q = read_state(&state)?;
            Ok(CommandResult::ok(to_json(&marginals(&build(d)?, &q)?)?))
        }
        MesCmd::Reconstruct {
            d,
            marginals,
            file,
            tol,
        } => {
            let am = match (marginals, file) {
                (Some(m), _) => parse_marginals(&m)?,
                (None, Some(path)) => parse_json(&read_file(&path)?)?,
                (None, None) => {
                    return Err(Error::InvalidArgument("give --marginals or --file".into()))
                }
            };
            let m = build(d)?;
            let q = reconstruct_with_tolerance(&m, &am, tol)?;
            Ok(CommandResult::ok(to_json(&json!({
                "q": q,
                "probabilities": am.is_probability(tol),
            }))?))
        }
        MesCmd::Member {
            d,
            state,
            mode,
            tol,
        } => {
            let q = read_state(&state)?;
            let m = build(d)?;
            let mode = Membership::from(mode);
            let member = in_mes_set(&m, &q, mode, tol)?;
            let out = to_json(&json!({
                "member": member,
                "chi": chi(&q)?,
                "violations": mes_violations(&m, &q, mode, tol)?,
            }))?;
            Ok(CommandResult::check(member, out))
        }
        MesCmd::Sample {
            d,
            n,
            seed,
            format,
            tol,
        } => {
            let m = build(d)?;
            let states = sample(&m, n, seed)?;
            let out = match format {
                Format::Json => to_json(&states)?,
                Format::Csv => samples_to_csv(&m, &states, tol)?,
                Format::Dot => {
                    return Err(Error::InvalidArgument("samples are json or csv".into()))
                }
            };
            Ok(CommandResult::ok(out))
        }
    }
}

fn chi_cmd(cmd: ChiCmd) -> Result<CommandResult> {
    match cmd {
        ChiCmd::Eval { state, c } => {
            let q = read_state(&state)?;
            let c = eval(&c)?;
            let value = if q.iter().all(|&x| x >= 0.0) {
                chi_c(&ProbVector::new(q)?, c)?
            } else if c == 2.0 {
                chi(&q)?
            } else {
                return Err(Error::InvalidArgument(
                    "negative entries are only defined for c = 2".into(),
                ));
            };
            Ok(CommandResult::ok(to_json(
                &json!({ "c": c, "chi": value }),
            )?))
        }
        ChiCmd::Recursive { d, state, c } => {
            let q = read_state(&state)?;
            let m = build(d)?;
            let recursive = chi_c_recursive(&m, &q, c)?;
            let direct = if q.iter().all(|&x| x >= 0.0) {
                Some(chi_c(&ProbVector::new(q.clone())?, c as f64)?)
            } else if c == 2 {
                Some(chi(&q)?)
            } else {
                None
            };
            Ok(CommandResult::ok(to_json(&json!({
                "c": c,
                "recursive": recursive,
                "direct": direct,
            }))?))
        }
        ChiCmd::Properties { dims, n, seed } => {
            let dims: Vec<usize> = dims
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad length {t:?}")))
                })
                .collect::<Result<_>>()?;
            let report = property_report(&dims, n, seed)?;
            let passed = report.passed;
            Ok(CommandResult::check(passed, to_json(&report)?))
        }
    }
}

fn qp(cmd: QpCmd) -> Result<CommandResult> {
    match cmd {
        QpCmd::Value { state, s } => {
            let v = Valuation::new(read_state(&state)?)?;
            let s = Statement::parse(v.dim(), &s)?;
            Ok(CommandResult::ok(to_json(
                &json!({ "statement": s, "value": v.value(s)? }),
            )?))
        }
        QpCmd::Conditional { state, y, x } => {
            let v = Valuation::new(read_state(&state)?)?;
            let (y, x) = (
                Statement::parse(v.dim(), &y)?,
                Statement::parse(v.dim(), &x)?,
            );
            Ok(CommandResult::ok(to_json(&json!({
                "y": y,
                "x": x,
                "value": v.conditional(y, x)?,
            }))?))
        }
        QpCmd::Rules { state, n, seed } => {
            let v = Valuation::new(read_state(&state)?)?;
            let report = check_rules(&v, n, seed)?;
            Ok(CommandResult::check(report.passed, to_json(&report)?))
        }
        QpCmd::Counterexample { x, n } => match x {
            Some(x) => Ok(CommandResult::ok(to_json(&g_counterexample(eval(&x)?)?)?)),
            None => {
                let scan = g_monotonicity_scan(n)?;
                Ok(CommandResult::check(scan.passed, to_json(&scan)?))
            }
        },
    }
}

fn qubit(cmd: QubitCmd) -> Result<CommandResult> {
    let out = match cmd {
        QubitCmd::ToQ { rho } => to_json(&rho_to_q(&read_rho(&rho)?))?,
        QubitCmd::ToRho { state } => {
            let q = read_state(&state)?;
            let m = q_to_rho(&q)?;
            to_json(&json!({
                "rho": matrix_json(&m),
                "bloch": m.bloch(),
                "positive": is_positive_semidefinite(&m),
                "chi": chi(&q)?,
            }))?
        }
        QubitCmd::Purity { rho } => to_json(&purity_relation(&read_rho(&rho)?)?)?,
        QubitCmd::Roundtrip { rho } => {
            let rho = read_rho(&rho)?;
            let q = rho_to_q(&rho);
            let back = q_to_rho(&q)?;
            to_json(&json!({
                "rho": rho,
                "q": q,
                "rho_back": matrix_json(&back),
                "deviation": back.max_abs_diff(rho.matrix()),
            }))?
        }
    };
    Ok(CommandResult::ok(out))
}

fn verify(cmd: VerifyCmd) -> Result<CommandResult> {
    let VerifyCmd::All { max_d, seed } = cmd;
    let reports = run_all(max_d, seed)?;
    let passed = reports.iter().all(|r| r.passed);
    let mut stderr: String = reports
        .iter()
        .map(|r| {
            format!(
                "{:<3} {} {:>10.1} ms  {}\n",
                r.id,
                if r.passed { "PASS" } else { "FAIL" },
                r.elapsed_ms,
                r.description
            )
        })
        .collect();
    for r in &reports {
        for w in &r.warnings {
            stderr.push_str(&format!("warning [{}]: {w}\n", r.id));
        }
    }
    Ok(CommandResult {
        exit_code: if passed { 0 } else { EXIT_FAILURE },
        stdout: to_json(&reports)?,
        stderr,
    })
}
