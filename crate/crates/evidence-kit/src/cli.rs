//! Command-line front end.
//!
//! Grammar:
//!
//! ```text
//! evidence-kit <calibrate|check-e|check-p|envelope|decompose|project|
//!               sin-net|decompose-bernoulli|constant-search> [flags]
//! ```
//!
//! Every invocation writes exactly one JSON document to stdout (TSV with
//! `--output table` where supported). Exit status: 0 for accepted verdicts
//! and successful computations, 1 for rejected (or inconclusive) verdicts,
//! 2 for usage and input errors.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bayes;
use crate::bernoulli::{self, Direction};
use crate::calibration::{self, Calibrator};
use crate::error::{Error, Result};
use crate::io::{FamilyFile, FunctionDomain, FunctionFile, JointFunctionFile, ParaBayesFile};
use crate::num::{ExtReal, Mode};
use crate::testing::{self, ArgmaxHint, StatModel};
use crate::verdict::{Decision, NumericsPolicy, Verdict};

/// Schema version stamped into every emitted document.
pub const SCHEMA: &str = "evidence-kit/1";

pub const GRAMMAR: &str = "evidence-kit <calibrate|check-e|check-p|envelope|decompose|project|sin-net|decompose-bernoulli|constant-search> [flags]";

// ---------------------------------------------------------------------------
// Output documents
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct CalibrateOut {
    pub schema: String,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e: Option<ExtReal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<ExtReal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certification: Option<Verdict>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CheckOut {
    pub schema: String,
    pub check: String,
    pub model: String,
    pub verdict: Verdict,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EnvelopeOut {
    pub schema: String,
    pub model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<ExtReal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<ExtReal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax: Option<ArgmaxHint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subdivisions: Option<usize>,
    /// Set when the supremum is infinite; `outcome`/`parameter` say where.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub infinite: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameter: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DecomposeOut {
    pub schema: String,
    pub g: JointFunctionFile,
    pub h: FunctionFile,
    pub g_verdict: Verdict,
    pub h_verdict: Verdict,
    pub off_support: Vec<String>,
    pub product_exact_on_support: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ProjectOut {
    pub schema: String,
    pub direction: String,
    pub function: FunctionFile,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SinNetOut {
    pub schema: String,
    pub n: usize,
    pub n_star: usize,
    pub points: Vec<f64>,
    pub cells: Vec<(usize, usize)>,
    pub tie_guard: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DecomposeBernoulliOut {
    pub schema: String,
    pub n: usize,
    pub g: FunctionFile,
    pub h: FunctionFile,
    pub g_verdict: Verdict,
    pub h_verdict: Verdict,
    pub product_exact: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ConstantOut {
    pub schema: String,
    pub n: usize,
    pub direction: Direction,
    pub lower: f64,
    pub upper: f64,
    pub witness: FunctionFile,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TableRow {
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TableOut {
    pub schema: String,
    pub direction: Direction,
    pub rows: Vec<TableRow>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorOut {
    pub schema: String,
    pub error: ErrorBody,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grammar: Option<String>,
}

// ---------------------------------------------------------------------------
// Argument scanning
// ---------------------------------------------------------------------------

struct Parsed {
    positional: Vec<String>,
    flags: BTreeMap<String, String>,
    switches: Vec<String>,
}

fn scan(args: &[String], value_flags: &[&str], switch_flags: &[&str]) -> Result<Parsed> {
    let mut parsed = Parsed {
        positional: Vec::new(),
        flags: BTreeMap::new(),
        switches: Vec::new(),
    };
    let mut it = args.iter().peekable();
    while let Some(arg) = it.next() {
        if let Some(name) = arg.strip_prefix("--") {
            if switch_flags.contains(&name) {
                parsed.switches.push(name.to_string());
            } else if value_flags.contains(&name) {
                let value = it
                    .next()
                    .ok_or_else(|| Error::InvalidParameter(format!("--{name} needs a value")))?;
                parsed.flags.insert(name.to_string(), value.clone());
            } else {
                return Err(Error::InvalidParameter(format!("unknown flag --{name}")));
            }
        } else {
            parsed.positional.push(arg.clone());
        }
    }
    Ok(parsed)
}

impl Parsed {
    fn required(&self, name: &str) -> Result<&str> {
        self.flags
            .get(name)
            .map(String::as_str)
            .ok_or_else(|| Error::InvalidParameter(format!("missing required flag --{name}")))
    }

    fn f64_flag(&self, name: &str) -> Result<Option<f64>> {
        match self.flags.get(name) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<f64>()
                .map(Some)
                .map_err(|_| Error::InvalidParameter(format!("--{name} is not a number: {raw}"))),
        }
    }

    fn usize_flag(&self, name: &str) -> Result<Option<usize>> {
        match self.flags.get(name) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<usize>()
                .map(Some)
                .map_err(|_| Error::InvalidParameter(format!("--{name} is not an integer: {raw}"))),
        }
    }

    fn has(&self, switch: &str) -> bool {
        self.switches.iter().any(|s| s == switch)
    }
}

/// A model descriptor: `bernoulli:N`, `binomial:N`, `sin:N`, or a path to a
/// finite-family JSON file.
fn parse_model(desc: &str) -> Result<(StatModel, FunctionDomain)> {
    if let Some(n) = desc.strip_prefix("bernoulli:") {
        let n: usize = n
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad model descriptor {desc}")))?;
        return Ok((StatModel::bernoulli(n)?, FunctionDomain::BinaryStrings(n)));
    }
    if let Some(n) = desc.strip_prefix("binomial:") {
        let n: usize = n
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad model descriptor {desc}")))?;
        return Ok((StatModel::binomial(n)?, FunctionDomain::Counts(n)));
    }
    if let Some(n) = desc.strip_prefix("sin:") {
        let n: usize = n
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad model descriptor {desc}")))?;
        let partition = bernoulli::sin_partition(n)?;
        return Ok((
            StatModel::partition_uniform(partition),
            FunctionDomain::Counts(n),
        ));
    }
    let file: FamilyFile = read_json(desc)?;
    Ok((file.into_model()?, FunctionDomain::Explicit))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &str) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidParameter(format!("cannot parse {path}: {e}")))
}

fn verdict_exit(verdicts: &[&Verdict]) -> i32 {
    if verdicts.iter().all(|v| v.decision == Decision::Accepted) {
        0
    } else {
        1
    }
}

fn thread_count(parsed: &Parsed) -> Result<usize> {
    if let Some(t) = parsed.usize_flag("threads")? {
        return Ok(t.max(1));
    }
    if let Ok(env) = std::env::var("EVIDENCE_KIT_THREADS") {
        if let Ok(t) = env.parse::<usize>() {
            return Ok(t.max(1));
        }
    }
    Ok(1)
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

/// Runs one invocation; returns the process exit status.
pub fn run<W: Write>(args: &[String], out: &mut W) -> i32 {
    match dispatch(args, out) {
        Ok(code) => code,
        Err(err) => {
            let usage = matches!(err, Error::InvalidParameter(_));
            let doc = ErrorOut {
                schema: SCHEMA.to_string(),
                error: ErrorBody {
                    kind: if usage { "usage" } else { "error" }.to_string(),
                    message: err.to_string(),
                    grammar: usage.then(|| GRAMMAR.to_string()),
                },
            };
            emit(out, &doc);
            2
        }
    }
}

fn emit<W: Write, T: Serialize>(out: &mut W, doc: &T) {
    if serde_json::to_writer(&mut *out, doc).is_ok() {
        let _ = out.write_all(b"\n");
    }
}

fn dispatch<W: Write>(args: &[String], out: &mut W) -> Result<i32> {
    let Some(command) = args.first() else {
        return Err(Error::InvalidParameter("missing subcommand".into()));
    };
    let rest = &args[1..];
    match command.as_str() {
        "calibrate" => cmd_calibrate(rest, out),
        "check-e" => cmd_check(rest, out, true),
        "check-p" => cmd_check(rest, out, false),
        "envelope" => cmd_envelope(rest, out),
        "decompose" => cmd_decompose(rest, out),
        "project" => cmd_project(rest, out),
        "sin-net" => cmd_sin_net(rest, out),
        "decompose-bernoulli" => cmd_decompose_bernoulli(rest, out),
        "constant-search" => cmd_constant_search(rest, out),
        other => Err(Error::InvalidParameter(format!(
            "unknown subcommand {other}"
        ))),
    }
}

fn cmd_calibrate<W: Write>(args: &[String], out: &mut W) -> Result<i32> {
    let parsed = scan(
        args,
        &["kind", "kappa", "value", "subdivisions", "tol"],
        &["certify"],
    )?;
    let kind = parsed.required("kind")?.to_string();
    let value = parsed
        .f64_flag("value")?
        .ok_or_else(|| Error::InvalidParameter("missing required flag --value".into()))?;
    let kappa = parsed.f64_flag("kappa")?;
    let mut doc = CalibrateOut {
        schema: SCHEMA.to_string(),
        kind: kind.clone(),
        kappa,
        value,
        e: None,
        p: None,
        certification: None,
    };
    let mut exit = 0;
    match kind.as_str() {
        "inverse" => {
            if kappa.is_some() {
                return Err(Error::InvalidParameter(
                    "--kappa does not apply to the inverse calibrator".into(),
                ));
            }
            let e = ExtReal::from_f64(value)?;
            doc.p = Some(calibration::calibrate_e_to_p(&e));
        }
        "power" | "log" => {
            let kappa = kappa
                .ok_or_else(|| Error::InvalidParameter("missing required flag --kappa".into()))?;
            let cal = if kind == "power" {
                Calibrator::power(kappa)?
            } else {
                Calibrator::log(kappa)?
            };
            doc.e = Some(calibration::calibrate_p_to_e(&cal, value)?);
            if parsed.has("certify") {
                let subdivisions = parsed.usize_flag("subdivisions")?.unwrap_or(4096);
                let default_tol = if kind == "power" { 1e-9 } else { 1e-6 };
                let tol = parsed.f64_flag("tol")?.unwrap_or(default_tol);
                let verdict = calibration::admissibility_check(&cal, subdivisions, tol)?;
                exit = verdict_exit(&[&verdict]);
                doc.certification = Some(verdict);
            }
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "--kind must be power|log|inverse, got {other}"
            )))
        }
    }
    emit(out, &doc);
    Ok(exit)
}

fn cmd_check<W: Write>(args: &[String], out: &mut W, e_side: bool) -> Result<i32> {
    let parsed = scan(args, &["function", "model", "tol"], &["exact"])?;
    let (model, domain) = parse_model(parsed.required("model")?)?;
    let file: FunctionFile = read_json(parsed.required("function")?)?;
    let f = file.into_score_fn(domain)?;
    let tol = parsed.f64_flag("tol")?.unwrap_or(1e-9);
    let policy = if parsed.has("exact") {
        NumericsPolicy::exact()
    } else {
        NumericsPolicy::binary64(tol)
    };
    let verdict = if e_side {
        testing::is_e_function(&f, &model, &policy)?
    } else {
        testing::is_p_function(&f, &model, &policy)?
    };
    let exit = verdict_exit(&[&verdict]);
    emit(
        out,
        &CheckOut {
            schema: SCHEMA.to_string(),
            check: if e_side { "e" } else { "p" }.to_string(),
            model: parsed.required("model")?.to_string(),
            verdict,
        },
    );
    Ok(exit)
}

fn cmd_envelope<W: Write>(args: &[String], out: &mut W) -> Result<i32> {
    let parsed = scan(args, &["function", "model", "tol"], &[])?;
    let model_desc = parsed.required("model")?.to_string();
    let (model, domain) = parse_model(&model_desc)?;
    let file: FunctionFile = read_json(parsed.required("function")?)?;
    let f = file.into_score_fn(domain)?;
    let tol = parsed.f64_flag("tol")?.unwrap_or(1e-9);
    let mut doc = EnvelopeOut {
        schema: SCHEMA.to_string(),
        model: model_desc,
        lower: None,
        upper: None,
        argmax: None,
        certified: None,
        mode: None,
        subdivisions: None,
        infinite: false,
        outcome: None,
        parameter: None,
    };
    match testing::upper_envelope(&f, &model, tol) {
        Ok(env) => {
            doc.lower = Some(env.lower);
            doc.upper = Some(env.upper);
            doc.argmax = Some(env.argmax);
            doc.certified = Some(env.certified);
            doc.mode = Some(env.mode);
            doc.subdivisions = Some(env.subdivisions);
        }
        Err(Error::InfiniteValueWithPositiveMass { outcome, parameter }) => {
            doc.infinite = true;
            doc.outcome = Some(outcome);
            doc.parameter = Some(parameter);
        }
        Err(e) => return Err(e),
    }
    emit(out, &doc);
    Ok(0)
}

fn cmd_decompose<W: Write>(args: &[String], out: &mut W) -> Result<i32> {
    let parsed = scan(args, &["function", "model", "tol"], &["exact"])?;
    let model_file: ParaBayesFile = read_json(parsed.required("model")?)?;
    let model = model_file.into_model()?;
    let joint_file: JointFunctionFile = read_json(parsed.required("function")?)?;
    let f = joint_file.into_conditional()?.to_joint()?;
    let tol = parsed.f64_flag("tol")?.unwrap_or(1e-9);
    let policy = if parsed.has("exact") {
        NumericsPolicy::exact()
    } else {
        NumericsPolicy::binary64(tol)
    };
    let d = bayes::decompose_e(&f, &model, &policy)?;
    let exit = verdict_exit(&[&d.g_verdict, &d.h_verdict]);
    emit(
        out,
        &DecomposeOut {
            schema: SCHEMA.to_string(),
            g: JointFunctionFile::from_conditional(&d.g),
            h: FunctionFile::from_score_fn(&d.h),
            g_verdict: d.g_verdict,
            h_verdict: d.h_verdict,
            off_support: d.off_support,
            product_exact_on_support: d.product_exact_on_support,
        },
    );
    Ok(exit)
}

fn cmd_project<W: Write>(args: &[String], out: &mut W) -> Result<i32> {
    let parsed = scan(args, &["function", "dir"], &[])?;
    let dir = parsed.required("dir")?.to_string();
    let joint_file: JointFunctionFile = read_json(parsed.required("function")?)?;
    let f = joint_file.into_conditional()?.to_joint()?;
    let projected = match dir.as_str() {
        "inf" => bayes::inf_project(&f)?,
        "sup" => bayes::sup_project(&f)?,
        other => {
            return Err(Error::InvalidParameter(format!(
                "--dir must be inf|sup, got {other}"
            )))
        }
    };
    emit(
        out,
        &ProjectOut {
            schema: SCHEMA.to_string(),
            direction: dir,
            function: FunctionFile::from_score_fn(&projected),
        },
    );
    Ok(0)
}

fn cmd_sin_net<W: Write>(args: &[String], out: &mut W) -> Result<i32> {
    let parsed = scan(args, &[], &[])?;
    let n: usize = parsed
        .positional
        .first()
        .ok_or_else(|| Error::InvalidParameter("sin-net needs N".into()))?
        .parse()
        .map_err(|_| Error::InvalidParameter("sin-net N must be an integer".into()))?;
    let net = bernoulli::sin_net(n)?;
    let partition = bernoulli::sin_partition(n)?;
    emit(
        out,
        &SinNetOut {
            schema: SCHEMA.to_string(),
            n,
            n_star: net.n_star,
            points: net.points,
            cells: partition.cells().to_vec(),
            tie_guard: partition.tie_guard,
        },
    );
    Ok(0)
}

fn cmd_decompose_bernoulli<W: Write>(args: &[String], out: &mut W) -> Result<i32> {
    let parsed = scan(args, &["function", "N", "tol"], &["exact"])?;
    let n = parsed
        .usize_flag("N")?
        .ok_or_else(|| Error::InvalidParameter("missing required flag --N".into()))?;
    let file: FunctionFile = read_json(parsed.required("function")?)?;
    let f = file.into_score_fn(FunctionDomain::BinaryStrings(n))?;
    let tol = parsed.f64_flag("tol")?.unwrap_or(1e-9);
    let policy = if parsed.has("exact") {
        NumericsPolicy::exact()
    } else {
        NumericsPolicy::binary64(tol)
    };
    let d = bernoulli::decompose_bernoulli_e(&f, n, &policy)?;
    let exit = verdict_exit(&[&d.g_verdict, &d.h_verdict]);
    emit(
        out,
        &DecomposeBernoulliOut {
            schema: SCHEMA.to_string(),
            n,
            g: FunctionFile::from_score_fn(&d.g),
            h: FunctionFile::from_score_fn(&d.h),
            g_verdict: d.g_verdict,
            h_verdict: d.h_verdict,
            product_exact: d.product_exact,
        },
    );
    Ok(exit)
}

fn parse_direction(raw: &str) -> Result<Direction> {
    match raw {
        "sin2bin" => Ok(Direction::SinIntoBin),
        "bin2sin" => Ok(Direction::BinIntoSin),
        other => Err(Error::InvalidParameter(format!(
            "--direction must be sin2bin|bin2sin, got {other}"
        ))),
    }
}

fn cmd_constant_search<W: Write>(args: &[String], out: &mut W) -> Result<i32> {
    let parsed = scan(
        args,
        &["N", "direction", "tol", "table", "threads", "output"],
        &[],
    )?;
    let direction = parse_direction(parsed.required("direction")?)?;
    let tol = parsed.f64_flag("tol")?.unwrap_or(1e-6);
    let threads = thread_count(&parsed)?;
    let table_mode = parsed
        .flags
        .get("output")
        .map(|s| s == "table")
        .unwrap_or(false);

    if let Some(range) = parsed.flags.get("table") {
        let (lo, hi) = range
            .split_once("..")
            .ok_or_else(|| Error::InvalidParameter("--table expects N1..N2".into()))?;
        let lo: usize = lo
            .parse()
            .map_err(|_| Error::InvalidParameter("bad --table range".into()))?;
        let hi: usize = hi
            .parse()
            .map_err(|_| Error::InvalidParameter("bad --table range".into()))?;
        if lo < 2 || hi < lo {
            return Err(Error::InvalidParameter(
                "--table range needs 2 <= N1 <= N2".into(),
            ));
        }
        let mut rows = Vec::new();
        for n in lo..=hi {
            let bracket = bernoulli::constant_search(n, direction, tol, threads)?;
            rows.push(TableRow {
                n,
                lower: bracket.lower,
                upper: bracket.upper,
            });
        }
        if table_mode {
            let _ = writeln!(out, "n\tdirection\tlower\tupper");
            for row in &rows {
                let _ = writeln!(
                    out,
                    "{}\t{:?}\t{}\t{}",
                    row.n, direction, row.lower, row.upper
                );
            }
        } else {
            emit(
                out,
                &TableOut {
                    schema: SCHEMA.to_string(),
                    direction,
                    rows,
                },
            );
        }
        return Ok(0);
    }

    let n = parsed
        .usize_flag("N")?
        .ok_or_else(|| Error::InvalidParameter("missing required flag --N".into()))?;
    let bracket = bernoulli::constant_search(n, direction, tol, threads)?;
    if table_mode {
        let _ = writeln!(out, "n\tdirection\tlower\tupper");
        let _ = writeln!(
            out,
            "{}\t{:?}\t{}\t{}",
            bracket.n, bracket.direction, bracket.lower, bracket.upper
        );
    } else {
        emit(
            out,
            &ConstantOut {
                schema: SCHEMA.to_string(),
                n: bracket.n,
                direction: bracket.direction,
                lower: bracket.lower,
                upper: bracket.upper,
                witness: FunctionFile::from_score_fn(&bracket.witness),
            },
        );
    }
    Ok(0)
}
