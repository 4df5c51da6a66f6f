//! Argument parsing and the four subcommands.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dqm_core::family::{catalog, EtaKind, FamilySpec};
use dqm_core::poly::DEGREE_CAP;
use dqm_core::verify::{self, CheckResult, Suite, VerifyConfig};
use dqm_core::{FamilyId, ParamSet, System, C64};
use serde_json::{json, Value};

use crate::complex::{format_complex, parse_complex};
use crate::error::{is_input_error, CliError};
use crate::fixtures::Fixtures;
use crate::report::{fmt17, write_csv, write_human, Report, ReportConfig, SystemRef, REPORT_VERSION};

#[derive(Debug, Parser)]
#[command(name = "dqm", version, about = "Exactly solvable discrete quantum mechanics: evaluate, tabulate, verify")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the families
    List(ListArgs),
    /// Evaluate P_n, phi_n and E_n at one point
    Eval(EvalArgs),
    /// Tabulate the spectrum, recurrence coefficients or norms
    Table(TableArgs),
    /// Run identity checks and emit a report
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Output {
    #[default]
    Human,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    Spectrum,
    Recurrence,
    Norms,
}

/// Family and parameter selection shared by eval, table and verify.
#[derive(Debug, Clone, Default, Args)]
pub struct SystemArgs {
    /// Family slug; every family when omitted
    #[arg(value_name = "FAMILY")]
    pub family_pos: Option<String>,
    #[arg(long)]
    pub family: Option<String>,
    /// Named parameter set from the fixtures file; wins over inline values
    #[arg(long)]
    pub fixture: Option<String>,
    /// Parameter a_j as a complex literal "re+imi" (repeatable)
    #[arg(long = "a", value_name = "COMPLEX", allow_hyphen_values = true)]
    pub a: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    #[arg(long = "alpha-param", allow_hyphen_values = true)]
    pub alpha_param: Option<f64>,
    #[arg(long = "beta-param", allow_hyphen_values = true)]
    pub beta_param: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ListArgs {
    #[arg(long, value_enum, default_value_t)]
    pub output: Output,
    /// Same as --output json
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, default_value_t = 0)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub x: f64,
    #[arg(long, value_enum, default_value_t)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[arg(value_enum)]
    pub kind: TableKind,
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long = "n-max", default_value_t = 10)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value_t)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Suite names, comma separated or repeated; "all" runs every suite
    /// that applies to the family
    #[arg(long, value_delimiter = ',', default_value = "all")]
    pub suite: Vec<String>,
    #[arg(long = "n-max", default_value_t = 10)]
    pub n_max: usize,
    /// Replaces every per-check tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t)]
    pub output: Output,
    /// Also write the JSON report here
    #[arg(long)]
    pub report: Option<PathBuf>,
}

/// Runs a parsed command, writing to `out`; returns the exit status.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    match cli.command {
        Command::List(a) => cmd_list(&a, out).map(|_| 0),
        Command::Eval(a) => cmd_eval(&a, &Fixtures::load()?, out).map(|_| 0),
        Command::Table(a) => cmd_table(&a, &Fixtures::load()?, out).map(|_| 0),
        Command::Verify(a) => cmd_verify(&a, &Fixtures::load()?, out),
    }
}

// ---- system selection ----

pub fn resolve_systems(args: &SystemArgs, fixtures: &Fixtures) -> Result<Vec<(SystemRef, System)>, CliError> {
    let family = match (&args.family_pos, &args.family) {
        (Some(a), Some(b)) if a != b => {
            return Err(CliError::Usage(format!("family given twice: '{a}' and '{b}'")));
        }
        (Some(f), _) | (None, Some(f)) => Some(f.as_str()),
        (None, None) => None,
    };
    let ids: Vec<FamilyId> = match family {
        None | Some("all") => FamilyId::ALL.to_vec(),
        Some(s) => vec![FamilyId::from_slug(s).ok_or_else(|| CliError::Usage(format!("unknown family '{s}'")))?],
    };
    let inline = !args.a.is_empty()
        || args.q.is_some()
        || args.phi.is_some()
        || args.alpha_param.is_some()
        || args.beta_param.is_some();
    if inline && ids.len() > 1 && args.fixture.is_none() {
        return Err(CliError::Usage("inline parameters need a single --family".into()));
    }
    let mut out = Vec::with_capacity(ids.len());
    for id in ids {
        let (fixture, params) = match (&args.fixture, inline) {
            (Some(name), _) => (Some(name.clone()), lookup(fixtures, id, name)?),
            (None, true) => (None, inline_params(args)?),
            (None, false) => (Some("default".to_string()), lookup(fixtures, id, "default")?),
        };
        let system = System::new(id, params.clone())?;
        out.push((SystemRef { family: id, fixture, params }, system));
    }
    Ok(out)
}

fn lookup(fixtures: &Fixtures, id: FamilyId, name: &str) -> Result<ParamSet, CliError> {
    fixtures.get(id, name).map(|f| f.params.clone()).ok_or_else(|| {
        CliError::Fixture(format!("no fixture '{name}' for {id} (available: {})", fixtures.names(id).join(", ")))
    })
}

fn inline_params(args: &SystemArgs) -> Result<ParamSet, CliError> {
    let a = args.a.iter().map(|t| parse_complex(t)).collect::<Result<Vec<_>, _>>()?;
    Ok(ParamSet { a, q: args.q, phi: args.phi, alpha: args.alpha_param, beta: args.beta_param })
}

fn check_n(n: usize) -> Result<(), CliError> {
    if n > DEGREE_CAP {
        return Err(CliError::Usage(format!("n = {n} exceeds the degree cap {DEGREE_CAP}")));
    }
    Ok(())
}

fn complex_json(v: C64) -> Value {
    json!([v.re, v.im])
}

// ---- list ----

fn eta_text(k: EtaKind) -> &'static str {
    match k {
        EtaKind::Linear => "x",
        EtaKind::Quadratic => "x^2",
        EtaKind::Cosine => "cos x",
    }
}

fn interval_text(k: EtaKind) -> &'static str {
    match k {
        EtaKind::Linear => "(-inf, inf)",
        EtaKind::Quadratic => "(0, inf)",
        EtaKind::Cosine => "(0, pi)",
    }
}

fn family_json(f: &FamilySpec) -> Value {
    json!({
        "id": f.slug,
        "name": f.name,
        "tag": f.label,
        "eta": eta_text(f.eta),
        "interval": interval_text(f.eta),
        "params": f.params,
        "n_a": f.n_a,
        "uses_q": f.uses_q,
        "uses_phi": f.uses_phi,
        "uses_alpha": f.uses_alpha,
        "uses_beta": f.uses_beta,
    })
}

pub fn cmd_list(args: &ListArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let output = if args.json { Output::Json } else { args.output };
    match output {
        Output::Json => {
            let v: Vec<Value> = catalog().iter().map(family_json).collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        Output::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["id", "name", "tag", "eta", "interval", "params"])?;
            for f in catalog() {
                w.write_record([f.slug, f.name, f.label, eta_text(f.eta), interval_text(f.eta), f.params])?;
            }
            w.flush()?;
        }
        Output::Human => {
            for f in catalog() {
                let title = format!("{} [{}]", f.name, f.label);
                writeln!(
                    out,
                    "{title:<36} {:<26} eta = {:<6} x in {:<12} {}",
                    f.slug,
                    eta_text(f.eta),
                    interval_text(f.eta),
                    f.params
                )?;
            }
        }
    }
    Ok(())
}

// ---- eval ----

pub fn cmd_eval(args: &EvalArgs, fixtures: &Fixtures, out: &mut dyn Write) -> Result<(), CliError> {
    check_n(args.n)?;
    if !args.x.is_finite() {
        return Err(CliError::Usage("x must be finite".into()));
    }
    let n = args.n;
    let mut records = Vec::new();
    for (r, s) in resolve_systems(&args.system, fixtures)? {
        let pt = s.point(args.x);
        let eta = s.eta(pt);
        let rec = s.recurrence(n).value(n, eta);
        let (hyp, warn) = s.eval_poly_hypergeometric_checked(n, pt)?;
        let phi0 = s.ground_state(args.x);
        records.push(json!({
            "family": r.family,
            "fixture": r.fixture,
            "params": r.params,
            "n": n,
            "x": args.x,
            "eta": complex_json(eta),
            "energy": s.energy(n),
            "p_recurrence": complex_json(rec),
            "p_hypergeometric": complex_json(hyp),
            "discrepancy": (rec - hyp).norm() / (1.0 + rec.norm()),
            "series_warning": warn.map(|w| w.to_string()),
            "phi0": phi0,
            "phi_n": complex_json(rec * phi0),
        }));
    }
    match args.output {
        Output::Json => writeln!(out, "{}", serde_json::to_string_pretty(&records)?)?,
        Output::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record([
                "family",
                "n",
                "x",
                "energy",
                "p_re",
                "p_im",
                "p_hyp_re",
                "p_hyp_im",
                "discrepancy",
                "phi0",
                "phi_n_re",
                "phi_n_im",
            ])?;
            for v in &records {
                let c = |k: &str, i: usize| fmt17(v[k][i].as_f64().unwrap_or(f64::NAN));
                let f = |k: &str| fmt17(v[k].as_f64().unwrap_or(f64::NAN));
                w.write_record([
                    v["family"].as_str().unwrap_or_default().to_string(),
                    n.to_string(),
                    f("x"),
                    f("energy"),
                    c("p_recurrence", 0),
                    c("p_recurrence", 1),
                    c("p_hypergeometric", 0),
                    c("p_hypergeometric", 1),
                    f("discrepancy"),
                    f("phi0"),
                    c("phi_n", 0),
                    c("phi_n", 1),
                ])?;
            }
            w.flush()?;
        }
        Output::Human => {
            for v in &records {
                let c = |k: &str| {
                    format_complex(C64::new(v[k][0].as_f64().unwrap_or(f64::NAN), v[k][1].as_f64().unwrap_or(f64::NAN)))
                };
                writeln!(out, "{} (n = {n}, x = {})", v["family"].as_str().unwrap_or_default(), args.x)?;
                writeln!(out, "  eta            = {}", c("eta"))?;
                writeln!(out, "  E_n            = {}", v["energy"])?;
                writeln!(out, "  P_n recurrence = {}", c("p_recurrence"))?;
                writeln!(out, "  P_n series     = {}", c("p_hypergeometric"))?;
                writeln!(out, "  discrepancy    = {:e}", v["discrepancy"].as_f64().unwrap_or(f64::NAN))?;
                if let Some(w) = v["series_warning"].as_str() {
                    writeln!(out, "  warning        : {w}")?;
                }
                writeln!(out, "  phi_0          = {}", v["phi0"])?;
                writeln!(out, "  phi_n          = {}", c("phi_n"))?;
            }
        }
    }
    Ok(())
}

// ---- table ----

fn table_columns(kind: TableKind) -> &'static [&'static str] {
    match kind {
        TableKind::Spectrum => &["n", "energy"],
        TableKind::Recurrence => &["n", "A", "B", "C", "c", "a_rec", "b_rec", "f", "b"],
        TableKind::Norms => &["n", "h0", "hn_over_h0", "h0_over_hn"],
    }
}

/// Row values; `None` marks an unused entry (`C_0`).
fn table_rows(kind: TableKind, s: &System, n_max: usize) -> Vec<Vec<Option<f64>>> {
    let h0 = if kind == TableKind::Norms { s.h0() } else { 0.0 };
    (0..=n_max)
        .map(|n| {
            let nf = Some(n as f64);
            match kind {
                TableKind::Spectrum => vec![nf, Some(s.energy(n))],
                TableKind::Recurrence => {
                    let c = s.coefficients(n);
                    let big_c = (n > 0).then_some(c.big_c);
                    vec![
                        nf,
                        Some(c.big_a),
                        Some(c.big_b),
                        big_c,
                        Some(c.c),
                        Some(c.a_rec),
                        Some(c.b_rec),
                        Some(c.f),
                        Some(c.b),
                    ]
                }
                TableKind::Norms => {
                    let r = s.coefficients(n).norm_ratio;
                    vec![nf, Some(h0), Some(1.0 / r), Some(r)]
                }
            }
        })
        .collect()
}

pub fn cmd_table(args: &TableArgs, fixtures: &Fixtures, out: &mut dyn Write) -> Result<(), CliError> {
    check_n(args.n_max)?;
    let cols = table_columns(args.kind);
    let systems = resolve_systems(&args.system, fixtures)?;
    match args.output {
        Output::Json => {
            let mut tables = Vec::new();
            for (r, s) in &systems {
                let rows: Vec<Value> = table_rows(args.kind, s, args.n_max)
                    .into_iter()
                    .map(|row| {
                        let mut m = serde_json::Map::new();
                        for (k, v) in cols.iter().zip(row) {
                            let v = match (*k, v) {
                                ("n", Some(n)) => json!(n as usize),
                                (_, v) => json!(v),
                            };
                            m.insert((*k).to_string(), v);
                        }
                        Value::Object(m)
                    })
                    .collect();
                tables.push(json!({"family": r.family, "fixture": r.fixture, "params": r.params, "rows": rows}));
            }
            writeln!(out, "{}", serde_json::to_string_pretty(&tables)?)?;
        }
        Output::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let mut header = vec!["family"];
            header.extend_from_slice(cols);
            w.write_record(&header)?;
            for (r, s) in &systems {
                for row in table_rows(args.kind, s, args.n_max) {
                    let mut rec = vec![r.family.slug().to_string()];
                    rec.push(format!("{}", row[0].unwrap_or(0.0) as usize));
                    rec.extend(row[1..].iter().map(|v| v.map(fmt17).unwrap_or_else(|| "unused".into())));
                    w.write_record(&rec)?;
                }
            }
            w.flush()?;
        }
        Output::Human => {
            for (r, s) in &systems {
                writeln!(out, "{}", r.family.spec().name)?;
                let head: Vec<String> = cols.iter().map(|c| format!("{c:>22}")).collect();
                writeln!(out, "{}", head.join(""))?;
                for row in table_rows(args.kind, s, args.n_max) {
                    let mut line = format!("{:>22}", row[0].unwrap_or(0.0) as usize);
                    for v in &row[1..] {
                        match v {
                            Some(v) => line.push_str(&format!("{v:>22.14e}")),
                            None => line.push_str(&format!("{:>22}", "unused")),
                        }
                    }
                    writeln!(out, "{line}")?;
                }
            }
        }
    }
    Ok(())
}

// ---- verify ----

fn parse_suites(names: &[String]) -> Result<Option<Vec<Suite>>, CliError> {
    if names.is_empty() || names.iter().any(|n| n == "all") {
        return Ok(None);
    }
    let mut out = Vec::new();
    for n in names {
        let s = Suite::from_name(n).ok_or_else(|| {
            let known: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
            CliError::Usage(format!("unknown suite '{n}' (known: all, {})", known.join(", ")))
        })?;
        if !out.contains(&s) {
            out.push(s);
        }
    }
    Ok(Some(out))
}

fn run_system(
    suites: &Option<Vec<Suite>>,
    s: &System,
    cfg: &VerifyConfig,
) -> Result<Vec<CheckResult>, dqm_core::Error> {
    let list = match suites {
        None => return verify::run_all(s, cfg),
        Some(l) => l,
    };
    let mut out = Vec::new();
    for &suite in list {
        out.extend(verify::run_suite(suite, s, cfg)?);
    }
    Ok(out)
}

/// A failed placeholder for a suite that stopped on a numerical error.
fn aborted(r: &SystemRef, e: &dqm_core::Error) -> CheckResult {
    CheckResult {
        check_id: "suite.aborted".into(),
        family: r.family,
        params: r.params.clone(),
        level_range: (0, 0),
        max_residual: f64::MAX,
        tolerance: 0.0,
        passed: false,
        samples_used: 0,
        note: Some(e.to_string()),
        sequence: Vec::new(),
    }
}

pub fn build_report(args: &VerifyArgs, fixtures: &Fixtures) -> Result<Report, CliError> {
    check_n(args.n_max)?;
    if let Some(t) = args.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Usage(format!("--tol must be positive, got {t}")));
        }
    }
    let suites = parse_suites(&args.suite)?;
    let systems = resolve_systems(&args.system, fixtures)?;
    let cfg = VerifyConfig { n_max: args.n_max, seed: args.seed, tol: args.tol, ..VerifyConfig::default() };
    // one worker per system; results are merged in input order
    let outcomes: Vec<Result<Vec<CheckResult>, dqm_core::Error>> = std::thread::scope(|scope| {
        let handles: Vec<_> = systems
            .iter()
            .map(|(_, s)| {
                let (suites, cfg) = (&suites, &cfg);
                scope.spawn(move || run_system(suites, s, cfg))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("verification worker panicked")).collect()
    });
    let mut results = Vec::new();
    for ((r, _), outcome) in systems.iter().zip(outcomes) {
        match outcome {
            Ok(v) => results.extend(v),
            Err(e) if is_input_error(&e) => return Err(CliError::Validation(e)),
            Err(e) => results.push(aborted(r, &e)),
        }
    }
    let suite_names = match &suites {
        None => vec!["all".to_string()],
        Some(l) => l.iter().map(|s| s.name().to_string()).collect(),
    };
    Ok(Report {
        version: REPORT_VERSION,
        config: ReportConfig {
            suites: suite_names,
            systems: systems.into_iter().map(|(r, _)| r).collect(),
            verify: cfg,
        },
        results,
    })
}

pub fn cmd_verify(args: &VerifyArgs, fixtures: &Fixtures, out: &mut dyn Write) -> Result<u8, CliError> {
    let report = build_report(args, fixtures)?;
    if let Some(path) = &args.report {
        std::fs::write(path, report.to_json()? + "\n")?;
    }
    match args.output {
        Output::Json => writeln!(out, "{}", report.to_json()?)?,
        Output::Csv => write_csv(&report, out)?,
        Output::Human => write_human(&report, out)?,
    }
    Ok(if report.passed() { 0 } else { 1 })
}
