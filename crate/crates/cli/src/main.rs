mod args;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;
use tysys_core::acceptance;
use tysys_core::cluster::{
    check_tb, check_yb, correspondence_check, laurent_check, numeric_seed, parity_lemmas, prefers_numeric, run_sequence, symbolic_seed, t_to_y_b,
    ExchangeMatrix, SequenceResult,
};
use tysys_core::exactmath::Scalar;
use tysys_core::io::{parse_cartan, parse_exchange, parse_table, sequence_json, t_relation_json, table_json, y_relation_json, DumpValue};
use tysys_core::period::scan_period;
use tysys_core::report::Report;
use tysys_core::tsystem::{check_t_solution, enumerate_relations, identity_check_1, identity_check_2, propagate_t, random_node_table};
use tysys_core::ysystem::{check_y_solution, enumerate_y_relations, propagate_y, t_to_y, y_to_t};
use tysys_core::{CartanMatrix, SystemKind, ValueTable, Window};

use args::{BeltArgs, CartanCmd, Cli, ClusterCmd, Command, LevelArg, PeriodCmd, SysArgs, SysCmd, VerifyCmd};

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{path}: invalid JSON: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error(transparent)]
    Core(#[from] tysys_core::Error),
    #[error("{0}")]
    Usage(String),
}

type CliResult<T> = Result<T, CliError>;

/// A JSON document and whether every check in it passed.
struct Output {
    body: Value,
    pass: bool,
}

impl Output {
    /// Report fields merged with command-specific extras.
    fn from_report(report: Report, extras: Value) -> Self {
        let pass = report.pass;
        let mut body = match serde_json::to_value(report).expect("report serializes") {
            Value::Object(m) => m,
            _ => unreachable!(),
        };
        if let Value::Object(extra) = extras {
            body.extend(extra);
        }
        Output { body: Value::Object(body), pass }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(out) => {
            // a closed pipe downstream is not an error of ours
            let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(&out.body).expect("output serializes"));
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> CliResult<Output> {
    match command {
        Command::Cartan(CartanCmd::Check { file }) => cartan_check(&file),
        Command::Sys(cmd) => sys(cmd),
        Command::Cluster(ClusterCmd::Run(a)) => cluster_run(&a),
        Command::Cluster(ClusterCmd::Verify(a)) => cluster_verify(&a),
        Command::Cluster(ClusterCmd::Correspond { file, level, steps }) => {
            let cm = read_cartan(&file)?;
            let report = correspondence_check(&cm, level, steps)?;
            Ok(Output::from_report(report, json!({})))
        }
        Command::Period(PeriodCmd::Scan { file, level, m_cap, max_period, seed }) => {
            let cm = read_cartan(&file)?;
            let kind = kind_of(level, m_cap);
            let scan = scan_period(&cm, kind, max_period, &mut rng(seed), Default::default())?;
            let mut report = Report::new();
            if scan.period.is_none() {
                report.fail("period", format!("no period up to {max_period}"));
            }
            let twisted = scan.twisted_period.as_ref().map(|(p, perm)| json!({"shift": p, "permutation": perm.iter().map(|i| i + 1).collect::<Vec<_>>()}));
            let config = json!({"file": file, "level": level, "m_cap": m_cap, "max_period": max_period, "seed": seed});
            Ok(Output::from_report(report.with_config(config), json!({"period": scan.period, "twisted_period": twisted, "slices": scan.slices})))
        }
        Command::Verify(VerifyCmd::All) => {
            let outcomes = acceptance::run_all();
            let mut report = Report::new();
            let mut criteria = Vec::new();
            for o in &outcomes {
                eprintln!("{}", o.line());
                report.record(o.pass, || format!("criterion {}", o.id), || o.detail.clone(), String::new);
                criteria.push(json!({"id": o.id, "title": o.title, "pass": o.pass, "detail": o.detail}));
            }
            Ok(Output::from_report(report.with_config(json!({})), json!({"criteria": criteria})))
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.display().to_string(), source })
}

fn read_cartan(path: &Path) -> CliResult<CartanMatrix> {
    Ok(parse_cartan(&read(path)?)?)
}

fn read_exchange(path: &Path) -> CliResult<ExchangeMatrix> {
    Ok(parse_exchange(&read(path)?)?)
}

/// A table dump, either bare or under the `table` key of a command output.
fn read_table(path: &Path, tag: &str) -> CliResult<ValueTable<num_rational::BigRational>> {
    let v: Value = serde_json::from_str(&read(path)?).map_err(|source| CliError::Json { path: path.display().to_string(), source })?;
    let v = v.get("table").cloned().unwrap_or(v);
    Ok(parse_table(tag, &v)?)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn kind_of(level: LevelArg, m_cap: i64) -> SystemKind {
    match level {
        LevelArg::Level(level) => SystemKind::Restricted { level },
        LevelArg::Unrestricted => SystemKind::Unrestricted { m_cap },
    }
}

fn cartan_check(file: &Path) -> CliResult<Output> {
    let cm = read_cartan(file)?;
    let mut report = Report::new();
    if !cm.is_tamely_laced() {
        report.fail("tamely laced", "some C_ab C_ba exceeds 3 or C_ab C_ba = 3 with d_a = d_b");
    }
    let one_based = |v: Vec<usize>| v.into_iter().map(|i| i + 1).collect::<Vec<_>>();
    let bipartition = cm.bipartition();
    let extras = json!({
        "rank": cm.rank(),
        "d": cm.symmetrizer(),
        "t": cm.t(),
        "t_a": cm.t_all(),
        "simply_laced": cm.is_simply_laced(),
        "connected": cm.is_connected(),
        "bipartite": bipartition.is_some(),
        "plus_nodes": bipartition.as_ref().map(|p| one_based(p.plus_nodes())),
        "minus_nodes": bipartition.as_ref().map(|p| one_based(p.minus_nodes())),
    });
    Ok(Output::from_report(report.with_config(json!({"file": file})), extras))
}

fn window_for(cm: &CartanMatrix, a: &SysArgs) -> Window {
    a.window.unwrap_or_else(|| Window::new(0, 4 * cm.max_d() + 3).expect("nonempty"))
}

fn sys_config(a: &SysArgs, window: Window) -> Value {
    json!({
        "file": a.file,
        "level": a.level,
        "m_cap": a.m_cap,
        "window": [window.k_min, window.k_max],
        "seed": a.seed,
        "retries": a.retries,
        "bits": a.bits,
    })
}

fn sys(cmd: SysCmd) -> CliResult<Output> {
    match cmd {
        SysCmd::GenT(a) => {
            let (cm, kind, window) = setup(&a)?;
            let rels = enumerate_relations(&cm, kind, window)?;
            let dump: Vec<Value> = rels.iter().map(t_relation_json).collect();
            Ok(Output::from_report(Report::new().with_config(sys_config(&a, window)), json!({"count": dump.len(), "relations": dump})))
        }
        SysCmd::GenY(a) => {
            let (cm, kind, window) = setup(&a)?;
            let rels = enumerate_y_relations(&cm, kind, window)?;
            let dump: Vec<Value> = rels.iter().map(y_relation_json).collect();
            Ok(Output::from_report(Report::new().with_config(sys_config(&a, window)), json!({"count": dump.len(), "relations": dump})))
        }
        SysCmd::SolveT(a) => {
            let (cm, kind, window) = setup(&a)?;
            let SystemKind::Restricted { level } = kind else {
                return Err(CliError::Usage("solve-t propagates restricted systems only; pass --level L".into()));
            };
            let t = propagate_t(&cm, level, window, &ValueTable::new(), &mut rng(a.seed), a.policy())?;
            let report = check_t_solution(&t, &enumerate_relations(&cm, kind, window)?)?;
            Ok(Output::from_report(report.with_config(sys_config(&a, window)), json!({"table": table_json("T", &t)})))
        }
        SysCmd::SolveY(a) => {
            let (cm, kind, window) = setup(&a)?;
            let y = propagate_y(&cm, kind, window, &ValueTable::new(), &mut rng(a.seed), a.policy())?;
            let rels: Vec<_> = enumerate_y_relations(&cm, kind, window)?.into_iter().filter(|r| r.variables().all(|v| y.contains(&v))).collect();
            let report = check_y_solution(&y, &rels)?;
            Ok(Output::from_report(report.with_config(sys_config(&a, window)), json!({"table": table_json("Y", &y)})))
        }
        SysCmd::T2y { sys: a, input } => {
            let (cm, kind, _) = setup(&a)?;
            let t = read_table(&input, "T")?;
            let window = t.span().ok_or(tysys_core::Error::EmptyWindow)?;
            let (y, mut report) = t_to_y(&cm, kind, &t)?;
            let rels: Vec<_> = enumerate_y_relations(&cm, kind, window)?.into_iter().filter(|r| r.variables().all(|v| y.contains(&v))).collect();
            report.merge(check_y_solution(&y, &rels)?.labelled("Y-system"));
            let mut config = sys_config(&a, window);
            config["input"] = json!(input);
            Ok(Output::from_report(report.with_config(config), json!({"table": table_json("Y", &y)})))
        }
        SysCmd::Y2t { sys: a, input, free, roundtrip } => {
            let (cm, kind, _) = setup(&a)?;
            if kind.is_restricted() {
                return Err(CliError::Usage("y2t needs an unrestricted system; pass --level unrestricted".into()));
            }
            let y = read_table(&input, "Y")?;
            let window = y.span().ok_or(tysys_core::Error::EmptyWindow)?;
            let rec = y_to_t(&cm, kind, &y, window, free.into(), &mut rng(a.seed), a.policy())?;
            let rels: Vec<_> = enumerate_relations(&cm, kind, window)?.into_iter().filter(|r| r.variables().all(|v| rec.t.contains(&v))).collect();
            let mut report = check_t_solution(&rec.t, &rels)?.labelled("T-system");
            if roundtrip {
                let (back, _) = t_to_y(&cm, kind, &rec.t)?;
                for (v, value) in back.iter() {
                    match y.get(v) {
                        Some(given) => report.record(given == value, || format!("roundtrip at {v}"), || value.render(), || given.render()),
                        None => report.fail(format!("roundtrip at {v}"), "not in the input"),
                    }
                }
            }
            let mut config = sys_config(&a, window);
            config["input"] = json!(input);
            config["free"] = json!(tysys_core::ysystem::FreeChoice::from(free));
            config["roundtrip"] = json!(roundtrip);
            let extras = json!({
                "table": table_json("T", &rec.t),
                "determined": [rec.determined.k_min, rec.determined.k_max],
                "origin": rec.origin,
            });
            Ok(Output::from_report(report.with_config(config), extras))
        }
        SysCmd::Identities(a) => {
            let window = a.window;
            let mut r = rng(a.seed);
            let levels = 1..=3;
            let mut report = Report::new();
            for p in 1..=3 {
                let t = random_node_table(&mut r, 0, 4 * p, window, 3 * p, a.bits);
                let ok = identity_check_1(p, 0, levels.clone(), window, &t)?;
                report.record(ok, || format!("first identity, step {p}"), String::new, String::new);
            }
            for db in 1..=3 {
                let t = random_node_table(&mut r, 0, 6, window, 4, a.bits);
                let ok = identity_check_2(db, 0, levels.clone(), window, &t)?;
                report.record(ok, || format!("second identity, d = {db}"), String::new, String::new);
            }
            let config = json!({"window": [window.k_min, window.k_max], "levels": [1, 3], "seed": a.seed, "bits": a.bits});
            Ok(Output::from_report(report.with_config(config), json!({})))
        }
    }
}

fn setup(a: &SysArgs) -> CliResult<(CartanMatrix, SystemKind, Window)> {
    let cm = read_cartan(&a.file)?;
    let kind = a.kind();
    kind.validate()?;
    let window = window_for(&cm, a);
    Ok((cm, kind, window))
}

fn belt_config(a: &BeltArgs, numeric: bool) -> Value {
    let mut c = json!({"file": a.file, "steps": a.steps, "back": a.back, "mode": if numeric { "numeric" } else { "exact" }});
    if numeric {
        c["samples"] = json!(a.samples);
        c["seed"] = json!(a.seed);
        c["bits"] = json!(a.bits);
    }
    c
}

fn belt_mode(a: &BeltArgs, matrix: &ExchangeMatrix) -> CliResult<bool> {
    if a.steps < 0 || a.back < 0 {
        return Err(CliError::Usage("--steps and --back must be non-negative".into()));
    }
    let auto = !a.numeric && prefers_numeric(matrix, -a.back, a.steps)?;
    if auto {
        eprintln!("warning: exact expressions grow too large over {} steps at rank {}; switching to numeric mode", a.steps + a.back, matrix.size());
    }
    Ok(a.numeric || auto)
}

/// One independent random stream per numeric sample.
fn sample_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = rng(seed);
    r.set_stream(stream);
    r
}

fn cluster_run(a: &BeltArgs) -> CliResult<Output> {
    let matrix = read_exchange(&a.file)?;
    matrix.require_parity()?;
    let numeric = belt_mode(a, &matrix)?;
    let sequence = if numeric {
        let seed = numeric_seed(matrix, &mut sample_rng(a.seed, 0), a.bits);
        sequence_json(&run_sequence(&seed, -a.back, a.steps)?)
    } else {
        sequence_json(&run_sequence(&symbolic_seed(matrix), -a.back, a.steps)?)
    };
    Ok(Output::from_report(Report::new().with_config(belt_config(a, numeric)), json!({"sequence": sequence})))
}

fn belt_checks<X: Scalar + DumpValue, Y: Scalar>(seq: &SequenceResult<X, Y>) -> CliResult<Report> {
    let mut report = parity_lemmas(seq)?.labelled("parity");
    report.merge(check_tb(seq)?.labelled("T(B)"));
    for eps in [1, -1] {
        report.merge(check_yb(seq, eps)?.labelled(&format!("Y(B) {eps:+}")));
        let (_, r) = t_to_y_b(&seq.matrix, &seq.x, eps)?;
        report.merge(r.labelled(&format!("T to Y {eps:+}")));
    }
    Ok(report)
}

fn cluster_verify(a: &BeltArgs) -> CliResult<Output> {
    let matrix = read_exchange(&a.file)?;
    let mut report = Report::new();
    if let Err(e) = matrix.require_belt_conditions() {
        report.fail("belt conditions", e.to_string());
        return Ok(Output::from_report(report.with_config(belt_config(a, a.numeric)), json!({})));
    }
    let numeric = belt_mode(a, &matrix)?;
    if numeric {
        for s in 0..a.samples {
            let seed = numeric_seed(matrix.clone(), &mut sample_rng(a.seed, s as u64), a.bits);
            let seq = run_sequence(&seed, -a.back, a.steps)?;
            report.merge(belt_checks(&seq)?.labelled(&format!("sample {s}")));
        }
    } else {
        let seq = run_sequence(&symbolic_seed(matrix), -a.back, a.steps)?;
        report.merge(belt_checks(&seq)?);
        report.merge(laurent_check(&seq).labelled("Laurent"));
    }
    Ok(Output::from_report(report.with_config(belt_config(a, numeric)), json!({})))
}
