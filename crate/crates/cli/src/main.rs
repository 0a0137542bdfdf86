mod input;
mod report;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mcturan::construct::{FamilyParams, Registry};
use mcturan::fractional::{
    cube_root_triple, density, maximize_density, solve_abg, upper_bound_coeff,
};
use mcturan::gadget::{behrend_q_free, verify_gadget_free, verify_q_free};
use mcturan::graph::SimpleGraph;
use mcturan::lp::lp_fractional_packing;
use mcturan::rainbow::{
    detector_by_name, detector_for, detectors, find_rainbow_with, pentagon_audit,
};
use mcturan::rational::to_f64;
use mcturan::solver::{max_rainbow_free_packing, SearchConfig, DEFAULT_NODE_BUDGET};
use mcturan::Verdict;
use serde_json::{json, Map, Value};

use crate::input::{
    graph_arg, int_list_arg, optional_graph_arg, packing_from_json, range_arg, rational_arg,
    read_input,
};

const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Constructions, certificates and exact search for multicolor Turán numbers.
#[derive(Parser)]
#[command(name = "mcturan", version)]
struct Cli {
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for parallel routines (output does not depend on it)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Reserved; no routine is randomized
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a packing or host graph from a named family
    Construct(ConstructArgs),
    /// Check a packing from stdin (or --input) for a rainbow copy of G
    Verify(VerifyArgs),
    /// Exact maximum rainbow-free packing on n vertices
    Solve(SolveArgs),
    /// Optimize the blow-up weights for cycle length 2k+1
    Optimize(OptimizeArgs),
    /// Build or check q-free and gadget-free integer sets
    Gadget(GadgetArgs),
    /// Fractional packing number by exact linear programming
    Lp(LpArgs),
    /// Long-format CSV of the headline quantities
    Report(ReportArgs),
}

#[derive(Args)]
struct ConstructArgs {
    /// kt, c5blowup, k5 or unbalanced
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    q: Option<u32>,
    /// p/q rational
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    /// List the registered families and exit
    #[arg(long)]
    list: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Forbidden graph
    #[arg(long = "G", default_value = "k3")]
    forbidden: String,
    /// Packing JSON file (default stdin)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Detector strategy; chosen automatically when omitted
    #[arg(long)]
    detector: Option<String>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    n: Option<usize>,
    /// Pattern graph F
    #[arg(long = "F")]
    pattern: String,
    /// Forbidden rainbow graph G, or `none` for plain packing
    #[arg(long = "G", default_value = "k3")]
    forbidden: String,
    /// Restrict copies to this host graph instead of K_n
    #[arg(long)]
    host: Option<String>,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
    /// CSV table over n0..n1
    #[arg(long)]
    sweep: Option<String>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long)]
    k: Option<u32>,
    /// CSV rows over k0..k1
    #[arg(long)]
    sweep: Option<String>,
}

#[derive(Args)]
struct GadgetArgs {
    #[arg(long)]
    n: Option<i64>,
    #[arg(long, default_value_t = 1)]
    q: u32,
    /// Check this comma-separated set instead of building one
    #[arg(long)]
    elements: Option<String>,
    /// With --elements: check (k, h)-gadget freeness instead of q-freeness
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    h: Option<u32>,
}

#[derive(Args)]
struct LpArgs {
    #[arg(long)]
    host: String,
    #[arg(long)]
    pattern: String,
}

#[derive(Args)]
struct ReportArgs {
    /// k range for the density curve
    #[arg(long)]
    densities: Option<String>,
    /// Comma-separated n values for gadget-set sizes
    #[arg(long)]
    gadget_sizes: Option<String>,
    #[arg(long, default_value_t = 1)]
    q: u32,
    /// k range for copy coefficients
    #[arg(long)]
    upper_bounds: Option<String>,
    /// n range for pentagon solver lower bounds
    #[arg(long)]
    solver: Option<String>,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
}

/// Text to emit plus the process exit code.
struct Output {
    body: String,
    code: u8,
}

impl Output {
    fn ok(body: String) -> Self {
        Output { body, code: 0 }
    }
}

fn envelope(command: &[String], verdict: Verdict, fields: Value) -> Value {
    let mut obj = Map::new();
    obj.insert("toolVersion".into(), json!(TOOL_VERSION));
    obj.insert("command".into(), json!(command));
    obj.insert(
        "verdict".into(),
        serde_json::to_value(verdict).expect("verdict"),
    );
    if let Value::Object(extra) = fields {
        obj.extend(extra);
    }
    Value::Object(obj)
}

fn json_line(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("serializable");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn construct(args: &ConstructArgs) -> Result<Output> {
    let registry = Registry::builtin();
    if args.list {
        let mut body = String::new();
        for name in registry.names() {
            let family = registry.get(name).expect("listed");
            body.push_str(&format!("{name}\t{}\n", family.summary()));
        }
        return Ok(Output::ok(body));
    }
    let Some(family) = &args.family else {
        bail!("construct needs --family (see --list)");
    };
    let params = FamilyParams {
        n: args.n,
        t: args.t,
        m: args.m,
        q: args.q,
        alpha: args.alpha.as_deref().map(rational_arg).transpose()?,
        beta: args.beta.as_deref().map(rational_arg).transpose()?,
        gamma: args.gamma.as_deref().map(rational_arg).transpose()?,
    };
    let built = registry.build(family, &params)?;
    Ok(Output::ok(json_line(&serde_json::to_value(&built)?)))
}

fn verify(args: &VerifyArgs, command: &[String]) -> Result<Output> {
    let forbidden = graph_arg(&args.forbidden)?;
    let packing = packing_from_json(&read_input(args.input.as_deref())?)?;
    let detector = match &args.detector {
        Some(name) => detector_by_name(name).with_context(|| {
            let known: Vec<_> = detectors().iter().map(|d| d.name()).collect();
            format!("unknown detector {name:?} (known: {})", known.join(", "))
        })?,
        None => detector_for(&forbidden),
    };
    if !detector.applies_to(&forbidden) {
        bail!(
            "detector {} does not handle this forbidden graph",
            detector.name()
        );
    }
    let witness = find_rainbow_with(detector, &packing, &forbidden)?;
    let mut fields = Map::new();
    fields.insert("detector".into(), json!(detector.name()));
    let verdict = match &witness {
        Some(w) => {
            fields.insert("witness".into(), serde_json::to_value(w)?);
            fields.insert("packing".into(), serde_json::to_value(&packing)?);
            Verdict::Fail
        }
        None => {
            let pentagons = packing.pattern().is_cycle() && packing.pattern().n() == 5;
            if pentagons && forbidden == SimpleGraph::complete(3) {
                fields.insert(
                    "audit".into(),
                    serde_json::to_value(pentagon_audit(&packing)?)?,
                );
            }
            Verdict::Pass
        }
    };
    let body = json_line(&envelope(command, verdict, Value::Object(fields)));
    Ok(Output {
        body,
        code: if verdict == Verdict::Fail { 2 } else { 0 },
    })
}

fn solve(args: &SolveArgs, threads: usize, command: &[String]) -> Result<Output> {
    let pattern = graph_arg(&args.pattern)?;
    let forbidden = optional_graph_arg(&args.forbidden)?;
    let host = args.host.as_deref().map(graph_arg).transpose()?;
    let config = |n: usize| {
        let mut cfg = SearchConfig::new(n, pattern.clone(), forbidden.clone())
            .with_budget(args.budget)
            .with_threads(threads);
        if let Some(h) = &host {
            cfg = cfg.with_host(h.clone());
        }
        cfg
    };
    if let Some(sweep) = &args.sweep {
        if host.is_some() {
            bail!("--sweep and --host cannot be combined");
        }
        let mut rows = Vec::new();
        for n in range_arg(sweep)? {
            let start = Instant::now();
            let out = max_rainbow_free_packing(&config(n as usize))?;
            let millis = start.elapsed().as_millis();
            rows.push(vec![
                n.to_string(),
                out.value.to_string(),
                out.optimal.to_string(),
                out.nodes.to_string(),
                millis.to_string(),
            ]);
        }
        return Ok(Output::ok(csv_text(
            &["n", "value", "optimal", "nodes", "millis"],
            rows,
        )?));
    }
    let n = match (args.n, &host) {
        (Some(n), _) => n,
        (None, Some(h)) => h.n(),
        (None, None) => bail!("solve needs --n, --host or --sweep"),
    };
    let out = max_rainbow_free_packing(&config(n))?;
    let verdict = if out.optimal {
        Verdict::Pass
    } else {
        Verdict::LowerBound
    };
    let body = json_line(&envelope(command, verdict, serde_json::to_value(&out)?));
    Ok(Output::ok(body))
}

fn optimize(args: &OptimizeArgs) -> Result<Output> {
    let ks = match (&args.sweep, args.k) {
        (Some(s), _) => range_arg(s)?,
        (None, Some(k)) => k as u64..=k as u64,
        (None, None) => bail!("optimize needs --k or --sweep"),
    };
    let mut rows = Vec::new();
    for k in ks {
        let k = k as u32;
        let opt = maximize_density(k)?;
        let fr = solve_abg(&opt.triple)?;
        let cube_root = if k >= 3 {
            density(&cube_root_triple(k)?)?.to_string()
        } else {
            String::new()
        };
        let w = &opt.triple;
        rows.push(vec![
            k.to_string(),
            w.lambda.to_string(),
            w.mu.to_string(),
            w.delta.to_string(),
            fr.alpha.to_string(),
            fr.beta.to_string(),
            fr.gamma.to_string(),
            opt.value.to_string(),
            cube_root,
            to_f64(&upper_bound_coeff(k)?).to_string(),
        ]);
    }
    let header = [
        "k",
        "lambda",
        "mu",
        "delta",
        "alpha",
        "beta",
        "gamma",
        "density",
        "paperTripleDensity",
        "upperBoundCoeff",
    ];
    Ok(Output::ok(csv_text(&header, rows)?))
}

fn gadget(args: &GadgetArgs, command: &[String]) -> Result<Output> {
    if let Some(list) = &args.elements {
        let elements = int_list_arg(list)?;
        let (verdict, witness) = match (args.k, args.h) {
            (Some(k), h) => {
                let v = verify_gadget_free(&elements, k, h.unwrap_or(args.q))?;
                (v.verdict, v.witness.map(serde_json::to_value).transpose()?)
            }
            (None, Some(_)) => bail!("--h needs --k"),
            (None, None) => {
                let v = verify_q_free(&elements, args.q);
                (v.verdict, v.witness.map(serde_json::to_value).transpose()?)
            }
        };
        let mut fields = json!({ "q": args.q, "elements": elements });
        if let Some(w) = witness {
            fields["witness"] = w;
        }
        let code = if verdict == Verdict::Fail { 2 } else { 0 };
        return Ok(Output {
            body: json_line(&envelope(command, verdict, fields)),
            code,
        });
    }
    let Some(n) = args.n else {
        bail!("gadget needs --n or --elements");
    };
    let set = behrend_q_free(n, args.q)?;
    let certified = verify_q_free(set.elements(), args.q).passed();
    let body = json!({
        "n": n,
        "q": args.q,
        "size": set.len(),
        "elements": set.elements(),
        "certified": certified,
    });
    Ok(Output::ok(json_line(&body)))
}

fn lp(args: &LpArgs, command: &[String]) -> Result<Output> {
    let host = graph_arg(&args.host)?;
    let pattern = graph_arg(&args.pattern)?;
    let sol = lp_fractional_packing(&host, &pattern)?;
    let verdict = if sol.certify(&host, &pattern) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(Output::ok(json_line(&envelope(
        command,
        verdict,
        serde_json::to_value(&sol)?,
    ))))
}

fn run_report(args: &ReportArgs, threads: usize) -> Result<Output> {
    let any = args.densities.is_some()
        || args.gadget_sizes.is_some()
        || args.upper_bounds.is_some()
        || args.solver.is_some();
    let or_default = |given: &Option<String>, fallback: &str| -> Option<String> {
        match given {
            Some(s) => Some(s.clone()),
            None if !any => Some(fallback.to_string()),
            None => None,
        }
    };
    let plan = report::ReportPlan {
        densities: or_default(&args.densities, "3..10")
            .as_deref()
            .map(range_arg)
            .transpose()?,
        gadget_sizes: or_default(&args.gadget_sizes, "100,1000,10000")
            .as_deref()
            .map(int_list_arg)
            .transpose()?,
        q: args.q,
        upper_bounds: or_default(&args.upper_bounds, "2..6")
            .as_deref()
            .map(range_arg)
            .transpose()?,
        solver: or_default(&args.solver, "5..7")
            .as_deref()
            .map(range_arg)
            .transpose()?,
        budget: args.budget,
        threads,
    };
    let rows = report::build(&plan)?
        .into_iter()
        .map(|r| {
            vec![
                r.table.to_string(),
                r.parameter,
                r.metric.to_string(),
                r.value,
            ]
        })
        .collect();
    Ok(Output::ok(csv_text(
        &["table", "parameter", "metric", "value"],
        rows,
    )?))
}

fn run(cli: &Cli, command: &[String]) -> Result<Output> {
    if let Some(t) = cli.threads {
        if t == 0 {
            bail!("--threads must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let threads = cli.threads.unwrap_or_else(rayon::current_num_threads);
    match &cli.command {
        Command::Construct(a) => construct(a),
        Command::Verify(a) => verify(a, command),
        Command::Solve(a) => solve(a, threads, command),
        Command::Optimize(a) => optimize(a),
        Command::Gadget(a) => gadget(a, command),
        Command::Lp(a) => lp(a, command),
        Command::Report(a) => run_report(a, threads),
    }
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let command: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli, &command).and_then(|o| emit(&cli.out, &o.body).map(|_| o.code)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
