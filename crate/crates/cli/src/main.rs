use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use percolab::couple::{minimal_m_s, CouplingParams};
use percolab::cover::{builtin_pair, CoverPair};
use percolab::enhance::exact::{rational, to_f64, ExactModel};
use percolab::enhance::ModelParams;
use percolab::graph::{ball, sphere, FiniteGraph, GraphRef, GraphSpec, DEFAULT_BALL_CAP};
use percolab::harness::{
    couple_verify_campaign, pc_bisect, strict_gap_experiment, sweep, theta_mc, write_outputs, CsvRow, Estimate, GapBudget, HSide, PcConfig, Statistic,
};
use percolab::pivotal::{surgery_campaign, Event};
use serde_json::{json, Value};

/// Standard errors allowed for Monte Carlo agreement.
const Z: f64 = 3.0;

#[derive(Parser)]
#[command(name = "percolab", version, about = "Percolation experiments on graphs and their quotients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the quotient of a graph by a group action and check the covering map.
    QuotientBuild(CoverArgs),
    /// Check freeness, the weak covering property, the tame radius and pattern sets.
    VerifyCover(CoverArgs),
    /// Estimate θ_L on a grid of (p, s, L).
    Sweep(SweepArgs),
    /// Bracket p_c by bisection over a schedule of sizes.
    PcEstimate(PcArgs),
    /// Run the exploration coupling and audit every transcript.
    CoupleVerify(CoupleArgs),
    /// Compare Monte Carlo θ_L with exact enumeration on a finite graph.
    OracleCheck(OracleArgs),
    /// Sample pivotal edges and verify the surgery witnesses.
    SurgeryTest(SurgeryArgs),
    /// Compare p_c of a graph and of its quotient.
    Gap(GapArgs),
}

#[derive(Args)]
struct Run {
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; 0 uses all cores. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Directory receiving results.csv and summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CoverArgs {
    /// Graph descriptor such as `hypercubic(2)`, or a built-in pair name when `--action` is absent.
    #[arg(long)]
    graph: String,
    /// Action descriptor such as `translate(0,3)`.
    #[arg(long)]
    action: Option<String>,
    /// Radius of the checks.
    #[arg(long, default_value_t = 4)]
    r: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    graph: String,
    #[arg(long, value_delimiter = ',', required = true)]
    p: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    s: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    r: usize,
    #[arg(long = "L", value_delimiter = ',', required = true)]
    l: Vec<usize>,
    #[command(flatten)]
    run: Run,
}

#[derive(Args)]
struct PcArgs {
    #[arg(long)]
    graph: String,
    #[arg(long, default_value_t = 0.0)]
    s: f64,
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Schedule of sizes; the bracket at the largest size is the estimate.
    #[arg(long = "L", value_delimiter = ',', default_value = "8,16")]
    l: Vec<usize>,
    #[arg(long, default_value_t = 0.01)]
    tol: f64,
    /// Bisect on `θ_L − t` instead of the log-curvature of θ over L, 2L, 4L.
    #[arg(long)]
    threshold: Option<f64>,
    #[command(flatten)]
    run: Run,
}

#[derive(Args)]
struct CoupleArgs {
    #[arg(long)]
    graph: String,
    #[arg(long)]
    action: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Mark probability; defaults to the largest value allowed by the display conditions.
    #[arg(long)]
    s: Option<f64>,
    /// Lower bound ε ≤ p used to choose M and s; defaults to p.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Exploration horizon on the quotient.
    #[arg(long = "L", default_value_t = 5)]
    l: usize,
    /// Radius around o' of the tracked edges of the cover.
    #[arg(long, default_value_t = 2)]
    g_radius: usize,
    #[command(flatten)]
    run: Run,
}

#[derive(Args)]
struct OracleArgs {
    /// A finite graph such as `cycle(5)` or `path(4)`.
    #[arg(long)]
    graph: String,
    #[arg(long, value_delimiter = ',', required = true)]
    p: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    s: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    r: usize,
    #[arg(long = "L", required = true)]
    l: usize,
    #[command(flatten)]
    run: Run,
}

#[derive(Args)]
struct SurgeryArgs {
    #[arg(long)]
    graph: String,
    /// `arm` for E_L, `connect` for {o} ⇝ one vertex of S_{3r+1}(o).
    #[arg(long, default_value = "arm")]
    event: String,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 0.3)]
    s: f64,
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Defaults to 2r+2 for arm and 6r+2 for connect.
    #[arg(long = "L")]
    l: Option<usize>,
    #[command(flatten)]
    run: Run,
}

#[derive(Args)]
struct GapArgs {
    #[arg(long)]
    graph: String,
    #[arg(long)]
    action: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    s: f64,
    #[arg(long, default_value_t = 1)]
    r: usize,
    #[arg(long = "L", value_delimiter = ',', default_value = "8,16")]
    l: Vec<usize>,
    /// Sizes at which θ_L is estimated on a quotient of linear growth.
    #[arg(long, value_delimiter = ',', default_value = "40,50,60,80")]
    decay_l: Vec<usize>,
    #[arg(long, default_value_t = 0.1)]
    decay_offset: f64,
    /// θ_L on a quotient of linear growth must stay below this value.
    #[arg(long, default_value_t = 0.05)]
    decay_bound: f64,
    #[command(flatten)]
    run: Run,
}

/// What a subcommand produced.
struct Report {
    pass: bool,
    rows: Vec<CsvRow>,
    summary: Value,
}

fn graph(spec: &str) -> Result<GraphRef> {
    let spec: GraphSpec = spec.parse().with_context(|| format!("invalid graph descriptor {spec:?}"))?;
    Ok(spec.build()?)
}

fn pair(graph: &str, action: Option<&str>) -> Result<CoverPair> {
    Ok(match action {
        Some(a) => CoverPair::custom(graph, a),
        None => builtin_pair(graph)?.clone(),
    })
}

fn quotient_build(a: &CoverArgs) -> Result<Report> {
    let (g, h, map) = pair(&a.graph, a.action.as_deref())?.build()?;
    let weak = map.is_weak_covering(a.r)?;
    let strong = map.is_strong_covering(a.r)?;
    let summary = json!({
        "graph": g.name(),
        "quotient": h.name(),
        "degree_bound": [g.degree_bound(), h.degree_bound()],
        "ball_sizes": [
            ball(g.as_ref(), &g.root(), a.r, DEFAULT_BALL_CAP)?.len(),
            ball(h.as_ref(), &h.root(), a.r, DEFAULT_BALL_CAP)?.len(),
        ],
        "finite_quotient": h.is_finite(),
        "weak_covering": weak.line(),
        "strong_covering": strong.line(),
    });
    Ok(Report { pass: weak.passed(), rows: Vec::new(), summary })
}

fn verify_cover(a: &CoverArgs) -> Result<Report> {
    let (g, _, map) = pair(&a.graph, a.action.as_deref())?.build()?;
    let mut checks = serde_json::Map::new();
    let mut pass = true;
    let mut record = |name: &str, ok: bool, detail: String| {
        pass &= ok;
        checks.insert(name.to_string(), json!({ "pass": ok, "detail": detail }));
    };
    if let Some(action) = map.action() {
        let auto = action.check_automorphisms(g.as_ref(), a.r);
        record("automorphisms", auto.is_ok(), auto.err().map(|e| e.to_string()).unwrap_or_default());
        let free = action.check_free(g.as_ref(), a.r, 4);
        record("free", free.is_ok(), free.err().map(|e| e.to_string()).unwrap_or_default());
    }
    let weak = map.is_weak_covering(a.r)?;
    record(weak.property, weak.passed(), weak.line());
    let cap = 4 * a.r + 8;
    match map.tame_radius(a.r, cap) {
        Ok(t) => record("tame_radius", true, t.to_string()),
        Err(e) => record("tame_radius", false, e.to_string()),
    }
    match map.choose_r(a.r, cap) {
        Ok(r) => record("choose_r", true, r.to_string()),
        Err(e) => record("choose_r", false, e.to_string()),
    }
    // Quotients with short fibre loops are weak but not strong coverings.
    let strong = map.is_strong_covering(a.r)?;
    checks.insert(strong.property.to_string(), json!({ "holds": strong.passed(), "detail": strong.line() }));
    Ok(Report { pass, rows: Vec::new(), summary: json!({ "pair": map.source().name() + " -> " + &map.target().name(), "checks": checks }) })
}

fn root_set(g: &GraphRef) -> BTreeSet<percolab::graph::Vertex> {
    BTreeSet::from([g.root()])
}

fn run_sweep(a: &SweepArgs) -> Result<Report> {
    let g = graph(&a.graph)?;
    let res = sweep(&g, &root_set(&g), a.r, &a.p, &a.s, &a.l, a.run.samples, a.run.seed, a.run.workers)?;
    let violations = res.trend_violations(Z);
    let summary = json!({ "graph": res.graph, "r": res.r, "points": res.rows.len(), "trend_violations": violations });
    Ok(Report { pass: violations.is_empty(), rows: res.csv_rows(), summary })
}

fn pc_estimate(a: &PcArgs) -> Result<Report> {
    let g = graph(&a.graph)?;
    let mut cfg = PcConfig::new(a.l.clone(), a.run.samples, a.run.seed);
    cfg.r = a.r;
    cfg.s = a.s;
    cfg.tol = a.tol;
    cfg.workers = a.run.workers;
    if let Some(t) = a.threshold {
        cfg.statistic = Statistic::Threshold(t);
    }
    let est = pc_bisect(&g, &cfg)?;
    let mut rows = Vec::new();
    for level in &est.levels {
        for pt in &level.points {
            rows.push(CsvRow::new(pt.p, a.s, pt.l, &pt.thetas[0]));
        }
    }
    let (lo, hi) = est.interval();
    let pass = est.levels.iter().all(|l| l.resolved);
    let summary = json!({ "interval": [lo, hi], "width": hi - lo, "drift": est.drift(), "estimate": est });
    Ok(Report { pass, rows, summary })
}

fn couple_verify(a: &CoupleArgs) -> Result<Report> {
    let pair = pair(&a.graph, a.action.as_deref())?;
    let (_, _, map) = pair.build()?;
    let eps = a.epsilon.unwrap_or(a.p);
    let (m, s_max) = minimal_m_s(&map, a.r, eps, 3)?;
    let s = a.s.unwrap_or(s_max);
    if s > s_max {
        bail!("s = {s} exceeds the largest admissible value {s_max:e} for M = {m}");
    }
    let params = CouplingParams::new(a.p, eps, a.r, m, s, a.l)?;
    let sum = couple_verify_campaign(&pair.name, &map, &map.source().root(), &params, a.g_radius, a.run.samples, a.run.seed, a.run.workers)?;
    let rows = sum
        .omega
        .iter()
        .chain(&sum.eta)
        .map(|t| CsvRow::new(a.p, s, a.l, &Estimate::from_hits(t.ones, t.trials, a.run.seed, sum.wall_time)))
        .collect();
    let pass = sum.sound() && sum.max_z() <= Z && sum.chi_square_p.is_none_or(|p| p > 1e-3);
    Ok(Report { pass, rows, summary: serde_json::to_value(&sum)? })
}

fn oracle_check(a: &OracleArgs) -> Result<Report> {
    let g = graph(&a.graph)?;
    let verts = g.vertices().with_context(|| format!("{} is not a finite graph", g.name()))?;
    let (fg, _) = FiniteGraph::from_subgraph("oracle", g.as_ref(), &g.root(), &verts)?;
    let marks: Vec<usize> = (0..fg.len()).collect();
    let model = ExactModel::from_graph(&fg, &marks, &[0], a.r)?;
    let target = model.sphere_mask(0, a.l);
    let mut rows = Vec::new();
    let mut cases = Vec::new();
    let mut pass = true;
    for &p in &a.p {
        for &s in &a.s {
            let exact = to_f64(&model.probability(target, &rational(p), &rational(s)));
            let est = theta_mc(&g, &root_set(&g), &ModelParams::new(p, s, a.r, a.l)?, a.run.samples, a.run.seed, a.run.workers)?;
            let ok = est.agrees(exact, Z);
            pass &= ok;
            cases.push(json!({ "p": p, "s": s, "exact": exact, "estimate": est.value, "stderr": est.stderr, "agrees": ok }));
            rows.push(CsvRow::new(p, s, a.l, &est));
        }
    }
    Ok(Report { pass, rows, summary: json!({ "graph": g.name(), "r": a.r, "L": a.l, "cases": cases }) })
}

fn surgery_test(a: &SurgeryArgs) -> Result<Report> {
    let g = graph(&a.graph)?;
    let o = g.root();
    let event = match a.event.as_str() {
        "arm" => Event::arm(o, a.l.unwrap_or(2 * a.r + 2)),
        "connect" => {
            let b = sphere(g.as_ref(), &o, 3 * a.r + 1, DEFAULT_BALL_CAP)?.into_iter().next().context("the sphere S_{3r+1}(o) is empty")?;
            Event::connect(o.clone(), a.l.unwrap_or(6 * a.r + 2), BTreeSet::from([o]), BTreeSet::from([b]))
        }
        other => bail!("unknown event {other:?}; expected arm or connect"),
    };
    let rep = surgery_campaign(g.as_ref(), &event, a.r, a.p, a.s, a.run.samples as usize, a.run.seed)?;
    let summary = json!({
        "graph": g.name(),
        "event": event.to_string(),
        "instances": rep.instances,
        "attempts": rep.attempts,
        "strip": rep.strip,
        "case_a": rep.case_a,
        "case_b": rep.case_b,
        "failure_count": rep.failure_count,
        "failures": rep.failures,
    });
    Ok(Report { pass: rep.passed(), rows: Vec::new(), summary })
}

fn gap(a: &GapArgs) -> Result<Report> {
    let pair = pair(&a.graph, a.action.as_deref())?;
    let mut pc = PcConfig::new(a.l.clone(), a.run.samples, a.run.seed);
    pc.r = a.r;
    pc.s = a.s;
    pc.workers = a.run.workers;
    let budget = GapBudget { pc, decay_ls: a.decay_l.clone(), decay_samples: a.run.samples, decay_offset: a.decay_offset };
    let rep = strict_gap_experiment(&pair, &budget)?;
    let mut rows = Vec::new();
    let pass = match &rep.h {
        None => false,
        Some(HSide::Interval(_)) => rep.gap.is_some_and(|g| g > 0.0),
        Some(HSide::Decay { p, thetas, .. }) => {
            rows.extend(thetas.iter().map(|(l, e)| CsvRow::new(*p, a.s, *l, e)));
            thetas.iter().all(|(_, e)| e.value + Z * e.stderr < a.decay_bound)
        }
    };
    Ok(Report { pass, rows, summary: serde_json::to_value(&rep)? })
}

fn run(cli: &Cli) -> Result<(Report, Option<&PathBuf>)> {
    Ok(match &cli.command {
        Command::QuotientBuild(a) => (quotient_build(a)?, a.out.as_ref()),
        Command::VerifyCover(a) => (verify_cover(a)?, a.out.as_ref()),
        Command::Sweep(a) => (run_sweep(a)?, a.run.out.as_ref()),
        Command::PcEstimate(a) => (pc_estimate(a)?, a.run.out.as_ref()),
        Command::CoupleVerify(a) => (couple_verify(a)?, a.run.out.as_ref()),
        Command::OracleCheck(a) => (oracle_check(a)?, a.run.out.as_ref()),
        Command::SurgeryTest(a) => (surgery_test(a)?, a.run.out.as_ref()),
        Command::Gap(a) => (gap(a)?, a.run.out.as_ref()),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|(report, out)| {
        let summary = json!({ "pass": report.pass, "result": report.summary });
        if let Some(dir) = out {
            write_outputs(dir, &report.rows, &summary)?;
        }
        println!("{}", serde_json::to_string_pretty(&summary)?);
        Ok(report.pass)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
