use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};

use stflow::channels::{self, ChannelError, DEFAULT_CHARGE_BOUND};
use stflow::classify::{self, ClassificationReport, Decision, EdgeWeakView, WheatstoneView};
use stflow::dot::{self, Highlight};
use stflow::flownets::{self, EdgeWeakWitness, EdgeWeakness, FlowError, DEFAULT_EXHAUSTIVE_BOUND};
use stflow::format::{GraphFile, LoadedGraph, PerEdge};
use stflow::separators::{self, Weakness};
use stflow::sweep::{self, SweepOptions};
use stflow::traffic::{self, TrafficError, Vulnerability, WardropOptions, DEFAULT_TOLERANCE};
use stflow::ttsp::{self, SpTree, TtspError, TtspResult, WheatstoneWitness};
use stflow::{DirectedStGraph, OffPathPolicy, Vertex};

#[derive(Parser)]
#[command(
    name = "stflow",
    version,
    about = "Weakness, edge-weakness and vulnerability of directed st-graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Also print witnesses (flows, decompositions, highlighted DOT).
    #[arg(long, global = true)]
    witness: bool,
    /// With `weakness`: print the complete mvs chain.
    #[arg(long, global = true)]
    chain: bool,
    /// Drop vertices on no source-to-sink walk instead of rejecting the file.
    #[arg(long, global = true)]
    prune: bool,
    /// Largest cyclic graph searched exhaustively for edge-weakness.
    #[arg(long, global = true, default_value_t = DEFAULT_EXHAUSTIVE_BOUND)]
    bound: usize,
    /// Wardrop convergence tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    /// Seed for the random part of `sweep`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Decide all three properties for one or more graph files.
    Classify {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Decide weakness and print a critical mvs.
    Weakness { file: PathBuf },
    /// Decide edge-weakness and print a cut witness.
    EdgeWeakness {
        file: PathBuf,
        /// Print the input with capacities under which some saturating flow is
        /// not maximum.
        #[arg(long)]
        witness_capacities: bool,
    },
    /// Decide vulnerability (Braess's paradox).
    Vulnerability { file: PathBuf },
    /// Series-parallel recognition of an acyclic graph.
    Ttsp { file: PathBuf },
    /// Search for a subdivision of the Wheatstone graph.
    Wheatstone {
        file: PathBuf,
        /// Print the witness as DOT.
        #[arg(long)]
        dot: bool,
    },
    /// Maximum flow of a depletable channel (needs `charges`).
    ChannelMax { file: PathBuf },
    /// Minimum inhibiting flow of a depletable channel (needs `charges`).
    ChannelMinInhibit {
        file: PathBuf,
        /// Refuse instances whose total finite charge exceeds this.
        #[arg(long, default_value_t = DEFAULT_CHARGE_BOUND)]
        max_charge: u64,
    },
    /// Maximum flow of a capacitated network (needs `capacities`).
    FlowMax { file: PathBuf },
    /// Wardrop equilibrium (needs `latencies` and `demand`).
    Wardrop { file: PathBuf },
    /// Build a Braess instance on a Wheatstone subdivision and solve it with
    /// and without the bridge.
    BraessDemo { file: PathBuf },
    /// Compare every decider against its brute-force oracle.
    Sweep {
        /// Largest random graph; exhaustive enumeration stops at 5.
        #[arg(long, default_value_t = 7)]
        max_n: usize,
        /// Number of random graphs.
        #[arg(long, default_value_t = 10_000)]
        seeds: u64,
    },
    /// Print the graph as DOT.
    ExportDot { file: PathBuf },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Bound(String),
    Inconsistent(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Bound(_) => 2,
            Failure::Inconsistent(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Bound(m) | Failure::Inconsistent(m) => m,
        }
    }
}

impl From<TtspError> for Failure {
    fn from(e: TtspError) -> Self {
        match e {
            TtspError::SearchLimit(_) => Failure::Bound(e.to_string()),
            TtspError::Cyclic => Failure::Usage(e.to_string()),
        }
    }
}

impl From<ChannelError> for Failure {
    fn from(e: ChannelError) -> Self {
        match e {
            ChannelError::TooLarge { .. } => Failure::Bound(e.to_string()),
            e => Failure::Usage(e.to_string()),
        }
    }
}

impl From<TrafficError> for Failure {
    fn from(e: TrafficError) -> Self {
        match e {
            TrafficError::TooManyPaths { .. } | TrafficError::NotConverged { .. } => {
                Failure::Bound(e.to_string())
            }
            e => Failure::Usage(e.to_string()),
        }
    }
}

impl From<FlowError> for Failure {
    fn from(e: FlowError) -> Self {
        match e {
            FlowError::BoundExceeded { .. } => Failure::Bound(e.to_string()),
            e => Failure::Usage(e.to_string()),
        }
    }
}

/// What a command prints, and the exit code for a run that completed.
struct Output {
    text: String,
    json: Value,
    code: u8,
}

impl Output {
    fn new(text: String, json: Value) -> Self {
        Output {
            text,
            json,
            code: 0,
        }
    }
}

fn load(path: &Path, cli: &Cli) -> Result<LoadedGraph, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let policy = match cli.prune {
        true => OffPathPolicy::Prune,
        false => OffPathPolicy::Reject,
    };
    LoadedGraph::parse(&text, policy)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn set(g: &DirectedStGraph, vs: impl IntoIterator<Item = Vertex>) -> String {
    let names: Vec<&str> = vs.into_iter().map(|v| g.name(v)).collect();
    format!("{{{}}}", names.join(", "))
}

fn walk(g: &DirectedStGraph, vs: &[Vertex]) -> String {
    let names: Vec<&str> = vs.iter().map(|&v| g.name(v)).collect();
    names.join(" -> ")
}

fn names_of(g: &DirectedStGraph, vs: &[Vertex]) -> Vec<String> {
    vs.iter().map(|&v| g.name(v).to_string()).collect()
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn wheatstone_text(g: &DirectedStGraph, w: &WheatstoneWitness) -> String {
    let mut out = String::new();
    let rows = [
        ("s ~> s'", &w.stem_in),
        ("s' ~> u", &w.s_to_u),
        ("s' ~> v", &w.s_to_v),
        ("u ~> v", &w.u_to_v),
        ("u ~> t'", &w.u_to_t),
        ("v ~> t'", &w.v_to_t),
        ("t' ~> t", &w.stem_out),
    ];
    for (label, path) in rows {
        writeln!(out, "  {label:8} {}", walk(g, path)).unwrap();
    }
    out
}

fn decision_text<W>(d: &Decision<W>) -> String {
    match d {
        Decision::Yes { .. } => "yes".to_string(),
        Decision::No => "no".to_string(),
        Decision::Undecided { reason } => format!("undecided ({reason})"),
    }
}

fn report_text(r: &ClassificationReport, witness: bool) -> String {
    let mut out = String::new();
    let kind = if r.acyclic { "acyclic" } else { "cyclic" };
    writeln!(out, "  {} vertices, {} edges, {kind}", r.vertices, r.edges).unwrap();
    writeln!(out, "  weak: {}", decision_text(&r.weak)).unwrap();
    if let (true, Decision::Yes { witness }) = (witness, &r.weak) {
        writeln!(
            out,
            "    critical mvs {{{}}}, walk {}",
            witness.mvs.join(", "),
            witness.walk.join(" -> ")
        )
        .unwrap();
    }
    writeln!(out, "  edge-weak: {}", decision_text(&r.edge_weak)).unwrap();
    if let (true, Decision::Yes { witness }) = (witness, &r.edge_weak) {
        match witness {
            EdgeWeakView::Cut {
                source_side,
                sink_side,
                first,
                second,
            } => writeln!(
                out,
                "    cut ({{{}}}, {{{}}}) crossed by {} -> {} and {} -> {}",
                source_side.join(", "),
                sink_side.join(", "),
                first[0],
                first[1],
                second[0],
                second[1]
            )
            .unwrap(),
            EdgeWeakView::Wheatstone(w) => writeln!(
                out,
                "    Wheatstone subdivision on s'={}, u={}, v={}, t'={}",
                w.s_prime, w.u, w.v, w.t_prime
            )
            .unwrap(),
        }
    }
    writeln!(out, "  vulnerable: {}", decision_text(&r.vulnerable)).unwrap();
    if let (true, Decision::Yes { witness }) = (witness, &r.vulnerable) {
        let WheatstoneView {
            s_prime,
            u,
            v,
            t_prime,
            ..
        } = witness;
        writeln!(
            out,
            "    Wheatstone subdivision on s'={s_prime}, u={u}, v={v}, t'={t_prime}"
        )
        .unwrap();
    }
    if let Some(ttsp) = r.ttsp {
        writeln!(out, "  ttsp: {}", yes_no(ttsp)).unwrap();
    }
    for v in &r.violations {
        writeln!(out, "  INCONSISTENT: {v}").unwrap();
    }
    out
}

fn classify_files(files: &[PathBuf], cli: &Cli) -> Output {
    let results: Vec<(&PathBuf, Result<ClassificationReport, Failure>)> = files
        .par_iter()
        .map(|f| {
            (
                f,
                load(f, cli).map(|l| classify::classify(&l.graph, cli.bound)),
            )
        })
        .collect();
    let (mut text, mut entries) = (String::new(), Vec::new());
    let (mut inconsistent, mut failed, mut undecided) = (false, false, false);
    for (file, result) in results {
        let name = file.display().to_string();
        match result {
            Ok(report) => {
                inconsistent |= !report.is_consistent();
                undecided |= [
                    report.weak.holds(),
                    report.edge_weak.holds(),
                    report.vulnerable.holds(),
                ]
                .contains(&None);
                writeln!(text, "{name}\n{}", report_text(&report, cli.witness)).unwrap();
                entries.push(json!({"file": name, "report": report}));
            }
            Err(e) => {
                failed = true;
                writeln!(text, "{name}\n  error: {}\n", e.message()).unwrap();
                entries.push(json!({"file": name, "error": e.message()}));
            }
        }
    }
    let mut out = Output::new(text.trim_end().to_string() + "\n", Value::Array(entries));
    out.code = match (inconsistent, failed, undecided) {
        (true, _, _) => 3,
        (_, true, _) => 1,
        (_, _, true) => 2,
        _ => 0,
    };
    out
}

fn weakness(l: &LoadedGraph, cli: &Cli) -> Output {
    let g = &l.graph;
    let mut text = String::new();
    let mut out = match separators::weak_or_not_weak(g) {
        Weakness::Weak(w) => {
            writeln!(text, "weak: yes").unwrap();
            writeln!(text, "critical mvs: {}", set(g, w.mvs.members().iter())).unwrap();
            writeln!(text, "walk: {}", walk(g, &w.walk)).unwrap();
            json!({
                "weak": true,
                "mvs": names_of(g, &w.mvs.members().to_vec()),
                "walk": names_of(g, &w.walk),
            })
        }
        Weakness::NotWeak => {
            writeln!(text, "weak: no").unwrap();
            json!({"weak": false})
        }
    };
    if cli.chain {
        let chain = separators::complete_chain(g);
        let sets: Vec<String> = chain.iter().map(|t| set(g, t.members().iter())).collect();
        writeln!(text, "chain: {}", sets.join(" < ")).unwrap();
        let json_chain: Vec<Vec<String>> = chain
            .iter()
            .map(|t| names_of(g, &t.members().to_vec()))
            .collect();
        out["chain"] = json!(json_chain);
    }
    Output::new(text, out)
}

fn edge_weakness(l: &LoadedGraph, cli: &Cli, witness_capacities: bool) -> Result<Output, Failure> {
    let g = &l.graph;
    let verdict = flownets::edge_weak(g, cli.bound)?;
    let mut text = String::new();
    let mut value = json!({"edge_weak": verdict.is_edge_weak()});
    match &verdict {
        EdgeWeakness::NotEdgeWeak => writeln!(text, "edge-weak: no").unwrap(),
        EdgeWeakness::EdgeWeak(w) => {
            writeln!(text, "edge-weak: yes").unwrap();
            match w {
                EdgeWeakWitness::Cut(c) => {
                    writeln!(
                        text,
                        "cut: ({}, {})",
                        set(g, c.cut.source_side.iter()),
                        set(g, c.cut.sink_side().iter())
                    )
                    .unwrap();
                    writeln!(
                        text,
                        "crossed twice by a walk through {} -> {} and {} -> {}",
                        g.name(c.first.0),
                        g.name(c.first.1),
                        g.name(c.second.0),
                        g.name(c.second.1)
                    )
                    .unwrap();
                }
                EdgeWeakWitness::Wheatstone(w) => {
                    writeln!(
                        text,
                        "acyclic and not series-parallel; Wheatstone subdivision:"
                    )
                    .unwrap();
                    text.push_str(&wheatstone_text(g, w));
                }
            }
            value["witness"] = json!(EdgeWeakView::new(g, w));
        }
    }
    if witness_capacities {
        let c = match &verdict {
            EdgeWeakness::EdgeWeak(EdgeWeakWitness::Cut(c)) => c,
            EdgeWeakness::EdgeWeak(EdgeWeakWitness::Wheatstone(_)) => {
                return Err(Failure::Bound(format!(
                    "capacities are built from a cut witness, searched only up to {} vertices",
                    cli.bound
                )))
            }
            EdgeWeakness::NotEdgeWeak => return Ok(Output::new(text, value)),
        };
        let cert = flownets::saturation_certificate(g, c);
        let mut file = GraphFile::from_graph(g);
        file.capacities = Some(PerEdge::List(
            cert.network
                .capacities()
                .iter()
                .map(|&r| r.into())
                .collect(),
        ));
        writeln!(
            text,
            "saturating flow of value {} below the maximum {} under these capacities:",
            cert.flow.value(g),
            cert.max_value
        )
        .unwrap();
        writeln!(text, "{}", file.to_json()).unwrap();
        value["certificate"] = json!({
            "file": file,
            "flow": cert.flow.flow.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            "flow_value": cert.flow.value(g).to_string(),
            "max_flow": cert.max_value.to_string(),
        });
    }
    Ok(Output::new(text, value))
}

fn vulnerability(l: &LoadedGraph) -> Result<Output, Failure> {
    let g = &l.graph;
    Ok(match traffic::vulnerable(g)? {
        Vulnerability::Vulnerable(w) => Output::new(
            format!(
                "vulnerable: yes\nWheatstone subdivision:\n{}",
                wheatstone_text(g, &w)
            ),
            json!({"vulnerable": true, "witness": WheatstoneView::new(g, &w)}),
        ),
        Vulnerability::NotVulnerable => {
            Output::new("vulnerable: no\n".to_string(), json!({"vulnerable": false}))
        }
    })
}

fn tree_text(g: &DirectedStGraph, t: &SpTree) -> String {
    match t {
        SpTree::Edge(e) => {
            let (a, b) = g.edges()[*e];
            format!("{}->{}", g.name(a), g.name(b))
        }
        SpTree::Series(parts) | SpTree::Parallel(parts) => {
            let tag = if matches!(t, SpTree::Series(_)) {
                "S"
            } else {
                "P"
            };
            let inner: Vec<String> = parts.iter().map(|p| tree_text(g, p)).collect();
            format!("{tag}({})", inner.join(", "))
        }
    }
}

fn ttsp_command(l: &LoadedGraph, cli: &Cli) -> Result<Output, Failure> {
    let g = &l.graph;
    Ok(match ttsp::is_ttsp(g)? {
        TtspResult::Yes(tree) => {
            let mut text = "ttsp: yes\n".to_string();
            let shown = tree_text(g, &tree);
            if cli.witness {
                writeln!(text, "decomposition: {shown}").unwrap();
            }
            Output::new(text, json!({"ttsp": true, "decomposition": shown}))
        }
        TtspResult::No(kernel) => {
            let edges: Vec<String> = kernel
                .edges
                .iter()
                .map(|(a, b, _)| format!("{}->{}", g.name(*a), g.name(*b)))
                .collect();
            let mut text = "ttsp: no\n".to_string();
            if cli.witness {
                writeln!(text, "irreducible kernel: {}", edges.join(", ")).unwrap();
            }
            Output::new(text, json!({"ttsp": false, "kernel": edges}))
        }
    })
}

fn wheatstone(l: &LoadedGraph, as_dot: bool) -> Result<Output, Failure> {
    let g = &l.graph;
    let found = ttsp::contains_wheatstone(g)?;
    if as_dot {
        let highlight = Highlight {
            edges: found
                .as_ref()
                .map(|w| w.edge_indices(g))
                .unwrap_or_default(),
            vertices: found
                .as_ref()
                .map(|w| vec![w.s_prime, w.u, w.v, w.t_prime])
                .unwrap_or_default(),
        };
        let text = dot::to_dot(g, &highlight);
        return Ok(Output::new(text.clone(), json!({"dot": text})));
    }
    Ok(match found {
        Some(w) => Output::new(
            format!("contains W: yes\n{}", wheatstone_text(g, &w)),
            json!({"contains_w": true, "witness": WheatstoneView::new(g, &w)}),
        ),
        None => Output::new("contains W: no\n".to_string(), json!({"contains_w": false})),
    })
}

fn channel_max(l: &LoadedGraph) -> Result<Output, Failure> {
    let ch = l.channel().map_err(|e| Failure::Usage(e.to_string()))?;
    let max = channels::max_flow_value(&ch);
    Ok(Output::new(
        format!("max flow: {max}\n"),
        json!({"max_flow": max}),
    ))
}

fn channel_min_inhibit(l: &LoadedGraph, cli: &Cli, max_charge: u64) -> Result<Output, Failure> {
    let ch = l.channel().map_err(|e| Failure::Usage(e.to_string()))?;
    let g = &l.graph;
    let found = channels::min_inhibiting(&ch, max_charge)?;
    let mut text = format!("min inhibiting flow: {}\n", found.value);
    let walks: Vec<Value> = found
        .flow
        .iter()
        .flat_map(|f| &f.walks)
        .map(|(w, k)| json!({"walk": names_of(g, w), "units": k}))
        .collect();
    if cli.witness {
        match &found.flow {
            Some(f) if f.walks.is_empty() => writeln!(text, "the channel is already dead").unwrap(),
            Some(f) => {
                for (w, k) in &f.walks {
                    writeln!(text, "  {k} x {}", walk(g, w)).unwrap();
                }
            }
            None => writeln!(text, "no flow inhibits the channel").unwrap(),
        }
    }
    Ok(Output::new(
        text,
        json!({"min_inhibiting": found.value, "flow": walks}),
    ))
}

fn flow_max(l: &LoadedGraph, cli: &Cli) -> Result<Output, Failure> {
    let net = l.network().map_err(|e| Failure::Usage(e.to_string()))?;
    let g = &l.graph;
    let f = flownets::max_flow(&net);
    let mut text = format!("max flow: {}\n", f.value(g));
    let per_edge: Vec<Value> = g
        .edges()
        .iter()
        .zip(&f.flow)
        .zip(net.capacities())
        .map(|((&(a, b), x), c)| {
            json!({"edge": [g.name(a), g.name(b)], "flow": x.to_string(), "capacity": c.to_string()})
        })
        .collect();
    if cli.witness {
        for ((&(a, b), x), c) in g.edges().iter().zip(&f.flow).zip(net.capacities()) {
            writeln!(text, "  {} -> {}  {x} / {c}", g.name(a), g.name(b)).unwrap();
        }
    }
    Ok(Output::new(
        text,
        json!({"max_flow": f.value(g).to_string(), "edges": per_edge}),
    ))
}

fn wardrop(l: &LoadedGraph, cli: &Cli) -> Result<Output, Failure> {
    let inst = l.traffic().map_err(|e| Failure::Usage(e.to_string()))?;
    let g = &l.graph;
    let opts = WardropOptions {
        tol: cli.tol,
        ..WardropOptions::default()
    };
    let eq = traffic::wardrop(&inst, opts)?;
    let mut text = format!("equilibrium latency: {}\n", round(eq.latency, cli.tol));
    let mut paths = Vec::new();
    for ((p, &f), &lat) in eq
        .flow
        .paths
        .iter()
        .zip(&eq.flow.flow)
        .zip(&eq.path_latency)
    {
        paths.push(json!({"path": names_of(g, p), "flow": f, "latency": lat}));
        if f > cli.tol {
            writeln!(
                text,
                "  {}  flow {}  latency {}",
                walk(g, p),
                round(f, cli.tol),
                round(lat, cli.tol)
            )
            .unwrap();
        }
    }
    Ok(Output::new(
        text,
        json!({
            "latency": eq.latency,
            "gap": eq.gap,
            "iterations": eq.iterations,
            "paths": paths,
        }),
    ))
}

/// Rounds away digits below the tolerance for display.
fn round(x: f64, tol: f64) -> f64 {
    let digits = (-tol.log10()).floor().clamp(0.0, 15.0) as i32;
    let scale = 10f64.powi(digits);
    (x * scale).round() / scale
}

fn braess_demo(l: &LoadedGraph, cli: &Cli) -> Result<Output, Failure> {
    let g = &l.graph;
    let Vulnerability::Vulnerable(w) = traffic::vulnerable(g)? else {
        return Err(Failure::Usage(
            "graph is not vulnerable: no Braess instance exists".to_string(),
        ));
    };
    let opts = WardropOptions {
        tol: cli.tol,
        ..WardropOptions::default()
    };
    let demo = traffic::braess_demo(g, &w, opts)?;
    let mut text = String::new();
    writeln!(text, "Wheatstone subdivision:\n{}", wheatstone_text(g, &w)).unwrap();
    writeln!(
        text,
        "latencies: x on the first edges of s' ~> u and v ~> t', 1 on the first edges of s' ~> v and u ~> t', 0 elsewhere on the subdivision, {} on edges outside it",
        demo.blocked_latency
    )
    .unwrap();
    writeln!(text, "demand: 1").unwrap();
    writeln!(
        text,
        "equilibrium latency with u ~> v:    {}",
        round(demo.full.latency, cli.tol)
    )
    .unwrap();
    writeln!(
        text,
        "equilibrium latency without u ~> v: {}",
        round(demo.sub.latency, cli.tol)
    )
    .unwrap();
    writeln!(text, "improves: {}", yes_no(demo.improves())).unwrap();
    let value = json!({
        "witness": WheatstoneView::new(g, &w),
        "latencies": demo.instance.latencies(),
        "blocked_latency": demo.blocked_latency,
        "demand": demo.instance.demand(),
        "latency_full": demo.full.latency,
        "latency_without_bridge": demo.sub.latency,
        "improves": demo.improves(),
    });
    if !demo.improves() {
        return Err(Failure::Inconsistent(format!(
            "{text}removing the bridge did not lower the equilibrium latency"
        )));
    }
    Ok(Output::new(text, value))
}

fn sweep_command(cli: &Cli, max_n: usize, seeds: u64) -> Result<Output, Failure> {
    if !(3..=12).contains(&max_n) {
        return Err(Failure::Usage(
            "--max-n must be between 3 and 12".to_string(),
        ));
    }
    let opts = SweepOptions {
        exhaustive_max_n: max_n.min(5),
        random_max_n: max_n,
        seeds,
        seed: cli.seed,
        channel_max_n: max_n.min(6),
        ..SweepOptions::default()
    };
    let report = sweep::sweep(&opts);
    let mut text = String::new();
    writeln!(
        text,
        "{} exhaustive and {} random graphs (seed {}) in {:.1?}",
        report.exhaustive_graphs, report.random_graphs, cli.seed, report.elapsed
    )
    .unwrap();
    for t in &report.tallies {
        writeln!(
            text,
            "  {:>8} checked  {:>4} failed  {}",
            t.checked, t.violations, t.check
        )
        .unwrap();
        if let Some(first) = &t.first_violation {
            writeln!(text, "           first failure: {first}").unwrap();
        }
    }
    let regions: Vec<String> = report
        .regions
        .iter()
        .map(|(r, c)| format!("{r:?} {c}"))
        .collect();
    writeln!(text, "regions: {}", regions.join(", ")).unwrap();
    let mut out = Output::new(text, json!(report));
    if report.violations() > 0 {
        out.code = 3;
    }
    Ok(out)
}

fn export_dot(l: &LoadedGraph, cli: &Cli) -> Result<Output, Failure> {
    let g = &l.graph;
    let mut highlight = Highlight::default();
    if cli.witness {
        if let Weakness::Weak(w) = separators::weak_or_not_weak(g) {
            highlight.vertices = w.mvs.members().to_vec();
        }
        if let Vulnerability::Vulnerable(w) = traffic::vulnerable(g)? {
            highlight.edges = w.edge_indices(g);
        } else if let Ok(EdgeWeakness::EdgeWeak(EdgeWeakWitness::Cut(c))) =
            flownets::edge_weak(g, cli.bound)
        {
            highlight.edges = c.cut.cutset(g);
        }
    }
    let text = dot::to_dot(g, &highlight);
    Ok(Output::new(text.clone(), json!({"dot": text})))
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let load = |f: &PathBuf| load(f, cli);
    match &cli.command {
        Command::Classify { files } => Ok(classify_files(files, cli)),
        Command::Weakness { file } => Ok(weakness(&load(file)?, cli)),
        Command::EdgeWeakness {
            file,
            witness_capacities,
        } => edge_weakness(&load(file)?, cli, *witness_capacities),
        Command::Vulnerability { file } => vulnerability(&load(file)?),
        Command::Ttsp { file } => ttsp_command(&load(file)?, cli),
        Command::Wheatstone { file, dot } => wheatstone(&load(file)?, *dot),
        Command::ChannelMax { file } => channel_max(&load(file)?),
        Command::ChannelMinInhibit { file, max_charge } => {
            channel_min_inhibit(&load(file)?, cli, *max_charge)
        }
        Command::FlowMax { file } => flow_max(&load(file)?, cli),
        Command::Wardrop { file } => wardrop(&load(file)?, cli),
        Command::BraessDemo { file } => braess_demo(&load(file)?, cli),
        Command::Sweep { max_n, seeds } => sweep_command(cli, *max_n, *seeds),
        Command::ExportDot { file } => export_dot(&load(file)?, cli),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&out.json).expect("reports serialize")
                );
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
