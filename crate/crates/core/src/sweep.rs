//! Agreement sweeps: each fast decider against its brute-force oracle, plus
//! the implications between the three properties, over every small st-graph
//! and over seeded random graphs.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{self, Amount, DepletableChannel};
use crate::flownets::{self, EdgeWeakWitness, EdgeWeakness};
use crate::graph::{DirectedStGraph, VertexSet};
use crate::oracles;
use crate::separators::{self, Mvs};
use crate::traffic::{self, Vulnerability};
use crate::ttsp::{self, CycleRemoval};

/// Largest graph on which cycle removal is compared path by path.
const ACYCLIC_PATH_BOUND: usize = 8;
/// Largest graph on which the vulnerability oracle enumerates subgraphs.
const SUBGRAPH_BOUND: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Weak,
    EdgeWeak,
    VulnerableMinor,
    VulnerableSubgraph,
    VulnerableImpliesEdgeWeak,
    DagCollapse,
    WheatstoneWitness,
    EdgeWeakCertificate,
    ConnectedCutMinimal,
    CompleteChain,
    BMinimal,
    CycleRemoval,
    ChannelGap,
    ChannelMaxFlow,
}

impl Check {
    pub const ALL: [Check; 14] = [
        Check::Weak,
        Check::EdgeWeak,
        Check::VulnerableMinor,
        Check::VulnerableSubgraph,
        Check::VulnerableImpliesEdgeWeak,
        Check::DagCollapse,
        Check::WheatstoneWitness,
        Check::EdgeWeakCertificate,
        Check::ConnectedCutMinimal,
        Check::CompleteChain,
        Check::BMinimal,
        Check::CycleRemoval,
        Check::ChannelGap,
        Check::ChannelMaxFlow,
    ];

    pub fn description(self) -> &'static str {
        match self {
            Check::Weak => "weakness agrees with mvs enumeration",
            Check::EdgeWeak => "edge-weakness agrees with cut-pair enumeration",
            Check::VulnerableMinor => "vulnerability agrees with a direct W-subdivision search",
            Check::VulnerableSubgraph => "vulnerable iff some acyclic subgraph is weak",
            Check::VulnerableImpliesEdgeWeak => "vulnerable implies edge-weak",
            Check::DagCollapse => "on DAGs: vulnerable = edge-weak = not TTSP, weak implies all",
            Check::WheatstoneWitness => "Wheatstone witnesses reduce to W",
            Check::EdgeWeakCertificate => "edge-weak witnesses give a non-maximum saturating flow",
            Check::ConnectedCutMinimal => {
                "no cut-set lies strictly inside a connected cut's cut-set"
            }
            Check::CompleteChain => "complete chains step to immediate successors",
            Check::BMinimal => "minimalMvs is b-minimal and b-critical when b is critical",
            Check::CycleRemoval => "cycle removal keeps the acyclic paths",
            Check::ChannelGap => "some charges give min inhibiting < max flow iff weak",
            Check::ChannelMaxFlow => "channel max flow equals the cheapest mvs",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.description())
    }
}

/// Where a graph falls among the three properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Region {
    /// Weak only, like graph A.
    A,
    /// Weak and edge-weak, not vulnerable, like graph B.
    B,
    /// Edge-weak and vulnerable, not weak, like graph C.
    C,
    /// Edge-weak only, like graph D.
    D,
    /// All three, like W.
    All,
    None,
    /// Vulnerable but not edge-weak; never expected.
    Inconsistent,
}

impl Region {
    pub fn of(weak: bool, edge_weak: bool, vulnerable: bool) -> Region {
        match (weak, edge_weak, vulnerable) {
            (true, false, false) => Region::A,
            (true, true, false) => Region::B,
            (false, true, true) => Region::C,
            (false, true, false) => Region::D,
            (true, true, true) => Region::All,
            (false, false, false) => Region::None,
            (_, false, true) => Region::Inconsistent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepOptions {
    /// Every st-graph up to this many vertices (at most 5).
    pub exhaustive_max_n: usize,
    /// Random graphs have 3 to this many vertices.
    pub random_max_n: usize,
    pub seeds: u64,
    pub seed: u64,
    /// Largest graph for the charge-enumerating channel check.
    pub channel_max_n: usize,
    pub channel_max_charge: u64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            exhaustive_max_n: 5,
            random_max_n: 7,
            seeds: 10_000,
            seed: 0,
            channel_max_n: 6,
            channel_max_charge: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub check: Check,
    pub checked: u64,
    pub violations: u64,
    /// The first violating graph, with its seed when it was sampled.
    pub first_violation: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub exhaustive_graphs: u64,
    pub random_graphs: u64,
    pub tallies: Vec<Tally>,
    pub regions: Vec<(Region, u64)>,
    pub dag_regions: Vec<(Region, u64)>,
    pub elapsed: Duration,
}

impl SweepReport {
    pub fn violations(&self) -> u64 {
        self.tallies.iter().map(|t| t.violations).sum()
    }

    pub fn tally(&self, check: Check) -> &Tally {
        self.tallies
            .iter()
            .find(|t| t.check == check)
            .expect("every check is tallied")
    }
}

/// Outcome of all checks on one graph.
#[derive(Debug, Clone, Default)]
pub struct GraphOutcome {
    /// `(check, passed)` for every check that applies.
    pub results: Vec<(Check, bool)>,
    pub region: Option<Region>,
    pub acyclic: bool,
}

/// The `i`-th random graph of a sweep seeded with `seed`.
pub fn sample_graph(seed: u64, i: u64, max_n: usize) -> DirectedStGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i));
    let n = rng.gen_range(3..=max_n.max(3));
    let p = rng.gen_range(0.25..0.6);
    let acyclic = rng.gen_bool(0.5);
    oracles::random_st_graph(&mut rng, n, p, acyclic)
}

/// Runs every applicable check on `g`. `charge_seed` drives the random
/// charges of the max-flow check.
pub fn check_graph(g: &DirectedStGraph, opts: &SweepOptions, charge_seed: u64) -> GraphOutcome {
    let mut out = GraphOutcome {
        acyclic: g.is_acyclic(),
        ..GraphOutcome::default()
    };
    let mut record = |check: Check, ok: bool| out.results.push((check, ok));

    let weakness = separators::weak_or_not_weak(g);
    let weak = weakness.is_weak();
    if let Ok(expected) = oracles::weak_oracle(g) {
        record(Check::Weak, weak == expected);
    }

    let edge_weakness = flownets::edge_weak(g, flownets::DEFAULT_EXHAUSTIVE_BOUND);
    if let Ok(ew) = &edge_weakness {
        if let Ok(expected) = oracles::edge_weak_oracle(g) {
            record(Check::EdgeWeak, ew.is_edge_weak() == expected);
        }
        if let EdgeWeakness::EdgeWeak(EdgeWeakWitness::Cut(w)) = ew {
            let cert = flownets::saturation_certificate(g, w);
            let ok = w.is_valid(g)
                && cert.flow.check_feasible(&cert.network).is_ok()
                && flownets::is_saturating(&cert.network, &cert.flow)
                && cert.max_value > cert.flow.value(g);
            record(Check::EdgeWeakCertificate, ok);
        }
    }

    let vulnerability = traffic::vulnerable(g);
    if let Ok(v) = &vulnerability {
        let vul = v.is_vulnerable();
        if let Ok(expected) = oracles::wheatstone_minor_oracle(g) {
            record(Check::VulnerableMinor, vul == expected);
        }
        if g.n() <= SUBGRAPH_BOUND {
            if let Ok(expected) = oracles::vulnerable_oracle(g) {
                record(Check::VulnerableSubgraph, vul == expected);
            }
        }
        if let Vulnerability::Vulnerable(w) = v {
            record(Check::WheatstoneWitness, w.is_valid(g) && w.reduces_to_w(g));
        }
    }

    match (&edge_weakness, &vulnerability) {
        (Ok(ew), Ok(v)) => {
            let (ew, vul) = (ew.is_edge_weak(), v.is_vulnerable());
            record(Check::VulnerableImpliesEdgeWeak, !vul || ew);
            if out.acyclic {
                let ttsp = ttsp::is_ttsp(g).map(|r| r.is_ttsp()).unwrap_or(true);
                record(
                    Check::DagCollapse,
                    vul == ew && ew == !ttsp && (!weak || vul),
                );
            }
            out.region = Some(Region::of(weak, ew, vul));
        }
        _ => {
            // A decider gave up; count that against both agreement checks.
            record(Check::EdgeWeak, edge_weakness.is_ok());
            record(Check::VulnerableMinor, vulnerability.is_ok());
        }
    }

    if g.n() <= flownets::DEFAULT_EXHAUSTIVE_BOUND.min(12) {
        record(Check::ConnectedCutMinimal, connected_cuts_minimal(g));
    }
    if let Ok(all) = oracles::enumerate_mvs(g) {
        record(Check::CompleteChain, chain_is_complete(g, &all));
        record(Check::BMinimal, b_minimal_holds(g, &all));
        let mut rng = ChaCha8Rng::seed_from_u64(charge_seed);
        record(
            Check::ChannelMaxFlow,
            max_flow_is_cheapest_mvs(g, &all, &mut rng),
        );
    }
    if g.n() <= ACYCLIC_PATH_BOUND {
        record(Check::CycleRemoval, cycle_removal_keeps_paths(g));
    }
    if g.n() <= opts.channel_max_n {
        if let Ok(gap) = oracles::inhibiting_gap_oracle(g, opts.channel_max_charge) {
            record(Check::ChannelGap, gap == weak);
        }
    }
    out
}

fn cutset_mask(g: &DirectedStGraph, side: u64) -> u128 {
    g.edges()
        .iter()
        .enumerate()
        .filter(|(_, &(u, v))| side >> u & 1 == 1 && side >> v & 1 == 0)
        .fold(0, |m, (e, _)| m | 1 << e)
}

fn connected_cuts_minimal(g: &DirectedStGraph) -> bool {
    if g.edge_count() > 128 {
        return true;
    }
    let interior = g.n() - 2;
    let masks: Vec<u128> = (0..1u64 << interior)
        .map(|m| cutset_mask(g, m << 1 | 1))
        .collect();
    flownets::connected_cuts(g).iter().all(|cut| {
        let own = cutset_mask(g, cut.source_side.iter().fold(0, |m, v| m | 1 << v));
        masks.iter().all(|&m| !(m & !own == 0 && m != own))
    })
}

fn below(g: &DirectedStGraph, lower: &VertexSet, upper: &VertexSet) -> bool {
    lower.is_disjoint(&g.sink_component(upper))
}

fn chain_is_complete(g: &DirectedStGraph, all: &[VertexSet]) -> bool {
    let chain: Vec<VertexSet> = separators::complete_chain(g)
        .into_iter()
        .map(|t| t.members().clone())
        .collect();
    let ends = chain.first() == Some(&VertexSet::singleton(g.n(), g.source()))
        && chain.last() == Some(&VertexSet::singleton(g.n(), g.sink()));
    let steps = chain.windows(2).all(|w| {
        let (a, b) = (&w[0], &w[1]);
        a != b
            && below(g, a, b)
            && all
                .iter()
                .all(|m| m == a || m == b || !(below(g, a, m) && below(g, m, b)))
    });
    ends && steps && chain.len() <= g.n()
}

fn b_minimal_holds(g: &DirectedStGraph, all: &[VertexSet]) -> bool {
    let reach = g.reachability();
    let b_critical = |t: &VertexSet, b: usize| t.iter().any(|a| reach.reaches(a, b));
    let critical_nodes: Vec<bool> = (0..g.n())
        .map(|b| all.iter().any(|t| t.contains(b) && b_critical(t, b)))
        .collect();
    all.iter().all(|t| {
        let mvs = Mvs::new(g, t.clone()).expect("enumerated mvs");
        t.iter().all(|b| {
            let Ok(m) = separators::minimal_mvs(g, &mvs, b) else {
                return false;
            };
            let m = m.members();
            let minimal = !all
                .iter()
                .any(|o| o != m && o.contains(b) && below(g, o, m));
            let ok_crit = !critical_nodes[b] || b_critical(m, b);
            m.contains(b) && below(g, m, t) && minimal && ok_crit
        })
    })
}

fn max_flow_is_cheapest_mvs(g: &DirectedStGraph, all: &[VertexSet], rng: &mut impl Rng) -> bool {
    let charge: Vec<Amount> = (0..g.n())
        .map(|_| match rng.gen_range(0..6) {
            5 => Amount::Infinite,
            c => Amount::Finite(c),
        })
        .collect();
    let ch = DepletableChannel::new(g.clone(), charge).expect("one charge per vertex");
    let cost = |t: &VertexSet| {
        t.iter()
            .try_fold(0u64, |sum, v| ch.charge(v).finite().map(|c| sum + c))
    };
    let cheapest = all.iter().filter_map(cost).min();
    let expected = cheapest.map_or(Amount::Infinite, Amount::Finite);
    channels::max_flow_value(&ch) == expected
}

fn cycle_removal_keeps_paths(g: &DirectedStGraph) -> bool {
    match ttsp::remove_cycles(g) {
        Ok(CycleRemoval::Acyclic(h, relabel)) => {
            let after: std::collections::BTreeSet<Vec<usize>> = oracles::acyclic_path_set(&h)
                .into_iter()
                .map(|p| p.into_iter().map(|v| relabel.to_parent[v]).collect())
                .collect();
            h.is_acyclic() && after == oracles::acyclic_path_set(g)
        }
        Ok(CycleRemoval::FoundWheatstone(w)) => w.is_valid(g) && w.reduces_to_w(g),
        Err(_) => false,
    }
}

#[derive(Default)]
struct Totals {
    tallies: std::collections::BTreeMap<Check, (u64, u64, Option<String>)>,
    regions: std::collections::BTreeMap<Region, u64>,
    dag_regions: std::collections::BTreeMap<Region, u64>,
}

impl Totals {
    fn add(&mut self, g: &DirectedStGraph, label: &str, outcome: GraphOutcome) {
        for (check, ok) in outcome.results {
            let entry = self.tallies.entry(check).or_default();
            entry.0 += 1;
            if !ok {
                entry.1 += 1;
                entry.2.get_or_insert_with(|| format!("{label}: {g:?}"));
            }
        }
        if let Some(region) = outcome.region {
            *self.regions.entry(region).or_default() += 1;
            if outcome.acyclic {
                *self.dag_regions.entry(region).or_default() += 1;
            }
        }
    }

    fn merge(mut self, other: Totals) -> Totals {
        for (check, (c, v, first)) in other.tallies {
            let entry = self.tallies.entry(check).or_default();
            entry.0 += c;
            entry.1 += v;
            if entry.2.is_none() {
                entry.2 = first;
            }
        }
        for (r, c) in other.regions {
            *self.regions.entry(r).or_default() += c;
        }
        for (r, c) in other.dag_regions {
            *self.dag_regions.entry(r).or_default() += c;
        }
        self
    }
}

/// Runs the exhaustive and random sweeps.
pub fn sweep(opts: &SweepOptions) -> SweepReport {
    let start = Instant::now();
    let exhaustive: Vec<DirectedStGraph> = (2..=opts.exhaustive_max_n.min(5))
        .flat_map(oracles::all_st_graphs)
        .collect();
    let from_list = exhaustive
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let mut t = Totals::default();
            t.add(
                g,
                &format!("exhaustive #{i}"),
                check_graph(g, opts, i as u64),
            );
            t
        })
        .reduce(Totals::default, Totals::merge);
    let sampled = (0..opts.seeds)
        .into_par_iter()
        .map(|i| {
            let g = sample_graph(opts.seed, i, opts.random_max_n);
            let mut t = Totals::default();
            let label = format!("seed {}", opts.seed.wrapping_add(i));
            t.add(&g, &label, check_graph(&g, opts, opts.seed.wrapping_add(i)));
            t
        })
        .reduce(Totals::default, Totals::merge);
    let totals = from_list.merge(sampled);
    let tallies = Check::ALL
        .iter()
        .map(|&check| {
            let (checked, violations, first_violation) =
                totals.tallies.get(&check).cloned().unwrap_or_default();
            Tally {
                check,
                checked,
                violations,
                first_violation,
            }
        })
        .collect();
    SweepReport {
        exhaustive_graphs: exhaustive.len() as u64,
        random_graphs: opts.seeds,
        tallies,
        regions: totals.regions.into_iter().collect(),
        dag_regions: totals.dag_regions.into_iter().collect(),
        elapsed: start.elapsed(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::samples::*;

    #[test]
    fn sample_graphs_pass_every_check() {
        let opts = SweepOptions::default();
        for g in [
            wheatstone(),
            graph_a(),
            graph_b(),
            graph_c(),
            graph_d(),
            diamond(),
        ] {
            let out = check_graph(&g, &opts, 7);
            for (check, ok) in &out.results {
                assert!(ok, "{check} failed on {g:?}");
            }
        }
    }

    #[test]
    fn regions_of_the_sample_graphs() {
        let opts = SweepOptions {
            channel_max_n: 0,
            ..SweepOptions::default()
        };
        let region = |g: DirectedStGraph| check_graph(&g, &opts, 0).region;
        assert_eq!(region(graph_a()), Some(Region::A));
        assert_eq!(region(graph_b()), Some(Region::B));
        assert_eq!(region(graph_c()), Some(Region::C));
        assert_eq!(region(graph_d()), Some(Region::D));
        assert_eq!(region(wheatstone()), Some(Region::All));
        assert_eq!(region(diamond()), Some(Region::None));
    }

    #[test]
    fn sampling_is_reproducible() {
        assert_eq!(sample_graph(3, 5, 7), sample_graph(3, 5, 7));
        assert_eq!(sample_graph(3, 5, 7), sample_graph(4, 4, 7));
    }

    #[test]
    fn small_sweep_is_clean() {
        let report = sweep(&SweepOptions {
            exhaustive_max_n: 4,
            random_max_n: 6,
            seeds: 50,
            seed: 11,
            channel_max_n: 4,
            channel_max_charge: 2,
        });
        assert_eq!(report.exhaustive_graphs, 1 + 2 + 36);
        assert_eq!(report.violations(), 0, "{report:#?}");
    }
}
