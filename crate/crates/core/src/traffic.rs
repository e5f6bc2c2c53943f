//! Selfish routing with affine latencies: Wardrop equilibria and Braess's
//! paradox.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{DirectedStGraph, Vertex};
use crate::ttsp::{self, TtspError, WheatstoneWitness};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_MAX_ITERATIONS: usize = 100_000;
/// Largest number of acyclic paths the equilibrium solver will enumerate.
pub const PATH_LIMIT: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrafficError {
    #[error("expected {expected} latencies, one per edge, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("latency of edge {0} has a negative or non-finite coefficient")]
    BadLatency(usize),
    #[error("demand must be finite and non-negative, got {0}")]
    BadDemand(f64),
    #[error("more than {0} acyclic source-sink paths")]
    TooManyPaths(usize),
    #[error("start path {0} does not exist")]
    NoSuchPath(usize),
    #[error("no convergence after {iterations} iterations, gap {gap:e}")]
    NotConverged { iterations: usize, gap: f64 },
}

/// `l(x) = a·x + b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Affine {
    pub a: f64,
    pub b: f64,
}

impl Affine {
    pub fn new(a: f64, b: f64) -> Self {
        Affine { a, b }
    }

    pub fn identity() -> Self {
        Affine::new(1.0, 0.0)
    }

    pub fn constant(b: f64) -> Self {
        Affine::new(0.0, b)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.a * x + self.b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficInstance {
    graph: DirectedStGraph,
    latency: Vec<Affine>,
    demand: f64,
}

impl TrafficInstance {
    pub fn new(
        graph: DirectedStGraph,
        latency: Vec<Affine>,
        demand: f64,
    ) -> Result<Self, TrafficError> {
        if latency.len() != graph.edge_count() {
            return Err(TrafficError::WrongLength {
                expected: graph.edge_count(),
                got: latency.len(),
            });
        }
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if let Some(e) = latency.iter().position(|l| !ok(l.a) || !ok(l.b)) {
            return Err(TrafficError::BadLatency(e));
        }
        if !ok(demand) {
            return Err(TrafficError::BadDemand(demand));
        }
        Ok(TrafficInstance {
            graph,
            latency,
            demand,
        })
    }

    pub fn graph(&self) -> &DirectedStGraph {
        &self.graph
    }

    pub fn latency(&self, e: usize) -> Affine {
        self.latency[e]
    }

    pub fn latencies(&self) -> &[Affine] {
        &self.latency
    }

    pub fn demand(&self) -> f64 {
        self.demand
    }
}

/// All acyclic source-sink paths, in depth-first order over sorted successors.
pub fn acyclic_paths(g: &DirectedStGraph, limit: usize) -> Result<Vec<Vec<Vertex>>, TrafficError> {
    fn dfs(
        g: &DirectedStGraph,
        path: &mut Vec<Vertex>,
        on_path: &mut [bool],
        out: &mut Vec<Vec<Vertex>>,
        limit: usize,
    ) -> Result<(), TrafficError> {
        let v = *path.last().unwrap();
        if v == g.sink() {
            if out.len() == limit {
                return Err(TrafficError::TooManyPaths(limit));
            }
            out.push(path.clone());
            return Ok(());
        }
        for &w in g.succ(v) {
            if !on_path[w] {
                on_path[w] = true;
                path.push(w);
                dfs(g, path, on_path, out, limit)?;
                path.pop();
                on_path[w] = false;
            }
        }
        Ok(())
    }
    let mut on_path = vec![false; g.n()];
    on_path[g.source()] = true;
    let mut out = Vec::new();
    dfs(g, &mut vec![g.source()], &mut on_path, &mut out, limit)?;
    Ok(out)
}

/// Flow on each acyclic path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficFlow {
    pub paths: Vec<Vec<Vertex>>,
    pub flow: Vec<f64>,
}

impl TrafficFlow {
    pub fn value(&self) -> f64 {
        self.flow.iter().sum()
    }

    pub fn edge_flow(&self, g: &DirectedStGraph) -> Vec<f64> {
        let mut x = vec![0.0; g.edge_count()];
        for (p, &f) in self.paths.iter().zip(&self.flow) {
            for w in p.windows(2) {
                x[g.edge_index(w[0], w[1]).expect("path edge")] += f;
            }
        }
        x
    }

    /// Latency of every path under the induced edge flow.
    pub fn path_latencies(&self, inst: &TrafficInstance) -> Vec<f64> {
        let g = inst.graph();
        let x = self.edge_flow(g);
        self.paths
            .iter()
            .map(|p| {
                p.windows(2)
                    .map(|w| {
                        let e = g.edge_index(w[0], w[1]).expect("path edge");
                        inst.latency[e].eval(x[e])
                    })
                    .sum()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub flow: TrafficFlow,
    pub path_latency: Vec<f64>,
    /// Common latency of the used paths.
    pub latency: f64,
    /// Largest used-path latency minus smallest path latency.
    pub gap: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WardropOptions {
    pub tol: f64,
    pub max_iterations: usize,
    /// Index of the path initially carrying all demand; defaults to a path of
    /// least free-flow latency.
    pub start: Option<usize>,
}

impl Default for WardropOptions {
    fn default() -> Self {
        WardropOptions {
            tol: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            start: None,
        }
    }
}

fn argmin(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x < xs[best] {
            best = i;
        }
    }
    best
}

/// Wardrop equilibrium by descent on the potential
/// `Σ_e ∫₀^{x_e} l_e`: each step moves demand from the costliest used path to
/// the cheapest path, with the exact line search available for affine
/// latencies.
pub fn wardrop(inst: &TrafficInstance, opts: WardropOptions) -> Result<Equilibrium, TrafficError> {
    let g = inst.graph();
    let paths = acyclic_paths(g, PATH_LIMIT)?;
    let edge_lists: Vec<Vec<usize>> = paths
        .iter()
        .map(|p| {
            p.windows(2)
                .map(|w| g.edge_index(w[0], w[1]).unwrap())
                .collect()
        })
        .collect();
    let mut flow = TrafficFlow {
        paths,
        flow: vec![0.0; edge_lists.len()],
    };
    if inst.demand == 0.0 {
        let path_latency = flow.path_latencies(inst);
        return Ok(Equilibrium {
            flow,
            path_latency,
            latency: 0.0,
            gap: 0.0,
            iterations: 0,
        });
    }
    let start = match opts.start {
        Some(i) if i >= edge_lists.len() => return Err(TrafficError::NoSuchPath(i)),
        Some(i) => i,
        None => argmin(&flow.path_latencies(inst)),
    };
    flow.flow[start] = inst.demand;
    let mut x = flow.edge_flow(g);
    let mut on_p = vec![false; g.edge_count()];
    for iteration in 0..=opts.max_iterations {
        let cost: Vec<f64> = edge_lists
            .iter()
            .map(|es| es.iter().map(|&e| inst.latency[e].eval(x[e])).sum())
            .collect();
        let q = argmin(&cost);
        let p = (0..cost.len())
            .filter(|&i| flow.flow[i] > 0.0)
            .max_by(|&i, &j| cost[i].total_cmp(&cost[j]))
            .expect("positive demand is routed");
        let gap = cost[p] - cost[q];
        if gap <= opts.tol {
            return Ok(Equilibrium {
                path_latency: cost.clone(),
                latency: cost[q],
                flow,
                gap,
                iterations: iteration,
            });
        }
        if iteration == opts.max_iterations {
            return Err(TrafficError::NotConverged {
                iterations: iteration,
                gap,
            });
        }
        // The gap shrinks at rate Σ a_e over edges on exactly one of p, q.
        for &e in &edge_lists[p] {
            on_p[e] = true;
        }
        let mut slope = 0.0;
        for &e in &edge_lists[q] {
            if on_p[e] {
                on_p[e] = false;
            } else {
                slope += inst.latency[e].a;
            }
        }
        for &e in &edge_lists[p] {
            if on_p[e] {
                slope += inst.latency[e].a;
                on_p[e] = false;
            }
        }
        let available = flow.flow[p];
        let delta = if slope > 0.0 {
            (gap / slope).min(available)
        } else {
            available
        };
        flow.flow[p] = if delta >= available {
            0.0
        } else {
            available - delta
        };
        flow.flow[q] += delta;
        for &e in &edge_lists[p] {
            x[e] -= delta;
        }
        for &e in &edge_lists[q] {
            x[e] += delta;
        }
    }
    unreachable!("the loop returns on its last iteration")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Vulnerability {
    Vulnerable(WheatstoneWitness),
    NotVulnerable,
}

impl Vulnerability {
    pub fn is_vulnerable(&self) -> bool {
        matches!(self, Vulnerability::Vulnerable(_))
    }
}

/// Vulnerable iff the graph contains a subgraph homeomorphic to `W`.
pub fn vulnerable(g: &DirectedStGraph) -> Result<Vulnerability, TtspError> {
    Ok(match ttsp::contains_wheatstone(g)? {
        Some(w) => Vulnerability::Vulnerable(w),
        None => Vulnerability::NotVulnerable,
    })
}

/// A Braess instance built on a `W` subdivision and its improved subgraph.
#[derive(Debug, Clone, PartialEq)]
pub struct BraessDemo {
    pub instance: TrafficInstance,
    /// The constant latency standing in for edges that must stay unused.
    pub blocked_latency: f64,
    /// The graph without the `u ⇝ v` branch, and its instance.
    pub subgraph: TrafficInstance,
    pub full: Equilibrium,
    pub sub: Equilibrium,
}

impl BraessDemo {
    pub fn improves(&self) -> bool {
        self.sub.latency < self.full.latency
    }
}

/// Latency `x` on the first edge of `s' ⇝ u` and `v ⇝ t'`, `1` on the first
/// edge of `s' ⇝ v` and `u ⇝ t'`, `0` on the rest of the witness, and a
/// constant `1 + Σ (a + b)` over the witness elsewhere. That constant exceeds
/// any path latency inside the witness, so other edges carry no flow. Demand
/// is one unit.
pub fn braess_demo(
    g: &DirectedStGraph,
    w: &WheatstoneWitness,
    opts: WardropOptions,
) -> Result<BraessDemo, TrafficError> {
    let first = |p: &[Vertex]| g.edge_index(p[0], p[1]).expect("witness edge");
    let witness = w.edge_indices(g);
    let mut latency = vec![Affine::constant(0.0); g.edge_count()];
    latency[first(&w.s_to_u)] = Affine::identity();
    latency[first(&w.v_to_t)] = Affine::identity();
    latency[first(&w.s_to_v)] = Affine::constant(1.0);
    latency[first(&w.u_to_t)] = Affine::constant(1.0);
    let blocked = 1.0
        + witness
            .iter()
            .map(|&e| latency[e].a + latency[e].b)
            .sum::<f64>();
    for (e, l) in latency.iter_mut().enumerate() {
        if witness.binary_search(&e).is_err() {
            *l = Affine::constant(blocked);
        }
    }
    let bridge: Vec<usize> = w
        .u_to_v
        .windows(2)
        .map(|p| g.edge_index(p[0], p[1]).unwrap())
        .collect();
    let (sub, rl) = g
        .edge_subgraph(|e| !bridge.contains(&e))
        .expect("the rest of the witness joins s to t");
    let sub_latency = rl.edge_to_parent.iter().map(|&e| latency[e]).collect();
    let instance = TrafficInstance::new(g.clone(), latency, 1.0)?;
    let subgraph = TrafficInstance::new(sub, sub_latency, 1.0)?;
    let full = wardrop(&instance, opts)?;
    let sub = wardrop(&subgraph, opts)?;
    Ok(BraessDemo {
        instance,
        blocked_latency: blocked,
        subgraph,
        full,
        sub,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::samples::*;

    /// Latencies x, 1, 0, 1, x on s→u, s→v, u→v, u→t, v→t.
    fn wheatstone_instance(g: DirectedStGraph) -> TrafficInstance {
        let lat = |a: &str, b: &str| match (a, b) {
            ("s", "u") | ("v", "t") => Affine::identity(),
            ("u", "v") => Affine::constant(0.0),
            _ => Affine::constant(1.0),
        };
        let latency = g
            .edges()
            .iter()
            .map(|&(a, b)| lat(g.name(a), g.name(b)))
            .collect();
        TrafficInstance::new(g, latency, 1.0).unwrap()
    }

    fn path(g: &DirectedStGraph, names: &[&str]) -> Vec<Vertex> {
        names.iter().map(|n| g.vertex(n).unwrap()).collect()
    }

    fn flow_on(eq: &Equilibrium, p: &[Vertex]) -> f64 {
        let i = eq.flow.paths.iter().position(|q| q == p).unwrap();
        eq.flow.flow[i]
    }

    #[test]
    fn wheatstone_equilibrium() {
        let g = wheatstone();
        let eq = wardrop(&wheatstone_instance(g.clone()), WardropOptions::default()).unwrap();
        assert!((eq.latency - 2.0).abs() < 1e-9);
        assert!((flow_on(&eq, &path(&g, &["s", "u", "v", "t"])) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn without_the_bridge_flow_splits() {
        let g = wheatstone_without_bridge();
        let eq = wardrop(&wheatstone_instance(g.clone()), WardropOptions::default()).unwrap();
        assert!((eq.latency - 1.5).abs() < 1e-9);
        assert!((flow_on(&eq, &path(&g, &["s", "u", "t"])) - 0.5).abs() < 1e-9);
        assert!((flow_on(&eq, &path(&g, &["s", "v", "t"])) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn zero_demand() {
        let g = wheatstone();
        let inst = wheatstone_instance(g);
        let inst =
            TrafficInstance::new(inst.graph().clone(), inst.latencies().to_vec(), 0.0).unwrap();
        let eq = wardrop(&inst, WardropOptions::default()).unwrap();
        assert_eq!(eq.latency, 0.0);
        assert_eq!(eq.flow.value(), 0.0);
    }

    #[test]
    fn start_path_does_not_change_latency() {
        let g = wheatstone();
        let inst = wheatstone_instance(g);
        let n = acyclic_paths(inst.graph(), PATH_LIMIT).unwrap().len();
        assert_eq!(n, 3);
        for start in 0..n {
            let opts = WardropOptions {
                start: Some(start),
                ..Default::default()
            };
            assert!((wardrop(&inst, opts).unwrap().latency - 2.0).abs() < 2e-9);
        }
    }

    #[test]
    fn invalid_instances() {
        let g = wheatstone();
        assert!(matches!(
            TrafficInstance::new(g.clone(), vec![Affine::identity(); 4], 1.0),
            Err(TrafficError::WrongLength { .. })
        ));
        assert_eq!(
            TrafficInstance::new(g.clone(), vec![Affine::new(-1.0, 0.0); 5], 1.0),
            Err(TrafficError::BadLatency(0))
        );
        assert_eq!(
            TrafficInstance::new(g, vec![Affine::identity(); 5], -1.0),
            Err(TrafficError::BadDemand(-1.0))
        );
    }

    #[test]
    fn braess_on_w_and_c() {
        let g = wheatstone();
        let Vulnerability::Vulnerable(w) = vulnerable(&g).unwrap() else {
            panic!()
        };
        let demo = braess_demo(&g, &w, WardropOptions::default()).unwrap();
        assert!((demo.full.latency - 2.0).abs() < 1e-9);
        assert!((demo.sub.latency - 1.5).abs() < 1e-9);
        assert!(demo.improves());
        let c = graph_c();
        let Vulnerability::Vulnerable(w) = vulnerable(&c).unwrap() else {
            panic!()
        };
        let demo = braess_demo(&c, &w, WardropOptions::default()).unwrap();
        assert!(demo.full.latency > demo.sub.latency + 0.25);
        assert_eq!(vulnerable(&graph_b()), Ok(Vulnerability::NotVulnerable));
    }

    #[test]
    fn cyclic_graphs_route_on_acyclic_paths() {
        let g = graph_b();
        assert_eq!(
            acyclic_paths(&g, PATH_LIMIT).unwrap(),
            vec![path(&g, &["s", "u", "v", "t"])]
        );
        assert_eq!(acyclic_paths(&g, 0), Err(TrafficError::TooManyPaths(0)));
    }
}
