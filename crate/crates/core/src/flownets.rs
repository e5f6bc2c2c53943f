//! Edge-capacitated flow networks: maximum and saturating flows, cuts, and
//! the edge-weakness decision.
//!
//! A flow is saturating when every source-to-sink path has an edge at full
//! capacity. A graph is edge-weak when some capacities admit a saturating flow
//! that is not maximum. That happens exactly when some cut `(S, T)` is
//! *trapping*: every cut whose cut-set lies inside the cut-set of `(S, T)` has
//! an edge from its sink side back to its source side, so some walk crosses
//! it twice.

use num_rational::Rational64;
use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{DirectedStGraph, Vertex, VertexSet};
use crate::maxflow;
use crate::ttsp::{self, TtspResult, WheatstoneWitness};

/// Largest vertex count for which cyclic graphs are searched exhaustively.
pub const DEFAULT_EXHAUSTIVE_BOUND: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlowError {
    #[error("expected {expected} values, one per edge, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("negative capacity on edge {0}")]
    NegativeCapacity(usize),
    #[error("edge {edge} carries {flow}, outside [0, {capacity}]")]
    OverCapacity {
        edge: usize,
        flow: Rational64,
        capacity: Rational64,
    },
    #[error("flow is not conserved at vertex {0}")]
    NotConserved(Vertex),
    #[error("exhaustive bound exceeded: {n} vertices on a cyclic graph, bound {bound}")]
    BoundExceeded { n: usize, bound: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacitatedNetwork {
    graph: DirectedStGraph,
    capacity: Vec<Rational64>,
}

impl CapacitatedNetwork {
    pub fn new(graph: DirectedStGraph, capacity: Vec<Rational64>) -> Result<Self, FlowError> {
        if capacity.len() != graph.edge_count() {
            return Err(FlowError::WrongLength {
                expected: graph.edge_count(),
                got: capacity.len(),
            });
        }
        if let Some(e) = capacity.iter().position(|c| *c < Rational64::zero()) {
            return Err(FlowError::NegativeCapacity(e));
        }
        Ok(CapacitatedNetwork { graph, capacity })
    }

    pub fn uniform(graph: DirectedStGraph, c: Rational64) -> Self {
        let capacity = vec![c; graph.edge_count()];
        Self::new(graph, capacity).expect("uniform capacities are valid")
    }

    pub fn graph(&self) -> &DirectedStGraph {
        &self.graph
    }

    pub fn capacity(&self, e: usize) -> Rational64 {
        self.capacity[e]
    }

    pub fn capacities(&self) -> &[Rational64] {
        &self.capacity
    }
}

/// Flow on each edge, by edge index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeFlow {
    pub flow: Vec<Rational64>,
}

impl EdgeFlow {
    pub fn zero(g: &DirectedStGraph) -> Self {
        EdgeFlow {
            flow: vec![Rational64::zero(); g.edge_count()],
        }
    }

    /// Flow of one unit along each occurrence of an edge in `walk`.
    pub fn along_walk(g: &DirectedStGraph, walk: &[Vertex]) -> Self {
        let mut f = Self::zero(g);
        for w in walk.windows(2) {
            let e = g.edge_index(w[0], w[1]).expect("walk follows edges");
            f.flow[e] += 1;
        }
        f
    }

    /// Total flow leaving the source.
    pub fn value(&self, g: &DirectedStGraph) -> Rational64 {
        g.edges()
            .iter()
            .zip(&self.flow)
            .filter(|((u, _), _)| *u == g.source())
            .map(|(_, f)| *f)
            .sum()
    }

    pub fn check_feasible(&self, net: &CapacitatedNetwork) -> Result<(), FlowError> {
        let g = net.graph();
        if self.flow.len() != g.edge_count() {
            return Err(FlowError::WrongLength {
                expected: g.edge_count(),
                got: self.flow.len(),
            });
        }
        for (e, (&f, &c)) in self.flow.iter().zip(&net.capacity).enumerate() {
            if f < Rational64::zero() || f > c {
                return Err(FlowError::OverCapacity {
                    edge: e,
                    flow: f,
                    capacity: c,
                });
            }
        }
        let mut balance = vec![Rational64::zero(); g.n()];
        for (&(u, v), &f) in g.edges().iter().zip(&self.flow) {
            balance[u] -= f;
            balance[v] += f;
        }
        match g.interior().find(|&v| !balance[v].is_zero()) {
            Some(v) => Err(FlowError::NotConserved(v)),
            None => Ok(()),
        }
    }
}

/// A maximum flow by shortest augmenting paths.
pub fn max_flow(net: &CapacitatedNetwork) -> EdgeFlow {
    let g = net.graph();
    let arcs: Vec<(usize, usize, Rational64)> = g
        .edges()
        .iter()
        .zip(&net.capacity)
        .map(|(&(u, v), &c)| (u, v, c))
        .collect();
    let (_, flow) = maxflow::max_flow(g.n(), g.source(), g.sink(), &arcs);
    EdgeFlow { flow }
}

/// True iff no source-to-sink path uses only edges strictly below capacity.
pub fn is_saturating(net: &CapacitatedNetwork, f: &EdgeFlow) -> bool {
    let g = net.graph();
    let mut seen = vec![false; g.n()];
    seen[g.source()] = true;
    let mut stack = vec![g.source()];
    while let Some(u) = stack.pop() {
        for &v in g.succ(u) {
            let e = g.edge_index(u, v).expect("adjacent");
            if f.flow[e] < net.capacity[e] && !seen[v] {
                if v == g.sink() {
                    return false;
                }
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    true
}

/// A bipartition `(S, T)` stored as the source side `S`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cut {
    pub source_side: VertexSet,
}

impl Cut {
    pub fn new(source_side: VertexSet) -> Self {
        Cut { source_side }
    }

    pub fn sink_side(&self) -> VertexSet {
        VertexSet::full(self.source_side.universe()).difference(&self.source_side)
    }

    /// Indices of the edges from `S` to `T`.
    pub fn cutset(&self, g: &DirectedStGraph) -> Vec<usize> {
        g.edges()
            .iter()
            .enumerate()
            .filter(|(_, (u, v))| self.source_side.contains(*u) && !self.source_side.contains(*v))
            .map(|(e, _)| e)
            .collect()
    }

    pub fn is_valid(&self, g: &DirectedStGraph) -> bool {
        self.source_side.universe() == g.n()
            && self.source_side.contains(g.source())
            && !self.source_side.contains(g.sink())
    }
}

/// `S` is reachable from `s` inside `S` and `T` reaches `t` inside `T`.
pub fn is_connected_cut(g: &DirectedStGraph, cut: &Cut) -> bool {
    if !cut.is_valid(g) {
        return false;
    }
    let sink_side = cut.sink_side();
    g.source_component(&sink_side) == cut.source_side
        && g.sink_component(&cut.source_side) == sink_side
}

/// Vertices that lie on the source side of every cut whose cut-set is inside
/// `cutset` and which no edge enters from its sink side: the closure of `s`
/// under edges outside `cutset` forwards and all edges backwards.
fn forced_source_side(g: &DirectedStGraph, cutset: &[usize]) -> VertexSet {
    let mut in_cutset = vec![false; g.edge_count()];
    for &e in cutset {
        in_cutset[e] = true;
    }
    let mut side = VertexSet::singleton(g.n(), g.source());
    let mut stack = vec![g.source()];
    while let Some(u) = stack.pop() {
        let forward = g
            .succ(u)
            .iter()
            .filter(|&&v| !in_cutset[g.edge_index(u, v).expect("adjacent")]);
        for &v in forward.chain(g.pred(u)) {
            if !side.contains(v) {
                side.insert(v);
                stack.push(v);
            }
        }
    }
    side
}

/// True iff every cut whose cut-set lies inside the cut-set of `cut` has an
/// edge from its sink side to its source side.
pub fn is_trapping_cut(g: &DirectedStGraph, cut: &Cut) -> bool {
    cut.is_valid(g) && forced_source_side(g, &cut.cutset(g)).contains(g.sink())
}

/// A trapping cut and two cut-set edges `(u, v)`, `(x, y)` joined by a walk
/// `v ⇝ x` that leaves the cut-set's sink side through an edge back to the
/// source side. The two edges may coincide.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutWitness {
    pub cut: Cut,
    pub first: (Vertex, Vertex),
    pub second: (Vertex, Vertex),
}

impl CutWitness {
    pub fn is_valid(&self, g: &DirectedStGraph) -> bool {
        let cutset = self.cut.cutset(g);
        let in_cutset =
            |(a, b): (Vertex, Vertex)| g.edge_index(a, b).is_some_and(|e| cutset.contains(&e));
        is_trapping_cut(g, &self.cut)
            && in_cutset(self.first)
            && in_cutset(self.second)
            && g.shortest_walk(self.first.1, self.second.0, &g.empty_set())
                .is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeWeakWitness {
    Cut(CutWitness),
    /// Used for acyclic graphs above the exhaustive bound, where the absence of
    /// a series-parallel decomposition decides the question.
    Wheatstone(WheatstoneWitness),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeWeakness {
    EdgeWeak(EdgeWeakWitness),
    NotEdgeWeak,
}

impl EdgeWeakness {
    pub fn is_edge_weak(&self) -> bool {
        matches!(self, EdgeWeakness::EdgeWeak(_))
    }
}

/// Decides edge-weakness. Acyclic graphs go through series-parallel
/// recognition; cyclic graphs are searched exhaustively up to `bound`
/// vertices.
pub fn edge_weak(g: &DirectedStGraph, bound: usize) -> Result<EdgeWeakness, FlowError> {
    if g.is_acyclic() {
        let witness = match ttsp::is_ttsp(g).expect("acyclic") {
            TtspResult::Yes(_) => return Ok(EdgeWeakness::NotEdgeWeak),
            TtspResult::No(_) if g.n() <= bound => exhaustive_witness(g).map(EdgeWeakWitness::Cut),
            TtspResult::No(_) => None,
        };
        let witness = witness.unwrap_or_else(|| {
            EdgeWeakWitness::Wheatstone(
                ttsp::contains_wheatstone(g)
                    .expect("acyclic graphs need no path search")
                    .expect("non-TTSP graphs contain W"),
            )
        });
        return Ok(EdgeWeakness::EdgeWeak(witness));
    }
    if g.n() > bound {
        return Err(FlowError::BoundExceeded { n: g.n(), bound });
    }
    Ok(match exhaustive_witness(g) {
        Some(w) => EdgeWeakness::EdgeWeak(EdgeWeakWitness::Cut(w)),
        None => EdgeWeakness::NotEdgeWeak,
    })
}

fn cut_from_mask(g: &DirectedStGraph, mask: u64) -> Cut {
    let mut side = VertexSet::singleton(g.n(), g.source());
    for v in g.interior() {
        if mask >> (v - 1) & 1 == 1 {
            side.insert(v);
        }
    }
    Cut::new(side)
}

/// First edge of `walk` leaving `side`.
fn exit_edge(walk: &[Vertex], side: &VertexSet) -> Option<(Vertex, Vertex)> {
    walk.windows(2)
        .find(|w| side.contains(w[0]) && !side.contains(w[1]))
        .map(|w| (w[0], w[1]))
}

/// The crossing edges of a trapping cut: `s ⇝ y` leaves `S` through the
/// first, `y → z` returns to `S`, and `z ⇝ t` leaves through the second.
fn crossing_pair(g: &DirectedStGraph, cut: &Cut) -> Option<CutWitness> {
    let side = &cut.source_side;
    let (y, z) = g
        .edges()
        .iter()
        .copied()
        .find(|&(y, z)| !side.contains(y) && side.contains(z))?;
    let into = g.shortest_walk(g.source(), y, &g.empty_set())?;
    let out = g.shortest_walk(z, g.sink(), &g.empty_set())?;
    Some(CutWitness {
        cut: cut.clone(),
        first: exit_edge(&into, side)?,
        second: exit_edge(&out, side)?,
    })
}

/// First trapping cut in bitmask order over interior vertices, with its
/// crossing edges.
pub fn exhaustive_witness(g: &DirectedStGraph) -> Option<CutWitness> {
    assert!(g.n() <= 64, "bitmask enumeration needs at most 64 vertices");
    let masks = 1u64 << (g.n() - 2);
    (0..masks).into_par_iter().find_map_first(|mask| {
        let cut = cut_from_mask(g, mask);
        if !is_trapping_cut(g, &cut) {
            return None;
        }
        crossing_pair(g, &cut)
    })
}

/// Every connected cut, in bitmask order.
pub fn connected_cuts(g: &DirectedStGraph) -> Vec<Cut> {
    assert!(g.n() <= 64, "bitmask enumeration needs at most 64 vertices");
    let masks = 1u64 << (g.n() - 2);
    (0..masks)
        .into_par_iter()
        .map(|mask| cut_from_mask(g, mask))
        .filter(|cut| is_connected_cut(g, cut))
        .collect()
}

/// Capacities under which a flow is saturating but not maximum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaturationCertificate {
    pub network: CapacitatedNetwork,
    pub flow: EdgeFlow,
    pub max_value: Rational64,
}

/// Builds capacities from a trapping cut. The flow sends one unit along a
/// shortest walk through each edge, so every edge carries flow; cut-set edges
/// get exactly their flow as capacity and every other edge gets one more than
/// the cut-set total, or its own flow if that is larger.
pub fn saturation_certificate(g: &DirectedStGraph, w: &CutWitness) -> SaturationCertificate {
    let none = g.empty_set();
    let mut flow = EdgeFlow::zero(g);
    for &(a, b) in g.edges() {
        let mut walk = match a == g.source() {
            true => vec![a],
            false => g.shortest_walk(g.source(), a, &none).expect("st-graph"),
        };
        match b == g.sink() {
            true => walk.push(b),
            false => walk.extend(g.shortest_walk(b, g.sink(), &none).expect("st-graph")),
        }
        for (e, f) in EdgeFlow::along_walk(g, &walk).flow.into_iter().enumerate() {
            flow.flow[e] += f;
        }
    }
    let cutset = w.cut.cutset(g);
    let total: Rational64 = cutset.iter().map(|&e| flow.flow[e]).sum();
    let heaviest = flow.flow.iter().copied().max().unwrap_or_default();
    let other = heaviest.max(total + 1);
    let capacity = (0..g.edge_count())
        .map(|e| {
            if cutset.contains(&e) {
                flow.flow[e]
            } else {
                other
            }
        })
        .collect();
    let network = CapacitatedNetwork::new(g.clone(), capacity).expect("non-negative");
    let max_value = max_flow(&network).value(g);
    SaturationCertificate {
        network,
        flow,
        max_value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::samples::*;

    fn r(x: i64) -> Rational64 {
        Rational64::from_integer(x)
    }

    fn cut(g: &DirectedStGraph, names: &[&str]) -> Cut {
        Cut::new(g.set(names))
    }

    #[test]
    fn max_flow_values() {
        let w = wheatstone();
        let net = CapacitatedNetwork::uniform(w.clone(), r(1));
        assert_eq!(max_flow(&net).value(&w), r(2));
        let net = CapacitatedNetwork::uniform(w.clone(), r(0));
        assert_eq!(max_flow(&net).value(&w), r(0));
        let d = graph_d();
        let net = CapacitatedNetwork::uniform(d.clone(), r(1));
        let f = max_flow(&net);
        f.check_feasible(&net).unwrap();
        assert_eq!(f.value(&d), r(1));
    }

    #[test]
    fn saturating_but_not_maximum_on_w() {
        let w = wheatstone();
        let net = CapacitatedNetwork::uniform(w.clone(), r(1));
        let walk = [
            w.source(),
            w.vertex("u").unwrap(),
            w.vertex("v").unwrap(),
            w.sink(),
        ];
        let f = EdgeFlow::along_walk(&w, &walk);
        f.check_feasible(&net).unwrap();
        assert!(is_saturating(&net, &f));
        assert_eq!(f.value(&w), r(1));
        assert!(!is_saturating(&net, &EdgeFlow::zero(&w)));
        assert!(is_saturating(&net, &max_flow(&net)));
    }

    #[test]
    fn infeasible_flows_are_rejected() {
        let w = wheatstone();
        let net = CapacitatedNetwork::uniform(w.clone(), r(1));
        let mut f = EdgeFlow::zero(&w);
        f.flow[0] = r(1);
        assert!(matches!(
            f.check_feasible(&net),
            Err(FlowError::NotConserved(_))
        ));
        f.flow[0] = r(2);
        assert!(matches!(
            f.check_feasible(&net),
            Err(FlowError::OverCapacity { .. })
        ));
        assert!(CapacitatedNetwork::new(w.clone(), vec![r(-1); 5]).is_err());
    }

    #[test]
    fn connected_cut_examples() {
        let d = graph_d();
        assert!(is_connected_cut(&d, &cut(&d, &["s", "u", "x"])));
        let a = graph_a();
        assert!(is_connected_cut(&a, &cut(&a, &["s"])));
        assert_eq!(
            connected_cuts(&a),
            vec![cut(&a, &["s"]), cut(&a, &["s", "u", "v"])]
        );
        let b = graph_b();
        // v sits on the source side but is only reachable through u.
        assert!(!is_connected_cut(&b, &cut(&b, &["s", "v"])));
    }

    #[test]
    fn edge_weakness_verdicts() {
        assert_eq!(
            edge_weak(&graph_a(), 20).unwrap(),
            EdgeWeakness::NotEdgeWeak
        );
        for g in [graph_b(), graph_d(), wheatstone(), graph_c()] {
            match edge_weak(&g, 20).unwrap() {
                EdgeWeakness::EdgeWeak(EdgeWeakWitness::Cut(w)) => assert!(w.is_valid(&g), "{g:?}"),
                other => panic!("{g:?}: {other:?}"),
            }
        }
        assert_eq!(
            edge_weak(&diamond(), 20).unwrap(),
            EdgeWeakness::NotEdgeWeak
        );
    }

    #[test]
    fn named_cuts_are_crossed_twice() {
        for (g, side) in [(graph_b(), &["s", "u"][..]), (graph_d(), &["s", "u", "x"])] {
            let c = cut(&g, side);
            assert!(is_connected_cut(&g, &c));
            assert!(is_trapping_cut(&g, &c));
            assert!(crossing_pair(&g, &c).unwrap().is_valid(&g));
        }
    }

    #[test]
    fn trapping_cut_need_not_be_connected() {
        let g = DirectedStGraph::from_named_edges(
            "s",
            "t",
            &[
                ("s", "v1"),
                ("s", "v2"),
                ("v1", "t"),
                ("v2", "v3"),
                ("v2", "t"),
                ("v3", "v1"),
            ],
        )
        .unwrap();
        assert!(connected_cuts(&g).iter().all(|c| !is_trapping_cut(&g, c)));
        let c = cut(&g, &["s", "v1"]);
        assert!(!is_connected_cut(&g, &c));
        assert!(is_trapping_cut(&g, &c));
        // Unit capacities: one unit along s v2 v3 v1 t blocks every path.
        let net = CapacitatedNetwork::uniform(g.clone(), r(1));
        let names = ["s", "v2", "v3", "v1", "t"];
        let walk: Vec<Vertex> = names.iter().map(|x| g.vertex(x).unwrap()).collect();
        let f = EdgeFlow::along_walk(&g, &walk);
        assert!(is_saturating(&net, &f));
        assert_eq!(max_flow(&net).value(&g), r(2));
        assert!(edge_weak(&g, 20).unwrap().is_edge_weak());
    }

    #[test]
    fn bound_applies_to_cyclic_graphs_only() {
        assert_eq!(
            edge_weak(&graph_b(), 3),
            Err(FlowError::BoundExceeded { n: 4, bound: 3 })
        );
        match edge_weak(&wheatstone(), 3).unwrap() {
            EdgeWeakness::EdgeWeak(EdgeWeakWitness::Wheatstone(_)) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn certificates_are_saturating_and_not_maximum() {
        for g in [graph_b(), graph_d(), wheatstone(), graph_c()] {
            let Some(w) = exhaustive_witness(&g) else {
                panic!("{g:?}")
            };
            let cert = saturation_certificate(&g, &w);
            cert.flow.check_feasible(&cert.network).unwrap();
            assert!(is_saturating(&cert.network, &cert.flow));
            assert!(cert.max_value > cert.flow.value(&g));
        }
    }
}
