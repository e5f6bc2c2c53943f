//! Directed st-graphs, vertex sets and reachability.
//!
//! Vertices are dense indices `0..n`; after construction the source is always
//! `0` and the sink is always `n - 1`. Walks may repeat vertices, so every
//! question asked here reduces to plain reachability in an induced subgraph.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

pub type Vertex = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph needs distinct source and sink")]
    SourceIsSink,
    #[error("vertex index {0} out of range")]
    VertexOutOfRange(usize),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("parallel edge `{0}` -> `{1}`")]
    ParallelEdge(String, String),
    #[error("source `{0}` has incoming edges")]
    SourceHasInEdges(String),
    #[error("sink `{0}` has outgoing edges")]
    SinkHasOutEdges(String),
    #[error("sink is unreachable from source")]
    Disconnected,
    #[error("vertices on no source-to-sink walk: {}", .0.join(", "))]
    OffPath(Vec<String>),
}

/// What to do with vertices that lie on no source-to-sink walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OffPathPolicy {
    #[default]
    Reject,
    Prune,
}

/// A subset of the vertices of a graph, stored as a fixed-width bit set.
///
/// Ordering is lexicographic on the sorted member list, which is the
/// tie-break order used throughout the crate.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet(FixedBitSet);

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet(FixedBitSet::with_capacity(n))
    }

    pub fn full(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        VertexSet(bits)
    }

    pub fn singleton(n: usize, v: Vertex) -> Self {
        let mut set = Self::empty(n);
        set.insert(v);
        set
    }

    pub fn from_vertices(n: usize, vs: impl IntoIterator<Item = Vertex>) -> Self {
        let mut set = Self::empty(n);
        for v in vs {
            set.insert(v);
        }
        set
    }

    /// Size of the universe this set lives in.
    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.contains(v)
    }

    pub fn insert(&mut self, v: Vertex) {
        self.0.insert(v);
    }

    pub fn remove(&mut self, v: Vertex) {
        self.0.set(v, false);
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.0.ones()
    }

    pub fn to_vec(&self) -> Vec<Vertex> {
        self.iter().collect()
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut bits = self.0.clone();
        bits.union_with(&other.0);
        VertexSet(bits)
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let mut bits = self.0.clone();
        bits.intersect_with(&other.0);
        VertexSet(bits)
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let mut bits = self.0.clone();
        bits.difference_with(&other.0);
        VertexSet(bits)
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        self.0.union_with(&other.0);
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn first(&self) -> Option<Vertex> {
        self.0.minimum()
    }
}

impl Ord for VertexSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for VertexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Index maps from a parent graph to a graph derived from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relabel {
    /// Parent vertex -> new vertex (if kept).
    pub vertex: Vec<Option<Vertex>>,
    /// Parent edge index -> new edge index (if kept).
    pub edge: Vec<Option<usize>>,
    /// New vertex -> parent vertex.
    pub to_parent: Vec<Vertex>,
    /// New edge index -> parent edge index.
    pub edge_to_parent: Vec<usize>,
}

/// A simple directed graph with a designated source and sink in which every
/// vertex lies on some source-to-sink walk.
#[derive(Clone, PartialEq, Eq)]
pub struct DirectedStGraph {
    names: Vec<String>,
    edges: Vec<(Vertex, Vertex)>,
    succ: Vec<Vec<Vertex>>,
    pred: Vec<Vec<Vertex>>,
    edge_ids: HashMap<(Vertex, Vertex), usize>,
}

impl fmt::Debug for DirectedStGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .edges
            .iter()
            .map(|&(u, v)| format!("{}->{}", self.names[u], self.names[v]))
            .collect();
        f.debug_struct("DirectedStGraph")
            .field("vertices", &self.names)
            .field("edges", &edges)
            .finish()
    }
}

impl DirectedStGraph {
    /// Builds a graph from named vertices and index edges.
    ///
    /// Vertices are reordered so that `source` becomes `0` and `sink` becomes
    /// `n - 1`; the remaining vertices keep their relative order. Edge order is
    /// preserved.
    pub fn build(
        names: Vec<String>,
        edges: &[(usize, usize)],
        source: usize,
        sink: usize,
        policy: OffPathPolicy,
    ) -> Result<(Self, Relabel), GraphError> {
        let n = names.len();
        if source == sink {
            return Err(GraphError::SourceIsSink);
        }
        for &v in [source, sink]
            .iter()
            .chain(edges.iter().flat_map(|(a, b)| [a, b]))
        {
            if v >= n {
                return Err(GraphError::VertexOutOfRange(v));
            }
        }
        let mut seen = HashMap::new();
        for &(u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(names[u].clone()));
            }
            if seen.insert((u, v), ()).is_some() {
                return Err(GraphError::ParallelEdge(names[u].clone(), names[v].clone()));
            }
            if v == source {
                return Err(GraphError::SourceHasInEdges(names[source].clone()));
            }
            if u == sink {
                return Err(GraphError::SinkHasOutEdges(names[sink].clone()));
            }
        }

        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for &(u, v) in edges {
            succ[u].push(v);
            pred[v].push(u);
        }
        let fwd = bfs(n, source, &succ, |_| true);
        let bwd = bfs(n, sink, &pred, |_| true);
        if !fwd[sink] {
            return Err(GraphError::Disconnected);
        }
        let on_path: Vec<bool> = (0..n).map(|v| fwd[v] && bwd[v]).collect();
        let off: Vec<String> = (0..n)
            .filter(|&v| !on_path[v])
            .map(|v| names[v].clone())
            .collect();
        if !off.is_empty() && policy == OffPathPolicy::Reject {
            return Err(GraphError::OffPath(off));
        }

        let mut order = vec![source];
        order.extend((0..n).filter(|&v| v != source && v != sink && on_path[v]));
        order.push(sink);
        let mut vertex = vec![None; n];
        for (new, &old) in order.iter().enumerate() {
            vertex[old] = Some(new);
        }
        let mut edge = vec![None; edges.len()];
        let mut new_edges = Vec::new();
        let mut edge_to_parent = Vec::new();
        for (i, &(u, v)) in edges.iter().enumerate() {
            if let (Some(a), Some(b)) = (vertex[u], vertex[v]) {
                edge[i] = Some(new_edges.len());
                new_edges.push((a, b));
                edge_to_parent.push(i);
            }
        }
        let new_names = order.iter().map(|&v| names[v].clone()).collect();
        let graph = Self::assemble(new_names, new_edges);
        Ok((
            graph,
            Relabel {
                vertex,
                edge,
                to_parent: order,
                edge_to_parent,
            },
        ))
    }

    fn assemble(names: Vec<String>, edges: Vec<(Vertex, Vertex)>) -> Self {
        let n = names.len();
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        let mut edge_ids = HashMap::with_capacity(edges.len());
        for (i, &(u, v)) in edges.iter().enumerate() {
            succ[u].push(v);
            pred[v].push(u);
            edge_ids.insert((u, v), i);
        }
        for list in succ.iter_mut().chain(pred.iter_mut()) {
            list.sort_unstable();
        }
        DirectedStGraph {
            names,
            edges,
            succ,
            pred,
            edge_ids,
        }
    }

    /// Builds a graph from edges given by vertex name. Vertices are numbered
    /// source first, then in order of first appearance, then sink.
    pub fn from_named_edges(
        source: &str,
        sink: &str,
        edges: &[(&str, &str)],
    ) -> Result<Self, GraphError> {
        let mut names: Vec<String> = vec![source.to_string()];
        let mut index: HashMap<&str, usize> = HashMap::new();
        index.insert(source, 0);
        for &(a, b) in edges {
            for name in [a, b] {
                if name != sink && !index.contains_key(name) {
                    index.insert(name, names.len());
                    names.push(name.to_string());
                }
            }
        }
        index.insert(sink, names.len());
        names.push(sink.to_string());
        let idx: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (index[a], index[b])).collect();
        let n = names.len();
        Self::build(names, &idx, 0, n - 1, OffPathPolicy::Reject).map(|(g, _)| g)
    }

    /// Builds a graph on `0..n` with source `0` and sink `n - 1`, naming
    /// vertices `s`, `v1`, ..., `t`.
    pub fn from_edges(
        n: usize,
        edges: &[(usize, usize)],
        policy: OffPathPolicy,
    ) -> Result<(Self, Relabel), GraphError> {
        let names = (0..n)
            .map(|i| match i {
                0 => "s".to_string(),
                i if i + 1 == n => "t".to_string(),
                i => format!("v{i}"),
            })
            .collect();
        Self::build(names, edges, 0, n.saturating_sub(1), policy)
    }

    /// The graph keeping only the edges selected by `keep`, with off-path
    /// vertices pruned.
    pub fn edge_subgraph(
        &self,
        keep: impl Fn(usize) -> bool,
    ) -> Result<(Self, Relabel), GraphError> {
        let kept_idx: Vec<usize> = (0..self.edges.len()).filter(|&i| keep(i)).collect();
        let kept: Vec<(usize, usize)> = kept_idx.iter().map(|&i| self.edges[i]).collect();
        let (g, mut relabel) = Self::build(
            self.names.clone(),
            &kept,
            0,
            self.n() - 1,
            OffPathPolicy::Prune,
        )?;
        let mut edge = vec![None; self.edges.len()];
        for (k, &i) in kept_idx.iter().enumerate() {
            edge[i] = relabel.edge[k];
        }
        for parent in relabel.edge_to_parent.iter_mut() {
            *parent = kept_idx[*parent];
        }
        relabel.edge = edge;
        Ok((g, relabel))
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn source(&self) -> Vertex {
        0
    }

    pub fn sink(&self) -> Vertex {
        self.names.len() - 1
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn succ(&self, v: Vertex) -> &[Vertex] {
        &self.succ[v]
    }

    pub fn pred(&self, v: Vertex) -> &[Vertex] {
        &self.pred[v]
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.edge_ids.contains_key(&(u, v))
    }

    pub fn edge_index(&self, u: Vertex, v: Vertex) -> Option<usize> {
        self.edge_ids.get(&(u, v)).copied()
    }

    pub fn name(&self, v: Vertex) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Option<Vertex> {
        self.names.iter().position(|n| n == name)
    }

    /// Vertex set from names; panics on unknown names (test convenience).
    pub fn set(&self, names: &[&str]) -> VertexSet {
        VertexSet::from_vertices(
            self.n(),
            names.iter().map(|name| {
                self.vertex(name)
                    .unwrap_or_else(|| panic!("unknown vertex `{name}`"))
            }),
        )
    }

    pub fn set_names(&self, set: &VertexSet) -> Vec<String> {
        set.iter().map(|v| self.names[v].clone()).collect()
    }

    pub fn empty_set(&self) -> VertexSet {
        VertexSet::empty(self.n())
    }

    pub fn interior(&self) -> impl Iterator<Item = Vertex> {
        1..self.n() - 1
    }

    pub fn is_acyclic(&self) -> bool {
        let n = self.n();
        let mut indeg: Vec<usize> = (0..n).map(|v| self.pred[v].len()).collect();
        let mut queue: VecDeque<Vertex> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = queue.pop_front() {
            seen += 1;
            for &w in &self.succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        seen == n
    }

    /// Vertices reachable from `from` using only vertices outside `removed`.
    /// Empty if `from` itself is removed.
    pub fn forward_reach(&self, from: Vertex, removed: &VertexSet) -> VertexSet {
        if removed.contains(from) {
            return self.empty_set();
        }
        let seen = bfs(self.n(), from, &self.succ, |v| !removed.contains(v));
        VertexSet::from_vertices(self.n(), (0..self.n()).filter(|&v| seen[v]))
    }

    /// Vertices that reach `to` using only vertices outside `removed`.
    pub fn backward_reach(&self, to: Vertex, removed: &VertexSet) -> VertexSet {
        if removed.contains(to) {
            return self.empty_set();
        }
        let seen = bfs(self.n(), to, &self.pred, |v| !removed.contains(v));
        VertexSet::from_vertices(self.n(), (0..self.n()).filter(|&v| seen[v]))
    }

    /// Vertices that reach the sink in `G[V \ removed]`.
    pub fn sink_component(&self, removed: &VertexSet) -> VertexSet {
        self.backward_reach(self.sink(), removed)
    }

    /// Vertices reachable from the source in `G[V \ removed]`.
    pub fn source_component(&self, removed: &VertexSet) -> VertexSet {
        self.forward_reach(self.source(), removed)
    }

    /// `u ⊑ A`: every walk from `u` to the sink meets `A`.
    pub fn covered(&self, u: Vertex, a: &VertexSet) -> bool {
        a.contains(u) || !self.forward_reach(u, a).contains(self.sink())
    }

    /// `A ⪯ u`: every walk from the source to `u` meets `A`.
    pub fn precedes(&self, a: &VertexSet, u: Vertex) -> bool {
        a.contains(u) || !self.source_component(a).contains(u)
    }

    /// Shortest walk of at least one edge from `a` to `b` (a cycle when
    /// `a == b`), avoiding `removed` except at the endpoints.
    pub fn shortest_walk(&self, a: Vertex, b: Vertex, removed: &VertexSet) -> Option<Vec<Vertex>> {
        let n = self.n();
        let mut parent = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        for &w in &self.succ[a] {
            if w == b {
                return Some(vec![a, b]);
            }
            if !removed.contains(w) && !seen[w] {
                seen[w] = true;
                parent[w] = a;
                queue.push_back(w);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &w in &self.succ[v] {
                if w == b {
                    let mut path = vec![b, v];
                    let mut cur = v;
                    while parent[cur] != a {
                        cur = parent[cur];
                        path.push(cur);
                    }
                    path.push(a);
                    path.reverse();
                    return Some(path);
                }
                if !removed.contains(w) && !seen[w] {
                    seen[w] = true;
                    parent[w] = v;
                    queue.push_back(w);
                }
            }
        }
        None
    }

    pub fn reachability(&self) -> ReachabilityMatrix {
        ReachabilityMatrix::build(self)
    }
}

fn bfs(
    n: usize,
    start: Vertex,
    adj: &[Vec<Vertex>],
    allowed: impl Fn(Vertex) -> bool,
) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] && allowed(w) {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Walk-reachability over one or more edges: entry `(u, v)` holds iff a
/// non-empty walk `u ⇝ v` exists, so the diagonal marks vertices on cycles.
#[derive(Clone, PartialEq, Eq)]
pub struct ReachabilityMatrix {
    rows: Vec<VertexSet>,
}

impl ReachabilityMatrix {
    pub fn build(g: &DirectedStGraph) -> Self {
        let n = g.n();
        let mut rows = Vec::with_capacity(n);
        for u in 0..n {
            let mut row = VertexSet::empty(n);
            let mut queue: VecDeque<Vertex> = VecDeque::new();
            for &w in g.succ(u) {
                if !row.contains(w) {
                    row.insert(w);
                    queue.push_back(w);
                }
            }
            while let Some(v) = queue.pop_front() {
                for &w in g.succ(v) {
                    if !row.contains(w) {
                        row.insert(w);
                        queue.push_back(w);
                    }
                }
            }
            rows.push(row);
        }
        ReachabilityMatrix { rows }
    }

    pub fn reaches(&self, u: Vertex, v: Vertex) -> bool {
        self.rows[u].contains(v)
    }

    pub fn on_cycle(&self, u: Vertex) -> bool {
        self.rows[u].contains(u)
    }

    pub fn row(&self, u: Vertex) -> &VertexSet {
        &self.rows[u]
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }
}

impl fmt::Debug for ReachabilityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            let line: String = (0..self.rows.len())
                .map(|v| if row.contains(v) { '1' } else { '0' })
                .collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// Small named graphs used by tests and the bundled data files.
pub mod samples {
    use super::DirectedStGraph;

    fn named(edges: &[(&str, &str)]) -> DirectedStGraph {
        DirectedStGraph::from_named_edges("s", "t", edges).expect("sample graph is valid")
    }

    /// The Wheatstone graph.
    pub fn wheatstone() -> DirectedStGraph {
        named(&[("s", "u"), ("s", "v"), ("u", "v"), ("u", "t"), ("v", "t")])
    }

    /// Wheatstone graph without the bridge `u -> v`.
    pub fn wheatstone_without_bridge() -> DirectedStGraph {
        named(&[("s", "u"), ("s", "v"), ("u", "t"), ("v", "t")])
    }

    /// Diamond with a middle layer; the topology of the first two-channel example.
    pub fn diamond() -> DirectedStGraph {
        named(&[
            ("s", "m"),
            ("m", "a"),
            ("m", "b"),
            ("a", "j"),
            ("b", "j"),
            ("j", "t"),
        ])
    }

    /// Diamond with the cross edge `a -> b`.
    pub fn diamond_with_cross() -> DirectedStGraph {
        named(&[
            ("s", "m"),
            ("m", "a"),
            ("m", "b"),
            ("a", "j"),
            ("a", "b"),
            ("b", "j"),
            ("j", "t"),
        ])
    }

    /// Graph whose complete chain misses a critical node.
    pub fn chain_misses_critical_node() -> DirectedStGraph {
        named(&[
            ("s", "a"),
            ("s", "p"),
            ("a", "u"),
            ("a", "b"),
            ("p", "b"),
            ("p", "c"),
            ("b", "u"),
            ("u", "t"),
            ("c", "t"),
        ])
    }

    /// Graph whose complete chain contains no critical mvs.
    pub fn chain_without_critical_mvs() -> DirectedStGraph {
        named(&[
            ("s", "a"),
            ("s", "p"),
            ("a", "a2"),
            ("a", "a1"),
            ("a2", "t"),
            ("a1", "b"),
            ("p", "b"),
            ("b", "t"),
        ])
    }

    pub fn graph_a() -> DirectedStGraph {
        named(&[("s", "u"), ("u", "v"), ("v", "u"), ("u", "t")])
    }

    pub fn graph_b() -> DirectedStGraph {
        named(&[("s", "u"), ("u", "v"), ("v", "u"), ("v", "t")])
    }

    pub fn graph_c() -> DirectedStGraph {
        named(&[
            ("s", "v1"),
            ("s", "v2"),
            ("v1", "v3"),
            ("v1", "v4"),
            ("v2", "v4"),
            ("v2", "v3"),
            ("v3", "t"),
            ("v4", "t"),
        ])
    }

    pub fn graph_d() -> DirectedStGraph {
        named(&[
            ("s", "u"),
            ("u", "v"),
            ("u", "x"),
            ("x", "y"),
            ("y", "x"),
            ("y", "v"),
            ("v", "t"),
        ])
    }

    pub fn single_edge() -> DirectedStGraph {
        named(&[("s", "t")])
    }
}

#[cfg(test)]
mod tests {
    use super::samples::*;
    use super::*;

    /// Walk enumeration up to a length bound; independent of the BFS code.
    fn walk_exists(
        g: &DirectedStGraph,
        from: Vertex,
        to: Vertex,
        avoid: &VertexSet,
        max_len: usize,
    ) -> bool {
        fn go(g: &DirectedStGraph, v: Vertex, to: Vertex, avoid: &VertexSet, left: usize) -> bool {
            if v == to {
                return true;
            }
            if left == 0 {
                return false;
            }
            g.succ(v)
                .iter()
                .any(|&w| !avoid.contains(w) && go(g, w, to, avoid, left - 1))
        }
        !avoid.contains(from) && go(g, from, to, avoid, max_len)
    }

    #[test]
    fn reachability_on_wheatstone() {
        let g = wheatstone();
        let m = g.reachability();
        let (u, v) = (g.vertex("u").unwrap(), g.vertex("v").unwrap());
        assert!(m.reaches(u, v));
        assert!(!m.reaches(v, u));
        assert!(m.reaches(g.source(), u) && m.reaches(g.source(), v));
        assert!(!m.reaches(u, g.source()));
        assert!((0..g.n()).all(|x| !m.on_cycle(x)));
    }

    #[test]
    fn reachability_single_edge() {
        let g = single_edge();
        let m = g.reachability();
        assert!(m.reaches(0, 1));
        assert!(!m.reaches(1, 0) && !m.on_cycle(0) && !m.on_cycle(1));
    }

    #[test]
    fn reachability_diagonal_on_graph_a() {
        let g = graph_a();
        let m = g.reachability();
        assert!(m.on_cycle(g.vertex("u").unwrap()));
        assert!(m.on_cycle(g.vertex("v").unwrap()));
        assert!(!m.on_cycle(g.source()) && !m.on_cycle(g.sink()));
    }

    #[test]
    fn covered_examples() {
        let g = chain_misses_critical_node();
        assert!(g.covered(g.vertex("b").unwrap(), &g.set(&["u"])));
        for v in 0..g.n() {
            assert!(g.covered(v, &g.set(&["t"])));
        }
        let w = wheatstone();
        assert!(!w.covered(w.vertex("u").unwrap(), &w.set(&["v"])));
        let u = w.vertex("u").unwrap();
        assert!(
            !walk_exists(&w, u, w.sink(), &w.set(&["v"]), w.n()) == w.covered(u, &w.set(&["v"]))
        );
    }

    #[test]
    fn precedes_examples() {
        let g = chain_without_critical_mvs();
        assert!(g.precedes(&g.set(&["a", "p"]), g.vertex("b").unwrap()));
        let src = g.set(&["s"]);
        assert!(g.interior().all(|v| g.precedes(&src, v)));
        let w = wheatstone();
        assert!(!w.precedes(&w.set(&["v"]), w.vertex("u").unwrap()));
    }

    #[test]
    fn components() {
        let w = wheatstone();
        let mid = w.set(&["u", "v"]);
        assert_eq!(w.sink_component(&mid), w.set(&["t"]));
        assert_eq!(w.source_component(&mid), w.set(&["s"]));
        let g = chain_misses_critical_node();
        assert_eq!(g.source_component(&g.set(&["a", "p"])), g.set(&["s"]));
        let all = VertexSet::full(g.n());
        assert_eq!(g.sink_component(&g.empty_set()), all);
        assert_eq!(g.source_component(&g.empty_set()), all);
        assert!(g.sink_component(&g.set(&["t"])).is_empty());
        assert!(g.source_component(&g.set(&["s"])).is_empty());
    }

    #[test]
    fn construction_rejects_bad_graphs() {
        assert!(matches!(
            DirectedStGraph::from_named_edges("s", "t", &[("s", "s"), ("s", "t")]),
            Err(GraphError::SelfLoop(_))
        ));
        assert!(matches!(
            DirectedStGraph::from_named_edges("s", "t", &[("s", "t"), ("s", "t")]),
            Err(GraphError::ParallelEdge(..))
        ));
        assert!(matches!(
            DirectedStGraph::from_named_edges("s", "t", &[("s", "a"), ("a", "s"), ("a", "t")]),
            Err(GraphError::SourceHasInEdges(_))
        ));
        assert!(matches!(
            DirectedStGraph::from_named_edges("s", "t", &[("s", "t"), ("t", "a")]),
            Err(GraphError::SinkHasOutEdges(_))
        ));
        match DirectedStGraph::from_named_edges("s", "t", &[("s", "t"), ("s", "x")]) {
            Err(GraphError::OffPath(names)) => assert_eq!(names, vec!["x".to_string()]),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            DirectedStGraph::from_named_edges("s", "t", &[("s", "a"), ("b", "t")]),
            Err(GraphError::Disconnected)
        ));
    }

    #[test]
    fn prune_drops_off_path_vertices() {
        let names = ["s", "x", "a", "t"].iter().map(|s| s.to_string()).collect();
        let (g, relabel) =
            DirectedStGraph::build(names, &[(0, 2), (2, 3), (0, 1)], 0, 3, OffPathPolicy::Prune)
                .unwrap();
        assert_eq!(g.names(), &["s", "a", "t"]);
        assert_eq!(relabel.edge, vec![Some(0), Some(1), None]);
        assert_eq!(relabel.vertex[1], None);
    }

    #[test]
    fn edge_subgraph_keeps_parent_indices() {
        let g = wheatstone();
        let bridge = g
            .edge_index(g.vertex("u").unwrap(), g.vertex("v").unwrap())
            .unwrap();
        let (h, relabel) = g.edge_subgraph(|e| e != bridge).unwrap();
        assert_eq!(h.edge_count(), 4);
        assert_eq!(relabel.edge[bridge], None);
        for (new, &old) in relabel.edge_to_parent.iter().enumerate() {
            let (a, b) = h.edges()[new];
            assert_eq!(g.edges()[old], (relabel.to_parent[a], relabel.to_parent[b]));
        }
    }

    #[test]
    fn vertex_set_order_is_lexicographic() {
        let a = VertexSet::from_vertices(6, [1, 4]);
        let b = VertexSet::from_vertices(6, [1, 2, 5]);
        let c = VertexSet::from_vertices(6, [2]);
        assert!(b < a && a < c);
    }
}
