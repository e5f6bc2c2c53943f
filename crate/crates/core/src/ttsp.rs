//! Two-terminal series-parallel recognition, Wheatstone subgraph detection
//! and cycle removal.
//!
//! The Wheatstone graph `W` has edges `s→u, s→v, u→v, u→t, v→t`. A graph
//! contains a subgraph homeomorphic to `W` iff it is vulnerable to Braess's
//! paradox; an acyclic graph avoids `W` iff it is series-parallel.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::graph::{DirectedStGraph, Relabel, Vertex, VertexSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TtspError {
    #[error("series-parallel recognition needs an acyclic graph")]
    Cyclic,
    #[error("path search exceeded {0} steps")]
    SearchLimit(usize),
}

/// Decomposition tree whose leaves are edge indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpTree {
    Edge(usize),
    Series(Vec<SpTree>),
    Parallel(Vec<SpTree>),
}

impl SpTree {
    fn series(a: SpTree, b: SpTree) -> SpTree {
        let mut parts = Vec::new();
        for t in [a, b] {
            match t {
                SpTree::Series(inner) => parts.extend(inner),
                other => parts.push(other),
            }
        }
        SpTree::Series(parts)
    }

    fn parallel(a: SpTree, b: SpTree) -> SpTree {
        let mut parts = Vec::new();
        for t in [a, b] {
            match t {
                SpTree::Parallel(inner) => parts.extend(inner),
                other => parts.push(other),
            }
        }
        SpTree::Parallel(parts)
    }

    /// Edge indices at the leaves, left to right.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            SpTree::Edge(e) => out.push(*e),
            SpTree::Series(parts) | SpTree::Parallel(parts) => {
                parts.iter().for_each(|p| p.collect_leaves(out))
            }
        }
    }

    /// The two terminals obtained by recomposing the tree over `g`, or `None`
    /// when a composition does not fit.
    pub fn terminals(&self, g: &DirectedStGraph) -> Option<(Vertex, Vertex)> {
        match self {
            SpTree::Edge(e) => g.edges().get(*e).copied(),
            SpTree::Series(parts) => {
                let mut ends = parts.iter().map(|p| p.terminals(g));
                let (first, mut last) = ends.next()??;
                for e in ends {
                    let (a, b) = e?;
                    if a != last {
                        return None;
                    }
                    last = b;
                }
                Some((first, last))
            }
            SpTree::Parallel(parts) => {
                let first = parts.first()?.terminals(g)?;
                parts
                    .iter()
                    .all(|p| p.terminals(g) == Some(first))
                    .then_some(first)
            }
        }
    }

    /// Recomposes to exactly the edges of `g`, between its source and sink.
    pub fn is_decomposition_of(&self, g: &DirectedStGraph) -> bool {
        let mut leaves = self.leaves();
        leaves.sort_unstable();
        self.terminals(g) == Some((g.source(), g.sink()))
            && leaves == (0..g.edge_count()).collect::<Vec<_>>()
    }
}

/// What is left when no series or parallel reduction applies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Kernel {
    pub edges: Vec<(Vertex, Vertex, SpTree)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TtspResult {
    Yes(SpTree),
    No(Kernel),
}

impl TtspResult {
    pub fn is_ttsp(&self) -> bool {
        matches!(self, TtspResult::Yes(_))
    }
}

type MultiEdge = Option<(Vertex, Vertex, SpTree)>;

/// Applies series contractions of interior vertices with one in-edge and one
/// out-edge, and (when `parallel`) merges of parallel edges, to a fixpoint.
fn reduce(n: usize, interior: impl Fn(Vertex) -> bool, edges: &mut [MultiEdge], parallel: bool) {
    loop {
        let mut changed = false;
        if parallel {
            let mut first: HashMap<(Vertex, Vertex), usize> = HashMap::new();
            for id in 0..edges.len() {
                let Some((u, v, _)) = edges[id] else { continue };
                match first.get(&(u, v)) {
                    Some(&keep) => {
                        let (_, _, tree) = edges[id].take().unwrap();
                        let slot = edges[keep].as_mut().unwrap();
                        let old = std::mem::replace(&mut slot.2, SpTree::Edge(usize::MAX));
                        slot.2 = SpTree::parallel(old, tree);
                        changed = true;
                    }
                    None => {
                        first.insert((u, v), id);
                    }
                }
            }
        }
        let mut indeg = vec![0; n];
        let mut outdeg = vec![0; n];
        let mut in_id = vec![usize::MAX; n];
        let mut out_id = vec![usize::MAX; n];
        for (id, e) in edges.iter().enumerate() {
            if let Some((u, v, _)) = e {
                outdeg[*u] += 1;
                out_id[*u] = id;
                indeg[*v] += 1;
                in_id[*v] = id;
            }
        }
        for v in (0..n).filter(|&v| interior(v)) {
            if indeg[v] != 1 || outdeg[v] != 1 {
                continue;
            }
            let (e1, e2) = (in_id[v], out_id[v]);
            if e1 == e2 {
                continue;
            }
            let (a, _, t1) = edges[e1].take().unwrap();
            let (_, b, t2) = edges[e2].take().unwrap();
            edges[e1] = Some((a, b, SpTree::series(t1, t2)));
            if in_id[b] == e2 {
                in_id[b] = e1;
            }
            indeg[v] = 0;
            outdeg[v] = 0;
            changed = true;
        }
        if !changed {
            return;
        }
    }
}

/// Series-parallel recognition by reduction to a single source-sink edge.
pub fn is_ttsp(g: &DirectedStGraph) -> Result<TtspResult, TtspError> {
    if !g.is_acyclic() {
        return Err(TtspError::Cyclic);
    }
    let mut edges: Vec<MultiEdge> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(u, v))| Some((u, v, SpTree::Edge(e))))
        .collect();
    let (s, t) = (g.source(), g.sink());
    reduce(g.n(), |v| v != s && v != t, &mut edges, true);
    let mut left: Vec<(Vertex, Vertex, SpTree)> = edges.into_iter().flatten().collect();
    if left.len() == 1 && left[0].0 == s && left[0].1 == t {
        return Ok(TtspResult::Yes(left.pop().unwrap().2));
    }
    Ok(TtspResult::No(Kernel { edges: left }))
}

/// A subdivision of `W` inside a graph, with the stems joining it to the
/// source and sink. Every path lists its vertices including both ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WheatstoneWitness {
    pub s_prime: Vertex,
    pub u: Vertex,
    pub v: Vertex,
    pub t_prime: Vertex,
    /// `s ⇝ s'`; just `[s]` when `s' = s`.
    pub stem_in: Vec<Vertex>,
    pub s_to_u: Vec<Vertex>,
    pub s_to_v: Vec<Vertex>,
    pub u_to_v: Vec<Vertex>,
    pub u_to_t: Vec<Vertex>,
    pub v_to_t: Vec<Vertex>,
    /// `t' ⇝ t`; just `[t]` when `t' = t`.
    pub stem_out: Vec<Vertex>,
}

impl WheatstoneWitness {
    /// The seven paths: stem in, the five branches of `W`, stem out.
    pub fn paths(&self) -> [&[Vertex]; 7] {
        [
            &self.stem_in,
            &self.s_to_u,
            &self.s_to_v,
            &self.u_to_v,
            &self.u_to_t,
            &self.v_to_t,
            &self.stem_out,
        ]
    }

    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        self.paths()
            .iter()
            .flat_map(|p| p.windows(2).map(|w| (w[0], w[1])))
            .collect()
    }

    /// Edge indices of the witness in `g`, sorted.
    pub fn edge_indices(&self, g: &DirectedStGraph) -> Vec<usize> {
        let mut ids: Vec<usize> = self
            .edges()
            .iter()
            .map(|&(a, b)| g.edge_index(a, b).expect("witness edge"))
            .collect();
        ids.sort_unstable();
        ids
    }

    pub fn map_vertices(&self, f: impl Fn(Vertex) -> Vertex) -> Self {
        let m = |p: &[Vertex]| p.iter().map(|&v| f(v)).collect::<Vec<_>>();
        WheatstoneWitness {
            s_prime: f(self.s_prime),
            u: f(self.u),
            v: f(self.v),
            t_prime: f(self.t_prime),
            stem_in: m(&self.stem_in),
            s_to_u: m(&self.s_to_u),
            s_to_v: m(&self.s_to_v),
            u_to_v: m(&self.u_to_v),
            u_to_t: m(&self.u_to_t),
            v_to_t: m(&self.v_to_t),
            stem_out: m(&self.stem_out),
        }
    }

    /// Checks ends, edges and internal disjointness of the seven paths.
    pub fn is_valid(&self, g: &DirectedStGraph) -> bool {
        let (s, t) = (g.source(), g.sink());
        let (sp, u, v, tp) = (self.s_prime, self.u, self.v, self.t_prime);
        let ends = [(s, sp), (sp, u), (sp, v), (u, v), (u, tp), (v, tp), (tp, t)];
        let branch = [sp, u, v, tp];
        if (0..4).any(|i| (i + 1..4).any(|j| branch[i] == branch[j]))
            || [sp, u, v].contains(&t)
            || [u, v, tp].contains(&s)
        {
            return false;
        }
        let mut used = VertexSet::from_vertices(g.n(), [s, t, sp, u, v, tp]);
        for (i, (p, &(a, b))) in self.paths().iter().zip(&ends).enumerate() {
            let stem = i == 0 || i == 6;
            let min_len = if stem && a == b { 1 } else { 2 };
            if p.len() < min_len || p.first() != Some(&a) || p.last() != Some(&b) {
                return false;
            }
            if !p.windows(2).all(|w| g.has_edge(w[0], w[1])) {
                return false;
            }
            for &x in p.iter().skip(1).take(p.len().saturating_sub(2)) {
                if used.contains(x) {
                    return false;
                }
                used.insert(x);
            }
        }
        true
    }

    /// Isolates the witness edges, smooths vertices with one in-edge and one
    /// out-edge, contracts the stems, and checks that exactly `W` remains.
    pub fn reduces_to_w(&self, g: &DirectedStGraph) -> bool {
        let keep = self.edge_indices(g);
        let Ok((h, _)) = g.edge_subgraph(|e| keep.binary_search(&e).is_ok()) else {
            return false;
        };
        let (s, t) = (h.source(), h.sink());
        let mut edges: Vec<MultiEdge> = h
            .edges()
            .iter()
            .map(|&(a, b)| Some((a, b, SpTree::Edge(0))))
            .collect();
        reduce(h.n(), |x| x != s && x != t, &mut edges, false);
        let mut left: Vec<(Vertex, Vertex)> = edges
            .into_iter()
            .flatten()
            .map(|(a, b, _)| (a, b))
            .collect();
        // A stem leaves a single edge at a terminal; fold its far end into it.
        for (terminal, outgoing) in [(s, true), (t, false)] {
            let at: Vec<usize> = (0..left.len())
                .filter(|&i| {
                    if outgoing {
                        left[i].0 == terminal
                    } else {
                        left[i].1 == terminal
                    }
                })
                .collect();
            if let [i] = at[..] {
                let far = if outgoing { left[i].1 } else { left[i].0 };
                left.remove(i);
                for e in left.iter_mut() {
                    if e.0 == far {
                        e.0 = terminal;
                    }
                    if e.1 == far {
                        e.1 = terminal;
                    }
                }
            }
        }
        if left.len() != 5 {
            return false;
        }
        let mut vertices: Vec<Vertex> = left.iter().flat_map(|&(a, b)| [a, b]).collect();
        vertices.sort_unstable();
        vertices.dedup();
        if vertices.len() != 4 || !vertices.contains(&s) || !vertices.contains(&t) {
            return false;
        }
        let mid: Vec<Vertex> = vertices.into_iter().filter(|&x| x != s && x != t).collect();
        let (a, b) = if left.contains(&(mid[0], mid[1])) {
            (mid[0], mid[1])
        } else {
            (mid[1], mid[0])
        };
        let mut expected = vec![(s, a), (s, b), (a, b), (a, t), (b, t)];
        expected.sort_unstable();
        left.sort_unstable();
        left == expected
    }
}

/// Reads the branch structure off an acyclic graph that is exactly a
/// subdivision of `W` plus stems.
fn parse_subdivision(h: &DirectedStGraph) -> Option<WheatstoneWitness> {
    let forks: Vec<Vertex> = (0..h.n()).filter(|&x| h.succ(x).len() == 2).collect();
    let joins: Vec<Vertex> = (0..h.n()).filter(|&x| h.pred(x).len() == 2).collect();
    if forks.len() != 2 || joins.len() != 2 {
        return None;
    }
    let none = h.empty_set();
    let reaches = |a: Vertex, b: Vertex| h.forward_reach(a, &none).contains(b);
    let (sp, u) = if reaches(forks[0], forks[1]) {
        (forks[0], forks[1])
    } else {
        (forks[1], forks[0])
    };
    let (v, tp) = if reaches(joins[0], joins[1]) {
        (joins[0], joins[1])
    } else {
        (joins[1], joins[0])
    };
    let stop = [sp, u, v, tp];
    let trace = |from: Vertex, next: Vertex| {
        let mut path = vec![from, next];
        let mut cur = next;
        while !stop.contains(&cur) {
            cur = *h.succ(cur).first()?;
            path.push(cur);
        }
        Some(path)
    };
    let mut stem_in = vec![sp];
    while stem_in.last() != Some(&h.source()) {
        stem_in.push(*h.pred(*stem_in.last().unwrap()).first()?);
    }
    stem_in.reverse();
    let mut stem_out = vec![tp];
    while stem_out.last() != Some(&h.sink()) {
        stem_out.push(*h.succ(*stem_out.last().unwrap()).first()?);
    }
    let from_sp: Vec<Vec<Vertex>> = h
        .succ(sp)
        .iter()
        .map(|&x| trace(sp, x))
        .collect::<Option<_>>()?;
    let from_u: Vec<Vec<Vertex>> = h
        .succ(u)
        .iter()
        .map(|&x| trace(u, x))
        .collect::<Option<_>>()?;
    let ending =
        |paths: &[Vec<Vertex>], end: Vertex| paths.iter().find(|p| p.last() == Some(&end)).cloned();
    let w = WheatstoneWitness {
        s_prime: sp,
        u,
        v,
        t_prime: tp,
        stem_in,
        s_to_u: ending(&from_sp, u)?,
        s_to_v: ending(&from_sp, v)?,
        u_to_v: ending(&from_u, v)?,
        u_to_t: ending(&from_u, tp)?,
        v_to_t: trace(v, *h.succ(v).first()?)?,
        stem_out,
    };
    w.is_valid(h).then_some(w)
}

/// A `W` subdivision inside an acyclic graph that is not series-parallel,
/// found by deleting every edge whose removal keeps the graph
/// non-series-parallel.
fn extract_from_dag(g: &DirectedStGraph) -> WheatstoneWitness {
    let mut cur = g.clone();
    let mut to_g: Vec<Vertex> = (0..g.n()).collect();
    let mut edge_to_g: Vec<usize> = (0..g.edge_count()).collect();
    for e in 0..g.edge_count() {
        let Ok(pos) = edge_to_g.binary_search(&e) else {
            continue;
        };
        let Ok((sub, rl)) = cur.edge_subgraph(|i| i != pos) else {
            continue;
        };
        if is_ttsp(&sub).expect("subgraph of a DAG").is_ttsp() {
            continue;
        }
        to_g = rl.to_parent.iter().map(|&x| to_g[x]).collect();
        edge_to_g = rl.edge_to_parent.iter().map(|&x| edge_to_g[x]).collect();
        cur = sub;
    }
    parse_subdivision(&cur)
        .expect("an edge-minimal non-series-parallel graph is a W subdivision")
        .map_vertices(|x| to_g[x])
}

/// Outcome of removing cycles while preserving acyclic source-sink paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CycleRemoval {
    /// An acyclic graph with the same acyclic paths, with its relation to the
    /// input.
    Acyclic(DirectedStGraph, Relabel),
    FoundWheatstone(WheatstoneWitness),
}

/// Shortest cycle, ties broken by lexicographically smallest vertex sequence.
fn shortest_cycle(g: &DirectedStGraph) -> Option<Vec<Vertex>> {
    let n = g.n();
    let mut best: Option<Vec<Vertex>> = None;
    for start in 0..n {
        // Distances to `start`.
        let mut dist = vec![usize::MAX; n];
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for &p in g.pred(x) {
                if dist[p] == usize::MAX {
                    dist[p] = dist[x] + 1;
                    queue.push_back(p);
                }
            }
        }
        let Some(len) = g
            .succ(start)
            .iter()
            .filter(|&&w| dist[w] != usize::MAX)
            .map(|&w| dist[w] + 1)
            .min()
        else {
            continue;
        };
        if best.as_ref().is_some_and(|b| b.len() < len) {
            continue;
        }
        let mut cycle = vec![start];
        let mut cur = start;
        for remaining in (1..len).rev() {
            cur = *g
                .succ(cur)
                .iter()
                .find(|&&w| dist[w] == remaining)
                .expect("on a shortest cycle");
            cycle.push(cur);
        }
        if best
            .as_ref()
            .is_none_or(|b| (cycle.len(), &cycle) < (b.len(), b))
        {
            best = Some(cycle);
        }
    }
    best
}

enum Step {
    Delete(Vec<(Vertex, Vertex)>),
    /// Edges of a proper subgraph expected to contain `W`: the entry path to
    /// `v1`, the arc `v1 .. vk`, and the entry and exit paths at `vi`, `vj`,
    /// `vk`.
    Configuration(Vec<(Vertex, Vertex)>),
}

fn path_edges(path: &[Vertex]) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
    path.windows(2).map(|w| (w[0], w[1]))
}

/// Case analysis on a simple cycle `v1 .. vn`, rotated so that `v1` is its
/// first entry (a vertex reachable from `s` without touching the rest of the
/// cycle). `vk` is the last exit and `vi` the first exit before it.
fn cycle_step(g: &DirectedStGraph, cycle: &[Vertex]) -> Step {
    let len = cycle.len();
    let on_cycle = VertexSet::from_vertices(g.n(), cycle.iter().copied());
    let others = |c: Vertex| {
        let mut set = on_cycle.clone();
        set.remove(c);
        set
    };
    let is_entry = |c: Vertex| g.source_component(&others(c)).contains(c);
    let is_exit = |c: Vertex| g.sink_component(&others(c)).contains(c);
    let first_entry = (0..len)
        .find(|&i| is_entry(cycle[i]))
        .expect("cycle vertices are reachable");
    let c: Vec<Vertex> = (0..len).map(|i| cycle[(first_entry + i) % len]).collect();
    let entries: Vec<usize> = (0..len).filter(|&i| is_entry(c[i])).collect();
    let exits: Vec<usize> = (0..len).filter(|&i| is_exit(c[i])).collect();
    let k = *exits.last().expect("cycle vertices reach the sink");
    let edge = |i: usize| (c[i], c[(i + 1) % len]);

    if k == 0 && entries.len() == 1 {
        // Entered and left only at one vertex: no acyclic path uses the cycle.
        return Step::Delete((0..len).map(edge).collect());
    }
    if exits.len() == 1 {
        // Every path through (vk, vk+1) must come back to vk to leave.
        return Step::Delete(vec![edge(k)]);
    }
    let i = exits[0];
    let Some(&j) = entries.iter().find(|&&j| i < j && j <= k) else {
        return Step::Delete(vec![edge(k)]);
    };
    let into = |x: usize| {
        g.shortest_walk(g.source(), c[x], &others(c[x]))
            .expect("entry")
    };
    let out_of = |x: usize| {
        g.shortest_walk(c[x], g.sink(), &others(c[x]))
            .expect("exit")
    };
    let mut keep: Vec<(Vertex, Vertex)> = (0..k).map(edge).collect();
    for p in [into(0), out_of(i), into(j), out_of(k)] {
        keep.extend(path_edges(&p));
    }
    Step::Configuration(keep)
}

/// Step budget for the exact searches used when the configuration of a
/// cycle does not yield `W`.
pub const SEARCH_BUDGET: usize = 20_000_000;

struct Search<'a> {
    g: &'a DirectedStGraph,
    steps: usize,
}

impl<'a> Search<'a> {
    fn new(g: &'a DirectedStGraph) -> Self {
        Search { g, steps: 0 }
    }

    fn tick(&mut self) -> Result<(), TtspError> {
        self.steps += 1;
        if self.steps > SEARCH_BUDGET {
            return Err(TtspError::SearchLimit(SEARCH_BUDGET));
        }
        Ok(())
    }

    /// Whether edge `(a, b)` lies on an acyclic source-sink path.
    fn on_acyclic_path(&mut self, a: Vertex, b: Vertex) -> Result<bool, TtspError> {
        let mut used = VertexSet::singleton(self.g.n(), self.g.source());
        self.reach_then_finish(self.g.source(), a, b, &mut used)
    }

    fn reach_then_finish(
        &mut self,
        at: Vertex,
        a: Vertex,
        b: Vertex,
        used: &mut VertexSet,
    ) -> Result<bool, TtspError> {
        self.tick()?;
        if at == a {
            return Ok(self.g.forward_reach(b, used).contains(self.g.sink()));
        }
        for &w in self.g.succ(at) {
            if w != b && !used.contains(w) {
                used.insert(w);
                if self.reach_then_finish(w, a, b, used)? {
                    return Ok(true);
                }
                used.remove(w);
            }
        }
        Ok(false)
    }

    /// Joins each pair in `ends` by a path whose interior avoids `used` and
    /// the other paths.
    fn disjoint_paths(
        &mut self,
        ends: &[(Vertex, Vertex)],
        used: &mut VertexSet,
        out: &mut Vec<Vec<Vertex>>,
    ) -> Result<bool, TtspError> {
        let Some((&(from, to), rest)) = ends.split_first() else {
            return Ok(true);
        };
        let mut path = vec![from];
        self.extend(to, rest, used, &mut path, out)
    }

    fn extend(
        &mut self,
        to: Vertex,
        rest: &[(Vertex, Vertex)],
        used: &mut VertexSet,
        path: &mut Vec<Vertex>,
        out: &mut Vec<Vec<Vertex>>,
    ) -> Result<bool, TtspError> {
        self.tick()?;
        let at = *path.last().unwrap();
        if self.g.has_edge(at, to) {
            path.push(to);
            out.push(path.clone());
            if self.disjoint_paths(rest, used, out)? {
                return Ok(true);
            }
            out.pop();
            path.pop();
        }
        for &w in self.g.succ(at) {
            if !used.contains(w) {
                used.insert(w);
                path.push(w);
                if self.extend(to, rest, used, path, out)? {
                    return Ok(true);
                }
                path.pop();
                used.remove(w);
            }
        }
        Ok(false)
    }

    /// Exhaustive search over branch vertices and connecting paths.
    fn wheatstone(&mut self) -> Result<Option<WheatstoneWitness>, TtspError> {
        let g = self.g;
        let (s, t) = (g.source(), g.sink());
        let n = g.n();
        for sp in (0..n).filter(|&x| x != t) {
            for u in (0..n).filter(|&x| x != s && x != t && x != sp) {
                for v in (0..n).filter(|&x| x != s && x != t && x != sp && x != u) {
                    for tp in (0..n).filter(|&x| x != s && ![sp, u, v].contains(&x)) {
                        let mut ends = Vec::new();
                        if s != sp {
                            ends.push((s, sp));
                        }
                        ends.extend([(sp, u), (sp, v), (u, v), (u, tp), (v, tp)]);
                        if t != tp {
                            ends.push((tp, t));
                        }
                        let mut used = VertexSet::from_vertices(n, [s, t, sp, u, v, tp]);
                        let mut out = Vec::new();
                        if !self.disjoint_paths(&ends, &mut used, &mut out)? {
                            continue;
                        }
                        let stem_in = if s == sp { vec![s] } else { out.remove(0) };
                        let stem_out = if t == tp { vec![t] } else { out.pop().unwrap() };
                        let mut it = out.into_iter();
                        let mut next = || it.next().unwrap();
                        return Ok(Some(WheatstoneWitness {
                            s_prime: sp,
                            u,
                            v,
                            t_prime: tp,
                            stem_in,
                            s_to_u: next(),
                            s_to_v: next(),
                            u_to_v: next(),
                            u_to_t: next(),
                            v_to_t: next(),
                            stem_out,
                        }));
                    }
                }
            }
        }
        Ok(None)
    }
}

/// Deletes cycle edges that lie on no acyclic source-sink path until the
/// graph is acyclic, unless a cycle exposes a `W` subdivision.
///
/// Each cycle is first handled by the entry/exit case analysis. When that
/// analysis points at a configuration which turns out not to contain `W`
/// (its connecting paths may share vertices), the first cycle edge on no
/// acyclic path is found by exact search instead, and if every cycle edge is
/// on one the graph is searched for `W` directly.
pub fn remove_cycles(g: &DirectedStGraph) -> Result<CycleRemoval, TtspError> {
    let mut cur = g.clone();
    let mut to_g: Vec<Vertex> = (0..g.n()).collect();
    let mut edge_to_g: Vec<usize> = (0..g.edge_count()).collect();
    while let Some(cycle) = shortest_cycle(&cur) {
        let drop = match cycle_step(&cur, &cycle) {
            Step::Delete(drop) => drop,
            Step::Configuration(keep) => {
                let keep: Vec<usize> = keep
                    .iter()
                    .map(|&(a, b)| cur.edge_index(a, b).unwrap())
                    .collect();
                let (sub, rl) = cur
                    .edge_subgraph(|e| keep.contains(&e))
                    .expect("paths join s to t");
                if let Some(w) = contains_wheatstone(&sub)? {
                    return Ok(CycleRemoval::FoundWheatstone(
                        w.map_vertices(|x| to_g[rl.to_parent[x]]),
                    ));
                }
                let mut search = Search::new(&cur);
                let mut unused = None;
                for e in path_edges(&cycle).chain([(*cycle.last().unwrap(), cycle[0])]) {
                    if !search.on_acyclic_path(e.0, e.1)? {
                        unused = Some(e);
                        break;
                    }
                }
                match unused {
                    Some(e) => vec![e],
                    None => {
                        let w = search
                            .wheatstone()?
                            .expect("a cycle whose edges all lie on acyclic paths spans W");
                        return Ok(CycleRemoval::FoundWheatstone(w.map_vertices(|x| to_g[x])));
                    }
                }
            }
        };
        let drop: Vec<usize> = drop
            .iter()
            .map(|&(a, b)| cur.edge_index(a, b).unwrap())
            .collect();
        let (sub, rl) = cur
            .edge_subgraph(|e| !drop.contains(&e))
            .expect("deleted edges lie on no acyclic path");
        to_g = rl.to_parent.iter().map(|&x| to_g[x]).collect();
        edge_to_g = rl.edge_to_parent.iter().map(|&x| edge_to_g[x]).collect();
        cur = sub;
    }
    let mut vertex = vec![None; g.n()];
    for (new, &old) in to_g.iter().enumerate() {
        vertex[old] = Some(new);
    }
    let mut edge = vec![None; g.edge_count()];
    for (new, &old) in edge_to_g.iter().enumerate() {
        edge[old] = Some(new);
    }
    let relabel = Relabel {
        vertex,
        edge,
        to_parent: to_g,
        edge_to_parent: edge_to_g,
    };
    Ok(CycleRemoval::Acyclic(cur, relabel))
}

/// A subgraph homeomorphic to `W`, if one exists.
pub fn contains_wheatstone(g: &DirectedStGraph) -> Result<Option<WheatstoneWitness>, TtspError> {
    Ok(match remove_cycles(g)? {
        CycleRemoval::FoundWheatstone(w) => Some(w),
        CycleRemoval::Acyclic(h, rl) => match is_ttsp(&h).expect("acyclic") {
            TtspResult::Yes(_) => None,
            TtspResult::No(_) => Some(extract_from_dag(&h).map_vertices(|x| rl.to_parent[x])),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::samples::*;

    fn named_edges(g: &DirectedStGraph) -> Vec<(String, String)> {
        let mut e: Vec<(String, String)> = g
            .edges()
            .iter()
            .map(|&(a, b)| (g.name(a).to_string(), g.name(b).to_string()))
            .collect();
        e.sort();
        e
    }

    #[test]
    fn series_parallel_examples() {
        for g in [diamond(), single_edge(), wheatstone_without_bridge()] {
            match is_ttsp(&g).unwrap() {
                TtspResult::Yes(tree) => assert!(tree.is_decomposition_of(&g)),
                other => panic!("{g:?}: {other:?}"),
            }
        }
        assert!(!is_ttsp(&wheatstone()).unwrap().is_ttsp());
        assert!(!is_ttsp(&diamond_with_cross()).unwrap().is_ttsp());
        assert_eq!(is_ttsp(&graph_a()), Err(TtspError::Cyclic));
    }

    #[test]
    fn diamond_tree_shape() {
        let g = diamond();
        let TtspResult::Yes(tree) = is_ttsp(&g).unwrap() else {
            panic!()
        };
        let SpTree::Series(parts) = tree else {
            panic!()
        };
        assert_eq!(parts.len(), 3);
        assert!(matches!(&parts[1], SpTree::Parallel(p) if p.len() == 2));
    }

    #[test]
    fn witness_on_w_is_w() {
        let w = wheatstone();
        let wit = contains_wheatstone(&w).unwrap().unwrap();
        assert!(wit.is_valid(&w));
        assert!(wit.reduces_to_w(&w));
        assert_eq!((wit.s_prime, wit.t_prime), (w.source(), w.sink()));
        assert_eq!(wit.u, w.vertex("u").unwrap());
    }

    #[test]
    fn vulnerability_of_the_small_graphs() {
        let c = graph_c();
        let wit = contains_wheatstone(&c).unwrap().unwrap();
        assert!(wit.is_valid(&c) && wit.reduces_to_w(&c));
        for g in [graph_a(), graph_b(), graph_d(), diamond(), single_edge()] {
            assert_eq!(contains_wheatstone(&g), Ok(None), "{g:?}");
        }
        let x = diamond_with_cross();
        let wit = contains_wheatstone(&x).unwrap().unwrap();
        assert!(wit.is_valid(&x) && wit.reduces_to_w(&x));
        assert_eq!(wit.stem_in.len(), 2);
        assert_eq!(wit.stem_out.len(), 2);
    }

    #[test]
    fn cycle_removal_examples() {
        let CycleRemoval::Acyclic(h, _) = remove_cycles(&graph_a()).unwrap() else {
            panic!()
        };
        assert_eq!(
            named_edges(&h),
            vec![("s".into(), "u".into()), ("u".into(), "t".into())]
        );
        let CycleRemoval::Acyclic(h, _) = remove_cycles(&graph_b()).unwrap() else {
            panic!()
        };
        assert_eq!(
            named_edges(&h),
            vec![
                ("s".into(), "u".into()),
                ("u".into(), "v".into()),
                ("v".into(), "t".into())
            ]
        );
        let w = wheatstone();
        let CycleRemoval::Acyclic(h, rl) = remove_cycles(&w).unwrap() else {
            panic!()
        };
        assert_eq!(h, w);
        assert_eq!(rl.to_parent, (0..w.n()).collect::<Vec<_>>());
    }

    #[test]
    fn shortest_cycle_is_canonical() {
        let d = graph_d();
        let cyc = shortest_cycle(&d).unwrap();
        assert_eq!(cyc.len(), 2);
        assert_eq!(
            d.set_names(&VertexSet::from_vertices(d.n(), cyc)),
            vec!["x", "y"]
        );
        assert_eq!(shortest_cycle(&wheatstone()), None);
    }

    #[test]
    fn invalid_witnesses_are_rejected() {
        let w = wheatstone();
        let mut wit = contains_wheatstone(&w).unwrap().unwrap();
        wit.u_to_v.reverse();
        assert!(!wit.is_valid(&w));
    }
}
