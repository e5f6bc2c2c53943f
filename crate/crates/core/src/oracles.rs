//! Brute-force reference deciders for small graphs, written directly from the
//! definitions on a bitmask representation so that they share no code with
//! the polynomial algorithms.

use std::collections::BTreeSet;

use rand::Rng;
use thiserror::Error;

use crate::channels::{self, Amount, ChannelError, DepletableChannel};
use crate::graph::{DirectedStGraph, OffPathPolicy, Vertex, VertexSet};

/// Vertex bound for mvs enumeration and the weakness and edge-weakness
/// oracles.
pub const MVS_BOUND: usize = 12;
/// Vertex bound for the subgraph-enumerating vulnerability oracle.
pub const VULNERABLE_BOUND: usize = 6;
/// Edge bound for the same oracle.
pub const VULNERABLE_EDGE_BOUND: usize = 24;
/// Vertex bound for the direct search for a subdivision of `W`.
pub const MINOR_BOUND: usize = 9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle limited to {bound} vertices, got {n}")]
    TooManyVertices { n: usize, bound: usize },
    #[error("oracle limited to {bound} edges, got {m}")]
    TooManyEdges { m: usize, bound: usize },
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

fn check_n(g: &DirectedStGraph, bound: usize) -> Result<(), OracleError> {
    if g.n() > bound {
        return Err(OracleError::TooManyVertices { n: g.n(), bound });
    }
    Ok(())
}

/// Adjacency as bitmasks; vertex `i` is bit `i`.
struct Bits {
    n: usize,
    s: usize,
    t: usize,
    succ: Vec<u32>,
    pred: Vec<u32>,
}

impl Bits {
    fn new(n: usize, s: usize, t: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut succ = vec![0u32; n];
        let mut pred = vec![0u32; n];
        for (a, b) in edges {
            succ[a] |= 1 << b;
            pred[b] |= 1 << a;
        }
        Bits {
            n,
            s,
            t,
            succ,
            pred,
        }
    }

    fn of(g: &DirectedStGraph) -> Self {
        Self::new(g.n(), g.source(), g.sink(), g.edges().iter().copied())
    }

    fn all(&self) -> u32 {
        ((1u64 << self.n) - 1) as u32
    }

    /// Closure of `start` under `adj` inside `allowed`.
    fn close(&self, start: u32, allowed: u32, forward: bool) -> u32 {
        let adj = if forward { &self.succ } else { &self.pred };
        let mut seen = start & allowed;
        let mut frontier = seen;
        while frontier != 0 {
            let mut next = 0;
            let mut f = frontier;
            while f != 0 {
                let v = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= adj[v];
            }
            frontier = next & allowed & !seen;
            seen |= frontier;
        }
        seen
    }

    /// Vertices at the end of non-empty walks from `v`.
    fn walk_targets(&self, v: usize) -> u32 {
        self.close(self.succ[v], self.all(), true)
    }

    fn separates(&self, set: u32) -> bool {
        self.close(1 << self.s, self.all() & !set, true) & (1 << self.t) == 0
    }

    fn is_mvs(&self, set: u32) -> bool {
        if set == 1 << self.s || set == 1 << self.t {
            return true;
        }
        if set == 0 || set & ((1 << self.s) | (1 << self.t)) != 0 || !self.separates(set) {
            return false;
        }
        bits(set).all(|v| !self.separates(set & !(1 << v)))
    }

    fn interior_subsets(&self) -> impl Iterator<Item = u32> + '_ {
        let interior = self.all() & !(1 << self.s) & !(1 << self.t);
        // Enumerate submasks of `interior`.
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == interior {
                None
            } else {
                Some((cur | !interior).wrapping_add(1) & interior)
            };
            Some(cur)
        })
    }

    fn is_acyclic(&self, vertices: u32) -> bool {
        let mut left = vertices;
        loop {
            let source = bits(left).find(|&v| self.pred[v] & left == 0);
            match source {
                Some(v) => left &= !(1 << v),
                None => return left == 0,
            }
        }
    }

    fn weak(&self) -> bool {
        let targets: Vec<u32> = (0..self.n).map(|v| self.walk_targets(v)).collect();
        self.interior_subsets()
            .filter(|&set| set != 0 && self.is_mvs(set))
            .any(|set| bits(set).any(|a| targets[a] & set != 0))
    }
}

fn bits(mut x: u32) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if x == 0 {
            return None;
        }
        let v = x.trailing_zeros() as usize;
        x &= x - 1;
        Some(v)
    })
}

/// All mvs's, `{s}` and `{t}` included, in canonical order.
pub fn enumerate_mvs(g: &DirectedStGraph) -> Result<Vec<VertexSet>, OracleError> {
    check_n(g, MVS_BOUND)?;
    let b = Bits::of(g);
    let mut out: Vec<VertexSet> = b
        .interior_subsets()
        .filter(|&set| set != 0 && b.is_mvs(set))
        .chain([1 << b.s, 1 << b.t])
        .map(|set| VertexSet::from_vertices(g.n(), bits(set)))
        .collect();
    out.sort();
    Ok(out)
}

/// Some mvs contains `a, b` with a non-empty walk `a ⇝ b`.
pub fn weak_oracle(g: &DirectedStGraph) -> Result<bool, OracleError> {
    check_n(g, MVS_BOUND)?;
    Ok(Bits::of(g).weak())
}

/// Some cut `S` such that every cut whose cut-set lies inside the cut-set of
/// `S` has an edge from its sink side to its source side. Both cuts are
/// enumerated.
pub fn edge_weak_oracle(g: &DirectedStGraph) -> Result<bool, OracleError> {
    check_n(g, MVS_BOUND)?;
    let b = Bits::of(g);
    let sides: Vec<u32> = b.interior_subsets().map(|inner| inner | 1 << b.s).collect();
    let leaving = |side: u32, a: usize| match side & 1 << a {
        0 => 0,
        _ => b.succ[a] & !side,
    };
    let found = sides.iter().any(|&side| {
        sides.iter().all(|&inner| {
            let inside = bits(inner).all(|a| leaving(inner, a) & !leaving(side, a) == 0);
            let entered = bits(b.all() & !inner).any(|y| b.succ[y] & inner != 0);
            !inside || entered
        })
    });
    Ok(found)
}

/// Some acyclic subgraph (edges on source-sink paths only) is weak.
pub fn vulnerable_oracle(g: &DirectedStGraph) -> Result<bool, OracleError> {
    check_n(g, VULNERABLE_BOUND)?;
    let m = g.edge_count();
    if m > VULNERABLE_EDGE_BOUND {
        return Err(OracleError::TooManyEdges {
            m,
            bound: VULNERABLE_EDGE_BOUND,
        });
    }
    let edges = g.edges();
    let (s, t) = (g.source(), g.sink());
    Ok((1u32..1 << m).any(|mask| {
        let chosen = || bits(mask).map(|e| edges[e]);
        let h = Bits::new(g.n(), s, t, chosen());
        let all = h.all();
        let from_s = h.close(1 << s, all, true);
        let to_t = h.close(1 << t, all, false);
        // Subsets with a dangling edge are covered by their pruned subset.
        if !chosen().all(|(a, b)| from_s & 1 << a != 0 && to_t & 1 << b != 0) {
            return false;
        }
        let vertices = from_s & to_t;
        if !h.is_acyclic(vertices) {
            return false;
        }
        // Restrict to the vertices present.
        let map: Vec<usize> = bits(vertices).collect();
        let idx = |v: usize| map.iter().position(|&x| x == v).unwrap();
        let sub = Bits::new(
            map.len(),
            idx(s),
            idx(t),
            chosen().map(|(a, b)| (idx(a), idx(b))),
        );
        sub.weak()
    }))
}

/// Direct search for a subgraph homeomorphic to `W` with stems: branch
/// vertices `s', u, v, t'` and seven internally disjoint paths.
pub fn wheatstone_minor_oracle(g: &DirectedStGraph) -> Result<bool, OracleError> {
    check_n(g, MINOR_BOUND)?;
    let b = Bits::of(g);
    let (s, t) = (b.s, b.t);
    for sp in (0..b.n).filter(|&x| x != t) {
        for u in (0..b.n).filter(|&x| x != s && x != t && x != sp) {
            for v in (0..b.n).filter(|&x| x != s && x != t && x != sp && x != u) {
                for tp in (0..b.n).filter(|&x| x != s && ![sp, u, v].contains(&x)) {
                    let mut ends = vec![(sp, u), (sp, v), (u, v), (u, tp), (v, tp)];
                    if s != sp {
                        ends.push((s, sp));
                    }
                    if t != tp {
                        ends.push((tp, t));
                    }
                    let used = [s, t, sp, u, v, tp].iter().fold(0u32, |m, &x| m | 1 << x);
                    if disjoint_paths(&b, &ends, used) {
                        return Ok(true);
                    }
                }
            }
        }
    }
    Ok(false)
}

/// Whether each pair in `ends` can be joined by a path whose interior avoids
/// `used` and the interiors of the other paths.
fn disjoint_paths(b: &Bits, ends: &[(usize, usize)], used: u32) -> bool {
    let Some((&(from, to), rest)) = ends.split_first() else {
        return true;
    };
    if b.succ[from] & 1 << to != 0 && disjoint_paths(b, rest, used) {
        return true;
    }
    // Depth-first over simple paths through unused vertices.
    fn extend(b: &Bits, at: usize, to: usize, rest: &[(usize, usize)], used: u32) -> bool {
        bits(b.succ[at] & !used).any(|w| {
            let used = used | 1 << w;
            (b.succ[w] & 1 << to != 0 && disjoint_paths(b, rest, used))
                || extend(b, w, to, rest, used)
        })
    }
    extend(b, from, to, rest, used)
}

/// All acyclic source-sink paths.
pub fn acyclic_path_set(g: &DirectedStGraph) -> BTreeSet<Vec<Vertex>> {
    fn go(g: &DirectedStGraph, path: &mut Vec<Vertex>, out: &mut BTreeSet<Vec<Vertex>>) {
        let v = *path.last().unwrap();
        if v == g.sink() {
            out.insert(path.clone());
            return;
        }
        for &w in g.succ(v) {
            if !path.contains(&w) {
                path.push(w);
                go(g, path, out);
                path.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    go(g, &mut vec![g.source()], &mut out);
    out
}

/// Every assignment of charges `0..=max_charge` to the interior vertices.
pub fn charge_assignments(
    g: &DirectedStGraph,
    max_charge: u64,
) -> impl Iterator<Item = Vec<Amount>> + '_ {
    let k = g.n() - 2;
    let base = max_charge + 1;
    (0..base.pow(k as u32)).map(move |mut code| {
        let mut charge = vec![Amount::Infinite; g.n()];
        for v in g.interior() {
            charge[v] = Amount::Finite(code % base);
            code /= base;
        }
        charge
    })
}

/// Whether some charge assignment up to `max_charge` admits an inhibiting
/// flow below the maximum flow.
pub fn inhibiting_gap_oracle(g: &DirectedStGraph, max_charge: u64) -> Result<bool, OracleError> {
    for charge in charge_assignments(g, max_charge) {
        let ch = DepletableChannel::new(g.clone(), charge)?;
        let max = channels::max_flow_value(&ch);
        let min = channels::min_inhibiting(&ch, u64::MAX)?.value;
        if min < max {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Candidate edges of an st-graph on `0..n` with source `0` and sink `n - 1`.
fn candidate_edges(n: usize) -> Vec<(usize, usize)> {
    let t = n - 1;
    let mut out = Vec::new();
    for a in 0..t {
        for b in 1..n {
            if a != b {
                out.push((a, b));
            }
        }
    }
    out
}

/// Every st-graph on `n` labelled vertices with source `0` and sink `n - 1`
/// in which all vertices lie on a source-sink walk.
pub fn all_st_graphs(n: usize) -> impl Iterator<Item = DirectedStGraph> {
    assert!(
        (2..=6).contains(&n),
        "exhaustive enumeration supports 2..=6 vertices"
    );
    let cand = candidate_edges(n);
    (0u64..1 << cand.len()).filter_map(move |mask| {
        let edges: Vec<(usize, usize)> = (0..cand.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| cand[i])
            .collect();
        DirectedStGraph::from_edges(n, &edges, OffPathPolicy::Reject)
            .ok()
            .map(|(g, _)| g)
    })
}

/// A random st-graph on exactly `n` vertices: each candidate edge is kept
/// with probability `p`, drawing again until every vertex lies on a
/// source-sink walk.
pub fn random_st_graph(rng: &mut impl Rng, n: usize, p: f64, acyclic: bool) -> DirectedStGraph {
    let cand: Vec<(usize, usize)> = candidate_edges(n)
        .into_iter()
        .filter(|&(a, b)| !acyclic || a < b)
        .collect();
    loop {
        let edges: Vec<(usize, usize)> = cand.iter().copied().filter(|_| rng.gen_bool(p)).collect();
        if let Ok((g, _)) = DirectedStGraph::from_edges(n, &edges, OffPathPolicy::Reject) {
            return g;
        }
    }
}

/// A random st-graph for sizes where `random_st_graph` would almost never
/// draw a valid graph. Every inner vertex gets an edge from some earlier
/// vertex and one to some later vertex, so it lies on a source-sink walk;
/// then `extra` random edges per vertex are added, backwards too unless
/// `acyclic`.
pub fn random_large_st_graph(
    rng: &mut impl Rng,
    n: usize,
    extra: f64,
    acyclic: bool,
) -> DirectedStGraph {
    assert!(n >= 2);
    let mut edges = BTreeSet::new();
    if n == 2 {
        edges.insert((0, 1));
    }
    for v in 1..n - 1 {
        edges.insert((rng.gen_range(0..v), v));
        edges.insert((v, rng.gen_range(v + 1..n)));
    }
    let possible = match acyclic {
        true => n * (n - 1) / 2,
        false => (n - 1) * (n - 1) - (n - 2),
    };
    let wanted = ((extra * n as f64).round() as usize).min(possible - edges.len());
    let target = edges.len() + wanted;
    while edges.len() < target {
        let (a, b) = (rng.gen_range(0..n - 1), rng.gen_range(1..n));
        if a != b && (!acyclic || a < b) {
            edges.insert((a, b));
        }
    }
    let edges: Vec<(usize, usize)> = edges.into_iter().collect();
    DirectedStGraph::from_edges(n, &edges, OffPathPolicy::Reject)
        .expect("every vertex lies on a source-sink walk")
        .0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::samples::*;

    #[test]
    fn large_random_graphs_are_valid() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for (n, acyclic) in [(2, true), (3, false), (40, true), (100, false)] {
            let g = random_large_st_graph(&mut rng, n, 2.0, acyclic);
            assert_eq!(g.n(), n);
            if acyclic {
                assert!(g.is_acyclic());
            }
        }
    }

    fn names(g: &DirectedStGraph, sets: &[VertexSet]) -> Vec<Vec<String>> {
        sets.iter().map(|s| g.set_names(s)).collect()
    }

    #[test]
    fn mvs_lists() {
        let c = graph_c();
        let mut got = names(&c, &enumerate_mvs(&c).unwrap());
        got.sort();
        assert_eq!(
            got,
            vec![vec!["s"], vec!["t"], vec!["v1", "v2"], vec!["v3", "v4"]]
        );
        let d = graph_d();
        let mut got = names(&d, &enumerate_mvs(&d).unwrap());
        got.sort();
        assert_eq!(got, vec![vec!["s"], vec!["t"], vec!["u"], vec!["v"]]);
        let e = single_edge();
        assert_eq!(enumerate_mvs(&e).unwrap().len(), 2);
    }

    #[test]
    fn oracle_verdicts_on_the_small_graphs() {
        let cases = [
            (wheatstone(), true, true, true),
            (graph_a(), true, false, false),
            (graph_b(), true, true, false),
            (graph_c(), false, true, true),
            (graph_d(), false, true, false),
            (single_edge(), false, false, false),
            (diamond(), false, false, false),
        ];
        for (g, weak, edge_weak, vulnerable) in cases {
            assert_eq!(weak_oracle(&g).unwrap(), weak, "{g:?}");
            assert_eq!(edge_weak_oracle(&g).unwrap(), edge_weak, "{g:?}");
            assert_eq!(vulnerable_oracle(&g).unwrap(), vulnerable, "{g:?}");
            assert_eq!(wheatstone_minor_oracle(&g).unwrap(), vulnerable, "{g:?}");
        }
    }

    #[test]
    fn bounds_are_enforced() {
        let (big, _) = DirectedStGraph::from_edges(
            13,
            &(0..12).map(|i| (i, i + 1)).collect::<Vec<_>>(),
            OffPathPolicy::Reject,
        )
        .unwrap();
        assert_eq!(
            weak_oracle(&big),
            Err(OracleError::TooManyVertices {
                n: 13,
                bound: MVS_BOUND
            })
        );
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(all_st_graphs(2).count(), 1);
        // s->v->t, with or without s->t.
        assert_eq!(all_st_graphs(3).count(), 2);
    }

    #[test]
    fn inhibiting_gap_on_w_and_diamond() {
        assert!(inhibiting_gap_oracle(&wheatstone(), 2).unwrap());
        assert!(!inhibiting_gap_oracle(&wheatstone_without_bridge(), 3).unwrap());
    }
}
