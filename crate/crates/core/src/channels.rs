//! Depletable channels: graphs whose vertices carry a finite charge that each
//! unit of flow consumes once per visit.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::graph::{DirectedStGraph, Vertex, VertexSet};
use crate::maxflow;

/// Default cap on the total finite charge accepted by the inhibiting-flow
/// search.
pub const DEFAULT_CHARGE_BOUND: u64 = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChannelError {
    #[error("charge vector has {got} entries for {expected} vertices")]
    WrongLength { expected: usize, got: usize },
    #[error("walk {0:?} is not a source-to-sink walk of the graph")]
    InvalidWalk(Vec<Vertex>),
    #[error("flow consumes {used} units of vertex {vertex} holding {available}")]
    Infeasible {
        vertex: Vertex,
        used: u64,
        available: u64,
    },
    #[error("instance too large: total finite charge {total} exceeds bound {bound}")]
    TooLarge { total: u64, bound: u64 },
}

/// A non-negative integer or the distinguished infinite amount. Serialized
/// as a JSON integer or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Amount {
    Finite(u64),
    Infinite,
}

impl Serialize for Amount {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Amount::Finite(x) => s.serialize_u64(*x),
            Amount::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Amount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Finite(u64),
            Word(String),
        }
        match Repr::deserialize(d)? {
            Repr::Finite(x) => Ok(Amount::Finite(x)),
            Repr::Word(w) if w == "inf" => Ok(Amount::Infinite),
            Repr::Word(w) => Err(D::Error::custom(format!(
                "expected a non-negative integer or \"inf\", got {w:?}"
            ))),
        }
    }
}

impl Amount {
    pub fn finite(self) -> Option<u64> {
        match self {
            Amount::Finite(x) => Some(x),
            Amount::Infinite => None,
        }
    }
}

impl fmt::Display for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Amount::Finite(x) => write!(f, "{x}"),
            Amount::Infinite => write!(f, "inf"),
        }
    }
}

/// A graph with a charge on every vertex. Source and sink are always infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepletableChannel {
    graph: DirectedStGraph,
    charge: Vec<Amount>,
}

impl DepletableChannel {
    pub fn new(graph: DirectedStGraph, mut charge: Vec<Amount>) -> Result<Self, ChannelError> {
        if charge.len() != graph.n() {
            return Err(ChannelError::WrongLength {
                expected: graph.n(),
                got: charge.len(),
            });
        }
        charge[graph.source()] = Amount::Infinite;
        let t = graph.sink();
        charge[t] = Amount::Infinite;
        Ok(DepletableChannel { graph, charge })
    }

    /// Charges by vertex name; unnamed interior vertices get `default`.
    pub fn from_named(graph: DirectedStGraph, charges: &[(&str, Amount)], default: Amount) -> Self {
        let mut charge = vec![default; graph.n()];
        for &(name, c) in charges {
            let v = graph
                .vertex(name)
                .unwrap_or_else(|| panic!("unknown vertex `{name}`"));
            charge[v] = c;
        }
        Self::new(graph, charge).expect("length matches")
    }

    pub fn graph(&self) -> &DirectedStGraph {
        &self.graph
    }

    pub fn charge(&self, v: Vertex) -> Amount {
        self.charge[v]
    }

    pub fn charges(&self) -> &[Amount] {
        &self.charge
    }

    fn total_finite(&self) -> u64 {
        self.charge.iter().filter_map(|c| c.finite()).sum()
    }

    /// Whether some walk avoids every finite-charge vertex.
    fn has_unbounded_walk(&self) -> bool {
        let finite = VertexSet::from_vertices(
            self.graph.n(),
            (0..self.graph.n()).filter(|&v| self.charge[v] != Amount::Infinite),
        );
        self.graph
            .source_component(&finite)
            .contains(self.graph.sink())
    }
}

/// An assignment of flow units to source-to-sink walks.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathFlow {
    pub walks: Vec<(Vec<Vertex>, u64)>,
}

impl PathFlow {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(walk: Vec<Vertex>) -> Self {
        PathFlow {
            walks: vec![(walk, 1)],
        }
    }

    pub fn value(&self) -> u64 {
        self.walks.iter().map(|(_, x)| x).sum()
    }

    /// Units of `v`'s charge consumed: each visit of each unit counts once.
    pub fn consumption(&self, v: Vertex) -> u64 {
        self.walks
            .iter()
            .map(|(walk, x)| walk.iter().filter(|&&w| w == v).count() as u64 * x)
            .sum()
    }
}

fn check_walk(g: &DirectedStGraph, walk: &[Vertex]) -> bool {
    walk.first() == Some(&g.source())
        && walk.last() == Some(&g.sink())
        && walk.windows(2).all(|w| g.has_edge(w[0], w[1]))
}

/// Maximum flow value, by splitting every vertex into an in/out pair joined
/// by an arc carrying its charge.
pub fn max_flow_value(ch: &DepletableChannel) -> Amount {
    if ch.has_unbounded_walk() {
        return Amount::Infinite;
    }
    let g = ch.graph();
    let n = g.n();
    let big = ch.total_finite() + 1;
    let cap = |v: Vertex| ch.charge[v].finite().unwrap_or(big);
    let (s, t) = (g.source(), g.sink());
    let inn = |v: Vertex| v;
    let out = |v: Vertex| if v == s || v == t { v } else { n + v };
    let mut arcs = Vec::new();
    for v in g.interior() {
        arcs.push((inn(v), out(v), cap(v)));
    }
    for &(u, v) in g.edges() {
        arcs.push((out(u), inn(v), big));
    }
    let (value, _) = maxflow::max_flow(2 * n, s, t, &arcs);
    Amount::Finite(value)
}

pub fn is_dead(ch: &DepletableChannel) -> bool {
    max_flow_value(ch) == Amount::Finite(0)
}

/// The channel left after `flow` has consumed its charges.
pub fn residual(
    ch: &DepletableChannel,
    flow: &PathFlow,
) -> Result<DepletableChannel, ChannelError> {
    let g = ch.graph();
    for (walk, _) in &flow.walks {
        if !check_walk(g, walk) {
            return Err(ChannelError::InvalidWalk(walk.clone()));
        }
    }
    let mut charge = ch.charge.clone();
    for v in g.interior() {
        if let Amount::Finite(available) = ch.charge[v] {
            let used = flow.consumption(v);
            if used > available {
                return Err(ChannelError::Infeasible {
                    vertex: v,
                    used,
                    available,
                });
            }
            charge[v] = Amount::Finite(available - used);
        }
    }
    DepletableChannel::new(g.clone(), charge)
}

/// Result of the minimum inhibiting-flow search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inhibiting {
    pub value: Amount,
    /// A flow attaining `value`; `None` when no inhibiting flow exists.
    pub flow: Option<PathFlow>,
}

/// Residual charges of the finite interior vertices, in vertex order.
type State = Vec<u64>;

struct Search<'a> {
    g: &'a DirectedStGraph,
    slot: Vec<Option<usize>>,
}

impl Search<'_> {
    fn dead(&self, state: &State) -> bool {
        let g = self.g;
        let mut seen = vec![false; g.n()];
        seen[g.source()] = true;
        let mut queue = VecDeque::from([g.source()]);
        while let Some(v) = queue.pop_front() {
            for &w in g.succ(v) {
                if w == g.sink() {
                    return false;
                }
                let open = self.slot[w].is_none_or(|i| state[i] > 0);
                if !seen[w] && open {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        true
    }

    /// Every residual state reachable by routing one unit along some walk,
    /// with a shortest walk producing it.
    fn one_unit(&self, state: &State) -> Vec<(State, Vec<Vertex>)> {
        let g = self.g;
        let start = (g.source(), state.clone());
        let mut parent: HashMap<(Vertex, State), Option<(Vertex, State)>> = HashMap::new();
        parent.insert(start.clone(), None);
        let mut queue = VecDeque::from([start]);
        let mut outcomes: Vec<(State, Vec<Vertex>)> = Vec::new();
        let mut produced: HashSet<State> = HashSet::new();
        while let Some((v, res)) = queue.pop_front() {
            for &w in g.succ(v) {
                if w == g.sink() {
                    if produced.insert(res.clone()) {
                        let mut walk = vec![w];
                        let mut node = Some((v, res.clone()));
                        while let Some((x, r)) = node {
                            walk.push(x);
                            node = parent[&(x, r)].clone();
                        }
                        walk.reverse();
                        outcomes.push((res.clone(), walk));
                    }
                    continue;
                }
                let mut next = res.clone();
                if let Some(i) = self.slot[w] {
                    if next[i] == 0 {
                        continue;
                    }
                    next[i] -= 1;
                }
                let key = (w, next);
                if !parent.contains_key(&key) {
                    parent.insert(key.clone(), Some((v, res.clone())));
                    queue.push_back(key);
                }
            }
        }
        outcomes
    }
}

/// Minimum value of a flow whose residual is dead, by breadth-first search
/// over residual charge vectors (one unit of flow per level).
///
/// The problem is NP-hard in general; instances whose total finite charge
/// exceeds `bound` are refused.
pub fn min_inhibiting(ch: &DepletableChannel, bound: u64) -> Result<Inhibiting, ChannelError> {
    if ch.has_unbounded_walk() {
        return Ok(Inhibiting {
            value: Amount::Infinite,
            flow: None,
        });
    }
    let total = ch.total_finite();
    if total > bound {
        return Err(ChannelError::TooLarge { total, bound });
    }
    let g = ch.graph();
    let mut slot = vec![None; g.n()];
    let mut start = Vec::new();
    for v in g.interior() {
        if let Amount::Finite(c) = ch.charge[v] {
            slot[v] = Some(start.len());
            start.push(c);
        }
    }
    let search = Search { g, slot };
    if search.dead(&start) {
        return Ok(Inhibiting {
            value: Amount::Finite(0),
            flow: Some(PathFlow::new()),
        });
    }

    let mut parent: HashMap<State, (State, Vec<Vertex>)> = HashMap::new();
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(state) = queue.pop_front() {
        for (next, walk) in search.one_unit(&state) {
            if next == start || parent.contains_key(&next) {
                continue;
            }
            parent.insert(next.clone(), (state.clone(), walk));
            if search.dead(&next) {
                let mut walks: Vec<Vec<Vertex>> = Vec::new();
                let mut cur = next;
                while cur != start {
                    let (prev, walk) = parent[&cur].clone();
                    walks.push(walk);
                    cur = prev;
                }
                walks.reverse();
                let value = walks.len() as u64;
                let mut merged: Vec<(Vec<Vertex>, u64)> = Vec::new();
                for walk in walks {
                    match merged.iter_mut().find(|(w, _)| *w == walk) {
                        Some((_, x)) => *x += 1,
                        None => merged.push((walk, 1)),
                    }
                }
                return Ok(Inhibiting {
                    value: Amount::Finite(value),
                    flow: Some(PathFlow { walks: merged }),
                });
            }
            queue.push_back(next);
        }
    }
    unreachable!("every unit consumes finite charge, so a dead state is reachable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::samples::*;
    use Amount::*;

    fn fig2(cross: bool) -> DepletableChannel {
        let g = if cross {
            diamond_with_cross()
        } else {
            diamond()
        };
        DepletableChannel::from_named(
            g,
            &[
                ("m", Finite(2)),
                ("a", Finite(1)),
                ("b", Finite(1)),
                ("j", Finite(2)),
            ],
            Infinite,
        )
    }

    #[test]
    fn max_flow_of_the_two_channels() {
        assert_eq!(max_flow_value(&fig2(false)), Finite(2));
        assert_eq!(max_flow_value(&fig2(true)), Finite(2));
    }

    #[test]
    fn min_inhibiting_of_the_two_channels() {
        let plain = min_inhibiting(&fig2(false), DEFAULT_CHARGE_BOUND).unwrap();
        assert_eq!(plain.value, Finite(2));
        let crossed = min_inhibiting(&fig2(true), DEFAULT_CHARGE_BOUND).unwrap();
        assert_eq!(crossed.value, Finite(1));
        let g = diamond_with_cross();
        let names: Vec<&str> = crossed.flow.as_ref().unwrap().walks[0]
            .0
            .iter()
            .map(|&v| g.name(v))
            .collect();
        assert_eq!(names, ["s", "m", "a", "b", "j", "t"]);
        let left = residual(&fig2(true), crossed.flow.as_ref().unwrap()).unwrap();
        assert!(is_dead(&left));
    }

    #[test]
    fn dead_channel() {
        let ch = DepletableChannel::from_named(diamond(), &[], Finite(0));
        assert_eq!(max_flow_value(&ch), Finite(0));
        assert!(is_dead(&ch));
        let inh = min_inhibiting(&ch, DEFAULT_CHARGE_BOUND).unwrap();
        assert_eq!(inh.value, Finite(0));
        assert_eq!(inh.flow, Some(PathFlow::new()));
    }

    #[test]
    fn residual_examples() {
        let ch = fig2(true);
        let g = ch.graph().clone();
        let walk = |names: &[&str]| {
            names
                .iter()
                .map(|n| g.vertex(n).unwrap())
                .collect::<Vec<_>>()
        };
        let left = residual(
            &ch,
            &PathFlow::single(walk(&["s", "m", "a", "b", "j", "t"])),
        )
        .unwrap();
        assert_eq!(left.charge(g.vertex("a").unwrap()), Finite(0));
        assert_eq!(left.charge(g.vertex("b").unwrap()), Finite(0));
        assert!(is_dead(&left));

        assert_eq!(residual(&ch, &PathFlow::new()).unwrap(), ch);

        let plain = fig2(false);
        let top = residual(&plain, &PathFlow::single(walk(&["s", "m", "a", "j", "t"]))).unwrap();
        assert_eq!(max_flow_value(&top), Finite(1));
    }

    #[test]
    fn residual_rejects_bad_flows() {
        let ch = fig2(false);
        let g = ch.graph().clone();
        let walk: Vec<Vertex> = ["s", "m", "a", "j", "t"]
            .iter()
            .map(|n| g.vertex(n).unwrap())
            .collect();
        let twice = PathFlow {
            walks: vec![(walk, 2)],
        };
        assert!(matches!(
            residual(&ch, &twice),
            Err(ChannelError::Infeasible { .. })
        ));
        let bogus = PathFlow::single(vec![g.source(), g.sink()]);
        assert!(matches!(
            residual(&ch, &bogus),
            Err(ChannelError::InvalidWalk(_))
        ));
    }

    #[test]
    fn unbounded_channels() {
        let ch = DepletableChannel::from_named(single_edge(), &[], Finite(0));
        assert_eq!(max_flow_value(&ch), Infinite);
        assert_eq!(min_inhibiting(&ch, 0).unwrap().value, Infinite);
        let ch = DepletableChannel::from_named(diamond(), &[("a", Finite(1))], Infinite);
        assert_eq!(max_flow_value(&ch), Infinite);
    }

    #[test]
    fn cycles_consume_charge_per_visit() {
        // s u v u t burns two units of u; with v at 1 no walk can burn three.
        let ch = DepletableChannel::from_named(
            graph_a(),
            &[("u", Finite(3)), ("v", Finite(1))],
            Infinite,
        );
        assert_eq!(max_flow_value(&ch), Finite(3));
        assert_eq!(
            min_inhibiting(&ch, DEFAULT_CHARGE_BOUND).unwrap().value,
            Finite(2)
        );
        let ch = DepletableChannel::from_named(
            graph_a(),
            &[("u", Finite(3)), ("v", Finite(2))],
            Infinite,
        );
        assert_eq!(
            min_inhibiting(&ch, DEFAULT_CHARGE_BOUND).unwrap().value,
            Finite(1)
        );
    }

    #[test]
    fn search_refuses_large_instances() {
        let ch = DepletableChannel::from_named(diamond(), &[], Finite(10));
        assert_eq!(
            min_inhibiting(&ch, 24),
            Err(ChannelError::TooLarge {
                total: 40,
                bound: 24
            })
        );
    }
}
