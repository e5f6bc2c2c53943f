//! Minimal st-separators and the polynomial weakness decision.
//!
//! An mvs is an inclusion-minimal vertex set whose removal disconnects the
//! source from the sink; `{s}` and `{t}` are the bottom and top of the order
//! `T ⊑ T'` ("every member of `T` is covered by `T'`"). A graph is weak iff
//! some mvs contains two (possibly equal) vertices joined by a walk. The
//! decision walks a complete chain of mvs's from `{s}` to `{t}` and, for every
//! vertex entering the chain, checks a b-minimal mvs below it.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::graph::{DirectedStGraph, ReachabilityMatrix, Vertex, VertexSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeparatorError {
    #[error("vertex {0} is not a member of the separator")]
    NotAMember(Vertex),
    #[error("vertex {0} cannot be refined in this direction")]
    Terminal(Vertex),
    #[error("vertex set is not a minimal separator")]
    NotMvs,
}

/// A minimal st-separator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mvs(VertexSet);

impl Mvs {
    /// Checks the set and wraps it.
    pub fn new(g: &DirectedStGraph, members: VertexSet) -> Result<Self, SeparatorError> {
        if is_mvs(g, &members) {
            Ok(Mvs(members))
        } else {
            Err(SeparatorError::NotMvs)
        }
    }

    pub fn source(g: &DirectedStGraph) -> Self {
        Mvs(VertexSet::singleton(g.n(), g.source()))
    }

    pub fn sink(g: &DirectedStGraph) -> Self {
        Mvs(VertexSet::singleton(g.n(), g.sink()))
    }

    pub fn members(&self) -> &VertexSet {
        &self.0
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.contains(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_sink(&self, g: &DirectedStGraph) -> bool {
        self.0.len() == 1 && self.0.contains(g.sink())
    }

    pub fn is_source(&self, g: &DirectedStGraph) -> bool {
        self.0.len() == 1 && self.0.contains(g.source())
    }
}

impl fmt::Debug for Mvs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mvs{:?}", self.0)
    }
}

/// Separation plus minimality; `{s}` and `{t}` count as mvs's.
pub fn is_mvs(g: &DirectedStGraph, set: &VertexSet) -> bool {
    let (s, t) = (g.source(), g.sink());
    if set.len() == 1 && (set.contains(s) || set.contains(t)) {
        return true;
    }
    if set.is_empty() || set.contains(s) || set.contains(t) {
        return false;
    }
    let from_source = g.source_component(set);
    if from_source.contains(t) {
        return false;
    }
    let to_sink = g.sink_component(set);
    // A member is essential iff it has a predecessor reachable from s and a
    // successor reaching t, both avoiding the whole set.
    set.iter().all(|v| {
        g.pred(v).iter().any(|&p| from_source.contains(p))
            && g.succ(v).iter().any(|&w| to_sink.contains(w))
    })
}

/// `T1 ⊑ T2`: every member of `T1` is covered by `T2`.
pub fn mvs_leq(g: &DirectedStGraph, lower: &Mvs, upper: &Mvs) -> bool {
    lower.0.is_disjoint(&g.sink_component(&upper.0))
}

/// Removes from `set` every member covered by the others, given that `set`
/// separates and does not contain the sink.
fn drop_covered(g: &DirectedStGraph, set: VertexSet) -> Mvs {
    let reach_t = g.sink_component(&set);
    let kept = set
        .iter()
        .filter(|&v| g.succ(v).iter().any(|&w| reach_t.contains(w)));
    Mvs(VertexSet::from_vertices(g.n(), kept))
}

fn drop_preceded(g: &DirectedStGraph, set: VertexSet) -> Mvs {
    let from_s = g.source_component(&set);
    let kept = set
        .iter()
        .filter(|&v| g.pred(v).iter().any(|&p| from_s.contains(p)));
    Mvs(VertexSet::from_vertices(g.n(), kept))
}

/// `T^u`: replace `u` by its successors and drop covered members.
pub fn refine_right(g: &DirectedStGraph, t: &Mvs, u: Vertex) -> Result<Mvs, SeparatorError> {
    if !t.contains(u) {
        return Err(SeparatorError::NotAMember(u));
    }
    if u == g.sink() {
        return Err(SeparatorError::Terminal(u));
    }
    let mut set = t.0.clone();
    set.remove(u);
    for &w in g.succ(u) {
        set.insert(w);
    }
    if set.contains(g.sink()) {
        return Ok(Mvs::sink(g));
    }
    Ok(drop_covered(g, set))
}

/// `T_u`: replace `u` by its predecessors and drop preceded members.
pub fn refine_left(g: &DirectedStGraph, t: &Mvs, u: Vertex) -> Result<Mvs, SeparatorError> {
    if !t.contains(u) {
        return Err(SeparatorError::NotAMember(u));
    }
    if u == g.source() {
        return Err(SeparatorError::Terminal(u));
    }
    let mut set = t.0.clone();
    set.remove(u);
    for &p in g.pred(u) {
        set.insert(p);
    }
    if set.contains(g.source()) {
        return Ok(Mvs::source(g));
    }
    Ok(drop_preceded(g, set))
}

/// Picks the first ⊑-minimal candidate. Candidates arrive ordered by the
/// member they refine, so ties between incomparable minima go to the
/// smallest refined vertex.
fn least(g: &DirectedStGraph, mut candidates: Vec<Mvs>) -> Mvs {
    let components: Vec<VertexSet> = candidates.iter().map(|c| g.sink_component(&c.0)).collect();
    let strictly_below = |j: usize, i: usize| {
        candidates[j] != candidates[i] && candidates[j].0.is_disjoint(&components[i])
    };
    let minimal = (0..candidates.len())
        .find(|&i| (0..candidates.len()).all(|j| !strictly_below(j, i)))
        .expect("a finite poset has a minimal element");
    candidates.swap_remove(minimal)
}

/// An immediate successor of `T`, or `None` when `T = {t}`.
pub fn immediate_mvs_right(g: &DirectedStGraph, t: &Mvs) -> Option<Mvs> {
    if t.is_sink(g) {
        return None;
    }
    let candidates =
        t.0.iter()
            .map(|u| refine_right(g, t, u).expect("member of a non-sink mvs"))
            .collect();
    Some(least(g, candidates))
}

/// The complete chain `{s} ⊏ ... ⊏ {t}` built by immediate successors.
pub fn complete_chain(g: &DirectedStGraph) -> Vec<Mvs> {
    let mut chain = vec![Mvs::source(g)];
    while let Some(next) = immediate_mvs_right(g, chain.last().unwrap()) {
        chain.push(next);
    }
    chain
}

/// A pair `a, b ∈ T` with a non-empty walk `a ⇝ b`, if any. `a == b` is
/// reported when a member lies on a cycle.
pub fn is_critical(reach: &ReachabilityMatrix, t: &Mvs) -> Option<(Vertex, Vertex)> {
    for a in t.0.iter() {
        let hit = reach.row(a).intersection(&t.0);
        if let Some(b) = hit.first() {
            return Some((a, b));
        }
    }
    None
}

/// Whether `(T ∪ pred(u)) \ {b} ⪯ b`.
fn blocks_b(g: &DirectedStGraph, t: &Mvs, u: Vertex, b: Vertex) -> bool {
    let mut set = t.0.clone();
    for &p in g.pred(u) {
        set.insert(p);
    }
    set.remove(b);
    g.precedes(&set, b)
}

fn unblocked(g: &DirectedStGraph, t: &Mvs, b: Vertex) -> Option<Vertex> {
    t.0.iter().find(|&u| !blocks_b(g, t, u, b))
}

/// Characterization of b-minimality by predecessor sets.
pub fn is_b_minimal(g: &DirectedStGraph, t: &Mvs, b: Vertex) -> Result<bool, SeparatorError> {
    if !t.contains(b) {
        return Err(SeparatorError::NotAMember(b));
    }
    if b == g.source() {
        return Ok(true);
    }
    Ok(unblocked(g, t, b).is_none())
}

/// A b-minimal mvs below `T` containing `b`. Always refines the smallest
/// offending member.
pub fn minimal_mvs(g: &DirectedStGraph, t: &Mvs, b: Vertex) -> Result<Mvs, SeparatorError> {
    if !t.contains(b) {
        return Err(SeparatorError::NotAMember(b));
    }
    if b == g.source() {
        return Ok(t.clone());
    }
    let mut current = t.clone();
    while let Some(u) = unblocked(g, &current, b) {
        current = refine_left(g, &current, u)?;
    }
    Ok(current)
}

/// Outcome of the weakness decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Weakness {
    Weak(WeaknessWitness),
    NotWeak,
}

impl Weakness {
    pub fn is_weak(&self) -> bool {
        matches!(self, Weakness::Weak(_))
    }
}

/// A critical mvs and the walk between two of its members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeaknessWitness {
    pub mvs: Mvs,
    pub from: Vertex,
    pub to: Vertex,
    pub walk: Vec<Vertex>,
}

/// Decides weakness by walking a complete chain and checking one b-minimal
/// mvs per newly appearing vertex.
pub fn weak_or_not_weak(g: &DirectedStGraph) -> Weakness {
    let reach = g.reachability();
    let mut verdicts: HashMap<Mvs, Option<(Vertex, Vertex)>> = HashMap::new();
    let mut critical = |t: &Mvs| {
        *verdicts
            .entry(t.clone())
            .or_insert_with(|| is_critical(&reach, t))
    };
    let witness = |t: Mvs, (a, b): (Vertex, Vertex)| {
        let walk = g
            .shortest_walk(a, b, &g.empty_set())
            .expect("critical pair is joined by a walk");
        Weakness::Weak(WeaknessWitness {
            mvs: t,
            from: a,
            to: b,
            walk,
        })
    };

    let mut processed = g.empty_set();
    let mut t = Mvs::source(g);
    while let Some(next) = immediate_mvs_right(g, &t) {
        if let Some(pair) = critical(&next) {
            return witness(next, pair);
        }
        for b in next.0.difference(&t.0).iter() {
            if processed.contains(b) {
                continue;
            }
            processed.insert(b);
            let lowest = minimal_mvs(g, &next, b).expect("b is a member");
            if let Some(pair) = critical(&lowest) {
                return witness(lowest, pair);
            }
        }
        t = next;
    }
    Weakness::NotWeak
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::samples::*;

    fn mvs(g: &DirectedStGraph, names: &[&str]) -> Mvs {
        Mvs::new(g, g.set(names)).unwrap_or_else(|_| panic!("{names:?} is not an mvs"))
    }

    fn v(g: &DirectedStGraph, name: &str) -> Vertex {
        g.vertex(name).unwrap()
    }

    #[test]
    fn is_mvs_examples() {
        let w = wheatstone();
        assert!(is_mvs(&w, &w.set(&["u", "v"])));
        assert!(!is_mvs(&w, &w.set(&["u"])));
        let c = graph_c();
        assert!(is_mvs(&c, &c.set(&["v1", "v2"])));
        assert!(!is_mvs(&c, &c.set(&["v1"])));
        assert!(!is_mvs(&c, &c.set(&["v1", "v2", "v3"])));
        assert!(is_mvs(&c, &c.set(&["s"])));
        assert!(is_mvs(&c, &c.set(&["t"])));
        assert!(!is_mvs(&c, &c.set(&["s", "v1"])));
    }

    #[test]
    fn order_examples() {
        let g = chain_misses_critical_node();
        assert!(mvs_leq(&g, &mvs(&g, &["a", "p"]), &mvs(&g, &["u", "p"])));
        let t = mvs(&g, &["u", "c"]);
        assert!(mvs_leq(&g, &t, &t));
        assert!(!mvs_leq(&g, &Mvs::sink(&g), &Mvs::source(&g)));
        assert!(mvs_leq(&g, &Mvs::source(&g), &Mvs::sink(&g)));
    }

    #[test]
    fn refine_right_examples() {
        let g = chain_misses_critical_node();
        let ap = mvs(&g, &["a", "p"]);
        assert_eq!(
            refine_right(&g, &ap, v(&g, "a")).unwrap(),
            mvs(&g, &["u", "p"])
        );
        let abc = mvs(&g, &["a", "b", "c"]);
        assert_eq!(
            refine_right(&g, &abc, v(&g, "a")).unwrap(),
            mvs(&g, &["u", "c"])
        );
        assert_eq!(
            refine_right(&g, &abc, v(&g, "b")).unwrap(),
            mvs(&g, &["u", "c"])
        );
        assert_eq!(refine_right(&g, &abc, v(&g, "c")).unwrap(), Mvs::sink(&g));
        assert_eq!(
            refine_right(&g, &ap, v(&g, "u")),
            Err(SeparatorError::NotAMember(v(&g, "u")))
        );
        let e = single_edge();
        assert_eq!(
            refine_right(&e, &Mvs::source(&e), 0).unwrap(),
            Mvs::sink(&e)
        );
    }

    #[test]
    fn immediate_successor_examples() {
        let g = chain_misses_critical_node();
        assert_eq!(
            immediate_mvs_right(&g, &mvs(&g, &["a", "b", "c"])),
            Some(mvs(&g, &["u", "c"]))
        );
        let h = chain_without_critical_mvs();
        assert_eq!(
            immediate_mvs_right(&h, &mvs(&h, &["a", "p"])),
            Some(mvs(&h, &["a1", "a2", "p"]))
        );
        let e = single_edge();
        assert_eq!(
            immediate_mvs_right(&e, &Mvs::source(&e)),
            Some(Mvs::sink(&e))
        );
        assert_eq!(immediate_mvs_right(&e, &Mvs::sink(&e)), None);
    }

    #[test]
    fn refine_left_examples() {
        let h = chain_without_critical_mvs();
        assert_eq!(
            refine_left(&h, &mvs(&h, &["a2", "b"]), v(&h, "a2")).unwrap(),
            mvs(&h, &["a", "b"])
        );
        let e = single_edge();
        assert_eq!(refine_left(&e, &Mvs::sink(&e), 1).unwrap(), Mvs::source(&e));
        let g = chain_misses_critical_node();
        assert_eq!(
            refine_left(&g, &mvs(&g, &["u", "p"]), v(&g, "u")).unwrap(),
            mvs(&g, &["a", "p"])
        );
        assert!(refine_left(&e, &Mvs::source(&e), 0).is_err());
    }

    #[test]
    fn criticality_examples() {
        let w = wheatstone();
        let reach = w.reachability();
        assert_eq!(
            is_critical(&reach, &mvs(&w, &["u", "v"])),
            Some((v(&w, "u"), v(&w, "v")))
        );
        let h = chain_without_critical_mvs();
        let reach = h.reachability();
        assert_eq!(
            is_critical(&reach, &mvs(&h, &["a", "b"])),
            Some((v(&h, "a"), v(&h, "b")))
        );
        assert_eq!(is_critical(&reach, &mvs(&h, &["a2", "b"])), None);
        let a = graph_a();
        let reach = a.reachability();
        assert_eq!(
            is_critical(&reach, &mvs(&a, &["u"])),
            Some((v(&a, "u"), v(&a, "u")))
        );
    }

    #[test]
    fn b_minimality_examples() {
        let h = chain_without_critical_mvs();
        let b = v(&h, "b");
        assert_eq!(is_b_minimal(&h, &mvs(&h, &["a", "b"]), b), Ok(true));
        assert_eq!(is_b_minimal(&h, &mvs(&h, &["a2", "b"]), b), Ok(false));
        let e = single_edge();
        assert_eq!(is_b_minimal(&e, &Mvs::sink(&e), 1), Ok(true));
        assert!(is_b_minimal(&h, &mvs(&h, &["a2", "b"]), v(&h, "a")).is_err());
    }

    #[test]
    fn minimal_mvs_examples() {
        let h = chain_without_critical_mvs();
        let b = v(&h, "b");
        assert_eq!(
            minimal_mvs(&h, &mvs(&h, &["a2", "b"]), b).unwrap(),
            mvs(&h, &["a", "b"])
        );
        let ab = mvs(&h, &["a", "b"]);
        assert_eq!(minimal_mvs(&h, &ab, b).unwrap(), ab);
    }

    #[test]
    fn chains_of_the_samples() {
        let g = chain_misses_critical_node();
        let expected: Vec<Mvs> = [&["s"][..], &["a", "p"], &["u", "p"], &["u", "c"], &["t"]]
            .iter()
            .map(|names| mvs(&g, names))
            .collect();
        assert_eq!(complete_chain(&g), expected);
        let h = chain_without_critical_mvs();
        let expected: Vec<Mvs> = [
            &["s"][..],
            &["a", "p"],
            &["a1", "a2", "p"],
            &["a2", "b"],
            &["t"],
        ]
        .iter()
        .map(|names| mvs(&h, names))
        .collect();
        assert_eq!(complete_chain(&h), expected);
    }

    #[test]
    fn weakness_verdicts() {
        let w = wheatstone();
        match weak_or_not_weak(&w) {
            Weakness::Weak(wit) => {
                assert_eq!(wit.mvs, mvs(&w, &["u", "v"]));
                assert_eq!(wit.walk, vec![v(&w, "u"), v(&w, "v")]);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(weak_or_not_weak(&graph_c()), Weakness::NotWeak);
        assert_eq!(weak_or_not_weak(&graph_d()), Weakness::NotWeak);
        let a = graph_a();
        match weak_or_not_weak(&a) {
            Weakness::Weak(wit) => {
                assert_eq!(wit.mvs, mvs(&a, &["u"]));
                assert_eq!(wit.walk.first(), wit.walk.last());
            }
            other => panic!("{other:?}"),
        }
        let h = chain_without_critical_mvs();
        match weak_or_not_weak(&h) {
            Weakness::Weak(wit) => assert_eq!(wit.mvs, mvs(&h, &["a", "b"])),
            other => panic!("{other:?}"),
        }
        assert_eq!(weak_or_not_weak(&single_edge()), Weakness::NotWeak);
    }
}
