//! One report covering weakness, edge-weakness and vulnerability, checked
//! against the implications that must hold between them.

use std::time::Instant;

use serde::Serialize;

use crate::flownets::{self, EdgeWeakWitness, EdgeWeakness};
use crate::graph::{DirectedStGraph, Vertex};
use crate::separators::{self, Weakness};
use crate::traffic::{self, Vulnerability};
use crate::ttsp::{self, WheatstoneWitness};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Decision<W> {
    Yes { witness: W },
    No,
    Undecided { reason: String },
}

impl<W> Decision<W> {
    pub fn holds(&self) -> Option<bool> {
        match self {
            Decision::Yes { .. } => Some(true),
            Decision::No => Some(false),
            Decision::Undecided { .. } => None,
        }
    }
}

fn names(g: &DirectedStGraph, vs: impl IntoIterator<Item = Vertex>) -> Vec<String> {
    vs.into_iter().map(|v| g.name(v).to_string()).collect()
}

fn edge_name(g: &DirectedStGraph, (a, b): (Vertex, Vertex)) -> [String; 2] {
    [g.name(a).to_string(), g.name(b).to_string()]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriticalMvs {
    pub mvs: Vec<String>,
    pub walk: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WheatstoneView {
    pub s_prime: String,
    pub u: String,
    pub v: String,
    pub t_prime: String,
    pub stem_in: Vec<String>,
    pub s_to_u: Vec<String>,
    pub s_to_v: Vec<String>,
    pub u_to_v: Vec<String>,
    pub u_to_t: Vec<String>,
    pub v_to_t: Vec<String>,
    pub stem_out: Vec<String>,
}

impl WheatstoneView {
    pub fn new(g: &DirectedStGraph, w: &WheatstoneWitness) -> Self {
        let p = |path: &[Vertex]| names(g, path.iter().copied());
        WheatstoneView {
            s_prime: g.name(w.s_prime).to_string(),
            u: g.name(w.u).to_string(),
            v: g.name(w.v).to_string(),
            t_prime: g.name(w.t_prime).to_string(),
            stem_in: p(&w.stem_in),
            s_to_u: p(&w.s_to_u),
            s_to_v: p(&w.s_to_v),
            u_to_v: p(&w.u_to_v),
            u_to_t: p(&w.u_to_t),
            v_to_t: p(&w.v_to_t),
            stem_out: p(&w.stem_out),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EdgeWeakView {
    Cut {
        source_side: Vec<String>,
        sink_side: Vec<String>,
        first: [String; 2],
        second: [String; 2],
    },
    Wheatstone(WheatstoneView),
}

impl EdgeWeakView {
    pub fn new(g: &DirectedStGraph, w: &EdgeWeakWitness) -> Self {
        match w {
            EdgeWeakWitness::Cut(c) => EdgeWeakView::Cut {
                source_side: names(g, c.cut.source_side.iter()),
                sink_side: names(g, c.cut.sink_side().iter()),
                first: edge_name(g, c.first),
                second: edge_name(g, c.second),
            },
            EdgeWeakWitness::Wheatstone(w) => EdgeWeakView::Wheatstone(WheatstoneView::new(g, w)),
        }
    }
}

/// Wall-clock time per decider, in microseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Timings {
    pub weak: u128,
    pub edge_weak: u128,
    pub vulnerable: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub vertices: usize,
    pub edges: usize,
    pub acyclic: bool,
    pub weak: Decision<CriticalMvs>,
    pub edge_weak: Decision<EdgeWeakView>,
    pub vulnerable: Decision<WheatstoneView>,
    /// Only for acyclic graphs.
    pub ttsp: Option<bool>,
    pub timings_us: Timings,
    /// Broken implications between the verdicts; empty unless there is a bug.
    pub violations: Vec<String>,
}

impl ClassificationReport {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Runs every decider on `g`. `bound` caps the exhaustive edge-weakness search
/// on cyclic graphs.
pub fn classify(g: &DirectedStGraph, bound: usize) -> ClassificationReport {
    let mut timings = Timings::default();

    let start = Instant::now();
    let weak = match separators::weak_or_not_weak(g) {
        Weakness::Weak(w) => Decision::Yes {
            witness: CriticalMvs {
                mvs: names(g, w.mvs.members().iter()),
                walk: names(g, w.walk.iter().copied()),
            },
        },
        Weakness::NotWeak => Decision::No,
    };
    timings.weak = start.elapsed().as_micros();

    let start = Instant::now();
    let edge_weak = match flownets::edge_weak(g, bound) {
        Ok(EdgeWeakness::EdgeWeak(w)) => Decision::Yes {
            witness: EdgeWeakView::new(g, &w),
        },
        Ok(EdgeWeakness::NotEdgeWeak) => Decision::No,
        Err(e) => Decision::Undecided {
            reason: e.to_string(),
        },
    };
    timings.edge_weak = start.elapsed().as_micros();

    let start = Instant::now();
    let vulnerable = match traffic::vulnerable(g) {
        Ok(Vulnerability::Vulnerable(w)) => Decision::Yes {
            witness: WheatstoneView::new(g, &w),
        },
        Ok(Vulnerability::NotVulnerable) => Decision::No,
        Err(e) => Decision::Undecided {
            reason: e.to_string(),
        },
    };
    timings.vulnerable = start.elapsed().as_micros();

    let acyclic = g.is_acyclic();
    let ttsp = acyclic.then(|| ttsp::is_ttsp(g).expect("acyclic").is_ttsp());
    let violations = violations(weak.holds(), edge_weak.holds(), vulnerable.holds(), ttsp);
    ClassificationReport {
        vertices: g.n(),
        edges: g.edge_count(),
        acyclic,
        weak,
        edge_weak,
        vulnerable,
        ttsp,
        timings_us: timings,
        violations,
    }
}

/// Broken implications among decided verdicts: vulnerable implies edge-weak,
/// and on DAGs vulnerable, edge-weak and non-TTSP coincide and weakness implies
/// all three.
pub fn violations(
    weak: Option<bool>,
    edge_weak: Option<bool>,
    vulnerable: Option<bool>,
    ttsp: Option<bool>,
) -> Vec<String> {
    let mut out = Vec::new();
    if vulnerable == Some(true) && edge_weak == Some(false) {
        out.push("vulnerable but not edge-weak".to_string());
    }
    if let Some(ttsp) = ttsp {
        let not_ttsp = Some(!ttsp);
        if vulnerable.is_some() && vulnerable != not_ttsp {
            out.push(
                "acyclic: vulnerability disagrees with series-parallel recognition".to_string(),
            );
        }
        if edge_weak.is_some() && edge_weak != not_ttsp {
            out.push(
                "acyclic: edge-weakness disagrees with series-parallel recognition".to_string(),
            );
        }
        if weak == Some(true) && ttsp {
            out.push("acyclic: weak but series-parallel".to_string());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::samples::*;

    fn verdicts(g: &DirectedStGraph) -> [Option<bool>; 3] {
        let r = classify(g, flownets::DEFAULT_EXHAUSTIVE_BOUND);
        assert!(r.is_consistent(), "{r:?}");
        [r.weak.holds(), r.edge_weak.holds(), r.vulnerable.holds()]
    }

    #[test]
    fn sample_graphs() {
        let (y, n) = (Some(true), Some(false));
        assert_eq!(verdicts(&graph_a()), [y, n, n]);
        assert_eq!(verdicts(&graph_b()), [y, y, n]);
        assert_eq!(verdicts(&graph_c()), [n, y, y]);
        assert_eq!(verdicts(&graph_d()), [n, y, n]);
        assert_eq!(verdicts(&wheatstone()), [y, y, y]);
        assert_eq!(verdicts(&diamond()), [n, n, n]);
    }

    #[test]
    fn bound_leaves_edge_weakness_undecided() {
        let r = classify(&graph_b(), 3);
        assert!(matches!(r.edge_weak, Decision::Undecided { .. }));
        assert!(r.is_consistent());
    }

    #[test]
    fn witnesses_use_names() {
        let r = classify(&wheatstone(), 20);
        let Decision::Yes { witness } = &r.weak else {
            panic!("{r:?}")
        };
        assert_eq!(witness.mvs, ["u", "v"]);
        assert_eq!(witness.walk, ["u", "v"]);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["vulnerable"]["verdict"], "yes");
        assert_eq!(json["vulnerable"]["witness"]["u_to_v"][0], "u");
        assert_eq!(json["ttsp"], false);
    }

    #[test]
    fn implications() {
        let y = Some(true);
        let n = Some(false);
        assert!(violations(y, y, y, None).is_empty());
        assert_eq!(violations(n, n, y, None).len(), 1);
        assert!(violations(n, None, y, None).is_empty());
        assert_eq!(violations(y, y, y, Some(true)).len(), 3);
        assert!(violations(n, n, n, Some(true)).is_empty());
    }
}
