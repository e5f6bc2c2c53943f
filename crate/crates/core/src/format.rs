//! JSON graph files.
//!
//! ```json
//! {
//!   "vertices": ["s", "u", "v", "t"],
//!   "edges": [["s", "u"], ["s", "v"], ["u", "v"], ["u", "t"], ["v", "t"]],
//!   "source": "s",
//!   "sink": "t",
//!   "charges": {"u": 1, "v": "inf"},
//!   "capacities": [1, 1, 0.5, 1, 1],
//!   "latencies": [{"a": 1, "b": 0}, {"a": 0, "b": 1}, {"a": 0, "b": 0},
//!                 {"a": 0, "b": 1}, {"a": 1, "b": 0}],
//!   "demand": 1
//! }
//! ```
//!
//! Per-edge fields are either arrays in edge order or objects keyed by edge
//! index (`{"0": 1, "3": 2}`, every edge present). Capacities are read as
//! exact decimals or `"p/q"` strings. Charges missing from `charges` are
//! infinite.

use std::collections::{BTreeMap, HashMap};

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channels::{Amount, ChannelError, DepletableChannel};
use crate::flownets::{CapacitatedNetwork, FlowError};
use crate::graph::{DirectedStGraph, GraphError, OffPathPolicy, Relabel};
use crate::traffic::{Affine, TrafficError, TrafficInstance};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("`{field}`: unknown vertex `{name}`")]
    UnknownVertex { field: &'static str, name: String },
    #[error("vertex `{0}` is listed twice")]
    DuplicateVertex(String),
    #[error("`{field}`: bad number `{value}`")]
    BadNumber { field: &'static str, value: String },
    #[error("`{field}`: bad edge index `{index}`")]
    BadEdgeIndex { field: &'static str, index: String },
    #[error("`{field}`: expected {expected} values, one per edge, got {got}")]
    WrongLength {
        field: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("file has no `{0}`")]
    Missing(&'static str),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Traffic(#[from] TrafficError),
}

/// Values given per edge, as a list or as an object keyed by edge index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerEdge<T> {
    List(Vec<T>),
    Map(BTreeMap<String, T>),
}

impl<T: Clone> PerEdge<T> {
    fn into_list(self, field: &'static str, m: usize) -> Result<Vec<T>, FormatError> {
        let list = match self {
            PerEdge::List(v) => v,
            PerEdge::Map(map) => {
                let mut slots: Vec<Option<T>> = vec![None; m];
                for (key, value) in map {
                    let bad = || FormatError::BadEdgeIndex {
                        field,
                        index: key.clone(),
                    };
                    let i: usize = key.parse().map_err(|_| bad())?;
                    *slots.get_mut(i).ok_or_else(bad)? = Some(value);
                }
                let got = slots.iter().filter(|x| x.is_some()).count();
                slots
                    .into_iter()
                    .collect::<Option<Vec<T>>>()
                    .ok_or(FormatError::WrongLength {
                        field,
                        expected: m,
                        got,
                    })?
            }
        };
        if list.len() != m {
            return Err(FormatError::WrongLength {
                field,
                expected: m,
                got: list.len(),
            });
        }
        Ok(list)
    }
}

/// A capacity as written: a JSON number or a `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Plain(serde_json::Number),
    Text(String),
}

impl From<Rational64> for Number {
    fn from(r: Rational64) -> Self {
        if r.is_integer() {
            Number::Plain((*r.numer()).into())
        } else {
            Number::Text(r.to_string())
        }
    }
}

/// Reads `12`, `-0.25`, `1.5e-3` or `3/4` exactly.
pub fn parse_rational(text: &str) -> Option<Rational64> {
    if let Some((p, q)) = text.split_once('/') {
        let p: i64 = p.trim().parse().ok()?;
        let q: i64 = q.trim().parse().ok()?;
        return (q != 0).then(|| Rational64::new(p, q));
    }
    let (mantissa, exponent) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa),
    };
    let (whole, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if whole.is_empty() && frac.is_empty()
        || !whole
            .chars()
            .chain(frac.chars())
            .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits: i64 = format!("{whole}{frac}").parse().ok()?;
    let scale = exponent - i32::try_from(frac.len()).ok()?;
    let power = 10i64.checked_pow(scale.unsigned_abs())?;
    let value = match scale >= 0 {
        true => Rational64::from_integer(digits.checked_mul(power)?),
        false => Rational64::new(digits, power),
    };
    Some(if negative { -value } else { value })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub source: String,
    pub sink: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charges: Option<BTreeMap<String, Amount>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacities: Option<PerEdge<Number>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latencies: Option<PerEdge<Affine>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demand: Option<f64>,
}

/// A parsed graph file, with attributes re-indexed to the graph's vertices and
/// edges.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedGraph {
    pub graph: DirectedStGraph,
    /// Maps from the file's vertex and edge order to the graph's.
    pub relabel: Relabel,
    pub charges: Option<Vec<Amount>>,
    pub capacities: Option<Vec<Rational64>>,
    pub latencies: Option<Vec<Affine>>,
    pub demand: Option<f64>,
}

impl GraphFile {
    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph files serialize")
    }

    /// The bare graph, with no attributes.
    pub fn from_graph(g: &DirectedStGraph) -> Self {
        GraphFile {
            vertices: g.names().to_vec(),
            edges: g
                .edges()
                .iter()
                .map(|&(u, v)| (g.name(u).to_string(), g.name(v).to_string()))
                .collect(),
            source: g.name(g.source()).to_string(),
            sink: g.name(g.sink()).to_string(),
            charges: None,
            capacities: None,
            latencies: None,
            demand: None,
        }
    }

    pub fn load(&self, policy: OffPathPolicy) -> Result<LoadedGraph, FormatError> {
        let mut index: HashMap<&str, usize> = HashMap::new();
        for (i, name) in self.vertices.iter().enumerate() {
            if index.insert(name, i).is_some() {
                return Err(FormatError::DuplicateVertex(name.clone()));
            }
        }
        let lookup = |field: &'static str, name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| FormatError::UnknownVertex {
                    field,
                    name: name.to_string(),
                })
        };
        let edges = self
            .edges
            .iter()
            .map(|(a, b)| Ok((lookup("edges", a)?, lookup("edges", b)?)))
            .collect::<Result<Vec<_>, FormatError>>()?;
        let source = lookup("source", &self.source)?;
        let sink = lookup("sink", &self.sink)?;
        let (graph, relabel) =
            DirectedStGraph::build(self.vertices.clone(), &edges, source, sink, policy)?;

        let charges = match &self.charges {
            None => None,
            Some(map) => {
                let mut charge = vec![Amount::Infinite; graph.n()];
                for (name, &amount) in map {
                    if let Some(v) = relabel.vertex[lookup("charges", name)?] {
                        charge[v] = amount;
                    }
                }
                Some(charge)
            }
        };
        let m = self.edges.len();
        let kept = |values: Vec<_>| keep_edges(&relabel, values);
        let capacities = match self.capacities.clone() {
            None => None,
            Some(per_edge) => {
                let values = per_edge
                    .into_list("capacities", m)?
                    .into_iter()
                    .map(|n| {
                        let text = match n {
                            Number::Plain(x) => x.to_string(),
                            Number::Text(t) => t,
                        };
                        parse_rational(&text)
                            .filter(|r| *r >= Rational64::zero())
                            .ok_or(FormatError::BadNumber {
                                field: "capacities",
                                value: text,
                            })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Some(kept(values))
            }
        };
        let latencies = match self.latencies.clone() {
            None => None,
            Some(per_edge) => Some(keep_edges(&relabel, per_edge.into_list("latencies", m)?)),
        };
        Ok(LoadedGraph {
            graph,
            relabel,
            charges,
            capacities,
            latencies,
            demand: self.demand,
        })
    }
}

fn keep_edges<T: Clone>(relabel: &Relabel, values: Vec<T>) -> Vec<T> {
    relabel
        .edge_to_parent
        .iter()
        .map(|&e| values[e].clone())
        .collect()
}

impl LoadedGraph {
    pub fn parse(text: &str, policy: OffPathPolicy) -> Result<Self, FormatError> {
        GraphFile::from_json(text)?.load(policy)
    }

    /// Writes the graph and its attributes back out in the graph's own
    /// vertex and edge order.
    pub fn to_file(&self) -> GraphFile {
        let g = &self.graph;
        let mut file = GraphFile::from_graph(g);
        file.charges = self.charges.as_ref().map(|c| {
            g.interior()
                .map(|v| (g.name(v).to_string(), c[v]))
                .collect()
        });
        file.capacities = self
            .capacities
            .as_ref()
            .map(|c| PerEdge::List(c.iter().map(|&r| r.into()).collect()));
        file.latencies = self.latencies.clone().map(PerEdge::List);
        file.demand = self.demand;
        file
    }

    pub fn channel(&self) -> Result<DepletableChannel, FormatError> {
        let charge = self
            .charges
            .clone()
            .ok_or(FormatError::Missing("charges"))?;
        Ok(DepletableChannel::new(self.graph.clone(), charge)?)
    }

    pub fn network(&self) -> Result<CapacitatedNetwork, FormatError> {
        let capacity = self
            .capacities
            .clone()
            .ok_or(FormatError::Missing("capacities"))?;
        Ok(CapacitatedNetwork::new(self.graph.clone(), capacity)?)
    }

    pub fn traffic(&self) -> Result<TrafficInstance, FormatError> {
        let latency = self
            .latencies
            .clone()
            .ok_or(FormatError::Missing("latencies"))?;
        let demand = self.demand.ok_or(FormatError::Missing("demand"))?;
        Ok(TrafficInstance::new(self.graph.clone(), latency, demand)?)
    }
}
