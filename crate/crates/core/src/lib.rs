//! Analysis of directed source-to-sink graphs: vertex separators, depletable
//! channels, flow networks, two-terminal series-parallel recognition and
//! selfish routing.

pub mod channels;
pub mod classify;
pub mod dot;
pub mod flownets;
pub mod format;
pub mod graph;
mod maxflow;
pub mod oracles;
pub mod separators;
pub mod sweep;
pub mod traffic;
pub mod ttsp;

pub use graph::{DirectedStGraph, GraphError, OffPathPolicy, Relabel, Vertex, VertexSet};
