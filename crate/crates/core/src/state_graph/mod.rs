//! Multi-state graphs and shortest paths over them.
//!
//! A state graph replicates every node of an ordinary graph across an
//! ordered list of states. Inside one state, nodes are joined by edges whose
//! weights come from a per-state function; a node may move from state `k`
//! to state `k + 1` through a per-node transition weight. Paths may never
//! move to a lower state and never revisit a node within the same state.
//!
//! States are indexed from zero here, so a graph with `num_states == 2` has
//! states `0` and `1`. Searches start at `(0, source)` and end at
//! `(num_states - 1, dest)`.
//!
//! Weights are queried lazily with the absolute time at which the path
//! reaches the head of the edge. Infinite weights mean "no edge". Search
//! results are exact for static weights and for time-dependent weights that
//! satisfy the FIFO property (departing later never arrives earlier); see
//! [`check_fifo_sampled`].

mod brute;
mod dense;
mod dijkstra;
mod path;

pub use brute::{brute_force_shortest_path, BruteForceOptions, DEFAULT_ENUMERATION_BOUND};
pub use dense::DenseStateGraph;
pub use dijkstra::{search, shortest_path, shortest_path_with, Extraction, SearchOptions, SearchState};
pub use path::{path_length, validate_path, PathViolation, StatePath, ViolationKind};

use std::fmt;

/// A `(state, node)` pair. Ordering is lexicographic, state first, which is
/// also the tie-breaking order used by the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct StateNode {
    pub state: usize,
    pub node: usize,
}

impl StateNode {
    pub const fn new(state: usize, node: usize) -> Self {
        Self { state, node }
    }
}

impl fmt::Display for StateNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.state, self.node)
    }
}

/// Weight provider for a state graph.
///
/// Implementations must return a nonnegative number or `f64::INFINITY`.
/// Negative or NaN weights are rejected by the search with
/// [`PathError::Weight`].
pub trait StateGraph {
    fn num_states(&self) -> usize;

    fn num_nodes(&self) -> usize;

    /// Weight of the edge `from -> to` inside `state`, for a path that
    /// reaches `from` at time `at`.
    fn edge_weight(&self, state: usize, from: usize, to: usize, at: f64) -> f64;

    /// Weight of moving `node` from `state` to `state + 1`, for a path that
    /// reaches `(state, node)` at time `at`. Only queried for
    /// `state + 1 < num_states()`.
    fn transition_weight(&self, state: usize, node: usize, at: f64) -> f64;

    /// Optional adjacency hint. When it returns `true`, `out` holds every
    /// node that may have a finite edge from `(state, from)` at time `at`;
    /// nodes left out are treated as unreachable in one hop. The default is
    /// dense: every node is a candidate.
    fn neighbor_hint(&self, _state: usize, _from: usize, _at: f64, _out: &mut Vec<usize>) -> bool {
        false
    }
}

impl<G: StateGraph + ?Sized> StateGraph for &G {
    fn num_states(&self) -> usize {
        (**self).num_states()
    }
    fn num_nodes(&self) -> usize {
        (**self).num_nodes()
    }
    fn edge_weight(&self, state: usize, from: usize, to: usize, at: f64) -> f64 {
        (**self).edge_weight(state, from, to, at)
    }
    fn transition_weight(&self, state: usize, node: usize, at: f64) -> f64 {
        (**self).transition_weight(state, node, at)
    }
    fn neighbor_hint(&self, state: usize, from: usize, at: f64, out: &mut Vec<usize>) -> bool {
        (**self).neighbor_hint(state, from, at, out)
    }
}

/// Which weight function produced a rejected value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightSource {
    Edge { state: usize, from: usize, to: usize },
    Transition { state: usize, node: usize },
}

impl fmt::Display for WeightSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSource::Edge { state, from, to } => write!(f, "edge {from}->{to} in state {state}"),
            WeightSource::Transition { state, node } => write!(f, "transition of node {node} from state {state}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PathError {
    #[error("destination is unreachable")]
    Unreachable,
    #[error("invalid weight {value} on {weight}")]
    Weight { weight: WeightSource, value: f64 },
    #[error("invalid path: {0}")]
    InvalidPath(#[from] PathViolation),
    #[error("node {node} out of range (graph has {num_nodes} nodes)")]
    NodeOutOfRange { node: usize, num_nodes: usize },
    #[error("state {state} out of range (graph has {num_states} states)")]
    StateOutOfRange { state: usize, num_states: usize },
    #[error("graph has no states")]
    NoStates,
    #[error("instance of {size} (state, node) pairs exceeds enumeration bound {bound}")]
    BoundExceeded { size: usize, bound: usize },
}

pub(crate) fn checked_weight(value: f64, source: WeightSource) -> Result<f64, PathError> {
    if value.is_nan() || value < 0.0 {
        Err(PathError::Weight { weight: source, value })
    } else {
        Ok(value)
    }
}

pub(crate) fn check_endpoints<G: StateGraph + ?Sized>(graph: &G, source: usize, dest: usize) -> Result<(), PathError> {
    if graph.num_states() == 0 {
        return Err(PathError::NoStates);
    }
    let num_nodes = graph.num_nodes();
    for node in [source, dest] {
        if node >= num_nodes {
            return Err(PathError::NodeOutOfRange { node, num_nodes });
        }
    }
    Ok(())
}

/// Samples the FIFO condition `t1 + w(t1) <= t2 + w(t2)` for every edge and
/// transition at each consecutive pair of `times` (which must be sorted).
/// Returns the first violation found.
pub fn check_fifo_sampled<G: StateGraph + ?Sized>(graph: &G, times: &[f64]) -> Option<(WeightSource, f64, f64)> {
    let arrival_ok = |w1: f64, t1: f64, w2: f64, t2: f64| t1 + w1 <= t2 + w2 + 1e-9 * (1.0 + t2.abs());
    for pair in times.windows(2) {
        let (t1, t2) = (pair[0], pair[1]);
        for k in 0..graph.num_states() {
            for s in 0..graph.num_nodes() {
                for n in 0..graph.num_nodes() {
                    if s == n {
                        continue;
                    }
                    let (w1, w2) = (graph.edge_weight(k, s, n, t1), graph.edge_weight(k, s, n, t2));
                    if !arrival_ok(w1, t1, w2, t2) {
                        return Some((WeightSource::Edge { state: k, from: s, to: n }, t1, t2));
                    }
                }
                if k + 1 < graph.num_states() {
                    let (w1, w2) = (graph.transition_weight(k, s, t1), graph.transition_weight(k, s, t2));
                    if !arrival_ok(w1, t1, w2, t2) {
                        return Some((WeightSource::Transition { state: k, node: s }, t1, t2));
                    }
                }
            }
        }
    }
    None
}
