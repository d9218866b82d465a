use std::collections::HashSet;
use std::fmt;

use super::{checked_weight, PathError, StateGraph, StateNode, WeightSource};

/// A path through a state graph: the visited `(state, node)` pairs in order,
/// plus the length reported by whoever produced it.
///
/// A path with zero or one hop has no edges and length zero.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StatePath {
    pub hops: Vec<StateNode>,
    pub length: f64,
}

impl StatePath {
    pub fn new(hops: Vec<StateNode>, length: f64) -> Self {
        Self { hops, length }
    }

    /// Builds a path from `(state, node)` tuples, length zero.
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Self {
        Self {
            hops: pairs.iter().map(|&(k, s)| StateNode::new(k, s)).collect(),
            length: 0.0,
        }
    }

    pub fn num_edges(&self) -> usize {
        self.hops.len().saturating_sub(1)
    }

    /// Consecutive `(head, tail)` pairs.
    pub fn edges(&self) -> impl Iterator<Item = (StateNode, StateNode)> + '_ {
        self.hops.windows(2).map(|w| (w[0], w[1]))
    }

    /// Hops at which the path moves to the next state, as the node moved.
    pub fn transitions(&self) -> impl Iterator<Item = StateNode> + '_ {
        self.edges().filter(|(a, b)| a.state != b.state).map(|(a, _)| a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    DecreasingState,
    /// State increased by more than one in a single step.
    StateJump,
    /// A transition that also changes the node.
    TransitionMovesNode,
    /// Same state and same node in consecutive hops.
    SelfLoop,
    /// A `(state, node)` pair that already appeared earlier.
    RepeatedNode,
}

/// First offending hop of an invalid path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub struct PathViolation {
    pub hop: usize,
    pub kind: ViolationKind,
}

impl fmt::Display for PathViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            ViolationKind::DecreasingState => "state decreases",
            ViolationKind::StateJump => "state skips ahead by more than one",
            ViolationKind::TransitionMovesNode => "state transition changes node",
            ViolationKind::SelfLoop => "self-loop within a state",
            ViolationKind::RepeatedNode => "node repeated within a state",
        };
        write!(f, "{what} at hop {}", self.hop)
    }
}

/// Checks that states never decrease, that no `(state, node)` repeats, and
/// that each step is either a same-state move to a different node or a
/// single-state transition of the same node.
pub fn validate_path(path: &StatePath) -> Result<(), PathViolation> {
    let mut seen = HashSet::with_capacity(path.hops.len());
    for (i, hop) in path.hops.iter().enumerate() {
        if i > 0 {
            let prev = path.hops[i - 1];
            let kind = if hop.state < prev.state {
                Some(ViolationKind::DecreasingState)
            } else if hop.state > prev.state + 1 {
                Some(ViolationKind::StateJump)
            } else if hop.state == prev.state + 1 && hop.node != prev.node {
                Some(ViolationKind::TransitionMovesNode)
            } else if hop.state == prev.state && hop.node == prev.node {
                Some(ViolationKind::SelfLoop)
            } else {
                None
            };
            if let Some(kind) = kind {
                return Err(PathViolation { hop: i, kind });
            }
        }
        if !seen.insert(*hop) {
            return Err(PathViolation { hop: i, kind: ViolationKind::RepeatedNode });
        }
    }
    Ok(())
}

/// Sum of the weights along `path`, each queried at the time the path
/// reaches the edge head (`depart_time` plus the length so far).
///
/// Returns `f64::INFINITY` if any queried weight is infinite.
pub fn path_length<G: StateGraph + ?Sized>(graph: &G, path: &StatePath, depart_time: f64) -> Result<f64, PathError> {
    validate_path(path)?;
    let (num_states, num_nodes) = (graph.num_states(), graph.num_nodes());
    for hop in &path.hops {
        if hop.node >= num_nodes {
            return Err(PathError::NodeOutOfRange { node: hop.node, num_nodes });
        }
        if hop.state >= num_states {
            return Err(PathError::StateOutOfRange { state: hop.state, num_states });
        }
    }
    let mut total = 0.0;
    for (head, tail) in path.edges() {
        let at = depart_time + total;
        let w = if head.state == tail.state {
            let src = WeightSource::Edge { state: head.state, from: head.node, to: tail.node };
            checked_weight(graph.edge_weight(head.state, head.node, tail.node, at), src)?
        } else {
            let src = WeightSource::Transition { state: head.state, node: head.node };
            checked_weight(graph.transition_weight(head.state, head.node, at), src)?
        };
        total += w;
        if total.is_infinite() {
            return Ok(f64::INFINITY);
        }
    }
    Ok(total)
}
