use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::io::{self, Write};

use super::{check_endpoints, checked_weight, PathError, StateGraph, StateNode, StatePath, WeightSource};

/// How the next node to settle is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Extraction {
    /// Scan every unvisited `(state, node)` for the minimum distance. This is
    /// the reference implementation with `Θ(|K|²·|V|²)` cost on dense graphs.
    #[default]
    LinearScan,
    /// Lazy-deletion binary heap. Settles nodes in exactly the same order as
    /// the linear scan, including ties.
    BinaryHeap,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SearchOptions {
    pub extraction: Extraction,
    /// Stop as soon as this `(state, node)` is settled.
    pub stop_at: Option<StateNode>,
}

/// Working state of one search: tentative distances, parents and the set of
/// settled nodes, indexed by `state * num_nodes + node`.
#[derive(Debug, Clone)]
pub struct SearchState {
    num_nodes: usize,
    source: StateNode,
    dist: Vec<f64>,
    parent: Vec<Option<StateNode>>,
    visited: Vec<bool>,
    extraction_log: Vec<(StateNode, f64)>,
}

impl SearchState {
    fn new(num_states: usize, num_nodes: usize, source: StateNode) -> Self {
        let n = num_states * num_nodes;
        let mut s = Self {
            num_nodes,
            source,
            dist: vec![f64::INFINITY; n],
            parent: vec![None; n],
            visited: vec![false; n],
            extraction_log: Vec::with_capacity(n),
        };
        let i = s.index(source);
        s.dist[i] = 0.0;
        s
    }

    fn index(&self, v: StateNode) -> usize {
        v.state * self.num_nodes + v.node
    }

    fn state_node(&self, index: usize) -> StateNode {
        StateNode::new(index / self.num_nodes, index % self.num_nodes)
    }

    pub fn source(&self) -> StateNode {
        self.source
    }

    pub fn dist(&self, v: StateNode) -> f64 {
        self.dist[self.index(v)]
    }

    pub fn parent(&self, v: StateNode) -> Option<StateNode> {
        self.parent[self.index(v)]
    }

    pub fn is_visited(&self, v: StateNode) -> bool {
        self.visited[self.index(v)]
    }

    /// Settled nodes in the order they left the unvisited set, with their
    /// distance at that moment.
    pub fn extraction_log(&self) -> &[(StateNode, f64)] {
        &self.extraction_log
    }

    /// Follows parent links back from `target`. `None` if unreachable.
    pub fn path_to(&self, target: StateNode) -> Option<StatePath> {
        let length = self.dist(target);
        if length.is_infinite() {
            return None;
        }
        let mut hops = vec![target];
        let mut cur = target;
        while cur != self.source {
            cur = self.parent(cur)?;
            hops.push(cur);
        }
        hops.reverse();
        Some(StatePath::new(hops, length))
    }

    /// Line-oriented dump: one `state node dist parent visited` line per
    /// `(state, node)`, with `-` for a missing parent.
    pub fn dump<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "# source {}", self.source)?;
        for i in 0..self.dist.len() {
            let v = self.state_node(i);
            let parent = self.parent[i].map_or_else(|| "-".to_string(), |p| p.to_string());
            writeln!(out, "{} {} {} {} {}", v.state, v.node, self.dist[i], parent, u8::from(self.visited[i]))?;
        }
        Ok(())
    }
}

#[derive(PartialEq)]
struct HeapEntry(f64, usize);

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Runs the extended Dijkstra search from `(0, source)` until every
/// reachable `(state, node)` is settled (or `opts.stop_at` is settled).
///
/// Every weight is queried at `depart_time + dist(head)`.
pub fn search<G: StateGraph + ?Sized>(
    graph: &G,
    source: usize,
    depart_time: f64,
    opts: &SearchOptions,
) -> Result<SearchState, PathError> {
    check_endpoints(graph, source, source)?;
    let num_states = graph.num_states();
    let num_nodes = graph.num_nodes();
    let mut st = SearchState::new(num_states, num_nodes, StateNode::new(0, source));
    let stop_index = opts.stop_at.map(|v| st.index(v));

    let mut heap = BinaryHeap::new();
    if opts.extraction == Extraction::BinaryHeap {
        heap.push(Reverse(HeapEntry(0.0, st.index(st.source))));
    }
    let mut candidates = Vec::new();

    loop {
        let current = match opts.extraction {
            Extraction::LinearScan => {
                let mut theta = f64::INFINITY;
                let mut best = None;
                for (i, (&d, &seen)) in st.dist.iter().zip(&st.visited).enumerate() {
                    if !seen && d < theta {
                        theta = d;
                        best = Some(i);
                    }
                }
                best
            }
            Extraction::BinaryHeap => {
                let mut best = None;
                while let Some(Reverse(HeapEntry(d, i))) = heap.pop() {
                    if !st.visited[i] && d <= st.dist[i] {
                        best = Some(i);
                        break;
                    }
                }
                best
            }
        };
        let Some(cur) = current else { break };

        st.visited[cur] = true;
        let here = st.state_node(cur);
        let base = st.dist[cur];
        st.extraction_log.push((here, base));
        if stop_index == Some(cur) {
            break;
        }
        let at = depart_time + base;
        let (k, s) = (here.state, here.node);

        candidates.clear();
        if !graph.neighbor_hint(k, s, at, &mut candidates) {
            candidates.clear();
            candidates.extend(0..num_nodes);
        }
        for &n in &candidates {
            let next = k * num_nodes + n;
            if n == s || st.visited[next] {
                continue;
            }
            let w = checked_weight(graph.edge_weight(k, s, n, at), WeightSource::Edge { state: k, from: s, to: n })?;
            if w.is_infinite() {
                continue;
            }
            let gamma = base + w;
            if gamma < st.dist[next] {
                st.dist[next] = gamma;
                st.parent[next] = Some(here);
                if opts.extraction == Extraction::BinaryHeap {
                    heap.push(Reverse(HeapEntry(gamma, next)));
                }
            }
        }

        if k + 1 < num_states {
            let next = (k + 1) * num_nodes + s;
            let w = checked_weight(graph.transition_weight(k, s, at), WeightSource::Transition { state: k, node: s })?;
            let gamma = base + w;
            if gamma < st.dist[next] {
                st.dist[next] = gamma;
                st.parent[next] = Some(here);
                if opts.extraction == Extraction::BinaryHeap {
                    heap.push(Reverse(HeapEntry(gamma, next)));
                }
            }
        }
    }
    Ok(st)
}

/// Shortest path from `(0, source)` to `(num_states - 1, dest)` using the
/// reference linear-scan search.
pub fn shortest_path<G: StateGraph + ?Sized>(
    graph: &G,
    source: usize,
    dest: usize,
    depart_time: f64,
) -> Result<StatePath, PathError> {
    shortest_path_with(graph, source, dest, depart_time, &SearchOptions::default())
}

pub fn shortest_path_with<G: StateGraph + ?Sized>(
    graph: &G,
    source: usize,
    dest: usize,
    depart_time: f64,
    opts: &SearchOptions,
) -> Result<StatePath, PathError> {
    check_endpoints(graph, source, dest)?;
    let target = StateNode::new(graph.num_states() - 1, dest);
    let st = search(graph, source, depart_time, opts)?;
    st.path_to(target).ok_or(PathError::Unreachable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state_graph::{path_length, validate_path, DenseStateGraph};

    fn two_state_example() -> DenseStateGraph {
        let mut g = DenseStateGraph::new(2, 2);
        g.set_edge(0, 0, 1, 5.0);
        g.set_edge(1, 0, 1, 1.0);
        g.set_transition(0, 0, 3.0);
        g.set_transition(0, 1, 0.0);
        g
    }

    #[test]
    fn single_state_source_is_destination() {
        let g = DenseStateGraph::new(1, 3);
        let p = shortest_path(&g, 0, 0, 0.0).unwrap();
        assert_eq!(p.hops, vec![StateNode::new(0, 0)]);
        assert_eq!(p.length, 0.0);
        assert_eq!(p.num_edges(), 0);
    }

    #[test]
    fn computes_before_moving_when_cheaper() {
        let g = two_state_example();
        let p = shortest_path(&g, 0, 1, 0.0).unwrap();
        assert_eq!(p.hops, StatePath::from_pairs(&[(0, 0), (1, 0), (1, 1)]).hops);
        assert_eq!(p.length, 4.0);
        assert_eq!(path_length(&g, &p, 0.0).unwrap(), 4.0);
        validate_path(&p).unwrap();
    }

    #[test]
    fn heap_matches_linear_scan() {
        let g = two_state_example();
        let opts = SearchOptions { extraction: Extraction::BinaryHeap, ..Default::default() };
        let a = shortest_path(&g, 0, 1, 0.0).unwrap();
        let b = shortest_path_with(&g, 0, 1, 0.0, &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unreachable_when_all_absent() {
        let g = DenseStateGraph::new(2, 2);
        assert_eq!(shortest_path(&g, 0, 1, 0.0), Err(PathError::Unreachable));
    }

    #[test]
    fn negative_weight_reported() {
        let mut g = two_state_example();
        g.set_edge(0, 0, 1, -2.0);
        let err = shortest_path(&g, 0, 1, 0.0).unwrap_err();
        assert!(matches!(err, PathError::Weight { value, .. } if value == -2.0));
    }

    #[test]
    fn nan_weight_reported() {
        let mut g = two_state_example();
        g.set_transition(0, 0, f64::NAN);
        assert!(matches!(shortest_path(&g, 0, 1, 0.0), Err(PathError::Weight { .. })));
    }

    #[test]
    fn out_of_range_endpoints() {
        let g = two_state_example();
        assert_eq!(shortest_path(&g, 0, 7, 0.0), Err(PathError::NodeOutOfRange { node: 7, num_nodes: 2 }));
    }

    #[test]
    fn ties_prefer_smallest_pair() {
        // 0 -> 1 -> 3 and 0 -> 2 -> 3 both cost 2.
        let mut g = DenseStateGraph::new(1, 4);
        g.set_edge(0, 0, 1, 1.0);
        g.set_edge(0, 0, 2, 1.0);
        g.set_edge(0, 1, 3, 1.0);
        g.set_edge(0, 2, 3, 1.0);
        let p = shortest_path(&g, 0, 3, 0.0).unwrap();
        assert_eq!(p.hops, StatePath::from_pairs(&[(0, 0), (0, 1), (0, 3)]).hops);
    }

    #[test]
    fn stop_at_gives_same_path() {
        let g = two_state_example();
        let target = StateNode::new(1, 1);
        let opts = SearchOptions { extraction: Extraction::BinaryHeap, stop_at: Some(target) };
        assert_eq!(
            shortest_path_with(&g, 0, 1, 0.0, &opts).unwrap(),
            shortest_path(&g, 0, 1, 0.0).unwrap()
        );
    }

    #[test]
    fn dump_has_one_line_per_pair() {
        let g = two_state_example();
        let st = search(&g, 0, 0.0, &SearchOptions::default()).unwrap();
        let mut buf = Vec::new();
        st.dump(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 4);
        assert!(text.contains("1 1 4 (1,0) 1"));
    }

    #[test]
    fn time_dependent_weights_see_arrival_time() {
        struct Waiting;
        impl StateGraph for Waiting {
            fn num_states(&self) -> usize {
                1
            }
            fn num_nodes(&self) -> usize {
                3
            }
            fn edge_weight(&self, _k: usize, from: usize, to: usize, at: f64) -> f64 {
                match (from, to) {
                    (0, 1) => 1.0,
                    // Opens at t = 10, costs 1 afterwards.
                    (1, 2) => (10.0 - at).max(0.0) + 1.0,
                    (0, 2) => 20.0,
                    _ => f64::INFINITY,
                }
            }
            fn transition_weight(&self, _k: usize, _s: usize, _at: f64) -> f64 {
                f64::INFINITY
            }
        }
        let early = shortest_path(&Waiting, 0, 2, 0.0).unwrap();
        assert_eq!(early.length, 11.0);
        let late = shortest_path(&Waiting, 0, 2, 100.0).unwrap();
        assert_eq!(late.length, 2.0);
        assert_eq!(path_length(&Waiting, &early, 0.0).unwrap(), 11.0);
    }
}
