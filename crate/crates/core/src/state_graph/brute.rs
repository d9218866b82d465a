use super::{check_endpoints, checked_weight, PathError, StateGraph, StateNode, StatePath, WeightSource};

/// Largest `num_states * num_nodes` accepted by the exhaustive search.
pub const DEFAULT_ENUMERATION_BOUND: usize = 24;

#[derive(Debug, Clone, Copy)]
pub struct BruteForceOptions {
    pub bound: usize,
}

impl Default for BruteForceOptions {
    fn default() -> Self {
        Self { bound: DEFAULT_ENUMERATION_BOUND }
    }
}

struct Enumerator<'g, G: ?Sized> {
    graph: &'g G,
    depart_time: f64,
    target: StateNode,
    on_path: Vec<bool>,
    stack: Vec<StateNode>,
    best: Option<StatePath>,
}

impl<G: StateGraph + ?Sized> Enumerator<'_, G> {
    fn best_length(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |p| p.length)
    }

    fn slot(&self, v: StateNode) -> usize {
        v.state * self.graph.num_nodes() + v.node
    }

    // Extends the current prefix in every valid way. A prefix whose length
    // already reaches the best complete path cannot improve on it, since
    // weights are nonnegative.
    fn extend(&mut self, length: f64) -> Result<(), PathError> {
        let here = *self.stack.last().expect("prefix is never empty");
        if here == self.target {
            if length < self.best_length() {
                self.best = Some(StatePath::new(self.stack.clone(), length));
            }
            return Ok(());
        }
        let at = self.depart_time + length;
        let (k, s) = (here.state, here.node);

        for n in 0..self.graph.num_nodes() {
            let next = StateNode::new(k, n);
            if n == s || self.on_path[self.slot(next)] {
                continue;
            }
            let w = checked_weight(self.graph.edge_weight(k, s, n, at), WeightSource::Edge { state: k, from: s, to: n })?;
            self.step(next, length + w)?;
        }
        if k + 1 < self.graph.num_states() {
            let next = StateNode::new(k + 1, s);
            let w = checked_weight(self.graph.transition_weight(k, s, at), WeightSource::Transition { state: k, node: s })?;
            self.step(next, length + w)?;
        }
        Ok(())
    }

    fn step(&mut self, next: StateNode, length: f64) -> Result<(), PathError> {
        if length.is_infinite() || length >= self.best_length() {
            return Ok(());
        }
        let slot = self.slot(next);
        self.on_path[slot] = true;
        self.stack.push(next);
        let res = self.extend(length);
        self.stack.pop();
        self.on_path[slot] = false;
        res
    }
}

/// Minimum-length path from `(0, source)` to `(num_states - 1, dest)` by
/// enumerating valid paths depth-first. Intended as a test oracle for small
/// instances only.
pub fn brute_force_shortest_path<G: StateGraph + ?Sized>(
    graph: &G,
    source: usize,
    dest: usize,
    depart_time: f64,
    opts: &BruteForceOptions,
) -> Result<StatePath, PathError> {
    check_endpoints(graph, source, dest)?;
    let size = graph.num_states() * graph.num_nodes();
    if size > opts.bound {
        return Err(PathError::BoundExceeded { size, bound: opts.bound });
    }
    let start = StateNode::new(0, source);
    let mut e = Enumerator {
        graph,
        depart_time,
        target: StateNode::new(graph.num_states() - 1, dest),
        on_path: vec![false; size],
        stack: vec![start],
        best: None,
    };
    let slot = e.slot(start);
    e.on_path[slot] = true;
    e.extend(0.0)?;
    e.best.ok_or(PathError::Unreachable)
}
