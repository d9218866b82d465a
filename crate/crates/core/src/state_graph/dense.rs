use super::StateGraph;

/// A state graph with static weights stored in dense matrices.
///
/// Every weight starts out infinite (absent). Self-loops are never read.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseStateGraph {
    num_states: usize,
    num_nodes: usize,
    edges: Vec<f64>,
    transitions: Vec<f64>,
}

impl DenseStateGraph {
    pub fn new(num_states: usize, num_nodes: usize) -> Self {
        Self {
            num_states,
            num_nodes,
            edges: vec![f64::INFINITY; num_states * num_nodes * num_nodes],
            transitions: vec![f64::INFINITY; num_states.saturating_sub(1) * num_nodes],
        }
    }

    fn edge_index(&self, state: usize, from: usize, to: usize) -> usize {
        assert!(state < self.num_states && from < self.num_nodes && to < self.num_nodes);
        (state * self.num_nodes + from) * self.num_nodes + to
    }

    pub fn set_edge(&mut self, state: usize, from: usize, to: usize, weight: f64) {
        let i = self.edge_index(state, from, to);
        self.edges[i] = weight;
    }

    /// Sets `from -> to` and `to -> from` to the same weight.
    pub fn set_undirected(&mut self, state: usize, a: usize, b: usize, weight: f64) {
        self.set_edge(state, a, b, weight);
        self.set_edge(state, b, a, weight);
    }

    pub fn set_transition(&mut self, state: usize, node: usize, weight: f64) {
        assert!(state + 1 < self.num_states && node < self.num_nodes);
        self.transitions[state * self.num_nodes + node] = weight;
    }

    pub fn edge(&self, state: usize, from: usize, to: usize) -> f64 {
        self.edges[self.edge_index(state, from, to)]
    }

    pub fn transition(&self, state: usize, node: usize) -> f64 {
        assert!(state + 1 < self.num_states && node < self.num_nodes);
        self.transitions[state * self.num_nodes + node]
    }
}

impl StateGraph for DenseStateGraph {
    fn num_states(&self) -> usize {
        self.num_states
    }

    fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    fn edge_weight(&self, state: usize, from: usize, to: usize, _at: f64) -> f64 {
        self.edge(state, from, to)
    }

    fn transition_weight(&self, state: usize, node: usize, _at: f64) -> f64 {
        self.transition(state, node)
    }
}
