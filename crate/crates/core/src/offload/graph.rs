use super::network::{attach_source, NetworkState, ResourceId};
use super::timeline::{compute_delay, transmit_delay, ComputeNodeKind, ResourceTimeline};
use super::{Scheme, Task};
use crate::constellation::{isl_candidates, isl_connected, satellite_position, sgl_visible, GeoPosition};
use crate::state_graph::StateGraph;

/// Uncomputed (raw data) state.
pub const RAW: usize = 0;
/// Computed (result data) state.
pub const RESULT: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Satellite(usize),
    Source,
    Ground,
}

/// How an edge of the offloading graph is carried.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeCarrier {
    /// Source spacecraft to an attached satellite. Never contended.
    SourceLink,
    Isl(ResourceId),
    Sgl(ResourceId),
}

/// Two-state graph for one task: satellites `0..n`, then the source, then
/// the destination ground node.
#[derive(Debug, Clone)]
pub struct OffloadGraph<'a> {
    net: &'a NetworkState,
    task: &'a Task,
    scheme: Scheme,
    attached: Vec<usize>,
    attached_flag: Vec<bool>,
    source_link: ResourceTimeline,
}

/// Builds the two-state graph of `task` over `net` with the compute
/// transition restricted by `scheme`.
pub fn build_offload_graph<'a>(net: &'a NetworkState, task: &'a Task, scheme: Scheme) -> OffloadGraph<'a> {
    let attached = attach_source(net, task.source, task.gen_time_s);
    let mut attached_flag = vec![false; net.num_satellites()];
    for &a in &attached {
        attached_flag[a] = true;
    }
    OffloadGraph {
        net,
        task,
        scheme,
        attached,
        attached_flag,
        source_link: ResourceTimeline::constant(net.params().isl_rate_bps),
    }
}

impl<'a> OffloadGraph<'a> {
    pub fn source_node(&self) -> usize {
        self.net.num_satellites()
    }

    pub fn ground_node(&self) -> usize {
        self.net.num_satellites() + 1
    }

    pub fn attached(&self) -> &[usize] {
        &self.attached
    }

    pub fn is_attached(&self, sat: usize) -> bool {
        self.attached_flag.get(sat).copied().unwrap_or(false)
    }

    pub fn task(&self) -> &Task {
        self.task
    }

    pub fn network(&self) -> &NetworkState {
        self.net
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn kind(&self, node: usize) -> NodeKind {
        let n = self.net.num_satellites();
        match node {
            s if s < n => NodeKind::Satellite(s),
            s if s == n => NodeKind::Source,
            _ => NodeKind::Ground,
        }
    }

    /// Whether the scheme allows computing at `node`.
    pub fn permits_compute(&self, node: usize) -> bool {
        match (self.scheme, self.kind(node)) {
            (_, NodeKind::Source) => false,
            (Scheme::Adaptive, _) => true,
            (Scheme::Ground, kind) => kind == NodeKind::Ground,
            (Scheme::OneHop, NodeKind::Satellite(s)) => self.is_attached(s),
            (Scheme::OneHop, NodeKind::Ground) => false,
        }
    }

    fn position(&self, node: usize, at: f64) -> GeoPosition {
        match self.kind(node) {
            NodeKind::Satellite(s) => satellite_position(self.net.constellation(), self.net.satellite(s), at),
            NodeKind::Source => self.task.source,
            NodeKind::Ground => self.net.ground_sites()[self.task.destination].position(),
        }
    }

    /// The link carrying `from -> to` at time `at`, if the two are
    /// communicable then.
    pub fn carrier(&self, from: usize, to: usize, at: f64) -> Option<EdgeCarrier> {
        let cfg = self.net.constellation();
        match (self.kind(from), self.kind(to)) {
            (NodeKind::Satellite(a), NodeKind::Satellite(b)) => {
                isl_connected(cfg, self.net.satellite(a), self.net.satellite(b), at)
                    .then_some(EdgeCarrier::Isl(ResourceId::Isl { from: a, to: b }))
            }
            (NodeKind::Source, NodeKind::Satellite(b)) => self.is_attached(b).then_some(EdgeCarrier::SourceLink),
            (NodeKind::Satellite(a), NodeKind::Ground) => {
                let site = self.task.destination;
                sgl_visible(cfg, self.net.satellite(a), self.net.ground_sites()[site], at)
                    .then_some(EdgeCarrier::Sgl(ResourceId::Sgl { sat: a, site }))
            }
            _ => None,
        }
    }

    pub fn carrier_timeline(&self, carrier: EdgeCarrier) -> &ResourceTimeline {
        match carrier {
            EdgeCarrier::SourceLink => &self.source_link,
            EdgeCarrier::Isl(id) | EdgeCarrier::Sgl(id) => self.net.timeline(id).expect("carrier resource exists"),
        }
    }

    pub fn bits_in_state(&self, state: usize) -> f64 {
        if state == RAW {
            self.task.data_in_bits
        } else {
            self.task.data_out_bits
        }
    }

    /// Propagation part of an edge weight (zero unless enabled).
    pub fn propagation_s(&self, from: usize, to: usize, at: f64) -> f64 {
        if self.net.params().propagation_delay {
            self.net.propagation_s(self.position(from, at), self.position(to, at))
        } else {
            0.0
        }
    }

    fn compute_kind(&self, node: usize) -> ComputeNodeKind {
        match self.kind(node) {
            NodeKind::Satellite(_) => ComputeNodeKind::Satellite,
            NodeKind::Source => ComputeNodeKind::Source,
            NodeKind::Ground => ComputeNodeKind::Ground,
        }
    }

    pub fn cpu_timeline(&self, node: usize) -> Option<&ResourceTimeline> {
        match self.kind(node) {
            NodeKind::Satellite(s) => self.net.timeline(ResourceId::Cpu { sat: s }),
            _ => None,
        }
    }
}

impl StateGraph for OffloadGraph<'_> {
    fn num_states(&self) -> usize {
        2
    }

    fn num_nodes(&self) -> usize {
        self.net.num_satellites() + 2
    }

    fn edge_weight(&self, state: usize, from: usize, to: usize, at: f64) -> f64 {
        match self.carrier(from, to, at) {
            Some(c) => transmit_delay(self.carrier_timeline(c), self.bits_in_state(state), at) + self.propagation_s(from, to, at),
            None => f64::INFINITY,
        }
    }

    fn transition_weight(&self, _state: usize, node: usize, at: f64) -> f64 {
        if !self.permits_compute(node) {
            return f64::INFINITY;
        }
        let idle = ResourceTimeline::constant(0.0);
        let cpu = self.cpu_timeline(node).unwrap_or(&idle);
        compute_delay(cpu, self.task.compute_gflo, at, self.compute_kind(node))
    }

    fn neighbor_hint(&self, _state: usize, from: usize, _at: f64, out: &mut Vec<usize>) -> bool {
        match self.kind(from) {
            NodeKind::Satellite(s) => {
                let cfg = self.net.constellation();
                out.extend(isl_candidates(cfg, self.net.satellite(s)).into_iter().map(|x| x.node(cfg)));
                out.push(self.ground_node());
            }
            NodeKind::Source => out.extend_from_slice(&self.attached),
            NodeKind::Ground => {}
        }
        true
    }
}
