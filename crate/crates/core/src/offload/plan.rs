use serde::Serialize;

use super::graph::{build_offload_graph, EdgeCarrier, NodeKind, OffloadGraph, RAW, RESULT};
use super::network::{NetworkState, ResourceId};
use super::timeline::{Service, TimelineError};
use super::{Scheme, Task};
use crate::constellation::SatelliteId;
use crate::state_graph::{shortest_path_with, Extraction, PathError, SearchOptions, StateNode, StatePath, StateGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LegKind {
    Isl,
    Sgl,
    Compute,
}

/// One step of a plan: a transmission or the computation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Leg {
    pub kind: LegKind,
    pub state: usize,
    pub from: usize,
    pub to: usize,
    /// Shared resource used, if any.
    pub resource: Option<ResourceId>,
    pub arrive_s: f64,
    /// Waiting plus service plus propagation.
    pub delay_s: f64,
    /// Bits transmitted or GFLO computed.
    pub amount: f64,
    pub propagation_s: f64,
    /// How the resource served the demand; empty for free resources.
    pub service: Option<Service>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct DelayBreakdown {
    pub isl_tx_s: f64,
    pub sgl_tx_s: f64,
    pub compute_s: f64,
}

impl DelayBreakdown {
    pub fn total(&self) -> f64 {
        self.isl_tx_s + self.sgl_tx_s + self.compute_s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "site", rename_all = "snake_case")]
pub enum ComputeSite {
    Ground,
    Satellite { plane: usize, slot: usize, one_hop: bool },
}

impl ComputeSite {
    pub fn label(&self) -> String {
        match self {
            ComputeSite::Ground => "ground".to_string(),
            ComputeSite::Satellite { plane, slot, .. } => format!("sat:{plane}.{slot}"),
        }
    }

    pub fn is_one_hop(&self) -> bool {
        matches!(self, ComputeSite::Satellite { one_hop: true, .. })
    }

    pub fn is_beyond_one_hop(&self) -> bool {
        matches!(self, ComputeSite::Satellite { one_hop: false, .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OffloadPlan {
    pub task_id: u64,
    pub scheme: Scheme,
    pub path: StatePath,
    /// Graph node where the task is computed.
    pub compute_node: usize,
    pub compute_site: ComputeSite,
    pub overall_delay_s: f64,
    pub breakdown: DelayBreakdown,
    pub legs: Vec<Leg>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlanError {
    #[error("task {0} cannot reach its destination")]
    Unreachable(u64),
    #[error("task {task}: {source}")]
    Search { task: u64, source: PathError },
    #[error("task {task}: reservation on {resource:?} failed: {source}")]
    Commit { task: u64, resource: ResourceId, source: TimelineError },
}

fn search_options(graph: &OffloadGraph<'_>) -> SearchOptions {
    SearchOptions {
        extraction: Extraction::BinaryHeap,
        stop_at: Some(StateNode::new(RESULT, graph.ground_node())),
    }
}

/// Finds the minimum-delay way to offload `task` under `scheme` on the
/// current availability of `net`.
pub fn plan_offload(net: &NetworkState, task: &Task, scheme: Scheme) -> Result<OffloadPlan, PlanError> {
    let graph = build_offload_graph(net, task, scheme);
    let path = shortest_path_with(&graph, graph.source_node(), graph.ground_node(), task.gen_time_s, &search_options(&graph))
        .map_err(|e| match e {
            PathError::Unreachable => PlanError::Unreachable(task.id),
            source => PlanError::Search { task: task.id, source },
        })?;
    Ok(describe_path(&graph, path))
}

/// Rebuilds the legs and delay breakdown of a path found on `graph`.
pub fn describe_path(graph: &OffloadGraph<'_>, path: StatePath) -> OffloadPlan {
    let task = graph.task();
    let mut legs = Vec::with_capacity(path.num_edges());
    let mut breakdown = DelayBreakdown::default();
    let mut total = 0.0;
    let mut compute_node = None;

    for (head, tail) in path.edges() {
        let at = task.gen_time_s + total;
        let leg = if head.state == tail.state {
            let carrier = graph.carrier(head.node, tail.node, at).expect("path edge is live");
            let bits = graph.bits_in_state(head.state);
            let service = graph.carrier_timeline(carrier).serve(at, bits).expect("path edge is finite");
            let propagation_s = graph.propagation_s(head.node, tail.node, at);
            let (kind, resource) = match carrier {
                EdgeCarrier::SourceLink => (LegKind::Isl, None),
                EdgeCarrier::Isl(id) => (LegKind::Isl, Some(id)),
                EdgeCarrier::Sgl(id) => (LegKind::Sgl, Some(id)),
            };
            Leg {
                kind,
                state: head.state,
                from: head.node,
                to: tail.node,
                resource,
                arrive_s: at,
                delay_s: graph.edge_weight(head.state, head.node, tail.node, at),
                amount: bits,
                propagation_s,
                service: resource.map(|_| service),
            }
        } else {
            compute_node = Some(head.node);
            let (resource, service) = match graph.kind(head.node) {
                NodeKind::Satellite(s) => {
                    let cpu = graph.cpu_timeline(head.node).expect("satellite cpu");
                    (Some(ResourceId::Cpu { sat: s }), cpu.serve(at, task.compute_gflo))
                }
                _ => (None, None),
            };
            Leg {
                kind: LegKind::Compute,
                state: RAW,
                from: head.node,
                to: head.node,
                resource,
                arrive_s: at,
                delay_s: graph.transition_weight(RAW, head.node, at),
                amount: task.compute_gflo,
                propagation_s: 0.0,
                service,
            }
        };
        match leg.kind {
            LegKind::Isl => breakdown.isl_tx_s += leg.delay_s,
            LegKind::Sgl => breakdown.sgl_tx_s += leg.delay_s,
            LegKind::Compute => breakdown.compute_s += leg.delay_s,
        }
        total += leg.delay_s;
        legs.push(leg);
    }
    debug_assert_eq!(total, path.length);

    let compute_node = compute_node.expect("a path to the result state has one transition");
    let compute_site = match graph.kind(compute_node) {
        NodeKind::Satellite(s) => {
            let SatelliteId { plane, slot } = graph.network().satellite(s);
            ComputeSite::Satellite { plane, slot, one_hop: graph.is_attached(s) }
        }
        _ => ComputeSite::Ground,
    };
    OffloadPlan {
        task_id: task.id,
        scheme: graph.scheme(),
        overall_delay_s: path.length,
        path,
        compute_node,
        compute_site,
        breakdown,
        legs,
    }
}

/// Reserves every resource the plan uses for the intervals it uses them.
pub fn commit(net: &mut NetworkState, plan: &OffloadPlan) -> Result<(), PlanError> {
    for leg in &plan.legs {
        if let (Some(resource), Some(service)) = (leg.resource, &leg.service) {
            let timeline = net.timeline_mut(resource).expect("plan resource exists");
            timeline
                .reserve(service, plan.task_id)
                .map_err(|source| PlanError::Commit { task: plan.task_id, resource, source })?;
        }
    }
    Ok(())
}
