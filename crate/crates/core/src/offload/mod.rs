//! Task offloading as a two-state shortest path.
//!
//! Every task is planned on a graph whose nodes are the satellites, the
//! task's source spacecraft and its destination ground node, each in an
//! uncomputed and a computed state. Same-state edges carry the raw data
//! (uncomputed) or the result (computed) over links; the single transition
//! is the computation. Edge and transition weights are the exact times to
//! move or compute the task given each resource's availability at the
//! moment the task gets there.

mod graph;
mod network;
mod plan;
mod timeline;

pub use graph::{build_offload_graph, EdgeCarrier, NodeKind, OffloadGraph, RAW, RESULT};
pub use network::{attach_source, NetworkParams, NetworkState, ResourceId};
pub use plan::{commit, describe_path, plan_offload, ComputeSite, DelayBreakdown, Leg, LegKind, OffloadPlan, PlanError};
pub use timeline::{
    compute_delay, transmit_delay, ComputeNodeKind, Piece, Reservation, ResourceTimeline, Segment, Service,
    TimelineError,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constellation::GeoPosition;

/// Bits per decimal gigabyte.
pub const BITS_PER_GB: f64 = 8e9;

/// Where a scheme lets a task be computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Anywhere except the source.
    Adaptive,
    /// Only at the destination ground node.
    Ground,
    /// Only at satellites directly linked to the source.
    OneHop,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Adaptive, Scheme::Ground, Scheme::OneHop];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Adaptive => "adaptive",
            Scheme::Ground => "ground",
            Scheme::OneHop => "onehop",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "adaptive" => Ok(Scheme::Adaptive),
            "ground" => Ok(Scheme::Ground),
            "onehop" | "one-hop" => Ok(Scheme::OneHop),
            other => Err(format!("unknown scheme `{other}` (expected adaptive, ground or onehop)")),
        }
    }
}

/// A unit of work generated by a source spacecraft for a ground destination.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Task {
    pub id: u64,
    /// Position of the source spacecraft when the task is generated.
    pub source: GeoPosition,
    /// Index of the destination ground site.
    pub destination: usize,
    pub gen_time_s: f64,
    pub compute_gflo: f64,
    pub data_in_bits: f64,
    pub data_out_bits: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid task {id}: {reason}")]
pub struct TaskError {
    pub id: u64,
    pub reason: &'static str,
}

impl Task {
    pub fn validate(&self, num_sites: usize) -> Result<(), TaskError> {
        let fail = |reason| Err(TaskError { id: self.id, reason });
        if !(self.compute_gflo >= 0.0 && self.compute_gflo.is_finite()) {
            return fail("compute requirement must be finite and nonnegative");
        }
        if !(self.data_in_bits > 0.0 && self.data_in_bits.is_finite()) {
            return fail("input data must be positive");
        }
        if !(self.data_out_bits > 0.0 && self.data_out_bits.is_finite()) {
            return fail("output data must be positive");
        }
        if !(self.gen_time_s >= 0.0 && self.gen_time_s.is_finite()) {
            return fail("generation time must be nonnegative");
        }
        if self.destination >= num_sites {
            return fail("destination site does not exist");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::{satellite_position, GroundNode, SatelliteId, EARTH_RADIUS_KM};
    use crate::state_graph::{validate_path, StateGraph};

    fn network() -> NetworkState {
        NetworkState::new(NetworkParams::default(), vec![GroundNode::new(51.5, -0.1)])
    }

    // Source near the equator, far from the London ground site.
    fn task(data_in_bits: f64, compute_gflo: f64) -> Task {
        Task {
            id: 1,
            source: GeoPosition::new(-5.0, 20.0, EARTH_RADIUS_KM + 550.0),
            destination: 0,
            gen_time_s: 0.0,
            compute_gflo,
            data_in_bits,
            data_out_bits: 16.0,
        }
    }

    /// Brute force over every compute target: shortest raw-data route to the
    /// target, compute, then shortest result route to the ground, each found
    /// with an independent single-state search.
    fn best_target_delay(net: &NetworkState, t: &Task) -> (f64, usize) {
        let g = build_offload_graph(net, t, Scheme::Adaptive);
        let n = g.num_nodes();
        let dijkstra = |state: usize, src: usize, start: f64| -> Vec<f64> {
            let mut dist = vec![f64::INFINITY; n];
            let mut done = vec![false; n];
            dist[src] = 0.0;
            loop {
                let cur = (0..n).filter(|&i| !done[i]).min_by(|&a, &b| dist[a].total_cmp(&dist[b]));
                let Some(cur) = cur.filter(|&c| dist[c].is_finite()) else { break };
                done[cur] = true;
                for next in 0..n {
                    if next != cur && !done[next] {
                        let w = g.edge_weight(state, cur, next, start + dist[cur]);
                        dist[next] = dist[next].min(dist[cur] + w);
                    }
                }
            }
            dist
        };
        let raw = dijkstra(RAW, g.source_node(), t.gen_time_s);
        let mut best = (f64::INFINITY, usize::MAX);
        for target in 0..n {
            if !raw[target].is_finite() {
                continue;
            }
            let c = g.transition_weight(RAW, target, t.gen_time_s + raw[target]);
            if !c.is_finite() {
                continue;
            }
            let ready = raw[target] + c;
            let result = dijkstra(RESULT, target, t.gen_time_s + ready);
            let total = ready + result[g.ground_node()];
            if total < best.0 {
                best = (total, target);
            }
        }
        best
    }

    #[test]
    fn tiny_data_huge_compute_goes_to_ground() {
        let net = network();
        let t = task(16.0, 1e6);
        let plan = plan_offload(&net, &t, Scheme::Adaptive).unwrap();
        assert_eq!(plan.compute_site, ComputeSite::Ground);
        let (best, target) = best_target_delay(&net, &t);
        assert_eq!(target, net.num_satellites() + 1);
        assert!((plan.overall_delay_s - best).abs() < 1e-9);
    }

    #[test]
    fn huge_data_tiny_compute_stays_one_hop() {
        let net = network();
        let t = task(4.0 * BITS_PER_GB, 1.0);
        let plan = plan_offload(&net, &t, Scheme::Adaptive).unwrap();
        assert!(plan.compute_site.is_one_hop(), "{:?}", plan.compute_site);
        let (best, target) = best_target_delay(&net, &t);
        assert!(target < net.num_satellites());
        assert!((plan.overall_delay_s - best).abs() < 1e-9);
    }

    #[test]
    fn masks_restrict_transitions() {
        let net = network();
        let t = task(3.2e9, 1000.0);
        let ground = build_offload_graph(&net, &t, Scheme::Ground);
        let onehop = build_offload_graph(&net, &t, Scheme::OneHop);
        let adaptive = build_offload_graph(&net, &t, Scheme::Adaptive);
        let v = ground.ground_node();
        assert_eq!(ground.transition_weight(RAW, v, 0.0), 0.0);
        assert!(!onehop.attached().is_empty());
        for s in 0..ground.num_nodes() {
            if s != v {
                assert_eq!(ground.transition_weight(RAW, s, 0.0), f64::INFINITY);
            }
            let finite = onehop.transition_weight(RAW, s, 0.0).is_finite();
            assert_eq!(finite, s < net.num_satellites() && onehop.is_attached(s));
            for masked in [&ground, &onehop] {
                let w = masked.transition_weight(RAW, s, 0.0);
                if w.is_finite() {
                    assert_eq!(adaptive.transition_weight(RAW, s, 0.0), w);
                }
                for n in 0..ground.num_nodes() {
                    for k in [RAW, RESULT] {
                        assert_eq!(masked.edge_weight(k, s, n, 0.0), adaptive.edge_weight(k, s, n, 0.0));
                    }
                }
            }
        }
        assert_eq!(adaptive.transition_weight(RAW, adaptive.source_node(), 0.0), f64::INFINITY);
    }

    #[test]
    fn adaptive_never_worse_than_baselines() {
        let net = network();
        for (n, c) in [(16.0, 1.0), (3.2e9, 1000.0), (1.6e10, 2000.0), (8e8, 50.0)] {
            let t = task(n, c);
            let a = plan_offload(&net, &t, Scheme::Adaptive).unwrap().overall_delay_s;
            let g = plan_offload(&net, &t, Scheme::Ground).unwrap().overall_delay_s;
            let o = plan_offload(&net, &t, Scheme::OneHop).unwrap().overall_delay_s;
            assert!(a <= g.min(o) + 1e-9, "{n} {c}: {a} {g} {o}");
        }
    }

    #[test]
    fn plan_is_consistent() {
        let net = network();
        let plan = plan_offload(&net, &task(3.2e9, 1000.0), Scheme::Adaptive).unwrap();
        validate_path(&plan.path).unwrap();
        assert!((plan.breakdown.total() - plan.overall_delay_s).abs() < 1e-9);
        assert_eq!(plan.legs.iter().filter(|l| l.kind == LegKind::Compute).count(), 1);
        assert_eq!(plan.path.transitions().count(), 1);
    }

    #[test]
    fn committing_delays_identical_task() {
        let mut net = network();
        let t = task(3.2e9, 1000.0);
        let first = plan_offload(&net, &t, Scheme::OneHop).unwrap();
        commit(&mut net, &first).unwrap();
        let second = plan_offload(&net, &Task { id: 2, ..t.clone() }, Scheme::OneHop).unwrap();
        assert!(second.overall_delay_s >= first.overall_delay_s);
    }

    #[test]
    fn unreachable_without_attachment() {
        let mut params = NetworkParams::default();
        params.source_range_km = 0.0;
        let net = NetworkState::new(params, vec![GroundNode::new(51.5, -0.1)]);
        assert_eq!(plan_offload(&net, &task(16.0, 1.0), Scheme::Adaptive), Err(PlanError::Unreachable(1)));
    }

    #[test]
    fn task_validation() {
        let mut t = task(16.0, 1.0);
        assert!(t.validate(1).is_ok());
        t.data_in_bits = 0.0;
        assert!(t.validate(1).is_err());
        assert!(task(16.0, 1.0).validate(0).is_err());
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("onehop".parse::<Scheme>(), Ok(Scheme::OneHop));
        assert!("local".parse::<Scheme>().is_err());
        for s in Scheme::ALL {
            assert_eq!(s.as_str().parse::<Scheme>(), Ok(s));
        }
    }

    #[test]
    fn source_colocated_satellite_is_one_hop() {
        let net = network();
        let cfg = net.constellation().clone();
        let p = satellite_position(&cfg, SatelliteId::new(4, 0), 0.0);
        let t = Task { source: p, ..task(4.0 * BITS_PER_GB, 1.0) };
        let g = build_offload_graph(&net, &t, Scheme::OneHop);
        assert!(g.is_attached(SatelliteId::new(4, 0).node(&cfg)));
    }
}
