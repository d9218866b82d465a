use serde::Serialize;

use super::timeline::ResourceTimeline;
use crate::constellation::{
    distance_km, isl_candidates, line_of_sight, satellite_position, ConstellationConfig, GeoPosition, GroundNode,
    SatelliteId,
};

/// Physical parameters of the offloading network.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    pub constellation: ConstellationConfig,
    pub isl_rate_bps: f64,
    pub sgl_rate_bps: f64,
    pub satellite_gflops: f64,
    /// Largest distance at which a source spacecraft can reach a satellite.
    pub source_range_km: f64,
    /// Add distance / c to every transmission.
    pub propagation_delay: bool,
}

impl Default for NetworkParams {
    fn default() -> Self {
        Self {
            constellation: ConstellationConfig::default(),
            isl_rate_bps: 5e9,
            sgl_rate_bps: 1e9,
            satellite_gflops: 200.0,
            source_range_km: 2000.0,
            propagation_delay: false,
        }
    }
}

/// A shared, reservable resource of the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResourceId {
    /// Directed inter-satellite link.
    Isl { from: usize, to: usize },
    /// Downlink from a satellite to a ground site.
    Sgl { sat: usize, site: usize },
    Cpu { sat: usize },
}

/// The constellation plus the availability of every link and processor.
#[derive(Debug, Clone)]
pub struct NetworkState {
    params: NetworkParams,
    ground_sites: Vec<GroundNode>,
    // Per satellite: (neighbour, index into `isl`).
    isl_slots: Vec<Vec<(usize, usize)>>,
    isl: Vec<ResourceTimeline>,
    sgl: Vec<ResourceTimeline>,
    cpu: Vec<ResourceTimeline>,
}

impl NetworkState {
    /// A network with every resource fully available.
    pub fn new(params: NetworkParams, ground_sites: Vec<GroundNode>) -> Self {
        let cfg = &params.constellation;
        let n = cfg.num_satellites();
        let mut isl_slots = vec![Vec::new(); n];
        let mut isl = Vec::new();
        for sat in cfg.satellites() {
            let from = sat.node(cfg);
            for other in isl_candidates(cfg, sat) {
                isl_slots[from].push((other.node(cfg), isl.len()));
                isl.push(ResourceTimeline::constant(params.isl_rate_bps));
            }
        }
        let sgl = vec![ResourceTimeline::constant(params.sgl_rate_bps); n * ground_sites.len()];
        let cpu = vec![ResourceTimeline::constant(params.satellite_gflops); n];
        Self { params, ground_sites, isl_slots, isl, sgl, cpu }
    }

    pub fn params(&self) -> &NetworkParams {
        &self.params
    }

    pub fn constellation(&self) -> &ConstellationConfig {
        &self.params.constellation
    }

    pub fn num_satellites(&self) -> usize {
        self.cpu.len()
    }

    pub fn ground_sites(&self) -> &[GroundNode] {
        &self.ground_sites
    }

    pub fn satellite(&self, node: usize) -> SatelliteId {
        SatelliteId::from_node(self.constellation(), node)
    }

    fn isl_index(&self, from: usize, to: usize) -> Option<usize> {
        self.isl_slots.get(from)?.iter().find(|(n, _)| *n == to).map(|&(_, i)| i)
    }

    pub fn timeline(&self, id: ResourceId) -> Option<&ResourceTimeline> {
        match id {
            ResourceId::Isl { from, to } => self.isl_index(from, to).map(|i| &self.isl[i]),
            ResourceId::Sgl { sat, site } => self.sgl_slot(sat, site).map(|i| &self.sgl[i]),
            ResourceId::Cpu { sat } => self.cpu.get(sat),
        }
    }

    pub fn timeline_mut(&mut self, id: ResourceId) -> Option<&mut ResourceTimeline> {
        match id {
            ResourceId::Isl { from, to } => self.isl_index(from, to).map(|i| &mut self.isl[i]),
            ResourceId::Sgl { sat, site } => self.sgl_slot(sat, site).map(|i| &mut self.sgl[i]),
            ResourceId::Cpu { sat } => self.cpu.get_mut(sat),
        }
    }

    fn sgl_slot(&self, sat: usize, site: usize) -> Option<usize> {
        (sat < self.num_satellites() && site < self.ground_sites.len()).then(|| sat * self.ground_sites.len() + site)
    }

    /// Every resource with its timeline, in a fixed order.
    pub fn resources(&self) -> impl Iterator<Item = (ResourceId, &ResourceTimeline)> + '_ {
        let isl = self
            .isl_slots
            .iter()
            .enumerate()
            .flat_map(move |(from, slots)| slots.iter().map(move |&(to, i)| (ResourceId::Isl { from, to }, &self.isl[i])));
        let sites = self.ground_sites.len();
        let sgl = self
            .sgl
            .iter()
            .enumerate()
            .map(move |(i, t)| (ResourceId::Sgl { sat: i / sites, site: i % sites }, t));
        let cpu = self.cpu.iter().enumerate().map(|(sat, t)| (ResourceId::Cpu { sat }, t));
        isl.chain(sgl).chain(cpu)
    }

    /// Propagation time between two positions, or zero when disabled.
    pub fn propagation_s(&self, a: GeoPosition, b: GeoPosition) -> f64 {
        if self.params.propagation_delay {
            distance_km(a, b) / crate::constellation::SPEED_OF_LIGHT_KM_S
        } else {
            0.0
        }
    }
}

/// Satellites a source spacecraft at `source` can reach at time `t`: in line
/// of sight and within the configured range. Sorted by node id.
pub fn attach_source(net: &NetworkState, source: GeoPosition, t: f64) -> Vec<usize> {
    let cfg = net.constellation();
    let range = net.params.source_range_km;
    cfg.satellites()
        .filter(|&sat| {
            let p = satellite_position(cfg, sat, t);
            distance_km(source, p) <= range && line_of_sight(source, p)
        })
        .map(|sat| sat.node(cfg))
        .collect()
}
