use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constellation::{ConstellationConfig, GroundNode, EARTH_RADIUS_KM};
use crate::offload::{NetworkParams, Scheme, BITS_PER_GB};

/// A complete experiment description, as read from a scenario file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scenario {
    pub constellation: ConstellationConfig,
    pub links: LinkConfig,
    pub compute: ComputeConfig,
    pub workload: WorkloadConfig,
    pub simulation: SimulationConfig,
    pub toggles: Toggles,
    pub grid: GridConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkConfig {
    pub isl_rate_gbps: f64,
    pub sgl_rate_gbps: f64,
    /// Largest source-to-satellite distance.
    pub source_range_km: f64,
    /// Altitude of the source spacecraft.
    pub source_altitude_km: f64,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self { isl_rate_gbps: 5.0, sgl_rate_gbps: 1.0, source_range_km: 2000.0, source_altitude_km: 550.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ComputeConfig {
    pub satellite_gflops: f64,
}

impl Default for ComputeConfig {
    fn default() -> Self {
        Self { satellite_gflops: 200.0 }
    }
}

/// A latitude/longitude box that generates tasks in proportion to `weight`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub name: String,
    pub lat_min_deg: f64,
    pub lat_max_deg: f64,
    pub lon_min_deg: f64,
    pub lon_max_deg: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundSite {
    pub name: String,
    pub lat_deg: f64,
    pub lon_deg: f64,
}

/// One explicit task replacing the Poisson arrivals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingleTask {
    pub source_lat_deg: f64,
    pub source_lon_deg: f64,
    /// Index into the ground sites.
    pub destination: usize,
    #[serde(default)]
    pub gen_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WorkloadConfig {
    /// Tasks per `rate_unit_s`, summed over all regions.
    pub arrival_rate_total: f64,
    pub rate_unit_s: f64,
    pub data_in_gb: f64,
    pub compute_gflo: f64,
    pub data_out_bits: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub single_task: Option<SingleTask>,
    pub regions: Vec<Region>,
    pub ground_sites: Vec<GroundSite>,
}

fn region(name: &str, lat: (f64, f64), lon: (f64, f64), weight: f64) -> Region {
    Region {
        name: name.to_string(),
        lat_min_deg: lat.0,
        lat_max_deg: lat.1,
        lon_min_deg: lon.0,
        lon_max_deg: lon.1,
        weight,
    }
}

fn site(name: &str, lat_deg: f64, lon_deg: f64) -> GroundSite {
    GroundSite { name: name.to_string(), lat_deg, lon_deg }
}

/// Source regions weighted toward populated mid latitudes.
pub fn default_regions() -> Vec<Region> {
    vec![
        region("east_asia", (20.0, 45.0), (100.0, 145.0), 0.25),
        region("europe", (35.0, 60.0), (-10.0, 40.0), 0.22),
        region("north_america", (25.0, 50.0), (-125.0, -70.0), 0.22),
        region("south_asia", (5.0, 30.0), (65.0, 95.0), 0.12),
        region("south_america", (-35.0, 0.0), (-75.0, -35.0), 0.08),
        region("africa", (-35.0, 35.0), (-20.0, 50.0), 0.06),
        region("oceania", (-40.0, -10.0), (110.0, 155.0), 0.05),
    ]
}

/// Destination institutions at latitudes the default constellation covers
/// continuously.
pub fn default_ground_sites() -> Vec<GroundSite> {
    vec![
        site("london", 51.5, -0.1),
        site("moscow", 55.8, 37.6),
        site("munich", 48.1, 11.6),
        site("seattle", 47.6, -122.3),
        site("montreal", 45.5, -73.6),
        site("harbin", 45.8, 126.6),
        site("sapporo", 43.1, 141.4),
        site("punta_arenas", -53.2, -70.9),
    ]
}

impl Default for WorkloadConfig {
    fn default() -> Self {
        Self {
            arrival_rate_total: 1000.0,
            rate_unit_s: 240.0,
            data_in_gb: 0.4,
            compute_gflo: 1000.0,
            data_out_bits: 16.0,
            single_task: None,
            regions: default_regions(),
            ground_sites: default_ground_sites(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationConfig {
    /// Tasks are generated over `[0, horizon_s)`.
    pub horizon_s: f64,
    pub seed: u64,
    pub scheme: Scheme,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self { horizon_s: 600.0, seed: 1, scheme: Scheme::Adaptive }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Toggles {
    /// Add distance / c to every link.
    pub propagation_delay: bool,
    pub earth_rotation: bool,
}

/// Grids for the sweep and platform table commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub data_in_gb: Vec<f64>,
    pub compute_gflo: Vec<f64>,
    pub capabilities_gflops: Vec<f64>,
    /// Input data for the platform table.
    pub table_data_in_gb: f64,
    pub table_compute_gflo: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            data_in_gb: vec![0.1, 0.2, 0.3, 0.4, 0.6, 0.8],
            compute_gflo: vec![200.0, 500.0, 1000.0, 1500.0, 2000.0],
            capabilities_gflops: vec![127.0, 200.0, 590.0, 1000.0],
            table_data_in_gb: 0.3,
            table_compute_gflo: 1000.0,
        }
    }
}

/// A rejected scenario; `key` is the dotted path of the offending entry.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub key: String,
    pub reason: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.key.is_empty() {
            f.write_str(&self.reason)
        } else {
            write!(f, "{}: {}", self.key, self.reason)
        }
    }
}

fn invalid(key: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError { key: key.into(), reason: reason.into() }
}

fn positive(key: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(key, format!("must be positive and finite, got {v}")))
    }
}

fn latitude(key: String, v: f64) -> Result<(), ConfigError> {
    if (-90.0..=90.0).contains(&v) {
        Ok(())
    } else {
        Err(invalid(key, format!("latitude {v} outside [-90, 90]")))
    }
}

fn longitude(key: String, v: f64) -> Result<(), ConfigError> {
    if (-180.0..=360.0).contains(&v) {
        Ok(())
    } else {
        Err(invalid(key, format!("longitude {v} outside [-180, 360]")))
    }
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let scenario: Scenario = toml::from_str(text).map_err(|e| invalid("", e.to_string().trim_end().to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid("", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.constellation
            .validate()
            .map_err(|e| invalid(format!("constellation.{}", e.key), e.reason))?;

        let l = &self.links;
        positive("links.isl_rate_gbps", l.isl_rate_gbps)?;
        positive("links.sgl_rate_gbps", l.sgl_rate_gbps)?;
        if !(l.source_range_km >= 0.0 && l.source_range_km.is_finite()) {
            return Err(invalid("links.source_range_km", "must be nonnegative"));
        }
        if !(l.source_altitude_km >= 0.0 && l.source_altitude_km.is_finite()) {
            return Err(invalid("links.source_altitude_km", "must be nonnegative"));
        }
        positive("compute.satellite_gflops", self.compute.satellite_gflops)?;

        let w = &self.workload;
        if !(w.arrival_rate_total >= 0.0 && w.arrival_rate_total.is_finite()) {
            return Err(invalid("workload.arrival_rate_total", "must be nonnegative"));
        }
        positive("workload.rate_unit_s", w.rate_unit_s)?;
        positive("workload.data_in_gb", w.data_in_gb)?;
        if !(w.compute_gflo >= 0.0 && w.compute_gflo.is_finite()) {
            return Err(invalid("workload.compute_gflo", "must be nonnegative"));
        }
        positive("workload.data_out_bits", w.data_out_bits)?;
        if w.ground_sites.is_empty() {
            return Err(invalid("workload.ground_sites", "at least one ground site is required"));
        }
        for (i, s) in w.ground_sites.iter().enumerate() {
            latitude(format!("workload.ground_sites[{i}].lat_deg"), s.lat_deg)?;
            longitude(format!("workload.ground_sites[{i}].lon_deg"), s.lon_deg)?;
        }
        for (i, r) in w.regions.iter().enumerate() {
            let key = |field: &str| format!("workload.regions[{i}].{field}");
            latitude(key("lat_min_deg"), r.lat_min_deg)?;
            latitude(key("lat_max_deg"), r.lat_max_deg)?;
            longitude(key("lon_min_deg"), r.lon_min_deg)?;
            longitude(key("lon_max_deg"), r.lon_max_deg)?;
            if r.lat_min_deg > r.lat_max_deg {
                return Err(invalid(key("lat_max_deg"), "must not be below lat_min_deg"));
            }
            if r.lon_min_deg > r.lon_max_deg {
                return Err(invalid(key("lon_max_deg"), "must not be below lon_min_deg"));
            }
            if !(r.weight >= 0.0 && r.weight.is_finite()) {
                return Err(invalid(key("weight"), "must be nonnegative"));
            }
        }
        if w.single_task.is_none() && w.arrival_rate_total > 0.0 && w.regions.iter().all(|r| r.weight == 0.0) {
            return Err(invalid("workload.regions", "a positive arrival rate needs a region with positive weight"));
        }
        if let Some(t) = &w.single_task {
            latitude("workload.single_task.source_lat_deg".into(), t.source_lat_deg)?;
            longitude("workload.single_task.source_lon_deg".into(), t.source_lon_deg)?;
            if t.destination >= w.ground_sites.len() {
                return Err(invalid("workload.single_task.destination", "no such ground site"));
            }
            if !(t.gen_time_s >= 0.0 && t.gen_time_s.is_finite()) {
                return Err(invalid("workload.single_task.gen_time_s", "must be nonnegative"));
            }
        }

        positive("simulation.horizon_s", self.simulation.horizon_s)?;

        let g = &self.grid;
        for (key, values) in [("grid.data_in_gb", &g.data_in_gb), ("grid.capabilities_gflops", &g.capabilities_gflops)] {
            if values.is_empty() {
                return Err(invalid(key, "must not be empty"));
            }
            for &v in values {
                positive(key, v)?;
            }
        }
        if g.compute_gflo.is_empty() {
            return Err(invalid("grid.compute_gflo", "must not be empty"));
        }
        if g.compute_gflo.iter().any(|c| !(*c >= 0.0 && c.is_finite())) {
            return Err(invalid("grid.compute_gflo", "values must be nonnegative"));
        }
        positive("grid.table_data_in_gb", g.table_data_in_gb)?;
        if !(g.table_compute_gflo >= 0.0 && g.table_compute_gflo.is_finite()) {
            return Err(invalid("grid.table_compute_gflo", "must be nonnegative"));
        }
        Ok(())
    }

    /// Link, compute and orbit parameters of the simulated network.
    pub fn network_params(&self) -> NetworkParams {
        let mut constellation = self.constellation.clone();
        constellation.earth_rotation = self.toggles.earth_rotation;
        NetworkParams {
            constellation,
            isl_rate_bps: self.links.isl_rate_gbps * 1e9,
            sgl_rate_bps: self.links.sgl_rate_gbps * 1e9,
            satellite_gflops: self.compute.satellite_gflops,
            source_range_km: self.links.source_range_km,
            propagation_delay: self.toggles.propagation_delay,
        }
    }

    pub fn ground_nodes(&self) -> Vec<GroundNode> {
        self.workload.ground_sites.iter().map(|s| GroundNode::new(s.lat_deg, s.lon_deg)).collect()
    }

    pub fn data_in_bits(&self) -> f64 {
        self.workload.data_in_gb * BITS_PER_GB
    }

    pub fn source_radius_km(&self) -> f64 {
        EARTH_RADIUS_KM + self.links.source_altitude_km
    }

    /// Copy with a different task size and compute requirement.
    pub fn with_task_shape(&self, data_in_gb: f64, compute_gflo: f64) -> Self {
        let mut s = self.clone();
        s.workload.data_in_gb = data_in_gb;
        s.workload.compute_gflo = compute_gflo;
        s
    }

    pub fn with_scheme(&self, scheme: Scheme) -> Self {
        let mut s = self.clone();
        s.simulation.scheme = scheme;
        s
    }
}
