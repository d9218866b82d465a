//! Poisson workloads planned task by task against shared link and CPU
//! reservations.

mod engine;
pub mod output;
mod scenario;
mod sweep;
mod workload;

pub use engine::{run, MetricsReport, SimError, Simulation, TaskRecord};
pub use scenario::{
    default_ground_sites, default_regions, ComputeConfig, ConfigError, GridConfig, GroundSite, LinkConfig, Region,
    Scenario, SimulationConfig, SingleTask, Toggles, WorkloadConfig,
};
pub use sweep::{argmin_scheme, improvement_pct, platform_table, sweep, PlatformRow, SweepRow, TIE_TOLERANCE_S};
pub use workload::generate_tasks;
