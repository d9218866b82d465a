//! Multi-state shortest paths and adaptive task offloading over LEO
//! satellite constellations.

pub mod cli;
pub mod constellation;
pub mod offload;
pub mod simulator;
pub mod state_graph;
pub mod verify;
