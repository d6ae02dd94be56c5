//! Clustered vehicular network simulation on multi-street roads.
//!
//! Vehicles are placed on isolated straight streets by a 1-D Poisson process,
//! grouped per street by K-means into gateway-centered clusters, and the road's
//! connection probability is evaluated both in closed form and by Monte Carlo.
//!
//! ```
//! use vanet_core::{optimize_cluster_count, KMeansConfig, VehicleSet};
//!
//! let vs = VehicleSet::from_positions("main", 200.0, &[0.0, 10.0, 100.0, 110.0], 20.0)?;
//! let s = optimize_cluster_count(&vs, &KMeansConfig::default())?;
//! assert_eq!((s.k, s.m), (2, 0));
//! # Ok::<(), vanet_core::Error>(())
//! ```

pub mod clustering;
pub mod connectivity;
mod error;
pub mod experiments;
pub mod rng;
pub mod scenario;

pub use clustering::{
    check_feasibility, elect_gateway, kmeans_1d, kmeans_1d_exact, optimize_cluster_count, Cluster,
    ClusterStructure, KMeansConfig, KMeansResult,
};
pub use connectivity::{
    mc_connectivity, mc_connectivity_with_rule, noncluster_connection_probability,
    road_connection_probability, system_connection_probability, vehicle_connection_probability,
    AnalyticParams, ConnectivityReport, LinkRule, McConnectivity, McEstimate,
};
pub use error::{Error, Result};
pub use experiments::{SweepPoint, SweepRow, SweepSpec};
pub use scenario::{
    load_scenario, place_vehicles, truncate_placement, LoadedScenario, RoadScenario, Street,
    Vehicle, VehicleId, VehicleSet,
};
