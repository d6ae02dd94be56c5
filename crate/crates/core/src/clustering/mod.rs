//! Street-level cluster formation.
//!
//! [`optimize_cluster_count`] runs [`kmeans_1d`] for increasing `k`, elects a
//! gateway per group and accepts the first grouping in which every group is a
//! feasible star. [`kmeans_1d_exact`] is the optimal-WCSS reference used to
//! check the heuristic.

mod exact;
mod kmeans;
mod structure;

pub use exact::kmeans_1d_exact;
pub use kmeans::{kmeans_1d, KMeansConfig, KMeansResult};
pub use structure::{
    check_feasibility, elect_gateway, optimize_cluster_count, Cluster, ClusterStructure,
};
