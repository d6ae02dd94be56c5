//! Connection probabilities: closed forms and a Monte Carlo cross-check.

mod analytic;
mod monte_carlo;

pub use analytic::{
    clustered_link_probability, noncluster_connection_probability, road_connection_probability,
    system_connection_probability, vehicle_connection_probability, AnalyticParams,
};
pub use monte_carlo::{
    mc_connectivity, mc_connectivity_with_rule, mc_gap_frequency, sample_consecutive_gaps,
    street_connected_clustered, street_connected_noncluster, LinkRule, McConnectivity, McEstimate,
};

use serde::{Deserialize, Serialize};

use crate::clustering::ClusterStructure;
use crate::error::Result;

/// Road-level analytic probabilities for one realized placement, optionally
/// paired with a Monte Carlo estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityReport {
    pub p_vehicle: f64,
    pub p_system_clustered: f64,
    pub p_system_noncluster: f64,
    pub mc: Option<McConnectivity>,
}

impl ConnectivityReport {
    /// Multiplies per-street probabilities over `structures`; streets without
    /// vehicles contribute 1.
    pub fn for_road(
        density: f64,
        radius: f64,
        structures: &[ClusterStructure],
        mc: Option<McConnectivity>,
    ) -> Result<Self> {
        let mut clustered = Vec::with_capacity(structures.len());
        let mut noncluster = Vec::with_capacity(structures.len());
        for s in structures {
            if s.n == 0 {
                clustered.push(1.0);
                noncluster.push(1.0);
                continue;
            }
            let params = AnalyticParams::from_structure(density, radius, s);
            clustered.push(system_connection_probability(&params)?);
            noncluster.push(noncluster_connection_probability(density, radius, s.n)?);
        }
        Ok(Self {
            p_vehicle: vehicle_connection_probability(density, radius)?,
            p_system_clustered: road_connection_probability(&clustered),
            p_system_noncluster: road_connection_probability(&noncluster),
            mc,
        })
    }
}
