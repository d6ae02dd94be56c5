use serde::{Deserialize, Serialize};

use super::kmeans::{kmeans_1d, KMeansConfig};
use crate::error::{Error, Result};
use crate::scenario::{Vehicle, VehicleId, VehicleSet};

/// A multi-vehicle group linked in a star around its gateway.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub member_ids: Vec<VehicleId>,
    pub centroid: f64,
    pub gateway_id: VehicleId,
    /// Distance between the outermost members, meters.
    pub span: f64,
}

/// Partition of one street's vehicles into clusters and singletons.
///
/// `k` counts multi-member clusters only; single-vehicle groups are reported
/// in `singleton_ids` and counted by `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterStructure {
    pub street_id: String,
    pub clusters: Vec<Cluster>,
    pub singleton_ids: Vec<VehicleId>,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    /// The K-means group count at which every group first became feasible
    /// (clusters plus singletons). Zero for an empty street.
    pub group_count: usize,
}

impl ClusterStructure {
    pub fn empty(street_id: impl Into<String>) -> Self {
        Self {
            street_id: street_id.into(),
            clusters: Vec::new(),
            singleton_ids: Vec::new(),
            n: 0,
            k: 0,
            m: 0,
            group_count: 0,
        }
    }

    pub fn gateway_ids(&self) -> impl Iterator<Item = VehicleId> + '_ {
        self.clusters.iter().map(|c| c.gateway_id)
    }
}

/// Picks the member closest to `centroid`; ties go to the smaller position,
/// then the smaller id.
pub fn elect_gateway(members: &[Vehicle], centroid: f64) -> Result<VehicleId> {
    members
        .iter()
        .min_by(|a, b| {
            (a.position - centroid)
                .abs()
                .total_cmp(&(b.position - centroid).abs())
                .then(a.position.total_cmp(&b.position))
                .then(a.id.cmp(&b.id))
        })
        .map(|v| v.id)
        .ok_or(Error::Empty("cluster members"))
}

/// Every member must reach the gateway and be reached by it.
fn star_is_feasible(members: &[Vehicle], gateway: &Vehicle) -> bool {
    members.iter().all(|v| {
        (v.position - gateway.position).abs() <= v.coverage_radius.min(gateway.coverage_radius)
    })
}

/// True iff every member lies within `min(member radius, gateway radius)` of
/// the gateway. Members missing from `vehicles` make the cluster infeasible.
pub fn check_feasibility(cluster: &Cluster, vehicles: &VehicleSet) -> bool {
    let lookup = |id: VehicleId| {
        vehicles
            .vehicles
            .get(id.0 as usize)
            .filter(|v| v.id == id)
            .or_else(|| vehicles.get(id))
            .copied()
    };
    let Some(gateway) = lookup(cluster.gateway_id) else {
        return false;
    };
    let members: Option<Vec<Vehicle>> = cluster.member_ids.iter().map(|&id| lookup(id)).collect();
    members.is_some_and(|m| star_is_feasible(&m, &gateway))
}

/// Searches `k = 1, 2, ..., n` for the smallest K-means grouping whose groups
/// are all feasible stars, then splits off single-vehicle groups.
pub fn optimize_cluster_count(vs: &VehicleSet, config: &KMeansConfig) -> Result<ClusterStructure> {
    if vs.is_empty() {
        return Err(Error::Empty("vehicle set"));
    }
    let positions = vs.positions();
    let n = positions.len();

    for k in 1..=n {
        let result = kmeans_1d(&positions, k, config)?;
        let mut groups = Vec::with_capacity(k);
        let mut feasible = true;
        for (center, indices) in result.groups() {
            let members: Vec<Vehicle> = indices.iter().map(|&i| vs.vehicles[i]).collect();
            let centroid = result.centers[center];
            let gateway_id = elect_gateway(&members, centroid)?;
            let gateway = members
                .iter()
                .find(|v| v.id == gateway_id)
                .expect("gateway is a member");
            if !star_is_feasible(&members, gateway) {
                feasible = false;
                break;
            }
            groups.push((members, centroid, gateway_id));
        }
        if feasible {
            return Ok(build_structure(vs, groups, k));
        }
    }
    // k = n puts every vehicle (or every run of coincident vehicles) in its
    // own zero-width group, which is always feasible.
    unreachable!("k = n grouping is always feasible")
}

fn build_structure(
    vs: &VehicleSet,
    mut groups: Vec<(Vec<Vehicle>, f64, VehicleId)>,
    group_count: usize,
) -> ClusterStructure {
    groups.sort_by(|a, b| a.0[0].position.total_cmp(&b.0[0].position));
    let mut clusters = Vec::new();
    let mut singleton_ids = Vec::new();
    for (members, centroid, gateway_id) in groups {
        if members.len() == 1 {
            singleton_ids.push(members[0].id);
            continue;
        }
        let lo = members
            .iter()
            .map(|v| v.position)
            .fold(f64::INFINITY, f64::min);
        let hi = members
            .iter()
            .map(|v| v.position)
            .fold(f64::NEG_INFINITY, f64::max);
        clusters.push(Cluster {
            member_ids: members.iter().map(|v| v.id).collect(),
            centroid,
            gateway_id,
            span: hi - lo,
        });
    }
    ClusterStructure {
        street_id: vs.street_id.clone(),
        k: clusters.len(),
        m: singleton_ids.len(),
        n: vs.len(),
        clusters,
        singleton_ids,
        group_count,
    }
}
