//! Monte Carlo connectivity estimates.
//!
//! Each trial places vehicles afresh on every street and reduces each street
//! to a chain of effective nodes: every vehicle with threshold `R` in the
//! non-clustered mode; gateways (threshold `2R`) and singletons (threshold
//! `R`) in the clustered mode. A street connects when every node reaches its
//! target, which by default is the first vehicle past the node's own group
//! (see [`LinkRule`]). A node with nothing after it is exempt; an empty street
//! connects trivially.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{optimize_cluster_count, ClusterStructure, KMeansConfig};
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::scenario::{place_vehicles, RoadScenario, Street, VehicleId, VehicleSet};

/// 1.96: two-sided 95% normal quantile.
const Z_95: f64 = 1.96;

/// A success frequency with its normal-approximation 95% half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub halfwidth_95: f64,
}

impl McEstimate {
    pub fn from_counts(successes: u64, trials: u64) -> Self {
        assert!(trials > 0 && successes <= trials);
        let p = successes as f64 / trials as f64;
        Self {
            successes,
            trials,
            estimate: p,
            halfwidth_95: Z_95 * (p * (1.0 - p) / trials as f64).sqrt(),
        }
    }

    pub fn lower(&self) -> f64 {
        self.estimate - self.halfwidth_95
    }

    pub fn upper(&self) -> f64 {
        self.estimate + self.halfwidth_95
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConnectivity {
    pub clustered: McEstimate,
    pub noncluster: McEstimate,
}

/// Which successor an effective node must reach.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkRule {
    /// The first vehicle after the node's own group: a gateway must reach the
    /// vehicle following its cluster's last member, a singleton its successor.
    #[default]
    NextVehicle,
    /// The next gateway or singleton along the street.
    NextEffectiveNode,
}

/// A connectivity-bearing node: where it transmits from, how far it reaches,
/// and the position it has to reach, if anything follows it.
#[derive(Debug, Clone, Copy, PartialEq)]
struct EffectiveNode {
    position: f64,
    threshold: f64,
    target: Option<f64>,
}

fn chain_connected(nodes: &[EffectiveNode]) -> bool {
    nodes
        .iter()
        .all(|n| n.target.is_none_or(|t| t - n.position <= n.threshold))
}

fn noncluster_nodes(vs: &VehicleSet) -> Vec<EffectiveNode> {
    vs.vehicles
        .iter()
        .enumerate()
        .map(|(i, v)| EffectiveNode {
            position: v.position,
            threshold: v.coverage_radius,
            target: vs.vehicles.get(i + 1).map(|next| next.position),
        })
        .collect()
}

fn index_of(vs: &VehicleSet, id: VehicleId) -> usize {
    match vs.vehicles.get(id.0 as usize) {
        Some(v) if v.id == id => id.0 as usize,
        _ => vs
            .vehicles
            .iter()
            .position(|v| v.id == id)
            .expect("structure refers to vehicles of its own set"),
    }
}

fn clustered_nodes(
    vs: &VehicleSet,
    structure: &ClusterStructure,
    rule: LinkRule,
) -> Vec<EffectiveNode> {
    // (transmitter index, last index of its group, threshold factor)
    let mut groups: Vec<(usize, usize, f64)> = structure
        .clusters
        .iter()
        .map(|c| {
            let last = c.member_ids.iter().map(|&id| index_of(vs, id)).max();
            (
                index_of(vs, c.gateway_id),
                last.expect("clusters are non-empty"),
                2.0,
            )
        })
        .chain(structure.singleton_ids.iter().map(|&id| {
            let i = index_of(vs, id);
            (i, i, 1.0)
        }))
        .collect();
    groups.sort_by(|a, b| {
        let (va, vb) = (&vs.vehicles[a.0], &vs.vehicles[b.0]);
        va.position.total_cmp(&vb.position).then(va.id.cmp(&vb.id))
    });

    let transmitters: Vec<f64> = groups.iter().map(|g| vs.vehicles[g.0].position).collect();
    groups
        .iter()
        .enumerate()
        .map(|(j, &(tx, last, factor))| {
            let v = &vs.vehicles[tx];
            let target = match rule {
                LinkRule::NextVehicle => vs.vehicles.get(last + 1).map(|n| n.position),
                LinkRule::NextEffectiveNode => transmitters.get(j + 1).copied(),
            };
            EffectiveNode {
                position: v.position,
                threshold: factor * v.coverage_radius,
                target,
            }
        })
        .collect()
}

/// Whether every vehicle on the street reaches its successor.
pub fn street_connected_noncluster(vs: &VehicleSet) -> bool {
    chain_connected(&noncluster_nodes(vs))
}

/// Whether every gateway and singleton of `structure` reaches its target
/// under `rule`.
pub fn street_connected_clustered(
    vs: &VehicleSet,
    structure: &ClusterStructure,
    rule: LinkRule,
) -> bool {
    chain_connected(&clustered_nodes(vs, structure, rule))
}

/// Outcome of one trial as `(clustered, noncluster)`.
fn run_trial(
    scenario: &RoadScenario,
    seed: u64,
    config: &KMeansConfig,
    rule: LinkRule,
) -> Result<(bool, bool)> {
    let mut clustered = true;
    let mut noncluster = true;
    for vs in scenario.place_all(seed)? {
        if vs.is_empty() {
            continue;
        }
        noncluster &= street_connected_noncluster(&vs);
        if clustered {
            let structure = optimize_cluster_count(&vs, config)?;
            clustered &= street_connected_clustered(&vs, &structure, rule);
        }
    }
    Ok((clustered, noncluster))
}

/// Estimates road connectivity in both modes. Trial `t` uses the stream
/// `derive_seed(seed, "mc-trial", t)`, so the result does not depend on how
/// trials are scheduled across threads.
pub fn mc_connectivity(
    scenario: &RoadScenario,
    trials: u64,
    seed: u64,
    config: &KMeansConfig,
) -> Result<McConnectivity> {
    mc_connectivity_with_rule(scenario, trials, seed, config, LinkRule::default())
}

pub fn mc_connectivity_with_rule(
    scenario: &RoadScenario,
    trials: u64,
    seed: u64,
    config: &KMeansConfig,
    rule: LinkRule,
) -> Result<McConnectivity> {
    if trials == 0 {
        return Err(Error::invalid("trials", 0.0, "must be at least 1"));
    }
    scenario.validate()?;
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(scenario, derive_seed(seed, "mc-trial", t), config, rule))
        .collect::<Result<Vec<_>>>()?;
    let clustered = outcomes.iter().filter(|o| o.0).count() as u64;
    let noncluster = outcomes.iter().filter(|o| o.1).count() as u64;
    Ok(McConnectivity {
        clustered: McEstimate::from_counts(clustered, trials),
        noncluster: McEstimate::from_counts(noncluster, trials),
    })
}

/// Collects `count` consecutive-vehicle gaps from independent placements on
/// `street`. Placement `i` uses `derive_seed(seed, "gap-placement", i)`.
pub fn sample_consecutive_gaps(
    street: &Street,
    density: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let mut gaps = Vec::with_capacity(count);
    let mut placement = 0u64;
    while gaps.len() < count {
        let vs = place_vehicles(
            street,
            density,
            1.0,
            derive_seed(seed, "gap-placement", placement),
        )?;
        placement += 1;
        gaps.extend(
            vs.vehicles
                .windows(2)
                .map(|w| w[1].position - w[0].position)
                .take(count - gaps.len()),
        );
    }
    Ok(gaps)
}

/// Fraction of sampled consecutive gaps that a vehicle of radius `radius`
/// bridges.
pub fn mc_gap_frequency(
    street: &Street,
    density: f64,
    radius: f64,
    count: usize,
    seed: u64,
) -> Result<McEstimate> {
    if count == 0 {
        return Err(Error::invalid("gap count", 0.0, "must be at least 1"));
    }
    let gaps = sample_consecutive_gaps(street, density, count, seed)?;
    let hits = gaps.iter().filter(|&&g| g <= radius).count() as u64;
    Ok(McEstimate::from_counts(hits, count as u64))
}
