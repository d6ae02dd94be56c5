//! Closed-form connection probabilities.
//!
//! A vehicle links to its next neighbor when the nearest-neighbor gap, which
//! is exponential with rate `density`, is at most `R`: `P = 1 - exp(-ρR)`.
//! Cluster gateways cover `2R`. With `q = k/n` the street-level probability is
//! `[(1-q)(1 - exp(-ρR)) + q(1 - exp(-2ρR))]^(m+k)`.

use serde::{Deserialize, Serialize};

use crate::clustering::ClusterStructure;
use crate::error::{ensure_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticParams {
    /// Vehicles per meter.
    pub density: f64,
    /// Coverage radius, meters.
    pub radius: f64,
    /// Vehicles on the street.
    pub n: usize,
    /// Multi-member clusters.
    pub k: usize,
    /// Ungrouped vehicles.
    pub m: usize,
}

impl AnalyticParams {
    pub fn from_structure(density: f64, radius: f64, s: &ClusterStructure) -> Self {
        Self {
            density,
            radius,
            n: s.n,
            k: s.k,
            m: s.m,
        }
    }

    /// Cluster probability `k / n`.
    pub fn q(&self) -> f64 {
        self.k as f64 / self.n as f64
    }
}

pub fn vehicle_connection_probability(density: f64, radius: f64) -> Result<f64> {
    ensure_positive("density", density)?;
    ensure_positive("radius", radius)?;
    Ok(-(-density * radius).exp_m1())
}

/// `1 - bracket`, computed without cancellation.
fn clustered_failure(density: f64, radius: f64, q: f64) -> f64 {
    let single = (-density * radius).exp();
    let double = (-2.0 * density * radius).exp();
    (1.0 - q) * single + q * double
}

/// The per-node factor `(1-q)(1 - e^{-ρR}) + q(1 - e^{-2ρR})`.
pub fn clustered_link_probability(density: f64, radius: f64, q: f64) -> Result<f64> {
    ensure_positive("density", density)?;
    ensure_positive("radius", radius)?;
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid("q", q, "must lie in [0, 1]"));
    }
    Ok(1.0 - clustered_failure(density, radius, q))
}

/// `(1 - failure)^exponent` via `exp(exponent * ln(1 - failure))`.
fn power_of_complement(failure: f64, exponent: usize) -> f64 {
    if exponent == 0 || failure <= 0.0 {
        1.0
    } else if failure >= 1.0 {
        0.0
    } else {
        (exponent as f64 * (-failure).ln_1p()).exp()
    }
}

pub fn system_connection_probability(params: &AnalyticParams) -> Result<f64> {
    ensure_positive("density", params.density)?;
    ensure_positive("radius", params.radius)?;
    if params.n == 0 {
        return Err(Error::invalid("n", 0.0, "must be at least 1"));
    }
    if params.k > params.n {
        return Err(Error::invalid("k", params.k as f64, "must not exceed n"));
    }
    let failure = clustered_failure(params.density, params.radius, params.q());
    Ok(power_of_complement(failure, params.m + params.k))
}

/// Baseline with every vehicle linking on its own: `(1 - e^{-ρR})^n`.
pub fn noncluster_connection_probability(density: f64, radius: f64, n: usize) -> Result<f64> {
    ensure_positive("density", density)?;
    ensure_positive("radius", radius)?;
    Ok(power_of_complement((-density * radius).exp(), n))
}

/// Streets are isolated from each other, so the road connects iff every
/// street does.
pub fn road_connection_probability(per_street: &[f64]) -> f64 {
    per_street.iter().product()
}
