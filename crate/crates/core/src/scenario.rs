//! Road geometry, scenario configuration and Poisson vehicle placement.
//!
//! Vehicles on a street follow a homogeneous 1-D Poisson process: the count is
//! drawn from `Poisson(density * length)` and positions are independent
//! uniforms on `[0, length]`, returned in ascending order.

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::rng::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VehicleId(pub u32);

impl fmt::Display for VehicleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Street {
    pub id: String,
    /// Meters.
    pub length: f64,
}

impl Street {
    pub fn new(id: impl Into<String>, length: f64) -> Result<Self> {
        ensure_positive("street length", length)?;
        Ok(Self {
            id: id.into(),
            length,
        })
    }
}

/// A road made of mutually isolated straight streets. Vehicles only link to
/// vehicles on the same street.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadScenario {
    pub streets: Vec<Street>,
    /// Vehicles per meter.
    pub density: f64,
    /// Default per-vehicle coverage radius, meters.
    pub coverage_radius: f64,
}

impl RoadScenario {
    pub fn new(streets: Vec<Street>, density: f64, coverage_radius: f64) -> Result<Self> {
        let scenario = Self {
            streets,
            density,
            coverage_radius,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    /// The five-street, 5 km road with lengths 600 to 1400 m.
    pub fn five_street_road(density: f64, coverage_radius: f64) -> Result<Self> {
        let streets = [600.0, 800.0, 1000.0, 1200.0, 1400.0]
            .iter()
            .enumerate()
            .map(|(i, &len)| Street::new(format!("s{}", i + 1), len))
            .collect::<Result<Vec<_>>>()?;
        Self::new(streets, density, coverage_radius)
    }

    pub fn validate(&self) -> Result<()> {
        if self.streets.is_empty() {
            return Err(Error::Validation(
                "streets: at least one street is required".into(),
            ));
        }
        if !(self.density.is_finite() && self.density > 0.0) {
            return Err(Error::Validation(format!(
                "density_per_m: must be finite and > 0, got {}",
                self.density
            )));
        }
        if !(self.coverage_radius.is_finite() && self.coverage_radius > 0.0) {
            return Err(Error::Validation(format!(
                "coverage_radius_m: must be finite and > 0, got {}",
                self.coverage_radius
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for (i, s) in self.streets.iter().enumerate() {
            if !(s.length.is_finite() && s.length > 0.0) {
                return Err(Error::Validation(format!(
                    "streets[{i}].length_m: must be finite and > 0, got {}",
                    s.length
                )));
            }
            if !seen.insert(s.id.as_str()) {
                return Err(Error::Validation(format!(
                    "streets[{i}].id: duplicate street id {:?}",
                    s.id
                )));
            }
        }
        Ok(())
    }

    pub fn total_length(&self) -> f64 {
        self.streets.iter().map(|s| s.length).sum()
    }

    pub fn with_coverage_radius(&self, coverage_radius: f64) -> Result<Self> {
        Self::new(self.streets.clone(), self.density, coverage_radius)
    }

    /// Places vehicles on every street. Street `i` draws from the stream
    /// `derive_seed(seed, "street", i)`.
    pub fn place_all(&self, seed: u64) -> Result<Vec<VehicleSet>> {
        self.streets
            .iter()
            .enumerate()
            .map(|(i, street)| {
                place_vehicles(
                    street,
                    self.density,
                    self.coverage_radius,
                    derive_seed(seed, "street", i as u64),
                )
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vehicle {
    pub id: VehicleId,
    /// Meters from the start of the street.
    pub position: f64,
    /// Meters.
    pub coverage_radius: f64,
}

/// Vehicles on one street, sorted ascending by position (ties by id).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleSet {
    pub street_id: String,
    pub street_length: f64,
    pub vehicles: Vec<Vehicle>,
}

impl VehicleSet {
    /// Builds a set from raw positions, assigning ids in sorted order.
    pub fn from_positions(
        street_id: impl Into<String>,
        street_length: f64,
        positions: &[f64],
        coverage_radius: f64,
    ) -> Result<Self> {
        ensure_positive("street length", street_length)?;
        ensure_positive("coverage radius", coverage_radius)?;
        let mut sorted = positions.to_vec();
        if let Some(&bad) = sorted
            .iter()
            .find(|p| !(p.is_finite() && **p >= 0.0 && **p <= street_length))
        {
            return Err(Error::invalid(
                "vehicle position",
                bad,
                "must lie within [0, street length]",
            ));
        }
        sorted.sort_by(f64::total_cmp);
        let vehicles = sorted
            .into_iter()
            .enumerate()
            .map(|(i, position)| Vehicle {
                id: VehicleId(i as u32),
                position,
                coverage_radius,
            })
            .collect();
        Ok(Self {
            street_id: street_id.into(),
            street_length,
            vehicles,
        })
    }

    pub fn len(&self) -> usize {
        self.vehicles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vehicles.is_empty()
    }

    pub fn positions(&self) -> Vec<f64> {
        self.vehicles.iter().map(|v| v.position).collect()
    }

    pub fn get(&self, id: VehicleId) -> Option<&Vehicle> {
        self.vehicles.iter().find(|v| v.id == id)
    }

    /// Same placement with every vehicle's radius replaced.
    pub fn with_coverage_radius(&self, coverage_radius: f64) -> Result<Self> {
        ensure_positive("coverage radius", coverage_radius)?;
        let mut out = self.clone();
        for v in &mut out.vehicles {
            v.coverage_radius = coverage_radius;
        }
        Ok(out)
    }

    /// Checks ordering, range, radius and id-uniqueness invariants.
    pub fn check_invariants(&self) -> Result<()> {
        let mut ids = std::collections::HashSet::new();
        for (i, v) in self.vehicles.iter().enumerate() {
            if !(v.position >= 0.0 && v.position <= self.street_length) {
                return Err(Error::Validation(format!(
                    "vehicle {} at {} outside [0, {}]",
                    v.id, v.position, self.street_length
                )));
            }
            if v.coverage_radius.is_nan() || v.coverage_radius <= 0.0 {
                return Err(Error::Validation(format!(
                    "vehicle {} has non-positive radius",
                    v.id
                )));
            }
            if !ids.insert(v.id) {
                return Err(Error::Validation(format!("duplicate vehicle id {}", v.id)));
            }
            if i > 0 && self.vehicles[i - 1].position > v.position {
                return Err(Error::Validation(format!(
                    "vehicles out of order at index {i}"
                )));
            }
        }
        Ok(())
    }
}

/// Draws a Poisson placement on `street`. Identical inputs give identical
/// output on every platform.
pub fn place_vehicles(
    street: &Street,
    density: f64,
    coverage_radius: f64,
    seed: u64,
) -> Result<VehicleSet> {
    ensure_positive("density", density)?;
    ensure_positive("street length", street.length)?;
    ensure_positive("coverage radius", coverage_radius)?;

    let mut rng = rng_from_seed(seed);
    let mean = density * street.length;
    let poisson =
        Poisson::new(mean).map_err(|_| Error::invalid("density * length", mean, "out of range"))?;
    let count = poisson.sample(&mut rng) as usize;

    let mut positions: Vec<f64> = (0..count)
        .map(|_| rng.random::<f64>() * street.length)
        .collect();
    positions.sort_by(f64::total_cmp);

    let vehicles = positions
        .into_iter()
        .enumerate()
        .map(|(i, position)| Vehicle {
            id: VehicleId(i as u32),
            position,
            coverage_radius,
        })
        .collect();
    Ok(VehicleSet {
        street_id: street.id.clone(),
        street_length: street.length,
        vehicles,
    })
}

/// Keeps the vehicles at or before `new_length`; the result describes a
/// street of that length.
pub fn truncate_placement(vs: &VehicleSet, new_length: f64) -> Result<VehicleSet> {
    if !(new_length.is_finite() && new_length > 0.0 && new_length <= vs.street_length) {
        return Err(Error::invalid(
            "truncation length",
            new_length,
            "must lie in (0, street length]",
        ));
    }
    Ok(VehicleSet {
        street_id: vs.street_id.clone(),
        street_length: new_length,
        vehicles: vs
            .vehicles
            .iter()
            .copied()
            .take_while(|v| v.position <= new_length)
            .collect(),
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StreetConfig {
    id: String,
    length_m: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioConfig {
    streets: Vec<StreetConfig>,
    density_per_m: f64,
    coverage_radius_m: f64,
    #[serde(default)]
    seed: Option<u64>,
}

/// A validated scenario plus the seed recorded in its config file, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedScenario {
    pub scenario: RoadScenario,
    pub seed: Option<u64>,
}

/// Parses and validates a JSON scenario document:
///
/// ```json
/// {"streets": [{"id": "s1", "length_m": 600}], "density_per_m": 0.1,
///  "coverage_radius_m": 100, "seed": 7}
/// ```
pub fn load_scenario(text: &str) -> Result<LoadedScenario> {
    let config: ScenarioConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let scenario = RoadScenario {
        streets: config
            .streets
            .into_iter()
            .map(|s| Street {
                id: s.id,
                length: s.length_m,
            })
            .collect(),
        density: config.density_per_m,
        coverage_radius: config.coverage_radius_m,
    };
    scenario.validate()?;
    Ok(LoadedScenario {
        scenario,
        seed: config.seed,
    })
}
