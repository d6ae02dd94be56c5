//! Fixtures shared by the benchmarks.

use vanet_core::{place_vehicles, Street, VehicleSet};

/// One Poisson placement on a street of `length` meters at 0.1 vehicles/m.
pub fn placement(length: f64, radius: f64, seed: u64) -> VehicleSet {
    let street = Street::new("bench", length).expect("positive length");
    place_vehicles(&street, 0.1, radius, seed).expect("valid placement")
}

/// Sorted positions of [`placement`] with at least `min_len` vehicles,
/// trying successive seeds.
pub fn positions(length: f64, min_len: usize) -> Vec<f64> {
    (0..)
        .map(|seed| placement(length, 1.0, seed).positions())
        .find(|p| p.len() >= min_len)
        .expect("some seed yields enough vehicles")
}
