//! Parameter sweeps over street length and coverage radius.
//!
//! [`sweep_optimized_k`] tabulates the optimized cluster count on single
//! streets; every length is cut from one master placement per seed so counts
//! are comparable across lengths. [`sweep_connection_probability`] evaluates
//! the clustered and non-clustered connection probabilities on a multi-street
//! road for a list of radii.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{optimize_cluster_count, ClusterStructure, KMeansConfig};
use crate::connectivity::{mc_connectivity, ConnectivityReport, McConnectivity};
use crate::error::{ensure_positive, Error, Result};
use crate::rng::derive_seed;
use crate::scenario::{place_vehicles, truncate_placement, RoadScenario, Street, VehicleSet};

pub const TABLE_HEADER: [&str; 9] = [
    "length_m",
    "radius_m",
    "mean_k",
    "mean_m",
    "p_clustered_analytic",
    "p_noncluster_analytic",
    "p_clustered_mc",
    "p_noncluster_mc",
    "mc_halfwidth",
];

pub const DEFAULT_LENGTHS: [f64; 5] = [600.0, 800.0, 1000.0, 1200.0, 1400.0];
pub const DEFAULT_RADII: [f64; 7] = [25.0, 50.0, 75.0, 100.0, 150.0, 200.0, 300.0];
pub const DEFAULT_DENSITY: f64 = 0.1;
pub const DEFAULT_SEED_COUNT: usize = 20;
pub const DEFAULT_TRIALS: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub lengths: Vec<f64>,
    pub radii: Vec<f64>,
    pub density: f64,
    /// Placement seeds averaged over for the count and analytic columns.
    pub seeds: Vec<u64>,
    /// Monte Carlo trials per grid point.
    pub trials: u64,
    /// Master seed for the Monte Carlo columns.
    pub mc_seed: u64,
    pub kmeans: KMeansConfig,
}

impl SweepSpec {
    /// Default grid with `DEFAULT_SEED_COUNT` placement seeds derived from
    /// `master_seed`.
    pub fn with_defaults(master_seed: u64) -> Self {
        Self {
            lengths: DEFAULT_LENGTHS.to_vec(),
            radii: DEFAULT_RADII.to_vec(),
            density: DEFAULT_DENSITY,
            seeds: derive_seeds(master_seed, DEFAULT_SEED_COUNT),
            trials: DEFAULT_TRIALS,
            mc_seed: derive_seed(master_seed, "mc", 0),
            kmeans: KMeansConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lengths.is_empty() {
            return Err(Error::Empty("lengths"));
        }
        if self.radii.is_empty() {
            return Err(Error::Empty("radii"));
        }
        if self.seeds.is_empty() {
            return Err(Error::Empty("seeds"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials", 0.0, "must be at least 1"));
        }
        ensure_positive("density", self.density)?;
        for &l in &self.lengths {
            ensure_positive("length", l)?;
        }
        for &r in &self.radii {
            ensure_positive("radius", r)?;
        }
        Ok(())
    }

    fn max_length(&self) -> f64 {
        self.lengths
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Placement seeds `derive_seed(master, "placement", i)` for `i < count`.
pub fn derive_seeds(master: u64, count: usize) -> Vec<u64> {
    (0..count as u64)
        .map(|i| derive_seed(master, "placement", i))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub length_m: f64,
    pub radius_m: f64,
    pub mean_k: f64,
    pub mean_m: f64,
    pub p_clustered_analytic: f64,
    pub p_noncluster_analytic: f64,
    pub p_clustered_mc: f64,
    pub p_noncluster_mc: f64,
    /// The wider of the two Monte Carlo 95% half-widths.
    pub mc_halfwidth: f64,
}

impl SweepRow {
    fn values(&self) -> [f64; 9] {
        [
            self.length_m,
            self.radius_m,
            self.mean_k,
            self.mean_m,
            self.p_clustered_analytic,
            self.p_noncluster_analytic,
            self.p_clustered_mc,
            self.p_noncluster_mc,
            self.mc_halfwidth,
        ]
    }
}

/// Per-seed counts behind one grid point. For multi-street roads the counts
/// are summed over streets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedOutcome {
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub group_count: usize,
}

impl SeedOutcome {
    fn from_structures(seed: u64, structures: &[ClusterStructure]) -> Self {
        structures.iter().fold(
            Self {
                seed,
                n: 0,
                k: 0,
                m: 0,
                group_count: 0,
            },
            |acc, s| Self {
                n: acc.n + s.n,
                k: acc.k + s.k,
                m: acc.m + s.m,
                group_count: acc.group_count + s.group_count,
                ..acc
            },
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub row: SweepRow,
    pub mc: McConnectivity,
    pub per_seed: Vec<SeedOutcome>,
}

fn cluster_or_empty(vs: &VehicleSet, config: &KMeansConfig) -> Result<ClusterStructure> {
    if vs.is_empty() {
        Ok(ClusterStructure::empty(vs.street_id.clone()))
    } else {
        optimize_cluster_count(vs, config)
    }
}

/// Cluster structures for every `(seed, length, radius)` of `spec`, indexed
/// `[seed][length][radius]`. Lengths are truncations of one placement on the
/// longest street.
pub fn nested_structures(spec: &SweepSpec) -> Result<Vec<Vec<Vec<ClusterStructure>>>> {
    spec.validate()?;
    let street = Street::new("street", spec.max_length())?;
    spec.seeds
        .par_iter()
        .map(|&seed| {
            let master = place_vehicles(&street, spec.density, spec.radii[0], seed)?;
            spec.lengths
                .iter()
                .map(|&length| {
                    let cut = truncate_placement(&master, length)?;
                    spec.radii
                        .iter()
                        .map(|&radius| {
                            cluster_or_empty(&cut.with_coverage_radius(radius)?, &spec.kmeans)
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

fn mean(values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let len = values.len() as f64;
    values.sum::<f64>() / len
}

fn make_row(
    length: f64,
    radius: f64,
    per_seed: &[SeedOutcome],
    reports: &[ConnectivityReport],
    mc: &McConnectivity,
) -> SweepRow {
    SweepRow {
        length_m: length,
        radius_m: radius,
        mean_k: mean(per_seed.iter().map(|s| s.k as f64)),
        mean_m: mean(per_seed.iter().map(|s| s.m as f64)),
        p_clustered_analytic: mean(reports.iter().map(|r| r.p_system_clustered)),
        p_noncluster_analytic: mean(reports.iter().map(|r| r.p_system_noncluster)),
        p_clustered_mc: mc.clustered.estimate,
        p_noncluster_mc: mc.noncluster.estimate,
        mc_halfwidth: mc.clustered.halfwidth_95.max(mc.noncluster.halfwidth_95),
    }
}

/// Optimized cluster counts over the `lengths × radii` grid on a single
/// street, averaged over seeds, with single-street connection columns.
/// Rows are length-major.
pub fn sweep_optimized_k(spec: &SweepSpec) -> Result<Vec<SweepPoint>> {
    let structures = nested_structures(spec)?;
    let grid: Vec<(usize, usize)> = (0..spec.lengths.len())
        .flat_map(|li| (0..spec.radii.len()).map(move |ri| (li, ri)))
        .collect();

    grid.par_iter()
        .map(|&(li, ri)| {
            let (length, radius) = (spec.lengths[li], spec.radii[ri]);
            let mut per_seed = Vec::with_capacity(spec.seeds.len());
            let mut reports = Vec::with_capacity(spec.seeds.len());
            for (si, &seed) in spec.seeds.iter().enumerate() {
                let s = std::slice::from_ref(&structures[si][li][ri]);
                per_seed.push(SeedOutcome::from_structures(seed, s));
                reports.push(ConnectivityReport::for_road(spec.density, radius, s, None)?);
            }
            let road =
                RoadScenario::new(vec![Street::new("street", length)?], spec.density, radius)?;
            let mc_seed = derive_seed(
                spec.mc_seed,
                "optimized-k-point",
                (li * spec.radii.len() + ri) as u64,
            );
            let mc = mc_connectivity(&road, spec.trials, mc_seed, &spec.kmeans)?;
            Ok(SweepPoint {
                row: make_row(length, radius, &per_seed, &reports, &mc),
                mc,
                per_seed,
            })
        })
        .collect()
}

/// Clustered vs. non-clustered connection probability on `scenario` for each
/// radius. Analytic columns average per-seed road probabilities; Monte Carlo
/// columns come from `trials` fresh placements. Rows follow `radii` order.
pub fn sweep_connection_probability(
    scenario: &RoadScenario,
    radii: &[f64],
    seeds: &[u64],
    trials: u64,
    mc_seed: u64,
    kmeans: &KMeansConfig,
) -> Result<Vec<SweepPoint>> {
    scenario.validate()?;
    if radii.is_empty() {
        return Err(Error::Empty("radii"));
    }
    if seeds.is_empty() {
        return Err(Error::Empty("seeds"));
    }
    if trials == 0 {
        return Err(Error::invalid("trials", 0.0, "must be at least 1"));
    }
    radii
        .par_iter()
        .enumerate()
        .map(|(ri, &radius)| {
            let road = scenario.with_coverage_radius(radius)?;
            let mut per_seed = Vec::with_capacity(seeds.len());
            let mut reports = Vec::with_capacity(seeds.len());
            for &seed in seeds {
                let structures = road
                    .place_all(seed)?
                    .iter()
                    .map(|vs| cluster_or_empty(vs, kmeans))
                    .collect::<Result<Vec<_>>>()?;
                per_seed.push(SeedOutcome::from_structures(seed, &structures));
                reports.push(ConnectivityReport::for_road(
                    road.density,
                    radius,
                    &structures,
                    None,
                )?);
            }
            let mc = mc_connectivity(
                &road,
                trials,
                derive_seed(mc_seed, "road-radius", ri as u64),
                kmeans,
            )?;
            Ok(SweepPoint {
                row: make_row(road.total_length(), radius, &per_seed, &reports, &mc),
                mc,
                per_seed,
            })
        })
        .collect()
}

/// Formats `value` with six significant digits in the style of C's `%g`.
pub fn format_sig6(value: f64) -> String {
    if value == 0.0 {
        return "0".into();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let sci = format!("{value:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        trim_zeros(format!("{value:.decimals$}"))
    } else {
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa.to_string()),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Renders `rows` as CSV with the fixed [`TABLE_HEADER`].
pub fn render_table(rows: &[SweepRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Empty("table"));
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(TABLE_HEADER)?;
    for row in rows {
        writer.write_record(row.values().iter().map(|&v| format_sig6(v)))?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is ASCII"))
}

pub fn emit_table(rows: &[SweepRow], destination: &Path) -> Result<()> {
    let text = render_table(rows)?;
    let mut file = std::fs::File::create(destination)?;
    file.write_all(text.as_bytes())?;
    Ok(())
}

/// JSON mirror of [`emit_table`].
pub fn emit_table_json(rows: &[SweepRow], destination: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Empty("table"));
    }
    let mut text = serde_json::to_string_pretty(rows)?;
    text.push('\n');
    std::fs::write(destination, text)?;
    Ok(())
}
