use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use vanet_core::experiments::{
    derive_seeds, emit_table, emit_table_json, sweep_connection_probability, sweep_optimized_k,
    SweepRow, DEFAULT_DENSITY,
};
use vanet_core::{
    load_scenario, noncluster_connection_probability, optimize_cluster_count,
    system_connection_probability, vehicle_connection_probability, AnalyticParams, Cluster,
    ClusterStructure, KMeansConfig, LoadedScenario, RoadScenario, Street, SweepSpec, Vehicle,
    VehicleId, VehicleSet,
};

use crate::{CliError, ClusterArgs, ProbArgs, SweepArgs};

pub const OPTIMIZED_K_FILE: &str = "optimized_k.csv";
pub const CONNECTION_FILE: &str = "connection_probability.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Everything needed to regenerate a run's outputs. Output paths are relative
/// to the output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<String>,
    pub master_seed: u64,
    pub tool_version: String,
    pub output_paths: Vec<String>,
    pub parameters: serde_json::Value,
}

#[derive(Serialize)]
struct ClusterParameters<'a> {
    streets: &'a [Street],
    density_per_m: f64,
    coverage_radius_m: f64,
    kmeans: KMeansConfig,
}

#[derive(Serialize)]
struct SweepParameters<'a> {
    lengths_m: &'a [f64],
    radii_m: &'a [f64],
    density_per_m: f64,
    seed_count: usize,
    trials: u64,
    mc_seed: u64,
    kmeans: KMeansConfig,
    road: &'a [Street],
}

/// One street's clustering as written by `cluster`.
#[derive(Serialize)]
struct StreetClusters<'a> {
    street_id: &'a str,
    street_length_m: f64,
    n: usize,
    k: usize,
    m: usize,
    group_count: usize,
    gateway_ids: Vec<VehicleId>,
    clusters: &'a [Cluster],
    singleton_ids: &'a [VehicleId],
    vehicles: &'a [Vehicle],
}

#[derive(Serialize)]
struct Probabilities {
    p_vehicle: f64,
    p_clustered: f64,
    p_noncluster: f64,
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn read_scenario(path: &Path) -> Result<LoadedScenario, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    load_scenario(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| io_error(path, e))
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| io_error(path, e))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("plain data serializes");
    text.push('\n');
    text
}

fn print_stdout(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::Io(format!("stdout: {e}")))
}

fn kmeans_config(restarts: usize, seed: u64) -> KMeansConfig {
    KMeansConfig {
        restarts,
        seed,
        ..KMeansConfig::default()
    }
}

fn cluster_or_empty(vs: &VehicleSet, config: &KMeansConfig) -> Result<ClusterStructure, CliError> {
    if vs.is_empty() {
        Ok(ClusterStructure::empty(vs.street_id.clone()))
    } else {
        Ok(optimize_cluster_count(vs, config)?)
    }
}

/// File-name-safe form of a street id.
fn file_stem(index: usize, street_id: &str) -> String {
    let id: String = street_id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("cluster-{index}-{id}")
}

pub(crate) fn cluster(args: &ClusterArgs) -> Result<(), CliError> {
    let loaded = read_scenario(&args.config)?;
    let scenario = &loaded.scenario;
    let seed = args.seed.or(loaded.seed).unwrap_or(0);
    let kmeans = kmeans_config(args.restarts, seed);

    let mut documents = Vec::with_capacity(scenario.streets.len());
    for vs in scenario.place_all(seed)? {
        let s = cluster_or_empty(&vs, &kmeans)?;
        let doc = StreetClusters {
            street_id: &vs.street_id,
            street_length_m: vs.street_length,
            n: s.n,
            k: s.k,
            m: s.m,
            group_count: s.group_count,
            gateway_ids: s.gateway_ids().collect(),
            clusters: &s.clusters,
            singleton_ids: &s.singleton_ids,
            vehicles: &vs.vehicles,
        };
        documents.push((
            vs.street_id.clone(),
            serde_json::to_value(&doc).expect("serializes"),
        ));
    }

    let Some(out) = &args.out else {
        let lines: String = documents
            .iter()
            .map(|(_, doc)| format!("{doc}\n"))
            .collect();
        return print_stdout(&lines);
    };

    create_dir(out)?;
    let mut output_paths = Vec::with_capacity(documents.len() + 1);
    for (i, (id, doc)) in documents.iter().enumerate() {
        let name = format!("{}.json", file_stem(i, id));
        write_file(&out.join(&name), &to_json(doc))?;
        output_paths.push(name);
    }
    output_paths.push(MANIFEST_FILE.to_string());
    let manifest = RunManifest {
        command: "cluster".into(),
        config_path: Some(args.config.display().to_string()),
        master_seed: seed,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        output_paths: output_paths.clone(),
        parameters: serde_json::to_value(ClusterParameters {
            streets: &scenario.streets,
            density_per_m: scenario.density,
            coverage_radius_m: scenario.coverage_radius,
            kmeans,
        })
        .expect("serializes"),
    };
    write_file(&out.join(MANIFEST_FILE), &to_json(&manifest))?;
    print_written(out, &output_paths)
}

fn print_written(out: &Path, names: &[String]) -> Result<(), CliError> {
    let listing: String = names
        .iter()
        .map(|n| format!("{}\n", out.join(n).display()))
        .collect();
    print_stdout(&listing)
}

fn rows(points: &[vanet_core::SweepPoint]) -> Vec<SweepRow> {
    points.iter().map(|p| p.row).collect()
}

pub(crate) fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    let loaded = args.config.as_deref().map(read_scenario).transpose()?;
    let seed = args
        .seed
        .or(loaded.as_ref().and_then(|l| l.seed))
        .unwrap_or(0);
    let density = args
        .density
        .or(loaded.as_ref().map(|l| l.scenario.density))
        .unwrap_or(DEFAULT_DENSITY);

    let mut spec = SweepSpec::with_defaults(seed);
    spec.density = density;
    spec.seeds = derive_seeds(seed, args.seeds);
    spec.trials = args.trials;
    spec.kmeans = kmeans_config(args.restarts, seed);
    if let Some(lengths) = &args.lengths {
        spec.lengths = lengths.clone();
    }
    if let Some(radii) = &args.radii {
        spec.radii = radii.clone();
    }
    spec.validate()?;

    let road = match &loaded {
        Some(l) => RoadScenario::new(l.scenario.streets.clone(), density, spec.radii[0])?,
        None => RoadScenario::five_street_road(density, spec.radii[0])?,
    };

    let k_table = rows(&sweep_optimized_k(&spec)?);
    let p_table = rows(&sweep_connection_probability(
        &road,
        &spec.radii,
        &spec.seeds,
        spec.trials,
        spec.mc_seed,
        &spec.kmeans,
    )?);

    create_dir(&args.out)?;
    let mut output_paths = Vec::new();
    for (file, table) in [(OPTIMIZED_K_FILE, &k_table), (CONNECTION_FILE, &p_table)] {
        emit_table(table, &args.out.join(file))?;
        output_paths.push(file.to_string());
        if args.json {
            let json_name = Path::new(file).with_extension("json");
            emit_table_json(table, &args.out.join(&json_name))?;
            output_paths.push(json_name.display().to_string());
        }
    }
    output_paths.push(MANIFEST_FILE.to_string());

    let manifest = RunManifest {
        command: "sweep".into(),
        config_path: args
            .config
            .as_ref()
            .map(|p: &PathBuf| p.display().to_string()),
        master_seed: seed,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        output_paths: output_paths.clone(),
        parameters: serde_json::to_value(SweepParameters {
            lengths_m: &spec.lengths,
            radii_m: &spec.radii,
            density_per_m: spec.density,
            seed_count: spec.seeds.len(),
            trials: spec.trials,
            mc_seed: spec.mc_seed,
            kmeans: spec.kmeans,
            road: &road.streets,
        })
        .expect("serializes"),
    };
    write_file(&args.out.join(MANIFEST_FILE), &to_json(&manifest))?;
    print_written(&args.out, &output_paths)
}

pub(crate) fn prob(args: &ProbArgs) -> Result<(), CliError> {
    if args.k + args.m > args.n {
        return Err(CliError::Usage(format!(
            "k + m = {} exceeds n = {}",
            args.k + args.m,
            args.n
        )));
    }
    let params = AnalyticParams {
        density: args.density,
        radius: args.radius,
        n: args.n,
        k: args.k,
        m: args.m,
    };
    let p = Probabilities {
        p_vehicle: vehicle_connection_probability(args.density, args.radius)?,
        p_clustered: system_connection_probability(&params)?,
        p_noncluster: noncluster_connection_probability(args.density, args.radius, args.n)?,
    };
    print_stdout(&format!(
        "{}\n",
        serde_json::to_string(&p).expect("serializes")
    ))
}
