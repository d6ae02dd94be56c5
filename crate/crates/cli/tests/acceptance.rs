//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p vanet-cli --test acceptance`. Exits non-zero when
//! any criterion fails.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vanet_core::connectivity::{
    clustered_link_probability, mc_connectivity_with_rule, mc_gap_frequency,
    sample_consecutive_gaps, LinkRule,
};
use vanet_core::experiments::{nested_structures, sweep_connection_probability, DEFAULT_RADII};
use vanet_core::{
    check_feasibility, kmeans_1d, kmeans_1d_exact, optimize_cluster_count,
    vehicle_connection_probability, KMeansConfig, KMeansResult, RoadScenario, Street, SweepSpec,
    VehicleSet,
};

const MASTER_SEED: u64 = 20_240_917;
const MC_TRIALS: u64 = 10_000;
const CASES: usize = 1000;

/// 1 - e^-1 to 30 digits.
const ONE_MINUS_INV_E: f64 = 0.632_120_558_828_557_678_404_476_229_839;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

fn within(elapsed: Duration, limit_s: u64) -> (bool, String) {
    let ok = elapsed < Duration::from_secs(limit_s);
    (ok, format!("{:.1}s of {limit_s}s", elapsed.as_secs_f64()))
}

// 1 and 2 share one set of nested placements.
fn nested_counts() -> (Vec<Vec<Vec<usize>>>, Duration) {
    let start = Instant::now();
    let spec = SweepSpec::with_defaults(MASTER_SEED);
    let counts = nested_structures(&spec)
        .expect("default grid is valid")
        .into_iter()
        .map(|per_len| {
            per_len
                .into_iter()
                .map(|per_r| per_r.into_iter().map(|s| s.group_count).collect())
                .collect()
        })
        .collect();
    (counts, start.elapsed())
}

fn radius_monotonicity(counts: &[Vec<Vec<usize>>], elapsed: Duration) -> Outcome {
    let mut checked = 0;
    let mut violations = 0;
    for per_len in counts {
        for per_r in per_len {
            for w in per_r.windows(2) {
                checked += 1;
                violations += usize::from(w[1] > w[0]);
            }
        }
    }
    let (fast, time) = within(elapsed, 60);
    Outcome::new(
        violations == 0 && fast,
        format!(
            "{violations} violations in {checked} comparisons over {} seeds; {time}",
            counts.len()
        ),
    )
}

fn length_monotonicity(counts: &[Vec<Vec<usize>>], elapsed: Duration) -> Outcome {
    let spec = SweepSpec::with_defaults(MASTER_SEED);
    let mut checked = 0;
    let mut violations = 0;
    let mut first = None;
    for (si, per_len) in counts.iter().enumerate() {
        for ri in 0..per_len[0].len() {
            for li in 1..per_len.len() {
                checked += 1;
                if per_len[li][ri] < per_len[li - 1][ri] {
                    violations += 1;
                    first.get_or_insert(format!(
                        "; first: seed #{si}, R={}, L={} -> {} groups, L={} -> {} groups",
                        spec.radii[ri],
                        spec.lengths[li - 1],
                        per_len[li - 1][ri],
                        spec.lengths[li],
                        per_len[li][ri],
                    ));
                }
            }
        }
    }
    let (fast, time) = within(elapsed, 60);
    Outcome::new(
        violations == 0 && fast,
        format!(
            "{violations} violations in {checked} comparisons over {} seeds{}; {time}",
            counts.len(),
            first.unwrap_or_default()
        ),
    )
}

fn clustered_dominance() -> Outcome {
    let start = Instant::now();
    let spec = SweepSpec::with_defaults(MASTER_SEED);
    let road = RoadScenario::five_street_road(0.1, DEFAULT_RADII[0]).unwrap();
    let points = sweep_connection_probability(
        &road,
        &DEFAULT_RADII,
        &spec.seeds,
        MC_TRIALS,
        spec.mc_seed,
        &spec.kmeans,
    )
    .expect("sweep runs");

    let mut analytic_bad = Vec::new();
    let mut mc_bad = Vec::new();
    let mut separation_bad = Vec::new();
    let mut qualifying = 0;
    for p in &points {
        let r = &p.row;
        if r.p_clustered_analytic < r.p_noncluster_analytic {
            analytic_bad.push(r.radius_m);
        }
        if r.p_clustered_mc < r.p_noncluster_mc - 2.0 * r.mc_halfwidth {
            mc_bad.push(r.radius_m);
        }
        let inside = |x: f64| x > 0.05 && x < 0.95;
        if inside(r.p_clustered_mc) && inside(r.p_noncluster_mc) {
            qualifying += 1;
            if p.mc.clustered.lower() <= p.mc.noncluster.upper() {
                separation_bad.push(r.radius_m);
            }
        }
    }
    let mc: Vec<String> = points
        .iter()
        .map(|p| {
            format!(
                "R={}: {:.4}/{:.4}",
                p.row.radius_m, p.row.p_clustered_mc, p.row.p_noncluster_mc
            )
        })
        .collect();
    let (fast, time) = within(start.elapsed(), 300);
    Outcome::new(
        analytic_bad.is_empty() && mc_bad.is_empty() && separation_bad.is_empty() && fast,
        format!(
            "analytic violations at R={analytic_bad:?}; MC violations at R={mc_bad:?}; \
             separation checked at {qualifying} radii, failed at R={separation_bad:?}; \
             MC clustered/non-clustered [{}]; {time}",
            mc.join(", ")
        ),
    )
}

/// The literal gateway-to-next-effective-node rule, reported for comparison.
fn literal_rule_report() -> String {
    let cells: Vec<String> = DEFAULT_RADII
        .iter()
        .enumerate()
        .map(|(i, &radius)| {
            let road = RoadScenario::five_street_road(0.1, radius).unwrap();
            let mc = mc_connectivity_with_rule(
                &road,
                MC_TRIALS,
                MASTER_SEED + i as u64,
                &KMeansConfig::default(),
                LinkRule::NextEffectiveNode,
            )
            .unwrap();
            format!(
                "R={radius}: {:.4}/{:.4}",
                mc.clustered.estimate, mc.noncluster.estimate
            )
        })
        .collect();
    cells.join(", ")
}

fn ks_exponential(sample: &mut [f64], rate: f64) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = -(-rate * x).exp_m1();
            (cdf - i as f64 / n).max((i + 1) as f64 / n - cdf)
        })
        .fold(0.0, f64::max)
}

fn formula_oracle() -> Outcome {
    let p = vehicle_connection_probability(0.1, 10.0).unwrap();
    let formula_ok = (p - ONE_MINUS_INV_E).abs() <= 1e-6;
    let street = Street::new("s", 10_000.0).unwrap();
    let freq = mc_gap_frequency(&street, 0.1, 10.0, 100_000, MASTER_SEED).unwrap();
    let freq_ok = (freq.estimate - p).abs() <= 0.01;
    let mut gaps = sample_consecutive_gaps(&street, 0.1, 100_000, MASTER_SEED + 1).unwrap();
    let ks = ks_exponential(&mut gaps, 0.1);
    Outcome::new(
        formula_ok && freq_ok && ks < 0.01,
        format!(
            "P = {p:.9}; per-gap frequency {:.5}; KS distance {ks:.5}",
            freq.estimate
        ),
    )
}

fn segment_cost(points: &[f64]) -> f64 {
    let mean = points.iter().sum::<f64>() / points.len() as f64;
    points.iter().map(|p| (p - mean).powi(2)).sum()
}

fn enumerate_wcss(points: &[f64], k: usize) -> f64 {
    if k == 1 {
        return segment_cost(points);
    }
    (1..=points.len() - (k - 1))
        .map(|cut| segment_cost(&points[..cut]) + enumerate_wcss(&points[cut..], k - 1))
        .fold(f64::INFINITY, f64::min)
}

fn random_points(rng: &mut ChaCha8Rng, max_n: usize) -> Vec<f64> {
    let n = rng.random_range(1..=max_n);
    let mut p: Vec<f64> = if rng.random_bool(0.2) {
        // coarse grid: forces duplicates
        (0..n)
            .map(|_| rng.random_range(0..20) as f64 * 50.0)
            .collect()
    } else {
        (0..n).map(|_| rng.random_range(0.0..1000.0)).collect()
    };
    p.sort_by(f64::total_cmp);
    p
}

fn clustering_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(MASTER_SEED);
    let instances = 200;
    let mut matched = 0;
    let mut below = 0;
    for i in 0..instances {
        let points = random_points(&mut rng, 12);
        let k = rng.random_range(1..=points.len().min(4));
        let config = KMeansConfig {
            restarts: 10,
            seed: MASTER_SEED + i,
            ..KMeansConfig::default()
        };
        let lloyd = kmeans_1d(&points, k, &config).unwrap().wcss;
        let exact = kmeans_1d_exact(&points, k).unwrap().wcss;
        let tol = 1e-9 * exact.max(1.0);
        below += usize::from(lloyd < exact - tol);
        matched += usize::from((lloyd - exact).abs() <= tol);
    }

    let mut dp_checked = 0;
    let mut dp_matched = 0;
    for _ in 0..instances {
        let points = random_points(&mut rng, 10);
        let k = rng.random_range(1..=points.len());
        let exact = kmeans_1d_exact(&points, k).unwrap().wcss;
        let brute = enumerate_wcss(&points, k);
        dp_checked += 1;
        dp_matched += usize::from((exact - brute).abs() <= 1e-9 * brute.max(1.0));
    }
    Outcome::new(
        matched * 100 >= instances as usize * 95 && below == 0 && dp_matched == dp_checked,
        format!(
            "restarted Lloyd matched {matched}/{instances}, below optimum {below}; \
             DP matched enumeration {dp_matched}/{dp_checked}"
        ),
    )
}

fn is_contiguous(r: &KMeansResult) -> bool {
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for (_, idx) in r.groups() {
        if idx.windows(2).any(|w| w[1] != w[0] + 1) {
            return false;
        }
        runs.push((idx[0], idx[idx.len() - 1]));
    }
    runs.sort_unstable();
    runs.windows(2).all(|w| w[0].1 < w[1].0)
}

fn invariant_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(MASTER_SEED + 6);
    let mut failures: Vec<&str> = Vec::new();
    let mut fail = |name: &'static str| {
        if !failures.contains(&name) {
            failures.push(name);
        }
    };

    for _ in 0..CASES {
        let points = random_points(&mut rng, 40);
        let k = rng.random_range(1..=points.len());
        let r = kmeans_1d(&points, k, &KMeansConfig::default()).unwrap();
        if r.assignments.len() != points.len() || r.assignments.iter().any(|&c| c >= k) {
            fail("partition");
        }
        if !is_contiguous(&r) {
            fail("contiguity");
        }
        if r.wcss_history
            .windows(2)
            .any(|w| w[1] > w[0] + 1e-9 * w[0].max(1.0))
        {
            fail("monotone WCSS");
        }
    }

    for _ in 0..CASES {
        let points = random_points(&mut rng, 60);
        let radius = rng.random_range(1.0..400.0);
        let vs = VehicleSet::from_positions("s", 1000.0, &points, radius).unwrap();
        let s = optimize_cluster_count(&vs, &KMeansConfig::default()).unwrap();
        let ids: BTreeSet<_> = s
            .clusters
            .iter()
            .flat_map(|c| c.member_ids.iter().copied())
            .chain(s.singleton_ids.iter().copied())
            .collect();
        if ids.len() != vs.len() || s.k + s.m != s.group_count {
            fail("partition");
        }
        if s.clusters.iter().any(|c| !check_feasibility(c, &vs)) {
            fail("gateway feasibility");
        }
    }

    for _ in 0..CASES {
        let density = rng.random_range(1e-4..1.0);
        let radius = rng.random_range(1e-2..500.0);
        let q = rng.random_range(0.0..=1.0);
        let single = vehicle_connection_probability(density, radius).unwrap();
        if clustered_link_probability(density, radius, q).unwrap() < single {
            fail("bracket ordering");
        }
    }

    Outcome::new(
        failures.is_empty(),
        format!("{CASES} cases per property; failing: {failures:?}"),
    )
}

fn run_sweep(out: &Path, threads: &str) -> bool {
    Command::new(env!("CARGO_BIN_EXE_vanet"))
        .args([
            "sweep",
            "--seed",
            "7",
            "--lengths",
            "600,1000",
            "--radii",
            "50,150",
            "--seeds",
            "3",
            "--trials",
            "300",
            "--json",
            "--threads",
            threads,
            "--out",
        ])
        .arg(out)
        .output()
        .is_ok_and(|o| o.status.success())
}

fn read_dir_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn reproducibility() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let runs = [("a", "1"), ("b", "1"), ("c", "4")];
    for (dir, threads) in runs {
        if !run_sweep(&tmp.path().join(dir), threads) {
            return Outcome::new(false, format!("sweep run {dir} failed"));
        }
    }
    let a = read_dir_files(&tmp.path().join("a"));
    let same_flags = a == read_dir_files(&tmp.path().join("b"));
    let other_threads = a == read_dir_files(&tmp.path().join("c"));
    let names: Vec<&str> = a.iter().map(|(n, _)| n.as_str()).collect();
    Outcome::new(
        same_flags && other_threads && names.len() == 5,
        format!(
            "files {names:?}; repeat run identical: {same_flags}; --threads 4 vs 1 identical: {other_threads}"
        ),
    )
}

fn report(id: u32, name: &str, outcome: &Outcome) {
    let tag = if outcome.passed { "PASS" } else { "FAIL" };
    println!("[{tag}] {id}. {name}: {}", outcome.detail);
}

fn main() {
    let (counts, elapsed) = nested_counts();
    let results = [
        ("radius monotonicity", radius_monotonicity(&counts, elapsed)),
        ("length monotonicity", length_monotonicity(&counts, elapsed)),
        ("clustered beats non-clustered", clustered_dominance()),
        ("formula oracle", formula_oracle()),
        ("clustering oracle", clustering_oracle()),
        ("invariant suite", invariant_suite()),
        ("sweep reproducibility", reproducibility()),
    ];
    for (i, (name, outcome)) in results.iter().enumerate() {
        report(i as u32 + 1, name, outcome);
    }
    println!(
        "[INFO] gateway-to-next-gateway link rule, MC clustered/non-clustered: {}",
        literal_rule_report()
    );
    let failed = results.iter().filter(|(_, o)| !o.passed).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
