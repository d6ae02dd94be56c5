//! One-dimensional Lloyd iteration.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed, SimRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub max_iter: usize,
    /// Convergence threshold on the largest center movement, meters.
    pub tol: f64,
    /// Extra runs from k-means++ seeding; the lowest-WCSS run wins.
    pub restarts: usize,
    /// Master seed for the restart streams. Unused when `restarts == 0`.
    pub seed: u64,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            max_iter: 100,
            tol: 1e-6,
            restarts: 0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansResult {
    /// Center index for each input position.
    pub assignments: Vec<usize>,
    pub centers: Vec<f64>,
    pub iterations: usize,
    /// Within-cluster sum of squares, m².
    pub wcss: f64,
    /// WCSS after each iteration of the winning run.
    pub wcss_history: Vec<f64>,
}

impl KMeansResult {
    /// Position indices per non-empty center, in center order.
    pub fn groups(&self) -> Vec<(usize, Vec<usize>)> {
        let mut members = vec![Vec::new(); self.centers.len()];
        for (i, &c) in self.assignments.iter().enumerate() {
            members[c].push(i);
        }
        members
            .into_iter()
            .enumerate()
            .filter(|(_, m)| !m.is_empty())
            .collect()
    }
}

pub(crate) fn validate_input(positions: &[f64], k: usize) -> Result<()> {
    if positions.is_empty() {
        return Err(Error::Empty("positions"));
    }
    if k == 0 || k > positions.len() {
        return Err(Error::ClusterCountOutOfRange {
            k,
            n: positions.len(),
        });
    }
    if let Some(&bad) = positions.iter().find(|p| !p.is_finite()) {
        return Err(Error::invalid("position", bad, "must be finite"));
    }
    if positions.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Validation(
            "positions must be sorted ascending".into(),
        ));
    }
    Ok(())
}

/// Clusters sorted `positions` into `k` groups.
///
/// Seeding is deterministic farthest-point: the first center is the point
/// farthest from the mean, each next one the point farthest from every center
/// chosen so far. Ties go to the smaller position.
pub fn kmeans_1d(positions: &[f64], k: usize, config: &KMeansConfig) -> Result<KMeansResult> {
    validate_input(positions, k)?;
    if config.max_iter == 0 {
        return Err(Error::invalid("max_iter", 0.0, "must be at least 1"));
    }
    if config.tol.is_nan() || config.tol < 0.0 {
        return Err(Error::invalid("tol", config.tol, "must be >= 0"));
    }

    let mut best = lloyd(positions, farthest_point_init(positions, k), config);
    for r in 0..config.restarts {
        let mut rng = rng_from_seed(derive_seed(config.seed, "kmeans-restart", r as u64));
        let run = lloyd(positions, kmeans_pp_init(positions, k, &mut rng), config);
        if run.wcss < best.wcss {
            best = run;
        }
    }
    Ok(best)
}

pub(crate) fn farthest_point_init(positions: &[f64], k: usize) -> Vec<f64> {
    let mean = positions.iter().sum::<f64>() / positions.len() as f64;
    let first = argmax_first(positions.iter().map(|&x| (x - mean).abs()), |_| true);
    let mut chosen = vec![false; positions.len()];
    chosen[first] = true;
    let mut centers = vec![positions[first]];
    let mut nearest: Vec<f64> = positions
        .iter()
        .map(|&x| (x - positions[first]).abs())
        .collect();

    while centers.len() < k {
        let next = argmax_first(nearest.iter().copied(), |i| !chosen[i]);
        chosen[next] = true;
        let c = positions[next];
        centers.push(c);
        for (d, &x) in nearest.iter_mut().zip(positions) {
            *d = d.min((x - c).abs());
        }
    }
    centers
}

/// Index of the first maximum among admissible indices.
fn argmax_first(values: impl Iterator<Item = f64>, admissible: impl Fn(usize) -> bool) -> usize {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.enumerate() {
        if !admissible(i) {
            continue;
        }
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i).expect("at least one admissible index")
}

/// D²-weighted seeding over distinct indices.
fn kmeans_pp_init(positions: &[f64], k: usize, rng: &mut SimRng) -> Vec<f64> {
    let n = positions.len();
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    let mut centers = vec![positions[first]];
    let mut nearest: Vec<f64> = positions
        .iter()
        .map(|&x| (x - positions[first]).powi(2))
        .collect();

    while centers.len() < k {
        let total: f64 = (0..n).filter(|&i| !chosen[i]).map(|i| nearest[i]).sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for i in (0..n).filter(|&i| !chosen[i] && nearest[i] > 0.0) {
                pick = Some(i);
                target -= nearest[i];
                if target < 0.0 {
                    break;
                }
            }
            pick.expect("positive total weight")
        } else {
            let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen[next] = true;
        let c = positions[next];
        centers.push(c);
        for (d, &x) in nearest.iter_mut().zip(positions) {
            *d = d.min((x - c).powi(2));
        }
    }
    centers
}

/// Assigns each sorted position to its nearest center. Ties go to the center
/// with the smaller position, then the smaller index.
pub(crate) fn assign_nearest(positions: &[f64], centers: &[f64], assignments: &mut [usize]) {
    let mut order: Vec<usize> = (0..centers.len()).collect();
    order.sort_by(|&a, &b| centers[a].total_cmp(&centers[b]).then(a.cmp(&b)));
    order.dedup_by(|b, a| centers[*a] == centers[*b]);

    let mut j = 0;
    for (slot, &x) in assignments.iter_mut().zip(positions) {
        while j + 1 < order.len()
            && (x - centers[order[j + 1]]).abs() < (x - centers[order[j]]).abs()
        {
            j += 1;
        }
        *slot = order[j];
    }
}

/// Member means (NaN for empty centers) and the WCSS of `assignments`.
pub(crate) fn summarize(positions: &[f64], assignments: &[usize], k: usize) -> (Vec<f64>, f64) {
    let mut sums = vec![0.0; k];
    let mut counts = vec![0usize; k];
    for (&x, &c) in positions.iter().zip(assignments) {
        sums[c] += x;
        counts[c] += 1;
    }
    let means: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| if c > 0 { s / c as f64 } else { f64::NAN })
        .collect();
    let wcss = positions
        .iter()
        .zip(assignments)
        .map(|(&x, &c)| (x - means[c]).powi(2))
        .sum();
    (means, wcss)
}

fn lloyd(positions: &[f64], mut centers: Vec<f64>, config: &KMeansConfig) -> KMeansResult {
    let k = centers.len();
    let mut assignments = vec![0; positions.len()];
    let mut wcss_history = Vec::new();
    let mut iterations = 0;

    while iterations < config.max_iter {
        iterations += 1;
        assign_nearest(positions, &centers, &mut assignments);
        let (mut next, wcss) = summarize(positions, &assignments, k);
        wcss_history.push(wcss);
        reseed_empty(positions, &mut next);

        let movement = centers
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        centers = next;
        if movement <= config.tol {
            break;
        }
    }

    KMeansResult {
        assignments,
        centers,
        iterations,
        wcss: *wcss_history.last().expect("at least one iteration"),
        wcss_history,
    }
}

/// Moves each empty (NaN) center onto the point farthest from its nearest
/// surviving center.
fn reseed_empty(positions: &[f64], centers: &mut [f64]) {
    while let Some(empty) = centers.iter().position(|c| c.is_nan()) {
        let nearest_surviving = |x: f64| {
            centers
                .iter()
                .filter(|c| !c.is_nan())
                .map(|c| (x - c).abs())
                .fold(f64::INFINITY, f64::min)
        };
        let far = argmax_first(positions.iter().map(|&x| nearest_surviving(x)), |_| true);
        centers[empty] = positions[far];
    }
}
