//! Globally optimal 1-D k-means by interval dynamic programming.
//!
//! On sorted input some optimal partition consists of contiguous runs, so the
//! minimum WCSS over `k` runs follows from
//! `best[c][j] = min_i best[c-1][i-1] + cost(i, j)` in `O(k n²)`.

use super::kmeans::{summarize, validate_input, KMeansResult};
use crate::error::Result;

/// Segment costs from prefix sums of positions shifted by the first point,
/// which keeps the sums small for long streets.
struct SegmentCost {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

impl SegmentCost {
    fn new(positions: &[f64]) -> Self {
        let origin = positions[0];
        let mut sum = Vec::with_capacity(positions.len() + 1);
        let mut sum_sq = Vec::with_capacity(positions.len() + 1);
        sum.push(0.0);
        sum_sq.push(0.0);
        for &x in positions {
            let y = x - origin;
            sum.push(sum.last().unwrap() + y);
            sum_sq.push(sum_sq.last().unwrap() + y * y);
        }
        Self { sum, sum_sq }
    }

    /// Cost of the run `i..=j`.
    fn cost(&self, i: usize, j: usize) -> f64 {
        let len = (j + 1 - i) as f64;
        let s = self.sum[j + 1] - self.sum[i];
        let sq = self.sum_sq[j + 1] - self.sum_sq[i];
        (sq - s * s / len).max(0.0)
    }
}

pub fn kmeans_1d_exact(positions: &[f64], k: usize) -> Result<KMeansResult> {
    validate_input(positions, k)?;
    let n = positions.len();
    let seg = SegmentCost::new(positions);

    // best[c][j]: optimal cost of the first j+1 points in c+1 runs.
    // start[c][j]: first index of the last run in that optimum.
    let mut best = vec![vec![f64::INFINITY; n]; k];
    let mut start = vec![vec![0usize; n]; k];
    for (j, cell) in best[0].iter_mut().enumerate() {
        *cell = seg.cost(0, j);
    }
    for c in 1..k {
        for j in c..n {
            let mut value = f64::INFINITY;
            let mut arg = c;
            for i in c..=j {
                let v = best[c - 1][i - 1] + seg.cost(i, j);
                if v < value {
                    value = v;
                    arg = i;
                }
            }
            best[c][j] = value;
            start[c][j] = arg;
        }
    }

    let mut assignments = vec![0; n];
    let mut end = n - 1;
    for c in (0..k).rev() {
        let first = if c == 0 { 0 } else { start[c][end] };
        for slot in &mut assignments[first..=end] {
            *slot = c;
        }
        if c > 0 {
            end = first - 1;
        }
    }

    let (centers, wcss) = summarize(positions, &assignments, k);
    Ok(KMeansResult {
        assignments,
        centers,
        iterations: 0,
        wcss,
        wcss_history: vec![wcss],
    })
}
