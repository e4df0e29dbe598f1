//! Dynamic time warping with absolute-difference local cost.

use super::EvolveError;

/// DTW distance between two sequences, normalized by warping-path length.
///
/// Classic dynamic program with the symmetric step pattern (match,
/// insert, delete) and no window. Among equal-cost alignments the
/// shortest path is used for normalization, so the result is exactly
/// symmetric in its arguments. Both sequences need at least two points.
pub fn dtw_distance(a: &[f64], b: &[f64]) -> Result<f64, EvolveError> {
    for len in [a.len(), b.len()] {
        if len < 2 {
            return Err(EvolveError::TooShort { len, min: 2 });
        }
    }
    let (m, n) = (a.len(), b.len());
    // Accumulated (cost, cells on the path), minimized lexicographically;
    // both components are additive, so the lexicographic DP is exact.
    let mut acc = vec![vec![(0.0f64, 0usize); n]; m];
    for i in 0..m {
        for j in 0..n {
            let local = (a[i] - b[j]).abs();
            let best = if i == 0 && j == 0 {
                (0.0, 0)
            } else {
                let mut candidates = Vec::with_capacity(3);
                if i > 0 && j > 0 {
                    candidates.push(acc[i - 1][j - 1]);
                }
                if i > 0 {
                    candidates.push(acc[i - 1][j]);
                }
                if j > 0 {
                    candidates.push(acc[i][j - 1]);
                }
                candidates
                    .into_iter()
                    .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)))
                    .unwrap()
            };
            acc[i][j] = (best.0 + local, best.1 + 1);
        }
    }
    let (cost, cells) = acc[m - 1][n - 1];
    Ok(cost / cells as f64)
}
