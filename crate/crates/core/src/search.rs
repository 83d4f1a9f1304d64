//! Derivative-free compass (pattern) search used to refine sampled suprema.

use num_complex::Complex64;

use crate::geometry::PolydiscPoint;
use crate::sampling::clip_to_cap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternSearch {
    pub initial_step: f64,
    pub shrink: f64,
    pub iterations: usize,
}

impl Default for PatternSearch {
    fn default() -> Self {
        Self {
            initial_step: 0.05,
            shrink: 0.5,
            iterations: 40,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult<T> {
    pub point: PolydiscPoint,
    pub value: f64,
    pub payload: T,
}

impl PatternSearch {
    /// Maximizes `objective` starting from a feasible point.
    ///
    /// Each iteration polls `±step` along the real and imaginary axis of every
    /// coordinate, clipping candidates to the sampling radius cap. The best
    /// strictly improving poll is accepted; otherwise the step shrinks.
    /// `objective` returns `None` for infeasible candidates. The payload
    /// carries whatever side information the caller computed for the point.
    pub fn maximize<T, F>(&self, start: SearchResult<T>, objective: F) -> SearchResult<T>
    where
        F: Fn(&PolydiscPoint) -> Option<(f64, T)>,
    {
        let mut best = start;
        let mut step = self.initial_step;
        let dim = best.point.dim();
        for _ in 0..self.iterations {
            let mut improved: Option<SearchResult<T>> = None;
            for j in 0..dim {
                for delta in [
                    Complex64::new(step, 0.0),
                    Complex64::new(-step, 0.0),
                    Complex64::new(0.0, step),
                    Complex64::new(0.0, -step),
                ] {
                    let mut coords = best.point.coords().to_vec();
                    coords[j] += delta;
                    clip_to_cap(&mut coords);
                    let Ok(candidate) = PolydiscPoint::new(coords) else {
                        continue;
                    };
                    let Some((value, payload)) = objective(&candidate) else {
                        continue;
                    };
                    let bar = improved.as_ref().map_or(best.value, |r| r.value);
                    if value > bar {
                        improved = Some(SearchResult {
                            point: candidate,
                            value,
                            payload,
                        });
                    }
                }
            }
            match improved {
                Some(next) => best = next,
                None => step *= self.shrink,
            }
        }
        best
    }
}

/// Indices of the `k` largest values, largest first; ties keep index order.
/// Non-finite values are ignored.
pub fn top_indices(values: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_finite()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

/// Indices that rank among the `k` largest of their own prefix, in index
/// order. Non-finite values are ignored.
///
/// The result for `values[..m]` is a prefix of the result for `values`, and
/// it always contains `top_indices(values, k)`. Refining these points
/// therefore makes a seeded nested-sample estimate monotone in the budget.
pub fn running_top_indices(values: &[f64], k: usize) -> Vec<usize> {
    let mut best: Vec<f64> = Vec::with_capacity(k + 1);
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            continue;
        }
        // best is sorted descending; an equal value loses to earlier indices
        if best.len() < k || v > best[k - 1] {
            let at = best.partition_point(|&b| b >= v);
            best.insert(at, v);
            best.truncate(k);
            out.push(i);
        }
    }
    out
}
