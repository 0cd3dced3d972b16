//! Weighted percentiles in expected linear time.
//!
//! The fixed-pivot kernel is first run on the values at the unweighted rank
//! `ceil(n * p)`. The weight mass left of the pivot is then checked against
//! `p`; if the pivot row does not straddle `p`, the target moves one rank
//! towards the side holding the missing mass and the kernel runs again on the
//! part of the array that can still contain it. Value/weight rows are always
//! swapped together.

use crate::error::{Error, Result};
use crate::select::{select_in_window, NoTally, RowStore};

/// Paired columns permuted as a unit. Swaps go column by column.
struct PairColumns<'a> {
    values: &'a mut [f64],
    weights: &'a mut [f64],
}

impl RowStore for PairColumns<'_> {
    type Key = f64;
    #[inline]
    fn key(&self, i: usize) -> f64 {
        self.values[i]
    }
    #[inline]
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.values.swap(i, j);
        self.weights.swap(i, j);
    }
}

/// Values with non-negative weights and a target fraction `p` in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample {
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
    pub p: f64,
}

/// Outcome of a weighted selection. `kstar` is 1-based into the permuted
/// rows; `weight_at_k` is the weight of that row divided by the total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedResult {
    pub value: f64,
    pub weight_at_k: f64,
    pub kstar: usize,
    /// Kernel invocations needed to settle, for diagnostics.
    pub outer_iterations: usize,
}

impl WeightedSample {
    pub fn new(values: Vec<f64>, weights: Vec<f64>, p: f64) -> Result<Self> {
        validate(&values, &weights, p)?;
        Ok(WeightedSample { values, weights, p })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn validate(values: &[f64], weights: &[f64], p: f64) -> Result<f64> {
    if values.len() != weights.len() {
        return Err(Error::LengthMismatch {
            values: values.len(),
            weights: weights.len(),
        });
    }
    if values.is_empty() {
        return Err(Error::Empty);
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::PercentileOutOfRange(p));
    }
    let mut total = 0.0;
    for (row, &w) in weights.iter().enumerate() {
        if !(w >= 0.0) {
            return Err(Error::NegativeWeight { row, weight: w });
        }
        total += w;
    }
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::ZeroTotalWeight);
    }
    Ok(total)
}

/// Signed gaps of the balance condition at row `k`: `(pT - L, L + w_k - pT)`
/// with `L` the mass left of `k`. Both are >= 0 exactly when `k` balances.
///
/// For `p > 1/2` the gaps are computed from the mass right of `k` against
/// `(1 - p) T`, so the sums stay short and `p = 1` is decided exactly.
fn balance_gaps(weights: &[f64], k: usize, p: f64, total: f64) -> (f64, f64) {
    let wk = weights[k];
    if p <= 0.5 {
        let left: f64 = weights[..k].iter().sum();
        let target = p * total;
        (target - left, left + wk - target)
    } else {
        let right: f64 = weights[k + 1..].iter().sum();
        let target = (1.0 - p) * total;
        (right + wk - target, target - right)
    }
}

/// Weighted percentile of `sample`, permuting its rows in place.
///
/// Weights need not sum to 1: partial masses are compared with `p` times the
/// total, so integer weights give exact balance tests. On return, with `L`
/// the normalized mass of rows `1..kstar-1`, `L <= p <= L + weight_at_k`, and
/// `kstar` is the smallest rank for which this holds: for `p = 0.5` this is
/// the lower weighted median.
pub fn weighted_percentile(sample: &mut WeightedSample) -> Result<WeightedResult> {
    let total = validate(&sample.values, &sample.weights, sample.p)?;
    let p = sample.p;
    let n = sample.values.len();
    let mut rows = PairColumns {
        values: &mut sample.values,
        weights: &mut sample.weights,
    };

    let guard = 2 * n + 1;
    let mut iterations = 0usize;
    let mut k = ((n as f64 * p).ceil() as usize).clamp(1, n) - 1;
    let (mut left, mut right) = (0usize, n - 1);
    let mut below;
    loop {
        iterations += 1;
        if iterations > guard {
            return Err(Error::NoConvergence(guard));
        }
        select_in_window(&mut rows, k, left, right, &mut NoTally);
        let above;
        (below, above) = balance_gaps(rows.weights, k, p, total);
        if below >= 0.0 && above >= 0.0 {
            break;
        }
        if rows.weights[k] < 2.0 * below {
            // Only rounding can push the running mass short of p at the top.
            if k == n - 1 {
                break;
            }
            k += 1;
            left = k;
            right = n - 1;
        } else {
            if k == 0 {
                break;
            }
            k -= 1;
            left = 0;
            right = k;
        }
    }

    // When the mass left of k already reaches p, rank k-1 satisfies the
    // balance too; walk down to the smallest qualifying rank.
    while k > 0 && below <= 0.0 {
        iterations += 1;
        if iterations > guard {
            return Err(Error::NoConvergence(guard));
        }
        k -= 1;
        select_in_window(&mut rows, k, 0, k, &mut NoTally);
        below = balance_gaps(rows.weights, k, p, total).0;
    }

    Ok(WeightedResult {
        value: rows.values[k],
        weight_at_k: rows.weights[k] / total,
        kstar: k + 1,
        outer_iterations: iterations,
    })
}

/// Lower weighted median: the value minimizing `sum_i w_i |a_i - a|`,
/// taking the smaller candidate on ties.
pub fn weighted_median(values: &[f64], weights: &[f64]) -> Result<f64> {
    let mut s = WeightedSample::new(values.to_vec(), weights.to_vec(), 0.5)?;
    Ok(weighted_percentile(&mut s)?.value)
}

/// Reference implementation by sorting: the value at the smallest sorted rank
/// whose running weight reaches `p` times the total. For `p > 1/2` the same
/// rank is found from the top, as the smallest rank whose strictly-higher
/// mass is at most `(1 - p)` times the total.
pub fn weighted_percentile_oracle(values: &[f64], weights: &[f64], p: f64) -> Result<f64> {
    let total = validate(values, weights, p)?;
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    if p <= 0.5 {
        let target = p * total;
        let mut running = 0.0;
        for &i in &order {
            running += weights[i];
            if running >= target {
                return Ok(values[i]);
            }
        }
        return Ok(values[*order.last().expect("non-empty")]);
    }
    let target = (1.0 - p) * total;
    let mut higher = 0.0;
    let mut best = *order.last().expect("non-empty");
    for &i in order.iter().rev() {
        if higher > target {
            break;
        }
        best = i;
        higher += weights[i];
    }
    Ok(values[best])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wp(values: &[f64], weights: &[f64], p: f64) -> WeightedResult {
        let mut s = WeightedSample::new(values.to_vec(), weights.to_vec(), p).unwrap();
        weighted_percentile(&mut s).unwrap()
    }

    #[test]
    fn equal_weights_median() {
        let r = wp(&[5., 1., 4., 2., 3.], &[1.; 5], 0.5);
        assert_eq!((r.value, r.kstar), (3.0, 3));
    }

    #[test]
    fn laplace_example() {
        let r = wp(&[1., 2., 3., 4., 5.], &[0.15, 0.10, 0.20, 0.30, 0.25], 0.5);
        assert_eq!(r.value, 4.0);
    }

    #[test]
    fn p_one_gives_maximum() {
        let r = wp(&[3., 9., 1., 7.], &[0.3, 0.2, 0.4, 0.1], 1.0);
        assert_eq!((r.value, r.kstar), (9.0, 4));
    }

    #[test]
    fn p_zero_gives_minimum() {
        let r = wp(&[3., 9., 1., 7.], &[0.3, 0.2, 0.4, 0.1], 0.0);
        assert_eq!((r.value, r.kstar), (1.0, 1));
    }

    #[test]
    fn median_wrappers() {
        assert_eq!(weighted_median(&[7.], &[3.]).unwrap(), 7.0);
        assert_eq!(weighted_median(&[1., 2., 3.], &[1., 1., 10.]).unwrap(), 3.0);
        assert_eq!(weighted_median(&[1., 2., 3., 4.], &[1.; 4]).unwrap(), 2.0);
    }

    #[test]
    fn lower_rank_when_mass_hits_p_exactly() {
        // Row 1 alone carries exactly half the mass: rank 1 and 2 both
        // balance, the lower one wins.
        let r = wp(&[1., 2., 3.], &[0.5, 0.25, 0.25], 0.5);
        assert_eq!((r.value, r.kstar), (1.0, 1));
        let r = wp(&[1., 2., 3., 4.], &[0.5, 0.0, 0.25, 0.25], 0.5);
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn oracle_basics() {
        let v = [4., 1., 3., 2., 5., 6.];
        for p in [0.1, 0.2, 0.5, 0.51, 0.9, 1.0] {
            let k = (6.0_f64 * p).ceil().max(1.0) as usize;
            assert_eq!(weighted_percentile_oracle(&v, &[1.; 6], p).unwrap(), k as f64);
        }
        let w = [0., 0., 1., 0., 0., 0.];
        for p in [0.01, 0.5, 1.0] {
            assert_eq!(weighted_percentile_oracle(&v, &w, p).unwrap(), 3.0);
            assert_eq!(wp(&v, &w, p).value, 3.0);
        }
    }

    #[test]
    fn rows_stay_paired() {
        let values: Vec<f64> = (0..30).map(|i| ((i * 17) % 30) as f64).collect();
        let weights: Vec<f64> = values.iter().map(|v| v * 10.0 + 1.0).collect();
        let mut s = WeightedSample::new(values, weights, 0.3).unwrap();
        weighted_percentile(&mut s).unwrap();
        for (v, w) in s.values.iter().zip(&s.weights) {
            assert_eq!(*w, v * 10.0 + 1.0);
        }
    }

    #[test]
    fn errors() {
        assert_eq!(
            WeightedSample::new(vec![1., 2.], vec![1., -1.], 0.5),
            Err(Error::NegativeWeight { row: 1, weight: -1.0 })
        );
        assert_eq!(
            WeightedSample::new(vec![1., 2.], vec![0., 0.], 0.5),
            Err(Error::ZeroTotalWeight)
        );
        assert_eq!(
            WeightedSample::new(vec![1., 2.], vec![1., 1.], 1.5),
            Err(Error::PercentileOutOfRange(1.5))
        );
        assert!(WeightedSample::new(vec![], vec![], 0.5).is_err());
        assert!(weighted_median(&[1.], &[1., 2.]).is_err());
    }
}
