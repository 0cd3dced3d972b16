//! Medcouple: a robust skewness measure in [-1, 1].
//!
//! With `m` the sample median, the medcouple is the median of the kernel
//!
//! ```text
//! h(xi, xj) = ((xj - m) - (m - xi)) / (xj - xi),   xi <= m <= xj
//! ```
//!
//! over all pairs of observations straddling `m`. Pairs of points tied with
//! the median get -1, 0 or +1 according to their tie ranks so that the
//! kernel matrix stays monotone. The kernel median is the lower median of
//! the kernel multiset.
//!
//! [`medcouple_naive`] enumerates all pairs. [`medcouple_fast`] runs the
//! Johnson-Mizoguchi style search over the sorted kernel matrix whose pivot at
//! each round is the weighted median of the row medians.

use crate::error::{Error, Result};
use crate::select::{select_kth, SelectOptions};
use crate::weighted::weighted_median;

/// Kernel evaluated on centred coordinates `upper = xj - m >= 0` and
/// `lower = xi - m <= 0`, with the tie value used when both are zero.
#[inline]
fn centred_kernel(upper: f64, lower: f64, tie: f64) -> f64 {
    if upper == lower {
        tie
    } else {
        (upper + lower) / (upper - lower)
    }
}

/// Kernel on raw coordinates. `lower_rank` and `upper_rank` only matter when
/// `xi == xj == m`; the result is then `sign(lower_rank - upper_rank)`.
pub fn medcouple_kernel(xi: f64, xj: f64, m: f64, lower_rank: usize, upper_rank: usize) -> Result<f64> {
    if !(xi <= m && m <= xj) {
        return Err(Error::NotStraddling);
    }
    let tie = match lower_rank.cmp(&upper_rank) {
        std::cmp::Ordering::Less => -1.0,
        std::cmp::Ordering::Equal => 0.0,
        std::cmp::Ordering::Greater => 1.0,
    };
    Ok(centred_kernel(xj - m, xi - m, tie))
}

/// Sample median; mean of the two middle order statistics for even `n`.
pub fn sample_median(values: &[f64]) -> Result<f64> {
    let n = values.len();
    if n == 0 {
        return Err(Error::Empty);
    }
    let mut buf = values.to_vec();
    let hi = select_kth(&mut buf, n / 2 + 1, SelectOptions::default())?;
    if n % 2 == 1 {
        return Ok(hi);
    }
    // After selection everything left of rank n/2+1 is <= it; the lower
    // middle is the maximum of that part.
    let lo = select_kth(&mut buf[..n / 2], n / 2, SelectOptions::default())?;
    Ok((lo + hi) / 2.0)
}

/// The kernel matrix in sorted form: rows run over the upper half (descending),
/// columns over the lower half (descending). Entries decrease along both.
struct KernelMatrix {
    upper: Vec<f64>,
    lower: Vec<f64>,
    /// Number of observations tied with the median.
    ties: usize,
}

impl KernelMatrix {
    fn new(values: &[f64]) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::TooFewObservations {
                needed: 3,
                got: values.len(),
            });
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidParameter("NaN in medcouple input".into()));
        }
        let m = sample_median(values)?;
        let mut z: Vec<f64> = values.iter().map(|&x| x - m).collect();
        z.sort_by(|a, b| b.total_cmp(a));
        let upper: Vec<f64> = z.iter().copied().filter(|&v| v >= 0.0).collect();
        let lower: Vec<f64> = z.iter().copied().filter(|&v| v <= 0.0).collect();
        let ties = z.iter().filter(|&&v| v == 0.0).count();
        Ok(KernelMatrix { upper, lower, ties })
    }

    fn rows(&self) -> usize {
        self.upper.len()
    }

    fn cols(&self) -> usize {
        self.lower.len()
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.upper[i], self.lower[j]);
        if a == b {
            // Both tied with the median: the tie block occupies the last
            // `ties` rows and the first `ties` columns.
            let ti = i + self.ties - self.rows();
            let s = self.ties as isize - 1 - ti as isize - j as isize;
            return s.signum() as f64;
        }
        centred_kernel(a, b, 0.0)
    }

    /// 0-based index, in descending order, of the lower kernel median.
    fn target(&self) -> usize {
        self.rows() * self.cols() / 2
    }
}

/// Medcouple by enumerating every kernel value, O(n^2) time and memory.
pub fn medcouple_naive(values: &[f64]) -> Result<f64> {
    let km = KernelMatrix::new(values)?;
    let mut all = Vec::with_capacity(km.rows() * km.cols());
    for i in 0..km.rows() {
        for j in 0..km.cols() {
            all.push(km.at(i, j));
        }
    }
    // Lower median of the multiset: rank ceil(N/2) ascending.
    let n = all.len();
    let k = n.div_ceil(2);
    select_kth(&mut all, k, SelectOptions::default())
}

/// Medcouple in O(n log n): sorting plus O(log n) rounds of linear work,
/// each round pivoting on the weighted median of the active row medians.
pub fn medcouple_fast(values: &[f64]) -> Result<f64> {
    let km = KernelMatrix::new(values)?;
    let (rows, cols) = (km.rows(), km.cols());
    let target = km.target();

    // Active window of each row: columns left[i]..=right[i] (right may be -1).
    let mut left = vec![0isize; rows];
    let mut right = vec![cols as isize - 1; rows];
    let mut left_total = 0usize;
    let mut right_total = rows * cols;

    let mut mids = Vec::with_capacity(rows);
    let mut mid_weights = Vec::with_capacity(rows);
    let mut above = vec![0isize; rows];
    let mut at_least = vec![0isize; rows];

    while right_total - left_total > rows {
        mids.clear();
        mid_weights.clear();
        for i in 0..rows {
            if left[i] <= right[i] {
                let j = ((left[i] + right[i]) / 2) as usize;
                mids.push(km.at(i, j));
                mid_weights.push((right[i] - left[i] + 1) as f64);
            }
        }
        let pivot = weighted_median(&mids, &mid_weights)?;

        // above[i]: last column with kernel > pivot; at_least[i]: first
        // column with kernel < pivot.
        let mut j = 0usize;
        for i in (0..rows).rev() {
            while j < cols && km.at(i, j) > pivot {
                j += 1;
            }
            above[i] = j as isize - 1;
        }
        let mut j = cols as isize - 1;
        for i in 0..rows {
            while j >= 0 && km.at(i, j as usize) < pivot {
                j -= 1;
            }
            at_least[i] = j + 1;
        }
        let count_above: usize = above.iter().map(|&p| (p + 1) as usize).sum();
        let count_at_least: usize = at_least.iter().map(|&q| q as usize).sum();

        if target < count_above {
            right.copy_from_slice(&above);
            right_total = count_above;
        } else if target >= count_at_least {
            left.copy_from_slice(&at_least);
            left_total = count_at_least;
        } else {
            return Ok(pivot);
        }
    }

    let mut rest = Vec::with_capacity(right_total - left_total);
    for i in 0..rows {
        let mut j = left[i];
        while j <= right[i] {
            rest.push(km.at(i, j as usize));
            j += 1;
        }
    }
    // target counts from the largest entry.
    let rank_desc = target - left_total;
    let k = rest.len() - rank_desc;
    select_kth(&mut rest, k, SelectOptions::default())
}
