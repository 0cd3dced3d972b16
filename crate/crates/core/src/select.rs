//! Fixed-pivot in-place selection.
//!
//! The element currently sitting at the target position is used as pivot;
//! everything smaller is swapped to its left, the pivot lands at `position`,
//! and the active window `[left, right]` shrinks towards the target until the
//! pivot lands exactly on it. There is no recursion and no pivot sampling:
//! randomization, when wanted, is one backward shuffle before the first pass.
//!
//! Ranks in the public API are 1-based. Internally everything is 0-based.

use crate::error::{Error, Result};
use crate::rng::MersenneTwister;
use crate::shuffle::backward_shuffle_tracking;

/// Tallies for the comparison sites of the kernel.
///
/// `exit_tests` and `branch_tests` compare cursors, `data_comparisons`
/// compare array content against the pivot, `position_increments` counts how
/// often the partition boundary advanced.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ComparisonBreakdown {
    pub exit_tests: u64,
    pub data_comparisons: u64,
    pub branch_tests: u64,
    pub position_increments: u64,
    /// Increments made during the first pass only.
    pub first_pass_increments: u64,
    pub passes: u64,
}

impl ComparisonBreakdown {
    pub fn total(&self) -> u64 {
        self.exit_tests + self.data_comparisons + self.branch_tests
    }

    pub fn accumulate(&mut self, other: &ComparisonBreakdown) {
        self.exit_tests += other.exit_tests;
        self.data_comparisons += other.data_comparisons;
        self.branch_tests += other.branch_tests;
        self.position_increments += other.position_increments;
        self.first_pass_increments += other.first_pass_increments;
        self.passes += other.passes;
    }
}

/// Counting hooks; the zero-sized [`NoTally`] compiles them away.
pub(crate) trait Tally {
    fn exit_test(&mut self) {}
    fn data_comparison(&mut self) {}
    fn branch_test(&mut self) {}
    fn position_increment(&mut self) {}
    fn end_pass(&mut self) {}
}

pub(crate) struct NoTally;
impl Tally for NoTally {}

impl Tally for ComparisonBreakdown {
    fn exit_test(&mut self) {
        self.exit_tests += 1;
    }
    fn data_comparison(&mut self) {
        self.data_comparisons += 1;
    }
    fn branch_test(&mut self) {
        self.branch_tests += 1;
    }
    fn position_increment(&mut self) {
        self.position_increments += 1;
        if self.passes == 0 {
            self.first_pass_increments += 1;
        }
    }
    fn end_pass(&mut self) {
        self.passes += 1;
    }
}

/// Storage the kernel permutes: anything with an ordered key per row and a
/// row swap. Plain slices and the paired value/weight columns both qualify.
pub(crate) trait RowStore {
    type Key: PartialOrd + Copy;
    fn key(&self, i: usize) -> Self::Key;
    fn swap_rows(&mut self, i: usize, j: usize);
}

impl<T: PartialOrd + Copy> RowStore for [T] {
    type Key = T;
    #[inline]
    fn key(&self, i: usize) -> T {
        self[i]
    }
    #[inline]
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.swap(i, j);
    }
}

/// Cursor snapshot at the top of a pass, 1-based like the public ranks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PivotStatus {
    pub pass: usize,
    pub left: usize,
    pub right: usize,
    pub position: usize,
}

/// One pass: pivot on the row at `k`, gather the strictly smaller rows at the
/// front of `[left, right]` and drop the pivot right after them.
/// Returns the pivot's final index.
#[inline]
pub(crate) fn partition_pass<S, C>(
    rows: &mut S,
    left: usize,
    right: usize,
    k: usize,
    tally: &mut C,
) -> usize
where
    S: RowStore + ?Sized,
    C: Tally,
{
    rows.swap_rows(k, right);
    let pivot = rows.key(right);
    let mut position = left;
    for i in left..=right {
        tally.data_comparison();
        if rows.key(i) < pivot {
            rows.swap_rows(i, position);
            position += 1;
            tally.position_increment();
        }
    }
    rows.swap_rows(position, right);
    position
}

/// Runs passes until the pivot lands on `k`. `left <= k <= right` on entry.
pub(crate) fn select_in_window<S, C>(
    rows: &mut S,
    k: usize,
    mut left: usize,
    mut right: usize,
    tally: &mut C,
) where
    S: RowStore + ?Sized,
    C: Tally,
{
    loop {
        tally.exit_test();
        let position = partition_pass(rows, left, right, k, tally);
        tally.branch_test();
        if position < k {
            left = position + 1;
        } else if position > k {
            right = position - 1;
        }
        tally.end_pass();
        if position == k {
            return;
        }
    }
}

/// Optional pre-steps for a selection call.
#[derive(Debug, Default)]
pub struct SelectOptions<'a> {
    /// 1-based index of an element expected to be at or near the answer; it
    /// is swapped into the target slot before the first pass.
    pub oracle: Option<usize>,
    /// Backward-shuffle the buffer once before selecting. Needs `rng`.
    pub shuffle: bool,
    pub rng: Option<&'a mut MersenneTwister>,
}

impl<'a> SelectOptions<'a> {
    pub fn with_oracle(j: usize) -> Self {
        SelectOptions {
            oracle: Some(j),
            ..Default::default()
        }
    }

    pub fn shuffled(rng: &'a mut MersenneTwister) -> Self {
        SelectOptions {
            oracle: None,
            shuffle: true,
            rng: Some(rng),
        }
    }
}

fn validate<T>(data: &[T], k: usize, opts: &SelectOptions<'_>) -> Result<()> {
    let n = data.len();
    if n == 0 {
        return Err(Error::Empty);
    }
    if k == 0 || k > n {
        return Err(Error::RankOutOfRange { k, n });
    }
    if let Some(j) = opts.oracle {
        if j == 0 || j > n {
            return Err(Error::OracleOutOfRange { j, n });
        }
    }
    if opts.shuffle && opts.rng.is_none() {
        return Err(Error::MissingRng);
    }
    Ok(())
}

fn prepare<T: PartialOrd + Copy>(data: &mut [T], k: usize, opts: SelectOptions<'_>) {
    let mut oracle = opts.oracle.map(|j| j - 1);
    if opts.shuffle {
        let rng = opts.rng.expect("validated");
        let tracked = backward_shuffle_tracking(data, rng, oracle);
        oracle = tracked;
    }
    if let Some(j) = oracle {
        data.swap(j, k - 1);
    }
}

fn run<T, C>(data: &mut [T], k: usize, opts: SelectOptions<'_>, tally: &mut C) -> Result<T>
where
    T: PartialOrd + Copy,
    C: Tally,
{
    validate(data, k, &opts)?;
    prepare(data, k, opts);
    let n = data.len();
    // A singleton is already in place.
    if n > 1 {
        select_in_window(data, k - 1, 0, n - 1, tally);
    }
    Ok(data[k - 1])
}

/// Returns the `k`-th smallest element (1-based) and leaves `data` permuted
/// so that `data[..k-1] <= data[k-1] <= data[k..]`.
pub fn select_kth<T: PartialOrd + Copy>(
    data: &mut [T],
    k: usize,
    opts: SelectOptions<'_>,
) -> Result<T> {
    run(data, k, opts, &mut NoTally)
}

/// [`select_kth`] with a full comparison breakdown.
pub fn select_kth_instrumented<T: PartialOrd + Copy>(
    data: &mut [T],
    k: usize,
    opts: SelectOptions<'_>,
) -> Result<(T, ComparisonBreakdown)> {
    let mut tally = ComparisonBreakdown::default();
    let v = run(data, k, opts, &mut tally)?;
    Ok((v, tally))
}

/// Single partition pass over the 1-based window `[left, right]` pivoting on
/// the element at `k`. Returns the 1-based position where the pivot landed.
pub fn partition_step<T: PartialOrd + Copy>(
    data: &mut [T],
    left: usize,
    right: usize,
    k: usize,
) -> Result<usize> {
    if left == 0 || !(left <= k && k <= right) || right > data.len() {
        return Err(Error::CursorOrder { left, k, right });
    }
    Ok(partition_pass(data, left - 1, right - 1, k - 1, &mut NoTally) + 1)
}

/// Runs a selection and records the cursor status at the top of every pass.
pub fn trace_passes<T: PartialOrd + Copy>(data: &mut [T], k: usize) -> Result<Vec<PivotStatus>> {
    validate(data, k, &SelectOptions::default())?;
    let n = data.len();
    let target = k - 1;
    let (mut left, mut right) = (0usize, n - 1);
    let mut trace = Vec::new();
    loop {
        trace.push(PivotStatus {
            pass: trace.len() + 1,
            left: left + 1,
            right: right + 1,
            position: left + 1,
        });
        let position = partition_pass(data, left, right, target, &mut NoTally);
        if position < target {
            left = position + 1;
        } else if position > target {
            right = position - 1;
        } else {
            return Ok(trace);
        }
    }
}

/// A buffer paired with its target rank, for callers that select repeatedly
/// on the same data.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectBuffer<T> {
    data: Vec<T>,
    k: usize,
}

impl<T: PartialOrd + Copy> SelectBuffer<T> {
    pub fn new(data: Vec<T>, k: usize) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Empty);
        }
        if k == 0 || k > data.len() {
            return Err(Error::RankOutOfRange { k, n: data.len() });
        }
        Ok(SelectBuffer { data, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn set_k(&mut self, k: usize) -> Result<()> {
        if k == 0 || k > self.data.len() {
            return Err(Error::RankOutOfRange {
                k,
                n: self.data.len(),
            });
        }
        self.k = k;
        Ok(())
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_inner(self) -> Vec<T> {
        self.data
    }

    pub fn select(&mut self, opts: SelectOptions<'_>) -> Result<T> {
        select_kth(&mut self.data, self.k, opts)
    }

    pub fn select_instrumented(&mut self, opts: SelectOptions<'_>) -> Result<(T, ComparisonBreakdown)> {
        select_kth_instrumented(&mut self.data, self.k, opts)
    }
}

/// Adversarial input `[2, 3, ..., n, 1]`: searching its maximum costs
/// `(n^2 + 5n) / 2` comparisons.
pub fn worst_case_input(n: usize) -> Vec<f64> {
    (2..=n).chain(std::iter::once(1)).map(|v| v as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_partitioned<T: PartialOrd>(d: &[T], k: usize) -> bool {
        let p = &d[k - 1];
        d[..k - 1].iter().all(|x| x <= p) && d[k..].iter().all(|x| x >= p)
    }

    #[test]
    fn worst_case_nine() {
        let mut a = worst_case_input(9);
        assert_eq!(a, vec![2., 3., 4., 5., 6., 7., 8., 9., 1.]);
        let (v, c) = select_kth_instrumented(&mut a, 9, SelectOptions::default()).unwrap();
        assert_eq!(v, 9.0);
        assert_eq!(c.total(), 63);
        assert_eq!(c.data_comparisons, 45);
        assert_eq!(c.exit_tests, 9);
        assert_eq!(c.branch_tests, 9);
        assert_eq!(c.position_increments, 0);
    }

    #[test]
    fn worst_case_trace_advances_left_by_one() {
        let mut a = worst_case_input(9);
        let trace = trace_passes(&mut a, 9).unwrap();
        assert_eq!(trace.len(), 9);
        for (t, s) in trace.iter().enumerate() {
            assert_eq!((s.pass, s.left, s.right), (t + 1, t + 1, 9));
        }
    }

    #[test]
    fn singleton() {
        let mut a = [4.5];
        let (v, c) = select_kth_instrumented(&mut a, 1, SelectOptions::default()).unwrap();
        assert_eq!(v, 4.5);
        assert_eq!(c.data_comparisons, 0);
    }

    #[test]
    fn errors() {
        let mut e: [f64; 0] = [];
        assert_eq!(select_kth(&mut e, 1, SelectOptions::default()), Err(Error::Empty));
        let mut a = [1, 2, 3];
        assert_eq!(
            select_kth(&mut a, 0, SelectOptions::default()),
            Err(Error::RankOutOfRange { k: 0, n: 3 })
        );
        assert_eq!(
            select_kth(&mut a, 4, SelectOptions::default()),
            Err(Error::RankOutOfRange { k: 4, n: 3 })
        );
        assert_eq!(
            select_kth(&mut a, 2, SelectOptions::with_oracle(9)),
            Err(Error::OracleOutOfRange { j: 9, n: 3 })
        );
        let opts = SelectOptions {
            shuffle: true,
            ..Default::default()
        };
        assert_eq!(select_kth(&mut a, 2, opts), Err(Error::MissingRng));
    }

    #[test]
    fn partition_step_hand_trace() {
        let mut a = [5, 1, 4];
        assert_eq!(partition_step(&mut a, 1, 3, 2).unwrap(), 1);
        assert_eq!(a[0], 1);
    }

    #[test]
    fn partition_step_all_equal() {
        let mut a = [7; 6];
        assert_eq!(partition_step(&mut a, 2, 5, 3).unwrap(), 2);
    }

    #[test]
    fn partition_step_already_partitioned() {
        let mut a = [1, 2, 3, 4, 5, 6, 7];
        assert_eq!(partition_step(&mut a, 1, 7, 4).unwrap(), 4);
        assert_eq!(a, [1, 2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn partition_step_cursor_errors() {
        let mut a = [1, 2, 3];
        assert!(partition_step(&mut a, 2, 3, 1).is_err());
        assert!(partition_step(&mut a, 0, 3, 1).is_err());
        assert!(partition_step(&mut a, 1, 4, 2).is_err());
    }

    #[test]
    fn oracle_equal_to_k_is_noop() {
        let mut a = [3, 1, 2];
        let mut b = a;
        let va = select_kth(&mut a, 2, SelectOptions::with_oracle(2)).unwrap();
        let vb = select_kth(&mut b, 2, SelectOptions::default()).unwrap();
        assert_eq!((va, a), (vb, b));
    }

    #[test]
    fn duplicates() {
        let mut a = [3, 3, 1, 3, 2, 3, 1];
        for k in 1..=a.len() {
            let mut s = a.to_vec();
            s.sort();
            let v = select_kth(&mut a, k, SelectOptions::default()).unwrap();
            assert_eq!(v, s[k - 1]);
            assert!(is_partitioned(&a, k));
        }
    }

    #[test]
    fn shuffle_keeps_result_and_oracle_target() {
        let mut rng = MersenneTwister::new(11);
        let base: Vec<i32> = (0..50).map(|i| (i * 37) % 50).collect();
        for k in [1, 17, 50] {
            let mut a = base.clone();
            let opts = SelectOptions {
                oracle: Some(3),
                shuffle: true,
                rng: Some(&mut rng),
            };
            assert_eq!(select_kth(&mut a, k, opts).unwrap(), k as i32 - 1);
            assert!(is_partitioned(&a, k));
        }
    }

    #[test]
    fn buffer_wrapper() {
        let mut b = SelectBuffer::new(vec![9, 8, 7, 6], 2).unwrap();
        assert_eq!(b.select(SelectOptions::default()).unwrap(), 7);
        b.set_k(4).unwrap();
        assert_eq!(b.select(SelectOptions::default()).unwrap(), 9);
        assert!(b.set_k(5).is_err());
        assert!(SelectBuffer::<i32>::new(vec![], 1).is_err());
    }
}
