//! Concentration steps of the minimum covariance determinant estimator and
//! the Forward Search progression, with a pluggable subset update.
//!
//! Both algorithms repeatedly need "the m units with the smallest squared
//! Mahalanobis distances". The update can sort all distances, select the
//! m-th one, or select it after swapping a hinted index into place. Ties at
//! the threshold are broken by unit index, so all three backends return the
//! same subset; only the comparison counts differ.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::rng::MersenneTwister;
use crate::select::{select_kth_instrumented, ComparisonBreakdown, SelectOptions};

const MAX_CONDITION: f64 = 1e12;
const MAX_CSTEPS: usize = 100;
const CONVERGENCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UpdateBackend {
    Sort,
    Select,
    SelectOracle,
}

impl UpdateBackend {
    pub const ALL: [UpdateBackend; 3] = [
        UpdateBackend::Sort,
        UpdateBackend::Select,
        UpdateBackend::SelectOracle,
    ];
}

/// Location and scatter fitted on a subset of the rows of the data.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipsoidEstimate {
    pub mu: DVector<f64>,
    pub sigma: DMatrix<f64>,
    pub det: f64,
    pub log_det: f64,
    /// Row indices, ascending.
    pub subset: Vec<usize>,
    sigma_inv: DMatrix<f64>,
}

impl EllipsoidEstimate {
    /// Mean and covariance (divisor `h - 1`) of the rows in `subset`.
    pub fn fit(x: &DMatrix<f64>, subset: &[usize]) -> Result<Self> {
        let p = x.ncols();
        let h = subset.len();
        if h < p + 1 {
            return Err(Error::TooFewObservations { needed: p + 1, got: h });
        }
        let mut mu = DVector::zeros(p);
        for &i in subset {
            mu += x.row(i).transpose();
        }
        mu /= h as f64;
        let mut sigma = DMatrix::zeros(p, p);
        for &i in subset {
            let d = x.row(i).transpose() - &mu;
            sigma += &d * d.transpose();
        }
        sigma /= (h - 1) as f64;
        let mut subset = subset.to_vec();
        subset.sort_unstable();
        Self::from_parts(mu, sigma, subset)
    }

    fn from_parts(mu: DVector<f64>, sigma: DMatrix<f64>, subset: Vec<usize>) -> Result<Self> {
        let eig = sigma.clone().symmetric_eigenvalues();
        let (lo, hi) = (eig.min(), eig.max());
        if !(lo > 0.0) || hi / lo > MAX_CONDITION {
            return Err(Error::SingularCovariance(if lo > 0.0 { hi / lo } else { f64::INFINITY }));
        }
        let chol = sigma
            .clone()
            .cholesky()
            .ok_or(Error::SingularCovariance(f64::INFINITY))?;
        let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>();
        let sigma_inv = chol.inverse();
        Ok(EllipsoidEstimate {
            mu,
            det: log_det.exp(),
            log_det,
            sigma,
            subset,
            sigma_inv,
        })
    }

    /// Same fit with `ridge * trace / p` added to the diagonal.
    fn fit_ridged(x: &DMatrix<f64>, subset: &[usize], ridge: f64) -> Result<Self> {
        let p = x.ncols();
        let h = subset.len();
        let mut mu = DVector::zeros(p);
        for &i in subset {
            mu += x.row(i).transpose();
        }
        mu /= h as f64;
        let mut sigma = DMatrix::zeros(p, p);
        for &i in subset {
            let d = x.row(i).transpose() - &mu;
            sigma += &d * d.transpose();
        }
        sigma /= (h.max(2) - 1) as f64;
        let bump = ridge * sigma.trace().max(f64::MIN_POSITIVE);
        for j in 0..p {
            sigma[(j, j)] += bump;
        }
        let mut subset = subset.to_vec();
        subset.sort_unstable();
        Self::from_parts(mu, sigma, subset)
    }
}

/// Squared Mahalanobis distances of every row of `x` from `est`.
pub fn mahalanobis_sq(x: &DMatrix<f64>, est: &EllipsoidEstimate) -> Vec<f64> {
    (0..x.nrows())
        .map(|i| {
            let d = x.row(i).transpose() - &est.mu;
            (d.transpose() * &est.sigma_inv * &d)[(0, 0)].max(0.0)
        })
        .collect()
}

/// Indices of the `m` smallest distances (ties by index), ascending.
///
/// `hint` is the 0-based oracle index, used only by `SelectOracle`.
pub fn smallest_subset(
    d: &[f64],
    m: usize,
    backend: UpdateBackend,
    hint: Option<usize>,
    counts: &mut ComparisonBreakdown,
) -> Result<Vec<usize>> {
    let n = d.len();
    if m == 0 || m > n {
        return Err(Error::RankOutOfRange { k: m, n });
    }
    let mut subset = match backend {
        UpdateBackend::Sort => {
            let mut order: Vec<usize> = (0..n).collect();
            let mut cmps = 0u64;
            order.sort_by(|&a, &b| {
                cmps += 1;
                d[a].total_cmp(&d[b]).then(a.cmp(&b))
            });
            counts.data_comparisons += cmps;
            order.truncate(m);
            order
        }
        UpdateBackend::Select | UpdateBackend::SelectOracle => {
            let opts = match (backend, hint) {
                (UpdateBackend::SelectOracle, Some(j)) => SelectOptions::with_oracle(j + 1),
                _ => SelectOptions::default(),
            };
            let mut work = d.to_vec();
            let (threshold, c) = select_kth_instrumented(&mut work, m, opts)?;
            counts.accumulate(&c);
            let mut out: Vec<usize> = (0..n).filter(|&i| d[i] < threshold).collect();
            let room = m - out.len();
            out.extend((0..n).filter(|&i| d[i] == threshold).take(room));
            out
        }
    };
    subset.sort_unstable();
    Ok(subset)
}

/// One concentration step: refit on the `h` units closest to `est`.
///
/// The oracle backend hints a uniformly drawn unit outside the current
/// subset, drawn from `hint_rng`; the other backends leave it untouched.
pub fn cstep(
    x: &DMatrix<f64>,
    est: &EllipsoidEstimate,
    h: usize,
    backend: UpdateBackend,
    hint_rng: &mut MersenneTwister,
    counts: &mut ComparisonBreakdown,
) -> Result<EllipsoidEstimate> {
    let n = x.nrows();
    if h < x.ncols() + 1 || h > n {
        return Err(Error::InvalidParameter(format!("h = {h} out of range for n = {n}")));
    }
    let d = mahalanobis_sq(x, est);
    let hint = if backend == UpdateBackend::SelectOracle {
        let outside: Vec<usize> = (0..n).filter(|i| est.subset.binary_search(i).is_err()).collect();
        if outside.is_empty() {
            None
        } else {
            Some(outside[hint_rng.uniform_int(outside.len())? - 1])
        }
    } else {
        None
    };
    let subset = smallest_subset(&d, h, backend, hint, counts)?;
    EllipsoidEstimate::fit(x, &subset)
}

/// Default coverage `floor((n + p + 1) / 2)`.
pub fn default_h(n: usize, p: usize) -> usize {
    (n + p).div_ceil(2)
}

/// Outcome of the randomized MCD search.
#[derive(Debug, Clone)]
pub struct McdFit {
    pub best: EllipsoidEstimate,
    /// Log-determinant after each C-step, one path per non-singular start.
    pub log_det_paths: Vec<Vec<f64>>,
    pub counts: ComparisonBreakdown,
    pub subset_updates: usize,
}

/// Iterates C-steps from `start` until the determinant settles.
pub fn concentrate(
    x: &DMatrix<f64>,
    start: EllipsoidEstimate,
    h: usize,
    backend: UpdateBackend,
    hint_rng: &mut MersenneTwister,
    counts: &mut ComparisonBreakdown,
) -> Result<(EllipsoidEstimate, Vec<f64>, usize)> {
    let mut est = start;
    let mut path = Vec::new();
    let mut updates = 0;
    for _ in 0..MAX_CSTEPS {
        let next = cstep(x, &est, h, backend, hint_rng, counts)?;
        updates += 1;
        path.push(next.log_det);
        let settled = next.subset == est.subset || (est.log_det - next.log_det).abs() < CONVERGENCE_TOL;
        est = next;
        if settled {
            break;
        }
    }
    Ok((est, path, updates))
}

/// Approximate MCD: `n_starts` random `(p+1)`-subsets, each concentrated to
/// convergence; the fit with the smallest determinant wins.
///
/// Starts are drawn from `rng`. Oracle hints come from a separate stream
/// seeded from `rng` once, so every backend sees the same starts.
pub fn mcd_approx(
    x: &DMatrix<f64>,
    h: usize,
    n_starts: usize,
    rng: &mut MersenneTwister,
    backend: UpdateBackend,
) -> Result<McdFit> {
    let (n, p) = (x.nrows(), x.ncols());
    if n_starts == 0 {
        return Err(Error::InvalidParameter("need at least one start".into()));
    }
    if h < p + 1 || h > n {
        return Err(Error::InvalidParameter(format!("h = {h} out of range for n = {n}")));
    }
    let mut hint_rng = MersenneTwister::new(rng.next_u32());
    let mut counts = ComparisonBreakdown::default();
    let mut best: Option<EllipsoidEstimate> = None;
    let mut paths = Vec::new();
    let mut updates = 0;
    let mut last_err = None;
    for _ in 0..n_starts {
        let start = match random_start(x, h, rng) {
            Ok(s) => s,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        match concentrate(x, start, h, backend, &mut hint_rng, &mut counts) {
            Ok((est, path, u)) => {
                updates += u;
                paths.push(path);
                if best.as_ref().is_none_or(|b| est.log_det < b.log_det) {
                    best = Some(est);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    match best {
        Some(best) => Ok(McdFit {
            best,
            log_det_paths: paths,
            counts,
            subset_updates: updates,
        }),
        None => Err(last_err.unwrap_or(Error::SingularCovariance(f64::INFINITY))),
    }
}

/// Random `(p+1)`-subset, grown one random unit at a time while singular.
fn random_start(x: &DMatrix<f64>, h: usize, rng: &mut MersenneTwister) -> Result<EllipsoidEstimate> {
    let (n, p) = (x.nrows(), x.ncols());
    let mut pool: Vec<usize> = (0..n).collect();
    // partial backward shuffle: the tail holds the draws
    let mut drawn = 0;
    let mut draw = |pool: &mut Vec<usize>, drawn: &mut usize| -> Result<()> {
        let i = n - 1 - *drawn;
        let j = rng.uniform_int(i + 1)? - 1;
        pool.swap(i, j);
        *drawn += 1;
        Ok(())
    };
    for _ in 0..=p {
        draw(&mut pool, &mut drawn)?;
    }
    loop {
        match EllipsoidEstimate::fit(x, &pool[n - drawn..]) {
            Ok(est) => return Ok(est),
            Err(e) if drawn >= h => return Err(e),
            Err(_) => draw(&mut pool, &mut drawn)?,
        }
    }
}

/// Snapshot of the Forward Search at subset size `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct FsState {
    pub m: usize,
    /// Unit indices, ascending.
    pub subset: Vec<usize>,
    /// Closest unit outside the subset under the fit at this step.
    pub min_out_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FsStep {
    pub state: FsState,
    /// Comparisons spent building this step's subset.
    pub counts: ComparisonBreakdown,
    /// Units of the previous subset that left (interchange).
    pub left_units: usize,
    /// The fit needed a ridge to stay invertible.
    pub ridged: bool,
}

/// Robust start: the `m0` units closest to the coordinate-wise median in
/// Euclidean distance, ties by index.
pub fn fs_initial_subset(x: &DMatrix<f64>, m0: usize) -> Result<Vec<usize>> {
    let (n, p) = (x.nrows(), x.ncols());
    if m0 < p + 1 || m0 > n {
        return Err(Error::InvalidParameter(format!("m0 = {m0} out of range for n = {n}, p = {p}")));
    }
    let med: Vec<f64> = (0..p)
        .map(|j| crate::medcouple::sample_median(x.column(j).as_slice()))
        .collect::<Result<_>>()?;
    let d: Vec<f64> = (0..n)
        .map(|i| (0..p).map(|j| (x[(i, j)] - med[j]).powi(2)).sum())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
    order.truncate(m0);
    order.sort_unstable();
    Ok(order)
}

/// Runs the Forward Search from size `m0` to `n`, one state per size.
///
/// At size `m` the fit on the current subset ranks all units and the `m + 1`
/// closest form the next subset. The oracle backend hints the closest unit
/// outside the current subset.
pub fn fs_progression(x: &DMatrix<f64>, m0: usize, backend: UpdateBackend) -> Result<Vec<FsStep>> {
    let n = x.nrows();
    let mut subset = fs_initial_subset(x, m0)?;
    let mut steps = Vec::with_capacity(n - m0 + 1);
    let mut counts = ComparisonBreakdown::default();
    let mut left_units = 0;
    let mut ridged = false;
    for m in m0..=n {
        let mut min_out = None;
        let mut next = None;
        if m < n {
            let est = match EllipsoidEstimate::fit(x, &subset) {
                Ok(e) => e,
                Err(Error::SingularCovariance(_)) => {
                    ridged = true;
                    EllipsoidEstimate::fit_ridged(x, &subset, 1e-8)?
                }
                Err(e) => return Err(e),
            };
            let d = mahalanobis_sq(x, &est);
            min_out = (0..n)
                .filter(|i| subset.binary_search(i).is_err())
                .min_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
            let mut c = ComparisonBreakdown::default();
            next = Some((smallest_subset(&d, m + 1, backend, min_out, &mut c)?, c));
        }
        steps.push(FsStep {
            state: FsState {
                m,
                subset: subset.clone(),
                min_out_index: min_out,
            },
            counts,
            left_units,
            ridged,
        });
        if let Some((s, c)) = next {
            left_units = subset.iter().filter(|i| s.binary_search(i).is_err()).count();
            counts = c;
            ridged = false;
            subset = s;
        }
    }
    Ok(steps)
}

/// Bivariate-style test data: `n` standard normal rows in `p` columns, the
/// first `round(contamination * n)` of them shifted by `shift` in every
/// coordinate.
pub fn contaminated_normal(
    n: usize,
    p: usize,
    contamination: f64,
    shift: f64,
    rng: &mut MersenneTwister,
) -> Result<DMatrix<f64>> {
    if !(0.0..=1.0).contains(&contamination) {
        return Err(Error::InvalidParameter(format!("contamination {contamination} outside [0, 1]")));
    }
    let bad = (contamination * n as f64).round() as usize;
    let mut x = DMatrix::zeros(n, p);
    for i in 0..n {
        for j in 0..p {
            x[(i, j)] = rng.next_normal() + if i < bad { shift } else { 0.0 };
        }
    }
    Ok(x)
}
