//! Comparison-count benchmark: draw samples, select, tabulate.

use std::io::{self, Write};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::rng::MersenneTwister;
use crate::select::{select_kth_instrumented, ComparisonBreakdown, SelectOptions};
use crate::vervaat::dickman_cdf;

pub const CSV_HEADER: &str = "n,k,rep,exit,data,branch,incr,total";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dist {
    Uniform,
    BirnbaumSaunders { shape: f64, scale: f64 },
    LogNormal { mu: f64, sigma: f64 },
}

impl Dist {
    pub fn birnbaum_saunders(shape: f64) -> Self {
        Dist::BirnbaumSaunders { shape, scale: 1.0 }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Dist::Uniform => Ok(()),
            Dist::BirnbaumSaunders { shape, scale } if shape > 0.0 && scale > 0.0 => Ok(()),
            Dist::LogNormal { mu, sigma } if mu.is_finite() && sigma > 0.0 => Ok(()),
            other => Err(Error::InvalidParameter(format!("bad distribution {other:?}"))),
        }
    }
}

/// `n` independent draws from `dist`.
pub fn sample(dist: Dist, n: usize, rng: &mut MersenneTwister) -> Result<Vec<f64>> {
    dist.validate()?;
    Ok(match dist {
        Dist::Uniform => (0..n).map(|_| rng.next_uniform()).collect(),
        Dist::BirnbaumSaunders { shape, scale } => (0..n)
            .map(|_| {
                let t = shape * rng.next_normal() / 2.0;
                let root = t + (t * t + 1.0).sqrt();
                scale * root * root
            })
            .collect(),
        Dist::LogNormal { mu, sigma } => (0..n).map(|_| (mu + sigma * rng.next_normal()).exp()).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankSpec {
    Index(usize),
    Median,
    Max,
    Min,
}

impl RankSpec {
    pub fn resolve(self, n: usize) -> Result<usize> {
        let k = match self {
            RankSpec::Index(k) => k,
            RankSpec::Median => n.div_ceil(2),
            RankSpec::Max => n,
            RankSpec::Min => 1,
        };
        if k == 0 || k > n {
            return Err(Error::RankOutOfRange { k, n });
        }
        Ok(k)
    }
}

impl std::str::FromStr for RankSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "median" => Ok(RankSpec::Median),
            "max" => Ok(RankSpec::Max),
            "min" => Ok(RankSpec::Min),
            _ => s
                .parse()
                .map(RankSpec::Index)
                .map_err(|_| Error::InvalidParameter(format!("bad rank {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Select,
    /// Hint is the position of the true order statistic, located by a sort
    /// that is not counted: a best-case bound for any oracle.
    SelectOracle,
    /// Comparisons of a full comparison sort, reported in `data` and `total`.
    SortBaseline,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub dist: Dist,
    pub n_set: Vec<usize>,
    pub k_set: Vec<RankSpec>,
    pub replicates: usize,
    pub seed: u32,
    pub variant: Variant,
    /// Record wall-clock nanoseconds per run (never compared anywhere).
    pub timing: bool,
}

impl BenchConfig {
    pub fn new(dist: Dist, n_set: Vec<usize>, k_set: Vec<RankSpec>, replicates: usize, seed: u32) -> Self {
        BenchConfig {
            dist,
            n_set,
            k_set,
            replicates,
            seed,
            variant: Variant::Select,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchRow {
    pub n: usize,
    pub k: usize,
    pub replicate: usize,
    pub exit_tests: u64,
    pub data_comparisons: u64,
    pub branch_tests: u64,
    pub position_increments: u64,
    pub total: u64,
    pub first_pass_increments: u64,
    pub nanos: Option<u64>,
}

impl BenchRow {
    fn from_counts(n: usize, k: usize, replicate: usize, c: &ComparisonBreakdown, nanos: Option<u64>) -> Self {
        BenchRow {
            n,
            k,
            replicate,
            exit_tests: c.exit_tests,
            data_comparisons: c.data_comparisons,
            branch_tests: c.branch_tests,
            position_increments: c.position_increments,
            total: c.total(),
            first_pass_increments: c.first_pass_increments,
            nanos,
        }
    }
}

/// Seed of replicate `rep` in group `group`: the base seed plus a fixed
/// offset, wrapping.
pub fn replicate_seed(base: u32, group: usize, replicates: usize, rep: usize) -> u32 {
    base.wrapping_add((group * replicates + rep) as u32)
}

/// Runs every (n, k, replicate) combination in that order.
pub fn bench_run(config: &BenchConfig) -> Result<Vec<BenchRow>> {
    config.dist.validate()?;
    if let Some(&n) = config.n_set.iter().find(|&&n| n == 0) {
        return Err(Error::InvalidParameter(format!("sample size {n}")));
    }
    let mut rows = Vec::with_capacity(config.n_set.len() * config.k_set.len() * config.replicates);
    let mut group = 0;
    for &n in &config.n_set {
        for &spec in &config.k_set {
            let k = spec.resolve(n)?;
            for rep in 0..config.replicates {
                let mut rng = MersenneTwister::new(replicate_seed(config.seed, group, config.replicates, rep));
                let mut a = sample(config.dist, n, &mut rng)?;
                rows.push(run_one(&mut a, k, rep, config)?);
            }
            group += 1;
        }
    }
    Ok(rows)
}

fn run_one(a: &mut [f64], k: usize, rep: usize, config: &BenchConfig) -> Result<BenchRow> {
    let n = a.len();
    let clock = config.timing.then(Instant::now);
    let counts = match config.variant {
        Variant::Select => select_kth_instrumented(a, k, SelectOptions::default())?.1,
        Variant::SelectOracle => {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&x, &y| a[x].total_cmp(&a[y]));
            let hint = order[k - 1] + 1;
            let clock = config.timing.then(Instant::now);
            let c = select_kth_instrumented(a, k, SelectOptions::with_oracle(hint))?.1;
            let nanos = clock.map(|t| t.elapsed().as_nanos() as u64);
            return Ok(BenchRow::from_counts(n, k, rep, &c, nanos));
        }
        Variant::SortBaseline => {
            let mut cmps = 0u64;
            a.sort_by(|x, y| {
                cmps += 1;
                x.total_cmp(y)
            });
            ComparisonBreakdown {
                data_comparisons: cmps,
                ..Default::default()
            }
        }
    };
    let nanos = clock.map(|t| t.elapsed().as_nanos() as u64);
    Ok(BenchRow::from_counts(n, k, rep, &counts, nanos))
}

/// Raw rows as CSV; a trailing `nanos` column is added when `timing`.
pub fn write_csv<W: Write>(rows: &[BenchRow], timing: bool, mut out: W) -> io::Result<()> {
    write!(out, "{CSV_HEADER}")?;
    if timing {
        write!(out, ",nanos")?;
    }
    writeln!(out)?;
    for r in rows {
        write!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.n, r.k, r.replicate, r.exit_tests, r.data_comparisons, r.branch_tests, r.position_increments, r.total
        )?;
        if timing {
            write!(out, ",{}", r.nanos.unwrap_or(0))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// min / mean / median / max of the totals of one (n, k) group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupStats {
    pub n: usize,
    pub k: usize,
    pub count: usize,
    pub min: u64,
    pub mean: f64,
    pub median: f64,
    pub max: u64,
}

/// Groups consecutive rows sharing (n, k).
pub fn group_stats(rows: &[BenchRow]) -> Vec<GroupStats> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < rows.len() {
        let (n, k) = (rows[start].n, rows[start].k);
        let mut end = start;
        while end < rows.len() && rows[end].n == n && rows[end].k == k {
            end += 1;
        }
        let mut totals: Vec<u64> = rows[start..end].iter().map(|r| r.total).collect();
        totals.sort_unstable();
        let m = totals.len();
        let median = if m % 2 == 1 {
            totals[m / 2] as f64
        } else {
            (totals[m / 2 - 1] + totals[m / 2]) as f64 / 2.0
        };
        out.push(GroupStats {
            n,
            k,
            count: m,
            min: totals[0],
            mean: totals.iter().sum::<u64>() as f64 / m as f64,
            median,
            max: totals[m - 1],
        });
        start = end;
    }
    out
}

pub fn write_summary_csv<W: Write>(stats: &[GroupStats], mut out: W) -> io::Result<()> {
    writeln!(out, "n,k,count,min,mean,median,max")?;
    for s in stats {
        writeln!(out, "{},{},{},{},{},{},{}", s.n, s.k, s.count, s.min, s.mean, s.median, s.max)?;
    }
    Ok(())
}

/// Kolmogorov-Smirnov distance between the sample and `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty);
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// KS distance of `total / n - 1` to the Dickman distribution.
pub fn dickman_fit(totals: &[u64], n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let xs: Vec<f64> = totals.iter().map(|&t| t as f64 / n as f64 - 1.0).collect();
    ks_statistic(&xs, |x| if x > 0.0 { dickman_cdf(&[x]).expect("positive")[0] } else { 0.0 })
}
