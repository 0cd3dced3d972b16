mod num;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use simplesel::harness::{group_stats, write_csv, write_summary_csv};
use simplesel::robust::{contaminated_normal, default_h};
use simplesel::{
    add_salt_pepper, bench_run, fs_progression, mcd_approx, medcouple_fast, medcouple_naive, read_pnm,
    select_kth_instrumented, vervaat_pdf_cdf, vervaat_rnd, weighted_median_filter, weighted_percentile,
    write_pnm, BenchConfig, ComparisonBreakdown, Dist, Mask3, MersenneTwister, RankSpec, SelectOptions,
    UpdateBackend, Variant, VervaatParams, WeightedSample,
};

use num::{g17, read_values};

#[derive(Parser)]
#[command(name = "simplesel", version, about = "Fixed-pivot selection and the estimators built on it")]
struct Cli {
    /// Seed for every random stream the command uses.
    #[arg(long, global = true, allow_hyphen_values = true)]
    seed: Option<i64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Comma or whitespace separated numbers; read from --input or stdin if absent.
    #[arg(long, allow_hyphen_values = true)]
    values: Option<String>,
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// k-th smallest value of the input.
    Select {
        /// 1-based rank, or median, min, max.
        #[arg(long, default_value = "median")]
        k: RankSpec,
        /// 1-based index moved to the target slot first.
        #[arg(long)]
        oracle: Option<usize>,
        /// Shuffle the input before selecting.
        #[arg(long)]
        shuffle: bool,
        /// Also print the comparison breakdown.
        #[arg(long)]
        counts: bool,
        #[command(flatten)]
        input: Input,
    },
    /// Weighted percentile of value,weight pairs.
    Wselect {
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long)]
        weights: String,
    },
    /// Medcouple of the input.
    Medcouple {
        #[arg(long, value_enum, default_value_t = McMethod::Fast)]
        method: McMethod,
        #[command(flatten)]
        input: Input,
    },
    /// Vervaat density, distribution function or variates.
    Vervaat {
        #[arg(value_enum)]
        what: VervaatWhat,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        beta: f64,
        /// Evaluation points for pdf and cdf.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Use the truncated series with this many terms instead of the exact evaluator.
        #[arg(long)]
        series_terms: Option<usize>,
        /// Stopping threshold of the sampler product.
        #[arg(long, default_value_t = 1e-12)]
        eps: f64,
    },
    /// Mersenne Twister output.
    Rng {
        #[arg(long, value_enum, default_value_t = RngMode::Classic)]
        mode: RngMode,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// unif, norm or int:N.
        #[arg(long, default_value = "unif")]
        dist: RngDist,
    },
    /// MCD or Forward Search on contaminated normal data.
    Robust {
        #[arg(value_enum)]
        method: RobustMethod,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        p: usize,
        #[arg(long, default_value_t = 0.0)]
        contamination: f64,
        /// Offset of the contaminated rows in every coordinate.
        #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
        shift: f64,
        #[arg(long, value_enum, default_value_t = BackendArg::Select)]
        backend: BackendArg,
        #[arg(long, default_value_t = 1)]
        replicates: usize,
        /// Random starts per MCD fit.
        #[arg(long, default_value_t = 20)]
        starts: usize,
        /// Initial Forward Search subset size; defaults to p + 1.
        #[arg(long)]
        m0: Option<usize>,
        /// CSV destination; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// 3x3 weighted median filter of a PNM image.
    Filter {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Salt-and-pepper probability applied before filtering.
        #[arg(long)]
        noise: Option<f64>,
        /// Nine mask weights, row by row.
        #[arg(long, value_parser = parse_mask)]
        mask: Option<Mask3>,
    },
    /// Comparison counts of repeated selections.
    Bench {
        #[arg(long, value_enum, default_value_t = DistArg::Uniform)]
        dist: DistArg,
        /// Birnbaum-Saunders shape.
        #[arg(long, default_value_t = 0.5)]
        shape: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Comma separated sizes; may be empty.
        #[arg(long, default_value = "1000", value_parser = parse_sizes)]
        n: Sizes,
        #[arg(long, value_delimiter = ',', default_value = "max")]
        k: Vec<RankSpec>,
        #[arg(long, default_value_t = 100)]
        replicates: usize,
        #[arg(long, value_enum, default_value_t = VariantArg::Select)]
        variant: VariantArg,
        /// Add a wall-clock nanos column.
        #[arg(long)]
        timing: bool,
        /// Raw rows destination; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Grouped min/mean/median/max destination.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum McMethod {
    Fast,
    Naive,
}

#[derive(Clone, Copy, ValueEnum)]
enum VervaatWhat {
    Pdf,
    Cdf,
    Rnd,
}

#[derive(Clone, Copy, ValueEnum)]
enum RngMode {
    Classic,
    R,
}

#[derive(Clone, Copy)]
enum RngDist {
    Unif,
    Norm,
    Int(usize),
}

impl FromStr for RngDist {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "unif" => Ok(RngDist::Unif),
            "norm" => Ok(RngDist::Norm),
            _ => match s.strip_prefix("int:").map(str::parse::<usize>) {
                Some(Ok(n)) if n > 0 => Ok(RngDist::Int(n)),
                _ => Err(format!("expected unif, norm or int:N with N >= 1, got {s:?}")),
            },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RobustMethod {
    Mcd,
    Fs,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Sort,
    Select,
    SelectOracle,
}

impl From<BackendArg> for UpdateBackend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Sort => UpdateBackend::Sort,
            BackendArg::Select => UpdateBackend::Select,
            BackendArg::SelectOracle => UpdateBackend::SelectOracle,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DistArg {
    Uniform,
    Bs,
    Lognormal,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Select,
    SelectOracle,
    Sort,
}

#[derive(Clone)]
struct Sizes(Vec<usize>);

fn parse_sizes(s: &str) -> std::result::Result<Sizes, String> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<std::result::Result<_, _>>()
        .map(Sizes)
}

fn parse_mask(s: &str) -> std::result::Result<Mask3, String> {
    let w = num::parse_list(s).map_err(|e| e.to_string())?;
    let w: [f64; 9] = w.try_into().map_err(|v: Vec<f64>| format!("mask needs 9 weights, got {}", v.len()))?;
    Mask3::new(w).map_err(|e| e.to_string())
}

fn seed_u32(seed: Option<i64>) -> Result<u32> {
    let s = seed.unwrap_or(5489);
    u32::try_from(s).with_context(|| format!("seed {s} outside 0..=4294967295"))
}

fn sink(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn counts_csv(c: &ComparisonBreakdown) -> String {
    format!(
        "{},{},{},{},{}",
        c.exit_tests,
        c.data_comparisons,
        c.branch_tests,
        c.position_increments,
        c.total()
    )
}

fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed;
    let mut out = BufWriter::new(io::stdout().lock());
    match cli.command {
        Command::Select { k, oracle, shuffle, counts, input } => {
            let mut v = read_values(input.values.as_deref(), input.input.as_deref())?;
            let k = k.resolve(v.len())?;
            let mut rng = MersenneTwister::new(seed_u32(seed)?);
            let opts = SelectOptions {
                oracle,
                shuffle,
                rng: shuffle.then_some(&mut rng),
            };
            let (x, c) = select_kth_instrumented(&mut v, k, opts)?;
            writeln!(out, "{}", g17(x))?;
            if counts {
                writeln!(out, "exit,data,branch,incr,total")?;
                writeln!(out, "{}", counts_csv(&c))?;
            }
        }
        Command::Wselect { p, values, weights } => {
            let v = num::parse_list(&values)?;
            let w = num::parse_list(&weights)?;
            let mut s = WeightedSample::new(v, w, p)?;
            let r = weighted_percentile(&mut s)?;
            writeln!(out, "{}", g17(r.value))?;
            writeln!(out, "kstar {}", r.kstar)?;
        }
        Command::Medcouple { method, input } => {
            let v = read_values(input.values.as_deref(), input.input.as_deref())?;
            let mc = match method {
                McMethod::Fast => medcouple_fast(&v)?,
                McMethod::Naive => medcouple_naive(&v)?,
            };
            writeln!(out, "{}", g17(mc))?;
        }
        Command::Vervaat { what, beta, x, count, series_terms, eps } => {
            let params = match series_terms {
                Some(t) => VervaatParams::series(beta, t)?,
                None => VervaatParams::new(beta)?,
            };
            let values = match what {
                VervaatWhat::Rnd => {
                    let mut rng = MersenneTwister::new(seed_u32(seed)?);
                    vervaat_rnd(beta, count, &mut rng, eps)?
                }
                _ => {
                    if x.is_empty() {
                        bail!("pdf and cdf need --x");
                    }
                    let (pdf, cdf) = vervaat_pdf_cdf(&params, &x)?;
                    if matches!(what, VervaatWhat::Pdf) {
                        pdf
                    } else {
                        cdf
                    }
                }
            };
            for v in values {
                writeln!(out, "{}", g17(v))?;
            }
        }
        Command::Rng { mode, count, dist } => {
            let mut rng = match mode {
                RngMode::Classic => MersenneTwister::new(seed_u32(seed)?),
                RngMode::R => {
                    let s = seed.unwrap_or(1);
                    MersenneTwister::new_r(i32::try_from(s).with_context(|| format!("seed {s} outside i32"))?)
                }
            };
            for _ in 0..count {
                match dist {
                    RngDist::Unif => writeln!(out, "{}", g17(rng.next_uniform()))?,
                    RngDist::Norm => writeln!(out, "{}", g17(rng.next_normal()))?,
                    RngDist::Int(n) => writeln!(out, "{}", rng.uniform_int(n)?)?,
                }
            }
        }
        Command::Robust {
            method,
            n,
            p,
            contamination,
            shift,
            backend,
            replicates,
            starts,
            m0,
            out: dest,
        } => {
            if p == 0 {
                bail!("p must be at least 1");
            }
            let mut w = sink(dest.as_ref())?;
            let mut rng = MersenneTwister::new(seed_u32(seed)?);
            match method {
                RobustMethod::Mcd => {
                    writeln!(w, "rep,log_det,updates,exit,data,branch,incr,total")?;
                    let h = default_h(n, p);
                    for rep in 0..replicates {
                        let x = contaminated_normal(n, p, contamination, shift, &mut rng)?;
                        let fit = mcd_approx(&x, h, starts, &mut rng, backend.into())?;
                        writeln!(
                            w,
                            "{rep},{},{},{}",
                            g17(fit.best.log_det),
                            fit.subset_updates,
                            counts_csv(&fit.counts)
                        )?;
                    }
                }
                RobustMethod::Fs => {
                    writeln!(w, "rep,m,left,ridged,min_out,exit,data,branch,incr,total")?;
                    for rep in 0..replicates {
                        let x = contaminated_normal(n, p, contamination, shift, &mut rng)?;
                        for step in fs_progression(&x, m0.unwrap_or(p + 1), backend.into())? {
                            let min_out = step.state.min_out_index.map(|i| i.to_string()).unwrap_or_default();
                            writeln!(
                                w,
                                "{rep},{},{},{},{min_out},{}",
                                step.state.m,
                                step.left_units,
                                u8::from(step.ridged),
                                counts_csv(&step.counts)
                            )?;
                        }
                    }
                }
            }
            w.flush()?;
        }
        Command::Filter { input, out: dest, noise, mask } => {
            let bytes = std::fs::read(&input).with_context(|| format!("reading {}", input.display()))?;
            let binary = bytes.starts_with(b"P5") || bytes.starts_with(b"P6");
            let mut img = read_pnm(&bytes)?;
            if let Some(pn) = noise {
                let mut rng = MersenneTwister::new(seed_u32(seed)?);
                img = add_salt_pepper(&img, pn, &mut rng)?;
            }
            let filtered = weighted_median_filter(&img, &mask.unwrap_or_else(Mask3::wiener))?;
            std::fs::write(&dest, write_pnm(&filtered, binary)).with_context(|| format!("writing {}", dest.display()))?;
        }
        Command::Bench {
            dist,
            shape,
            mu,
            sigma,
            n,
            k,
            replicates,
            variant,
            timing,
            out: dest,
            summary,
        } => {
            let dist = match dist {
                DistArg::Uniform => Dist::Uniform,
                DistArg::Bs => Dist::birnbaum_saunders(shape),
                DistArg::Lognormal => Dist::LogNormal { mu, sigma },
            };
            let mut config = BenchConfig::new(dist, n.0, k, replicates, seed_u32(seed)?);
            config.variant = match variant {
                VariantArg::Select => Variant::Select,
                VariantArg::SelectOracle => Variant::SelectOracle,
                VariantArg::Sort => Variant::SortBaseline,
            };
            config.timing = timing;
            let rows = bench_run(&config)?;
            let mut w = sink(dest.as_ref())?;
            write_csv(&rows, timing, &mut w)?;
            w.flush()?;
            if let Some(path) = summary {
                let mut s = sink(Some(&path))?;
                write_summary_csv(&group_stats(&rows), &mut s)?;
                s.flush()?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
