//! Command-line driver around the fsketch library: dataset stats and
//! synthesis, sketching, in-place sketch updates, pairwise estimation,
//! and the evaluation metrics (RMSE, top-k accuracy, clustering purity,
//! estimator variance).
//!
//! Conventions shared by all subcommands:
//!   - errors are a single `error: ...` line on stderr with a non-zero
//!     exit, and no partial output file is left behind
//!   - text reports are CSV with a `#`-prefixed metadata line embedding
//!     seed, d, p, sigma and the tool version
//!   - FSKETCH_THREADS caps the worker thread count

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use fsketch::data::{load_docword, load_native, save_native, Dataset};
use fsketch::estimator::{estimate_pair, EstimatorConfig};
use fsketch::eval::{
    self, assignments_to_clusters, k_modes, purity_index, select_pairs, topk_accuracy, write_csv,
    EvalReport, Method, MethodSketches, Metric, DEFAULT_PAIR_BUDGET,
};
use fsketch::median::{median_estimate, MedianParams};
use fsketch::params::next_prime;
use fsketch::persist::{load_sketches, save_sketches, SketchFileHeader};
use fsketch::sketch::{sketch_all, update_sketch};
use fsketch::synth::random_dataset;
use fsketch::vector::CategoricalVector;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "fsketch", version, about = "Sketching and Hamming estimation for sparse categorical data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// UCI bag-of-words docword layout (D, W, NNZ headers)
    Docword,
    /// Native sparse text: "n c" header then "idx:val ..." lines
    Native,
}

#[derive(Args)]
struct InputArgs {
    /// Dataset file to read
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "native")]
    format: Format,
    /// Clip docword counts above this value
    #[arg(long)]
    cap: Option<u32>,
}

impl InputArgs {
    fn load(&self) -> Result<Dataset> {
        let file = File::open(&self.input)
            .with_context(|| format!("cannot open {}", self.input.display()))?;
        let reader = BufReader::new(file);
        let ds = match self.format {
            Format::Docword => {
                let (ds, clipped) = load_docword(reader, self.cap)?;
                if clipped > 0 {
                    eprintln!("note: clipped {clipped} counts to {}", self.cap.unwrap());
                }
                ds
            }
            Format::Native => load_native(reader)?,
        };
        Ok(ds)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print dataset dimensions: n, max category, max sparsity, count
    Stats(InputArgs),
    /// Generate a synthetic dataset in the native format
    Synth {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count: usize,
        /// Per-point sparsity cap; actual nnz is uniform in [1, sigma]
        #[arg(long)]
        sigma: usize,
        #[arg(long, default_value_t = 10)]
        c: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sketch every point of a dataset into a binary sketch file
    Sketch {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        out: PathBuf,
        /// Reduced dimension; defaults to 4 * sigma
        #[arg(long)]
        d: Option<usize>,
        /// Modulus, a prime or "auto" for the smallest prime above c
        #[arg(long, default_value = "auto")]
        p: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Apply "point idx old new" mutation lines to a sketch file
    Update {
        /// Sketch file produced by the sketch subcommand
        #[arg(long)]
        sketches: PathBuf,
        /// Text file of mutations, one "point idx old new" per line
        #[arg(long)]
        mutations: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate pairwise distances from a sketch file
    Estimate {
        #[arg(long)]
        sketches: PathBuf,
        /// Sparsity cap of the source dataset (sets the 2*sigma clamp)
        #[arg(long)]
        sigma: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_PAIR_BUDGET)]
        pair_budget: usize,
        /// Failure probability for the reported error band
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Pairwise RMSE of each method against exact Hamming distance
    Rmse {
        #[command(flatten)]
        input: InputArgs,
        /// Comma-separated reduced dimensions, e.g. 100,200,400
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
        #[arg(long, default_value = "auto")]
        p: String,
        /// Median arity; above 1 adds a median-fsketch row per dim
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_PAIR_BUDGET)]
        pair_budget: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Top-k neighbour recovery accuracy of each method
    Search {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
        #[arg(long, default_value = "auto")]
        p: String,
        #[arg(long, default_value_t = 10)]
        topk: usize,
        /// Fraction of points held out as queries
        #[arg(long, default_value_t = 0.1)]
        query_frac: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Variance of repeated estimates of one pair under fresh params
    Variance {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        repeats: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// k-modes purity of sketch-space clustering vs raw-space clustering
    Cluster {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value = "auto")]
        p: String,
        #[arg(long, default_value_t = 50)]
        max_iters: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Resolve --p: "auto" picks the smallest prime above the dataset's
/// maximum category value.
fn resolve_p(p: &str, c: u32) -> Result<u64> {
    if p == "auto" {
        Ok(next_prime(c.max(1) as u64))
    } else {
        let p: u64 = p.parse().map_err(|_| anyhow!("--p must be a prime or \"auto\""))?;
        Ok(p)
    }
}

fn resolve_d(d: Option<usize>, sigma: usize) -> usize {
    d.unwrap_or(4 * sigma.max(1))
}

/// Write through a sibling .tmp file and rename on success, so a failed
/// run never leaves a partial output. With no path, write to stdout.
fn write_output(out: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match out {
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)?;
            lock.flush()?;
            Ok(())
        }
        Some(path) => {
            let tmp = path.with_extension("tmp");
            let result = (|| -> Result<()> {
                let file = File::create(&tmp)
                    .with_context(|| format!("cannot create {}", tmp.display()))?;
                let mut writer = BufWriter::new(file);
                body(&mut writer)?;
                writer.flush()?;
                Ok(())
            })();
            match result {
                Ok(()) => {
                    std::fs::rename(&tmp, path)
                        .with_context(|| format!("cannot move output into {}", path.display()))?;
                    Ok(())
                }
                Err(e) => {
                    let _ = std::fs::remove_file(&tmp);
                    Err(e)
                }
            }
        }
    }
}

fn metadata_line(seed: u64, dims: &[usize], p: u64, sigma: usize) -> String {
    let dims = dims
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(",");
    format!("# fsketch v{VERSION} seed={seed} d={dims} p={p} sigma={sigma}")
}

fn parse_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() {
        bail!("--dims requires at least one dimension");
    }
    if dims.iter().any(|&d| d < 2) {
        bail!("every dimension must be >= 2");
    }
    Ok(())
}

fn load_sketch_file(path: &Path) -> Result<(SketchFileHeader, Vec<fsketch::FSketchVector>)> {
    let file =
        File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(load_sketches(BufReader::new(file))?)
}

fn run_stats(input: InputArgs) -> Result<()> {
    let ds = input.load()?;
    let s = ds.stats();
    println!("n={} c={} sigma={} count={}", s.n, s.c, s.sigma, s.count);
    Ok(())
}

fn run_synth(n: usize, count: usize, sigma: usize, c: u32, seed: u64, out: PathBuf) -> Result<()> {
    let ds = random_dataset(n, count, sigma, c, seed)?;
    write_output(Some(&out), |w| Ok(save_native(&ds, w)?))
}

fn run_sketch(input: InputArgs, out: PathBuf, d: Option<usize>, p: String, seed: u64) -> Result<()> {
    let ds = input.load()?;
    let d = resolve_d(d, ds.sigma().0);
    let p = resolve_p(&p, ds.c())?;
    let params = fsketch::SketchParams::new(ds.n(), d, p, seed)?;
    let sketches = sketch_all(ds.points(), &params)?;
    let header = SketchFileHeader {
        n: ds.n(),
        d,
        p,
        seed,
        count: sketches.len(),
    };
    write_output(Some(&out), |w| Ok(save_sketches(w, &header, &sketches)?))?;
    eprintln!(
        "sketched {} points: n={} d={d} p={p} seed={seed}",
        sketches.len(),
        ds.n()
    );
    Ok(())
}

fn run_update(sketches: PathBuf, mutations: PathBuf, out: PathBuf) -> Result<()> {
    let (header, mut rows) = load_sketch_file(&sketches)?;
    let params = header.params()?;
    let text = std::fs::read_to_string(&mutations)
        .with_context(|| format!("cannot read {}", mutations.display()))?;
    let mut applied = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse = |what: &str, field: &str| -> Result<u64> {
            field
                .parse()
                .map_err(|_| anyhow!("line {}: bad {what} {field:?}", lineno + 1))
        };
        let [point, idx, old, new] = fields.as_slice() else {
            bail!("line {}: expected \"point idx old new\"", lineno + 1);
        };
        let point = parse("point", point)? as usize;
        let idx = parse("idx", idx)? as usize;
        let old = u32::try_from(parse("old", old)?)
            .map_err(|_| anyhow!("line {}: old value out of range", lineno + 1))?;
        let new = u32::try_from(parse("new", new)?)
            .map_err(|_| anyhow!("line {}: new value out of range", lineno + 1))?;
        if point == 0 || point > rows.len() {
            bail!(
                "line {}: point {point} out of range [1, {}]",
                lineno + 1,
                rows.len()
            );
        }
        rows[point - 1] = update_sketch(&rows[point - 1], idx, old, new, &params)?;
        applied += 1;
    }
    write_output(Some(&out), |w| Ok(save_sketches(w, &header, &rows)?))?;
    eprintln!("applied {applied} mutations to {} sketches", rows.len());
    Ok(())
}

fn run_estimate(
    sketches: PathBuf,
    sigma: usize,
    out: Option<PathBuf>,
    pair_budget: usize,
    delta: f64,
    seed: u64,
) -> Result<()> {
    if !(0.0..1.0).contains(&delta) || delta == 0.0 {
        bail!("--delta must be in (0, 1)");
    }
    let (header, rows) = load_sketch_file(&sketches)?;
    if rows.len() < 2 {
        bail!("estimation needs at least 2 sketches, file has {}", rows.len());
    }
    let cfg = EstimatorConfig::new(header.d, header.p, fsketch::Sparsity(sigma))?;
    // additive error band: (32 / P) * sqrt(sigma * ln(2 / delta))
    let band =
        32.0 / cfg.modulus_retention() * (sigma as f64 * (2.0 / delta).ln()).sqrt();
    let pairs = select_pairs(rows.len(), pair_budget, seed);
    write_output(out.as_deref(), |w| {
        writeln!(w, "{}", metadata_line(header.seed, &[header.d], header.p, sigma))?;
        writeln!(w, "# delta={delta} band={band:.4}")?;
        writeln!(w, "i,j,f,h_hat,clamped")?;
        for (i, j) in pairs {
            let e = estimate_pair(&rows[i], &rows[j], &cfg)?;
            writeln!(w, "{i},{j},{},{:.6},{}", e.f, e.h_hat, e.clamped)?;
        }
        Ok(())
    })
}

/// RMSE rows for the standard methods, plus median-fsketch when k > 1.
fn rmse_reports(
    ds: &Dataset,
    dims: &[usize],
    p: u64,
    k: usize,
    pair_budget: usize,
    seed: u64,
) -> Result<Vec<EvalReport>> {
    let mut reports = Vec::new();
    let pairs = select_pairs(ds.len(), pair_budget, seed);
    for &dim in dims {
        for method in Method::ALL {
            let sk = MethodSketches::build(ds, method, dim, p, seed)?;
            let rmse = eval::pairwise_rmse(ds, |i, j| sk.estimate(i, j), pair_budget, seed)?;
            reports.push(EvalReport {
                method: method.label().to_string(),
                reduced_dim: dim,
                metric: Metric::Rmse,
                value: rmse,
                seed,
                trials: pairs.len(),
            });
        }
        if k > 1 {
            let mp = MedianParams::new(k, ds.n(), dim, p, seed)?;
            let cfg = EstimatorConfig::new(dim, p, ds.sigma())?;
            let msk = ds
                .points()
                .iter()
                .map(|x| mp.sketch(x))
                .collect::<fsketch::Result<Vec<_>>>()?;
            let rmse = eval::pairwise_rmse(
                ds,
                |i, j| median_estimate(&msk[i], &msk[j], &cfg).unwrap().h_hat,
                pair_budget,
                seed,
            )?;
            reports.push(EvalReport {
                method: format!("median-fsketch[k={k}]"),
                reduced_dim: dim,
                metric: Metric::Rmse,
                value: rmse,
                seed,
                trials: pairs.len(),
            });
        }
    }
    Ok(reports)
}

fn run_rmse(
    input: InputArgs,
    dims: Vec<usize>,
    p: String,
    k: usize,
    pair_budget: usize,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<()> {
    parse_dims(&dims)?;
    if k == 0 {
        bail!("--k must be positive");
    }
    let ds = input.load()?;
    let p = resolve_p(&p, ds.c())?;
    let reports = rmse_reports(&ds, &dims, p, k, pair_budget, seed)?;
    write_output(out.as_deref(), |w| {
        writeln!(w, "{}", metadata_line(seed, &dims, p, ds.sigma().0))?;
        Ok(write_csv(w, &reports)?)
    })
}

fn run_search(
    input: InputArgs,
    dims: Vec<usize>,
    p: String,
    topk: usize,
    query_frac: f64,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<()> {
    parse_dims(&dims)?;
    let ds = input.load()?;
    let p = resolve_p(&p, ds.c())?;
    let mut reports = Vec::new();
    for &dim in &dims {
        for method in Method::ALL {
            let sk = MethodSketches::build(&ds, method, dim, p, seed)?;
            let acc = topk_accuracy(&ds, query_frac, topk, |i, j| sk.estimate(i, j), seed)?;
            reports.push(EvalReport {
                method: method.label().to_string(),
                reduced_dim: dim,
                metric: Metric::TopkAccuracy,
                value: acc,
                seed,
                trials: topk,
            });
        }
    }
    write_output(out.as_deref(), |w| {
        writeln!(w, "{}", metadata_line(seed, &dims, p, ds.sigma().0))?;
        Ok(write_csv(w, &reports)?)
    })
}

fn run_variance(
    input: InputArgs,
    dims: Vec<usize>,
    repeats: usize,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<()> {
    parse_dims(&dims)?;
    let ds = input.load()?;
    let reports = eval::estimate_variance_profile(&ds, &dims, repeats, seed)?;
    let p = next_prime(ds.c().max(1) as u64);
    write_output(out.as_deref(), |w| {
        writeln!(w, "{}", metadata_line(seed, &dims, p, ds.sigma().0))?;
        Ok(write_csv(w, &reports)?)
    })
}

fn run_cluster(
    input: InputArgs,
    k: usize,
    d: Option<usize>,
    p: String,
    max_iters: usize,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<()> {
    let ds = input.load()?;
    let d = resolve_d(d, ds.sigma().0);
    let p = resolve_p(&p, ds.c())?;

    let ground = assignments_to_clusters(&k_modes(ds.points(), k, seed, max_iters)?, k);

    // cluster the sketches as d-dimensional categorical vectors
    let params = fsketch::SketchParams::new(ds.n(), d, p, seed)?;
    let sketches = sketch_all(ds.points(), &params)?;
    let sketch_points = sketches
        .iter()
        .map(|s| {
            let dense: Vec<u32> = s
                .cells()
                .iter()
                .map(|&c| u32::try_from(c).map_err(|_| anyhow!("cell exceeds u32: p too large")))
                .collect::<Result<_>>()?;
            Ok(CategoricalVector::from_dense(&dense)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let found = assignments_to_clusters(&k_modes(&sketch_points, k, seed, max_iters)?, k);

    let purity = purity_index(&ground, &found)?;
    let report = EvalReport {
        method: Method::FSketch.label().to_string(),
        reduced_dim: d,
        metric: Metric::Purity,
        value: purity,
        seed,
        trials: k,
    };
    write_output(out.as_deref(), |w| {
        writeln!(w, "{}", metadata_line(seed, &[d], p, ds.sigma().0))?;
        Ok(write_csv(w, &[report])?)
    })
}

fn configure_threads() -> Result<()> {
    if let Ok(raw) = std::env::var("FSKETCH_THREADS") {
        let threads: usize = raw
            .parse()
            .map_err(|_| anyhow!("FSKETCH_THREADS must be a positive integer, got {raw:?}"))?;
        if threads == 0 {
            bail!("FSKETCH_THREADS must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("failed to configure the thread pool")?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Stats(input) => run_stats(input),
        Command::Synth {
            n,
            count,
            sigma,
            c,
            seed,
            out,
        } => run_synth(n, count, sigma, c, seed, out),
        Command::Sketch {
            input,
            out,
            d,
            p,
            seed,
        } => run_sketch(input, out, d, p, seed),
        Command::Update {
            sketches,
            mutations,
            out,
        } => run_update(sketches, mutations, out),
        Command::Estimate {
            sketches,
            sigma,
            out,
            pair_budget,
            delta,
            seed,
        } => run_estimate(sketches, sigma, out, pair_budget, delta, seed),
        Command::Rmse {
            input,
            dims,
            p,
            k,
            pair_budget,
            seed,
            out,
        } => run_rmse(input, dims, p, k, pair_budget, seed, out),
        Command::Search {
            input,
            dims,
            p,
            topk,
            query_frac,
            seed,
            out,
        } => run_search(input, dims, p, topk, query_frac, seed, out),
        Command::Variance {
            input,
            dims,
            repeats,
            seed,
            out,
        } => run_variance(input, dims, repeats, seed, out),
        Command::Cluster {
            input,
            k,
            d,
            p,
            max_iters,
            seed,
            out,
        } => run_cluster(input, k, d, p, max_iters, seed, out),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = configure_threads().and_then(|()| run(cli)) {
        // single-line, machine-parsable failure
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
