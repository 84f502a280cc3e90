//! Desk-scale evaluation harness: pairwise RMSE, top-k similarity
//! search accuracy, clustering purity with a minimal k-modes, and
//! estimator variance profiles. Every metric is deterministic under a
//! fixed seed and every report row carries its seed and trial count.

use std::collections::HashMap;
use std::io::Write;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::baselines::{feature_hash_sketch, ohe_binary_bucket_sketch, simhash_sketch, BinaryVector, SignedSketch};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::estimator::{estimate_pair, EstimatorConfig};
use crate::params::{next_prime, SketchParams};
use crate::rng::stream;
use crate::sketch::{sketch_all, FSketchVector};
use crate::vector::{CategoricalVector, Sparsity};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

const PAIR_TAG: u64 = 0x9a17;
const SPLIT_TAG: u64 = 0x59;
const KMODES_TAG: u64 = 0x60de5;
const VARIANCE_TAG: u64 = 0xa7;

/// Default cap on the number of pairs evaluated by all-pairs metrics.
pub const DEFAULT_PAIR_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Rmse,
    TopkAccuracy,
    Purity,
    Variance,
    TimeMs,
}

impl Metric {
    pub fn label(&self) -> &'static str {
        match self {
            Metric::Rmse => "rmse",
            Metric::TopkAccuracy => "topk_accuracy",
            Metric::Purity => "purity",
            Metric::Variance => "variance",
            Metric::TimeMs => "time_ms",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub method: String,
    pub reduced_dim: usize,
    pub metric: Metric,
    pub value: f64,
    pub seed: u64,
    pub trials: usize,
}

/// One CSV row per report: method, dim, metric, value, seed, trials.
pub fn write_csv(mut sink: impl Write, reports: &[EvalReport]) -> Result<()> {
    writeln!(sink, "method,dim,metric,value,seed,trials")?;
    for r in reports {
        writeln!(
            sink,
            "{},{},{},{},{},{}",
            r.method,
            r.reduced_dim,
            r.metric.label(),
            r.value,
            r.seed,
            r.trials
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    FSketch,
    FeatureHashing,
    SimHash,
    OheBucketProxy,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::FSketch,
        Method::FeatureHashing,
        Method::SimHash,
        Method::OheBucketProxy,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Method::FSketch => "fsketch",
            Method::FeatureHashing => "fh",
            Method::SimHash => "sh",
            // raw bucket-sketch Hamming distance, no estimator attached
            Method::OheBucketProxy => "ohe-binsketch-proxy(PROXY)",
        }
    }
}

/// All sketches of a dataset under one method, with its pairwise
/// distance estimate. For FH/SH/proxy the estimate is the plain sketch
/// Hamming distance.
pub enum MethodSketches {
    FSketch {
        sketches: Vec<FSketchVector>,
        cfg: EstimatorConfig,
    },
    Signed(Vec<SignedSketch>),
    Binary(Vec<BinaryVector>),
}

impl MethodSketches {
    pub fn build(ds: &Dataset, method: Method, d: usize, p: u64, seed: u64) -> Result<Self> {
        Self::build_with_sigma(ds, method, d, p, ds.sigma(), seed)
    }

    /// Like `build` but with an explicit dataset-level sigma, for when
    /// `ds` is a slice of a larger dataset.
    pub fn build_with_sigma(
        ds: &Dataset,
        method: Method,
        d: usize,
        p: u64,
        sigma: Sparsity,
        seed: u64,
    ) -> Result<Self> {
        match method {
            Method::FSketch => {
                let params = SketchParams::new(ds.n(), d, p, seed)?;
                let cfg = EstimatorConfig::new(d, p, sigma)?;
                Ok(MethodSketches::FSketch {
                    sketches: sketch_all(ds.points(), &params)?,
                    cfg,
                })
            }
            Method::FeatureHashing => Ok(MethodSketches::Signed(
                ds.points()
                    .iter()
                    .map(|x| feature_hash_sketch(x, d, seed))
                    .collect::<Result<_>>()?,
            )),
            Method::SimHash => Ok(MethodSketches::Signed(
                ds.points()
                    .iter()
                    .map(|x| simhash_sketch(x, d, seed))
                    .collect::<Result<_>>()?,
            )),
            Method::OheBucketProxy => Ok(MethodSketches::Binary(
                ds.points()
                    .iter()
                    .map(|x| ohe_binary_bucket_sketch(x, ds.c().max(1), d, seed))
                    .collect::<Result<_>>()?,
            )),
        }
    }

    pub fn estimate(&self, i: usize, j: usize) -> f64 {
        match self {
            MethodSketches::FSketch { sketches, cfg } => {
                estimate_pair(&sketches[i], &sketches[j], cfg)
                    .expect("sketches share params")
                    .h_hat
            }
            MethodSketches::Signed(s) => s[i].hamming(&s[j]).expect("equal dims") as f64,
            MethodSketches::Binary(s) => s[i].hamming(&s[j]).expect("equal dims") as f64,
        }
    }
}

fn pair_of_index(t: usize, count: usize) -> (usize, usize) {
    // row-major walk of the strict upper triangle
    let mut i = 0usize;
    let mut t = t;
    let mut row_len = count - 1;
    while t >= row_len {
        t -= row_len;
        i += 1;
        row_len -= 1;
    }
    (i, i + 1 + t)
}

/// The unordered pairs an all-pairs metric will touch: every pair when
/// they fit the budget, otherwise a seeded uniform subsample.
pub fn select_pairs(count: usize, budget: usize, seed: u64) -> Vec<(usize, usize)> {
    let total = count * (count - 1) / 2;
    if total <= budget {
        (0..total).map(|t| pair_of_index(t, count)).collect()
    } else {
        let mut rng = stream(seed, PAIR_TAG);
        sample(&mut rng, total, budget)
            .into_iter()
            .map(|t| pair_of_index(t, count))
            .collect()
    }
}

/// sqrt of the mean squared difference between exact Hamming distance
/// and the estimate, over (a budgeted subsample of) all unordered
/// pairs.
pub fn pairwise_rmse<F>(ds: &Dataset, estimate: F, budget: usize, seed: u64) -> Result<f64>
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    if ds.len() < 2 {
        return Err(Error::Eval("pairwise RMSE needs at least 2 points".into()));
    }
    let pairs = select_pairs(ds.len(), budget, seed);

    #[cfg(feature = "parallel")]
    let sum: f64 = pairs
        .par_iter()
        .map(|&(i, j)| {
            let h = ds.points()[i].hamming(&ds.points()[j]).unwrap() as f64;
            (h - estimate(i, j)).powi(2)
        })
        .sum();
    #[cfg(not(feature = "parallel"))]
    let sum: f64 = pairs
        .iter()
        .map(|&(i, j)| {
            let h = ds.points()[i].hamming(&ds.points()[j]).unwrap() as f64;
            (h - estimate(i, j)).powi(2)
        })
        .sum();

    Ok((sum / pairs.len() as f64).sqrt())
}

fn top_k_by<F>(candidates: &[usize], k: usize, mut dist: F) -> Vec<usize>
where
    F: FnMut(usize) -> f64,
{
    let mut ranked: Vec<(f64, usize)> = candidates.iter().map(|&i| (dist(i), i)).collect();
    // ties broken by ascending point index
    ranked.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    ranked.truncate(k);
    ranked.into_iter().map(|(_, i)| i).collect()
}

fn jaccard(a: &[usize], b: &[usize]) -> f64 {
    let sa: std::collections::HashSet<usize> = a.iter().copied().collect();
    let sb: std::collections::HashSet<usize> = b.iter().copied().collect();
    let inter = sa.intersection(&sb).count();
    let union = sa.union(&sb).count();
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Split the dataset into a query partition (`query_fraction`, at least
/// one point) and a training partition, find each query's top-k
/// neighbours under exact Hamming distance and under the estimate, and
/// average the Jaccard ratio of the two sets over the queries.
pub fn topk_accuracy<F>(
    ds: &Dataset,
    query_fraction: f64,
    k: usize,
    estimate: F,
    seed: u64,
) -> Result<f64>
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    if !(0.0..1.0).contains(&query_fraction) {
        return Err(Error::Eval("query fraction must be in [0, 1)".into()));
    }
    let count = ds.len();
    let mut order: Vec<usize> = (0..count).collect();
    let mut rng = stream(seed, SPLIT_TAG);
    order.shuffle(&mut rng);
    let n_query = ((count as f64 * query_fraction).round() as usize).clamp(1, count - 1);
    let (queries, training) = order.split_at(n_query);
    if k == 0 || k > training.len() {
        return Err(Error::Eval(format!(
            "k = {k} must be in [1, {}] (training partition size)",
            training.len()
        )));
    }
    let mut training = training.to_vec();
    training.sort_unstable();

    let accuracy_of = |&q: &usize| -> f64 {
        let full = top_k_by(&training, k, |i| {
            ds.points()[q].hamming(&ds.points()[i]).unwrap() as f64
        });
        let reduced = top_k_by(&training, k, |i| estimate(q, i));
        jaccard(&full, &reduced)
    };

    #[cfg(feature = "parallel")]
    let total: f64 = queries.par_iter().map(accuracy_of).sum();
    #[cfg(not(feature = "parallel"))]
    let total: f64 = queries.iter().map(accuracy_of).sum();

    Ok(total / queries.len() as f64)
}

/// Average over the found clusters of the best overlap with any ground
/// cluster, normalized by the number of points. 1.0 iff the partitions
/// coincide up to relabeling.
pub fn purity_index(ground: &[Vec<usize>], found: &[Vec<usize>]) -> Result<f64> {
    let mut ground_points: Vec<usize> = ground.iter().flatten().copied().collect();
    let mut found_points: Vec<usize> = found.iter().flatten().copied().collect();
    ground_points.sort_unstable();
    found_points.sort_unstable();
    if ground_points.is_empty()
        || ground_points != found_points
        || ground_points.windows(2).any(|w| w[0] == w[1])
    {
        return Err(Error::Eval(
            "clusterings must partition the same non-empty point set".into(),
        ));
    }
    let m = ground_points.len() as f64;
    let mut label_of = HashMap::new();
    for (gi, cluster) in ground.iter().enumerate() {
        for &point in cluster {
            label_of.insert(point, gi);
        }
    }
    let mut total = 0usize;
    for cluster in found {
        let mut counts = vec![0usize; ground.len()];
        for point in cluster {
            counts[label_of[point]] += 1;
        }
        total += counts.iter().max().copied().unwrap_or(0);
    }
    Ok(total as f64 / m)
}

fn attribute_modes(members: &[&CategoricalVector], dim: usize) -> CategoricalVector {
    let size = members.len();
    let mut counts: HashMap<u32, HashMap<u32, usize>> = HashMap::new();
    for point in members {
        for &(i, v) in point.entries() {
            *counts.entry(i).or_default().entry(v).or_default() += 1;
        }
    }
    let mut entries = Vec::new();
    for (i, by_value) in counts {
        let nonzero_total: usize = by_value.values().sum();
        let zero_count = size - nonzero_total;
        // mode over {0} union observed values; ties go to the smaller value,
        // so 0 wins any tie it is part of
        let (mut best_v, mut best_c) = (0u32, zero_count);
        let mut ordered: Vec<(u32, usize)> = by_value.into_iter().collect();
        ordered.sort_unstable();
        for (v, c) in ordered {
            if c > best_c {
                best_v = v;
                best_c = c;
            }
        }
        if best_v != 0 {
            entries.push((i, best_v));
        }
    }
    CategoricalVector::new(dim, entries).expect("modes are valid entries")
}

/// Lloyd-style k-modes under Hamming distance with per-attribute mode
/// centroids. Seeded initial centroids are k distinct data points.
/// Returns one cluster index per point.
pub fn k_modes(
    points: &[CategoricalVector],
    k: usize,
    seed: u64,
    max_iters: usize,
) -> Result<Vec<usize>> {
    if k == 0 {
        return Err(Error::Eval("k must be positive".into()));
    }
    if k > points.len() {
        return Err(Error::Eval(format!(
            "k = {k} exceeds point count {}",
            points.len()
        )));
    }
    let dim = points[0].dim();
    let mut rng = stream(seed, KMODES_TAG);
    let mut centroids: Vec<CategoricalVector> = sample(&mut rng, points.len(), k)
        .into_iter()
        .map(|i| points[i].clone())
        .collect();

    let mut assignment = vec![usize::MAX; points.len()];
    for _ in 0..max_iters {
        let assign_one = |point: &CategoricalVector| -> usize {
            centroids
                .iter()
                .enumerate()
                .map(|(ci, centroid)| (point.hamming(centroid).unwrap(), ci))
                .min()
                .unwrap()
                .1
        };
        #[cfg(feature = "parallel")]
        let next: Vec<usize> = points.par_iter().map(assign_one).collect();
        #[cfg(not(feature = "parallel"))]
        let next: Vec<usize> = points.iter().map(assign_one).collect();

        if next == assignment {
            break;
        }
        assignment = next;
        for ci in 0..k {
            let members: Vec<&CategoricalVector> = points
                .iter()
                .zip(&assignment)
                .filter(|&(_, &a)| a == ci)
                .map(|(p, _)| p)
                .collect();
            // an emptied cluster keeps its previous centroid
            if !members.is_empty() {
                centroids[ci] = attribute_modes(&members, dim);
            }
        }
    }
    Ok(assignment)
}

pub fn assignments_to_clusters(assignment: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut clusters = vec![Vec::new(); k];
    for (point, &a) in assignment.iter().enumerate() {
        clusters[a].push(point);
    }
    clusters
}

/// Mean and variance of repeated estimates of one fixed pair's distance
/// over fresh random params, per method and reduced dimension.
pub fn estimate_variance_profile(
    ds: &Dataset,
    dims: &[usize],
    repeats: usize,
    seed: u64,
) -> Result<Vec<EvalReport>> {
    if repeats < 2 {
        return Err(Error::Eval("variance profile needs repeats >= 2".into()));
    }
    if ds.len() < 2 {
        return Err(Error::Eval("variance profile needs >= 2 points".into()));
    }
    let mut rng = stream(seed, VARIANCE_TAG);
    let i = rng.random_range(0..ds.len());
    let mut j = rng.random_range(0..ds.len() - 1);
    if j >= i {
        j += 1;
    }
    let p = next_prime(ds.c().max(1) as u64);

    let mut reports = Vec::new();
    for method in [Method::FSketch, Method::FeatureHashing, Method::SimHash] {
        for &d in dims {
            let estimates: Vec<f64> = (0..repeats)
                .map(|t| {
                    let trial_seed = crate::rng::splitmix64(seed ^ (t as u64 + 1));
                    let pair = Dataset::new(
                        "pair",
                        vec![ds.points()[i].clone(), ds.points()[j].clone()],
                    )?;
                    let sk = MethodSketches::build_with_sigma(
                        &pair,
                        method,
                        d,
                        p,
                        ds.sigma(),
                        trial_seed,
                    )?;
                    Ok(sk.estimate(0, 1))
                })
                .collect::<Result<_>>()?;
            let mean = estimates.iter().sum::<f64>() / repeats as f64;
            let variance = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>()
                / (repeats - 1) as f64;
            reports.push(EvalReport {
                method: method.label().to_string(),
                reduced_dim: d,
                metric: Metric::Variance,
                value: variance,
                seed,
                trials: repeats,
            });
        }
    }
    Ok(reports)
}
