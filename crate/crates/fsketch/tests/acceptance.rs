//! Acceptance suite: one test per exit criterion, each printing a
//! PASS/FAIL line. Run with `cargo test --test acceptance -- --nocapture`
//! to see the per-criterion lines.

use std::time::Instant;

use fsketch::data::Dataset;
use fsketch::baselines::ohe_distance_bounds;
use fsketch::estimator::{
    estimate_hamming, estimate_pair, expected_collisions, sketch_hamming, EstimatorConfig,
};
use fsketch::eval::{pairwise_rmse, Method, MethodSketches};
use fsketch::median::{aggregate_estimate, Aggregate, MedianParams};
use fsketch::params::{next_prime, SketchParams};
use fsketch::rng::{splitmix64, stream};
use fsketch::sketch::{create_sketch, sketch_all_sequential, update_sketch};
use fsketch::synth::{pair_with_distance, random_dataset, random_vector};
use fsketch::vector::{CategoricalVector, Sparsity};

struct Criterion {
    id: u32,
    what: &'static str,
}

impl Criterion {
    fn check(self, ok: bool, detail: String) {
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {:2}: {} ({detail})", self.id, self.what);
        assert!(ok, "criterion {} failed: {detail}", self.id);
    }
}

#[test]
fn criterion_01_update_equivalence() {
    let n = 200;
    let c = 9u32;
    let params = SketchParams::new(n, 32, next_prime(c as u64), 1).unwrap();
    let mut rng = stream(101, 0xa1);
    let trials = 10_000;
    let start = Instant::now();
    let mut exact = 0usize;
    for t in 0..trials {
        let nnz = 1 + (splitmix64(t as u64) % 40) as usize;
        let x = random_vector(&mut rng, n, nnz, c);
        // cycle insert / delete / change
        let (i, v, v_new) = match t % 3 {
            0 => {
                // insert at a currently-zero index
                let i = (1..=n).find(|&i| x.get(i) == 0).unwrap();
                (i, 0, 1 + (splitmix64(t as u64 ^ 1) % c as u64) as u32)
            }
            1 => {
                // delete an existing entry
                let i = x.entries()[0].0 as usize;
                (i, x.get(i), 0)
            }
            _ => {
                let i = x.entries()[0].0 as usize;
                (i, x.get(i), 1 + (splitmix64(t as u64 ^ 2) % c as u64) as u32)
            }
        };
        let updated = update_sketch(&create_sketch(&x, &params).unwrap(), i, v, v_new, &params)
            .unwrap();
        let resketched = create_sketch(&x.with_value(i, v_new).unwrap(), &params).unwrap();
        if updated == resketched {
            exact += 1;
        }
    }
    let elapsed = start.elapsed();
    Criterion {
        id: 1,
        what: "update equals re-sketch on 10^4 insert/delete/change trials",
    }
    .check(
        exact == trials && elapsed.as_secs_f64() < 10.0,
        format!("{exact}/{trials} exact in {elapsed:.2?}"),
    );
}

#[test]
fn criterion_02_collision_law() {
    let n = 64;
    let sigma = 20;
    let trials = 100_000;
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut ok = true;
    let mut rng = stream(102, 0xa2);
    for (gi, &h) in [1usize, 5, 20].iter().enumerate() {
        for (gj, &d) in [16usize, 64].iter().enumerate() {
            for (gk, &p) in [3u64, 43].iter().enumerate() {
                // the law needs p above the max category value, else a
                // nonzero difference can vanish mod p
                let c = (p - 1).min(9) as u32;
                let (x, y) = pair_with_distance(&mut rng, n, sigma, c, h).unwrap();
                let combo = (gi * 10 + gj * 100 + gk * 1000) as u64;
                let mut sum_rate = 0.0f64;
                for t in 0..trials {
                    let params =
                        SketchParams::new(n, d, p, splitmix64(combo ^ (t as u64) << 4)).unwrap();
                    let f = sketch_hamming(
                        &create_sketch(&x, &params).unwrap(),
                        &create_sketch(&y, &params).unwrap(),
                    )
                    .unwrap();
                    sum_rate += f as f64 / d as f64;
                }
                let rate = sum_rate / trials as f64;
                let q = (1.0 - 1.0 / p as f64)
                    * (1.0 - (1.0 - 1.0 / d as f64).powi(h as i32));
                let tol = 3.0 * (q * (1.0 - q) / trials as f64).sqrt();
                let gap = (rate - q).abs();
                worst = worst.max(gap / tol);
                if gap > tol {
                    ok = false;
                    eprintln!(
                        "  (h={h}, d={d}, p={p}): rate {rate:.5} vs {q:.5}, tol {tol:.5}"
                    );
                }
            }
        }
    }
    let elapsed = start.elapsed();
    Criterion {
        id: 2,
        what: "per-cell disagreement rate matches the closed form on the (h,d,p) grid",
    }
    .check(
        ok && elapsed.as_secs_f64() < 60.0,
        format!("worst gap {worst:.2}x of 3 binomial SEs, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_03_estimator_round_trip() {
    let sigma = 128;
    let cfg = EstimatorConfig::new(512, 131, Sparsity(sigma)).unwrap();
    let mut worst = 0.0f64;
    for h in 0..=(2 * sigma) {
        let f_star = expected_collisions(h, &cfg);
        // invert the exact expectation through the estimator's formula
        let dp = 512.0 * cfg.modulus_retention();
        let h_back = (1.0 - f_star / dp).ln() / cfg.cell_retention().ln();
        worst = worst.max((h_back - h as f64).abs());
    }
    Criterion {
        id: 3,
        what: "estimate(expected_collisions(h)) returns h for every h in [0, 2 sigma]",
    }
    .check(worst < 1e-9, format!("worst |error| = {worst:.2e}"));
}

#[test]
fn criterion_04_accuracy_band() {
    let sigma = 100;
    let d = 400;
    let p = 101;
    let delta: f64 = 0.05;
    let cfg = EstimatorConfig::new(d, p, Sparsity(sigma)).unwrap();
    let band = (32.0 / cfg.modulus_retention()) * (sigma as f64 * (2.0 / delta).ln()).sqrt();
    let n = 1024;
    let trials = 2000;
    let mut rng = stream(104, 0xa4);
    let mut exceed = 0usize;
    let mut clamps = 0usize;
    for t in 0..trials {
        let h = (splitmix64(t as u64 ^ 0xb) % (2 * sigma as u64 + 1)) as usize;
        let (x, y) = pair_with_distance(&mut rng, n, sigma, 42, h).unwrap();
        let params = SketchParams::new(n, d, p, splitmix64(0x44 ^ t as u64)).unwrap();
        let est = estimate_pair(
            &create_sketch(&x, &params).unwrap(),
            &create_sketch(&y, &params).unwrap(),
            &cfg,
        )
        .unwrap();
        if est.clamped {
            clamps += 1;
        }
        if (est.h_hat - h as f64).abs() >= band {
            exceed += 1;
        }
    }
    let rate = exceed as f64 / trials as f64;
    Criterion {
        id: 4,
        what: "estimates stay inside the accuracy band and the clamp never fires",
    }
    .check(
        rate <= delta && clamps == 0,
        format!("band exceedance rate {rate}, clamp events {clamps}"),
    );
}

#[test]
fn criterion_05_sketch_sparsity() {
    let sigma = 100;
    let d = 4 * sigma;
    let n = 1000;
    let trials = 10_000;
    let mut rng = stream(105, 0xa5);
    let mut total_fraction = 0.0f64;
    let mut half_zero = 0usize;
    for t in 0..trials {
        let x = random_vector(&mut rng, n, sigma, 42);
        let params = SketchParams::new(n, d, 43, splitmix64(0x55 ^ t as u64)).unwrap();
        let nnz = create_sketch(&x, &params).unwrap().nnz();
        total_fraction += nnz as f64 / d as f64;
        if d - nnz >= d / 2 {
            half_zero += 1;
        }
    }
    let mean_fraction = total_fraction / trials as f64;
    let half_zero_rate = half_zero as f64 / trials as f64;
    Criterion {
        id: 5,
        what: "sketches stay sparse at d = 4 sigma",
    }
    .check(
        mean_fraction <= 0.25 && half_zero_rate >= 0.5,
        format!("mean non-zero fraction {mean_fraction:.4}, >=50%-zero rate {half_zero_rate:.3}"),
    );
}

#[test]
fn criterion_06_ohe_sandwich() {
    let ds = random_dataset(100, 200, 20, 6, 106).unwrap();
    let c = ds.c();
    let mut ok = true;
    for i in 0..ds.len() {
        for j in (i + 1)..ds.len() {
            let (hd, hd_ohe) =
                ohe_distance_bounds(&ds.points()[i], &ds.points()[j], c).unwrap();
            if !(hd <= hd_ohe && hd_ohe <= 2 * hd) {
                ok = false;
            }
        }
    }
    Criterion {
        id: 6,
        what: "HD <= HD(OHE) <= 2 HD for every pair of a 200-point dataset",
    }
    .check(ok, format!("{} pairs checked", 200 * 199 / 2));
}

#[test]
fn criterion_07_rmse_ordering() {
    let n = 5000;
    let sigma = 100;
    let c = 42;
    let p = 43;
    let dims = [100usize, 200, 400, 800];
    let seeds = 20;
    let points = 30;

    let mut mean_rmse = |method: Method| -> Vec<f64> {
        dims.iter()
            .map(|&d| {
                let mut total = 0.0;
                for s in 0..seeds {
                    let ds = random_dataset(n, points, sigma, c, 700 + s).unwrap();
                    let sk = MethodSketches::build(&ds, method, d, p, splitmix64(s ^ d as u64))
                        .unwrap();
                    total +=
                        pairwise_rmse(&ds, |i, j| sk.estimate(i, j), 1_000_000, 0).unwrap();
                }
                total / seeds as f64
            })
            .collect()
    };
    let fsk = mean_rmse(Method::FSketch);
    let fh = mean_rmse(Method::FeatureHashing);
    let sh = mean_rmse(Method::SimHash);

    let decreasing = fsk.windows(2).all(|w| w[1] < w[0]);
    let beats_both = (0..dims.len()).all(|k| fsk[k] < fh[k] && fsk[k] < sh[k]);
    Criterion {
        id: 7,
        what: "mean RMSE decreasing in d and below FH/SH at every d",
    }
    .check(
        decreasing && beats_both,
        format!("fsketch {fsk:.2?} vs fh {fh:.2?} vs sh {sh:.2?}"),
    );
}

#[test]
fn criterion_08_median_aggregation() {
    let sigma = 100;
    let d = 4 * sigma;
    let p = 3;
    let k = 15;
    let reps = 10;
    let pairs = 10;
    let n = 1024;
    let cfg = EstimatorConfig::new(d, p, Sparsity(sigma)).unwrap();
    let bound = 18.0 * (sigma as f64).sqrt();

    let mut rng = stream(108, 0xa8);
    let mut median_vars = Vec::new();
    let mut single_vars = Vec::new();
    let mut far = 0usize;
    let mut total = 0usize;
    for pair_idx in 0..pairs {
        let h = (splitmix64(pair_idx as u64 ^ 0x8) % (2 * sigma as u64 + 1)) as usize;
        let (x, y) = pair_with_distance(&mut rng, n, sigma, 42, h).unwrap();
        let mut medians = Vec::new();
        let mut singles = Vec::new();
        for rep in 0..reps {
            let tag = splitmix64((pair_idx * 100 + rep) as u64 ^ 0x88);
            let mp = MedianParams::new(k, n, d, p, tag).unwrap();
            let m = aggregate_estimate(
                &mp.sketch(&x).unwrap(),
                &mp.sketch(&y).unwrap(),
                &cfg,
                Aggregate::Median,
            )
            .unwrap()
            .h_hat;
            medians.push(m);
            total += 1;
            if (m - h as f64).abs() > bound {
                far += 1;
            }
            let params = SketchParams::new(n, d, p, splitmix64(tag ^ 0x1)).unwrap();
            singles.push(
                estimate_pair(
                    &create_sketch(&x, &params).unwrap(),
                    &create_sketch(&y, &params).unwrap(),
                    &cfg,
                )
                .unwrap()
                .h_hat,
            );
        }
        let var = |v: &[f64]| {
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64
        };
        median_vars.push(var(&medians));
        single_vars.push(var(&singles));
    }
    let vm = median_vars.iter().sum::<f64>() / pairs as f64;
    let vs = single_vars.iter().sum::<f64>() / pairs as f64;
    let far_rate = far as f64 / total as f64;
    Criterion {
        id: 8,
        what: "median variance below single-row variance, |h^m - h| rarely above 18 sqrt(sigma)",
    }
    .check(
        vm <= vs && far_rate <= 0.05,
        format!("median var {vm:.2} vs single var {vs:.2}, far rate {far_rate}"),
    );
}

#[test]
fn criterion_09_zero_distance_exactness() {
    let n = 2000;
    let mut rng = stream(109, 0xa9);
    let cfg = EstimatorConfig::new(64, 43, Sparsity(50)).unwrap();
    let mut ok = true;
    for t in 0..500 {
        let x = random_vector(&mut rng, n, 1 + (t % 50), 42);
        let params = SketchParams::new(n, 64, 43, splitmix64(0x99 ^ t as u64)).unwrap();
        let s = create_sketch(&x, &params).unwrap();
        let est = estimate_pair(&s, &s, &cfg).unwrap();
        if est.h_hat != 0.0 || est.f != 0 {
            ok = false;
        }
    }
    Criterion {
        id: 9,
        what: "identical vectors always estimate to exactly 0",
    }
    .check(ok, "500 identical-vector trials".into());
}

#[test]
fn criterion_10_throughput() {
    // sketching: 10^4 vectors, n = 10^5, nnz = 10^3, single-threaded
    let n = 100_000;
    let sigma = 1000;
    let count = 10_000;
    let mut rng = stream(110, 0xaa);
    let points: Vec<CategoricalVector> =
        (0..count).map(|_| random_vector(&mut rng, n, sigma, 42)).collect();
    let params = SketchParams::new(n, 4 * sigma, 43, 0).unwrap();
    let start = Instant::now();
    let sketches = sketch_all_sequential(&points, &params).unwrap();
    let sketch_time = start.elapsed();

    // estimation: 10^6 pairs at d = 400
    let d = 400;
    let small = random_dataset(2000, 1500, 500, 42, 110).unwrap();
    let params2 = SketchParams::new(2000, d, 43, 1).unwrap();
    let s2 = sketch_all_sequential(small.points(), &params2).unwrap();
    let cfg = EstimatorConfig::new(d, 43, small.sigma()).unwrap();
    let start = Instant::now();
    let mut done = 0usize;
    let mut acc = 0.0f64;
    'outer: for i in 0..s2.len() {
        for j in (i + 1)..s2.len() {
            acc += estimate_pair(&s2[i], &s2[j], &cfg).unwrap().h_hat;
            done += 1;
            if done == 1_000_000 {
                break 'outer;
            }
        }
    }
    let est_time = start.elapsed();
    std::hint::black_box(acc);

    Criterion {
        id: 10,
        what: "10^4 sketches under 10 s and 10^6 pair estimates under 30 s",
    }
    .check(
        sketches.len() == count
            && sketch_time.as_secs_f64() < 10.0
            && done == 1_000_000
            && est_time.as_secs_f64() < 30.0,
        format!("sketching {sketch_time:.2?}, estimation {est_time:.2?}"),
    );
}

// sanity net for the suite itself: the criteria above must agree with a
// dataset-level end-to-end run
#[test]
fn end_to_end_smoke() {
    let ds = random_dataset(500, 40, 30, 10, 999).unwrap();
    let p = next_prime(ds.c() as u64);
    let d = 4 * ds.sigma().0;
    let sk = MethodSketches::build(&ds, Method::FSketch, d, p, 7).unwrap();
    let rmse = pairwise_rmse(&ds, |i, j| sk.estimate(i, j), 1_000_000, 0).unwrap();
    assert!(rmse < 2.0 * ds.sigma().0 as f64);
    let _ = Dataset::new("copy", ds.points().to_vec()).unwrap();
}
