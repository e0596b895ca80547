//! Acceptance gate: one test per release criterion, each printing a single
//! pass/fail line. Tolerances are pinned; oracles are independent of the
//! implementation under test wherever a closed form or simulation exists.

use std::path::Path;
use std::process::Command;

use binsynth_core::bounds::gaussian_bound;
use binsynth_core::datagen::{
    kl_uniform_mixture_vs_gaussian, optimal_uniform_weights, sample_gaussian_mixture,
    GaussianMixtureSpec,
};
use binsynth_core::grid::{count_vector_l1_sensitivity_check, grid_assign, BinCount, GridConfig};
use binsynth_core::kernels::{kde, mmd, mmd_vs_standard_gaussian, KernelParams};
use binsynth_core::noise::RunRng;
use binsynth_core::release::{
    release_empty_explicit, release_empty_implicit, synthesize_data_dependent,
    synthesize_data_independent, threshold_for_delta, PrivacySpec,
};
use binsynth_core::tree::{adaptive_binning, partition_shape, tau_floor, TreeConfig};
use binsynth_core::types::{bounding_box, Dataset, Point, WeightedDataset};
use rand::seq::SliceRandom;
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn report(criterion: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion} ({name}): {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} ({name}) failed: {detail}");
}

fn standard_normal(dim: usize, n: usize, seed: u64) -> Dataset {
    let spec = GaussianMixtureSpec::new(
        dim,
        vec![1.0],
        vec![Point::new(vec![0.0; dim]).unwrap()],
        1.0,
    )
    .unwrap();
    sample_gaussian_mixture(&spec, n, &mut RunRng::new(seed).stream("normal")).unwrap()
}

fn subsample(data: &Dataset, size: usize, seed: u64) -> WeightedDataset {
    let mut points: Vec<Point> = data.points().to_vec();
    points.shuffle(&mut RunRng::new(seed).stream("sub"));
    points.truncate(size);
    WeightedDataset::new(points.into_iter().map(|p| (p, 1.0)).collect(), data.dim()).unwrap()
}

// -------------------------------------------------------------- criterion 1

#[test]
fn criterion_01_count_vector_sensitivity() {
    let mut rng = RunRng::new(1).stream("c1");
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for &d in &[1usize, 2, 5] {
        for _ in 0..334 {
            let rows: Vec<Vec<f64>> = (0..500)
                .map(|_| (0..d).map(|_| rng.random_range(-10.0..10.0)).collect())
                .collect();
            let mut neighbor_rows = rows.clone();
            let i = rng.random_range(0..rows.len());
            neighbor_rows[i] = (0..d).map(|_| rng.random_range(-10.0..10.0)).collect();

            let data = Dataset::from_rows(rows).unwrap();
            let neighbor = Dataset::from_rows(neighbor_rows.clone()).unwrap();
            let all: Vec<Vec<f64>> = data
                .points()
                .iter()
                .map(|p| p.coords().to_vec())
                .chain(neighbor_rows)
                .collect();
            let bx = bounding_box(&Dataset::from_rows(all).unwrap()).unwrap();
            let width = rng.random_range(0.3..4.0);
            let l1 = count_vector_l1_sensitivity_check(&data, &neighbor, &bx, width).unwrap();
            worst = worst.max(l1);
            pairs += 1;
        }
    }
    report(
        1,
        "count-vector sensitivity",
        worst <= 2.0 && pairs >= 1000,
        &format!("max L1 over {pairs} neighbor pairs = {worst}"),
    );
}

// -------------------------------------------------------------- criterion 2

#[test]
fn criterion_02_rounding_bound() {
    // rounding a dataset to grid centers moves the KD by at most
    // w sqrt(d) / (2 sqrt(e)) everywhere
    let params = KernelParams::default();
    let (w, d) = (0.5, 2usize);
    let limit = w * (d as f64).sqrt() / (2.0 * std::f64::consts::E.sqrt());
    let mut rng = RunRng::new(2).stream("c2");
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let rows: Vec<Vec<f64>> = (0..1000)
            .map(|_| (0..d).map(|_| rng.random_range(-4.0..4.0)).collect())
            .collect();
        let data = Dataset::from_rows(rows).unwrap();
        let bx = bounding_box(&data).unwrap();
        let grid = grid_assign(&data, &bx, w).unwrap();
        let rounded = WeightedDataset::new(
            grid.nonempty_bins()
                .into_iter()
                .map(|b| (b.center, b.count as f64))
                .collect(),
            d,
        )
        .unwrap();
        let original = WeightedDataset::from_dataset(&data);

        // 10^4-point evaluation net: the union of both supports plus a
        // uniform random fill of the box
        let mut net: Vec<Point> = data.points().to_vec();
        net.extend(rounded.entries().iter().map(|(p, _)| p.clone()));
        while net.len() < 10_000 {
            let coords: Vec<f64> = (0..d)
                .map(|i| rng.random_range(bx.low(i)..bx.high(i)))
                .collect();
            net.push(Point::new(coords).unwrap());
        }
        for x in &net {
            let diff = (kde(x, &original, &params).unwrap()
                - kde(x, &rounded, &params).unwrap())
            .abs();
            worst = worst.max(diff);
        }
    }
    report(
        2,
        "rounding bound",
        worst <= limit,
        &format!("max |KD - KD_rounded| = {worst:.5}, bound = {limit:.5}"),
    );
}

// -------------------------------------------------------------- criterion 3

fn chi_square_two_sample_p(a: &[u64], b: &[u64]) -> f64 {
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        acc.0 += x as f64;
        acc.1 += y as f64;
        if acc.0 + acc.1 >= 5.0 {
            pairs.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.0 + acc.1 > 0.0 {
        if let Some(last) = pairs.last_mut() {
            last.0 += acc.0;
            last.1 += acc.1;
        }
    }
    let stat: f64 = pairs
        .iter()
        .map(|(x, y)| (x - y) * (x - y) / (x + y))
        .sum();
    let dist = ChiSquared::new((pairs.len() - 1) as f64).unwrap();
    1.0 - dist.cdf(stat)
}

fn ks_two_sample_p(a: &mut Vec<f64>, b: &mut Vec<f64>) -> f64 {
    let (n1, n2) = (a.len(), b.len());
    a.sort_by(|x, y| x.total_cmp(y));
    b.sort_by(|x, y| x.total_cmp(y));
    let mut dist: f64 = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    while i < n1 && j < n2 {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        dist = dist.max((i as f64 / n1 as f64 - j as f64 / n2 as f64).abs());
    }
    let ne = (n1 as f64 * n2 as f64 / (n1 + n2) as f64).sqrt();
    let lambda = (ne + 0.12 + 0.11 / ne) * dist;
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-12 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[test]
fn criterion_03_implicit_explicit_equivalence() {
    const K: usize = 200;
    const TRIALS: usize = 10_000;
    let spec = PrivacySpec::new(0.0, 1.0, 4.0).unwrap();
    let centers: Vec<Point> = (0..K).map(|i| Point::new(vec![i as f64]).unwrap()).collect();
    let run = RunRng::new(3);

    let mut counts = [vec![0u64; K + 1], vec![0u64; K + 1]];
    let mut weights: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for trial in 0..TRIALS {
        let out = release_empty_explicit(
            &centers,
            &spec,
            &mut run.stream(&format!("explicit/{trial}")),
        )
        .unwrap();
        counts[0][out.len()] += 1;
        weights[0].extend(out.entries().iter().map(|(_, w)| *w));

        let mut picker = run.stream(&format!("picker/{trial}"));
        let out = release_empty_implicit(
            BinCount::Exact(K as u128),
            &spec,
            &mut run.stream(&format!("implicit/{trial}")),
            |m| {
                let mut pool = centers.clone();
                pool.shuffle(&mut picker);
                Ok(pool.into_iter().take(m as usize).collect())
            },
        )
        .unwrap();
        counts[1][out.len()] += 1;
        weights[1].extend(out.entries().iter().map(|(_, w)| *w));
    }
    let mean = |c: &[u64]| {
        c.iter().enumerate().map(|(m, &n)| m as f64 * n as f64).sum::<f64>() / TRIALS as f64
    };
    let (m0, m1) = (mean(&counts[0]), mean(&counts[1]));
    let p_counts = chi_square_two_sample_p(&counts[0], &counts[1]);
    let (mut w0, mut w1) = (weights[0].clone(), weights[1].clone());
    let p_weights = ks_two_sample_p(&mut w0, &mut w1);
    let pass = p_counts > 0.01
        && p_weights > 0.01
        && (m0 - 13.53).abs() <= 1.0
        && (m1 - 13.53).abs() <= 1.0;
    report(
        3,
        "implicit/explicit equivalence",
        pass,
        &format!(
            "chi2 p = {p_counts:.4}, KS p = {p_weights:.4}, means = {m0:.2}/{m1:.2}"
        ),
    );
}

// -------------------------------------------------------------- criterion 4

#[test]
fn criterion_04_tau_floor_protects_empty_nodes() {
    let data = standard_normal(2, 2000, 4);
    let bx = bounding_box(&data).unwrap();
    let s1 = bx.edge() / 4.0;
    let s2 = s1 / 4.0;
    let (h, h_prime) = partition_shape(2, bx.edge(), s1, s2).unwrap();
    let eps_prime = 1.0;
    let tau = tau_floor(h, h_prime, data.len() as u64, eps_prime, 0.05).unwrap();
    let config = TreeConfig::new(eps_prime, tau, s1, s2).unwrap();

    let builds = 1000;
    let mut splits = 0;
    for seed in 0..builds {
        let tree = adaptive_binning(&data, &config, &RunRng::new(seed)).unwrap();
        if tree.empty_split_occurred() {
            splits += 1;
        }
    }
    let freq = splits as f64 / builds as f64;
    report(
        4,
        "tau floor",
        freq <= 0.05 + 0.021,
        &format!("empty-node splits in {splits}/{builds} builds (freq {freq:.4})"),
    );
}

// -------------------------------------------------------------- criterion 5

#[test]
fn criterion_05_gaussian_bound_dominates() {
    let (n, d, sigma, w, eps, delta) = (100_000usize, 1usize, 1.0, 0.5, 1.0, 0.05);
    let bound = gaussian_bound(n as u64, d as u32, sigma, w, eps, delta);
    assert!(bound.preconditions_met, "{}", bound.explanation);
    let limit = bound.value.unwrap();

    let data = standard_normal(d, n, 5);
    let original = WeightedDataset::from_dataset(&data);
    let params = KernelParams::default();
    let net: Vec<Point> = (0..2001)
        .map(|i| Point::new(vec![-8.0 + i as f64 * 16.0 / 2000.0]).unwrap())
        .collect();
    // KD of the fixed input, computed once
    let kd_p: Vec<f64> = net
        .iter()
        .map(|x| kde(x, &original, &params).unwrap())
        .collect();

    let config = GridConfig::new(w, eps, threshold_for_delta(eps, delta).unwrap()).unwrap();
    let runs = 200;
    let mut dominated = 0;
    for seed in 0..runs {
        let out = synthesize_data_independent(&data, &config, &RunRng::new(seed))
            .unwrap()
            .output;
        let sup = net
            .iter()
            .zip(&kd_p)
            .map(|(x, p)| (kde(x, &out, &params).unwrap() - p).abs())
            .fold(0.0_f64, f64::max);
        if sup <= limit {
            dominated += 1;
        }
    }
    report(
        5,
        "theory dominance",
        dominated as f64 / runs as f64 >= 0.93,
        &format!("KD-sup below bound {limit:.4} in {dominated}/{runs} runs"),
    );
}

// -------------------------------------------------------------- criterion 6

#[test]
fn criterion_06_closed_form_mmd_vs_monte_carlo() {
    use rand_distr::{Distribution, StandardNormal};
    let params = KernelParams::default();

    // exact fixture
    let fixture = Dataset::from_rows(vec![vec![0.0], vec![0.0]]).unwrap();
    let v = mmd_vs_standard_gaussian(&fixture, &params).unwrap();
    let exact = (1.0_f64 / 3.0).sqrt() - 2.0 * (0.5_f64).sqrt() + 1.0;
    assert!((v - exact).abs() < 1e-9, "fixture {v} vs {exact}");

    let mut rng = RunRng::new(6).stream("c6");
    let pool_size = 1_000_000usize;
    let mut failures = Vec::new();
    for &d in &[1usize, 2] {
        // one pool of standard-normal draws per dimension
        let pool: Vec<Vec<f64>> = (0..pool_size)
            .map(|_| (0..d).map(|_| <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)).collect())
            .collect();
        for trial in 0..10 {
            let sample = standard_normal(d, 100, 600 + 10 * d as u64 + trial);
            let closed = mmd_vs_standard_gaussian(&sample, &params).unwrap();

            // Monte-Carlo cross term: per pool draw, the sample-averaged
            // kernel; its spread gives the oracle's standard error
            let g2 = 1.0;
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for y in &pool {
                let mut avg = 0.0;
                for x in sample.points() {
                    let sq: f64 = x
                        .coords()
                        .iter()
                        .zip(y)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    avg += (-sq / (2.0 * g2)).exp();
                }
                avg /= sample.len() as f64;
                sum += avg;
                sum_sq += avg * avg;
            }
            let cross = sum / pool_size as f64;
            let cross_var = (sum_sq / pool_size as f64 - cross * cross).max(0.0);
            let cross_se = (cross_var / pool_size as f64).sqrt();

            let term1 = (g2 / (2.0 + g2)).powf(d as f64 / 2.0);
            let mut pair = 0.0;
            let n = sample.len();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let sq = sample.points()[i]
                            .squared_distance(&sample.points()[j])
                            .unwrap();
                        pair += (-sq / (2.0 * g2)).exp();
                    }
                }
            }
            let term3 = pair / (n as f64 * (n - 1) as f64);
            let oracle = term1 - 2.0 * cross + term3;
            if (closed - oracle).abs() > 3.0 * 2.0 * cross_se {
                failures.push(format!(
                    "d={d} trial={trial}: {closed} vs {oracle} (se {cross_se})"
                ));
            }
        }
    }
    report(
        6,
        "closed-form MMD",
        failures.is_empty(),
        &format!("20 Monte-Carlo comparisons, failures: {failures:?}"),
    );
}

// -------------------------------------------------------------- criterion 7

#[test]
fn criterion_07_kl_formula() {
    fn simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> f64 {
        let step = (hi - lo) / n as f64;
        let mut acc = f(lo) + f(hi);
        for i in 1..n {
            acc += f(lo + i as f64 * step) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * step / 3.0
    }
    let mut worst: f64 = 0.0;
    for &k in &[1u32, 3, 5] {
        for &c in &[0.3, 0.5, 1.0] {
            let spec = optimal_uniform_weights(k, c).unwrap();
            let formula = kl_uniform_mixture_vs_gaussian(&spec);
            let mut quad = 0.0;
            for i in -(k as i64)..=k as i64 {
                let q = spec.weight(i) / (2.0 * c);
                let center = spec.center(i);
                let f = |x: f64| {
                    q * (q.ln() + 0.5 * x * x + 0.5 * std::f64::consts::TAU.ln())
                };
                quad += simpson(f, center - c, center + c, 100_000);
            }
            worst = worst.max((formula - quad).abs());
        }
    }
    // local optimality of the closed-form weights
    let spec = optimal_uniform_weights(3, 0.5).unwrap();
    let base = kl_uniform_mixture_vs_gaussian(&spec);
    let mut locally_optimal = true;
    for i in 1..=3usize {
        for delta in [-1e-3, 1e-3] {
            let mut w = spec.weights.clone();
            w[3 - i] += delta;
            w[3 + i] += delta;
            let total: f64 = w.iter().sum();
            for x in &mut w {
                *x /= total;
            }
            let perturbed = binsynth_core::datagen::UniformMixtureSpec::new(3, 0.5, w).unwrap();
            if kl_uniform_mixture_vs_gaussian(&perturbed) < base - 1e-12 {
                locally_optimal = false;
            }
        }
    }
    report(
        7,
        "KL formula",
        worst < 1e-6 && locally_optimal,
        &format!("max |formula - quadrature| = {worst:.2e}, locally optimal: {locally_optimal}"),
    );
}

// -------------------------------------------------------------- criterion 8

#[test]
fn criterion_08_adaptive_beats_grid_in_high_dimension() {
    let mut recipe_rng = RunRng::new(8).stream("recipe");
    let spec = GaussianMixtureSpec::standard_recipe(5, &mut recipe_rng).unwrap();
    let data = sample_gaussian_mixture(&spec, 10_000, &mut RunRng::new(8).stream("data")).unwrap();
    let bx = bounding_box(&data).unwrap();
    let s1 = bx.edge() / 4.0;
    let s2 = s1 / 2.0;
    let params = KernelParams::new(50.0).unwrap();
    let reference = subsample(&data, 2000, 8);

    let eps = 1.0;
    let delta = 0.05;
    let seeds = 10;
    let (mut grid_sum, mut tree_sum) = (0.0, 0.0);
    for seed in 0..seeds {
        let run = RunRng::new(seed);
        // matched rounding scale: grid width = the tree's minimum edge
        let g_config =
            GridConfig::new(s2, eps, threshold_for_delta(eps, delta).unwrap()).unwrap();
        let g = synthesize_data_independent(&data, &g_config, &run).unwrap().output;
        grid_sum += mmd(&reference, &g, &params).unwrap();

        let (h, h_prime) = partition_shape(5, bx.edge(), s1, s2).unwrap();
        let tau = tau_floor(h, h_prime, data.len() as u64, eps / 2.0, delta).unwrap();
        let t_config = TreeConfig::new(eps / 2.0, tau, s1, s2).unwrap();
        let t = synthesize_data_dependent(
            &data,
            &t_config,
            eps / 2.0,
            threshold_for_delta(eps / 2.0, delta).unwrap(),
            &run,
        )
        .unwrap()
        .output;
        tree_sum += mmd(&reference, &t, &params).unwrap();
    }
    let (grid_mean, tree_mean) = (grid_sum / seeds as f64, tree_sum / seeds as f64);
    report(
        8,
        "adaptive vs grid in 5-d",
        tree_mean < grid_mean,
        &format!("mean MMD tree = {tree_mean:.4}, grid = {grid_mean:.4}"),
    );
}

// -------------------------------------------------------------- criterion 9

#[test]
fn criterion_09_error_plateau_in_epsilon() {
    let data = standard_normal(2, 100_000, 9);
    let params = KernelParams::default();
    let reference = subsample(&data, 2000, 9);
    let w = 0.5;
    let delta = 0.05;
    let seeds = 5;

    let mut means = Vec::new();
    for &eps in &[0.1, 1.0, 10.0, 100.0] {
        let config = GridConfig::new(w, eps, threshold_for_delta(eps, delta).unwrap()).unwrap();
        let mut acc = 0.0;
        for seed in 0..seeds {
            let out = synthesize_data_independent(&data, &config, &RunRng::new(seed))
                .unwrap()
                .output;
            acc += mmd(&reference, &out, &params).unwrap();
        }
        means.push(acc / seeds as f64);
    }
    let flattening = (means[2] - means[3]).abs() < means[0] - means[2];
    report(
        9,
        "rounding-floor plateau",
        flattening,
        &format!(
            "mean MMD at eps 0.1/1/10/100 = {:.4}/{:.4}/{:.4}/{:.4}",
            means[0], means[1], means[2], means[3]
        ),
    );
}

// -------------------------------------------------------------- criterion 10

fn run_cli(dir: &Path, args: &[&str]) -> (String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_binsynth"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "binsynth {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    (
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn file_bytes(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn criterion_10_cli_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let mut mismatches = Vec::new();

    let scenarios: Vec<(Vec<String>, Vec<String>)> = vec![
        (
            vec!["datagen", "--recipe", "gaussian-mixture", "--dim", "2", "--n", "500",
                 "--seed", "11", "--output", "{run}-p.csv"]
                .into_iter().map(String::from).collect(),
            vec!["{run}-p.csv", "{run}-p.csv.manifest.json"].into_iter().map(String::from).collect(),
        ),
        (
            vec!["generate", "--input", "a-p.csv", "--mode", "grid", "--epsilon", "1",
                 "--width", "5", "--threshold", "2", "--seed", "11", "--output", "{run}-g.csv"]
                .into_iter().map(String::from).collect(),
            vec!["{run}-g.csv", "{run}-g.csv.manifest.json"].into_iter().map(String::from).collect(),
        ),
        (
            vec!["generate", "--input", "a-p.csv", "--mode", "tree", "--epsilon", "1",
                 "--s1", "64", "--s2", "16", "--seed", "11", "--output", "{run}-t.csv"]
                .into_iter().map(String::from).collect(),
            vec!["{run}-t.csv", "{run}-t.csv.manifest.json"].into_iter().map(String::from).collect(),
        ),
        (
            vec!["tradeoff", "--input", "a-p.csv", "--epsilons", "1,10", "--reps", "2",
                 "--width", "5", "--s1", "64", "--s2", "16", "--seed", "11",
                 "--output", "{run}-tr.csv"]
                .into_iter().map(String::from).collect(),
            vec!["{run}-tr.csv"].into_iter().map(String::from).collect(),
        ),
        (
            vec!["scaling", "--input", "a-p.csv", "--sigma", "30", "--width", "5",
                 "--epsilons", "1,10", "--reps", "2", "--seed", "11",
                 "--output", "{run}-s.csv"]
                .into_iter().map(String::from).collect(),
            vec!["{run}-s.csv"].into_iter().map(String::from).collect(),
        ),
        (
            vec!["uniform-mixture", "--sample-n", "500", "--seed", "11",
                 "--output", "{run}-u.csv"]
                .into_iter().map(String::from).collect(),
            vec!["{run}-u.csv"].into_iter().map(String::from).collect(),
        ),
        (
            vec!["bounds", "worst-case", "--r", "4", "--w", "1", "--d", "2", "--n", "100000",
                 "--epsilon", "1", "--delta", "0.01", "--output", "{run}-b.json"]
                .into_iter().map(String::from).collect(),
            vec!["{run}-b.json"].into_iter().map(String::from).collect(),
        ),
        (
            vec!["eval", "--p", "a-p.csv", "--q", "a-g.csv", "--seed", "11",
                 "--output", "{run}-e.json"]
                .into_iter().map(String::from).collect(),
            vec!["{run}-e.json"].into_iter().map(String::from).collect(),
        ),
    ];

    for (args, files) in &scenarios {
        let mut outputs: Vec<(String, Vec<Vec<u8>>)> = Vec::new();
        for run_tag in ["a", "b"] {
            let concrete: Vec<String> =
                args.iter().map(|a| a.replace("{run}", run_tag)).collect();
            let refs: Vec<&str> = concrete.iter().map(String::as_str).collect();
            let (stdout, _) = run_cli(dir, &refs);
            let bytes = files
                .iter()
                .map(|f| file_bytes(dir, &f.replace("{run}", run_tag)))
                .collect();
            outputs.push((stdout, bytes));
        }
        if outputs[0] != outputs[1] {
            mismatches.push(args[0].clone());
        }
    }
    report(
        10,
        "CLI determinism",
        mismatches.is_empty(),
        &format!("nondeterministic subcommands: {mismatches:?}"),
    );
}
