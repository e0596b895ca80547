//! Distributional equivalence of the explicit and implicit empty-bin
//! release: survivor-count distributions agree (chi-square) and pooled
//! survivor weights agree (two-sample KS) over many seeded trials.

mod stat_helpers;

use binsynth_core::grid::BinCount;
use binsynth_core::noise::RunRng;
use binsynth_core::release::{release_empty_explicit, release_empty_implicit, PrivacySpec};
use binsynth_core::types::Point;
use rand::seq::SliceRandom;
use stat_helpers::{chi_square_two_sample_p, ks_two_sample_p};

const K: usize = 200;
const TRIALS: usize = 10_000;

fn centers() -> Vec<Point> {
    (0..K).map(|i| Point::new(vec![i as f64]).unwrap()).collect()
}

#[test]
fn explicit_and_implicit_empty_release_agree() {
    let spec = PrivacySpec::new(0.0, 1.0, 4.0).unwrap();
    let centers = centers();
    let run = RunRng::new(20240);

    let mut counts_explicit = vec![0u64; K + 1];
    let mut counts_implicit = vec![0u64; K + 1];
    let mut weights_explicit: Vec<f64> = Vec::new();
    let mut weights_implicit: Vec<f64> = Vec::new();

    for trial in 0..TRIALS {
        let out = release_empty_explicit(
            &centers,
            &spec,
            &mut run.stream(&format!("explicit/{trial}")),
        )
        .unwrap();
        counts_explicit[out.len()] += 1;
        weights_explicit.extend(out.entries().iter().map(|(_, w)| *w));

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
        counts_implicit[out.len()] += 1;
        weights_implicit.extend(out.entries().iter().map(|(_, w)| *w));
    }

    // sanity: mean survivors near K * (1/2)e^{-2} ~ 13.53 in both
    let mean = |c: &[u64]| -> f64 {
        c.iter().enumerate().map(|(m, &n)| m as f64 * n as f64).sum::<f64>() / TRIALS as f64
    };
    assert!((mean(&counts_explicit) - 13.53).abs() < 0.5);
    assert!((mean(&counts_implicit) - 13.53).abs() < 0.5);

    let p_counts = chi_square_two_sample_p(&counts_explicit, &counts_implicit);
    assert!(p_counts > 0.01, "survivor-count chi-square p = {p_counts}");

    let p_weights = ks_two_sample_p(&mut weights_explicit, &mut weights_implicit);
    assert!(p_weights > 0.01, "survivor-weight KS p = {p_weights}");

    // hard support property in both implementations
    assert!(weights_explicit.iter().all(|w| *w >= 4.0));
    assert!(weights_implicit.iter().all(|w| *w >= 4.0));
}

#[test]
fn equivalence_also_holds_at_zero_threshold() {
    // t = 0: survival probability exactly 1/2 on both paths
    let spec = PrivacySpec::new(0.0, 2.0, 0.0).unwrap();
    let centers = centers();
    let run = RunRng::new(777);
    let trials = 4000;

    let mut counts_explicit = vec![0u64; K + 1];
    let mut counts_implicit = vec![0u64; K + 1];
    for trial in 0..trials {
        let out = release_empty_explicit(
            &centers,
            &spec,
            &mut run.stream(&format!("e0/{trial}")),
        )
        .unwrap();
        counts_explicit[out.len()] += 1;
        let mut picker = run.stream(&format!("p0/{trial}"));
        let out = release_empty_implicit(
            BinCount::Exact(K as u128),
            &spec,
            &mut run.stream(&format!("i0/{trial}")),
            |m| {
                let mut pool = centers.clone();
                pool.shuffle(&mut picker);
                Ok(pool.into_iter().take(m as usize).collect())
            },
        )
        .unwrap();
        counts_implicit[out.len()] += 1;
    }
    let mean = |c: &[u64]| -> f64 {
        c.iter().enumerate().map(|(m, &n)| m as f64 * n as f64).sum::<f64>() / trials as f64
    };
    assert!((mean(&counts_explicit) - 100.0).abs() < 1.0);
    let p = chi_square_two_sample_p(&counts_explicit, &counts_implicit);
    assert!(p > 0.01, "chi-square p = {p}");
}
