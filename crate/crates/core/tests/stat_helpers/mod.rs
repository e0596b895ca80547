//! Shared statistical test helpers: two-sample chi-square and
//! Kolmogorov-Smirnov p-values.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Two-sample chi-square p-value over category counts (equal trial totals).
/// Categories with a pooled count below 5 are merged into the last bucket.
pub fn chi_square_two_sample_p(a: &[u64], b: &[u64]) -> f64 {
    assert_eq!(a.len(), b.len());
    // merge sparse categories
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
        } else {
            pairs.push(acc);
        }
    }
    if pairs.len() < 2 {
        return 1.0;
    }
    let stat: f64 = pairs
        .iter()
        .map(|(x, y)| (x - y) * (x - y) / (x + y))
        .sum();
    let df = (pairs.len() - 1) as f64;
    let dist = ChiSquared::new(df).expect("df >= 1");
    1.0 - dist.cdf(stat)
}

/// Asymptotic two-sample KS p-value.
pub fn ks_two_sample_p(a: &mut Vec<f64>, b: &mut Vec<f64>) -> f64 {
    let (n1, n2) = (a.len(), b.len());
    assert!(n1 > 0 && n2 > 0);
    a.sort_by(|x, y| x.total_cmp(y));
    b.sort_by(|x, y| x.total_cmp(y));
    let mut d: f64 = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    while i < n1 && j < n2 {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / n1 as f64 - j as f64 / n2 as f64).abs());
    }
    let ne = (n1 as f64 * n2 as f64 / (n1 + n2) as f64).sqrt();
    let lambda = (ne + 0.12 + 0.11 / ne) * d;
    ks_q(lambda)
}

fn ks_q(lambda: f64) -> f64 {
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let term = (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-12 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
