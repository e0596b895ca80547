//! Closed-form utility bounds for the grid pipeline, as pure evaluators.
//!
//! Unmet preconditions never raise: they produce a report with
//! `preconditions_met = false` and no value, so parameter sweeps can shade
//! invalid regions instead of aborting.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Evaluation of one named bound at one parameter point. All logs are
/// natural.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    /// present iff `preconditions_met`
    pub value: Option<f64>,
    pub inputs: BTreeMap<String, f64>,
    pub preconditions_met: bool,
    pub explanation: String,
}

fn inputs(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Worst-case sup-norm KD bound for the data-independent release:
/// `2 / (eps n / (4 J log(1/delta)) - 1) + (w/2) sqrt(d/e)` with
/// `J = (R/w)^d`, valid when `J < eps n / (4 log(1/delta))`.
pub fn worst_case_bound(r: f64, w: f64, d: u32, n: u64, epsilon: f64, delta: f64) -> BoundReport {
    let ins = inputs(&[
        ("R", r),
        ("w", w),
        ("d", d as f64),
        ("n", n as f64),
        ("epsilon", epsilon),
        ("delta", delta),
    ]);
    let name = "worst-case".to_string();
    let log_inv_delta = (1.0 / delta).ln();
    let j = (r / w).powi(d as i32);
    let gate = epsilon * n as f64 / (4.0 * log_inv_delta);
    if !(r > 0.0 && w > 0.0 && w <= r && epsilon > 0.0 && delta > 0.0 && delta < 1.0) {
        return BoundReport {
            name,
            value: None,
            inputs: ins,
            preconditions_met: false,
            explanation: "requires 0 < w <= R, epsilon > 0, delta in (0, 1)".into(),
        };
    }
    if !(j < gate) {
        return BoundReport {
            name,
            value: None,
            inputs: ins,
            preconditions_met: false,
            explanation: format!(
                "requires (R/w)^d < eps n / (4 log(1/delta)): {j:.4} >= {gate:.4}"
            ),
        };
    }
    let noise_term = 2.0 / (epsilon * n as f64 / (4.0 * j * log_inv_delta) - 1.0);
    let rounding_term = w / 2.0 * (d as f64 / std::f64::consts::E).sqrt();
    BoundReport {
        name,
        value: Some(noise_term + rounding_term),
        inputs: ins,
        preconditions_met: true,
        explanation: format!("noise term {noise_term:.6} + rounding term {rounding_term:.6}"),
    }
}

/// Instance-dependent sup-norm KD bound:
/// `(eps m + 8 M log(1/delta)) / (eps n - eps m - 4 M log(1/delta)) + m/n
///  + w sqrt(d) / (2 sqrt(e))`
/// where `M` counts t/2-heavy bins and `m` counts points in 3t/2-light bins.
pub fn beyond_worst_case_bound(
    n: u64,
    m: u64,
    big_m: u64,
    epsilon: f64,
    delta: f64,
    w: f64,
    d: u32,
) -> BoundReport {
    let ins = inputs(&[
        ("n", n as f64),
        ("m", m as f64),
        ("M", big_m as f64),
        ("epsilon", epsilon),
        ("delta", delta),
        ("w", w),
        ("d", d as f64),
    ]);
    let name = "beyond-worst-case".to_string();
    if !(epsilon > 0.0 && delta > 0.0 && delta < 1.0 && w > 0.0 && n >= 1) {
        return BoundReport {
            name,
            value: None,
            inputs: ins,
            preconditions_met: false,
            explanation: "requires epsilon > 0, delta in (0, 1), w > 0, n >= 1".into(),
        };
    }
    let log_inv_delta = (1.0 / delta).ln();
    let (nf, mf, big_mf) = (n as f64, m as f64, big_m as f64);
    let denominator = epsilon * nf - epsilon * mf - 4.0 * big_mf * log_inv_delta;
    if denominator <= 0.0 {
        return BoundReport {
            name,
            value: None,
            inputs: ins,
            preconditions_met: false,
            explanation: format!(
                "requires eps n - eps m - 4 M log(1/delta) > 0, got {denominator:.4}"
            ),
        };
    }
    let noise_term = (epsilon * mf + 8.0 * big_mf * log_inv_delta) / denominator;
    let light_term = mf / nf;
    let rounding_term = w * (d as f64).sqrt() / (2.0 * std::f64::consts::E.sqrt());
    BoundReport {
        name,
        value: Some(noise_term + light_term + rounding_term),
        inputs: ins,
        preconditions_met: true,
        explanation: format!(
            "noise term {noise_term:.6} + light-mass term {light_term:.6} \
             + rounding term {rounding_term:.6}"
        ),
    }
}

/// Sup-norm KD bound for Gaussian data with per-coordinate std `sigma`:
/// three terms (heavy-bin noise, light-bin mass, rounding), valid when
/// `n >= (w / (sigma sqrt(2 pi)))^d` and
/// `n / (log n)^{d/2} >= 16 log(1/delta) (12 sigma / w)^d`.
///
/// The second precondition is implemented with exponent `d`; it is sometimes
/// also stated with exponent 2, and the two disagree for d != 2. The first
/// term's leading constant is 8; the derivation's sharper constant
/// `3 (16 log(1/delta))^{1/3}` differs by a bounded factor.
pub fn gaussian_bound(
    n: u64,
    d: u32,
    data_sigma: f64,
    w: f64,
    epsilon: f64,
    delta: f64,
) -> BoundReport {
    let ins = inputs(&[
        ("n", n as f64),
        ("d", d as f64),
        ("sigma", data_sigma),
        ("w", w),
        ("epsilon", epsilon),
        ("delta", delta),
    ]);
    let name = "gaussian".to_string();
    if !(data_sigma > 0.0 && w > 0.0 && epsilon > 0.0 && delta > 0.0 && delta < 1.0 && n >= 2) {
        return BoundReport {
            name,
            value: None,
            inputs: ins,
            preconditions_met: false,
            explanation: "requires sigma, w, epsilon > 0, delta in (0, 1), n >= 2".into(),
        };
    }
    let nf = n as f64;
    let df = d as f64;
    let log_inv_delta = (1.0 / delta).ln();
    let ratio = w / (data_sigma * (std::f64::consts::TAU).sqrt());
    if nf < ratio.powi(d as i32) {
        return BoundReport {
            name,
            value: None,
            inputs: ins,
            preconditions_met: false,
            explanation: format!("requires n >= (w/(sigma sqrt(2 pi)))^d = {:.4}", ratio.powi(d as i32)),
        };
    }
    let fine = (12.0 * data_sigma / w).powi(d as i32);
    let gate = 16.0 * log_inv_delta * fine;
    let lhs = nf / nf.ln().powf(df / 2.0);
    if lhs < gate {
        return BoundReport {
            name,
            value: None,
            inputs: ins,
            preconditions_met: false,
            explanation: format!(
                "requires n/(log n)^(d/2) >= 16 log(1/delta) (12 sigma/w)^d: {lhs:.4} < {gate:.4}"
            ),
        };
    }
    let term1 = 8.0 * log_inv_delta.powf(1.0 / 3.0) * (-(df / 3.0) * (ratio.ln() - 2.0)).exp()
        / (epsilon * nf).powf(1.0 / 3.0);
    let term2 = 16.0 * log_inv_delta * fine * nf.ln().powf(df / 2.0) / (epsilon * nf);
    let term3 = w * df.sqrt() / (2.0 * std::f64::consts::E.sqrt());
    BoundReport {
        name,
        value: Some(term1 + term2 + term3),
        inputs: ins,
        preconditions_met: true,
        explanation: format!(
            "heavy-noise term {term1:.6} + light-mass term {term2:.6} \
             + rounding term {term3:.6}"
        ),
    }
}

/// Direction of the KD-sup <-> MMD conversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundConversion {
    /// `sup |KD_P - KD_Q| <= v` implies `MMD(P, Q) <= sqrt(2 v)`
    KdSupToMmd,
    /// `MMD(P, Q) <= v` implies `sup |KD_P - KD_Q| <= v`
    MmdToKdSup,
}

pub fn kd_mmd_conversion(direction: BoundConversion, value: f64) -> Result<f64> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::invalid("bound value must be >= 0"));
    }
    Ok(match direction {
        BoundConversion::KdSupToMmd => (2.0 * value).sqrt(),
        BoundConversion::MmdToKdSup => value,
    })
}
