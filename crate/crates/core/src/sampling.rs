//! Minimal linear-reconstruction NMSE of uniform sampling.
//!
//! For a stationary input with density `S` sampled at `f_s`, the best linear
//! interpolator keeps, at each baseband frequency, the fraction
//! `S(f) / sum_k S(f - k f_s)` of the aliased spectrum. What it cannot
//! recover is the cross-replica energy
//!
//! ```text
//! zeta = (1/sigma^2) * int_{-f_s/2}^{f_s/2} sum_k S_k (sum_{j != k} S_j) / sum_k S_k df
//! ```
//!
//! which equals `1 - (1/sigma^2) int sum_k S_k^2 / sum_k S_k df` because the
//! replicas tile the whole frequency axis. The first form is what we
//! integrate: it has no cancellation, so tiny NMSE values keep their relative
//! precision instead of drowning in `1 - (1 - tiny)` rounding.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::psd::{PsdModel, QUAD_REL_TOL};
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NmseResult {
    #[serde(rename = "f_s_hz")]
    pub f_s: f64,
    /// Sampling-only NMSE.
    pub zeta: f64,
    /// Quantization floor `10^(-0.6 n)`, reported alongside, never added.
    pub quantization_zeta: f64,
}

/// Minimal achievable NMSE of linear reconstruction from samples at `f_s`.
pub fn nmse(model: &PsdModel, f_s: f64) -> Result<f64> {
    if !(f_s > 0.0) || !f_s.is_finite() {
        return Err(invalid(format!("sampling rate must be positive, got {f_s}")));
    }
    let sigma_x2 = model.sigma_x2();
    let half = 0.5 * f_s;

    let fold = |phi: f64| {
        let r = phi.rem_euclid(f_s);
        if r > half {
            f_s - r
        } else {
            r
        }
    };
    let breaks: Vec<f64> = model.features().into_iter().map(fold).collect();

    let buf = RefCell::new(Vec::new());
    let integrand = |f: f64| {
        let mut reps = buf.borrow_mut();
        model.replicas_into(f, f_s, &mut reps);
        cross_replica_energy(&reps)
    };
    let tol = 0.5 * QUAD_REL_TOL * sigma_x2;
    let lost = 2.0 * quad::integrate_with_breaks(&integrand, 0.0, half, &breaks, tol);
    Ok((lost / sigma_x2).clamp(0.0, 1.0))
}

/// `sum_k S_k * (sum_{j != k} S_j) / sum_k S_k`, 0 when every replica is 0.
/// The numerator is `2 sum_{j < k} S_j S_k`, accumulated with a running prefix.
fn cross_replica_energy(reps: &[f64]) -> f64 {
    let mut prefix = 0.0;
    let mut pairs = 0.0;
    for &s in reps {
        pairs += s * prefix;
        prefix += s;
    }
    if prefix > 0.0 {
        2.0 * pairs / prefix
    } else {
        0.0
    }
}

/// NMSE together with the quantization floor of an `bits`-bit quantizer.
pub fn nmse_result(model: &PsdModel, f_s: f64, bits: u32) -> Result<NmseResult> {
    Ok(NmseResult { f_s, zeta: nmse(model, f_s)?, quantization_zeta: quantization_nmse(bits)? })
}

/// Closed form for a flat density on `[-f_m, f_m]`.
pub fn nmse_flat_closed_form(f_m: f64, f_s: f64) -> f64 {
    (1.0 - f_s / (2.0 * f_m)).max(0.0)
}

/// Gain of the NMSE-optimal interpolation filter at frequency `f`.
pub fn reconstruction_filter_response(model: &PsdModel, f_s: f64, f: f64) -> f64 {
    let s = model.density(f);
    if s == 0.0 {
        return 0.0;
    }
    let a = model.aliased_sum(f, f_s);
    if a > 0.0 {
        (s / a).min(1.0)
    } else {
        0.0
    }
}

/// 6 dB-per-bit quantization NMSE, `10^(-0.6 n)`.
pub fn quantization_nmse(bits: u32) -> Result<f64> {
    if bits == 0 {
        return Err(invalid("bit count must be at least 1"));
    }
    Ok(10f64.powf(-0.6 * bits as f64))
}
