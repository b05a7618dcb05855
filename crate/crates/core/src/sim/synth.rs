//! Stationary Gaussian inputs with a prescribed spectrum, and a Monte-Carlo
//! estimate of the sampling NMSE built on them.
//!
//! Synthesis is periodic: real white noise on a fine grid is transformed,
//! weighted by `sqrt(S(f) F)` and transformed back. The density is rescaled
//! so its Riemann sum over the grid equals the model power exactly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::{num_complex::Complex64, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::psd::PsdModel;
use crate::sim::reconstruct::{reconstruct_samples, ReconstructionFilter};

/// `len` samples at `fine_rate` of a zero-mean process with spectrum `model`.
pub fn synthesize_shaped_gaussian(model: &PsdModel, fine_rate: f64, len: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    shaped_gaussian(model, fine_rate, len, &mut rng)
}

fn shaped_gaussian(model: &PsdModel, fine_rate: f64, len: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    if len < 2 || !(fine_rate > 0.0) {
        return Err(invalid("synthesis needs at least 2 samples and a positive rate"));
    }
    let gains = shaping_gains(model, fine_rate, len)?;
    let mut buf: Vec<Complex64> = (0..len).map(|_| Complex64::new(StandardNormal.sample(rng), 0.0)).collect();
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(len).process(&mut buf);
    for (b, g) in buf.iter_mut().zip(&gains) {
        *b *= g;
    }
    planner.plan_fft_inverse(len).process(&mut buf);
    Ok(buf.iter().map(|c| c.re / len as f64).collect())
}

/// Per-bin amplitude weights `sqrt(S_k F)`, with `S` normalized on the grid.
fn shaping_gains(model: &PsdModel, fine_rate: f64, len: usize) -> Result<Vec<f64>> {
    let df = fine_rate / len as f64;
    let dens: Vec<f64> = (0..len)
        .map(|k| {
            let signed = if k < len.div_ceil(2) { k as f64 } else { k as f64 - len as f64 };
            model.density(signed * df)
        })
        .collect();
    let grid_power: f64 = dens.iter().sum::<f64>() * df;
    if !(grid_power > 0.0) {
        return Err(invalid("spectrum has no power on the synthesis grid"));
    }
    let scale = model.sigma_x2() / grid_power;
    Ok(dens.iter().map(|s| (s * scale * fine_rate).sqrt()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloOptions {
    /// Samples per realization at the sampling rate.
    pub samples: usize,
    /// Fine-grid rate as a multiple of the model's characteristic frequency.
    pub fine_rate_factor: f64,
    pub realizations: usize,
    pub seed: u64,
}

impl Default for MonteCarloOptions {
    fn default() -> Self {
        Self { samples: 2048, fine_rate_factor: 64.0, realizations: 100, seed: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloNmse {
    pub f_s: f64,
    pub mean: f64,
    pub std_error: f64,
    pub realizations: usize,
}

/// Empirical NMSE of sampling at `f_s` and reconstructing with the optimal
/// filter, averaged over independent realizations.
pub fn empirical_nmse(model: &PsdModel, f_s: f64, opts: &MonteCarloOptions) -> Result<MonteCarloNmse> {
    if !(f_s > 0.0) {
        return Err(invalid(format!("sampling rate must be positive, got {f_s}")));
    }
    if opts.realizations < 2 || opts.samples < 2 {
        return Err(invalid("Monte-Carlo needs at least 2 realizations of 2 samples"));
    }
    let fine_target = opts.fine_rate_factor * model.characteristic_frequency();
    let m = (fine_target / f_s).ceil().max(1.0) as usize;
    let fine_rate = m as f64 * f_s;
    let n = m * opts.samples;
    let filter = ReconstructionFilter::Optimal(model.clone());
    let sigma_x2 = model.sigma_x2();

    let runs: Vec<f64> = (0..opts.realizations)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(r as u64);
            let x = shaped_gaussian(model, fine_rate, n, &mut rng)?;
            let samples: Vec<f64> = x.iter().step_by(m).copied().collect();
            let xhat = reconstruct_samples(&samples, f_s, &filter, m)?;
            let err: f64 = x.iter().zip(&xhat).map(|(a, b)| (a - b).powi(2)).sum();
            Ok(err / n as f64 / sigma_x2)
        })
        .collect::<Result<_>>()?;

    let k = runs.len() as f64;
    let mean = runs.iter().sum::<f64>() / k;
    let var = runs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    Ok(MonteCarloNmse { f_s, mean, std_error: (var / k).sqrt(), realizations: runs.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthesized_power_and_determinism() {
        let m = PsdModel::unimodal_for_band(0.032, 1e6).unwrap();
        let a = synthesize_shaped_gaussian(&m, 64e6, 1 << 16, 9).unwrap();
        let b = synthesize_shaped_gaussian(&m, 64e6, 1 << 16, 9).unwrap();
        assert_eq!(a, b);
        let p = a.iter().map(|v| v * v).sum::<f64>() / a.len() as f64;
        assert!((p / 0.032 - 1.0).abs() < 0.05, "power {p}");
        let c = synthesize_shaped_gaussian(&m, 64e6, 1 << 16, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn oversampled_flat_band_is_recovered() {
        let m = PsdModel::flat(0.032, 1e6).unwrap();
        let opts = MonteCarloOptions { samples: 512, realizations: 8, ..Default::default() };
        let r = empirical_nmse(&m, 2.5e6, &opts).unwrap();
        assert!(r.mean < 1e-4, "{}", r.mean);
    }

    #[test]
    fn gaussian_overload_is_rare() {
        // V_ref = K sigma with K^2 = 20; Chebyshev bounds the tail by 1/K^2
        let m = PsdModel::unimodal_for_band(0.032, 1e6).unwrap();
        let x = synthesize_shaped_gaussian(&m, 64e6, 1 << 16, 2).unwrap();
        let frac = x.iter().filter(|v| v.abs() >= 0.8).count() as f64 / x.len() as f64;
        assert!(frac <= crate::energy::overload_bound(20f64.sqrt()));
    }
}
