//! Interpolation of uniform samples onto a finer grid.
//!
//! Samples are treated as one period of a periodic sequence. Their DFT is
//! replicated across the fine grid's band and weighted by the filter gain,
//! which is the frequency-domain form of `x(t) = sum_k g(t - k T_s) x[k]`.

use rustfft::{num_complex::Complex64, FftPlanner};

use crate::error::{invalid, Result};
use crate::psd::PsdModel;
use crate::sampling::reconstruction_filter_response;

#[derive(Debug, Clone)]
pub enum ReconstructionFilter {
    /// MSE-optimal gain for the given input spectrum.
    Optimal(PsdModel),
    /// Brick-wall lowpass at `f_s/2`, gain 1/2 exactly at the edge.
    IdealLowpass,
}

impl ReconstructionFilter {
    pub fn gain(&self, f_s: f64, f: f64) -> f64 {
        match self {
            ReconstructionFilter::Optimal(m) => reconstruction_filter_response(m, f_s, f),
            ReconstructionFilter::IdealLowpass => {
                let edge = 0.5 * f_s;
                let af = f.abs();
                if af < edge {
                    1.0
                } else if af == edge {
                    0.5
                } else {
                    0.0
                }
            }
        }
    }
}

/// Interpolate `samples` taken at `f_s` onto a grid `oversample` times finer.
pub fn reconstruct_samples(
    samples: &[f64],
    f_s: f64,
    filter: &ReconstructionFilter,
    oversample: usize,
) -> Result<Vec<f64>> {
    let l = samples.len();
    if l == 0 {
        return Err(invalid("nothing to reconstruct"));
    }
    if oversample == 0 {
        return Err(invalid("oversampling factor must be at least 1"));
    }
    let n = l * oversample;
    let mut planner = FftPlanner::<f64>::new();

    let mut y: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    planner.plan_fft_forward(l).process(&mut y);

    let df = f_s / l as f64;
    let m = oversample as f64;
    let mut x: Vec<Complex64> = (0..n)
        .map(|k| {
            let signed = if k < n.div_ceil(2) { k as f64 } else { k as f64 - n as f64 };
            y[k % l] * (m * filter.gain(f_s, signed * df))
        })
        .collect();
    planner.plan_fft_inverse(n).process(&mut x);
    Ok(x.iter().map(|c| c.re / n as f64).collect())
}
