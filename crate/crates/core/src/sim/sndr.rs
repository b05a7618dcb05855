//! FFT-based SNDR of a converted single tone.

use rustfft::{num_complex::Complex64, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    /// For coherently sampled tones.
    #[default]
    Rectangular,
    Hann,
}

impl Window {
    fn weights(self, n: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; n],
            Window::Hann => {
                (0..n).map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos()).collect()
            }
        }
    }

    /// Bins on each side of a tone that still hold its leakage.
    fn spread(self) -> usize {
        match self {
            Window::Rectangular => 0,
            Window::Hann => 6,
        }
    }

    /// Bins next to DC that a constant offset leaks into.
    fn dc_spread(self) -> usize {
        match self {
            Window::Rectangular => 0,
            Window::Hann => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub freq_hz: f64,
    pub magnitude_dbfs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SndrReport {
    pub sndr_db: f64,
    /// `(SNDR - 1.76) / 6.02`.
    pub enob: f64,
    pub signal_bin: usize,
    pub signal_freq_hz: f64,
    /// Distance from the tone to the average noise bin, `SNDR + 10 log10(N/2)`.
    pub noise_floor_gap_db: f64,
    pub n_fft: usize,
    pub spectrum: Vec<SpectrumPoint>,
}

/// SNDR over the first Nyquist zone from the first `n_fft` samples.
///
/// `full_scale` is the amplitude of a full-scale sine in the units of
/// `samples`; it only sets the dBFS reference of the spectrum.
pub fn sndr_fft(samples: &[f64], f_s: f64, n_fft: usize, full_scale: f64, window: Window) -> Result<SndrReport> {
    if n_fft < 8 {
        return Err(invalid(format!("FFT length must be at least 8, got {n_fft}")));
    }
    if samples.len() < n_fft {
        return Err(invalid(format!("{} samples are fewer than the {n_fft}-point FFT", samples.len())));
    }
    let w = window.weights(n_fft);
    let mut buf: Vec<Complex64> =
        samples[..n_fft].iter().zip(&w).map(|(&x, &wi)| Complex64::new(x * wi, 0.0)).collect();
    FftPlanner::<f64>::new().plan_fft_forward(n_fft).process(&mut buf);

    let half = n_fft / 2;
    let one_sided = |k: usize| if k == 0 || (k == half && n_fft.is_multiple_of(2)) { 1.0 } else { 2.0 };
    let power: Vec<f64> = (0..=half).map(|k| one_sided(k) * buf[k].norm_sqr()).collect();

    let spread = window.spread();
    let first = 1 + window.dc_spread();
    let signal_bin = (first..=half)
        .max_by(|&a, &b| power[a].total_cmp(&power[b]))
        .ok_or_else(|| invalid("FFT too short for the window"))?;
    let lo = signal_bin.saturating_sub(spread).max(first);
    let hi = (signal_bin + spread).min(half);
    let signal: f64 = power[lo..=hi].iter().sum();
    let noise: f64 = power[first..=half].iter().sum::<f64>() - signal;
    let sndr_db = 10.0 * (signal / noise).log10();

    let coherent_gain: f64 = w.iter().sum();
    let spectrum = (0..=half)
        .map(|k| {
            let amp = one_sided(k) * buf[k].norm() / coherent_gain;
            SpectrumPoint {
                freq_hz: k as f64 * f_s / n_fft as f64,
                magnitude_dbfs: 20.0 * (amp / full_scale).max(1e-300).log10(),
            }
        })
        .collect();

    Ok(SndrReport {
        sndr_db,
        enob: (sndr_db - 1.76) / 6.02,
        signal_bin,
        signal_freq_hz: signal_bin as f64 * f_s / n_fft as f64,
        noise_floor_gap_db: sndr_db + 10.0 * (n_fft as f64 / 2.0).log10(),
        n_fft,
        spectrum,
    })
}

/// Frequency of the odd FFT bin nearest `target`, so a tone there is
/// coherent and visits as many distinct phases as possible.
pub fn coherent_input_frequency(target: f64, f_s: f64, n_fft: usize) -> Result<f64> {
    if n_fft < 4 || !(f_s > 0.0) || !(target > 0.0 && target < 0.5 * f_s) {
        return Err(invalid(format!("no coherent bin for {target} Hz at f_s = {f_s} Hz")));
    }
    let exact = target / f_s * n_fft as f64;
    let below = {
        let b = exact.floor() as usize;
        if b % 2 == 1 {
            b
        } else {
            b.saturating_sub(1)
        }
    };
    let above = below + 2;
    let top = n_fft / 2 - 1;
    let bin =
        if above <= top && (above as f64 - exact).abs() < (exact - below as f64).abs() { above } else { below.max(1) };
    Ok(bin as f64 * f_s / n_fft as f64)
}

/// Ideal n-bit SNDR of a full-scale sine, `6.02 n + 1.76` dB.
pub fn ideal_sndr_db(bits: u32) -> f64 {
    6.02 * bits as f64 + 1.76
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tone(bin: usize, n: usize, amp: f64) -> Vec<f64> {
        (0..n).map(|i| amp * (2.0 * PI * (bin * i) as f64 / n as f64).sin()).collect()
    }

    #[test]
    fn coherent_bin_for_the_benchmark_tone() {
        let f = coherent_input_frequency(19.8e6, 40e6, 1024).unwrap();
        assert!((f - 507.0 * 40e6 / 1024.0).abs() < 1e-6);
        assert!(coherent_input_frequency(30e6, 40e6, 1024).is_err());
    }

    #[test]
    fn pure_tone_is_limited_by_arithmetic() {
        let x = tone(101, 1024, 1.0);
        let r = sndr_fft(&x, 1.0, 1024, 1.0, Window::Rectangular).unwrap();
        assert_eq!(r.signal_bin, 101);
        assert!(r.sndr_db > 120.0, "{}", r.sndr_db);
        assert!(r.spectrum[101].magnitude_dbfs.abs() < 1e-9);
    }

    #[test]
    fn quantized_tone_follows_six_db_rule() {
        let n = 4096;
        let x: Vec<f64> = tone(1021, n, 127.5).iter().map(|v| (v + 128.0).floor().clamp(0.0, 255.0)).collect();
        let r = sndr_fft(&x, 1.0, n, 128.0, Window::Rectangular).unwrap();
        assert!((r.sndr_db - ideal_sndr_db(8)).abs() < 1.0, "{}", r.sndr_db);
    }

    #[test]
    fn hann_window_handles_incoherent_tone() {
        let n = 4096;
        let x: Vec<f64> =
            (0..n).map(|i| 127.5 * (2.0 * PI * 0.1234567 * i as f64).sin()).map(|v| (v + 128.0).floor()).collect();
        let r = sndr_fft(&x, 1.0, n, 128.0, Window::Hann).unwrap();
        assert!((r.sndr_db - ideal_sndr_db(8)).abs() < 1.5, "{}", r.sndr_db);
    }

    #[test]
    fn too_few_samples() {
        assert!(sndr_fft(&[0.0; 100], 1.0, 1024, 1.0, Window::Rectangular).is_err());
    }
}
