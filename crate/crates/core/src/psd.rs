//! Power spectral densities of the stationary input and their aliased
//! replicas.
//!
//! All densities are two-sided and even in frequency. Each model knows the
//! frequency beyond which it is treated as zero (`cutoff`), which fixes how
//! many replicas enter an aliasing sum.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quad;

/// Replicas whose density is below this fraction of the peak are dropped.
pub const REPLICA_FLOOR: f64 = 1e-12;

/// Relative tolerance of all PSD integrals (scaled by the signal power).
pub const QUAD_REL_TOL: f64 = 1e-9;

fn gaussian_reach(sigma: f64) -> f64 {
    sigma * (2.0 * (1.0 / REPLICA_FLOOR).ln()).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsdKind {
    Flat,
    Unimodal,
    Multimodal,
    Tabulated,
}

/// Piecewise-linear density given on the non-negative frequency axis and
/// mirrored to negative frequencies. Zero beyond the last table entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedPsd {
    freqs: Vec<f64>,
    densities: Vec<f64>,
    sigma_x2: f64,
}

impl TabulatedPsd {
    /// Build from `(frequency_hz, density_v2_per_hz)` pairs. The table must
    /// start at 0 Hz and be strictly increasing in frequency.
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid("tabulated PSD needs at least two points"));
        }
        if points[0].0 != 0.0 {
            return Err(invalid("tabulated PSD must start at 0 Hz"));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(invalid("tabulated PSD frequencies must be strictly increasing"));
            }
        }
        if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return Err(invalid("tabulated PSD contains non-finite values"));
        }
        let freqs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let densities: Vec<f64> = points.iter().map(|p| p.1.max(0.0)).collect();
        // exact integral of the linear interpolant, both halves
        let sigma_x2 = 2.0
            * freqs.windows(2).zip(densities.windows(2)).map(|(f, d)| 0.5 * (f[1] - f[0]) * (d[0] + d[1])).sum::<f64>();
        if !(sigma_x2 > 0.0) {
            return Err(invalid("tabulated PSD has zero total power"));
        }
        Ok(Self { freqs, densities, sigma_x2 })
    }

    /// Load a two-column CSV (`frequency_hz, density_v2_per_hz`) holding the
    /// positive-frequency half. A header row is optional.
    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let mut rdr =
            csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).comment(Some(b'#')).from_path(path)?;
        let mut points = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() < 2 {
                return Err(Error::Config(format!("PSD table row {} has fewer than two columns", i + 1)));
            }
            let parsed = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
            match parsed {
                (Ok(f), Ok(d)) => points.push((f, d)),
                _ if i == 0 => continue, // header
                _ => {
                    return Err(Error::Config(format!("PSD table row {} is not numeric", i + 1)));
                }
            }
        }
        Self::new(&points)
    }

    pub fn max_frequency(&self) -> f64 {
        *self.freqs.last().unwrap()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.freqs.iter().copied().zip(self.densities.iter().copied())
    }

    fn density_abs(&self, af: f64) -> f64 {
        let last = self.max_frequency();
        if af > last {
            return 0.0;
        }
        let i = self.freqs.partition_point(|&x| x <= af);
        if i >= self.freqs.len() {
            return *self.densities.last().unwrap();
        }
        let (f0, f1) = (self.freqs[i - 1], self.freqs[i]);
        let (d0, d1) = (self.densities[i - 1], self.densities[i]);
        (d0 + (d1 - d0) * (af - f0) / (f1 - f0)).max(0.0)
    }

    fn support_edge(&self) -> f64 {
        match self.densities.iter().rposition(|&d| d > 0.0) {
            Some(i) if i + 1 < self.freqs.len() => self.freqs[i + 1],
            _ => self.max_frequency(),
        }
    }

    fn scaled(&self, factor: f64) -> Self {
        Self {
            freqs: self.freqs.clone(),
            densities: self.densities.iter().map(|d| d * factor).collect(),
            sigma_x2: self.sigma_x2 * factor,
        }
    }
}

/// Spectral density model of a zero-mean wide-sense stationary input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PsdModel {
    /// Constant density on `[-f_m, f_m]`.
    Flat {
        sigma_x2: f64,
        f_m: f64,
    },
    /// Zero-centred Gaussian of width `sigma`.
    Unimodal {
        sigma_x2: f64,
        f_m: f64,
        sigma: f64,
    },
    /// Pair of Gaussians of width `sigma` centred at `±f_m`.
    Multimodal {
        sigma_x2: f64,
        f_m: f64,
        sigma: f64,
    },
    Tabulated(TabulatedPsd),
}

impl PsdModel {
    pub fn flat(sigma_x2: f64, f_m: f64) -> Result<Self> {
        check_power(sigma_x2)?;
        check_freq("f_m", f_m)?;
        Ok(PsdModel::Flat { sigma_x2, f_m })
    }

    pub fn unimodal(sigma_x2: f64, f_m: f64, sigma: f64) -> Result<Self> {
        check_power(sigma_x2)?;
        check_freq("f_m", f_m)?;
        check_freq("sigma", sigma)?;
        Ok(PsdModel::Unimodal { sigma_x2, f_m, sigma })
    }

    /// Unimodal model with the customary width `sigma = f_m / 3`.
    pub fn unimodal_for_band(sigma_x2: f64, f_m: f64) -> Result<Self> {
        Self::unimodal(sigma_x2, f_m, f_m / 3.0)
    }

    pub fn multimodal(sigma_x2: f64, f_m: f64, sigma: f64) -> Result<Self> {
        check_power(sigma_x2)?;
        check_freq("f_m", f_m)?;
        check_freq("sigma", sigma)?;
        Ok(PsdModel::Multimodal { sigma_x2, f_m, sigma })
    }

    /// Multimodal model with the customary width `sigma = f_m / 6`.
    pub fn multimodal_for_band(sigma_x2: f64, f_m: f64) -> Result<Self> {
        Self::multimodal(sigma_x2, f_m, f_m / 6.0)
    }

    pub fn tabulated(table: TabulatedPsd) -> Self {
        PsdModel::Tabulated(table)
    }

    pub fn kind(&self) -> PsdKind {
        match self {
            PsdModel::Flat { .. } => PsdKind::Flat,
            PsdModel::Unimodal { .. } => PsdKind::Unimodal,
            PsdModel::Multimodal { .. } => PsdKind::Multimodal,
            PsdModel::Tabulated(_) => PsdKind::Tabulated,
        }
    }

    /// Nominal total power in V².
    pub fn sigma_x2(&self) -> f64 {
        match self {
            PsdModel::Flat { sigma_x2, .. }
            | PsdModel::Unimodal { sigma_x2, .. }
            | PsdModel::Multimodal { sigma_x2, .. } => *sigma_x2,
            PsdModel::Tabulated(t) => t.sigma_x2,
        }
    }

    /// Characteristic frequency: band edge, Gaussian scale or peak location.
    pub fn characteristic_frequency(&self) -> f64 {
        match self {
            PsdModel::Flat { f_m, .. } | PsdModel::Unimodal { f_m, .. } | PsdModel::Multimodal { f_m, .. } => *f_m,
            PsdModel::Tabulated(t) => t.support_edge(),
        }
    }

    /// Same shape rescaled to total power `sigma_x2`.
    pub fn with_power(&self, sigma_x2: f64) -> Result<Self> {
        check_power(sigma_x2)?;
        Ok(match self {
            PsdModel::Flat { f_m, .. } => PsdModel::Flat { sigma_x2, f_m: *f_m },
            PsdModel::Unimodal { f_m, sigma, .. } => PsdModel::Unimodal { sigma_x2, f_m: *f_m, sigma: *sigma },
            PsdModel::Multimodal { f_m, sigma, .. } => PsdModel::Multimodal { sigma_x2, f_m: *f_m, sigma: *sigma },
            PsdModel::Tabulated(t) => PsdModel::Tabulated(t.scaled(sigma_x2 / t.sigma_x2)),
        })
    }

    /// `S_x(f)` in V²/Hz. Tabulated models reject frequencies beyond the table.
    pub fn psd_eval(&self, f: f64) -> Result<f64> {
        if let PsdModel::Tabulated(t) = self {
            let hi = t.max_frequency();
            if !(f.abs() <= hi) {
                return Err(Error::Domain { f, lo: -hi, hi });
            }
        }
        Ok(self.density(f))
    }

    /// Density with the support convention used inside aliasing sums:
    /// tabulated models are zero outside their table.
    pub fn density(&self, f: f64) -> f64 {
        let af = f.abs();
        match *self {
            PsdModel::Flat { sigma_x2, f_m } => {
                if af <= f_m {
                    sigma_x2 / (2.0 * f_m)
                } else {
                    0.0
                }
            }
            PsdModel::Unimodal { sigma_x2, sigma, .. } => {
                let alpha = sigma_x2 / (2.0 * std::f64::consts::PI * sigma * sigma).sqrt();
                alpha * (-af * af / (2.0 * sigma * sigma)).exp()
            }
            PsdModel::Multimodal { sigma_x2, f_m, sigma } => {
                let alpha = sigma_x2 / (2.0 * std::f64::consts::PI * sigma * sigma).sqrt();
                let two_s2 = 2.0 * sigma * sigma;
                0.5 * alpha * ((-(af - f_m).powi(2) / two_s2).exp() + (-(af + f_m).powi(2) / two_s2).exp())
            }
            PsdModel::Tabulated(ref t) => t.density_abs(af),
        }
    }

    /// Upper bound on the density over all frequencies.
    pub fn peak_bound(&self) -> f64 {
        match *self {
            PsdModel::Flat { sigma_x2, f_m } => sigma_x2 / (2.0 * f_m),
            PsdModel::Unimodal { sigma_x2, sigma, .. } => {
                sigma_x2 / (2.0 * std::f64::consts::PI * sigma * sigma).sqrt()
            }
            PsdModel::Multimodal { sigma_x2, f_m, sigma } => {
                // the far lobe sits at least f_m away from any f >= 0
                let alpha = sigma_x2 / (2.0 * std::f64::consts::PI * sigma * sigma).sqrt();
                0.5 * alpha * (1.0 + (-f_m * f_m / (2.0 * sigma * sigma)).exp())
            }
            PsdModel::Tabulated(ref t) => t.densities.iter().copied().fold(0.0, f64::max),
        }
    }

    /// Frequency beyond which the density is treated as zero: the exact
    /// support edge for compact models, otherwise where the density drops
    /// below [`REPLICA_FLOOR`] times its peak.
    pub fn cutoff(&self) -> f64 {
        match *self {
            PsdModel::Flat { f_m, .. } => f_m,
            PsdModel::Unimodal { sigma, .. } => gaussian_reach(sigma),
            PsdModel::Multimodal { f_m, sigma, .. } => f_m + gaussian_reach(sigma),
            PsdModel::Tabulated(ref t) => t.support_edge(),
        }
    }

    /// Bandlimit `f_m` for compactly supported models.
    pub fn bandlimit(&self) -> Option<f64> {
        match self {
            PsdModel::Flat { f_m, .. } => Some(*f_m),
            PsdModel::Tabulated(t) => Some(t.support_edge()),
            PsdModel::Unimodal { .. } | PsdModel::Multimodal { .. } => None,
        }
    }

    /// Non-negative frequencies where the density has a jump, kink or peak.
    /// Used as quadrature breakpoints.
    pub(crate) fn features(&self) -> Vec<f64> {
        match self {
            PsdModel::Flat { f_m, .. } => vec![*f_m],
            PsdModel::Unimodal { .. } => vec![0.0, self.cutoff()],
            PsdModel::Multimodal { f_m, .. } => vec![*f_m, self.cutoff()],
            PsdModel::Tabulated(t) => t.freqs.clone(),
        }
    }

    /// Numerical integral of the density over all frequencies.
    pub fn variance(&self) -> f64 {
        let tol = QUAD_REL_TOL * self.sigma_x2();
        let edge = match self {
            // integrate further out than the replica cutoff so the tail is negligible
            PsdModel::Unimodal { sigma, .. } => 12.0 * sigma,
            PsdModel::Multimodal { f_m, sigma, .. } => f_m + 12.0 * sigma,
            _ => self.cutoff(),
        };
        let g = |f: f64| self.density(f);
        2.0 * quad::integrate_with_breaks(&g, 0.0, edge, &self.features(), 0.5 * tol)
    }

    /// `sum_k S_x(f - k f_s)` over every replica that reaches `f` under the
    /// model's truncation rule.
    pub fn aliased_sum(&self, f: f64, f_s: f64) -> f64 {
        self.aliased_sum_with_cutoff(f, f_s, self.cutoff())
    }

    /// Aliasing sum keeping replicas with `|f - k f_s| <= cutoff`.
    pub fn aliased_sum_with_cutoff(&self, f: f64, f_s: f64, cutoff: f64) -> f64 {
        let (lo, hi) = replica_range(f, f_s, cutoff);
        (lo..=hi).map(|k| self.density(f - k as f64 * f_s)).sum()
    }

    /// Densities of the replicas `S_x(f - k f_s)` that enter the aliasing sum.
    pub(crate) fn replicas_into(&self, f: f64, f_s: f64, out: &mut Vec<f64>) {
        out.clear();
        let (lo, hi) = replica_range(f, f_s, self.cutoff());
        out.extend((lo..=hi).map(|k| self.density(f - k as f64 * f_s)));
    }
}

fn replica_range(f: f64, f_s: f64, cutoff: f64) -> (i64, i64) {
    let lo = ((f - cutoff) / f_s).ceil() as i64;
    let hi = ((f + cutoff) / f_s).floor() as i64;
    // the baseband term is always kept
    (lo.min(0), hi.max(0))
}

fn check_power(sigma_x2: f64) -> Result<()> {
    if sigma_x2 > 0.0 && sigma_x2.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("signal power must be positive, got {sigma_x2}")))
    }
}

fn check_freq(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be a positive frequency, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SX2: f64 = 0.032;
    const FM: f64 = 19.8e6;

    fn all_models() -> Vec<PsdModel> {
        let flat = PsdModel::flat(SX2, FM).unwrap();
        let table: Vec<(f64, f64)> = (0..=40)
            .map(|i| {
                let f = i as f64 * 1e6;
                (f, if f <= 30e6 { 1e-9 * (1.0 - f / 40e6) } else { 0.0 })
            })
            .collect();
        vec![
            flat,
            PsdModel::unimodal_for_band(SX2, FM).unwrap(),
            PsdModel::multimodal_for_band(SX2, FM).unwrap(),
            PsdModel::tabulated(TabulatedPsd::new(&table).unwrap()),
        ]
    }

    #[test]
    fn flat_density_value() {
        let m = PsdModel::flat(SX2, FM).unwrap();
        let d = m.psd_eval(0.0).unwrap();
        assert!((d - 8.080808080808081e-10).abs() < 1e-22);
        assert_eq!(m.psd_eval(FM * 1.0001).unwrap(), 0.0);
    }

    #[test]
    fn unimodal_peak_is_alpha() {
        let m = PsdModel::unimodal_for_band(SX2, FM).unwrap();
        let sigma = FM / 3.0;
        let alpha = SX2 / (2.0 * std::f64::consts::PI * sigma * sigma).sqrt();
        assert!((m.psd_eval(0.0).unwrap() - alpha).abs() <= 1e-15 * alpha);
    }

    #[test]
    fn variance_matches_power_for_all_kinds() {
        for m in all_models() {
            let v = m.variance();
            let rel = (v - m.sigma_x2()).abs() / m.sigma_x2();
            assert!(rel < 1e-6, "{:?}: variance {v} vs {}", m.kind(), m.sigma_x2());
        }
    }

    #[test]
    fn tabulated_trapezoid_of_flat_samples() {
        // flat density sampled on a 0.1 MHz grid, stepping to zero right at f_m
        let d = SX2 / (2.0 * FM);
        let mut pts: Vec<(f64, f64)> = (0..=198).map(|i| (i as f64 * 1e5, d)).collect();
        pts.push((FM + 1.0, 0.0));
        let t = PsdModel::tabulated(TabulatedPsd::new(&pts).unwrap());
        // the one-hertz ramp adds d * 1 Hz of power per side
        assert!((t.variance() - (SX2 + d)).abs() / SX2 < 1e-6);
        assert!((t.variance() - SX2).abs() / SX2 < 1e-6);
    }

    #[test]
    fn tabulated_out_of_domain_is_an_error() {
        let t = PsdModel::tabulated(TabulatedPsd::new(&[(0.0, 1.0), (10.0, 0.0)]).unwrap());
        assert!(matches!(t.psd_eval(10.5), Err(Error::Domain { .. })));
        assert!(t.psd_eval(-10.0).is_ok());
    }

    #[test]
    fn tabulated_rejects_bad_tables() {
        assert!(TabulatedPsd::new(&[(1.0, 1.0), (2.0, 1.0)]).is_err());
        assert!(TabulatedPsd::new(&[(0.0, 1.0), (0.0, 1.0)]).is_err());
        assert!(TabulatedPsd::new(&[(0.0, 0.0), (1.0, 0.0)]).is_err());
    }

    #[test]
    fn bandlimits() {
        assert_eq!(PsdModel::flat(SX2, FM).unwrap().bandlimit(), Some(FM));
        assert_eq!(PsdModel::unimodal_for_band(SX2, FM).unwrap().bandlimit(), None);
        assert_eq!(PsdModel::multimodal_for_band(SX2, FM).unwrap().bandlimit(), None);
        let t = TabulatedPsd::new(&[(0.0, 1.0), (5.0, 1.0), (7.0, 0.0), (9.0, 0.0)]).unwrap();
        assert_eq!(PsdModel::tabulated(t).bandlimit(), Some(7.0));
    }

    #[test]
    fn aliased_sum_at_nyquist_is_single_replica() {
        let m = PsdModel::flat(SX2, FM).unwrap();
        for i in 0..=20 {
            let f = -FM + i as f64 * FM / 10.0;
            if f.abs() < FM {
                assert_eq!(m.aliased_sum(f, 2.0 * FM), m.density(f));
            }
        }
    }

    #[test]
    fn aliased_sum_half_rate_doubles_flat_density() {
        let m = PsdModel::flat(SX2, FM).unwrap();
        // f - k f_s for k in {-1, 0, 1} is {5/4, 1/4, -3/4} f_m: two replicas inside the band
        let v = m.aliased_sum(FM / 4.0, FM);
        assert!((v - 2.0 * m.density(0.0)).abs() < 1e-24);
    }

    #[test]
    fn aliased_sum_converges_for_large_rates() {
        let m = PsdModel::unimodal_for_band(SX2, FM).unwrap();
        let f = 0.3 * FM;
        let v = m.aliased_sum(f, 1e3 * FM);
        assert_eq!(v, m.density(f));
    }

    #[test]
    fn with_power_rescales() {
        for m in all_models() {
            let s = m.with_power(0.5).unwrap();
            assert!((s.variance() - 0.5).abs() < 1e-6 * 0.5);
        }
    }

    proptest! {
        #[test]
        fn evenness(f in -1e8f64..1e8) {
            for m in all_models() {
                prop_assert_eq!(m.density(f), m.density(-f));
            }
        }

        #[test]
        fn aliased_sum_is_periodic(f in -5e6f64..5e6, fs in 5e6f64..6e7) {
            for m in all_models() {
                let a = m.aliased_sum(f, fs);
                let b = m.aliased_sum(f + fs, fs);
                let peak = m.peak_bound();
                prop_assert!((a - b).abs() <= 1e-9 * peak + 1e-12 * a.abs());
            }
        }

        #[test]
        fn truncation_is_monotone(f in -1e7f64..1e7, fs in 2e6f64..6e7, c in 1e6f64..1e8) {
            for m in all_models() {
                let lo = m.aliased_sum_with_cutoff(f, fs, c);
                let hi = m.aliased_sum_with_cutoff(f, fs, c * 1.5);
                prop_assert!(hi >= lo);
                prop_assert!(m.aliased_sum(f, fs) >= m.density(f));
            }
        }
    }
}
