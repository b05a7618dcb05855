//! Timing, consumption and harvesting formulas of the eSampling SAR ADC.
//!
//! Energies are per sample, in joules. The hold-phase consumption is the
//! sum of the comparator, SAR-logic and DAC terms and is a quadratic in the
//! reference voltage, `E_hold = a1 V_ref + a2 V_ref^2`.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Which DAC term enters the hold-phase total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DacEnergyForm {
    /// `rho_n C_u V_ref^2`, the grouping used in the hold-energy total.
    #[default]
    Grouped,
    /// `rho_n n C_u V_ref^2`, the stand-alone DAC expression with the extra `n`.
    PerBit,
}

/// Circuit constants of an n-bit merged-capacitor-switching SAR ADC.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdcCircuitParams {
    /// Resolution in bits.
    pub bits: u32,
    /// DAC unit capacitance, F.
    pub unit_cap: f64,
    /// Comparator load capacitance, F.
    pub comparator_load: f64,
    /// Flip-flop input capacitance of the SAR logic, F.
    pub flip_flop_cap: f64,
    /// SAR-logic activity factor in `[0, 1]`.
    pub logic_activity: f64,
    /// Comparator regeneration gain.
    pub regen_gain: f64,
    /// Drain-current to transconductance ratio of the comparator input pair, V.
    pub overdrive_voltage: f64,
    /// Sampling-switch on-resistance, ohm. Unknown for some presets.
    pub switch_on_resistance: Option<f64>,
    /// Equivalent resistance of the binary-scaled DAC switches, ohm.
    pub dac_switch_resistance: Option<f64>,
    /// Number of RC time constants allowed for settling.
    pub time_constants: f64,
    pub v_ref: f64,
    /// Reference-to-RMS ratio `K = V_ref / sigma_x`.
    pub overload_factor: f64,
    /// Acquisition time used in place of `alpha_tau R_on C_h` when set, s.
    pub acquisition_time_override: Option<f64>,
    pub dac_form: DacEnergyForm,
}

impl AdcCircuitParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("unit_cap", self.unit_cap),
            ("time_constants", self.time_constants),
            ("v_ref", self.v_ref),
            ("regen_gain", self.regen_gain),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        let non_negative = [
            ("comparator_load", self.comparator_load),
            ("flip_flop_cap", self.flip_flop_cap),
            ("overdrive_voltage", self.overdrive_voltage),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be non-negative, got {v}")));
            }
        }
        for (name, v) in [
            ("switch_on_resistance", self.switch_on_resistance),
            ("dac_switch_resistance", self.dac_switch_resistance),
            ("acquisition_time_override", self.acquisition_time_override),
        ] {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(invalid(format!("{name} must be non-negative, got {v}")));
                }
            }
        }
        if !(0.0..=1.0).contains(&self.logic_activity) {
            return Err(invalid(format!("logic_activity must lie in [0, 1], got {}", self.logic_activity)));
        }
        if !(self.overload_factor > 1.0) {
            return Err(invalid(format!("overload factor K must exceed 1, got {}", self.overload_factor)));
        }
        if !(1..=30).contains(&self.bits) {
            return Err(invalid(format!("bit count must lie in [1, 30], got {}", self.bits)));
        }
        Ok(())
    }

    /// Total DAC array capacitance, `2^(n-1) C_u`.
    pub fn hold_capacitance(&self) -> f64 {
        2f64.powi(self.bits as i32 - 1) * self.unit_cap
    }

    /// Input RMS implied by the reference, `V_ref / K`.
    pub fn sigma_x(&self) -> f64 {
        self.v_ref / self.overload_factor
    }

    pub fn sigma_x2(&self) -> f64 {
        self.sigma_x().powi(2)
    }

    pub fn with_bits(&self, bits: u32) -> Self {
        Self { bits, ..self.clone() }
    }
}

/// Efficiency of the harvesting path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Efficiency {
    Fixed(f64),
    /// Derived from the RC charging law for the actual hold time.
    FromRc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarvesterParams {
    /// Series resistance of the harvesting path, ohm.
    pub resistance: f64,
    /// Storage capacitor, F.
    pub capacitance: f64,
    pub efficiency: Efficiency,
    /// Sampling periods of charging between transfers to external storage.
    pub transfer_period_samples: usize,
    /// Time spent transferring, during which nothing is harvested, s.
    pub transfer_dead_time: f64,
    /// Only charge while the input exceeds the capacitor voltage.
    pub ideal_diode: bool,
}

impl HarvesterParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.resistance > 0.0 && self.resistance.is_finite()) {
            return Err(invalid(format!("harvester resistance must be positive, got {}", self.resistance)));
        }
        if !(self.capacitance > 0.0 && self.capacitance.is_finite()) {
            return Err(invalid(format!("harvester capacitance must be positive, got {}", self.capacitance)));
        }
        if let Efficiency::Fixed(eta) = self.efficiency {
            if !(0.0..=1.0).contains(&eta) {
                return Err(invalid(format!("efficiency must lie in [0, 1], got {eta}")));
            }
        }
        if !(self.transfer_dead_time >= 0.0 && self.transfer_dead_time.is_finite()) {
            return Err(invalid("transfer dead time must be non-negative"));
        }
        Ok(())
    }

    /// Efficiency for a given hold time.
    pub fn eta(&self, t_h: f64) -> f64 {
        match self.efficiency {
            Efficiency::Fixed(eta) => eta,
            Efficiency::FromRc => harvester_efficiency_rc(self.resistance, self.capacitance, t_h),
        }
    }

    /// Fixed efficiency, or an error for RC-derived efficiency.
    pub fn fixed_eta(&self) -> Result<f64> {
        match self.efficiency {
            Efficiency::Fixed(eta) => Ok(eta),
            Efficiency::FromRc => Err(Error::Config("this analysis requires a fixed harvesting efficiency".into())),
        }
    }
}

/// Split of one sampling period into acquisition and hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingPlan {
    pub t_aq: f64,
    pub t_h: f64,
    pub t_s: f64,
    pub f_s: f64,
}

impl TimingPlan {
    pub fn new(t_aq: f64, t_h: f64) -> Result<Self> {
        if !(t_aq >= 0.0 && t_h >= 0.0) || !(t_aq + t_h > 0.0) {
            return Err(invalid(format!("invalid timing: T_aq={t_aq}, T_h={t_h}")));
        }
        let t_s = t_aq + t_h;
        Ok(Self { t_aq, t_h, t_s, f_s: 1.0 / t_s })
    }

    /// Plan sampling at `f_s` with the given acquisition time.
    pub fn from_rate(t_aq: f64, f_s: f64) -> Result<Self> {
        if !(f_s > 0.0) {
            return Err(invalid(format!("sampling rate must be positive, got {f_s}")));
        }
        let t_s = 1.0 / f_s;
        if !(t_s > t_aq) {
            return Err(invalid(format!("sampling rate {f_s} Hz leaves no hold time after T_aq = {t_aq} s")));
        }
        Ok(Self { t_aq, t_h: t_s - t_aq, t_s, f_s })
    }

    /// Check the hold window is long enough to resolve every bit.
    pub fn validate_against(&self, p: &AdcCircuitParams) -> Result<()> {
        let min = min_hold_time(p)?;
        if self.t_h < min {
            return Err(Error::Infeasible(format!(
                "hold time {} s is shorter than the {} s needed for {} bits",
                self.t_h, min, p.bits
            )));
        }
        Ok(())
    }
}

/// Per-sample energy split of the hold phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBudget {
    pub e_comparator: f64,
    pub e_sar_logic: f64,
    pub e_dac: f64,
    pub e_hold: f64,
    /// Harvested energy per sample, when a timing plan is attached.
    pub e_harvested: Option<f64>,
    /// Linear coefficient, J/V.
    pub a1: f64,
    /// Quadratic coefficient, J/V².
    pub a2: f64,
    /// Comparator coefficient `gamma_n`, C.
    pub gamma: f64,
    /// DAC coefficient `rho_n`.
    pub rho: f64,
    pub e_ratio_db: Option<f64>,
}

impl EnergyBudget {
    /// `E_hold` re-evaluated from the polynomial form at a different reference.
    pub fn hold_at(&self, v_ref: f64) -> f64 {
        self.a1 * v_ref + self.a2 * v_ref * v_ref
    }
}

/// `alpha_tau R_on C_h`, or the configured override.
pub fn acquisition_time(p: &AdcCircuitParams) -> Result<f64> {
    if let Some(t) = p.acquisition_time_override {
        return Ok(t);
    }
    match p.switch_on_resistance {
        Some(r_on) => Ok(p.time_constants * r_on * p.hold_capacitance()),
        None => Err(Error::Config(
            "acquisition time needs either switch_on_resistance or an acquisition time override".into(),
        )),
    }
}

/// Shortest hold window that resolves all bits, `n alpha_tau R_q C_h`.
pub fn min_hold_time(p: &AdcCircuitParams) -> Result<f64> {
    match p.dac_switch_resistance {
        Some(r_q) => Ok(p.bits as f64 * p.time_constants * r_q * p.hold_capacitance()),
        None => Err(Error::Config("minimum hold time needs dac_switch_resistance".into())),
    }
}

/// `gamma_n = V_e C_c (n ln(1/A_k) + n(n+1)/2 ln 2 + n)`.
pub fn comparator_gamma(p: &AdcCircuitParams) -> Result<f64> {
    if !(p.regen_gain > 0.0) {
        return Err(invalid(format!("regeneration gain must be positive, got {}", p.regen_gain)));
    }
    let n = p.bits as f64;
    let shape = n * (1.0 / p.regen_gain).ln() + 0.5 * n * (n + 1.0) * LN_2 + n;
    Ok(p.overdrive_voltage * p.comparator_load * shape)
}

/// Dynamic-latch comparator energy, `n C_c V_ref^2 + 2 V_ref gamma_n`.
pub fn comparator_energy(p: &AdcCircuitParams) -> Result<f64> {
    let gamma = comparator_gamma(p)?;
    let n = p.bits as f64;
    Ok(n * p.comparator_load * p.v_ref * p.v_ref + 2.0 * p.v_ref * gamma)
}

/// SAR shift-register energy, `16 n^2 g C_s V_ref^2`.
pub fn sar_logic_energy(p: &AdcCircuitParams) -> f64 {
    let n = p.bits as f64;
    16.0 * n * n * p.logic_activity * p.flip_flop_cap * p.v_ref * p.v_ref
}

/// `rho_n = sum_{i=1}^{n-1} 2^(n-3-2i) (2^i - 1)`.
pub fn rho(bits: u32) -> Result<f64> {
    if bits < 2 {
        return Err(invalid(format!("MCS DAC energy needs at least 2 bits, got {bits}")));
    }
    let n = bits as i32;
    Ok((1..n).map(|i| 2f64.powi(n - 3 - 2 * i) * (2f64.powi(i) - 1.0)).sum())
}

/// Average MCS DAC switching energy per conversion.
pub fn dac_energy_avg(p: &AdcCircuitParams) -> Result<f64> {
    let base = rho(p.bits)? * p.unit_cap * p.v_ref * p.v_ref;
    Ok(match p.dac_form {
        DacEnergyForm::Grouped => base,
        DacEnergyForm::PerBit => base * p.bits as f64,
    })
}

/// Full hold-phase budget with the polynomial coefficients filled in.
pub fn hold_energy(p: &AdcCircuitParams) -> Result<EnergyBudget> {
    let gamma = comparator_gamma(p)?;
    let rho = rho(p.bits)?;
    let n = p.bits as f64;
    let dac_coef = match p.dac_form {
        DacEnergyForm::Grouped => rho * p.unit_cap,
        DacEnergyForm::PerBit => rho * n * p.unit_cap,
    };
    let a2 = dac_coef + n * p.comparator_load + 16.0 * n * n * p.flip_flop_cap * p.logic_activity;
    let a1 = 2.0 * gamma;
    let e_comparator = comparator_energy(p)?;
    let e_sar_logic = sar_logic_energy(p);
    let e_dac = dac_energy_avg(p)?;
    Ok(EnergyBudget {
        e_comparator,
        e_sar_logic,
        e_dac,
        e_hold: e_dac + e_comparator + e_sar_logic,
        e_harvested: None,
        a1,
        a2,
        gamma,
        rho,
        e_ratio_db: None,
    })
}

/// Expected harvested energy per sample, `(eta / R_h) T_h sigma_x^2`.
pub fn harvested_energy(t_h: f64, eta: f64, r_h: f64, sigma_x2: f64) -> f64 {
    eta / r_h * t_h * sigma_x2
}

/// RC-charging efficiency as a function of `x = R_h C_EH / T_h`.
pub fn efficiency_rc_ratio(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    // (1 - e^{-1/x}) via exp_m1 keeps precision for large x
    let charge = -(-1.0 / x).exp_m1();
    0.5 * x * charge * charge
}

/// `eta ~ (R_h C_EH / 2 T_h) (1 - e^{-T_h/(R_h C_EH)})^2`.
pub fn harvester_efficiency_rc(r_h: f64, c_eh: f64, t_h: f64) -> f64 {
    if t_h <= 0.0 {
        return 0.0;
    }
    efficiency_rc_ratio(r_h * c_eh / t_h)
}

/// Maximizer of [`efficiency_rc_ratio`], by golden-section search on `[0.1, 10]`.
pub fn efficiency_rc_argmax() -> f64 {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (0.1f64, 10.0f64);
    while b - a > 1e-12 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if efficiency_rc_ratio(c) > efficiency_rc_ratio(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

/// Harvesting capacitance that maximizes RC efficiency for a hold time `t_h`.
pub fn optimal_harvester_capacitance(r_h: f64, t_h: f64) -> f64 {
    efficiency_rc_argmax() * t_h / r_h
}

/// Harvested-to-consumed ratio, linear and in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyRatio {
    pub linear: f64,
    pub db: f64,
}

impl EnergyRatio {
    pub fn from_linear(linear: f64) -> Self {
        Self { linear, db: 10.0 * linear.log10() }
    }
}

/// `(eta/R_h)(T_s - T_aq) sigma_x^2 / (a2 K^2 sigma_x^2 + a1 K sigma_x)`.
pub fn energy_ratio(
    plan: &TimingPlan,
    budget: &EnergyBudget,
    eta: f64,
    r_h: f64,
    sigma_x2: f64,
    k: f64,
) -> Result<EnergyRatio> {
    if !(plan.t_s > plan.t_aq) {
        return Err(invalid("energy ratio needs T_s > T_aq"));
    }
    let harvested = harvested_energy(plan.t_s - plan.t_aq, eta, r_h, sigma_x2);
    let consumed = consumed_at_power(budget, sigma_x2, k);
    Ok(EnergyRatio::from_linear(harvested / consumed))
}

/// Hold energy written in terms of the input power, `a2 K^2 sigma^2 + a1 K sigma`.
pub fn consumed_at_power(budget: &EnergyBudget, sigma_x2: f64, k: f64) -> f64 {
    budget.a2 * k * k * sigma_x2 + budget.a1 * k * sigma_x2.sqrt()
}

/// Chebyshev bound on the overload probability, `P(|x| >= K sigma) <= 1/K^2`.
pub fn overload_bound(k: f64) -> f64 {
    1.0 / (k * k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> AdcCircuitParams {
        AdcCircuitParams {
            bits: 8,
            unit_cap: 10e-15,
            comparator_load: 5e-15,
            flip_flop_cap: 0.7e-15,
            logic_activity: 0.4,
            regen_gain: 1.8,
            overdrive_voltage: 0.05,
            switch_on_resistance: None,
            dac_switch_resistance: None,
            time_constants: 5.0,
            v_ref: 0.8,
            overload_factor: 20f64.sqrt(),
            acquisition_time_override: Some(2.5e-9),
            dac_form: DacEnergyForm::Grouped,
        }
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn acquisition_time_product_and_override() {
        let mut p = example();
        assert_eq!(acquisition_time(&p).unwrap(), 2.5e-9);
        p.acquisition_time_override = None;
        assert!(acquisition_time(&p).is_err());
        // C_h = 1 pF needs C_u = 1 pF / 2^7
        p.unit_cap = 1e-12 / 128.0;
        p.switch_on_resistance = Some(100.0);
        assert!(rel(acquisition_time(&p).unwrap(), 0.5e-9) < 1e-12);
        p.switch_on_resistance = Some(0.0);
        assert_eq!(acquisition_time(&p).unwrap(), 0.0);
    }

    #[test]
    fn min_hold_time_scaling() {
        let mut p = example();
        p.dac_switch_resistance = Some(50.0);
        // C_h = 128 * 10 fF = 1.28 pF; 8 * 5 * 50 * 1.28 pF = 2.56 ns
        assert!(rel(min_hold_time(&p).unwrap(), 2.56e-9) < 1e-12);
        let one = p.with_bits(1);
        let c_h1 = one.hold_capacitance();
        assert!(rel(min_hold_time(&one).unwrap(), 5.0 * 50.0 * c_h1) < 1e-12);
        // linear in n at fixed C_h
        let mut p16 = p.with_bits(16);
        p16.unit_cap = p.hold_capacitance() / 2f64.powi(15);
        assert!(rel(min_hold_time(&p16).unwrap(), 2.0 * min_hold_time(&p).unwrap()) < 1e-12);
    }

    #[test]
    fn comparator_energy_example() {
        let p = example();
        let gamma = comparator_gamma(&p).unwrap();
        // independent: 8 ln(1/1.8) + 36 ln 2 + 8
        let shape = 8.0 * (1.0f64 / 1.8).ln() + 36.0 * 2f64.ln() + 8.0;
        assert!((shape - 28.2508).abs() < 1e-3);
        assert!(rel(gamma, 0.05 * 5e-15 * shape) < 1e-12);
        let e = comparator_energy(&p).unwrap();
        assert!((e - 36.9e-15).abs() < 0.05e-15, "E_c = {e}");
        assert!(rel(8.0 * 5e-15 * 0.64, 25.6e-15) < 1e-12);
        let mut z = p.clone();
        z.v_ref = 0.0;
        assert_eq!(comparator_energy(&z).unwrap(), 0.0);
        let mut c = p.clone();
        c.comparator_load = 0.0;
        assert_eq!(comparator_energy(&c).unwrap(), 0.0);
        let mut bad = p;
        bad.regen_gain = 0.0;
        assert!(comparator_energy(&bad).is_err());
    }

    #[test]
    fn sar_logic_energy_example() {
        let p = example();
        assert!(rel(sar_logic_energy(&p), 183.5008e-15) < 1e-12);
        let mut g0 = p.clone();
        g0.logic_activity = 0.0;
        assert_eq!(sar_logic_energy(&g0), 0.0);
        assert!(rel(sar_logic_energy(&p.with_bits(16)), 4.0 * sar_logic_energy(&p)) < 1e-12);
    }

    #[test]
    fn rho_values() {
        // i = 1..7: 8 + 6 + 3.5 + 1.875 + 0.96875 + 0.4921875 + 0.248046875
        assert!((rho(8).unwrap() - 21.083984375).abs() < 1e-12);
        assert_eq!(rho(2).unwrap(), 0.125);
        assert!(rho(1).is_err());
        let p = example();
        assert!(rel(dac_energy_avg(&p).unwrap(), 21.083984375 * 10e-15 * 0.64) < 1e-12);
        assert!((dac_energy_avg(&p).unwrap() - 134.9e-15).abs() < 0.1e-15);
    }

    #[test]
    fn hold_energy_example_and_identity() {
        let p = example();
        let b = hold_energy(&p).unwrap();
        assert!((b.e_hold - 0.3553387e-12).abs() < 1e-18, "E_hold = {}", b.e_hold);
        assert!(rel(b.hold_at(p.v_ref), b.e_dac + b.e_comparator + b.e_sar_logic) < 1e-12);
        assert!(rel(b.e_hold, b.hold_at(p.v_ref)) < 1e-12);
        let mut z = p;
        z.v_ref = 0.0;
        assert_eq!(hold_energy(&z).unwrap().e_hold, 0.0);
    }

    #[test]
    fn per_bit_dac_form_multiplies_by_n() {
        let mut p = example();
        let grouped = hold_energy(&p).unwrap();
        p.dac_form = DacEnergyForm::PerBit;
        let per_bit = hold_energy(&p).unwrap();
        assert!(rel(per_bit.e_dac, 8.0 * grouped.e_dac) < 1e-12);
        assert!(rel(per_bit.e_hold, per_bit.hold_at(p.v_ref)) < 1e-12);
    }

    #[test]
    fn coefficients_grow_with_bits() {
        let p = example();
        let mut prev = hold_energy(&p.with_bits(2)).unwrap();
        for n in 3..=16 {
            let b = hold_energy(&p.with_bits(n)).unwrap();
            assert!(b.a1 > prev.a1 && b.a2 > prev.a2 && b.a1 >= 0.0);
            prev = b;
        }
    }

    #[test]
    fn harvested_energy_example() {
        let e = harvested_energy(22.75e-9, 0.7, 23.75, 0.032);
        assert!((e - 21.46e-12).abs() < 0.01e-12, "E_h = {e}");
        assert_eq!(harvested_energy(0.0, 0.7, 23.75, 0.032), 0.0);
        assert_eq!(harvested_energy(22.75e-9, 0.0, 23.75, 0.032), 0.0);
    }

    #[test]
    fn rc_efficiency_shape() {
        assert!((efficiency_rc_ratio(42.2) - 0.011571416808803).abs() < 1e-12);
        assert!(efficiency_rc_ratio(1e6) < 1e-6);
        let best = (1..100_000)
            .map(|i| i as f64 * 1e-4)
            .max_by(|a, b| efficiency_rc_ratio(*a).total_cmp(&efficiency_rc_ratio(*b)))
            .unwrap();
        assert!((best - 0.796).abs() < 0.01, "argmax {best}");
        assert!((efficiency_rc_argmax() - best).abs() < 1e-3);
        let c = optimal_harvester_capacitance(23.75, 22.75e-9);
        assert!((23.75 * c / 22.75e-9 - efficiency_rc_argmax()).abs() < 1e-12);
        for i in 1..10_000 {
            assert!(efficiency_rc_ratio(i as f64 * 1e-3) <= 0.5);
        }
        let h = HarvesterParams {
            resistance: 23.75,
            capacitance: 40e-9,
            efficiency: Efficiency::FromRc,
            transfer_period_samples: 337,
            transfer_dead_time: 0.0,
            ideal_diode: false,
        };
        assert!(rel(h.eta(22.5e-9), harvester_efficiency_rc(23.75, 40e-9, 22.5e-9)) < 1e-15);
        assert!(h.fixed_eta().is_err());
    }

    #[test]
    fn nyquist_ratio_example() {
        let p = example();
        let b = hold_energy(&p).unwrap();
        let plan = TimingPlan::from_rate(2.5e-9, 2.0 * 19.8e6).unwrap();
        assert!(rel(plan.t_h, 1.0 / 39.6e6 - 2.5e-9) < 1e-12);
        assert!((plan.t_h - 22.75e-9).abs() < 0.01e-9);
        let r = energy_ratio(&plan, &b, 0.7, 23.75, p.sigma_x2(), p.overload_factor).unwrap();
        assert!((r.db - 17.8).abs() < 0.05, "ratio {} dB", r.db);
        // doubling the hold time adds 10 log10 2
        let plan2 = TimingPlan::new(2.5e-9, 2.0 * plan.t_h).unwrap();
        let r2 = energy_ratio(&plan2, &b, 0.7, 23.75, p.sigma_x2(), p.overload_factor).unwrap();
        assert!((r2.db - r.db - 3.0103).abs() < 1e-3);
    }

    #[test]
    fn ratio_vanishes_without_hold_time() {
        let b = hold_energy(&example()).unwrap();
        let plan = TimingPlan { t_aq: 2.5e-9, t_h: 0.0, t_s: 2.5e-9, f_s: 4e8 };
        assert!(energy_ratio(&plan, &b, 0.7, 23.75, 0.032, 20f64.sqrt()).is_err());
        let tiny = TimingPlan::new(2.5e-9, 1e-22).unwrap();
        let r = energy_ratio(&tiny, &b, 0.7, 23.75, 0.032, 20f64.sqrt()).unwrap();
        assert!(r.db < -100.0);
    }

    #[test]
    fn ratio_increases_with_period() {
        let b = hold_energy(&example()).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for i in 1..200 {
            let plan = TimingPlan::new(2.5e-9, i as f64 * 1e-9).unwrap();
            let r = energy_ratio(&plan, &b, 0.7, 23.75, 0.032, 20f64.sqrt()).unwrap();
            assert!(r.linear > prev);
            prev = r.linear;
        }
    }

    #[test]
    fn timing_plan_checks() {
        assert!(TimingPlan::from_rate(2.5e-9, 1.0 / 2.5e-9).is_err());
        let plan = TimingPlan::from_rate(2.5e-9, 40e6).unwrap();
        assert!(rel(plan.t_h, 22.5e-9) < 1e-12);
        let mut p = example();
        assert!(plan.validate_against(&p).is_err()); // no R_q
        p.dac_switch_resistance = Some(50.0);
        assert!(plan.validate_against(&p).is_ok());
        p.dac_switch_resistance = Some(5000.0);
        assert!(matches!(plan.validate_against(&p), Err(Error::Infeasible(_))));
    }

    #[test]
    fn validation() {
        assert!(example().validate().is_ok());
        let mut p = example();
        p.overload_factor = 1.0;
        assert!(p.validate().is_err());
        let mut p = example();
        p.logic_activity = 1.5;
        assert!(p.validate().is_err());
    }

    #[test]
    fn chebyshev_bound() {
        assert!((overload_bound(20f64.sqrt()) - 0.05).abs() < 1e-15);
    }
}
