//! Energy/fidelity tradeoff: the two scalarized problems and full curves.
//!
//! Both problems trade the sampling period `T_s` against each other: a longer
//! period leaves more hold time for harvesting but aliases more of the
//! spectrum. The harvested-to-consumed ratio is affine in `T_s - T_aq`, so the
//! energy side has a closed form. The fidelity side needs a search over
//! `T_s`, which is done globally because the NMSE is not monotone for every
//! spectrum (a two-lobed density can alias its lobes onto each other).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{
    acquisition_time, consumed_at_power, harvested_energy, hold_energy, AdcCircuitParams, EnergyBudget,
    HarvesterParams, TimingPlan,
};
use crate::error::{invalid, Error, Result};
use crate::psd::PsdModel;
use crate::sampling::nmse;

/// Relative tolerance when matching the PSD power against `(V_ref / K)^2`.
const POWER_MATCH_TOL: f64 = 1e-9;

/// One operating point of the tradeoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    #[serde(rename = "f_s_hz")]
    pub f_s: f64,
    #[serde(rename = "T_s_s")]
    pub t_s: f64,
    pub zeta: f64,
    /// `-inf` when no hold time is left for harvesting.
    pub e_ratio_db: f64,
    #[serde(rename = "e_h_j")]
    pub e_h: f64,
    #[serde(rename = "e_hold_j")]
    pub e_hold: f64,
}

impl TradeoffPoint {
    pub fn e_ratio(&self) -> f64 {
        self.e_h / self.e_hold
    }
}

/// Solver output: the point, its timing, and whether the search hit the
/// configured `T_s` ceiling instead of a genuine constraint boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub point: TradeoffPoint,
    pub plan: TimingPlan,
    pub at_ceiling: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Relative bisection tolerance on `T_s`.
    pub rel_tol: f64,
    pub max_iterations: usize,
    /// Geometric scan points between `T_aq` and the search ceiling.
    pub scan_points: usize,
    /// Ceiling on `T_s` as a multiple of `1/(2 f_m)` (bandlimited) or `T_aq`.
    pub ceiling_factor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-9, max_iterations: 200, scan_points: 256, ceiling_factor: 1e4 }
    }
}

/// A spectrum, a converter and a harvester, checked for mutual consistency.
#[derive(Debug, Clone)]
pub struct TradeoffProblem {
    pub model: PsdModel,
    pub circuit: AdcCircuitParams,
    pub harvester: HarvesterParams,
    pub budget: EnergyBudget,
    pub t_aq: f64,
    pub eta: f64,
    pub options: SolverOptions,
}

impl TradeoffProblem {
    pub fn new(model: &PsdModel, circuit: &AdcCircuitParams, harvester: &HarvesterParams) -> Result<Self> {
        circuit.validate()?;
        harvester.validate()?;
        let expected = circuit.sigma_x2();
        let got = model.sigma_x2();
        if (got - expected).abs() > POWER_MATCH_TOL * expected {
            return Err(invalid(format!("input power {got} V^2 does not match (V_ref/K)^2 = {expected} V^2")));
        }
        let t_aq = acquisition_time(circuit)?;
        if !(t_aq > 0.0) {
            return Err(invalid("tradeoff analysis needs a positive acquisition time"));
        }
        Ok(Self {
            model: model.clone(),
            circuit: circuit.clone(),
            harvester: harvester.clone(),
            budget: hold_energy(circuit)?,
            t_aq,
            eta: harvester.fixed_eta()?,
            options: SolverOptions::default(),
        })
    }

    pub fn with_options(mut self, options: SolverOptions) -> Self {
        self.options = options;
        self
    }

    fn sigma_x2(&self) -> f64 {
        self.circuit.sigma_x2()
    }

    /// Consumed energy per sample at the modeled input power.
    pub fn consumed(&self) -> f64 {
        consumed_at_power(&self.budget, self.sigma_x2(), self.circuit.overload_factor)
    }

    /// Linear energy ratio at sampling period `t_s`.
    pub fn ratio_at(&self, t_s: f64) -> f64 {
        let t_h = (t_s - self.t_aq).max(0.0);
        harvested_energy(t_h, self.eta, self.harvester.resistance, self.sigma_x2()) / self.consumed()
    }

    /// Fully evaluated point at sampling period `t_s`.
    pub fn point_at(&self, t_s: f64) -> Result<TradeoffPoint> {
        self.point_with(1.0 / t_s, t_s)
    }

    /// Fully evaluated point at sampling rate `f_s`, keeping `f_s` exact.
    pub fn point_at_rate(&self, f_s: f64) -> Result<TradeoffPoint> {
        self.point_with(f_s, 1.0 / f_s)
    }

    fn point_with(&self, f_s: f64, t_s: f64) -> Result<TradeoffPoint> {
        if !(t_s >= self.t_aq) {
            return Err(invalid(format!("sampling period {t_s} s is shorter than T_aq = {} s", self.t_aq)));
        }
        let e_h = harvested_energy(t_s - self.t_aq, self.eta, self.harvester.resistance, self.sigma_x2());
        let e_hold = self.consumed();
        Ok(TradeoffPoint {
            f_s,
            t_s,
            zeta: nmse(&self.model, f_s)?,
            e_ratio_db: 10.0 * (e_h / e_hold).log10(),
            e_h,
            e_hold,
        })
    }

    /// Hold time at which the energy ratio equals `delta` exactly.
    pub fn hold_time_for_ratio(&self, delta: f64) -> Result<f64> {
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(invalid(format!("energy constraint must be a finite ratio >= 0, got {delta}")));
        }
        Ok(delta * self.harvester.resistance / (self.eta * self.sigma_x2()) * self.consumed())
    }

    /// Minimal NMSE subject to `E_ratio >= delta` (linear).
    ///
    /// Runs at the shortest period that meets the energy constraint. That is
    /// optimal whenever the NMSE is non-increasing in `f_s`; see
    /// [`Self::min_nmse_under_energy_global`] for spectra where it is not.
    pub fn min_nmse_under_energy(&self, delta: f64) -> Result<Solution> {
        let t_h = self.hold_time_for_ratio(delta)?;
        let plan = TimingPlan::new(self.t_aq, t_h)?;
        Ok(Solution { point: self.point_at(plan.t_s)?, plan, at_ceiling: false })
    }

    /// As [`Self::min_nmse_under_energy`], but also scans every longer period
    /// that can still beat the starting NMSE and keeps the best.
    pub fn min_nmse_under_energy_global(&self, delta: f64) -> Result<Solution> {
        let start = self.min_nmse_under_energy(delta)?;
        let hi = self.period_bound(start.point.zeta).min(self.ceiling());
        if !(hi > start.plan.t_s) {
            return Ok(start);
        }
        let n = self.options.scan_points.max(2);
        let grid = geometric_grid(start.plan.t_s, hi, n);
        let zetas = self.zetas(&grid)?;
        let mut best = start;
        for (t, z) in grid.iter().zip(zetas) {
            if z < best.point.zeta {
                best = Solution {
                    point: self.point_at(*t)?,
                    plan: TimingPlan::new(self.t_aq, t - self.t_aq)?,
                    at_ceiling: false,
                };
            }
        }
        Ok(best)
    }

    /// Maximal energy ratio subject to `zeta <= epsilon`: the longest
    /// sampling period whose NMSE stays within the fidelity budget.
    pub fn max_ratio_under_fidelity(&self, epsilon: f64) -> Result<Solution> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(invalid(format!("fidelity constraint must lie in [0, 1), got {epsilon}")));
        }
        let solution = |t_s: f64, at_ceiling: bool| -> Result<Solution> {
            Ok(Solution { point: self.point_at(t_s)?, plan: TimingPlan::new(self.t_aq, t_s - self.t_aq)?, at_ceiling })
        };

        if epsilon == 0.0 {
            if let Some(b) = self.model.bandlimit() {
                let t_s = 0.5 / b;
                if t_s < self.t_aq {
                    return Err(Error::Infeasible(format!(
                        "Nyquist period {t_s} s is shorter than the acquisition time {} s",
                        self.t_aq
                    )));
                }
                return solution(t_s, false);
            }
        }

        let ceiling = self.ceiling();
        let bound = self.period_bound(epsilon);
        let hi = bound.min(ceiling);
        let capped = bound > ceiling;
        if !(hi > self.t_aq) {
            return Err(self.infeasible(epsilon));
        }
        let feasible = |t: f64| -> Result<bool> { Ok(nmse(&self.model, 1.0 / t)? <= epsilon) };

        if feasible(hi)? {
            return solution(hi, capped);
        }
        // descending scan for the longest feasible grid period, then bisect
        // between it and its infeasible neighbour
        let n = self.options.scan_points.max(2);
        let grid = geometric_grid(self.t_aq, hi, n);
        let zetas = self.zetas(&grid)?;
        let Some(j) = (0..n).rev().find(|&j| zetas[j] <= epsilon) else {
            return Err(self.infeasible(epsilon));
        };
        let (mut lo, mut up) = (grid[j], grid[j + 1]);
        for _ in 0..self.options.max_iterations {
            if up - lo <= self.options.rel_tol * lo {
                break;
            }
            let mid = 0.5 * (lo + up);
            if feasible(mid)? {
                lo = mid;
            } else {
                up = mid;
            }
        }
        solution(lo, false)
    }

    /// One point per grid rate, in grid order.
    pub fn tradeoff_curve(&self, f_s_grid: &[f64]) -> Result<Vec<TradeoffPoint>> {
        if f_s_grid.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(invalid("sampling-rate grid must be strictly decreasing"));
        }
        let f_max = 1.0 / self.t_aq;
        if let Some(&bad) = f_s_grid.iter().find(|&&f| !(f > 0.0) || f >= f_max) {
            return Err(invalid(format!("grid rate {bad} Hz must lie in (0, 1/T_aq = {f_max} Hz)")));
        }
        f_s_grid.par_iter().map(|&f| self.point_at_rate(f)).collect()
    }

    /// Energy ratio at the Nyquist rate of a bandlimited input.
    pub fn nyquist_energy_ratio(&self) -> Result<crate::energy::EnergyRatio> {
        let Some(b) = self.model.bandlimit() else {
            return Err(invalid("Nyquist energy ratio needs a bandlimited spectrum"));
        };
        let t_s = 0.5 / b;
        if t_s < self.t_aq {
            return Err(Error::Infeasible(format!(
                "Nyquist period {t_s} s is shorter than the acquisition time {} s",
                self.t_aq
            )));
        }
        Ok(crate::energy::EnergyRatio::from_linear(self.ratio_at(t_s)))
    }

    /// Largest `T_s` that can satisfy `zeta <= epsilon` for any spectrum
    /// shape with this peak density: `zeta >= 1 - f_s S_max / sigma^2`.
    fn period_bound(&self, epsilon: f64) -> f64 {
        if epsilon >= 1.0 {
            return f64::INFINITY;
        }
        self.model.peak_bound() / ((1.0 - epsilon) * self.model.sigma_x2())
    }

    fn ceiling(&self) -> f64 {
        let base = match self.model.bandlimit() {
            Some(b) => 0.5 / b,
            None => self.t_aq,
        };
        self.options.ceiling_factor * base
    }

    fn zetas(&self, periods: &[f64]) -> Result<Vec<f64>> {
        periods.par_iter().map(|&t| nmse(&self.model, 1.0 / t)).collect()
    }

    fn infeasible(&self, epsilon: f64) -> Error {
        Error::Infeasible(format!("no sampling period above T_aq = {} s reaches NMSE <= {epsilon}", self.t_aq))
    }
}

/// `n` points from `lo` to `hi` (inclusive) with a constant ratio.
fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let r = (hi / lo).ln();
    let mut g: Vec<f64> = (0..n).map(|i| lo * (r * i as f64 / (n - 1) as f64).exp()).collect();
    g[n - 1] = hi;
    g
}

/// Decreasing grid from `start` to `end` Hz with `points` entries, linear in `f_s`.
pub fn linear_rate_grid(start: f64, end: f64, points: usize) -> Result<Vec<f64>> {
    if points < 1 || !(start > end && end > 0.0) && points > 1 {
        return Err(invalid("rate grid needs start > end > 0"));
    }
    if points == 1 {
        return Ok(vec![start]);
    }
    Ok((0..points).map(|i| start + (end - start) * i as f64 / (points - 1) as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{DacEnergyForm, Efficiency};
    use crate::psd::TabulatedPsd;
    use proptest::prelude::*;

    const FM: f64 = 19.8e6;

    fn circuit(bits: u32) -> AdcCircuitParams {
        AdcCircuitParams {
            bits,
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

    fn harvester() -> HarvesterParams {
        HarvesterParams {
            resistance: 23.75,
            capacitance: 40e-9,
            efficiency: Efficiency::Fixed(0.7),
            transfer_period_samples: 337,
            transfer_dead_time: 0.0,
            ideal_diode: false,
        }
    }

    fn problem(model: PsdModel, bits: u32) -> TradeoffProblem {
        TradeoffProblem::new(&model, &circuit(bits), &harvester()).unwrap()
    }

    fn sx2() -> f64 {
        circuit(8).sigma_x2()
    }

    fn flat() -> PsdModel {
        PsdModel::flat(sx2(), FM).unwrap()
    }

    fn all_kinds() -> Vec<PsdModel> {
        vec![flat(), PsdModel::unimodal_for_band(sx2(), FM).unwrap(), PsdModel::multimodal_for_band(sx2(), FM).unwrap()]
    }

    /// Closed-form optimum for the flat spectrum: `f_s = 2 f_m (1 - eps)`.
    fn flat_ratio(p: &TradeoffProblem, eps: f64) -> f64 {
        let t_s = 1.0 / (2.0 * FM * (1.0 - eps));
        p.eta / p.harvester.resistance * (t_s - p.t_aq) * sx2() / p.consumed()
    }

    #[test]
    fn power_mismatch_is_rejected() {
        let m = PsdModel::flat(0.05, FM).unwrap();
        assert!(TradeoffProblem::new(&m, &circuit(8), &harvester()).is_err());
        let mut h = harvester();
        h.efficiency = Efficiency::FromRc;
        assert!(matches!(TradeoffProblem::new(&flat(), &circuit(8), &h), Err(Error::Config(_))));
    }

    #[test]
    fn zero_energy_constraint_runs_at_top_rate() {
        let p = problem(flat(), 8);
        let s = p.min_nmse_under_energy(0.0).unwrap();
        assert_eq!(s.plan.t_h, 0.0);
        assert!((s.point.f_s - 1.0 / 2.5e-9).abs() < 1e-3);
        assert_eq!(s.point.e_ratio_db, f64::NEG_INFINITY);
        assert!(s.point.zeta < 1e-12);
        assert!(p.min_nmse_under_energy(-1.0).is_err());
    }

    #[test]
    fn nyquist_gain_round_trips_through_energy_constraint() {
        let p = problem(flat(), 8);
        let nyq = p.nyquist_energy_ratio().unwrap();
        assert!((nyq.db - 17.8).abs() < 0.05, "{}", nyq.db);
        let s = p.min_nmse_under_energy(nyq.linear).unwrap();
        assert!((s.point.f_s / (2.0 * FM) - 1.0).abs() < 1e-9);
        assert!(s.point.zeta < 1e-9);
        // a constraint rounded to 17.8 dB lands just beside Nyquist
        let s = p.min_nmse_under_energy(10f64.powf(1.78)).unwrap();
        assert!((s.point.f_s / (2.0 * FM) - 1.0).abs() < 0.01);
        assert!(s.point.zeta < 0.01);
    }

    #[test]
    fn zero_power_nyquist_at_twelve_bits() {
        let p = problem(flat(), 12);
        let s = p.min_nmse_under_energy(1.0).unwrap();
        assert!(s.point.zeta < 1e-12);
        assert!(s.point.e_ratio() >= 1.0 - 1e-9);
        let r12 = p.nyquist_energy_ratio().unwrap().db;
        let r8 = problem(flat(), 8).nyquist_energy_ratio().unwrap().db;
        assert!(r12 > 0.0 && r12 < r8);
    }

    #[test]
    fn energy_constraint_is_met() {
        for m in all_kinds() {
            let p = problem(m, 10);
            for db in [-5.0, 0.0, 3.0, 10.0, 17.0] {
                let delta = 10f64.powf(db / 10.0);
                let s = p.min_nmse_under_energy(delta).unwrap();
                assert!(s.point.e_ratio() >= delta * (1.0 - 1e-9));
            }
        }
    }

    #[test]
    fn flat_fidelity_matches_closed_form() {
        let p = problem(flat(), 8);
        for i in 0..=8 {
            let eps = 0.1 * i as f64;
            let s = p.max_ratio_under_fidelity(eps).unwrap();
            let want = flat_ratio(&p, eps);
            assert!((s.point.e_ratio() / want - 1.0).abs() < 1e-6, "eps={eps}");
            assert!(!s.at_ceiling);
        }
        let s = p.max_ratio_under_fidelity(0.0).unwrap();
        assert_eq!(s.plan.t_s, 0.5 / FM);
    }

    #[test]
    fn flat_poor_fidelity_rate() {
        let p = problem(flat(), 8);
        let s = p.max_ratio_under_fidelity(0.85).unwrap();
        assert!((s.point.f_s / FM - 0.3).abs() < 1e-6);
    }

    #[test]
    fn bisection_certificate() {
        for m in all_kinds() {
            let p = problem(m, 8);
            for eps in [1e-3, 0.01, 0.05, 0.2, 0.5] {
                let s = p.max_ratio_under_fidelity(eps).unwrap();
                let t = s.plan.t_s;
                assert!(s.point.zeta <= eps, "{:?}", p.model.kind());
                let beyond = nmse(&p.model, 1.0 / (t * (1.0 + 1e-6))).unwrap();
                assert!(beyond > eps - 1e-9, "{:?} eps={eps}", p.model.kind());
            }
        }
    }

    #[test]
    fn multimodal_fidelity_takes_longest_feasible_period() {
        // at eps = 0.1 the multimodal NMSE dips below eps near 1.35 f_m while
        // it is 0.5 at 2 f_m; the solver must not stop above 2 f_m
        let p = problem(PsdModel::multimodal_for_band(sx2(), FM).unwrap(), 8);
        let s = p.max_ratio_under_fidelity(0.1).unwrap();
        assert!(s.point.f_s < 2.0 * FM, "f_s = {}", s.point.f_s / FM);
    }

    #[test]
    fn global_energy_solver_never_worse() {
        let p = problem(PsdModel::multimodal_for_band(sx2(), FM).unwrap(), 8);
        let delta = p.ratio_at(0.5 / FM);
        let local = p.min_nmse_under_energy(delta).unwrap();
        let global = p.min_nmse_under_energy_global(delta).unwrap();
        assert!((local.point.zeta - 0.5).abs() < 1e-6);
        assert!(global.point.zeta < 0.1);
        assert!(global.point.e_ratio() >= delta);
    }

    #[test]
    fn huge_tolerance_reports_ceiling() {
        let p = problem(PsdModel::unimodal_for_band(sx2(), FM).unwrap(), 8)
            .with_options(SolverOptions { ceiling_factor: 10.0, ..Default::default() });
        let s = p.max_ratio_under_fidelity(0.999).unwrap();
        assert!(s.at_ceiling);
        assert!((s.plan.t_s - 25e-9).abs() < 1e-18);
    }

    #[test]
    fn infeasible_when_acquisition_is_too_slow() {
        let mut c = circuit(8);
        c.acquisition_time_override = Some(1e-6);
        let p = TradeoffProblem::new(&flat(), &c, &harvester()).unwrap();
        assert!(matches!(p.max_ratio_under_fidelity(0.0), Err(Error::Infeasible(_))));
        assert!(matches!(p.max_ratio_under_fidelity(0.01), Err(Error::Infeasible(_))));
        assert!(matches!(p.nyquist_energy_ratio(), Err(Error::Infeasible(_))));
        assert!(p.max_ratio_under_fidelity(1.0).is_err());
    }

    #[test]
    fn nyquist_at_acquisition_limit_is_minus_infinity() {
        let mut c = circuit(8);
        c.acquisition_time_override = Some(0.5 / FM);
        let p = TradeoffProblem::new(&flat(), &c, &harvester()).unwrap();
        assert_eq!(p.nyquist_energy_ratio().unwrap().db, f64::NEG_INFINITY);
        let g = PsdModel::unimodal_for_band(sx2(), FM).unwrap();
        assert!(problem(g, 8).nyquist_energy_ratio().is_err());
    }

    #[test]
    fn curve_points_are_consistent_and_ordered() {
        let p = problem(flat(), 8);
        let grid = linear_rate_grid(2.0 * FM, 0.3 * FM, 50).unwrap();
        let curve = p.tradeoff_curve(&grid).unwrap();
        assert_eq!(curve.len(), 50);
        for (pt, f) in curve.iter().zip(&grid) {
            assert_eq!(pt.f_s, *f);
            let z = nmse(&p.model, *f).unwrap();
            assert!((pt.zeta - z).abs() <= 1e-9 * z.max(1e-300));
            let r = p.ratio_at(1.0 / f);
            assert!((pt.e_ratio() / r - 1.0).abs() < 1e-9);
        }
        for w in curve.windows(2) {
            assert!(w[1].zeta >= w[0].zeta - 1e-9);
            assert!(w[1].e_ratio_db > w[0].e_ratio_db);
        }
        let single = p.tradeoff_curve(&[2.0 * FM]).unwrap()[0];
        let s = p.max_ratio_under_fidelity(0.0).unwrap();
        assert!((single.e_ratio_db - s.point.e_ratio_db).abs() < 1e-9);
    }

    #[test]
    fn curve_grid_validation() {
        let p = problem(flat(), 8);
        assert!(p.tradeoff_curve(&[FM, 2.0 * FM]).is_err());
        assert!(p.tradeoff_curve(&[1.0 / 2.5e-9]).is_err());
        assert!(p.tradeoff_curve(&[]).unwrap().is_empty());
    }

    #[test]
    fn energy_is_shape_invariant() {
        let models = all_kinds();
        let table: Vec<(f64, f64)> = (0..=10).map(|i| (i as f64 * 2e6, (10 - i) as f64)).collect();
        let tab = PsdModel::tabulated(TabulatedPsd::new(&table).unwrap()).with_power(sx2()).unwrap();
        let base = problem(models[0].clone(), 10).point_at(40e-9).unwrap();
        for m in models.into_iter().skip(1).chain([tab]) {
            let pt = problem(m, 10).point_at(40e-9).unwrap();
            assert_eq!(pt.e_ratio_db, base.e_ratio_db);
        }
    }

    #[test]
    fn ratio_family_is_ordered_by_bits() {
        let mut prev = f64::INFINITY;
        for n in [8, 10, 12, 14, 16] {
            let r = problem(flat(), n).nyquist_energy_ratio().unwrap().db;
            assert!(r < prev);
            prev = r;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn round_trip(db in -10.0f64..17.0, kind in 0usize..3) {
            let p = problem(all_kinds().swap_remove(kind), 8);
            let delta = 10f64.powf(db / 10.0);
            let s = p.min_nmse_under_energy(delta).unwrap();
            let back = p.max_ratio_under_fidelity(s.point.zeta).unwrap();
            prop_assert!(back.point.e_ratio() >= delta * (1.0 - 1e-6));
        }

        #[test]
        fn flat_closed_form_agreement(eps in 0.0f64..0.9) {
            let p = problem(flat(), 8);
            let s = p.max_ratio_under_fidelity(eps).unwrap();
            prop_assert!((s.point.e_ratio() / flat_ratio(&p, eps) - 1.0).abs() < 1e-6);
        }
    }
}
