//! Period-by-period simulation of the acquire / convert / harvest cycle.

use serde::{Deserialize, Serialize};

use crate::energy::{comparator_energy, sar_logic_energy, AdcCircuitParams, HarvesterParams, TimingPlan};
use crate::error::{invalid, Error, Result};
use crate::psd::PsdModel;
use crate::sim::harvester::Harvester;
use crate::sim::sar::{code_center, sar_convert};
use crate::sim::synth::synthesize_shaped_gaussian;

/// Slack when checking that a sinusoid stays inside `[0, V_ref]`.
const RANGE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputSignal {
    Sinusoid {
        freq: f64,
        offset: f64,
        amplitude: f64,
    },
    /// Zero-mean Gaussian process with spectrum `psd`, shifted by `offset`.
    ShapedGaussian {
        psd: PsdModel,
        offset: f64,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimDuration {
    Samples(usize),
    Seconds(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub circuit: AdcCircuitParams,
    pub harvester: HarvesterParams,
    pub plan: TimingPlan,
    pub input: InputSignal,
    pub duration: SimDuration,
    /// RC updates per hold window.
    pub hold_substeps: usize,
}

impl SimConfig {
    pub fn new(
        circuit: AdcCircuitParams,
        harvester: HarvesterParams,
        plan: TimingPlan,
        input: InputSignal,
        duration: SimDuration,
    ) -> Self {
        Self { circuit, harvester, plan, input, duration, hold_substeps: 16 }
    }

    pub fn sample_count(&self) -> usize {
        match self.duration {
            SimDuration::Samples(n) => n,
            SimDuration::Seconds(t) => (t * self.plan.f_s).floor().max(0.0) as usize,
        }
    }

    /// Sampling periods per transfer cycle: charging samples plus dead time.
    pub fn cycle_samples(&self) -> usize {
        self.harvester.transfer_period_samples + (self.harvester.transfer_dead_time * self.plan.f_s).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        self.circuit.validate()?;
        self.harvester.validate()?;
        if self.hold_substeps == 0 {
            return Err(invalid("hold_substeps must be at least 1"));
        }
        let p = &self.plan;
        if !(p.t_aq >= 0.0 && p.t_h >= 0.0 && p.t_s > 0.0) || (p.t_aq + p.t_h - p.t_s).abs() > 1e-12 * p.t_s {
            return Err(invalid("inconsistent timing plan"));
        }
        if let InputSignal::Sinusoid { freq, offset, amplitude } = self.input {
            if !(freq >= 0.0 && freq.is_finite()) {
                return Err(invalid(format!("sinusoid frequency must be non-negative, got {freq}")));
            }
            let (lo, hi) = (offset - amplitude.abs(), offset + amplitude.abs());
            let slack = RANGE_SLACK * self.circuit.v_ref;
            if lo < -slack || hi > self.circuit.v_ref + slack {
                return Err(Error::Config(format!(
                    "sinusoid spans [{lo}, {hi}] V, outside [0, {}] V",
                    self.circuit.v_ref
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferEvent {
    pub sample_index: usize,
    pub time: f64,
    /// Capacitor voltage just before the transfer, V.
    pub v_eh: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub bits: u32,
    pub v_ref: f64,
    pub f_s: f64,
    pub t_aq: f64,
    pub cycle_samples: usize,
    pub codes: Vec<u32>,
    pub held_voltages: Vec<f64>,
    /// End of each sampling period, s.
    pub times: Vec<f64>,
    /// Harvesting-capacitor voltage at the end of each period, before any transfer.
    pub v_eh: Vec<f64>,
    /// Cumulative consumed energy, J.
    pub e_consumed: Vec<f64>,
    /// Cumulative energy moved out of the harvesting capacitor, J.
    pub e_harvested: Vec<f64>,
    pub per_sample_dac_energy: Vec<f64>,
    pub transfers: Vec<TransferEvent>,
    pub overloads: usize,
    /// Per-sample comparator and SAR-logic energies, J.
    pub e_comparator: f64,
    pub e_sar_logic: f64,
}

impl SimTrace {
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// Codes mapped back to mid-code voltages.
    pub fn dequantized(&self) -> Vec<f64> {
        let lsb = self.v_ref / 2f64.powi(self.bits as i32);
        self.codes.iter().map(|&c| (c as f64 + 0.5) * lsb).collect()
    }

    pub fn consumed_energy_ledger(&self) -> &[f64] {
        &self.e_consumed
    }

    pub fn average_consumed_per_sample(&self) -> f64 {
        match self.e_consumed.last() {
            Some(&e) => e / self.len() as f64,
            None => 0.0,
        }
    }

    /// Mean capacitor voltage at the transfer instants, V.
    pub fn plateau_voltage(&self) -> Option<f64> {
        if self.transfers.is_empty() {
            return None;
        }
        Some(self.transfers.iter().map(|t| t.v_eh).sum::<f64>() / self.transfers.len() as f64)
    }

    /// Mean transferred energy spread over a full transfer cycle, J.
    pub fn harvested_per_sample(&self) -> Option<f64> {
        if self.transfers.is_empty() || self.cycle_samples == 0 {
            return None;
        }
        let mean = self.transfers.iter().map(|t| t.energy).sum::<f64>() / self.transfers.len() as f64;
        Some(mean / self.cycle_samples as f64)
    }
}

/// Continuous-time input as seen by the switch.
enum Source {
    Sine { freq: f64, offset: f64, amplitude: f64 },
    Table { values: Vec<f64>, rate: f64, offset: f64 },
}

impl Source {
    fn build(cfg: &SimConfig, samples: usize) -> Result<Self> {
        Ok(match &cfg.input {
            InputSignal::Sinusoid { freq, offset, amplitude } => {
                Source::Sine { freq: *freq, offset: *offset, amplitude: *amplitude }
            }
            InputSignal::ShapedGaussian { psd, offset, seed } => {
                // fine grid at an integer multiple of f_s, at least 32x the Nyquist rate
                let f_s = cfg.plan.f_s;
                let m = (64.0 * psd.characteristic_frequency() / f_s).ceil().max(1.0) as usize;
                let rate = m as f64 * f_s;
                let len = (m * (samples + 1)).max(2);
                let values = synthesize_shaped_gaussian(psd, rate, len, *seed)?;
                Source::Table { values, rate, offset: *offset }
            }
        })
    }

    fn at(&self, t: f64) -> f64 {
        match self {
            Source::Sine { freq, offset, amplitude } => {
                offset + amplitude * (2.0 * std::f64::consts::PI * freq * t).sin()
            }
            Source::Table { values, rate, offset } => {
                let pos = t * rate;
                let i = pos.floor();
                let frac = pos - i;
                let n = values.len();
                let a = values[(i as usize) % n];
                let b = values[(i as usize + 1) % n];
                offset + a + (b - a) * frac
            }
        }
    }
}

pub fn run_simulation(cfg: &SimConfig) -> Result<SimTrace> {
    cfg.validate()?;
    let samples = cfg.sample_count();
    let p = &cfg.circuit;
    let plan = cfg.plan;
    let source = Source::build(cfg, samples)?;
    let e_comparator = comparator_energy(p)?;
    let e_sar_logic = sar_logic_energy(p);
    let mut harvester = Harvester::new(&cfg.harvester);

    let mut trace = SimTrace {
        bits: p.bits,
        v_ref: p.v_ref,
        f_s: plan.f_s,
        t_aq: plan.t_aq,
        cycle_samples: cfg.cycle_samples(),
        codes: Vec::with_capacity(samples),
        held_voltages: Vec::with_capacity(samples),
        times: Vec::with_capacity(samples),
        v_eh: Vec::with_capacity(samples),
        e_consumed: Vec::with_capacity(samples),
        e_harvested: Vec::with_capacity(samples),
        per_sample_dac_energy: Vec::with_capacity(samples),
        transfers: Vec::new(),
        overloads: 0,
        e_comparator,
        e_sar_logic,
    };

    let substeps = cfg.hold_substeps;
    let dt = plan.t_h / substeps as f64;
    let mut consumed = 0.0;
    let mut transferred = 0.0;
    let mut paused_until = f64::NEG_INFINITY;
    let mut charged = 0usize;

    for k in 0..samples {
        let start = k as f64 * plan.t_s;
        let hold_start = start + plan.t_aq;
        let end = start + plan.t_s;

        let held = source.at(hold_start);
        let conv = sar_convert(held, p);
        if conv.overload {
            trace.overloads += 1;
        }
        consumed += e_comparator + e_sar_logic + conv.dac_energy;

        let mut charging = false;
        for s in 0..substeps {
            let a = (hold_start + s as f64 * dt).max(paused_until);
            let b = hold_start + (s + 1) as f64 * dt;
            // ignore rounding slivers left where a pause ends on a window edge
            if b - a > 1e-9 * dt {
                harvester.charge(source.at(0.5 * (a + b)), b - a);
                charging = true;
            }
        }
        trace.v_eh.push(harvester.voltage);
        if charging {
            charged += 1;
        }
        let period = cfg.harvester.transfer_period_samples;
        if period > 0 && charged == period {
            let v = harvester.voltage;
            let energy = harvester.transfer();
            transferred += energy;
            trace.transfers.push(TransferEvent { sample_index: k, time: end, v_eh: v, energy });
            paused_until = end + cfg.harvester.transfer_dead_time;
            charged = 0;
        }

        trace.codes.push(conv.code);
        trace.held_voltages.push(held);
        trace.times.push(end);
        trace.e_consumed.push(consumed);
        trace.e_harvested.push(transferred);
        trace.per_sample_dac_energy.push(conv.dac_energy);
    }
    Ok(trace)
}

/// Quantized value of a constant input, for checks against a simulation.
pub fn expected_code(v: f64, p: &AdcCircuitParams) -> u32 {
    sar_convert(v, p).code
}

/// Mid-code reconstruction of a whole trace.
pub fn code_voltages(trace: &SimTrace, p: &AdcCircuitParams) -> Vec<f64> {
    trace.codes.iter().map(|&c| code_center(c, p)).collect()
}
