//! Named parameter sets.
//!
//! One preset is built in. More can be dropped as `<name>.toml` files into a
//! preset directory, given explicitly or through `ESAMPLING_PRESET_DIR`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::FlatConfig;
use crate::energy::{AdcCircuitParams, DacEnergyForm, Efficiency, HarvesterParams};
use crate::error::{Error, Result};

pub const PRESET_DIR_ENV: &str = "ESAMPLING_PRESET_DIR";
pub const PAPER_EXAMPLE: &str = "paper-example";

/// A converter, a harvester and the signal band they were sized for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: String,
    pub description: String,
    pub circuit: AdcCircuitParams,
    pub harvester: HarvesterParams,
    /// Signal bandwidth, Hz.
    pub f_m: f64,
    /// Default sampling rate for simulations, Hz.
    pub sample_rate: f64,
}

/// 8-bit, 0.8 V reference, K^2 = 20 converter with a 23.75 ohm harvester,
/// sized for a 19.8 MHz input band and simulated at 40 MHz.
pub fn paper_example() -> Preset {
    Preset {
        name: PAPER_EXAMPLE.into(),
        description: "8-bit MCS SAR with RC harvester, 19.8 MHz band, 40 MHz simulation rate".into(),
        circuit: AdcCircuitParams {
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
        },
        harvester: HarvesterParams {
            resistance: 23.75,
            capacitance: 40e-9,
            efficiency: Efficiency::Fixed(0.7),
            transfer_period_samples: 337,
            // rest of the 500-sample transfer cycle at 40 MHz
            transfer_dead_time: 163.0 / 40e6,
            ideal_diode: false,
        },
        f_m: 19.8e6,
        sample_rate: 40e6,
    }
}

pub fn builtin_names() -> Vec<String> {
    vec![PAPER_EXAMPLE.to_string()]
}

pub fn builtin(name: &str) -> Result<Preset> {
    match name {
        PAPER_EXAMPLE => Ok(paper_example()),
        _ => Err(Error::UnknownPreset { name: name.into(), available: builtin_names() }),
    }
}

/// Directory from `ESAMPLING_PRESET_DIR`, if set and non-empty.
pub fn env_preset_dir() -> Option<PathBuf> {
    std::env::var_os(PRESET_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

/// Built-in names followed by `*.toml` stems found in `dir`, sorted, unique.
pub fn list(dir: Option<&Path>) -> Result<Vec<String>> {
    let mut names = builtin_names();
    if let Some(dir) = dir {
        if dir.is_dir() {
            let mut found = Vec::new();
            for entry in std::fs::read_dir(dir)? {
                let path = entry?.path();
                if path.extension().is_some_and(|e| e == "toml") {
                    if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                        found.push(stem.to_string());
                    }
                }
            }
            found.sort();
            for n in found {
                if !names.contains(&n) {
                    names.push(n);
                }
            }
        }
    }
    Ok(names)
}

/// Load a preset by name: files in `dir` shadow built-ins of the same name.
pub fn load(name: &str, dir: Option<&Path>) -> Result<Preset> {
    if let Some(dir) = dir {
        let path = dir.join(format!("{name}.toml"));
        if path.is_file() {
            let cfg = FlatConfig::from_path(&path)?;
            let mut preset = match cfg.text("preset")? {
                Some(base) if base != name => load(base, Some(dir))?,
                _ => paper_example(),
            };
            preset.name = name.to_string();
            apply(&mut preset, &cfg)?;
            return Ok(preset);
        }
    }
    builtin(name).map_err(|_| Error::UnknownPreset {
        name: name.into(),
        available: list(dir).unwrap_or_else(|_| builtin_names()),
    })
}

/// Overwrite preset fields with every parameter key present in `cfg`.
pub fn apply(p: &mut Preset, cfg: &FlatConfig) -> Result<()> {
    let c = &mut p.circuit;
    let h = &mut p.harvester;
    if let Some(v) = cfg.text("name")? {
        p.name = v.into();
    }
    if let Some(v) = cfg.text("description")? {
        p.description = v.into();
    }
    if let Some(n) = cfg.integer("n")? {
        c.bits = u32::try_from(n).map_err(|_| Error::Config(format!("n = {n} is too large")))?;
    }
    let q = |key: &str| cfg.quantity(key);
    if let Some(v) = q("c_u")? {
        c.unit_cap = v;
    }
    if let Some(v) = q("c_c")? {
        c.comparator_load = v;
    }
    if let Some(v) = q("c_s")? {
        c.flip_flop_cap = v;
    }
    if let Some(v) = q("g")? {
        c.logic_activity = v;
    }
    if let Some(v) = q("a_k")? {
        c.regen_gain = v;
    }
    if let Some(v) = q("v_e")? {
        c.overdrive_voltage = v;
    }
    if let Some(v) = q("r_on")? {
        c.switch_on_resistance = Some(v);
    }
    if let Some(v) = q("r_q")? {
        c.dac_switch_resistance = Some(v);
    }
    if let Some(v) = q("alpha_tau")? {
        c.time_constants = v;
    }
    if let Some(v) = q("v_ref")? {
        c.v_ref = v;
    }
    match (q("k")?, q("k2")?) {
        (Some(_), Some(_)) => return Err(Error::Config("give either `k` or `k2`, not both".into())),
        (Some(k), None) => c.overload_factor = k,
        (None, Some(k2)) => c.overload_factor = k2.sqrt(),
        (None, None) => {}
    }
    if let Some(v) = q("t_aq")? {
        c.acquisition_time_override = Some(v);
    }
    if let Some(v) = cfg.text("dac_form")? {
        c.dac_form = match v {
            "grouped" => DacEnergyForm::Grouped,
            "per_bit" => DacEnergyForm::PerBit,
            other => return Err(Error::Config(format!("dac_form must be `grouped` or `per_bit`, got `{other}`"))),
        };
    }
    if let Some(v) = q("r_h")? {
        h.resistance = v;
    }
    if let Some(v) = q("c_eh")? {
        h.capacitance = v;
    }
    if let Some(v) = cfg.raw("eta") {
        h.efficiency = match v {
            toml::Value::String(s) if s == "rc" => Efficiency::FromRc,
            _ => Efficiency::Fixed(q("eta")?.unwrap_or_default()),
        };
    }
    if let Some(v) = cfg.integer("transfer_period_samples")? {
        h.transfer_period_samples = v as usize;
    }
    if let Some(v) = q("transfer_dead_time")? {
        h.transfer_dead_time = v;
    }
    if let Some(v) = cfg.boolean("diode_ideal")? {
        h.ideal_diode = v;
    }
    if let Some(v) = q("f_m")? {
        p.f_m = v;
    }
    if let Some(v) = q("f_s")? {
        p.sample_rate = v;
    }
    p.circuit.validate()?;
    p.harvester.validate()?;
    Ok(())
}

/// Flat TOML with every parameter, in SI base units. Reloads to the same preset.
pub fn dump(p: &Preset) -> String {
    let c = &p.circuit;
    let h = &p.harvester;
    let mut s = String::new();
    let mut line = |key: &str, value: String, note: &str| {
        if note.is_empty() {
            let _ = writeln!(s, "{key} = {value}");
        } else {
            let _ = writeln!(s, "{key} = {value}  # {note}");
        }
    };
    line("name", format!("{:?}", p.name), "");
    line("description", format!("{:?}", p.description), "");
    line("n", c.bits.to_string(), "bits");
    line("c_u", format!("{:?}", c.unit_cap), "F, DAC unit capacitor");
    line("c_c", format!("{:?}", c.comparator_load), "F, comparator load");
    line("c_s", format!("{:?}", c.flip_flop_cap), "F, flip-flop input");
    line("g", format!("{:?}", c.logic_activity), "SAR-logic activity");
    line("a_k", format!("{:?}", c.regen_gain), "comparator regeneration gain");
    line("v_e", format!("{:?}", c.overdrive_voltage), "V, I_D/g_m of the comparator pair");
    if let Some(r) = c.switch_on_resistance {
        line("r_on", format!("{r:?}"), "ohm, sampling switch");
    }
    if let Some(r) = c.dac_switch_resistance {
        line("r_q", format!("{r:?}"), "ohm, DAC switches");
    }
    line("alpha_tau", format!("{:?}", c.time_constants), "settling time constants");
    line("v_ref", format!("{:?}", c.v_ref), "V");
    let k2 = c.overload_factor * c.overload_factor;
    line("k", format!("{:?}", c.overload_factor), &format!("V_ref / sigma_x, K^2 = {}", round_sig(k2)));
    if let Some(t) = c.acquisition_time_override {
        line("t_aq", format!("{t:?}"), "s, acquisition time");
    }
    let form = match c.dac_form {
        DacEnergyForm::Grouped => "grouped",
        DacEnergyForm::PerBit => "per_bit",
    };
    line("dac_form", format!("{form:?}"), "");
    line("r_h", format!("{:?}", h.resistance), "ohm, harvesting path");
    line("c_eh", format!("{:?}", h.capacitance), "F, harvesting capacitor");
    match h.efficiency {
        Efficiency::Fixed(eta) => line("eta", format!("{eta:?}"), "harvesting efficiency"),
        Efficiency::FromRc => line("eta", "\"rc\"".into(), "efficiency from the RC law"),
    }
    line("transfer_period_samples", h.transfer_period_samples.to_string(), "charging samples per transfer");
    line("transfer_dead_time", format!("{:?}", h.transfer_dead_time), "s, no harvesting after a transfer");
    line("diode_ideal", h.ideal_diode.to_string(), "");
    line("f_m", format!("{:?}", p.f_m), "Hz, signal band");
    line("f_s", format!("{:?}", p.sample_rate), "Hz, simulation sampling rate");
    s
}

fn round_sig(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}
