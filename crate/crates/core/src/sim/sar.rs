//! Successive-approximation conversion with a merged-capacitor-switching DAC.
//!
//! Single-ended array with top-plate sampling: capacitors of
//! `2^(n-2), ..., 2, 1` unit caps plus one unit dummy, `2^(n-1) C_u` in total.
//! All bottom plates rest at `V_cm = V_ref/2` while the top plate tracks the
//! input. Each decided bit flips one capacitor to ground (bit 1) or to
//! `V_ref` (bit 0), halving the residue; the last bit needs no switching.
//! The energy of a step is the charge pulled from `V_ref` by every bottom
//! plate connected to it, times `V_ref`.

use serde::{Deserialize, Serialize};

use crate::energy::AdcCircuitParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Conversion {
    pub code: u32,
    /// Energy drawn from the reference during this conversion, J.
    pub dac_energy: f64,
    /// Input was outside `[0, V_ref]` and the code was clamped.
    pub overload: bool,
}

/// Convert `v` and account the DAC switching energy of its bit sequence.
pub fn sar_convert(v: f64, p: &AdcCircuitParams) -> Conversion {
    let n = p.bits;
    let top = (1u64 << n) as f64;
    let overload = !(v >= 0.0 && v <= p.v_ref);
    // decisions in LSB units so the search lands exactly on floor(v 2^n / V_ref)
    let u = if v.is_nan() { 0.0 } else { (v / p.v_ref * top).clamp(0.0, top) };
    let mut code: u32 = 0;
    for j in 0..n {
        let trial = code | (1 << (n - 1 - j));
        if u >= trial as f64 {
            code = trial;
        }
    }
    debug_assert_eq!(code as f64, u.floor().min(top - 1.0));
    Conversion { code, dac_energy: dac_energy_for_code(code, p), overload }
}

/// Reference energy of the MCS switching sequence that produces `code`, J.
pub fn dac_energy_for_code(code: u32, p: &AdcCircuitParams) -> f64 {
    dac_energy_units(code, p.bits) * p.unit_cap * p.v_ref * p.v_ref
}

/// Same, in units of `C_u V_ref^2`.
fn dac_energy_units(code: u32, n: u32) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let caps: Vec<f64> = (0..n - 1).map(|i| 2f64.powi((n - 2 - i) as i32)).collect();
    let total = 2f64.powi(n as i32 - 1);
    // bottom-plate voltages in units of V_ref; the dummy stays at V_cm
    let mut bottom = vec![0.5; caps.len()];
    let mut energy = 0.0;
    for j in 0..caps.len() {
        let bit = (code >> (n - 1 - j as u32)) & 1 == 1;
        let new = if bit { 0.0 } else { 1.0 };
        let dv_top = caps[j] * (new - bottom[j]) / total;
        bottom[j] = new;
        // charge change on plates tied to V_ref: C_i (dV_bottom - dV_top)
        for (i, (&c, &vb)) in caps.iter().zip(&bottom).enumerate() {
            if vb == 1.0 {
                let dv_bottom = if i == j { 0.5 } else { 0.0 };
                energy += c * (dv_bottom - dv_top);
            }
        }
    }
    energy
}

/// Average DAC energy over all `2^n` codes with equal weights, J.
pub fn exhaustive_average_dac_energy(p: &AdcCircuitParams) -> f64 {
    let count = 1u64 << p.bits;
    let sum: f64 = (0..count).map(|c| dac_energy_units(c as u32, p.bits)).sum();
    sum / count as f64 * p.unit_cap * p.v_ref * p.v_ref
}

/// Mid-code voltage of `code`, V.
pub fn code_center(code: u32, p: &AdcCircuitParams) -> f64 {
    (code as f64 + 0.5) * p.v_ref / 2f64.powi(p.bits as i32)
}
