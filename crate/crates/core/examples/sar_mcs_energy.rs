//! Code-by-code switching energy of the merged-capacitor DAC, and its average
//! against the closed form.

use esampling::energy::{dac_energy_avg, rho};
use esampling::presets;
use esampling::sim::sar::{code_center, dac_energy_for_code, exhaustive_average_dac_energy};
use esampling::sim::sar_convert;

fn main() -> esampling::Result<()> {
    let p = presets::builtin("paper-example")?;

    for n in [2, 4, 6, 8, 10, 12] {
        let c = p.circuit.with_bits(n);
        let exact = exhaustive_average_dac_energy(&c);
        println!(
            "n = {n:>2}: rho = {:<16} average {:>10.4} fJ, closed form {:>10.4} fJ",
            rho(n)?,
            exact * 1e15,
            dac_energy_avg(&c)? * 1e15
        );
    }

    let c = p.circuit.with_bits(4);
    println!("\n4-bit codes:");
    for code in 0..16u32 {
        let conv = sar_convert(code_center(code, &c), &c);
        assert_eq!(conv.code, code);
        let bar = "#".repeat((dac_energy_for_code(code, &c) / (c.unit_cap * c.v_ref * c.v_ref) * 8.0).round() as usize);
        println!("  {code:04b}  {:>7.3} fJ  {bar}", conv.dac_energy * 1e15);
    }
    Ok(())
}
