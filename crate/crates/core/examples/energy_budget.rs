//! Per-sample hold energy of the SAR converter and the harvested energy at Nyquist.

use esampling::energy::{
    acquisition_time, comparator_energy, dac_energy_avg, harvested_energy, hold_energy, rho, sar_logic_energy,
    EnergyRatio, TimingPlan,
};
use esampling::presets;

fn main() -> esampling::Result<()> {
    let p = presets::builtin("paper-example")?;
    let c = &p.circuit;

    let b = hold_energy(c)?;
    println!("{}-bit converter, V_ref = {} V, K^2 = {:.1}", c.bits, c.v_ref, c.overload_factor.powi(2));
    println!("  rho_n         {}", rho(c.bits)?);
    println!("  comparator    {:.2} fJ", comparator_energy(c)? * 1e15);
    println!("  SAR logic     {:.2} fJ", sar_logic_energy(c) * 1e15);
    println!("  DAC           {:.2} fJ", dac_energy_avg(c)? * 1e15);
    println!("  hold total    {:.2} fJ  (a1 = {:.3e} J/V, a2 = {:.3e} J/V^2)", b.e_hold * 1e15, b.a1, b.a2);

    let plan = TimingPlan::from_rate(acquisition_time(c)?, 2.0 * p.f_m)?;
    let eta = p.harvester.fixed_eta()?;
    let e_h = harvested_energy(plan.t_h, eta, p.harvester.resistance, c.sigma_x2());
    let ratio = EnergyRatio::from_linear(e_h / b.e_hold);
    println!(
        "\nat f_s = {:.1} MHz: T_h = {:.3} ns, E_h = {:.2} pJ, ratio = {:.2} dB",
        plan.f_s / 1e6,
        plan.t_h * 1e9,
        e_h * 1e12,
        ratio.db
    );

    println!("\nhold energy vs resolution:");
    for n in [6, 8, 10, 12, 14, 16] {
        let e = hold_energy(&c.with_bits(n))?.e_hold;
        println!("  n = {n:>2}: {:>10.3} pJ  ({:+.2} dB vs E_h)", e * 1e12, 10.0 * (e_h / e).log10());
    }
    Ok(())
}
