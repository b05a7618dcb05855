//! Choosing the harvesting capacitor: RC efficiency as a function of
//! R_h C_EH / T_h, its optimum, and the resulting capacitance.

use esampling::energy::{efficiency_rc_argmax, efficiency_rc_ratio, optimal_harvester_capacitance};
use esampling::presets;

fn main() -> esampling::Result<()> {
    let p = presets::builtin("paper-example")?;
    let x_opt = efficiency_rc_argmax();
    println!("efficiency peaks at R_h C_EH / T_h = {x_opt:.4} with eta = {:.4}", efficiency_rc_ratio(x_opt));

    for x in [0.1, 0.3, 0.5, 0.796, 1.0, 2.0, 5.0, 42.2] {
        let eta = efficiency_rc_ratio(x);
        println!("  x = {x:>6}: eta = {eta:.4} {}", "*".repeat((eta * 200.0) as usize));
    }

    let t_h = 1.0 / (2.0 * p.f_m) - 2.5e-9;
    let c = optimal_harvester_capacitance(p.harvester.resistance, t_h);
    println!(
        "\nfor T_h = {:.2} ns and R_h = {} ohm: C_EH = {:.3} pF (preset uses {} nF, eta = {:.4})",
        t_h * 1e9,
        p.harvester.resistance,
        c * 1e12,
        p.harvester.capacitance * 1e9,
        efficiency_rc_ratio(p.harvester.resistance * p.harvester.capacitance / t_h)
    );
    Ok(())
}
