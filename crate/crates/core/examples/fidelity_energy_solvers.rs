//! The two constrained problems: best fidelity for a harvesting target, and
//! most harvesting for a fidelity target, checked against each other.

use esampling::presets;
use esampling::psd::PsdModel;
use esampling::tradeoff::TradeoffProblem;
use esampling::Error;

fn main() -> esampling::Result<()> {
    let p = presets::builtin("paper-example")?;
    let (sx2, fm) = (p.circuit.sigma_x2(), p.f_m);

    for model in
        [PsdModel::flat(sx2, fm)?, PsdModel::unimodal_for_band(sx2, fm)?, PsdModel::multimodal_for_band(sx2, fm)?]
    {
        let problem = TradeoffProblem::new(&model, &p.circuit, &p.harvester)?;
        println!("{:?}", model.kind());
        for db in [0.0, 10.0, 20.0, 25.0] {
            let delta = 10f64.powf(db / 10.0);
            let local = problem.min_nmse_under_energy(delta)?;
            let global = problem.min_nmse_under_energy_global(delta)?;
            println!(
                "  ratio >= {db:>4} dB: f_s = {:>7.2} MHz, zeta = {:.3e}   (global search: {:.3e} at {:.2} MHz)",
                local.point.f_s / 1e6,
                local.point.zeta,
                global.point.zeta,
                global.point.f_s / 1e6
            );
        }
        for eps in [0.0, 1e-3, 0.05, 0.3] {
            match problem.max_ratio_under_fidelity(eps) {
                Ok(s) => println!(
                    "  zeta <= {eps:<6}: f_s = {:>7.2} MHz, ratio = {:+.2} dB{}",
                    s.point.f_s / 1e6,
                    s.point.e_ratio_db,
                    if s.at_ceiling { " (period ceiling)" } else { "" }
                ),
                Err(Error::Infeasible(msg)) => println!("  zeta <= {eps:<6}: infeasible ({msg})"),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(())
}
