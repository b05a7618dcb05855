//! Energy ratio vs NMSE as the sampling rate sweeps from 2 f_m down to 0.3 f_m,
//! for several resolutions. Writes one CSV per spectrum into the current directory.

use std::fs::File;

use esampling::export::write_tradeoff_family_csv;
use esampling::presets;
use esampling::psd::PsdModel;
use esampling::tradeoff::{linear_rate_grid, TradeoffProblem};

fn main() -> esampling::Result<()> {
    let p = presets::builtin("paper-example")?;
    let (sx2, fm) = (p.circuit.sigma_x2(), p.f_m);
    let grid = linear_rate_grid(2.0 * fm, 0.3 * fm, 50)?;

    for (name, model) in [
        ("flat", PsdModel::flat(sx2, fm)?),
        ("unimodal", PsdModel::unimodal_for_band(sx2, fm)?),
        ("multimodal", PsdModel::multimodal_for_band(sx2, fm)?),
    ] {
        let mut family = Vec::new();
        for n in [8, 10, 12, 14, 16] {
            let problem = TradeoffProblem::new(&model, &p.circuit.with_bits(n), &p.harvester)?;
            family.push((n, problem.tradeoff_curve(&grid)?));
        }
        let path = format!("tradeoff_{name}.csv");
        write_tradeoff_family_csv(File::create(&path)?, &family)?;

        println!("{name}: wrote {path}");
        for (n, curve) in &family {
            let first = curve.first().unwrap();
            let last = curve.last().unwrap();
            println!(
                "  n = {n:>2}: {:+7.2} dB at zeta = {:.2e}  ->  {:+7.2} dB at zeta = {:.3}",
                first.e_ratio_db, first.zeta, last.e_ratio_db, last.zeta
            );
        }
    }
    Ok(())
}
