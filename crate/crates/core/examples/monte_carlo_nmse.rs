//! Empirical NMSE of sampled Gaussian noise with shaped spectra against the
//! analytic value. Runs in parallel; takes a few seconds in release builds.
//!
//! ```text
//! cargo run --release --example monte_carlo_nmse
//! ```

use esampling::presets;
use esampling::psd::PsdModel;
use esampling::sampling::nmse;
use esampling::sim::{empirical_nmse, MonteCarloOptions};

fn main() -> esampling::Result<()> {
    let p = presets::builtin("paper-example")?;
    let (sx2, fm) = (p.circuit.sigma_x2(), p.f_m);
    let opts = MonteCarloOptions { realizations: 64, ..Default::default() };

    for (model, ratios) in [
        (PsdModel::flat(sx2, fm)?, &[0.8, 1.5, 2.5][..]),
        (PsdModel::unimodal_for_band(sx2, fm)?, &[0.6, 1.0, 2.0][..]),
        (PsdModel::multimodal_for_band(sx2, fm)?, &[1.35, 2.0][..]),
    ] {
        for &r in ratios {
            let mc = empirical_nmse(&model, r * fm, &opts)?;
            let analytic = nmse(&model, r * fm)?;
            println!(
                "{:<10} f_s = {r:>4} f_m: analytic {analytic:.5}, empirical {:.5} +- {:.5}  ({:+.2} SE)",
                format!("{:?}", model.kind()),
                mc.mean,
                mc.std_error,
                (mc.mean - analytic) / mc.std_error
            );
        }
    }
    Ok(())
}
