//! Sampling NMSE of the three built-in spectra across sub- and super-Nyquist rates.
//!
//! ```text
//! cargo run --example psd_nmse
//! ```

use esampling::presets;
use esampling::psd::PsdModel;
use esampling::sampling::{nmse, nmse_flat_closed_form, reconstruction_filter_response};

fn main() -> esampling::Result<()> {
    let p = presets::builtin("paper-example")?;
    let (sx2, fm) = (p.circuit.sigma_x2(), p.f_m);
    let models = [
        ("flat", PsdModel::flat(sx2, fm)?),
        ("unimodal", PsdModel::unimodal_for_band(sx2, fm)?),
        ("multimodal", PsdModel::multimodal_for_band(sx2, fm)?),
    ];

    println!("{:>8} {:>12} {:>12} {:>12} {:>12}", "f_s/f_m", "flat", "unimodal", "multimodal", "flat (cf)");
    for r in [0.3, 0.6, 1.0, 1.35, 1.5, 2.0, 2.5] {
        let f_s = r * fm;
        let z: Vec<f64> = models.iter().map(|(_, m)| nmse(m, f_s)).collect::<Result<_, _>>()?;
        println!("{r:>8.2} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e}", z[0], z[1], z[2], nmse_flat_closed_form(fm, f_s));
    }

    // the optimal filter passes in-band content in proportion to its share of the aliased power
    let (_, uni) = &models[1];
    let f_s = fm;
    println!("\nunimodal reconstruction filter at f_s = f_m:");
    for k in 0..=4 {
        let f = k as f64 * 0.125 * f_s;
        println!("  H({:>6.3} MHz) = {:.4}", f / 1e6, reconstruction_filter_response(uni, f_s, f));
    }
    Ok(())
}
