//! SNDR of the simulated converter for a coherent near-Nyquist tone, per
//! resolution, plus an incoherent tone analysed with a Hann window.

use esampling::energy::{acquisition_time, TimingPlan};
use esampling::presets;
use esampling::sim::sndr::ideal_sndr_db;
use esampling::sim::{coherent_input_frequency, run_simulation, sndr_fft, InputSignal, SimConfig, SimDuration, Window};

fn sndr(bits: u32, freq: f64, window: Window) -> esampling::Result<f64> {
    let p = presets::builtin("paper-example")?;
    let c = p.circuit.with_bits(bits);
    let plan = TimingPlan::from_rate(acquisition_time(&c)?, 40e6)?;
    let half = 0.5 * c.v_ref;
    let input = InputSignal::Sinusoid { freq, offset: half, amplitude: half };
    let trace = run_simulation(&SimConfig::new(c, p.harvester, plan, input, SimDuration::Samples(4096)))?;
    let x: Vec<f64> = trace.codes.iter().map(|&k| k as f64).collect();
    let report = sndr_fft(&x, 40e6, 4096, 2f64.powi(bits as i32 - 1), window)?;
    Ok(report.sndr_db)
}

fn main() -> esampling::Result<()> {
    let tone = coherent_input_frequency(19.8e6, 40e6, 4096)?;
    println!("coherent tone at {:.6} MHz, 4096-point FFT", tone / 1e6);
    for n in [4, 6, 8, 10, 12] {
        let got = sndr(n, tone, Window::Rectangular)?;
        println!("  n = {n:>2}: SNDR {got:6.2} dB  (ideal {:6.2} dB)", ideal_sndr_db(n));
    }
    let got = sndr(8, 7.3e6, Window::Hann)?;
    println!("incoherent 7.3 MHz tone, Hann window, n = 8: {got:.2} dB");
    Ok(())
}
