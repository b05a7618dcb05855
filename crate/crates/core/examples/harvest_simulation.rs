//! Time-domain run of the converter with its harvesting capacitor: voltage
//! build-up, transfers and the energy ledgers. Writes `timeseries.csv`.

use std::fs::File;

use esampling::energy::{acquisition_time, TimingPlan};
use esampling::export::write_timeseries_csv;
use esampling::presets;
use esampling::sim::{coherent_input_frequency, run_simulation, InputSignal, SimConfig, SimDuration};

fn main() -> esampling::Result<()> {
    let p = presets::builtin("paper-example")?;
    let f_s = p.sample_rate;
    let plan = TimingPlan::from_rate(acquisition_time(&p.circuit)?, f_s)?;
    let half = 0.5 * p.circuit.v_ref;
    let input =
        InputSignal::Sinusoid { freq: coherent_input_frequency(19.8e6, f_s, 1024)?, offset: half, amplitude: half };

    let mut rows = Vec::new();
    for ideal_diode in [false, true] {
        let mut h = p.harvester.clone();
        h.ideal_diode = ideal_diode;
        let cfg = SimConfig::new(p.circuit.clone(), h, plan, input.clone(), SimDuration::Samples(5000));
        let trace = run_simulation(&cfg)?;
        if !ideal_diode {
            write_timeseries_csv(File::create("timeseries.csv")?, &trace)?;
        }
        rows.push((ideal_diode, trace));
    }

    for (ideal, t) in &rows {
        let consumed = t.average_consumed_per_sample();
        let harvested = t.harvested_per_sample().unwrap_or(0.0);
        println!("{}", if *ideal { "ideal diode" } else { "bidirectional switch" });
        println!("  transfers at samples {:?}", t.transfers.iter().map(|e| e.sample_index).collect::<Vec<_>>());
        println!("  plateau {:.1} mV", t.plateau_voltage().unwrap_or(0.0) * 1e3);
        println!(
            "  per sample: consumed {:.3} pJ, harvested {:.3} pJ, gain {:+.2} dB",
            consumed * 1e12,
            harvested * 1e12,
            10.0 * (harvested / consumed).log10()
        );
    }
    println!("wrote timeseries.csv");
    Ok(())
}
