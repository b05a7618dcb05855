//! Time-domain behavioral model of the eSampling converter.

pub mod harvester;
pub mod reconstruct;
pub mod run;
pub mod sar;
pub mod sndr;
pub mod synth;

pub use harvester::transfer_energy_per_sample;
pub use reconstruct::{reconstruct_samples, ReconstructionFilter};
pub use run::{run_simulation, InputSignal, SimConfig, SimDuration, SimTrace, TransferEvent};
pub use sar::{sar_convert, Conversion};
pub use sndr::{coherent_input_frequency, sndr_fft, SndrReport, Window};
pub use synth::{empirical_nmse, synthesize_shaped_gaussian, MonteCarloNmse, MonteCarloOptions};
