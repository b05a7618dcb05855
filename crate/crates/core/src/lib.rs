//! Energy-fidelity analysis and behavioral simulation of eSampling ADCs:
//! sample-and-hold SAR converters that route the input into an
//! energy-harvesting capacitor while the held sample is being converted.
//!
//! The crate is organised bottom-up:
//!
//! - [`psd`]: input spectral densities and their aliased replicas
//! - [`sampling`]: minimal NMSE of linear reconstruction from uniform samples
//! - [`energy`]: timing, per-sample consumption and harvesting formulas
//! - [`tradeoff`]: the two constrained energy/fidelity problems and curves
//! - [`sim`]: time-domain simulation with per-code DAC energy, harvester
//!   dynamics, reconstruction and FFT-based SNDR
//! - [`presets`], [`config`], [`export`] and [`cli`]: parameter sets, config
//!   files, CSV/JSON output and the command-line front end
//!
//! ```
//! use esampling::{presets, psd::PsdModel, tradeoff::TradeoffProblem};
//!
//! let preset = presets::builtin("paper-example").unwrap();
//! let psd = PsdModel::flat(preset.circuit.sigma_x2(), preset.f_m).unwrap();
//! let problem = TradeoffProblem::new(&psd, &preset.circuit, &preset.harvester).unwrap();
//! let ratio = problem.nyquist_energy_ratio().unwrap();
//! assert!((ratio.db - 17.8).abs() < 0.1);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod energy;
pub mod error;
pub mod export;
pub mod presets;
pub mod psd;
pub mod quad;
pub mod sampling;
pub mod sim;
pub mod tradeoff;

pub use error::{Error, Result};
