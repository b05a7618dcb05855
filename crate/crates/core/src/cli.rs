//! Command-line front end.
//!
//! Settings resolve in order: built-in or directory preset, then the
//! `--config` file, then `--set` overrides, then command flags.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::{parse_quantity_str, FlatConfig, Unit};
use crate::energy::{self, acquisition_time, harvested_energy, hold_energy, min_hold_time, TimingPlan};
use crate::error::{invalid, Error, Result};
use crate::export::{self, SndrSummary};
use crate::presets::{self, Preset};
use crate::psd::{PsdModel, TabulatedPsd};
use crate::sampling::{nmse_result, NmseResult};
use crate::sim::{
    coherent_input_frequency, run_simulation, sndr_fft, InputSignal, SimConfig, SimDuration, SimTrace, SndrReport,
    Window,
};
use crate::tradeoff::{Solution, SolverOptions, TradeoffPoint, TradeoffProblem};

/// Exit status for infeasible constraints.
pub const EXIT_INFEASIBLE: i32 = 3;
/// Exit status for every other error.
pub const EXIT_ERROR: i32 = 1;

const DEFAULT_GRID: &str = "2fm:0.3fm:50";
const DEFAULT_SAMPLES: u64 = 4096;
const DEFAULT_FFT: u64 = 1024;

#[derive(Debug, Parser)]
#[command(name = "esampling", version, about = "Energy/fidelity analysis and simulation of energy-harvesting SAR ADCs")]
pub struct Cli {
    /// Flat TOML config file.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Preset name [default: paper-example].
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Directory of `<name>.toml` presets [env: ESAMPLING_PRESET_DIR].
    #[arg(long, global = true, value_name = "DIR")]
    pub preset_dir: Option<PathBuf>,
    /// Override one config key, e.g. `--set c_u="12 fF"`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Write to this file instead of stdout.
    #[arg(long, short, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List presets, or print one as a config file.
    Presets {
        #[arg(long, value_name = "NAME")]
        dump: Option<String>,
    },
    /// Sampling NMSE over a set of rates.
    Nmse(NmseArgs),
    /// Per-sample energy budget of the converter.
    Energy(EnergyArgs),
    /// Energy/fidelity curves, or one of the two constrained optima.
    Tradeoff(TradeoffArgs),
    /// Harvested-to-consumed energy ratio at the Nyquist rate.
    Nyquist(NyquistArgs),
    /// Time-domain simulation with harvester ledgers.
    Simulate(SimulateArgs),
    /// Output spectrum and SNDR, from a simulation or a codes CSV.
    Sndr(SndrArgs),
}

#[derive(Debug, Args)]
pub struct NmseArgs {
    /// flat, unimodal, multimodal or table:PATH.
    #[arg(long)]
    pub psd: Option<String>,
    /// `start:end:count` or a comma list; rates in Hz, `<x>fm` or `<x>nyquist`.
    #[arg(long)]
    pub fs_grid: Option<String>,
    /// Resolution for the reported quantization floor.
    #[arg(long)]
    pub bits: Option<u32>,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    #[arg(long)]
    pub bits: Option<u32>,
    /// Also report harvesting at this rate.
    #[arg(long)]
    pub fs: Option<String>,
}

#[derive(Debug, Args)]
pub struct TradeoffArgs {
    #[arg(long)]
    pub psd: Option<String>,
    /// Comma list of resolutions.
    #[arg(long)]
    pub bits: Option<String>,
    /// Rates to tabulate; rows come out in decreasing `f_s`.
    #[arg(long, conflicts_with_all = ["epsilon", "delta_db"])]
    pub fs_grid: Option<String>,
    /// Maximize the energy ratio subject to NMSE <= epsilon.
    #[arg(long, conflicts_with = "delta_db")]
    pub epsilon: Option<f64>,
    /// Minimize NMSE subject to an energy ratio of at least this many dB.
    #[arg(long, allow_hyphen_values = true)]
    pub delta_db: Option<f64>,
    /// With --delta-db, also search slower rates (for non-monotone spectra).
    #[arg(long)]
    pub global: bool,
}

#[derive(Debug, Args)]
pub struct NyquistArgs {
    #[arg(long)]
    pub psd: Option<String>,
    #[arg(long)]
    pub bits: Option<String>,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// `sinusoid:FREQ[:AMPLITUDE[:OFFSET]]` or `gaussian[:KIND]`.
    #[arg(long)]
    pub input: Option<String>,
    /// Sampling rate [default: preset f_s].
    #[arg(long)]
    pub fs: Option<String>,
    #[arg(long)]
    pub bits: Option<u32>,
    #[arg(long)]
    pub samples: Option<u64>,
    /// FFT length for the SNDR.
    #[arg(long)]
    pub fft: Option<u64>,
    #[arg(long, value_enum)]
    pub window: Option<WindowArg>,
    /// Keep the tone frequency as given instead of moving it to an odd FFT bin.
    #[arg(long)]
    pub no_coherent: bool,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub sim: SimArgs,
    /// Write timeseries.csv, codes.csv, spectrum.csv and summary.json here.
    #[arg(long, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SndrArgs {
    #[command(flatten)]
    pub sim: SimArgs,
    /// Analyse codes from a `sample_index,code` CSV instead of simulating.
    #[arg(long, value_name = "FILE")]
    pub codes: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WindowArg {
    Rectangular,
    Hann,
}

/// Parse `std::env::args`, run, and return the process exit status.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            report_error(&e);
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        _ => EXIT_ERROR,
    }
}

/// One JSON object on stderr: `{"error": kind, "message": ...}`.
pub fn report_error(e: &Error) {
    let mut rec = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
    if let Error::UnknownPreset { available, .. } = e {
        rec["available"] = serde_json::json!(available);
    }
    eprintln!("{rec}");
}

struct Ctx {
    cfg: FlatConfig,
    preset: Preset,
    preset_dir: Option<PathBuf>,
    format: Option<Format>,
    output: Option<PathBuf>,
}

pub fn run(cli: &Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => FlatConfig::from_path(path)?,
        None => FlatConfig::default(),
    };
    for a in &cli.overrides {
        cfg.set_assignment(a)?;
    }
    let preset_dir = cli.preset_dir.clone().or_else(presets::env_preset_dir);

    if let Command::Presets { dump } = &cli.command {
        let ctx =
            Ctx { cfg, preset: presets::paper_example(), preset_dir, format: cli.format, output: cli.output.clone() };
        return cmd_presets(&ctx, dump.as_deref());
    }

    let name = match &cli.preset {
        Some(n) => n.clone(),
        None => cfg.text("preset")?.unwrap_or(presets::PAPER_EXAMPLE).to_string(),
    };
    let mut preset = presets::load(&name, preset_dir.as_deref())?;
    presets::apply(&mut preset, &cfg)?;
    let format = match cli.format {
        Some(f) => Some(f),
        None => cfg.text("format")?.map(parse_format).transpose()?,
    };
    let output = cli.output.clone().or(cfg.text("output")?.map(PathBuf::from));
    let ctx = Ctx { cfg, preset, preset_dir, format, output };

    match &cli.command {
        Command::Presets { .. } => unreachable!(),
        Command::Nmse(a) => cmd_nmse(&ctx, a),
        Command::Energy(a) => cmd_energy(&ctx, a),
        Command::Tradeoff(a) => cmd_tradeoff(&ctx, a),
        Command::Nyquist(a) => cmd_nyquist(&ctx, a),
        Command::Simulate(a) => cmd_simulate(&ctx, a),
        Command::Sndr(a) => cmd_sndr(&ctx, a),
    }
}

fn parse_format(s: &str) -> Result<Format> {
    Format::from_str(s, true).map_err(|_| Error::Config(format!("format must be text, csv or json, got `{s}`")))
}

impl Ctx {
    fn format(&self, allowed: &[Format]) -> Result<Format> {
        let f = self.format.unwrap_or(allowed[0]);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(invalid(format!("this command does not produce {f:?} output")))
        }
    }

    fn emit(&self, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
        match &self.output {
            Some(path) => {
                let mut w = BufWriter::new(File::create(path)?);
                body(&mut w)?;
                w.flush()?;
            }
            None => {
                let stdout = io::stdout();
                let mut w = stdout.lock();
                body(&mut w)?;
                w.flush()?;
            }
        }
        Ok(())
    }

    fn psd(&self, flag: Option<&str>) -> Result<PsdModel> {
        let kind = match flag {
            Some(k) => k.to_string(),
            None => match (self.cfg.text("psd")?, self.cfg.text("psd_table")?) {
                (Some(k), _) => k.to_string(),
                (None, Some(path)) => format!("table:{path}"),
                (None, None) => "flat".into(),
            },
        };
        self.psd_of_kind(&kind)
    }

    fn psd_of_kind(&self, kind: &str) -> Result<PsdModel> {
        let sx2 = self.preset.circuit.sigma_x2();
        let f_m = self.preset.f_m;
        let sigma = self.cfg.quantity("psd_sigma")?;
        match (kind, sigma) {
            ("flat", _) => PsdModel::flat(sx2, f_m),
            ("unimodal", None) => PsdModel::unimodal_for_band(sx2, f_m),
            ("unimodal", Some(s)) => PsdModel::unimodal(sx2, f_m, s),
            ("multimodal", None) => PsdModel::multimodal_for_band(sx2, f_m),
            ("multimodal", Some(s)) => PsdModel::multimodal(sx2, f_m, s),
            _ => match kind.strip_prefix("table:") {
                Some(path) => PsdModel::tabulated(TabulatedPsd::from_csv_path(path)?).with_power(sx2),
                None => {
                    Err(Error::Config(format!("unknown PSD `{kind}`; use flat, unimodal, multimodal or table:PATH")))
                }
            },
        }
    }

    fn bits_list(&self, flag: Option<&str>) -> Result<Vec<u32>> {
        let list: Vec<u64> = match flag {
            Some(s) => s
                .split(',')
                .map(|t| t.trim().parse::<u64>().map_err(|_| invalid(format!("bad bit count `{t}`"))))
                .collect::<Result<_>>()?,
            None => match self.cfg.integer_list("bits")? {
                Some(v) => v,
                None => vec![self.preset.circuit.bits as u64],
            },
        };
        if list.is_empty() {
            return Err(invalid("no resolutions given"));
        }
        list.into_iter().map(|b| u32::try_from(b).map_err(|_| invalid(format!("bit count {b} too large")))).collect()
    }

    fn bits(&self, flag: Option<u32>) -> u32 {
        flag.unwrap_or(self.preset.circuit.bits)
    }

    fn rate(&self, flag: Option<&str>) -> Result<f64> {
        match flag {
            Some(s) => parse_rate(s, self.preset.f_m),
            None => Ok(self.preset.sample_rate),
        }
    }

    fn solver_options(&self) -> Result<SolverOptions> {
        let mut o = SolverOptions::default();
        if let Some(v) = self.cfg.quantity("rel_tol")? {
            o.rel_tol = v;
        }
        if let Some(v) = self.cfg.integer("max_iterations")? {
            o.max_iterations = v as usize;
        }
        if let Some(v) = self.cfg.quantity("ceiling_factor")? {
            o.ceiling_factor = v;
        }
        Ok(o)
    }

    fn problem(&self, psd: &PsdModel, bits: u32) -> Result<TradeoffProblem> {
        let circuit = self.preset.circuit.with_bits(bits);
        Ok(TradeoffProblem::new(psd, &circuit, &self.preset.harvester)?.with_options(self.solver_options()?))
    }
}

/// A rate in Hz: `40e6`, `"40 MHz"`, `1.5fm` (times the band edge) or
/// `0.3nyquist` (times twice the band edge).
pub fn parse_rate(token: &str, f_m: f64) -> Result<f64> {
    let t = token.trim();
    let scaled = |rest: &str, unit: f64| -> Result<f64> {
        let rest = rest.trim();
        let k = if rest.is_empty() {
            1.0
        } else {
            rest.parse::<f64>().map_err(|_| invalid(format!("bad rate `{token}`")))?
        };
        Ok(k * unit)
    };
    let f = if let Some(rest) = t.strip_suffix("nyquist") {
        scaled(rest, 2.0 * f_m)?
    } else if let Some(rest) = t.strip_suffix("fm") {
        scaled(rest, f_m)?
    } else {
        parse_quantity_str(t, Unit::Hertz).map_err(|_| invalid(format!("bad rate `{token}`")))?
    };
    if !(f > 0.0 && f.is_finite()) {
        return Err(invalid(format!("rate `{token}` must be positive")));
    }
    Ok(f)
}

/// `start:end:count` (linear, endpoints included) or a comma list.
pub fn parse_rate_grid(spec: &str, f_m: f64) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [start, end, count] => {
            let a = parse_rate(start, f_m)?;
            let b = parse_rate(end, f_m)?;
            let n: usize = count.trim().parse().map_err(|_| invalid(format!("bad grid count `{count}`")))?;
            match n {
                0 => Err(invalid("grid needs at least one point")),
                1 => Ok(vec![a]),
                _ => Ok((0..n).map(|i| if i == n - 1 { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect()),
            }
        }
        [list] => list.split(',').map(|t| parse_rate(t, f_m)).collect(),
        _ => Err(invalid(format!("grid `{spec}` must be start:end:count or a comma list"))),
    }
}

/// Five significant digits with an SI prefix: `21.459 pJ`.
pub fn si(x: f64, unit: &str) -> String {
    const PREFIXES: [(f64, &str); 9] = [
        (1e9, "G"),
        (1e6, "M"),
        (1e3, "k"),
        (1.0, ""),
        (1e-3, "m"),
        (1e-6, "u"),
        (1e-9, "n"),
        (1e-12, "p"),
        (1e-15, "f"),
    ];
    if x == 0.0 || !x.is_finite() {
        return format!("{x} {unit}");
    }
    let (scale, prefix) = PREFIXES.iter().copied().find(|(s, _)| x.abs() >= *s).unwrap_or(PREFIXES[8]);
    let v = x / scale;
    let decimals = 4usize.saturating_sub(v.abs().log10().floor().max(0.0) as usize);
    format!("{v:.decimals$} {prefix}{unit}")
}

fn cmd_presets(ctx: &Ctx, dump: Option<&str>) -> Result<()> {
    let dir = ctx.preset_dir.as_deref();
    match dump {
        Some(name) => {
            let mut p = presets::load(name, dir)?;
            presets::apply(&mut p, &ctx.cfg)?;
            match ctx.format(&[Format::Text, Format::Json])? {
                Format::Json => ctx.emit(|w| export::write_json(w, &p)),
                _ => ctx.emit(|w| Ok(w.write_all(presets::dump(&p).as_bytes())?)),
            }
        }
        None => {
            let names = presets::list(dir)?;
            match ctx.format(&[Format::Text, Format::Json])? {
                Format::Json => ctx.emit(|w| export::write_json(w, &names)),
                _ => ctx.emit(|w| {
                    for n in &names {
                        writeln!(w, "{n}")?;
                    }
                    Ok(())
                }),
            }
        }
    }
}

fn cmd_nmse(ctx: &Ctx, a: &NmseArgs) -> Result<()> {
    let psd = ctx.psd(a.psd.as_deref())?;
    let grid = match a.fs_grid.as_deref().map(str::to_string).or(ctx.cfg.text("fs_grid")?.map(str::to_string)) {
        Some(g) => parse_rate_grid(&g, ctx.preset.f_m)?,
        None => parse_rate_grid(DEFAULT_GRID, ctx.preset.f_m)?,
    };
    let bits = ctx.bits(a.bits);
    let rows: Vec<NmseResult> = grid.iter().map(|&f| nmse_result(&psd, f, bits)).collect::<Result<_>>()?;
    match ctx.format(&[Format::Csv, Format::Json])? {
        Format::Json => ctx.emit(|w| export::write_json(w, &rows)),
        _ => ctx.emit(|w| export::write_nmse_csv(w, &rows)),
    }
}

#[derive(Debug, Serialize)]
struct EnergyReport {
    n_bits: u32,
    t_aq_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_h_min_s: Option<f64>,
    e_comparator_j: f64,
    e_sar_logic_j: f64,
    e_dac_j: f64,
    e_hold_j: f64,
    rho: f64,
    gamma_c: f64,
    a1_j_per_v: f64,
    a2_j_per_v2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    f_s_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_h_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    e_h_j: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    e_ratio_db: Option<f64>,
}

fn cmd_energy(ctx: &Ctx, a: &EnergyArgs) -> Result<()> {
    let circuit = ctx.preset.circuit.with_bits(ctx.bits(a.bits));
    circuit.validate()?;
    let b = hold_energy(&circuit)?;
    let t_aq = acquisition_time(&circuit)?;
    let mut r = EnergyReport {
        n_bits: circuit.bits,
        t_aq_s: t_aq,
        t_h_min_s: min_hold_time(&circuit).ok(),
        e_comparator_j: b.e_comparator,
        e_sar_logic_j: b.e_sar_logic,
        e_dac_j: b.e_dac,
        e_hold_j: b.e_hold,
        rho: b.rho,
        gamma_c: b.gamma,
        a1_j_per_v: b.a1,
        a2_j_per_v2: b.a2,
        f_s_hz: None,
        t_h_s: None,
        eta: None,
        e_h_j: None,
        e_ratio_db: None,
    };
    let rate = match &a.fs {
        Some(s) => Some(parse_rate(s, ctx.preset.f_m)?),
        None => ctx.cfg.quantity("f_s")?,
    };
    if let Some(f_s) = rate {
        let plan = TimingPlan::from_rate(t_aq, f_s)?;
        let h = &ctx.preset.harvester;
        let eta = h.eta(plan.t_h);
        let e_h = harvested_energy(plan.t_h, eta, h.resistance, circuit.sigma_x2());
        r.f_s_hz = Some(f_s);
        r.t_h_s = Some(plan.t_h);
        r.eta = Some(eta);
        r.e_h_j = Some(e_h);
        r.e_ratio_db = Some(energy::EnergyRatio::from_linear(e_h / b.e_hold).db);
    }
    match ctx.format(&[Format::Text, Format::Json])? {
        Format::Json => ctx.emit(|w| export::write_json(w, &r)),
        _ => ctx.emit(|w| {
            writeln!(w, "bits            {}", r.n_bits)?;
            writeln!(w, "T_aq            {}", si(r.t_aq_s, "s"))?;
            if let Some(t) = r.t_h_min_s {
                writeln!(w, "T_h min         {}", si(t, "s"))?;
            }
            writeln!(w, "E_comparator    {}", si(r.e_comparator_j, "J"))?;
            writeln!(w, "E_sar_logic     {}", si(r.e_sar_logic_j, "J"))?;
            writeln!(w, "E_dac           {}", si(r.e_dac_j, "J"))?;
            writeln!(w, "E_hold          {}", si(r.e_hold_j, "J"))?;
            if let (Some(f), Some(t), Some(e), Some(db)) = (r.f_s_hz, r.t_h_s, r.e_h_j, r.e_ratio_db) {
                writeln!(w, "f_s             {}", si(f, "Hz"))?;
                writeln!(w, "T_h             {}", si(t, "s"))?;
                writeln!(w, "E_h             {}", si(e, "J"))?;
                writeln!(w, "E_h / E_hold    {db:.4} dB")?;
            }
            Ok(())
        }),
    }
}

#[derive(Debug, Serialize)]
struct CurveRecord<'a> {
    n_bits: u32,
    points: &'a [TradeoffPoint],
}

#[derive(Debug, Serialize)]
struct SolutionRecord {
    n_bits: u32,
    #[serde(flatten)]
    solution: Solution,
}

fn cmd_tradeoff(ctx: &Ctx, a: &TradeoffArgs) -> Result<()> {
    let psd = ctx.psd(a.psd.as_deref())?;
    let bits = ctx.bits_list(a.bits.as_deref())?;
    let format = ctx.format(&[Format::Csv, Format::Json])?;

    // flags win over config; among config keys a solver target wins over a grid
    let (epsilon, delta_db, grid) = if a.fs_grid.is_some() || a.epsilon.is_some() || a.delta_db.is_some() {
        (a.epsilon, a.delta_db, a.fs_grid.clone())
    } else {
        let e = ctx.cfg.quantity("epsilon")?;
        let d = ctx.cfg.quantity("delta_db")?;
        if e.is_some() && d.is_some() {
            return Err(Error::Config("give either `epsilon` or `delta_db`, not both".into()));
        }
        (e, d, ctx.cfg.text("fs_grid")?.map(str::to_string))
    };

    if epsilon.is_some() || delta_db.is_some() {
        let mut rows = Vec::with_capacity(bits.len());
        for &b in &bits {
            let problem = ctx.problem(&psd, b)?;
            let solution = match (epsilon, delta_db) {
                (Some(eps), _) => problem.max_ratio_under_fidelity(eps)?,
                (None, Some(db)) => {
                    let delta = 10f64.powf(db / 10.0);
                    if a.global {
                        problem.min_nmse_under_energy_global(delta)?
                    } else {
                        problem.min_nmse_under_energy(delta)?
                    }
                }
                (None, None) => unreachable!(),
            };
            rows.push(SolutionRecord { n_bits: b, solution });
        }
        return match format {
            Format::Json => ctx.emit(|w| export::write_json(w, &rows)),
            _ => {
                let family: Vec<(u32, Vec<TradeoffPoint>)> =
                    rows.iter().map(|r| (r.n_bits, vec![r.solution.point])).collect();
                ctx.emit(|w| export::write_tradeoff_family_csv(w, &family))
            }
        };
    }

    let mut rates = parse_rate_grid(grid.as_deref().unwrap_or(DEFAULT_GRID), ctx.preset.f_m)?;
    rates.sort_by(|x, y| y.total_cmp(x));
    rates.dedup();
    let mut family = Vec::with_capacity(bits.len());
    for &b in &bits {
        let problem = ctx.problem(&psd, b)?;
        family.push((b, problem.tradeoff_curve(&rates)?));
    }
    match (format, family.as_slice()) {
        (Format::Json, [(_, points)]) => ctx.emit(|w| export::write_json(w, points)),
        (Format::Json, _) => {
            let recs: Vec<CurveRecord> = family.iter().map(|(b, p)| CurveRecord { n_bits: *b, points: p }).collect();
            ctx.emit(|w| export::write_json(w, &recs))
        }
        (_, [(_, points)]) => ctx.emit(|w| export::write_tradeoff_csv(w, points)),
        _ => ctx.emit(|w| export::write_tradeoff_family_csv(w, &family)),
    }
}

#[derive(Debug, Serialize)]
struct NyquistRecord {
    n_bits: u32,
    f_s_hz: f64,
    #[serde(rename = "T_s_s")]
    t_s: f64,
    e_h_j: f64,
    e_hold_j: f64,
    e_ratio: f64,
    e_ratio_db: f64,
}

fn cmd_nyquist(ctx: &Ctx, a: &NyquistArgs) -> Result<()> {
    let psd = ctx.psd(a.psd.as_deref())?;
    let mut rows = Vec::new();
    for b in ctx.bits_list(a.bits.as_deref())? {
        let problem = ctx.problem(&psd, b)?;
        let ratio = problem.nyquist_energy_ratio()?;
        let band = psd.bandlimit().expect("checked by nyquist_energy_ratio");
        let f_s = 2.0 * band;
        let e_hold = problem.consumed();
        rows.push(NyquistRecord {
            n_bits: b,
            f_s_hz: f_s,
            t_s: 1.0 / f_s,
            e_h_j: ratio.linear * e_hold,
            e_hold_j: e_hold,
            e_ratio: ratio.linear,
            e_ratio_db: ratio.db,
        });
    }
    match ctx.format(&[Format::Text, Format::Json])? {
        Format::Json => ctx.emit(|w| export::write_json(w, &rows)),
        _ => ctx.emit(|w| {
            for r in &rows {
                writeln!(
                    w,
                    "n={} f_s={} E_h={} E_hold={} ratio={:.4} dB",
                    r.n_bits,
                    si(r.f_s_hz, "Hz"),
                    si(r.e_h_j, "J"),
                    si(r.e_hold_j, "J"),
                    r.e_ratio_db
                )?;
            }
            Ok(())
        }),
    }
}

struct SimRun {
    trace: SimTrace,
    input: InputSignal,
    sndr: Option<SndrReport>,
}

fn window_of(ctx: &Ctx, flag: Option<WindowArg>) -> Result<Window> {
    let w = match flag {
        Some(w) => w,
        None => match ctx.cfg.text("window")? {
            Some(s) => WindowArg::from_str(s, true)
                .map_err(|_| Error::Config(format!("window must be rectangular or hann, got `{s}`")))?,
            None => WindowArg::Rectangular,
        },
    };
    Ok(match w {
        WindowArg::Rectangular => Window::Rectangular,
        WindowArg::Hann => Window::Hann,
    })
}

fn fft_len(ctx: &Ctx, a: &SimArgs) -> Result<Option<usize>> {
    Ok(a.fft.or(ctx.cfg.integer("fft")?).map(|n| n as usize))
}

fn simulate(ctx: &Ctx, a: &SimArgs, default_fft: Option<usize>) -> Result<SimRun> {
    let circuit = ctx.preset.circuit.with_bits(ctx.bits(a.bits));
    let f_s = ctx.rate(a.fs.as_deref())?;
    let plan = TimingPlan::from_rate(acquisition_time(&circuit)?, f_s)?;
    let samples = a.samples.or(ctx.cfg.integer("samples")?).unwrap_or(DEFAULT_SAMPLES) as usize;
    let n_fft = fft_len(ctx, a)?.or(default_fft);
    let seed = a.seed.or(ctx.cfg.integer("seed")?).unwrap_or(1);
    let spec = match &a.input {
        Some(s) => s.clone(),
        None => ctx.cfg.text("input")?.map(str::to_string).ok_or_else(|| invalid("--input is required"))?,
    };
    let half = 0.5 * circuit.v_ref;
    let mut parts = spec.split(':');
    let input = match parts.next().unwrap_or_default() {
        "sinusoid" | "sine" => {
            let freq = parse_rate(parts.next().ok_or_else(|| invalid("sinusoid needs a frequency"))?, ctx.preset.f_m)?;
            let volts = |p: Option<&str>, d: f64| p.map(|s| parse_quantity_str(s, Unit::Volt)).unwrap_or(Ok(d));
            let amplitude = volts(parts.next(), half)?;
            let offset = volts(parts.next(), half)?;
            let freq = match n_fft {
                Some(n) if !a.no_coherent => coherent_input_frequency(freq, f_s, n)?,
                _ => freq,
            };
            InputSignal::Sinusoid { freq, offset, amplitude }
        }
        "gaussian" => {
            let rest: Vec<&str> = parts.collect();
            let psd = if rest.is_empty() { ctx.psd(None)? } else { ctx.psd_of_kind(&rest.join(":"))? };
            InputSignal::ShapedGaussian { psd, offset: half, seed }
        }
        other => return Err(invalid(format!("unknown input `{other}`; use sinusoid:FREQ or gaussian[:KIND]"))),
    };
    let mut cfg = SimConfig::new(
        circuit.clone(),
        ctx.preset.harvester.clone(),
        plan,
        input.clone(),
        SimDuration::Samples(samples),
    );
    if let Some(s) = ctx.cfg.integer("hold_substeps")? {
        cfg.hold_substeps = s as usize;
    }
    let trace = run_simulation(&cfg)?;
    let sndr = match n_fft {
        Some(n) => Some(codes_sndr(&trace.codes, f_s, n, circuit.bits, window_of(ctx, a.window)?)?),
        None => None,
    };
    Ok(SimRun { trace, input, sndr })
}

fn codes_sndr(codes: &[u32], f_s: f64, n_fft: usize, bits: u32, window: Window) -> Result<SndrReport> {
    let x: Vec<f64> = codes.iter().map(|&c| c as f64).collect();
    sndr_fft(&x, f_s, n_fft, 2f64.powi(bits as i32 - 1), window)
}

#[derive(Debug, Serialize)]
struct SimSummary {
    n_bits: u32,
    samples: usize,
    f_s_hz: f64,
    input: InputSignal,
    overloads: usize,
    transfers: usize,
    e_consumed_j: f64,
    e_harvested_j: f64,
    consumed_per_sample_j: f64,
    harvested_per_sample_j: Option<f64>,
    plateau_voltage_v: Option<f64>,
    sndr: Option<SndrSummary>,
}

fn summary(run: &SimRun) -> SimSummary {
    let t = &run.trace;
    SimSummary {
        n_bits: t.bits,
        samples: t.len(),
        f_s_hz: t.f_s,
        input: run.input.clone(),
        overloads: t.overloads,
        transfers: t.transfers.len(),
        e_consumed_j: t.e_consumed.last().copied().unwrap_or(0.0),
        e_harvested_j: t.e_harvested.last().copied().unwrap_or(0.0),
        consumed_per_sample_j: t.average_consumed_per_sample(),
        harvested_per_sample_j: t.harvested_per_sample(),
        plateau_voltage_v: t.plateau_voltage(),
        sndr: run.sndr.as_ref().map(SndrSummary::from),
    }
}

fn write_summary_text(w: &mut dyn Write, s: &SimSummary) -> Result<()> {
    let opt = |v: Option<f64>, unit: &str| v.map_or("n/a".to_string(), |x| si(x, unit));
    writeln!(w, "samples               {}", s.samples)?;
    writeln!(w, "f_s                   {}", si(s.f_s_hz, "Hz"))?;
    if let InputSignal::Sinusoid { freq, .. } = s.input {
        writeln!(w, "input tone            {}", si(freq, "Hz"))?;
    }
    writeln!(w, "overloads             {}", s.overloads)?;
    writeln!(w, "transfers             {}", s.transfers)?;
    writeln!(w, "consumed              {}", si(s.e_consumed_j, "J"))?;
    writeln!(w, "harvested             {}", si(s.e_harvested_j, "J"))?;
    writeln!(w, "consumed per sample   {}", si(s.consumed_per_sample_j, "J"))?;
    writeln!(w, "harvested per sample  {}", opt(s.harvested_per_sample_j, "J"))?;
    writeln!(w, "V_EH plateau          {}", opt(s.plateau_voltage_v, "V"))?;
    if let Some(r) = &s.sndr {
        writeln!(w, "SNDR                  {:.4} dB", r.sndr_db)?;
        writeln!(w, "ENOB                  {:.4}", r.enob)?;
        writeln!(w, "noise floor gap       {:.4} dB", r.noise_floor_gap_db)?;
    }
    Ok(())
}

fn cmd_simulate(ctx: &Ctx, a: &SimulateArgs) -> Result<()> {
    let run = simulate(ctx, &a.sim, None)?;
    let s = summary(&run);
    if let Some(dir) = &a.output_dir {
        std::fs::create_dir_all(dir)?;
        write_file(&dir.join("timeseries.csv"), |w| export::write_timeseries_csv(w, &run.trace))?;
        write_file(&dir.join("codes.csv"), |w| export::write_codes_csv(w, &run.trace))?;
        if let Some(r) = &run.sndr {
            write_file(&dir.join("spectrum.csv"), |w| export::write_spectrum_csv(w, &r.spectrum))?;
        }
        write_file(&dir.join("summary.json"), |w| export::write_json(w, &s))?;
    }
    match ctx.format(&[Format::Text, Format::Json])? {
        Format::Json => ctx.emit(|w| export::write_json(w, &s)),
        _ => ctx.emit(|w| write_summary_text(w, &s)),
    }
}

fn write_file(path: &Path, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}

fn read_codes(path: &Path) -> Result<Vec<u32>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    let col = headers
        .iter()
        .position(|h| h.trim() == "code")
        .ok_or_else(|| Error::Config(format!("{} has no `code` column", path.display())))?;
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            let field = rec.get(col).unwrap_or_default().trim();
            field.parse::<u32>().map_err(|_| Error::Config(format!("bad code `{field}` in {}", path.display())))
        })
        .collect()
}

fn cmd_sndr(ctx: &Ctx, a: &SndrArgs) -> Result<()> {
    let report = match &a.codes {
        Some(path) => {
            let codes = read_codes(path)?;
            let n_fft = fft_len(ctx, &a.sim)?.unwrap_or(DEFAULT_FFT as usize);
            let f_s = ctx.rate(a.sim.fs.as_deref())?;
            codes_sndr(&codes, f_s, n_fft, ctx.bits(a.sim.bits), window_of(ctx, a.sim.window)?)?
        }
        None => simulate(ctx, &a.sim, Some(DEFAULT_FFT as usize))?.sndr.expect("FFT length is set"),
    };
    match ctx.format(&[Format::Csv, Format::Json, Format::Text])? {
        Format::Json => ctx.emit(|w| export::write_json(w, &report)),
        Format::Text => ctx.emit(|w| {
            writeln!(w, "tone             {} (bin {})", si(report.signal_freq_hz, "Hz"), report.signal_bin)?;
            writeln!(w, "SNDR             {:.4} dB", report.sndr_db)?;
            writeln!(w, "ENOB             {:.4}", report.enob)?;
            writeln!(w, "noise floor gap  {:.4} dB", report.noise_floor_gap_db)?;
            Ok(())
        }),
        Format::Csv => ctx.emit(|w| export::write_spectrum_csv(w, &report.spectrum)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FM: f64 = 19.8e6;

    #[test]
    fn rate_tokens() {
        assert_eq!(parse_rate("40e6", FM).unwrap(), 40e6);
        assert_eq!(parse_rate("40 MHz", FM).unwrap(), 40e6);
        assert_eq!(parse_rate("nyquist", FM).unwrap(), 2.0 * FM);
        assert_eq!(parse_rate("0.5nyquist", FM).unwrap(), FM);
        assert_eq!(parse_rate("1.5fm", FM).unwrap(), 1.5 * FM);
        assert!(parse_rate("-1", FM).is_err());
        assert!(parse_rate("fast", FM).is_err());
        assert!(parse_rate("3 V", FM).is_err());
    }

    #[test]
    fn si_formatting() {
        assert_eq!(si(2.1459223817e-11, "J"), "21.459 pJ");
        assert_eq!(si(39.6e6, "Hz"), "39.600 MHz");
        assert_eq!(si(0.39964, "V"), "399.64 mV");
        assert_eq!(si(0.0, "J"), "0 J");
        assert_eq!(si(1e-18, "J"), "0.0010 fJ");
    }

    #[test]
    fn grids() {
        let g = parse_rate_grid("nyquist:0.3nyquist:50", FM).unwrap();
        assert_eq!(g.len(), 50);
        assert_eq!(g[0], 2.0 * FM);
        assert_eq!(g[49], 0.3 * 2.0 * FM);
        assert!(g.windows(2).all(|w| w[0] > w[1]));
        assert_eq!(parse_rate_grid("1e6,2e6", FM).unwrap(), vec![1e6, 2e6]);
        assert!(parse_rate_grid("1:2", FM).is_err());
        assert!(parse_rate_grid("1e6:2e6:0", FM).is_err());
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn exit_codes_by_kind() {
        assert_eq!(exit_code(&Error::Infeasible("x".into())), EXIT_INFEASIBLE);
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_ERROR);
    }
}
