//! `linksim` binary: run a BER scenario and write CSV results.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use linksim::channel::ChannelFamily;
use linksim::mapping::{BitMapping, Scheme};
use linksim_cli::error::CliError;
use linksim_cli::scenario::{self, Overrides, PRESET_NAMES};

/// OFDM link-level BER simulator.
///
/// Runs a preset study (fig1a..fig8) or a custom sweep and writes one CSV
/// per curve plus a manifest echoing the full configuration and seed.
#[derive(Debug, Parser)]
#[command(name = "linksim", version, about, max_term_width = 100)]
struct Cli {
    /// Scenario preset: fig1a, fig1b, fig2, fig3, fig4, fig5, fig6, fig7,
    /// fig8, or custom.
    #[arg(long, default_value = "custom")]
    scenario: String,

    /// Master seed; every output byte is a deterministic function of the
    /// command line and this value.
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Sweep grid as start:step:stop in dB (axis units of the scenario,
    /// Eb/N0 for all presets except fig1a/fig1b which sweep SNR).
    #[arg(long)]
    ebn0: Option<String>,

    /// Modulation family: qam, psk, or dpsk.
    #[arg(long)]
    modulation: Option<String>,

    /// Constellation order (power of two; QAM: 2, 4, 16, 64, 256).
    #[arg(long)]
    order: Option<usize>,

    /// Bit labelling: gray or natural.
    #[arg(long)]
    mapping: Option<String>,

    /// Channel family: awgn, rayleigh, or rician.
    #[arg(long)]
    channel: Option<String>,

    /// Maximum Doppler shift in Hz.
    #[arg(long)]
    fd: Option<f64>,

    /// Rician K-factor (LOS-to-scatter power ratio).
    #[arg(long)]
    k: Option<f64>,

    /// Baseband sample period in seconds.
    #[arg(long)]
    ts: Option<f64>,

    /// Number of OFDM subcarriers (power of two).
    #[arg(long)]
    subcarriers: Option<usize>,

    /// Cyclic prefix length in samples.
    #[arg(long)]
    cp: Option<usize>,

    /// Stop each BER point after this many bit errors.
    #[arg(long)]
    min_errors: Option<u64>,

    /// Hard per-point bit budget.
    #[arg(long)]
    max_bits: Option<u64>,

    /// Output directory for CSV files and the manifest.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "--ebn0 expects start:step:stop, got '{spec}'"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("--ebn0: '{p}' is not a number in '{spec}'")))
        })
        .collect::<Result<_, _>>()?;
    let (start, step, stop) = (nums[0], nums[1], nums[2]);
    if !start.is_finite() || !step.is_finite() || !stop.is_finite() {
        return Err(CliError::Usage(format!("--ebn0: '{spec}' must be finite")));
    }
    if step <= 0.0 {
        return Err(CliError::Usage(format!(
            "--ebn0: step must be positive, got {step}"
        )));
    }
    if stop < start {
        return Err(CliError::Usage(format!(
            "--ebn0: stop {stop} is below start {start}"
        )));
    }
    let mut grid = Vec::new();
    let mut i = 0u32;
    loop {
        let x = start + f64::from(i) * step;
        if x > stop + step * 1e-9 {
            break;
        }
        grid.push(x);
        i += 1;
    }
    Ok(grid)
}

fn parse_scheme(name: &str) -> Result<Scheme, CliError> {
    match name.to_ascii_lowercase().as_str() {
        "qam" => Ok(Scheme::Qam),
        "psk" => Ok(Scheme::Psk),
        "dpsk" => Ok(Scheme::Dpsk),
        other => Err(CliError::Usage(format!(
            "--modulation must be qam, psk or dpsk, got '{other}'"
        ))),
    }
}

fn parse_mapping(name: &str) -> Result<BitMapping, CliError> {
    match name.to_ascii_lowercase().as_str() {
        "gray" => Ok(BitMapping::Gray),
        "natural" => Ok(BitMapping::Natural),
        other => Err(CliError::Usage(format!(
            "--mapping must be gray or natural, got '{other}'"
        ))),
    }
}

fn parse_channel(name: &str) -> Result<ChannelFamily, CliError> {
    match name.to_ascii_lowercase().as_str() {
        "awgn" => Ok(ChannelFamily::Awgn),
        "rayleigh" => Ok(ChannelFamily::Rayleigh),
        "rician" => Ok(ChannelFamily::Rician),
        other => Err(CliError::Usage(format!(
            "--channel must be awgn, rayleigh or rician, got '{other}'"
        ))),
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let overrides = Overrides {
        grid: cli.ebn0.as_deref().map(parse_grid).transpose()?,
        modulation: cli.modulation.as_deref().map(parse_scheme).transpose()?,
        order: cli.order,
        mapping: cli.mapping.as_deref().map(parse_mapping).transpose()?,
        channel: cli.channel.as_deref().map(parse_channel).transpose()?,
        fd: cli.fd,
        k: cli.k,
        ts: cli.ts,
        subcarriers: cli.subcarriers,
        cp: cli.cp,
        min_errors: cli.min_errors,
        max_bits: cli.max_bits,
    };
    let s = scenario::build_scenario(&cli.scenario, &overrides)?;
    let artifacts = scenario::run_scenario(&s, cli.seed, &cli.out)?;
    for f in &artifacts.files {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if !PRESET_NAMES.contains(&cli.scenario.as_str()) {
        eprintln!(
            "error: unknown scenario '{}' (expected one of {})",
            cli.scenario,
            PRESET_NAMES.join(", ")
        );
        return ExitCode::from(1);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(u8::try_from(e.exit_code()).unwrap_or(2))
        }
    }
}
