//! Scenario presets and execution.
//!
//! Each preset bundles the constellation/channel/sweep bundle of one of the
//! simulator's standard BER studies; `custom` starts from the defaults and
//! is shaped entirely by flags.  Any flag can also override a preset field;
//! the manifest marks every value that nobody set explicitly as `[default]`.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use linksim::channel::{ChannelFamily, ChannelSpec};
use linksim::harness::{run_sweep, StoppingRule};
use linksim::link::{constellation_capture, ConstellationSpec, DiffAxis, LinkConfig};
use linksim::mapping::{BitMapping, Scheme};
use linksim::math::linear_to_db;
use linksim::ofdm::OfdmConfig;
use linksim::seed;

use crate::error::CliError;
use crate::output;

/// Frame geometry defaults shared by every scenario.
pub const DEFAULT_SUBCARRIERS: usize = 64;
pub const DEFAULT_CP: usize = 16;
pub const DEFAULT_TS: f64 = 2e-6;
/// Default constellation for `custom` runs.
pub const DEFAULT_SCHEME: Scheme = Scheme::Qam;
pub const DEFAULT_ORDER: usize = 16;
/// Symbols captured per scatter file.
pub const SCATTER_SYMBOLS: usize = 2000;

/// Sweep abscissa: presets that quote signal-to-noise ratio keep their grid
/// in SNR decibels and convert per curve; everything else is Eb/N0 directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Ebn0Db,
    SnrDb,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Ebn0Db => "ebn0_db",
            Axis::SnrDb => "snr_db",
        }
    }
}

/// One curve of a scenario.
#[derive(Debug, Clone)]
pub struct CurveDef {
    pub cfg: LinkConfig,
}

/// Constellation-scatter request (signal-space captures at fixed SNRs).
#[derive(Debug, Clone)]
pub struct ScatterDef {
    pub cfg: LinkConfig,
    pub snrs_db: Vec<f64>,
    pub symbols: usize,
}

/// A fully resolved scenario, ready to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub axis: Axis,
    /// Sweep grid in `axis` units; empty for scatter-only scenarios.
    pub grid: Vec<f64>,
    pub rule: StoppingRule,
    pub curves: Vec<CurveDef>,
    pub scatter: Option<ScatterDef>,
    /// Field names set explicitly (by the preset or a flag); everything else
    /// is marked `[default]` in the manifest.
    pub bound: BTreeSet<&'static str>,
}

/// Optional flag overrides applied on top of a preset.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub grid: Option<Vec<f64>>,
    pub modulation: Option<Scheme>,
    pub order: Option<usize>,
    pub mapping: Option<BitMapping>,
    pub channel: Option<ChannelFamily>,
    pub fd: Option<f64>,
    pub k: Option<f64>,
    pub ts: Option<f64>,
    pub subcarriers: Option<usize>,
    pub cp: Option<usize>,
    pub min_errors: Option<u64>,
    pub max_bits: Option<u64>,
}

pub const PRESET_NAMES: [&str; 10] = [
    "fig1a", "fig1b", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "custom",
];

fn base_link() -> LinkConfig {
    LinkConfig {
        constellation: ConstellationSpec::new(DEFAULT_SCHEME, DEFAULT_ORDER, BitMapping::Gray),
        ofdm: OfdmConfig {
            n_subcarriers: DEFAULT_SUBCARRIERS,
            cp_len: DEFAULT_CP,
            sample_period: DEFAULT_TS,
        },
        channel: ChannelSpec {
            family: ChannelFamily::Awgn,
            doppler_hz: 0.0,
            k_factor: 0.0,
            sample_period: DEFAULT_TS,
        },
        ebn0_db: 0.0,
        count_cp_energy: true,
        diff_axis: DiffAxis::Time,
    }
}

fn grid_range(start: f64, step: f64, stop: f64) -> Vec<f64> {
    let mut v = Vec::new();
    let mut i = 0u32;
    loop {
        let x = start + f64::from(i) * step;
        if x > stop + step * 1e-9 {
            break;
        }
        v.push(x);
        i += 1;
    }
    v
}

/// Resolve a scenario name plus flag overrides into a runnable scenario.
pub fn build_scenario(name: &str, ov: &Overrides) -> Result<Scenario, CliError> {
    let mut bound: BTreeSet<&'static str> = BTreeSet::new();
    let bind = |fields: &[&'static str], set: &mut BTreeSet<&'static str>| {
        for f in fields {
            set.insert(f);
        }
    };

    let link = base_link();
    let curve = |cfg: LinkConfig| CurveDef { cfg };
    let mut scenario = match name {
        // BER of coherent 16-QAM over AWGN, against the per-sample SNR.
        "fig1a" => {
            bind(&["modulation", "order", "channel", "grid"], &mut bound);
            Scenario {
                name: name.to_string(),
                axis: Axis::SnrDb,
                grid: grid_range(0.0, 2.0, 18.0),
                rule: StoppingRule::default(),
                curves: vec![curve(link)],
                scatter: None,
                bound,
            }
        }
        // Received 16-QAM signal-space scatter at three SNRs.
        "fig1b" => {
            bind(&["modulation", "order", "channel", "grid"], &mut bound);
            Scenario {
                name: name.to_string(),
                axis: Axis::SnrDb,
                grid: Vec::new(),
                rule: StoppingRule::default(),
                curves: Vec::new(),
                scatter: Some(ScatterDef {
                    cfg: link,
                    snrs_db: vec![7.0, 11.0, 15.0],
                    symbols: SCATTER_SYMBOLS,
                }),
                bound,
            }
        }
        // Order-16 schemes head to head on the static channel.
        "fig2" => {
            bind(&["modulation", "order", "channel"], &mut bound);
            let mut curves = Vec::new();
            for scheme in [Scheme::Qam, Scheme::Psk, Scheme::Dpsk] {
                let mut cfg = link;
                cfg.constellation = ConstellationSpec::new(scheme, 16, BitMapping::Gray);
                curves.push(curve(cfg));
            }
            Scenario {
                name: name.to_string(),
                axis: Axis::Ebn0Db,
                grid: grid_range(0.0, 2.0, 12.0),
                rule: StoppingRule::default(),
                curves,
                scatter: None,
                bound,
            }
        }
        // Level-4 modulations over slow Rayleigh fading: coherent detection
        // collapses without equalization, differential survives.
        "fig3" => {
            bind(&["modulation", "order", "channel", "fd", "ts"], &mut bound);
            let mut curves = Vec::new();
            for scheme in [Scheme::Qam, Scheme::Psk, Scheme::Dpsk] {
                let mut cfg = link;
                cfg.constellation = ConstellationSpec::new(scheme, 4, BitMapping::Gray);
                cfg.channel = ChannelSpec::rayleigh(5.0, DEFAULT_TS);
                curves.push(curve(cfg));
            }
            Scenario {
                name: name.to_string(),
                axis: Axis::Ebn0Db,
                grid: grid_range(0.0, 3.0, 30.0),
                rule: StoppingRule::default(),
                curves,
                scatter: None,
                bound,
            }
        }
        // Constellation-order effect per family over AWGN.
        "fig4" => {
            bind(&["modulation", "order", "channel"], &mut bound);
            let mut curves = Vec::new();
            let families: [(Scheme, [usize; 3]); 3] = [
                (Scheme::Qam, [2, 4, 16]),
                (Scheme::Psk, [2, 4, 16]),
                (Scheme::Dpsk, [2, 4, 8]),
            ];
            for (scheme, orders) in families {
                for order in orders {
                    let mut cfg = link;
                    cfg.constellation = ConstellationSpec::new(scheme, order, BitMapping::Gray);
                    curves.push(curve(cfg));
                }
            }
            Scenario {
                name: name.to_string(),
                axis: Axis::Ebn0Db,
                grid: grid_range(0.0, 2.0, 12.0),
                rule: StoppingRule::default(),
                curves,
                scatter: None,
                bound,
            }
        }
        // Doppler-shift effect on D-2PSK over Rayleigh fading.
        "fig5" => {
            bind(&["modulation", "order", "channel", "fd", "ts"], &mut bound);
            let fds = match ov.fd {
                Some(fd) => vec![fd],
                None => vec![1.0, 3.0, 5.0],
            };
            let mut curves = Vec::new();
            for fd in fds {
                let mut cfg = link;
                cfg.constellation = ConstellationSpec::new(Scheme::Dpsk, 2, BitMapping::Gray);
                cfg.channel = ChannelSpec::rayleigh(fd, DEFAULT_TS);
                curves.push(curve(cfg));
            }
            Scenario {
                name: name.to_string(),
                axis: Axis::Ebn0Db,
                grid: grid_range(0.0, 3.0, 30.0),
                rule: StoppingRule::default(),
                curves,
                scatter: None,
                bound,
            }
        }
        // D-4PSK over Rayleigh vs Rician (K = 5), both at fd = 40 Hz.
        "fig6" => {
            bind(&["modulation", "order", "channel", "fd", "k"], &mut bound);
            let mut rayleigh = link;
            rayleigh.constellation = ConstellationSpec::new(Scheme::Dpsk, 4, BitMapping::Gray);
            rayleigh.channel = ChannelSpec::rayleigh(40.0, DEFAULT_TS);
            let mut rician = rayleigh;
            rician.channel = ChannelSpec::rician(40.0, 5.0, DEFAULT_TS);
            Scenario {
                name: name.to_string(),
                axis: Axis::Ebn0Db,
                grid: grid_range(0.0, 3.0, 30.0),
                rule: StoppingRule::default(),
                curves: vec![curve(rayleigh), curve(rician)],
                scatter: None,
                bound,
            }
        }
        // K-factor sweep: D-2PSK at fd = 40 Hz over Rayleigh, Rician
        // K in {1,2,5,10,30}, and AWGN as the two envelopes.
        "fig7" => {
            bind(&["modulation", "order", "channel", "fd", "k"], &mut bound);
            let mut curves = Vec::new();
            let dpsk2 = ConstellationSpec::new(Scheme::Dpsk, 2, BitMapping::Gray);
            let mut rayleigh = link;
            rayleigh.constellation = dpsk2;
            rayleigh.channel = ChannelSpec::rayleigh(40.0, DEFAULT_TS);
            curves.push(curve(rayleigh));
            for k in [1.0, 2.0, 5.0, 10.0, 30.0] {
                let mut cfg = link;
                cfg.constellation = dpsk2;
                cfg.channel = ChannelSpec::rician(40.0, k, DEFAULT_TS);
                curves.push(curve(cfg));
            }
            let mut awgn = link;
            awgn.constellation = dpsk2;
            curves.push(curve(awgn));
            Scenario {
                name: name.to_string(),
                axis: Axis::Ebn0Db,
                grid: grid_range(0.0, 3.0, 30.0),
                rule: StoppingRule::default(),
                curves,
                scatter: None,
                bound,
            }
        }
        // Gray vs natural labelling for D-4PSK on all three channels.
        "fig8" => {
            bind(
                &["modulation", "order", "mapping", "channel", "fd", "k"],
                &mut bound,
            );
            let mut curves = Vec::new();
            for mapping in [BitMapping::Gray, BitMapping::Natural] {
                for family in [
                    ChannelFamily::Awgn,
                    ChannelFamily::Rayleigh,
                    ChannelFamily::Rician,
                ] {
                    let mut cfg = link;
                    cfg.constellation = ConstellationSpec::new(Scheme::Dpsk, 4, mapping);
                    cfg.channel = match family {
                        ChannelFamily::Awgn => ChannelSpec::awgn(),
                        ChannelFamily::Rayleigh => ChannelSpec::rayleigh(40.0, DEFAULT_TS),
                        ChannelFamily::Rician => ChannelSpec::rician(40.0, 5.0, DEFAULT_TS),
                    };
                    curves.push(curve(cfg));
                }
            }
            Scenario {
                name: name.to_string(),
                axis: Axis::Ebn0Db,
                grid: grid_range(0.0, 3.0, 30.0),
                rule: StoppingRule::default(),
                curves,
                scatter: None,
                bound,
            }
        }
        // Free-form single curve, shaped by flags.
        "custom" => Scenario {
            name: name.to_string(),
            axis: Axis::Ebn0Db,
            grid: grid_range(0.0, 2.0, 14.0),
            rule: StoppingRule::default(),
            curves: vec![curve(link)],
            scatter: None,
            bound,
        },
        other => {
            return Err(CliError::Usage(format!(
                "unknown scenario '{other}' (expected one of {})",
                PRESET_NAMES.join(", ")
            )));
        }
    };

    apply_overrides(&mut scenario, ov)?;
    validate(&scenario)?;
    Ok(scenario)
}

fn apply_overrides(s: &mut Scenario, ov: &Overrides) -> Result<(), CliError> {
    let mut each_curve = |f: &dyn Fn(&mut LinkConfig)| {
        for c in &mut s.curves {
            f(&mut c.cfg);
        }
        if let Some(sc) = &mut s.scatter {
            f(&mut sc.cfg);
        }
    };

    if let Some(grid) = &ov.grid {
        s.grid = grid.clone();
        s.bound.insert("grid");
    }
    if let Some(scheme) = ov.modulation {
        each_curve(&|cfg| cfg.constellation.scheme = scheme);
        s.bound.insert("modulation");
    }
    if let Some(order) = ov.order {
        each_curve(&|cfg| cfg.constellation.order = order);
        s.bound.insert("order");
    }
    if let Some(mapping) = ov.mapping {
        each_curve(&|cfg| cfg.constellation.mapping = mapping);
        s.bound.insert("mapping");
    }
    if let Some(family) = ov.channel {
        each_curve(&|cfg| cfg.channel.family = family);
        s.bound.insert("channel");
    }
    if let Some(fd) = ov.fd {
        // fig5 consumes --fd itself (it selects the curve set there).
        if s.name != "fig5" {
            each_curve(&|cfg| cfg.channel.doppler_hz = fd);
        }
        s.bound.insert("fd");
    }
    if let Some(k) = ov.k {
        each_curve(&|cfg| cfg.channel.k_factor = k);
        s.bound.insert("k");
    }
    if let Some(ts) = ov.ts {
        each_curve(&|cfg| {
            cfg.ofdm.sample_period = ts;
            cfg.channel.sample_period = ts;
        });
        s.bound.insert("ts");
    }
    if let Some(n) = ov.subcarriers {
        each_curve(&|cfg| cfg.ofdm.n_subcarriers = n);
        s.bound.insert("subcarriers");
    }
    if let Some(cp) = ov.cp {
        each_curve(&|cfg| cfg.ofdm.cp_len = cp);
        s.bound.insert("cp");
    }
    if let Some(min_errors) = ov.min_errors {
        s.rule.min_errors = min_errors;
        s.bound.insert("min_errors");
    }
    if let Some(max_bits) = ov.max_bits {
        s.rule.max_bits = max_bits;
        s.bound.insert("max_bits");
    }
    Ok(())
}

fn validate(s: &Scenario) -> Result<(), CliError> {
    s.rule.validate().map_err(CliError::from)?;
    for c in &s.curves {
        c.cfg.validate().map_err(CliError::from)?;
    }
    if let Some(sc) = &s.scatter {
        sc.cfg.validate().map_err(CliError::from)?;
        if sc.snrs_db.is_empty() {
            return Err(CliError::Usage("scatter SNR list is empty".to_string()));
        }
    }
    if s.curves.is_empty() && s.scatter.is_none() {
        return Err(CliError::Usage("scenario produces no output".to_string()));
    }
    if !s.curves.is_empty() {
        if s.grid.is_empty() {
            return Err(CliError::Usage("sweep grid is empty".to_string()));
        }
        // `partial_cmp` so a NaN grid entry is rejected, not accepted.
        if s.grid
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            return Err(CliError::Usage(
                "sweep grid must be strictly increasing".to_string(),
            ));
        }
    }
    Ok(())
}

/// Translate a per-sample SNR in dB to the Eb/N0 that yields it under this
/// link's symbol loading and prefix accounting.
fn snr_to_ebn0_db(snr_db: f64, cfg: &LinkConfig) -> f64 {
    let bits = cfg.bits_per_symbol() as f64;
    let cp_factor = if cfg.count_cp_energy {
        cfg.ofdm.cp_overhead()
    } else {
        1.0
    };
    snr_db - linear_to_db(bits / cp_factor)
}

/// Everything a run produced, for reporting and testing.
#[derive(Debug)]
pub struct RunArtifacts {
    pub files: Vec<PathBuf>,
}

/// Execute a scenario: sweep every curve, capture any scatter data, and
/// write CSVs plus a manifest under `out_dir`.
pub fn run_scenario(
    s: &Scenario,
    master_seed: u64,
    out_dir: &Path,
) -> Result<RunArtifacts, CliError> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let mut files = Vec::new();
    let mut manifest = manifest_header(s, master_seed);
    let mut used_names: BTreeSet<String> = BTreeSet::new();

    for (i, c) in s.curves.iter().enumerate() {
        // Convert the grid to Eb/N0 if this scenario sweeps SNR.
        let grid_ebn0: Vec<f64> = match s.axis {
            Axis::Ebn0Db => s.grid.clone(),
            Axis::SnrDb => s.grid.iter().map(|&g| snr_to_ebn0_db(g, &c.cfg)).collect(),
        };
        let curve = run_sweep(
            &c.cfg,
            &grid_ebn0,
            &s.rule,
            seed::derive(master_seed, &[seed::TAG_CURVE, i as u64]),
        )
        .map_err(CliError::from)?;

        let mut stem = format!("{}_{}", s.name, curve.label);
        let mut suffix = 1;
        while !used_names.insert(stem.clone()) {
            suffix += 1;
            stem = format!("{}_{}_{}", s.name, curve.label, suffix);
        }
        let path = out_dir.join(format!("{stem}.csv"));
        output::emit_csv(&curve, &path)?;
        manifest.extend(curve_manifest(s, i, c, &curve.label, &path));
        files.push(path);
    }

    if let Some(sc) = &s.scatter {
        for (i, &snr_db) in sc.snrs_db.iter().enumerate() {
            let mut cfg = sc.cfg;
            cfg.ebn0_db = snr_to_ebn0_db(snr_db, &cfg);
            let points = constellation_capture(
                &cfg,
                sc.symbols,
                seed::derive(master_seed, &[seed::TAG_SCATTER, i as u64]),
            )
            .map_err(CliError::from)?;
            let path = out_dir.join(format!("{}_snr{}_scatter.csv", s.name, snr_db));
            output::emit_scatter(&points, &path)?;
            manifest.push(format!("scatter.{i}.snr_db={snr_db}"));
            manifest.push(format!(
                "scatter.{i}.ebn0_db={}",
                output::fmt_sig(cfg.ebn0_db)
            ));
            manifest.push(format!("scatter.{i}.symbols={}", sc.symbols));
            manifest.push(format!("scatter.{i}.file={}", file_name(&path)));
            files.push(path);
        }
    }

    for (i, f) in files.iter().enumerate() {
        manifest.push(format!("file.{i}={}", file_name(f)));
    }
    let manifest_path = out_dir.join(format!("{}_manifest.txt", s.name));
    output::emit_manifest(&manifest, &manifest_path)?;
    files.push(manifest_path);
    Ok(RunArtifacts { files })
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .unwrap_or_default()
        .to_string_lossy()
        .into_owned()
}

fn mark(s: &Scenario, field: &'static str) -> &'static str {
    if s.bound.contains(field) {
        ""
    } else {
        " [default]"
    }
}

fn manifest_header(s: &Scenario, master_seed: u64) -> Vec<String> {
    let mut lines = vec![
        format!("scenario={}", s.name),
        format!("seed={master_seed}"),
        format!("axis={}", s.axis.name()),
    ];
    if !s.grid.is_empty() {
        let grid: Vec<String> = s.grid.iter().map(f64::to_string).collect();
        lines.push(format!("grid_db={}{}", grid.join(","), mark(s, "grid")));
    }
    lines.push(format!(
        "min_errors={}{}",
        s.rule.min_errors,
        mark(s, "min_errors")
    ));
    lines.push(format!(
        "max_bits={}{}",
        s.rule.max_bits,
        mark(s, "max_bits")
    ));
    lines
}

fn curve_manifest(s: &Scenario, i: usize, c: &CurveDef, label: &str, path: &Path) -> Vec<String> {
    let cfg = &c.cfg;
    let mut lines = vec![
        format!("curve.{i}.label={label}"),
        format!("curve.{i}.file={}", file_name(path)),
        format!(
            "curve.{i}.modulation={}{}",
            cfg.constellation.scheme.name(),
            mark(s, "modulation")
        ),
        format!(
            "curve.{i}.order={}{}",
            cfg.constellation.order,
            mark(s, "order")
        ),
        format!(
            "curve.{i}.mapping={}{}",
            cfg.constellation.mapping.name(),
            mark(s, "mapping")
        ),
        format!(
            "curve.{i}.channel={}{}",
            cfg.channel.family.name(),
            mark(s, "channel")
        ),
    ];
    if cfg.channel.family != ChannelFamily::Awgn {
        lines.push(format!(
            "curve.{i}.fd_hz={}{}",
            cfg.channel.doppler_hz,
            mark(s, "fd")
        ));
    }
    if cfg.channel.family == ChannelFamily::Rician {
        lines.push(format!(
            "curve.{i}.k_factor={}{}",
            cfg.channel.k_factor,
            mark(s, "k")
        ));
    }
    lines.push(format!(
        "curve.{i}.subcarriers={}{}",
        cfg.ofdm.n_subcarriers,
        mark(s, "subcarriers")
    ));
    lines.push(format!(
        "curve.{i}.cp_len={}{}",
        cfg.ofdm.cp_len,
        mark(s, "cp")
    ));
    lines.push(format!(
        "curve.{i}.ts_s={}{}",
        cfg.ofdm.sample_period,
        mark(s, "ts")
    ));
    if cfg.constellation.scheme.is_differential() {
        lines.push(format!(
            "curve.{i}.diff_axis={} [default]",
            cfg.diff_axis.name()
        ));
    }
    lines.push(format!(
        "curve.{i}.count_cp_energy={} [default]",
        cfg.count_cp_energy
    ));
    lines
}
