//! Monte Carlo BER measurement: stopping rules, Eb/N0 sweeps, closed-form
//! reference curves and curve-to-curve comparison.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::channel::ChannelFamily;
use crate::error::{Error, Result};
use crate::link::{self, LinkConfig};
use crate::mapping::Scheme;
use crate::math::{db_to_linear, q_function};
use crate::seed;

/// One measured BER point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerRecord {
    pub ebn0_db: f64,
    pub bits_sent: u64,
    pub bit_errors: u64,
    pub ber: f64,
    /// Binomial standard error sqrt(ber * (1 - ber) / bits_sent).
    pub std_error: f64,
    /// True when the measurement stopped at the bit budget with zero errors;
    /// the recorded BER of 0 is then only an upper-bound witness.
    pub upper_bound: bool,
}

impl BerRecord {
    fn from_counts(ebn0_db: f64, bits_sent: u64, bit_errors: u64, upper_bound: bool) -> Self {
        debug_assert!(bit_errors <= bits_sent);
        let ber = bit_errors as f64 / bits_sent as f64;
        let std_error = (ber * (1.0 - ber) / bits_sent as f64).sqrt();
        Self {
            ebn0_db,
            bits_sent,
            bit_errors,
            ber,
            std_error,
            upper_bound,
        }
    }
}

/// A labelled BER-vs-Eb/N0 curve with strictly increasing abscissae.
#[derive(Debug, Clone)]
pub struct BerCurve {
    pub label: String,
    pub records: Vec<BerRecord>,
}

/// Termination criteria for one BER point: stop as soon as `min_errors`
/// errors have accumulated, or hard-stop at `max_bits` bits.
#[derive(Debug, Clone, Copy)]
pub struct StoppingRule {
    pub min_errors: u64,
    pub max_bits: u64,
}

impl Default for StoppingRule {
    fn default() -> Self {
        Self {
            min_errors: 100,
            max_bits: 10_000_000,
        }
    }
}

impl StoppingRule {
    pub fn validate(&self) -> Result<()> {
        if self.min_errors == 0 {
            return Err(Error::Config("min_errors must be at least 1".to_string()));
        }
        if self.max_bits == 0 {
            return Err(Error::Config("max_bits must be at least 1".to_string()));
        }
        Ok(())
    }
}

/// Default block size for [`run_ber_point`]: roughly this many information
/// bits per block, rounded to the link's framing unit.
const TARGET_BLOCK_BITS: usize = 4096;

/// Error-count stopping assumes independent errors, but over a fading
/// channel every block is a single path realization and its errors arrive
/// in bursts.  Fading measurements therefore accumulate at least this many
/// independent realizations (bit budget permitting) before the error target
/// may stop them, so one deep fade cannot masquerade as the ensemble BER.
const MIN_FADING_BLOCKS: u64 = 100;

/// Block size (in bits) used by [`run_ber_point`]: a multiple of the framing
/// unit near [`TARGET_BLOCK_BITS`].
pub fn default_block_bits(cfg: &LinkConfig) -> usize {
    let unit = cfg.block_bits_unit();
    unit * (TARGET_BLOCK_BITS / unit).max(1)
}

/// Measure one BER point, accumulating independent blocks until the
/// stopping rule fires.  Fading channels draw a fresh path realization per
/// block, so block size also sets the channel-averaging granularity; they
/// additionally run at least [`MIN_FADING_BLOCKS`] blocks (within the bit
/// budget) so the estimate averages over many realizations.
pub fn run_ber_point(cfg: &LinkConfig, rule: &StoppingRule, seed: u64) -> Result<BerRecord> {
    run_ber_point_with_block(cfg, rule, default_block_bits(cfg), seed)
}

/// [`run_ber_point`] with an explicit block size (a positive multiple of the
/// link's framing unit).
pub fn run_ber_point_with_block(
    cfg: &LinkConfig,
    rule: &StoppingRule,
    block_bits: usize,
    seed: u64,
) -> Result<BerRecord> {
    rule.validate()?;
    let min_blocks = match cfg.channel.family {
        ChannelFamily::Awgn => 1,
        ChannelFamily::Rayleigh | ChannelFamily::Rician => MIN_FADING_BLOCKS,
    };
    let mut bits = 0u64;
    let mut errors = 0u64;
    let mut block = 0u64;
    while (errors < rule.min_errors || block < min_blocks) && bits < rule.max_bits {
        let r = link::run_block(
            cfg,
            block_bits,
            seed::derive(seed, &[seed::TAG_BLOCK, block]),
        )?;
        bits += r.bits_sent;
        errors += r.bit_errors;
        block += 1;
    }
    Ok(BerRecord::from_counts(
        cfg.ebn0_db,
        bits,
        errors,
        errors == 0,
    ))
}

/// Sweep a link over an Eb/N0 grid (strictly increasing, non-empty).
///
/// Points are measured in parallel; each point's seed is derived from
/// `master_seed` and the point index, so results are independent of worker
/// count and identical to running the points one by one.
pub fn run_sweep(
    template: &LinkConfig,
    ebn0_grid_db: &[f64],
    rule: &StoppingRule,
    master_seed: u64,
) -> Result<BerCurve> {
    if ebn0_grid_db.is_empty() {
        return Err(Error::Domain("Eb/N0 grid must be non-empty".to_string()));
    }
    // `partial_cmp` so a NaN grid entry is rejected, not silently accepted.
    if ebn0_grid_db
        .windows(2)
        .any(|w| w[0].partial_cmp(&w[1]) != Some(Ordering::Less))
    {
        return Err(Error::Domain(
            "Eb/N0 grid must be strictly increasing".to_string(),
        ));
    }
    template.validate()?;
    template.warn_if_unusual();
    rule.validate()?;
    let records: Result<Vec<BerRecord>> = ebn0_grid_db
        .par_iter()
        .enumerate()
        .map(|(i, &ebn0_db)| {
            let mut cfg = *template;
            cfg.ebn0_db = ebn0_db;
            run_ber_point(
                &cfg,
                rule,
                seed::derive(master_seed, &[seed::TAG_SWEEP_POINT, i as u64]),
            )
        })
        .collect();
    Ok(BerCurve {
        label: curve_label(template),
        records: records?,
    })
}

/// Human-readable configuration label, e.g. `dpsk4_gray_rayleigh_fd40` or
/// `qam16_natural_awgn`.
pub fn curve_label(cfg: &LinkConfig) -> String {
    let c = &cfg.constellation;
    let mut label = format!(
        "{}{}_{}_{}",
        c.scheme.name(),
        c.order,
        c.mapping.name(),
        cfg.channel.family.name()
    );
    match cfg.channel.family {
        ChannelFamily::Awgn => {}
        ChannelFamily::Rayleigh => {
            label.push_str(&format!("_fd{}", cfg.channel.doppler_hz));
        }
        ChannelFamily::Rician => {
            label.push_str(&format!(
                "_k{}_fd{}",
                cfg.channel.k_factor, cfg.channel.doppler_hz
            ));
        }
    }
    label
}

/// A closed-form reference BER value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedFormBer {
    /// Exact analytical result.
    Exact(f64),
    /// Standard nearest-neighbour approximation (tight above a few dB).
    Approximate(f64),
}

impl ClosedFormBer {
    pub fn value(self) -> f64 {
        match self {
            ClosedFormBer::Exact(v) | ClosedFormBer::Approximate(v) => v,
        }
    }
}

/// Closed-form BER references, where they exist:
///
/// * BPSK/QPSK over AWGN (Gray): exact `Q(sqrt(2 Eb/N0))`.
/// * Square M-QAM over AWGN (Gray): nearest-neighbour approximation
///   `(4/log2 M)(1 - 1/sqrt(M)) Q(sqrt(3 log2(M) (Eb/N0) / (M-1)))`.
/// * Binary DPSK over AWGN: exact `exp(-Eb/N0) / 2`.
/// * Binary DPSK over quasi-static Rayleigh fading: exact
///   `1 / (2 (1 + Eb/N0))`.
///
/// Everything else returns `None`.
pub fn theoretical_ber(
    scheme: Scheme,
    order: usize,
    family: ChannelFamily,
    ebn0_db: f64,
) -> Option<ClosedFormBer> {
    let gb = db_to_linear(ebn0_db);
    match (scheme, order, family) {
        (Scheme::Psk | Scheme::Qam, 2, ChannelFamily::Awgn)
        | (Scheme::Psk | Scheme::Qam, 4, ChannelFamily::Awgn) => {
            Some(ClosedFormBer::Exact(q_function((2.0 * gb).sqrt())))
        }
        (Scheme::Qam, m @ (16 | 64 | 256), ChannelFamily::Awgn) => {
            let k = (m as f64).log2();
            let arg = (3.0 * k * gb / (m as f64 - 1.0)).sqrt();
            let ber = 4.0 / k * (1.0 - 1.0 / (m as f64).sqrt()) * q_function(arg);
            Some(ClosedFormBer::Approximate(ber))
        }
        (Scheme::Dpsk, 2, ChannelFamily::Awgn) => Some(ClosedFormBer::Exact(0.5 * (-gb).exp())),
        (Scheme::Dpsk, 2, ChannelFamily::Rayleigh) => Some(ClosedFormBer::Exact(0.5 / (1.0 + gb))),
        _ => None,
    }
}

/// Pointwise comparison of two curves measured on identical Eb/N0 grids.
#[derive(Debug, Clone)]
pub struct CurveComparison {
    pub ebn0_db: Vec<f64>,
    /// Relative BER reduction of `a` with respect to `b`, `1 - a/b`, per
    /// point; `None` where `b` has no errors to compare against.
    pub reduction: Vec<Option<f64>>,
    /// Mean of the defined per-point reductions, if any.
    pub mean_reduction: Option<f64>,
}

/// Compare curve `a` against baseline `b` (same grid required).  Positive
/// reductions mean `a` performs better (lower BER) than `b`.
pub fn compare_curves(a: &BerCurve, b: &BerCurve) -> Result<CurveComparison> {
    if a.records.len() != b.records.len()
        || a.records
            .iter()
            .zip(&b.records)
            .any(|(x, y)| x.ebn0_db != y.ebn0_db)
    {
        return Err(Error::Domain(
            "curves must share an identical Eb/N0 grid".to_string(),
        ));
    }
    let ebn0_db: Vec<f64> = a.records.iter().map(|r| r.ebn0_db).collect();
    let reduction: Vec<Option<f64>> = a
        .records
        .iter()
        .zip(&b.records)
        .map(|(x, y)| {
            if y.bit_errors == 0 {
                None
            } else {
                Some(1.0 - x.ber / y.ber)
            }
        })
        .collect();
    let defined: Vec<f64> = reduction.iter().flatten().copied().collect();
    let mean_reduction = if defined.is_empty() {
        None
    } else {
        Some(defined.iter().sum::<f64>() / defined.len() as f64)
    };
    Ok(CurveComparison {
        ebn0_db,
        reduction,
        mean_reduction,
    })
}
