//! End-to-end link pipeline: random bits -> constellation mapping ->
//! (optional differential encoding) -> OFDM modulation -> channel ->
//! OFDM demodulation -> (optional differential detection) -> hard decisions
//! -> bit-error count.
//!
//! The receiver is deliberately bare: no pilots, no channel estimation, no
//! equalization.  Coherent schemes therefore collapse over fading channels,
//! while differential schemes survive because the phase reference rides
//! along with the data.

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{self, ChannelFamily, ChannelSpec, FadingState, NoiseCalibration};
use crate::error::{Error, Result};
use crate::mapping::{diff_decode, diff_encode, BitMapping, Constellation, Scheme};
use crate::ofdm::{self, OfdmConfig};
use crate::seed;

/// Constellation choice for a link: scheme, order, and bit labelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstellationSpec {
    pub scheme: Scheme,
    pub order: usize,
    pub mapping: BitMapping,
}

impl ConstellationSpec {
    pub fn new(scheme: Scheme, order: usize, mapping: BitMapping) -> Self {
        Self {
            scheme,
            order,
            mapping,
        }
    }

    pub fn build(&self) -> Result<Constellation> {
        Constellation::new(self.scheme, self.order, self.mapping)
    }
}

/// Axis along which differential encoding chains symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffAxis {
    /// Chain each subcarrier across consecutive OFDM symbols; the first OFDM
    /// symbol of a block is an all-reference symbol.
    Time,
    /// Chain across subcarriers within each OFDM symbol; subcarrier 0 is the
    /// per-symbol reference, leaving N-1 information symbols per OFDM symbol.
    Frequency,
}

impl DiffAxis {
    pub fn name(self) -> &'static str {
        match self {
            DiffAxis::Time => "time",
            DiffAxis::Frequency => "frequency",
        }
    }
}

/// Complete configuration of one simulated link.
#[derive(Debug, Clone, Copy)]
pub struct LinkConfig {
    pub constellation: ConstellationSpec,
    pub ofdm: OfdmConfig,
    pub channel: ChannelSpec,
    pub ebn0_db: f64,
    /// Charge cyclic-prefix energy to the information bits when converting
    /// Eb/N0 into noise variance (the physically honest accounting).
    pub count_cp_energy: bool,
    /// Differential chaining axis; ignored for coherent schemes.
    pub diff_axis: DiffAxis,
}

impl LinkConfig {
    pub fn validate(&self) -> Result<()> {
        self.constellation.build()?;
        self.ofdm.validate()?;
        self.channel.validate()?;
        if self.ebn0_db.is_nan() {
            return Err(Error::Config("Eb/N0 must not be NaN".to_string()));
        }
        Ok(())
    }

    /// Log a warning for configurations that are valid but usually
    /// unintended. Called once per sweep rather than from `validate` so a
    /// long Monte Carlo run does not repeat it for every block.
    pub fn warn_if_unusual(&self) {
        if !self.constellation.scheme.is_differential()
            && self.channel.family != ChannelFamily::Awgn
        {
            log::warn!(
                "coherent {}-{} over a {} channel runs without equalization; \
                 expect an error floor near 50%",
                self.constellation.scheme.name(),
                self.constellation.order,
                self.channel.family.name()
            );
        }
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.order_bits()
    }

    fn order_bits(&self) -> usize {
        self.constellation.order.trailing_zeros() as usize
    }

    /// Information symbols carried per OFDM symbol (N, or N-1 when a
    /// frequency-axis differential reference occupies subcarrier 0).
    pub fn info_symbols_per_ofdm_symbol(&self) -> usize {
        if self.constellation.scheme.is_differential() && self.diff_axis == DiffAxis::Frequency {
            self.ofdm.n_subcarriers - 1
        } else {
            self.ofdm.n_subcarriers
        }
    }

    /// Smallest admissible bit count per block; block sizes must be a
    /// positive multiple of this.
    pub fn block_bits_unit(&self) -> usize {
        self.order_bits() * self.info_symbols_per_ofdm_symbol()
    }
}

/// Outcome of one transmission block.
#[derive(Debug, Clone)]
pub struct TransmissionResult {
    pub bits_sent: u64,
    pub bit_errors: u64,
    /// Transmitted information symbols (before differential encoding),
    /// captured on request.
    pub tx_symbols: Option<Vec<Complex64>>,
    /// Receiver decision variables (after FFT and, for DPSK, after the
    /// conjugate product), captured on request.
    pub rx_symbols: Option<Vec<Complex64>>,
}

/// Run one block of `n_bits` information bits through the link.
///
/// `n_bits` must be a positive multiple of [`LinkConfig::block_bits_unit`].
/// Data, noise and fading draw from independent streams derived from `seed`,
/// so blocks with distinct seeds are statistically independent and a block
/// is reproducible bit for bit from its seed alone.
pub fn run_block(cfg: &LinkConfig, n_bits: usize, seed: u64) -> Result<TransmissionResult> {
    run_block_impl(cfg, n_bits, seed, false)
}

/// Capture receiver decision variables for a scatter plot: runs enough OFDM
/// symbols to produce at least `n_symbols` decisions and returns the first
/// `n_symbols` of them.
pub fn constellation_capture(
    cfg: &LinkConfig,
    n_symbols: usize,
    seed: u64,
) -> Result<Vec<Complex64>> {
    if n_symbols == 0 {
        return Err(Error::Domain(
            "scatter capture needs at least one symbol".to_string(),
        ));
    }
    let per_row = cfg.info_symbols_per_ofdm_symbol();
    let rows = n_symbols.div_ceil(per_row);
    let n_bits = rows * cfg.block_bits_unit();
    let result = run_block_impl(cfg, n_bits, seed, true)?;
    let mut symbols = result
        .rx_symbols
        .expect("capture run always fills rx_symbols");
    symbols.truncate(n_symbols);
    Ok(symbols)
}

fn run_block_impl(
    cfg: &LinkConfig,
    n_bits: usize,
    seed: u64,
    capture: bool,
) -> Result<TransmissionResult> {
    cfg.validate()?;
    let constellation = cfg.constellation.build()?;
    let b = constellation.bits_per_symbol();
    let n = cfg.ofdm.n_subcarriers;
    let unit = cfg.block_bits_unit();
    if n_bits == 0 || !n_bits.is_multiple_of(unit) {
        return Err(Error::Domain(format!(
            "block size {n_bits} must be a positive multiple of {unit} bits"
        )));
    }

    let mut data_rng = seed::stream_rng(seed, seed::STREAM_DATA);
    let mut noise_rng = seed::stream_rng(seed, seed::STREAM_NOISE);
    let mut fading_rng = seed::stream_rng(seed, seed::STREAM_FADING);

    let tx_bits: Vec<u8> = (0..n_bits)
        .map(|_| data_rng.random::<bool>() as u8)
        .collect();
    let info_symbols = constellation.map_bits(&tx_bits)?;

    let differential = constellation.scheme().is_differential();
    let reference = Complex64::new(1.0, 0.0);

    // Arrange information symbols on the subcarrier grid, inserting
    // differential references where the axis requires them.
    let tx_grid: Vec<Complex64> = if differential {
        match cfg.diff_axis {
            DiffAxis::Time => {
                let rows = info_symbols.len() / n;
                let mut grid = vec![reference; (rows + 1) * n];
                for k in 0..n {
                    let increments: Vec<Complex64> =
                        (0..rows).map(|t| info_symbols[t * n + k]).collect();
                    let chain = diff_encode(&increments, reference)?;
                    for (t, v) in chain.into_iter().enumerate() {
                        grid[(t + 1) * n + k] = v;
                    }
                }
                grid
            }
            DiffAxis::Frequency => {
                let per_row = n - 1;
                let rows = info_symbols.len() / per_row;
                let mut grid = Vec::with_capacity(rows * n);
                for t in 0..rows {
                    let row = &info_symbols[t * per_row..(t + 1) * per_row];
                    grid.push(reference);
                    grid.extend(diff_encode(row, reference)?);
                }
                grid
            }
        }
    } else {
        info_symbols.clone()
    };

    let frames = ofdm::ofdm_modulate(&tx_grid, &cfg.ofdm)?;
    let mut samples = ofdm::flatten_frames(&frames);

    // Channel: flat fading (if any), then additive noise.
    match cfg.channel.family {
        ChannelFamily::Awgn => {}
        ChannelFamily::Rayleigh => {
            let mut fading = FadingState::new(
                cfg.channel.doppler_hz,
                cfg.channel.sample_period,
                &mut fading_rng,
            )?;
            let gains = fading.gains(samples.len());
            samples = channel::apply_flat_fading(&samples, &gains)?;
        }
        ChannelFamily::Rician => {
            let mut fading = FadingState::new(
                cfg.channel.doppler_hz,
                cfg.channel.sample_period,
                &mut fading_rng,
            )?;
            let gains = fading.rician_gains(cfg.channel.k_factor, samples.len())?;
            samples = channel::apply_flat_fading(&samples, &gains)?;
        }
    }
    let calibration = NoiseCalibration::new(cfg.ebn0_db, b, &cfg.ofdm, cfg.count_cp_energy)?;
    channel::awgn_in_place(&mut samples, calibration.noise_variance, &mut noise_rng)?;

    let rx_frames = ofdm::frames_from_samples(samples, &cfg.ofdm)?;
    let rx_grid = ofdm::ofdm_demodulate(&rx_frames, &cfg.ofdm)?;

    // Decision variables: the grid itself for coherent schemes, conjugate
    // products along the chaining axis for differential ones.
    let decisions: Vec<Complex64> = if differential {
        match cfg.diff_axis {
            DiffAxis::Time => {
                let rows = rx_grid.len() / n - 1;
                let mut out = vec![Complex64::new(0.0, 0.0); rows * n];
                let mut column = Vec::with_capacity(rows + 1);
                for k in 0..n {
                    column.clear();
                    column.extend((0..=rows).map(|t| rx_grid[t * n + k]));
                    let decoded = diff_decode(&column[1..], column[0]);
                    for (t, v) in decoded.into_iter().enumerate() {
                        out[t * n + k] = v;
                    }
                }
                out
            }
            DiffAxis::Frequency => {
                let rows = rx_grid.len() / n;
                let mut out = Vec::with_capacity(rows * (n - 1));
                for t in 0..rows {
                    let row = &rx_grid[t * n..(t + 1) * n];
                    out.extend(diff_decode(&row[1..], row[0]));
                }
                out
            }
        }
    } else {
        rx_grid
    };

    let rx_bits = constellation.demap_hard(&decisions);
    debug_assert_eq!(rx_bits.len(), tx_bits.len());
    let bit_errors = tx_bits.iter().zip(&rx_bits).filter(|(a, b)| a != b).count() as u64;

    Ok(TransmissionResult {
        bits_sent: n_bits as u64,
        bit_errors,
        tx_symbols: capture.then_some(info_symbols),
        rx_symbols: capture.then_some(decisions),
    })
}
