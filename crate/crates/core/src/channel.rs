//! Channel impairments: noise calibration, AWGN, and flat Rayleigh/Rician
//! fading with a Clarke-spectrum Doppler process.
//!
//! Fading is generated by a complex sum-of-sinusoids model: L equal-power
//! rays at stratified arrival angles, each contributing a complex exponential
//! at Doppler frequency fd*cos(angle) with an independent uniform phase.
//! Averaged over realizations the process has unit power and autocorrelation
//! J0(2 pi fd tau), the classical Clarke/Jakes spectrum.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::math::db_to_linear;
use crate::ofdm::OfdmConfig;

/// Channel model family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelFamily {
    /// Additive white Gaussian noise only.
    Awgn,
    /// Flat Rayleigh fading (no line of sight) plus AWGN.
    Rayleigh,
    /// Flat Rician fading (line of sight with K-factor) plus AWGN.
    Rician,
}

impl ChannelFamily {
    pub fn name(self) -> &'static str {
        match self {
            ChannelFamily::Awgn => "awgn",
            ChannelFamily::Rayleigh => "rayleigh",
            ChannelFamily::Rician => "rician",
        }
    }
}

/// Full channel description for a link run.
///
/// `doppler_hz` and `sample_period` shape the fading process and are ignored
/// for AWGN; `k_factor` is the Rician LOS-to-scatter power ratio and is only
/// meaningful for the Rician family.
#[derive(Debug, Clone, Copy)]
pub struct ChannelSpec {
    pub family: ChannelFamily,
    pub doppler_hz: f64,
    pub k_factor: f64,
    pub sample_period: f64,
}

impl ChannelSpec {
    pub fn awgn() -> Self {
        Self {
            family: ChannelFamily::Awgn,
            doppler_hz: 0.0,
            k_factor: 0.0,
            sample_period: 1.0,
        }
    }

    pub fn rayleigh(doppler_hz: f64, sample_period: f64) -> Self {
        Self {
            family: ChannelFamily::Rayleigh,
            doppler_hz,
            k_factor: 0.0,
            sample_period,
        }
    }

    pub fn rician(doppler_hz: f64, k_factor: f64, sample_period: f64) -> Self {
        Self {
            family: ChannelFamily::Rician,
            doppler_hz,
            k_factor,
            sample_period,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.doppler_hz >= 0.0 && self.doppler_hz.is_finite()) {
            return Err(Error::Config(format!(
                "Doppler frequency must be non-negative and finite, got {}",
                self.doppler_hz
            )));
        }
        if !(self.sample_period > 0.0 && self.sample_period.is_finite()) {
            return Err(Error::Config(format!(
                "sample period must be positive and finite, got {}",
                self.sample_period
            )));
        }
        if self.doppler_hz * self.sample_period >= 0.5 {
            return Err(Error::Config(format!(
                "normalized Doppler fd*Ts = {} is not below the Nyquist limit 0.5",
                self.doppler_hz * self.sample_period
            )));
        }
        if !(self.k_factor >= 0.0 && self.k_factor.is_finite()) {
            return Err(Error::Config(format!(
                "Rician K-factor must be non-negative and finite, got {}",
                self.k_factor
            )));
        }
        Ok(())
    }
}

/// Noise variance implied by a target Eb/N0 for a given frame geometry.
///
/// With unit-energy constellation symbols and sqrt(N)-scaled OFDM, transmit
/// samples have unit average power, so the per-sample complex noise variance
/// is 1 / (Es/N0 per sample).  When `count_cp_energy` is true (the default
/// link behaviour) the energy spent on the cyclic prefix is charged to the
/// information bits: Es/N0 = (Eb/N0) * bits_per_symbol * N / (N + cp).
#[derive(Debug, Clone, Copy)]
pub struct NoiseCalibration {
    pub ebn0_db: f64,
    pub bits_per_symbol: usize,
    pub cp_overhead: f64,
    pub noise_variance: f64,
}

impl NoiseCalibration {
    pub fn new(
        ebn0_db: f64,
        bits_per_symbol: usize,
        cfg: &OfdmConfig,
        count_cp_energy: bool,
    ) -> Result<Self> {
        cfg.validate()?;
        if bits_per_symbol == 0 {
            return Err(Error::Config(
                "bits per symbol must be at least 1".to_string(),
            ));
        }
        if ebn0_db.is_nan() {
            return Err(Error::Config("Eb/N0 must not be NaN".to_string()));
        }
        let cp_overhead = if count_cp_energy {
            cfg.cp_overhead()
        } else {
            1.0
        };
        // Eb/N0 = +inf caps cleanly at zero noise.
        let es_n0 = db_to_linear(ebn0_db) * bits_per_symbol as f64 / cp_overhead;
        Ok(Self {
            ebn0_db,
            bits_per_symbol,
            cp_overhead,
            noise_variance: 1.0 / es_n0,
        })
    }
}

/// Convenience wrapper around [`NoiseCalibration`] returning just the
/// per-sample complex noise variance.
pub fn ebn0_to_noise_variance(
    ebn0_db: f64,
    bits_per_symbol: usize,
    cfg: &OfdmConfig,
    count_cp_energy: bool,
) -> Result<f64> {
    NoiseCalibration::new(ebn0_db, bits_per_symbol, cfg, count_cp_energy).map(|c| c.noise_variance)
}

/// Add circular complex Gaussian noise of total variance `variance`
/// (`variance / 2` per real component) to `x`.
pub fn awgn_in_place<R: Rng + ?Sized>(
    x: &mut [Complex64],
    variance: f64,
    rng: &mut R,
) -> Result<()> {
    if variance.is_nan() || variance < 0.0 {
        return Err(Error::Domain(format!(
            "noise variance must be non-negative, got {variance}"
        )));
    }
    if variance == 0.0 {
        return Ok(());
    }
    let sigma = (variance / 2.0).sqrt();
    for v in x.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *v += Complex64::new(sigma * re, sigma * im);
    }
    Ok(())
}

/// Allocating variant of [`awgn_in_place`].
pub fn awgn<R: Rng + ?Sized>(
    x: &[Complex64],
    variance: f64,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    let mut out = x.to_vec();
    awgn_in_place(&mut out, variance, rng)?;
    Ok(out)
}

/// Multiply samples by their per-sample fading gains.  `gains` must be at
/// least as long as `x`.
pub fn apply_flat_fading(x: &[Complex64], gains: &[Complex64]) -> Result<Vec<Complex64>> {
    if gains.len() < x.len() {
        return Err(Error::Domain(format!(
            "{} fading gains cannot cover {} samples",
            gains.len(),
            x.len()
        )));
    }
    Ok(x.iter().zip(gains).map(|(s, h)| s * h).collect())
}

/// Default number of sum-of-sinusoids rays.
pub const DEFAULT_OSCILLATORS: usize = 64;

/// Oscillator phases are recomputed from closed form at this absolute-sample
/// cadence so the cheap per-sample phasor rotation cannot drift over long
/// runs, and resynchronization points do not depend on how the gain stream
/// is chunked.
const RESYNC_INTERVAL: u64 = 1 << 16;

/// Streaming Clarke-spectrum fading generator.
///
/// The state is deterministic in the generator used to draw the ray
/// geometry, and the gain stream is a pure function of absolute sample
/// index: splitting one request into many yields bit-identical samples.
#[derive(Debug, Clone)]
pub struct FadingState {
    doppler_hz: f64,
    sample_period: f64,
    /// Per-ray Doppler frequency fd*cos(angle), in [-fd, fd].
    freqs_hz: Vec<f64>,
    /// Per-ray initial phase at sample 0.
    init_phases: Vec<f64>,
    /// Current per-ray phasor e^{i(2 pi f t + phase)} at `sample_index`.
    phasors: Vec<Complex64>,
    /// Per-sample rotation e^{i 2 pi f Ts} of each phasor.
    steps: Vec<Complex64>,
    sample_index: u64,
    /// 1/sqrt(L), normalizing the ray sum to unit average power.
    amplitude: f64,
}

impl FadingState {
    /// New fading process with the default ray count.  Draws the ray angles
    /// (one common rotation, stratified offsets) and phases from `rng`.
    pub fn new<R: Rng + ?Sized>(doppler_hz: f64, sample_period: f64, rng: &mut R) -> Result<Self> {
        Self::with_oscillators(doppler_hz, sample_period, DEFAULT_OSCILLATORS, rng)
    }

    pub fn with_oscillators<R: Rng + ?Sized>(
        doppler_hz: f64,
        sample_period: f64,
        oscillators: usize,
        rng: &mut R,
    ) -> Result<Self> {
        ChannelSpec::rayleigh(doppler_hz, sample_period).validate()?;
        if oscillators == 0 {
            return Err(Error::Config("ray count must be at least 1".to_string()));
        }
        let l = oscillators as f64;
        let rotation = rng.random::<f64>() * TAU;
        let mut freqs_hz = Vec::with_capacity(oscillators);
        let mut init_phases = Vec::with_capacity(oscillators);
        let mut phasors = Vec::with_capacity(oscillators);
        let mut steps = Vec::with_capacity(oscillators);
        for i in 0..oscillators {
            // Stratified arrival angles cover the circle evenly; the common
            // random rotation de-biases the stratification across seeds.
            let angle = TAU * (i as f64 + 0.5) / l + rotation;
            let f = doppler_hz * angle.cos();
            let phase = rng.random::<f64>() * TAU;
            freqs_hz.push(f);
            init_phases.push(phase);
            phasors.push(Complex64::from_polar(1.0, phase));
            steps.push(Complex64::from_polar(1.0, TAU * f * sample_period));
        }
        Ok(Self {
            doppler_hz,
            sample_period,
            freqs_hz,
            init_phases,
            phasors,
            steps,
            sample_index: 0,
            amplitude: 1.0 / l.sqrt(),
        })
    }

    pub fn doppler_hz(&self) -> f64 {
        self.doppler_hz
    }

    pub fn sample_period(&self) -> f64 {
        self.sample_period
    }

    pub fn oscillators(&self) -> usize {
        self.freqs_hz.len()
    }

    /// Absolute index of the next sample to be generated.
    pub fn sample_index(&self) -> u64 {
        self.sample_index
    }

    fn resync(&mut self) {
        let t = self.sample_index as f64 * self.sample_period;
        for i in 0..self.phasors.len() {
            let phase = TAU * self.freqs_hz[i] * t + self.init_phases[i];
            self.phasors[i] = Complex64::from_polar(1.0, phase);
        }
    }

    /// Next `count` complex fading gains (Rayleigh-distributed envelope).
    pub fn gains(&mut self, count: usize) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            if self.sample_index.is_multiple_of(RESYNC_INTERVAL) {
                self.resync();
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for p in &self.phasors {
                acc += p;
            }
            out.push(acc * self.amplitude);
            for (p, step) in self.phasors.iter_mut().zip(&self.steps) {
                *p *= *step;
            }
            self.sample_index += 1;
        }
        out
    }

    /// Next `count` Rician gains: a fixed unit-power mix of a line-of-sight
    /// component sqrt(K/(K+1)) and the scattered process scaled by
    /// sqrt(1/(K+1)).  K = 0 reduces exactly to the Rayleigh gains.
    pub fn rician_gains(&mut self, k_factor: f64, count: usize) -> Result<Vec<Complex64>> {
        if !(k_factor >= 0.0 && k_factor.is_finite()) {
            return Err(Error::Domain(format!(
                "Rician K-factor must be non-negative and finite, got {k_factor}"
            )));
        }
        let scattered = self.gains(count);
        if k_factor == 0.0 {
            return Ok(scattered);
        }
        let los = (k_factor / (k_factor + 1.0)).sqrt();
        let scatter_scale = (1.0 / (k_factor + 1.0)).sqrt();
        Ok(scattered
            .into_iter()
            .map(|s| Complex64::new(los, 0.0) + s * scatter_scale)
            .collect())
    }
}
