//! OFDM framing: radix-2 FFT, subcarrier modulation and cyclic prefix.
//!
//! Scaling convention: `ofdm_modulate` multiplies the inverse FFT (which
//! carries the 1/N factor) by sqrt(N), so unit-energy subcarrier symbols
//! produce time samples with unit average power and `ofdm_demodulate`
//! (FFT / sqrt(N)) is its exact inverse.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// OFDM frame geometry and timing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OfdmConfig {
    /// Number of subcarriers N (FFT size); a power of two, at least 2.
    pub n_subcarriers: usize,
    /// Cyclic prefix length in samples; strictly less than N.
    pub cp_len: usize,
    /// Baseband sample period in seconds.
    pub sample_period: f64,
}

impl OfdmConfig {
    pub fn new(n_subcarriers: usize, cp_len: usize, sample_period: f64) -> Result<Self> {
        let cfg = Self {
            n_subcarriers,
            cp_len,
            sample_period,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_subcarriers < 2 || !self.n_subcarriers.is_power_of_two() {
            return Err(Error::Config(format!(
                "subcarrier count must be a power of two >= 2, got {}",
                self.n_subcarriers
            )));
        }
        if self.cp_len >= self.n_subcarriers {
            return Err(Error::Config(format!(
                "cyclic prefix length {} must be shorter than the {}-sample symbol body",
                self.cp_len, self.n_subcarriers
            )));
        }
        if !(self.sample_period > 0.0 && self.sample_period.is_finite()) {
            return Err(Error::Config(format!(
                "sample period must be positive and finite, got {}",
                self.sample_period
            )));
        }
        Ok(())
    }

    /// Samples per transmitted OFDM symbol, prefix included.
    pub fn symbol_len(&self) -> usize {
        self.n_subcarriers + self.cp_len
    }

    /// (N + cp) / N, the energy overhead of the cyclic prefix.
    pub fn cp_overhead(&self) -> f64 {
        self.symbol_len() as f64 / self.n_subcarriers as f64
    }
}

/// One OFDM symbol in the time domain: cyclic prefix followed by the
/// N-sample body.  Frames built by [`ofdm_modulate`] satisfy the cyclic
/// prefix property (the first `cp_len` samples replicate the last `cp_len`
/// of the body); frames reassembled from channel output generally do not,
/// which is fine because demodulation discards the prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct OfdmFrame {
    pub samples: Vec<Complex64>,
}

/// Forward FFT (engineering sign convention, no scaling).
/// The length must be a power of two.
pub fn fft(x: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut buf = x.to_vec();
    fft_in_place(&mut buf, false)?;
    Ok(buf)
}

/// Inverse FFT with the 1/N factor, the exact inverse of [`fft`].
pub fn ifft(x: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut buf = x.to_vec();
    fft_in_place(&mut buf, true)?;
    Ok(buf)
}

/// Iterative radix-2 Cooley-Tukey transform.
fn fft_in_place(buf: &mut [Complex64], inverse: bool) -> Result<()> {
    let n = buf.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::Domain(format!(
            "FFT length must be a power of two, got {n}"
        )));
    }
    if n == 1 {
        return Ok(());
    }
    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }
    // Twiddle table computed per element (not by repeated multiplication),
    // so rounding does not accumulate along the table.
    let sign = if inverse { 1.0 } else { -1.0 };
    let twiddle: Vec<Complex64> = (0..n / 2)
        .map(|k| Complex64::from_polar(1.0, sign * TAU * k as f64 / n as f64))
        .collect();
    let mut len = 2;
    while len <= n {
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                let w = twiddle[k * stride];
                let a = buf[start + k];
                let b = buf[start + k + len / 2] * w;
                buf[start + k] = a + b;
                buf[start + k + len / 2] = a - b;
            }
        }
        len <<= 1;
    }
    if inverse {
        let inv_n = 1.0 / n as f64;
        for v in buf.iter_mut() {
            *v *= inv_n;
        }
    }
    Ok(())
}

/// Modulate frequency-domain symbols onto OFDM frames.
///
/// `symbols` is consumed N at a time (subcarrier k of each symbol gets
/// element k); its length must be a multiple of N.  Each frame is
/// sqrt(N) * ifft(chunk) with the last `cp_len` body samples prepended.
pub fn ofdm_modulate(symbols: &[Complex64], cfg: &OfdmConfig) -> Result<Vec<OfdmFrame>> {
    cfg.validate()?;
    let n = cfg.n_subcarriers;
    if !symbols.len().is_multiple_of(n) {
        return Err(Error::Domain(format!(
            "symbol count {} is not a multiple of the subcarrier count {n}",
            symbols.len()
        )));
    }
    let scale = (n as f64).sqrt();
    let mut frames = Vec::with_capacity(symbols.len() / n);
    for chunk in symbols.chunks_exact(n) {
        let mut body = ifft(chunk)?;
        for v in &mut body {
            *v *= scale;
        }
        let mut samples = Vec::with_capacity(cfg.symbol_len());
        samples.extend_from_slice(&body[n - cfg.cp_len..]);
        samples.extend_from_slice(&body);
        frames.push(OfdmFrame { samples });
    }
    Ok(frames)
}

/// Recover frequency-domain symbols from received frames: strip each prefix
/// and apply FFT / sqrt(N).  Output symbols are concatenated frame by frame.
pub fn ofdm_demodulate(frames: &[OfdmFrame], cfg: &OfdmConfig) -> Result<Vec<Complex64>> {
    cfg.validate()?;
    let n = cfg.n_subcarriers;
    let scale = (n as f64).sqrt().recip();
    let mut symbols = Vec::with_capacity(frames.len() * n);
    for (idx, frame) in frames.iter().enumerate() {
        if frame.samples.len() != cfg.symbol_len() {
            return Err(Error::Domain(format!(
                "frame {idx} has {} samples, expected {}",
                frame.samples.len(),
                cfg.symbol_len()
            )));
        }
        let mut spectrum = fft(&frame.samples[cfg.cp_len..])?;
        for v in &mut spectrum {
            *v *= scale;
        }
        symbols.extend_from_slice(&spectrum);
    }
    Ok(symbols)
}

/// Concatenate frames into one contiguous sample stream, the form in which
/// the channel acts on the waveform.
pub fn flatten_frames(frames: &[OfdmFrame]) -> Vec<Complex64> {
    let mut samples = Vec::with_capacity(frames.iter().map(|f| f.samples.len()).sum());
    for f in frames {
        samples.extend_from_slice(&f.samples);
    }
    samples
}

/// Split a contiguous sample stream back into frames.  The stream length
/// must be a multiple of the frame length.
pub fn frames_from_samples(samples: Vec<Complex64>, cfg: &OfdmConfig) -> Result<Vec<OfdmFrame>> {
    cfg.validate()?;
    let flen = cfg.symbol_len();
    if !samples.len().is_multiple_of(flen) {
        return Err(Error::Domain(format!(
            "sample count {} is not a multiple of the {flen}-sample frame length",
            samples.len()
        )));
    }
    Ok(samples
        .chunks_exact(flen)
        .map(|c| OfdmFrame {
            samples: c.to_vec(),
        })
        .collect())
}
