//! Deterministic signal primitives: framing, windowing, forward/inverse STFT,
//! log-mel features, and complex arithmetic carried as paired real values.
//!
//! All reference-path numerics are f64. Complex quantities are stored as
//! separate real/imaginary arrays so that gradients elsewhere in the crate
//! can treat them as ordinary real parameters.

mod wav;

pub use wav::{read_wav, write_wav, WavFormat};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::LOG_FLOOR;

/// Time-domain samples for M channels at a common sample rate.
///
/// Amplitudes are dimensionless with nominal range ±1.0.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiChannelWaveform {
    channels: Vec<Vec<f64>>,
    sample_rate: u32,
}

impl MultiChannelWaveform {
    pub fn new(channels: Vec<Vec<f64>>, sample_rate: u32) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::invalid("waveform needs at least one channel"));
        }
        if sample_rate == 0 {
            return Err(Error::invalid("sample rate must be positive"));
        }
        let len = channels[0].len();
        if channels.iter().any(|c| c.len() != len) {
            return Err(Error::shape("all channels must have equal length"));
        }
        Ok(Self { channels, sample_rate })
    }

    pub fn mono(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        Self::new(vec![samples], sample_rate)
    }

    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn channel(&self, m: usize) -> &[f64] {
        &self.channels[m]
    }

    pub fn channels(&self) -> &[Vec<f64>] {
        &self.channels
    }

    pub fn channels_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.channels
    }

    /// Mean per-sample power averaged over channels.
    pub fn mean_power(&self) -> f64 {
        if self.len() == 0 {
            return 0.0;
        }
        let total: f64 = self
            .channels
            .iter()
            .map(|c| c.iter().map(|x| x * x).sum::<f64>())
            .sum();
        total / (self.len() * self.num_channels()) as f64
    }
}

/// Analysis window. `Rect` exists for debugging spectral content without
/// leakage compensation; the production path uses periodic Hann.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowKind {
    Hann,
    Rect,
}

impl WindowKind {
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        match self {
            // Periodic Hann: w[n] = 0.5 (1 - cos(2 pi n / N))
            WindowKind::Hann => (0..len)
                .map(|n| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * n as f64 / len as f64).cos()))
                .collect(),
            WindowKind::Rect => vec![1.0; len],
        }
    }
}

/// Per-channel complex STFT bins X[t,f], real/imag stored separately.
#[derive(Debug, Clone)]
pub struct ComplexSpectrogram {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    channels: usize,
    frames: usize,
    bins: usize,
    sample_rate: u32,
    fft_size: usize,
    window_len_s: f64,
    frame_hop_s: f64,
    window: WindowKind,
}

impl ComplexSpectrogram {
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        re: Vec<f64>,
        im: Vec<f64>,
        channels: usize,
        frames: usize,
        bins: usize,
        sample_rate: u32,
        fft_size: usize,
        window_len_s: f64,
        frame_hop_s: f64,
        window: WindowKind,
    ) -> Result<Self> {
        let n = channels * frames * bins;
        if re.len() != n || im.len() != n {
            return Err(Error::shape(format!(
                "spectrogram storage {} does not match {channels}x{frames}x{bins}",
                re.len()
            )));
        }
        if bins != fft_size / 2 + 1 {
            return Err(Error::shape(format!(
                "bins {bins} inconsistent with fft size {fft_size}"
            )));
        }
        Ok(Self {
            re,
            im,
            channels,
            frames,
            bins,
            sample_rate,
            fft_size,
            window_len_s,
            frame_hop_s,
            window,
        })
    }

    pub fn num_channels(&self) -> usize {
        self.channels
    }

    pub fn num_frames(&self) -> usize {
        self.frames
    }

    pub fn num_bins(&self) -> usize {
        self.bins
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn fft_size(&self) -> usize {
        self.fft_size
    }

    pub fn window_len_s(&self) -> f64 {
        self.window_len_s
    }

    pub fn frame_hop_s(&self) -> f64 {
        self.frame_hop_s
    }

    pub fn window_kind(&self) -> WindowKind {
        self.window
    }

    #[inline]
    pub fn index(&self, channel: usize, frame: usize, bin: usize) -> usize {
        (channel * self.frames + frame) * self.bins + bin
    }

    #[inline]
    pub fn at(&self, channel: usize, frame: usize, bin: usize) -> Complex64 {
        let i = self.index(channel, frame, bin);
        Complex64::new(self.re[i], self.im[i])
    }

    /// Extract one channel as a spectrogram of its own.
    pub fn channel(&self, m: usize) -> ComplexSpectrogram {
        let start = self.index(m, 0, 0);
        let end = start + self.frames * self.bins;
        ComplexSpectrogram {
            re: self.re[start..end].to_vec(),
            im: self.im[start..end].to_vec(),
            channels: 1,
            frames: self.frames,
            bins: self.bins,
            sample_rate: self.sample_rate,
            fft_size: self.fft_size,
            window_len_s: self.window_len_s,
            frame_hop_s: self.frame_hop_s,
            window: self.window,
        }
    }
}

/// Log-mel feature matrix [frame x mel].
#[derive(Debug, Clone)]
pub struct LogMelFeatures {
    pub values: Vec<f64>,
    pub frames: usize,
    pub n_mels: usize,
}

impl LogMelFeatures {
    #[inline]
    pub fn at(&self, t: usize, mel: usize) -> f64 {
        self.values[t * self.n_mels + mel]
    }
}

fn samples_from_seconds(label: &str, seconds: f64, sample_rate: u32) -> Result<usize> {
    let exact = seconds * sample_rate as f64;
    let rounded = exact.round();
    if rounded < 1.0 || (exact - rounded).abs() > 1e-9 {
        return Err(Error::config(format!(
            "{label} of {seconds} s is not a positive whole number of samples at {sample_rate} Hz"
        )));
    }
    Ok(rounded as usize)
}

pub fn next_pow2(n: usize) -> usize {
    let mut p = 1;
    while p < n {
        p *= 2;
    }
    p
}

/// Framing/transform plan shared by `stft` and `istft`.
#[derive(Debug, Clone)]
pub struct StftPlan {
    pub win: usize,
    pub hop: usize,
    pub fft_size: usize,
    pub window: WindowKind,
}

impl StftPlan {
    pub fn new(
        sample_rate: u32,
        window_len_s: f64,
        hop_s: f64,
        fft_size: Option<usize>,
        window: WindowKind,
    ) -> Result<Self> {
        let win = samples_from_seconds("window length", window_len_s, sample_rate)?;
        let hop = samples_from_seconds("hop", hop_s, sample_rate)?;
        let fft_size = match fft_size {
            Some(n) => {
                if n < win || !n.is_power_of_two() {
                    return Err(Error::config(format!(
                        "fft size {n} must be a power of two >= window of {win} samples"
                    )));
                }
                n
            }
            None => next_pow2(win),
        };
        Ok(Self { win, hop, fft_size, window })
    }

    pub fn num_bins(&self) -> usize {
        self.fft_size / 2 + 1
    }

    pub fn num_frames(&self, samples: usize) -> Result<usize> {
        if samples < self.win {
            return Err(Error::InsufficientSamples { have: samples, need: self.win });
        }
        Ok(1 + (samples - self.win) / self.hop)
    }
}

/// Forward STFT with the plan's window, zero-padded to the fft size.
/// Bin 0 is DC; one-sided bins F = fft_size/2 + 1 are kept.
pub fn stft_with_plan(wave: &MultiChannelWaveform, plan: &StftPlan) -> Result<ComplexSpectrogram> {
    let frames = plan.num_frames(wave.len())?;
    let bins = plan.num_bins();
    let coeffs = plan.window.coefficients(plan.win);

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(plan.fft_size);

    let channels = wave.num_channels();
    let mut re = vec![0.0; channels * frames * bins];
    let mut im = vec![0.0; channels * frames * bins];
    let mut buf = vec![Complex64::new(0.0, 0.0); plan.fft_size];

    for m in 0..channels {
        let samples = wave.channel(m);
        for t in 0..frames {
            let start = t * plan.hop;
            for (i, slot) in buf.iter_mut().enumerate() {
                *slot = if i < plan.win {
                    Complex64::new(samples[start + i] * coeffs[i], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
            }
            fft.process(&mut buf);
            let base = (m * frames + t) * bins;
            for f in 0..bins {
                re[base + f] = buf[f].re;
                im[base + f] = buf[f].im;
            }
        }
    }

    let sr = wave.sample_rate();
    ComplexSpectrogram::from_parts(
        re,
        im,
        channels,
        frames,
        bins,
        sr,
        plan.fft_size,
        plan.win as f64 / sr as f64,
        plan.hop as f64 / sr as f64,
        plan.window,
    )
}

/// Forward STFT with the defaults: periodic Hann, fft size = next power of
/// two at or above the window length.
pub fn stft(
    wave: &MultiChannelWaveform,
    window_len_s: f64,
    hop_s: f64,
) -> Result<ComplexSpectrogram> {
    let plan = StftPlan::new(wave.sample_rate(), window_len_s, hop_s, None, WindowKind::Hann)?;
    stft_with_plan(wave, &plan)
}

/// Samples for which every overlapping window contributes, where the
/// round-trip reconstruction bound applies.
pub fn istft_interior(spec: &ComplexSpectrogram) -> std::ops::Range<usize> {
    let sr = spec.sample_rate() as f64;
    let win = (spec.window_len_s() * sr).round() as usize;
    let hop = (spec.frame_hop_s() * sr).round() as usize;
    let total = (spec.num_frames() - 1) * hop + win;
    let start = win.min(total);
    start..total.saturating_sub(win).max(start)
}

/// Weighted overlap-add inverse STFT. Applies the analysis window again on
/// synthesis and normalizes by the summed squared window, which reconstructs
/// an unmodified spectrogram exactly wherever the window coverage is
/// non-degenerate.
pub fn istft(spec: &ComplexSpectrogram) -> Result<MultiChannelWaveform> {
    let sr = spec.sample_rate();
    let win = samples_from_seconds("window length", spec.window_len_s(), sr)?;
    let hop = samples_from_seconds("hop", spec.frame_hop_s(), sr)?;
    let frames = spec.num_frames();
    let fft_size = spec.fft_size();
    let bins = spec.num_bins();
    let coeffs = spec.window_kind().coefficients(win);

    let total = (frames - 1) * hop + win;
    let mut wsum2 = vec![0.0; total];
    for t in 0..frames {
        for (i, w) in coeffs.iter().enumerate() {
            wsum2[t * hop + i] += w * w;
        }
    }
    // Reject window/hop pairs that leave interior samples uncovered.
    let interior = istft_interior(spec);
    if frames > 1 && (hop > win || wsum2[interior].iter().any(|&v| v < 1e-6)) {
        return Err(Error::NonCola);
    }

    let mut planner = FftPlanner::<f64>::new();
    let ifft = planner.plan_fft_inverse(fft_size);
    let scale = 1.0 / fft_size as f64;

    let mut channels = Vec::with_capacity(spec.num_channels());
    let mut buf = vec![Complex64::new(0.0, 0.0); fft_size];
    for m in 0..spec.num_channels() {
        let mut out = vec![0.0; total];
        for t in 0..frames {
            for f in 0..bins {
                buf[f] = spec.at(m, t, f);
            }
            // Hermitian completion of the one-sided spectrum.
            for f in bins..fft_size {
                buf[f] = buf[fft_size - f].conj();
            }
            ifft.process(&mut buf);
            let base = t * hop;
            for (i, w) in coeffs.iter().enumerate() {
                out[base + i] += w * buf[i].re * scale;
            }
        }
        for (y, &d) in out.iter_mut().zip(wsum2.iter()) {
            *y /= d.max(1e-12);
        }
        channels.push(out);
    }
    MultiChannelWaveform::new(channels, sr)
}

/// Triangular mel filterbank over one-sided power spectra.
#[derive(Debug, Clone)]
pub struct MelFilterbank {
    weights: Vec<f64>, // [n_mels x bins]
    pub n_mels: usize,
    pub bins: usize,
}

fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

impl MelFilterbank {
    pub fn new(n_mels: usize, bins: usize, sample_rate: u32, fft_size: usize) -> Result<Self> {
        if n_mels == 0 {
            return Err(Error::config("n_mels must be >= 1"));
        }
        let nyquist = sample_rate as f64 / 2.0;
        let mel_max = hz_to_mel(nyquist);
        let edges: Vec<f64> = (0..n_mels + 2)
            .map(|i| mel_to_hz(mel_max * i as f64 / (n_mels + 1) as f64))
            .collect();
        let mut weights = vec![0.0; n_mels * bins];
        for mel in 0..n_mels {
            let (lo, mid, hi) = (edges[mel], edges[mel + 1], edges[mel + 2]);
            for bin in 0..bins {
                let f = bin as f64 * sample_rate as f64 / fft_size as f64;
                let w = if f > lo && f < mid {
                    (f - lo) / (mid - lo)
                } else if (f - mid).abs() <= f64::EPSILON * mid.abs() {
                    1.0
                } else if f > mid && f < hi {
                    (hi - f) / (hi - mid)
                } else {
                    0.0
                };
                weights[mel * bins + bin] = w;
            }
        }
        Ok(Self { weights, n_mels, bins })
    }

    /// Debug filterbank: contiguous rectangular bands normalized by band
    /// width, so a white-noise power spectrum yields near-equal band
    /// energies.
    pub fn flat(n_mels: usize, bins: usize) -> Result<Self> {
        if n_mels == 0 || bins < n_mels {
            return Err(Error::config("flat filterbank needs bins >= n_mels >= 1"));
        }
        let mut weights = vec![0.0; n_mels * bins];
        let mut widths = vec![0usize; n_mels];
        for bin in 0..bins {
            widths[(bin * n_mels) / bins] += 1;
        }
        for bin in 0..bins {
            let mel = (bin * n_mels) / bins;
            weights[mel * bins + bin] = 1.0 / widths[mel] as f64;
        }
        Ok(Self { weights, n_mels, bins })
    }

    pub fn weight(&self, mel: usize, bin: usize) -> f64 {
        self.weights[mel * self.bins + bin]
    }

    pub fn apply(&self, power: &[f64]) -> Vec<f64> {
        assert_eq!(power.len(), self.bins);
        (0..self.n_mels)
            .map(|mel| {
                self.weights[mel * self.bins..(mel + 1) * self.bins]
                    .iter()
                    .zip(power)
                    .map(|(w, p)| w * p)
                    .sum()
            })
            .collect()
    }
}

/// Log-mel features of a single-channel spectrogram: mel filterbank over the
/// power spectrum, natural log with an additive floor.
pub fn log_mel_with_bank(
    spec: &ComplexSpectrogram,
    bank: &MelFilterbank,
) -> Result<LogMelFeatures> {
    if spec.num_channels() != 1 {
        return Err(Error::shape(format!(
            "log_mel expects a single channel, got {}",
            spec.num_channels()
        )));
    }
    if bank.bins != spec.num_bins() {
        return Err(Error::shape("filterbank bin count does not match spectrogram"));
    }
    let frames = spec.num_frames();
    let bins = spec.num_bins();
    let mut values = Vec::with_capacity(frames * bank.n_mels);
    let mut power = vec![0.0; bins];
    for t in 0..frames {
        for f in 0..bins {
            let i = t * bins + f;
            power[f] = spec.re[i] * spec.re[i] + spec.im[i] * spec.im[i];
        }
        for e in bank.apply(&power) {
            values.push((e + LOG_FLOOR).ln());
        }
    }
    Ok(LogMelFeatures { values, frames, n_mels: bank.n_mels })
}

pub fn log_mel(spec: &ComplexSpectrogram, n_mels: usize) -> Result<LogMelFeatures> {
    let bank = MelFilterbank::new(n_mels, spec.num_bins(), spec.sample_rate(), spec.fft_size())?;
    log_mel_with_bank(spec, &bank)
}

/// Hermitian inner product sum conj(a_i) b_i, with the real and imaginary
/// parts accumulated as two separate real sums.
pub fn complex_dot(a: &[Complex64], b: &[Complex64]) -> Result<Complex64> {
    if a.len() != b.len() {
        return Err(Error::shape(format!(
            "complex_dot length mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        re += x.re * y.re + x.im * y.im;
        im += x.re * y.im - x.im * y.re;
    }
    Ok(Complex64::new(re, im))
}

/// Same kernel over split real/imag slices; used by the hot paths that keep
/// complex tensors as paired real arrays.
#[inline]
pub fn complex_dot_split(a_re: &[f64], a_im: &[f64], b_re: &[f64], b_im: &[f64]) -> (f64, f64) {
    debug_assert_eq!(a_re.len(), b_re.len());
    let mut re = 0.0;
    let mut im = 0.0;
    for i in 0..a_re.len() {
        re += a_re[i] * b_re[i] + a_im[i] * b_im[i];
        im += a_re[i] * b_im[i] - a_im[i] * b_re[i];
    }
    (re, im)
}
