//! Far-field scene simulation at desk scale: array geometry, plane-wave
//! steering, directional source rendering with fractional delays and 1/r
//! attenuation, optional first-order image reflections, and SNR-controlled
//! mixing.

mod dataset;

pub use dataset::{
    generate_dataset, DatasetManifest, ManifestEntry, ManifestHeader, SimConfig,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dsp::MultiChannelWaveform;
use crate::error::{Error, Result};

pub const SPEED_OF_SOUND: f64 = 343.0;

/// Microphone positions in meters, re-centered so the centroid is the
/// phase/coordinate origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    mics: Vec<[f64; 3]>,
}

impl ArrayGeometry {
    pub fn new(mut mics: Vec<[f64; 3]>) -> Result<Self> {
        if mics.len() < 2 {
            return Err(Error::invalid("array needs at least 2 microphones"));
        }
        let m = mics.len() as f64;
        let mut centroid = [0.0; 3];
        for p in &mics {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / m;
            }
        }
        for p in mics.iter_mut() {
            for (v, c) in p.iter_mut().zip(&centroid) {
                *v -= c;
            }
        }
        for i in 0..mics.len() {
            for j in i + 1..mics.len() {
                let d = dist(&mics[i], &mics[j]);
                if d < 1e-6 {
                    return Err(Error::invalid(format!(
                        "microphones {i} and {j} coincide"
                    )));
                }
            }
        }
        Ok(Self { mics })
    }

    /// Four microphones at the corners of a 6 cm x 7 cm rectangle in the
    /// horizontal plane.
    pub fn rectangle_6x7cm() -> Self {
        Self::new(vec![
            [0.03, 0.035, 0.0],
            [0.03, -0.035, 0.0],
            [-0.03, 0.035, 0.0],
            [-0.03, -0.035, 0.0],
        ])
        .expect("default geometry is valid")
    }

    pub fn num_mics(&self) -> usize {
        self.mics.len()
    }

    pub fn mic(&self, m: usize) -> [f64; 3] {
        self.mics[m]
    }

    pub fn mics(&self) -> &[[f64; 3]] {
        &self.mics
    }

    /// Largest pairwise distance between microphones.
    pub fn aperture(&self) -> f64 {
        let mut max = 0.0f64;
        for i in 0..self.mics.len() {
            for j in i + 1..self.mics.len() {
                max = max.max(dist(&self.mics[i], &self.mics[j]));
            }
        }
        max
    }

    /// Largest microphone distance from the centroid.
    pub fn max_radius(&self) -> f64 {
        self.mics.iter().map(|p| norm(p)).fold(0.0, f64::max)
    }
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    norm(&[a[0] - b[0], a[1] - b[1], a[2] - b[2]])
}

fn norm(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Source location in array coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourcePlacement {
    /// Radians in [0, 2π).
    pub azimuth: f64,
    /// Radians in [-π/2, π/2].
    pub elevation: f64,
    /// Meters, > 0.
    pub distance: f64,
}

impl SourcePlacement {
    pub fn new(azimuth: f64, elevation: f64, distance: f64) -> Result<Self> {
        if !(0.0..std::f64::consts::TAU).contains(&azimuth) {
            return Err(Error::invalid(format!("azimuth {azimuth} outside [0, 2pi)")));
        }
        let half_pi = std::f64::consts::FRAC_PI_2;
        if !(-half_pi..=half_pi).contains(&elevation) {
            return Err(Error::invalid(format!(
                "elevation {elevation} outside [-pi/2, pi/2]"
            )));
        }
        if distance <= 0.0 || !distance.is_finite() {
            return Err(Error::invalid(format!("distance {distance} must be positive")));
        }
        Ok(Self { azimuth, elevation, distance })
    }

    /// Unit vector from the array centroid toward the source.
    pub fn unit_direction(&self) -> [f64; 3] {
        let (sa, ca) = self.azimuth.sin_cos();
        let (se, ce) = self.elevation.sin_cos();
        [ce * ca, ce * sa, se]
    }

    pub fn position(&self) -> [f64; 3] {
        let u = self.unit_direction();
        [u[0] * self.distance, u[1] * self.distance, u[2] * self.distance]
    }

    pub fn is_far_field(&self, geom: &ArrayGeometry) -> bool {
        self.distance >= 10.0 * geom.aperture()
    }
}

/// One simulated scene: a speech source, a noise source, and the mixing SNR.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneSpec {
    pub speech: SourcePlacement,
    pub noise: SourcePlacement,
    pub snr_db: f64,
    pub seed: u64,
    pub reflection_order: u8,
}

/// Rectangular room centered on the array centroid, used when first-order
/// image reflections are enabled.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RoomSpec {
    /// Interior dimensions [x, y, z] in meters.
    pub size: [f64; 3],
    /// Per-wall amplitude reflection coefficient in [0, 1).
    pub reflection_coeff: f64,
}

impl Default for RoomSpec {
    fn default() -> Self {
        Self { size: [6.0, 5.0, 3.0], reflection_coeff: 0.5 }
    }
}

/// Plane-wave steering vector for a unit arrival direction: element m is
/// exp(-i 2π f τ_m) with τ_m = -(u · p_m)/c, phase referenced to the array
/// centroid.
pub fn steering_vector(
    geom: &ArrayGeometry,
    direction: &[f64; 3],
    freq_hz: f64,
    speed_of_sound: f64,
) -> Result<Vec<Complex64>> {
    let n = norm(direction);
    if n < 1e-12 {
        return Err(Error::invalid("steering direction has zero norm"));
    }
    if freq_hz < 0.0 {
        return Err(Error::invalid("frequency must be non-negative"));
    }
    let u = [direction[0] / n, direction[1] / n, direction[2] / n];
    Ok(geom
        .mics()
        .iter()
        .map(|p| {
            let tau = -dot(&u, p) / speed_of_sound;
            let phase = -2.0 * std::f64::consts::PI * freq_hz * tau;
            Complex64::new(phase.cos(), phase.sin())
        })
        .collect())
}

pub fn steering_for_placement(
    geom: &ArrayGeometry,
    place: &SourcePlacement,
    freq_hz: f64,
    speed_of_sound: f64,
) -> Result<Vec<Complex64>> {
    steering_vector(geom, &place.unit_direction(), freq_hz, speed_of_sound)
}

const SINC_TAPS: usize = 31;
const SINC_CENTER: isize = (SINC_TAPS as isize - 1) / 2;

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

/// Blackman-windowed sinc interpolation taps for a fractional delay in
/// [0, 1), normalized to unit DC gain so attenuation stays exact.
fn fractional_delay_taps(frac: f64) -> [f64; SINC_TAPS] {
    let mut taps = [0.0; SINC_TAPS];
    let nm1 = (SINC_TAPS - 1) as f64;
    let mut sum = 0.0;
    for (k, tap) in taps.iter_mut().enumerate() {
        let x = (k as isize - SINC_CENTER) as f64 - frac;
        let w = 0.42 - 0.5 * (2.0 * std::f64::consts::PI * k as f64 / nm1).cos()
            + 0.08 * (4.0 * std::f64::consts::PI * k as f64 / nm1).cos();
        *tap = sinc(x) * w;
        sum += *tap;
    }
    for tap in taps.iter_mut() {
        *tap /= sum;
    }
    taps
}

/// Add `gain * x` delayed by `delay_samples` (fractional) into `out`.
fn add_delayed(out: &mut [f64], x: &[f64], delay_samples: f64, gain: f64) {
    let d_int = delay_samples.floor() as isize;
    let frac = delay_samples - d_int as f64;
    let taps = fractional_delay_taps(frac);
    let n = x.len() as isize;
    for (i, y) in out.iter_mut().enumerate() {
        let base = i as isize - d_int + SINC_CENTER;
        let mut acc = 0.0;
        for (k, &h) in taps.iter().enumerate() {
            let idx = base - k as isize;
            if idx >= 0 && idx < n {
                acc += h * x[idx as usize];
            }
        }
        *y += gain * acc;
    }
}

struct ImageSource {
    position: [f64; 3],
    gain_scale: f64,
}

fn image_sources(position: [f64; 3], room: &RoomSpec, order: u8) -> Result<Vec<ImageSource>> {
    let mut out = vec![ImageSource { position, gain_scale: 1.0 }];
    if order == 0 {
        return Ok(out);
    }
    for axis in 0..3 {
        let half = room.size[axis] / 2.0;
        if position[axis].abs() >= half {
            return Err(Error::invalid(format!(
                "source lies outside the configured room along axis {axis}"
            )));
        }
        for sign in [1.0, -1.0] {
            let mut p = position;
            p[axis] = sign * room.size[axis] - position[axis];
            out.push(ImageSource { position: p, gain_scale: room.reflection_coeff });
        }
    }
    Ok(out)
}

/// Render a mono source at a placement into M channels with per-mic
/// fractional delay and 1/distance attenuation. With `reflection_order` 1,
/// six first-order image sources for the rectangular room are added.
pub fn render_source(
    wave: &MultiChannelWaveform,
    geom: &ArrayGeometry,
    place: &SourcePlacement,
    reflection_order: u8,
    room: &RoomSpec,
    speed_of_sound: f64,
) -> Result<MultiChannelWaveform> {
    if wave.num_channels() != 1 {
        return Err(Error::shape("render_source expects a mono source"));
    }
    if reflection_order > 1 {
        return Err(Error::config("reflection_order must be 0 or 1"));
    }
    if place.distance <= geom.max_radius() {
        return Err(Error::invalid(
            "source placed inside the array hull; move it outside the microphones",
        ));
    }
    let images = image_sources(place.position(), room, reflection_order)?;
    let sr = wave.sample_rate() as f64;

    // Common output length covering the farthest image path.
    let mut max_delay = 0.0f64;
    for img in &images {
        for mic in geom.mics() {
            max_delay = max_delay.max(dist(&img.position, mic) / speed_of_sound * sr);
        }
    }
    let out_len = wave.len() + max_delay.ceil() as usize + SINC_TAPS;

    let x = wave.channel(0);
    let channels = geom
        .mics()
        .iter()
        .map(|mic| {
            let mut y = vec![0.0; out_len];
            for img in &images {
                let d = dist(&img.position, mic);
                let delay = d / speed_of_sound * sr;
                let gain = img.gain_scale / d;
                add_delayed(&mut y, x, delay, gain);
            }
            y
        })
        .collect();
    MultiChannelWaveform::new(channels, wave.sample_rate())
}

/// Scale the noise so that 10 log10(P_speech / P_scaled_noise) equals
/// `snr_db`, then add. Powers are mean per-sample power averaged over
/// channels.
pub fn mix_at_snr(
    speech: &MultiChannelWaveform,
    noise: &MultiChannelWaveform,
    snr_db: f64,
) -> Result<MultiChannelWaveform> {
    if speech.num_channels() != noise.num_channels() || speech.len() != noise.len() {
        return Err(Error::shape("speech and noise must have identical shape"));
    }
    if speech.sample_rate() != noise.sample_rate() {
        return Err(Error::shape("speech and noise must share a sample rate"));
    }
    let p_s = speech.mean_power();
    let p_n = noise.mean_power();
    if p_n <= 0.0 {
        return Err(Error::invalid("noise is silent; cannot reach a finite SNR"));
    }
    let gain = (p_s / (p_n * 10f64.powf(snr_db / 10.0))).sqrt();
    let channels = speech
        .channels()
        .iter()
        .zip(noise.channels())
        .map(|(s, n)| s.iter().zip(n).map(|(a, b)| a + gain * b).collect())
        .collect();
    MultiChannelWaveform::new(channels, speech.sample_rate())
}

/// Pad both waveforms with trailing zeros to a common length.
pub fn pad_to_match(
    a: MultiChannelWaveform,
    b: MultiChannelWaveform,
) -> Result<(MultiChannelWaveform, MultiChannelWaveform)> {
    let len = a.len().max(b.len());
    let pad = |w: MultiChannelWaveform| -> Result<MultiChannelWaveform> {
        let sr = w.sample_rate();
        let channels = w
            .channels()
            .iter()
            .map(|c| {
                let mut v = c.clone();
                v.resize(len, 0.0);
                v
            })
            .collect();
        MultiChannelWaveform::new(channels, sr)
    };
    Ok((pad(a)?, pad(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stage_rng;
    use rand::Rng;

    #[test]
    fn geometry_recenters_and_measures() {
        let geom = ArrayGeometry::rectangle_6x7cm();
        assert_eq!(geom.num_mics(), 4);
        let centroid: [f64; 3] = geom.mics().iter().fold([0.0; 3], |mut acc, p| {
            for (a, v) in acc.iter_mut().zip(p) {
                *a += v / 4.0;
            }
            acc
        });
        assert!(norm(&centroid) < 1e-15);
        // Diagonal of a 6x7 cm rectangle.
        assert!((geom.aperture() - (0.06f64.powi(2) + 0.07f64.powi(2)).sqrt()).abs() < 1e-12);
        assert!(ArrayGeometry::new(vec![[0.0; 3], [0.0; 3]]).is_err());
    }

    #[test]
    fn steering_zero_frequency_is_ones() {
        let geom = ArrayGeometry::rectangle_6x7cm();
        let v = steering_vector(&geom, &[0.3, -0.4, 0.1], 0.0, SPEED_OF_SOUND).unwrap();
        for z in v {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn steering_broadside_has_equal_phases() {
        let geom =
            ArrayGeometry::new(vec![[-0.03, 0.0, 0.0], [0.03, 0.0, 0.0]]).unwrap();
        // Arrival along +y is orthogonal to both mic offsets.
        let v = steering_vector(&geom, &[0.0, 1.0, 0.0], 1500.0, SPEED_OF_SOUND).unwrap();
        assert!((v[0] - v[1]).norm() < 1e-15);
        assert!((v[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn steering_two_mic_phase_difference() {
        // Mics 0.06 m apart on the x axis, arrival along +x at 1 kHz:
        // the phase difference is 2π · 1000 · 0.06 / 343.
        let geom = ArrayGeometry::new(vec![[-0.03, 0.0, 0.0], [0.03, 0.0, 0.0]]).unwrap();
        let v = steering_vector(&geom, &[1.0, 0.0, 0.0], 1000.0, 343.0).unwrap();
        let diff = (v[1] * v[0].conj()).arg().abs();
        let want = 2.0 * std::f64::consts::PI * 1000.0 * 0.06 / 343.0;
        assert!((diff - want).abs() < 1e-12, "{diff} vs {want}");
    }

    #[test]
    fn steering_elements_have_unit_magnitude() {
        let geom = ArrayGeometry::rectangle_6x7cm();
        let mut rng = stage_rng(20, "steer-mag");
        for _ in 0..50 {
            let dir = [
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
            ];
            if norm(&dir) < 1e-3 {
                continue;
            }
            let f = rng.random::<f64>() * 8000.0;
            for z in steering_vector(&geom, &dir, f, SPEED_OF_SOUND).unwrap() {
                assert!((z.norm() - 1.0).abs() <= 1e-12);
            }
        }
        assert!(steering_vector(&geom, &[0.0; 3], 100.0, SPEED_OF_SOUND).is_err());
    }

    fn tone(freq: f64, len: usize, sr: u32) -> MultiChannelWaveform {
        let samples = (0..len)
            .map(|i| (2.0 * std::f64::consts::PI * freq * i as f64 / sr as f64).sin())
            .collect();
        MultiChannelWaveform::mono(samples, sr).unwrap()
    }

    #[test]
    fn render_equidistant_mics_match() {
        let geom = ArrayGeometry::new(vec![[-0.03, 0.0, 0.0], [0.03, 0.0, 0.0]]).unwrap();
        // A source on the +y axis is equidistant from both mics.
        let place = SourcePlacement::new(std::f64::consts::FRAC_PI_2, 0.0, 2.0).unwrap();
        let src = tone(440.0, 4000, 16_000);
        let out = render_source(&src, &geom, &place, 0, &RoomSpec::default(), 343.0).unwrap();
        for (a, b) in out.channel(0).iter().zip(out.channel(1)) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn render_inverse_distance_law() {
        let geom = ArrayGeometry::rectangle_6x7cm();
        let src = tone(500.0, 8000, 16_000);
        let near = SourcePlacement::new(1.0, 0.1, 1.5).unwrap();
        let far = SourcePlacement::new(1.0, 0.1, 3.0).unwrap();
        let room = RoomSpec::default();
        let y1 = render_source(&src, &geom, &near, 0, &room, 343.0).unwrap();
        let y2 = render_source(&src, &geom, &far, 0, &room, 343.0).unwrap();
        // Per-mic amplitude follows 1/distance exactly; compare RMS over a
        // steady interior region against the exact distance ratio.
        // 6016 samples = 188 whole periods of 500 Hz at 16 kHz, so the RMS
        // is phase independent.
        let rms = |w: &MultiChannelWaveform, m: usize| -> f64 {
            let seg = &w.channel(m)[1000..1000 + 6016];
            (seg.iter().map(|v| v * v).sum::<f64>() / seg.len() as f64).sqrt()
        };
        for m in 0..geom.num_mics() {
            let ratio = rms(&y2, m) / rms(&y1, m);
            let want = dist(&near.position(), &geom.mic(m)) / dist(&far.position(), &geom.mic(m));
            assert!((ratio - want).abs() < 1e-4, "mic {m}: ratio {ratio} want {want}");
        }
        // Doubling the centroid distance halves the amplitude to first order.
        assert!((rms(&y2, 0) / rms(&y1, 0) - 0.5).abs() < 0.02);
    }

    #[test]
    fn render_integer_delay_is_exact_shift() {
        // Two mics symmetric about the origin; a source on the +y axis at a
        // distance such that each mic sees exactly 10 samples of delay.
        let sr = 8000u32;
        let want_delay = 10.0;
        let d = want_delay * 343.0 / sr as f64; // mic-to-source distance
        let geom = ArrayGeometry::new(vec![[-0.03, 0.0, 0.0], [0.03, 0.0, 0.0]]).unwrap();
        let r = (d * d - 0.03f64 * 0.03).sqrt();
        let place = SourcePlacement::new(std::f64::consts::FRAC_PI_2, 0.0, r).unwrap();

        let mut rng = stage_rng(21, "delay-10");
        let src: Vec<f64> = (0..2000).map(|_| rng.random::<f64>() - 0.5).collect();
        let wave = MultiChannelWaveform::mono(src.clone(), sr).unwrap();
        let out = render_source(&wave, &geom, &place, 0, &RoomSpec::default(), 343.0).unwrap();

        // Cross-correlation oracle: the peak must sit at lag 10.
        let ch = out.channel(0);
        let mut best = (0usize, f64::MIN);
        for lag in 0..40 {
            let mut acc = 0.0;
            for i in 0..src.len() {
                acc += src[i] * ch[i + lag];
            }
            if acc > best.1 {
                best = (lag, acc);
            }
        }
        assert_eq!(best.0, 10);
        // Integer delay means the filter collapses to a pure shift.
        for i in 0..src.len() {
            assert!((ch[i + 10] - src[i] / d).abs() < 1e-12);
        }
    }

    #[test]
    fn render_is_linear() {
        let geom = ArrayGeometry::rectangle_6x7cm();
        let place = SourcePlacement::new(0.7, -0.1, 2.5).unwrap();
        let room = RoomSpec::default();
        let mut rng = stage_rng(22, "render-lin");
        let n = 1500;
        let xa: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        let xb: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        let (a, b) = (2.0, -0.7);
        let mixed: Vec<f64> = xa.iter().zip(&xb).map(|(x, y)| a * x + b * y).collect();
        let sr = 16_000;
        let render = |x: Vec<f64>| {
            render_source(
                &MultiChannelWaveform::mono(x, sr).unwrap(),
                &geom,
                &place,
                1,
                &room,
                343.0,
            )
            .unwrap()
        };
        let ya = render(xa);
        let yb = render(xb);
        let ym = render(mixed);
        for m in 0..4 {
            for i in 0..ym.len() {
                let want = a * ya.channel(m)[i] + b * yb.channel(m)[i];
                assert!((ym.channel(m)[i] - want).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn render_rejects_source_inside_hull() {
        let geom = ArrayGeometry::rectangle_6x7cm();
        let place = SourcePlacement::new(0.0, 0.0, 0.02).unwrap();
        let src = tone(440.0, 400, 16_000);
        assert!(render_source(&src, &geom, &place, 0, &RoomSpec::default(), 343.0).is_err());
    }

    #[test]
    fn mix_equal_power_zero_db_is_plain_sum() {
        let s = MultiChannelWaveform::mono(vec![0.1, -0.1, 0.1, -0.1], 8000).unwrap();
        let n = MultiChannelWaveform::mono(vec![-0.1, 0.1, -0.1, 0.1], 8000).unwrap();
        let out = mix_at_snr(&s, &n, 0.0).unwrap();
        for i in 0..4 {
            let want = s.channel(0)[i] + n.channel(0)[i];
            assert!((out.channel(0)[i] - want).abs() < 1e-15);
        }
    }

    #[test]
    fn mix_gain_formula_hand_case() {
        // Equal RMS 0.1 at 20 dB target: gain = sqrt(0.01/(0.01*100)) = 0.1.
        let s = MultiChannelWaveform::mono(vec![0.1; 100], 8000).unwrap();
        let n_sig: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 0.1 } else { -0.1 }).collect();
        let n = MultiChannelWaveform::mono(n_sig.clone(), 8000).unwrap();
        let out = mix_at_snr(&s, &n, 20.0).unwrap();
        for i in 0..100 {
            let want = 0.1 + 0.1 * n_sig[i];
            assert!((out.channel(0)[i] - want).abs() < 1e-15);
        }
    }

    #[test]
    fn mix_handles_silent_noise_as_error() {
        let s = MultiChannelWaveform::mono(vec![0.1; 16], 8000).unwrap();
        let n = MultiChannelWaveform::mono(vec![0.0; 16], 8000).unwrap();
        assert!(mix_at_snr(&s, &n, 10.0).is_err());
    }

    #[test]
    fn mix_measured_snr_matches_target() {
        let mut rng = stage_rng(23, "mix-snr");
        for trial in 0..100 {
            let n = 500;
            let speech: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            let noise: Vec<f64> = (0..n).map(|_| (rng.random::<f64>() - 0.5) * 0.3).collect();
            let target = rng.random::<f64>() * 25.0;
            let s = MultiChannelWaveform::new(vec![speech.clone()], 8000).unwrap();
            let nn = MultiChannelWaveform::new(vec![noise], 8000).unwrap();
            let out = mix_at_snr(&s, &nn, target).unwrap();
            // Measured SNR: power of the speech vs power of (mix - speech).
            let p_s = s.mean_power();
            let p_res = out
                .channel(0)
                .iter()
                .zip(&speech)
                .map(|(m, s)| (m - s) * (m - s))
                .sum::<f64>()
                / n as f64;
            let measured = 10.0 * (p_s / p_res).log10();
            assert!(
                (measured - target).abs() <= 0.1,
                "trial {trial}: measured {measured} target {target}"
            );
        }
    }
}
