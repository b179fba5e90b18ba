//! Labeled dataset generation. Each utterance is a deterministic sequence of
//! band-limited multi-tone symbols (one class label per frame, class 0 =
//! silence) rendered from a random direction, mixed with filtered noise from
//! a distinct direction at a controlled SNR.
//!
//! Every utterance's randomness derives solely from (seed, index), so
//! parallel generation can never change the output bytes.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{
    mix_at_snr, pad_to_match, render_source, ArrayGeometry, RoomSpec, SourcePlacement,
};
use crate::dsp::{write_wav, MultiChannelWaveform, StftPlan, WavFormat, WindowKind};
use crate::error::{Error, Result};
use crate::rng::indexed_rng;

/// Simulation protocol parameters.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub sample_rate: u32,
    /// Symbol classes; labels run 1..=num_classes with 0 reserved for silence.
    pub num_classes: usize,
    pub duration_s: [f64; 2],
    pub symbol_s: f64,
    pub lead_silence_s: f64,
    pub tail_silence_s: f64,
    pub snr_db: [f64; 2],
    pub elevation_deg: [f64; 2],
    pub distance_m: [f64; 2],
    /// Minimum angular separation between the speech and noise directions.
    pub min_separation_deg: f64,
    pub reflection_order: u8,
    pub room: RoomSpec,
    pub speed_of_sound: f64,
    pub window_s: f64,
    pub hop_s: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            sample_rate: 8_000,
            num_classes: 10,
            duration_s: [1.0, 1.4],
            symbol_s: 0.15,
            lead_silence_s: 0.08,
            tail_silence_s: 0.04,
            snr_db: [0.0, 25.0],
            elevation_deg: [-20.0, 20.0],
            distance_m: [1.0, 4.0],
            min_separation_deg: 30.0,
            reflection_order: 0,
            room: RoomSpec::default(),
            speed_of_sound: super::SPEED_OF_SOUND,
            window_s: 0.025,
            hop_s: 0.010,
        }
    }
}

impl SimConfig {
    /// Total label inventory: the symbol classes plus silence.
    pub fn num_labels(&self) -> usize {
        self.num_classes + 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_classes == 0 {
            return Err(Error::config("sim.num_classes must be >= 1"));
        }
        if self.duration_s[0] > self.duration_s[1] || self.duration_s[0] <= 0.0 {
            return Err(Error::config("sim.duration_s must be a positive range"));
        }
        if self.snr_db[0] > self.snr_db[1] {
            return Err(Error::config("sim.snr_db range is inverted"));
        }
        if self.distance_m[0] > self.distance_m[1] || self.distance_m[0] <= 0.0 {
            return Err(Error::config("sim.distance_m must be a positive range"));
        }
        if self.symbol_s <= 0.0 {
            return Err(Error::config("sim.symbol_s must be positive"));
        }
        if self.reflection_order > 1 {
            return Err(Error::config("sim.reflection_order must be 0 or 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ManifestHeader {
    pub manifest_version: u32,
    pub split: String,
    pub num_labels: usize,
    pub sample_rate: u32,
    pub window_s: f64,
    pub hop_s: f64,
    pub count: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ManifestEntry {
    pub id: String,
    pub mixture: String,
    pub labels: String,
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
    pub distance_m: f64,
    pub noise_azimuth_deg: f64,
    pub noise_elevation_deg: f64,
    pub noise_distance_m: f64,
    pub snr_db: f64,
    pub seed: u64,
}

/// Line-delimited manifest: one header record then one record per utterance.
#[derive(Debug, Clone)]
pub struct DatasetManifest {
    pub header: ManifestHeader,
    pub entries: Vec<ManifestEntry>,
    /// Directory the entry paths are relative to.
    pub dir: PathBuf,
}

impl DatasetManifest {
    pub fn manifest_path(dir: &Path) -> PathBuf {
        dir.join("manifest.jsonl")
    }

    pub fn save(&self) -> Result<PathBuf> {
        let path = Self::manifest_path(&self.dir);
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = BufWriter::new(file);
        let io_err = |e: std::io::Error| Error::io(&path, e);
        let header = serde_json::to_string(&self.header)
            .map_err(|e| Error::Manifest(e.to_string()))?;
        writeln!(w, "{header}").map_err(io_err)?;
        for entry in &self.entries {
            let line =
                serde_json::to_string(entry).map_err(|e| Error::Manifest(e.to_string()))?;
            writeln!(w, "{line}").map_err(io_err)?;
        }
        w.flush().map_err(io_err)?;
        Ok(path)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut lines = BufReader::new(file).lines();
        let header_line = lines
            .next()
            .ok_or_else(|| Error::Manifest(format!("{}: empty manifest", path.display())))?
            .map_err(|e| Error::io(path, e))?;
        let header: ManifestHeader = serde_json::from_str(&header_line)
            .map_err(|e| Error::Manifest(format!("bad header: {e}")))?;
        let mut entries = Vec::with_capacity(header.count);
        for line in lines {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: ManifestEntry = serde_json::from_str(&line)
                .map_err(|e| Error::Manifest(format!("bad entry: {e}")))?;
            entries.push(entry);
        }
        let dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        let manifest = Self { header, entries, dir };
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.len() != self.header.count {
            return Err(Error::Manifest(format!(
                "header count {} but {} entries",
                self.header.count,
                self.entries.len()
            )));
        }
        let mut ids: Vec<&str> = self.entries.iter().map(|e| e.id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != self.entries.len() {
            return Err(Error::Manifest("duplicate utterance ids".into()));
        }
        for entry in &self.entries {
            for rel in [&entry.mixture, &entry.labels] {
                let p = self.dir.join(rel);
                if !p.exists() {
                    return Err(Error::Manifest(format!("missing file {}", p.display())));
                }
            }
        }
        Ok(())
    }

    pub fn mixture_path(&self, entry: &ManifestEntry) -> PathBuf {
        self.dir.join(&entry.mixture)
    }

    pub fn labels_path(&self, entry: &ManifestEntry) -> PathBuf {
        self.dir.join(&entry.labels)
    }
}

/// Read a one-integer-per-frame label file.
pub fn read_labels(path: impl AsRef<Path>) -> Result<Vec<u32>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        out.push(
            t.parse::<u32>()
                .map_err(|e| Error::Manifest(format!("{}: bad label: {e}", path.display())))?,
        );
    }
    Ok(out)
}

fn write_labels(path: &Path, labels: &[u32]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for l in labels {
        writeln!(w, "{l}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Three tone frequencies for a symbol class, log-spaced fundamentals with
/// fixed multipliers, all below 0.45 * sample_rate.
fn class_tones(class: u32, num_classes: usize, sample_rate: u32) -> [f64; 3] {
    let sr = sample_rate as f64;
    let f_lo = 0.05 * sr;
    let f_hi = 0.275 * sr;
    let span = if num_classes > 1 {
        (class - 1) as f64 / (num_classes - 1) as f64
    } else {
        0.0
    };
    let fundamental = f_lo * (f_hi / f_lo).powf(span);
    [fundamental, fundamental * 1.26, fundamental * 1.5]
}

struct UttAudio {
    mixture: MultiChannelWaveform,
    labels: Vec<u32>,
    speech: SourcePlacement,
    noise: SourcePlacement,
    snr_db: f64,
}

fn draw_placement(cfg: &SimConfig, rng: &mut ChaCha8Rng) -> Result<SourcePlacement> {
    let az = rng.random::<f64>() * std::f64::consts::TAU;
    let el_lo = cfg.elevation_deg[0].to_radians();
    let el_hi = cfg.elevation_deg[1].to_radians();
    let el = el_lo + rng.random::<f64>() * (el_hi - el_lo);
    let d = cfg.distance_m[0] + rng.random::<f64>() * (cfg.distance_m[1] - cfg.distance_m[0]);
    SourcePlacement::new(az.min(std::f64::consts::TAU - f64::EPSILON), el, d)
}

fn angular_separation(a: &SourcePlacement, b: &SourcePlacement) -> f64 {
    let ua = a.unit_direction();
    let ub = b.unit_direction();
    let dot = (ua[0] * ub[0] + ua[1] * ub[1] + ua[2] * ub[2]).clamp(-1.0, 1.0);
    dot.acos()
}

fn synth_speech(
    cfg: &SimConfig,
    symbols: &[u32],
    duration_samples: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let sr = cfg.sample_rate as f64;
    let lead = (cfg.lead_silence_s * sr).round() as usize;
    let sym_len = (cfg.symbol_s * sr).round() as usize;
    let ramp = ((0.010 * sr).round() as usize).min(sym_len / 4).max(1);
    let mut out = vec![0.0; duration_samples];
    for (k, &class) in symbols.iter().enumerate() {
        let tones = class_tones(class, cfg.num_classes, cfg.sample_rate);
        let phases: [f64; 3] = [
            rng.random::<f64>() * std::f64::consts::TAU,
            rng.random::<f64>() * std::f64::consts::TAU,
            rng.random::<f64>() * std::f64::consts::TAU,
        ];
        let start = lead + k * sym_len;
        for i in 0..sym_len {
            let n = start + i;
            if n >= duration_samples {
                break;
            }
            let env = if i < ramp {
                0.5 * (1.0 - (std::f64::consts::PI * i as f64 / ramp as f64).cos())
            } else if i + ramp > sym_len {
                let j = sym_len - i;
                0.5 * (1.0 - (std::f64::consts::PI * j as f64 / ramp as f64).cos())
            } else {
                1.0
            };
            let t = n as f64 / sr;
            let mut v = 0.0;
            for (f, ph) in tones.iter().zip(&phases) {
                v += (std::f64::consts::TAU * f * t + ph).sin() / 3.0;
            }
            out[n] = env * v;
        }
    }
    normalize_rms(&mut out, 0.1);
    out
}

fn normalize_rms(samples: &mut [f64], target: f64) {
    let active: Vec<f64> = samples.iter().copied().filter(|v| v.abs() > 1e-12).collect();
    if active.is_empty() {
        return;
    }
    let rms = (active.iter().map(|v| v * v).sum::<f64>() / active.len() as f64).sqrt();
    if rms > 0.0 {
        let g = target / rms;
        for v in samples.iter_mut() {
            *v *= g;
        }
    }
}

/// Gaussian noise band-limited to [0.025, 0.45] * sample_rate via spectral
/// masking.
fn synth_noise(cfg: &SimConfig, duration_samples: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    use num_complex::Complex64;
    let n = duration_samples.next_power_of_two();
    let mut buf: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(crate::rng::normal(rng), 0.0))
        .collect();
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let sr = cfg.sample_rate as f64;
    let lo = 0.025 * sr;
    let hi = 0.45 * sr;
    for (k, v) in buf.iter_mut().enumerate() {
        let f = if k <= n / 2 { k as f64 } else { (n - k) as f64 } * sr / n as f64;
        if f < lo || f > hi {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let mut out: Vec<f64> = buf[..duration_samples]
        .iter()
        .map(|z| z.re / n as f64)
        .collect();
    normalize_rms(&mut out, 0.1);
    out
}

fn label_at(cfg: &SimConfig, symbols: &[u32], source_sample: f64) -> u32 {
    let sr = cfg.sample_rate as f64;
    if source_sample < 0.0 {
        return 0;
    }
    let t = source_sample / sr;
    if t < cfg.lead_silence_s {
        return 0;
    }
    let k = ((t - cfg.lead_silence_s) / cfg.symbol_s).floor() as usize;
    if k < symbols.len() {
        symbols[k]
    } else {
        0
    }
}

fn build_utterance(
    cfg: &SimConfig,
    geom: &ArrayGeometry,
    dataset_seed: u64,
    index: u64,
) -> Result<UttAudio> {
    let mut rng = indexed_rng(dataset_seed, "utterance", index);
    let sr = cfg.sample_rate as f64;

    let dur =
        cfg.duration_s[0] + rng.random::<f64>() * (cfg.duration_s[1] - cfg.duration_s[0]);
    let duration_samples = (dur * sr).round() as usize;

    let speech_place = draw_placement(cfg, &mut rng)?;
    let min_sep = cfg.min_separation_deg.to_radians();
    let mut noise_place = draw_placement(cfg, &mut rng)?;
    for _ in 0..1000 {
        if angular_separation(&speech_place, &noise_place) >= min_sep {
            break;
        }
        noise_place = draw_placement(cfg, &mut rng)?;
    }
    let snr_db = cfg.snr_db[0] + rng.random::<f64>() * (cfg.snr_db[1] - cfg.snr_db[0]);

    let usable = dur - cfg.lead_silence_s - cfg.tail_silence_s;
    let n_symbols = (usable / cfg.symbol_s).floor().max(0.0) as usize;
    let symbols: Vec<u32> = (0..n_symbols)
        .map(|_| rng.random_range(1..=cfg.num_classes as u32))
        .collect();

    let speech_mono = synth_speech(cfg, &symbols, duration_samples, &mut rng);
    let noise_mono = synth_noise(cfg, duration_samples, &mut rng);

    let speech_wave = MultiChannelWaveform::mono(speech_mono, cfg.sample_rate)?;
    let noise_wave = MultiChannelWaveform::mono(noise_mono, cfg.sample_rate)?;

    let speech_r = render_source(
        &speech_wave,
        geom,
        &speech_place,
        cfg.reflection_order,
        &cfg.room,
        cfg.speed_of_sound,
    )?;
    let noise_r = render_source(
        &noise_wave,
        geom,
        &noise_place,
        cfg.reflection_order,
        &cfg.room,
        cfg.speed_of_sound,
    )?;
    let (speech_r, noise_r) = pad_to_match(speech_r, noise_r)?;
    let mixture = mix_at_snr(&speech_r, &noise_r, snr_db)?;

    // Per-frame labels on the mixture timeline, shifted by the bulk
    // propagation delay so symbol boundaries line up with the audio.
    let plan = StftPlan::new(cfg.sample_rate, cfg.window_s, cfg.hop_s, None, WindowKind::Hann)?;
    let frames = plan.num_frames(mixture.len())?;
    let bulk_delay = speech_place.distance / cfg.speed_of_sound * sr;
    let labels: Vec<u32> = (0..frames)
        .map(|t| {
            let center = (t * plan.hop) as f64 + plan.win as f64 / 2.0;
            label_at(cfg, &symbols, center - bulk_delay)
        })
        .collect();

    Ok(UttAudio { mixture, labels, speech: speech_place, noise: noise_place, snr_db })
}

/// Generate `count` labeled utterances under `out_dir` and write the
/// manifest. Fully deterministic given (config, seed); utterances are
/// rendered in parallel but their randomness depends only on (seed, index).
pub fn generate_dataset(
    cfg: &SimConfig,
    geom: &ArrayGeometry,
    split: &str,
    count: usize,
    seed: u64,
    out_dir: impl AsRef<Path>,
) -> Result<DatasetManifest> {
    cfg.validate()?;
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let entries: Vec<ManifestEntry> = (0..count as u64)
        .into_par_iter()
        .map(|i| -> Result<ManifestEntry> {
            let utt = build_utterance(cfg, geom, seed, i)?;
            let id = format!("utt_{i:05}");
            let mixture_rel = format!("{id}.wav");
            let labels_rel = format!("{id}.labels");
            write_wav(out_dir.join(&mixture_rel), &utt.mixture, WavFormat::Float32)?;
            write_labels(&out_dir.join(&labels_rel), &utt.labels)?;
            Ok(ManifestEntry {
                id,
                mixture: mixture_rel,
                labels: labels_rel,
                azimuth_deg: utt.speech.azimuth.to_degrees(),
                elevation_deg: utt.speech.elevation.to_degrees(),
                distance_m: utt.speech.distance,
                noise_azimuth_deg: utt.noise.azimuth.to_degrees(),
                noise_elevation_deg: utt.noise.elevation.to_degrees(),
                noise_distance_m: utt.noise.distance,
                snr_db: utt.snr_db,
                seed,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let manifest = DatasetManifest {
        header: ManifestHeader {
            manifest_version: 1,
            split: split.to_string(),
            num_labels: cfg.num_labels(),
            sample_rate: cfg.sample_rate,
            window_s: cfg.window_s,
            hop_s: cfg.hop_s,
            count,
            seed,
        },
        entries,
        dir: out_dir.to_path_buf(),
    };
    manifest.save()?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_cfg() -> SimConfig {
        SimConfig {
            duration_s: [0.5, 0.7],
            ..SimConfig::default()
        }
    }

    #[test]
    fn empty_dataset_has_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let geom = ArrayGeometry::rectangle_6x7cm();
        let m = generate_dataset(&tiny_cfg(), &geom, "train", 0, 7, dir.path()).unwrap();
        assert!(m.entries.is_empty());
        let files: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(files.len(), 1, "only the manifest should exist");
        let loaded = DatasetManifest::load(DatasetManifest::manifest_path(dir.path())).unwrap();
        assert_eq!(loaded.header.count, 0);
    }

    #[test]
    fn generation_is_byte_deterministic() {
        let geom = ArrayGeometry::rectangle_6x7cm();
        let cfg = tiny_cfg();
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        generate_dataset(&cfg, &geom, "train", 3, 99, d1.path()).unwrap();
        generate_dataset(&cfg, &geom, "train", 3, 99, d2.path()).unwrap();
        let mut names: Vec<String> = fs::read_dir(d1.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        assert_eq!(names.len(), 7);
        for name in names {
            let a = fs::read(d1.path().join(&name)).unwrap();
            let b = fs::read(d2.path().join(&name)).unwrap();
            assert_eq!(a, b, "{name} differs between identically seeded runs");
        }
    }

    #[test]
    fn different_seeds_differ() {
        let geom = ArrayGeometry::rectangle_6x7cm();
        let cfg = tiny_cfg();
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        let m1 = generate_dataset(&cfg, &geom, "train", 2, 1, d1.path()).unwrap();
        let m2 = generate_dataset(&cfg, &geom, "train", 2, 2, d2.path()).unwrap();
        assert_ne!(m1.entries[0].snr_db, m2.entries[0].snr_db);
    }

    #[test]
    fn manifest_scan_properties() {
        let geom = ArrayGeometry::rectangle_6x7cm();
        let cfg = tiny_cfg();
        let dir = tempfile::tempdir().unwrap();
        let m = generate_dataset(&cfg, &geom, "eval", 40, 5, dir.path()).unwrap();
        assert_eq!(m.entries.len(), 40);
        let mut ids: Vec<_> = m.entries.iter().map(|e| e.id.clone()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 40);
        for e in &m.entries {
            assert!(e.snr_db >= 0.0 && e.snr_db <= 25.0);
            assert!(e.distance_m >= 1.0 && e.distance_m <= 4.0);
            // Speech and noise come from distinct directions.
            let sep = {
                let s = SourcePlacement::new(
                    e.azimuth_deg.to_radians(),
                    e.elevation_deg.to_radians(),
                    e.distance_m,
                )
                .unwrap();
                let n = SourcePlacement::new(
                    e.noise_azimuth_deg.to_radians(),
                    e.noise_elevation_deg.to_radians(),
                    e.noise_distance_m,
                )
                .unwrap();
                super::angular_separation(&s, &n).to_degrees()
            };
            assert!(sep >= 30.0 - 1e-9, "separation {sep}");
        }
        // Labels exist, match the frame count of the stored audio, and use
        // the full inventory.
        let entry = &m.entries[0];
        let labels = read_labels(m.labels_path(entry)).unwrap();
        let wave = crate::dsp::read_wav(m.mixture_path(entry)).unwrap();
        let plan =
            StftPlan::new(cfg.sample_rate, cfg.window_s, cfg.hop_s, None, WindowKind::Hann)
                .unwrap();
        assert_eq!(labels.len(), plan.num_frames(wave.len()).unwrap());
        assert!(labels.iter().all(|&l| l < cfg.num_labels() as u32));
        let all: Vec<u32> = m
            .entries
            .iter()
            .flat_map(|e| read_labels(m.labels_path(e)).unwrap())
            .collect();
        assert!(all.iter().any(|&l| l == 0), "some silence frames expected");
        for c in 1..=cfg.num_classes as u32 {
            assert!(all.contains(&c), "class {c} never appears in 40 utterances");
        }
    }

    #[test]
    fn loader_rejects_missing_files() {
        let geom = ArrayGeometry::rectangle_6x7cm();
        let dir = tempfile::tempdir().unwrap();
        let m = generate_dataset(&tiny_cfg(), &geom, "train", 2, 3, dir.path()).unwrap();
        fs::remove_file(m.mixture_path(&m.entries[1])).unwrap();
        assert!(DatasetManifest::load(DatasetManifest::manifest_path(dir.path())).is_err());
    }
}
