//! Minimal RIFF/WAVE reader and writer: PCM 16-bit little-endian and IEEE
//! float 32, multi-channel interleaved. Samples are normalized to ±1.0 on
//! read; the writer emits the same two formats.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::dsp::MultiChannelWaveform;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavFormat {
    Pcm16,
    Float32,
}

const FORMAT_PCM: u16 = 1;
const FORMAT_FLOAT: u16 = 3;

pub fn read_wav(path: impl AsRef<Path>) -> Result<MultiChannelWaveform> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let io_err = |e: std::io::Error| Error::io(path, e);
    let bad = |msg: &str| Error::invalid(format!("{}: {msg}", path.display()));

    let mut tag = [0u8; 4];
    r.read_exact(&mut tag).map_err(io_err)?;
    if &tag != b"RIFF" {
        return Err(bad("not a RIFF file"));
    }
    r.read_u32::<LittleEndian>().map_err(io_err)?;
    r.read_exact(&mut tag).map_err(io_err)?;
    if &tag != b"WAVE" {
        return Err(bad("not a WAVE file"));
    }

    let mut format = None;
    let mut channels = 0u16;
    let mut sample_rate = 0u32;
    let mut bits = 0u16;
    let mut data: Option<Vec<u8>> = None;

    while r.read_exact(&mut tag).is_ok() {
        let size = r.read_u32::<LittleEndian>().map_err(io_err)?;
        match &tag {
            b"fmt " => {
                let fmt_code = r.read_u16::<LittleEndian>().map_err(io_err)?;
                channels = r.read_u16::<LittleEndian>().map_err(io_err)?;
                sample_rate = r.read_u32::<LittleEndian>().map_err(io_err)?;
                r.read_u32::<LittleEndian>().map_err(io_err)?; // byte rate
                r.read_u16::<LittleEndian>().map_err(io_err)?; // block align
                bits = r.read_u16::<LittleEndian>().map_err(io_err)?;
                if size > 16 {
                    r.seek(SeekFrom::Current((size - 16) as i64)).map_err(io_err)?;
                }
                format = Some(match (fmt_code, bits) {
                    (FORMAT_PCM, 16) => WavFormat::Pcm16,
                    (FORMAT_FLOAT, 32) => WavFormat::Float32,
                    _ => {
                        return Err(bad(&format!(
                            "unsupported format code {fmt_code} with {bits} bits"
                        )))
                    }
                });
            }
            b"data" => {
                let mut buf = vec![0u8; size as usize];
                r.read_exact(&mut buf).map_err(io_err)?;
                data = Some(buf);
            }
            _ => {
                // Skip unknown chunk, honoring RIFF word alignment.
                let skip = size + (size & 1);
                r.seek(SeekFrom::Current(skip as i64)).map_err(io_err)?;
            }
        }
        if format.is_some() && data.is_some() {
            break;
        }
    }

    let format = format.ok_or_else(|| bad("missing fmt chunk"))?;
    let data = data.ok_or_else(|| bad("missing data chunk"))?;
    if channels == 0 {
        return Err(bad("zero channels"));
    }
    let m = channels as usize;
    let bytes_per = (bits / 8) as usize;
    let total = data.len() / (bytes_per * m);
    let mut out = vec![Vec::with_capacity(total); m];
    let mut cursor = &data[..];
    match format {
        WavFormat::Pcm16 => {
            for _ in 0..total {
                for ch in out.iter_mut() {
                    let v = cursor.read_i16::<LittleEndian>().map_err(io_err)?;
                    ch.push(v as f64 / 32768.0);
                }
            }
        }
        WavFormat::Float32 => {
            for _ in 0..total {
                for ch in out.iter_mut() {
                    let v = cursor.read_f32::<LittleEndian>().map_err(io_err)?;
                    ch.push(v as f64);
                }
            }
        }
    }
    MultiChannelWaveform::new(out, sample_rate)
}

pub fn write_wav(
    path: impl AsRef<Path>,
    wave: &MultiChannelWaveform,
    format: WavFormat,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e: std::io::Error| Error::io(path, e);

    let m = wave.num_channels();
    let n = wave.len();
    let (fmt_code, bits): (u16, u16) = match format {
        WavFormat::Pcm16 => (FORMAT_PCM, 16),
        WavFormat::Float32 => (FORMAT_FLOAT, 32),
    };
    let bytes_per = (bits / 8) as u32;
    let data_len = (n * m) as u32 * bytes_per;
    let byte_rate = wave.sample_rate() * m as u32 * bytes_per;
    let block_align = m as u16 * bytes_per as u16;

    w.write_all(b"RIFF").map_err(io_err)?;
    w.write_u32::<LittleEndian>(36 + data_len).map_err(io_err)?;
    w.write_all(b"WAVE").map_err(io_err)?;
    w.write_all(b"fmt ").map_err(io_err)?;
    w.write_u32::<LittleEndian>(16).map_err(io_err)?;
    w.write_u16::<LittleEndian>(fmt_code).map_err(io_err)?;
    w.write_u16::<LittleEndian>(m as u16).map_err(io_err)?;
    w.write_u32::<LittleEndian>(wave.sample_rate()).map_err(io_err)?;
    w.write_u32::<LittleEndian>(byte_rate).map_err(io_err)?;
    w.write_u16::<LittleEndian>(block_align).map_err(io_err)?;
    w.write_u16::<LittleEndian>(bits).map_err(io_err)?;
    w.write_all(b"data").map_err(io_err)?;
    w.write_u32::<LittleEndian>(data_len).map_err(io_err)?;

    for i in 0..n {
        for ch in wave.channels() {
            match format {
                WavFormat::Pcm16 => {
                    let v = (ch[i] * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
                    w.write_i16::<LittleEndian>(v).map_err(io_err)?;
                }
                WavFormat::Float32 => {
                    w.write_f32::<LittleEndian>(ch[i] as f32).map_err(io_err)?;
                }
            }
        }
    }
    w.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float32_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.wav");
        let wave = MultiChannelWaveform::new(
            vec![vec![0.0, 0.5, -0.25, 1.0], vec![0.1, -0.1, 0.2, -0.9]],
            16_000,
        )
        .unwrap();
        write_wav(&path, &wave, WavFormat::Float32).unwrap();
        let back = read_wav(&path).unwrap();
        assert_eq!(back.num_channels(), 2);
        assert_eq!(back.sample_rate(), 16_000);
        for m in 0..2 {
            for (a, b) in wave.channel(m).iter().zip(back.channel(m)) {
                assert!((a - b).abs() < 1e-7, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn pcm16_round_trip_quantized() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.wav");
        let wave =
            MultiChannelWaveform::mono(vec![0.0, 0.25, -0.25, 0.999, -1.0], 8_000).unwrap();
        write_wav(&path, &wave, WavFormat::Pcm16).unwrap();
        let back = read_wav(&path).unwrap();
        for (a, b) in wave.channel(0).iter().zip(back.channel(0)) {
            assert!((a - b).abs() < 1e-4, "{a} vs {b}");
        }
    }
}
