use std::io::Cursor;
use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use super::AudioClip;
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;

/// Largest sample written to 16-bit PCM: `1 - 2^-15`.
const MAX_PCM16: f64 = 1.0 - 1.0 / 32768.0;

/// Reads a PCM (8/16/24/32-bit) or 32-bit float WAV, averaging channels to mono.
pub fn load_wav(path: impl AsRef<Path>) -> Result<AudioClip> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    check_encoding(&std::fs::read(path)?)?;
    let reader = WavReader::open(path).map_err(map_hound)?;
    read_clip(reader)
}

const TAG_PCM: u16 = 1;
const TAG_FLOAT: u16 = 3;
const TAG_EXTENSIBLE: u16 = 0xFFFE;

/// Walks the RIFF chunks up to `fmt ` and rejects encodings we do not decode.
fn check_encoding(bytes: &[u8]) -> Result<()> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(Error::MalformedWav("missing RIFF/WAVE header".into()));
    }
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let len = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().unwrap()) as usize;
        let body = pos + 8;
        if id == b"fmt " {
            if len < 16 || body + 16 > bytes.len() {
                return Err(Error::MalformedWav("short fmt chunk".into()));
            }
            let mut tag = u16::from_le_bytes([bytes[body], bytes[body + 1]]);
            let bits = u16::from_le_bytes([bytes[body + 14], bytes[body + 15]]);
            if tag == TAG_EXTENSIBLE && len >= 40 && body + 26 <= bytes.len() {
                // first two bytes of the subformat GUID carry the real tag
                tag = u16::from_le_bytes([bytes[body + 24], bytes[body + 25]]);
            }
            return match (tag, bits) {
                (TAG_PCM, 8 | 16 | 24 | 32) | (TAG_FLOAT, 32) => Ok(()),
                (TAG_PCM, b) => Err(Error::UnsupportedCodec(format!("{b}-bit PCM"))),
                (TAG_FLOAT, b) => Err(Error::UnsupportedCodec(format!("{b}-bit float"))),
                (t, _) => Err(Error::UnsupportedCodec(format!("format tag {t:#06x}"))),
            };
        }
        pos = body + len + (len & 1);
    }
    Err(Error::MalformedWav("no fmt chunk".into()))
}

fn read_clip<R: std::io::Read>(reader: WavReader<R>) -> Result<AudioClip> {
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if channels == 0 {
        return Err(Error::MalformedWav("zero channels".into()));
    }
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, bits @ (8 | 16 | 24 | 32)) => {
            let scale = 1.0 / (1u64 << (bits - 1)) as f64;
            reader
                .into_samples::<i32>()
                .map(|s| s.map(|v| v as f64 * scale))
                .collect::<std::result::Result<_, _>>()
                .map_err(map_hound)?
        }
        (SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(map_hound)?,
        (fmt, bits) => {
            return Err(Error::UnsupportedCodec(format!("{fmt:?} with {bits} bits")));
        }
    };
    if interleaved.is_empty() {
        return Err(Error::EmptyClip);
    }
    let mono = if channels == 1 {
        interleaved
    } else {
        interleaved
            .chunks(channels)
            .map(|frame| frame.iter().sum::<f64>() / channels as f64)
            .collect()
    };
    AudioClip::new(mono, spec.sample_rate)
}

fn map_hound(err: hound::Error) -> Error {
    match err {
        hound::Error::IoError(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => {
            Error::MalformedWav("truncated file".into())
        }
        hound::Error::IoError(e) => Error::Io(e),
        hound::Error::FormatError(msg) => Error::MalformedWav(msg.to_string()),
        hound::Error::Unsupported => Error::UnsupportedCodec("format not supported".into()),
        hound::Error::TooWide | hound::Error::InvalidSampleFormat => {
            Error::UnsupportedCodec(err.to_string())
        }
        other => Error::MalformedWav(other.to_string()),
    }
}

/// Quantizes one sample to a signed 16-bit code.
pub(crate) fn pcm16_code(v: f64) -> i16 {
    (v.clamp(-1.0, MAX_PCM16) * 32768.0).round() as i16
}

/// Encodes a clip as 16-bit PCM mono WAV bytes.
pub(crate) fn encode_wav(clip: &AudioClip) -> Result<Vec<u8>> {
    let spec = WavSpec {
        channels: 1,
        sample_rate: clip.sample_rate(),
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    };
    let mut buf = Cursor::new(Vec::with_capacity(44 + 2 * clip.len()));
    {
        let mut writer = WavWriter::new(&mut buf, spec).map_err(map_hound)?;
        let mut w16 = writer.get_i16_writer(clip.len() as u32);
        for &v in clip.samples() {
            w16.write_sample(pcm16_code(v));
        }
        w16.flush().map_err(map_hound)?;
        writer.finalize().map_err(map_hound)?;
    }
    Ok(buf.into_inner())
}

/// Writes a 16-bit PCM mono WAV (samples clamped to `[-1, 1 - 2^-15]`).
pub fn save_wav(clip: &AudioClip, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), &encode_wav(clip)?)
}
