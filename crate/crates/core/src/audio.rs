//! Unsigned 8-bit mono PCM output, either headerless (for piping into
//! `aplay` or `/dev/dsp`) or wrapped in a canonical 44-byte WAV header.

use std::fs::File;
use std::io::{self, BufWriter, Stdout, Write};
use std::path::Path;

/// Default output rate in samples per second.
pub const DEFAULT_RATE: u32 = 8000;

/// Largest sample count a WAV file can describe; keeps every RIFF size
/// field, and the file length itself, within 32 bits.
pub const MAX_WAV_SAMPLES: u64 = (1 << 32) - 45;

pub const WAV_HEADER_LEN: usize = 44;

/// A contiguous run of samples starting at counter value `t0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleChunk {
    pub t0: u64,
    pub rate: u32,
    pub data: Vec<u8>,
}

impl SampleChunk {
    pub fn new(t0: u64, data: Vec<u8>) -> Self {
        SampleChunk {
            t0,
            rate: DEFAULT_RATE,
            data,
        }
    }

    pub fn with_rate(mut self, rate: u32) -> Self {
        assert!(rate > 0, "sample rate must be positive");
        self.rate = rate;
        self
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AudioError {
    #[error("write failed after {written} bytes: {source}")]
    Write { written: u64, source: io::Error },
    #[error("{samples} samples exceed the WAV limit of {MAX_WAV_SAMPLES}")]
    TooLong { samples: u64 },
}

/// Where rendered audio goes.
#[derive(Debug)]
pub enum AudioSink {
    File(BufWriter<File>),
    Stdout(Stdout),
    Memory(Vec<u8>),
}

impl AudioSink {
    pub fn create(path: impl AsRef<Path>) -> io::Result<Self> {
        Ok(AudioSink::File(BufWriter::new(File::create(path)?)))
    }

    pub fn stdout() -> Self {
        AudioSink::Stdout(io::stdout())
    }

    pub fn memory() -> Self {
        AudioSink::Memory(Vec::new())
    }

    /// The buffered bytes of a memory sink.
    pub fn bytes(&self) -> Option<&[u8]> {
        match self {
            AudioSink::Memory(buf) => Some(buf),
            _ => None,
        }
    }
}

impl Write for AudioSink {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        match self {
            AudioSink::File(w) => w.write(buf),
            AudioSink::Stdout(w) => w.write(buf),
            AudioSink::Memory(w) => w.write(buf),
        }
    }

    fn flush(&mut self) -> io::Result<()> {
        match self {
            AudioSink::File(w) => w.flush(),
            AudioSink::Stdout(w) => w.flush(),
            AudioSink::Memory(_) => Ok(()),
        }
    }
}

/// Tracks how many bytes reached the sink so failures can report it.
struct Counted<'a, W: Write + ?Sized> {
    inner: &'a mut W,
    written: u64,
}

impl<W: Write + ?Sized> Counted<'_, W> {
    fn put(&mut self, mut buf: &[u8]) -> Result<(), AudioError> {
        while !buf.is_empty() {
            match self.inner.write(buf) {
                Ok(0) => return Err(self.fail(io::ErrorKind::WriteZero.into())),
                Ok(k) => {
                    self.written += k as u64;
                    buf = &buf[k..];
                }
                Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
                Err(e) => return Err(self.fail(e)),
            }
        }
        Ok(())
    }

    fn finish(self) -> Result<u64, AudioError> {
        let written = self.written;
        self.inner
            .flush()
            .map_err(|source| AudioError::Write { written, source })?;
        Ok(written)
    }

    fn fail(&self, source: io::Error) -> AudioError {
        AudioError::Write {
            written: self.written,
            source,
        }
    }
}

/// Writes the samples verbatim, with no header.
pub fn write_raw<W: Write + ?Sized>(chunk: &SampleChunk, sink: &mut W) -> Result<u64, AudioError> {
    let mut out = Counted { inner: sink, written: 0 };
    out.put(&chunk.data)?;
    out.finish()
}

/// The 44-byte RIFF/WAVE header for `samples` bytes of 8-bit mono PCM.
pub fn wav_header(samples: u64, rate: u32) -> Result<[u8; WAV_HEADER_LEN], AudioError> {
    if samples > MAX_WAV_SAMPLES {
        return Err(AudioError::TooLong { samples });
    }
    let n = samples as u32;
    let mut h = [0u8; WAV_HEADER_LEN];
    h[0..4].copy_from_slice(b"RIFF");
    h[4..8].copy_from_slice(&(36 + n).to_le_bytes());
    h[8..12].copy_from_slice(b"WAVE");
    h[12..16].copy_from_slice(b"fmt ");
    h[16..20].copy_from_slice(&16u32.to_le_bytes());
    h[20..22].copy_from_slice(&1u16.to_le_bytes()); // PCM
    h[22..24].copy_from_slice(&1u16.to_le_bytes()); // mono
    h[24..28].copy_from_slice(&rate.to_le_bytes());
    h[28..32].copy_from_slice(&rate.to_le_bytes()); // one byte per frame
    h[32..34].copy_from_slice(&1u16.to_le_bytes());
    h[34..36].copy_from_slice(&8u16.to_le_bytes());
    h[36..40].copy_from_slice(b"data");
    h[40..44].copy_from_slice(&n.to_le_bytes());
    Ok(h)
}

/// Writes a WAV file holding all `chunks` back to back.
pub fn write_wav<W: Write + ?Sized>(chunks: &[SampleChunk], rate: u32, sink: &mut W) -> Result<u64, AudioError> {
    let samples = chunks.iter().map(|c| c.data.len() as u64).sum();
    let header = wav_header(samples, rate)?;
    let mut out = Counted { inner: sink, written: 0 };
    out.put(&header)?;
    for chunk in chunks {
        out.put(&chunk.data)?;
    }
    out.finish()
}
