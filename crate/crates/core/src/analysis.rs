//! Musical analysis of one-liners: the per-bit square-wave decomposition
//! of the output, pitch-multiplier series, note naming, aliasing and
//! autocorrelation pitch tracking.

use std::fmt;
use std::io::{self, Write};

use serde::Serialize;

use crate::audio::SampleChunk;
use crate::expr::Expr;
use crate::semantics::{eval_ast, eval_sample, typecheck, Program, SemanticsMode, TypeError, Value};

/// The eight bit planes of a rendered range: `bits[k][i]` is bit `k` of
/// the sample at `t0 + i`. Each plane is a square wave and the sample is
/// their weighted sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitComponents {
    pub t0: u64,
    pub bits: [Vec<u8>; 8],
}

impl BitComponents {
    pub fn len(&self) -> usize {
        self.bits[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits[0].is_empty()
    }

    /// Σ 2^k · bit k at index `i`.
    pub fn reconstruct(&self, i: usize) -> u8 {
        (0..8).map(|k| self.bits[k][i] << k).sum()
    }
}

pub fn bit_components(p: &Program, t0: u64, n: usize) -> BitComponents {
    let mut samples = vec![0u8; n];
    p.render_into(t0, &mut samples);
    let bits = std::array::from_fn(|k| samples.iter().map(|s| (s >> k) & 1).collect());
    BitComponents { t0, bits }
}

/// Activity of one bit plane over one window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandActivity {
    /// Fraction of samples with the bit set.
    pub duty: f64,
    /// Adjacent samples that differ.
    pub toggles: usize,
}

impl BandActivity {
    /// Whether the square wave is audible: a constant bit is only DC.
    pub fn sounding(&self) -> bool {
        self.toggles > 0
    }
}

/// Splits a bit sequence into windows of `window_len` (the last window
/// may be shorter) and measures each.
pub fn band_activity(bits: &[u8], window_len: usize) -> Vec<BandActivity> {
    assert!(window_len >= 2, "window_len must be at least 2");
    bits.chunks(window_len)
        .map(|w| BandActivity {
            duty: w.iter().map(|&b| b as f64).sum::<f64>() / w.len() as f64,
            toggles: w.windows(2).filter(|p| p[0] != p[1]).count(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BitBandMatrix {
    pub t0: u64,
    pub window_len: usize,
    /// One row per bit, least significant first.
    pub rows: [Vec<BandActivity>; 8],
}

impl BitBandMatrix {
    pub fn compute(p: &Program, t0: u64, n: usize, window_len: usize) -> Self {
        let components = bit_components(p, t0, n);
        BitBandMatrix {
            t0,
            window_len,
            rows: std::array::from_fn(|k| band_activity(&components.bits[k], window_len)),
        }
    }
}

/// Samples `e` at `0, stride, 2·stride, …`: the values a pitch-multiplier
/// subexpression takes at successive note boundaries.
pub fn series(e: &Expr, mode: SemanticsMode, stride: u64, count: usize) -> Result<Vec<Value>, TypeError> {
    typecheck(e, mode)?;
    Ok((0..count as u64)
        .map(|k| eval_ast(e, k.wrapping_mul(stride), mode))
        .collect())
}

/// Frequency of the byte sawtooth `t*v`: it wraps `|v| mod 256` times
/// every 256 samples. A multiple of 256 never leaves one value (0 Hz).
pub fn sawtooth_freq(v: i64, rate: u32) -> f64 {
    (v.unsigned_abs() % 256) as f64 * rate as f64 / 256.0
}

/// The frequency heard when `f` is sampled at `rate`, in `[0, rate/2]`.
pub fn alias_fold(f: f64, rate: u32) -> f64 {
    let rate = rate as f64;
    let folded = f.rem_euclid(rate);
    if folded > rate / 2.0 {
        rate - folded
    } else {
        folded
    }
}

/// Tuning of the equal-tempered note grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PitchReference {
    /// A4 = 440 Hz.
    #[default]
    A440,
    /// C4 = 256 Hz ("scientific" pitch).
    C256,
}

impl PitchReference {
    /// MIDI-style note number and frequency of the anchor note.
    fn anchor(self) -> (f64, f64) {
        match self {
            PitchReference::A440 => (69.0, 440.0),
            PitchReference::C256 => (60.0, 256.0),
        }
    }
}

impl std::str::FromStr for PitchReference {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "a440" => Ok(PitchReference::A440),
            "c256" => Ok(PitchReference::C256),
            other => Err(format!("unknown pitch reference '{other}' (expected a440 or c256)")),
        }
    }
}

const NOTE_NAMES: [&str; 12] = ["C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NoteName {
    /// Letter and accidental, such as `"C#"`.
    #[serde(rename = "note")]
    pub name: &'static str,
    pub octave: i32,
    /// Offset from the named note, in `[-50, 50)`.
    pub cents: i32,
}

impl fmt::Display for NoteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.name, self.octave)
    }
}

/// Nearest equal-tempered note to `f`, or `None` for non-positive input.
pub fn note_name(f: f64, reference: PitchReference) -> Option<NoteName> {
    if f <= 0.0 || !f.is_finite() {
        return None;
    }
    let (anchor_note, anchor_freq) = reference.anchor();
    let semitones = anchor_note + 12.0 * (f / anchor_freq).log2();
    let mut note = (semitones + 0.5).floor();
    let mut cents = ((semitones - note) * 100.0).round() as i32;
    if cents >= 50 {
        note += 1.0;
        cents -= 100;
    }
    let note = note as i64;
    Some(NoteName {
        name: NOTE_NAMES[note.rem_euclid(12) as usize],
        octave: (note.div_euclid(12) - 1) as i32,
        cents,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchConfig {
    pub window_len: usize,
    /// Minimum normalized autocorrelation for a window to count as pitched.
    pub threshold: f64,
    pub min_lag: usize,
    /// Lowest detectable frequency; bounds the largest lag searched.
    pub min_freq: f64,
    /// Correlation a sub-multiple of the detected period needs before the
    /// detector reports the higher frequency.
    pub sub_peak_threshold: f64,
    pub reference: PitchReference,
}

impl Default for PitchConfig {
    fn default() -> Self {
        PitchConfig {
            window_len: 1024,
            threshold: 0.8,
            min_lag: 2,
            min_freq: 20.0,
            sub_peak_threshold: 0.3,
            reference: PitchReference::A440,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoteEvent {
    pub t_start: u64,
    pub t_len: usize,
    pub freq: Option<f64>,
    /// Serialized inline as `note`, `octave` and `cents`, absent without a pitch.
    #[serde(flatten)]
    pub note: Option<NoteName>,
}

/// Pitch track with default settings and the given window length.
pub fn estimate_pitch(samples: &SampleChunk, window_len: usize) -> Vec<NoteEvent> {
    estimate_pitch_with(
        samples,
        &PitchConfig {
            window_len,
            ..PitchConfig::default()
        },
    )
}

/// One [`NoteEvent`] per full window of `samples`.
pub fn estimate_pitch_with(samples: &SampleChunk, config: &PitchConfig) -> Vec<NoteEvent> {
    assert!(config.window_len >= 128, "window_len must be at least 128");
    let rate = samples.rate as f64;
    samples
        .data
        .chunks_exact(config.window_len)
        .enumerate()
        .map(|(i, window)| {
            let freq = window_pitch(window, rate, config);
            NoteEvent {
                t_start: samples.t0 + (i * config.window_len) as u64,
                t_len: config.window_len,
                freq,
                note: freq.and_then(|f| note_name(f, config.reference)),
            }
        })
        .collect()
}

/// Normalized autocorrelation of `x` at lags `0..=max_lag`, each lag
/// normalized by the energy of its two overlapping segments.
fn autocorrelation(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len();
    let mut energy = vec![0.0; n + 1];
    for (i, v) in x.iter().enumerate() {
        energy[i + 1] = energy[i] + v * v;
    }
    (0..=max_lag)
        .map(|lag| {
            let dot: f64 = x[..n - lag].iter().zip(&x[lag..]).map(|(a, b)| a * b).sum();
            let head = energy[n - lag];
            let tail = energy[n] - energy[lag];
            let norm = (head * tail).sqrt();
            if norm > 0.0 {
                dot / norm
            } else {
                0.0
            }
        })
        .collect()
}

fn window_pitch(window: &[u8], rate: f64, config: &PitchConfig) -> Option<f64> {
    let mean = window.iter().map(|&s| s as f64).sum::<f64>() / window.len() as f64;
    let x: Vec<f64> = window.iter().map(|&s| s as f64 - mean).collect();
    if x.iter().all(|&v| v == 0.0) {
        return None;
    }
    let max_lag = ((rate / config.min_freq) as usize).min(x.len() - 2);
    if max_lag <= config.min_lag {
        return None;
    }
    let r = autocorrelation(&x, max_lag + 1);
    let is_peak = |l: usize| l >= 1 && l <= max_lag && r[l] > r[l - 1] && r[l] >= r[l + 1];

    let lag = (config.min_lag.max(1)..=max_lag).find(|&l| r[l] >= config.threshold && is_peak(l))?;
    let (a, b, c) = (r[lag - 1], r[lag], r[lag + 1]);
    let curvature = a - 2.0 * b + c;
    let period = if curvature != 0.0 {
        lag as f64 + 0.5 * (a - c) / curvature
    } else {
        lag as f64
    };

    // A short period that is not a whole number of samples never lines up
    // with itself at an integer lag, so the first strong peak can land on
    // a multiple of it. Mean-crossings per period reveal how many cycles
    // the peak spans; accept that count when the correlation also peaks
    // near every sub-multiple.
    let crossings = x.windows(2).filter(|w| w[0] < 0.0 && w[1] >= 0.0).count();
    let cycles_estimate = crossings as f64 * period / x.len() as f64;
    let cycles = cycles_estimate.round();
    if cycles >= 2.0 && (cycles_estimate - cycles).abs() <= 0.2 {
        let cycles = cycles as usize;
        let supported = (1..cycles).all(|j| {
            let at = j as f64 * period / cycles as f64;
            [at.floor() as usize, at.ceil() as usize]
                .into_iter()
                .any(|l| is_peak(l) && r[l] >= config.sub_peak_threshold)
        });
        if supported {
            return Some(rate * cycles as f64 / period);
        }
    }
    Some(rate / period)
}

/// Amplitude plot of a rendered range: one column per sample, 256 rows,
/// a single white pixel per column at height equal to the sample value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bitmap {
    samples: Vec<u8>,
}

impl Bitmap {
    pub const HEIGHT: usize = 256;

    pub fn width(&self) -> usize {
        self.samples.len()
    }

    /// Whether pixel `(x, y)` is lit; `y = 0` is the top row.
    pub fn pixel(&self, x: usize, y: usize) -> bool {
        y < Self::HEIGHT && self.samples.get(x).is_some_and(|&s| y == 255 - s as usize)
    }

    /// Binary PPM (P6), white on black.
    pub fn write_ppm<W: Write + ?Sized>(&self, sink: &mut W) -> io::Result<()> {
        write!(sink, "P6\n{} {}\n255\n", self.width(), Self::HEIGHT)?;
        let mut row = vec![0u8; self.width() * 3];
        for y in 0..Self::HEIGHT {
            row.fill(0);
            for (x, &s) in self.samples.iter().enumerate() {
                if y == 255 - s as usize {
                    row[3 * x..3 * x + 3].fill(255);
                }
            }
            sink.write_all(&row)?;
        }
        sink.flush()
    }
}

pub fn render_bitmap(p: &Program, t0: u64, n: usize) -> Bitmap {
    assert!(n >= 1, "bitmap needs at least one column");
    Bitmap {
        samples: (0..n as u64).map(|i| eval_sample(p, t0.wrapping_add(i))).collect(),
    }
}
