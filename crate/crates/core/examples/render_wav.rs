//! Render an expression to a WAV file, or raw bytes for `aplay`.
//!
//!     cargo run --example render_wav -- "t*(42&t>>10)" fortytwo.wav
//!     cargo run --example render_wav -- "t&t>>8" - | aplay

use std::io::stdout;

use bytebeat::audio::{write_raw, write_wav, AudioSink, DEFAULT_RATE};
use bytebeat::semantics::{render_range, Program, SemanticsMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let src = args.next().unwrap_or_else(|| "t*(42&t>>10)".into());
    let path = args.next().unwrap_or_else(|| "out.wav".into());
    let program = Program::from_source(&src, SemanticsMode::C32)?;

    // thirty seconds, rendered in one-second chunks
    let chunks: Vec<_> = (0..30)
        .map(|s| render_range(&program, s * DEFAULT_RATE as u64, DEFAULT_RATE as usize))
        .collect();

    if path == "-" {
        let mut out = stdout().lock();
        for chunk in &chunks {
            write_raw(chunk, &mut out)?;
        }
    } else {
        let bytes = write_wav(&chunks, DEFAULT_RATE, &mut AudioSink::create(&path)?)?;
        eprintln!("wrote {bytes} bytes to {path}");
    }
    Ok(())
}
