//! A Sierpinski harmony as eight square waves: per-bit activity over
//! time and an amplitude plot.
//!
//!     cargo run --example bit_bands -- "t&96&t>>8" plot.ppm

use bytebeat::analysis::{render_bitmap, BitBandMatrix};
use bytebeat::audio::AudioSink;
use bytebeat::semantics::{Program, SemanticsMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let src = args.next().unwrap_or_else(|| "t&t>>8".into());
    let plot = args.next();
    let program = Program::from_source(&src, SemanticsMode::C32)?;

    let window = 4096;
    let matrix = BitBandMatrix::compute(&program, 0, 16 * window, window);
    println!("{src}: bit bands, one column per {window} samples ('#' sounding, '.' constant)");
    for (k, row) in matrix.rows.iter().enumerate().rev() {
        let cells: String = row.iter().map(|a| if a.sounding() { '#' } else { '.' }).collect();
        println!("  bit {k}  {cells}");
    }

    if let Some(path) = plot {
        render_bitmap(&program, 0, 1 << 16).write_ppm(&mut AudioSink::create(&path)?)?;
        println!("wrote {path}");
    }
    Ok(())
}
