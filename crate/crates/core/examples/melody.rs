//! The Forty-Two Melody read two ways: from the formula's multiplier
//! series, and from rendered audio with the pitch tracker.

use bytebeat::analysis::{estimate_pitch_with, note_name, sawtooth_freq, series, PitchConfig, PitchReference};
use bytebeat::expr::parse;
use bytebeat::semantics::{render_range, Program, SemanticsMode, Value};

fn name(f: f64, reference: PitchReference) -> String {
    note_name(f, reference).map_or("-".into(), |n| format!("{n} {:+}c", n.cents))
}

fn main() {
    let multipliers = series(&parse("42&t>>10").unwrap(), SemanticsMode::C32, 1024, 32).unwrap();
    let program = Program::from_source("t*(42&t>>10)", SemanticsMode::C32).unwrap();
    let audio = render_range(&program, 0, 32 * 1024);
    let config = PitchConfig {
        window_len: 1024,
        reference: PitchReference::C256,
        ..PitchConfig::default()
    };
    let events = estimate_pitch_with(&audio, &config);

    println!("{:>4} {:>4} {:>9} {:>12} {:>12} {:>10}", "note", "v", "Hz", "C4=256", "A4=440", "tracked");
    for (k, (v, event)) in multipliers.iter().zip(&events).enumerate() {
        let Value::Int(v) = *v else { unreachable!() };
        let f = sawtooth_freq(v, 8000);
        let tracked = event.freq.map_or("-".into(), |f| format!("{f:.1}"));
        println!(
            "{k:>4} {v:>4} {f:>9.2} {:>12} {:>12} {tracked:>10}",
            name(f, PitchReference::C256),
            name(f, PitchReference::A440)
        );
    }
}
