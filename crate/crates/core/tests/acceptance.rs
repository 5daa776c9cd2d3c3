//! One pass/fail line per acceptance criterion. Runs as its own test
//! binary (`cargo test --test acceptance`) and exits non-zero if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bytebeat::analysis::{bit_components, estimate_pitch, note_name, sawtooth_freq, series, PitchReference};
use bytebeat::audio::write_wav;
use bytebeat::corpus::{find, verbatim};
use bytebeat::expr::{format, parse, BinaryOp, Expr};
use bytebeat::semantics::{eval_ast, eval_sample, render_range, Program, SemanticsMode, Value};
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn program(src: &str, mode: SemanticsMode) -> Program {
    Program::from_source(src, mode).unwrap_or_else(|e| panic!("{src} in {mode}: {e}"))
}

fn precedence() -> Outcome {
    use BinaryOp::*;
    let t = Expr::t;
    let int = Expr::int;
    let b = Expr::binary;
    let expected = b(
        Or,
        b(And, b(Mul, t(), int(5)), b(Shr, t(), int(7))),
        b(And, b(Mul, t(), int(3)), b(Shr, t(), int(8))),
    );
    let parsed = parse("t*5&t>>7|t*3&t>>8").map_err(|e| e.to_string())?;
    check(parsed == expected, "t*5&t>>7|t*3&t>>8 has the wrong shape")?;
    let mut count = 0;
    for p in verbatim() {
        let e = parse(p.source).map_err(|err| format!("{}: {err}", p.id))?;
        let again = parse(&format(&e)).map_err(|err| format!("{} reformatted: {err}", p.id))?;
        check(again == e, format!("{} changes under format/parse", p.id))?;
        count += 1;
    }
    Ok(format!("lullaby shape exact; {count} verbatim presets round-trip"))
}

fn output_convention() -> Outcome {
    for mode in SemanticsMode::ALL {
        let p = program("t", mode);
        for t in 0..4096u64 {
            check(eval_sample(&p, t) as u64 == t % 256, format!("t={t} in {mode}"))?;
        }
    }
    Ok("t mod 256 for t < 4096 in c32, c64 and js".into())
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let jobs: Vec<_> = verbatim().flat_map(|p| p.modes.iter().map(move |&m| (p, m))).collect();
    let failures: Vec<String> = jobs
        .par_iter()
        .flat_map_iter(|&(preset, mode)| {
            let ast = parse(preset.source).unwrap();
            let p = program(preset.source, mode);
            (0..16u64).map(move |block| {
                let t0 = block << 16;
                let vm = render_range(&p, t0, 1 << 16).data;
                (0..1u64 << 16)
                    .find(|&i| eval_ast(&ast, t0 + i, mode).quantize() != vm[i as usize])
                    .map(|i| format!("{} in {mode} at t={}", preset.id, t0 + i))
            })
        })
        .flatten()
        .collect();
    let elapsed = start.elapsed();
    check(failures.is_empty(), format!("mismatches: {}", failures.join(", ")))?;
    check(elapsed < Duration::from_secs(300), format!("took {elapsed:?}"))?;
    Ok(format!("{} preset/mode pairs x 2^20 samples identical in {:.1?}", jobs.len(), elapsed))
}

fn xor_table() -> Outcome {
    let expected = [-2, 2, 6, 2, 3, 2, 6, 2, 8, 2, 6, 2, 3, 2, 6, 2].map(Value::Int);
    // f(i) = (i^(i-2))%11 at i = 0, 2, ..., 30
    let values = series(&parse("(t^t-2)%11").unwrap(), SemanticsMode::C32, 2, 16).map_err(|e| e.to_string())?;
    check(values == expected, format!("got {values:?}"))?;
    // the same rows from a >>9 counter sampled at >>10 boundaries
    let counter = series(&parse("((t>>9)^((t>>9)-2))%11").unwrap(), SemanticsMode::C32, 1024, 16)
        .map_err(|e| e.to_string())?;
    check(counter == expected, format!("counter form gives {counter:?}"))?;
    Ok("16 rows match at even indices (a >>9 counter read every 1024 samples)".into())
}

const NOTES: [&str; 12] = ["C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"];

fn semitone(name: &str, octave: i32) -> i32 {
    octave * 12 + NOTES.iter().position(|&n| n == name).unwrap() as i32
}

fn note_naming() -> Outcome {
    let cases = [(2, "C", 2), (3, "G", 2), (6, "G", 3), (8, "C", 4)];
    let mut a440 = Vec::new();
    for (v, name, octave) in cases {
        let f = sawtooth_freq(v, 8000);
        let n = note_name(f, PitchReference::C256).ok_or("no note")?;
        check((n.name, n.octave) == (name, octave), format!("v={v}: {n} under c256, expected {name}{octave}"))?;
        let a = note_name(f, PitchReference::A440).ok_or("no note")?;
        let off = semitone(a.name, a.octave) - semitone(name, octave);
        check(off.abs() <= 1, format!("v={v}: {a} under a440 is {off} semitones away"))?;
        a440.push(a.to_string());
    }
    Ok(format!("C2 G2 G3 C4 under c256; {} under a440", a440.join(" ")))
}

fn forty_two_series() -> Outcome {
    let values = series(&parse("42&t>>10").unwrap(), SemanticsMode::C32, 1024, 17).map_err(|e| e.to_string())?;
    // 42&16 is 0 (0b101010 has bit 4 clear); 32 first appears at k = 32
    let expected = [0, 0, 2, 2, 0, 0, 2, 2, 8, 8, 10, 10, 8, 8, 10, 10, 0].map(Value::Int);
    check(values == expected, format!("got {values:?}"))?;
    let brute: Vec<Value> = (0..17).map(|k| Value::Int(42 & k)).collect();
    check(values == brute, "differs from 42&k")?;
    let at_32 = series(&parse("42&t>>10").unwrap(), SemanticsMode::C32, 1024, 33).map_err(|e| e.to_string())?;
    check(at_32[32] == Value::Int(32), format!("k=32 gives {:?}", at_32[32]))?;
    Ok("17 values equal 42&k; 32 appears at k=32".into())
}

fn sierpinski_bits() -> Outcome {
    let p = program("t&t>>8", SemanticsMode::C32);
    let c = bit_components(&p, 0, 1 << 16);
    for t in 0..1usize << 16 {
        for k in 0..8 {
            let expected = ((t >> k) & (t >> (k + 8)) & 1) as u8;
            check(c.bits[k][t] == expected, format!("bit {k} at t={t}"))?;
        }
        check(c.reconstruct(t) == eval_sample(&p, t as u64), format!("reconstruction at t={t}"))?;
    }
    Ok("bit identity and reconstruction hold for t < 2^16".into())
}

fn wrap_percussion() -> Outcome {
    let base = program("t*9&t>>4|t*5&t>>7|t*3&t>>10", SemanticsMode::C32);
    let wrapped = program(find("percussion").unwrap().source, SemanticsMode::C32);
    let mut zeros = 0;
    for t in 0..1u64 << 16 {
        if base.eval(t) == Value::Int(0) {
            zeros += 1;
            check(eval_sample(&wrapped, t) == 255, format!("t={t}"))?;
        }
    }
    check(zeros > 0, "base expression never reaches 0")?;
    Ok(format!("all {zeros} zero samples become 255"))
}

fn totalized_division() -> Outcome {
    let mut notes = Vec::new();
    for id in ["division", "cast-wrap"] {
        let src = find(id).unwrap().source;
        let c32 = catch_unwind(|| render_range(&program(src, SemanticsMode::C32), 0, 1 << 16))
            .map_err(|_| format!("{id} trapped in c32"))?;
        let js = catch_unwind(|| render_range(&program(src, SemanticsMode::Js), 0, 1 << 16))
            .map_err(|_| format!("{id} trapped in js"))?;
        // a divergence is explained when 64-bit integers agree with js,
        // i.e. it comes from 32-bit wrap-around
        let c64 = render_range(&program(src, SemanticsMode::C64), 0, 1 << 16);
        let divergent: Vec<usize> = (0..1 << 16).filter(|&i| c32.data[i] != js.data[i]).collect();
        let unexplained: Vec<usize> = divergent.iter().copied().filter(|&i| c64.data[i] != js.data[i]).collect();
        if let Some(first) = unexplained.first() {
            return Err(format!("{id}: {} unexplained divergences, first at t={first}", unexplained.len()));
        }
        notes.push(format!("{id}: {} c32/js divergences", divergent.len()));
    }
    Ok(format!("2^16 samples in c32 and js without trapping; {}", notes.join("; ")))
}

fn pitch_estimator() -> Outcome {
    let events = estimate_pitch(&render_range(&program("t*4", SemanticsMode::C32), 0, 8000), 1024);
    check(events.len() == 7, format!("{} windows", events.len()))?;
    let mut worst: f64 = 0.0;
    for e in &events {
        let f = e.freq.ok_or(format!("no pitch at t={}", e.t_start))?;
        let err = (f - 125.0).abs() / 125.0;
        worst = worst.max(err);
        check(err <= 0.02, format!("{f} Hz at t={}", e.t_start))?;
    }
    Ok(format!("7 windows at 125 Hz, worst error {:.3}%", worst * 100.0))
}

fn wav_bytes() -> Outcome {
    let chunk = render_range(&program("t", SemanticsMode::C32), 0, 8000);
    let mut out = Vec::new();
    write_wav(std::slice::from_ref(&chunk), 8000, &mut out).map_err(|e| e.to_string())?;
    check(out.len() == 8044, format!("{} bytes", out.len()))?;
    let mut header = Vec::new();
    header.extend(b"RIFF");
    header.extend(8036u32.to_le_bytes());
    header.extend(b"WAVEfmt ");
    header.extend(16u32.to_le_bytes());
    header.extend(1u16.to_le_bytes());
    header.extend(1u16.to_le_bytes());
    header.extend(8000u32.to_le_bytes());
    header.extend(8000u32.to_le_bytes());
    header.extend(1u16.to_le_bytes());
    header.extend(8u16.to_le_bytes());
    header.extend(b"data");
    header.extend(8000u32.to_le_bytes());
    check(out[..44] == header[..], "header mismatch")?;
    check(out[44..] == chunk.data[..], "sample data mismatch")?;
    Ok("8044 bytes, header matches field by field".into())
}

fn performance() -> Outcome {
    const N: usize = 10_000_000;
    let p = program("t&t>>8", SemanticsMode::C32);
    let ast = parse("t&t>>8").unwrap();

    let start = Instant::now();
    let vm = render_range(&p, 0, N);
    let vm_time = start.elapsed();

    let start = Instant::now();
    let mut checksum = 0u64;
    for t in 0..N as u64 {
        checksum += eval_ast(&ast, t, SemanticsMode::C32).quantize() as u64;
    }
    let oracle_time = start.elapsed();

    let vm_sum: u64 = vm.data.iter().map(|&b| b as u64).sum();
    check(vm_sum == checksum, "vm and oracle disagree")?;
    let speedup = oracle_time.as_secs_f64() / vm_time.as_secs_f64();
    let detail = format!(
        "vm {:.1} Msamples/s, oracle {:.1} Msamples/s, speedup {speedup:.1}x",
        N as f64 / vm_time.as_secs_f64() / 1e6,
        N as f64 / oracle_time.as_secs_f64() / 1e6,
    );
    check(speedup >= 2.0, detail.clone())?;
    Ok(detail)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("precedence and round-trip", precedence),
        ("output convention", output_convention),
        ("oracle equivalence", oracle_equivalence),
        ("xor melody table", xor_table),
        ("note naming", note_naming),
        ("forty-two series", forty_two_series),
        ("sierpinski bit identity", sierpinski_bits),
        ("wrap-around percussion", wrap_percussion),
        ("totalized division", totalized_division),
        ("pitch estimator", pitch_estimator),
        ("wav bit-exactness", wav_bytes),
        ("vm performance", performance),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
