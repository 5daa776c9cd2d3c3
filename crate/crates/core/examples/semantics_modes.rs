//! Where C32, C64 and JS semantics part ways, and the bytecode VM
//! checked against the tree-walking interpreter.

use bytebeat::expr::parse;
use bytebeat::semantics::{eval_ast, eval_sample, to_int32, Program, SemanticsMode};

fn main() {
    let probes = [
        ("t*t*t", 1u64 << 11),
        ("t<<33", 1),
        ("t/0", 7),
        ("t/3*3", 7),
        ("(int)(t/1e7*t*t+t)", 1000),
        ("-2147483648/-1+t", 0),
    ];
    println!("{:<22} {:>8} {:>22} {:>22} {:>22}", "expr", "t", "c32", "c64", "js");
    for (src, t) in probes {
        let e = parse(src).unwrap();
        let cells: Vec<String> = SemanticsMode::ALL
            .iter()
            .map(|&m| match Program::from_source(src, m) {
                Ok(_) => eval_ast(&e, t, m).to_string(),
                Err(err) => format!("({err})").chars().take(22).collect(),
            })
            .collect();
        println!("{src:<22} {t:>8} {:>22} {:>22} {:>22}", cells[0], cells[1], cells[2]);
    }

    println!("\nToInt32: 1e10 -> {}, 2^31 -> {}, -1.5 -> {}", to_int32(1e10), to_int32(2f64.powi(31)), to_int32(-1.5));

    let src = "t>>4|t&((t>>5)/(t>>7-(t>>15)&-t>>7-(t>>15)))";
    let e = parse(src).unwrap();
    for mode in SemanticsMode::ALL {
        let p = Program::from_source(src, mode).unwrap();
        let mismatches = (0..1u64 << 18).filter(|&t| eval_sample(&p, t) != eval_ast(&e, t, mode).quantize()).count();
        println!("{mode}: vm vs oracle over 2^18 samples, {mismatches} mismatches");
    }
}
