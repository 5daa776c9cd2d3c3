//! Parse expressions, print their canonical form, tokens and bytecode.
//!
//!     cargo run --example parse_format -- "t*(0xCA98>>(t>>9&14)&15)|t>>8"

use bytebeat::expr::{format, parse, tokenize};
use bytebeat::semantics::{Program, SemanticsMode};

fn main() {
    let sources: Vec<String> = std::env::args().skip(1).collect();
    let sources = if sources.is_empty() {
        vec!["((t*5)&(t>>7))|((t*3)&(t>>8))".to_string(), "t&&t".to_string()]
    } else {
        sources
    };
    for src in &sources {
        println!("source:    {src}");
        match parse(src) {
            Ok(e) => {
                let tokens: Vec<&str> = tokenize(src).unwrap().iter().map(|t| t.text).collect();
                println!("tokens:    {}", tokens.join(" "));
                println!("canonical: {}", format(&e));
                println!("nodes:     {}", e.size());
                for mode in SemanticsMode::ALL {
                    match Program::from_source(src, mode) {
                        Ok(p) => println!("{mode:>4}:      {:?}", p.code()),
                        Err(err) => println!("{mode:>4}:      {err}"),
                    }
                }
            }
            Err(err) => println!("error:     {err}\n           {src}\n           {}^", " ".repeat(err.pos)),
        }
        println!();
    }
}
