//! A workbench for bytebeat: one-line C-like expressions of a sample
//! counter `t` whose low byte, emitted at 8 kHz, is music.
//!
//! ```
//! use bytebeat::semantics::{eval_sample, Program, SemanticsMode};
//!
//! let p = Program::from_source("t*(42&t>>10)", SemanticsMode::C32).unwrap();
//! assert_eq!(eval_sample(&p, 2048), 0);
//! ```

pub mod analysis;
pub mod audio;
pub mod corpus;
pub mod expr;
pub mod semantics;
pub mod gateway;
