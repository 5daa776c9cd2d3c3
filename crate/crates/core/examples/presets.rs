//! Render every playable preset for a few seconds and report its level
//! statistics.

use bytebeat::corpus::presets;
use bytebeat::semantics::{render_range, Program};

fn main() {
    for p in presets() {
        if !p.is_playable() {
            println!("{:<18} (truncated listing) {}", p.id, p.source);
            continue;
        }
        for &mode in p.modes {
            let chunk = render_range(&Program::from_source(p.source, mode).unwrap(), 0, 5 * 8000);
            let mean = chunk.data.iter().map(|&b| b as f64).sum::<f64>() / chunk.len() as f64;
            let distinct = {
                let mut seen = [false; 256];
                chunk.data.iter().for_each(|&b| seen[b as usize] = true);
                seen.iter().filter(|&&s| s).count()
            };
            println!("{:<18} {mode:<3} mean {mean:6.1}  levels {distinct:3}  {}", p.id, p.source);
        }
    }
}
