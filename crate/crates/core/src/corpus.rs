//! The formula collection as structured presets.

use serde::Serialize;

use crate::semantics::SemanticsMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PresetStatus {
    /// Printed in full.
    Verbatim,
    /// Rebuilt from a truncated listing so that it reproduces the published
    /// values; not original text.
    Reconstructed,
    /// Printed incomplete. Kept for reference, never rendered by tests.
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topic {
    Basics,
    SierpinskiHarmonies,
    PitchMelodies,
    WrapAround,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Preset {
    pub id: &'static str,
    pub source: &'static str,
    pub topic: Topic,
    pub credit: Option<&'static str>,
    pub modes: &'static [SemanticsMode],
    pub status: PresetStatus,
}

impl Preset {
    pub fn is_verbatim(&self) -> bool {
        self.status == PresetStatus::Verbatim
    }

    /// Whether the preset is complete enough to render.
    pub fn is_playable(&self) -> bool {
        self.status != PresetStatus::Truncated
    }
}

const ALL_MODES: &[SemanticsMode] = &SemanticsMode::ALL;

const fn preset(id: &'static str, source: &'static str, topic: Topic) -> Preset {
    Preset {
        id,
        source,
        topic,
        credit: None,
        modes: ALL_MODES,
        status: PresetStatus::Verbatim,
    }
}

const fn credited(p: Preset, credit: &'static str) -> Preset {
    Preset {
        credit: Some(credit),
        ..p
    }
}

const fn with_status(p: Preset, status: PresetStatus) -> Preset {
    Preset { status, ..p }
}

static PRESETS: [Preset; 19] = [
    preset("sawtooth", "t", Topic::Basics),
    preset("sierpinski", "t&t>>8", Topic::SierpinskiHarmonies),
    preset("sierpinski-3x", "3*t&t>>8", Topic::SierpinskiHarmonies),
    preset("two-bands", "t&96", Topic::SierpinskiHarmonies),
    preset("two-bands-gated", "t&96&t>>8", Topic::SierpinskiHarmonies),
    preset("lullaby", "t*5&t>>7|t*3&t>>8", Topic::SierpinskiHarmonies),
    preset("lullaby-slow", "t*5&t>>7|t*3&t>>10", Topic::SierpinskiHarmonies),
    preset("lullaby-three", "t*9&t>>4|t*5&t>>7|t*3&t>>10", Topic::SierpinskiHarmonies),
    credited(
        preset("constant-melody", "t*(0xCA98>>(t>>9&14)&15)|t>>8", Topic::SierpinskiHarmonies),
        "Rrrola",
    ),
    credited(
        preset("melody-generator", "(t>>6^t>>8|t>>12|t)&63", Topic::SierpinskiHarmonies),
        "Mu6k",
    ),
    preset("fortytwo", "t*(42&t>>10)", Topic::PitchMelodies),
    with_status(
        preset("xor-melody", "t*(((t>>9)^((t>>9)-2))%11)", Topic::PitchMelodies),
        PresetStatus::Reconstructed,
    ),
    preset("percussion", "(t*9&t>>4|t*5&t>>7|t*3&t>>10)-1", Topic::WrapAround),
    preset("cast-wrap", "(int)(t/1e7*t*t+t)", Topic::WrapAround),
    preset("alternating-ramps", "t>>6&1?t>>5:-t>>4", Topic::WrapAround),
    preset("division", "t>>4|t&((t>>5)/(t>>7-(t>>15)&-t>>7-(t>>15)))", Topic::WrapAround),
    with_status(
        preset("fortytwo-modulus", "t*((42&t>>10)", Topic::PitchMelodies),
        PresetStatus::Truncated,
    ),
    with_status(
        preset("xor-series", "((t>>10)^(t>>10)-2)", Topic::PitchMelodies),
        PresetStatus::Truncated,
    ),
    with_status(preset("wrap-fragment", "(t&t", Topic::WrapAround), PresetStatus::Truncated),
];

pub fn presets() -> &'static [Preset] {
    &PRESETS
}

pub fn find(id: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.id == id)
}

/// Presets printed in full, the ones acceptance checks run against.
pub fn verbatim() -> impl Iterator<Item = &'static Preset> {
    PRESETS.iter().filter(|p| p.is_verbatim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{format, parse};
    use crate::semantics::{render_range, typecheck, Program};
    use std::collections::HashSet;

    #[test]
    fn lookups() {
        assert_eq!(find("sierpinski").unwrap().source, "t&t>>8");
        assert_eq!(find("sierpinski").unwrap().topic, Topic::SierpinskiHarmonies);
        assert_eq!(find("fortytwo").unwrap().source, "t*(42&t>>10)");
        assert_eq!(find("fortytwo").unwrap().topic, Topic::PitchMelodies);
        assert!(find("nope").is_none());
    }

    #[test]
    fn ids_are_unique_slugs() {
        let ids: HashSet<_> = PRESETS.iter().map(|p| p.id).collect();
        assert_eq!(ids.len(), PRESETS.len());
        for id in ids {
            assert!(id.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-'), "{id}");
        }
    }

    #[test]
    fn required_listings_present() {
        let required = [
            "t",
            "t&t>>8",
            "3*t&t>>8",
            "t&96",
            "t&96&t>>8",
            "t*5&t>>7|t*3&t>>8",
            "t*5&t>>7|t*3&t>>10",
            "t*9&t>>4|t*5&t>>7|t*3&t>>10",
            "t*(0xCA98>>(t>>9&14)&15)|t>>8",
            "(t>>6^t>>8|t>>12|t)&63",
            "t*(42&t>>10)",
            "(t*9&t>>4|t*5&t>>7|t*3&t>>10)-1",
            "(int)(t/1e7*t*t+t)",
            "t>>6&1?t>>5:-t>>4",
            "t>>4|t&((t>>5)/(t>>7-(t>>15)&-t>>7-(t>>15)))",
        ];
        for src in required {
            let p = PRESETS.iter().find(|p| p.source == src).unwrap_or_else(|| panic!("missing {src}"));
            assert!(p.is_verbatim(), "{src}");
        }
        assert_eq!(verbatim().count(), required.len());
    }

    #[test]
    fn credits() {
        let credited: Vec<_> = PRESETS.iter().filter_map(|p| p.credit.map(|c| (p.source, c))).collect();
        assert_eq!(
            credited,
            [("t*(0xCA98>>(t>>9&14)&15)|t>>8", "Rrrola"), ("(t>>6^t>>8|t>>12|t)&63", "Mu6k")]
        );
    }

    #[test]
    fn verbatim_presets_round_trip_and_render() {
        for p in verbatim() {
            let e = parse(p.source).unwrap();
            assert_eq!(parse(&format(&e)).unwrap(), e, "{}", p.id);
            for &mode in p.modes {
                typecheck(&e, mode).unwrap();
                let chunk = render_range(&Program::from_source(p.source, mode).unwrap(), 0, 1 << 16);
                assert_eq!(chunk.len(), 1 << 16);
            }
        }
    }

    #[test]
    fn reconstruction_compiles_and_truncations_are_flagged() {
        let xor = find("xor-melody").unwrap();
        assert!(xor.is_playable());
        for &mode in xor.modes {
            Program::from_source(xor.source, mode).unwrap();
        }
        let truncated: Vec<_> = PRESETS.iter().filter(|p| !p.is_playable()).map(|p| p.source).collect();
        assert_eq!(truncated, ["t*((42&t>>10)", "((t>>10)^(t>>10)-2)", "(t&t"]);
    }

    #[test]
    fn json_shape() {
        let v = serde_json::to_value(find("constant-melody").unwrap()).unwrap();
        assert_eq!(
            v,
            serde_json::json!({
                "id": "constant-melody",
                "source": "t*(0xCA98>>(t>>9&14)&15)|t>>8",
                "topic": "sierpinski-harmonies",
                "credit": "Rrrola",
                "modes": ["c32", "c64", "js"],
                "status": "verbatim",
            })
        );
    }
}
