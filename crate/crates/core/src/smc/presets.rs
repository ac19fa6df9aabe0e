//! Built-in models, stored as config text so every preset can be exported
//! and reproduced from its textual form.

use super::config::parse_model_with;
use super::{ModelError, SmcModel};
use crate::rational::Rational;

const EG1: &str = "\
# a -> ab | ba, b -> b
alphabet = a b
rule a = 1/2: ab | 1/2: ba
rule b = 1: b
root = a
";

const EG2: &str = "\
# constant length 2, no root
alphabet = a b
rule a = 1/2: aa | 1/2: ab
rule b = 1: ba
";

const EG3: &str = "\
# a grows by one b or c on either side
alphabet = a b c
rule a = 1/4: ab | 1/4: ba | 1/4: ac | 1/4: ca
rule b = 1: b
rule c = 1: c
root = a
";

const EG4: &str = "\
# eg3 with a lazy self-loop of weight 1-q
alphabet = a b c
param q = 1/2
rule a = q/4: ab | q/4: ba | q/4: ac | q/4: ca | 1-q: a
rule b = 1: b
rule c = 1: c
root = a
";

const EG5: &str = "\
alphabet = a b c d e
rule a = 1/4: ab | 1/4: ba | 1/4: ac | 1/4: ca
rule b = 1/2: bde | 1/2: edb
rule c = 1: c
rule d = 1: d
rule e = 1: e
root = a
";

const TEST_HARMONIC: &str = "\
# constant length, persistent, expanding root with exclusive support words
alphabet = a b
rule a = 1/2: ab | 1/2: ba
rule b = 1: bb
root = a
";

const PRESETS: &[(&str, &str)] = &[
    ("eg1", EG1),
    ("eg2", EG2),
    ("eg3", EG3),
    ("eg4", EG4),
    ("eg5", EG5),
    ("test-harmonic", TEST_HARMONIC),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn preset(name: &str) -> Result<SmcModel, ModelError> {
    preset_with(name, &[])
}

/// A preset with parameter overrides (e.g. `q` for `eg4`).
pub fn preset_with(name: &str, params: &[(String, Rational)]) -> Result<SmcModel, ModelError> {
    let text = preset_text(name).ok_or_else(|| ModelError::UnknownPreset(name.to_string()))?;
    parse_model_with(text, params)
}
