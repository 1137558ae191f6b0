//! Built-in scenarios.

use crate::config::{parse_config, ConfigError, ScenarioConfig};

pub const PRESETS: [(&str, &str); 5] = [
    ("fig1", include_str!("../presets/fig1.json")),
    ("equivalence", include_str!("../presets/equivalence.json")),
    ("bell", include_str!("../presets/bell.json")),
    ("imaging", include_str!("../presets/imaging.json")),
    ("waveguide", include_str!("../presets/waveguide.json")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn preset(name: &str) -> Result<ScenarioConfig, ConfigError> {
    let text = preset_text(name).ok_or_else(|| ConfigError {
        problems: vec![format!("unknown preset {name:?}; available: {}", names().collect::<Vec<_>>().join(", "))],
    })?;
    parse_config(text)
}
