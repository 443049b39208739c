//! Scenario files shipped with the crate.

use super::config::{parse_scenario, ScenarioConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub text: &'static str,
}

macro_rules! preset {
    ($name:literal) => {
        Preset {
            name: $name,
            text: include_str!(concat!("../../presets/", $name, ".toml")),
        }
    };
}

pub const PRESETS: &[Preset] = &[
    preset!("fig1"),
    preset!("fig2"),
    preset!("fig4"),
    preset!("fig5"),
    preset!("fig6"),
    preset!("fig7"),
    preset!("fig8"),
    preset!("trivial"),
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

pub fn load(name: &str) -> Result<ScenarioConfig> {
    let preset = find(name).ok_or_else(|| {
        let known: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
        Error::Config(format!("unknown preset `{name}`; known: {}", known.join(", ")))
    })?;
    parse_scenario(preset.text)
}
