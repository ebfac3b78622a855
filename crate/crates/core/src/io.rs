//! Spectrum and energy-sequence files.
//!
//! A spectrum is either a JSON array or plain text with one probability per
//! line (blank lines and `#` comments skipped). A sequence is the JSON object
//! `{"prefix": [...], "step": s}` or the string `"oscillator"`.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::gibbs::EnergySequence;
use crate::simplex::ProbDist;

pub fn parse_spectrum(text: &str) -> Result<ProbDist> {
    let trimmed = text.trim_start();
    let weights: Vec<f64> = if trimmed.starts_with('[') {
        serde_json::from_str(trimmed)?
    } else {
        trimmed
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.parse::<f64>().map_err(|e| Error::Parse(format!("{l:?}: {e}"))))
            .collect::<Result<_>>()?
    };
    ProbDist::new(weights)
}

pub fn read_spectrum(path: &Path) -> Result<ProbDist> {
    parse_spectrum(&fs::read_to_string(path)?)
}

pub fn parse_sequence(text: &str) -> Result<EnergySequence> {
    let value: serde_json::Value = serde_json::from_str(text.trim())?;
    match value {
        serde_json::Value::String(s) if s == "oscillator" => Ok(EnergySequence::oscillator()),
        serde_json::Value::String(s) => Err(Error::Parse(format!("unknown sequence name {s:?}"))),
        other => Ok(serde_json::from_value(other)?),
    }
}

pub fn read_sequence(path: &Path) -> Result<EnergySequence> {
    parse_sequence(&fs::read_to_string(path)?)
}
