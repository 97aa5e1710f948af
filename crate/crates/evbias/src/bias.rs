//! The five tunable sensor registers ("biases") and their legal ranges.
//!
//! Each register is an 8-bit value. Two of them (`bias_diff_on`,
//! `bias_diff_off`) are restricted to sub-ranges so the ON threshold stays
//! above the OFF threshold's register window; the rest span the full byte.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Identifies one of the five sensor registers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BiasName {
    /// Source-follower buffer: photoreceptor bandwidth.
    Fo,
    /// High-pass filter corner; 0 disables the filter entirely.
    Hpf,
    /// ON contrast threshold.
    DiffOn,
    /// OFF contrast threshold.
    DiffOff,
    /// Refractory dead time after each event.
    Refr,
}

impl BiasName {
    /// All registers, in canonical order.
    pub const ALL: [BiasName; 5] = [
        BiasName::Fo,
        BiasName::Hpf,
        BiasName::DiffOn,
        BiasName::DiffOff,
        BiasName::Refr,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BiasName::Fo => "bias_fo",
            BiasName::Hpf => "bias_hpf",
            BiasName::DiffOn => "bias_diff_on",
            BiasName::DiffOff => "bias_diff_off",
            BiasName::Refr => "bias_refr",
        }
    }
}

impl fmt::Display for BiasName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Error for an unrecognized register name.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown bias name {name:?} (expected one of bias_fo, bias_hpf, bias_diff_on, bias_diff_off, bias_refr)")]
pub struct UnknownBias {
    pub name: String,
}

impl FromStr for BiasName {
    type Err = UnknownBias;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bias_fo" => Ok(BiasName::Fo),
            "bias_hpf" => Ok(BiasName::Hpf),
            "bias_diff_on" => Ok(BiasName::DiffOn),
            "bias_diff_off" => Ok(BiasName::DiffOff),
            "bias_refr" => Ok(BiasName::Refr),
            _ => Err(UnknownBias { name: s.to_owned() }),
        }
    }
}

/// A complete register configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BiasSet {
    pub bias_fo: u8,
    pub bias_hpf: u8,
    pub bias_diff_on: u8,
    pub bias_diff_off: u8,
    pub bias_refr: u8,
}

/// Factory defaults. Every default lies inside its register's legal range
/// and on its register's standard sweep grid.
pub fn default_biases() -> BiasSet {
    BiasSet {
        bias_fo: 74,
        bias_hpf: 0,
        bias_diff_on: 115,
        bias_diff_off: 52,
        bias_refr: 68,
    }
}

impl Default for BiasSet {
    fn default() -> Self {
        default_biases()
    }
}

/// Legal range for one register.
pub fn bias_range(name: BiasName) -> RangeInclusive<u8> {
    match name {
        BiasName::Fo => 0..=255,
        BiasName::Hpf => 0..=255,
        BiasName::DiffOn => 81..=255,
        BiasName::DiffOff => 0..=79,
        BiasName::Refr => 0..=255,
    }
}

/// The standard 10-point sweep grid for one register.
///
/// Each grid spans the register's legal range and contains its factory
/// default, so a one-register sweep always includes the default operating
/// point as one of its rows.
pub fn tested_values(name: BiasName) -> [u8; 10] {
    match name {
        BiasName::Fo => [0, 15, 30, 45, 60, 74, 90, 105, 120, 135],
        BiasName::Hpf => [0, 28, 56, 84, 112, 140, 168, 196, 224, 255],
        BiasName::DiffOn => [81, 100, 115, 138, 157, 176, 195, 214, 233, 255],
        BiasName::DiffOff => [0, 9, 18, 27, 36, 45, 52, 61, 70, 79],
        BiasName::Refr => [0, 25, 50, 68, 100, 125, 150, 175, 200, 225],
    }
}

/// One register value outside its legal range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiasViolation {
    pub bias: BiasName,
    pub value: u8,
    pub range: RangeInclusive<u8>,
}

impl fmt::Display for BiasViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} = {} outside allowed range {}..={}",
            self.bias,
            self.value,
            self.range.start(),
            self.range.end()
        )
    }
}

impl BiasSet {
    /// Reads one register.
    pub fn get(&self, name: BiasName) -> u8 {
        match name {
            BiasName::Fo => self.bias_fo,
            BiasName::Hpf => self.bias_hpf,
            BiasName::DiffOn => self.bias_diff_on,
            BiasName::DiffOff => self.bias_diff_off,
            BiasName::Refr => self.bias_refr,
        }
    }

    /// Returns a copy with one register replaced.
    pub fn with_value(&self, name: BiasName, value: u8) -> BiasSet {
        let mut out = *self;
        match name {
            BiasName::Fo => out.bias_fo = value,
            BiasName::Hpf => out.bias_hpf = value,
            BiasName::DiffOn => out.bias_diff_on = value,
            BiasName::DiffOff => out.bias_diff_off = value,
            BiasName::Refr => out.bias_refr = value,
        }
        out
    }

    /// Lists every register outside its legal range (empty means valid).
    pub fn validate(&self) -> Vec<BiasViolation> {
        BiasName::ALL
            .iter()
            .filter_map(|&name| {
                let value = self.get(name);
                let range = bias_range(name);
                if range.contains(&value) {
                    None
                } else {
                    Some(BiasViolation {
                        bias: name,
                        value,
                        range,
                    })
                }
            })
            .collect()
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }
}
