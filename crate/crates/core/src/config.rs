//! TOML schema for the model: units, frame, system parameters, optional
//! fiber channel and bath. Unknown keys are rejected.
//!
//! ```toml
//! units = "si_mhz"          # or "dimensionless"
//! frame = "rotating"        # or "lab"
//!
//! [system]
//! omega_c = 183.0
//! omega_m = 0.0
//! omega_q = 0.0
//! g_m = 21.0
//! g_q = { value = 117.0, unit = "si_mhz" }
//! gamma_c = 1.8
//! # J = 14.7                # either J or [channel], not both
//!
//! [channel]
//! xi = 1.0
//! length_m = 10.0
//!
//! [bath]
//! gamma = 0.7
//! gamma_unit = "mhz"        # required in si_mhz: "mhz" or "rad_per_s"
//! convention = "linear"     # or "sqrt"
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::Frame;
use crate::open::{BathConfig, CouplingConvention};
use crate::params::{validate_params, ChannelSpec, Rate, SystemParams, UnitMode, ANGULAR_PER_MHZ};

/// A rate given either as a bare number (in the document's unit mode) or
/// with an explicit unit tag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RateField {
    Bare(f64),
    Tagged { value: f64, unit: UnitMode },
}

impl RateField {
    fn rate(self, default: UnitMode) -> Rate {
        match self {
            RateField::Bare(v) => Rate::new(v, default),
            RateField::Tagged { value, unit } => Rate::new(value, unit),
        }
    }
}

impl From<f64> for RateField {
    fn from(v: f64) -> Self {
        RateField::Bare(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameName {
    #[default]
    Rotating,
    Lab,
}

impl From<FrameName> for Frame {
    fn from(f: FrameName) -> Self {
        match f {
            FrameName::Rotating => Frame::RotatingAtOmegaQ,
            FrameName::Lab => Frame::Lab,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub omega_c: RateField,
    pub omega_m: RateField,
    pub omega_q: RateField,
    pub g_m: RateField,
    pub g_q: RateField,
    #[serde(rename = "J", default, skip_serializing_if = "Option::is_none")]
    pub j: Option<RateField>,
    #[serde(default = "zero_rate")]
    pub gamma_c: RateField,
}

fn zero_rate() -> RateField {
    RateField::Bare(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub xi: f64,
    pub length_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaUnit {
    Dimensionless,
    /// `gamma / 2pi` in MHz.
    Mhz,
    RadPerS,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConventionName {
    #[default]
    Linear,
    Sqrt,
}

impl From<ConventionName> for CouplingConvention {
    fn from(c: ConventionName) -> Self {
        match c {
            ConventionName::Linear => CouplingConvention::Linear,
            ConventionName::Sqrt => CouplingConvention::Sqrt,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSection {
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_unit: Option<GammaUnit>,
    #[serde(default)]
    pub convention: ConventionName,
}

impl BathSection {
    /// Memory rate in the internal angular units of `mode`.
    pub fn gamma_angular(&self, mode: UnitMode) -> Result<f64> {
        match (mode, self.gamma_unit) {
            (UnitMode::Dimensionless, None | Some(GammaUnit::Dimensionless)) => Ok(self.gamma),
            (UnitMode::Dimensionless, Some(u)) => Err(Error::Config(format!(
                "bath.gamma_unit = {u:?} is not allowed with dimensionless units"
            ))),
            (UnitMode::SiMhz, Some(GammaUnit::Mhz)) => Ok(self.gamma * ANGULAR_PER_MHZ),
            (UnitMode::SiMhz, Some(GammaUnit::RadPerS)) => Ok(self.gamma),
            (UnitMode::SiMhz, _) => Err(Error::Config(
                "bath.gamma_unit must be \"mhz\" or \"rad_per_s\" with si_mhz units".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default)]
    pub units: UnitMode,
    #[serde(default)]
    pub frame: FrameName,
    pub system: SystemSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bath: Option<BathSection>,
}

impl ModelConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn frame(&self) -> Frame {
        self.frame.into()
    }

    /// Validated parameters; `J` comes from `[system]` or from `[channel]`.
    pub fn params(&self) -> Result<crate::params::ValidatedParams> {
        let u = self.units;
        let s = &self.system;
        let raw = SystemParams {
            omega_c: s.omega_c.rate(u),
            omega_m: s.omega_m.rate(u),
            omega_q: s.omega_q.rate(u),
            g_m: s.g_m.rate(u),
            g_q: s.g_q.rate(u),
            j: s.j.map(|j| j.rate(u)).unwrap_or(Rate::new(0.0, u)),
            gamma_c: s.gamma_c.rate(u),
            unit_mode: u,
        };
        let params = validate_params(&raw)?;
        match (s.j, self.channel) {
            (Some(_), Some(_)) => Err(Error::Config(
                "give either system.J or [channel], not both".into(),
            )),
            (None, None) => Err(Error::Config(
                "system.J is missing and no [channel] is given".into(),
            )),
            (Some(_), None) => Ok(params),
            (None, Some(ch)) => {
                if u == UnitMode::Dimensionless {
                    return Err(Error::Config(
                        "[channel] needs si_mhz units (fiber length in metres)".into(),
                    ));
                }
                let j = ChannelSpec::new(ch.xi, ch.length_m)?.coupling(params.gamma_c())?;
                params.with_j_angular(j)
            }
        }
    }

    pub fn bath_config(
        &self,
        params: &crate::params::ValidatedParams,
    ) -> Result<Option<BathConfig>> {
        self.bath
            .as_ref()
            .map(|b| {
                BathConfig::new(
                    b.gamma_angular(self.units)?,
                    params.gamma_c(),
                    b.convention.into(),
                )
            })
            .transpose()
    }
}
