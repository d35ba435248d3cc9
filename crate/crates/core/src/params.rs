//! Physical parameters and the fiber-channel coupling estimate.
//!
//! Two unit conventions are supported. In [`UnitMode::Dimensionless`] every
//! rate is a bare number and time is measured in inverse rate units. In
//! [`UnitMode::SiMhz`] rates are entered as `nu / 2pi` in MHz and are converted
//! to angular frequency (rad/s) on validation; times are then in seconds.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 2.998e8;

/// rad/s per MHz of ordinary frequency.
pub const ANGULAR_PER_MHZ: f64 = 2.0 * PI * 1.0e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitMode {
    #[default]
    Dimensionless,
    SiMhz,
}

impl UnitMode {
    /// Convert an entered value to the internal angular representation.
    pub fn to_angular(self, value: f64) -> f64 {
        match self {
            UnitMode::Dimensionless => value,
            UnitMode::SiMhz => value * ANGULAR_PER_MHZ,
        }
    }

    pub fn from_angular(self, omega: f64) -> f64 {
        match self {
            UnitMode::Dimensionless => omega,
            UnitMode::SiMhz => omega / ANGULAR_PER_MHZ,
        }
    }

    /// Internal time units (1 or seconds) per user-facing time unit
    /// (inverse-rate units, or microseconds in SI mode).
    pub fn time_scale(self) -> f64 {
        match self {
            UnitMode::Dimensionless => 1.0,
            UnitMode::SiMhz => 1.0e-6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            UnitMode::Dimensionless => "dimensionless",
            UnitMode::SiMhz => "si_mhz",
        }
    }
}

impl fmt::Display for UnitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A frequency-like quantity tagged with the unit mode it was entered in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rate {
    pub value: f64,
    pub unit: UnitMode,
}

impl Rate {
    pub fn new(value: f64, unit: UnitMode) -> Self {
        Self { value, unit }
    }
}

/// Raw parameters of the two-cavity Hamiltonian plus the cavity decay rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub omega_c: Rate,
    pub omega_m: Rate,
    pub omega_q: Rate,
    pub g_m: Rate,
    pub g_q: Rate,
    pub j: Rate,
    pub gamma_c: Rate,
    pub unit_mode: UnitMode,
}

impl SystemParams {
    /// All three mode frequencies equal to `omega`, no cavity decay.
    pub fn resonant(unit_mode: UnitMode, omega: f64, g_m: f64, g_q: f64, j: f64) -> Self {
        let r = |v| Rate::new(v, unit_mode);
        Self {
            omega_c: r(omega),
            omega_m: r(omega),
            omega_q: r(omega),
            g_m: r(g_m),
            g_q: r(g_q),
            j: r(j),
            gamma_c: r(0.0),
            unit_mode,
        }
    }

    pub fn with_frequencies(mut self, omega_c: f64, omega_m: f64, omega_q: f64) -> Self {
        self.omega_c = Rate::new(omega_c, self.unit_mode);
        self.omega_m = Rate::new(omega_m, self.unit_mode);
        self.omega_q = Rate::new(omega_q, self.unit_mode);
        self
    }

    pub fn with_couplings(mut self, g_m: f64, g_q: f64) -> Self {
        self.g_m = Rate::new(g_m, self.unit_mode);
        self.g_q = Rate::new(g_q, self.unit_mode);
        self
    }

    pub fn with_j(mut self, j: f64) -> Self {
        self.j = Rate::new(j, self.unit_mode);
        self
    }

    pub fn with_gamma_c(mut self, gamma_c: f64) -> Self {
        self.gamma_c = Rate::new(gamma_c, self.unit_mode);
        self
    }

    fn fields(&self) -> [(&'static str, Rate); 7] {
        [
            ("omega_c", self.omega_c),
            ("omega_m", self.omega_m),
            ("omega_q", self.omega_q),
            ("g_m", self.g_m),
            ("g_q", self.g_q),
            ("J", self.j),
            ("gamma_c", self.gamma_c),
        ]
    }
}

/// Parameters that passed [`validate_params`], stored in angular units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidatedParams {
    raw: SystemParams,
    omega_c: f64,
    omega_m: f64,
    omega_q: f64,
    g_m: f64,
    g_q: f64,
    j: f64,
    gamma_c: f64,
}

impl ValidatedParams {
    pub fn raw(&self) -> &SystemParams {
        &self.raw
    }
    pub fn unit_mode(&self) -> UnitMode {
        self.raw.unit_mode
    }
    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }
    pub fn omega_m(&self) -> f64 {
        self.omega_m
    }
    pub fn omega_q(&self) -> f64 {
        self.omega_q
    }
    pub fn g_m(&self) -> f64 {
        self.g_m
    }
    pub fn g_q(&self) -> f64 {
        self.g_q
    }
    pub fn j(&self) -> f64 {
        self.j
    }
    pub fn gamma_c(&self) -> f64 {
        self.gamma_c
    }

    /// True when cavity, magnon and qubit share one frequency.
    pub fn is_resonant(&self) -> bool {
        self.omega_c == self.omega_q && self.omega_m == self.omega_q
    }

    /// Largest absolute rate in the Hamiltonian (detunings measured from omega_q).
    pub fn max_rate(&self) -> f64 {
        [
            self.omega_c - self.omega_q,
            self.omega_m - self.omega_q,
            self.g_m,
            self.g_q,
            self.j,
        ]
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Same parameters with a different fiber coupling, still validated.
    pub fn with_j_angular(&self, j: f64) -> Result<Self> {
        let mut raw = self.raw;
        raw.j = Rate::new(raw.unit_mode.from_angular(j), raw.unit_mode);
        validate_params(&raw)
    }

    pub fn with_gamma_c_angular(&self, gamma_c: f64) -> Result<Self> {
        let mut raw = self.raw;
        raw.gamma_c = Rate::new(raw.unit_mode.from_angular(gamma_c), raw.unit_mode);
        validate_params(&raw)
    }

    pub fn with_couplings_angular(&self, g_m: f64, g_q: f64) -> Result<Self> {
        let mut raw = self.raw;
        raw.g_m = Rate::new(raw.unit_mode.from_angular(g_m), raw.unit_mode);
        raw.g_q = Rate::new(raw.unit_mode.from_angular(g_q), raw.unit_mode);
        validate_params(&raw)
    }
}

/// Check sign and unit invariants; convert to angular units.
pub fn validate_params(params: &SystemParams) -> Result<ValidatedParams> {
    let mut problems = Vec::new();
    for (name, rate) in params.fields() {
        if !rate.value.is_finite() {
            problems.push(format!("{name} is not finite"));
        }
        if rate.unit != params.unit_mode {
            problems.push(format!(
                "{name} given in {} but parameters are in {}",
                rate.unit, params.unit_mode
            ));
        }
    }
    for (name, rate) in [
        ("g_m", params.g_m),
        ("g_q", params.g_q),
        ("J", params.j),
        ("gamma_c", params.gamma_c),
    ] {
        if rate.value < 0.0 {
            problems.push(format!("{name} must be >= 0 (got {})", rate.value));
        }
    }
    if !problems.is_empty() {
        return Err(Error::Validation(problems));
    }
    let u = params.unit_mode;
    Ok(ValidatedParams {
        raw: *params,
        omega_c: u.to_angular(params.omega_c.value),
        omega_m: u.to_angular(params.omega_m.value),
        omega_q: u.to_angular(params.omega_q.value),
        g_m: u.to_angular(params.g_m.value),
        g_q: u.to_angular(params.g_q.value),
        j: u.to_angular(params.j.value),
        gamma_c: u.to_angular(params.gamma_c.value),
    })
}

/// Microwave-optical-microwave link: conversion efficiency and fiber length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    xi: f64,
    length_m: f64,
}

impl ChannelSpec {
    pub fn new(xi: f64, length_m: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&xi) {
            return Err(Error::Domain(format!(
                "conversion efficiency {xi} outside [0, 1]"
            )));
        }
        if !(length_m > 0.0 && length_m.is_finite()) {
            return Err(Error::Domain(format!(
                "fiber length must be > 0 (got {length_m})"
            )));
        }
        Ok(Self { xi, length_m })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn length_m(&self) -> f64 {
        self.length_m
    }

    /// Effective cavity-cavity coupling for an angular cavity decay rate.
    pub fn coupling(&self, gamma_c: f64) -> Result<f64> {
        channel_coupling(self.xi, fiber_coupling_rate(self.length_m, gamma_c)?)
    }
}

/// Fiber coupling `sqrt(8 pi c Gamma_c / L)`; `gamma_c` in rad/s, result in rad/s.
pub fn fiber_coupling_rate(length_m: f64, gamma_c: f64) -> Result<f64> {
    if !(length_m > 0.0) || !length_m.is_finite() {
        return Err(Error::Domain(format!(
            "fiber length must be > 0 (got {length_m})"
        )));
    }
    if !(gamma_c >= 0.0) || !gamma_c.is_finite() {
        return Err(Error::Domain(format!(
            "cavity decay must be >= 0 (got {gamma_c})"
        )));
    }
    Ok((8.0 * PI * SPEED_OF_LIGHT * gamma_c / length_m).sqrt())
}

/// Channel coupling after two conversions: `xi^2 * J_f`.
pub fn channel_coupling(xi: f64, j_f: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::Domain(format!(
            "conversion efficiency {xi} outside [0, 1]"
        )));
    }
    if !(j_f >= 0.0) {
        return Err(Error::Domain(format!(
            "fiber coupling must be >= 0 (got {j_f})"
        )));
    }
    Ok(xi * xi * j_f)
}

/// Ratio `g_q / g_m`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CouplingRatio(f64);

impl CouplingRatio {
    pub fn new(r_q: f64) -> Result<Self> {
        if r_q > 0.0 && r_q.is_finite() {
            Ok(Self(r_q))
        } else {
            Err(Error::Domain(format!(
                "coupling ratio must be > 0 (got {r_q})"
            )))
        }
    }

    pub fn from_couplings(g_m: f64, g_q: f64) -> Result<Self> {
        if !(g_m > 0.0) {
            return Err(Error::Domain("g_m must be > 0 to form g_q/g_m".into()));
        }
        Self::new(g_q / g_m)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}
