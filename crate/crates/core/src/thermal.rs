// Copyright 2026 The spinlink Authors
// SPDX-License-Identifier: Apache-2.0

//! Heat load below the mixing chamber from microwave control of the spins.
//!
//! Chain: Rabi target → field at the spin → wire current (straight-wire
//! Ampère law) → line input power → power dissipated in an attenuating line
//! at a given duty cycle. Optical control power is added on top.
//!
//! The input power can be forced with [`HeatScenario::drive_power_w`]; the
//! current-derived value is always reported next to it. Both the `I²Z` and
//! the `I²Z/2` conventions are reported.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, ensure_unit_interval, Result};
use crate::rates::{EntangledPhotonPoint, ENTANGLED_PHOTON_REFERENCE};

/// Vacuum permeability, T·m/A.
pub const MU_0: f64 = 1.256_637_062_12e-6;

/// Electron gyromagnetic ratio, Hz/T (2.8 MHz/G).
pub const ELECTRON_GYROMAGNETIC_HZ_PER_T: f64 = 2.8e10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeatScenario {
    /// Target electron Rabi frequency, Hz.
    pub rabi_target: f64,
    /// Gyromagnetic ratio, Hz/T.
    pub gyromagnetic: f64,
    /// Spin-to-conductor distance, m.
    pub conductor_distance: f64,
    pub line_impedance: f64,
    pub attenuation_db_per_m: f64,
    pub line_length_m: f64,
    pub duty_cycle: f64,
    pub optical_power_w: f64,
    pub cooling_power_w: f64,
    /// Input power at the line; `None` uses the current-derived `I²Z`.
    pub drive_power_w: Option<f64>,
    /// Extra drive required by spin-orbit ground states, applied to the
    /// input power.
    pub power_multiplier: f64,
    /// Series resistance of joints and connectors, Ω.
    pub contact_resistance_ohm: f64,
}

impl Default for HeatScenario {
    fn default() -> Self {
        Self {
            rabi_target: 10e6,
            gyromagnetic: ELECTRON_GYROMAGNETIC_HZ_PER_T,
            conductor_distance: 1e-6,
            line_impedance: 50.0,
            attenuation_db_per_m: 0.01,
            line_length_m: 1.0,
            duty_cycle: 0.1,
            optical_power_w: 100e-9,
            cooling_power_w: 10e-6,
            drive_power_w: Some(150e-6),
            power_multiplier: 1.0,
            contact_resistance_ohm: 0.0,
        }
    }
}

impl HeatScenario {
    /// Ten-fold faster gates: 15 mW pulses at one tenth the duty cycle.
    pub fn high_power() -> Self {
        Self {
            drive_power_w: Some(15e-3),
            duty_cycle: 0.01,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_non_negative("rabi_target", self.rabi_target)?;
        ensure_positive("gyromagnetic", self.gyromagnetic)?;
        ensure_positive("conductor_distance", self.conductor_distance)?;
        ensure_positive("line_impedance", self.line_impedance)?;
        ensure_non_negative("attenuation_db_per_m", self.attenuation_db_per_m)?;
        ensure_non_negative("line_length_m", self.line_length_m)?;
        ensure_unit_interval("duty_cycle", self.duty_cycle)?;
        ensure_non_negative("optical_power_w", self.optical_power_w)?;
        ensure_positive("cooling_power_w", self.cooling_power_w)?;
        if let Some(p) = self.drive_power_w {
            ensure_non_negative("drive_power_w", p)?;
        }
        ensure_non_negative("power_multiplier", self.power_multiplier)?;
        ensure_non_negative("contact_resistance_ohm", self.contact_resistance_ohm)
    }
}

/// `B = Ω/γ`, tesla.
pub fn required_field(rabi_target: f64, gyromagnetic: f64) -> Result<f64> {
    ensure_non_negative("rabi_target", rabi_target)?;
    ensure_positive("gyromagnetic", gyromagnetic)?;
    Ok(rabi_target / gyromagnetic)
}

/// `I = 2π·d·B/µ₀`, ampere.
pub fn required_current(b_field: f64, distance: f64) -> Result<f64> {
    ensure_non_negative("b_field", b_field)?;
    ensure_positive("distance", distance)?;
    Ok(2.0 * PI * distance * b_field / MU_0)
}

/// `P = I²·Z`, watt.
pub fn input_power(current: f64, impedance: f64) -> Result<f64> {
    ensure_non_negative("current", current)?;
    ensure_positive("impedance", impedance)?;
    Ok(current * current * impedance)
}

/// Fraction of the input absorbed by a line of total loss `α·L` dB.
pub fn absorbed_fraction(attenuation_db_per_m: f64, length_m: f64) -> f64 {
    1.0 - 10f64.powf(-attenuation_db_per_m * length_m / 10.0)
}

/// `P_in·(1 − 10^(−αL/10))·duty`, watt.
pub fn dissipated_power(p_in: f64, attenuation_db_per_m: f64, length_m: f64, duty_cycle: f64) -> Result<f64> {
    ensure_non_negative("p_in", p_in)?;
    ensure_non_negative("attenuation_db_per_m", attenuation_db_per_m)?;
    ensure_non_negative("length_m", length_m)?;
    ensure_unit_interval("duty_cycle", duty_cycle)?;
    Ok(p_in * absorbed_fraction(attenuation_db_per_m, length_m) * duty_cycle)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntangledPhotonComparison {
    pub reference: EntangledPhotonPoint,
    /// Reference heat divided by this scenario's total.
    pub heat_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatReport {
    pub scenario: HeatScenario,
    pub field_t: f64,
    pub current_a: f64,
    /// Current-derived input power, `I²Z`.
    pub input_power_rms_w: f64,
    /// Current-derived input power, `I²Z/2`.
    pub input_power_peak_w: f64,
    /// Input power used for dissipation, after the multiplier.
    pub drive_power_w: f64,
    pub microwave_dissipated_w: f64,
    pub contact_dissipated_w: f64,
    pub optical_w: f64,
    pub total_w: f64,
    /// Cooling power over total heat load; `None` when nothing is dissipated.
    pub cooling_margin: Option<f64>,
    pub entangled_photon: Vec<EntangledPhotonComparison>,
}

pub fn heat_budget(s: &HeatScenario) -> Result<HeatReport> {
    s.validate()?;
    let field_t = required_field(s.rabi_target, s.gyromagnetic)?;
    let current_a = required_current(field_t, s.conductor_distance)?;
    let input_power_rms_w = input_power(current_a, s.line_impedance)?;
    let drive_power_w = s.drive_power_w.unwrap_or(input_power_rms_w) * s.power_multiplier;
    let microwave_dissipated_w =
        dissipated_power(drive_power_w, s.attenuation_db_per_m, s.line_length_m, s.duty_cycle)?;

    // Joint heating scales with the current actually driven down the line.
    let drive_current = (drive_power_w / s.line_impedance).sqrt();
    let contact_dissipated_w = drive_current * drive_current * s.contact_resistance_ohm * s.duty_cycle;

    let total_w = microwave_dissipated_w + contact_dissipated_w + s.optical_power_w;
    let ratio = |x: f64| (total_w > 0.0).then(|| x / total_w);
    Ok(HeatReport {
        scenario: *s,
        field_t,
        current_a,
        input_power_rms_w,
        input_power_peak_w: 0.5 * input_power_rms_w,
        drive_power_w,
        microwave_dissipated_w,
        contact_dissipated_w,
        optical_w: s.optical_power_w,
        total_w,
        cooling_margin: ratio(s.cooling_power_w),
        entangled_photon: ENTANGLED_PHOTON_REFERENCE
            .iter()
            .map(|&reference| EntangledPhotonComparison {
                reference,
                heat_ratio: ratio(reference.heat_w),
            })
            .collect(),
    })
}
