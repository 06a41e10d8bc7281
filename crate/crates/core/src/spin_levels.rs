// Copyright 2026 The spinlink Authors
// SPDX-License-Identifier: Apache-2.0

//! Device-level calculators for the neutral NV ground state, effective
//! phonon-driven Rabi rates and the optical transmission chain.
//!
//! All frequencies are cyclic (Hz). The four-level Hamiltonian uses the basis
//! `{|+⟩, |−⟩} ⊗ {|↑⟩, |↓⟩}`, orbit first, so `index = 2·orbit + spin` with
//! `orbit ∈ {+: 0, −: 1}` and `spin ∈ {↑: 0, ↓: 1}`.
//!
//! Strain and electric-field terms are taken already converted to Hz and are
//! summed with their signs as given, so opposite signs partially cancel.

use std::f64::consts::FRAC_PI_4;

use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, ensure_unit_interval, Error, Result};

/// Bohr magneton divided by Planck's constant, Hz/T.
pub const BOHR_MAGNETON_HZ_PER_T: f64 = 1.399_624_493_61e10;

/// Basis ordering reported alongside every eigen-decomposition.
pub const BASIS_ORDER: &str = "orbit(+,-) x spin(up,down); index = 2*orbit + spin";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Nv0Params {
    /// Spin g-factor.
    pub g_spin: f64,
    /// Orbital g-factor.
    pub l_orb: f64,
    /// Spin-orbit parameter λ, Hz. The zero-field splitting is 2λ.
    pub lambda_so: f64,
    /// Perpendicular strain, Hz.
    pub eps_perp: f64,
    /// Perpendicular electric-field term, Hz.
    pub d_perp: f64,
    /// Axial magnetic field, T.
    pub b_z: f64,
}

impl Default for Nv0Params {
    fn default() -> Self {
        Self {
            g_spin: 2.0,
            l_orb: 0.1,
            lambda_so: 5e9,
            eps_perp: 0.0,
            d_perp: 0.0,
            b_z: 0.0,
        }
    }
}

impl Nv0Params {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("g_spin", self.g_spin),
            ("l_orb", self.l_orb),
            ("lambda_so", self.lambda_so),
            ("eps_perp", self.eps_perp),
            ("d_perp", self.d_perp),
            ("b_z", self.b_z),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        Ok(())
    }

    fn transverse(&self) -> f64 {
        self.eps_perp + self.d_perp
    }

    /// Diagonal orbital splitting half-width in the spin sector `s = ±1/2`.
    fn orbital_offset(&self, s: f64) -> f64 {
        self.l_orb * BOHR_MAGNETON_HZ_PER_T * self.b_z + 2.0 * self.lambda_so * s
    }

    fn zeeman(&self, s: f64) -> f64 {
        self.g_spin * BOHR_MAGNETON_HZ_PER_T * self.b_z * s
    }
}

const SPIN_PROJECTION: [f64; 2] = [0.5, -0.5];

/// Real symmetric 4×4 Hamiltonian in Hz (all matrix elements are real).
pub fn nv0_hamiltonian(p: &Nv0Params) -> Result<Matrix4<f64>> {
    p.validate()?;
    let mut h = Matrix4::zeros();
    for (spin, &s) in SPIN_PROJECTION.iter().enumerate() {
        let plus = spin;
        let minus = 2 + spin;
        let dz = p.orbital_offset(s);
        h[(plus, plus)] = p.zeeman(s) + dz;
        h[(minus, minus)] = p.zeeman(s) - dz;
        h[(plus, minus)] = p.transverse();
        h[(minus, plus)] = p.transverse();
    }
    Ok(h)
}

/// Orbital character of an eigenstate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OrbitCharacter {
    Plus,
    Minus,
    X,
    Y,
    Mixed,
}

impl OrbitCharacter {
    pub fn label(self) -> &'static str {
        match self {
            Self::Plus => "+",
            Self::Minus => "-",
            Self::X => "X",
            Self::Y => "Y",
            Self::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpinCharacter {
    Up,
    Down,
    Mixed,
}

impl SpinCharacter {
    pub fn label(self) -> &'static str {
        match self {
            Self::Up => "up",
            Self::Down => "down",
            Self::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Level {
    pub eigenvalue_hz: f64,
    pub eigenvector: [f64; 4],
    pub orbit_character: OrbitCharacter,
    pub spin_character: SpinCharacter,
}

/// Weight above which a state is labelled by a single basis character.
const CHARACTER_WEIGHT: f64 = 0.99;

/// Eigenlevels in ascending energy.
pub fn nv0_levels(p: &Nv0Params) -> Result<Vec<Level>> {
    let h = nv0_hamiltonian(p)?;
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    Ok(order
        .into_iter()
        .map(|k| {
            let v: Vector4<f64> = eig.eigenvectors.column(k).into();
            let v = [v[0], v[1], v[2], v[3]];
            Level {
                eigenvalue_hz: eig.eigenvalues[k],
                eigenvector: v,
                orbit_character: orbit_character(&v),
                spin_character: spin_character(&v),
            }
        })
        .collect())
}

/// Orbital overlaps `(|⟨+|ψ⟩|², |⟨X|ψ⟩|²)` summed over spin, with
/// `|X⟩ = (|+⟩ − |−⟩)/√2` and `|Y⟩ = (|+⟩ + |−⟩)/√2` up to global phase.
pub fn orbital_weights(v: &[f64; 4]) -> (f64, f64) {
    let plus = v[0] * v[0] + v[1] * v[1];
    let x = (0..2).map(|s| 0.5 * (v[s] - v[2 + s]).powi(2)).sum();
    (plus, x)
}

fn orbit_character(v: &[f64; 4]) -> OrbitCharacter {
    let norm: f64 = v.iter().map(|a| a * a).sum();
    let (plus, x) = orbital_weights(v);
    let (plus, x) = (plus / norm, x / norm);
    if plus >= CHARACTER_WEIGHT {
        OrbitCharacter::Plus
    } else if plus <= 1.0 - CHARACTER_WEIGHT {
        OrbitCharacter::Minus
    } else if x >= CHARACTER_WEIGHT {
        OrbitCharacter::X
    } else if x <= 1.0 - CHARACTER_WEIGHT {
        OrbitCharacter::Y
    } else {
        OrbitCharacter::Mixed
    }
}

fn spin_character(v: &[f64; 4]) -> SpinCharacter {
    let norm: f64 = v.iter().map(|a| a * a).sum();
    let up = (v[0] * v[0] + v[2] * v[2]) / norm;
    if up >= CHARACTER_WEIGHT {
        SpinCharacter::Up
    } else if up <= 1.0 - CHARACTER_WEIGHT {
        SpinCharacter::Down
    } else {
        SpinCharacter::Mixed
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrainRegime {
    ZeroStrain,
    Moderate,
    HighStrain,
}

/// Regime boundaries as fractions of the π/4 full-mixing limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MixingThresholds {
    pub zero_strain_below: f64,
    pub high_strain_above: f64,
}

impl Default for MixingThresholds {
    fn default() -> Self {
        Self {
            zero_strain_below: 1e-3,
            high_strain_above: 0.9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitalMixing {
    /// Mixing angle in `[0, π/4]`, radians.
    pub angle_rad: f64,
    pub regime: StrainRegime,
}

/// Mixing angle of the lower orbital doublet.
pub fn orbital_mixing(p: &Nv0Params, thresholds: &MixingThresholds) -> Result<OrbitalMixing> {
    p.validate()?;
    if !(0.0 <= thresholds.zero_strain_below && thresholds.zero_strain_below < thresholds.high_strain_above) {
        return Err(Error::invalid("mixing_thresholds", "need 0 <= zero_strain_below < high_strain_above"));
    }
    // The ground state lives in whichever spin sector has the lower branch.
    let lower = |s: f64| p.zeeman(s) - p.orbital_offset(s).hypot(p.transverse());
    let s = if lower(0.5) <= lower(-0.5) { 0.5 } else { -0.5 };
    let angle_rad = 0.5 * p.transverse().abs().atan2(p.orbital_offset(s).abs());
    let ratio = angle_rad / FRAC_PI_4;
    let regime = if ratio < thresholds.zero_strain_below {
        StrainRegime::ZeroStrain
    } else if ratio >= thresholds.high_strain_above {
        StrainRegime::HighStrain
    } else {
        StrainRegime::Moderate
    };
    Ok(OrbitalMixing { angle_rad, regime })
}

/// Phonon coupling reduced by a high-strain suppression factor in `(0, 1]`.
pub fn suppressed_coupling(g_m_e: f64, suppression: f64) -> Result<f64> {
    ensure_non_negative("g_m_e", g_m_e)?;
    if !(suppression > 0.0 && suppression <= 1.0) {
        return Err(Error::invalid("strain_suppression", format!("must lie in (0, 1], got {suppression}")));
    }
    Ok(g_m_e * suppression)
}

/// Effective sideband Rabi frequency `g·√n·Ω₀/ω_m`, Hz.
pub fn sideband_rabi(g_m_e: f64, n_phonons: u32, omega0: f64, omega_m: f64) -> Result<f64> {
    ensure_non_negative("g_m_e", g_m_e)?;
    ensure_non_negative("omega0", omega0)?;
    ensure_positive("omega_m", omega_m)?;
    Ok(g_m_e * f64::from(n_phonons).sqrt() * omega0 / omega_m)
}

/// Adiabaticity margin: `|Δ| ≥ factor · max(g, Ω₀)`.
pub const DEFAULT_ADIABATIC_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThreeLevelRabi {
    pub rabi_hz: f64,
    pub adiabatic: bool,
}

/// Two-phonon Raman-type Rabi frequency `g·Ω₀/Δ` with an adiabaticity flag.
pub fn three_level_rabi(g_m_e: f64, omega0: f64, delta: f64) -> Result<ThreeLevelRabi> {
    three_level_rabi_with(g_m_e, omega0, delta, DEFAULT_ADIABATIC_FACTOR)
}

pub fn three_level_rabi_with(g_m_e: f64, omega0: f64, delta: f64, adiabatic_factor: f64) -> Result<ThreeLevelRabi> {
    ensure_non_negative("g_m_e", g_m_e)?;
    ensure_non_negative("omega0", omega0)?;
    ensure_positive("adiabatic_factor", adiabatic_factor)?;
    if !delta.is_finite() || delta == 0.0 {
        return Err(Error::invalid("delta", format!("must be finite and non-zero, got {delta}")));
    }
    Ok(ThreeLevelRabi {
        rabi_hz: g_m_e * omega0 / delta,
        adiabatic: delta.abs() >= adiabatic_factor * g_m_e.max(omega0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EfficiencyChain {
    /// Optical single-photon coupling, Hz.
    pub g_opt: f64,
    /// Optical cavity linewidth, Hz.
    pub kappa: f64,
    pub gamma_rad: f64,
    pub gamma_nonrad: f64,
    pub gamma_dp: f64,
    pub eta_coupling: f64,
    pub eta_loss: f64,
    pub eta_det: f64,
}

impl Default for EfficiencyChain {
    /// Cooperativity 100 with the reference coupling, fiber and detector
    /// factors.
    fn default() -> Self {
        Self {
            g_opt: 5e8,
            kappa: 1e9,
            gamma_rad: 5e6,
            gamma_nonrad: 2e6,
            gamma_dp: 3e6,
            eta_coupling: 0.9,
            eta_loss: fiber_transmission(10.0, 5.0),
            eta_det: 0.99,
        }
    }
}

impl EfficiencyChain {
    pub fn validate(&self) -> Result<()> {
        ensure_non_negative("g_opt", self.g_opt)?;
        ensure_positive("kappa", self.kappa)?;
        ensure_non_negative("gamma_rad", self.gamma_rad)?;
        ensure_non_negative("gamma_nonrad", self.gamma_nonrad)?;
        ensure_non_negative("gamma_dp", self.gamma_dp)?;
        ensure_positive("gamma_total", self.gamma_rad + self.gamma_nonrad + self.gamma_dp)?;
        ensure_unit_interval("eta_coupling", self.eta_coupling)?;
        ensure_unit_interval("eta_loss", self.eta_loss)?;
        ensure_unit_interval("eta_det", self.eta_det)
    }
}

/// Coherent cooperativity `4g²/(κ·Σγ)`.
pub fn optical_cooperativity(chain: &EfficiencyChain) -> Result<f64> {
    chain.validate()?;
    let gamma = chain.gamma_rad + chain.gamma_nonrad + chain.gamma_dp;
    Ok(4.0 * chain.g_opt * chain.g_opt / (chain.kappa * gamma))
}

/// Coherent emission probability `C/(1 + C)`.
pub fn internal_efficiency(cooperativity: f64) -> f64 {
    if cooperativity.is_infinite() {
        1.0
    } else {
        cooperativity / (1.0 + cooperativity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransmissionBreakdown {
    pub cooperativity: f64,
    pub eta_int: f64,
    pub eta_coupling: f64,
    pub eta_loss: f64,
    pub eta_det: f64,
    pub eta_e_opt: f64,
}

pub fn transmission_breakdown(chain: &EfficiencyChain) -> Result<TransmissionBreakdown> {
    let cooperativity = optical_cooperativity(chain)?;
    let eta_int = internal_efficiency(cooperativity);
    Ok(TransmissionBreakdown {
        cooperativity,
        eta_int,
        eta_coupling: chain.eta_coupling,
        eta_loss: chain.eta_loss,
        eta_det: chain.eta_det,
        eta_e_opt: eta_int * chain.eta_coupling * chain.eta_loss * chain.eta_det,
    })
}

/// Optical detection efficiency `η_int · η_coupling · η_loss · η_det`.
pub fn transmission_efficiency(chain: &EfficiencyChain) -> Result<f64> {
    transmission_breakdown(chain).map(|b| b.eta_e_opt)
}

/// Power transmission of a fiber, `10^(−α·L/10)` with α in dB/km.
pub fn fiber_transmission(db_per_km: f64, length_m: f64) -> f64 {
    10f64.powf(-db_per_km * length_m / 1e3 / 10.0)
}
