// Copyright 2026 The spinlink Authors
// SPDX-License-Identifier: Apache-2.0

//! Pure-state algebra of single- and two-photon heralding between two nodes.
//!
//! Each node holds a spin whose `|0⟩` state emits one optical photon into the
//! node's path to a shared 50:50 beamsplitter. Paths carry 0 or 1 photon
//! before the beamsplitter. After it, the two output modes can hold up to two
//! photons in total (the `|1,1⟩` input bunches), so detection is computed on
//! the six number-conserving output states
//! `{|00⟩, |10⟩, |01⟩, |20⟩, |11⟩, |02⟩}`.
//!
//! Beamsplitter convention: `a_A† → (a_A† + a_B†)/√2`,
//! `a_B† → (a_A† − a_B†)/√2`. Detectors resolve photon number. The module is
//! lossless.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-12;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Two-spin state over `{|00⟩, |01⟩, |10⟩, |11⟩}`, node A first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinPair(pub [Complex64; 4]);

impl SpinPair {
    /// Product of two single-node spin states `α|0⟩ + β|1⟩`.
    pub fn product(a: [Complex64; 2], b: [Complex64; 2]) -> Result<Self> {
        Self::normalized([a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])
    }

    /// Both spins in `(|0⟩ + |1⟩)/√2`.
    pub fn plus_plus() -> Self {
        SpinPair([c(0.5); 4])
    }

    /// `(|01⟩ + sign·e^{iφ}|10⟩)/√2`.
    pub fn bell(sign: i8, phase: f64) -> Self {
        let s = f64::from(sign.signum());
        SpinPair([
            c(0.0),
            c(FRAC_1_SQRT_2),
            Complex64::from_polar(s * FRAC_1_SQRT_2, phase),
            c(0.0),
        ])
    }

    pub fn normalized(amps: [Complex64; 4]) -> Result<Self> {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::invalid("spin_pair", "state has zero norm"));
        }
        Ok(SpinPair(amps.map(|z| z / norm)))
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `|⟨other|self⟩|²`.
    pub fn fidelity(&self, other: &SpinPair) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| b.conj() * a)
            .sum::<Complex64>()
            .norm_sqr()
    }

    /// π pulse exchanging `|0⟩ ↔ |1⟩` on both spins.
    pub fn flip_both(&self) -> Self {
        let a = self.0;
        SpinPair([a[3], a[2], a[1], a[0]])
    }
}

/// Spins ⊗ photon occupation of the two paths before the beamsplitter.
///
/// Index layout: `spin_A·8 + spin_B·4 + n_A·2 + n_B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualRailState {
    amplitudes: [Complex64; 16],
    theta_a: f64,
    theta_b: f64,
}

impl DualRailState {
    pub const DIM: usize = 16;

    pub fn new(amplitudes: [Complex64; 16]) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid("dual_rail_state", format!("norm {norm} != 1")));
        }
        Ok(Self {
            amplitudes,
            theta_a: 0.0,
            theta_b: 0.0,
        })
    }

    pub fn index(spin_a: usize, spin_b: usize, n_a: usize, n_b: usize) -> usize {
        spin_a * 8 + spin_b * 4 + n_a * 2 + n_b
    }

    pub fn amplitude(&self, spin_a: usize, spin_b: usize, n_a: usize, n_b: usize) -> Complex64 {
        self.amplitudes[Self::index(spin_a, spin_b, n_a, n_b)]
    }

    pub fn amplitudes(&self) -> &[Complex64; 16] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Accumulated path phases `(θ_A, θ_B)`.
    pub fn path_phases(&self) -> (f64, f64) {
        (self.theta_a, self.theta_b)
    }
}

/// Each spin in `|0⟩` emits a photon into its own path; `|1⟩` stays dark.
pub fn emit_entangled_photon(spins: &SpinPair) -> DualRailState {
    let mut amplitudes = [Complex64::new(0.0, 0.0); 16];
    for (k, amp) in spins.0.iter().enumerate() {
        let (sa, sb) = (k >> 1, k & 1);
        amplitudes[DualRailState::index(sa, sb, 1 - sa, 1 - sb)] = *amp;
    }
    DualRailState {
        amplitudes,
        theta_a: 0.0,
        theta_b: 0.0,
    }
}

/// Propagation phase `e^{iθ}` on every term with a photon in the given path.
pub fn apply_path_phase(state: &DualRailState, theta_a: f64, theta_b: f64) -> DualRailState {
    let mut out = *state;
    for sa in 0..2 {
        for sb in 0..2 {
            for na in 0..2 {
                for nb in 0..2 {
                    let phase = theta_a * na as f64 + theta_b * nb as f64;
                    out.amplitudes[DualRailState::index(sa, sb, na, nb)] *= Complex64::from_polar(1.0, phase);
                }
            }
        }
    }
    out.theta_a += theta_a;
    out.theta_b += theta_b;
    out
}

/// Output Fock states of the two detector modes, `(m_A, m_B)`.
pub const OUTPUT_BASIS: [(usize, usize); 6] = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];

fn output_index(m_a: usize, m_b: usize) -> usize {
    OUTPUT_BASIS
        .iter()
        .position(|&m| m == (m_a, m_b))
        .expect("occupation inside the two-photon space")
}

/// Beamsplitter on the number-conserving space spanned by [`OUTPUT_BASIS`]
/// (rows: output state, columns: input state).
pub fn beamsplitter_matrix() -> [[Complex64; 6]; 6] {
    let r = FRAC_1_SQRT_2;
    let mut u = [[c(0.0); 6]; 6];
    // vacuum
    u[0][0] = c(1.0);
    // |10⟩ → (|10⟩ + |01⟩)/√2, |01⟩ → (|10⟩ − |01⟩)/√2
    u[1][1] = c(r);
    u[2][1] = c(r);
    u[1][2] = c(r);
    u[2][2] = c(-r);
    // Two-photon block from (a†+b†)^k (a†−b†)^l / (√2^{k+l} √(k! l!)).
    // |20⟩ = a†²/√2|0⟩ → (a†+b†)²/(2√2) = (√2|20⟩ + √2|11⟩ ... ) written out:
    u[3][3] = c(0.5);
    u[4][3] = c(r);
    u[5][3] = c(0.5);
    // |11⟩ → (a†² − b†²)/2 |0⟩ = (|20⟩ − |02⟩)/√2
    u[3][4] = c(r);
    u[4][4] = c(0.0);
    u[5][4] = c(-r);
    // |02⟩ → (a† − b†)²/(2√2)|0⟩ = (|20⟩ − √2|11⟩ + |02⟩)/2
    u[3][5] = c(0.5);
    u[4][5] = c(-r);
    u[5][5] = c(0.5);
    u
}

/// Detector outcome of one heralding round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClickPattern {
    /// Exactly one photon, at detector A.
    DetectorA,
    /// Exactly one photon, at detector B.
    DetectorB,
    /// No photon.
    None,
    /// Two photons (bunched or split).
    Both,
}

impl ClickPattern {
    pub const ALL: [ClickPattern; 4] = [Self::DetectorA, Self::DetectorB, Self::None, Self::Both];

    /// Sign of the heralded Bell superposition, `None` for failed rounds.
    pub fn bell_sign(self) -> Option<i8> {
        match self {
            Self::DetectorA => Some(1),
            Self::DetectorB => Some(-1),
            Self::None | Self::Both => None,
        }
    }

    fn outputs(self) -> &'static [(usize, usize)] {
        match self {
            Self::DetectorA => &[(1, 0)],
            Self::DetectorB => &[(0, 1)],
            Self::None => &[(0, 0)],
            Self::Both => &[(2, 0), (1, 1), (0, 2)],
        }
    }
}

/// One click pattern with its probability and the heralded spin state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeraldedOutcome {
    pub click_pattern: ClickPattern,
    pub probability: f64,
    /// Normalized spin–spin state; present only for single-click patterns
    /// with non-zero probability.
    pub post_state: Option<SpinPair>,
    /// `θ = θ_B − θ_A` accumulated on the paths.
    pub relative_phase: f64,
    /// Sign `s` of the target Bell state `(|01⟩ + s|10⟩)/√2`.
    pub bell_sign: Option<i8>,
}

impl HeraldedOutcome {
    /// Fidelity of the heralded state with `(|01⟩ + s|10⟩)/√2`.
    pub fn bell_fidelity(&self) -> Option<f64> {
        let (state, sign) = (self.post_state?, self.bell_sign?);
        Some(state.fidelity(&SpinPair::bell(sign, 0.0)))
    }
}

/// Interferes the two paths and projects on every click pattern.
pub fn beamsplit_and_herald(state: &DualRailState) -> Vec<HeraldedOutcome> {
    let u = beamsplitter_matrix();
    // out[spin_pair][output_fock]
    let mut out = [[c(0.0); 6]; 4];
    for (k, row) in out.iter_mut().enumerate() {
        let (sa, sb) = (k >> 1, k & 1);
        for na in 0..2 {
            for nb in 0..2 {
                let amp = state.amplitude(sa, sb, na, nb);
                if amp == c(0.0) {
                    continue;
                }
                let col = output_index(na, nb);
                for (m, cell) in row.iter_mut().enumerate() {
                    *cell += u[m][col] * amp;
                }
            }
        }
    }

    let relative_phase = state.theta_b - state.theta_a;
    ClickPattern::ALL
        .iter()
        .map(|&pattern| {
            let idx: Vec<usize> = pattern.outputs().iter().map(|&(a, b)| output_index(a, b)).collect();
            let probability: f64 = out.iter().flat_map(|row| idx.iter().map(move |&m| row[m].norm_sqr())).sum();

            let post_state = match (pattern.bell_sign(), idx.as_slice()) {
                (Some(_), &[m]) if probability > 0.0 => {
                    let amps = [out[0][m], out[1][m], out[2][m], out[3][m]];
                    SpinPair::normalized(amps).ok()
                }
                _ => None,
            };
            HeraldedOutcome {
                click_pattern: pattern,
                probability,
                post_state,
                relative_phase,
                bell_sign: pattern.bell_sign(),
            }
        })
        .collect()
}

fn outcome(outcomes: &[HeraldedOutcome], pattern: ClickPattern) -> HeraldedOutcome {
    *outcomes
        .iter()
        .find(|o| o.click_pattern == pattern)
        .expect("every pattern is reported")
}

/// One round from `|+⟩|+⟩` with path phases `(0, θ)`; returns the detector-A
/// outcome.
pub fn run_single_photon_protocol(theta: f64) -> HeraldedOutcome {
    let emitted = emit_entangled_photon(&SpinPair::plus_plus());
    let phased = apply_path_phase(&emitted, 0.0, theta);
    outcome(&beamsplit_and_herald(&phased), ClickPattern::DetectorA)
}

/// Result of the two-round protocol for one pair of click patterns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoRoundOutcome {
    pub first: ClickPattern,
    pub second: ClickPattern,
    /// Joint probability of both single clicks.
    pub probability: f64,
    pub post_state: SpinPair,
    /// `+1` for the same detector twice, `−1` otherwise.
    pub bell_sign: i8,
}

impl TwoRoundOutcome {
    pub fn bell_fidelity(&self) -> f64 {
        self.post_state.fidelity(&SpinPair::bell(self.bell_sign, 0.0))
    }
}

/// All four single-click combinations of the two-round protocol.
///
/// Round one heralds `(|01⟩ ± e^{iθ}|10⟩)/√2`; both spins are flipped and
/// emit again through the same paths, which makes the path phase global.
pub fn two_photon_outcomes(theta: f64) -> Vec<TwoRoundOutcome> {
    let round_one = {
        let emitted = emit_entangled_photon(&SpinPair::plus_plus());
        beamsplit_and_herald(&apply_path_phase(&emitted, 0.0, theta))
    };
    let mut out = Vec::with_capacity(4);
    for first in [ClickPattern::DetectorA, ClickPattern::DetectorB] {
        let o1 = outcome(&round_one, first);
        let flipped = o1.post_state.expect("single click heralds a state").flip_both();
        let emitted = emit_entangled_photon(&flipped);
        let round_two = beamsplit_and_herald(&apply_path_phase(&emitted, 0.0, theta));
        for second in [ClickPattern::DetectorA, ClickPattern::DetectorB] {
            let o2 = outcome(&round_two, second);
            let s1 = first.bell_sign().unwrap_or(1);
            let s2 = second.bell_sign().unwrap_or(1);
            out.push(TwoRoundOutcome {
                first,
                second,
                probability: o1.probability * o2.probability,
                post_state: o2.post_state.expect("single click heralds a state"),
                bell_sign: s1 * s2,
            });
        }
    }
    out
}

/// Two-round protocol reported as the detector-A / detector-A outcome.
pub fn run_two_photon_protocol(theta: f64) -> HeraldedOutcome {
    let aa = two_photon_outcomes(theta)
        .into_iter()
        .find(|o| o.first == ClickPattern::DetectorA && o.second == ClickPattern::DetectorA)
        .expect("A/A outcome present");
    HeraldedOutcome {
        click_pattern: ClickPattern::DetectorA,
        probability: aa.probability,
        post_state: Some(aa.post_state),
        relative_phase: theta,
        bell_sign: Some(aa.bell_sign),
    }
}

/// Total probability that a protocol heralds a usable Bell pair.
pub fn heralding_success_probability(two_photon: bool, theta: f64) -> f64 {
    if two_photon {
        two_photon_outcomes(theta).iter().map(|o| o.probability).sum()
    } else {
        let emitted = emit_entangled_photon(&SpinPair::plus_plus());
        beamsplit_and_herald(&apply_path_phase(&emitted, 0.0, theta))
            .iter()
            .filter(|o| o.bell_sign.is_some())
            .map(|o| o.probability)
            .sum()
    }
}
