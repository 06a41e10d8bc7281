// Copyright 2026 The spinlink Authors
// SPDX-License-Identifier: Apache-2.0

//! Simulation and rate analysis of a memory-assisted link between remote
//! superconducting qubits.
//!
//! | module | contents |
//! |---|---|
//! | [`lindblad`] | microwave photon, phonon and spin master equation |
//! | [`statevector`] | single- and two-photon heralding algebra |
//! | [`spin_levels`] | NV⁰ ground-state levels, effective Rabi rates, optical efficiency chain |
//! | [`rates`] | gate times and closed-form link rates |
//! | [`protocol_mc`] | Monte-Carlo of the full sequence |
//! | [`thermal`] | heat load below the mixing chamber |
//!
//! Every interface takes cyclic frequencies in Hz, times in seconds and
//! powers in watts.

pub mod error;
pub mod lindblad;
pub mod protocol_mc;
pub mod rates;
pub mod spin_levels;
pub mod statevector;
pub mod thermal;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/master-equation.md")]
    mod master_equation {}
    #[doc = include_str!("../../../book/src/heralding.md")]
    mod heralding {}
    #[doc = include_str!("../../../book/src/spin-levels.md")]
    mod spin_levels {}
    #[doc = include_str!("../../../book/src/rates.md")]
    mod rates {}
    #[doc = include_str!("../../../book/src/monte-carlo.md")]
    mod monte_carlo {}
    #[doc = include_str!("../../../book/src/heat-budget.md")]
    mod heat_budget {}
}
