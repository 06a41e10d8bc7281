// Copyright 2026 The spinlink Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the simulators and calculators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter violates its documented domain.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The fixed-step integrator left the physical state space.
    #[error("integration failed at step {step} (t = {time_s:.6e} s): {diagnostic}")]
    Integration {
        step: usize,
        time_s: f64,
        diagnostic: String,
    },

    /// A rate or waiting time diverges for the requested inputs.
    #[error("divergent quantity: {0}")]
    Divergent(String),

    /// A sweep point failed; carries the offending grid coordinates.
    #[error("sweep point (g = {g_hz:.6e} Hz, Q = {q_mw:.6e}) failed: {source}")]
    SweepPoint {
        g_hz: f64,
        q_mw: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad inputs rather than numerical breakdown.
    pub fn is_configuration(&self) -> bool {
        match self {
            Error::InvalidParameter { .. } => true,
            Error::SweepPoint { source, .. } => source.is_configuration(),
            Error::Integration { .. } | Error::Divergent(_) => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and >= 0, got {value}")))
    }
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {value}")))
    }
}

pub(crate) fn ensure_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must lie in [0, 1], got {value}")))
    }
}
