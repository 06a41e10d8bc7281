// Copyright 2026 The spinlink Authors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration. Every section is optional; missing sections and keys
//! fall back to the built-in defaults, unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spinlink::lindblad::{logspace, TripartiteParams, DEFAULT_DT, DEFAULT_T_END};
use spinlink::rates::{EfficiencySet, TimingParamSet, DEFAULT_R_SCSC};
use spinlink::spin_levels::{EfficiencyChain, MixingThresholds, Nv0Params};
use spinlink::thermal::HeatScenario;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

/// Inclusive grid `start..=stop` with `points` samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Grid {
    pub const fn log(start: f64, stop: f64, points: usize) -> Self {
        Self {
            start,
            stop,
            points,
            spacing: Spacing::Log,
        }
    }

    pub const fn linear(start: f64, stop: f64, points: usize) -> Self {
        Self {
            start,
            stop,
            points,
            spacing: Spacing::Linear,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match (self.spacing, self.points) {
            (_, 0) => Vec::new(),
            (_, 1) => vec![self.start],
            (Spacing::Log, n) => logspace(self.start, self.stop, n),
            (Spacing::Linear, n) => (0..n)
                .map(|i| {
                    if i == n - 1 {
                        self.stop
                    } else {
                        self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64
                    }
                })
                .collect(),
        }
    }

    fn validate(&self, name: &str) -> Result<(), CliError> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(CliError::Config(format!("{name}: grid bounds must be finite")));
        }
        if self.spacing == Spacing::Log && (self.start <= 0.0 || self.stop <= 0.0) {
            return Err(CliError::Config(format!("{name}: log grid needs positive bounds")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransferSection {
    pub t_end_s: f64,
    pub dt_s: f64,
    pub check_positivity: bool,
}

impl Default for TransferSection {
    fn default() -> Self {
        Self {
            t_end_s: DEFAULT_T_END,
            dt_s: DEFAULT_DT,
            check_positivity: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub g_hz: Grid,
    pub q_mw: Grid,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            g_hz: Grid::log(1e5, 1e7, 25),
            q_mw: Grid::log(1e2, 1e6, 25),
        }
    }
}

/// The three reference node designs. A case table replaces the preset
/// wholesale, so it must be complete.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CasesSection {
    #[serde(rename = "A")]
    pub a: TimingParamSet,
    #[serde(rename = "B")]
    pub b: TimingParamSet,
    #[serde(rename = "C")]
    pub c: TimingParamSet,
}

impl Default for CasesSection {
    fn default() -> Self {
        Self {
            a: TimingParamSet::case_a(),
            b: TimingParamSet::case_b(),
            c: TimingParamSet::case_c(),
        }
    }
}

impl CasesSection {
    pub fn all(&self) -> [TimingParamSet; 3] {
        [self.a, self.b, self.c]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareSection {
    /// Spin microwave efficiency axis of the memory rows.
    pub eta_e_mw: Grid,
    /// Transduction efficiency axis of the direct-conversion rows.
    pub eta_dc: Grid,
    pub r_scsc_hz: f64,
}

impl Default for CompareSection {
    fn default() -> Self {
        Self {
            eta_e_mw: Grid::log(1e-3, 1.0, 31),
            eta_dc: Grid::log(1e-3, 1.0, 31),
            r_scsc_hz: DEFAULT_R_SCSC,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolSection {
    pub n_trials: u64,
    pub parallel_memories: u32,
    pub reinit_on_failed_sce: bool,
}

impl Default for ProtocolSection {
    fn default() -> Self {
        Self {
            n_trials: 100_000,
            parallel_memories: 1,
            reinit_on_failed_sce: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeraldSection {
    pub theta_rad: Grid,
}

impl Default for HeraldSection {
    fn default() -> Self {
        Self {
            theta_rad: Grid::linear(0.0, 2.0 * std::f64::consts::PI, 73),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LevelsSection {
    pub params: Nv0Params,
    pub thresholds: MixingThresholds,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Overridden by `--out`, then by the environment default.
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub tripartite: TripartiteParams,
    pub transfer: TransferSection,
    pub sweep: SweepSection,
    pub cases: CasesSection,
    pub efficiencies: EfficiencySet,
    pub compare: CompareSection,
    pub protocol: ProtocolSection,
    pub herald: HeraldSection,
    pub heat: HeatScenario,
    pub levels: LevelsSection,
    pub chain: EfficiencyChain,
    pub output: OutputSection,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.tripartite.validate()?;
        for case in self.cases.all() {
            case.validate()?;
        }
        self.efficiencies.validate()?;
        self.heat.validate()?;
        self.levels.params.validate()?;
        self.chain.validate()?;
        if !(self.transfer.dt_s > 0.0 && self.transfer.t_end_s > 0.0) {
            return Err(CliError::Config("transfer: t_end_s and dt_s must be positive".into()));
        }
        if self.compare.r_scsc_hz.is_nan() || self.compare.r_scsc_hz <= 0.0 {
            return Err(CliError::Config("compare: r_scsc_hz must be positive".into()));
        }
        if self.protocol.n_trials == 0 || self.protocol.parallel_memories == 0 {
            return Err(CliError::Config("protocol: n_trials and parallel_memories must be at least 1".into()));
        }
        self.sweep.g_hz.validate("sweep.g_hz")?;
        self.sweep.q_mw.validate("sweep.q_mw")?;
        self.compare.eta_e_mw.validate("compare.eta_e_mw")?;
        self.compare.eta_dc.validate("compare.eta_dc")?;
        self.herald.theta_rad.validate("herald.theta_rad")
    }
}
