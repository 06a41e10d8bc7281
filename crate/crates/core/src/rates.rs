// Copyright 2026 The spinlink Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form entanglement rates for the memory-based link, the direct
//! conversion link and the gate-time bookkeeping behind them.
//!
//! Times are in seconds and rates in Hz. A "rate" argument named `r_*` is an
//! attempt rate; functions returning `R` give successful-event rates.
//!
//! The remote spin–spin rate is `R_ee = ½·r_ee·η_opt²`. For `η_opt` between
//! 0.9 and 1 and a 100 kHz attempt rate that is 40.5–50 kHz; prose figures of
//! 80–100 kHz drop the ½ and are not reproduced here.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, ensure_unit_interval, Error, Result};

/// Reference node design label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseLabel {
    A,
    B,
    C,
    Custom,
}

impl CaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::A => "A",
            Self::B => "B",
            Self::C => "C",
            Self::Custom => "custom",
        }
    }
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CaseLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Self::A),
            "B" | "b" => Ok(Self::B),
            "C" | "c" => Ok(Self::C),
            "custom" => Ok(Self::Custom),
            other => Err(Error::invalid("case", format!("unknown case `{other}`"))),
        }
    }
}

/// Primitive control and readout parameters of one node design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimingParamSet {
    pub label: CaseLabel,
    /// Electron–nuclear hyperfine coupling, Hz. Informational.
    pub hyperfine_a: f64,
    /// Electron Rabi frequency, Hz.
    pub rabi_e: f64,
    /// Nuclear Rabi frequency, Hz. May be absent when the electron-controlled
    /// gate time is given directly.
    #[serde(default)]
    pub rabi_n: Option<f64>,
    pub tau_e_init: f64,
    /// Duration of one remote electron–electron attempt.
    pub tau_ee_attempt: f64,
    /// Single-shot electron readout.
    pub tau_e_ss: f64,
    pub tau_mw_emit: f64,
    pub tau_mw_abs: f64,
    /// Fixed duration of the electron-controlled NOT on the nucleus.
    #[serde(default)]
    pub tau_cen_override: Option<f64>,
    /// Nucleus-controlled NOT as a 2π geometric gate instead of a π pulse.
    #[serde(default)]
    pub geometric_cne: bool,
    /// Number of single-shot readouts inside the Bell-state measurement.
    #[serde(default = "default_bsm_readouts")]
    pub bsm_readouts: u32,
}

fn default_bsm_readouts() -> u32 {
    2
}

impl TimingParamSet {
    /// Moderate hyperfine coupling, weak drive.
    pub fn case_a() -> Self {
        Self {
            label: CaseLabel::A,
            hyperfine_a: 1e6,
            rabi_e: 0.5e6,
            rabi_n: None,
            tau_e_init: 5e-6,
            tau_ee_attempt: 10e-6,
            tau_e_ss: 10e-6,
            tau_mw_emit: 1e-6,
            tau_mw_abs: 1e-6,
            tau_cen_override: Some(10e-6),
            geometric_cne: true,
            bsm_readouts: 2,
        }
    }

    /// Strong hyperfine coupling, moderate drive.
    pub fn case_b() -> Self {
        Self {
            label: CaseLabel::B,
            hyperfine_a: 100e6,
            rabi_e: 10e6,
            rabi_n: Some(0.4e6),
            tau_cen_override: None,
            geometric_cne: false,
            ..Self::case_a()
        }
    }

    /// Strong hyperfine coupling, strong drive.
    pub fn case_c() -> Self {
        Self {
            label: CaseLabel::C,
            rabi_e: 100e6,
            rabi_n: Some(4e6),
            ..Self::case_b()
        }
    }

    pub fn preset(label: CaseLabel) -> Result<Self> {
        match label {
            CaseLabel::A => Ok(Self::case_a()),
            CaseLabel::B => Ok(Self::case_b()),
            CaseLabel::C => Ok(Self::case_c()),
            CaseLabel::Custom => Err(Error::invalid("case", "custom sets have no preset")),
        }
    }

    pub fn all_cases() -> [Self; 3] {
        [Self::case_a(), Self::case_b(), Self::case_c()]
    }

    pub fn validate(&self) -> Result<()> {
        ensure_non_negative("hyperfine_a", self.hyperfine_a)?;
        ensure_positive("rabi_e", self.rabi_e)?;
        if let Some(r) = self.rabi_n {
            ensure_positive("rabi_n", r)?;
        }
        ensure_positive("tau_e_init", self.tau_e_init)?;
        ensure_positive("tau_ee_attempt", self.tau_ee_attempt)?;
        ensure_positive("tau_e_ss", self.tau_e_ss)?;
        ensure_positive("tau_mw_emit", self.tau_mw_emit)?;
        ensure_positive("tau_mw_abs", self.tau_mw_abs)?;
        if let Some(t) = self.tau_cen_override {
            ensure_positive("tau_cen_override", t)?;
        }
        Ok(())
    }

    /// Remote electron–electron attempt rate, `1/τ_ee`.
    pub fn r_ee(&self) -> f64 {
        1.0 / self.tau_ee_attempt
    }

    /// Superconductor–spin attempt rate: one emission plus one absorption.
    pub fn r_sce(&self) -> f64 {
        1.0 / (self.tau_mw_emit + self.tau_mw_abs)
    }
}

/// Gate and sequence durations derived from a [`TimingParamSet`], seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedTiming {
    pub tau_pi2_e: f64,
    /// Electron-controlled NOT on the nucleus.
    pub tau_cen: f64,
    /// Nucleus-controlled NOT on the electron.
    pub tau_cne: f64,
    pub tau_n_init: f64,
    pub tau_n_swap: f64,
    pub tau_init_total: f64,
    pub tau_bsm: f64,
}

pub fn derive_gate_times(p: &TimingParamSet) -> Result<DerivedTiming> {
    p.validate()?;
    let tau_pi2_e = 1.0 / (4.0 * p.rabi_e);
    let tau_cen = match (p.tau_cen_override, p.rabi_n) {
        (Some(t), _) => t,
        (None, Some(rabi_n)) => 1.0 / (2.0 * rabi_n),
        (None, None) => {
            return Err(Error::invalid(
                "rabi_n",
                "required unless tau_cen_override is given",
            ))
        }
    };
    let tau_cne = if p.geometric_cne {
        1.0 / p.rabi_e
    } else {
        1.0 / (2.0 * p.rabi_e)
    };
    let tau_n_init = tau_cen + tau_cne + p.tau_e_init;
    let tau_n_swap = tau_cen + tau_cne;
    Ok(DerivedTiming {
        tau_pi2_e,
        tau_cen,
        tau_cne,
        tau_n_init,
        tau_n_swap,
        tau_init_total: p.tau_e_init + tau_n_init,
        tau_bsm: tau_cen + tau_pi2_e + tau_cne + f64::from(p.bsm_readouts) * p.tau_e_ss,
    })
}

/// Per-stage success efficiencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EfficiencySet {
    /// Optical photon detection, node to detector.
    pub eta_e_opt: f64,
    /// Microwave emission/absorption by the superconducting qubit.
    pub eta_sc_mw: f64,
    /// Microwave emission/absorption by the spin.
    pub eta_e_mw: f64,
    /// Microwave-to-optical transduction of the direct-conversion link.
    pub eta_dc: f64,
    /// Propagation loss of the direct-conversion link.
    pub eta_loss_dc: f64,
}

impl Default for EfficiencySet {
    fn default() -> Self {
        Self {
            eta_e_opt: 1.0,
            eta_sc_mw: 1.0,
            eta_e_mw: 1.0,
            eta_dc: 0.1,
            eta_loss_dc: 1.0,
        }
    }
}

impl EfficiencySet {
    pub fn validate(&self) -> Result<()> {
        ensure_unit_interval("eta_e_opt", self.eta_e_opt)?;
        ensure_unit_interval("eta_sc_mw", self.eta_sc_mw)?;
        ensure_unit_interval("eta_e_mw", self.eta_e_mw)?;
        ensure_unit_interval("eta_dc", self.eta_dc)?;
        ensure_unit_interval("eta_loss_dc", self.eta_loss_dc)
    }

    /// Per-round success probability of the superconductor–spin step.
    pub fn p_sce(&self) -> f64 {
        self.eta_sc_mw * self.eta_e_mw
    }

    /// Per-attempt success probability of the remote spin–spin step.
    pub fn p_ee(&self) -> f64 {
        0.5 * self.eta_e_opt * self.eta_e_opt
    }
}

/// `½·r_ee·η_opt²`.
pub fn rate_ee(r_ee: f64, eta_e_opt: f64) -> Result<f64> {
    ensure_non_negative("r_ee", r_ee)?;
    ensure_unit_interval("eta_e_opt", eta_e_opt)?;
    Ok(0.5 * r_ee * eta_e_opt * eta_e_opt)
}

/// `r_sce·η_sc·η_e`.
pub fn rate_sc_e(r_sce: f64, eta_sc_mw: f64, eta_e_mw: f64) -> Result<f64> {
    ensure_non_negative("r_sce", r_sce)?;
    ensure_unit_interval("eta_sc_mw", eta_sc_mw)?;
    ensure_unit_interval("eta_e_mw", eta_e_mw)?;
    Ok(r_sce * eta_sc_mw * eta_e_mw)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaitMode {
    /// Term-by-term sum of the synchronized-round series.
    Series,
    /// `(3 − 2p)/(p(2 − p))` rounds.
    #[default]
    ClosedForm,
}

/// Relative tail tolerance of the series evaluation.
pub const SERIES_TAIL_TOL: f64 = 1e-12;

/// Expected number of synchronized rounds until both nodes have succeeded,
/// each with probability `p` per round.
pub fn expected_max_rounds(p: f64) -> Result<f64> {
    check_probability(p)?;
    Ok((3.0 - 2.0 * p) / (p * (2.0 - p)))
}

fn check_probability(p: f64) -> Result<()> {
    ensure_unit_interval("p_succ", p)?;
    if p == 0.0 {
        return Err(Error::Divergent("success probability is zero; waiting time is infinite".into()));
    }
    Ok(())
}

/// Series form of [`expected_max_rounds`].
///
/// Term `i` is `(i+2)·p²·q^{i+1}·[q^{i+1} + 2·Σ_{j≤i} q^j]` with `q = 1 − p`,
/// plus a leading `p²` for the single-round outcome. Summation stops once the
/// geometric tail bound `2q^K((K+1)p + q)/p` drops below
/// [`SERIES_TAIL_TOL`] times the partial sum.
pub fn expected_max_rounds_series(p: f64) -> Result<f64> {
    check_probability(p)?;
    let q = 1.0 - p;
    let p2 = p * p;
    let mut sum = p2;
    let mut inner = 0.0; // Σ_{j≤i} q^j
    let mut q_j = 1.0; // q^i
    let mut i: u64 = 0;
    loop {
        inner += q_j;
        let q_next = q_j * q; // q^{i+1}
        let term = (i as f64 + 2.0) * p2 * q_next * (q_next + 2.0 * inner);
        sum += term;
        // The last included count is K = i + 2.
        let k = i as f64 + 2.0;
        let q_k = q_next * q;
        let tail = 2.0 * q_k * ((k + 1.0) * p + q) / p;
        if tail < SERIES_TAIL_TOL * sum {
            return Ok(sum);
        }
        q_j = q_next;
        i += 1;
    }
}

/// Mean superconductor–spin entanglement time, seconds.
pub fn tau_sc_e(p_succ: f64, r_sce: f64, mode: WaitMode) -> Result<f64> {
    ensure_positive("r_sce", r_sce)?;
    let rounds = match mode {
        WaitMode::Series => expected_max_rounds_series(p_succ)?,
        WaitMode::ClosedForm => expected_max_rounds(p_succ)?,
    };
    Ok(rounds / r_sce)
}

/// Sequence breakdown behind the memory-based rate, seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MemoryCycle {
    pub tau_init: f64,
    pub tau_ee: f64,
    pub tau_swap: f64,
    pub tau_sce: f64,
    pub tau_bsm: f64,
}

impl MemoryCycle {
    pub fn total(&self) -> f64 {
        self.tau_init + self.tau_ee + self.tau_swap + self.tau_sce + self.tau_bsm
    }
}

pub fn memory_cycle(t: &DerivedTiming, e: &EfficiencySet, r_ee: f64, r_sce: f64) -> Result<MemoryCycle> {
    e.validate()?;
    let r = rate_ee(r_ee, e.eta_e_opt)?;
    if r == 0.0 {
        return Err(Error::Divergent("remote spin-spin rate is zero".into()));
    }
    Ok(MemoryCycle {
        tau_init: t.tau_init_total,
        tau_ee: 1.0 / r,
        tau_swap: t.tau_n_swap,
        tau_sce: tau_sc_e(e.p_sce(), r_sce, WaitMode::ClosedForm)?,
        tau_bsm: t.tau_bsm,
    })
}

/// Memory-based superconductor–superconductor rate, Hz.
pub fn rate_sc_sc_mem(t: &DerivedTiming, e: &EfficiencySet, r_ee: f64, r_sce: f64) -> Result<f64> {
    Ok(1.0 / memory_cycle(t, e, r_ee, r_sce)?.total())
}

/// [`rate_sc_sc_mem`] with the attempt rates taken from the parameter set.
pub fn rate_for_case(p: &TimingParamSet, e: &EfficiencySet) -> Result<f64> {
    rate_sc_sc_mem(&derive_gate_times(p)?, e, p.r_ee(), p.r_sce())
}

/// Direct-conversion rate `½·r·η_DC²·η_loss²`, Hz.
pub fn rate_dc(r_scsc: f64, eta_dc: f64, eta_loss_dc: f64) -> Result<f64> {
    ensure_non_negative("r_scsc", r_scsc)?;
    ensure_unit_interval("eta_dc", eta_dc)?;
    ensure_unit_interval("eta_loss_dc", eta_loss_dc)?;
    Ok(0.5 * r_scsc * eta_dc * eta_dc * eta_loss_dc * eta_loss_dc)
}

/// Default microwave time-bin generation rate of the direct link, Hz.
pub const DEFAULT_R_SCSC: f64 = 1e6;

/// Two memories alternating: preparation hidden behind delivery, Hz.
pub fn parallel_memory_rate(t: &DerivedTiming, e: &EfficiencySet, r_sce: f64) -> Result<f64> {
    e.validate()?;
    let wait = tau_sc_e(e.p_sce(), r_sce, WaitMode::ClosedForm)?;
    Ok(1.0 / (wait + t.tau_bsm))
}

/// Published operating points of the entangled-photon link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntangledPhotonPoint {
    pub heat_w: f64,
    pub rate_min_hz: f64,
    pub rate_max_hz: f64,
}

pub const ENTANGLED_PHOTON_REFERENCE: [EntangledPhotonPoint; 2] = [
    EntangledPhotonPoint {
        heat_w: 10e-6,
        rate_min_hz: 1e3,
        rate_max_hz: 10e3,
    },
    EntangledPhotonPoint {
        heat_w: 100e-6,
        rate_min_hz: 10e3,
        rate_max_hz: 100e3,
    },
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Memory,
    DirectConversion,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Memory => "memory",
            Self::DirectConversion => "dc",
        }
    }
}

/// One point of the rate comparison. `eta` is `η_e^mw` for memory rows and
/// `η_DC` for direct-conversion rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub eta: f64,
    pub scheme: Scheme,
    /// `None` for direct-conversion rows.
    pub case: Option<CaseLabel>,
    pub rate_hz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    Memory,
    DirectConversion,
    Tie,
    /// Both rates vanish.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossover {
    pub case: CaseLabel,
    pub eta_e_mw: f64,
    pub eta_dc: f64,
    pub memory_hz: f64,
    pub dc_hz: f64,
    pub winner: Winner,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossoverTable {
    pub rows: Vec<ComparisonRow>,
    pub crossovers: Vec<Crossover>,
}

/// Memory rate at a given `η_e^mw`, taking the zero-efficiency limit as 0.
fn memory_rate_or_zero(p: &TimingParamSet, base: &EfficiencySet, eta_e_mw: f64) -> Result<f64> {
    let e = EfficiencySet { eta_e_mw, ..*base };
    match rate_for_case(p, &e) {
        Err(Error::Divergent(_)) => Ok(0.0),
        other => other,
    }
}

/// Memory rates per case over `eta_grid`, direct-conversion rates over
/// `dc_grid`, and a winner for every `(case, η_e^mw, η_DC)` triple.
///
/// `base` supplies `η_opt`, `η_sc` and `η_loss`; its `η_e^mw` and `η_DC` are
/// replaced by the grid values.
pub fn crossover_table(
    cases: &[TimingParamSet],
    base: &EfficiencySet,
    eta_grid: &[f64],
    dc_grid: &[f64],
    r_scsc: f64,
) -> Result<CrossoverTable> {
    if cases.is_empty() || eta_grid.is_empty() || dc_grid.is_empty() {
        return Err(Error::invalid("crossover_table", "cases and grids must be non-empty"));
    }
    let dc: Vec<f64> = dc_grid
        .iter()
        .map(|&eta| rate_dc(r_scsc, eta, base.eta_loss_dc))
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut crossovers = Vec::new();
    for case in cases {
        for &eta in eta_grid {
            let memory_hz = memory_rate_or_zero(case, base, eta)?;
            rows.push(ComparisonRow {
                eta,
                scheme: Scheme::Memory,
                case: Some(case.label),
                rate_hz: memory_hz,
            });
            for (&eta_dc, &dc_hz) in dc_grid.iter().zip(&dc) {
                let winner = if memory_hz == 0.0 && dc_hz == 0.0 {
                    Winner::Degenerate
                } else if memory_hz > dc_hz {
                    Winner::Memory
                } else if dc_hz > memory_hz {
                    Winner::DirectConversion
                } else {
                    Winner::Tie
                };
                crossovers.push(Crossover {
                    case: case.label,
                    eta_e_mw: eta,
                    eta_dc,
                    memory_hz,
                    dc_hz,
                    winner,
                });
            }
        }
    }
    for (&eta, &rate_hz) in dc_grid.iter().zip(&dc) {
        rows.push(ComparisonRow {
            eta,
            scheme: Scheme::DirectConversion,
            case: None,
            rate_hz,
        });
    }
    Ok(CrossoverTable { rows, crossovers })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn us(x: f64) -> f64 {
        x * 1e6
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn case_b_gate_times() {
        let t = derive_gate_times(&TimingParamSet::case_b()).unwrap();
        assert!(close(us(t.tau_pi2_e), 0.025, 1e-12));
        assert!(close(us(t.tau_cen), 1.25, 1e-12));
        assert!(close(us(t.tau_cne), 0.05, 1e-12));
        assert!(close(us(t.tau_n_init), 6.3, 1e-12));
        assert!(close(us(t.tau_n_swap), 1.3, 1e-12));
    }

    #[test]
    fn case_a_uses_override_and_geometric_gate() {
        let t = derive_gate_times(&TimingParamSet::case_a()).unwrap();
        assert!(close(us(t.tau_pi2_e), 0.5, 1e-12));
        assert!(close(us(t.tau_cen), 10.0, 1e-12));
        assert!(close(us(t.tau_cne), 2.0, 1e-12));
        assert!(close(us(t.tau_n_init), 17.0, 1e-12));
        assert!(close(us(t.tau_n_swap), 12.0, 1e-12));
    }

    #[test]
    fn missing_nuclear_rabi_is_rejected() {
        let p = TimingParamSet {
            tau_cen_override: None,
            ..TimingParamSet::case_a()
        };
        assert!(derive_gate_times(&p).unwrap_err().is_configuration());
    }

    #[test]
    fn spin_spin_and_spin_sc_rates() {
        assert_eq!(rate_ee(100e3, 1.0).unwrap(), 50e3);
        assert_eq!(rate_ee(100e3, 0.0).unwrap(), 0.0);
        assert!(close(rate_ee(100e3, 0.9).unwrap(), 40.5e3, 1e-12));
        assert!(close(rate_sc_e(500e3, 1.0, 0.1).unwrap(), 50e3, 1e-12));
        assert!(close(rate_sc_e(500e3, 1.0, 0.02).unwrap(), 10e3, 1e-12));
        assert!(close(rate_sc_e(500e3, 0.9, 0.1).unwrap(), 45e3, 1e-12));
        assert!(rate_sc_e(500e3, 1.2, 0.1).is_err());
    }

    #[test]
    fn waiting_time_series_and_closed_form() {
        assert!(close(tau_sc_e(1.0, 500e3, WaitMode::Series).unwrap(), 2e-6, 1e-15));
        assert!(close(tau_sc_e(0.1, 500e3, WaitMode::ClosedForm).unwrap(), 29.473_684e-6, 1e-6));
        assert!(close(tau_sc_e(0.5, 500e3, WaitMode::ClosedForm).unwrap(), 2.0 / 0.75 / 5e5, 1e-12));
        for p in [0.01, 0.05, 0.1, 0.5, 1.0] {
            let s = expected_max_rounds_series(p).unwrap();
            let c = expected_max_rounds(p).unwrap();
            assert!(close(s, c, 1e-9), "p={p}: {s} vs {c}");
        }
        assert!(matches!(tau_sc_e(0.0, 500e3, WaitMode::Series), Err(Error::Divergent(_))));
    }

    #[test]
    fn table_rates() {
        let e = EfficiencySet::default();
        let rates: Vec<f64> = TimingParamSet::all_cases()
            .iter()
            .map(|p| rate_for_case(p, &e).unwrap())
            .collect();
        assert!(close(rates[0], 1.0 / 88.5e-6, 1e-9), "{}", rates[0]);
        assert!(close(rates[1], 1.0 / 55.925e-6, 1e-9), "{}", rates[1]);
        assert!(close(rates[2], 1.0 / 52.3925e-6, 1e-9), "{}", rates[2]);
    }

    #[test]
    fn zero_optical_efficiency_diverges() {
        let t = derive_gate_times(&TimingParamSet::case_b()).unwrap();
        let e = EfficiencySet {
            eta_e_opt: 0.0,
            ..EfficiencySet::default()
        };
        assert!(matches!(rate_sc_sc_mem(&t, &e, 1e5, 5e5), Err(Error::Divergent(_))));
    }

    #[test]
    fn direct_conversion() {
        assert!(close(rate_dc(1e6, 0.1, 1.0).unwrap(), 5e3, 1e-12));
        assert_eq!(rate_dc(1e6, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(rate_dc(1e6, 1.0, 1.0).unwrap(), 5e5);
    }

    #[test]
    fn parallel_rate() {
        let e = EfficiencySet::default();
        let b = TimingParamSet::case_b();
        let r = parallel_memory_rate(&derive_gate_times(&b).unwrap(), &e, b.r_sce()).unwrap();
        assert!(close(r, 1.0 / 23.325e-6, 1e-12));
        let c = TimingParamSet::case_c();
        let r = parallel_memory_rate(&derive_gate_times(&c).unwrap(), &e, c.r_sce()).unwrap();
        assert!((r - 45e3).abs() < 1e3, "{r}");
    }

    #[test]
    fn crossover_flags() {
        let table = crossover_table(
            &[TimingParamSet::case_b()],
            &EfficiencySet::default(),
            &[0.0, 0.1, 1.0],
            &[0.0, 0.1, 1.0],
            DEFAULT_R_SCSC,
        )
        .unwrap();
        assert_eq!(table.rows.len(), 6);
        let find = |m: f64, d: f64| {
            *table
                .crossovers
                .iter()
                .find(|c| c.eta_e_mw == m && c.eta_dc == d)
                .unwrap()
        };
        let mid = find(0.1, 0.1);
        assert!((mid.memory_hz - 12.0e3).abs() < 0.5e3, "{}", mid.memory_hz);
        assert_eq!(mid.winner, Winner::Memory);
        assert_eq!(find(1.0, 1.0).winner, Winner::DirectConversion);
        assert_eq!(find(0.0, 0.0).winner, Winner::Degenerate);
        assert!(crossover_table(&[], &EfficiencySet::default(), &[0.1], &[0.1], 1e6).is_err());
    }

    #[test]
    fn case_labels_round_trip() {
        for l in [CaseLabel::A, CaseLabel::B, CaseLabel::C, CaseLabel::Custom] {
            assert_eq!(l.as_str().parse::<CaseLabel>().unwrap(), l);
        }
        assert!("D".parse::<CaseLabel>().is_err());
    }
}
