// Copyright 2026 The spinlink Authors
// SPDX-License-Identifier: Apache-2.0

//! Command-line driver: loads a [`RunConfig`], runs one subcommand and writes
//! its CSV/JSON artifacts.
//!
//! Nothing is written unless the whole computation succeeds. Exit status is
//! 0 on success, 2 for usage or configuration errors, 3 for numerical
//! failures and 4 for I/O failures. Command-line parse errors are reported by
//! clap under the `usage` category.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use spinlink::lindblad::{
    evolve_with, max_spin_population, sweep_transfer, DensityMatrix, EvolveOptions, Frame, PeakTransfer,
    SweepSettings, TrajectoryDiagnostics, TripartiteParams, DISSIPATOR_CONVENTION,
};
use spinlink::protocol_mc::{simulate_parallel, simulate_protocol, McResult, PipelineResult, ProtocolConfig};
use spinlink::rates::{
    crossover_table, derive_gate_times, memory_cycle, parallel_memory_rate, CaseLabel, EfficiencySet, TimingParamSet,
};
use spinlink::spin_levels::{nv0_levels, orbital_mixing, transmission_breakdown, OrbitalMixing, BASIS_ORDER};
use spinlink::statevector::{heralding_success_probability, run_single_photon_protocol, two_photon_outcomes};
use spinlink::thermal::heat_budget;

pub use config::RunConfig;
use output::{fmt_num, Artifacts, Table};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "SPINLINK_OUT";
const FALLBACK_OUT_DIR: &str = "spinlink-out";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn category(&self) -> &'static str {
        match self {
            Self::Config(_) => "config",
            Self::Numerical(_) => "numerical",
            Self::Io { .. } => "io",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
            Self::Io { .. } => 4,
        }
    }
}

impl From<spinlink::Error> for CliError {
    fn from(e: spinlink::Error) -> Self {
        if e.is_configuration() {
            Self::Config(e.to_string())
        } else {
            Self::Numerical(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "spinlink", version, about = "Spin-memory quantum link simulators and rate models")]
pub struct Cli {
    /// TOML run configuration; defaults are used for anything not given.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory. Falls back to the config, then $SPINLINK_OUT, then
    /// ./spinlink-out.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Random seed for Monte Carlo runs.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single-photon transfer trajectory through resonator, phonon and spin.
    Transfer(TransferArgs),
    /// Peak transfer efficiency over a coupling × quality-factor grid.
    SweepTransfer(SweepArgs),
    /// Memory-based link rate for the reference node designs.
    Rates(RatesArgs),
    /// Memory-based against direct-conversion rates.
    Compare(CompareArgs),
    /// Monte Carlo of the heralded memory protocol.
    ProtocolMc(ProtocolArgs),
    /// Heralding fidelity and probability against path phase.
    Herald(HeraldArgs),
    /// Cryogenic heat budget of microwave spin control.
    Heat(HeatArgs),
    /// Energy levels and orbital mixing of the spin-orbit ground state.
    Levels(LevelsArgs),
    /// Optical detection efficiency chain.
    Efficiency(EfficiencyArgs),
}

#[derive(Debug, Args)]
pub struct TransferArgs {
    /// Phonon–spin coupling, Hz.
    #[arg(long)]
    pub g_m_e: Option<f64>,
    /// Resonator quality factor; sets the resonator decay rate.
    #[arg(long)]
    pub q_mw: Option<f64>,
    #[arg(long, value_name = "SECONDS")]
    pub t_end: Option<f64>,
    #[arg(long, value_name = "SECONDS")]
    pub dt: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Points on the coupling axis.
    #[arg(long)]
    pub g_points: Option<usize>,
    /// Points on the quality-factor axis.
    #[arg(long)]
    pub q_points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EfficiencyOverrides {
    /// Spin microwave emission/absorption efficiency.
    #[arg(long)]
    pub eta_e_mw: Option<f64>,
    /// Optical detection efficiency.
    #[arg(long)]
    pub eta_e_opt: Option<f64>,
    /// Superconducting qubit microwave efficiency.
    #[arg(long)]
    pub eta_sc_mw: Option<f64>,
}

impl EfficiencyOverrides {
    fn apply(&self, mut e: EfficiencySet) -> Result<EfficiencySet, CliError> {
        if let Some(v) = self.eta_e_mw {
            e.eta_e_mw = v;
        }
        if let Some(v) = self.eta_e_opt {
            e.eta_e_opt = v;
        }
        if let Some(v) = self.eta_sc_mw {
            e.eta_sc_mw = v;
        }
        e.validate()?;
        Ok(e)
    }
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    /// One reference design.
    #[arg(long, value_parser = parse_case, conflicts_with = "all_cases")]
    pub case: Option<CaseLabel>,
    /// All three reference designs (the default).
    #[arg(long)]
    pub all_cases: bool,
    #[command(flatten)]
    pub efficiencies: EfficiencyOverrides,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Direct-conversion time-bin rate, Hz.
    #[arg(long)]
    pub r_scsc: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ProtocolArgs {
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, value_parser = parse_case, default_value = "B")]
    pub case: CaseLabel,
    #[command(flatten)]
    pub efficiencies: EfficiencyOverrides,
    /// Memories per node; 2 or more also runs the pipeline simulation.
    #[arg(long)]
    pub parallel: Option<u32>,
}

#[derive(Debug, Args)]
pub struct HeraldArgs {
    /// Phase samples over the configured range.
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct HeatArgs {
    /// Start from the ten-fold faster gate preset instead of the config.
    #[arg(long)]
    pub high_power: bool,
    #[arg(long, value_name = "HZ")]
    pub rabi_target: Option<f64>,
    #[arg(long, value_name = "HZ_PER_T")]
    pub gyromagnetic: Option<f64>,
    #[arg(long, value_name = "M")]
    pub conductor_distance: Option<f64>,
    #[arg(long, value_name = "OHM")]
    pub line_impedance: Option<f64>,
    #[arg(long, value_name = "DB_PER_M")]
    pub attenuation_db_per_m: Option<f64>,
    #[arg(long, value_name = "M")]
    pub line_length: Option<f64>,
    #[arg(long)]
    pub duty_cycle: Option<f64>,
    #[arg(long, value_name = "W")]
    pub optical_power: Option<f64>,
    #[arg(long, value_name = "W")]
    pub cooling_power: Option<f64>,
    #[arg(long, value_name = "W", conflicts_with = "current_derived")]
    pub drive_power: Option<f64>,
    /// Use the current-derived I²Z as the drive power.
    #[arg(long)]
    pub current_derived: bool,
    #[arg(long)]
    pub power_multiplier: Option<f64>,
    #[arg(long, value_name = "OHM")]
    pub contact_resistance: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LevelsArgs {
    #[arg(long, value_name = "HZ")]
    pub eps_perp: Option<f64>,
    #[arg(long, value_name = "HZ")]
    pub d_perp: Option<f64>,
    #[arg(long, value_name = "T")]
    pub b_z: Option<f64>,
    #[arg(long, value_name = "HZ")]
    pub lambda_so: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EfficiencyArgs {
    #[arg(long, value_name = "HZ")]
    pub g_opt: Option<f64>,
    #[arg(long, value_name = "HZ")]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub eta_coupling: Option<f64>,
    #[arg(long)]
    pub eta_loss: Option<f64>,
    #[arg(long)]
    pub eta_det: Option<f64>,
}

fn parse_case(s: &str) -> Result<CaseLabel, String> {
    match s.parse::<CaseLabel>() {
        Ok(CaseLabel::Custom) | Err(_) => Err(format!("expected A, B or C, got `{s}`")),
        Ok(c) => Ok(c),
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

/// What a successful run produced.
#[derive(Debug)]
pub struct Report {
    pub summary: String,
    pub files: Vec<PathBuf>,
}

/// Runs the parsed command line.
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    set(&mut cfg.seed, cli.seed);
    let out_dir = cli
        .out
        .clone()
        .or_else(|| cfg.output.dir.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(FALLBACK_OUT_DIR));

    if cli.threads == Some(0) {
        return Err(CliError::Config("--threads must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;

    let mut artifacts = Artifacts::default();
    let summary = pool.install(|| dispatch(&cli.command, &cfg, &mut artifacts))?;
    let files = artifacts.write_all(&out_dir)?;
    Ok(Report { summary, files })
}

fn dispatch(command: &Command, cfg: &RunConfig, out: &mut Artifacts) -> Result<String, CliError> {
    match command {
        Command::Transfer(a) => transfer(a, cfg, out),
        Command::SweepTransfer(a) => sweep(a, cfg, out),
        Command::Rates(a) => rates(a, cfg, out),
        Command::Compare(a) => compare(a, cfg, out),
        Command::ProtocolMc(a) => protocol(a, cfg, out),
        Command::Herald(a) => herald(a, cfg, out),
        Command::Heat(a) => heat(a, cfg, out),
        Command::Levels(a) => levels(a, cfg, out),
        Command::Efficiency(a) => efficiency(a, cfg, out),
    }
}

#[derive(Serialize)]
struct TransferMeta {
    params: TripartiteParams,
    frame: Frame,
    t_end_s: f64,
    dt_s: f64,
    dissipator: &'static str,
    peak: PeakTransfer,
    diagnostics: TrajectoryDiagnostics,
}

fn transfer(a: &TransferArgs, cfg: &RunConfig, out: &mut Artifacts) -> Result<String, CliError> {
    let mut params = cfg.tripartite;
    set(&mut params.g_m_e, a.g_m_e);
    if let Some(q) = a.q_mw {
        if q.is_nan() || q <= 0.0 {
            return Err(CliError::Config("--q-mw must be positive".into()));
        }
        params = params.with_q_mw(q);
    }
    let t_end = a.t_end.unwrap_or(cfg.transfer.t_end_s);
    let dt = a.dt.unwrap_or(cfg.transfer.dt_s);
    let options = EvolveOptions {
        frame: Frame::Rotating,
        check_positivity: cfg.transfer.check_positivity,
    };
    let traj = evolve_with(&DensityMatrix::single_photon(&params)?, &params, t_end, dt, &options)?;
    let peak = max_spin_population(&traj)?;

    let mut table = Table::new("transfer.csv", &["t_s", "pop_mw", "pop_m", "pop_e"]);
    for k in 0..traj.len() {
        table.push(vec![
            fmt_num(traj.times[k]),
            fmt_num(traj.pop_mw[k]),
            fmt_num(traj.pop_m[k]),
            fmt_num(traj.pop_e[k]),
        ]);
    }
    out.table(&table)?;
    out.json(
        "transfer.json",
        &TransferMeta {
            params,
            frame: options.frame,
            t_end_s: t_end,
            dt_s: dt,
            dissipator: DISSIPATOR_CONVENTION,
            peak,
            diagnostics: traj.diagnostics,
        },
    )?;
    Ok(format!(
        "transfer: peak spin population {:.4} at {:.0} ns (Q_mw = {:.3e})",
        peak.eta_e_mw,
        peak.t_peak_s * 1e9,
        params.q_mw()
    ))
}

#[derive(Serialize)]
struct SweepMeta {
    base: TripartiteParams,
    g_hz: Vec<f64>,
    q_mw: Vec<f64>,
    t_end_s: f64,
    dt_s: f64,
    dissipator: &'static str,
}

fn sweep(a: &SweepArgs, cfg: &RunConfig, out: &mut Artifacts) -> Result<String, CliError> {
    let mut g_grid = cfg.sweep.g_hz;
    let mut q_grid = cfg.sweep.q_mw;
    set(&mut g_grid.points, a.g_points);
    set(&mut q_grid.points, a.q_points);
    let (g, q) = (g_grid.values(), q_grid.values());
    let settings = SweepSettings {
        t_end: cfg.transfer.t_end_s,
        dt: cfg.transfer.dt_s,
        ..SweepSettings::default()
    };
    let points = sweep_transfer(&g, &q, &cfg.tripartite, &settings)?;

    let mut table = Table::new("sweep.csv", &["g_hz", "q_mw", "eta_e_mw"]);
    for p in &points {
        table.push(vec![fmt_num(p.g_hz), fmt_num(p.q_mw), fmt_num(p.eta_e_mw)]);
    }
    out.table(&table)?;
    out.json(
        "sweep.json",
        &SweepMeta {
            base: cfg.tripartite,
            g_hz: g.clone(),
            q_mw: q.clone(),
            t_end_s: settings.t_end,
            dt_s: settings.dt,
            dissipator: DISSIPATOR_CONVENTION,
        },
    )?;
    let best = points.iter().map(|p| p.eta_e_mw).fold(0.0, f64::max);
    Ok(format!("sweep-transfer: {} x {} points, best peak {best:.4}", g.len(), q.len()))
}

const RATES_HEADER: &[&str] = &[
    "case",
    "hyperfine_a_hz",
    "rabi_e_hz",
    "rabi_n_hz",
    "tau_e_init_s",
    "tau_ee_attempt_s",
    "tau_e_ss_s",
    "tau_mw_emit_s",
    "tau_mw_abs_s",
    "tau_pi2_e_s",
    "tau_cen_s",
    "tau_cne_s",
    "tau_n_init_s",
    "tau_n_swap_s",
    "tau_bsm_s",
    "tau_init_s",
    "tau_ee_s",
    "tau_sce_s",
    "cycle_s",
    "rate_hz",
    "parallel_rate_hz",
];

fn rates_row(p: &TimingParamSet, e: &EfficiencySet) -> Result<(Vec<String>, f64), CliError> {
    let t = derive_gate_times(p)?;
    let m = memory_cycle(&t, e, p.r_ee(), p.r_sce())?;
    let rate = 1.0 / m.total();
    let parallel = parallel_memory_rate(&t, e, p.r_sce())?;
    let row = vec![
        p.label.to_string(),
        fmt_num(p.hyperfine_a),
        fmt_num(p.rabi_e),
        p.rabi_n.map(fmt_num).unwrap_or_default(),
        fmt_num(p.tau_e_init),
        fmt_num(p.tau_ee_attempt),
        fmt_num(p.tau_e_ss),
        fmt_num(p.tau_mw_emit),
        fmt_num(p.tau_mw_abs),
        fmt_num(t.tau_pi2_e),
        fmt_num(t.tau_cen),
        fmt_num(t.tau_cne),
        fmt_num(t.tau_n_init),
        fmt_num(t.tau_n_swap),
        fmt_num(t.tau_bsm),
        fmt_num(m.tau_init),
        fmt_num(m.tau_ee),
        fmt_num(m.tau_sce),
        fmt_num(m.total()),
        fmt_num(rate),
        fmt_num(parallel),
    ];
    Ok((row, rate))
}

fn case_params(cfg: &RunConfig, label: CaseLabel) -> Result<TimingParamSet, CliError> {
    match label {
        CaseLabel::A => Ok(cfg.cases.a),
        CaseLabel::B => Ok(cfg.cases.b),
        CaseLabel::C => Ok(cfg.cases.c),
        CaseLabel::Custom => Err(CliError::Config("case must be A, B or C".into())),
    }
}

fn rates(a: &RatesArgs, cfg: &RunConfig, out: &mut Artifacts) -> Result<String, CliError> {
    let e = a.efficiencies.apply(cfg.efficiencies)?;
    let cases: Vec<TimingParamSet> = match a.case {
        Some(label) => vec![case_params(cfg, label)?],
        None => cfg.cases.all().to_vec(),
    };
    let mut table = Table::new("rates.csv", RATES_HEADER);
    let mut parts = Vec::new();
    for p in &cases {
        let (row, rate) = rates_row(p, &e)?;
        table.push(row);
        parts.push(format!("{} {:.1} kHz", p.label, rate / 1e3));
    }
    out.table(&table)?;
    Ok(format!("rates: {}", parts.join(", ")))
}

fn compare(a: &CompareArgs, cfg: &RunConfig, out: &mut Artifacts) -> Result<String, CliError> {
    let r_scsc = a.r_scsc.unwrap_or(cfg.compare.r_scsc_hz);
    let table = crossover_table(
        &cfg.cases.all(),
        &cfg.efficiencies,
        &cfg.compare.eta_e_mw.values(),
        &cfg.compare.eta_dc.values(),
        r_scsc,
    )?;

    let mut rows = Table::new("compare.csv", &["eta", "scheme", "case", "rate_hz"]);
    for r in &table.rows {
        rows.push(vec![
            fmt_num(r.eta),
            r.scheme.as_str().to_string(),
            r.case.map(|c| c.to_string()).unwrap_or_default(),
            fmt_num(r.rate_hz),
        ]);
    }
    out.table(&rows)?;

    let mut cross = Table::new(
        "crossover.csv",
        &["case", "eta_e_mw", "eta_dc", "memory_hz", "dc_hz", "winner"],
    );
    for c in &table.crossovers {
        cross.push(vec![
            c.case.to_string(),
            fmt_num(c.eta_e_mw),
            fmt_num(c.eta_dc),
            fmt_num(c.memory_hz),
            fmt_num(c.dc_hz),
            serde_json::to_value(c.winner)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default(),
        ]);
    }
    out.table(&cross)?;
    Ok(format!(
        "compare: {} rate rows, {} crossover cells",
        table.rows.len(),
        table.crossovers.len()
    ))
}

#[derive(Serialize)]
struct ProtocolDoc {
    config: ProtocolConfig,
    closed_form_rate_hz: f64,
    result: McResult,
    parallel_closed_form_hz: Option<f64>,
    pipeline: Option<PipelineResult>,
}

fn protocol(a: &ProtocolArgs, cfg: &RunConfig, out: &mut Artifacts) -> Result<String, CliError> {
    let timing = case_params(cfg, a.case)?;
    let efficiencies = a.efficiencies.apply(cfg.efficiencies)?;
    let pc = ProtocolConfig {
        n_trials: a.trials.unwrap_or(cfg.protocol.n_trials),
        rng_seed: cfg.seed,
        parallel_memories: a.parallel.unwrap_or(cfg.protocol.parallel_memories),
        reinit_on_failed_sce: cfg.protocol.reinit_on_failed_sce,
        ..ProtocolConfig::new(timing, efficiencies)
    };
    let derived = pc.validate()?;
    let result = simulate_protocol(&pc)?;
    let closed = 1.0 / memory_cycle(&derived, &efficiencies, pc.r_ee_attempt, pc.r_sce_attempt)?.total();
    let (pipeline, parallel_closed) = if pc.parallel_memories >= 2 {
        (
            Some(simulate_parallel(&pc)?),
            Some(parallel_memory_rate(&derived, &efficiencies, pc.r_sce_attempt)?),
        )
    } else {
        (None, None)
    };

    let mut hist = Table::new("protocol_mc_histograms.csv", &["histogram", "attempts", "count"]);
    for (name, h) in [
        ("ee", &result.histograms.ee),
        ("sce_node_a", &result.histograms.sce_node_a),
        ("sce_node_b", &result.histograms.sce_node_b),
        ("sce_max", &result.histograms.sce_max),
    ] {
        for (k, v) in h {
            hist.push(vec![name.to_string(), k.to_string(), v.to_string()]);
        }
    }
    out.table(&hist)?;

    let mut summary = format!(
        "protocol-mc: case {} {:.3} +/- {:.3} kHz over {} trials (closed form {:.3} kHz)",
        a.case,
        result.rate_hz / 1e3,
        result.rate_stderr_hz / 1e3,
        result.n_trials,
        closed / 1e3
    );
    if let Some(p) = &pipeline {
        summary.push_str(&format!(
            "; {} memories {:.2} kHz, {}-limited",
            p.parallel_memories,
            p.rate_hz / 1e3,
            serde_json::to_value(p.limited_by)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default()
        ));
    }
    out.json(
        "protocol_mc.json",
        &ProtocolDoc {
            config: pc,
            closed_form_rate_hz: closed,
            result,
            parallel_closed_form_hz: parallel_closed,
            pipeline,
        },
    )?;
    Ok(summary)
}

fn herald(a: &HeraldArgs, cfg: &RunConfig, out: &mut Artifacts) -> Result<String, CliError> {
    let mut grid = cfg.herald.theta_rad;
    set(&mut grid.points, a.points);
    let thetas = grid.values();

    let mut table = Table::new("herald.csv", &["theta_rad", "protocol", "fidelity", "p_herald"]);
    let mut patterns = Table::new(
        "herald_patterns.csv",
        &["theta_rad", "first", "second", "bell_sign", "probability", "fidelity"],
    );
    let mut worst_single = f64::INFINITY;
    for &theta in &thetas {
        let single = run_single_photon_protocol(theta);
        let f_single = single.bell_fidelity().unwrap_or(0.0);
        worst_single = worst_single.min(f_single);
        table.push(vec![
            fmt_num(theta),
            "single-photon".into(),
            fmt_num(f_single),
            fmt_num(heralding_success_probability(false, theta)),
        ]);
        let outcomes = two_photon_outcomes(theta);
        let f_two = outcomes.iter().map(|o| o.bell_fidelity()).fold(f64::INFINITY, f64::min);
        table.push(vec![
            fmt_num(theta),
            "two-photon".into(),
            fmt_num(f_two),
            fmt_num(heralding_success_probability(true, theta)),
        ]);
        for o in &outcomes {
            patterns.push(vec![
                fmt_num(theta),
                label(o.first),
                label(o.second),
                o.bell_sign.to_string(),
                fmt_num(o.probability),
                fmt_num(o.bell_fidelity()),
            ]);
        }
    }
    out.table(&table)?;
    out.table(&patterns)?;
    Ok(format!(
        "herald: {} phases, worst single-photon fidelity {:.4}",
        thetas.len(),
        if thetas.is_empty() { f64::NAN } else { worst_single }
    ))
}

fn label<T: Serialize>(v: T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn heat(a: &HeatArgs, cfg: &RunConfig, out: &mut Artifacts) -> Result<String, CliError> {
    let mut s = if a.high_power {
        spinlink::thermal::HeatScenario::high_power()
    } else {
        cfg.heat
    };
    set(&mut s.rabi_target, a.rabi_target);
    set(&mut s.gyromagnetic, a.gyromagnetic);
    set(&mut s.conductor_distance, a.conductor_distance);
    set(&mut s.line_impedance, a.line_impedance);
    set(&mut s.attenuation_db_per_m, a.attenuation_db_per_m);
    set(&mut s.line_length_m, a.line_length);
    set(&mut s.duty_cycle, a.duty_cycle);
    set(&mut s.optical_power_w, a.optical_power);
    set(&mut s.cooling_power_w, a.cooling_power);
    set(&mut s.power_multiplier, a.power_multiplier);
    set(&mut s.contact_resistance_ohm, a.contact_resistance);
    if a.current_derived {
        s.drive_power_w = None;
    } else if let Some(p) = a.drive_power {
        s.drive_power_w = Some(p);
    }
    let report = heat_budget(&s)?;
    out.json("heat.json", &report)?;
    Ok(format!(
        "heat: {:.3} nW microwave, {:.3} nW total, I^2Z input {:.1} uW",
        report.microwave_dissipated_w * 1e9,
        report.total_w * 1e9,
        report.input_power_rms_w * 1e6
    ))
}

#[derive(Serialize)]
struct LevelsMeta {
    basis: &'static str,
    mixing: OrbitalMixing,
}

fn levels(a: &LevelsArgs, cfg: &RunConfig, out: &mut Artifacts) -> Result<String, CliError> {
    let mut p = cfg.levels.params;
    set(&mut p.eps_perp, a.eps_perp);
    set(&mut p.d_perp, a.d_perp);
    set(&mut p.b_z, a.b_z);
    set(&mut p.lambda_so, a.lambda_so);
    let levels = nv0_levels(&p)?;
    let mixing = orbital_mixing(&p, &cfg.levels.thresholds)?;

    let mut table = Table::new("levels.csv", &["eigenvalue_hz", "orbit_character", "spin_character"]);
    for l in &levels {
        table.push(vec![
            fmt_num(l.eigenvalue_hz),
            l.orbit_character.label().to_string(),
            l.spin_character.label().to_string(),
        ]);
    }
    out.table(&table)?;
    out.json(
        "levels.json",
        &LevelsMeta {
            basis: BASIS_ORDER,
            mixing,
        },
    )?;
    Ok(format!(
        "levels: ground {:.4e} Hz, mixing angle {:.4} rad ({})",
        levels[0].eigenvalue_hz,
        mixing.angle_rad,
        label(mixing.regime)
    ))
}

fn efficiency(a: &EfficiencyArgs, cfg: &RunConfig, out: &mut Artifacts) -> Result<String, CliError> {
    let mut c = cfg.chain;
    set(&mut c.g_opt, a.g_opt);
    set(&mut c.kappa, a.kappa);
    set(&mut c.eta_coupling, a.eta_coupling);
    set(&mut c.eta_loss, a.eta_loss);
    set(&mut c.eta_det, a.eta_det);
    let b = transmission_breakdown(&c)?;
    let mut table = Table::new(
        "efficiency.csv",
        &["cooperativity", "eta_int", "eta_coupling", "eta_loss", "eta_det", "eta_e_opt"],
    );
    table.push(
        [b.cooperativity, b.eta_int, b.eta_coupling, b.eta_loss, b.eta_det, b.eta_e_opt]
            .into_iter()
            .map(fmt_num)
            .collect(),
    );
    out.table(&table)?;
    Ok(format!(
        "efficiency: C = {:.1}, eta_int = {:.5}, eta_e_opt = {:.4}",
        b.cooperativity, b.eta_int, b.eta_e_opt
    ))
}

/// Parses `args`, runs, prints the summary or a categorized error and
/// returns the exit status.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            if code != 0 {
                eprintln!("spinlink: error[usage]");
            }
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(report) => {
            println!("{}", report.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("spinlink: error[{}]: {e}", e.category());
            ExitCode::from(e.exit_code())
        }
    }
}
