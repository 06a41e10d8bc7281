// Copyright 2026 The spinlink Authors
// SPDX-License-Identifier: Apache-2.0

//! Microwave photon → phonon → spin transfer under a Lindblad master equation.
//!
//! The system is a microwave resonator mode `a_mw`, a mechanical mode `b_m`
//! and a two-level spin `σ_e`, coupled in a chain by beam-splitter terms:
//!
//! ```text
//! H/ħ = ω_mw a†a + ω_m b†b + ω_e σ†σ
//!     + g_mw-m (a b† + a† b) + g_m-e (b σ† + b† σ)
//! ```
//!
//! and evolved with
//!
//! ```text
//! dρ/dt = -i[H, ρ] + Σ_k (γ_k/2) (2 c_k ρ c_k† - {c_k† c_k, ρ})
//! ```
//!
//! with `c_k ∈ {a_mw, b_m, σ†σ}`. The two bosonic channels are energy decay;
//! the spin channel is pure dephasing.
//!
//! Units: every frequency, coupling and rate on the public surface is a cyclic
//! frequency in Hz (the value of `ω/2π`). They are multiplied by 2π before
//! integration. Time is in seconds.
//!
//! Basis ordering is `mw ⊗ m ⊗ spin`, spin index 0 = ground, 1 = excited, so
//! with `fock_cutoff = 1` the state `|100⟩` (one microwave photon) has index 4.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

/// Dense complex operator on the tripartite Hilbert space.
pub type Operator = DMatrix<Complex64>;

/// Human-readable statement of the dissipator convention used by [`evolve`].
pub const DISSIPATOR_CONVENTION: &str = "drho/dt = -i[H,rho] + sum_k (gamma_k/2)(2 c_k rho c_k^dag - {c_k^dag c_k, rho}); \
     gamma_k = 2*pi*gamma_hz; c = {a_mw (decay), b_m (decay), sigma_e^dag sigma_e (dephasing)}";

/// Default integration step (1 ns).
pub const DEFAULT_DT: f64 = 1e-9;
/// Default integration window (2 µs).
pub const DEFAULT_T_END: f64 = 2e-6;

/// Trace drift beyond which the integration is aborted.
pub const TRACE_WATCHDOG: f64 = 1e-6;
/// Slack allowed on populations outside `[0, 1]`.
pub const POPULATION_SLACK: f64 = 1e-8;

/// Parameters of the cavity / phonon / spin chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TripartiteParams {
    /// Microwave resonator frequency, Hz.
    pub omega_mw: f64,
    /// Mechanical mode frequency, Hz.
    pub omega_m: f64,
    /// Spin transition frequency, Hz.
    pub omega_e: f64,
    /// Piezoelectric resonator–phonon coupling, Hz.
    pub g_mw_m: f64,
    /// Phonon–spin (strain) coupling, Hz.
    pub g_m_e: f64,
    /// Resonator energy decay rate, Hz.
    pub gamma_mw: f64,
    /// Phonon energy decay rate, Hz.
    pub gamma_m: f64,
    /// Spin dephasing rate, Hz.
    pub gamma_e: f64,
    /// Highest Fock number kept in each bosonic mode.
    pub fock_cutoff: usize,
}

impl Default for TripartiteParams {
    /// Resonant 5 GHz chain with 1 MHz couplings and Q = 10⁴ cavities.
    fn default() -> Self {
        Self {
            omega_mw: 5e9,
            omega_m: 5e9,
            omega_e: 5e9,
            g_mw_m: 1e6,
            g_m_e: 1e6,
            gamma_mw: 5e5,
            gamma_m: 5e5,
            gamma_e: 1e4,
            fock_cutoff: 1,
        }
    }
}

impl TripartiteParams {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("omega_mw", self.omega_mw)?;
        ensure_positive("omega_m", self.omega_m)?;
        ensure_positive("omega_e", self.omega_e)?;
        ensure_non_negative("g_mw_m", self.g_mw_m)?;
        ensure_non_negative("g_m_e", self.g_m_e)?;
        ensure_non_negative("gamma_mw", self.gamma_mw)?;
        ensure_non_negative("gamma_m", self.gamma_m)?;
        ensure_non_negative("gamma_e", self.gamma_e)?;
        if self.fock_cutoff < 1 {
            return Err(Error::invalid("fock_cutoff", "must be >= 1"));
        }
        Ok(())
    }

    /// Levels kept per bosonic mode.
    pub fn levels(&self) -> usize {
        self.fock_cutoff + 1
    }

    pub fn dim(&self) -> usize {
        self.levels() * self.levels() * 2
    }

    /// Flat index of `|n_mw, n_m, spin⟩`.
    pub fn index(&self, n_mw: usize, n_m: usize, spin: usize) -> usize {
        (n_mw * self.levels() + n_m) * 2 + spin
    }

    /// Resonator quality factor `ω_mw / γ_mw`.
    pub fn q_mw(&self) -> f64 {
        self.omega_mw / self.gamma_mw
    }

    /// Copy with `γ_mw` set from a resonator quality factor.
    pub fn with_q_mw(mut self, q_mw: f64) -> Self {
        self.gamma_mw = self.omega_mw / q_mw;
        self
    }

    /// Copy with every decay rate set to zero.
    pub fn lossless(mut self) -> Self {
        self.gamma_mw = 0.0;
        self.gamma_m = 0.0;
        self.gamma_e = 0.0;
        self
    }
}

/// Reference frame used for integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    /// Rotating at `ω_mw` on every excitation; removes the GHz carrier.
    #[default]
    Rotating,
    /// Laboratory frame. Needs picosecond steps; meant for cross-checks.
    Lab,
}

/// Ladder operators of the three subsystems on the full space.
#[derive(Debug, Clone)]
pub struct ModeOperators {
    pub a_mw: Operator,
    pub b_m: Operator,
    pub sigma_e: Operator,
}

impl ModeOperators {
    pub fn new(params: &TripartiteParams) -> Result<Self> {
        if params.fock_cutoff < 1 {
            return Err(Error::invalid("fock_cutoff", "must be >= 1"));
        }
        let levels = params.levels();
        let boson = annihilation(levels);
        let id_boson = Operator::identity(levels, levels);
        let id_spin = Operator::identity(2, 2);
        let mut lowering = Operator::zeros(2, 2);
        lowering[(0, 1)] = Complex64::new(1.0, 0.0);

        Ok(Self {
            a_mw: boson.kronecker(&id_boson).kronecker(&id_spin),
            b_m: id_boson.kronecker(&boson).kronecker(&id_spin),
            sigma_e: id_boson.kronecker(&id_boson).kronecker(&lowering),
        })
    }

    pub fn n_mw(&self) -> Operator {
        self.a_mw.adjoint() * &self.a_mw
    }

    pub fn n_m(&self) -> Operator {
        self.b_m.adjoint() * &self.b_m
    }

    pub fn n_e(&self) -> Operator {
        self.sigma_e.adjoint() * &self.sigma_e
    }
}

fn annihilation(levels: usize) -> Operator {
    let mut a = Operator::zeros(levels, levels);
    for n in 1..levels {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Lab-frame Hamiltonian `H/ħ` in cyclic-frequency units (Hz).
pub fn build_hamiltonian(params: &TripartiteParams) -> Result<Operator> {
    build_hamiltonian_in(params, Frame::Lab)
}

/// Hamiltonian in the requested frame, Hz.
pub fn build_hamiltonian_in(params: &TripartiteParams, frame: Frame) -> Result<Operator> {
    params.validate()?;
    let ops = ModeOperators::new(params)?;
    let (n_mw, n_m, n_e) = (ops.n_mw(), ops.n_m(), ops.n_e());

    let shift = match frame {
        Frame::Lab => 0.0,
        Frame::Rotating => params.omega_mw,
    };
    let c = |x: f64| Complex64::new(x, 0.0);

    let mut h = n_mw * c(params.omega_mw - shift)
        + n_m * c(params.omega_m - shift)
        + n_e * c(params.omega_e - shift);

    let a = &ops.a_mw;
    let b = &ops.b_m;
    let s = &ops.sigma_e;
    h += (a * b.adjoint() + a.adjoint() * b) * c(params.g_mw_m);
    h += (b * s.adjoint() + b.adjoint() * s) * c(params.g_m_e);
    Ok(h)
}

/// Largest elementwise `|ρ - ρ†|`.
pub fn hermiticity_defect(m: &Operator) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn min_eigenvalue(m: &Operator) -> f64 {
    // Symmetrize first; the eigen-solver reads only one triangle.
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(herm)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// A validated, trace-normalized density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: Operator,
}

impl DensityMatrix {
    pub const HERMITICITY_TOL: f64 = 1e-10;
    pub const TRACE_TOL: f64 = 1e-8;
    pub const POSITIVITY_TOL: f64 = 1e-8;

    /// Validates Hermiticity and positivity, then normalizes the trace.
    pub fn new(entries: Operator) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::invalid("rho", "must be a non-empty square matrix"));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("rho", "contains non-finite entries"));
        }
        let defect = hermiticity_defect(&entries);
        if defect > Self::HERMITICITY_TOL {
            return Err(Error::invalid("rho", format!("not Hermitian (defect {defect:e})")));
        }
        let trace = entries.trace();
        if trace.re <= 0.0 || trace.im.abs() > Self::HERMITICITY_TOL {
            return Err(Error::invalid("rho", format!("trace {trace} is not positive real")));
        }
        let entries = entries / Complex64::new(trace.re, 0.0);
        let lowest = min_eigenvalue(&entries);
        if lowest < -Self::POSITIVITY_TOL {
            return Err(Error::invalid(
                "rho",
                format!("not positive semidefinite (min eigenvalue {lowest:e})"),
            ));
        }
        Ok(Self { entries })
    }

    /// `|ψ⟩⟨ψ|` for a non-zero state vector (normalized internally).
    pub fn pure(psi: &DVector<Complex64>) -> Result<Self> {
        Self::new(psi * psi.adjoint())
    }

    /// Projector on the Fock/spin basis state `|n_mw, n_m, spin⟩`.
    pub fn basis_state(params: &TripartiteParams, n_mw: usize, n_m: usize, spin: usize) -> Result<Self> {
        params.validate()?;
        if n_mw > params.fock_cutoff || n_m > params.fock_cutoff || spin > 1 {
            return Err(Error::invalid("basis_state", "occupation exceeds the truncated space"));
        }
        let mut psi = DVector::zeros(params.dim());
        psi[params.index(n_mw, n_m, spin)] = Complex64::new(1.0, 0.0);
        Self::pure(&psi)
    }

    /// One photon in the microwave resonator, phonon and spin in the ground state.
    pub fn single_photon(params: &TripartiteParams) -> Result<Self> {
        Self::basis_state(params, 1, 0, 0)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Operator {
        &self.entries
    }

    pub fn into_entries(self) -> Operator {
        self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.entries)
    }

    /// `Re tr(ρ O)`.
    pub fn expectation(&self, op: &Operator) -> f64 {
        expectation(&self.entries, op)
    }
}

fn expectation(rho: &Operator, op: &Operator) -> f64 {
    // tr(ρ O) = Σ_ij ρ_ij O_ji
    let n = rho.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += rho[(i, j)] * op[(j, i)];
        }
    }
    acc.re
}

/// Populations of the three subsystems over time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub pop_mw: Vec<f64>,
    pub pop_m: Vec<f64>,
    pub pop_e: Vec<f64>,
    pub diagnostics: TrajectoryDiagnostics,
}

/// Worst-case invariant residuals over every stored step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryDiagnostics {
    pub max_trace_drift: f64,
    pub max_hermiticity_defect: f64,
    /// `None` when positivity checks were disabled.
    pub min_eigenvalue: Option<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Builds a trajectory from raw series, checking the structural invariants.
    pub fn from_series(times: Vec<f64>, pop_mw: Vec<f64>, pop_m: Vec<f64>, pop_e: Vec<f64>) -> Result<Self> {
        let n = times.len();
        if pop_mw.len() != n || pop_m.len() != n || pop_e.len() != n {
            return Err(Error::invalid("trajectory", "series lengths differ"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("trajectory", "times must be strictly increasing"));
        }
        let in_range = |p: &f64| (-POPULATION_SLACK..=1.0 + POPULATION_SLACK).contains(p);
        if !(pop_mw.iter().all(in_range) && pop_m.iter().all(in_range) && pop_e.iter().all(in_range)) {
            return Err(Error::invalid("trajectory", "population outside [0, 1]"));
        }
        Ok(Self {
            times,
            pop_mw,
            pop_m,
            pop_e,
            diagnostics: TrajectoryDiagnostics {
                max_trace_drift: 0.0,
                max_hermiticity_defect: 0.0,
                min_eigenvalue: None,
            },
        })
    }
}

/// Knobs for [`evolve_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub frame: Frame,
    /// Diagonalize ρ at every stored step to check positivity.
    pub check_positivity: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            frame: Frame::Rotating,
            check_positivity: true,
        }
    }
}

/// `L(ρ) = -i(H_eff ρ - ρ H_eff†) + Σ γ c ρ c†` with
/// `H_eff = H - (i/2) Σ γ c†c`, all in angular units.
struct Liouvillian {
    h_eff: Operator,
    h_eff_dag: Operator,
    jumps: Vec<(f64, Operator, Operator)>,
}

impl Liouvillian {
    fn new(params: &TripartiteParams, frame: Frame) -> Result<Self> {
        let ops = ModeOperators::new(params)?;
        let h = build_hamiltonian_in(params, frame)? * Complex64::new(TAU, 0.0);
        let n_e = ops.n_e();
        let channels = [
            (TAU * params.gamma_mw, ops.a_mw),
            (TAU * params.gamma_m, ops.b_m),
            (TAU * params.gamma_e, n_e),
        ];

        let mut h_eff = h;
        let mut jumps = Vec::new();
        for (rate, c) in channels {
            if rate == 0.0 {
                continue;
            }
            let c_dag = c.adjoint();
            h_eff -= (&c_dag * &c) * Complex64::new(0.0, 0.5 * rate);
            jumps.push((rate, c, c_dag));
        }
        let h_eff_dag = h_eff.adjoint();
        Ok(Self { h_eff, h_eff_dag, jumps })
    }

    fn apply(&self, rho: &Operator) -> Operator {
        let minus_i = Complex64::new(0.0, -1.0);
        let mut out = (&self.h_eff * rho - rho * &self.h_eff_dag) * minus_i;
        for (rate, c, c_dag) in &self.jumps {
            out += (c * rho * c_dag) * Complex64::new(*rate, 0.0);
        }
        out
    }

    fn rk4_step(&self, rho: &Operator, h: f64) -> Operator {
        let half = Complex64::new(0.5 * h, 0.0);
        let full = Complex64::new(h, 0.0);
        let k1 = self.apply(rho);
        let k2 = self.apply(&(rho + &k1 * half));
        let k3 = self.apply(&(rho + &k2 * half));
        let k4 = self.apply(&(rho + &k3 * full));
        rho + (k1 + (k2 + k3) * Complex64::new(2.0, 0.0) + k4) * Complex64::new(h / 6.0, 0.0)
    }
}

/// Fixed-step RK4 integration from `0` to `t_end` in the rotating frame.
pub fn evolve(rho0: &DensityMatrix, params: &TripartiteParams, t_end: f64, dt: f64) -> Result<Trajectory> {
    evolve_with(rho0, params, t_end, dt, &EvolveOptions::default())
}

pub fn evolve_with(
    rho0: &DensityMatrix,
    params: &TripartiteParams,
    t_end: f64,
    dt: f64,
    options: &EvolveOptions,
) -> Result<Trajectory> {
    params.validate()?;
    ensure_positive("dt", dt)?;
    ensure_positive("t_end", t_end)?;
    if t_end < dt {
        return Err(Error::invalid("t_end", format!("must be >= dt ({dt:e} s)")));
    }
    if rho0.dim() != params.dim() {
        return Err(Error::invalid(
            "rho0",
            format!("dimension {} does not match parameters ({})", rho0.dim(), params.dim()),
        ));
    }

    let liouvillian = Liouvillian::new(params, options.frame)?;
    let ops = ModeOperators::new(params)?;
    let (n_mw, n_m, n_e) = (ops.n_mw(), ops.n_m(), ops.n_e());

    // The last step is shortened when t_end is not a multiple of dt.
    let steps = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
    let mut trajectory = Trajectory {
        times: Vec::with_capacity(steps + 1),
        pop_mw: Vec::with_capacity(steps + 1),
        pop_m: Vec::with_capacity(steps + 1),
        pop_e: Vec::with_capacity(steps + 1),
        diagnostics: TrajectoryDiagnostics {
            max_trace_drift: 0.0,
            max_hermiticity_defect: 0.0,
            min_eigenvalue: options.check_positivity.then_some(f64::INFINITY),
        },
    };

    let mut rho = rho0.entries().clone();
    let mut t = 0.0;
    record(&mut trajectory, &rho, t, 0, (&n_mw, &n_m, &n_e), options.check_positivity)?;
    for step in 1..=steps {
        let h = if step == steps { t_end - dt * (steps - 1) as f64 } else { dt };
        rho = liouvillian.rk4_step(&rho, h);
        t = if step == steps { t_end } else { dt * step as f64 };
        record(&mut trajectory, &rho, t, step, (&n_mw, &n_m, &n_e), options.check_positivity)?;
    }
    Ok(trajectory)
}

fn record(
    traj: &mut Trajectory,
    rho: &Operator,
    t: f64,
    step: usize,
    (n_mw, n_m, n_e): (&Operator, &Operator, &Operator),
    check_positivity: bool,
) -> Result<()> {
    let fail = |diagnostic: String| Error::Integration {
        step,
        time_s: t,
        diagnostic,
    };
    if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(fail("non-finite density matrix; reduce dt".into()));
    }
    let drift = (rho.trace() - Complex64::new(1.0, 0.0)).norm();
    if drift > TRACE_WATCHDOG {
        return Err(fail(format!("trace drift {drift:e} exceeds {TRACE_WATCHDOG:e}; reduce dt")));
    }
    let defect = hermiticity_defect(rho);
    if defect > DensityMatrix::HERMITICITY_TOL {
        return Err(fail(format!("Hermiticity defect {defect:e}")));
    }
    let pops = [expectation(rho, n_mw), expectation(rho, n_m), expectation(rho, n_e)];
    if let Some(p) = pops.iter().find(|p| !(-POPULATION_SLACK..=1.0 + POPULATION_SLACK).contains(*p)) {
        return Err(fail(format!("population {p} left [0, 1]; reduce dt")));
    }
    if check_positivity {
        let lowest = min_eigenvalue(rho);
        if lowest < -DensityMatrix::POSITIVITY_TOL {
            return Err(fail(format!("negative eigenvalue {lowest:e}; reduce dt")));
        }
        if let Some(m) = traj.diagnostics.min_eigenvalue.as_mut() {
            *m = m.min(lowest);
        }
    }

    let d = &mut traj.diagnostics;
    d.max_trace_drift = d.max_trace_drift.max(drift);
    d.max_hermiticity_defect = d.max_hermiticity_defect.max(defect);
    traj.times.push(t);
    traj.pop_mw.push(pops[0]);
    traj.pop_m.push(pops[1]);
    traj.pop_e.push(pops[2]);
    Ok(())
}

/// Peak spin population and the first time it is reached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeakTransfer {
    /// Estimate of the microwave-to-spin transfer efficiency η_e^mw.
    pub eta_e_mw: f64,
    pub t_peak_s: f64,
}

pub fn max_spin_population(traj: &Trajectory) -> Result<PeakTransfer> {
    let first = traj
        .pop_e
        .first()
        .ok_or_else(|| Error::invalid("trajectory", "must not be empty"))?;
    let mut best = (*first, traj.times[0]);
    for (&p, &t) in traj.pop_e.iter().zip(&traj.times).skip(1) {
        if p > best.0 {
            best = (p, t);
        }
    }
    Ok(PeakTransfer {
        eta_e_mw: best.0,
        t_peak_s: best.1,
    })
}

/// One cell of a transfer-efficiency map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub g_hz: f64,
    pub q_mw: f64,
    pub eta_e_mw: f64,
}

/// Integration window and step shared by every sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSettings {
    pub t_end: f64,
    pub dt: f64,
    pub options: EvolveOptions,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            t_end: DEFAULT_T_END,
            dt: DEFAULT_DT,
            options: EvolveOptions {
                frame: Frame::Rotating,
                check_positivity: false,
            },
        }
    }
}

/// Peak spin population over a `(g_m_e, Q_mw)` grid, row-major in `g`.
///
/// Points run in parallel on the ambient rayon pool; output order is the
/// input order regardless of scheduling.
pub fn sweep_transfer(
    g_m_e_values: &[f64],
    q_mw_values: &[f64],
    base: &TripartiteParams,
    settings: &SweepSettings,
) -> Result<Vec<SweepPoint>> {
    base.validate()?;
    for &g in g_m_e_values {
        ensure_non_negative("g_m_e", g)?;
    }
    for &q in q_mw_values {
        ensure_positive("q_mw", q)?;
    }

    let cells: Vec<(f64, f64)> = g_m_e_values
        .iter()
        .flat_map(|&g| q_mw_values.iter().map(move |&q| (g, q)))
        .collect();

    cells
        .par_iter()
        .map(|&(g, q)| {
            transfer_point(g, q, base, settings).map_err(|source| Error::SweepPoint {
                g_hz: g,
                q_mw: q,
                source: Box::new(source),
            })
        })
        .collect()
}

fn transfer_point(g: f64, q: f64, base: &TripartiteParams, settings: &SweepSettings) -> Result<SweepPoint> {
    let params = TripartiteParams { g_m_e: g, ..*base }.with_q_mw(q);
    let rho0 = DensityMatrix::single_photon(&params)?;
    let traj = evolve_with(&rho0, &params, settings.t_end, settings.dt, &settings.options)?;
    let peak = max_spin_population(&traj)?;
    Ok(SweepPoint {
        g_hz: g,
        q_mw: q,
        eta_e_mw: peak.eta_e_mw,
    })
}

/// `n` logarithmically spaced points from `start` to `stop` inclusive.
pub fn logspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let (a, b) = (start.log10(), stop.log10());
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        stop
                    } else {
                        10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64)
                    }
                })
                .collect()
        }
    }
}

/// Default coupling axis: 0.1–10 MHz, 25 points.
pub fn default_g_grid() -> Vec<f64> {
    logspace(1e5, 1e7, 25)
}

/// Default quality-factor axis: 10²–10⁶, 25 points.
pub fn default_q_grid() -> Vec<f64> {
    logspace(1e2, 1e6, 25)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn decoupled_hamiltonian_is_diagonal_sum_of_mode_energies() {
        let p = TripartiteParams {
            omega_mw: 3e9,
            omega_m: 5e9,
            omega_e: 7e9,
            g_mw_m: 0.0,
            g_m_e: 0.0,
            ..Default::default()
        };
        let h = build_hamiltonian(&p).unwrap();
        assert_eq!(h.nrows(), 8);
        for i in 0..8 {
            for j in 0..8 {
                if i != j {
                    assert_eq!(h[(i, j)], c(0.0));
                }
            }
        }
        for n_mw in 0..2 {
            for n_m in 0..2 {
                for s in 0..2 {
                    let expect = n_mw as f64 * 3e9 + n_m as f64 * 5e9 + s as f64 * 7e9;
                    assert_eq!(h[(p.index(n_mw, n_m, s), p.index(n_mw, n_m, s))].re, expect);
                }
            }
        }
    }

    #[test]
    fn reference_hamiltonian_couples_single_excitation_chain() {
        let p = TripartiteParams::default();
        let h = build_hamiltonian(&p).unwrap();
        assert_eq!(h.shape(), (8, 8));
        assert!(hermiticity_defect(&h) == 0.0);
        let photon = p.index(1, 0, 0);
        let phonon = p.index(0, 1, 0);
        let spin = p.index(0, 0, 1);
        assert_eq!(h[(photon, phonon)].norm(), 1e6);
        assert_eq!(h[(phonon, spin)].norm(), 1e6);
        assert_eq!(h[(photon, spin)].norm(), 0.0);
    }

    #[test]
    fn rejects_zero_cutoff() {
        let p = TripartiteParams {
            fock_cutoff: 0,
            ..Default::default()
        };
        assert!(matches!(build_hamiltonian(&p), Err(Error::InvalidParameter { name: "fock_cutoff", .. })));
    }

    #[test]
    fn cutoff_two_keeps_single_excitation_block() {
        let p1 = TripartiteParams::default();
        let p2 = TripartiteParams {
            fock_cutoff: 2,
            ..p1
        };
        let h1 = build_hamiltonian(&p1).unwrap();
        let h2 = build_hamiltonian(&p2).unwrap();
        assert_eq!(h2.nrows(), 18);
        let block = |p: &TripartiteParams| [p.index(0, 0, 0), p.index(1, 0, 0), p.index(0, 1, 0), p.index(0, 0, 1)];
        let (b1, b2) = (block(&p1), block(&p2));
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(h1[(b1[i], b1[j])], h2[(b2[i], b2[j])]);
            }
        }
    }

    #[test]
    fn density_matrix_rejects_non_hermitian_and_negative() {
        let mut m = Operator::zeros(2, 2);
        m[(0, 0)] = c(1.0);
        m[(0, 1)] = c(0.1);
        assert!(DensityMatrix::new(m.clone()).is_err());
        m[(1, 0)] = c(0.1);
        m[(1, 1)] = c(0.5);
        assert!(DensityMatrix::new(m.clone()).is_ok());

        let mut neg = Operator::zeros(2, 2);
        neg[(0, 0)] = c(1.5);
        neg[(1, 1)] = c(-0.5);
        assert!(DensityMatrix::new(neg).is_err());
    }

    #[test]
    fn density_matrix_normalizes_trace() {
        let m = Operator::identity(4, 4) * c(3.0);
        let rho = DensityMatrix::new(m).unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn decoupled_spin_stays_dark() {
        let p = TripartiteParams {
            g_m_e: 0.0,
            ..Default::default()
        };
        let rho0 = DensityMatrix::single_photon(&p).unwrap();
        let traj = evolve(&rho0, &p, 1e-6, 1e-9).unwrap();
        assert!(traj.pop_e.iter().all(|&x| x.abs() < 1e-15));
    }

    #[test]
    fn lossless_single_excitation_is_conserved() {
        let p = TripartiteParams::default().lossless();
        let rho0 = DensityMatrix::single_photon(&p).unwrap();
        let traj = evolve(&rho0, &p, 2e-6, 1e-9).unwrap();
        for i in 0..traj.len() {
            let total = traj.pop_mw[i] + traj.pop_m[i] + traj.pop_e[i];
            assert!((total - 1.0).abs() < 1e-8, "step {i}: {total}");
        }
    }

    #[test]
    fn evolve_rejects_bad_step_and_dimension() {
        let p = TripartiteParams::default();
        let rho0 = DensityMatrix::single_photon(&p).unwrap();
        assert!(evolve(&rho0, &p, 1e-6, 0.0).is_err());
        assert!(evolve(&rho0, &p, 1e-10, 1e-9).is_err());
        let p2 = TripartiteParams {
            fock_cutoff: 2,
            ..p
        };
        assert!(evolve(&rho0, &p2, 1e-6, 1e-9).is_err());
    }

    #[test]
    fn watchdog_trips_on_unstable_step() {
        let p = TripartiteParams::default();
        let rho0 = DensityMatrix::single_photon(&p).unwrap();
        // 1 µs steps against a ~6e6 /s coupling: far outside RK4 stability.
        let err = evolve(&rho0, &p, 50e-6, 1e-6).unwrap_err();
        assert!(matches!(err, Error::Integration { .. }), "{err}");
    }

    #[test]
    fn partial_last_step_lands_on_t_end() {
        let p = TripartiteParams::default();
        let rho0 = DensityMatrix::single_photon(&p).unwrap();
        let traj = evolve(&rho0, &p, 10.5e-9, 1e-9).unwrap();
        assert_eq!(traj.len(), 12);
        assert_eq!(*traj.times.last().unwrap(), 10.5e-9);
    }

    #[test]
    fn peak_of_flat_and_ramp_series() {
        let t: Vec<f64> = (0..5).map(|i| i as f64 * 1e-9).collect();
        let zeros = vec![0.0; 5];
        let flat = Trajectory::from_series(t.clone(), zeros.clone(), zeros.clone(), zeros.clone()).unwrap();
        let peak = max_spin_population(&flat).unwrap();
        assert_eq!((peak.eta_e_mw, peak.t_peak_s), (0.0, 0.0));

        let ramp: Vec<f64> = (0..5).map(|i| i as f64 / 4.0).collect();
        let up = Trajectory::from_series(t.clone(), zeros.clone(), zeros, ramp).unwrap();
        let peak = max_spin_population(&up).unwrap();
        assert_eq!((peak.eta_e_mw, peak.t_peak_s), (1.0, 4e-9));
    }

    #[test]
    fn empty_trajectory_has_no_peak() {
        let empty = Trajectory::from_series(vec![], vec![], vec![], vec![]).unwrap();
        assert!(max_spin_population(&empty).is_err());
    }

    #[test]
    fn logspace_endpoints() {
        let g = default_g_grid();
        assert_eq!(g.len(), 25);
        assert_eq!(g[0], 1e5);
        assert_eq!(g[24], 1e7);
        assert!((g[12] - 1e6).abs() < 1e-3);
    }

    #[test]
    fn sweep_reports_offending_point() {
        let base = TripartiteParams::default();
        let settings = SweepSettings {
            dt: 1e-6,
            t_end: 50e-6,
            ..Default::default()
        };
        let err = sweep_transfer(&[1e6], &[1e4], &base, &settings).unwrap_err();
        match err {
            Error::SweepPoint { g_hz, q_mw, .. } => assert_eq!((g_hz, q_mw), (1e6, 1e4)),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn vanishing_coupling_gives_vanishing_transfer() {
        let base = TripartiteParams::default();
        let pts = sweep_transfer(&[0.0, 1e3], &[1e3, 1e5], &base, &SweepSettings::default()).unwrap();
        assert_eq!(pts.len(), 4);
        assert_eq!((pts[1].g_hz, pts[1].q_mw), (0.0, 1e5));
        assert!(pts[0].eta_e_mw < 1e-12 && pts[1].eta_e_mw < 1e-12);
        assert!(pts[2].eta_e_mw < 1e-4 && pts[3].eta_e_mw < 1e-4);
    }
}
