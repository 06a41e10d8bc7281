// Copyright 2026 The spinlink Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use spinlink::lindblad::{
    evolve, evolve_with, max_spin_population, DensityMatrix, EvolveOptions, Frame, TripartiteParams,
};

/// Exact single-excitation evolution `exp(−iHt)` on `{|100⟩, |010⟩, |001⟩}`
/// in the frame rotating at the resonator frequency.
fn exact_populations(p: &TripartiteParams, times: &[f64]) -> Vec<[f64; 3]> {
    let w = 2.0 * PI;
    let h = DMatrix::from_row_slice(
        3,
        3,
        &[
            0.0,
            w * p.g_mw_m,
            0.0,
            w * p.g_mw_m,
            w * (p.omega_m - p.omega_mw),
            w * p.g_m_e,
            0.0,
            w * p.g_m_e,
            w * (p.omega_e - p.omega_mw),
        ],
    )
    .map(|x| Complex64::new(x, 0.0));
    let psi0 = DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]);
    times
        .iter()
        .map(|&t| {
            let u = (h.clone() * Complex64::new(0.0, -t)).exp();
            let psi = u * &psi0;
            [psi[0].norm_sqr(), psi[1].norm_sqr(), psi[2].norm_sqr()]
        })
        .collect()
}

fn assert_matches_oracle(p: &TripartiteParams, t_end: f64, dt: f64) {
    let rho0 = DensityMatrix::single_photon(p).unwrap();
    let traj = evolve(&rho0, p, t_end, dt).unwrap();
    let exact = exact_populations(p, &traj.times);
    for (k, e) in exact.iter().enumerate() {
        let got = [traj.pop_mw[k], traj.pop_m[k], traj.pop_e[k]];
        for i in 0..3 {
            assert!((got[i] - e[i]).abs() < 1e-6, "t = {:e}: mode {i} {} vs {}", traj.times[k], got[i], e[i]);
        }
        assert!((got.iter().sum::<f64>() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn lossless_resonant_chain_matches_matrix_exponential() {
    assert_matches_oracle(&TripartiteParams::default().lossless(), 2e-6, 1e-9);
}

#[test]
fn lossless_detuned_chain_matches_matrix_exponential() {
    let p = TripartiteParams {
        omega_m: 5e9 + 0.7e6,
        omega_e: 5e9 - 1.3e6,
        g_mw_m: 2.5e6,
        g_m_e: 0.8e6,
        ..TripartiteParams::default()
    }
    .lossless();
    assert_matches_oracle(&p, 1e-6, 5e-10);
}

#[test]
fn higher_fock_cutoff_does_not_change_transfer() {
    let p1 = TripartiteParams::default();
    let p2 = TripartiteParams { fock_cutoff: 2, ..p1 };
    let peak = |p: &TripartiteParams| {
        let traj = evolve(&DensityMatrix::single_photon(p).unwrap(), p, 2e-6, 1e-9).unwrap();
        max_spin_population(&traj).unwrap().eta_e_mw
    };
    let (a, b) = (peak(&p1), peak(&p2));
    assert!((a - b).abs() < 1e-6, "{a} vs {b}");
}

#[test]
fn halving_the_step_changes_peak_by_less_than_1e_4() {
    let p = TripartiteParams::default();
    let peak = |dt: f64| {
        let traj = evolve(&DensityMatrix::single_photon(&p).unwrap(), &p, 2e-6, dt).unwrap();
        max_spin_population(&traj).unwrap().eta_e_mw
    };
    let (coarse, fine) = (peak(1e-9), peak(0.5e-9));
    assert!((coarse - fine).abs() < 1e-4, "{coarse} vs {fine}");
}

#[test]
fn lab_and_rotating_frames_agree_on_populations() {
    let p = TripartiteParams::default();
    let rho0 = DensityMatrix::single_photon(&p).unwrap();
    let t_end = 20e-9;
    let dt = 1e-12;
    let lab = evolve_with(
        &rho0,
        &p,
        t_end,
        dt,
        &EvolveOptions {
            frame: Frame::Lab,
            check_positivity: false,
        },
    )
    .unwrap();
    let rot = evolve_with(
        &rho0,
        &p,
        t_end,
        dt,
        &EvolveOptions {
            frame: Frame::Rotating,
            check_positivity: false,
        },
    )
    .unwrap();
    assert_eq!(lab.len(), rot.len());
    for k in (0..lab.len()).step_by(500) {
        assert!((lab.pop_m[k] - rot.pop_m[k]).abs() < 1e-6);
        assert!((lab.pop_e[k] - rot.pop_e[k]).abs() < 1e-6);
    }
}

#[test]
fn dissipative_trajectory_keeps_state_physical() {
    let p = TripartiteParams::default().with_q_mw(1e3);
    let traj = evolve(&DensityMatrix::single_photon(&p).unwrap(), &p, 2e-6, 1e-9).unwrap();
    let d = traj.diagnostics;
    assert!(d.max_trace_drift < 1e-8, "{d:?}");
    assert!(d.max_hermiticity_defect < 1e-10, "{d:?}");
    assert!(d.min_eigenvalue.unwrap() >= -1e-8, "{d:?}");
}
