// Copyright 2026 The spinlink Authors
// SPDX-License-Identifier: Apache-2.0

//! Monte-Carlo simulation of the full link sequence: initialization, remote
//! spin–spin attempts, swap to the nuclear memory, synchronized
//! superconductor–spin rounds at both nodes, and the Bell-state measurement.
//!
//! # Randomness
//!
//! The generator is ChaCha8 from `rand_chacha`, seeded with
//! `seed_from_u64(seed)`. Trials are cut into batches of [`BATCH_SIZE`];
//! batch `b` draws from stream `b` of that generator. Per-batch tallies hold
//! only integer counts and are merged by addition, so the result does not
//! depend on the number of worker threads or on scheduling.
//!
//! The pipelined multi-memory model is inherently sequential and uses two
//! dedicated streams, one for delivery and one for preparation draws.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::rates::{derive_gate_times, DerivedTiming, EfficiencySet, TimingParamSet};

/// Identifier recorded with every result.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha), seed_from_u64(seed), stream = batch index";

/// Trials per independent random stream.
pub const BATCH_SIZE: u64 = 4096;

const DELIVERY_STREAM: u64 = u64::MAX;
const PREPARATION_STREAM: u64 = u64::MAX - 1;

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Number of trials until the first success, at least 1.
#[derive(Debug, Clone, Copy)]
struct AttemptSampler(Option<Geometric>);

impl AttemptSampler {
    fn new(name: &'static str, p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::invalid(name, format!("success probability must lie in (0, 1], got {p}")));
        }
        if p == 1.0 {
            return Ok(Self(None));
        }
        let g = Geometric::new(p).map_err(|e| Error::invalid(name, e.to_string()))?;
        Ok(Self(Some(g)))
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match &self.0 {
            None => 1,
            Some(g) => g.sample(rng) + 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    pub timing: TimingParamSet,
    pub efficiencies: EfficiencySet,
    /// Remote spin–spin attempt rate, Hz.
    pub r_ee_attempt: f64,
    /// Superconductor–spin round rate, Hz.
    pub r_sce_attempt: f64,
    pub n_trials: u64,
    pub rng_seed: u64,
    /// Memories per node; only [`simulate_parallel`] uses values above 1.
    pub parallel_memories: u32,
    /// Charge a nuclear re-initialization for every failed superconductor–spin
    /// round.
    #[serde(default)]
    pub reinit_on_failed_sce: bool,
}

impl ProtocolConfig {
    /// Attempt rates taken from the timing set, 10⁵ trials, one memory.
    pub fn new(timing: TimingParamSet, efficiencies: EfficiencySet) -> Self {
        Self {
            timing,
            efficiencies,
            r_ee_attempt: timing.r_ee(),
            r_sce_attempt: timing.r_sce(),
            n_trials: 100_000,
            rng_seed: 0,
            parallel_memories: 1,
            reinit_on_failed_sce: false,
        }
    }

    pub fn validate(&self) -> Result<DerivedTiming> {
        let timing = derive_gate_times(&self.timing)?;
        self.efficiencies.validate()?;
        ensure_positive("r_ee_attempt", self.r_ee_attempt)?;
        ensure_positive("r_sce_attempt", self.r_sce_attempt)?;
        if self.n_trials == 0 {
            return Err(Error::invalid("n_trials", "must be at least 1"));
        }
        if self.parallel_memories == 0 {
            return Err(Error::invalid("parallel_memories", "must be at least 1"));
        }
        AttemptSampler::new("eta_e_opt", self.efficiencies.p_ee())?;
        AttemptSampler::new("eta_sc_mw*eta_e_mw", self.efficiencies.p_sce())?;
        Ok(timing)
    }
}

/// Attempt-count histograms, `attempts → trials`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AttemptHistograms {
    pub ee: BTreeMap<u64, u64>,
    pub sce_node_a: BTreeMap<u64, u64>,
    pub sce_node_b: BTreeMap<u64, u64>,
    /// Synchronized rounds until both nodes succeeded.
    pub sce_max: BTreeMap<u64, u64>,
}

fn merge_hist(into: &mut BTreeMap<u64, u64>, from: BTreeMap<u64, u64>) {
    for (k, v) in from {
        *into.entry(k).or_default() += v;
    }
}

/// Mean time per phase, seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseBreakdown {
    pub init: f64,
    pub ee: f64,
    pub swap: f64,
    pub sce: f64,
    pub bsm: f64,
}

impl PhaseBreakdown {
    pub fn total(&self) -> f64 {
        self.init + self.ee + self.swap + self.sce + self.bsm
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McResult {
    pub n_trials: u64,
    pub rng_seed: u64,
    pub rng_algorithm: String,
    pub mean_cycle_time_s: f64,
    pub mean_cycle_time_stderr_s: f64,
    pub rate_hz: f64,
    pub rate_stderr_hz: f64,
    pub mean_ee_attempts: f64,
    pub mean_sce_rounds: f64,
    pub breakdown: PhaseBreakdown,
    pub histograms: AttemptHistograms,
}

/// Exact integer sufficient statistics of `(e–e attempts n, sc–e rounds m)`.
#[derive(Debug, Clone, Default)]
struct Tally {
    trials: u64,
    sum_n: u128,
    sum_n2: u128,
    sum_m: u128,
    sum_m2: u128,
    sum_nm: u128,
    hist: AttemptHistograms,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.trials += other.trials;
        self.sum_n += other.sum_n;
        self.sum_n2 += other.sum_n2;
        self.sum_m += other.sum_m;
        self.sum_m2 += other.sum_m2;
        self.sum_nm += other.sum_nm;
        merge_hist(&mut self.hist.ee, other.hist.ee);
        merge_hist(&mut self.hist.sce_node_a, other.hist.sce_node_a);
        merge_hist(&mut self.hist.sce_node_b, other.hist.sce_node_b);
        merge_hist(&mut self.hist.sce_max, other.hist.sce_max);
        self
    }
}

fn batch_ranges(n_trials: u64) -> Vec<(u64, u64)> {
    let batches = n_trials.div_ceil(BATCH_SIZE);
    (0..batches)
        .map(|b| (b, BATCH_SIZE.min(n_trials - b * BATCH_SIZE)))
        .collect()
}

/// One delivered pair per trial with a single memory per node.
pub fn simulate_protocol(cfg: &ProtocolConfig) -> Result<McResult> {
    let timing = cfg.validate()?;
    let ee = AttemptSampler::new("eta_e_opt", cfg.efficiencies.p_ee())?;
    let sce = AttemptSampler::new("eta_sc_mw*eta_e_mw", cfg.efficiencies.p_sce())?;

    let tally = batch_ranges(cfg.n_trials)
        .into_par_iter()
        .map(|(stream, size)| {
            let mut rng = stream_rng(cfg.rng_seed, stream);
            let mut t = Tally::default();
            for _ in 0..size {
                let n = ee.sample(&mut rng);
                let a = sce.sample(&mut rng);
                let b = sce.sample(&mut rng);
                let m = a.max(b);
                t.trials += 1;
                t.sum_n += u128::from(n);
                t.sum_n2 += u128::from(n) * u128::from(n);
                t.sum_m += u128::from(m);
                t.sum_m2 += u128::from(m) * u128::from(m);
                t.sum_nm += u128::from(n) * u128::from(m);
                *t.hist.ee.entry(n).or_default() += 1;
                *t.hist.sce_node_a.entry(a).or_default() += 1;
                *t.hist.sce_node_b.entry(b).or_default() += 1;
                *t.hist.sce_max.entry(m).or_default() += 1;
            }
            t
        })
        .reduce(Tally::default, Tally::merge);

    Ok(summarize(cfg, &timing, tally))
}

fn summarize(cfg: &ProtocolConfig, timing: &DerivedTiming, t: Tally) -> McResult {
    let count = t.trials as f64;
    let mean_n = t.sum_n as f64 / count;
    let mean_m = t.sum_m as f64 / count;

    // Cycle time is x = const + a·n + c·m.
    let per_ee = 1.0 / cfg.r_ee_attempt;
    let reinit = if cfg.reinit_on_failed_sce { timing.tau_n_init } else { 0.0 };
    let per_round = 1.0 / cfg.r_sce_attempt + reinit;

    let breakdown = PhaseBreakdown {
        init: timing.tau_init_total + reinit * (mean_m - 1.0),
        ee: mean_n * per_ee,
        swap: timing.tau_n_swap,
        sce: mean_m / cfg.r_sce_attempt,
        bsm: timing.tau_bsm,
    };
    let mean = breakdown.total();

    let stderr = if t.trials > 1 {
        let dof = count - 1.0;
        let var_n = (t.sum_n2 as f64 - t.sum_n as f64 * mean_n) / dof;
        let var_m = (t.sum_m2 as f64 - t.sum_m as f64 * mean_m) / dof;
        let cov = (t.sum_nm as f64 - t.sum_n as f64 * mean_m) / dof;
        let var = per_ee * per_ee * var_n + per_round * per_round * var_m + 2.0 * per_ee * per_round * cov;
        (var.max(0.0) / count).sqrt()
    } else {
        0.0
    };

    McResult {
        n_trials: t.trials,
        rng_seed: cfg.rng_seed,
        rng_algorithm: RNG_ALGORITHM.to_owned(),
        mean_cycle_time_s: mean,
        mean_cycle_time_stderr_s: stderr,
        rate_hz: 1.0 / mean,
        rate_stderr_hz: stderr / (mean * mean),
        mean_ee_attempts: mean_n,
        mean_sce_rounds: mean_m,
        breakdown,
        histograms: t.hist,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometricEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_trials: u64,
}

/// Sampled mean of the larger of two independent attempt counts.
pub fn max_geometric_oracle(p: f64, n_trials: u64, seed: u64) -> Result<GeometricEstimate> {
    let sampler = AttemptSampler::new("p", p)?;
    if n_trials == 0 {
        return Err(Error::invalid("n_trials", "must be at least 1"));
    }
    let (sum, sum2) = batch_ranges(n_trials)
        .into_par_iter()
        .map(|(stream, size)| {
            let mut rng = stream_rng(seed, stream);
            let mut acc = (0u128, 0u128);
            for _ in 0..size {
                let m = u128::from(sampler.sample(&mut rng).max(sampler.sample(&mut rng)));
                acc.0 += m;
                acc.1 += m * m;
            }
            acc
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    let count = n_trials as f64;
    let mean = sum as f64 / count;
    let stderr = if n_trials > 1 {
        let var = (sum2 as f64 - sum as f64 * mean) / (count - 1.0);
        (var.max(0.0) / count).sqrt()
    } else {
        0.0
    };
    Ok(GeometricEstimate { mean, stderr, n_trials })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineLimit {
    Delivery,
    Preparation,
}

/// Steady-state result of the multi-memory pipeline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineResult {
    pub parallel_memories: u32,
    pub handoffs: u64,
    pub warmup_handoffs: u64,
    pub rng_seed: u64,
    pub rng_algorithm: String,
    pub rate_hz: f64,
    /// Sampled mean of init + e–e + swap.
    pub mean_preparation_s: f64,
    /// Sampled mean of sc–e + BSM.
    pub mean_delivery_s: f64,
    /// Fraction of the measured window the delivery stage was busy.
    pub delivery_utilization: f64,
    /// `1/mean_delivery`.
    pub delivery_bound_hz: f64,
    /// `memories/(mean_preparation + mean_delivery)`.
    pub preparation_bound_hz: f64,
    pub limited_by: PipelineLimit,
}

/// Several memories per node feeding one superconductor–spin interface.
///
/// The interface serves whichever memory finished preparing first (lowest
/// index on ties). A memory prepares (init, e–e, swap),
/// waits for the interface, delivers (sc–e rounds, BSM) and then prepares
/// again. Handoffs between memories take no time. The rate is measured over
/// the handoffs after a warm-up of one tenth of `n_trials`.
pub fn simulate_parallel(cfg: &ProtocolConfig) -> Result<PipelineResult> {
    let timing = cfg.validate()?;
    if cfg.parallel_memories < 2 {
        return Err(Error::invalid("parallel_memories", "pipeline needs at least 2 memories"));
    }
    let ee = AttemptSampler::new("eta_e_opt", cfg.efficiencies.p_ee())?;
    let sce = AttemptSampler::new("eta_sc_mw*eta_e_mw", cfg.efficiencies.p_sce())?;
    let reinit = if cfg.reinit_on_failed_sce { timing.tau_n_init } else { 0.0 };

    let mut delivery_rng = stream_rng(cfg.rng_seed, DELIVERY_STREAM);
    let mut prep_rng = stream_rng(cfg.rng_seed, PREPARATION_STREAM);
    let mut prepare = || {
        timing.tau_init_total + ee.sample(&mut prep_rng) as f64 / cfg.r_ee_attempt + timing.tau_n_swap
    };
    let mut deliver = || {
        let m = sce.sample(&mut delivery_rng).max(sce.sample(&mut delivery_rng)) as f64;
        m / cfg.r_sce_attempt + reinit * (m - 1.0) + timing.tau_bsm
    };

    let memories = cfg.parallel_memories as usize;
    let handoffs = cfg.n_trials;
    let warmup = handoffs / 10;
    if handoffs - warmup == 0 {
        return Err(Error::invalid("n_trials", "too few handoffs to measure a steady state"));
    }

    let mut prep_sum = 0.0;
    let mut prep_count = 0u64;
    let mut ready: Vec<f64> = (0..memories)
        .map(|_| {
            let t = prepare();
            prep_sum += t;
            prep_count += 1;
            t
        })
        .collect();

    let mut free_at = 0.0_f64;
    let mut window_start = 0.0;
    let mut busy = 0.0;
    let mut deliver_sum = 0.0;
    for j in 0..handoffs {
        if j == warmup {
            window_start = free_at;
        }
        let k = (0..memories)
            .min_by(|&a, &b| ready[a].total_cmp(&ready[b]))
            .expect("at least two memories");
        let start = free_at.max(ready[k]);
        let d = deliver();
        free_at = start + d;
        let p = prepare();
        ready[k] = free_at + p;
        prep_sum += p;
        prep_count += 1;
        deliver_sum += d;
        if j >= warmup {
            busy += d;
        }
    }

    let window = free_at - window_start;
    let measured = (handoffs - warmup) as f64;
    let mean_delivery_s = deliver_sum / handoffs as f64;
    let mean_preparation_s = prep_sum / prep_count as f64;
    let delivery_bound_hz = 1.0 / mean_delivery_s;
    let preparation_bound_hz = memories as f64 / (mean_preparation_s + mean_delivery_s);
    Ok(PipelineResult {
        parallel_memories: cfg.parallel_memories,
        handoffs,
        warmup_handoffs: warmup,
        rng_seed: cfg.rng_seed,
        rng_algorithm: "ChaCha8 (rand_chacha), seed_from_u64(seed), dedicated delivery and preparation streams"
            .to_owned(),
        rate_hz: measured / window,
        mean_preparation_s,
        mean_delivery_s,
        delivery_utilization: busy / window,
        delivery_bound_hz,
        preparation_bound_hz,
        limited_by: if preparation_bound_hz < delivery_bound_hz {
            PipelineLimit::Preparation
        } else {
            PipelineLimit::Delivery
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::{expected_max_rounds, rate_for_case};

    fn cfg_b() -> ProtocolConfig {
        ProtocolConfig::new(TimingParamSet::case_b(), EfficiencySet::default())
    }

    #[test]
    fn unit_efficiency_is_deterministic_per_trial() {
        let cfg = ProtocolConfig { n_trials: 1000, ..cfg_b() };
        let r = simulate_protocol(&cfg).unwrap();
        // p_ee = 1/2 still random; sc–e always one round.
        assert_eq!(r.mean_sce_rounds, 1.0);
        assert_eq!(r.histograms.sce_max, BTreeMap::from([(1, 1000)]));
        assert_eq!(r.histograms.ee.values().sum::<u64>(), 1000);
    }

    #[test]
    fn breakdown_adds_up() {
        let cfg = ProtocolConfig {
            n_trials: 5000,
            efficiencies: EfficiencySet { eta_e_mw: 0.3, ..EfficiencySet::default() },
            reinit_on_failed_sce: true,
            ..cfg_b()
        };
        let r = simulate_protocol(&cfg).unwrap();
        assert!((r.breakdown.total() - r.mean_cycle_time_s).abs() <= 1e-9 * r.mean_cycle_time_s);
        assert!(r.breakdown.init > derive_gate_times(&cfg.timing).unwrap().tau_init_total);
    }

    #[test]
    fn rate_close_to_closed_form() {
        let r = simulate_protocol(&cfg_b()).unwrap();
        let exact = rate_for_case(&TimingParamSet::case_b(), &EfficiencySet::default()).unwrap();
        assert!((r.rate_hz - exact).abs() < 4.0 * r.rate_stderr_hz.max(1.0_f64), "{} vs {exact}", r.rate_hz);
    }

    #[test]
    fn zero_optical_efficiency_is_a_configuration_error() {
        let cfg = ProtocolConfig {
            efficiencies: EfficiencySet { eta_e_opt: 0.0, ..EfficiencySet::default() },
            ..cfg_b()
        };
        assert!(simulate_protocol(&cfg).unwrap_err().is_configuration());
    }

    #[test]
    fn same_seed_same_result() {
        let cfg = ProtocolConfig { n_trials: 10_000, rng_seed: 7, ..cfg_b() };
        assert_eq!(simulate_protocol(&cfg).unwrap(), simulate_protocol(&cfg).unwrap());
        let other = ProtocolConfig { rng_seed: 8, ..cfg };
        assert_ne!(simulate_protocol(&cfg).unwrap(), simulate_protocol(&other).unwrap());
    }

    #[test]
    fn oracle_edges() {
        let one = max_geometric_oracle(1.0, 1000, 1).unwrap();
        assert_eq!((one.mean, one.stderr), (1.0, 0.0));
        let half = max_geometric_oracle(0.5, 200_000, 2).unwrap();
        let exact = expected_max_rounds(0.5).unwrap();
        assert!((half.mean - exact).abs() < 4.0 * half.stderr);
        assert!(max_geometric_oracle(0.0, 10, 0).is_err());
    }

    #[test]
    fn pipeline_saturates_with_fast_preparation() {
        let fast = TimingParamSet {
            tau_e_init: 1e-9,
            tau_ee_attempt: 1e-9,
            ..TimingParamSet::case_b()
        };
        let mut cfg = ProtocolConfig::new(fast, EfficiencySet { eta_e_mw: 0.5, ..EfficiencySet::default() });
        cfg.n_trials = 20_000;
        cfg.parallel_memories = 2;
        let two = simulate_parallel(&cfg).unwrap();
        cfg.parallel_memories = 3;
        let three = simulate_parallel(&cfg).unwrap();
        assert_eq!(two.rate_hz, three.rate_hz);
        assert_eq!(two.limited_by, PipelineLimit::Delivery);
    }

    #[test]
    fn pipeline_follows_slow_preparation() {
        let slow = TimingParamSet {
            tau_e_init: 50e-6,
            tau_ee_attempt: 100e-6,
            ..TimingParamSet::case_b()
        };
        let mut cfg = ProtocolConfig::new(slow, EfficiencySet::default());
        cfg.n_trials = 20_000;
        cfg.parallel_memories = 2;
        let r = simulate_parallel(&cfg).unwrap();
        assert_eq!(r.limited_by, PipelineLimit::Preparation);
        assert!(r.rate_hz < 0.5 * r.delivery_bound_hz);
        // Queueing behind the other memory only ever lowers the rate.
        assert!(r.rate_hz <= r.preparation_bound_hz, "{r:?}");
        assert!(r.rate_hz > 0.85 * r.preparation_bound_hz, "{r:?}");
        assert!(simulate_parallel(&ProtocolConfig { parallel_memories: 1, ..cfg }).is_err());
    }
}
