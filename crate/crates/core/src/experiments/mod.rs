//! Monte Carlo harness, threshold and percolation studies, resource tables
//! and run output.
//!
//! Every trial draws from its own counter-keyed stream (see [`crate::rng`])
//! and aggregates are plain counts, so results are identical for any worker
//! count.

mod crossing;
mod output;
mod resources;
mod studies;

pub use crossing::{find_crossing, Crossing, Curve, CurvePoint, PairCrossing, BOOTSTRAP_RESAMPLES};
pub use output::{run_id, write_csv, write_run, OutputFormat, RunManifest, CSV_HEADER};
pub use resources::{
    resource_report, ResourceRow, TpqcParams, HTQC_EXTRAPOLATION, MQQC_BELL_Z, MQQC_BELL_Z_PRIME,
    TPQC_COMPUTATIONAL, TPQC_LOSS, TPQC_REPEATS,
};
pub use studies::{
    alpha_sweep, alpha_sweep_pz_grid, default_pz_grid, geometric_grid, map_eta_threshold,
    percolation_threshold, threshold_sweep, wrap_probability, PercolationPoint, PercolationResult,
    ThresholdResult,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{hbsm_failure_prob, HybridParams, NoiseModel};
use crate::decoder::decode;
use crate::error::{Error, Result};
use crate::generation::{sample_with_rates, ErrorLocationConfig, SampleRates};
use crate::lattice::{Axis, Distance, Lattice};
use crate::rng::{fnv1a, trial_rng};

/// Loss level used to derive `p_f` when the dephasing rate is swept directly.
pub const DEFAULT_FIXED_ETA: f64 = 3.3e-3;
/// Operating amplitude.
pub const DEFAULT_ALPHA: f64 = 1.247;
/// Normal quantile for 95% intervals.
pub const Z95: f64 = 1.959_963_984_540_054;
/// Axis whose logical surface decides failure.
pub const LOGICAL_AXIS: Axis = Axis::Z;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub distances: Vec<Distance>,
    pub trials: u64,
    pub seed: u64,
    pub events: ErrorLocationConfig,
    /// Worker threads; 0 lets rayon decide.
    pub workers: usize,
}

impl TrialConfig {
    pub fn new(distances: &[u32], trials: u64, seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::param("trials", "must be at least 1"));
        }
        if distances.is_empty() {
            return Err(Error::param("distances", "empty list"));
        }
        let distances = distances
            .iter()
            .map(|&d| Distance::new(d))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            distances,
            trials,
            seed,
            events: ErrorLocationConfig::default(),
            workers: 0,
        })
    }

    pub fn with_events(mut self, events: ErrorLocationConfig) -> Self {
        self.events = events;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

/// One noise setting: the amplitude and loss it stands for plus the rates
/// handed to the sampler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub alpha: f64,
    pub eta: f64,
    pub rates: SampleRates,
}

impl Point {
    /// Dephasing knob: both dephasing rates set to `p_z`, `p_f` from
    /// `(alpha, eta)`.
    pub fn knob(p_z: f64, alpha: f64, eta: f64) -> Result<Self> {
        let p = HybridParams::new(alpha, eta)?;
        let rates = SampleRates::new(hbsm_failure_prob(&p).min(0.5), p_z, p_z)?;
        Ok(Self { alpha, eta, rates })
    }

    /// Every rate derived from `(alpha, eta)`.
    pub fn physical(alpha: f64, eta: f64) -> Result<Self> {
        let p = HybridParams::new(alpha, eta)?;
        Ok(Self {
            alpha,
            eta,
            rates: SampleRates::from(&NoiseModel::from_params(&p)),
        })
    }

    fn key(&self, d: Distance, events: &ErrorLocationConfig) -> u64 {
        let s = format!(
            "{}|{:x}|{:x}|{:x}|{:x}|{:x}|{}|{}|{}|{}",
            d,
            self.alpha.to_bits(),
            self.eta.to_bits(),
            self.rates.p_f.to_bits(),
            self.rates.p_z_single.to_bits(),
            self.rates.p_z_ent.to_bits(),
            events.n_single_events,
            events.creation_events_per_qubit,
            events.connection_events_per_qubit,
            events.use_entangling_rate,
        );
        fnv1a(s.as_bytes())
    }
}

/// Tally for one `(d, point)`; also one CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub d: u32,
    pub alpha: f64,
    pub eta: f64,
    pub p_z_single: f64,
    pub p_z_ent: f64,
    pub p_f: f64,
    pub trials: u64,
    pub failures: u64,
    #[serde(rename = "p_L")]
    pub p_l: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl PointResult {
    pub fn new(d: Distance, point: &Point, trials: u64, failures: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(failures, trials, Z95);
        Self {
            d: d.get(),
            alpha: point.alpha,
            eta: point.eta,
            p_z_single: point.rates.p_z_single,
            p_z_ent: point.rates.p_z_ent,
            p_f: point.rates.p_f,
            trials,
            failures,
            p_l: failures as f64 / trials as f64,
            ci_low,
            ci_high,
        }
    }
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if k == 0 {
        0.0
    } else {
        (centre - half).clamp(0.0, p)
    };
    let hi = if k as f64 == n {
        1.0
    } else {
        (centre + half).clamp(p, 1.0)
    };
    (lo, hi)
}

/// Runs `f` inside a pool of `workers` threads (0 = rayon's default).
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    if workers == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Number of trials in `0..trials` for which `trial` returns true.
pub fn count_parallel(
    trials: u64,
    workers: usize,
    trial: impl Fn(u64) -> bool + Sync + Send,
) -> u64 {
    with_workers(workers, || {
        (0..trials).into_par_iter().filter(|&t| trial(t)).count() as u64
    })
}

/// Fraction of trials ending in a logical failure at one `(d, point)`.
pub fn estimate_logical_rate(d: Distance, point: &Point, cfg: &TrialConfig) -> Result<PointResult> {
    let g = Lattice::new(d);
    let surface = g.logical_surface(LOGICAL_AXIS);
    let key = point.key(d, &cfg.events);
    let failures = count_parallel(cfg.trials, cfg.workers, |t| {
        let mut rng = trial_rng(cfg.seed, key, t);
        let e = sample_with_rates(&g, &point.rates, &cfg.events, &mut rng);
        // decode only fails on an odd defect count, which the torus rules out
        decode(&g, &e, &surface)
            .map(|r| r.logical_flip)
            .unwrap_or(true)
    });
    Ok(PointResult::new(d, point, cfg.trials, failures))
}
