//! One ballistic-generation sample: heralded fusion failures turn into missing
//! qubits, and every surviving qubit collects independent Z-flip events.
//!
//! Failure model (one fusion attempt per primal qubit, failing with `p_f`):
//! half of the failures are creation failures, which leave a diagonal edge
//! and cost the qubit plus one in-plane neighbour; the other half are
//! connection failures, which cost one endpoint of the missing edge. On
//! average 1.5 qubits go per failure.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::{HybridParams, NoiseModel};
use crate::error::{Error, Result};
use crate::lattice::Lattice;

/// How many independent Z events each qubit receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorLocationConfig {
    /// Preparation, waiting, measurement and similar single-qubit locations.
    pub n_single_events: u32,
    /// Fusion-induced events use the entangling rate instead of the
    /// single-qubit one.
    pub use_entangling_rate: bool,
    pub creation_events_per_qubit: u32,
    pub connection_events_per_qubit: u32,
}

impl ErrorLocationConfig {
    pub const fn new(
        single: u32,
        creation: u32,
        connection: u32,
        use_entangling_rate: bool,
    ) -> Self {
        Self {
            n_single_events: single,
            use_entangling_rate,
            creation_events_per_qubit: creation,
            connection_events_per_qubit: connection,
        }
    }

    pub fn total_events(&self) -> u32 {
        self.n_single_events + self.creation_events_per_qubit + self.connection_events_per_qubit
    }

    /// Candidate multiplicities scanned by the calibration sweep.
    pub const CALIBRATION_SET: [ErrorLocationConfig; 4] = [
        ErrorLocationConfig::new(4, 2, 4, true),
        ErrorLocationConfig::new(4, 2, 2, true),
        ErrorLocationConfig::new(4, 0, 2, true),
        ErrorLocationConfig::new(2, 0, 2, true),
    ];
}

impl Default for ErrorLocationConfig {
    /// Calibrated against the published threshold (see the calibration
    /// acceptance test).
    fn default() -> Self {
        Self::new(2, 0, 2, true)
    }
}

/// Rates actually fed to the sampler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRates {
    pub p_f: f64,
    pub p_z_single: f64,
    pub p_z_ent: f64,
}

impl SampleRates {
    pub fn new(p_f: f64, p_z_single: f64, p_z_ent: f64) -> Result<Self> {
        for (name, v, hi) in [
            ("p_f", p_f, 0.5),
            ("p_z_single", p_z_single, 0.5),
            ("p_z_ent", p_z_ent, 0.5),
        ] {
            if !(0.0..=hi).contains(&v) {
                return Err(Error::param(name, format!("{v} outside [0, {hi}]")));
            }
        }
        Ok(Self {
            p_f,
            p_z_single,
            p_z_ent,
        })
    }
}

impl From<&NoiseModel<f64>> for SampleRates {
    fn from(nm: &NoiseModel<f64>) -> Self {
        Self {
            p_f: nm.p_f.min(0.5),
            p_z_single: nm.p_z_single,
            p_z_ent: nm.p_z_ent,
        }
    }
}

/// Missing qubits and net Z flips of one sample, as masks over qubit ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorInstance {
    pub missing: Vec<bool>,
    pub flipped: Vec<bool>,
}

impl ErrorInstance {
    pub fn empty(n_qubits: usize) -> Self {
        Self {
            missing: vec![false; n_qubits],
            flipped: vec![false; n_qubits],
        }
    }

    /// Builds an instance from id lists; flips on missing qubits are dropped.
    pub fn from_ids(n_qubits: usize, missing: &[usize], flipped: &[usize]) -> Result<Self> {
        let mut e = Self::empty(n_qubits);
        for &q in missing.iter().chain(flipped) {
            if q >= n_qubits {
                return Err(Error::UnknownQubit(q));
            }
        }
        for &q in missing {
            e.missing[q] = true;
        }
        for &q in flipped {
            e.flipped[q] = !e.missing[q];
        }
        Ok(e)
    }

    pub fn missing_ids(&self) -> Vec<usize> {
        ids(&self.missing)
    }

    pub fn flipped_ids(&self) -> Vec<usize> {
        ids(&self.flipped)
    }

    pub fn missing_count(&self) -> usize {
        self.missing.iter().filter(|&&m| m).count()
    }
}

fn ids(mask: &[bool]) -> Vec<usize> {
    mask.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i)
        .collect()
}

/// Heralded fusion failures mapped to missing qubits.
pub fn sample_failures<R: Rng + ?Sized>(g: &Lattice, p_f: f64, rng: &mut R) -> Vec<bool> {
    let n = g.n_qubits();
    let mut missing = vec![false; n];
    if p_f <= 0.0 {
        return missing;
    }
    for q in 0..n {
        if !rng.random_bool(p_f.min(1.0)) {
            continue;
        }
        let creation = rng.random_bool(0.5);
        let partner = g.in_plane_neighbors(q)[rng.random_range(0..4)] as usize;
        if creation {
            missing[q] = true;
            missing[partner] = true;
        } else if rng.random_bool(0.5) {
            missing[q] = true;
        } else {
            missing[partner] = true;
        }
    }
    missing
}

/// Net flip per qubit as the XOR of independent events; missing qubits are
/// cleared afterwards so the stream does not depend on the loss pattern.
pub fn sample_flips<R: Rng + ?Sized>(
    g: &Lattice,
    rates: &SampleRates,
    cfg: &ErrorLocationConfig,
    missing: &[bool],
    rng: &mut R,
) -> Vec<bool> {
    let fusion_rate = if cfg.use_entangling_rate {
        rates.p_z_ent
    } else {
        rates.p_z_single
    };
    let fusion_events = cfg.creation_events_per_qubit + cfg.connection_events_per_qubit;
    let mut flipped = vec![false; g.n_qubits()];
    for (q, f) in flipped.iter_mut().enumerate() {
        let mut x = false;
        for _ in 0..cfg.n_single_events {
            x ^= rng.random_bool(rates.p_z_single);
        }
        for _ in 0..fusion_events {
            x ^= rng.random_bool(fusion_rate);
        }
        *f = x && !missing[q];
    }
    flipped
}

pub fn sample_with_rates<R: Rng + ?Sized>(
    g: &Lattice,
    rates: &SampleRates,
    cfg: &ErrorLocationConfig,
    rng: &mut R,
) -> ErrorInstance {
    let missing = sample_failures(g, rates.p_f, rng);
    let flipped = sample_flips(g, rates, cfg, &missing, rng);
    ErrorInstance { missing, flipped }
}

/// Derives every rate from `(alpha, eta)` and samples.
pub fn sample_instance<R: Rng + ?Sized>(
    g: &Lattice,
    params: &HybridParams<f64>,
    cfg: &ErrorLocationConfig,
    rng: &mut R,
) -> ErrorInstance {
    let rates = SampleRates::from(&NoiseModel::from_params(params));
    sample_with_rates(g, &rates, cfg, rng)
}

/// Probability that an odd number of `k` independent Bernoulli(`p`) events
/// fire.
pub fn xor_flip_prob(p: f64, k: u32) -> f64 {
    (1.0 - (1.0 - 2.0 * p).powi(k as i32)) / 2.0
}

/// Per-qubit net flip probability for a configuration.
pub fn effective_flip_prob(rates: &SampleRates, cfg: &ErrorLocationConfig) -> f64 {
    let fusion_rate = if cfg.use_entangling_rate {
        rates.p_z_ent
    } else {
        rates.p_z_single
    };
    let fusion_events = cfg.creation_events_per_qubit + cfg.connection_events_per_qubit;
    let prod = (1.0 - 2.0 * rates.p_z_single).powi(cfg.n_single_events as i32)
        * (1.0 - 2.0 * fusion_rate).powi(fusion_events as i32);
    (1.0 - prod) / 2.0
}
