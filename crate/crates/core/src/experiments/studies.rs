//! Threshold sweeps, the amplitude scan and the percolation study.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::crossing::{find_crossing, Crossing, Curve, CurvePoint, BOOTSTRAP_RESAMPLES};
use super::{count_parallel, estimate_logical_rate, Point, PointResult, TrialConfig};
use crate::analytic::{dephasing_single, HybridParams};
use crate::decoder::extract_syndrome;
use crate::error::{Error, Result};
use crate::generation::ErrorInstance;
use crate::lattice::{Distance, Lattice};
use crate::rng::{fnv1a, trial_rng};

/// Loss rate at which the single-qubit dephasing rate equals `p_z`, by
/// bisection to 1e-14 in `eta`.
pub fn map_eta_threshold(p_z: f64, alpha: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&p_z) {
        return Err(Error::param("p_z", format!("{p_z} outside [0, 0.5)")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::param("alpha", format!("{alpha} must be positive")));
    }
    if p_z == 0.0 {
        return Ok(0.0);
    }
    let f =
        |eta: f64| -> Result<f64> { Ok(dephasing_single(&HybridParams::new(alpha, eta)?) - p_z) };
    let (mut lo, mut hi) = (0.0, 1.0 - 1e-12);
    if f(hi)? < 0.0 {
        return Err(Error::param(
            "p_z",
            format!("{p_z} not reachable at alpha = {alpha}"),
        ));
    }
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let r = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|i| lo * (r * i as f64).exp()).collect()
}

/// Default dephasing grid bracketing the expected threshold.
pub fn default_pz_grid() -> Vec<f64> {
    geometric_grid(4e-3, 1.2e-2, 9)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub alpha: f64,
    /// Loss level behind `p_f` (knob mode).
    pub eta_for_pf: f64,
    pub points: Vec<PointResult>,
    pub crossing: Option<Crossing>,
    pub no_crossing: Option<String>,
    /// Loss threshold mapped from the dephasing threshold.
    pub eta_th: Option<f64>,
}

fn curves(
    points: &[PointResult],
    distances: &[Distance],
    x: impl Fn(&PointResult) -> f64,
) -> Vec<Curve> {
    distances
        .iter()
        .map(|d| Curve {
            d: d.get(),
            points: points
                .iter()
                .filter(|p| p.d == d.get())
                .map(|p| CurvePoint {
                    x: x(p),
                    hits: p.failures,
                    trials: p.trials,
                })
                .collect(),
        })
        .collect()
}

/// Sweeps the dephasing knob over `pz_list` for every distance, locates the
/// crossing and maps it to a loss threshold.
pub fn threshold_sweep(
    cfg: &TrialConfig,
    alpha: f64,
    eta_for_pf: f64,
    pz_list: &[f64],
) -> Result<ThresholdResult> {
    let mut points = Vec::new();
    for &d in &cfg.distances {
        for &pz in pz_list {
            points.push(estimate_logical_rate(
                d,
                &Point::knob(pz, alpha, eta_for_pf)?,
                cfg,
            )?);
        }
    }
    let cs = curves(&points, &cfg.distances, |p| p.p_z_single);
    let (crossing, no_crossing) = match find_crossing(&cs, BOOTSTRAP_RESAMPLES, cfg.seed) {
        Ok(c) => (Some(c), None),
        Err(Error::NoCrossing(m)) => (None, Some(m)),
        Err(e) => return Err(e),
    };
    let eta_th = match &crossing {
        Some(c) => Some(map_eta_threshold(c.estimate, alpha)?),
        None => None,
    };
    Ok(ThresholdResult {
        alpha,
        eta_for_pf,
        points,
        crossing,
        no_crossing,
        eta_th,
    })
}

/// Dephasing grid wide enough to bracket the threshold for every amplitude
/// in the usual scan.
pub fn alpha_sweep_pz_grid() -> Vec<f64> {
    geometric_grid(2e-3, 1.2e-2, 11)
}

/// Threshold pipeline repeated per amplitude; `p_f` is taken at
/// `eta_for_pf` throughout.
pub fn alpha_sweep(
    cfg: &TrialConfig,
    alphas: &[f64],
    eta_for_pf: f64,
    pz_list: &[f64],
) -> Result<Vec<ThresholdResult>> {
    alphas
        .iter()
        .map(|&a| threshold_sweep(cfg, a, eta_for_pf, pz_list))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercolationPoint {
    pub d: u32,
    pub fraction: f64,
    pub trials: u64,
    pub wraps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercolationResult {
    pub points: Vec<PercolationPoint>,
    pub crossing: Option<Crossing>,
    pub no_crossing: Option<String>,
}

/// Trials in which qubits missing independently with probability `fraction`
/// leave a supercell wrapping the torus along some axis.
pub fn wrap_probability(
    d: Distance,
    fraction: f64,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<u64> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::param(
            "fraction",
            format!("{fraction} outside [0, 1]"),
        ));
    }
    let g = Lattice::new(d);
    let key = fnv1a(format!("percolation|{d}|{:x}", fraction.to_bits()).as_bytes());
    Ok(count_parallel(trials, workers, |t| {
        let mut rng = trial_rng(seed, key, t);
        let mut e = ErrorInstance::empty(g.n_qubits());
        for m in e.missing.iter_mut() {
            *m = rng.random_bool(fraction);
        }
        extract_syndrome(&g, &e).percolated()
    }))
}

/// Critical missing fraction from the crossing of wrap-probability curves.
pub fn percolation_threshold(
    distances: &[Distance],
    fractions: &[f64],
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<PercolationResult> {
    let mut points = Vec::new();
    for &d in distances {
        for &f in fractions {
            points.push(PercolationPoint {
                d: d.get(),
                fraction: f,
                trials,
                wraps: wrap_probability(d, f, trials, seed, workers)?,
            });
        }
    }
    let cs: Vec<Curve> = distances
        .iter()
        .map(|d| Curve {
            d: d.get(),
            points: points
                .iter()
                .filter(|p| p.d == d.get())
                .map(|p| CurvePoint {
                    x: p.fraction,
                    hits: p.wraps,
                    trials: p.trials,
                })
                .collect(),
        })
        .collect();
    let (crossing, no_crossing) = match find_crossing(&cs, BOOTSTRAP_RESAMPLES, seed) {
        Ok(c) => (Some(c), None),
        Err(Error::NoCrossing(m)) => (None, Some(m)),
        Err(e) => return Err(e),
    };
    Ok(PercolationResult {
        points,
        crossing,
        no_crossing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eta_mapping() {
        assert_eq!(map_eta_threshold(0.0, 1.247).unwrap(), 0.0);
        let eta = map_eta_threshold(6.9e-3, 1.247).unwrap();
        assert_relative_eq!(eta, 3.379_640_018_292_475e-3, max_relative = 1e-9);
        for (pz, a) in [(1e-3, 0.9), (6.9e-3, 1.247), (0.2, 2.0), (0.01, 0.5)] {
            let eta = map_eta_threshold(pz, a).unwrap();
            let back = dephasing_single(&HybridParams::new(a, eta).unwrap());
            assert!((back - pz).abs() < 1e-9);
        }
        assert!(map_eta_threshold(0.5, 1.0).is_err());
        assert!(map_eta_threshold(-0.1, 1.0).is_err());
        assert!(map_eta_threshold(0.01, 0.0).is_err());
    }

    #[test]
    fn grid_endpoints() {
        let g = geometric_grid(1e-3, 1e-2, 5);
        assert_relative_eq!(g[0], 1e-3);
        assert_relative_eq!(g[4], 1e-2, max_relative = 1e-12);
        assert_eq!(default_pz_grid().len(), 9);
    }

    #[test]
    fn empty_lattice_never_wraps_full_lattice_always_does() {
        let d = Distance::new(5).unwrap();
        assert_eq!(wrap_probability(d, 0.0, 50, 1, 1).unwrap(), 0);
        assert_eq!(wrap_probability(d, 1.0, 5, 1, 1).unwrap(), 5);
        assert!(wrap_probability(d, 1.5, 5, 1, 1).is_err());
    }

    #[test]
    fn deep_supercritical_wraps_more_with_size() {
        let w5 = wrap_probability(Distance::new(5).unwrap(), 0.5, 200, 3, 0).unwrap();
        let w9 = wrap_probability(Distance::new(9).unwrap(), 0.5, 200, 3, 0).unwrap();
        assert!(w9 >= w5 && w9 >= 195, "{w5} {w9}");
    }
}
