//! Crossing point of failure-rate curves at different distances.

use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{fnv1a, trial_rng};

pub const BOOTSTRAP_RESAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    pub hits: u64,
    pub trials: u64,
}

/// Event counts at increasing knob values for one distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub d: u32,
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairCrossing {
    pub d_small: u32,
    pub d_large: u32,
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    /// Median of the pairwise crossings.
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub pairwise: Vec<PairCrossing>,
    /// Bootstrap resamples that produced a crossing.
    pub resamples_used: usize,
}

/// Smoothed rate so that zero counts still have a logarithm.
fn smoothed(hits: u64, trials: u64) -> f64 {
    (hits as f64 + 0.5) / (trials as f64 + 1.0)
}

/// First knob interval where the smaller distance goes from above to below
/// the larger one, interpolated linearly in log-log coordinates. Exact ties
/// (equal counts) carry no sign and are skipped.
fn pair_crossing(xs: &[f64], small: &[f64], large: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(small.iter().zip(large))
        .map(|(x, (a, b))| (x.ln(), a.ln() - b.ln()))
        .filter(|&(_, d)| d != 0.0)
        .collect();
    pts.windows(2)
        .find(|w| w[0].1 > 0.0 && w[1].1 < 0.0)
        .map(|w| {
            let ((x0, a), (x1, b)) = (w[0], w[1]);
            (x0 + a / (a - b) * (x1 - x0)).exp()
        })
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

fn pairwise(xs: &[f64], curves: &[(u32, Vec<f64>)]) -> Vec<PairCrossing> {
    let mut out = Vec::new();
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            if let Some(x) = pair_crossing(xs, &curves[i].1, &curves[j].1) {
                out.push(PairCrossing {
                    d_small: curves[i].0,
                    d_large: curves[j].0,
                    x,
                });
            }
        }
    }
    out
}

/// Crossing estimate with a parametric bootstrap interval (`resamples`
/// binomial redraws of every point, seeded by `seed`).
pub fn find_crossing(curves: &[Curve], resamples: usize, seed: u64) -> Result<Crossing> {
    if curves.len() < 2 {
        return Err(Error::param("curves", "need at least two distances"));
    }
    let mut curves = curves.to_vec();
    curves.sort_by_key(|c| c.d);
    let xs: Vec<f64> = curves[0].points.iter().map(|p| p.x).collect();
    if xs.len() < 3 {
        return Err(Error::param("curves", "need at least three knob values"));
    }
    if xs.windows(2).any(|w| !(w[0] < w[1] && w[0] > 0.0)) {
        return Err(Error::param(
            "curves",
            "knob values must be positive and increasing",
        ));
    }
    for c in &curves {
        if c.points.len() != xs.len()
            || c.points
                .iter()
                .zip(&xs)
                .any(|(p, &x)| p.x != x || p.trials == 0)
        {
            return Err(Error::param(
                "curves",
                "all curves must share one knob grid",
            ));
        }
    }
    let rates = |draw: &dyn Fn(&CurvePoint) -> u64| -> Vec<(u32, Vec<f64>)> {
        curves
            .iter()
            .map(|c| {
                (
                    c.d,
                    c.points
                        .iter()
                        .map(|p| smoothed(draw(p), p.trials))
                        .collect(),
                )
            })
            .collect()
    };
    let pairs = pairwise(&xs, &rates(&|p| p.hits));
    if pairs.is_empty() {
        let flat = curves.windows(2).all(|w| w[0].points == w[1].points);
        let why = if flat {
            "curves are identical (degenerate)".to_string()
        } else {
            format!(
                "no sign change of the curve differences over [{}, {}]",
                xs[0],
                xs[xs.len() - 1]
            )
        };
        return Err(Error::NoCrossing(why));
    }
    let estimate = median(&mut pairs.iter().map(|p| p.x).collect::<Vec<_>>());

    let key = fnv1a(b"bootstrap");
    let mut boot = Vec::with_capacity(resamples);
    for b in 0..resamples {
        let rng = std::cell::RefCell::new(trial_rng(seed, key, b as u64));
        let draw = |p: &CurvePoint| {
            let q = p.hits as f64 / p.trials as f64;
            Binomial::new(p.trials, q)
                .map(|bin| bin.sample(&mut *rng.borrow_mut()))
                .unwrap_or(p.hits)
        };
        let pc = pairwise(&xs, &rates(&draw));
        if !pc.is_empty() {
            boot.push(median(&mut pc.iter().map(|p| p.x).collect::<Vec<_>>()));
        }
    }
    boot.sort_by(f64::total_cmp);
    let (ci_low, ci_high) = if boot.is_empty() {
        (estimate, estimate)
    } else {
        (
            quantile(&boot, 0.025).min(estimate),
            quantile(&boot, 0.975).max(estimate),
        )
    };
    Ok(Crossing {
        estimate,
        ci_low,
        ci_high,
        pairwise: pairs,
        resamples_used: boot.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(p_star: f64, xs: &[f64], ds: &[u32], trials: u64) -> Vec<Curve> {
        ds.iter()
            .map(|&d| Curve {
                d,
                points: xs
                    .iter()
                    .map(|&x| {
                        let p = (0.1 * (x / p_star).powf((d as f64 + 1.0) / 2.0)).min(0.5);
                        CurvePoint {
                            x,
                            hits: (p * trials as f64).round() as u64,
                            trials,
                        }
                    })
                    .collect(),
            })
            .collect()
    }

    #[test]
    fn recovers_synthetic_threshold() {
        let p_star = 7e-3;
        let xs: Vec<f64> = (0..9).map(|i| 4e-3 * 1.12f64.powi(i)).collect();
        let c = find_crossing(&synthetic(p_star, &xs, &[3, 5, 7], 1_000_000_000), 200, 1).unwrap();
        assert!((c.estimate / p_star - 1.0).abs() < 0.02, "{c:?}");
        assert!(c.ci_low <= c.estimate && c.estimate <= c.ci_high);
        assert_eq!(c.pairwise.len(), 3);
    }

    #[test]
    fn identical_curves_are_degenerate() {
        let xs = [1e-3, 2e-3, 3e-3];
        let one = synthetic(7e-3, &xs, &[3], 1000).remove(0);
        let mut two = one.clone();
        two.d = 5;
        match find_crossing(&[one, two], 10, 1) {
            Err(Error::NoCrossing(m)) => assert!(m.contains("degenerate")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unbracketed_range_reports_no_crossing() {
        let xs = [1e-3, 1.5e-3, 2e-3];
        assert!(matches!(
            find_crossing(&synthetic(7e-3, &xs, &[3, 5], 1_000_000), 10, 1),
            Err(Error::NoCrossing(_))
        ));
    }

    #[test]
    fn zero_count_ties_are_not_crossings() {
        let pt = |x, hits| CurvePoint {
            x,
            hits,
            trials: 50,
        };
        let c = vec![
            Curve {
                d: 3,
                points: vec![pt(1e-4, 0), pt(2e-4, 1), pt(3e-4, 0)],
            },
            Curve {
                d: 5,
                points: vec![pt(1e-4, 0), pt(2e-4, 0), pt(3e-4, 0)],
            },
        ];
        assert!(matches!(
            find_crossing(&c, 10, 1),
            Err(Error::NoCrossing(_))
        ));
        assert_eq!(
            pair_crossing(&[1.0, 2.0, 4.0], &[2.0, 1.0, 1.0], &[1.0, 1.0, 2.0]).unwrap(),
            2.0
        );
    }

    #[test]
    fn input_validation() {
        let xs = [1e-3, 2e-3, 3e-3];
        let c = synthetic(7e-3, &xs, &[3, 5], 100);
        assert!(find_crossing(&c[..1], 10, 1).is_err());
        let mut bad = c.clone();
        bad[1].points.pop();
        assert!(matches!(
            find_crossing(&bad, 10, 1),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn bootstrap_is_seeded() {
        let xs: Vec<f64> = (0..6).map(|i| 5e-3 * 1.15f64.powi(i)).collect();
        let c = synthetic(7e-3, &xs, &[3, 5], 2000);
        assert_eq!(
            find_crossing(&c, 100, 9).unwrap(),
            find_crossing(&c, 100, 9).unwrap()
        );
    }
}
