//! Oracle-versus-closed-form cross checks, as run by `oracle-verify`.

use num_complex::Complex;
use serde::Serialize;

use crate::analytic::{attenuated_amplitude, ba_channel_weights, hbsm_failure_prob, HybridParams};
use crate::error::Result;

use super::{
    apply_loss_to, ba_induced_channel, cluster_success_probability, corrected_fidelity,
    oracle_failure_prob, spectrum, successful_outcomes, verify_bs_losstolerance, ClusterKind, Dv,
    HybridState, Ket, LossToleranceCase,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheck {
    pub name: String,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CrossCheck {
    fn new(name: impl Into<String>, expected: f64, observed: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            expected,
            observed,
            tolerance,
            pass: (expected - observed).abs() <= tolerance,
        }
    }
}

pub const ALPHA_GRID: [f64; 5] = [0.5, 0.7425, 1.0, 1.247, 2.0];
pub const ETA_GRID: [f64; 4] = [0.0, 1e-3, 3.3e-3, 1e-2];

pub fn run_cross_checks() -> Result<Vec<CrossCheck>> {
    let mut out = Vec::new();
    for a in ALPHA_GRID {
        for eta in ETA_GRID {
            let p = HybridParams::new(a, eta)?;
            out.push(CrossCheck::new(
                format!("hbsm_fail a={a} eta={eta}"),
                hbsm_failure_prob(&p),
                oracle_failure_prob(a, eta)?,
                1e-9,
            ));
        }
    }
    let (zero, one) = (Ket::logical(&[0]), Ket::logical(&[1]));
    for a in ALPHA_GRID {
        for eta in ETA_GRID {
            let mut rho = HybridState::plus_l(a).to_density();
            let before = rho.entry(&zero, &one).re;
            rho.cv_loss(0, eta);
            out.push(CrossCheck::new(
                format!("loss_coherence a={a} eta={eta}"),
                (-2.0 * eta * a * a).exp(),
                rho.entry(&zero, &one).re / before,
                1e-9,
            ));
        }
    }
    for (a, eta) in [(1.247, 3.3e-3), (1.0, 1e-2), (0.7425, 1e-3)] {
        let p = HybridParams::new(a, eta)?;
        let w = ba_channel_weights(&p);
        let c = ba_induced_channel(eta, a)?;
        out.push(CrossCheck::new(
            format!("ba_w_ii a={a} eta={eta}"),
            w.w_ii,
            c.weights.w_ii,
            1e-12,
        ));
        out.push(CrossCheck::new(
            format!("ba_w_zi a={a} eta={eta}"),
            w.w_zi,
            c.weights.w_zi,
            1e-12,
        ));
        out.push(CrossCheck::new(
            format!("ba_w_iz a={a} eta={eta}"),
            w.w_iz,
            c.weights.w_iz,
            1e-12,
        ));
    }
    for (a, eta) in [(1.247, 0.0), (1.247, 3.3e-3)] {
        let p: HybridParams<f64> = HybridParams::new(a, eta)?;
        let ap = attenuated_amplitude(&p);
        out.push(CrossCheck::new(
            format!("c3_success a={a} eta={eta}"),
            0.5 * (1.0 - (-2.0 * ap * ap).exp()).powi(2),
            cluster_success_probability(ClusterKind::C3, &p)?,
            1e-12,
        ));
    }
    for kind in [ClusterKind::C3, ClusterKind::C3Prime] {
        let p: HybridParams<f64> = HybridParams::lossless(1.247)?;
        for (b1, b2, c) in successful_outcomes() {
            out.push(CrossCheck::new(
                format!("{kind:?} round_trip {b1} {b2} {c}"),
                1.0,
                corrected_fidelity(kind, &p, b1, b2, c)?.sqrt(),
                1e-9,
            ));
        }
    }
    for case in [LossToleranceCase::BsFusion, LossToleranceCase::TypeIFusion] {
        for eta in [1e-3, 0.05] {
            let r = verify_bs_losstolerance(case, eta)?;
            out.push(CrossCheck::new(
                format!("{case:?} loss_tolerance eta={eta}"),
                0.0,
                r.max_deviation,
                1e-12,
            ));
        }
    }
    let mut s = HybridState::empty(vec![1.247], 2);
    let h = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    s.add(Ket::new(vec![1], vec![Dv::H, Dv::H]), h);
    s.add(Ket::new(vec![-1], vec![Dv::V, Dv::V]), h);
    let ev = spectrum(&apply_loss_to(&s.to_density(), &[0], 0.05)?);
    out.push(CrossCheck::new(
        "loss_cp min_eigenvalue",
        0.0,
        ev[0].min(0.0),
        1e-10,
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_cross_check_passes() {
        let checks = run_cross_checks().unwrap();
        assert!(checks.len() > 80);
        for c in &checks {
            assert!(c.pass, "{c:?}");
        }
    }
}
