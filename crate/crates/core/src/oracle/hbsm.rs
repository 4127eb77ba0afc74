//! Hybrid Bell-state measurement: B_alpha (beam splitter + two PNPDs),
//! falling back on the polarization analyser B_s when both detectors stay dark.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::state::{ket_overlap, real_overlap, Dv, HybridDensity, HybridState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HbsmOutcome {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
    BsSuccessPlus,
    BsSuccessMinus,
    Fail,
}

impl HbsmOutcome {
    pub const ALL: [HbsmOutcome; 7] = [
        HbsmOutcome::PsiPlus,
        HbsmOutcome::PsiMinus,
        HbsmOutcome::PhiPlus,
        HbsmOutcome::PhiMinus,
        HbsmOutcome::BsSuccessPlus,
        HbsmOutcome::BsSuccessMinus,
        HbsmOutcome::Fail,
    ];

    /// The four B_alpha click patterns.
    pub const B_ALPHA: [HbsmOutcome; 4] = [
        HbsmOutcome::PsiPlus,
        HbsmOutcome::PsiMinus,
        HbsmOutcome::PhiPlus,
        HbsmOutcome::PhiMinus,
    ];

    pub fn is_b_alpha(self) -> bool {
        Self::B_ALPHA.contains(&self)
    }
}

impl fmt::Display for HbsmOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            HbsmOutcome::PsiPlus => "psi+",
            HbsmOutcome::PsiMinus => "psi-",
            HbsmOutcome::PhiPlus => "phi+",
            HbsmOutcome::PhiMinus => "phi-",
            HbsmOutcome::BsSuccessPlus => "bs+",
            HbsmOutcome::BsSuccessMinus => "bs-",
            HbsmOutcome::Fail => "fail",
        };
        f.write_str(s)
    }
}

/// Photon-number-parity detector kernels `<gamma|Pi|beta>` for real amplitudes.
pub mod pnpd {
    use super::*;

    pub fn vacuum<T: Scalar>(gamma: T, beta: T) -> T {
        real_overlap(gamma, T::zero()) * real_overlap(T::zero(), beta)
    }

    /// Odd photon number.
    pub fn odd<T: Scalar>(gamma: T, beta: T) -> T {
        (real_overlap(gamma, beta) - real_overlap(gamma, -beta)) / T::lit(2.0)
    }

    /// Even, nonzero photon number.
    pub fn even_nonzero<T: Scalar>(gamma: T, beta: T) -> T {
        (real_overlap(gamma, beta) + real_overlap(gamma, -beta)) / T::lit(2.0) - vacuum(gamma, beta)
    }

    /// Any click.
    pub fn nonvacuum<T: Scalar>(gamma: T, beta: T) -> T {
        real_overlap(gamma, beta) - vacuum(gamma, beta)
    }
}

/// Kernel of a B_alpha outcome on the (sum, difference) output modes, taking
/// `[bra_a, bra_b]` and `[ket_a, ket_b]`.
pub(crate) fn b_alpha_kernel<T: Scalar>(o: HbsmOutcome) -> Option<impl Fn(&[T], &[T]) -> T> {
    type K<T> = fn(T, T) -> T;
    let (ka, kb): (K<T>, K<T>) = match o {
        HbsmOutcome::PsiPlus => (pnpd::even_nonzero, pnpd::vacuum),
        HbsmOutcome::PsiMinus => (pnpd::odd, pnpd::vacuum),
        HbsmOutcome::PhiPlus => (pnpd::vacuum, pnpd::even_nonzero),
        HbsmOutcome::PhiMinus => (pnpd::vacuum, pnpd::odd),
        _ => return None,
    };
    Some(move |bra: &[T], ket: &[T]| ka(bra[0], ket[0]) * kb(bra[1], ket[1]))
}

/// `<b|Phi+-><Phi+-|k>` on two polarization modes.
fn bs_kernel<T: Scalar>(sign: T, b: &[Dv], k: &[Dv]) -> T {
    let amp = |x: &[Dv]| match (x[0], x[1]) {
        (Dv::H, Dv::H) => T::FRAC_1_SQRT_2(),
        (Dv::V, Dv::V) => sign * T::FRAC_1_SQRT_2(),
        _ => T::zero(),
    };
    amp(b) * amp(k)
}

/// Outcome distribution of HBSM on a two-qubit hybrid state whose both qubits
/// suffered loss `eta` beforehand.
///
/// The polarization photons are attenuated by `1 - sqrt(1 - eta)` each so the
/// photon pair survives with probability `1 - eta`.
pub fn hbsm_distribution<T: Scalar>(
    state: &HybridState<T>,
    eta: T,
) -> Result<BTreeMap<HbsmOutcome, T>> {
    if state.n_cv() != 2 || state.n_dv() != 2 {
        return Err(Error::param(
            "state",
            "HBSM acts on exactly two hybrid qubits",
        ));
    }
    if !(eta >= T::zero() && eta < T::one()) {
        return Err(Error::param("eta", "must lie in [0, 1)"));
    }
    let mut rho = state.normalized().to_density();
    let eta_dv = T::one() - (T::one() - eta).sqrt();
    for m in 0..2 {
        rho.cv_loss(m, eta);
        rho.dv_loss(m, eta_dv);
    }
    rho.beam_splitter(0, 1);
    Ok(distribution_after_bs(&rho))
}

fn distribution_after_bs<T: Scalar>(rho: &HybridDensity<T>) -> BTreeMap<HbsmOutcome, T> {
    let u = rho.units();
    let mut out: BTreeMap<HbsmOutcome, T> =
        HbsmOutcome::ALL.iter().map(|&o| (o, T::zero())).collect();
    let kernels: Vec<(HbsmOutcome, Box<dyn Fn(&[T], &[T]) -> T>)> = HbsmOutcome::B_ALPHA
        .iter()
        .map(|&o| {
            let k = b_alpha_kernel::<T>(o).expect("b_alpha outcome");
            (o, Box::new(k) as Box<dyn Fn(&[T], &[T]) -> T>)
        })
        .collect();
    for ((k, b), v) in rho.entries() {
        let ka = [T::lit(k.cv[0] as f64) * u[0], T::lit(k.cv[1] as f64) * u[1]];
        let ba = [T::lit(b.cv[0] as f64) * u[0], T::lit(b.cv[1] as f64) * u[1]];
        let dv_trace = if k.dv == b.dv { T::one() } else { T::zero() };
        for (o, kern) in &kernels {
            *out.get_mut(o).unwrap() = out[o] + v.re * kern(&ba, &ka) * dv_trace;
        }
        let dark = pnpd::vacuum(ba[0], ka[0]) * pnpd::vacuum(ba[1], ka[1]);
        let bp = bs_kernel(T::one(), &b.dv, &k.dv);
        let bm = bs_kernel(-T::one(), &b.dv, &k.dv);
        *out.get_mut(&HbsmOutcome::BsSuccessPlus).unwrap() =
            out[&HbsmOutcome::BsSuccessPlus] + v.re * dark * bp;
        *out.get_mut(&HbsmOutcome::BsSuccessMinus).unwrap() =
            out[&HbsmOutcome::BsSuccessMinus] + v.re * dark * bm;
        // Everything else (dark with B_s failing, or clicks on both detectors,
        // which hybrid-qubit inputs never produce) is a heralded failure.
        let full = ket_overlap(u, b, k);
        let rest = full
            - kernels
                .iter()
                .map(|(_, kern)| kern(&ba, &ka) * dv_trace)
                .fold(T::zero(), |a, x| a + x)
            - dark * (bp + bm);
        *out.get_mut(&HbsmOutcome::Fail).unwrap() = out[&HbsmOutcome::Fail] + v.re * rest;
    }
    out
}

/// Exact HBSM failure probability on `|+_L>|+_L>`.
pub fn oracle_failure_prob<T: Scalar>(alpha: T, eta: T) -> Result<T> {
    let s = HybridState::plus_l(alpha).tensor(&HybridState::plus_l(alpha));
    Ok(hbsm_distribution(&s, eta)?[&HbsmOutcome::Fail])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{hbsm_failure_prob, HybridParams};
    use approx::assert_relative_eq;

    #[test]
    fn parity_kernels_partition_identity() {
        for (g, b) in [(0.3, 0.3), (1.2, -1.2), (0.7, 0.0), (2.0, 1.5)] {
            let sum = pnpd::vacuum(g, b) + pnpd::odd(g, b) + pnpd::even_nonzero(g, b);
            assert_relative_eq!(sum, real_overlap(g, b), epsilon = 1e-14);
        }
    }

    #[test]
    fn failure_matches_closed_form_on_grid() {
        for a in [0.5f64, 0.7425, 1.0, 1.247, 2.0] {
            for eta in [0.0, 1e-3, 3.3e-3, 1e-2] {
                let o = oracle_failure_prob(a, eta).unwrap();
                let c = hbsm_failure_prob(&HybridParams::new(a, eta).unwrap());
                assert!((o - c).abs() < 1e-9, "a={a} eta={eta}: {o} vs {c}");
            }
        }
    }

    #[test]
    fn distribution_is_normalized() {
        let s = HybridState::plus_l(1.247).tensor(&HybridState::plus_l(1.247));
        let d = hbsm_distribution(&s, 0.01).unwrap();
        let total: f64 = d.values().sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-12);
        assert!(d.values().all(|&p| p > -1e-15));
    }

    #[test]
    fn vanishing_amplitude_fails_half_the_time() {
        let o = oracle_failure_prob(1e-6, 0.0).unwrap();
        assert_relative_eq!(o, 0.5, epsilon = 1e-9);
    }
}
