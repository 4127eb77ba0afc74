//! Exact state-level algebra for hybrid qubits, used to cross-check every
//! closed form in [`crate::analytic`] and the cluster correction table.

mod channel;
mod cluster;
mod hbsm;
mod state;
mod verify;

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use channel::{
    ba_induced_channel, verify_bs_losstolerance, BaInducedChannel, LossToleranceCase,
    LossToleranceReport,
};
pub use cluster::{
    apply_pauli, cluster_success_probability, corrected_fidelity, generate_c3, generate_cluster,
    ideal_cluster, pauli_correction, pauli_correction_prime, successful_outcomes, BiClick,
    ClusterKind, GeneratedCluster, Pauli, PauliString,
};
pub use hbsm::{hbsm_distribution, oracle_failure_prob, pnpd, HbsmOutcome};
pub use state::{Dv, DvKraus, HybridDensity, HybridState, Ket};
pub use verify::{run_cross_checks, CrossCheck};

/// `<beta|gamma> = exp(-(|beta|^2 + |gamma|^2)/2 + conj(beta) gamma)`.
pub fn coherent_overlap<T: Scalar>(beta: Complex<T>, gamma: Complex<T>) -> Complex<T> {
    let two = T::lit(2.0);
    (Complex::new(-(beta.norm_sqr() + gamma.norm_sqr()) / two, T::zero()) + beta.conj() * gamma)
        .exp()
}

/// The three CV states a hybrid qubit mode can be found in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CVBasis<T> {
    amplitude: T,
}

impl<T: Scalar> CVBasis<T> {
    pub fn new(amplitude: T) -> Result<Self> {
        if !amplitude.is_finite() {
            return Err(Error::param("amplitude", "must be finite"));
        }
        Ok(Self { amplitude })
    }

    pub fn amplitude(&self) -> T {
        self.amplitude
    }

    /// Amplitudes of `|+a>`, `|-a>`, vacuum.
    pub fn kets(&self) -> [T; 3] {
        [self.amplitude, -self.amplitude, T::zero()]
    }

    pub fn gram(&self) -> [[T; 3]; 3] {
        let k = self.kets();
        let c = |x: T| Complex::new(x, T::zero());
        let mut g = [[T::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                g[i][j] = coherent_overlap(c(k[i]), c(k[j])).re;
            }
        }
        g
    }
}

fn check_eta<T: Scalar>(eta: T) -> Result<()> {
    if eta >= T::zero() && eta < T::one() {
        Ok(())
    } else {
        Err(Error::param("eta", "must lie in [0, 1)"))
    }
}

/// Photon loss `eta` on the listed hybrid qubits (qubit `q` is CV mode `q`
/// together with DV mode `q`).
pub fn apply_loss_to<T: Scalar>(
    rho: &HybridDensity<T>,
    qubits: &[usize],
    eta: T,
) -> Result<HybridDensity<T>> {
    check_eta(eta)?;
    let mut out = rho.clone();
    for &q in qubits {
        if q >= rho.n_cv() || q >= rho.n_dv() {
            return Err(Error::UnknownQubit(q));
        }
        out.cv_loss(q, eta);
        out.dv_loss(q, eta);
    }
    Ok(out)
}

/// Photon loss `eta` on every hybrid qubit of `rho`.
pub fn apply_loss<T: Scalar>(rho: &HybridDensity<T>, eta: T) -> Result<HybridDensity<T>> {
    let n = rho.n_cv().min(rho.n_dv());
    apply_loss_to(rho, &(0..n).collect::<Vec<_>>(), eta)
}

/// Physical spectrum of `rho`: eigenvalues of `G^{1/2} R G^{1/2}` where `R`
/// holds the expansion coefficients and `G` the Gram matrix of its support.
pub fn spectrum(rho: &HybridDensity<f64>) -> Vec<f64> {
    let sup = rho.support();
    let n = sup.len();
    if n == 0 {
        return Vec::new();
    }
    let c = |x: f64| Complex::new(x, 0.0);
    let u = rho.units();
    let g = DMatrix::from_fn(n, n, |i, j| c(state::ket_overlap(u, &sup[i], &sup[j])));
    let r = DMatrix::from_fn(n, n, |i, j| rho.entry(&sup[i], &sup[j]));
    let eg = g.symmetric_eigen();
    let sqrt_d = DMatrix::from_diagonal(&eg.eigenvalues.map(|x| c(x.max(0.0).sqrt())));
    let half = &eg.eigenvectors * sqrt_d * eg.eigenvectors.adjoint();
    let m = &half * r * &half;
    let m = (&m + m.adjoint()) * c(0.5);
    let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn overlap_identities() {
        let a = 1.247f64;
        let c = |x: f64| Complex::new(x, 0.0);
        assert_relative_eq!(coherent_overlap(c(a), c(a)).re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(
            coherent_overlap(c(a), c(-a)).re,
            0.0446001525303037,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            coherent_overlap(c(a), c(0.0)).re,
            (-a * a / 2.0).exp(),
            max_relative = 1e-14
        );
        // complex phases: |<b|g>|^2 = exp(-|b-g|^2)
        let (b, g) = (Complex::new(0.3f64, 0.7), Complex::new(-0.2f64, 0.1));
        assert_relative_eq!(
            coherent_overlap(b, g).norm_sqr(),
            (-(b - g).norm_sqr()).exp(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn cv_basis_gram_is_psd_with_unit_diagonal() {
        for a in [0.0f64, 0.4, 1.247, 3.0] {
            let g = CVBasis::new(a).unwrap().gram();
            let m = nalgebra::Matrix3::from_fn(|i, j| g[i][j]);
            for i in 0..3 {
                assert_relative_eq!(g[i][i], 1.0, epsilon = 1e-15);
            }
            assert_relative_eq!(g[0][1], (-2.0 * a * a).exp(), max_relative = 1e-14);
            assert_relative_eq!(g[0][2], (-a * a / 2.0).exp(), max_relative = 1e-14);
            assert!(m.symmetric_eigenvalues().min() > -1e-12);
        }
    }

    #[test]
    fn loss_on_plus_matches_closed_form() {
        let (a, eta) = (1.247f64, 0.02);
        let rho = apply_loss(&HybridState::plus_l(a).to_density(), eta).unwrap();
        assert_relative_eq!(rho.units()[0], (1.0 - eta).sqrt() * a, epsilon = 1e-15);
        let k0 = Ket::logical(&[0]);
        let k1 = Ket::logical(&[1]);
        assert_relative_eq!(rho.entry(&k0, &k0).re, 0.5 * (1.0 - eta), epsilon = 1e-15);
        assert_relative_eq!(
            rho.entry(&k0, &k1).re,
            0.5 * (1.0 - eta) * (-2.0 * eta * a * a).exp(),
            max_relative = 1e-13
        );
        assert_relative_eq!(rho.vacuum_weight(0), eta, epsilon = 1e-15);
        assert_relative_eq!(rho.trace(), 1.0, epsilon = 1e-12);
        let same = apply_loss(&HybridState::plus_l(a).to_density(), 0.0).unwrap();
        assert_eq!(same, HybridState::plus_l(a).to_density());
        assert!(apply_loss(&same, 1.0).is_err());
        assert!(apply_loss(&same, -0.1).is_err());
    }

    #[test]
    fn loss_is_completely_positive() {
        // hybrid qubit maximally entangled with a polarization reference
        for a in [0.5f64, 1.247] {
            let mut s = HybridState::empty(vec![a], 2);
            let h = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            s.add(Ket::new(vec![1], vec![Dv::H, Dv::H]), h);
            s.add(Ket::new(vec![-1], vec![Dv::V, Dv::V]), h);
            for eta in [0.0, 0.01, 0.2, 0.7] {
                let rho = apply_loss_to(&s.to_density(), &[0], eta).unwrap();
                let ev = spectrum(&rho);
                assert!(ev[0] > -1e-10, "a={a} eta={eta}: {ev:?}");
                assert_relative_eq!(ev.iter().sum::<f64>(), 1.0, epsilon = 1e-10);
            }
        }
    }
}
