//! Closed-form rates and resource counts for hybrid coherent-state /
//! polarization qubits under photon loss.
//!
//! Every function here is a pure expression in the amplitude `alpha` and the
//! photon-loss rate `eta`; the simulation and reporting layers derive all of
//! their probabilities from this module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Average number of hybrid qubits removed per failed entangling measurement
/// (creation failures cost two, connection failures one, in equal numbers).
pub const QUBITS_LOST_PER_FAILURE: f64 = 1.5;

/// Physical knobs: coherent amplitude and photon-loss rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridParams<T> {
    alpha: T,
    eta: T,
}

impl<T: Scalar> HybridParams<T> {
    /// `alpha` must be finite and non-negative, `eta` in `[0, 1)`.
    pub fn new(alpha: T, eta: T) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= T::zero()) {
            return Err(Error::param(
                "alpha",
                format!("{alpha} is not a finite amplitude >= 0"),
            ));
        }
        if !(eta >= T::zero() && eta < T::one()) {
            return Err(Error::param("eta", format!("{eta} outside [0, 1)")));
        }
        Ok(Self { alpha, eta })
    }

    /// Lossless parameters.
    pub fn lossless(alpha: T) -> Result<Self> {
        Self::new(alpha, T::zero())
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn eta(&self) -> T {
        self.eta
    }
}

/// Every rate the simulator consumes, derived from one [`HybridParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel<T> {
    pub alpha_eff: T,
    pub p_f: T,
    pub p_z_single: T,
    pub p_z_ent: T,
    pub p_leak: T,
}

impl<T: Scalar> NoiseModel<T> {
    pub fn from_params(p: &HybridParams<T>) -> Self {
        Self {
            alpha_eff: attenuated_amplitude(p),
            p_f: hbsm_failure_prob(p),
            p_z_single: dephasing_single(p),
            p_z_ent: dephasing_entangling(p),
            p_leak: qubit_loss_prob(p),
        }
    }
}

/// `alpha' = sqrt(1 - eta) * alpha`.
pub fn attenuated_amplitude<T: Scalar>(p: &HybridParams<T>) -> T {
    (T::one() - p.eta).sqrt() * p.alpha
}

/// Overlap `<alpha'|-alpha'> = exp(-2 alpha'^2)` that controls every
/// coherent-state measurement failure.
fn attenuated_overlap<T: Scalar>(p: &HybridParams<T>) -> T {
    let a = attenuated_amplitude(p);
    (-T::lit(2.0) * a * a).exp()
}

/// Failure probability of the hybrid Bell measurement,
/// `(1 + eta) exp(-2 alpha'^2) / 2`.
pub fn hbsm_failure_prob<T: Scalar>(p: &HybridParams<T>) -> T {
    (T::one() + p.eta) * attenuated_overlap(p) / T::lit(2.0)
}

/// Loss-induced dephasing of a stored hybrid qubit,
/// `[1 - (1 - eta) exp(-2 eta alpha^2)] / 2`.
pub fn dephasing_single<T: Scalar>(p: &HybridParams<T>) -> T {
    let a2 = p.alpha * p.alpha;
    (T::one() - (T::one() - p.eta) * (-T::lit(2.0) * p.eta * a2).exp()) / T::lit(2.0)
}

/// Dephasing that the coherent-state Bell measurement leaves on each
/// neighbouring qubit, `(1 - exp(-4 eta alpha^2)) / 4`.
pub fn dephasing_entangling<T: Scalar>(p: &HybridParams<T>) -> T {
    let a2 = p.alpha * p.alpha;
    (T::one() - (-T::lit(4.0) * p.eta * a2).exp()) / T::lit(4.0)
}

/// Pauli weights of the two-qubit channel left by a lossy coherent-state
/// Bell measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaChannelWeights<T> {
    pub w_ii: T,
    pub w_zi: T,
    pub w_iz: T,
}

impl<T: Scalar> BaChannelWeights<T> {
    pub fn total(&self) -> T {
        self.w_ii + self.w_zi + self.w_iz
    }
}

pub fn ba_channel_weights<T: Scalar>(p: &HybridParams<T>) -> BaChannelWeights<T> {
    let a2 = p.alpha * p.alpha;
    let e = (-T::lit(4.0) * p.eta * a2).exp();
    let z = (T::one() - e) / T::lit(4.0);
    BaChannelWeights {
        w_ii: (T::one() + e) / T::lit(2.0),
        w_zi: z,
        w_iz: z,
    }
}

/// Probability that a lossy hybrid qubit has left the logical subspace
/// (vacuum overlap), `eta exp(-alpha'^2)`.
pub fn qubit_loss_prob<T: Scalar>(p: &HybridParams<T>) -> T {
    let a = attenuated_amplitude(p);
    p.eta * (-a * a).exp()
}

/// Expected fraction of lattice qubits removed by heralded measurement
/// failures, `1.5 * p_f`.
pub fn missing_fraction<T: Scalar>(p: &HybridParams<T>) -> T {
    T::lit(QUBITS_LOST_PER_FAILURE) * hbsm_failure_prob(p)
}

/// Expected hybrid qubits consumed per three-qubit resource cluster,
/// `8 / (1 - exp(-2 alpha'^2))^2`.
pub fn three_cluster_cost<T: Scalar>(p: &HybridParams<T>) -> T {
    let s = T::one() - attenuated_overlap(p);
    T::lit(8.0) / (s * s)
}

/// Expected hybrid qubits per star cluster (three resource clusters).
pub fn star_cluster_cost<T: Scalar>(p: &HybridParams<T>) -> T {
    T::lit(3.0) * three_cluster_cost(p)
}

/// Expected hybrid qubits for a lattice of side `5d/4` (`6 l^3` star
/// clusters): `1125 d^3 / [4 (1 - exp(-2 alpha'^2))^2]`.
pub fn total_resource<T: Scalar>(d: u32, p: &HybridParams<T>) -> Result<T> {
    if d < 3 {
        return Err(Error::param("d", format!("distance {d} < 3")));
    }
    let s = T::one() - attenuated_overlap(p);
    let d = T::lit(d as f64);
    Ok(T::lit(1125.0) * d * d * d / (T::lit(4.0) * s * s))
}

/// Logical error rates at the two largest simulated distances, used to
/// extrapolate the suppression of `p_L` with distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationParams<T> {
    a: T,
    a_prime: T,
    d_a_prime: u32,
}

impl<T: Scalar> ExtrapolationParams<T> {
    pub fn new(a: T, a_prime: T, d_a_prime: u32) -> Result<Self> {
        if !(a_prime > T::zero() && a_prime < a && a < T::one()) {
            return Err(Error::param(
                "a, a_prime",
                format!("need 0 < a'={a_prime} < a={a} < 1"),
            ));
        }
        if d_a_prime < 3 {
            return Err(Error::param("d_a_prime", format!("{d_a_prime} < 3")));
        }
        Ok(Self {
            a,
            a_prime,
            d_a_prime,
        })
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn a_prime(&self) -> T {
        self.a_prime
    }

    pub fn d_a_prime(&self) -> u32 {
        self.d_a_prime
    }

    pub fn suppression_ratio(&self) -> T {
        self.a / self.a_prime
    }

    /// `p_L(d) = a' / (a/a')^((d - d_a') / 2)`, for real `d`.
    pub fn logical_rate(&self, d: T) -> T {
        let exponent = (d - T::lit(self.d_a_prime as f64)) / T::lit(2.0);
        self.a_prime / self.suppression_ratio().powf(exponent)
    }
}

/// Distance needed for a target logical rate, as solved and as reported.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RequiredDistance<T> {
    pub real: T,
    pub nearest: u32,
}

/// Inverts [`ExtrapolationParams::logical_rate`] for `target_pl`.
pub fn required_distance<T: Scalar>(
    target_pl: T,
    e: &ExtrapolationParams<T>,
) -> Result<RequiredDistance<T>> {
    if !(target_pl > T::zero() && target_pl <= e.a_prime) {
        return Err(Error::ExtrapolationRange {
            target: target_pl.to_f64_lossy(),
            a_prime: e.a_prime.to_f64_lossy(),
        });
    }
    let real = T::lit(e.d_a_prime as f64)
        + T::lit(2.0) * (e.a_prime / target_pl).ln() / e.suppression_ratio().ln();
    let nearest = real.round().to_u32().unwrap_or(u32::MAX);
    Ok(RequiredDistance { real, nearest })
}

/// Photons consumed by a redundantly encoded topological photonic lattice of
/// side `5d/4`: `(2R + 1) * 6 * (5d/4)^3`.
pub fn tpqc_resource<T: Scalar>(d: u32, repeats: u32) -> Result<T> {
    if d < 3 {
        return Err(Error::param("d", format!("distance {d} < 3")));
    }
    if repeats < 1 {
        return Err(Error::param("R", "repeat count must be >= 1"));
    }
    let side = T::lit(5.0 * d as f64 / 4.0);
    Ok(T::lit((2 * repeats + 1) as f64) * T::lit(6.0) * side * side * side)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn hp(a: f64, e: f64) -> HybridParams<f64> {
        HybridParams::new(a, e).unwrap()
    }

    // Reference values below were evaluated independently at 30 significant
    // digits and frozen here.

    #[test]
    fn amplitude_examples() {
        assert_eq!(attenuated_amplitude(&hp(1.0, 0.0)), 1.0);
        assert_relative_eq!(
            attenuated_amplitude(&hp(1.247, 3.3e-3)),
            1.244_940_749_714_62,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            attenuated_amplitude(&hp(2.0, 0.5)),
            2f64.sqrt(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn failure_examples() {
        assert_relative_eq!(
            hbsm_failure_prob(&hp(1.247, 0.0)),
            0.022_300_076_265_151_85,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            hbsm_failure_prob(&hp(1.247, 3.3e-3)),
            0.022_604_471_140_172_94,
            max_relative = 1e-12
        );
        assert_eq!(hbsm_failure_prob(&hp(1e3, 0.0)), 0.0);
        assert_relative_eq!(hbsm_failure_prob(&hp(0.0, 0.0)), 0.5);
    }

    #[test]
    fn dephasing_examples() {
        assert_eq!(dephasing_single(&hp(1.7, 0.0)), 0.0);
        assert_relative_eq!(
            dephasing_single(&hp(1.247, 3.3e-3)),
            0.006_738_439_509_655_515,
            max_relative = 1e-12
        );
        // loss level that reproduces the reported threshold dephasing rate
        assert_relative_eq!(
            dephasing_single(&hp(1.247, 3.379_640_018_292_475e-3)),
            6.9e-3,
            max_relative = 1e-10
        );
        assert_eq!(dephasing_entangling(&hp(0.4, 0.0)), 0.0);
        assert_relative_eq!(
            dephasing_entangling(&hp(1.247, 3.3e-3)),
            0.005_079_223_001_702_995,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            dephasing_entangling(&hp(1.0, 0.1)),
            0.082_419_988_491_017_86,
            max_relative = 1e-12
        );
    }

    #[test]
    fn channel_weight_examples() {
        let w = ba_channel_weights(&hp(1.3, 0.0));
        assert_eq!((w.w_ii, w.w_zi, w.w_iz), (1.0, 0.0, 0.0));
        let w = ba_channel_weights(&hp(1.247, 3.3e-3));
        assert_relative_eq!(w.w_ii, 0.989_841_553_996_594, max_relative = 1e-12);
        assert_relative_eq!(w.w_zi, 0.005_079_223_001_702_995, max_relative = 1e-12);
        assert_relative_eq!(w.w_iz, w.w_zi);
    }

    #[test]
    fn leakage_examples() {
        assert_eq!(qubit_loss_prob(&hp(1.247, 0.0)), 0.0);
        assert_relative_eq!(
            qubit_loss_prob(&hp(1.247, 3.3e-3)),
            7.005_041_409_321_848e-4,
            max_relative = 1e-12
        );
        assert_relative_eq!(qubit_loss_prob(&hp(0.0, 0.2)), 0.2);
    }

    #[test]
    fn missing_fraction_examples() {
        assert!((missing_fraction(&hp(0.7425, 0.0)) - 0.249).abs() < 1e-3);
        assert_relative_eq!(
            missing_fraction(&hp(0.7425, 0.0)),
            0.249_001_944_713_940_6,
            max_relative = 1e-12
        );
        assert_eq!(missing_fraction(&hp(1e3, 0.0)), 0.0);
        assert_relative_eq!(
            missing_fraction(&hp(1.247, 3.3e-3)),
            0.033_906_706_710_259_41,
            max_relative = 1e-12
        );
    }

    #[test]
    fn cluster_cost_examples() {
        assert_relative_eq!(
            three_cluster_cost(&hp(1.247, 0.0)),
            8.764_348_772_954_566,
            max_relative = 1e-12
        );
        assert_relative_eq!(three_cluster_cost(&hp(1e3, 0.0)), 8.0);
        assert_relative_eq!(
            three_cluster_cost(&hp(0.7425, 0.0)),
            17.928_354_608_883_55,
            max_relative = 1e-12
        );
        assert_relative_eq!(star_cluster_cost(&hp(1e3, 0.0)), 24.0);
        assert_relative_eq!(
            star_cluster_cost(&hp(1.247, 0.0)),
            26.293_046_318_863_7,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            star_cluster_cost(&hp(1.247, 3.3e-3)),
            26.318_388_455_278_49,
            max_relative = 1e-12
        );
    }

    #[test]
    fn total_resource_examples() {
        let p = hp(1.247, 3.3e-3);
        let n14 = total_resource(14, &p).unwrap();
        assert_relative_eq!(n14, 846_300.678_765_049_1, max_relative = 1e-12);
        assert!((n14 / 8.5e5 - 1.0).abs() < 0.05);
        let n38 = total_resource(38, &p).unwrap();
        assert!((n38 / 1.7e7 - 1.0).abs() < 0.05);
        assert!(total_resource(2, &p).is_err());
    }

    #[test]
    fn required_distance_examples() {
        let e = ExtrapolationParams::new(4.4e-4, 7.9e-5, 9).unwrap();
        let r = required_distance(1e-6, &e).unwrap();
        assert_relative_eq!(r.real, 14.088_661_823_775_86, max_relative = 1e-12);
        assert_eq!(r.nearest, 14);
        let r = required_distance(1e-15, &e).unwrap();
        assert_relative_eq!(r.real, 38.222_990_757_095_84, max_relative = 1e-12);
        assert_eq!(r.nearest, 38);
        let r = required_distance(7.9e-5, &e).unwrap();
        assert_relative_eq!(r.real, 9.0);
        assert!(required_distance(1e-4, &e).is_err());
        assert!(required_distance(0.0, &e).is_err());
    }

    #[test]
    fn tpqc_examples() {
        let n: f64 = tpqc_resource(225, 7).unwrap();
        assert_relative_eq!(n, 2_002_258_300.781_25, max_relative = 1e-12);
        assert!((tpqc_resource::<f64>(621, 7).unwrap() / 4.2e10 - 1.0).abs() < 0.1);
        assert!((tpqc_resource::<f64>(60, 7).unwrap() / 3.8e7 - 1.0).abs() < 0.1);
        assert!((tpqc_resource::<f64>(162, 7).unwrap() / 7.5e8 - 1.0).abs() < 0.1);
        assert!(tpqc_resource::<f64>(2, 7).is_err());
        assert!(tpqc_resource::<f64>(10, 0).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(HybridParams::new(-1.0, 0.0).is_err());
        assert!(HybridParams::new(1.0, 1.0).is_err());
        assert!(HybridParams::new(1.0, -1e-9).is_err());
        assert!(HybridParams::new(f64::NAN, 0.0).is_err());
        assert!(ExtrapolationParams::new(1e-3, 1e-2, 9).is_err());
        assert!(ExtrapolationParams::new(1e-2, 1e-3, 1).is_err());
    }

    #[test]
    fn single_precision_agrees() {
        let p32 = HybridParams::new(1.247f32, 3.3e-3).unwrap();
        let nm = NoiseModel::from_params(&p32);
        assert!((nm.p_f - 0.022_604_47).abs() < 1e-6);
        assert!((nm.p_z_single - 0.006_738_44).abs() < 1e-6);
    }

    #[test]
    fn zero_loss_collapse() {
        for a in [0.3, 0.7425, 1.247, 2.5] {
            let nm = NoiseModel::from_params(&hp(a, 0.0));
            assert_eq!(nm.p_z_single, 0.0);
            assert_eq!(nm.p_z_ent, 0.0);
            assert_eq!(nm.p_leak, 0.0);
            assert_relative_eq!(nm.p_f, (-2.0 * a * a).exp() / 2.0, max_relative = 1e-15);
        }
    }

    proptest! {
        #[test]
        fn failure_decreases_in_alpha(a in 0.05f64..3.0, da in 1e-3f64..0.5, e in 0.0f64..0.3) {
            prop_assert!(hbsm_failure_prob(&hp(a + da, e)) < hbsm_failure_prob(&hp(a, e)));
        }

        #[test]
        fn dephasing_increases_in_eta(a in 0.1f64..3.0, e in 0.0f64..0.5, de in 1e-4f64..0.3) {
            prop_assert!(dephasing_single(&hp(a, e + de)) > dephasing_single(&hp(a, e)));
            prop_assert!(dephasing_entangling(&hp(a, e + de)) > dephasing_entangling(&hp(a, e)));
        }

        #[test]
        fn weights_normalized(a in 0.0f64..4.0, e in 0.0f64..0.99) {
            prop_assert!((ba_channel_weights(&hp(a, e)).total() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn rates_in_range(a in 0.0f64..4.0, e in 0.0f64..0.99) {
            let nm = NoiseModel::from_params(&hp(a, e));
            prop_assert!((0.0..=0.5).contains(&nm.p_z_single));
            prop_assert!((0.0..=0.25).contains(&nm.p_z_ent));
            prop_assert!((0.0..1.0).contains(&nm.p_leak));
            prop_assert!(nm.p_f >= 0.0);
        }

        #[test]
        fn required_distance_inverts(t_exp in 5.0f64..20.0, ratio in 1.05f64..20.0, ap in 1e-5f64..0.1) {
            let e = ExtrapolationParams::new((ap * ratio).min(0.999), ap, 9).unwrap();
            let target = ap * 10f64.powf(-t_exp).max(1e-300) ;
            let r = required_distance(target, &e).unwrap();
            let back = e.logical_rate(r.real);
            prop_assert!(((back - target) / target).abs() < 1e-10);
        }
    }
}
