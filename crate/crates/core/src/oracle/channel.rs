//! Noise channels induced by fusion measurements on lossy inputs.

use num_complex::Complex;

use crate::analytic::BaChannelWeights;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::hbsm::{b_alpha_kernel, HbsmOutcome};
use super::state::{Dv, DvKraus, HybridDensity, HybridState, Ket};

/// Output of the B_alpha induced-channel computation.
#[derive(Debug, Clone, PartialEq)]
pub struct BaInducedChannel<T> {
    /// Two-qubit output (CZ undone) with the Hadamard-side cluster on the
    /// first pair; row/column index is `2*x1 + x2`.
    pub placement_a: [[T; 4]; 4],
    /// Same with the cluster on the second pair.
    pub placement_b: [[T; 4]; 4],
    /// Pauli weights of the equal mixture of both placements.
    pub weights: BaChannelWeights<T>,
    /// Weight of `Z (x) Z`; zero for this channel.
    pub w_zz: T,
}

fn cv_pair<T: Scalar>(alpha: T, cluster: bool) -> HybridState<T> {
    let mut s = HybridState::empty(vec![alpha; 2], 0);
    for x in 0..2i8 {
        for y in 0..2i8 {
            let sign = if cluster && x == 1 && y == 1 {
                -1.0
            } else {
                1.0
            };
            if !cluster && x != y {
                continue;
            }
            s.add(
                Ket::new(vec![1 - 2 * x, 1 - 2 * y], vec![]),
                Complex::new(T::lit(sign), T::zero()),
            );
        }
    }
    s
}

/// Fuses a two-mode cluster with a two-mode Bell pair through the middle
/// modes, both of which suffered loss `eta`, and reads the output in the
/// logical basis.
fn placement<T: Scalar>(alpha: T, eta: T, cluster_first: bool) -> [[T; 4]; 4] {
    let (l, r) = if cluster_first {
        (cv_pair(alpha, true), cv_pair(alpha, false))
    } else {
        (cv_pair(alpha, false), cv_pair(alpha, true))
    };
    let mut rho = l.tensor(&r).to_density();
    rho.cv_loss(1, eta);
    rho.cv_loss(2, eta);
    rho.beam_splitter(1, 2);
    let out = rho.trace_out_cv(
        &[1, 2],
        b_alpha_kernel::<T>(HbsmOutcome::PsiPlus).expect("b_alpha"),
    );
    let idx = |k: &Ket| (usize::from(k.cv[0] < 0) << 1) | usize::from(k.cv[1] < 0);
    let mut m = [[T::zero(); 4]; 4];
    for ((k, b), v) in out.entries() {
        let (i, j) = (idx(k), idx(b));
        // undo the CZ that the cluster carried into the output
        let cz = |x: usize| if x == 3 { -T::one() } else { T::one() };
        m[i][j] = m[i][j] + v.re * cz(i) * cz(j);
    }
    let tr = (0..4).map(|i| m[i][i]).fold(T::zero(), |a, x| a + x);
    for row in m.iter_mut() {
        for x in row.iter_mut() {
            *x = *x / tr;
        }
    }
    m
}

fn project<T: Scalar>(m: &[[T; 4]; 4], s1: T, s2: T) -> T {
    let v = [T::one(), s2, s1, s1 * s2].map(|x| x / T::lit(2.0));
    let mut acc = T::zero();
    for i in 0..4 {
        for j in 0..4 {
            acc = acc + v[i] * m[i][j] * v[j];
        }
    }
    acc
}

/// Channel on the two surviving qubits after a successful B_alpha fusion of
/// lossy inputs.
pub fn ba_induced_channel<T: Scalar>(eta: T, alpha: T) -> Result<BaInducedChannel<T>> {
    if !(eta >= T::zero() && eta < T::one()) {
        return Err(Error::param("eta", "must lie in [0, 1)"));
    }
    if !(alpha > T::zero() && alpha.is_finite()) {
        return Err(Error::param("alpha", "must be positive and finite"));
    }
    let a = placement(alpha, eta, true);
    let b = placement(alpha, eta, false);
    let mut mix = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            mix[i][j] = (a[i][j] + b[i][j]) / T::lit(2.0);
        }
    }
    let (p, q) = (T::one(), -T::one());
    Ok(BaInducedChannel {
        placement_a: a,
        placement_b: b,
        weights: BaChannelWeights {
            w_ii: project(&mix, p, p),
            w_zi: project(&mix, q, p),
            w_iz: project(&mix, p, q),
        },
        w_zz: project(&mix, q, q),
    })
}

/// Fusion whose loss tolerance is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossToleranceCase {
    /// B_s on a lossy Bell pair and a lossy two-qubit cluster.
    BsFusion,
    /// B_I joining two lossy Bell pairs into the three-qubit cluster.
    TypeIFusion,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossToleranceReport<T> {
    pub holds: bool,
    /// Largest entrywise deviation from the per-qubit-loss prediction.
    pub max_deviation: T,
    /// Loss rate seen on each output qubit, per outcome.
    pub per_qubit_loss: Vec<Vec<T>>,
}

fn dv_state<T: Scalar>(n: usize, amps: &[(u32, f64)]) -> HybridState<T> {
    let mut s = HybridState::empty(vec![], n);
    for &(bits, a) in amps {
        let dv = (0..n)
            .map(|q| Dv::from_bit(((bits >> (n - 1 - q)) & 1) as u8))
            .collect();
        s.add(Ket::new(vec![], dv), Complex::new(T::lit(a), T::zero()));
    }
    s.normalized()
}

fn compare<T: Scalar>(out: &HybridDensity<T>, ideal: &HybridState<T>) -> (T, Vec<T>) {
    let out = out.normalized();
    let etas: Vec<T> = (0..out.n_dv()).map(|q| out.vacuum_weight(q)).collect();
    let mut expect = ideal.to_density();
    for (q, &e) in etas.iter().enumerate() {
        expect.dv_loss(q, e);
    }
    (out.max_abs_diff(&expect), etas)
}

/// Checks that a polarization fusion on lossy inputs leaves exactly a
/// per-qubit loss channel on its output, with no extra dephasing.
pub fn verify_bs_losstolerance<T: Scalar>(
    case: LossToleranceCase,
    eta: T,
) -> Result<LossToleranceReport<T>> {
    if !(eta >= T::zero() && eta < T::one()) {
        return Err(Error::param("eta", "must lie in [0, 1)"));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let (input, runs): (
        HybridState<T>,
        Vec<(DvKraus<T>, Option<usize>, HybridState<T>)>,
    ) = match case {
        LossToleranceCase::BsFusion => {
            let bell = dv_state(2, &[(0b00, 1.0), (0b11, 1.0)]);
            let cl = dv_state(2, &[(0b00, 1.0), (0b01, 1.0), (0b10, 1.0), (0b11, -1.0)]);
            let proj = |s: f64| {
                DvKraus::new(vec![
                    (vec![], vec![Dv::H, Dv::H], T::lit(r)),
                    (vec![], vec![Dv::V, Dv::V], T::lit(r * s)),
                ])
            };
            let ideal = dv_state(2, &[(0b00, 1.0), (0b01, 1.0), (0b10, 1.0), (0b11, -1.0)]);
            (
                bell.tensor(&cl),
                vec![
                    (proj(1.0), None, ideal.clone()),
                    (proj(-1.0), Some(0), ideal),
                ],
            )
        }
        LossToleranceCase::TypeIFusion => {
            let bell = dv_state(2, &[(0b00, 1.0), (0b11, 1.0)]);
            let ideal = dv_state(
                3,
                &[(0b000, 1.0), (0b001, 1.0), (0b110, 1.0), (0b111, -1.0)],
            );
            let k = |s: f64| {
                DvKraus::new(vec![
                    (vec![Dv::H], vec![Dv::H, Dv::H], T::lit(0.5)),
                    (vec![Dv::H], vec![Dv::H, Dv::V], T::lit(0.5)),
                    (vec![Dv::V], vec![Dv::V, Dv::H], T::lit(0.5 * s)),
                    (vec![Dv::V], vec![Dv::V, Dv::V], T::lit(-0.5 * s)),
                ])
            };
            (
                bell.tensor(&bell),
                vec![(k(1.0), None, ideal.clone()), (k(-1.0), Some(1), ideal)],
            )
        }
    };
    let mut rho = input.to_density();
    for q in 0..rho.n_dv() {
        rho.dv_loss(q, eta);
    }
    let mut worst = T::zero();
    let mut per_qubit_loss = Vec::new();
    for (kraus, z_fix, ideal) in runs {
        let mut out = rho.apply_dv_kraus(&[1, 2], &kraus);
        if let Some(q) = z_fix {
            out.pauli_z(q);
        }
        let (dev, etas) = compare(&out, &ideal);
        worst = worst.max(dev);
        per_qubit_loss.push(etas);
    }
    Ok(LossToleranceReport {
        holds: worst <= T::lit(1e-12),
        max_deviation: worst,
        per_qubit_loss,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{ba_channel_weights, HybridParams};
    use approx::assert_relative_eq;

    #[test]
    fn lossless_channel_is_identity() {
        let c = ba_induced_channel(0.0, 1.247).unwrap();
        assert_relative_eq!(c.weights.w_ii, 1.0, epsilon = 1e-12);
        for row in c.placement_a {
            for x in row {
                assert_relative_eq!(x, 0.25, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn matrices_carry_the_dephasing_factor() {
        let (a, eta) = (1.247f64, 3.3e-3);
        let c = ba_induced_channel(eta, a).unwrap();
        let e = (-4.0 * eta * a * a).exp() / 4.0;
        let q = 0.25;
        let pa = [[q, e, q, e], [e, q, e, q], [q, e, q, e], [e, q, e, q]];
        let pb = [[q, q, e, e], [q, q, e, e], [e, e, q, q], [e, e, q, q]];
        for i in 0..4 {
            for j in 0..4 {
                assert_relative_eq!(c.placement_a[i][j], pa[i][j], epsilon = 1e-13);
                assert_relative_eq!(c.placement_b[i][j], pb[i][j], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn weights_match_closed_form() {
        for a in [0.5f64, 1.0, 1.247, 2.0] {
            for eta in [1e-3, 3.3e-3, 1e-2, 0.1] {
                let c = ba_induced_channel(eta, a).unwrap();
                let w = ba_channel_weights(&HybridParams::new(a, eta).unwrap());
                assert!((c.weights.w_ii - w.w_ii).abs() < 1e-12);
                assert!((c.weights.w_zi - w.w_zi).abs() < 1e-12);
                assert!((c.weights.w_iz - w.w_iz).abs() < 1e-12);
                assert!(c.w_zz.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fusions_add_no_computational_error() {
        for case in [LossToleranceCase::BsFusion, LossToleranceCase::TypeIFusion] {
            for eta in [0.0, 1e-3, 0.05, 0.3] {
                let r = verify_bs_losstolerance(case, eta).unwrap();
                assert!(r.holds, "{case:?} eta={eta}: {}", r.max_deviation);
            }
        }
        let r = verify_bs_losstolerance(LossToleranceCase::BsFusion, 0.1).unwrap();
        assert_relative_eq!(r.per_qubit_loss[0][0], 0.1, epsilon = 1e-12);
        assert_relative_eq!(r.per_qubit_loss[0][1], 0.1, epsilon = 1e-12);
        // the B_I output photon is heralded, so it carries no loss
        let r = verify_bs_losstolerance(LossToleranceCase::TypeIFusion, 0.1).unwrap();
        assert_relative_eq!(r.per_qubit_loss[0][1], 0.0, epsilon = 1e-12);
    }
}
