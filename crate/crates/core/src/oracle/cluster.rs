//! Offline three-qubit cluster generation from four hybrid qubits.
//!
//! Inputs: three hybrid qubits at `sqrt2 * alpha` (each split on a 50:50
//! beam splitter into two modes at `alpha`) and one at `alpha`. Two B_alpha
//! measurements fuse Q1-Q2 and Q3-Q4 on their CV parts, then B_I fuses the
//! polarization photons of Q2 and Q3.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::analytic::{attenuated_amplitude, HybridParams};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::hbsm::{b_alpha_kernel, HbsmOutcome};
use super::state::{Dv, DvKraus, HybridDensity, HybridState, Ket};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BiClick {
    H,
    V,
    Fail,
}

impl fmt::Display for BiClick {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BiClick::H => "H",
            BiClick::V => "V",
            BiClick::Fail => "fail",
        })
    }
}

/// Which cluster the circuit prepares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClusterKind {
    /// Linear three-qubit cluster (pi/2 rotator before B_I).
    C3,
    /// GHZ-type variant, rotator removed.
    C3Prime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    X,
    Z,
}

/// Product of single-qubit Paulis on 1-based qubit indices, applied right to
/// left. Empty means identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PauliString(pub Vec<(Pauli, u8)>);

impl PauliString {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, q) in &self.0 {
            let c = match p {
                Pauli::X => 'X',
                Pauli::Z => 'Z',
            };
            write!(f, "{c}{q}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let b = s.as_bytes();
        if !b.len().is_multiple_of(2) {
            return Err(Error::param("pauli", format!("malformed string {s:?}")));
        }
        let mut ops = Vec::with_capacity(b.len() / 2);
        for pair in b.chunks(2) {
            let p = match pair[0] {
                b'X' => Pauli::X,
                b'Z' => Pauli::Z,
                _ => return Err(Error::param("pauli", format!("malformed string {s:?}"))),
            };
            let q = match pair[1] {
                b'1'..=b'9' => pair[1] - b'0',
                _ => return Err(Error::param("pauli", format!("malformed string {s:?}"))),
            };
            ops.push((p, q));
        }
        Ok(Self(ops))
    }
}

use HbsmOutcome::{PhiMinus, PhiPlus, PsiMinus, PsiPlus};

/// Correction table for the linear cluster, keyed by (B_alpha(2,3),
/// B_alpha(5,6)), giving (H-click, V-click) entries.
///
/// The (psi+, psi+, V) entry reads `Z3` in the published table; the circuit
/// actually requires `Z2` there (every other entry agrees with the circuit).
const C3_TABLE: [((HbsmOutcome, HbsmOutcome), (&str, &str)); 16] = [
    ((PsiPlus, PsiPlus), ("", "Z2")),
    ((PsiPlus, PsiMinus), ("Z3", "Z2Z3")),
    ((PsiPlus, PhiPlus), ("Z2", "")),
    ((PsiPlus, PhiMinus), ("Z2Z3", "X3Z2Z3")),
    ((PsiMinus, PsiPlus), ("Z2", "")),
    ((PsiMinus, PsiMinus), ("Z2Z3", "Z3")),
    ((PsiMinus, PhiPlus), ("", "Z2")),
    ((PsiMinus, PhiMinus), ("X3Z2Z3", "Z2Z3")),
    ((PhiPlus, PsiPlus), ("X1", "X1Z1")),
    ((PhiPlus, PsiMinus), ("X2", "X1Z2Z3")),
    ((PhiPlus, PhiPlus), ("X1Z2", "X1")),
    ((PhiPlus, PhiMinus), ("X1Z2Z3", "X1Z3")),
    ((PhiMinus, PsiPlus), ("X2Z2Z3", "X1")),
    ((PhiMinus, PsiMinus), ("X2Z2", "X2")),
    ((PhiMinus, PhiPlus), ("X1", "X1Z2")),
    ((PhiMinus, PhiMinus), ("X2", "X1Z2Z3")),
];

fn check_success(b1: HbsmOutcome, b2: HbsmOutcome, bi: BiClick) -> Result<()> {
    for o in [b1, b2] {
        if !o.is_b_alpha() {
            return Err(Error::FailedOutcome(o.to_string()));
        }
    }
    if bi == BiClick::Fail {
        return Err(Error::FailedOutcome("B_I fail".into()));
    }
    Ok(())
}

/// Local Pauli operation that maps the heralded state to the linear cluster.
pub fn pauli_correction(b1: HbsmOutcome, b2: HbsmOutcome, bi: BiClick) -> Result<PauliString> {
    check_success(b1, b2, bi)?;
    let (_, (h, v)) = C3_TABLE
        .iter()
        .find(|(k, _)| *k == (b1, b2))
        .expect("table covers all B_alpha pairs");
    let s = if bi == BiClick::H { h } else { v };
    s.parse()
}

/// Correction for the GHZ-type variant: X fixes each phi (odd-parity) fusion,
/// one Z absorbs the sign when an odd number of minus-type outcomes occurred.
pub fn pauli_correction_prime(
    b1: HbsmOutcome,
    b2: HbsmOutcome,
    bi: BiClick,
) -> Result<PauliString> {
    check_success(b1, b2, bi)?;
    let mut ops = Vec::new();
    let minus = [b1, b2]
        .iter()
        .filter(|o| matches!(o, PsiMinus | PhiMinus))
        .count()
        + usize::from(bi == BiClick::V);
    if minus % 2 == 1 {
        ops.push((Pauli::Z, 1));
    }
    if matches!(b1, PhiPlus | PhiMinus) {
        ops.push((Pauli::X, 1));
    }
    if matches!(b2, PhiPlus | PhiMinus) {
        ops.push((Pauli::X, 3));
    }
    Ok(PauliString(ops))
}

/// Ideal target state on hybrid qubits of amplitude `alpha`.
pub fn ideal_cluster<T: Scalar>(kind: ClusterKind, alpha: T) -> HybridState<T> {
    let h = T::lit(0.5);
    let c = |x: T| Complex::new(x, T::zero());
    let z = T::zero();
    let amps = match kind {
        // sum_ab (-1)^{ab} |a, a, b>
        ClusterKind::C3 => [h, h, z, z, z, z, h, -h],
        ClusterKind::C3Prime => [T::FRAC_1_SQRT_2(), z, z, z, z, z, z, T::FRAC_1_SQRT_2()],
    };
    HybridState::from_logical(alpha, 3, &amps.map(c))
}

/// Heralded output of the generation circuit for one outcome triple.
#[derive(Debug, Clone)]
pub struct GeneratedCluster<T> {
    /// Unnormalised post-measurement state; its trace is `probability`.
    pub rho: HybridDensity<T>,
    pub probability: T,
}

fn b_i_kraus<T: Scalar>(kind: ClusterKind, click: BiClick) -> DvKraus<T> {
    let (h, v) = (Dv::H, Dv::V);
    match kind {
        ClusterKind::C3 => {
            // H click: (-1)^{xy}; the V click carries an extra phase on the
            // output photon.
            let s = if click == BiClick::H { 1.0 } else { -1.0 };
            DvKraus::new(vec![
                (vec![h], vec![h, h], T::lit(0.5)),
                (vec![h], vec![h, v], T::lit(0.5)),
                (vec![v], vec![v, h], T::lit(0.5 * s)),
                (vec![v], vec![v, v], T::lit(-0.5 * s)),
            ])
        }
        ClusterKind::C3Prime => {
            let s = if click == BiClick::H { 1.0 } else { -1.0 };
            let r = std::f64::consts::FRAC_1_SQRT_2;
            DvKraus::new(vec![
                (vec![h], vec![h, h], T::lit(r)),
                (vec![v], vec![v, v], T::lit(r * s)),
            ])
        }
    }
}

fn input_state<T: Scalar>(alpha: T) -> HybridDensity<T> {
    let big = alpha * T::SQRT_2();
    // CV modes: Q1 (0,1), Q2 (2,3), Q3 (4), Q4 (5,6); the odd partner modes
    // start in vacuum and are filled by the splitting beam splitters.
    let units = vec![big, big, big, big, alpha, big, big];
    let mut s = HybridState::empty(units, 4);
    let amp = Complex::new(T::lit(0.25), T::zero());
    for i in 0..16u8 {
        let x: Vec<u8> = (0..4).map(|q| (i >> (3 - q)) & 1).collect();
        let sg = |b: u8| if b == 0 { 1i8 } else { -1 };
        let cv = vec![sg(x[0]), 0, sg(x[1]), 0, sg(x[2]), sg(x[3]), 0];
        let dv = x.iter().map(|&b| Dv::from_bit(b)).collect();
        s.add(Ket::new(cv, dv), amp);
    }
    let mut rho = s.to_density();
    rho.beam_splitter(0, 1);
    rho.beam_splitter(2, 3);
    rho.beam_splitter(5, 6);
    rho
}

/// Runs the circuit with attenuated amplitude `alpha'` and post-selects on
/// the given outcomes.
pub fn generate_cluster<T: Scalar>(
    kind: ClusterKind,
    params: &HybridParams<T>,
    b1: HbsmOutcome,
    b2: HbsmOutcome,
    bi: BiClick,
) -> Result<GeneratedCluster<T>> {
    check_success(b1, b2, bi)?;
    let a = attenuated_amplitude(params);
    let mut rho = input_state(a);
    rho.beam_splitter(1, 2);
    let rho = rho.trace_out_cv(&[1, 2], b_alpha_kernel::<T>(b1).expect("checked"));
    // modes now: 0, 3, 4, 5, 6 -> 0..5; B_alpha(5,6) acts on new (2, 3)
    let mut rho = rho;
    rho.beam_splitter(2, 3);
    let rho = rho.trace_out_cv(&[2, 3], b_alpha_kernel::<T>(b2).expect("checked"));
    let rho = rho.apply_dv_kraus(&[1, 2], &b_i_kraus(kind, bi));
    let probability = rho.trace();
    Ok(GeneratedCluster { rho, probability })
}

/// Linear-cluster variant of [`generate_cluster`].
pub fn generate_c3<T: Scalar>(
    params: &HybridParams<T>,
    b1: HbsmOutcome,
    b2: HbsmOutcome,
    bi: BiClick,
) -> Result<GeneratedCluster<T>> {
    generate_cluster(ClusterKind::C3, params, b1, b2, bi)
}

/// Applies a Pauli string to a three-hybrid-qubit density (qubit `q` is CV
/// mode `q-1` and DV mode `q-1`).
pub fn apply_pauli<T: Scalar>(rho: &mut HybridDensity<T>, p: &PauliString) {
    for &(op, q) in p.0.iter().rev() {
        let m = usize::from(q - 1);
        match op {
            Pauli::X => rho.pauli_x(m, m),
            Pauli::Z => rho.pauli_z(m),
        }
    }
}

/// Fidelity with the ideal cluster after applying the tabulated correction.
pub fn corrected_fidelity<T: Scalar>(
    kind: ClusterKind,
    params: &HybridParams<T>,
    b1: HbsmOutcome,
    b2: HbsmOutcome,
    bi: BiClick,
) -> Result<T> {
    let mut g = generate_cluster(kind, params, b1, b2, bi)?;
    let corr = match kind {
        ClusterKind::C3 => pauli_correction(b1, b2, bi)?,
        ClusterKind::C3Prime => pauli_correction_prime(b1, b2, bi)?,
    };
    apply_pauli(&mut g.rho, &corr);
    Ok(g.rho
        .fidelity(&ideal_cluster(kind, attenuated_amplitude(params))))
}

/// All 32 successful outcome triples.
pub fn successful_outcomes() -> impl Iterator<Item = (HbsmOutcome, HbsmOutcome, BiClick)> {
    HbsmOutcome::B_ALPHA.into_iter().flat_map(|b1| {
        HbsmOutcome::B_ALPHA.into_iter().flat_map(move |b2| {
            [BiClick::H, BiClick::V]
                .into_iter()
                .map(move |c| (b1, b2, c))
        })
    })
}

/// Total heralded success probability of the circuit.
pub fn cluster_success_probability<T: Scalar>(
    kind: ClusterKind,
    params: &HybridParams<T>,
) -> Result<T> {
    successful_outcomes().try_fold(T::zero(), |acc, (b1, b2, c)| {
        Ok(acc + generate_cluster(kind, params, b1, b2, c)?.probability)
    })
}
