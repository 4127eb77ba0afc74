//! Hybrid states over a non-orthogonal coherent-state basis.
//!
//! A ket is a product of coherent states `|k_m * u_m>` (integer label `k_m`,
//! per-mode unit amplitude `u_m`, vacuum is label 0) and single-photon
//! polarization modes. Sums of such kets are closed under every linear-optics
//! element used here, so all overlaps are exact.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::scalar::Scalar;

/// Polarization mode content.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dv {
    H,
    V,
    Vac,
}

impl Dv {
    /// Logical value carried by a photon; `None` for vacuum.
    pub fn bit(self) -> Option<u8> {
        match self {
            Dv::H => Some(0),
            Dv::V => Some(1),
            Dv::Vac => None,
        }
    }

    pub fn from_bit(b: u8) -> Self {
        if b == 0 {
            Dv::H
        } else {
            Dv::V
        }
    }
}

/// One basis element: coherent labels per CV mode and DV content per
/// polarization mode.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ket {
    pub cv: Vec<i8>,
    pub dv: Vec<Dv>,
}

impl Ket {
    pub fn new(cv: Vec<i8>, dv: Vec<Dv>) -> Self {
        Self { cv, dv }
    }

    /// Hybrid logical ket: bit 0 is `|+u>|H>`, bit 1 is `|-u>|V>`.
    pub fn logical(bits: &[u8]) -> Self {
        Self {
            cv: bits.iter().map(|&b| if b == 0 { 1 } else { -1 }).collect(),
            dv: bits.iter().map(|&b| Dv::from_bit(b)).collect(),
        }
    }
}

/// `<gamma|beta>` for real coherent amplitudes.
#[inline]
pub(crate) fn real_overlap<T: Scalar>(gamma: T, beta: T) -> T {
    let d = gamma - beta;
    (-(d * d) / T::lit(2.0)).exp()
}

pub(crate) fn ket_overlap<T: Scalar>(units: &[T], bra: &Ket, ket: &Ket) -> T {
    if bra.dv != ket.dv {
        return T::zero();
    }
    bra.cv
        .iter()
        .zip(&ket.cv)
        .zip(units)
        .fold(T::one(), |acc, ((&b, &k), &u)| {
            acc * real_overlap(T::lit(b as f64) * u, T::lit(k as f64) * u)
        })
}

fn accumulate<K: Ord, T: Scalar>(map: &mut BTreeMap<K, Complex<T>>, key: K, v: Complex<T>) {
    let e = map.entry(key).or_default();
    *e = *e + v;
}

/// Pure state: a finite superposition of [`Ket`]s.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridState<T> {
    units: Vec<T>,
    n_dv: usize,
    terms: BTreeMap<Ket, Complex<T>>,
}

impl<T: Scalar> HybridState<T> {
    pub fn empty(units: Vec<T>, n_dv: usize) -> Self {
        Self {
            units,
            n_dv,
            terms: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, ket: Ket, coef: Complex<T>) {
        debug_assert_eq!(ket.cv.len(), self.units.len());
        debug_assert_eq!(ket.dv.len(), self.n_dv);
        accumulate(&mut self.terms, ket, coef);
    }

    /// `n`-qubit hybrid state with amplitude `alpha` on every CV mode;
    /// `amps[i]` multiplies the logical basis state whose bits are the binary
    /// digits of `i`, first qubit most significant.
    pub fn from_logical(alpha: T, n: usize, amps: &[Complex<T>]) -> Self {
        assert_eq!(amps.len(), 1 << n);
        let mut s = Self::empty(vec![alpha; n], n);
        for (i, &a) in amps.iter().enumerate() {
            if a == Complex::default() {
                continue;
            }
            let bits: Vec<u8> = (0..n).map(|q| ((i >> (n - 1 - q)) & 1) as u8).collect();
            s.add(Ket::logical(&bits), a);
        }
        s
    }

    /// `(|0_L> + |1_L>)/sqrt 2`.
    pub fn plus_l(alpha: T) -> Self {
        let h = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
        Self::from_logical(alpha, 1, &[h, h])
    }

    pub fn units(&self) -> &[T] {
        &self.units
    }

    pub fn n_cv(&self) -> usize {
        self.units.len()
    }

    pub fn n_dv(&self) -> usize {
        self.n_dv
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Ket, &Complex<T>)> {
        self.terms.iter()
    }

    /// Mode-wise tensor product (CV modes, then DV modes, concatenated).
    pub fn tensor(&self, other: &Self) -> Self {
        let mut units = self.units.clone();
        units.extend_from_slice(&other.units);
        let mut out = Self::empty(units, self.n_dv + other.n_dv);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let mut cv = ka.cv.clone();
                cv.extend_from_slice(&kb.cv);
                let mut dv = ka.dv.clone();
                dv.extend_from_slice(&kb.dv);
                out.add(Ket::new(cv, dv), *ca * *cb);
            }
        }
        out
    }

    /// `<self|other>` through the coherent-state Gram metric.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.units.len(), other.units.len());
        let mut acc = Complex::default();
        for (kb, cb) in &self.terms {
            for (kk, ck) in &other.terms {
                let g = ket_overlap(&self.units, kb, kk);
                if g != T::zero() {
                    acc = acc + cb.conj() * *ck * g;
                }
            }
        }
        acc
    }

    pub fn norm_sq(&self) -> T {
        self.inner(self).re
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sq().sqrt();
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = *v / n;
        }
        out
    }

    pub fn to_density(&self) -> HybridDensity<T> {
        let mut rho = HybridDensity::empty(self.units.clone(), self.n_dv);
        for (k, ck) in &self.terms {
            for (b, cb) in &self.terms {
                accumulate(&mut rho.entries, (k.clone(), b.clone()), *ck * cb.conj());
            }
        }
        rho
    }
}

/// Operator `sum rho_kb |k><b|` over the same basis.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridDensity<T> {
    units: Vec<T>,
    n_dv: usize,
    entries: BTreeMap<(Ket, Ket), Complex<T>>,
}

impl<T: Scalar> HybridDensity<T> {
    pub fn empty(units: Vec<T>, n_dv: usize) -> Self {
        Self {
            units,
            n_dv,
            entries: BTreeMap::new(),
        }
    }

    pub fn units(&self) -> &[T] {
        &self.units
    }

    pub fn n_cv(&self) -> usize {
        self.units.len()
    }

    pub fn n_dv(&self) -> usize {
        self.n_dv
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(Ket, Ket), &Complex<T>)> {
        self.entries.iter()
    }

    pub fn entry(&self, ket: &Ket, bra: &Ket) -> Complex<T> {
        self.entries
            .get(&(ket.clone(), bra.clone()))
            .copied()
            .unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Physical trace `sum rho_kb <b|k>`.
    pub fn trace(&self) -> T {
        self.entries
            .iter()
            .map(|((k, b), v)| v.re * ket_overlap(&self.units, b, k))
            .fold(T::zero(), |a, x| a + x)
    }

    pub fn scaled(&self, s: T) -> Self {
        let mut out = self.clone();
        for v in out.entries.values_mut() {
            *v = *v * s;
        }
        out
    }

    pub fn normalized(&self) -> Self {
        self.scaled(T::one() / self.trace())
    }

    /// `<psi|rho|psi>`.
    pub fn expectation(&self, psi: &HybridState<T>) -> T {
        assert!(
            psi.units().len() == self.units.len()
                && psi
                    .units()
                    .iter()
                    .zip(&self.units)
                    .all(|(a, b)| (*a - *b).abs() <= T::lit(1e-12) * a.abs().max(T::one())),
            "mode units differ"
        );
        let proj: BTreeMap<Ket, Complex<T>> = self
            .support()
            .into_iter()
            .map(|x| {
                let p = psi
                    .terms()
                    .map(|(p, c)| c.conj() * ket_overlap(&self.units, p, &x))
                    .fold(Complex::default(), |a, v| a + v);
                (x, p)
            })
            .collect();
        let mut acc = Complex::default();
        for ((k, b), v) in &self.entries {
            acc = acc + proj[k] * *v * proj[b].conj();
        }
        acc.re
    }

    /// Fidelity with a pure target, both normalised internally.
    pub fn fidelity(&self, psi: &HybridState<T>) -> T {
        self.expectation(psi) / (psi.norm_sq() * self.trace())
    }

    fn map_entries(
        &mut self,
        mut f: impl FnMut(&Ket, &Ket, Complex<T>, &mut BTreeMap<(Ket, Ket), Complex<T>>),
    ) {
        let old = std::mem::take(&mut self.entries);
        let mut new = BTreeMap::new();
        for ((k, b), v) in old {
            f(&k, &b, v, &mut new);
        }
        new.retain(|_, v: &mut Complex<T>| *v != Complex::default());
        self.entries = new;
    }

    /// Pure-loss channel on CV mode `m`: amplitudes shrink by `sqrt(1-eta)`
    /// and `|k><b|` picks up `<sqrt(eta) b u|sqrt(eta) k u>`.
    pub fn cv_loss(&mut self, m: usize, eta: T) {
        let u = self.units[m];
        self.map_entries(|k, b, v, out| {
            let dk = T::lit((k.cv[m] - b.cv[m]) as f64) * u;
            let f = (-eta * dk * dk / T::lit(2.0)).exp();
            accumulate(out, (k.clone(), b.clone()), v * f);
        });
        self.units[m] = u * (T::one() - eta).sqrt();
    }

    /// Amplitude damping of a single-photon polarization mode.
    pub fn dv_loss(&mut self, m: usize, eta: T) {
        let keep = (T::one() - eta).sqrt();
        self.map_entries(|k, b, v, out| {
            let pk = k.dv[m] != Dv::Vac;
            let pb = b.dv[m] != Dv::Vac;
            let mut f = T::one();
            if pk {
                f = f * keep;
            }
            if pb {
                f = f * keep;
            }
            accumulate(out, (k.clone(), b.clone()), v * f);
            if pk && pb && k.dv[m] == b.dv[m] {
                let mut k2 = k.clone();
                let mut b2 = b.clone();
                k2.dv[m] = Dv::Vac;
                b2.dv[m] = Dv::Vac;
                accumulate(out, (k2, b2), v * eta);
            }
        });
    }

    /// 50:50 beam splitter on two CV modes of equal unit:
    /// `|a, b> -> |(a+b)/sqrt2, (a-b)/sqrt2>`.
    pub fn beam_splitter(&mut self, m1: usize, m2: usize) {
        let u = self.units[m1];
        assert!(
            (u - self.units[m2]).abs() <= T::epsilon() * T::lit(16.0) * u.max(T::one()),
            "beam splitter needs equal mode units"
        );
        let mix = |k: &Ket| {
            let mut k = k.clone();
            let (a, b) = (k.cv[m1], k.cv[m2]);
            k.cv[m1] = a + b;
            k.cv[m2] = a - b;
            k
        };
        self.map_entries(|k, b, v, out| accumulate(out, (mix(k), mix(b)), v));
        let nu = u * T::FRAC_1_SQRT_2();
        self.units[m1] = nu;
        self.units[m2] = nu;
    }

    /// `Tr_modes[Pi rho]` for a projector described by its kernel
    /// `kernel(bra_amplitudes, ket_amplitudes) = <bra|Pi|ket>` on `modes`.
    pub fn trace_out_cv(&self, modes: &[usize], kernel: impl Fn(&[T], &[T]) -> T) -> Self {
        let keep: Vec<usize> = (0..self.n_cv()).filter(|m| !modes.contains(m)).collect();
        let units: Vec<T> = keep.iter().map(|&m| self.units[m]).collect();
        let mut out = Self::empty(units, self.n_dv);
        let mut ka = Vec::with_capacity(modes.len());
        let mut ba = Vec::with_capacity(modes.len());
        for ((k, b), v) in &self.entries {
            ka.clear();
            ba.clear();
            for &m in modes {
                ka.push(T::lit(k.cv[m] as f64) * self.units[m]);
                ba.push(T::lit(b.cv[m] as f64) * self.units[m]);
            }
            let w = kernel(&ba, &ka);
            if w == T::zero() {
                continue;
            }
            let strip = |x: &Ket| Ket::new(keep.iter().map(|&m| x.cv[m]).collect(), x.dv.clone());
            accumulate(&mut out.entries, (strip(k), strip(b)), *v * w);
        }
        out.entries.retain(|_, v| *v != Complex::default());
        out
    }

    /// Applies a polarization Kraus operator `K = sum c |out><in|` acting on
    /// DV modes `inputs`. Outputs (zero or more modes) replace the inputs at
    /// the position of `inputs[0]`; the remaining input modes are removed.
    pub fn apply_dv_kraus(&self, inputs: &[usize], kraus: &DvKraus<T>) -> Self {
        let n_out = kraus.n_out();
        let n_dv = self.n_dv - inputs.len() + n_out;
        let first = inputs[0];
        let rebuild = |x: &Ket, out_modes: &[Dv]| {
            let mut dv = Vec::with_capacity(n_dv);
            for (m, &d) in x.dv.iter().enumerate() {
                if m == first {
                    dv.extend_from_slice(out_modes);
                }
                if !inputs.contains(&m) {
                    dv.push(d);
                }
            }
            Ket::new(x.cv.clone(), dv)
        };
        let mut out = Self::empty(self.units.clone(), n_dv);
        let mut kin: Vec<Dv> = Vec::with_capacity(inputs.len());
        let mut bin: Vec<Dv> = Vec::with_capacity(inputs.len());
        for ((k, b), v) in &self.entries {
            kin.clear();
            bin.clear();
            kin.extend(inputs.iter().map(|&m| k.dv[m]));
            bin.extend(inputs.iter().map(|&m| b.dv[m]));
            for (ko, ki, kc) in &kraus.terms {
                if ki != &kin {
                    continue;
                }
                for (bo, bi, bc) in &kraus.terms {
                    if bi != &bin {
                        continue;
                    }
                    accumulate(
                        &mut out.entries,
                        (rebuild(k, ko), rebuild(b, bo)),
                        *v * *kc * bc.conj(),
                    );
                }
            }
        }
        out.entries.retain(|_, v| *v != Complex::default());
        out
    }

    /// Logical X on the hybrid qubit made of (`cv`, `dv`).
    pub fn pauli_x(&mut self, cv: usize, dv: usize) {
        let flip = |k: &Ket| {
            let mut k = k.clone();
            k.cv[cv] = -k.cv[cv];
            k.dv[dv] = match k.dv[dv] {
                Dv::H => Dv::V,
                Dv::V => Dv::H,
                Dv::Vac => Dv::Vac,
            };
            k
        };
        self.map_entries(|k, b, v, out| accumulate(out, (flip(k), flip(b)), v));
    }

    /// Logical Z: a sign on the vertical photon.
    pub fn pauli_z(&mut self, dv: usize) {
        self.map_entries(|k, b, v, out| {
            let mut s = T::one();
            if k.dv[dv] == Dv::V {
                s = -s;
            }
            if b.dv[dv] == Dv::V {
                s = -s;
            }
            accumulate(out, (k.clone(), b.clone()), v * s);
        });
    }

    /// Distinct kets appearing on either side, in order.
    pub fn support(&self) -> Vec<Ket> {
        let mut s: Vec<Ket> = self
            .entries
            .keys()
            .flat_map(|(k, b)| [k.clone(), b.clone()])
            .collect();
        s.sort();
        s.dedup();
        s
    }

    /// Trace weight of components whose DV mode `m` is empty.
    pub fn vacuum_weight(&self, m: usize) -> T {
        self.entries
            .iter()
            .filter(|((k, b), _)| k.dv[m] == Dv::Vac && b.dv[m] == Dv::Vac)
            .map(|((k, b), v)| v.re * ket_overlap(&self.units, b, k))
            .fold(T::zero(), |a, x| a + x)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut keys: Vec<&(Ket, Ket)> = self.entries.keys().chain(other.entries.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|key| {
                let a = self.entries.get(key).copied().unwrap_or_default();
                let b = other.entries.get(key).copied().unwrap_or_default();
                (a - b).norm()
            })
            .fold(T::zero(), |m, x| m.max(x))
    }
}

/// Polarization Kraus operator in sparse form.
#[derive(Debug, Clone, PartialEq)]
pub struct DvKraus<T> {
    pub terms: Vec<(Vec<Dv>, Vec<Dv>, Complex<T>)>,
}

impl<T: Scalar> DvKraus<T> {
    pub fn new(terms: Vec<(Vec<Dv>, Vec<Dv>, T)>) -> Self {
        Self {
            terms: terms
                .into_iter()
                .map(|(o, i, c)| (o, i, Complex::new(c, T::zero())))
                .collect(),
        }
    }

    pub fn n_out(&self) -> usize {
        self.terms.first().map_or(0, |t| t.0.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn plus_l_is_normalized() {
        for a in [0.0, 0.3, 1.247, 3.0] {
            assert_relative_eq!(
                HybridState::<f64>::plus_l(a).norm_sq(),
                1.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn beam_splitter_splits_and_recombines() {
        let a = 1.1f64;
        // |sqrt2 a>|0> -> |a>|a>
        let mut s = HybridState::empty(vec![a * 2f64.sqrt(); 2], 0);
        s.add(Ket::new(vec![1, 0], vec![]), Complex::new(1.0, 0.0));
        let mut rho = s.to_density();
        rho.beam_splitter(0, 1);
        assert_relative_eq!(rho.units()[0], a, epsilon = 1e-14);
        let k = Ket::new(vec![1, 1], vec![]);
        assert_eq!(rho.entry(&k, &k), Complex::new(1.0, 0.0));
        assert_relative_eq!(rho.trace(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn cv_loss_preserves_trace_and_scales_coherence() {
        let a = 1.247f64;
        let eta = 0.05;
        let mut rho = HybridState::plus_l(a).to_density();
        rho.cv_loss(0, eta);
        rho.dv_loss(0, eta);
        assert_relative_eq!(rho.trace(), 1.0, epsilon = 1e-12);
        let k0 = Ket::logical(&[0]);
        let k1 = Ket::logical(&[1]);
        assert_relative_eq!(
            rho.entry(&k0, &k1).re,
            0.5 * (1.0 - eta) * (-2.0 * eta * a * a).exp(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn pauli_x_squares_to_identity() {
        let psi = HybridState::<f64>::from_logical(
            1.0,
            2,
            &[
                Complex::new(0.5, 0.0),
                Complex::new(0.5, 0.0),
                Complex::new(0.5, 0.0),
                Complex::new(-0.5, 0.0),
            ],
        );
        let rho = psi.to_density();
        let mut r2 = rho.clone();
        r2.pauli_x(1, 1);
        r2.pauli_x(1, 1);
        assert_eq!(rho, r2);
        r2.pauli_z(0);
        assert!(r2.fidelity(&psi) < 0.99);
    }
}
