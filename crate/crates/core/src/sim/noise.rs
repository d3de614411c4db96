//! Gate-level depolarizing noise and readout confusion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::circuit::{Angles, Circuit};
use super::state::DensityMatrix;

/// Two-qubit gate fidelity used for the two-qubit preset.
pub const SQRT_ISWAP_FIDELITY_2Q: f64 = 0.9806;
/// Two-qubit gate fidelity used for the four-qubit preset.
pub const SQRT_ISWAP_FIDELITY_4Q: f64 = 0.9651;

/// Depolarizing probabilities per gate plus optional per-qubit readout flips.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p1: f64,
    pub p2: f64,
    #[serde(default)]
    pub readout: Option<Vec<f64>>,
}

impl NoiseModel {
    pub fn new(p1: f64, p2: f64, readout: Option<Vec<f64>>) -> Result<Self> {
        let nm = Self { p1, p2, readout };
        nm.validate()?;
        Ok(nm)
    }

    pub fn noiseless() -> Self {
        Self::default()
    }

    /// `p2 = 1 − F` for the √iSWAP fidelity reported on two-qubit circuits.
    pub fn sqrt_iswap_2q() -> Self {
        Self { p1: 0.0, p2: 1.0 - SQRT_ISWAP_FIDELITY_2Q, readout: None }
    }

    /// `p2 = 1 − F` for the √iSWAP fidelity reported on four-qubit circuits.
    pub fn sqrt_iswap_4q() -> Self {
        Self { p1: 0.0, p2: 1.0 - SQRT_ISWAP_FIDELITY_4Q, readout: None }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |p: f64| (0.0..=1.0).contains(&p);
        if !ok(self.p1) || !ok(self.p2) {
            return Err(Error::Domain(format!(
                "depolarizing probabilities p1 = {}, p2 = {} must lie in [0, 1]",
                self.p1, self.p2
            )));
        }
        if let Some(r) = &self.readout {
            if let Some(bad) = r.iter().find(|&&f| !ok(f)) {
                return Err(Error::Domain(format!("readout flip probability {bad} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0 && !self.has_readout()
    }

    pub fn has_readout(&self) -> bool {
        self.readout.as_ref().is_some_and(|r| r.iter().any(|&f| f > 0.0))
    }

    /// Flip probability of qubit `q`; qubits beyond the table are ideal.
    pub fn flip(&self, q: usize) -> f64 {
        self.readout.as_ref().and_then(|r| r.get(q).copied()).unwrap_or(0.0)
    }

    fn gate_probability(&self, arity: usize) -> f64 {
        if arity >= 2 {
            self.p2
        } else {
            self.p1
        }
    }
}

/// Executes `c` on `|0…0⟩⟨0…0|`, following every gate with a depolarizing
/// channel on its support.
pub fn run_noisy(c: &Circuit, bindings: &Angles, nm: &NoiseModel) -> Result<DensityMatrix> {
    let mut rho = DensityMatrix::zero_state(c.n())?;
    apply_noisy(&mut rho, c, bindings, nm)?;
    Ok(rho)
}

pub(crate) fn apply_noisy(rho: &mut DensityMatrix, c: &Circuit, bindings: &Angles, nm: &NoiseModel) -> Result<()> {
    nm.validate()?;
    if c.n() != rho.n() {
        return Err(Error::DimensionMismatch { expected: rho.n(), found: c.n() });
    }
    c.check_bound(bindings)?;
    for g in c.gates() {
        rho.apply_gate(g, bindings)?;
        rho.depolarize(&g.targets, nm.gate_probability(g.targets.len()))?;
    }
    Ok(())
}

/// Pushes a probability vector over `n` qubits through independent symmetric
/// bit-flip confusion.
pub fn apply_readout(probs: &[f64], n: usize, nm: &NoiseModel) -> Vec<f64> {
    let mut p = probs.to_vec();
    for q in 0..n {
        let f = nm.flip(q);
        if f == 0.0 {
            continue;
        }
        let bit = 1usize << (n - 1 - q);
        for j in 0..p.len() {
            if j & bit == 0 {
                let (a, b) = (p[j], p[j | bit]);
                p[j] = (1.0 - f) * a + f * b;
                p[j | bit] = f * a + (1.0 - f) * b;
            }
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{Pauli, PauliTerm};
    use crate::sim::circuit::Gate;
    use crate::sim::state::{run_circuit, QuantumState};
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    #[test]
    fn presets() {
        assert!((NoiseModel::sqrt_iswap_2q().p2 - 0.0194).abs() < 1e-15);
        assert!((NoiseModel::sqrt_iswap_4q().p2 - 0.0349).abs() < 1e-15);
        assert!(NoiseModel::new(0.0, 1.5, None).is_err());
        assert!(NoiseModel::new(0.0, 0.1, Some(vec![0.1, -0.1])).is_err());
    }

    #[test]
    fn noiseless_matches_pure() {
        let c = Circuit::new(2)
            .with(Gate::h(0))
            .unwrap()
            .with(Gate::sqrt_iswap(0, 1))
            .unwrap()
            .with(Gate::rz(1, 0.3))
            .unwrap();
        let b = Angles::new();
        let rho = run_noisy(&c, &b, &NoiseModel::noiseless()).unwrap();
        let pure = DensityMatrix::from_pure(&run_circuit(&c, &b).unwrap()).unwrap();
        assert!((rho.to_matrix() - pure.to_matrix()).iter().all(|v| v.norm() < 1e-14));
    }

    #[test]
    fn full_depolarization_of_x() {
        let c = Circuit::new(1).with(Gate::x(0)).unwrap();
        let rho = run_noisy(&c, &Angles::new(), &NoiseModel { p1: 1.0, p2: 0.0, readout: None }).unwrap();
        assert!((rho.get(0, 0).re - 0.5).abs() < 1e-15);
        assert!((rho.get(1, 1).re - 0.5).abs() < 1e-15);
        assert!(rho.get(0, 1).norm() < 1e-15);
    }

    #[test]
    fn two_qubit_channel_matches_kraus_composition() {
        // X on 0, √iSWAP(0,1) with p2 = 0.02; oracle uses the 16 Pauli Kraus
        // operators of the two-qubit depolarizing channel
        let p2 = 0.02;
        let c = Circuit::new(2).with(Gate::x(0)).unwrap().with(Gate::sqrt_iswap(0, 1)).unwrap();
        let rho = run_noisy(&c, &Angles::new(), &NoiseModel { p1: 0.0, p2, readout: None }).unwrap();

        let psi = run_circuit(&c, &Angles::new()).unwrap();
        let pure = DensityMatrix::from_pure(&psi).unwrap().to_matrix();
        let mut oracle = DMatrix::<Complex64>::zeros(4, 4);
        let paulis = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        for &a in &paulis {
            for &b in &paulis {
                let k = PauliTerm::new(vec![a, b]).unwrap();
                let m = crate::pauli::PauliSum::from_term(k, 1.0).to_dense().unwrap();
                oracle += &m * &pure * m.adjoint() * Complex64::new(p2 / 16.0, 0.0);
            }
        }
        oracle += pure * Complex64::new(1.0 - p2, 0.0);
        assert!((rho.to_matrix() - oracle).iter().all(|v| v.norm() < 1e-14));
        assert!(rho.purity() < 1.0);
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn readout_confusion() {
        let nm = NoiseModel { p1: 0.0, p2: 0.0, readout: Some(vec![0.1, 0.0]) };
        let p = apply_readout(&[1.0, 0.0, 0.0, 0.0], 2, &nm);
        assert_eq!(p, vec![0.9, 0.0, 0.1, 0.0]);
        let sv = run_circuit(&Circuit::new(2), &Angles::new()).unwrap();
        assert_eq!(sv.probabilities().len(), 4);
    }
}
