//! Pure and mixed register states.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{i_pow, PauliSum, PauliTerm};

use super::circuit::{Angles, Circuit, Gate};

/// Largest register simulated as a statevector.
pub const STATEVECTOR_CAP: usize = 24;
/// Largest register simulated as a density matrix.
pub const DENSITY_CAP: usize = 10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Apply a `2^k × 2^k` unitary to `targets` of an amplitude vector over
/// `n_total` qubits (qubit 0 = most significant bit).
pub(crate) fn apply_local(amps: &mut [Complex64], n_total: usize, targets: &[usize], m: &DMatrix<Complex64>) {
    let k = targets.len();
    let dim_local = 1usize << k;
    let bits: Vec<usize> = targets.iter().map(|&q| 1usize << (n_total - 1 - q)).collect();
    let tmask: usize = bits.iter().sum();
    let offsets: Vec<usize> = (0..dim_local)
        .map(|s| {
            (0..k)
                .filter(|&t| s & (1 << (k - 1 - t)) != 0)
                .map(|t| bits[t])
                .sum()
        })
        .collect();
    let mut buf = vec![ZERO; dim_local];
    for base in 0..amps.len() {
        if base & tmask != 0 {
            continue;
        }
        for (s, &off) in offsets.iter().enumerate() {
            buf[s] = amps[base | off];
        }
        for (r, &off) in offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (s, &b) in buf.iter().enumerate() {
                acc += m[(r, s)] * b;
            }
            amps[base | off] = acc;
        }
    }
}

/// Anything a Pauli observable can be measured on.
pub trait QuantumState {
    fn n_qubits(&self) -> usize;

    /// `⟨P⟩` for a single Pauli word.
    fn expect_term(&self, term: &PauliTerm) -> Complex64;

    /// Computational-basis outcome probabilities.
    fn probabilities(&self) -> Vec<f64>;
}

/// `⟨ψ|O|ψ⟩` or `tr(ρ O)`.
pub fn expect<S: QuantumState + ?Sized>(state: &S, o: &PauliSum) -> Result<Complex64> {
    if o.n() != state.n_qubits() {
        return Err(Error::DimensionMismatch { expected: state.n_qubits(), found: o.n() });
    }
    Ok(o.iter().map(|(t, &c)| c * state.expect_term(t)).sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Result<Self> {
        if n == 0 || n > STATEVECTOR_CAP {
            return Err(Error::Capacity { what: "statevector", n, cap: STATEVECTOR_CAP });
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Ok(Self { n, amps })
    }

    /// Wraps amplitudes, renormalizing; rejects non power-of-two lengths and
    /// the zero vector.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidSpec(format!("{len} amplitudes do not form a qubit register")));
        }
        let n = len.trailing_zeros() as usize;
        if n > STATEVECTOR_CAP {
            return Err(Error::Capacity { what: "statevector", n, cap: STATEVECTOR_CAP });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Domain("cannot normalize a zero or non-finite vector".into()));
        }
        Ok(Self { n, amps: amps.into_iter().map(|a| a / norm).collect() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn fidelity(&self, other: &Statevector) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn apply_gate(&mut self, gate: &Gate, bindings: &Angles) -> Result<()> {
        gate.check(self.n)?;
        let m = gate.matrix(bindings)?;
        apply_local(&mut self.amps, self.n, &gate.targets, &m);
        Ok(())
    }

    pub fn apply_circuit(&mut self, c: &Circuit, bindings: &Angles) -> Result<()> {
        if c.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: c.n() });
        }
        c.check_bound(bindings)?;
        for g in c.gates() {
            self.apply_gate(g, bindings)?;
        }
        Ok(())
    }
}

impl QuantumState for Statevector {
    fn n_qubits(&self) -> usize {
        self.n
    }

    fn expect_term(&self, term: &PauliTerm) -> Complex64 {
        term.matrix_element(&self.amps, &self.amps)
    }

    fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// `U(bindings)|0…0⟩`.
pub fn run_circuit(c: &Circuit, bindings: &Angles) -> Result<Statevector> {
    let mut sv = Statevector::zero(c.n())?;
    sv.apply_circuit(c, bindings)?;
    Ok(sv)
}

/// Row-major `2^n × 2^n` density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    fn check_cap(n: usize) -> Result<()> {
        if n == 0 || n > DENSITY_CAP {
            return Err(Error::Capacity { what: "density matrix", n, cap: DENSITY_CAP });
        }
        Ok(())
    }

    pub fn zero_state(n: usize) -> Result<Self> {
        Self::check_cap(n)?;
        let dim = 1usize << n;
        let mut data = vec![ZERO; dim * dim];
        data[0] = ONE;
        Ok(Self { n, data })
    }

    pub fn from_pure(sv: &Statevector) -> Result<Self> {
        Self::check_cap(sv.n)?;
        let a = &sv.amps;
        let data = a.iter().flat_map(|r| a.iter().map(move |c| r * c.conj())).collect();
        Ok(Self { n: sv.n, data })
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        Self::check_cap(n)?;
        let dim = 1usize << n;
        let mut data = vec![ZERO; dim * dim];
        for j in 0..dim {
            data[j * dim + j] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Ok(Self { n, data })
    }

    /// Wraps a matrix after checking the density-operator invariants.
    pub fn from_matrix(m: &DMatrix<Complex64>) -> Result<Self> {
        let dim = m.nrows();
        if dim != m.ncols() || dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidSpec("density matrix must be square over qubits".into()));
        }
        let n = dim.trailing_zeros() as usize;
        Self::check_cap(n)?;
        let data = (0..dim).flat_map(|r| (0..dim).map(move |c| m[(r, c)])).collect();
        let rho = Self { n, data };
        rho.validate(1e-10, 1e-8)?;
        Ok(rho)
    }

    /// Convex mixture `(1 - w)·self + w·other`.
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> Result<DensityMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a * (1.0 - w) + b * w).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim() + c]
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |r, c| self.data[r * d + c])
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|j| self.get(j, j)).sum()
    }

    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ |ρ_rc|² for Hermitian ρ
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn hermitian_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in r..d {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let m = self.to_matrix();
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Checks Hermiticity and unit trace to `tol`, and spectrum ≥ `-eig_tol`.
    pub fn validate(&self, tol: f64, eig_tol: f64) -> Result<()> {
        let herm = self.hermitian_residual();
        if herm > tol {
            return Err(Error::NotHermitian { residual: herm });
        }
        let tr = self.trace();
        if (tr - ONE).norm() > tol {
            return Err(Error::Domain(format!("density matrix trace {tr} differs from 1")));
        }
        let lo = self.min_eigenvalue();
        if lo < -eig_tol {
            return Err(Error::Domain(format!("density matrix has eigenvalue {lo:.3e} < 0")));
        }
        Ok(())
    }

    /// `ρ → U ρ U†`, treating the row-major data as a `2n`-qubit vector.
    pub fn apply_gate(&mut self, gate: &Gate, bindings: &Angles) -> Result<()> {
        gate.check(self.n)?;
        let u = gate.matrix(bindings)?;
        let u_conj = u.map(|v| v.conj());
        let cols: Vec<usize> = gate.targets.iter().map(|&q| q + self.n).collect();
        apply_local(&mut self.data, 2 * self.n, &gate.targets, &u);
        apply_local(&mut self.data, 2 * self.n, &cols, &u_conj);
        Ok(())
    }

    /// Depolarizing channel on `support`:
    /// `ρ → (1 − p) ρ + p · I_S/2^k ⊗ tr_S ρ`.
    pub fn depolarize(&mut self, support: &[usize], p: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("depolarizing probability {p} outside [0, 1]")));
        }
        if p == 0.0 || support.is_empty() {
            return Ok(());
        }
        if support.iter().any(|&q| q >= self.n) {
            return Err(Error::InvalidTarget { targets: support.to_vec(), n: self.n });
        }
        let d = self.dim();
        let smask: usize = support.iter().map(|&q| 1usize << (self.n - 1 - q)).sum();
        let keep = !smask & (d - 1);
        let mut reduced = vec![ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                if r & smask == c & smask {
                    reduced[(r & keep) * d + (c & keep)] += self.data[r * d + c];
                }
            }
        }
        let w = p / (1usize << support.len()) as f64;
        for r in 0..d {
            for c in 0..d {
                let v = &mut self.data[r * d + c];
                *v *= 1.0 - p;
                if r & smask == c & smask {
                    *v += reduced[(r & keep) * d + (c & keep)] * w;
                }
            }
        }
        Ok(())
    }
}

impl QuantumState for DensityMatrix {
    fn n_qubits(&self) -> usize {
        self.n
    }

    fn expect_term(&self, term: &PauliTerm) -> Complex64 {
        // tr(ρP) = Σ_j phase(j) ρ[j, j^x], since P|j⟩ = phase(j)|j^x⟩
        let (x, z, y) = term.masks();
        let base = i_pow(y);
        let d = self.dim();
        let mut acc = ZERO;
        for j in 0..d {
            let v = self.data[j * d + (j ^ x)];
            if (j & z).count_ones() % 2 == 0 {
                acc += v;
            } else {
                acc -= v;
            }
        }
        acc * base
    }

    fn probabilities(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.get(j, j).re.max(0.0)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Pauli;

    fn zero_b() -> Angles {
        Angles::new()
    }

    #[test]
    fn empty_circuit_is_all_zero() {
        let sv = run_circuit(&Circuit::new(3), &zero_b()).unwrap();
        assert_eq!(sv.amplitudes()[0], ONE);
        assert!(sv.amplitudes()[1..].iter().all(|a| *a == ZERO));
    }

    #[test]
    fn single_x_flips() {
        let c = Circuit::new(1).with(Gate::x(0)).unwrap();
        let sv = run_circuit(&c, &zero_b()).unwrap();
        assert_eq!(sv.amplitudes(), &[ZERO, ONE]);
    }

    #[test]
    fn two_sqrt_iswaps_make_iswap() {
        // |10⟩ = X on qubit 0; iSWAP maps it to i|01⟩
        let c = Circuit::new(2)
            .with(Gate::x(0))
            .unwrap()
            .with(Gate::sqrt_iswap(0, 1))
            .unwrap()
            .with(Gate::sqrt_iswap(0, 1))
            .unwrap();
        let sv = run_circuit(&c, &zero_b()).unwrap();
        let want = [ZERO, Complex64::new(0.0, 1.0), ZERO, ZERO];
        for (a, b) in sv.amplitudes().iter().zip(want) {
            assert!((a - b).norm() < 1e-15);
        }
        // dense oracle: (√iSWAP)² equals the iSWAP matrix
        let m = Gate::sqrt_iswap(0, 1).matrix(&zero_b()).unwrap();
        let sq = &m * &m;
        assert!((sq[(1, 2)] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!(sq[(1, 1)].norm() < 1e-15);
    }

    #[test]
    fn unbound_and_bad_targets() {
        let c = Circuit::new(1).with(Gate::ry(0, "t")).unwrap();
        assert_eq!(run_circuit(&c, &zero_b()), Err(Error::UnboundParameter("t".into())));
        let mut sv = Statevector::zero(1).unwrap();
        assert!(sv.apply_gate(&Gate::x(3), &zero_b()).is_err());
    }

    #[test]
    fn simple_expectations() {
        let z = PauliSum::from_words(&[(1.0, "Z")]).unwrap();
        let x = PauliSum::from_words(&[(1.0, "X")]).unwrap();
        let zero = Statevector::zero(1).unwrap();
        assert_eq!(expect(&zero, &z).unwrap(), ONE);
        let plus = run_circuit(&Circuit::new(1).with(Gate::h(0)).unwrap(), &zero_b()).unwrap();
        assert!((expect(&plus, &x).unwrap() - ONE).norm() < 1e-15);
        let two = PauliSum::from_words(&[(1.0, "ZZ")]).unwrap();
        assert!(expect(&zero, &two).is_err());
    }

    #[test]
    fn full_depolarization_is_maximally_mixed() {
        let mut rho = DensityMatrix::zero_state(1).unwrap();
        rho.apply_gate(&Gate::x(0), &zero_b()).unwrap();
        rho.depolarize(&[0], 1.0).unwrap();
        let mm = DensityMatrix::maximally_mixed(1).unwrap();
        assert!((rho.to_matrix() - mm.to_matrix()).iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn partial_depolarization_keeps_spectator_marginal() {
        // |1⟩⊗|+⟩, depolarize qubit 1 fully: ρ = |1⟩⟨1| ⊗ I/2
        let c = Circuit::new(2).with(Gate::x(0)).unwrap().with(Gate::h(1)).unwrap();
        let mut rho = DensityMatrix::from_pure(&run_circuit(&c, &zero_b()).unwrap()).unwrap();
        rho.depolarize(&[1], 1.0).unwrap();
        let z0 = PauliTerm::single(2, 0, Pauli::Z);
        let x1 = PauliTerm::single(2, 1, Pauli::X);
        assert!((rho.expect_term(&z0) + ONE).norm() < 1e-15);
        assert!(rho.expect_term(&x1).norm() < 1e-15);
        assert!((rho.purity() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn density_invariants_checked() {
        let bad = DMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ZERO]);
        assert!(DensityMatrix::from_matrix(&bad).is_err());
        assert!(DensityMatrix::zero_state(DENSITY_CAP + 1).is_err());
        assert!(Statevector::zero(STATEVECTOR_CAP + 1).is_err());
    }
}
