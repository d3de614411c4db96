//! Finite-shot estimators: Pauli expectation sampling and the ancilla-assisted
//! cross term `⟨x|P_l|Ψ₀⟩⟨Ψ₀|P_k|x⟩`.

use num_complex::Complex64;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::pauli::{PauliSum, PauliTerm};
use crate::rng::{stream, Rng};

use super::circuit::{Angles, Circuit, Gate};
use super::noise::{apply_noisy, apply_readout, NoiseModel};
use super::state::{expect, run_circuit, DensityMatrix, QuantumState, Statevector};

fn binomial(rng: &mut Rng, n: u64, p: f64) -> u64 {
    let p = p.clamp(0.0, 1.0);
    // parameters are valid after clamping
    Binomial::new(n, p).expect("binomial parameters").sample(rng)
}

fn check_shots(shots: u64) -> Result<()> {
    if shots == 0 {
        return Err(Error::Domain("sampling needs at least one shot".into()));
    }
    Ok(())
}

/// Parity estimate from `shots` draws with `P(+1) = (1 + e)/2`.
fn sample_parity(e: f64, shots: u64, rng: &mut Rng) -> f64 {
    let k = binomial(rng, shots, 0.5 * (1.0 + e));
    (2.0 * k as f64 - shots as f64) / shots as f64
}

/// Readout-damped exact expectation of one Pauli word.
fn damped(state: &impl QuantumState, term: &PauliTerm, nm: Option<&NoiseModel>) -> f64 {
    let e = state.expect_term(term).re;
    match nm {
        Some(nm) => term.support().iter().map(|&q| 1.0 - 2.0 * nm.flip(q)).product::<f64>() * e,
        None => e,
    }
}

/// Shot estimate of `⟨P⟩`; deterministic for a given seed.
pub fn sample_expect<S: QuantumState>(state: &S, term: &PauliTerm, shots: u64, seed: u64) -> Result<f64> {
    sample_expect_with(state, term, shots, None, &mut stream(seed, &[]))
}

/// As [`sample_expect`], with optional readout confusion and an explicit stream.
pub fn sample_expect_with<S: QuantumState>(
    state: &S,
    term: &PauliTerm,
    shots: u64,
    readout: Option<&NoiseModel>,
    rng: &mut Rng,
) -> Result<f64> {
    check_shots(shots)?;
    if term.n() != state.n_qubits() {
        return Err(Error::DimensionMismatch { expected: state.n_qubits(), found: term.n() });
    }
    if term.is_identity() {
        return Ok(1.0);
    }
    Ok(sample_parity(damped(state, term, readout), shots, rng))
}

/// A prepared register, pure or mixed, plus its readout model.
#[derive(Debug, Clone)]
pub enum Prepared {
    Pure(Statevector),
    Mixed(DensityMatrix, NoiseModel),
}

impl Prepared {
    /// Runs `c` noiselessly, or through `noise` if it is present and non-trivial.
    pub fn run(c: &Circuit, bindings: &Angles, noise: Option<&NoiseModel>) -> Result<Self> {
        match noise {
            Some(nm) if !nm.is_noiseless() => {
                let mut rho = DensityMatrix::zero_state(c.n())?;
                apply_noisy(&mut rho, c, bindings, nm)?;
                Ok(Prepared::Mixed(rho, nm.clone()))
            }
            _ => Ok(Prepared::Pure(run_circuit(c, bindings)?)),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Prepared::Pure(s) => s.n(),
            Prepared::Mixed(r, _) => r.n(),
        }
    }

    /// Measured value of one Pauli word: exact (with readout damping) when
    /// `shots == 0`, otherwise a shot estimate drawn from `rng`.
    pub fn measure_term(&self, term: &PauliTerm, shots: u64, rng: &mut Rng) -> Result<f64> {
        if term.n() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: term.n() });
        }
        let e = match self {
            Prepared::Pure(s) => s.expect_term(term).re,
            Prepared::Mixed(r, nm) => damped(r, term, Some(nm)),
        };
        if shots == 0 || term.is_identity() {
            return Ok(e);
        }
        Ok(sample_parity(e, shots, rng))
    }

    /// `Σ_k c_k ⟨P_k⟩`, one independent shot budget per non-identity word.
    pub fn measure(&self, o: &PauliSum, shots: u64, rng: &mut Rng) -> Result<Complex64> {
        if shots == 0 {
            if let Prepared::Pure(s) = self {
                return expect(s, o);
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, &c) in o.iter() {
            acc += c * self.measure_term(t, shots, rng)?;
        }
        Ok(acc)
    }
}

/// Prepared ancilla-assisted estimator for `⟨x|P_l|Ψ₀⟩⟨Ψ₀|P_k|x⟩` with
/// `|Ψ₀⟩ = U₀|0⟩`, `|x⟩ = U₁|0⟩`.
///
/// The ancilla is an extra qubit appended after the system register. It is put
/// in `|+⟩`, selects `P_l` (ancilla 0) or `P_k` (ancilla 1) through controlled
/// Paulis, the system is rotated back by `U₀†`, and the ancilla is read in the
/// `H` or `X_{π/2}` basis. `P(a=0, s=0…0) − P(a=1, s=0…0)` gives the real or
/// imaginary part.
#[derive(Debug, Clone)]
pub struct CrossEstimator {
    n: usize,
    psi0: Statevector,
    x: Statevector,
    u0_inv: Circuit,
    noise: Option<NoiseModel>,
    prefix: Prefix,
}

#[derive(Debug, Clone)]
enum Prefix {
    Pure(Statevector),
    Mixed(DensityMatrix),
}

impl CrossEstimator {
    pub fn new(u0: &Circuit, u1: &Circuit, bindings: &Angles, noise: Option<&NoiseModel>) -> Result<Self> {
        if u0.n() != u1.n() {
            return Err(Error::DimensionMismatch { expected: u0.n(), found: u1.n() });
        }
        let n = u0.n();
        let noise = noise.filter(|nm| !nm.is_noiseless()).cloned();
        let u0b = u0.bind(bindings)?;
        let u1b = u1.bind(bindings)?;
        let psi0 = run_circuit(&u0b, &Angles::new())?;
        let x = run_circuit(&u1b, &Angles::new())?;

        let mut pre = u1b.widen(n + 1)?;
        pre.push(Gate::h(n))?;
        let empty = Angles::new();
        let prefix = match &noise {
            Some(nm) => {
                nm.validate()?;
                let mut rho = DensityMatrix::zero_state(n + 1)?;
                apply_noisy(&mut rho, &pre, &empty, nm)?;
                Prefix::Mixed(rho)
            }
            None => {
                if n + 1 > super::state::STATEVECTOR_CAP {
                    return Err(Error::Capacity {
                        what: "ancilla register",
                        n: n + 1,
                        cap: super::state::STATEVECTOR_CAP,
                    });
                }
                Prefix::Pure(run_circuit(&pre, &empty)?)
            }
        };
        Ok(Self { n, psi0, x, u0_inv: u0b.inverse()?, noise, prefix })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn psi0(&self) -> &Statevector {
        &self.psi0
    }

    pub fn x(&self) -> &Statevector {
        &self.x
    }

    /// Inner-product value, no sampling and no noise.
    pub fn exact(&self, l: &PauliTerm, k: &PauliTerm) -> Result<Complex64> {
        self.check(l)?;
        self.check(k)?;
        let psi0 = self.psi0.amplitudes();
        let x = self.x.amplitudes();
        Ok(l.matrix_element(psi0, x).conj() * k.matrix_element(psi0, x))
    }

    fn check(&self, p: &PauliTerm) -> Result<()> {
        if p.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: p.n() });
        }
        Ok(())
    }

    fn suffix(&self, l: &PauliTerm, k: &PauliTerm) -> Result<Circuit> {
        let anc = self.n;
        let mut c = Circuit::new(self.n + 1);
        let controlled = |p: &PauliTerm| {
            let support = p.support();
            let word = support.iter().map(|&q| p.word()[q]).collect();
            Gate::controlled_pauli(anc, &support, word)
        };
        c.push(Gate::x(anc))?;
        if !l.is_identity() {
            c.push(controlled(l))?;
        }
        c.push(Gate::x(anc))?;
        if !k.is_identity() {
            c.push(controlled(k))?;
        }
        c.extend(&self.u0_inv.widen(self.n + 1)?)?;
        Ok(c)
    }

    /// `(P(a=0, s=0), P(a=1, s=0))` after the readout rotation `r`.
    fn outcome_pair(&self, body: &Circuit, r: Gate) -> Result<(f64, f64)> {
        let empty = Angles::new();
        let probs = match &self.prefix {
            Prefix::Pure(sv) => {
                let mut s = sv.clone();
                s.apply_circuit(body, &empty)?;
                s.apply_gate(&r, &empty)?;
                s.probabilities()
            }
            Prefix::Mixed(rho) => {
                let nm = self.noise.as_ref().expect("mixed prefix implies noise");
                let mut m = rho.clone();
                let mut tail = body.clone();
                tail.push(r)?;
                apply_noisy(&mut m, &tail, &empty, nm)?;
                apply_readout(&m.probabilities(), self.n + 1, nm)
            }
        };
        Ok((probs[0], probs[1]))
    }

    /// Estimate of `⟨x|P_l|Ψ₀⟩⟨Ψ₀|P_k|x⟩`.
    ///
    /// `shots == 0` without noise returns [`CrossEstimator::exact`]; with
    /// noise it returns the exact ancilla signal of the noisy circuit.
    /// Otherwise the real and imaginary parts each get `shots` samples.
    pub fn estimate(&self, l: &PauliTerm, k: &PauliTerm, shots: u64, seed: u64) -> Result<Complex64> {
        self.check(l)?;
        self.check(k)?;
        if shots == 0 && self.noise.is_none() {
            return self.exact(l, k);
        }
        let body = self.suffix(l, k)?;
        let mut parts = [0.0; 2];
        for (i, r) in [Gate::h(self.n), Gate::x_half(self.n)].into_iter().enumerate() {
            let (p0, p1) = self.outcome_pair(&body, r)?;
            parts[i] = if shots == 0 {
                p0 - p1
            } else {
                let mut rng = stream(seed, &[i as u64]);
                let k0 = binomial(&mut rng, shots, p0);
                let rest = 1.0 - p0;
                let k1 = if rest <= 0.0 { 0 } else { binomial(&mut rng, shots - k0, p1 / rest) };
                (k0 as f64 - k1 as f64) / shots as f64
            };
        }
        Ok(Complex64::new(parts[0], parts[1]))
    }
}

/// One-shot convenience wrapper around [`CrossEstimator`] without noise.
pub fn estimate_cross(
    u0: &Circuit,
    u1: &Circuit,
    bindings: &Angles,
    l: &PauliTerm,
    k: &PauliTerm,
    shots: u64,
    seed: u64,
) -> Result<Complex64> {
    CrossEstimator::new(u0, u1, bindings, None)?.estimate(l, k, shots, seed)
}
