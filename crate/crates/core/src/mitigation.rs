//! Symmetry-projection error mitigation: `tr(ρ O P) / tr(ρ P)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliSum, PauliTerm};
use crate::rng::Rng;
use crate::sim::{expect, DensityMatrix, Prepared};

/// Hermiticity, idempotency and commutation tolerance.
pub const PROJECTOR_TOL: f64 = 1e-10;
/// `tr(ρ P)` below this means the state has left the sector.
pub const DEPLETION_THRESHOLD: f64 = 1e-6;
/// Sampled sector weights within this many standard errors of zero are
/// treated as depleted.
pub const SAMPLED_DEPLETION_SIGMAS: f64 = 5.0;

/// A Hermitian idempotent Pauli sum.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryProjector {
    p: PauliSum,
}

impl SymmetryProjector {
    pub fn operator(&self) -> &PauliSum {
        &self.p
    }

    pub fn n(&self) -> usize {
        self.p.n()
    }

    /// Fails unless `[O, P] = 0` to tolerance.
    pub fn check_commutes(&self, o: &PauliSum) -> Result<()> {
        let norm = o.commutator(&self.p)?.norm();
        if norm > PROJECTOR_TOL {
            return Err(Error::NonCommuting { norm });
        }
        Ok(())
    }

    /// `P ρ P / tr(ρ P)`.
    pub fn project(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let tr = self.sector_weight(rho)?;
        let p = self.p.to_dense()?;
        let m = &p * rho.to_matrix() * &p / Complex64::new(tr, 0.0);
        DensityMatrix::from_matrix(&m)
    }

    /// Upper bound on the standard error of a sampled `tr(ρP)`: each
    /// non-identity term contributes at most `|c|/√shots`.
    pub fn shot_noise_bound(&self, shots: u64) -> f64 {
        if shots == 0 {
            return 0.0;
        }
        let spread: f64 = self.p.iter().filter(|(t, _)| !t.is_identity()).map(|(_, c)| c.norm()).sum();
        spread / (shots as f64).sqrt()
    }

    fn sector_weight(&self, rho: &DensityMatrix) -> Result<f64> {
        let trace = expect(rho, &self.p)?.re;
        if trace < DEPLETION_THRESHOLD {
            return Err(Error::SectorDepleted { trace });
        }
        Ok(trace)
    }
}

pub fn validate_projector(p: &PauliSum) -> Result<SymmetryProjector> {
    let residual = p.hermitian_residual();
    if residual > PROJECTOR_TOL {
        return Err(Error::NotHermitian { residual });
    }
    let residual = p.mul(p)?.sub(p)?.norm();
    if residual > PROJECTOR_TOL {
        return Err(Error::NotIdempotent { residual });
    }
    Ok(SymmetryProjector { p: p.clone() })
}

/// `tr(ρ O P) / tr(ρ P)`.
pub fn mitigated_expect(rho: &DensityMatrix, o: &PauliSum, p: &SymmetryProjector) -> Result<Complex64> {
    p.check_commutes(o)?;
    let tr = p.sector_weight(rho)?;
    Ok(expect(rho, &o.mul(&p.p)?)? / tr)
}

/// Ratio estimator over a prepared register: numerator `O P` and denominator
/// `P` are measured term by term with independent shots (`shots = 0` is exact).
pub fn mitigated_measure(
    state: &Prepared,
    o: &PauliSum,
    p: &SymmetryProjector,
    shots: u64,
    rng: &mut Rng,
) -> Result<Complex64> {
    p.check_commutes(o)?;
    let den = state.measure(&p.p, shots, rng)?.re;
    if den < DEPLETION_THRESHOLD.max(SAMPLED_DEPLETION_SIGMAS * p.shot_noise_bound(shots)) {
        return Err(Error::SectorDepleted { trace: den });
    }
    Ok(state.measure(&o.mul(&p.p)?, shots, rng)? / den)
}

/// Pauli form of a diagonal operator with entries `d[j]` (qubit 0 is the most
/// significant bit of `j`), via a Walsh–Hadamard transform.
pub fn diagonal_operator(n: usize, d: &[f64]) -> Result<PauliSum> {
    if d.len() != 1 << n {
        return Err(Error::DimensionMismatch { expected: n, found: d.len().trailing_zeros() as usize });
    }
    let mut c = d.to_vec();
    let mut h = 1;
    while h < c.len() {
        for i in (0..c.len()).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (c[j], c[j + h]);
                c[j] = a + b;
                c[j + h] = a - b;
            }
        }
        h *= 2;
    }
    let scale = 1.0 / d.len() as f64;
    let mut out = PauliSum::zero(n);
    for (z, &v) in c.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let word = (0..n)
            .map(|q| if z & (1 << (n - 1 - q)) != 0 { Pauli::Z } else { Pauli::I })
            .collect();
        out.add_term(PauliTerm::new(word)?, v * scale)?;
    }
    Ok(out)
}

/// Projector onto computational basis states selected by `keep`.
pub fn basis_projector(n: usize, keep: impl Fn(usize) -> bool) -> Result<SymmetryProjector> {
    let d: Vec<f64> = (0..1usize << n).map(|j| if keep(j) { 1.0 } else { 0.0 }).collect();
    validate_projector(&diagonal_operator(n, &d)?)
}

/// `(I + s Z⊗…⊗Z)/2` with `s = +1` for even parity.
pub fn parity_projector(n: usize, even: bool) -> Result<SymmetryProjector> {
    basis_projector(n, |j| (j.count_ones() % 2 == 0) == even)
}

/// Sum of `Π (I ± Z)/2` over basis states with `count` set qubits.
pub fn number_projector(n: usize, count: usize) -> Result<SymmetryProjector> {
    if count > n {
        return Err(Error::InvalidSpec(format!("cannot place {count} particles on {n} qubits")));
    }
    basis_projector(n, |j| j.count_ones() as usize == count)
}
