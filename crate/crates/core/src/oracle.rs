//! Exact classical references for `χ(ω)`: sum over states, direct shifted
//! solve, and the damped time-domain transform of the correlation function.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::sim::Statevector;

/// Condition estimate above which the shifted solve is refused.
pub const CONDITION_CAP: f64 = 1e14;

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Ascending.
    pub energies: Vec<f64>,
    /// Column `m` is the eigenvector of `energies[m]`.
    pub states: DMatrix<Complex64>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    pub fn ground_state(&self) -> Statevector {
        self.state(0)
    }

    pub fn state(&self, m: usize) -> Statevector {
        Statevector::from_amplitudes(self.states.column(m).iter().copied().collect())
            .expect("eigenvectors are normalized")
    }

    /// `max_m ‖H v_m − E_m v_m‖`.
    pub fn max_residual(&self, h: &DMatrix<Complex64>) -> f64 {
        (0..self.dim())
            .map(|m| {
                let v = self.states.column(m);
                (h * v - v * Complex64::new(self.energies[m], 0.0)).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Complete spectrum of a Hermitian operator.
pub fn exact_diag(h0: &PauliSum) -> Result<EigenDecomposition> {
    let residual = h0.hermitian_residual();
    if residual > 1e-10 {
        return Err(Error::NotHermitian { residual });
    }
    let h = h0.to_dense()?;
    Ok(diag_dense(&h))
}

pub(crate) fn diag_dense(h: &DMatrix<Complex64>) -> EigenDecomposition {
    let sym = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energies = order.iter().map(|&m| eig.eigenvalues[m]).collect();
    let states = DMatrix::from_fn(h.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    EigenDecomposition { energies, states }
}

/// Excitation energies `ω_m0` and weights `|⟨Ψ_m|V|Ψ₀⟩|²` relative to a
/// chosen reference state and energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transitions {
    pub omega_m0: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Transitions {
    /// Transitions out of the lowest eigenvector.
    pub fn from_ground(eig: &EigenDecomposition, v: &PauliSum) -> Result<Self> {
        Self::from_state(eig, v, &eig.ground_state(), eig.ground_energy())
    }

    /// Transitions out of an arbitrary `ground` with reference energy `e0`.
    pub fn from_state(eig: &EigenDecomposition, v: &PauliSum, ground: &Statevector, e0: f64) -> Result<Self> {
        if ground.amplitudes().len() != eig.dim() {
            return Err(Error::DimensionMismatch {
                expected: eig.dim().trailing_zeros() as usize,
                found: ground.n(),
            });
        }
        let b = DVector::from_vec(v.apply(ground.amplitudes())?);
        let t = eig.states.adjoint() * b;
        Ok(Self {
            omega_m0: eig.energies.iter().map(|e| e - e0).collect(),
            weights: t.iter().map(|c| c.norm_sqr()).collect(),
        })
    }

    /// `Σ_m w_m / (ω_m0 − ω − iγ)`.
    pub fn chi(&self, omega: f64, gamma: f64) -> Complex64 {
        let z = Complex64::new(omega, gamma);
        self.omega_m0
            .iter()
            .zip(&self.weights)
            .map(|(&wm, &t2)| t2 / (wm - z))
            .sum()
    }

    /// `C̃(t) = Σ_m w_m e^{−i ω_m0 t}`.
    pub fn correlation(&self, t: f64) -> Complex64 {
        self.omega_m0
            .iter()
            .zip(&self.weights)
            .map(|(&wm, &t2)| Complex64::from_polar(t2, -wm * t))
            .sum()
    }

    fn correlation_derivative(&self, t: f64) -> Complex64 {
        self.omega_m0
            .iter()
            .zip(&self.weights)
            .map(|(&wm, &t2)| Complex64::new(0.0, -wm) * Complex64::from_polar(t2, -wm * t))
            .sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!("broadening gamma = {gamma} must be positive")));
    }
    Ok(())
}

/// Sum-over-states response out of the lowest eigenvector, every `m`
/// included.
pub fn chi_sos(eig: &EigenDecomposition, v: &PauliSum, omega: f64, gamma: f64) -> Result<Complex64> {
    check_gamma(gamma)?;
    Ok(Transitions::from_ground(eig, v)?.chi(omega, gamma))
}

/// Dense `Â(ω) = H₀ − (E₀ + ω + iγ)`.
pub fn dense_shifted(h0: &PauliSum, e0: f64, omega: f64, gamma: f64) -> Result<DMatrix<Complex64>> {
    let mut a = h0.to_dense()?;
    let shift = Complex64::new(e0 + omega, gamma);
    for j in 0..a.nrows() {
        a[(j, j)] -= shift;
    }
    Ok(a)
}

fn norm1(m: &DMatrix<Complex64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Unnormalized response state `Â(ω)⁻¹ V|Ψ₀⟩` by dense LU.
pub fn response_state(
    h0: &PauliSum,
    e0: f64,
    v: &PauliSum,
    ground: &Statevector,
    omega: f64,
    gamma: f64,
) -> Result<Vec<Complex64>> {
    check_gamma(gamma)?;
    if h0.n() != v.n() || h0.n() != ground.n() {
        return Err(Error::DimensionMismatch { expected: h0.n(), found: v.n().max(ground.n()) });
    }
    let a = dense_shifted(h0, e0, omega, gamma)?;
    let inv = a.clone().lu().try_inverse().ok_or(Error::IllConditioned { condition: f64::INFINITY })?;
    let condition = norm1(&a) * norm1(&inv);
    if !(condition < CONDITION_CAP) {
        return Err(Error::IllConditioned { condition });
    }
    let b = DVector::from_vec(v.apply(ground.amplitudes())?);
    Ok((inv * b).iter().copied().collect())
}

/// `⟨Ψ(ω)|Â†|Ψ(ω)⟩` with `Ψ(ω)` from the dense shifted solve.
pub fn chi_solve(
    h0: &PauliSum,
    e0: f64,
    v: &PauliSum,
    ground: &Statevector,
    omega: f64,
    gamma: f64,
) -> Result<Complex64> {
    let y = DVector::from_vec(response_state(h0, e0, v, ground, omega, gamma)?);
    let a = dense_shifted(h0, e0, omega, gamma)?;
    Ok(y.dotc(&(a.adjoint() * &y)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Quadrature {
    /// Composite trapezoid, second order in `dt`.
    Trapezoid,
    /// Trapezoid plus the first Euler–Maclaurin endpoint term, fourth order.
    #[default]
    TrapezoidEndCorrected,
}

/// `χ(ω) = i ∫₀^{t_max} e^{i(ω+iγ)t} C̃(t) dt` from samples of
/// `C̃(t) = ⟨Ψ₀|V† e^{−i(H₀−E₀)t} V|Ψ₀⟩` propagated in the eigenbasis.
#[allow(clippy::too_many_arguments)]
pub fn chi_timedomain(
    h0: &PauliSum,
    e0: f64,
    v: &PauliSum,
    ground: &Statevector,
    omega_grid: &[f64],
    gamma: f64,
    t_max: f64,
    dt: f64,
    quadrature: Quadrature,
) -> Result<Vec<Complex64>> {
    check_gamma(gamma)?;
    if !(dt > 0.0 && t_max > dt) {
        return Err(Error::Domain(format!("need 0 < dt < t_max, got dt = {dt}, t_max = {t_max}")));
    }
    let eig = exact_diag(h0)?;
    let tr = Transitions::from_state(&eig, v, ground, e0)?;
    let max_energy = tr.omega_m0.iter().map(|w| w.abs()).fold(0.0, f64::max);
    if dt * max_energy >= std::f64::consts::PI {
        return Err(Error::Nyquist { dt, max_energy });
    }
    if (-gamma * t_max).exp() > 1e-8 {
        log::warn!(
            "time-domain transform truncated: exp(-gamma * t_max) = {:.3e} > 1e-8",
            (-gamma * t_max).exp()
        );
    }
    let steps = (t_max / dt).round() as usize;
    let t_end = steps as f64 * dt;
    let samples: Vec<Complex64> = (0..=steps).map(|j| tr.correlation(j as f64 * dt)).collect();
    let c0d = tr.correlation_derivative(0.0);
    let ctd = tr.correlation_derivative(t_end);
    let i = Complex64::new(0.0, 1.0);

    Ok(omega_grid
        .iter()
        .map(|&omega| {
            let s = Complex64::new(-gamma, omega); // i(ω + iγ)
            let step = (s * dt).exp();
            let mut phase = Complex64::new(1.0, 0.0);
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, c) in samples.iter().enumerate() {
                let w = if j == 0 || j == steps { 0.5 } else { 1.0 };
                acc += phase * c * w;
                phase *= step;
            }
            let mut integral = acc * dt;
            if quadrature == Quadrature::TrapezoidEndCorrected {
                let end = (s * t_end).exp();
                let f0 = s * samples[0] + c0d;
                let ft = end * (s * samples[steps] + ctd);
                integral -= (ft - f0) * (dt * dt / 12.0);
            }
            i * integral
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_level() -> (PauliSum, PauliSum) {
        let h = PauliSum::from_words(&[(0.5, "I"), (-0.5, "Z")]).unwrap();
        let v = PauliSum::from_words(&[(1.0, "X")]).unwrap();
        (h, v)
    }

    #[test]
    fn diag_small_cases() {
        let eig = exact_diag(&PauliSum::from_words(&[(1.0, "Z")]).unwrap()).unwrap();
        assert_eq!(eig.energies, vec![-1.0, 1.0]);
        // XX + ZZ splits into {00,11}: [[1,1],[1,1]] → 0, 2
        // and {01,10}: [[-1,1],[1,-1]] → −2, 0
        let h = PauliSum::from_words(&[(1.0, "XX"), (1.0, "ZZ")]).unwrap();
        let eig = exact_diag(&h).unwrap();
        let want = [-2.0, 0.0, 0.0, 2.0];
        for (a, b) in eig.energies.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(eig.max_residual(&h.to_dense().unwrap()) < 1e-12);
        let nh = PauliSum::from_words(&[(Complex64::new(0.0, 1.0), "Z")]).unwrap();
        assert!(matches!(exact_diag(&nh), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn two_level_resonance() {
        let (h, v) = two_level();
        let eig = exact_diag(&h).unwrap();
        let chi = chi_sos(&eig, &v, 1.0, 0.1).unwrap();
        assert!((chi - Complex64::new(0.0, 10.0)).norm() < 1e-12);
        let g = eig.ground_state();
        let solved = chi_solve(&h, 0.0, &v, &g, 1.0, 0.1).unwrap();
        assert!((solved - chi).norm() < 1e-10);
        let zero = PauliSum::zero(1);
        assert_eq!(chi_sos(&eig, &zero, 1.0, 0.1).unwrap(), Complex64::new(0.0, 0.0));
        assert!(chi_sos(&eig, &v, 1.0, 0.0).is_err());
    }

    #[test]
    fn identity_perturbation_keeps_only_ground_term() {
        let (h, _) = two_level();
        let v = PauliSum::identity(1, 1.0);
        let g = exact_diag(&h).unwrap().ground_state();
        let (w, gamma) = (0.37, 0.2);
        let chi = chi_solve(&h, 0.0, &v, &g, w, gamma).unwrap();
        let want = Complex64::new(1.0, 0.0) / Complex64::new(-w, -gamma);
        assert!((chi - want).norm() < 1e-12);
    }

    #[test]
    fn large_gamma_asymptote() {
        let h = PauliSum::from_words(&[(0.3, "ZI"), (0.2, "XX"), (-0.1, "IY")]).unwrap();
        let v = PauliSum::from_words(&[(1.0, "XI"), (0.5, "ZZ")]).unwrap();
        let eig = exact_diag(&h).unwrap();
        let g = eig.ground_state();
        let gamma = 1e3;
        let chi = chi_solve(&h, eig.ground_energy(), &v, &g, 0.0, gamma).unwrap();
        let vv = crate::sim::expect(&g, &v.adjoint().mul(&v).unwrap()).unwrap().re;
        // 1/(ω_m0 − iγ) → i/γ, so the leading term is +i⟨V†V⟩/γ
        let lead = Complex64::new(0.0, vv / gamma);
        // next order is O(1/γ²)
        assert!((chi - lead).norm() < 10.0 / (gamma * gamma));
    }

    #[test]
    fn time_domain_two_level() {
        let (h, v) = two_level();
        let g = exact_diag(&h).unwrap().ground_state();
        assert!((Transitions::from_state(&exact_diag(&h).unwrap(), &v, &g, 0.0).unwrap().correlation(0.0)
            - Complex64::new(1.0, 0.0))
        .norm()
            < 1e-14);
        let grid = [0.5, 0.9, 1.0, 1.3];
        let td = chi_timedomain(&h, 0.0, &v, &g, &grid, 0.1, 300.0, 0.01, Quadrature::default()).unwrap();
        for (w, chi) in grid.iter().zip(td) {
            let exact = Complex64::new(1.0, 0.0) / Complex64::new(1.0 - w, -0.1);
            assert!((chi - exact).norm() < 1e-6, "{w}: {chi} vs {exact}");
        }
    }

    #[test]
    fn nyquist_violation() {
        let h = PauliSum::from_words(&[(100.0, "Z")]).unwrap();
        let v = PauliSum::from_words(&[(1.0, "X")]).unwrap();
        let g = exact_diag(&h).unwrap().ground_state();
        let err = chi_timedomain(&h, -100.0, &v, &g, &[0.0], 0.1, 10.0, 0.1, Quadrature::Trapezoid);
        assert!(matches!(err, Err(Error::Nyquist { .. })));
    }
}
