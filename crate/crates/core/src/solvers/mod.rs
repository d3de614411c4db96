//! Variational ground-state and response solvers.
//!
//! The response state `|x⟩ = U₁(θ)|0⟩` minimizes
//! `L(θ) = ⟨V†V⟩⟨x|A†A|x⟩ − |⟨Ψ₀|V†A|x⟩|²` with `A(ω) = H₀ − E₀ − ω − iγ`,
//! and the response follows as `χ = ⟨x|A†|x⟩⟨V†V⟩ / ⟨x|A†A|x⟩`.

pub mod optimize;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::AnsatzSpec;
use crate::error::{Error, Result};
use crate::mitigation::{mitigated_measure, SymmetryProjector};
use crate::pauli::{PauliSum, PauliTerm};
use crate::rng::{derive_seed, stream};
use crate::sim::{run_circuit, Angles, Circuit, CrossEstimator, NoiseModel, Prepared, Statevector};

pub use optimize::{minimize, OptOutcome, OptimizerSpec};

/// `⟨x|A†A|x⟩` below this is reported as a singular point.
pub const DENOMINATOR_GUARD: f64 = 1e-12;
/// Points whose whole cost landscape spans less than this multiple of
/// `γ²⟨V†V⟩` are flagged as near-resonant.
pub const NEAR_RESONANCE_FACTOR: f64 = 10.0;
/// Largest register evaluated through dense matrices in exact mode.
pub const DENSE_EXACT_CAP: usize = 8;

// stream tags
const TAG_VQE: u64 = 1;
const TAG_EVAL: u64 = 2;
const TAG_VV: u64 = 3;
const TAG_FINAL: u64 = 4;

/// How expectation values are obtained.
#[derive(Debug, Clone, Default)]
pub struct ExecConfig {
    /// Shots per measured term; 0 means exact expectation values.
    pub shots: u64,
    pub noise: Option<NoiseModel>,
    /// Applied to `⟨H₀⟩` in VQE and to `⟨V†V⟩`.
    pub ground_projector: Option<SymmetryProjector>,
    /// Applied to `⟨x|A†A|x⟩` and `⟨x|A†|x⟩`.
    pub response_projector: Option<SymmetryProjector>,
    pub seed: u64,
    /// Worker threads for sweeps; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl ExecConfig {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn noise(&self) -> Option<&NoiseModel> {
        self.noise.as_ref().filter(|nm| !nm.is_noiseless())
    }

    /// Exact, noiseless and unmitigated.
    pub fn is_exact(&self) -> bool {
        self.shots == 0
            && self.noise().is_none()
            && self.ground_projector.is_none()
            && self.response_projector.is_none()
    }
}

fn measure(
    state: &Prepared,
    o: &PauliSum,
    projector: Option<&SymmetryProjector>,
    shots: u64,
    seed: u64,
) -> Result<Complex64> {
    let mut rng = stream(seed, &[]);
    match projector {
        Some(p) => mitigated_measure(state, o, p, shots, &mut rng),
        None => state.measure(o, shots, &mut rng),
    }
}

fn angles_of(names: &[String], x: &[f64]) -> Angles {
    names.iter().cloned().zip(x.iter().copied()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeResult {
    pub energy: f64,
    pub angles: Angles,
    pub evaluations: usize,
}

/// Minimizes `⟨Ψ(θ)|H₀|Ψ(θ)⟩` over the ansatz angles.
pub fn vqe_minimize(h0: &PauliSum, ansatz: &AnsatzSpec, opt: &OptimizerSpec, exec: &ExecConfig) -> Result<VqeResult> {
    if ansatz.n != h0.n() {
        return Err(Error::DimensionMismatch { expected: h0.n(), found: ansatz.n });
    }
    let circuit = ansatz.build()?;
    let names = circuit.parameters().to_vec();
    let mut k = 0u64;
    let f = |x: &[f64]| -> Result<f64> {
        let seed = derive_seed(exec.seed, &[TAG_VQE, k]);
        k += 1;
        let state = Prepared::run(&circuit, &angles_of(&names, x), exec.noise())?;
        Ok(measure(&state, h0, exec.ground_projector.as_ref(), exec.shots, seed)?.re)
    };
    let out = minimize(f, names.len(), opt, derive_seed(exec.seed, &[TAG_VQE]))?;
    Ok(VqeResult { energy: out.value, angles: angles_of(&names, &out.x), evaluations: out.evaluations })
}

/// `A(ω) = H₀ − (E₀ + ω + iγ)·I`.
#[allow(non_snake_case)]
pub fn build_A(h0: &PauliSum, e0: f64, omega: f64, gamma: f64) -> PauliSum {
    h0.add(&PauliSum::identity(h0.n(), -Complex64::new(e0 + omega, gamma)))
        .expect("same register")
}

#[derive(Debug, Clone)]
pub struct ResponseProblem {
    pub h0: PauliSum,
    pub v: PauliSum,
    pub e0: f64,
    pub omega_grid: Vec<f64>,
    pub gamma: f64,
    pub ground_circuit: Circuit,
    pub ground_angles: Angles,
    pub response_ansatz: AnsatzSpec,
}

impl ResponseProblem {
    pub fn validate(&self) -> Result<()> {
        let n = self.h0.n();
        for found in [self.v.n(), self.ground_circuit.n(), self.response_ansatz.n] {
            if found != n {
                return Err(Error::DimensionMismatch { expected: n, found });
            }
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::Domain(format!("gamma must be positive, got {}", self.gamma)));
        }
        if self.omega_grid.is_empty() {
            return Err(Error::InvalidSpec("frequency grid is empty".into()));
        }
        if self.omega_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidSpec("frequency grid must be strictly increasing".into()));
        }
        self.ground_circuit.check_bound(&self.ground_angles)?;
        self.response_ansatz.validate()
    }

    /// Exact `|Ψ₀⟩` from the bound ground circuit.
    pub fn ground_state(&self) -> Result<Statevector> {
        run_circuit(&self.ground_circuit, &self.ground_angles)
    }
}

/// The pieces of `L` at one binding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostTerms {
    /// `⟨V†V⟩⟨x|A†A|x⟩`.
    pub term1: f64,
    /// `|⟨Ψ₀|V†A|x⟩|²`.
    pub term2: f64,
    /// `⟨x|A†A|x⟩`.
    pub ata: f64,
}

impl CostTerms {
    pub fn cost(&self) -> f64 {
        self.term1 - self.term2
    }
}

/// Dense quantities for the exact path: `A†A` and `w = A†V|Ψ₀⟩`, so the cross
/// amplitude is `w†x`.
#[derive(Debug, Clone)]
struct DenseExact {
    ata: DMatrix<Complex64>,
    w: DVector<Complex64>,
}

/// Everything about one frequency that does not depend on `θ`.
#[derive(Debug, Clone)]
pub struct CostEvaluator<'a> {
    problem: &'a ResponseProblem,
    exec: &'a ExecConfig,
    omega: f64,
    a: PauliSum,
    ata: PauliSum,
    vta: Vec<(PauliTerm, Complex64)>,
    vv: f64,
    u0: Circuit,
    u1: Circuit,
    names: Vec<String>,
    psi0: Statevector,
    dense: Option<DenseExact>,
    seed: u64,
}

/// Per-frequency root seed; depends only on the root and the frequency value.
pub fn frequency_seed(root: u64, omega: f64) -> u64 {
    derive_seed(root, &[omega.to_bits()])
}

impl<'a> CostEvaluator<'a> {
    pub fn new(problem: &'a ResponseProblem, omega: f64, exec: &'a ExecConfig) -> Result<Self> {
        problem.validate()?;
        let seed = frequency_seed(exec.seed, omega);
        let a = build_A(&problem.h0, problem.e0, omega, problem.gamma);
        let ata = a.adjoint().mul(&a)?;
        let vta: Vec<(PauliTerm, Complex64)> =
            problem.v.adjoint().mul(&a)?.iter().map(|(t, &c)| (t.clone(), c)).collect();
        let u0 = problem.ground_circuit.bind(&problem.ground_angles)?;
        let psi0 = run_circuit(&u0, &Angles::new())?;
        let u1 = problem.response_ansatz.build()?;
        let names = u1.parameters().to_vec();
        let vtv = problem.v.adjoint().mul(&problem.v)?;
        let ground = Prepared::run(&u0, &Angles::new(), exec.noise())?;
        let vv = measure(
            &ground,
            &vtv,
            exec.ground_projector.as_ref(),
            exec.shots,
            derive_seed(seed, &[TAG_VV]),
        )?
        .re;
        let n = problem.h0.n();
        let dense = if exec.is_exact() && n <= DENSE_EXACT_CAP {
            let am = a.to_dense()?;
            let b = DVector::from_vec(problem.v.apply(psi0.amplitudes())?);
            Some(DenseExact { ata: am.adjoint() * &am, w: am.adjoint() * b })
        } else {
            None
        };
        Ok(Self { problem, exec, omega, a, ata, vta, vv, u0, u1, names, psi0, dense, seed })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `⟨Ψ₀|V†V|Ψ₀⟩` as used by this evaluator (estimated once).
    pub fn vv(&self) -> f64 {
        self.vv
    }

    pub fn parameter_names(&self) -> &[String] {
        &self.names
    }

    /// `L` terms at `theta`; `seed` addresses the shot streams.
    pub fn terms(&self, theta: &Angles, seed: u64) -> Result<CostTerms> {
        if let Some(d) = &self.dense {
            let x = run_circuit(&self.u1, theta)?;
            let xv = DVector::from_column_slice(x.amplitudes());
            let ata = xv.dotc(&(&d.ata * &xv)).re;
            let cross = d.w.dotc(&xv).norm_sqr();
            return Ok(CostTerms { term1: self.vv * ata, term2: cross, ata });
        }
        self.terms_by_estimators(theta, seed)
    }

    /// `L` terms through Pauli expectation values and the cross-term estimator
    /// `Σ_{lk} c̄_l c_k ⟨x|P_l|Ψ₀⟩⟨Ψ₀|P_k|x⟩`, regardless of mode.
    pub fn terms_by_estimators(&self, theta: &Angles, seed: u64) -> Result<CostTerms> {
        let noise = self.exec.noise();
        let state = Prepared::run(&self.u1, theta, noise)?;
        let ata = measure(
            &state,
            &self.ata,
            self.exec.response_projector.as_ref(),
            self.exec.shots,
            derive_seed(seed, &[0]),
        )?
        .re;
        let est = CrossEstimator::new(&self.u0, &self.u1, theta, noise)?;
        let mut cross = 0.0;
        for (l, (pl, cl)) in self.vta.iter().enumerate() {
            for (k, (pk, ck)) in self.vta.iter().enumerate().skip(l) {
                let z = est.estimate(pl, pk, self.exec.shots, derive_seed(seed, &[1, l as u64, k as u64]))?;
                let w = cl.conj() * ck * z;
                cross += if l == k { w.re } else { 2.0 * w.re };
            }
        }
        Ok(CostTerms { term1: self.vv * ata, term2: cross, ata })
    }

    /// Exact `L` terms for an arbitrary normalized state `x` in place of the
    /// ansatz output; uses the Pauli expansion of `V†A`.
    pub fn terms_for_state(&self, x: &Statevector) -> Result<CostTerms> {
        let ata = crate::sim::expect(x, &self.ata)?.re;
        let amp: Complex64 = self
            .vta
            .iter()
            .map(|(p, c)| c * p.matrix_element(self.psi0.amplitudes(), x.amplitudes()))
            .sum();
        Ok(CostTerms { term1: self.vv * ata, term2: amp.norm_sqr(), ata })
    }

    /// Response value `⟨x|A†|x⟩⟨V†V⟩/⟨x|A†A|x⟩` for an exact state.
    pub fn chi_for_state(&self, x: &Statevector) -> Result<Complex64> {
        let ata = crate::sim::expect(x, &self.ata)?.re;
        if ata < DENOMINATOR_GUARD {
            return Err(Error::SingularPoint { denominator: ata });
        }
        Ok(crate::sim::expect(x, &self.a.adjoint())? * (self.vv / ata))
    }

    /// `L(θ)` with an evaluation-local seed.
    pub fn cost(&self, theta: &Angles, seed: u64) -> Result<f64> {
        Ok(self.terms(theta, seed)?.cost())
    }

    /// `⟨x|A†|x⟩` at `theta`.
    pub fn a_dagger(&self, theta: &Angles, seed: u64) -> Result<Complex64> {
        if self.dense.is_some() {
            let x = run_circuit(&self.u1, theta)?;
            return crate::sim::expect(&x, &self.a.adjoint());
        }
        let state = Prepared::run(&self.u1, theta, self.exec.noise())?;
        measure(&state, &self.a.adjoint(), self.exec.response_projector.as_ref(), self.exec.shots, seed)
    }

    /// Whether `V|Ψ₀⟩` vanishes on the exact ground state.
    pub fn is_degenerate(&self) -> Result<bool> {
        let b = self.problem.v.apply(self.psi0.amplitudes())?;
        Ok(b.iter().map(|c| c.norm_sqr()).sum::<f64>() < 1e-24)
    }
}

/// `L(θ₁)` at one frequency.
#[allow(non_snake_case)]
pub fn cost_L(problem: &ResponseProblem, omega: f64, theta1: &Angles, exec: &ExecConfig) -> Result<f64> {
    let ev = CostEvaluator::new(problem, omega, exec)?;
    ev.cost(theta1, derive_seed(ev.seed, &[TAG_EVAL]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponsePoint {
    pub omega: f64,
    pub theta_opt: Angles,
    pub chi: Complex64,
    /// Final cost `L(θ_opt)`.
    pub residual: f64,
    /// `⟨V†V⟩ / ⟨x|A†A|x⟩`.
    pub norm_ratio: f64,
    pub term1: f64,
    pub term2: f64,
    /// `max L − min L` over every evaluated binding.
    pub landscape_span: f64,
    /// Landscape span below `10 γ² ⟨V†V⟩`: the two cost terms stay within
    /// order `γ²` of each other everywhere, so shot noise can steer the
    /// optimizer.
    pub near_resonance: bool,
    pub evaluations: usize,
}

/// Minimizes `L` at one frequency and evaluates `χ` at the optimum.
pub fn solve_frequency(problem: &ResponseProblem, omega: f64, opt: &OptimizerSpec, exec: &ExecConfig) -> Result<ResponsePoint> {
    let ev = CostEvaluator::new(problem, omega, exec)?;
    let names = ev.parameter_names().to_vec();
    if ev.is_degenerate()? {
        return Ok(ResponsePoint {
            omega,
            theta_opt: angles_of(&names, &vec![0.0; names.len()]),
            chi: Complex64::new(0.0, 0.0),
            residual: 0.0,
            norm_ratio: 0.0,
            term1: 0.0,
            term2: 0.0,
            landscape_span: 0.0,
            near_resonance: false,
            evaluations: 0,
        });
    }
    let mut k = 0u64;
    let f = |x: &[f64]| -> Result<f64> {
        let seed = derive_seed(ev.seed, &[TAG_EVAL, k]);
        k += 1;
        ev.cost(&angles_of(&names, x), seed)
    };
    let out = minimize(f, names.len(), opt, derive_seed(ev.seed, &[TAG_EVAL]))?;
    let theta = angles_of(&names, &out.x);

    // final estimates at the optimum use their own streams
    let terms = ev.terms(&theta, derive_seed(ev.seed, &[TAG_FINAL, 0]))?;
    if terms.ata < DENOMINATOR_GUARD {
        return Err(Error::SingularPoint { denominator: terms.ata });
    }
    let a_dag = ev.a_dagger(&theta, derive_seed(ev.seed, &[TAG_FINAL, 1]))?;
    let norm_ratio = ev.vv / terms.ata;
    let landscape_span = out.max_seen - out.min_seen;
    let gamma = problem.gamma;
    Ok(ResponsePoint {
        omega,
        theta_opt: theta,
        chi: a_dag * norm_ratio,
        residual: terms.cost(),
        norm_ratio,
        term1: terms.term1,
        term2: terms.term2,
        landscape_span,
        near_resonance: names.len() > 0 && landscape_span < NEAR_RESONANCE_FACTOR * gamma * gamma * ev.vv,
        evaluations: out.evaluations,
    })
}

/// Solves every grid frequency independently, in parallel, keeping grid order
/// and per-point failures.
pub fn sweep(problem: &ResponseProblem, opt: &OptimizerSpec, exec: &ExecConfig) -> Result<Vec<Result<ResponsePoint>>> {
    problem.validate()?;
    let run = || -> Vec<Result<ResponsePoint>> {
        problem
            .omega_grid
            .par_iter()
            .map(|&w| solve_frequency(problem, w, opt, exec))
            .collect()
    };
    match exec.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::InvalidSpec(format!("thread pool: {e}")))?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}
