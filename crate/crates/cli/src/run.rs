//! Loading inputs, running the VQE + response sweep, and the run record.

use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use respq_core::circuits::AnsatzSpec;
use respq_core::mitigation::{validate_projector, SymmetryProjector};
use respq_core::oracle::{chi_sos, exact_diag};
use respq_core::pauli::PauliSum;
use respq_core::sim::{Angles, NoiseModel};
use respq_core::solvers::{sweep, vqe_minimize, ExecConfig, OptimizerSpec, ResponsePoint, ResponseProblem};
use respq_core::spectrum::{apply_shift, ev_to_hartree, Averaging, Spectrum};

use crate::config::{parse_optimizer, ConfigErrors, E0Source, NoisePreset, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    /// Configuration or input files are unusable.
    #[error(transparent)]
    Invalid(#[from] ConfigErrors),
    /// Inputs were valid but the run could not produce any rows.
    #[error("run failed: {0}")]
    Failed(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Invalid(_) => 2,
            RunError::Failed(_) => 1,
        }
    }
}

/// Operators and specs read from disk and checked against each other.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub h0: PauliSum,
    pub axes: Vec<(String, PauliSum)>,
    pub ground_projector: Option<SymmetryProjector>,
    pub response_projector: Option<SymmetryProjector>,
    pub ground_ansatz: AnsatzSpec,
    pub response_ansatz: AnsatzSpec,
    pub ground_optimizer: OptimizerSpec,
    pub optimizer: OptimizerSpec,
    pub noise: Option<NoiseModel>,
}

impl Inputs {
    pub fn n(&self) -> usize {
        self.h0.n()
    }
}

fn read_operator(path: &Path, what: &str, errors: &mut Vec<String>) -> Option<PauliSum> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            errors.push(format!("{what}: cannot read {}: {e}", path.display()));
            return None;
        }
    };
    match PauliSum::parse_text(&text) {
        Ok(op) => Some(op),
        Err(e) => {
            errors.push(format!("{what}: {}: {e}", path.display()));
            None
        }
    }
}

fn noise_model(c: &RunConfig) -> Result<Option<NoiseModel>, String> {
    let mut nm = match c.noise {
        NoisePreset::None => NoiseModel::noiseless(),
        NoisePreset::SqrtIswap2q => NoiseModel::sqrt_iswap_2q(),
        NoisePreset::SqrtIswap4q => NoiseModel::sqrt_iswap_4q(),
    };
    if let Some(p1) = c.p1 {
        nm.p1 = p1;
    }
    if let Some(p2) = c.p2 {
        nm.p2 = p2;
    }
    nm.readout = c.readout.clone();
    nm.validate().map_err(|e| e.to_string())?;
    Ok((!nm.is_noiseless()).then_some(nm))
}

/// Reads every operator file and checks registers, ansatz and optimizer specs,
/// projectors and noise together.
pub fn load(c: &RunConfig) -> Result<Inputs, ConfigErrors> {
    let mut errors = Vec::new();
    let h0 = read_operator(&c.hamiltonian, "hamiltonian", &mut errors);
    let mut axes = Vec::new();
    for (axis, path) in &c.perturbations {
        if let Some(v) = read_operator(path, &format!("perturbation {axis}"), &mut errors) {
            axes.push((axis.clone(), v));
        }
    }
    let ground_p = c.projector.as_ref().and_then(|p| read_operator(p, "projector", &mut errors));
    let response_p = c.response_projector.as_ref().and_then(|p| read_operator(p, "response_projector", &mut errors));
    let noise = noise_model(c).map_err(|e| errors.push(format!("noise: {e}"))).ok().flatten();
    let Some(h0) = h0 else {
        return Err(ConfigErrors(errors));
    };
    let n = h0.n();
    if !h0.is_hermitian() {
        errors.push(format!("hamiltonian is not Hermitian (residual {:e})", h0.hermitian_residual()));
    }
    for (axis, v) in &axes {
        if v.n() != n {
            errors.push(format!("perturbation {axis} acts on {} qubits, hamiltonian on {n}", v.n()));
        }
    }
    if let Some(r) = &c.readout {
        if r.len() != n {
            errors.push(format!("readout lists {} qubits, register has {n}", r.len()));
        }
    }

    let mut projector = |p: Option<PauliSum>, what: &str, must_commute: Vec<PauliSum>| -> Option<SymmetryProjector> {
        let p = p?;
        if p.n() != n {
            errors.push(format!("{what} acts on {} qubits, hamiltonian on {n}", p.n()));
            return None;
        }
        match validate_projector(&p) {
            Ok(sp) => {
                for o in &must_commute {
                    if let Err(e) = sp.check_commutes(o) {
                        errors.push(format!("{what}: {e}"));
                        break;
                    }
                }
                Some(sp)
            }
            Err(e) => {
                errors.push(format!("{what}: {e}"));
                None
            }
        }
    };
    let mut ground_obs = vec![h0.clone()];
    for (_, v) in axes.iter().filter(|(_, v)| v.n() == n) {
        ground_obs.push(v.adjoint().mul(v).expect("same register"));
    }
    let ground_projector = projector(ground_p, "projector", ground_obs);
    let response_projector = projector(response_p, "response_projector", vec![h0.clone()]);

    let mut ansatz = |text: &str, what: &str| match AnsatzSpec::parse(text, n).and_then(|a| a.build().map(|c| (a, c))) {
        Ok((a, circuit)) => Some((a, circuit.parameters().len())),
        Err(e) => {
            errors.push(format!("{what}: {e}"));
            None
        }
    };
    let ground_ansatz = ansatz(&c.ground_ansatz, "ground_ansatz");
    let response_ansatz = ansatz(&c.response_ansatz, "response_ansatz");
    let mut optimizer = |text: &str, what: &str, params: Option<usize>| -> Option<OptimizerSpec> {
        let params = params?;
        let spec = match parse_optimizer(text) {
            Ok(Some(s)) => s,
            Ok(None) => OptimizerSpec::default_for(params),
            Err(e) => {
                errors.push(format!("{what}: {e}"));
                return None;
            }
        };
        match spec.validate(params) {
            Ok(()) => Some(spec),
            Err(e) => {
                errors.push(format!("{what}: {e}"));
                None
            }
        }
    };
    let ground_optimizer = optimizer(&c.ground_optimizer, "ground_optimizer", ground_ansatz.as_ref().map(|a| a.1));
    let response_optimizer = optimizer(&c.optimizer, "optimizer", response_ansatz.as_ref().map(|a| a.1));

    if !errors.is_empty() {
        return Err(ConfigErrors(errors));
    }
    Ok(Inputs {
        h0,
        axes,
        ground_projector,
        response_projector,
        ground_ansatz: ground_ansatz.expect("no errors").0,
        response_ansatz: response_ansatz.expect("no errors").0,
        ground_optimizer: ground_optimizer.expect("no errors"),
        optimizer: response_optimizer.expect("no errors"),
        noise,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Add dense sum-over-states columns.
    pub oracle: bool,
    /// Worker threads for the sweep; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Record wall-clock times (makes JSON output run-dependent).
    pub timings: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundRecord {
    pub e0: f64,
    pub e0_source: E0Source,
    pub vqe_energy: f64,
    pub angles: Angles,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum AxisPoint {
    Solved(ResponsePoint),
    Failed { omega: f64, error: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisRecord {
    pub axis: String,
    pub points: Vec<AxisPoint>,
}

/// One output row; missing values mark a failed frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    /// Frequency after the configured shift.
    pub omega: f64,
    pub re_chi: Option<f64>,
    pub im_chi: Option<f64>,
    pub residual: Option<f64>,
    pub sigma_abs: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub omega: f64,
    pub axis: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub re_chi: f64,
    pub im_chi: f64,
    pub sigma_abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub ground_energy: f64,
    pub rows: Vec<OracleRow>,
    /// Largest `|χ − χ_oracle|` over successful rows.
    pub max_abs_delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallTimes {
    pub ground_s: f64,
    pub sweep_s: f64,
    pub total_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub version: String,
    pub config: RunConfig,
    pub config_sha256: String,
    pub seed: u64,
    pub n_qubits: usize,
    pub ground: Option<GroundRecord>,
    pub axes: Vec<AxisRecord>,
    pub rows: Vec<Row>,
    pub failures: Vec<Failure>,
    pub oracle: Option<OracleRecord>,
    pub averaging: Averaging,
    pub shift_hartree: f64,
    pub shift_ev: f64,
    pub wall_times: Option<WallTimes>,
}

impl RunRecord {
    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn exec_config(c: &RunConfig, inputs: &Inputs, threads: Option<usize>) -> ExecConfig {
    ExecConfig {
        shots: c.shots,
        noise: inputs.noise.clone(),
        ground_projector: inputs.ground_projector.clone(),
        response_projector: inputs.response_projector.clone(),
        seed: c.seed,
        threads,
    }
}

fn oracle_chi(inputs: &Inputs, grid: &[f64], gamma: f64) -> Result<(f64, Vec<Vec<Complex64>>), String> {
    let eig = exact_diag(&inputs.h0).map_err(|e| format!("oracle: {e}"))?;
    let components = inputs
        .axes
        .iter()
        .map(|(_, v)| grid.iter().map(|&w| chi_sos(&eig, v, w, gamma)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| format!("oracle: {e}"))?;
    Ok((eig.ground_energy(), components))
}

fn spectrum_of(grid: &[f64], components: Vec<Vec<Complex64>>, shift: f64) -> Result<Spectrum, String> {
    let s = Spectrum::new(grid.to_vec(), components).map_err(|e| e.to_string())?;
    Ok(if shift != 0.0 { apply_shift(&s, shift) } else { s })
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Runs VQE for the ground circuit, sweeps every perturbation axis and
/// post-processes the spectrum. Per-frequency failures are recorded, not
/// returned as errors.
pub fn run(c: &RunConfig, config_sha256: &str, opts: RunOptions) -> Result<RunRecord, RunError> {
    let start = Instant::now();
    let inputs = load(c)?;
    let exec = exec_config(c, &inputs, opts.threads);
    let grid = c.omega_grid();
    let shift = ev_to_hartree(c.shift_ev);

    let vqe = vqe_minimize(&inputs.h0, &inputs.ground_ansatz, &inputs.ground_optimizer, &exec)
        .map_err(|e| RunError::Failed(format!("ground-state VQE: {e}")))?;
    let oracle = if opts.oracle || c.e0 == E0Source::Oracle {
        Some(oracle_chi(&inputs, &grid, c.gamma).map_err(RunError::Failed)?)
    } else {
        None
    };
    let e0 = match c.e0 {
        E0Source::Vqe => vqe.energy,
        E0Source::Oracle => oracle.as_ref().expect("computed above").0,
        E0Source::Value(v) => v,
    };
    log::info!("E0 = {e0:.12} ({:?}), VQE energy {:.12}", c.e0, vqe.energy);
    let ground_s = start.elapsed().as_secs_f64();

    let ground_circuit = inputs.ground_ansatz.build().map_err(|e| RunError::Failed(e.to_string()))?;
    let mut axes = Vec::new();
    let mut failures = Vec::new();
    let mut components = Vec::new();
    let mut residuals = vec![Some(0.0f64); grid.len()];
    for (axis, v) in &inputs.axes {
        let problem = ResponseProblem {
            h0: inputs.h0.clone(),
            v: v.clone(),
            e0,
            omega_grid: grid.clone(),
            gamma: c.gamma,
            ground_circuit: ground_circuit.clone(),
            ground_angles: vqe.angles.clone(),
            response_ansatz: inputs.response_ansatz.clone(),
        };
        let results = sweep(&problem, &inputs.optimizer, &exec).map_err(|e| RunError::Failed(e.to_string()))?;
        let mut points = Vec::new();
        let mut chi = Vec::new();
        for (k, (res, &omega)) in results.into_iter().zip(&grid).enumerate() {
            match res {
                Ok(p) => {
                    if p.near_resonance {
                        log::warn!("axis {axis}, ω = {omega}: near-resonance flag set");
                    }
                    chi.push(p.chi);
                    residuals[k] = residuals[k].map(|r| r.max(p.residual));
                    points.push(AxisPoint::Solved(p));
                }
                Err(e) => {
                    log::warn!("axis {axis}, ω = {omega}: {e}");
                    chi.push(Complex64::new(f64::NAN, f64::NAN));
                    residuals[k] = None;
                    failures.push(Failure { omega, axis: axis.clone(), error: e.to_string() });
                    points.push(AxisPoint::Failed { omega, error: e.to_string() });
                }
            }
        }
        components.push(chi);
        axes.push(AxisRecord { axis: axis.clone(), points });
    }
    let sweep_s = start.elapsed().as_secs_f64() - ground_s;

    let spectrum = spectrum_of(&grid, components, shift).map_err(RunError::Failed)?;
    let rows: Vec<Row> = (0..grid.len())
        .map(|k| {
            let ok = residuals[k].is_some();
            let chi = spectrum.chi_bar[k];
            Row {
                omega: spectrum.omega[k],
                re_chi: if ok { finite(chi.re) } else { None },
                im_chi: if ok { finite(chi.im) } else { None },
                residual: residuals[k],
                sigma_abs: if ok { finite(spectrum.sigma_abs[k]) } else { None },
            }
        })
        .collect();

    let oracle_record = match (&oracle, opts.oracle) {
        (Some((ground_energy, comps)), true) => {
            let os = spectrum_of(&grid, comps.clone(), shift).map_err(RunError::Failed)?;
            let max_abs_delta = rows
                .iter()
                .zip(&os.chi_bar)
                .filter_map(|(r, o)| Some((Complex64::new(r.re_chi?, r.im_chi?) - o).norm()))
                .reduce(f64::max);
            Some(OracleRecord {
                ground_energy: *ground_energy,
                rows: os
                    .chi_bar
                    .iter()
                    .zip(&os.sigma_abs)
                    .map(|(z, &s)| OracleRow { re_chi: z.re, im_chi: z.im, sigma_abs: s })
                    .collect(),
                max_abs_delta,
            })
        }
        _ => None,
    };

    Ok(RunRecord {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: c.clone(),
        config_sha256: config_sha256.to_string(),
        seed: c.seed,
        n_qubits: inputs.n(),
        ground: Some(GroundRecord {
            e0,
            e0_source: c.e0,
            vqe_energy: vqe.energy,
            angles: vqe.angles,
            evaluations: vqe.evaluations,
        }),
        axes,
        rows,
        failures,
        oracle: oracle_record,
        averaging: spectrum.averaging,
        shift_hartree: spectrum.shift,
        shift_ev: spectrum.shift_ev,
        wall_times: opts.timings.then(|| WallTimes { ground_s, sweep_s, total_s: start.elapsed().as_secs_f64() }),
    })
}

/// Dense sum-over-states spectrum only, with no circuits involved.
pub fn run_oracle(c: &RunConfig, config_sha256: &str) -> Result<RunRecord, RunError> {
    let inputs = load(c)?;
    let grid = c.omega_grid();
    let (_, comps) = oracle_chi(&inputs, &grid, c.gamma).map_err(RunError::Failed)?;
    let spectrum = spectrum_of(&grid, comps, ev_to_hartree(c.shift_ev)).map_err(RunError::Failed)?;
    let rows = (0..grid.len())
        .map(|k| Row {
            omega: spectrum.omega[k],
            re_chi: Some(spectrum.chi_bar[k].re),
            im_chi: Some(spectrum.chi_bar[k].im),
            residual: Some(0.0),
            sigma_abs: Some(spectrum.sigma_abs[k]),
        })
        .collect();
    Ok(RunRecord {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: c.clone(),
        config_sha256: config_sha256.to_string(),
        seed: c.seed,
        n_qubits: inputs.n(),
        ground: None,
        axes: Vec::new(),
        rows,
        failures: Vec::new(),
        oracle: None,
        averaging: spectrum.averaging,
        shift_hartree: spectrum.shift,
        shift_ev: spectrum.shift_ev,
        wall_times: None,
    })
}
