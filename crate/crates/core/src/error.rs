use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} qubits, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} with {n} qubits exceeds the cap of {cap}")]
    Capacity { what: &'static str, n: usize, cap: usize },

    #[error("fermionic mode {mode} out of range for {n_modes} modes")]
    InvalidMode { mode: usize, n_modes: usize },

    #[error("invalid gate targets {targets:?} on a {n}-qubit register")]
    InvalidTarget { targets: Vec<usize>, n: usize },

    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("operator is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("projector is not idempotent (residual {residual:.3e})")]
    NotIdempotent { residual: f64 },

    #[error("observable does not commute with the projector (commutator norm {norm:.3e})")]
    NonCommuting { norm: f64 },

    #[error("symmetry sector depleted: tr(rho P) = {trace:.3e}")]
    SectorDepleted { trace: f64 },

    #[error("singular response point: <x|A^dag A|x> = {denominator:.3e}")]
    SingularPoint { denominator: f64 },

    #[error("ill-conditioned shifted system (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("time step {dt} does not resolve excitation energy {max_energy} (need dt * max_energy < pi)")]
    Nyquist { dt: f64, max_energy: f64 },

    #[error("optimizer made no progress: every one of {evaluations} evaluations returned {value}")]
    NoImprovement { value: f64, evaluations: usize },

    #[error("optimizer produced no finite cost value after {evaluations} evaluations")]
    Diverged { evaluations: usize },
}
