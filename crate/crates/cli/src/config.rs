//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use respq_core::solvers::OptimizerSpec;

/// Every problem found in a configuration, reported together.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<String>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration:")?;
        for e in &self.0 {
            write!(f, "\n  - {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("format must be csv or json, got `{s}`")),
        }
    }
}

/// Where the reference energy `E₀` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum E0Source {
    /// Minimum found by VQE on the ground ansatz.
    Vqe,
    /// Lowest eigenvalue of the dense Hamiltonian.
    Oracle,
    Value(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoisePreset {
    None,
    SqrtIswap2q,
    SqrtIswap4q,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub hamiltonian: PathBuf,
    /// `(axis label, operator file)`, one to three entries.
    pub perturbations: Vec<(String, PathBuf)>,
    pub projector: Option<PathBuf>,
    pub response_projector: Option<PathBuf>,
    pub ground_ansatz: String,
    pub ground_optimizer: String,
    pub e0: E0Source,
    pub response_ansatz: String,
    pub optimizer: String,
    pub omega_min: f64,
    pub omega_max: f64,
    pub omega_steps: usize,
    pub gamma: f64,
    pub shots: u64,
    pub noise: NoisePreset,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub readout: Option<Vec<f64>>,
    pub seed: u64,
    pub shift_ev: f64,
    pub output: Option<PathBuf>,
    pub format: Format,
}

const KEYS: &[&str] = &[
    "hamiltonian",
    "perturbation",
    "perturbation_x",
    "perturbation_y",
    "perturbation_z",
    "projector",
    "response_projector",
    "ground_ansatz",
    "ground_optimizer",
    "e0",
    "response_ansatz",
    "optimizer",
    "omega_min",
    "omega_max",
    "omega_steps",
    "gamma",
    "shots",
    "noise",
    "p1",
    "p2",
    "readout",
    "seed",
    "shift_ev",
    "output",
    "format",
];

impl RunConfig {
    /// `omega_steps` evenly spaced points from `omega_min` to `omega_max`
    /// inclusive; a single step is just `omega_min`.
    pub fn omega_grid(&self) -> Vec<f64> {
        if self.omega_steps == 1 {
            return vec![self.omega_min];
        }
        let h = (self.omega_max - self.omega_min) / (self.omega_steps - 1) as f64;
        (0..self.omega_steps)
            .map(|k| if k + 1 == self.omega_steps { self.omega_max } else { self.omega_min + k as f64 * h })
            .collect()
    }
}

/// Parses an optimizer description: `auto`, `grid(R)`, `grid(R, norefine)` or
/// `simplex(max_iter, tol, restarts)`. `auto` yields `None`.
pub fn parse_optimizer(text: &str) -> Result<Option<OptimizerSpec>, String> {
    let t = text.trim();
    if t == "auto" {
        return Ok(None);
    }
    let bad = || format!("unrecognized optimizer `{t}`");
    let (head, args) = t.strip_suffix(')').and_then(|s| s.split_once('(')).ok_or_else(bad)?;
    let args: Vec<&str> = args.split(',').map(str::trim).collect();
    let spec = match (head.trim(), args.as_slice()) {
        ("grid", [r]) => OptimizerSpec::GridScan { resolution: r.parse().map_err(|_| bad())?, refine: true },
        ("grid", [r, mode]) => {
            let refine = match *mode {
                "refine" => true,
                "norefine" => false,
                _ => return Err(bad()),
            };
            OptimizerSpec::GridScan { resolution: r.parse().map_err(|_| bad())?, refine }
        }
        ("simplex", [m, tol, restarts]) => OptimizerSpec::SimplexDescent {
            max_iter: m.parse().map_err(|_| bad())?,
            tol: tol.parse().map_err(|_| bad())?,
            restarts: restarts.parse().map_err(|_| bad())?,
        },
        _ => return Err(bad()),
    };
    Ok(Some(spec))
}

/// Reads and validates a configuration file. Relative paths inside it are
/// resolved against the file's directory.
pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigErrors> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigErrors(vec![format!("cannot read {}: {e}", path.display())]))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config_str(&text, base)
}

pub fn parse_config_str(text: &str, base: &Path) -> Result<RunConfig, ConfigErrors> {
    let mut errors = Vec::new();
    let mut kv: BTreeMap<String, String> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split(['#', ';']).next().unwrap_or("").trim();
        if line.is_empty() || (line.starts_with('[') && line.ends_with(']')) {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            errors.push(format!("line {}: expected `key = value`", idx + 1));
            continue;
        };
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        if !KEYS.contains(&k.as_str()) {
            errors.push(format!("line {}: unknown key `{k}`", idx + 1));
        } else if kv.insert(k.clone(), v).is_some() {
            errors.push(format!("line {}: duplicate key `{k}`", idx + 1));
        }
    }

    let path_of = |v: &String| {
        let p = PathBuf::from(v);
        if p.is_absolute() { p } else { base.join(p) }
    };
    let number = |key: &str, errors: &mut Vec<String>| -> Option<f64> {
        let v = kv.get(key)?;
        match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Some(x),
            _ => {
                errors.push(format!("{key}: `{v}` is not a finite number"));
                None
            }
        }
    };

    let hamiltonian = kv.get("hamiltonian").map(path_of);
    if hamiltonian.is_none() {
        errors.push("hamiltonian: required".into());
    }
    let mut perturbations = Vec::new();
    if let Some(v) = kv.get("perturbation") {
        perturbations.push(("v".to_string(), path_of(v)));
    }
    for axis in ["x", "y", "z"] {
        if let Some(v) = kv.get(&format!("perturbation_{axis}")) {
            perturbations.push((axis.to_string(), path_of(v)));
        }
    }
    if perturbations.is_empty() {
        errors.push("perturbation: required (or perturbation_x/y/z)".into());
    } else if kv.contains_key("perturbation") && perturbations.len() > 1 {
        errors.push("perturbation: give either one perturbation or per-axis perturbation_x/y/z, not both".into());
    }

    let omega_min = number("omega_min", &mut errors);
    let omega_max = number("omega_max", &mut errors);
    let gamma = number("gamma", &mut errors);
    let p1 = number("p1", &mut errors);
    let p2 = number("p2", &mut errors);
    let shift_ev = number("shift_ev", &mut errors).unwrap_or(0.0);
    for key in ["omega_min", "omega_max", "gamma"] {
        if !kv.contains_key(key) {
            errors.push(format!("{key}: required"));
        }
    }
    if let (Some(a), Some(b)) = (omega_min, omega_max) {
        if !(a < b) {
            errors.push(format!("omega_min must be below omega_max, got {a} and {b}"));
        }
    }
    if let Some(g) = gamma {
        if !(g > 0.0) {
            errors.push(format!("gamma must be positive, got {g}"));
        }
    }
    for (key, p) in [("p1", p1), ("p2", p2)] {
        if let Some(p) = p {
            if !(0.0..=1.0).contains(&p) {
                errors.push(format!("{key} must lie in [0, 1], got {p}"));
            }
        }
    }

    let omega_steps = match kv.get("omega_steps") {
        None => {
            errors.push("omega_steps: required".into());
            1
        }
        Some(v) => match v.parse::<i64>() {
            Ok(s) if s >= 1 => s as usize,
            Ok(s) => {
                errors.push(format!("omega_steps must be at least 1, got {s}"));
                1
            }
            Err(_) => {
                errors.push(format!("omega_steps: `{v}` is not an integer"));
                1
            }
        },
    };
    let shots = match kv.get("shots") {
        None => 0,
        Some(v) => match v.parse::<i64>() {
            Ok(s) if s >= 0 => s as u64,
            Ok(s) => {
                errors.push(format!("shots must be non-negative, got {s}"));
                0
            }
            Err(_) => {
                errors.push(format!("shots: `{v}` is not an integer"));
                0
            }
        },
    };
    let seed = match kv.get("seed") {
        None => 0,
        Some(v) => v.parse::<u64>().unwrap_or_else(|_| {
            errors.push(format!("seed: `{v}` is not an unsigned integer"));
            0
        }),
    };
    let noise = match kv.get("noise").map(String::as_str) {
        None | Some("none") => NoisePreset::None,
        Some("sqrt_iswap_2q") => NoisePreset::SqrtIswap2q,
        Some("sqrt_iswap_4q") => NoisePreset::SqrtIswap4q,
        Some(other) => {
            errors.push(format!("noise must be none, sqrt_iswap_2q or sqrt_iswap_4q, got `{other}`"));
            NoisePreset::None
        }
    };
    let readout = kv.get("readout").and_then(|v| {
        let parsed: Result<Vec<f64>, _> = v.split(',').map(|s| s.trim().parse::<f64>()).collect();
        match parsed {
            Ok(r) if r.iter().all(|f| (0.0..=0.5).contains(f)) => Some(r),
            _ => {
                errors.push(format!("readout must be comma-separated flip probabilities in [0, 0.5], got `{v}`"));
                None
            }
        }
    });
    let e0 = match kv.get("e0").map(String::as_str) {
        None | Some("vqe") => E0Source::Vqe,
        Some("oracle") => E0Source::Oracle,
        Some(v) => match v.parse::<f64>() {
            Ok(x) if x.is_finite() => E0Source::Value(x),
            _ => {
                errors.push(format!("e0 must be vqe, oracle or a number, got `{v}`"));
                E0Source::Vqe
            }
        },
    };
    let format = match kv.get("format") {
        None => Format::Csv,
        Some(v) => v.parse().unwrap_or_else(|e| {
            errors.push(e);
            Format::Csv
        }),
    };
    let text_or = |key: &str, default: &str| kv.get(key).cloned().unwrap_or_else(|| default.to_string());
    let ground_ansatz = text_or("ground_ansatz", "hardware_efficient(2)");
    let response_ansatz = text_or("response_ansatz", "hardware_efficient(2)");
    let optimizer = text_or("optimizer", "auto");
    let ground_optimizer = text_or("ground_optimizer", "auto");
    for (key, value) in [("optimizer", &optimizer), ("ground_optimizer", &ground_optimizer)] {
        match parse_optimizer(value) {
            Ok(Some(spec)) => {
                if let Err(e) = spec.validate(0) {
                    errors.push(format!("{key}: {e}"));
                }
            }
            Ok(None) => {}
            Err(e) => errors.push(format!("{key}: {e}")),
        }
    }

    if !errors.is_empty() {
        return Err(ConfigErrors(errors));
    }
    Ok(RunConfig {
        hamiltonian: hamiltonian.expect("checked above"),
        perturbations,
        projector: kv.get("projector").map(path_of),
        response_projector: kv.get("response_projector").map(path_of),
        ground_ansatz,
        ground_optimizer,
        e0,
        response_ansatz,
        optimizer,
        omega_min: omega_min.expect("checked above"),
        omega_max: omega_max.expect("checked above"),
        omega_steps,
        gamma: gamma.expect("checked above"),
        shots,
        noise,
        p1,
        p2,
        readout,
        seed,
        shift_ev,
        output: kv.get("output").map(path_of),
        format,
    })
}
