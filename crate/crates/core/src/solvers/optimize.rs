//! Derivative-free minimizers over periodic angle spaces.

use std::cell::RefCell;
use std::f64::consts::TAU;

use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stream;

/// Grid scans above this many points are refused.
pub const GRID_POINT_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum OptimizerSpec {
    /// Full tensor grid of `resolution` points per angle over `[0, 2π)`,
    /// optionally polished by a simplex descent from the best grid point.
    GridScan { resolution: usize, refine: bool },
    /// Nelder–Mead from a seeded random start with `restarts` fresh simplices.
    SimplexDescent { max_iter: u64, tol: f64, restarts: usize },
}

impl OptimizerSpec {
    /// 256-point grid scan for up to two angles, simplex descent beyond.
    pub fn default_for(n_params: usize) -> Self {
        if n_params <= 2 {
            OptimizerSpec::GridScan { resolution: 256, refine: true }
        } else {
            OptimizerSpec::SimplexDescent { max_iter: 4000, tol: 1e-8, restarts: 3 }
        }
    }

    pub fn validate(&self, n_params: usize) -> Result<()> {
        match *self {
            OptimizerSpec::GridScan { resolution, .. } => {
                if resolution < 8 {
                    return Err(Error::InvalidSpec(format!("grid resolution {resolution} < 8 points per angle")));
                }
                let points = (resolution as f64).powi(n_params as i32);
                if points > GRID_POINT_CAP as f64 {
                    return Err(Error::InvalidSpec(format!(
                        "grid of {resolution}^{n_params} points exceeds the cap of {GRID_POINT_CAP}"
                    )));
                }
            }
            OptimizerSpec::SimplexDescent { max_iter, tol, .. } => {
                if max_iter == 0 || !(tol >= 0.0) {
                    return Err(Error::InvalidSpec("simplex descent needs max_iter ≥ 1 and tol ≥ 0".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptOutcome {
    /// Best point, wrapped into `[0, 2π)`.
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// Smallest and largest finite values seen.
    pub min_seen: f64,
    pub max_seen: f64,
}

/// Records every evaluation and the first hard error.
struct Tracker<F> {
    f: F,
    best: Option<(Vec<f64>, f64)>,
    evaluations: usize,
    min_seen: f64,
    max_seen: f64,
    error: Option<Error>,
    // bindings whose symmetry sector is empty are infeasible, not fatal
    depleted: Option<Error>,
}

impl<F: FnMut(&[f64]) -> Result<f64>> Tracker<F> {
    fn new(f: F) -> Self {
        Self { f, best: None, evaluations: 0, min_seen: f64::INFINITY, max_seen: f64::NEG_INFINITY, error: None, depleted: None }
    }

    fn eval(&mut self, x: &[f64]) -> f64 {
        if self.error.is_some() {
            return f64::INFINITY;
        }
        self.evaluations += 1;
        match (self.f)(x) {
            Ok(v) if v.is_finite() => {
                self.min_seen = self.min_seen.min(v);
                self.max_seen = self.max_seen.max(v);
                if self.best.as_ref().is_none_or(|(_, b)| v < *b) {
                    self.best = Some((x.to_vec(), v));
                }
                v
            }
            Ok(_) => f64::INFINITY,
            Err(e @ Error::SectorDepleted { .. }) => {
                self.depleted = Some(e);
                f64::INFINITY
            }
            Err(e) => {
                self.error = Some(e);
                f64::INFINITY
            }
        }
    }

    fn finish(self, dim: usize) -> Result<OptOutcome> {
        if let Some(e) = self.error {
            return Err(e);
        }
        let Some((x, value)) = self.best else {
            if let Some(e) = self.depleted {
                return Err(e);
            }
            return Err(Error::Diverged { evaluations: self.evaluations });
        };
        if dim > 0 && self.evaluations > 1 && self.max_seen == self.min_seen {
            return Err(Error::NoImprovement { value, evaluations: self.evaluations });
        }
        Ok(OptOutcome {
            x: x.iter().map(|v| v.rem_euclid(TAU)).collect(),
            value,
            evaluations: self.evaluations,
            min_seen: self.min_seen,
            max_seen: self.max_seen,
        })
    }
}

struct Objective<'a, F> {
    tracker: &'a RefCell<Tracker<F>>,
}

impl<F: FnMut(&[f64]) -> Result<f64>> CostFunction for Objective<'_, F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Ok(self.tracker.borrow_mut().eval(p))
    }
}

fn simplex_run<F: FnMut(&[f64]) -> Result<f64>>(
    tracker: &RefCell<Tracker<F>>,
    start: &[f64],
    step: f64,
    tol: f64,
    max_iter: u64,
) {
    let mut vertices = vec![start.to_vec()];
    for i in 0..start.len() {
        let mut v = start.to_vec();
        v[i] += step;
        vertices.push(v);
    }
    let solver = NelderMead::new(vertices).with_sd_tolerance(tol).expect("non-negative tolerance");
    // evaluation errors are captured by the tracker, so the run itself cannot fail
    let _ = Executor::new(Objective { tracker }, solver)
        .configure(|s| s.max_iters(max_iter))
        .run();
}

/// Minimizes `f` over `dim` periodic angles. `f` errors abort the search.
pub fn minimize<F>(f: F, dim: usize, spec: &OptimizerSpec, seed: u64) -> Result<OptOutcome>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    spec.validate(dim)?;
    let tracker = RefCell::new(Tracker::new(f));
    if dim == 0 {
        tracker.borrow_mut().eval(&[]);
        return tracker.into_inner().finish(0);
    }
    match *spec {
        OptimizerSpec::GridScan { resolution, refine } => {
            let total = resolution.pow(dim as u32);
            let mut x = vec![0.0; dim];
            for idx in 0..total {
                let mut r = idx;
                for slot in x.iter_mut().rev() {
                    *slot = TAU * (r % resolution) as f64 / resolution as f64;
                    r /= resolution;
                }
                tracker.borrow_mut().eval(&x);
                if tracker.borrow().error.is_some() {
                    break;
                }
            }
            let best = tracker.borrow().best.clone();
            if let (true, Some((x0, _))) = (refine, best) {
                simplex_run(&tracker, &x0, TAU / resolution as f64, 0.0, 400 * dim as u64);
            }
        }
        OptimizerSpec::SimplexDescent { max_iter, tol, restarts } => {
            let mut rng = stream(seed, &[]);
            let start: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * TAU).collect();
            simplex_run(&tracker, &start, 0.5, tol, max_iter);
            for _ in 0..restarts {
                let before = tracker.borrow().best.as_ref().map(|b| b.1);
                let Some((x0, _)) = tracker.borrow().best.clone() else { break };
                simplex_run(&tracker, &x0, 0.25, tol, max_iter);
                let after = tracker.borrow().best.as_ref().map(|b| b.1);
                if matches!((before, after), (Some(b), Some(a)) if b - a <= tol) {
                    break;
                }
            }
        }
    }
    tracker.into_inner().finish(dim)
}
