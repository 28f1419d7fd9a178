//! Contraction solvers for the local Riemann–Hilbert problem, the global Beltrami problem
//! and the Leray-Lions pipeline.

mod global;
mod leray;
mod rh;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::ComplexGrid;

pub use global::{solve_beltrami_global, Normalization, WINDOW_CUTOFF_CENTER, WINDOW_CUTOFF_WIDTH};
pub use leray::{solve_leray_lions, weak_residual, LerayLionsSolution, WeakResidual, WEAK_BUMPS, WEAK_SEED};
pub use rh::{solve_riemann_hilbert, solve_riemann_hilbert_closed, RhOptions};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 500 }
    }
}

/// Outcome of a fixed-point solve. Grids are not serialized; see the snapshot writers.
#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub method: String,
    pub normalization: String,
    pub k: f64,
    pub tol: f64,
    pub iterations: usize,
    pub converged: bool,
    /// L² norm of ψ − 𝓑ψ at the returned iterate.
    pub residual_l2: f64,
    /// L² norms of successive updates.
    pub update_norms: Vec<f64>,
    pub contraction_ratios: Vec<f64>,
    pub diagnostics: BTreeMap<String, f64>,
    #[serde(skip)]
    pub solution: ComplexGrid,
    #[serde(skip)]
    pub solution_dz: Option<ComplexGrid>,
    #[serde(skip)]
    pub solution_dzbar: Option<ComplexGrid>,
}

impl SolveReport {
    /// Largest contraction ratio after the first two steps, ignoring updates at round-off level.
    pub fn tail_ratio(&self) -> f64 {
        let first = self.update_norms.first().copied().unwrap_or(0.0);
        self.contraction_ratios
            .iter()
            .enumerate()
            .skip(2)
            .filter(|(i, _)| self.update_norms[i + 1] > 1e-11 * first)
            .map(|(_, r)| *r)
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub(crate) struct Trace {
    pub state: Vec<Complex64>,
    pub updates: Vec<f64>,
    pub ratios: Vec<f64>,
}

/// Iterates x ← step(x) from `x` until the update norm drops below tol·(1−k)/k.
pub(crate) fn fixed_point<F, W>(mut x: Vec<Complex64>, step: F, norm: W, k: f64, opts: &SolverOptions) -> Result<Trace>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
    W: Fn(&[Complex64]) -> f64,
{
    if !(0.0..1.0).contains(&k) {
        return Err(Error::NotContracting(k));
    }
    let threshold = if k > 0.0 { opts.tol * (1.0 - k) / k } else { f64::INFINITY };
    let mut updates: Vec<f64> = Vec::new();
    let mut ratios = Vec::new();
    for _ in 0..opts.max_iter {
        let next = step(&x);
        if next.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("solver iterate".into()));
        }
        let diff: Vec<Complex64> = next.iter().zip(&x).map(|(a, b)| a - b).collect();
        let d = norm(&diff);
        if let Some(&prev) = updates.last() {
            if prev > 0.0 {
                ratios.push(d / prev);
            }
        }
        updates.push(d);
        x = next;
        if d < threshold || d == 0.0 {
            return Ok(Trace { state: x, updates, ratios });
        }
        let n = ratios.len();
        if n >= 3 && ratios[n - 3..].iter().all(|&r| r >= 1.0) && d > 1e-3 * updates[0] {
            return Err(Error::NotContracting(ratios[n - 1]));
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual: updates.last().copied().unwrap_or(f64::NAN),
    })
}
