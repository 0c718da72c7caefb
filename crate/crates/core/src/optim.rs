//! Local search over complex Stiefel manifolds `{X : X†X = I}`.
//!
//! Riemannian conjugate gradient (Polak–Ribière+) with Armijo backtracking and
//! the polar retraction. Tangent vectors are moved between points by
//! projection. Every accepted step strictly improves the objective, so the
//! returned value is never worse than the starting value.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::qstate::linalg::{c, polar, real_inner, CMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Minimize,
    Maximize,
}

impl Mode {
    fn sign(self) -> f64 {
        match self {
            Mode::Minimize => 1.0,
            Mode::Maximize => -1.0,
        }
    }

    /// Whether `a` is strictly better than `b` in this direction.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Mode::Minimize => a < b,
            Mode::Maximize => a > b,
        }
    }
}

/// Smooth real function of a complex matrix with orthonormal columns.
///
/// Gradients use the real representation: entry `∂f/∂Re X + i ∂f/∂Im X`.
pub trait StiefelObjective: Sync {
    fn value(&self, x: &CMatrix) -> f64;
    fn value_and_gradient(&self, x: &CMatrix) -> (f64, CMatrix);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchSettings {
    pub max_iterations: usize,
    /// Stop once the objective improved by less than this over `window` iterations.
    pub tolerance: f64,
    pub window: usize,
}

#[derive(Debug, Clone)]
pub struct LocalResult {
    pub point: CMatrix,
    pub value: f64,
    pub start_value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Tangent projection `G − X sym(X†G)`.
fn project(x: &CMatrix, g: &CMatrix) -> CMatrix {
    let xg = x.adjoint() * g;
    let sym = (&xg + xg.adjoint()) * c(0.5, 0.0);
    g - x * sym
}

/// Local search from `start` (re-orthonormalized first).
pub fn local_search<O: StiefelObjective + ?Sized>(
    objective: &O,
    start: &CMatrix,
    mode: Mode,
    settings: &SearchSettings,
) -> LocalResult {
    const ARMIJO: f64 = 1e-4;
    const MAX_BACKTRACK: usize = 60;

    let sign = mode.sign();
    let mut x = polar(start).unwrap_or_else(|| start.clone());
    let (f0, g0) = objective.value_and_gradient(&x);
    let start_value = f0;
    let mut h = sign * f0;
    let mut grad = project(&x, &(g0 * c(sign, 0.0)));
    let mut dir = -&grad;
    let mut step = 1.0 / grad.norm().max(1.0);
    let mut history = vec![h];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < settings.max_iterations {
        let gnorm2 = real_inner(&grad, &grad);
        if gnorm2.sqrt() < 1e-13 {
            converged = true;
            break;
        }
        let mut slope = real_inner(&grad, &dir);
        if slope >= 0.0 {
            dir = -&grad;
            slope = -gnorm2;
        }

        let mut t = step;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACK {
            if let Some(xn) = polar(&(&x + &dir * c(t, 0.0))) {
                let hn = sign * objective.value(&xn);
                if hn <= h + ARMIJO * t * slope && hn < h {
                    accepted = Some((xn, hn));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((xn, _)) = accepted else {
            // No descent is numerically available from here.
            converged = true;
            break;
        };

        let (fn_, gn) = objective.value_and_gradient(&xn);
        let hn = sign * fn_;
        let grad_n = project(&xn, &(gn * c(sign, 0.0)));
        let grad_t = project(&xn, &grad);
        let dir_t = project(&xn, &dir);
        let beta = (real_inner(&grad_n, &(&grad_n - &grad_t)) / gnorm2).max(0.0);
        dir = -&grad_n + dir_t * c(beta, 0.0);

        step = (2.0 * t).min(1e3);
        x = xn;
        h = hn;
        grad = grad_n;
        iterations += 1;
        history.push(h);

        let w = settings.window.max(1);
        if history.len() > w && history[history.len() - 1 - w] - h < settings.tolerance {
            converged = true;
            break;
        }
    }

    LocalResult { point: x, value: sign * h, start_value, iterations, converged }
}

/// Runs `local_search` from each start, in parallel; results keep input order.
pub fn multi_start<O: StiefelObjective + ?Sized>(
    objective: &O,
    starts: &[CMatrix],
    mode: Mode,
    settings: &SearchSettings,
) -> Vec<LocalResult> {
    starts.par_iter().map(|s| local_search(objective, s, mode, settings)).collect()
}

/// Index of the extremal value; ties go to the lowest index.
pub fn best_index(values: &[f64], mode: Mode) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            None => best = Some(i),
            Some(b) if mode.better(v, values[b]) => best = Some(i),
            _ => {}
        }
    }
    best
}
