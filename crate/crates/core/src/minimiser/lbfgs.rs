//! Limited-memory BFGS on the free Hermite degrees of freedom, preconditioned
//! by the H2 Gram matrix.

use std::collections::VecDeque;

use super::metric::{dot, H2Metric};
use crate::energetics::{helfrich_gradient, helfrich_value};
use crate::profile_geometry::ProfileCurve;

#[derive(Debug, Clone)]
pub(crate) struct DescentParams {
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub shrink: f64,
    pub sufficient_decrease: f64,
    pub positivity_floor: f64,
    pub memory: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Descent {
    pub curve: ProfileCurve,
    pub energy: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub history: Vec<f64>,
    pub converged: bool,
}

struct Pair {
    s: Vec<f64>,
    y: Vec<f64>,
    rho: f64,
}

fn direction(g: &[f64], memory: &VecDeque<Pair>, metric: &H2Metric) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(memory.len());
    for pair in memory.iter().rev() {
        let a = pair.rho * dot(&pair.s, &q);
        for (qi, yi) in q.iter_mut().zip(&pair.y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    let mut r = metric.apply_inverse(&q);
    if let Some(last) = memory.back() {
        let py = metric.apply_inverse(&last.y);
        let gamma = dot(&last.s, &last.y) / dot(&last.y, &py);
        r.iter_mut().for_each(|v| *v *= gamma);
    }
    for (pair, a) in memory.iter().zip(alphas.iter().rev()) {
        let b = pair.rho * dot(&pair.y, &r);
        for (ri, si) in r.iter_mut().zip(&pair.s) {
            *ri += (a - b) * si;
        }
    }
    r.iter_mut().for_each(|v| *v = -*v);
    r
}

fn feasible(curve: &ProfileCurve, floor: f64) -> bool {
    curve.values().iter().all(|&v| v > floor)
}

/// Runs the descent from `start`. The gradient is measured in the dual H2
/// norm relative to `max(1, energy)`, so one tolerance serves every weight.
/// Every accepted step satisfies the Armijo condition, or, once energy
/// differences sink below round-off, leaves the energy no larger while
/// shrinking the gradient.
pub(crate) fn descend(
    start: &ProfileCurve,
    epsilon: f64,
    metric: &H2Metric,
    params: &DescentParams,
) -> Descent {
    let mut curve = start.clone();
    let mut theta = curve.free_dofs();
    let mut f = helfrich_value(&curve, epsilon);
    let mut g = helfrich_gradient(&curve, epsilon);
    let mut gnorm = metric.dual_norm(&g) / f.abs().max(1.0);
    let mut history = vec![f];
    let mut memory: VecDeque<Pair> = VecDeque::with_capacity(params.memory);
    let mut iterations = 0;
    let mut converged = gnorm <= params.gradient_tolerance;
    let alpha = curve.alpha();

    while !converged && iterations < params.max_iterations {
        let mut d = direction(&g, &memory, metric);
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            memory.clear();
            d = direction(&g, &memory, metric);
            slope = dot(&g, &d);
        }
        let mut t = 1.0;
        if memory.is_empty() {
            // first or restarted step: cap the largest nodal change
            let big = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if big > 0.1 * alpha {
                t = 0.1 * alpha / big;
            }
        }
        let noise = 1e-12 * (f.abs() + 1.0);
        let mut accepted = None;
        for _ in 0..80 {
            let trial: Vec<f64> = theta.iter().zip(&d).map(|(x, di)| x + t * di).collect();
            if let Ok(c) = curve.with_free_dofs(&trial) {
                if feasible(&c, params.positivity_floor) {
                    let f_new = helfrich_value(&c, epsilon);
                    if f_new.is_finite() {
                        if f_new <= f + params.sufficient_decrease * t * slope {
                            accepted = Some((trial, c, f_new, None));
                            break;
                        }
                        if f_new <= f && f - f_new <= noise {
                            let g_new = helfrich_gradient(&c, epsilon);
                            let n_new = metric.dual_norm(&g_new) / f_new.abs().max(1.0);
                            if n_new < gnorm {
                                accepted = Some((trial, c, f_new, Some((g_new, n_new))));
                                break;
                            }
                        }
                    }
                }
            }
            t *= params.shrink;
            if t < 1e-20 {
                break;
            }
        }
        let Some((trial, c, f_new, cached)) = accepted else {
            if memory.is_empty() {
                break;
            }
            memory.clear();
            continue;
        };
        let (g_new, n_new) = cached.unwrap_or_else(|| {
            let g_new = helfrich_gradient(&c, epsilon);
            let n = metric.dual_norm(&g_new) / f_new.abs().max(1.0);
            (g_new, n)
        });
        let s: Vec<f64> = trial.iter().zip(&theta).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
            if memory.len() == params.memory {
                memory.pop_front();
            }
            memory.push_back(Pair { rho: 1.0 / sy, s, y });
        }
        theta = trial;
        curve = c;
        f = f_new;
        g = g_new;
        gnorm = n_new;
        history.push(f);
        iterations += 1;
        converged = gnorm <= params.gradient_tolerance;
    }
    Descent { curve, energy: f, gradient_norm: gnorm, iterations, history, converged }
}
