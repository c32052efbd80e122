//! Derivative-free minimization: Nelder-Mead simplex with seeded restarts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    /// Iteration cap for each simplex run.
    pub max_iterations: usize,
    /// Absolute spread of function values across the simplex at which a run
    /// counts as converged.
    pub tolerance: f64,
    /// Number of perturbed re-initializations after the first run.
    pub restarts: usize,
    pub seed: u64,
}

impl OptimizerConfig {
    /// Defaults for a problem of the given dimension: tolerance `1e-9`,
    /// `400 * dim` iterations per run, 8 restarts, seed 0.
    pub fn for_dimension(dim: usize) -> Self {
        Self {
            max_iterations: 400 * dim.max(1),
            tolerance: 1e-9,
            restarts: 8,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::domain("max_iterations must be at least 1"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::domain(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub argmin: Vec<f64>,
    pub value: f64,
    /// At least one simplex run met the tolerance.
    pub converged: bool,
    /// Restarts actually executed.
    pub restarts_used: usize,
    pub evaluations: usize,
}

struct Run {
    x: Vec<f64>,
    fx: f64,
    converged: bool,
}

fn eval<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], count: &mut usize) -> f64 {
    *count += 1;
    let v = f(x);
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: &F,
    start: &[f64],
    f_start: f64,
    step: &[f64],
    config: &OptimizerConfig,
    count: &mut usize,
) -> Run {
    let n = start.len();
    // Standard coefficients: reflection 1, expansion 2, contraction 1/2,
    // shrink 1/2.
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), f_start));
    for i in 0..n {
        let mut x = start.to_vec();
        x[i] += step[i];
        let fx = eval(f, &x, count);
        simplex.push((x, fx));
    }

    let mut converged = false;
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    for _ in 0..config.max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        if worst.is_finite() && (worst - best).abs() <= config.tolerance {
            converged = true;
            break;
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let along = |coef: f64, out: &mut [f64], worst: &[f64]| {
            for i in 0..n {
                out[i] = centroid[i] + coef * (worst[i] - centroid[i]);
            }
        };

        let worst_x = simplex[n].0.clone();
        along(-alpha, &mut trial, &worst_x);
        let f_reflect = eval(f, &trial, count);
        let reflected = trial.clone();

        if f_reflect < simplex[0].1 {
            along(-gamma, &mut trial, &worst_x);
            let f_expand = eval(f, &trial, count);
            simplex[n] = if f_expand < f_reflect {
                (trial.clone(), f_expand)
            } else {
                (reflected, f_reflect)
            };
            continue;
        }
        if f_reflect < simplex[n - 1].1 {
            simplex[n] = (reflected, f_reflect);
            continue;
        }
        // Contraction, outside if the reflection beat the worst point.
        let (coef, bar) = if f_reflect < simplex[n].1 {
            (-rho, f_reflect)
        } else {
            (rho, simplex[n].1)
        };
        along(coef, &mut trial, &worst_x);
        let f_contract = eval(f, &trial, count);
        if f_contract < bar {
            simplex[n] = (trial.clone(), f_contract);
            continue;
        }
        let best_x = simplex[0].0.clone();
        for (x, fx) in simplex.iter_mut().skip(1) {
            for i in 0..n {
                x[i] = best_x[i] + sigma * (x[i] - best_x[i]);
            }
            *fx = eval(f, x, count);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fx) = simplex.swap_remove(0);
    Run { x, fx, converged }
}

fn initial_steps(x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| (0.1 * v.abs()).max(0.5)).collect()
}

/// Minimize `f` starting from `start`.
///
/// Runs one Nelder-Mead simplex from `start`, then `config.restarts`
/// further runs, each from the best point so far plus a Gaussian
/// perturbation drawn from a generator seeded with `config.seed`. The best
/// point over all runs is returned. Non-finite values of `f` away from the
/// start are treated as `+∞`.
pub fn minimize<F: Fn(&[f64]) -> f64>(
    f: F,
    start: &[f64],
    config: &OptimizerConfig,
) -> Result<Minimum> {
    config.validate()?;
    if start.is_empty() {
        return Err(Error::domain("minimize requires dimension >= 1"));
    }
    let mut count = 0;
    let f0 = f(start);
    count += 1;
    if !f0.is_finite() {
        return Err(Error::domain(format!("objective is not finite at the start point ({f0})")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let first = nelder_mead(&f, start, f0, &initial_steps(start), config, &mut count);
    let mut best = first.x;
    let mut best_f = first.fx;
    let mut any_converged = first.converged;

    for r in 0..config.restarts {
        // Perturbation shrinks over the restarts: wide exploration first,
        // then polishing around the incumbent.
        let scale = 0.5 / (1.0 + r as f64);
        let mut x: Vec<f64> = best
            .iter()
            .map(|&b| {
                let z: f64 = StandardNormal.sample(&mut rng);
                b + scale * b.abs().max(1.0) * z
            })
            .collect();
        let mut fx = eval(&f, &x, &mut count);
        if !fx.is_finite() {
            x.clone_from(&best);
            fx = best_f;
        }
        let steps: Vec<f64> = initial_steps(&x).iter().map(|s| s * scale.max(0.1)).collect();
        let run = nelder_mead(&f, &x, fx, &steps, config, &mut count);
        any_converged |= run.converged;
        if run.fx < best_f {
            best = run.x;
            best_f = run.fx;
        }
    }

    Ok(Minimum {
        argmin: best,
        value: best_f,
        converged: any_converged,
        restarts_used: config.restarts,
        evaluations: count,
    })
}
