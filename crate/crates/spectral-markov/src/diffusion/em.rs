//! Euler-Maruyama simulation of the switching diffusions.
//!
//! The generator `y(1-y) d^2 + b d` corresponds to the SDE increment
//! `dx = b dt + sqrt(2 y(1-y)) dW`. Killing accumulates the hazard
//! `H += k(x) dt` against a pre-drawn unit exponential (accurate even where
//! the rate is stiff near the boundary); phase switches are per-step
//! Bernoulli with probability `rate * dt`, clipped at one. Positions are
//! clamped to `[eps, 1-eps]`; what happens next is up to the drift.

use super::model::SwitchingDiffusionModel;
use super::DiffusionPath;
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

const CLAMP: f64 = 1e-9;

struct EmState {
    t: f64,
    x: f64,
    phase: usize, // 0-based
    alive: bool,
}

/// One path with every step recorded. Deterministic given `seed`.
///
/// Errors when a step's total switch probability exceeds 0.5: the requested
/// `dt` cannot resolve the switching at the positions the path visits.
pub fn em_simulate(
    model: &SwitchingDiffusionModel,
    x0: f64,
    phase0: u32,
    dt: f64,
    t_max: f64,
    seed: u64,
) -> Result<DiffusionPath> {
    let steps = (t_max / dt).ceil() as usize;
    let mut path = DiffusionPath {
        times: Vec::with_capacity(steps + 1),
        positions: Vec::with_capacity(steps + 1),
        phases: Vec::with_capacity(steps + 1),
        killed_at: None,
        seed,
        dt,
    };
    run_em(model, x0, phase0, dt, t_max, seed, 0, |s: &EmState| {
        path.times.push(s.t);
        path.positions.push(s.x);
        path.phases.push(s.phase as u32 + 1);
        if !s.alive {
            path.killed_at = Some(s.t);
        }
    })?;
    Ok(path)
}

fn run_em<F: FnMut(&EmState)>(
    model: &SwitchingDiffusionModel,
    x0: f64,
    phase0: u32,
    dt: f64,
    t_max: f64,
    seed: u64,
    stream: u64,
    mut observe: F,
) -> Result<()> {
    assert!(x0 > 0.0 && x0 < 1.0, "x0 must be interior");
    assert!(dt > 0.0 && t_max > 0.0);
    let phases = model.phases();
    assert!(
        phase0 >= 1 && phase0 as usize <= phases,
        "phase {phase0} out of range"
    );
    let mut rng = stream_rng(seed, stream);
    let mut s = EmState {
        t: 0.0,
        x: x0,
        phase: phase0 as usize - 1,
        alive: true,
    };
    let mut hazard = 0.0f64;
    let kill_budget = -(rng.gen::<f64>().max(f64::MIN_POSITIVE)).ln();
    observe(&s);

    let sqrt_dt = dt.sqrt();
    while s.t < t_max && s.alive {
        let x_old = s.x;
        // diffuse
        let z: f64 = StandardNormal.sample(&mut rng);
        let b = model.drift(s.phase + 1, x_old);
        let sigma = (2.0 * model.diffusion_sq(x_old)).sqrt();
        s.x = (x_old + b * dt + sigma * sqrt_dt * z).clamp(CLAMP, 1.0 - CLAMP);
        s.t += dt;

        // killing via accumulated hazard
        let k = model.kill_rate(s.phase + 1, x_old);
        if k > 0.0 {
            hazard += k * dt;
            if hazard >= kill_budget {
                s.alive = false;
                observe(&s);
                return Ok(());
            }
        }

        // phase switch
        if phases > 1 {
            let mut rates = [0.0f64; 3];
            let total = model.switch_rates(s.phase + 1, x_old, &mut rates);
            let p = total * dt;
            if p > 0.5 {
                return Err(Error::DtTooLarge { dt, p, y: x_old });
            }
            let u: f64 = rng.gen();
            if u < p.min(1.0) {
                let mut pick = u / dt; // uniform over [0, total)
                for (j, &r) in rates.iter().enumerate().take(phases) {
                    if pick < r {
                        s.phase = j;
                        break;
                    }
                    pick -= r;
                }
            }
        }
        observe(&s);
    }
    Ok(())
}

/// Fraction of paths still alive at each of the (sorted) `targets`.
pub fn survival_fraction(
    model: &SwitchingDiffusionModel,
    x0: f64,
    phase0: u32,
    dt: f64,
    targets: &[f64],
    n_paths: usize,
    base_seed: u64,
) -> Result<Vec<f64>> {
    let t_max = targets.iter().copied().fold(0.0, f64::max);
    let counts: Vec<Vec<bool>> = (0..n_paths as u64)
        .into_par_iter()
        .map(|k| {
            let mut killed_time = f64::INFINITY;
            run_em(model, x0, phase0, dt, t_max, base_seed, k, |s| {
                if !s.alive {
                    killed_time = s.t;
                }
            })?;
            Ok(targets.iter().map(|&target| killed_time > target).collect())
        })
        .collect::<Result<_>>()?;
    let mut frac = vec![0.0; targets.len()];
    for row in counts {
        for (i, alive) in row.into_iter().enumerate() {
            if alive {
                frac[i] += 1.0 / n_paths as f64;
            }
        }
    }
    Ok(frac)
}

/// Number of paths (out of `n_paths`, started at `x0` in phase 2) that
/// cross the midpoint while in phase 2 before `t_max`.
pub fn phase2_crossings(
    model: &SwitchingDiffusionModel,
    x0: f64,
    dt: f64,
    t_max: f64,
    n_paths: usize,
    base_seed: u64,
) -> Result<usize> {
    let crossings: Vec<usize> = (0..n_paths as u64)
        .into_par_iter()
        .map(|k| {
            let mut count = 0usize;
            let mut prev: Option<(f64, usize)> = None;
            run_em(model, x0, 2, dt, t_max, base_seed, k, |s| {
                if let Some((x_prev, phase_prev)) = prev {
                    if phase_prev == 1 && (x_prev - 0.5) * (s.x - 0.5) < 0.0 {
                        count += 1;
                    }
                }
                prev = Some((s.x, s.phase));
            })?;
            Ok(count)
        })
        .collect::<Result<_>>()?;
    Ok(crossings.into_iter().filter(|&c| c > 0).count())
}

/// Time fraction spent in each phase over a single long run.
pub fn occupation_fractions(
    model: &SwitchingDiffusionModel,
    x0: f64,
    phase0: u32,
    dt: f64,
    t_max: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    let mut counts = vec![0u64; model.phases()];
    let mut total = 0u64;
    run_em(model, x0, phase0, dt, t_max, seed, 0, |s| {
        counts[s.phase] += 1;
        total += 1;
    })?;
    Ok(counts
        .into_iter()
        .map(|c| c as f64 / total as f64)
        .collect())
}

/// Aggregate statistics of a batch of recorded paths.
#[derive(Debug, Clone, Serialize)]
pub struct EmSummary {
    pub n_paths: usize,
    pub killed_fraction: f64,
    pub boundary_hits: usize,
    pub occupation_fractions: Vec<f64>,
    pub crossed_half_in_phase2: usize,
}

impl EmSummary {
    pub fn from_paths(paths: &[DiffusionPath], phases: usize) -> Self {
        let mut killed = 0usize;
        let mut boundary_hits = 0usize;
        let mut occupation = vec![0u64; phases];
        let mut crossed = 0usize;
        let mut total_steps = 0u64;
        for p in paths {
            if p.killed_at.is_some() {
                killed += 1;
            }
            if p
                .positions
                .iter()
                .any(|&x| x <= 2.0 * CLAMP || x >= 1.0 - 2.0 * CLAMP)
            {
                boundary_hits += 1;
            }
            let mut crossed_this = false;
            for i in 1..p.positions.len() {
                occupation[p.phases[i] as usize - 1] += 1;
                total_steps += 1;
                if p.phases[i - 1] == 2
                    && (p.positions[i - 1] - 0.5) * (p.positions[i] - 0.5) < 0.0
                {
                    crossed_this = true;
                }
            }
            if crossed_this {
                crossed += 1;
            }
        }
        EmSummary {
            n_paths: paths.len(),
            killed_fraction: killed as f64 / paths.len().max(1) as f64,
            boundary_hits,
            occupation_fractions: occupation
                .into_iter()
                .map(|c| c as f64 / total_steps.max(1) as f64)
                .collect(),
            crossed_half_in_phase2: crossed,
        }
    }
}
