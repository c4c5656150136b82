//! Exact-jump simulation of the truncated chains.

use super::{BlockGenerator, ChainPath, ChainState};
use crate::error::Result;
use crate::rng::stream_rng;
use rand::Rng;
use rayon::prelude::*;

/// Exact continuous-time path of the truncated generator: exponential
/// holding times with rate `-diagonal`, next state proportional to the
/// off-diagonal row entries. Deterministic given `seed`.
///
/// States with no outgoing rate are absorbing: the path stays there and the
/// simulation stops. Paths that enter the last truncated level are flagged
/// (`truncation_hit`), since their upward mass leaks out of the truncation.
pub fn gillespie_simulate(
    generator: &BlockGenerator,
    start: ChainState,
    t_max: f64,
    seed: u64,
) -> Result<ChainPath> {
    let mut idx = start.checked_flat_index(generator)?;
    let phases = generator.phases();
    let dim = generator.dim();
    let mut rng = stream_rng(seed, 0);

    let mut path = ChainPath {
        jump_times: Vec::new(),
        states: vec![start],
        seed,
        truncation_hit: start.level as usize + 1 == generator.levels(),
    };

    let mut t = 0.0;
    loop {
        // candidate transitions out of the current state
        let mut total = 0.0;
        let mut cumulative: Vec<(usize, f64)> = Vec::new();
        let level = idx / phases;
        let lo = level.saturating_sub(1) * phases;
        let hi = ((level + 2) * phases).min(dim);
        for to in lo..hi {
            if to == idx {
                continue;
            }
            let r = generator.rate(idx, to);
            if r > 0.0 {
                total += r;
                cumulative.push((to, total));
            }
        }
        if total <= 0.0 {
            break; // absorbing
        }
        let u: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
        let hold = -u.ln() / total;
        t += hold;
        if t >= t_max {
            break;
        }
        let pick = rng.gen::<f64>() * total;
        let to = cumulative
            .iter()
            .find(|&&(_, c)| pick < c)
            .map(|&(to, _)| to)
            .unwrap_or(cumulative.last().unwrap().0);

        idx = to;
        let state = ChainState::new((to / phases) as u32, (to % phases) as u32 + 1);
        path.jump_times.push(t);
        path.states.push(state);
        if state.level as usize + 1 == generator.levels() {
            path.truncation_hit = true;
        }
    }
    Ok(path)
}

/// Empirical distribution over flat state indices at time `t`, from
/// `n_paths` independent paths started at `start`. Returns occupation
/// frequencies; entries of paths that hit the truncation are still counted
/// (the caller controls the truncation margin).
pub fn empirical_level_distribution(
    generator: &BlockGenerator,
    start: ChainState,
    t: f64,
    n_paths: usize,
    base_seed: u64,
) -> Result<Vec<f64>> {
    let counts: Vec<usize> = (0..n_paths as u64)
        .into_par_iter()
        .map(|k| {
            let path = gillespie_simulate(generator, start, t, base_seed ^ k)
                .expect("start state validated by caller");
            path.state_at(t).flat_index(generator.phases())
        })
        .collect();
    let mut freq = vec![0.0; generator.dim()];
    for c in counts {
        freq[c] += 1.0 / n_paths as f64;
    }
    Ok(freq)
}

/// Number of paths (out of `n_paths`) that return to their start state
/// after having left it, within `t_max`.
pub fn returns_to_start(
    generator: &BlockGenerator,
    start: ChainState,
    t_max: f64,
    n_paths: usize,
    base_seed: u64,
) -> Result<usize> {
    let hits: Vec<bool> = (0..n_paths as u64)
        .into_par_iter()
        .map(|k| {
            let path = gillespie_simulate(generator, start, t_max, base_seed ^ k)
                .expect("start state validated by caller");
            path.states[1..].contains(&start)
        })
        .collect();
    Ok(hits.into_iter().filter(|&b| b).count())
}
