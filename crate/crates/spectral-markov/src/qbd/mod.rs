//! Continuous-time chains on levels x phases: the scalar birth-and-death
//! queue and the two-phase quasi-birth-and-death process, with explicit
//! generators, Karlin-McGregor transition formulas, potential coefficients,
//! invariant measure, recurrence classification and exact-jump simulation.

mod coeffs;
mod gillespie;
mod polynomials;
mod transition;

pub use coeffs::{bd_rates, build_generator, classify, qbd_coefficients, ChainClass, ChainModel};
pub use gillespie::{empirical_level_distribution, gillespie_simulate, returns_to_start};
pub use polynomials::{
    bd_polynomials, bd_potential_coefficients, invariant_measure, matrix_weight_w1,
    qbd_polynomials, qbd_potential_coefficients, scalar_weight_w2,
};
pub use transition::{km_transition_bd, km_transition_qbd2};

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use serde::Serialize;

/// One level of a block-tridiagonal generator: up (`a`), local (`b`) and
/// down (`c`) blocks. `c` is absent at level 0.
#[derive(Debug, Clone)]
pub struct LevelBlocks {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: Option<DMatrix<f64>>,
}

/// Finite truncation of a level-dependent block-tridiagonal conservative
/// rate matrix. Interior rows sum to zero; the last truncated level leaks
/// the mass of its missing up-block.
#[derive(Debug, Clone)]
pub struct BlockGenerator {
    levels: usize,
    phases: usize,
    blocks: Vec<LevelBlocks>,
}

impl BlockGenerator {
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn phases(&self) -> usize {
        self.phases
    }

    pub fn blocks(&self) -> &[LevelBlocks] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.levels * self.phases
    }

    /// Dense matrix of the truncation (for the matrix-exponential oracle).
    pub fn dense(&self) -> DMatrix<f64> {
        let p = self.phases;
        let mut g = DMatrix::zeros(self.dim(), self.dim());
        for (n, blk) in self.blocks.iter().enumerate() {
            let r = n * p;
            g.view_mut((r, r), (p, p)).copy_from(&blk.b);
            if n + 1 < self.levels {
                g.view_mut((r, r + p), (p, p)).copy_from(&blk.a);
            }
            if let Some(c) = &blk.c {
                g.view_mut((r, r - p), (p, p)).copy_from(c);
            }
        }
        g
    }

    /// Rate of the transition `from -> to` in flat state indices
    /// (`level * phases + phase`).
    pub fn rate(&self, from: usize, to: usize) -> f64 {
        let p = self.phases;
        let (ln, lp) = (from / p, from % p);
        let (mn, mp) = (to / p, to % p);
        let blk = &self.blocks[ln];
        if mn == ln {
            blk.b[(lp, mp)]
        } else if mn == ln + 1 && mn < self.levels {
            blk.a[(lp, mp)]
        } else if mn + 1 == ln {
            blk.c.as_ref().map_or(0.0, |c| c[(lp, mp)])
        } else {
            0.0
        }
    }

    /// Maximum absolute interior row sum (the conservativeness defect).
    pub fn interior_row_sum_defect(&self) -> f64 {
        let g = self.dense();
        let interior = self.dim() - self.phases;
        (0..interior)
            .map(|i| g.row(i).iter().sum::<f64>().abs())
            .fold(0.0, f64::max)
    }

    pub(crate) fn new(levels: usize, phases: usize, blocks: Vec<LevelBlocks>) -> Self {
        BlockGenerator {
            levels,
            phases,
            blocks,
        }
    }
}

/// A state of the bivariate chain. Phases are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChainState {
    pub level: u32,
    pub phase: u32,
}

impl ChainState {
    pub fn new(level: u32, phase: u32) -> Self {
        ChainState { level, phase }
    }

    pub fn flat_index(&self, phases: usize) -> usize {
        self.level as usize * phases + (self.phase as usize - 1)
    }

    pub fn checked_flat_index(&self, gen: &BlockGenerator) -> Result<usize> {
        if self.phase == 0
            || self.phase as usize > gen.phases()
            || self.level as usize >= gen.levels()
        {
            return Err(Error::StateOutsideTruncation {
                level: self.level,
                phase: self.phase,
                levels: gen.levels(),
                phases: gen.phases(),
            });
        }
        Ok(self.flat_index(gen.phases()))
    }
}

/// An exact-jump trajectory. `jump_times[k]` is when the chain entered
/// `states[k+1]`; `truncation_hit` marks paths that touched the last
/// truncated level (statistics from those are censored).
#[derive(Debug, Clone)]
pub struct ChainPath {
    pub jump_times: Vec<f64>,
    pub states: Vec<ChainState>,
    pub seed: u64,
    pub truncation_hit: bool,
}

impl ChainPath {
    /// State occupied at time `t` (the path is right-continuous).
    pub fn state_at(&self, t: f64) -> ChainState {
        match self.jump_times.iter().position(|&s| s > t) {
            Some(k) => self.states[k],
            None => *self.states.last().unwrap(),
        }
    }
}
