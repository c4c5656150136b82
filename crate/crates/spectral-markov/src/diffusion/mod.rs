//! Switching diffusions on `[0,1]` with position-dependent phase switching
//! and killing: the killed Wright-Fisher-type diffusion, the two-phase
//! switching diffusion, and the two five-dimensional variants (three
//! phases, and two phases with killing).

mod boundary;
mod eigen;
mod em;
mod invariant;
mod model;
mod series;

pub use boundary::{boundary_classify, BoundaryClass, Side};
pub use eigen::{eigenfunction_generic, eigenfunction_q1, eigenfunction_q2, eigenvalue};
pub use em::{
    em_simulate, occupation_fractions, phase2_crossings, survival_fraction, EmSummary,
};
pub use invariant::{invariant_psi, invariant_psi_masses, phase_jump_probs, InvariantPsi};
pub use model::{build_model, ModelLabel, SwitchingDiffusionModel};
pub use series::{survival, SpectralSeries};

/// A discretized trajectory. Phases are 1-based; `killed_at`, when present,
/// is the time the path was stopped and coincides with the last recorded
/// time.
#[derive(Debug, Clone)]
pub struct DiffusionPath {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    pub phases: Vec<u32>,
    pub killed_at: Option<f64>,
    pub seed: u64,
    pub dt: f64,
}
