//! The four shipped switching-diffusion models and their construction-time
//! certification against the conjugated operator.

use crate::error::{Error, Result};
use crate::spherical::{split_transform, ConjugatedOperator, ModelParams};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Which diffusion model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelLabel {
    /// One phase with killing (killed Wright-Fisher-type diffusion).
    L1Killed,
    /// Two conservative phases with an interior barrier in phase 2.
    L1Switch2,
    /// Three conservative phases.
    L2Switch3,
    /// Two phases, killing in phase 1.
    L2KillSwitch2,
}

impl ModelLabel {
    pub fn phases(&self) -> usize {
        match self {
            ModelLabel::L1Killed => 1,
            ModelLabel::L1Switch2 | ModelLabel::L2KillSwitch2 => 2,
            ModelLabel::L2Switch3 => 3,
        }
    }

    /// Underlying family index and the block of the split operator this
    /// model occupies (offset, size).
    pub(crate) fn block(&self) -> (u32, usize, usize) {
        match self {
            ModelLabel::L1Switch2 => (1, 0, 2),
            ModelLabel::L1Killed => (1, 2, 1),
            ModelLabel::L2Switch3 => (2, 0, 3),
            ModelLabel::L2KillSwitch2 => (2, 3, 2),
        }
    }
}

/// A switching diffusion on `[0,1] x {1..phases}`: common diffusion
/// coefficient `y(1-y)`, per-phase drift, and a position-dependent
/// switch/kill matrix whose off-diagonal entries are switch rates and whose
/// row-sum deficit is the killing rate.
#[derive(Debug, Clone)]
pub struct SwitchingDiffusionModel {
    label: ModelLabel,
    nu: f64,
}

impl SwitchingDiffusionModel {
    pub fn label(&self) -> ModelLabel {
        self.label
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn phases(&self) -> usize {
        self.label.phases()
    }

    /// Squared diffusion coefficient `y(1-y)` (shared by all phases).
    pub fn diffusion_sq(&self, y: f64) -> f64 {
        y * (1.0 - y)
    }

    /// Drift of the given 1-based phase.
    pub fn drift(&self, phase: usize, y: f64) -> f64 {
        let nu = self.nu;
        let w = 1.0 - 2.0 * y;
        match (self.label, phase) {
            (ModelLabel::L1Killed, 1) => (nu + 0.5) * w,
            (ModelLabel::L1Switch2, 1) => (nu + 0.5) * w,
            (ModelLabel::L1Switch2, 2) => (nu + 1.5) * w - 1.0 / w,
            (ModelLabel::L2Switch3, 1) => (nu + 0.5) * w,
            (ModelLabel::L2Switch3, 2) => (nu + 1.5) * w - 1.0 / w,
            (ModelLabel::L2Switch3, 3) => {
                (nu + 2.5) * w - 6.0 * w / (3.0 - 8.0 * y + 8.0 * y * y)
            }
            (ModelLabel::L2KillSwitch2, 1) => (nu + 1.5) * w - 1.0 / w,
            (ModelLabel::L2KillSwitch2, 2) => (nu + 0.5) * w,
            _ => panic!("phase {phase} out of range for {:?}", self.label),
        }
    }

    /// The switch/kill matrix at `y`: off-diagonal entries are the phase
    /// switch rates, diagonal entries make row sums zero (conservative
    /// phases) or negative (killing).
    pub fn switch_kill(&self, y: f64) -> DMatrix<f64> {
        let nu = self.nu;
        let w2 = (1.0 - 2.0 * y).powi(2);
        let q = y * (1.0 - y);
        match self.label {
            ModelLabel::L1Killed => {
                DMatrix::from_element(1, 1, -nu * w2 / (2.0 * q))
            }
            ModelLabel::L1Switch2 => {
                let s = 1.0 / (2.0 * q);
                DMatrix::from_row_slice(
                    2,
                    2,
                    &[-nu * w2 * s, nu * w2 * s, (1.0 + nu) * s, -(1.0 + nu) * s],
                )
            }
            ModelLabel::L2Switch3 => {
                let s = 1.0 / q;
                let u = 3.0 - 8.0 * y + 8.0 * y * y;
                DMatrix::from_row_slice(
                    3,
                    3,
                    &[
                        -nu * w2 * s,
                        nu * w2 * s,
                        0.0,
                        (3.0 + nu) / 4.0 * s,
                        -((3.0 + nu) + (1.0 + nu) * u) / 4.0 * s,
                        (1.0 + nu) * u / 4.0 * s,
                        0.0,
                        9.0 * w2 / u * s,
                        -9.0 * w2 / u * s,
                    ],
                )
            }
            ModelLabel::L2KillSwitch2 => {
                let s = 1.0 / q;
                let u = 3.0 - 8.0 * y + 8.0 * y * y;
                DMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        (-(nu + 3.0) / 4.0 - (nu + 1.0) * u / 4.0) * s,
                        (nu + 3.0) / 4.0 * s,
                        nu * w2 * s,
                        -nu * w2 * s,
                    ],
                )
            }
        }
    }

    /// Killing rate of the given phase (the row-sum deficit), zero for
    /// conservative phases. Allocation-free; the simulator calls this every
    /// step.
    pub fn kill_rate(&self, phase: usize, y: f64) -> f64 {
        let nu = self.nu;
        match (self.label, phase) {
            (ModelLabel::L1Killed, 1) => {
                nu * (1.0 - 2.0 * y).powi(2) / (2.0 * y * (1.0 - y))
            }
            (ModelLabel::L2KillSwitch2, 1) => {
                (nu + 1.0) * (3.0 - 8.0 * y + 8.0 * y * y) / (4.0 * y * (1.0 - y))
            }
            _ => 0.0,
        }
    }

    /// Off-diagonal switch rates out of `phase` written into `out[0..phases]`
    /// (the own-phase slot is zero); returns their sum. Allocation-free.
    pub fn switch_rates(&self, phase: usize, y: f64, out: &mut [f64; 3]) -> f64 {
        *out = [0.0; 3];
        let nu = self.nu;
        let w2 = (1.0 - 2.0 * y).powi(2);
        let q = y * (1.0 - y);
        match (self.label, phase) {
            (ModelLabel::L1Killed, _) => 0.0,
            (ModelLabel::L1Switch2, 1) => {
                out[1] = nu * w2 / (2.0 * q);
                out[1]
            }
            (ModelLabel::L1Switch2, 2) => {
                out[0] = (1.0 + nu) / (2.0 * q);
                out[0]
            }
            (ModelLabel::L2Switch3, 1) => {
                out[1] = nu * w2 / q;
                out[1]
            }
            (ModelLabel::L2Switch3, 2) => {
                let u = 3.0 - 8.0 * y + 8.0 * y * y;
                out[0] = (3.0 + nu) / (4.0 * q);
                out[2] = (1.0 + nu) * u / (4.0 * q);
                out[0] + out[2]
            }
            (ModelLabel::L2Switch3, 3) => {
                let u = 3.0 - 8.0 * y + 8.0 * y * y;
                out[1] = 9.0 * w2 / (u * q);
                out[1]
            }
            (ModelLabel::L2KillSwitch2, 1) => {
                out[1] = (nu + 3.0) / (4.0 * q);
                out[1]
            }
            (ModelLabel::L2KillSwitch2, 2) => {
                out[0] = nu * w2 / q;
                out[0]
            }
            _ => panic!("phase {phase} out of range for {:?}", self.label),
        }
    }
}

/// Assemble a model and certify it against the conjugated-operator route:
/// the drift diagonal and switch/kill matrix must match the corresponding
/// block of `(T*)^{-1} (S^{-1} Omega S) T*` (shifted by `(Lambda_0)_{ll}`)
/// on a 100-point interior grid to 1e-10.
pub fn build_model(nu: f64, label: ModelLabel) -> Result<SwitchingDiffusionModel> {
    if nu < 0.0 {
        return Err(Error::NuRange {
            nu,
            requirement: "diffusion models require nu >= 0",
        });
    }
    let model = SwitchingDiffusionModel { label, nu };

    {
        let (ell, offset, size) = label.block();
        let params = ModelParams::new(ell, nu)?;
        let op = ConjugatedOperator::new(params);
        let t = split_transform(params);
        let t_star_inv = t
            .transpose()
            .try_inverse()
            .expect("split transform is invertible");
        let lam0 = op.lambda0_ll();
        let dim = params.dim();

        let mut worst = 0.0f64;
        for i in 1..=100 {
            let y = i as f64 / 101.0;
            if (y - 0.5).abs() < 1e-6 {
                continue;
            }
            let drift_full = &t_star_inv * op.drift(y)? * t.transpose();
            let mut coupling_full = &t_star_inv * op.coupling(y)? * t.transpose();
            for d in 0..dim {
                coupling_full[(d, d)] -= lam0;
            }
            let sk = model.switch_kill(y);
            for r in 0..size {
                let want_drift = drift_full[(offset + r, offset + r)];
                worst = worst.max((model.drift(r + 1, y) - want_drift).abs());
                for c in 0..size {
                    worst = worst.max((sk[(r, c)] - coupling_full[(offset + r, offset + c)]).abs());
                }
            }
        }
        if worst > 1e-10 {
            return Err(Error::ModelCertification {
                context: "switching-diffusion block",
                residual: worst,
            });
        }
    }

    Ok(model)
}
