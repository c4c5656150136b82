//! Level coefficients, generator assembly and recurrence classification for
//! the two chain models.

use super::{BlockGenerator, LevelBlocks};
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Which chain family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainModel {
    /// Scalar birth-and-death queue (one phase).
    Bd,
    /// Two-phase quasi-birth-and-death process.
    Qbd2,
}

impl ChainModel {
    pub fn phases(&self) -> usize {
        match self {
            ChainModel::Bd => 1,
            ChainModel::Qbd2 => 2,
        }
    }
}

/// Birth and death rates `lambda_n = (2nu+n+2)/(4(nu+n+1))`,
/// `mu_n = n/(4(nu+n+1))` of the scalar queue.
///
/// Rates are checked per level: a nonpositive one (outside `nu > -3/2`)
/// is refused before any simulation can use it.
pub fn bd_rates(nu: f64, n: u32) -> Result<(f64, f64)> {
    let nf = n as f64;
    let lambda = (2.0 * nu + nf + 2.0) / (4.0 * (nu + nf + 1.0));
    let mu = nf / (4.0 * (nu + nf + 1.0));
    if !(lambda > 0.0) || mu < 0.0 || (n >= 1 && !(mu > 0.0)) {
        return Err(Error::NonpositiveRate {
            level: n,
            lambda,
            mu,
        });
    }
    Ok((lambda, mu))
}

/// Level-`n` blocks `(A_n, B_n, C_n)` of the two-phase process. `C_0` is
/// returned as the zero matrix.
///
/// The `(1,2)` entry of `B_n` is `nu / (2(nu+n)(nu+n+2))`; at `n = 0` the
/// algebraically simplified form `1 / (2(nu+2))` is used, which is the
/// removable limit of the generic expression as `nu -> 0`.
pub fn qbd_coefficients(nu: f64, n: u32) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
    if nu < 0.0 {
        return Err(Error::NuRange {
            nu,
            requirement: "the two-phase process requires nu >= 0",
        });
    }
    let nf = n as f64;
    let a = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&[
        (2.0 * nu + nf + 2.0) / (4.0 * (nu + nf + 2.0)),
        (nf + nu) * (2.0 * nu + nf + 2.0) / (4.0 * (nu + nf + 1.0).powi(2)),
    ]));
    let b12 = if n == 0 {
        1.0 / (2.0 * (nu + 2.0))
    } else {
        nu / (2.0 * (nu + nf) * (nu + nf + 2.0))
    };
    let b = DMatrix::from_row_slice(
        2,
        2,
        &[
            -0.5,
            b12,
            (1.0 + nu) / (2.0 * (nu + nf + 1.0).powi(2)),
            -0.5,
        ],
    );
    let c = if n == 0 {
        DMatrix::zeros(2, 2)
    } else {
        DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&[
            nf / (4.0 * (nu + nf)),
            nf * (nu + nf + 2.0) / (4.0 * (nu + nf + 1.0).powi(2)),
        ]))
    };
    Ok((a, b, c))
}

/// Truncated block generator of the selected model. Interior rows are
/// conservative; the last level leaks its up-rate mass.
pub fn build_generator(nu: f64, levels: usize, model: ChainModel) -> Result<BlockGenerator> {
    if levels < 2 {
        return Err(Error::TooFewLevels(levels));
    }
    let mut blocks = Vec::with_capacity(levels);
    match model {
        ChainModel::Bd => {
            for n in 0..levels {
                let (lambda, mu) = bd_rates(nu, n as u32)?;
                blocks.push(LevelBlocks {
                    a: DMatrix::from_element(1, 1, lambda),
                    b: DMatrix::from_element(1, 1, -(lambda + mu)),
                    c: (n > 0).then(|| DMatrix::from_element(1, 1, mu)),
                });
            }
        }
        ChainModel::Qbd2 => {
            for n in 0..levels {
                let (a, b, c) = qbd_coefficients(nu, n as u32)?;
                blocks.push(LevelBlocks {
                    a,
                    b,
                    c: (n > 0).then_some(c),
                });
            }
        }
    }
    Ok(BlockGenerator::new(levels, model.phases(), blocks))
}

/// Recurrence verdict of a chain model at a given `nu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChainClass {
    NullRecurrent,
    Transient,
    Invalid,
}

/// Classification by the weight-integral criteria: the queue is recurrent
/// iff `int w(y)/y dy` diverges, which pins the thresholds at `nu = -1/2`
/// (one phase) and `nu = 1/2` (two phases). Recurrent cases are null
/// recurrent because the potential-coefficient sums diverge.
pub fn classify(nu: f64, model: ChainModel) -> ChainClass {
    match model {
        ChainModel::Bd => {
            if nu <= -1.5 {
                ChainClass::Invalid
            } else if nu <= -0.5 {
                ChainClass::NullRecurrent
            } else {
                ChainClass::Transient
            }
        }
        ChainModel::Qbd2 => {
            if nu < 0.0 {
                ChainClass::Invalid
            } else if nu <= 0.5 {
                ChainClass::NullRecurrent
            } else {
                ChainClass::Transient
            }
        }
    }
}
