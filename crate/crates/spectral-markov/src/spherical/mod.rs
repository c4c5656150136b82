//! Matrix-valued constructions behind the level-phase models: the building
//! block `Psi_0`, the diagonal conjugator `S`, matrix weights, the monic
//! three-term recurrence and the conjugated second-order operator whose
//! coefficients carry the stochastic interpretation.
//!
//! Everything is parametrized by a pair `(ell, nu)`: `ell` fixes the matrix
//! dimension `N = 2 ell + 1`, `nu` is the free parameter of the weight
//! family.

mod operator;
mod psi0;
mod recurrence;
mod weight;

pub use operator::{a_nu, eigenvalue_matrix, f_nu, ConjugatedOperator};
pub use psi0::{ell_column_coefficient, Psi0, SMatrix};
pub use recurrence::{monic_norms, MonicRecurrence};
pub use weight::{weight_w, MatrixWeight};

use crate::error::{Error, Result};
use nalgebra::DMatrix;

use crate::specfun::{binomial, krawtchouk, pochhammer};

/// Family parameters: dimension index `ell >= 1` and weight parameter `nu`.
///
/// `nu > -1/2` is required for the weight to be integrable. The stochastic
/// constructions downstream additionally need `nu >= 0`; that is flagged by
/// [`ModelParams::stochastic`], not rejected here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    ell: u32,
    nu: f64,
}

impl ModelParams {
    pub fn new(ell: u32, nu: f64) -> Result<Self> {
        if ell < 1 {
            return Err(Error::EllRange(ell));
        }
        if !(nu.is_finite() && nu > -0.5) {
            return Err(Error::NuRange {
                nu,
                requirement: "nu > -1/2 for an integrable weight",
            });
        }
        Ok(ModelParams { ell, nu })
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Matrix dimension `N = 2 ell + 1`.
    pub fn dim(&self) -> usize {
        2 * self.ell as usize + 1
    }

    /// Whether the parameters admit the stochastic interpretation.
    pub fn stochastic(&self) -> bool {
        self.nu >= 0.0
    }
}

/// The fixed matrices of the construction: diagonals `J`, `J-breve`, the
/// nilpotent shift `A`, the flip involution `H`, the Krawtchouk matrix `K`,
/// the binomial diagonal `M` and the diagonal `T^(nu)`.
#[derive(Debug, Clone)]
pub struct StructureMatrices {
    pub j: DMatrix<f64>,
    pub jbreve: DMatrix<f64>,
    pub shift: DMatrix<f64>,
    pub flip: DMatrix<f64>,
    pub krawtchouk: DMatrix<f64>,
    pub binomials: DMatrix<f64>,
    pub t_nu: DMatrix<f64>,
}

impl StructureMatrices {
    pub fn new(params: ModelParams) -> Self {
        let n = params.dim();
        let ell2 = 2 * params.ell;
        let nu = params.nu();

        let j = DMatrix::from_fn(n, n, |i, k| if i == k { (n - 1 - i) as f64 } else { 0.0 });
        let jbreve = DMatrix::from_fn(n, n, |i, k| if i == k { i as f64 } else { 0.0 });
        let shift = DMatrix::from_fn(n, n, |i, k| if k == i + 1 { 1.0 } else { 0.0 });
        let flip = DMatrix::from_fn(n, n, |i, k| if i + k == n - 1 { 1.0 } else { 0.0 });
        let krawtchouk = DMatrix::from_fn(n, n, |i, k| {
            krawtchouk(k as u32, i as u32, ell2).expect("degree within lattice")
        });
        let binomials =
            DMatrix::from_fn(n, n, |i, k| if i == k { binomial(ell2, i as u32) } else { 0.0 });
        let t_nu = DMatrix::from_fn(n, n, |i, k| {
            if i == k {
                binomial(ell2, i as u32) * pochhammer(nu, i as u32)
                    / pochhammer(nu + (ell2 - i as u32) as f64, i as u32)
            } else {
                0.0
            }
        });

        StructureMatrices {
            j,
            jbreve,
            shift,
            flip,
            krawtchouk,
            binomials,
            t_nu,
        }
    }
}

/// Orthogonal matrix splitting the weight into its two invariant blocks
/// (sizes `ell + 1` and `ell`), built from the `+-1` eigenspaces of the flip.
pub fn y_involution(params: ModelParams) -> DMatrix<f64> {
    let ell = params.ell as usize;
    let n = params.dim();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut y = DMatrix::zeros(n, n);
    for i in 0..ell {
        y[(i, i)] = s;
        y[(i, n - 1 - i)] = s;
        y[(n - 1 - i, i)] = -s;
        y[(n - 1 - i, n - 1 - i)] = s;
    }
    y[(ell, ell)] = 1.0;
    y
}

/// Unnormalized variant of [`y_involution`] used to split the conjugated
/// differential operator and the monic polynomials: rows `e_i + e_{2l-i}`,
/// the middle row `e_l`, and rows `-e_{2l-i} ... ` for the antisymmetric
/// part. For `ell = 1` this is `[[1,0,1],[0,1,0],[-1,0,1]]`.
pub fn split_transform(params: ModelParams) -> DMatrix<f64> {
    let ell = params.ell as usize;
    let n = params.dim();
    let mut t = DMatrix::zeros(n, n);
    for i in 0..ell {
        t[(i, i)] = 1.0;
        t[(i, n - 1 - i)] = 1.0;
        t[(n - 1 - i, i)] = -1.0;
        t[(n - 1 - i, n - 1 - i)] = 1.0;
    }
    t[(ell, ell)] = 1.0;
    t
}
