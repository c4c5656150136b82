//! The second-order matrix operator in its two conjugated forms: the raw
//! coefficient `F^(nu)` and, after conjugation by `S`, the drift `A^(nu)`
//! and coupling `Q^(nu)` whose signs carry the stochastic interpretation.

use super::psi0::SMatrix;
use super::{ModelParams, StructureMatrices};
use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// First-order scalar coefficient `a^(nu)(y) = 1/2 + nu - y(2nu + 1)`,
/// equal to `(nu + 1/2)(1 - 2y)`.
pub fn a_nu(nu: f64, y: f64) -> f64 {
    0.5 + nu - y * (2.0 * nu + 1.0)
}

/// Zeroth-order coefficient `F^(nu)(y)` of the operator acting on `Psi_n`.
///
/// The constant term is `l(l+2) + (nu-1)(2l+nu+1)`; with this sign the
/// eigenvalue relation for `Psi_0` (and hence the zero-row-sum property of
/// the conjugated coupling) holds for every `nu`.
pub fn f_nu(params: ModelParams, y: f64) -> Result<DMatrix<f64>> {
    if y <= 0.0 || y >= 1.0 {
        return Err(Error::PoleAt(y));
    }
    let ell = params.ell() as f64;
    let nu = params.nu();
    let n = params.dim();
    let sm = StructureMatrices::new(params);
    let sing = 1.0 / (2.0 * y * (1.0 - y));
    let one_two_y = 1.0 - 2.0 * y;

    let eye = DMatrix::<f64>::identity(n, n);
    let v = &sm.j * &sm.jbreve;
    let constant = ell * (ell + 2.0) + (nu - 1.0) * (2.0 * ell + nu + 1.0);

    let mut f = &eye * constant;
    f -= (&eye * (ell * (nu - 1.0) * one_two_y * one_two_y + ell) + &v) * sing;
    f += &v;
    let off = &sm.jbreve * sm.shift.transpose() * (&sm.j + &eye * (nu - 1.0))
        + &sm.j * &sm.shift * (&sm.jbreve + &eye * (nu - 1.0));
    f += off * (one_two_y * sing / 2.0);
    Ok(f)
}

/// Diagonal eigenvalue matrix `Lambda_n^(nu)` of the operator acting on the
/// monic family.
pub fn eigenvalue_matrix(params: ModelParams, n: u32) -> DMatrix<f64> {
    let ell = params.ell() as f64;
    let nu = params.nu();
    let dim = params.dim();
    let nf = n as f64;
    let scalar = -nf * (nf - 1.0) - nf * (2.0 * ell + 2.0 * nu + 1.0)
        + (nu - 1.0) * (2.0 * ell + nu + 1.0);
    DMatrix::from_fn(dim, dim, |i, k| {
        if i == k {
            scalar + ((dim - 1 - i) * i) as f64
        } else {
            0.0
        }
    })
}

/// The conjugated operator `S^{-1} Omega S = y(1-y) d^2 + A(y) d + Q(y)`.
///
/// `Q(y) - (Lambda_0)_{ll} I` has zero row sums and nonnegative
/// off-diagonal entries on `(0, 1)`; both properties are what downstream
/// models rely on, and both are exercised by the acceptance tests.
#[derive(Debug, Clone)]
pub struct ConjugatedOperator {
    params: ModelParams,
    s: SMatrix,
}

impl ConjugatedOperator {
    pub fn new(params: ModelParams) -> Self {
        ConjugatedOperator {
            params,
            s: SMatrix::new(params),
        }
    }

    pub fn params(&self) -> ModelParams {
        self.params
    }

    /// `(Lambda_0^(nu))_{ll} = l^2 + (nu-1)(2l+nu+1)`.
    pub fn lambda0_ll(&self) -> f64 {
        let ell = self.params.ell() as f64;
        let nu = self.params.nu();
        ell * ell + (nu - 1.0) * (2.0 * ell + nu + 1.0)
    }

    /// Drift matrix `A(y) = 2 y (1-y) S^{-1} S' + a^(nu)(y) I` (diagonal).
    pub fn drift(&self, y: f64) -> Result<DMatrix<f64>> {
        if y <= 0.0 || y >= 1.0 {
            return Err(Error::PoleAt(y));
        }
        let inv = self.s.checked_inverse_diagonal(y)?;
        let d1 = self.s.diagonal(y, 1);
        let a = a_nu(self.params.nu(), y);
        let n = self.params.dim();
        Ok(DMatrix::from_fn(n, n, |i, k| {
            if i == k {
                2.0 * y * (1.0 - y) * inv[i] * d1[i] + a
            } else {
                0.0
            }
        }))
    }

    /// Coupling matrix
    /// `Q(y) = y(1-y) S^{-1} S'' + a^(nu)(y) S^{-1} S' + S^{-1} F^(nu) S`.
    pub fn coupling(&self, y: f64) -> Result<DMatrix<f64>> {
        let inv = self.s.checked_inverse_diagonal(y)?;
        let d1 = self.s.diagonal(y, 1);
        let d2 = self.s.diagonal(y, 2);
        let d0 = self.s.diagonal(y, 0);
        let a = a_nu(self.params.nu(), y);
        let f = f_nu(self.params, y)?;
        let n = self.params.dim();
        let mut q = DMatrix::from_fn(n, n, |i, k| inv[i] * f[(i, k)] * d0[k]);
        for i in 0..n {
            q[(i, i)] += y * (1.0 - y) * inv[i] * d2[i] + a * inv[i] * d1[i];
        }
        Ok(q)
    }
}
