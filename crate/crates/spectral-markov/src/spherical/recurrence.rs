//! Monic three-term recurrence `y P_n = P_{n+1} + B_n P_n + C_n P_{n-1}`
//! and the closed-form matrix norms of the monic family.

use super::{ModelParams, StructureMatrices};
use crate::error::{Error, Result};
use crate::specfun::pochhammer;
use nalgebra::{DMatrix, DVector};
use statrs::function::gamma::ln_gamma;

/// Coefficient maps of the monic recurrence.
#[derive(Debug, Clone)]
pub struct MonicRecurrence {
    params: ModelParams,
    j_diag: Vec<f64>,
    jb_diag: Vec<f64>,
}

impl MonicRecurrence {
    pub fn new(params: ModelParams) -> Self {
        let sm = StructureMatrices::new(params);
        let n = params.dim();
        MonicRecurrence {
            params,
            j_diag: (0..n).map(|i| sm.j[(i, i)]).collect(),
            jb_diag: (0..n).map(|i| sm.jbreve[(i, i)]).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    /// `B_n = 1/2 - (1/4) J(J+nu-1)[(J+n+nu-1)(J+n+nu)]^{-1} A - (...) A*`.
    ///
    /// At `n = 0` the factor `(J+nu-1)` cancels against the denominator, so
    /// the reduced form `J/(J+nu)` is used; only the rows where the shift
    /// matrices actually place an entry are evaluated.
    pub fn bn(&self, n: u32) -> Result<DMatrix<f64>> {
        let dim = self.dim();
        let nu = self.params.nu();
        let nf = n as f64;
        let mut b = DMatrix::from_diagonal_element(dim, dim, 0.5);
        for i in 0..dim - 1 {
            // superdiagonal entry (i, i+1) from the J term, row i
            let j = self.j_diag[i];
            let val = if n == 0 {
                let den = j + nu;
                if den.abs() < 1e-13 {
                    return Err(Error::RecurrenceDenominator { n, index: i });
                }
                j / den
            } else {
                let den = (j + nf + nu - 1.0) * (j + nf + nu);
                if den.abs() < 1e-13 {
                    return Err(Error::RecurrenceDenominator { n, index: i });
                }
                j * (j + nu - 1.0) / den
            };
            b[(i, i + 1)] = -0.25 * val;

            // subdiagonal entry (i+1, i) from the J-breve term, row i+1
            let jb = self.jb_diag[i + 1];
            let val = if n == 0 {
                let den = jb + nu;
                if den.abs() < 1e-13 {
                    return Err(Error::RecurrenceDenominator { n, index: i + 1 });
                }
                jb / den
            } else {
                let den = (jb + nf + nu - 1.0) * (jb + nf + nu);
                if den.abs() < 1e-13 {
                    return Err(Error::RecurrenceDenominator { n, index: i + 1 });
                }
                jb * (jb + nu - 1.0) / den
            };
            b[(i + 1, i)] = -0.25 * val;
        }
        Ok(b)
    }

    /// Diagonal `C_n`, `n >= 1`.
    pub fn cn(&self, n: u32) -> Result<DMatrix<f64>> {
        assert!(n >= 1, "C_n is defined for n >= 1");
        let dim = self.dim();
        let nu = self.params.nu();
        let ell2 = 2.0 * self.params.ell() as f64;
        let nf = n as f64;
        let num = nf * (nf + nu - 1.0) * (ell2 + nf + nu) * (ell2 + nf + 2.0 * nu - 1.0) / 16.0;
        let mut c = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            let j = self.j_diag[i];
            let jb = self.jb_diag[i];
            let den = (j + nf + nu - 1.0) * (j + nf + nu) * (jb + nf + nu - 1.0) * (jb + nf + nu);
            if den.abs() < 1e-13 {
                return Err(Error::RecurrenceDenominator { n, index: i });
            }
            c[(i, i)] = num / den;
        }
        Ok(c)
    }

    /// `P_0(y), ..., P_{n_max}(y)` by the forward recurrence.
    pub fn eval(&self, y: f64, n_max: u32) -> Result<Vec<DMatrix<f64>>> {
        let dim = self.dim();
        let eye = DMatrix::<f64>::identity(dim, dim);
        let mut out = Vec::with_capacity(n_max as usize + 1);
        out.push(eye.clone());
        if n_max == 0 {
            return Ok(out);
        }
        out.push(&eye * y - self.bn(0)?);
        for n in 1..n_max {
            let next = (&eye * y - self.bn(n)?) * &out[n as usize]
                - self.cn(n)? * &out[n as usize - 1];
            out.push(next);
        }
        Ok(out)
    }
}

/// Diagonal of the closed-form matrix norm `||P_n^(nu)||^2` of the monic
/// family.
///
/// The `nu / (nu + k)_n` factor at `k = 0` is written in its cancelled form
/// `1 / ((nu+n) (nu+1)_{n-1})` so nothing degenerates as `nu -> 0`.
pub fn monic_norms(params: ModelParams, n: u32) -> Result<DVector<f64>> {
    let ell = params.ell() as f64;
    let ell2 = 2 * params.ell();
    let ell2f = ell2 as f64;
    let nu = params.nu();
    let nf = n as f64;

    let base = std::f64::consts::PI.sqrt() / (2.0 * 4f64.powi(n as i32))
        * (ln_gamma(nu + 0.5) - ln_gamma(nu + 1.0)).exp();
    let n_part = pochhammer(1.0, n) * pochhammer(ell + 0.5 + nu, n) * pochhammer(ell2f + nu, n)
        * pochhammer(ell + nu, n)
        / (pochhammer(ell2f + nu + 1.0, n) * pochhammer(ell2f + 2.0 * nu + nf, n));

    let mut out = DVector::zeros(params.dim());
    for k in 0..=ell2 {
        let kf = k as f64;
        let k_part = pochhammer(1.0, k) * pochhammer(1.0, ell2 - k)
            * pochhammer(nf + nu + 1.0, ell2)
            / (pochhammer(1.0, ell2)
                * pochhammer(nf + nu + 1.0, k)
                * pochhammer(nf + nu + 1.0, ell2 - k));
        let nu_factor = if k == 0 {
            // nu (2l+nu+n) / ((nu+n) (nu)_n) with the nu cancelled
            if n == 0 {
                ell2f + nu
            } else {
                (ell2f + nu + nf) / ((nu + nf) * pochhammer(nu + 1.0, n - 1))
            }
        } else {
            let den = pochhammer(nu + kf, n);
            if den.abs() < 1e-300 {
                return Err(Error::RecurrenceDenominator { n, index: k as usize });
            }
            nu * (ell2f + nu + nf) / ((nu + nf) * den)
        };
        let tail = pochhammer(ell2f + nu - kf, n);
        if tail.abs() < 1e-300 {
            return Err(Error::RecurrenceDenominator { n, index: k as usize });
        }
        out[k as usize] = base * nu_factor * k_part * n_part / tail;
    }
    Ok(out)
}
