//! Matrix weights: the generic `W^(nu)` and the shared weight container
//! used by every module that integrates against a Jacobi-type density.

use super::psi0::Psi0;
use super::{ModelParams, StructureMatrices};
use crate::error::{Error, Result};
use crate::specfun::pochhammer;
use nalgebra::DMatrix;

type BoundedFn = Box<dyn Fn(f64) -> DMatrix<f64> + Send + Sync>;

/// A weight of the form `bounded(y) * y^alpha (1-y)^beta` on `(0, 1)` with
/// Hermitian positive-semidefinite values.
///
/// Quadrature code integrates the bounded factor against a Gauss-Jacobi
/// rule carrying the endpoint exponents, so the singular part is handled
/// exactly.
pub struct MatrixWeight {
    dim: usize,
    alpha: f64,
    beta: f64,
    bounded: BoundedFn,
}

impl MatrixWeight {
    pub fn new(dim: usize, alpha: f64, beta: f64, bounded: BoundedFn) -> Self {
        MatrixWeight {
            dim,
            alpha,
            beta,
            bounded,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Exponent of `y` at the left endpoint.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Exponent of `1-y` at the right endpoint.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The smooth factor, endpoint singularities excluded.
    pub fn bounded_part(&self, y: f64) -> DMatrix<f64> {
        (self.bounded)(y)
    }

    /// The full weight value at an interior point.
    pub fn evaluate(&self, y: f64) -> DMatrix<f64> {
        self.bounded_part(y) * (y.powf(self.alpha) * (1.0 - y).powf(self.beta))
    }

    /// Smallest eigenvalue over a grid; used to certify positive
    /// semidefiniteness.
    pub fn min_eigenvalue_on_grid(&self, points: usize) -> f64 {
        let mut min = f64::INFINITY;
        for i in 1..=points {
            let y = i as f64 / (points + 1) as f64;
            let w = self.evaluate(y);
            let sym = (&w + w.transpose()) * 0.5;
            let eig = sym.symmetric_eigen();
            for v in eig.eigenvalues.iter() {
                min = min.min(*v);
            }
        }
        min
    }
}

impl std::fmt::Debug for MatrixWeight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MatrixWeight")
            .field("dim", &self.dim)
            .field("alpha", &self.alpha)
            .field("beta", &self.beta)
            .finish()
    }
}

/// The weight `W^(nu)(y) = c [y(1-y)]^{nu-1/2} Psi_0(y)* T^(nu) Psi_0(y)`
/// with `c = 4^{nu-l} (nu+l)_{l+1} / (2 (nu+1/2)_l)`.
///
/// The product is complex entrywise but Hermitian with real assembled
/// values; the imaginary parts are certified below 1e-12 on a grid before
/// the real part is exposed.
pub fn weight_w(params: ModelParams) -> Result<MatrixWeight> {
    if params.nu() <= -0.5 {
        return Err(Error::NuRange {
            nu: params.nu(),
            requirement: "nu > -1/2 for the weight",
        });
    }
    let ell = params.ell();
    let nu = params.nu();
    let n = params.dim();
    let c = 4f64.powf(nu - ell as f64) * pochhammer(nu + ell as f64, ell + 1)
        / (2.0 * pochhammer(nu + 0.5, ell));
    let psi = Psi0::new(params);
    let t_complex = StructureMatrices::new(params)
        .t_nu
        .map(|v| num_complex::Complex64::new(v, 0.0));

    let t_for_closure = t_complex.clone();
    let bounded = move |y: f64| -> DMatrix<f64> {
        let p = psi.evaluate(y);
        let prod = p.adjoint() * &t_for_closure * &p;
        DMatrix::from_fn(n, n, |i, k| c * prod[(i, k)].re)
    };

    // certify the dropped imaginary parts on a grid
    let psi_check = Psi0::new(params);
    let mut worst = 0.0f64;
    for i in 1..=25 {
        let y = i as f64 / 26.0;
        let p = psi_check.evaluate(y);
        let prod = p.adjoint() * &t_complex * &p;
        for v in prod.iter() {
            worst = worst.max(v.im.abs() * c);
        }
    }
    if worst > 1e-12 {
        return Err(Error::ModelCertification {
            context: "weight_w imaginary part",
            residual: worst,
        });
    }

    Ok(MatrixWeight::new(n, nu - 0.5, nu - 0.5, Box::new(bounded)))
}

#[cfg(test)]
mod tests {
    use super::super::{monic_norms, y_involution};
    use super::*;
    use crate::specfun::gauss_jacobi_rule;
    use approx::assert_abs_diff_eq;

    #[test]
    fn weight_is_psd_on_grid() {
        for &(ell, nu) in &[(1u32, 1.0), (1, 0.25), (2, 0.75)] {
            let w = weight_w(ModelParams::new(ell, nu).unwrap()).unwrap();
            assert!(w.min_eigenvalue_on_grid(41) >= -1e-12);
        }
    }

    #[test]
    fn weight_integral_matches_norm_of_p0() {
        // int W^(nu) = ||P_0||^2 (diagonal, from the closed-form norms)
        for &(ell, nu) in &[(1u32, 1.0), (1, 0.25), (2, 1.0)] {
            let params = ModelParams::new(ell, nu).unwrap();
            let w = weight_w(params).unwrap();
            let rule = gauss_jacobi_rule(40 + 2 * ell as usize, w.alpha(), w.beta()).unwrap();
            let n = params.dim();
            let mut total = DMatrix::<f64>::zeros(n, n);
            for (y, wt) in rule.iter() {
                total += w.bounded_part(y) * wt;
            }
            let norms = monic_norms(params, 0).unwrap();
            for i in 0..n {
                for k in 0..n {
                    let want = if i == k { norms[i] } else { 0.0 };
                    assert_abs_diff_eq!(total[(i, k)], want, epsilon = 1e-11);
                }
            }
        }
    }

    #[test]
    fn involution_block_diagonalizes_weight() {
        for &(ell, nu) in &[(1u32, 1.0), (2, 0.6)] {
            let params = ModelParams::new(ell, nu).unwrap();
            let w = weight_w(params).unwrap();
            let yv = y_involution(params);
            let split = ell as usize + 1;
            for i in 1..15 {
                let y = i as f64 / 15.0;
                let conj = &yv * w.evaluate(y) * yv.transpose();
                for r in 0..split {
                    for c in split..params.dim() {
                        assert!(conj[(r, c)].abs() < 1e-12, "off-block at ({r},{c})");
                        assert!(conj[(c, r)].abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_invalid_nu() {
        // ModelParams itself guards nu; exercise the guard
        assert!(ModelParams::new(1, -0.6).is_err());
    }
}
