//! Karlin-McGregor transition probabilities by Gauss-Jacobi quadrature of
//! the spectral integrals, normalized by the closed-form norms.

use super::polynomials::{
    bd_polynomials, bd_potential_coefficients, matrix_weight_w1, qbd_polynomials,
    qbd_potential_coefficients, scalar_weight_w2,
};
use crate::error::{Error, Result};
use crate::specfun::gauss_jacobi_rule;
use nalgebra::DMatrix;
use statrs::function::gamma::ln_gamma;

const DEFAULT_ORDER: usize = 200;
const STABILITY_TOL: f64 = 1e-8;

/// `P_{ij}(t)` of the scalar queue:
/// `pi_j / ||q_0||^2 int_0^1 e^{-yt} q_i(y) q_j(y) w_2(y) dy`.
///
/// Computed at the default order and at twice the order; a drift above
/// 1e-8 reports quadrature insufficiency instead of a value.
pub fn km_transition_bd(nu: f64, i: u32, j: u32, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("negative time {t}")));
    }
    let coarse = km_bd_at_order(nu, i, j, t, DEFAULT_ORDER)?;
    let fine = km_bd_at_order(nu, i, j, t, 2 * DEFAULT_ORDER)?;
    let drift = (coarse - fine).abs();
    if drift > STABILITY_TOL {
        return Err(Error::QuadratureUnstable {
            drift,
            tolerance: STABILITY_TOL,
        });
    }
    Ok(fine)
}

fn km_bd_at_order(nu: f64, i: u32, j: u32, t: f64, order: usize) -> Result<f64> {
    let w = scalar_weight_w2(nu)?;
    let rule = gauss_jacobi_rule(order, w.alpha(), w.beta())?;
    let n_max = i.max(j);
    let mut acc = 0.0;
    for (y, wt) in rule.iter() {
        let q = bd_polynomials(nu, n_max, y)?;
        acc += wt * (-y * t).exp() * q[i as usize] * q[j as usize] * w.bounded_part(y)[(0, 0)];
    }
    let pi_j = bd_potential_coefficients(nu, j)[j as usize];
    let norm0 = std::f64::consts::PI.sqrt() * (nu + 2.0)
        * (ln_gamma(nu + 0.5) - ln_gamma(nu + 1.0)).exp();
    Ok(acc * pi_j / norm0)
}

/// Level-block `P_{ij}(t)` of the two-phase process:
/// `(int_0^1 e^{-yt} Q_i(y) W_1(y) Q_j(y)^T dy) Pi_j`.
pub fn km_transition_qbd2(nu: f64, i: u32, j: u32, t: f64) -> Result<DMatrix<f64>> {
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("negative time {t}")));
    }
    let coarse = km_qbd_at_order(nu, i, j, t, DEFAULT_ORDER)?;
    let fine = km_qbd_at_order(nu, i, j, t, 2 * DEFAULT_ORDER)?;
    let drift = (&coarse - &fine).amax();
    if drift > STABILITY_TOL {
        return Err(Error::QuadratureUnstable {
            drift,
            tolerance: STABILITY_TOL,
        });
    }
    Ok(fine)
}

fn km_qbd_at_order(nu: f64, i: u32, j: u32, t: f64, order: usize) -> Result<DMatrix<f64>> {
    let w = matrix_weight_w1(nu)?;
    let rule = gauss_jacobi_rule(order, w.alpha(), w.beta())?;
    let n_max = i.max(j);
    let mut acc = DMatrix::<f64>::zeros(2, 2);
    for (y, wt) in rule.iter() {
        let q = qbd_polynomials(nu, n_max, y)?;
        let prod = &q[i as usize] * w.bounded_part(y) * q[j as usize].transpose();
        acc += prod * (wt * (-y * t).exp());
    }
    let pi = qbd_potential_coefficients(nu, j)?;
    let pij = &pi[j as usize];
    Ok(DMatrix::from_fn(2, 2, |r, c| acc[(r, c)] * pij[c]))
}
