//! The normalized polynomial families of the two chains, their weights,
//! potential coefficients and the invariant measure.

use super::coeffs::{bd_rates, qbd_coefficients};
use crate::error::{Error, Result};
use crate::spherical::MatrixWeight;
use crate::specfun::pochhammer;
use nalgebra::{DMatrix, DVector};
use statrs::function::gamma::ln_gamma;

/// `q_{0,2}(y), ..., q_{n_max,2}(y)` of the scalar queue, normalized by
/// `q_n(0) = 1`, by the forward recurrence
/// `-y q_n = lambda_n q_{n+1} - (lambda_n + mu_n) q_n + mu_n q_{n-1}`.
pub fn bd_polynomials(nu: f64, n_max: u32, y: f64) -> Result<Vec<f64>> {
    let mut q = Vec::with_capacity(n_max as usize + 1);
    q.push(1.0);
    if n_max == 0 {
        return Ok(q);
    }
    let (l0, _) = bd_rates(nu, 0)?;
    q.push((0.5 - y) / l0);
    for n in 1..n_max {
        let (lam, mu) = bd_rates(nu, n)?;
        let next = ((0.5 - y) * q[n as usize] - mu * q[n as usize - 1]) / lam;
        q.push(next);
    }
    Ok(q)
}

/// `Q_{0,1}(y), ..., Q_{n_max,1}(y)` of the two-phase process, `Q_0 = I`,
/// from `-y Q_n = A_n Q_{n+1} + B_n Q_n + C_n Q_{n-1}`.
pub fn qbd_polynomials(nu: f64, n_max: u32, y: f64) -> Result<Vec<DMatrix<f64>>> {
    let eye = DMatrix::<f64>::identity(2, 2);
    let mut q = Vec::with_capacity(n_max as usize + 1);
    q.push(eye.clone());
    if n_max == 0 {
        return Ok(q);
    }
    let (a0, b0, _) = qbd_coefficients(nu, 0)?;
    let rhs = (&eye * (-y) - &b0) * &q[0];
    q.push(solve_diag(&a0, rhs));
    for n in 1..n_max {
        let (a, b, c) = qbd_coefficients(nu, n)?;
        let rhs = (&eye * (-y) - &b) * &q[n as usize] - &c * &q[n as usize - 1];
        q.push(solve_diag(&a, rhs));
    }
    Ok(q)
}

fn solve_diag(a: &DMatrix<f64>, mut rhs: DMatrix<f64>) -> DMatrix<f64> {
    for i in 0..rhs.nrows() {
        let d = a[(i, i)];
        for j in 0..rhs.ncols() {
            rhs[(i, j)] /= d;
        }
    }
    rhs
}

/// Scalar weight of the queue:
/// `w_2(y) = 4^{nu+1} (nu+1)_2 / (nu + 1/2) [y(1-y)]^{nu+1/2}`, `nu > -3/2`.
pub fn scalar_weight_w2(nu: f64) -> Result<MatrixWeight> {
    if nu <= -1.5 {
        return Err(Error::NuRange {
            nu,
            requirement: "scalar weight needs nu > -3/2",
        });
    }
    let c = 4f64.powf(nu + 1.0) * pochhammer(nu + 1.0, 2) / (nu + 0.5);
    Ok(MatrixWeight::new(
        1,
        nu + 0.5,
        nu + 0.5,
        Box::new(move |_| DMatrix::from_element(1, 1, c)),
    ))
}

/// Matrix weight of the two-phase process (`nu > -1/2`):
/// `W_1(y) = 4^{nu+1/2}(nu+2) [y(1-y)]^{nu-1/2} [[1 - 2(1+nu)/(nu+1/2) y(1-y), 1-2y],
/// [1-2y, 1 - 2 nu/(nu+1/2) y(1-y)]]`.
pub fn matrix_weight_w1(nu: f64) -> Result<MatrixWeight> {
    if nu <= -0.5 {
        return Err(Error::NuRange {
            nu,
            requirement: "matrix weight needs nu > -1/2",
        });
    }
    let c = 4f64.powf(nu + 0.5) * (nu + 2.0);
    Ok(MatrixWeight::new(
        2,
        nu - 0.5,
        nu - 0.5,
        Box::new(move |y| {
            let off = 1.0 - 2.0 * y;
            let q = y * (1.0 - y);
            DMatrix::from_row_slice(
                2,
                2,
                &[
                    c * (1.0 - 2.0 * (1.0 + nu) / (nu + 0.5) * q),
                    c * off,
                    c * off,
                    c * (1.0 - 2.0 * nu / (nu + 0.5) * q),
                ],
            )
        }),
    ))
}

/// Potential coefficients `pi_0 = 1`, `pi_n = 2(nu+n+1)(2nu+3)_{n-1}/n!`
/// of the scalar queue, as a table up to `n_max`.
///
/// Built with running products so consecutive entries stay consistent to a
/// few ulps (detailed balance at 1e-12 depends on that).
pub fn bd_potential_coefficients(nu: f64, n_max: u32) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max as usize + 1);
    out.push(1.0);
    // ratio = (2nu+3)_{n-1} / n!, updated incrementally
    let mut ratio = 1.0;
    for n in 1..=n_max {
        let nf = n as f64;
        if n > 1 {
            ratio *= 2.0 * nu + nf + 1.0;
        }
        ratio /= nf;
        out.push(2.0 * (nu + nf + 1.0) * ratio);
    }
    out
}

/// Matrix potential coefficients `Pi_n` (diagonals) of the two-phase
/// process up to `n_max`:
/// `Pi_0 = Gamma(nu+1)/(sqrt(pi)(nu+2)Gamma(nu+1/2)) diag(1, (nu+1)/(nu+2))`,
/// `Pi_n = 2 Gamma(nu+2)(2nu+3)_{n-1}/(sqrt(pi) n! (nu+2) Gamma(nu+1/2))
///         diag((nu+1)/(nu+n+1), nu(nu+n+1)/((nu+n)(nu+n+2)))`.
pub fn qbd_potential_coefficients(nu: f64, n_max: u32) -> Result<Vec<DVector<f64>>> {
    if nu < 0.0 {
        return Err(Error::NuRange {
            nu,
            requirement: "potential coefficients need nu >= 0",
        });
    }
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let gamma_ratio = (ln_gamma(nu + 1.0) - ln_gamma(nu + 0.5)).exp();
    let mut out = Vec::with_capacity(n_max as usize + 1);
    out.push(DVector::from_vec(vec![
        gamma_ratio / (sqrt_pi * (nu + 2.0)),
        gamma_ratio * (nu + 1.0) / (sqrt_pi * (nu + 2.0) * (nu + 2.0)),
    ]));
    // prefactor 2 Gamma(nu+2) (2nu+3)_{n-1} / (sqrt(pi) n! (nu+2) Gamma(nu+1/2)),
    // maintained as a running product over n
    let mut pref = 2.0 * gamma_ratio * (nu + 1.0) / (sqrt_pi * (nu + 2.0));
    for n in 1..=n_max {
        let nf = n as f64;
        if n > 1 {
            pref *= (2.0 * nu + nf + 1.0) / nf;
        }
        out.push(DVector::from_vec(vec![
            pref * (nu + 1.0) / (nu + nf + 1.0),
            pref * nu * (nu + nf + 1.0) / ((nu + nf) * (nu + nf + 2.0)),
        ]));
    }
    Ok(out)
}

/// First `n_max + 1` blocks of the invariant measure
/// `pi = ((Pi_0 e)*; (Pi_1 e)*; ...)` of the two-phase process.
pub fn invariant_measure(nu: f64, n_max: u32) -> Result<Vec<[f64; 2]>> {
    Ok(qbd_potential_coefficients(nu, n_max)?
        .into_iter()
        .map(|d| [d[0], d[1]])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qbd::{build_generator, ChainModel};
    use crate::specfun::gauss_jacobi_rule;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial_seeds_and_lattice_normalization() {
        for &nu in &[0.0, 0.25, 1.0] {
            let q = bd_polynomials(nu, 10, 0.0).unwrap();
            for v in q {
                assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
            }
            let qm = qbd_polynomials(nu, 6, 0.37).unwrap();
            assert_eq!(qm[0], DMatrix::identity(2, 2));
            // Q_n(0) e = e
            let q0 = qbd_polynomials(nu, 6, 0.0).unwrap();
            for m in &q0 {
                for i in 0..2 {
                    assert_abs_diff_eq!(m.row(i).iter().sum::<f64>(), 1.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn scalar_weight_prefactor_and_norm() {
        // nu = 1: prefactor 4^2 (2)(3) / (3/2) = 64
        let w = scalar_weight_w2(1.0).unwrap();
        assert_abs_diff_eq!(w.bounded_part(0.3)[(0, 0)], 64.0, epsilon = 1e-12);
        assert!(scalar_weight_w2(-1.5).is_err());
        // int w_2 = ||q_0||^2 = sqrt(pi)(nu+2)Gamma(nu+1/2)/Gamma(nu+1)
        for &nu in &[-1.0, 0.0, 0.25, 1.0] {
            let w = scalar_weight_w2(nu).unwrap();
            let rule = gauss_jacobi_rule(8, w.alpha(), w.beta()).unwrap();
            let total = rule.integrate(|y| w.bounded_part(y)[(0, 0)]);
            let want = std::f64::consts::PI.sqrt() * (nu + 2.0)
                * (ln_gamma(nu + 0.5) - ln_gamma(nu + 1.0)).exp();
            assert_abs_diff_eq!(total, want, epsilon = 1e-10 * want);
            assert!(w.evaluate(0.5)[(0, 0)] > 0.0);
        }
    }

    #[test]
    fn matrix_weight_shape_and_psd() {
        let nu = 1.0;
        let w = matrix_weight_w1(nu).unwrap();
        let b = w.bounded_part(0.3);
        assert_abs_diff_eq!(b[(0, 1)], b[(1, 0)], epsilon = 1e-15);
        assert_abs_diff_eq!(
            b[(0, 1)],
            4f64.powf(1.5) * 3.0 * (1.0 - 0.6),
            epsilon = 1e-12
        );
        assert!(w.min_eigenvalue_on_grid(101) >= -1e-12);
        assert!(matrix_weight_w1(-0.5).is_err());
    }

    #[test]
    fn potential_coefficient_values() {
        for &nu in &[-1.25, 0.0, 0.25, 1.0] {
            let pis = bd_potential_coefficients(nu, 5);
            assert_eq!(pis[0], 1.0);
            assert_abs_diff_eq!(pis[1], 2.0 * (nu + 2.0), epsilon = 1e-14);
        }
    }

    #[test]
    fn detailed_balance_to_machine_precision() {
        for &nu in &[-1.25, -1.0, 0.0, 0.25, 1.0] {
            let pis = bd_potential_coefficients(nu, 51);
            for n in 0..50u32 {
                let (lam, _) = bd_rates(nu, n).unwrap();
                let (_, mu_next) = bd_rates(nu, n + 1).unwrap();
                let lhs = pis[n as usize] * lam;
                let rhs = pis[n as usize + 1] * mu_next;
                assert!(
                    (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0),
                    "nu {nu} n {n}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn invariant_measure_blocks() {
        // displayed leading blocks
        for &nu in &[0.25, 1.0] {
            let pref = (ln_gamma(nu + 1.0) - ln_gamma(nu + 0.5)).exp()
                / (std::f64::consts::PI.sqrt() * (nu + 2.0));
            let pi = invariant_measure(nu, 2).unwrap();
            assert_abs_diff_eq!(pi[0][0], pref, epsilon = 1e-14);
            assert_abs_diff_eq!(pi[0][1], pref * (nu + 1.0) / (nu + 2.0), epsilon = 1e-14);
            assert_abs_diff_eq!(
                pi[1][0],
                pref * 2.0 * (nu + 1.0) * (nu + 1.0) / (nu + 2.0),
                epsilon = 1e-13
            );
            assert_abs_diff_eq!(
                pi[1][1],
                pref * 2.0 * nu * (nu + 2.0) / (nu + 3.0),
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn invariant_measure_annihilates_generator() {
        for &nu in &[0.25, 1.0] {
            let levels = 200;
            let gen = build_generator(nu, levels, ChainModel::Qbd2).unwrap();
            let pi = invariant_measure(nu, levels as u32 - 1).unwrap();
            let flat: Vec<f64> = pi.iter().flat_map(|b| b.iter().copied()).collect();
            let g = gen.dense();
            let interior = gen.dim() - 2 * gen.phases();
            for j in 0..interior {
                let mut acc = 0.0;
                for i in 0..gen.dim() {
                    acc += flat[i] * g[(i, j)];
                }
                assert!(acc.abs() < 1e-10, "nu {nu} column {j}: {acc}");
            }
        }
    }

    #[test]
    fn potential_sums_diverge_in_recurrent_range() {
        // null recurrence: partial sums exceed 1e3 once N is large enough
        for &nu in &[-1.25f64, -0.75] {
            let mut n_max = 1024u32;
            loop {
                let total: f64 = bd_potential_coefficients(nu, n_max).iter().sum();
                if total >= 1e3 {
                    break;
                }
                n_max *= 2;
                assert!(n_max <= 1 << 21, "nu {nu}: sum stalled at {total}");
            }
        }
        for &nu in &[0.25, 0.5] {
            let pi = invariant_measure(nu, 4000).unwrap();
            let total: f64 = pi.iter().map(|b| b[0] + b[1]).sum();
            assert!(total >= 1e3, "nu {nu}: qbd sum {total}");
        }
    }
}
