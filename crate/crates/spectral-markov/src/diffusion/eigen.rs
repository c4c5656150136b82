//! Eigenvalues and eigenfunctions of the diffusion generators.
//!
//! The scalar killed model has a closed Gegenbauer form; every matrix
//! family comes from the transformed monic polynomials
//! `Q_n(y) = R^{-1}(y) P_n(y)* T*` with `R^{-1} = (T*)^{-1} S^{-1} Psi_0`.

use super::model::ModelLabel;
use crate::error::Result;
use crate::specfun::{gegenbauer, pochhammer};
use crate::spherical::{split_transform, ModelParams, MonicRecurrence, Psi0, SMatrix};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

/// Diagonal of the eigenvalue matrix of the model generator at index `n`.
pub fn eigenvalue(nu: f64, label: ModelLabel, n: u32) -> DVector<f64> {
    let nf = n as f64;
    match label {
        ModelLabel::L1Killed => {
            DVector::from_vec(vec![-1.0 - nf * (nf + 2.0 * nu + 2.0)])
        }
        ModelLabel::L1Switch2 => {
            let base = -nf * (nf + 2.0 * nu + 2.0);
            DVector::from_vec(vec![base - 1.0, base])
        }
        ModelLabel::L2Switch3 => {
            let base = -nf * (nf + 2.0 * nu + 4.0);
            DVector::from_vec(vec![base - 4.0, base - 1.0, base])
        }
        ModelLabel::L2KillSwitch2 => {
            let base = -nf * (nf + 2.0 * nu + 4.0);
            DVector::from_vec(vec![base - 1.0, base - 4.0])
        }
    }
}

/// Closed form of the scalar killed-model eigenfunction:
/// `q_{n,2}(y) = -i n! sqrt(y(1-y)) / (4^{n-1} (nu+1)_n) C_n^{(nu+1)}(2y-1)`.
///
/// The prefactor and argument are the ones certified by quadrature against
/// the closed-form norms and by the transformed-monic construction; see the
/// crate tests.
pub fn eigenfunction_q2(nu: f64, n: u32, y: f64) -> Complex64 {
    let coeff = if n <= 60 {
        pochhammer(1.0, n) / (4f64.powi(n as i32 - 1) * pochhammer(nu + 1.0, n))
    } else {
        // log space; n! and (nu+1)_n overflow separately long before their
        // ratio does
        let nf = n as f64;
        (ln_gamma(nf + 1.0) - (nf - 1.0) * 4f64.ln() - ln_gamma(nu + 1.0 + nf)
            + ln_gamma(nu + 1.0))
        .exp()
    };
    Complex64::new(0.0, -1.0)
        * coeff
        * (y * (1.0 - y)).sqrt()
        * gegenbauer(n, nu + 1.0, 2.0 * y - 1.0)
}

/// The transformed monic family `Q_n(y) = R^{-1}(y) P_n(y)* T*` for the
/// underlying `ell`, all indices `0..=n_max` at once.
///
/// `R^{-1}` carries a removable `1/(1-2y)`; evaluation within 1e-8 of the
/// midpoint is nudged off it, the limit being continuous.
pub fn eigenfunction_generic(
    ell: u32,
    nu: f64,
    n_max: u32,
    y: f64,
) -> Result<Vec<DMatrix<Complex64>>> {
    let params = ModelParams::new(ell, nu)?;
    let y = if (y - 0.5).abs() < 1e-8 {
        if y <= 0.5 {
            0.5 - 1e-8
        } else {
            0.5 + 1e-8
        }
    } else {
        y
    };
    let dim = params.dim();
    let s = SMatrix::new(params);
    let s_inv = s.checked_inverse_diagonal(y)?;
    let psi = Psi0::new(params).evaluate(y);
    let t = split_transform(params);
    let t_star_inv = t
        .transpose()
        .try_inverse()
        .expect("split transform is invertible");

    // R^{-1} = (T*)^{-1} S^{-1} Psi_0
    let mut r_inv = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                acc += t_star_inv[(i, k)] * s_inv[k] * psi[(k, j)];
            }
            r_inv[(i, j)] = acc;
        }
    }

    let rec = MonicRecurrence::new(params);
    let polys = rec.eval(y, n_max)?;
    let t_star = t.transpose();
    Ok(polys
        .into_iter()
        .map(|p| {
            // P real: P* = P^T
            let pt = p.transpose();
            let mut out = DMatrix::<Complex64>::zeros(dim, dim);
            for i in 0..dim {
                for j in 0..dim {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in 0..dim {
                        let mut inner = 0.0;
                        for l in 0..dim {
                            inner += pt[(k, l)] * t_star[(l, j)];
                        }
                        acc += r_inv[(i, k)] * inner;
                    }
                    out[(i, j)] = acc;
                }
            }
            out
        })
        .collect())
}

/// The 2x2 block `Q_{n,1}` of the two-phase switching diffusion.
pub fn eigenfunction_q1(nu: f64, n: u32, y: f64) -> Result<DMatrix<Complex64>> {
    let all = eigenfunction_generic(1, nu, n, y)?;
    Ok(all[n as usize].view((0, 0), (2, 2)).into_owned())
}

/// Block of the generic family belonging to a model label.
pub fn model_block(label: ModelLabel, full: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (_, offset, size) = label.block();
    full.view((offset, offset), (size, size)).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn eigenvalue_displays() {
        assert_eq!(eigenvalue(1.0, ModelLabel::L1Killed, 0)[0], -1.0);
        let l = eigenvalue(0.5, ModelLabel::L1Switch2, 0);
        assert_eq!((l[0], l[1]), (-1.0, 0.0));
        let l = eigenvalue(1.0, ModelLabel::L2Switch3, 0);
        assert_eq!((l[0], l[1], l[2]), (-4.0, -1.0, 0.0));
        let l = eigenvalue(1.0, ModelLabel::L2KillSwitch2, 2);
        let base = -2.0 * (2.0 + 2.0 + 4.0);
        assert_eq!((l[0], l[1]), (base - 1.0, base - 4.0));
        // nonincreasing in n
        for n in 0..6u32 {
            let a = eigenvalue(0.25, ModelLabel::L2Switch3, n);
            let b = eigenvalue(0.25, ModelLabel::L2Switch3, n + 1);
            for i in 0..3 {
                assert!(b[i] < a[i]);
            }
        }
    }

    #[test]
    fn q2_closed_form_values() {
        // n = 0: q = -4i sqrt(y(1-y))
        for &y in &[0.1, 0.5, 0.73] {
            let v = eigenfunction_q2(1.0, 0, y);
            assert_abs_diff_eq!(v.re, 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(v.im, -4.0 * (y * (1.0 - y)).sqrt(), epsilon = 1e-14);
        }
        // vanishes at the endpoints
        assert_eq!(eigenfunction_q2(0.5, 3, 0.0).norm(), 0.0);
        assert_eq!(eigenfunction_q2(0.5, 3, 1.0).norm(), 0.0);
    }

    #[test]
    fn q2_matches_transformed_monic_construction() {
        for &nu in &[0.25, 1.0] {
            for n in 0..=5u32 {
                for &y in &[0.17, 0.42, 0.81] {
                    let generic = eigenfunction_generic(1, nu, n, y).unwrap();
                    let from_monic = generic[n as usize][(2, 2)];
                    let closed = eigenfunction_q2(nu, n, y);
                    assert_abs_diff_eq!(from_monic.re, closed.re, epsilon = 1e-10);
                    assert_abs_diff_eq!(from_monic.im, closed.im, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn generic_family_is_block_diagonal() {
        for &(ell, splits) in &[(1u32, 2usize), (2, 3)] {
            let fam = eigenfunction_generic(ell, 0.75, 4, 0.37).unwrap();
            for q in &fam {
                let dim = q.nrows();
                for r in 0..splits {
                    for c in splits..dim {
                        assert!(q[(r, c)].norm() < 1e-11, "coupling at ({r},{c})");
                        assert!(q[(c, r)].norm() < 1e-11);
                    }
                }
            }
        }
    }

    #[test]
    fn q1_continuous_through_midpoint() {
        let nu = 1.0;
        let n = 3;
        let left = eigenfunction_q1(nu, n, 0.5 - 1e-6).unwrap();
        let mid = eigenfunction_q1(nu, n, 0.5).unwrap();
        let right = eigenfunction_q1(nu, n, 0.5 + 1e-6).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let l = left[(i, j)].re;
                let m = mid[(i, j)].re;
                let r = right[(i, j)].re;
                assert!((l - m).abs() < 1e-4 && (r - m).abs() < 1e-4,
                    "entry ({i},{j}): {l} {m} {r}");
            }
        }
    }
}
