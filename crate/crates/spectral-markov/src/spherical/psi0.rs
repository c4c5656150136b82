//! The building block `Psi_0(y) = K M Upsilon(y) K*` and the diagonal
//! conjugator `S(y)` made of its middle column.

use super::{ModelParams, StructureMatrices};
use crate::error::{Error, Result};
use crate::specfun::{binomial, pochhammer};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Evaluator of `Psi_0(y)`. Entries are complex away from the endpoints
/// because the diagonal factor carries `(-1)^{3j/2}` phases; the assembled
/// weights downstream are certified real.
#[derive(Debug, Clone)]
pub struct Psi0 {
    ell: u32,
    krawtchouk: DMatrix<f64>,
    binomials: DMatrix<f64>,
}

impl Psi0 {
    pub fn new(params: ModelParams) -> Self {
        let sm = StructureMatrices::new(params);
        Psi0 {
            ell: params.ell(),
            krawtchouk: sm.krawtchouk,
            binomials: sm.binomials,
        }
    }

    pub fn dim(&self) -> usize {
        2 * self.ell as usize + 1
    }

    /// `Psi_0(y)` for `y` in `[0, 1]`.
    pub fn evaluate(&self, y: f64) -> DMatrix<Complex64> {
        let n = self.dim();
        let ell2 = 2 * self.ell as usize;
        // Upsilon_jj = (-1)^{3j/2} y^{j/2} (1-y)^{(2l-j)/2}; the phase cycles
        // through 1, -i, -1, i.
        let phases = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
        ];
        let upsilon: Vec<Complex64> = (0..n)
            .map(|j| {
                phases[j % 4]
                    * y.powf(j as f64 / 2.0)
                    * (1.0 - y).powf((ell2 - j) as f64 / 2.0)
            })
            .collect();
        DMatrix::from_fn(n, n, |i, m| {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += self.krawtchouk[(i, j)]
                    * self.binomials[(j, j)]
                    * upsilon[j]
                    * self.krawtchouk[(m, j)];
            }
            acc
        })
    }
}

/// Coefficient of `y^h` in the `(k, ell)` entry of `Psi_0`:
/// `(-1)^h binom(ell, h) (-k)_h (-2l+k)_h / ((-l)_h (-l+1/2)_h)`.
pub fn ell_column_coefficient(ell: u32, k: u32, h: u32) -> f64 {
    debug_assert!(k <= 2 * ell && h <= ell);
    let sign = if h % 2 == 0 { 1.0 } else { -1.0 };
    sign * binomial(ell, h) * pochhammer(-(k as f64), h) * pochhammer(k as f64 - 2.0 * ell as f64, h)
        / (pochhammer(-(ell as f64), h) * pochhammer(0.5 - ell as f64, h))
}

/// The diagonal matrix `S(y)` whose entries are the middle column of
/// `Psi_0`, stored as polynomial coefficients so the first two derivatives
/// are exact.
#[derive(Debug, Clone)]
pub struct SMatrix {
    /// `coeffs[k][h]` is the coefficient of `y^h` in `S_kk`.
    coeffs: Vec<Vec<f64>>,
}

impl SMatrix {
    pub fn new(params: ModelParams) -> Self {
        let ell = params.ell();
        let coeffs = (0..=2 * ell)
            .map(|k| {
                (0..=ell)
                    .map(|h| ell_column_coefficient(ell, k, h))
                    .collect()
            })
            .collect();
        SMatrix { coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// `d^deriv/dy^deriv S_kk(y)`.
    pub fn entry(&self, k: usize, y: f64, deriv: u32) -> f64 {
        let c = &self.coeffs[k];
        let mut acc = 0.0;
        for (h, &ch) in c.iter().enumerate().skip(deriv as usize) {
            let falling = pochhammer((h - deriv as usize + 1) as f64, deriv);
            acc += ch * falling * y.powi((h - deriv as usize) as i32);
        }
        acc
    }

    /// Diagonal of `S^{(deriv)}(y)` as a vector.
    pub fn diagonal(&self, y: f64, deriv: u32) -> Vec<f64> {
        (0..self.dim()).map(|k| self.entry(k, y, deriv)).collect()
    }

    /// Errors when any diagonal entry of `S(y)` is (numerically) zero;
    /// those are the points excluded from property grids.
    pub fn checked_inverse_diagonal(&self, y: f64) -> Result<Vec<f64>> {
        let diag = self.diagonal(y, 0);
        for (k, &v) in diag.iter().enumerate() {
            if v.abs() < 1e-13 {
                return Err(Error::SingularS { y, index: k });
            }
        }
        Ok(diag.into_iter().map(|v| 1.0 / v).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::brute_krawtchouk_sum;
    use crate::specfun::binomial;
    use approx::assert_abs_diff_eq;

    #[test]
    fn coefficients_match_brute_force_sum() {
        // exhaustive over ell <= 4: closed form vs direct Krawtchouk sum
        for ell in 1..=4u32 {
            for k in 0..=2 * ell {
                for h in 0..=ell {
                    let sign = if h % 2 == 0 { 1.0 } else { -1.0 };
                    let brute =
                        sign * binomial(ell, h) * brute_krawtchouk_sum(ell, k, h).unwrap();
                    let closed = ell_column_coefficient(ell, k, h);
                    assert!(
                        (brute - closed).abs() <= 1e-12,
                        "ell {ell} k {k} h {h}: {closed} vs {brute}"
                    );
                }
            }
        }
    }

    #[test]
    fn coefficient_trivial_and_displayed_cases() {
        for ell in 1..=4u32 {
            for k in 0..=2 * ell {
                assert_eq!(ell_column_coefficient(ell, k, 0), 1.0);
            }
        }
        assert_abs_diff_eq!(ell_column_coefficient(1, 1, 1), -2.0, epsilon = 1e-14);
    }

    #[test]
    fn s_matrix_displayed_entries() {
        let s1 = SMatrix::new(ModelParams::new(1, 1.0).unwrap());
        for &y in &[0.0, 0.21, 0.5, 0.77, 1.0] {
            assert_abs_diff_eq!(s1.entry(0, y, 0), 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(s1.entry(1, y, 0), 1.0 - 2.0 * y, epsilon = 1e-14);
            assert_abs_diff_eq!(s1.entry(2, y, 0), 1.0, epsilon = 1e-14);
        }
        let s2 = SMatrix::new(ModelParams::new(2, 0.5).unwrap());
        for &y in &[0.1, 0.35, 0.8] {
            assert_abs_diff_eq!(
                s2.entry(2, y, 0),
                1.0 - 8.0 / 3.0 * y * (1.0 - y),
                epsilon = 1e-13
            );
            assert_abs_diff_eq!(s2.entry(1, y, 0), 1.0 - 2.0 * y, epsilon = 1e-13);
        }
    }

    #[test]
    fn s_derivatives_match_finite_differences() {
        let s = SMatrix::new(ModelParams::new(3, 0.25).unwrap());
        let h = 1e-6;
        for k in 0..7 {
            for &y in &[0.2, 0.6] {
                let d1 = (s.entry(k, y + h, 0) - s.entry(k, y - h, 0)) / (2.0 * h);
                assert_abs_diff_eq!(s.entry(k, y, 1), d1, epsilon = 1e-7);
                let d2 =
                    (s.entry(k, y + h, 0) - 2.0 * s.entry(k, y, 0) + s.entry(k, y - h, 0)) / (h * h);
                assert_abs_diff_eq!(s.entry(k, y, 2), d2, epsilon = 1e-4);
            }
        }
    }

    #[test]
    fn consecutive_ratio_sign_lemma() {
        // S_{k+1,k+1} / S_kk >= 0 on [0, 1/2), <= 0 on (1/2, 1]
        for ell in 1..=4u32 {
            let s = SMatrix::new(ModelParams::new(ell, 1.0).unwrap());
            for i in 0..1000 {
                let y = (i as f64 + 0.5) / 1000.0;
                if (y - 0.5).abs() < 1e-6 {
                    continue;
                }
                for k in 0..2 * ell as usize {
                    let ratio = s.entry(k + 1, y, 0) / s.entry(k, y, 0);
                    if y < 0.5 {
                        assert!(ratio >= -1e-12, "ell {ell} k {k} y {y}: {ratio}");
                    } else {
                        assert!(ratio <= 1e-12, "ell {ell} k {k} y {y}: {ratio}");
                    }
                }
            }
        }
    }

    #[test]
    fn singular_points_are_flagged() {
        let s = SMatrix::new(ModelParams::new(1, 1.0).unwrap());
        assert!(s.checked_inverse_diagonal(0.5).is_err());
        assert!(s.checked_inverse_diagonal(0.3).is_ok());
    }

    #[test]
    fn psi0_at_zero_is_all_ones() {
        // Upsilon(0) = diag(1, 0, ..., 0), so Psi_0(0) = K M E_00 K* = ones
        for ell in 1..=2u32 {
            let psi = Psi0::new(ModelParams::new(ell, 1.0).unwrap());
            let p0 = psi.evaluate(0.0);
            for v in p0.iter() {
                assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-12);
                assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn psi0_middle_column_is_s() {
        for ell in 1..=3u32 {
            let params = ModelParams::new(ell, 1.0).unwrap();
            let psi = Psi0::new(params);
            let s = SMatrix::new(params);
            for &y in &[0.12, 0.5, 0.83] {
                let p = psi.evaluate(y);
                for k in 0..params.dim() {
                    let v = p[(k, ell as usize)];
                    assert_abs_diff_eq!(v.re, s.entry(k, y, 0), epsilon = 1e-12);
                    assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
                }
            }
        }
    }
}
