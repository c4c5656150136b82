//! Independent verification machinery.
//!
//! Everything here is deliberately disjoint from the formulas it checks:
//! the matrix exponential never touches the Karlin-McGregor quadrature path,
//! the finite-difference operator application never uses analytic
//! derivatives, and the brute-force Krawtchouk sum has no closed form.

use crate::error::{Error, Result};
use crate::specfun::{binomial, krawtchouk};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

/// Padé(13) coefficients from the scaling-and-squaring method.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

fn one_norm(m: &DMatrix<f64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential `exp(t M)` by scaling-and-squaring with a Padé(13)
/// rational approximant.
pub fn expm(m: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "expm needs a square matrix");
    let a = m * t;
    if n == 0 {
        return a;
    }
    if n == 1 {
        return DMatrix::from_element(1, 1, a[(0, 0)].exp());
    }

    let theta13 = 5.371_920_351_148_152;
    let norm = one_norm(&a);
    let s = if norm > theta13 {
        (norm / theta13).log2().ceil() as u32
    } else {
        0
    };
    let a = a / 2f64.powi(s as i32);

    let eye = DMatrix::<f64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    let u_inner = &a6 * PADE13[13] + &a4 * PADE13[11] + &a2 * PADE13[9];
    let u = &a
        * (&a6 * &u_inner + &a6 * PADE13[7] + &a4 * PADE13[5] + &a2 * PADE13[3] + &eye * PADE13[1]);
    let v_inner = &a6 * PADE13[12] + &a4 * PADE13[10] + &a2 * PADE13[8];
    let v = &a6 * &v_inner + &a6 * PADE13[6] + &a4 * PADE13[4] + &a2 * PADE13[2] + &eye * PADE13[0];

    let lhs = &v - &u;
    let rhs = &v + &u;
    let mut r = lhs
        .lu()
        .solve(&rhs)
        .expect("Pade denominator is singular; matrix norm out of range");

    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Three-point finite-difference application of the operator
/// `y(1-y) d^2/dy^2 + drift(y) d/dy + potential(y)` to a scalar function.
pub fn apply_operator_fd<D, P, F>(drift: D, potential: P, f: F, y: f64, h: f64) -> f64
where
    D: Fn(f64) -> f64,
    P: Fn(f64) -> f64,
    F: Fn(f64) -> f64,
{
    let (fp, f0, fm) = (f(y + h), f(y), f(y - h));
    y * (1.0 - y) * (fp - 2.0 * f0 + fm) / (h * h) + drift(y) * (fp - fm) / (2.0 * h)
        + potential(y) * f0
}

/// Five-point (fourth-order) variant for matrix-valued eigenfunction checks:
/// `y(1-y) F'' + diag(drift) F' + coupling F`, with the drift applied per row.
pub fn apply_generator_fd5<F>(
    drift: &[f64],
    coupling: &DMatrix<f64>,
    f: F,
    y: f64,
    h: f64,
) -> DMatrix<Complex64>
where
    F: Fn(f64) -> DMatrix<Complex64>,
{
    let (f2p, fp, f0, fm, f2m) = (
        f(y + 2.0 * h),
        f(y + h),
        f(y),
        f(y - h),
        f(y - 2.0 * h),
    );
    let c = |v: f64| Complex64::new(v, 0.0);
    let d2 = (-&f2p + &fp * c(16.0) - &f0 * c(30.0) + &fm * c(16.0) - &f2m) / c(12.0 * h * h);
    let d1 = (-&f2p + &fp * c(8.0) - &fm * c(8.0) + &f2m) / c(12.0 * h);
    let mut out = d2 * Complex64::new(y * (1.0 - y), 0.0);
    for i in 0..out.nrows() {
        for j in 0..out.ncols() {
            out[(i, j)] += Complex64::new(drift[i], 0.0) * d1[(i, j)];
            for k in 0..out.nrows() {
                out[(i, j)] += Complex64::new(coupling[(i, k)], 0.0) * f0[(k, j)];
            }
        }
    }
    out
}

/// Brute-force evaluation of `sum_j (-1)^j binom(h, j) K_{2j}(k)` on the
/// lattice of size `2 ell`. No closed form involved.
pub fn brute_krawtchouk_sum(ell: u32, k: u32, h: u32) -> Result<f64> {
    let mut sum = 0.0;
    for j in 0..=h {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binomial(h, j) * krawtchouk(2 * j, k, 2 * ell)?;
    }
    Ok(sum)
}

/// Monte Carlo mean and standard error of a seeded sampler.
///
/// `sampler(stream)` must derive all of its randomness from the given stream
/// index (see [`crate::rng::stream_rng`]); sampling runs in parallel but the
/// reduction is performed in index order, so results are deterministic.
pub fn mc_mean<F>(sampler: F, n_samples: usize, base_seed: u64) -> (f64, f64)
where
    F: Fn(u64) -> f64 + Sync,
{
    assert!(n_samples >= 2, "mc_mean needs at least 2 samples");
    let values: Vec<f64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| sampler(i ^ base_seed.rotate_left(17)))
        .collect();
    let mean = values.iter().sum::<f64>() / n_samples as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (n_samples as f64 - 1.0);
    (mean, (var / n_samples as f64).sqrt())
}

/// Tolerance interpretation for an [`OracleReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TolMode {
    Abs,
    Rel,
    AbsOrRel,
}

/// Outcome of one oracle comparison, serializable as a JSON line.
///
/// For matrix-valued comparisons, `computed`/`reference` carry the worst
/// offending entry pair.
#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub name: String,
    pub computed: f64,
    pub reference: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tolerance: f64,
    pub mode: TolMode,
    pub passed: bool,
}

impl OracleReport {
    pub fn new(name: impl Into<String>, computed: f64, reference: f64, tolerance: f64, mode: TolMode) -> Self {
        let abs_err = (computed - reference).abs();
        let rel_err = if reference.abs() > 0.0 {
            abs_err / reference.abs()
        } else {
            abs_err
        };
        let passed = match mode {
            TolMode::Abs => abs_err <= tolerance,
            TolMode::Rel => rel_err <= tolerance,
            TolMode::AbsOrRel => abs_err <= tolerance || rel_err <= tolerance,
        };
        OracleReport {
            name: name.into(),
            computed,
            reference,
            abs_err,
            rel_err,
            tolerance,
            mode,
            passed,
        }
    }

    /// Report for a matrix comparison: picks the entry with the worst
    /// absolute error as the representative pair.
    pub fn from_matrices(
        name: impl Into<String>,
        computed: &DMatrix<f64>,
        reference: &DMatrix<f64>,
        tolerance: f64,
        mode: TolMode,
    ) -> Self {
        let mut worst = (0usize, 0usize);
        let mut worst_err = -1.0;
        for i in 0..computed.nrows() {
            for j in 0..computed.ncols() {
                let e = (computed[(i, j)] - reference[(i, j)]).abs();
                if e > worst_err {
                    worst_err = e;
                    worst = (i, j);
                }
            }
        }
        Self::new(name, computed[worst], reference[worst], tolerance, mode)
    }
}

/// Serialize reports as JSON lines.
pub fn reports_to_jsonl(reports: &[OracleReport]) -> Result<String> {
    let mut out = String::new();
    for r in reports {
        out.push_str(&serde_json::to_string(r).map_err(Error::Json)?);
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    #[test]
    fn expm_identity_at_t_zero() {
        let m = DMatrix::from_row_slice(3, 3, &[0.1, 0.2, 0.0, -0.4, 0.3, 0.1, 0.0, 1.0, -2.0]);
        let e = expm(&m, 0.0);
        assert!((e - DMatrix::<f64>::identity(3, 3)).amax() < 1e-15);
    }

    #[test]
    fn expm_scalar() {
        let m = DMatrix::from_element(1, 1, -0.5);
        assert_abs_diff_eq!(expm(&m, 2.0)[(0, 0)], (-1.0f64).exp(), epsilon = 1e-14);
    }

    #[test]
    fn expm_two_state_chain_closed_form() {
        // generator [[-a, a], [b, -b]]: P(t) has closed form via r = a + b
        let (a, b, t) = (0.7, 0.4, 1.3);
        let g = DMatrix::from_row_slice(2, 2, &[-a, a, b, -b]);
        let p = expm(&g, t);
        let r = a + b;
        let decay = (-r * t).exp();
        let p00 = (b + a * decay) / r;
        let p01 = a * (1.0 - decay) / r;
        assert_abs_diff_eq!(p[(0, 0)], p00, epsilon = 1e-13);
        assert_abs_diff_eq!(p[(0, 1)], p01, epsilon = 1e-13);
    }

    #[test]
    fn expm_conservative_row_sums() {
        // random-ish conservative generator, 40 states
        let n = 40;
        let mut g = DMatrix::<f64>::zeros(n, n);
        let mut rng = stream_rng(11, 0);
        for i in 0..n {
            let mut total = 0.0;
            for j in 0..n {
                if i != j {
                    let v: f64 = rng.gen::<f64>() * 0.3;
                    g[(i, j)] = v;
                    total += v;
                }
            }
            g[(i, i)] = -total;
        }
        let p = expm(&g, 2.5);
        for i in 0..n {
            let s: f64 = p.row(i).iter().sum();
            assert_abs_diff_eq!(s, 1.0, epsilon = 1e-10);
        }
        assert!(p.iter().all(|&v| v > -1e-12));
    }

    #[test]
    fn fd_apply_basics() {
        let z = |_: f64| 0.0;
        let v = apply_operator_fd(|y| 2.0 * y, z, |_| 3.5, 0.4, 1e-5);
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-8);
        let v = apply_operator_fd(|y| 2.0 * y, z, |y| y, 0.4, 1e-5);
        assert_abs_diff_eq!(v, 0.8, epsilon = 1e-8);
    }

    #[test]
    fn fd_apply_second_order_convergence() {
        // smooth test function: error should drop ~4x when h halves
        let f = |y: f64| (3.0 * y).sin();
        let drift = |y: f64| 1.0 - 2.0 * y;
        let pot = |_: f64| -0.3;
        let y: f64 = 0.37;
        let exact = y * (1.0 - y) * (-9.0) * (3.0 * y).sin() + drift(y) * 3.0 * (3.0 * y).cos()
            + pot(y) * f(y);
        let e1 = (apply_operator_fd(drift, pot, f, y, 2e-3) - exact).abs();
        let e2 = (apply_operator_fd(drift, pot, f, y, 1e-3) - exact).abs();
        let ratio = e1 / e2;
        assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn brute_sum_matches_trivial_cases() {
        for ell in 1..=4u32 {
            for k in 0..=2 * ell {
                assert_eq!(brute_krawtchouk_sum(ell, k, 0).unwrap(), 1.0);
            }
        }
        // ell = 1, k = 1, h = 1: (-1)(-1) / ((-1)(-1/2)) = 2
        assert_abs_diff_eq!(brute_krawtchouk_sum(1, 1, 1).unwrap(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn mc_mean_constant_and_bernoulli() {
        let (m, se) = mc_mean(|_| 2.5, 100, 1);
        assert_eq!(m, 2.5);
        assert_eq!(se, 0.0);

        let (m, se) = mc_mean(
            |stream| {
                let mut rng = stream_rng(42, stream);
                if rng.gen::<f64>() < 0.5 {
                    1.0
                } else {
                    0.0
                }
            },
            100_000,
            42,
        );
        assert!((m - 0.5).abs() < 3.0 * se.max(1.5e-3), "mean {m}, se {se}");
    }

    #[test]
    fn mc_mean_deterministic() {
        let sampler = |stream: u64| {
            let mut rng = stream_rng(9, stream);
            rng.gen::<f64>()
        };
        let a = mc_mean(sampler, 5000, 9);
        let b = mc_mean(sampler, 5000, 9);
        assert_eq!(a, b);
    }

    #[test]
    fn report_modes() {
        let r = OracleReport::new("x", 1.0 + 1e-9, 1.0, 1e-8, TolMode::Abs);
        assert!(r.passed);
        let r = OracleReport::new("x", 2.0, 1.0, 1e-8, TolMode::AbsOrRel);
        assert!(!r.passed);
        let jl = reports_to_jsonl(&[r]).unwrap();
        assert!(jl.contains("\"passed\":false"));
    }
}
