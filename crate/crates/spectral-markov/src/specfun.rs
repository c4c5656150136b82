//! Scalar special functions and Gauss-Jacobi quadrature.
//!
//! Everything downstream (weights, norms, Karlin-McGregor integrals,
//! orthogonality checks) is built on the shifted factorial, the Krawtchouk
//! and Gegenbauer families and quadrature rules for the weight
//! `y^alpha (1-y)^beta` on `[0, 1]`.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use statrs::function::gamma::ln_gamma;

/// Shifted factorial (Pochhammer symbol) `(a)_n = a (a+1) ... (a+n-1)`.
///
/// The empty product is 1. Computed as a running product; if the partial
/// product would overflow, the remaining factors are folded in through
/// log-gamma differences with the sign tracked separately (only reachable
/// for positive bases, where the gamma form is valid).
pub fn pochhammer(a: f64, n: u32) -> f64 {
    let mut acc = 1.0f64;
    for k in 0..n {
        let factor = a + k as f64;
        if acc.abs() > 1e280 && factor > 0.0 && a + n as f64 > 0.0 {
            // remaining factors are (a+k)...(a+n-1), all positive from here on
            let rest = ln_gamma(a + n as f64) - ln_gamma(a + k as f64);
            return acc * rest.exp();
        }
        acc *= factor;
    }
    acc
}

/// Binomial coefficient as `f64`; exact for the small arguments used here.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Krawtchouk polynomial `K_n(x; 1/2, cap)` evaluated by its hypergeometric
/// sum `sum_k (-n)_k (-x)_k 2^k / ((-cap)_k k!)`.
///
/// Degrees beyond the lattice size are rejected: `(-cap)_k` vanishes there
/// and the sum is no longer defined.
pub fn krawtchouk(n: u32, x: u32, cap: u32) -> Result<f64> {
    if n > cap {
        return Err(Error::KrawtchoukDegree { n, cap });
    }
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for k in 0..n {
        let kf = k as f64;
        term *= (kf - n as f64) * (kf - x as f64) * 2.0 / ((kf - cap as f64) * (kf + 1.0));
        sum += term;
    }
    Ok(sum)
}

/// Gegenbauer (ultraspherical) polynomial `C_n^{(lambda)}(x)` by the standard
/// three-term recurrence.
pub fn gegenbauer(n: u32, lambda: f64, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0 * lambda * x,
        _ => {
            let mut prev = 1.0;
            let mut cur = 2.0 * lambda * x;
            for k in 1..n {
                let kf = k as f64;
                let next =
                    (2.0 * x * (kf + lambda) * cur - (kf + 2.0 * lambda - 1.0) * prev) / (kf + 1.0);
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Natural log of the Beta function `B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Gauss-Jacobi quadrature rule on `[0, 1]` for the weight
/// `y^alpha (1 - y)^beta`.
///
/// `order` nodes integrate polynomials up to degree `2*order - 1` exactly.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    alpha: f64,
    beta: f64,
    order: usize,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `sum_i w_i f(y_i)`, i.e. the approximation of
    /// `int_0^1 f(y) y^alpha (1-y)^beta dy` for smooth `f`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&y, &w)| w * f(y))
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Build the Gauss-Jacobi rule via the Golub-Welsch algorithm: nodes are the
/// eigenvalues of the symmetric tridiagonal matrix of the Jacobi-polynomial
/// recurrence, weights come from the first eigenvector components. The
/// tridiagonal eigensolve keeps the construction robust for exponents near
/// -1/2, where Newton iteration on polynomial roots is delicate.
pub fn gauss_jacobi_rule(order: usize, alpha: f64, beta: f64) -> Result<QuadratureRule> {
    if order < 1 {
        return Err(Error::QuadratureOrder(order));
    }
    if !(alpha.is_finite() && alpha > -1.0) {
        return Err(Error::JacobiExponent {
            name: "alpha",
            value: alpha,
        });
    }
    if !(beta.is_finite() && beta > -1.0) {
        return Err(Error::JacobiExponent {
            name: "beta",
            value: beta,
        });
    }

    // Map to [-1, 1] with weight (1-x)^a (1+x)^b; y = (1+x)/2 sends
    // y^alpha -> (1+x)^alpha, so a = beta and b = alpha.
    let a = beta;
    let b = alpha;

    let mut m = DMatrix::<f64>::zeros(order, order);
    m[(0, 0)] = (b - a) / (a + b + 2.0);
    for k in 1..order {
        let kf = k as f64;
        let denom = 2.0 * kf + a + b;
        m[(k, k)] = (b * b - a * a) / (denom * (denom + 2.0));
        let off2 = if k == 1 {
            // (1 + a + b) cancels; written so a + b = -1 stays finite
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b))
        } else {
            4.0 * kf * (kf + a) * (kf + b) * (kf + a + b)
                / (denom * denom * (denom + 1.0) * (denom - 1.0))
        };
        let off = off2.sqrt();
        m[(k - 1, k)] = off;
        m[(k, k - 1)] = off;
    }

    let eig = m.symmetric_eigen();
    let total_mass = ln_beta(alpha + 1.0, beta + 1.0).exp();

    let mut pairs: Vec<(f64, f64)> = (0..order)
        .map(|i| {
            let x = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            ((1.0 + x) / 2.0, total_mass * v0 * v0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));

    let (nodes, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    debug_assert!(nodes.iter().all(|&y| y > 0.0 && y < 1.0));
    debug_assert!(weights.iter().all(|&w| w > 0.0));

    Ok(QuadratureRule {
        nodes,
        weights,
        alpha,
        beta,
        order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pochhammer_basics() {
        assert_eq!(pochhammer(3.0, 0), 1.0);
        assert_eq!(pochhammer(1.0, 5), 120.0);
        // (2nu+3)_{n-1} at nu = 0, n = 3
        assert_eq!(pochhammer(3.0, 2), 12.0);
        assert_eq!(pochhammer(-2.0, 4), 0.0);
        // large-n path stays finite and accurate
        let big = pochhammer(2.5, 180);
        let log_ref = ln_gamma(182.5) - ln_gamma(2.5);
        assert_abs_diff_eq!(big.ln(), log_ref, epsilon = 1e-9);
    }

    #[test]
    fn krawtchouk_values() {
        for x in 0..5u32 {
            assert_eq!(krawtchouk(0, x, 4).unwrap(), 1.0);
        }
        // K_{2j}(ell) = (-1)^j binom(ell, j) / binom(2 ell, 2j) at ell = 2, j = 1
        assert_abs_diff_eq!(krawtchouk(2, 2, 4).unwrap(), -1.0 / 3.0, epsilon = 1e-14);
        // odd degrees vanish at the midpoint
        assert_abs_diff_eq!(krawtchouk(1, 2, 4).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(krawtchouk(3, 2, 4).unwrap(), 0.0, epsilon = 1e-14);
        assert!(krawtchouk(5, 0, 4).is_err());
    }

    #[test]
    fn gegenbauer_low_degrees_and_zero_values() {
        assert_eq!(gegenbauer(0, 0.7, 0.3), 1.0);
        assert_abs_diff_eq!(gegenbauer(1, 0.7, 0.3), 2.0 * 0.7 * 0.3, epsilon = 1e-15);
        // C_{2m}(0) = (-1)^m (lambda)_m / m!, C_{2m+1}(0) = 0
        for lambda in [0.6, 1.5, 2.0] {
            for m in 0..5u32 {
                let want = (-1.0f64).powi(m as i32) * pochhammer(lambda, m)
                    / pochhammer(1.0, m);
                assert_abs_diff_eq!(gegenbauer(2 * m, lambda, 0.0), want, epsilon = 1e-12);
                assert_abs_diff_eq!(gegenbauer(2 * m + 1, lambda, 0.0), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn gegenbauer_parity() {
        for n in 0..8u32 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            for &x in &[0.17, 0.41, 0.93] {
                let left = gegenbauer(n, 1.3, -x);
                let right = sign * gegenbauer(n, 1.3, x);
                assert_abs_diff_eq!(left, right, epsilon = 1e-12 * right.abs().max(1.0));
            }
        }
    }

    #[test]
    fn midpoint_rule_for_legendre_case() {
        let rule = gauss_jacobi_rule(1, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(rule.nodes()[0], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(rule.weights()[0], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn degree_exactness_order_two() {
        let rule = gauss_jacobi_rule(2, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(rule.integrate(|y| y * y), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn beta_closed_form_for_half_exponents() {
        // int_0^1 [y(1-y)]^{nu - 1/2} dy at nu = 1 is Beta(3/2, 3/2) = pi/8
        let rule = gauss_jacobi_rule(8, 0.5, 0.5).unwrap();
        assert_abs_diff_eq!(
            rule.integrate(|_| 1.0),
            std::f64::consts::PI / 8.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn monomial_exactness_against_beta() {
        for &(order, alpha, beta) in &[(6usize, -0.25, -0.25), (9, 0.75, -0.5), (14, 1.5, 2.25)] {
            for k in 0..2 * order {
                let exact = (ln_beta(k as f64 + alpha + 1.0, beta + 1.0)).exp();
                let quad = gauss_jacobi_rule(order, alpha, beta)
                    .unwrap()
                    .integrate(|y| y.powi(k as i32));
                assert!(
                    (quad - exact).abs() <= 1e-12 * exact.abs(),
                    "order {order}, alpha {alpha}, beta {beta}, k {k}: {quad} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn krawtchouk_discrete_orthogonality() {
        // sum_x binom(cap,x) 2^{-cap} K_m(x) K_n(x) is diagonal; the
        // normalizer is computed by brute force from the m = n case.
        for cap in 1..=8u32 {
            for m in 0..=cap {
                for n in 0..=cap {
                    let s: f64 = (0..=cap)
                        .map(|x| {
                            binomial(cap, x)
                                * 0.5f64.powi(cap as i32)
                                * krawtchouk(m, x, cap).unwrap()
                                * krawtchouk(n, x, cap).unwrap()
                        })
                        .sum();
                    if m == n {
                        assert!(s > 0.0);
                    } else {
                        assert!(s.abs() < 1e-12, "cap {cap} m {m} n {n}: {s}");
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(gauss_jacobi_rule(0, 0.0, 0.0).is_err());
        assert!(gauss_jacobi_rule(4, -1.0, 0.0).is_err());
        assert!(gauss_jacobi_rule(4, 0.0, -1.2).is_err());
    }
}
