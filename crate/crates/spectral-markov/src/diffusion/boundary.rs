//! Feller boundary classification by numerical scale/speed integrals.
//!
//! For a diffusion `y(1-y) f'' + b(y) f'` on an interval, the class of an
//! endpoint is decided by the convergence of
//! `Sigma = int s(x) M(x, c] dx` and `N = int m(x) S(x, c] dx`
//! near the endpoint, with `s` the scale density and `m` the speed density.
//! Convergence is judged by the decay of partial integrals over geometric
//! shells toward the endpoint; a decay rate too close to the margin is
//! reported as undecided rather than guessed.

use crate::error::{Error, Result};
use serde::Serialize;

/// Feller class of a boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryClass {
    Regular,
    Entrance,
    Exit,
    Natural,
}

/// Which end of the interval to examine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Lower,
    Upper,
}

/// Diagnostics attached to a classification: partial sums and shell decay
/// ratios of the two Feller integrals.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FellerIntegrals {
    pub sigma_partial: f64,
    pub sigma_ratio: f64,
    pub n_partial: f64,
    pub n_ratio: f64,
}

const SHELLS: usize = 42;
const TAIL: usize = 12;
const GL_POINTS: usize = 24;
const FINITE_RATIO: f64 = 0.95;
const INFINITE_RATIO: f64 = 0.98;
const BLOWUP: f64 = 1e12;

/// Classify the boundary `side` of `interval` for the diffusion with drift
/// `drift` and diffusion coefficient `y(1-y)`.
///
/// The drift must be smooth in the interior; singularities at either end
/// (such as the `1/(1-2y)` barrier drift approached from one side) are
/// exactly what the shell scheme is built to resolve.
pub fn boundary_classify<D>(drift: D, interval: (f64, f64), side: Side) -> Result<(BoundaryClass, FellerIntegrals)>
where
    D: Fn(f64) -> f64,
{
    let (a, b) = interval;
    assert!(a < b, "empty interval");
    let (gl_x, gl_w) = gauss_legendre_table();
    let c = 0.5 * (a + b);
    let (endpoint, sign) = match side {
        Side::Lower => (a, 1.0),
        Side::Upper => (b, -1.0),
    };

    // shell edges from c toward the endpoint at geometric distances
    let d0 = (c - endpoint).abs();
    let edges: Vec<f64> = (0..=SHELLS)
        .map(|k| endpoint + sign * d0 * 0.5f64.powi(k as i32))
        .collect();

    let seg = |f: &dyn Fn(f64) -> f64, x0: f64, x1: f64| -> f64 {
        let mid = 0.5 * (x0 + x1);
        let half = 0.5 * (x1 - x0);
        gl_x.iter()
            .zip(gl_w)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    };

    // log-scale function B(y) = int_c^y drift/a, accumulated shell by shell
    let integrand = |y: f64| drift(y) / (y * (1.0 - y));
    let mut b_at_edge = vec![0.0f64; SHELLS + 1];
    for k in 0..SHELLS {
        b_at_edge[k + 1] = b_at_edge[k] + seg(&integrand, edges[k], edges[k + 1]);
    }
    let scale = |y: f64, k: usize| -> f64 {
        (-(b_at_edge[k] + seg(&integrand, edges[k], y))).exp()
    };
    let speed = |y: f64, k: usize| -> f64 { 1.0 / (y * (1.0 - y) * scale(y, k)) };

    // per-shell masses of s and m, then the Sigma and N increments with the
    // inner cumulative taken at shell resolution
    let mut s_shell = vec![0.0; SHELLS];
    let mut m_shell = vec![0.0; SHELLS];
    for k in 0..SHELLS {
        s_shell[k] = seg(&|y| scale(y, k), edges[k], edges[k + 1]).abs();
        m_shell[k] = seg(&|y| speed(y, k), edges[k], edges[k + 1]).abs();
    }
    let mut sigma_inc = vec![0.0; SHELLS];
    let mut n_inc = vec![0.0; SHELLS];
    let (mut m_cum, mut s_cum) = (0.0, 0.0);
    for k in 0..SHELLS {
        sigma_inc[k] = s_shell[k] * (m_cum + 0.5 * m_shell[k]);
        n_inc[k] = m_shell[k] * (s_cum + 0.5 * s_shell[k]);
        m_cum += m_shell[k];
        s_cum += s_shell[k];
    }

    let (sigma_finite, sigma_partial, sigma_ratio) = decide(&sigma_inc)?;
    let (n_finite, n_partial, n_ratio) = decide(&n_inc)?;

    let class = match (sigma_finite, n_finite) {
        (true, true) => BoundaryClass::Regular,
        (false, true) => BoundaryClass::Entrance,
        (true, false) => BoundaryClass::Exit,
        (false, false) => BoundaryClass::Natural,
    };
    Ok((
        class,
        FellerIntegrals {
            sigma_partial,
            sigma_ratio,
            n_partial,
            n_ratio,
        },
    ))
}

/// Convergence decision from the tail of shell increments: a median ratio
/// clearly below one means geometric decay (finite), at or above one means
/// divergence; the narrow band in between is refused.
fn decide(increments: &[f64]) -> Result<(bool, f64, f64)> {
    let total: f64 = increments.iter().sum();
    if !total.is_finite() || total > BLOWUP {
        return Ok((false, total, f64::INFINITY));
    }
    let tail = &increments[increments.len() - TAIL..];
    let mut ratios: Vec<f64> = tail
        .windows(2)
        .filter(|w| w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .collect();
    if ratios.is_empty() {
        // increments underflowed to zero: absolutely convergent
        return Ok((true, total, 0.0));
    }
    ratios.sort_by(f64::total_cmp);
    let median = ratios[ratios.len() / 2];
    if median < FINITE_RATIO {
        Ok((true, total, median))
    } else if median >= INFINITE_RATIO {
        Ok((false, total, median))
    } else {
        Err(Error::BoundaryUndecided { ratio: median })
    }
}

fn gauss_legendre_table() -> (&'static [f64; GL_POINTS], &'static [f64; GL_POINTS]) {
    use std::sync::OnceLock;
    static TABLE: OnceLock<([f64; GL_POINTS], [f64; GL_POINTS])> = OnceLock::new();
    let t = TABLE.get_or_init(|| {
        // Legendre nodes on [-1, 1] via the same Golub-Welsch machinery
        let rule = crate::specfun::gauss_jacobi_rule(GL_POINTS, 0.0, 0.0)
            .expect("static Legendre rule");
        let mut x = [0.0; GL_POINTS];
        let mut w = [0.0; GL_POINTS];
        for (i, (node, weight)) in rule.iter().enumerate() {
            x[i] = 2.0 * node - 1.0;
            w[i] = 2.0 * weight;
        }
        (x, w)
    });
    (&t.0, &t.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phase1_drift(nu: f64) -> impl Fn(f64) -> f64 {
        move |y| (nu + 0.5) * (1.0 - 2.0 * y)
    }

    fn phase2_drift(nu: f64) -> impl Fn(f64) -> f64 {
        move |y| (nu + 1.5) * (1.0 - 2.0 * y) - 1.0 / (1.0 - 2.0 * y)
    }

    #[test]
    fn regular_below_half_entrance_above() {
        let (class, _) = boundary_classify(phase1_drift(0.25), (0.0, 1.0), Side::Lower).unwrap();
        assert_eq!(class, BoundaryClass::Regular);
        let (class, _) = boundary_classify(phase1_drift(1.0), (0.0, 1.0), Side::Lower).unwrap();
        assert_eq!(class, BoundaryClass::Entrance);
        // symmetric drift: same verdicts at the upper end
        let (class, _) = boundary_classify(phase1_drift(0.25), (0.0, 1.0), Side::Upper).unwrap();
        assert_eq!(class, BoundaryClass::Regular);
        let (class, _) = boundary_classify(phase1_drift(1.0), (0.0, 1.0), Side::Upper).unwrap();
        assert_eq!(class, BoundaryClass::Entrance);
    }

    #[test]
    fn interior_barrier_is_always_entrance() {
        for &nu in &[0.0, 0.25, 1.0, 3.0] {
            let (class, info) =
                boundary_classify(phase2_drift(nu), (0.0, 0.5), Side::Upper).unwrap();
            assert_eq!(class, BoundaryClass::Entrance, "nu = {nu}: {info:?}");
            let (class, _) =
                boundary_classify(phase2_drift(nu), (0.5, 1.0), Side::Lower).unwrap();
            assert_eq!(class, BoundaryClass::Entrance, "nu = {nu}");
        }
    }

    #[test]
    fn phase2_outer_boundary_matches_phase1() {
        // the extra (nu+3/2) vs (nu+1/2) and the barrier term leave the
        // outer endpoints' classes unchanged
        let (class, _) = boundary_classify(phase2_drift(1.0), (0.0, 0.5), Side::Lower).unwrap();
        assert_eq!(class, BoundaryClass::Entrance);
        let (class, _) = boundary_classify(phase2_drift(0.25), (0.0, 0.5), Side::Lower).unwrap();
        assert_eq!(class, BoundaryClass::Regular);
    }

    #[test]
    fn exit_case_detected() {
        // strong inward-negative drift -b/y pushes mass out through 0:
        // drift -1 near the lower end of (0,1) with a(y) = y(1-y):
        // s(y) ~ exp(int 1/a) keeps Sigma finite but N infinite.
        let (class, _) = boundary_classify(|_| -1.0, (0.0, 1.0), Side::Lower).unwrap();
        assert_eq!(class, BoundaryClass::Exit);
    }

    #[test]
    fn integral_diagnostics_are_attached() {
        let (_, info) = boundary_classify(phase1_drift(1.0), (0.0, 1.0), Side::Lower).unwrap();
        assert!(info.sigma_ratio > 1.0);
        assert!(info.n_ratio < 1.0);
        assert!(info.n_partial.is_finite());
    }
}
