//! Phase-jump law and invariant distribution of the two-phase switching
//! diffusion.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

/// Embedded-jump-chain phase transition probabilities at position `y`:
/// the two switch rates normalized by their sum.
///
/// `p12 = nu(1-2y)^2 / (nu(1-2y)^2 + 1 + nu)` and `p21` its complement.
pub fn phase_jump_probs(nu: f64, y: f64) -> (f64, f64) {
    let w2 = (1.0 - 2.0 * y).powi(2);
    let denom = nu * w2 + 1.0 + nu;
    (nu * w2 / denom, (1.0 + nu) / denom)
}

/// The vector-valued invariant density evaluated at one point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InvariantPsi {
    pub values: [f64; 2],
    /// False when `nu < 1/2`: the process is not positive recurrent there
    /// and the density is only the absolutely continuous part of the
    /// invariant distribution (mass also sits at the boundaries).
    pub positive_recurrent: bool,
}

/// `psi(y) = 4^nu Gamma(nu+2) [y(1-y)]^{nu-1/2} / (sqrt(pi)(2+nu)Gamma(nu+3/2))
///           (1+nu, nu(1-2y)^2)`.
///
/// Integrates to one by construction; computable for `nu > -1/2`, flagged
/// below `nu = 1/2`.
pub fn invariant_psi(nu: f64, y: f64) -> InvariantPsi {
    let pref = (nu * 4f64.ln() + ln_gamma(nu + 2.0)
        - 0.5 * std::f64::consts::PI.ln()
        - (2.0 + nu).ln()
        - ln_gamma(nu + 1.5))
    .exp()
        * (y * (1.0 - y)).powf(nu - 0.5);
    InvariantPsi {
        values: [pref * (1.0 + nu), pref * nu * (1.0 - 2.0 * y).powi(2)],
        positive_recurrent: nu >= 0.5,
    }
}

/// Closed forms of `int psi_1` and `int psi_2`: the total switch-matrix
/// weights `(1+nu)` and `nu <(1-2y)^2>` under the Jacobi density.
/// `<(1-2y)^2> = 1 - (2nu+1)/(2(nu+1)) = 1/(2(nu+1))`.
pub fn invariant_psi_masses(nu: f64) -> (f64, f64) {
    let m2 = nu / (2.0 * (nu + 1.0));
    let total = (1.0 + nu) + m2;
    ((1.0 + nu) / total, m2 / total)
}
