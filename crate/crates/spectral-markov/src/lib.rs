//! Spectral analysis and simulation of level-phase Markov processes.
//!
//! Two families of bivariate Markov processes are built from one algebraic
//! source — matrix-valued orthogonal polynomials and their second-order
//! differential operator:
//!
//! * continuous-time chains on `levels x phases` (a scalar birth-and-death
//!   queue and a two-phase quasi-birth-and-death process), with explicit
//!   block-tridiagonal generators and Karlin-McGregor transition integrals,
//! * switching diffusions on `[0,1] x phases` (a killed Wright-Fisher-type
//!   diffusion, a two-phase switching diffusion, plus three-phase and
//!   killed-two-phase variants), with spectral transition densities,
//!   killing law, Feller boundary classification and invariant
//!   distributions.
//!
//! Module map:
//!
//! * [`specfun`] — shifted factorials, Krawtchouk and Gegenbauer
//!   polynomials, Gauss-Jacobi quadrature;
//! * [`spherical`] — the matrix-valued machinery shared by everything else
//!   (`Psi_0`, the diagonal conjugator `S`, weights, monic recurrence,
//!   norms, the conjugated operator and its splitting);
//! * [`qbd`] — the chains: generators, transition probabilities, potential
//!   coefficients, invariant measure, classification, exact simulation;
//! * [`diffusion`] — the switching diffusions: models, eigenfunctions,
//!   spectral series, survival, boundary classification, Euler-Maruyama
//!   simulation;
//! * [`oracles`] — independent verification machinery (matrix exponential,
//!   finite-difference operator application, brute-force sums, Monte Carlo
//!   estimators);
//! * [`validate`] — per-model oracle suites backing the CLI `validate`
//!   subcommand.
//!
//! Every sampler is seeded and deterministic; see [`rng::stream_rng`].
//!
//! The `examples/` directory holds one runnable example per capability;
//! `spectral-markov --help` exposes the same surface as a CLI.

pub mod config;
pub mod diffusion;
pub mod error;
pub mod io;
pub mod oracles;
pub mod qbd;
pub mod rng;
pub mod specfun;
pub mod spherical;
pub mod validate;

pub use error::{Error, Result};
