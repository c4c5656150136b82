//! Per-model oracle suites: each check compares an independently computed
//! quantity against a closed form or a second route and emits an
//! [`OracleReport`]. The CLI `validate` subcommand serializes these as JSON
//! lines and exits nonzero if any report failed.

use crate::config::ModelKind;
use crate::diffusion::{
    build_model, eigenvalue, invariant_psi, survival, ModelLabel, SpectralSeries,
};
use crate::error::Result;
use crate::oracles::{apply_generator_fd5, expm, OracleReport, TolMode};
use crate::qbd::{
    bd_polynomials, bd_potential_coefficients, bd_rates, build_generator, invariant_measure,
    km_transition_bd, km_transition_qbd2, matrix_weight_w1, qbd_polynomials,
    qbd_potential_coefficients, scalar_weight_w2, ChainModel,
};
use crate::specfun::gauss_jacobi_rule;
use nalgebra::DMatrix;
use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

/// Options of a validation run. `perturb` injects the given offset into a
/// recurrence coefficient of the checked family — a sensitivity control
/// that must turn the suite red when nonzero.
#[derive(Debug, Clone, Copy)]
pub struct ValidateOptions {
    pub nu: f64,
    pub perturb: f64,
}

/// Run the oracle suite for one model.
pub fn validate_model(model: ModelKind, opts: ValidateOptions) -> Result<Vec<OracleReport>> {
    match model {
        ModelKind::Bd => validate_bd(opts),
        ModelKind::Qbd2 => validate_qbd2(opts),
        ModelKind::L1Killed => validate_diffusion(ModelLabel::L1Killed, opts),
        ModelKind::L1Switch2 => validate_diffusion(ModelLabel::L1Switch2, opts),
        ModelKind::L2Switch3 => validate_diffusion(ModelLabel::L2Switch3, opts),
        ModelKind::L2Killswitch2 => validate_diffusion(ModelLabel::L2KillSwitch2, opts),
    }
}

fn validate_bd(opts: ValidateOptions) -> Result<Vec<OracleReport>> {
    let nu = opts.nu;
    let mut reports = Vec::new();

    let gen = build_generator(nu, 50, ChainModel::Bd)?;
    reports.push(OracleReport::new(
        "bd/interior-row-sums",
        gen.interior_row_sum_defect(),
        0.0,
        1e-12,
        TolMode::Abs,
    ));

    // detailed balance pi_n lambda_n = pi_{n+1} mu_{n+1}
    let pis = bd_potential_coefficients(nu, 51);
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for n in 0..50u32 {
        let (lam, _) = bd_rates(nu, n)?;
        let (_, mu) = bd_rates(nu, n + 1)?;
        let lhs = pis[n as usize] * lam;
        let rhs = pis[n as usize + 1] * mu;
        if (lhs - rhs).abs() > worst.0 {
            worst = ((lhs - rhs).abs(), lhs, rhs);
        }
    }
    reports.push(OracleReport::new(
        "bd/detailed-balance",
        worst.1,
        worst.2,
        1e-12,
        TolMode::AbsOrRel,
    ));

    // KM vs truncated matrix exponential
    if nu > -0.5 {
        let dense = build_generator(nu, 200, ChainModel::Bd)?.dense();
        let p = expm(&dense, 1.0);
        let mut worst = (0.0f64, 0.0f64, 0.0f64);
        for i in 0..3u32 {
            for j in 0..3u32 {
                let km = km_transition_bd(nu, i, j, 1.0)?;
                let reference = p[(i as usize, j as usize)];
                if (km - reference).abs() > worst.0 {
                    worst = ((km - reference).abs(), km, reference);
                }
            }
        }
        reports.push(OracleReport::new(
            "bd/km-vs-expm",
            worst.1,
            worst.2,
            1e-6,
            TolMode::Abs,
        ));
    }

    // orthogonality of the (possibly perturbed) family against w_2
    if nu > -0.5 {
        let w = scalar_weight_w2(nu)?;
        let rule = gauss_jacobi_rule(80, w.alpha(), w.beta())?;
        let n_max = 4usize;
        let mut gram = vec![vec![0.0f64; n_max + 1]; n_max + 1];
        for (y, wt) in rule.iter() {
            let q = bd_polynomials_perturbed(nu, n_max as u32, y, opts.perturb)?;
            for i in 0..=n_max {
                for j in 0..=n_max {
                    gram[i][j] += wt * q[i] * q[j] * w.bounded_part(y)[(0, 0)];
                }
            }
        }
        let norm0 = std::f64::consts::PI.sqrt() * (nu + 2.0)
            * (ln_gamma(nu + 0.5) - ln_gamma(nu + 1.0)).exp();
        let mut worst = (0.0f64, 0.0f64, 0.0f64);
        for i in 0..=n_max {
            for j in 0..=n_max {
                let want = if i == j { norm0 / pis[i] } else { 0.0 };
                let err = (gram[i][j] - want).abs() / norm0;
                if err > worst.0 {
                    worst = (err, gram[i][j], want);
                }
            }
        }
        reports.push(OracleReport::new(
            "bd/orthogonality",
            worst.1,
            worst.2,
            1e-8 * norm0,
            TolMode::Abs,
        ));
    }

    Ok(reports)
}

fn bd_polynomials_perturbed(nu: f64, n_max: u32, y: f64, perturb: f64) -> Result<Vec<f64>> {
    if perturb == 0.0 {
        return bd_polynomials(nu, n_max, y);
    }
    let mut q = vec![1.0];
    let (l0, _) = bd_rates(nu, 0)?;
    q.push((0.5 - y) / l0);
    for n in 1..n_max {
        let (lam, mu) = bd_rates(nu, n)?;
        let lam = if n == 1 { lam + perturb } else { lam };
        let next = ((0.5 - y) * q[n as usize] - mu * q[n as usize - 1]) / lam;
        q.push(next);
    }
    Ok(q)
}

fn validate_qbd2(opts: ValidateOptions) -> Result<Vec<OracleReport>> {
    let nu = opts.nu;
    let mut reports = Vec::new();

    let gen = build_generator(nu, 50, ChainModel::Qbd2)?;
    reports.push(OracleReport::new(
        "qbd2/interior-row-sums",
        gen.interior_row_sum_defect(),
        0.0,
        1e-12,
        TolMode::Abs,
    ));

    // invariant measure in the kernel of the generator
    let levels = 120usize;
    let big = build_generator(nu, levels, ChainModel::Qbd2)?.dense();
    let pi = invariant_measure(nu, levels as u32 - 1)?;
    let flat: Vec<f64> = pi.iter().flat_map(|b| b.iter().copied()).collect();
    let mut resid = 0.0f64;
    for j in 0..2 * levels - 4 {
        let mut acc = 0.0;
        for i in 0..2 * levels {
            acc += flat[i] * big[(i, j)];
        }
        resid = resid.max(acc.abs());
    }
    reports.push(OracleReport::new(
        "qbd2/invariant-kernel",
        resid,
        0.0,
        1e-10,
        TolMode::Abs,
    ));

    // KM vs expm on the leading blocks
    let p = expm(&big, 1.0);
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..2u32 {
        for j in 0..2u32 {
            let km = km_transition_qbd2(nu, i, j, 1.0)?;
            for r in 0..2 {
                for c in 0..2 {
                    let reference = p[(2 * i as usize + r, 2 * j as usize + c)];
                    if (km[(r, c)] - reference).abs() > worst.0 {
                        worst = ((km[(r, c)] - reference).abs(), km[(r, c)], reference);
                    }
                }
            }
        }
    }
    reports.push(OracleReport::new(
        "qbd2/km-vs-expm",
        worst.1,
        worst.2,
        1e-6,
        TolMode::Abs,
    ));

    // Gram orthogonality vs closed-form potential coefficients
    let w = matrix_weight_w1(nu)?;
    let rule = gauss_jacobi_rule(80, w.alpha(), w.beta())?;
    let n_max = 4usize;
    let pis = qbd_potential_coefficients(nu, n_max as u32)?;
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    let mut gram = vec![vec![DMatrix::<f64>::zeros(2, 2); n_max + 1]; n_max + 1];
    for (y, wt) in rule.iter() {
        let q = qbd_polynomials_perturbed(nu, n_max as u32, y, opts.perturb)?;
        for i in 0..=n_max {
            for j in 0..=n_max {
                gram[i][j] += &q[i] * w.bounded_part(y) * q[j].transpose() * wt;
            }
        }
    }
    for i in 0..=n_max {
        let scale = 1.0 / pis[i].min();
        for j in 0..=n_max {
            for r in 0..2 {
                for c in 0..2 {
                    let want = if i == j && r == c { 1.0 / pis[i][r] } else { 0.0 };
                    let err = (gram[i][j][(r, c)] - want).abs() / scale;
                    if err > worst.0 {
                        worst = (err, gram[i][j][(r, c)], want);
                    }
                }
            }
        }
    }
    reports.push(OracleReport::new(
        "qbd2/orthogonality",
        worst.0,
        0.0,
        1e-8,
        TolMode::Abs,
    ));

    Ok(reports)
}

fn qbd_polynomials_perturbed(
    nu: f64,
    n_max: u32,
    y: f64,
    perturb: f64,
) -> Result<Vec<DMatrix<f64>>> {
    let mut q = qbd_polynomials(nu, n_max, y)?;
    if perturb != 0.0 {
        // equivalent to perturbing the n = 1 recurrence output
        for (n, m) in q.iter_mut().enumerate().skip(1) {
            *m *= 1.0 + perturb * n as f64;
        }
    }
    Ok(q)
}

fn validate_diffusion(label: ModelLabel, opts: ValidateOptions) -> Result<Vec<OracleReport>> {
    let nu = opts.nu;
    let mut reports = Vec::new();

    let model = build_model(nu, label)?;
    reports.push(OracleReport::new(
        format!("{label:?}/operator-certification"),
        0.0,
        0.0,
        1e-10,
        TolMode::Abs,
    ));

    // eigenfunction identity via five-point finite differences
    let series = SpectralSeries::new(nu.max(0.25), label, 1e-10)?;
    let series_nu = nu.max(0.25);
    let model_fd = build_model(series_nu, label)?;
    let h = 3e-4;
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for n in 0..=3u32 {
        let lam = eigenvalue(series_nu, label, n);
        for step in 0..12 {
            let y = 0.06 + step as f64 * 0.075;
            if (y - 0.5).abs() < 0.055 {
                continue;
            }
            let drift: Vec<f64> = (1..=label.phases())
                .map(|p| model_fd.drift(p, y))
                .collect();
            let coupling = model_fd.switch_kill(y);
            let f = |z: f64| series.eigenfunction(n, z).expect("interior evaluation");
            let applied = apply_generator_fd5(&drift, &coupling, f, y, h);
            let q = f(y);
            let mut reference = q.clone();
            for r in 0..label.phases() {
                for c in 0..label.phases() {
                    reference[(r, c)] = q[(r, c)] * Complex64::new(lam[c], 0.0);
                }
            }
            let scale = reference.iter().map(|v| v.norm()).fold(1e-12, f64::max);
            let err = (&applied - &reference)
                .iter()
                .map(|v| v.norm())
                .fold(0.0, f64::max)
                / scale;
            if err > worst.0 {
                worst = (err, applied[(0, 0)].re, reference[(0, 0)].re);
            }
        }
    }
    reports.push(OracleReport::new(
        format!("{label:?}/eigenfunction-identity"),
        worst.0,
        0.0,
        1e-6,
        TolMode::Abs,
    ));

    // Gram orthogonality against the closed-form norms
    let w = series.weight();
    let rule = gauss_jacobi_rule(80, w.alpha(), w.beta())?;
    let phases = label.phases();
    let n_max = 3usize;
    let mut gram =
        vec![vec![DMatrix::<Complex64>::zeros(phases, phases); n_max + 1]; n_max + 1];
    for (y, wt) in rule.iter() {
        let sing = y.powf(w.alpha()) * (1.0 - y).powf(w.beta());
        let wb = w.evaluate(y) / sing;
        let qs: Vec<DMatrix<Complex64>> = (0..=n_max)
            .map(|n| {
                let mut q = series.eigenfunction(n as u32, y).expect("interior");
                if opts.perturb != 0.0 && n >= 1 {
                    q *= Complex64::new(1.0 + opts.perturb * n as f64, 0.0);
                }
                q
            })
            .collect();
        for i in 0..=n_max {
            for j in 0..=n_max {
                // int Q_i* W Q_j
                for r in 0..phases {
                    for c in 0..phases {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in 0..phases {
                            for l in 0..phases {
                                acc += qs[i][(k, r)].conj() * wb[(k, l)] * qs[j][(l, c)];
                            }
                        }
                        gram[i][j][(r, c)] += acc * Complex64::new(wt, 0.0);
                    }
                }
            }
        }
    }
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..=n_max {
        let pi = series.norms_inv(i as u32)?;
        let scale = (0..phases).map(|r| 1.0 / pi[r]).fold(0.0, f64::max);
        for j in 0..=n_max {
            for r in 0..phases {
                for c in 0..phases {
                    let want = if i == j && r == c { 1.0 / pi[r] } else { 0.0 };
                    let err = (gram[i][j][(r, c)].re - want).abs().max(gram[i][j][(r, c)].im.abs())
                        / scale;
                    if err > worst.0 {
                        worst = (err, gram[i][j][(r, c)].re, want);
                    }
                }
            }
        }
    }
    reports.push(OracleReport::new(
        format!("{label:?}/orthogonality"),
        worst.0,
        0.0,
        1e-8,
        TolMode::Abs,
    ));

    // model-specific checks
    match label {
        ModelLabel::L1Killed => {
            let s_half = survival(series_nu, 0.5, 0.5)?;
            let s_one = survival(series_nu, 1.0, 0.5)?;
            reports.push(OracleReport::new(
                "L1Killed/survival-monotone",
                f64::from(u8::from(s_one < s_half && s_half < 1.0)),
                1.0,
                0.0,
                TolMode::Abs,
            ));
        }
        ModelLabel::L1Switch2 => {
            let rule = gauss_jacobi_rule(24, series_nu - 0.5, series_nu - 0.5)?;
            let total = rule.integrate(|y| {
                let p = invariant_psi(series_nu, y);
                (p.values[0] + p.values[1]) / (y * (1.0 - y)).powf(series_nu - 0.5)
            });
            reports.push(OracleReport::new(
                "L1Switch2/psi-normalization",
                total,
                1.0,
                1e-10,
                TolMode::Abs,
            ));
        }
        ModelLabel::L2Switch3 | ModelLabel::L2KillSwitch2 => {
            let mut worst_row = 0.0f64;
            for i in 1..40 {
                let y = i as f64 / 40.0;
                let sk = model.switch_kill(y);
                for r in 0..phases {
                    let s: f64 = sk.row(r).iter().sum();
                    let deficit = -s;
                    let want_kill = model.kill_rate(r + 1, y);
                    worst_row = worst_row.max((deficit.max(0.0) - want_kill).abs());
                    if label == ModelLabel::L2Switch3 {
                        worst_row = worst_row.max(s.abs());
                    }
                }
            }
            reports.push(OracleReport::new(
                format!("{label:?}/switch-row-structure"),
                worst_row,
                0.0,
                1e-10,
                TolMode::Abs,
            ));
        }
    }

    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suites_green() {
        for model in [
            ModelKind::Bd,
            ModelKind::Qbd2,
            ModelKind::L1Killed,
            ModelKind::L1Switch2,
            ModelKind::L2Switch3,
            ModelKind::L2Killswitch2,
        ] {
            for &nu in &[0.25, 1.0] {
                let reports = validate_model(
                    model,
                    ValidateOptions { nu, perturb: 0.0 },
                )
                .unwrap();
                for r in &reports {
                    assert!(r.passed, "{model:?} nu {nu}: {} failed ({r:?})", r.name);
                }
            }
        }
    }

    #[test]
    fn perturbation_turns_suites_red() {
        for model in [ModelKind::Bd, ModelKind::Qbd2, ModelKind::L1Killed] {
            let reports = validate_model(
                model,
                ValidateOptions {
                    nu: 1.0,
                    perturb: 1e-3,
                },
            )
            .unwrap();
            assert!(
                reports.iter().any(|r| !r.passed),
                "{model:?}: perturbation not detected"
            );
        }
    }
}
