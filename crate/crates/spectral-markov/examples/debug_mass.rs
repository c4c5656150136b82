// temporary debug harness
use spectral_markov::diffusion::{ModelLabel, SpectralSeries};
use spectral_markov::specfun::gauss_jacobi_rule;

fn main() {
    let nu = 1.0;
    let series = SpectralSeries::new(nu, ModelLabel::L1Switch2, 1e-10).unwrap();
    let w = series.weight();
    let rule = gauss_jacobi_rule(64, w.alpha(), w.beta()).unwrap();
    let x = 0.37;
    for &t in &[0.5] {
        let mut row_mass = [0.0f64; 2];
        for (y, wt) in rule.iter() {
            let p = series.density(t, x, y).unwrap();
            let scale = wt / (y.powf(w.alpha()) * (1.0 - y).powf(w.beta()));
            for i in 0..2 {
                row_mass[i] += scale * (p[(i, 0)] + p[(i, 1)]);
            }
        }
        println!("t={t}: mass = {row_mass:?}");
    }
    // compare single density value against a hand-rolled sum
    let y = 0.61;
    let t = 0.5;
    let p = series.density(t, x, y).unwrap();
    println!("density(0.5, 0.37, 0.61) = {p}");
    let mut manual = nalgebra::DMatrix::<f64>::zeros(2, 2);
    for n in 0..12u32 {
        let qx = series.eigenfunction(n, x).unwrap();
        let qy = series.eigenfunction(n, y).unwrap();
        let pi = series.norms_inv(n).unwrap();
        let lam = series.eigenvalue(n);
        let wv = w.evaluate(y);
        let mut term = nalgebra::DMatrix::<f64>::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = num_complex::Complex64::new(0.0, 0.0);
                for k in 0..2 {
                    let s = pi[k] * (lam[k] * t).exp();
                    for m in 0..2 {
                        acc += qx[(i, k)] * s * qy[(m, k)].conj() * wv[(m, j)];
                    }
                }
                term[(i, j)] = acc.re;
            }
        }
        println!(
            "n={n}: term sup {:.3e} pi {:?} lam {:?}",
            term.amax(),
            (pi[0], pi[1]),
            (lam[0], lam[1])
        );
        manual += term;
    }
    println!("manual sum = {manual}");
    for n in 0..3u32 {
        let q = series.eigenfunction(n, 0.61).unwrap();
        println!("rust Q_{n}(0.61) = {q}");
    }
}

#[allow(dead_code)]
fn unused() {}
