//! CSV and JSON writers for paths, density grids and generators.
//!
//! Every CSV starts with a schema-version comment line, then the header
//! row. Floats are written with Rust's shortest-roundtrip formatting, so a
//! fixed seed gives byte-identical files.

use crate::diffusion::DiffusionPath;
use crate::error::Result;
use crate::qbd::{BlockGenerator, ChainPath};
use serde_json::json;
use std::fmt::Write as _;

/// `t,level,phase,seed` rows of a chain path (phase is 1 for the scalar
/// queue). Rows mark the state entered at `t`, starting at `t = 0`.
pub fn chain_path_csv(path: &ChainPath) -> String {
    let mut out = String::from("# schema: qbd-path v1\nt,level,phase,seed\n");
    let mut t = 0.0;
    for (k, s) in path.states.iter().enumerate() {
        if k > 0 {
            t = path.jump_times[k - 1];
        }
        let _ = writeln!(out, "{},{},{},{}", t, s.level, s.phase, path.seed);
    }
    out
}

/// `t,x,phase,alive` rows of a diffusion path.
pub fn diffusion_path_csv(path: &DiffusionPath) -> String {
    let mut out = String::from("# schema: diffusion-path v1\nt,x,phase,alive\n");
    let n = path.times.len();
    for i in 0..n {
        let alive = match path.killed_at {
            Some(tk) => (path.times[i] < tk) as u8,
            None => 1,
        };
        let _ = writeln!(
            out,
            "{},{},{},{}",
            path.times[i], path.positions[i], path.phases[i], alive
        );
    }
    out
}

/// `t,x,y,phase_from,phase_to,value` rows of a density grid.
pub fn density_csv(rows: &[(f64, f64, f64, u32, u32, f64)]) -> String {
    let mut out = String::from("# schema: density-grid v1\nt,x,y,phase_from,phase_to,value\n");
    for (t, x, y, pf, pt, v) in rows {
        let _ = writeln!(out, "{t},{x},{y},{pf},{pt},{v}");
    }
    out
}

/// Dense JSON dump of a truncated generator: dimensions plus row-major
/// per-level blocks.
pub fn generator_json(gen: &BlockGenerator) -> Result<String> {
    let blocks: Vec<serde_json::Value> = gen
        .blocks()
        .iter()
        .enumerate()
        .map(|(level, blk)| {
            json!({
                "level": level,
                "a": matrix_rows(&blk.a),
                "b": matrix_rows(&blk.b),
                "c": blk.c.as_ref().map(matrix_rows),
            })
        })
        .collect();
    let doc = json!({
        "schema": "generator v1",
        "levels": gen.levels(),
        "phases": gen.phases(),
        "blocks": blocks,
    });
    Ok(serde_json::to_string_pretty(&doc)?)
}

fn matrix_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qbd::{build_generator, gillespie_simulate, ChainModel, ChainState};

    #[test]
    fn chain_csv_schema_and_determinism() {
        let gen = build_generator(0.0, 20, ChainModel::Bd).unwrap();
        let path = gillespie_simulate(&gen, ChainState::new(0, 1), 5.0, 9).unwrap();
        let a = chain_path_csv(&path);
        let b = chain_path_csv(&path);
        assert_eq!(a, b);
        assert!(a.starts_with("# schema: qbd-path v1\nt,level,phase,seed\n"));
        assert!(a.lines().count() >= 3);
    }

    #[test]
    fn generator_json_roundtrips_dimensions() {
        let gen = build_generator(1.0, 4, ChainModel::Qbd2).unwrap();
        let s = generator_json(&gen).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["levels"], 4);
        assert_eq!(v["phases"], 2);
        assert_eq!(v["blocks"].as_array().unwrap().len(), 4);
        assert!(v["blocks"][0]["c"].is_null());
        assert_eq!(v["blocks"][1]["a"][0].as_array().unwrap().len(), 2);
    }
}
