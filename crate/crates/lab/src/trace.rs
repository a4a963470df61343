//! Random runs of the constraint revelation process and their JSON-lines
//! export.

use std::fmt::Write as _;

use lcl_core::code::random_matrix;
use lcl_core::poly::{lcl_to_poly_profile, run_process, PolyMatrix, PolySpace, Trace, Watch};
use lcl_core::{Elem, Field, Profile, Subspace};
use rand::Rng;
use serde_json::{json, Map, Value};

use crate::Result;

/// A profile whose spaces are spans of `0..=b` uniform vectors.
pub fn random_profile<R: Rng + ?Sized>(field: &Field, n: usize, b: usize, rng: &mut R) -> Result<Profile> {
    let spaces: Vec<Subspace> = (0..n)
        .map(|_| {
            let g = rng.gen_range(0..=b);
            Subspace::span(&random_matrix(field, g, b, rng))
        })
        .collect();
    Ok(Profile::new(&spaces)?)
}

/// `F_q(X)^b` itself plus `extra` random constant subspaces labelled `w1, w2, ...`.
pub fn random_watches<R: Rng + ?Sized>(field: &Field, b: usize, extra: usize, rng: &mut R) -> Result<Vec<Watch>> {
    let mut out = vec![Watch::full(field, b)];
    for w in 1..=extra {
        let d = rng.gen_range(1..=b);
        let rows = PolyMatrix::from_constant(&random_matrix(field, d, b, rng));
        out.push(Watch::new(&format!("w{w}"), &rows)?);
    }
    Ok(out)
}

/// Runs the process for `profile` from all of `Q_{k,b}` at uniform points.
/// The run itself checks the deterministic bounds and fails with an invariant
/// violation if one does not hold.
pub fn random_trace<R: Rng + ?Sized>(profile: &Profile, k: usize, extra_watches: usize, rng: &mut R) -> Result<Trace> {
    let field = profile.field();
    let b = profile.b();
    let alphas: Vec<Elem> = (0..profile.n()).map(|_| rng.gen_range(0..field.order())).collect();
    let watches = random_watches(field, b, extra_watches, rng)?;
    let psi = lcl_to_poly_profile(profile);
    Ok(run_process(&PolySpace::full(field, k, b), &psi, &alphas, &watches)?)
}

/// One JSON object per step: `{"i", "dim", "span_dim", "gamma": {label: value}}`.
pub fn trace_jsonl(trace: &Trace) -> String {
    let mut out = String::new();
    for s in &trace.steps {
        let gamma: Map<String, Value> = trace.labels.iter().cloned().zip(s.gamma.iter().map(|&g| json!(g))).collect();
        let rec = json!({ "i": s.i, "dim": s.dim, "span_dim": s.span_dim, "gamma": gamma });
        let _ = writeln!(out, "{rec}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use lcl_core::RngStream;

    #[test]
    fn jsonl_has_one_record_per_step() {
        let f7 = Field::of_order(7).unwrap();
        let mut rng = RngStream::new(3, 0).rng();
        let v = random_profile(&f7, 5, 2, &mut rng).unwrap();
        let t = random_trace(&v, 2, 1, &mut rng).unwrap();
        let text = trace_jsonl(&t);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 6);
        for (i, line) in lines.iter().enumerate() {
            let rec: Value = serde_json::from_str(line).unwrap();
            assert_eq!(rec["i"], json!(i));
            assert!(rec["gamma"]["full"].is_i64());
            assert!(rec["gamma"]["w1"].is_i64());
        }
        let first: Value = serde_json::from_str(lines[0]).unwrap();
        assert_eq!(first["dim"], json!(4));
    }

    #[test]
    fn traces_are_reproducible() {
        let f8 = Field::of_order(8).unwrap();
        let run = || {
            let mut rng = RngStream::new(11, 4).rng();
            let v = random_profile(&f8, 6, 3, &mut rng).unwrap();
            trace_jsonl(&random_trace(&v, 3, 2, &mut rng).unwrap())
        };
        assert_eq!(run(), run());
    }
}
