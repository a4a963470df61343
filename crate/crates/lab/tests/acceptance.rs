//! The acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits nonzero if any failed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use lcl_core::lr::{build_extremal_lr_profile, sample_lr_profile};
use lcl_core::profile::ThresholdEngine;
use lcl_core::rational::{int, ratio};
use lcl_core::subspace::enumerate_subspaces;
use lcl_core::{Field, Rational, RecoveryParams, RngStream, DEFAULT_CAP};
use lcl_lab::experiment::{
    run_reduction_experiment, run_threshold_experiment, Decide, Ensemble, ExperimentConfig, Property,
};
use lcl_lab::verify::{verify_lemmas, Check, Report, Selector, VerifyOptions};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn report(selector: Selector, samples: usize) -> Report {
    let opts = VerifyOptions { samples, seed: 2024, cap: lcl_core::oracle::ORACLE_BUDGET };
    verify_lemmas(selector, &opts).expect("verification ran")
}

fn summarize(r: &Report, min_instances: u64) -> Outcome {
    let bad: Vec<&Check> = r.checks.iter().filter(|c| !c.passed() || c.instances < min_instances).collect();
    let counts: Vec<String> = r.checks.iter().map(|c| format!("{}/{}", c.instances - c.failures, c.instances)).collect();
    if bad.is_empty() {
        Ok(format!("checks passed {}", counts.join(", ")))
    } else {
        Err(format!("{r}"))
    }
}

fn within(t: Instant, limit: Duration, msg: String) -> Outcome {
    if t.elapsed() <= limit {
        Ok(format!("{msg} in {:.1?}", t.elapsed()))
    } else {
        Err(format!("{msg} but took {:.1?} (limit {limit:?})", t.elapsed()))
    }
}

fn c1() -> Outcome {
    let t = Instant::now();
    let msg = summarize(&report(Selector::ProbInRlc, 0), 1)?;
    within(t, Duration::from_secs(60), msg)
}

fn c2() -> Outcome {
    summarize(&report(Selector::Submodularity, 1000), 1000)
}

fn c3() -> Outcome {
    // every sampled profile is checked at R_V; the points R_V -/+ 1/n are
    // skipped when they leave [0, 1]
    let r = report(Selector::RvAlt, 120);
    if r.checks[1].instances < 100 {
        return Err(format!("only {} profiles", r.checks[1].instances));
    }
    summarize(&r, 1)
}

/// `max(1 - ρ(1 + ℓ/L), 0)`, computed here rather than through the library.
fn singleton_bound(rho: &Rational, ell: usize, l: usize) -> Rational {
    let v = int(1) - rho * (int(1) + ratio(ell as i64, l as i64));
    v.max(int(0))
}

fn c4() -> Outcome {
    let t = Instant::now();
    let f2 = Field::of_order(2).unwrap();
    let lattice = enumerate_subspaces(&f2, 4, None, DEFAULT_CAP).unwrap();
    if lattice.len() != 67 {
        return Err(format!("F_2^4 has {} subspaces", lattice.len()));
    }
    let p = RecoveryParams::new(ratio(1, 2), 1, 3, false).unwrap();
    let v = build_extremal_lr_profile(&f2, 6, &p).unwrap();
    let th = v.threshold_rate_v(DEFAULT_CAP).unwrap().rate;
    if th != ratio(1, 3) || th != singleton_bound(&p.rho, 1, 3) {
        return Err(format!("extremal threshold {th}, expected 1/3"));
    }
    let mut sampled = 0;
    let configs = [(ratio(1, 2), 3usize, 6usize, false), (ratio(1, 3), 2, 6, false), (ratio(1, 3), 2, 6, true), (ratio(1, 4), 1, 4, false)];
    for (ci, (rho, l, n, avg)) in configs.into_iter().enumerate() {
        let p = RecoveryParams::new(rho.clone(), 1, l, avg).unwrap();
        let engine = ThresholdEngine::new(&f2, p.b(), DEFAULT_CAP).unwrap();
        let bound = singleton_bound(&rho, 1, l);
        for s in 0..15u64 {
            let v = sample_lr_profile(&f2, n, &p, &mut RngStream::new(ci as u64, s).rng(), 10_000).unwrap();
            let r = engine.threshold(&v).unwrap().rate;
            if r < bound {
                return Err(format!("sampled profile threshold {r} below {bound} for {p:?}"));
            }
            sampled += 1;
        }
    }
    within(t, Duration::from_secs(300), format!("extremal threshold 1/3, {sampled} sampled family profiles above the bound"))
}

fn c5() -> Outcome {
    summarize(&report(Selector::Prop31, 0), 1)
}

fn c6() -> Outcome {
    let g = report(Selector::GammaStep, 100);
    let traces = g.checks[0].instances;
    if traces < 100 {
        return Err(format!("only {traces} traces"));
    }
    let e = report(Selector::EvalDim, 200);
    Ok(format!("{}; {}", summarize(&g, 1)?, summarize(&e, 1)?))
}

fn lr_config(ensemble: Ensemble, q: u64, rates: &[(i64, i64)], seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        ensemble,
        n: 16,
        field: Field::of_order(q).unwrap(),
        rates: rates.iter().map(|&(a, b)| ratio(a, b)).collect(),
        property: Property::NotRecoverable(RecoveryParams::new(ratio(1, 4), 1, 2, false).unwrap()),
        trials: 200,
        seed,
        epsilon: int(0),
        decide: Decide::Auto,
        cap: DEFAULT_CAP,
    }
}

fn c7() -> Outcome {
    let t = Instant::now();
    let cfg = lr_config(Ensemble::Rlc, 16, &[(5, 16), (3, 4), (7, 8)], 7);
    let rep = run_threshold_experiment(&cfg).map_err(|e| e.to_string())?;
    if rep.threshold != ratio(5, 8) {
        return Err(format!("threshold reference {}", rep.threshold));
    }
    let (lo, hi) = (&rep.rows[0], &rep.rows[2]);
    // per-seed monotonicity, re-derived from the raw outcomes (grid is sorted by k)
    let non_monotone = rep.outcomes.iter().filter(|o| o.windows(2).any(|w| w[0] && !w[1])).count();
    let msg = format!(
        "satisfaction {}/{} at 5/16 vs {}/{} at 7/8, {non_monotone} non-monotone seeds",
        lo.satisfied, lo.trials, hi.satisfied, hi.trials
    );
    if lo.estimate < hi.estimate && non_monotone == 0 && rep.monotone_violations == 0 {
        within(t, Duration::from_secs(600), msg)
    } else {
        Err(msg)
    }
}

fn c8() -> Outcome {
    let t = Instant::now();
    // threshold 5/8, rate 5/8 - 1/4 = 3/8
    let cfg = lr_config(Ensemble::Rs, 251, &[(3, 8)], 8);
    let rep = run_reduction_experiment(&cfg).map_err(|e| e.to_string())?;
    let row = &rep.rows[0];
    let msg = format!("RS {:.3} vs RLC {:.3} at k = {}", row.rs_estimate(), row.rlc_estimate(), row.k);
    if row.k == 6 && row.rs_estimate() <= row.rlc_estimate() + 0.15 {
        Ok(format!("{msg} in {:.1?}", t.elapsed()))
    } else {
        Err(msg)
    }
}

fn c9() -> Outcome {
    summarize(&report(Selector::Strategies, 0), 1)
}

fn c10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs: [&[&str]; 3] = [
        &["simulate-rlc", "--n", "8", "--q", "4", "--rates", "1/4,1/2,3/4", "--rho", "1/4", "--L", "2", "--trials", "40"],
        &["simulate-rs", "--n", "6", "--q", "7", "--rates", "1/3,2/3", "--rho", "1/3", "--L", "2", "--trials", "40"],
        &["reduce-compare", "--n", "6", "--q", "7", "--rates", "1/3,1/2", "--rho", "1/3", "--L", "1", "--trials", "30"],
    ];
    let mut compared = 0;
    for (i, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let path = dir.path().join(format!("run{i}-{rep}.csv"));
            let status = Command::new(env!("CARGO_BIN_EXE_lcl"))
                .args(*args)
                .args(["--seed", "99", "--format", "csv", "--out"])
                .arg(&path)
                .status()
                .map_err(|e| e.to_string())?;
            if !status.success() {
                return Err(format!("{args:?} exited with {status}"));
            }
            outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
        }
        if outputs[0] != outputs[1] || outputs[0].is_empty() {
            return Err(format!("{args:?} produced different CSV"));
        }
        compared += 1;
    }
    Ok(format!("{compared} CLI invocations byte-identical across two runs"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("exact RLC containment law", c1),
        ("degree submodularity", c2),
        ("argmax trichotomy around the threshold", c3),
        ("extremal list-recovery threshold and sampled family bound", c4),
        ("list recovery vs family containment", c5),
        ("deterministic process bounds and evaluation frequency", c6),
        ("threshold direction and per-seed monotonicity", c7),
        ("Reed-Solomon vs random linear codes", c8),
        ("cross-strategy agreement", c9),
        ("byte-identical CLI output", c10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = match catch_unwind(AssertUnwindSafe(f)) {
            Ok(o) => o,
            Err(p) => Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into())),
        };
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
