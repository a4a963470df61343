//! Seeded Monte Carlo estimates of how often a random code has a local
//! property, over a grid of rates.
//!
//! Trial `t` draws all of its randomness from the ChaCha stream `(seed, t)`,
//! and one sample serves the whole grid: the random linear code of dimension
//! `k` is the kernel of the first `n - k` rows of one parity matrix and the
//! Reed-Solomon codes share their evaluation points. Codes therefore grow
//! with the rate inside a trial and, since the properties are monotone, so
//! does satisfaction. Trials run in parallel and are merged by index.

use std::fmt::Write as _;
use std::str::FromStr;

use lcl_core::code::{rs_code, sample_points, NestedRlc};
use lcl_core::lr::enumerate_lr_family;
use lcl_core::profile::threshold_rate_family;
use lcl_core::rational::{fraction_string, scale_to_integer};
use lcl_core::witness::{certify_list_recoverable, code_contains_profile, Strategy};
use lcl_core::{Code, Field, Profile, Rational, RecoveryParams, RngStream};
use rayon::prelude::*;
use serde_json::json;

use crate::stats::{dec6, wilson, Z95};
use crate::{Error, Result};

/// Largest list-recovery family compiled to profiles under `Decide::Auto`.
pub const AUTO_FAMILY_LIMIT: u128 = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ensemble {
    Rlc,
    RlcUniform,
    Rs,
    RsNoRep,
}

impl Ensemble {
    pub fn name(self) -> &'static str {
        match self {
            Ensemble::Rlc => "rlc",
            Ensemble::RlcUniform => "rlc-uniform",
            Ensemble::Rs => "rs",
            Ensemble::RsNoRep => "rs-norep",
        }
    }
}

impl FromStr for Ensemble {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "rlc" => Ensemble::Rlc,
            "rlc-uniform" => Ensemble::RlcUniform,
            "rs" => Ensemble::Rs,
            "rs-norep" => Ensemble::RsNoRep,
            _ => return Err(Error::Config(format!("unknown ensemble {s:?}"))),
        })
    }
}

/// The monotone property being estimated: containing the given profile, or
/// failing list recovery with the given parameters.
#[derive(Clone, Debug)]
pub enum Property {
    Profile(Profile),
    NotRecoverable(RecoveryParams),
}

/// How list-recovery properties are decided per trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decide {
    /// Family containment when the family has at most `AUTO_FAMILY_LIMIT`
    /// candidate sequences, else the certifier.
    Auto,
    Family,
    Certify(Strategy),
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub ensemble: Ensemble,
    pub n: usize,
    pub field: Field,
    pub rates: Vec<Rational>,
    pub property: Property,
    pub trials: u64,
    pub seed: u64,
    /// Rates within `epsilon` of the threshold are labelled `at`.
    pub epsilon: Rational,
    pub decide: Decide,
    pub cap: u128,
}

impl ExperimentConfig {
    /// `k = R n` for every grid rate, in grid order.
    pub fn dimensions(&self) -> Result<Vec<usize>> {
        if self.trials == 0 {
            return Err(Error::Config("at least one trial is needed".into()));
        }
        if self.rates.is_empty() {
            return Err(Error::Config("empty rate grid".into()));
        }
        self.rates
            .iter()
            .map(|r| match scale_to_integer(r, self.n) {
                Some(k) if (0..=self.n as i64).contains(&k) => Ok(k as usize),
                _ => Err(Error::Config(format!("rate {} gives no integral k in 0..={}", fraction_string(r), self.n))),
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Below,
    At,
    Above,
}

impl Side {
    pub fn of(rate: &Rational, threshold: &Rational, epsilon: &Rational) -> Side {
        if rate < &(threshold - epsilon) {
            Side::Below
        } else if rate > &(threshold + epsilon) {
            Side::Above
        } else {
            Side::At
        }
    }
    pub fn name(self) -> &'static str {
        match self {
            Side::Below => "below",
            Side::At => "at",
            Side::Above => "above",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateRow {
    pub rate: Rational,
    pub k: usize,
    pub satisfied: u64,
    pub trials: u64,
    pub estimate: f64,
    pub wilson: (f64, f64),
    pub threshold: Rational,
    pub side: Side,
}

impl EstimateRow {
    fn new(rate: &Rational, k: usize, satisfied: u64, trials: u64, threshold: &Rational, eps: &Rational) -> Self {
        EstimateRow {
            rate: rate.clone(),
            k,
            satisfied,
            trials,
            estimate: satisfied as f64 / trials as f64,
            wilson: wilson(satisfied, trials, Z95),
            threshold: threshold.clone(),
            side: Side::of(rate, threshold, eps),
        }
    }
}

/// Where the threshold reference came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThresholdSource {
    /// Exact min-max over the profile or the compiled family.
    Exact,
    /// The list-recovery closed form, used when the family is not compiled.
    ClosedForm,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub ensemble: Ensemble,
    pub n: usize,
    pub q: u32,
    pub seed: u64,
    pub threshold: Rational,
    pub threshold_source: ThresholdSource,
    pub decided_by: String,
    pub rows: Vec<EstimateRow>,
    /// `outcomes[t][j]`: did trial `t` satisfy the property at grid rate `j`.
    pub outcomes: Vec<Vec<bool>>,
    /// Trials whose satisfaction is not monotone in `k`.
    pub monotone_violations: u64,
}

pub const CSV_HEADER: &str = "rate,k,satisfied,trials,estimate,wilson_low,wilson_high,threshold,side";

impl ExperimentReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                fraction_string(&r.rate),
                r.k,
                r.satisfied,
                r.trials,
                dec6(r.estimate),
                dec6(r.wilson.0),
                dec6(r.wilson.1),
                fraction_string(&r.threshold),
                r.side.name()
            );
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "ensemble": self.ensemble.name(),
            "n": self.n,
            "q": self.q,
            "seed": self.seed,
            "threshold": fraction_string(&self.threshold),
            "threshold_source": match self.threshold_source {
                ThresholdSource::Exact => "exact",
                ThresholdSource::ClosedForm => "closed-form",
            },
            "decided_by": self.decided_by,
            "monotone_violations": self.monotone_violations,
            "rows": self.rows.iter().map(row_json).collect::<Vec<_>>(),
        })
    }
}

fn row_json(r: &EstimateRow) -> serde_json::Value {
    json!({
        "rate": fraction_string(&r.rate),
        "k": r.k,
        "satisfied": r.satisfied,
        "trials": r.trials,
        "estimate": dec6(r.estimate),
        "wilson_low": dec6(r.wilson.0),
        "wilson_high": dec6(r.wilson.1),
        "threshold": fraction_string(&r.threshold),
        "side": r.side.name(),
    })
}

/// A property compiled into a per-code decision procedure.
enum Decider {
    Family(Vec<Profile>),
    Certify(RecoveryParams, Strategy),
}

impl Decider {
    fn name(&self) -> String {
        match self {
            Decider::Family(f) => format!("containment over {} profiles", f.len()),
            Decider::Certify(_, s) => format!("certifier ({s:?})"),
        }
    }

    fn satisfied(&self, code: &Code, cap: u128) -> lcl_core::Result<bool> {
        match self {
            Decider::Family(family) => {
                for v in family {
                    if code_contains_profile(code, v, cap)?.is_some() {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Decider::Certify(p, s) => Ok(!certify_list_recoverable(code, p, *s, cap)?.is_recoverable()),
        }
    }
}

fn default_strategy(p: &RecoveryParams) -> Strategy {
    if p.ell == 1 {
        Strategy::LowWeight
    } else {
        Strategy::Subsets
    }
}

fn compile(cfg: &ExperimentConfig) -> Result<(Decider, Rational, ThresholdSource)> {
    match &cfg.property {
        Property::Profile(v) => {
            if v.n() != cfg.n || v.field() != &cfg.field {
                return Err(Error::Config(format!(
                    "profile has n = {} over F_{}, experiment has n = {} over F_{}",
                    v.n(),
                    v.field().order(),
                    cfg.n,
                    cfg.field.order()
                )));
            }
            let t = v.threshold_rate_v(cfg.cap)?;
            Ok((Decider::Family(vec![v.clone()]), t.rate, ThresholdSource::Exact))
        }
        Property::NotRecoverable(p) => {
            p.radius(cfg.n)?;
            let family = match cfg.decide {
                Decide::Certify(_) => None,
                Decide::Family => Some(enumerate_lr_family(&cfg.field, cfg.n, p, cfg.cap)?),
                Decide::Auto => match enumerate_lr_family(&cfg.field, cfg.n, p, AUTO_FAMILY_LIMIT.min(cfg.cap)) {
                    Ok(f) => Some(f),
                    Err(lcl_core::Error::CapExceeded { .. }) => None,
                    Err(e) => return Err(e.into()),
                },
            };
            match family {
                Some(f) if f.is_empty() => Err(lcl_core::Error::EmptyFamily.into()),
                Some(f) => {
                    let (t, _) = threshold_rate_family(&f, cfg.cap)?;
                    Ok((Decider::Family(f), t.rate, ThresholdSource::Exact))
                }
                None => {
                    let s = match cfg.decide {
                        Decide::Certify(s) => s,
                        _ => default_strategy(p),
                    };
                    Ok((Decider::Certify(p.clone(), s), p.closed_form_threshold(), ThresholdSource::ClosedForm))
                }
            }
        }
    }
}

/// The trial's codes at every grid dimension, sharing one sample.
fn nested_codes(ensemble: Ensemble, n: usize, field: &Field, ks: &[usize], stream: RngStream) -> lcl_core::Result<Vec<Code>> {
    let mut rng = stream.rng();
    match ensemble {
        Ensemble::Rlc | Ensemble::RlcUniform => {
            let nested = if ensemble == Ensemble::Rlc {
                NestedRlc::sample(n, field, &mut rng)
            } else {
                NestedRlc::sample_uniform(n, field, &mut rng)?
            };
            ks.iter().map(|&k| nested.code(k)).collect()
        }
        Ensemble::Rs | Ensemble::RsNoRep => {
            let rep = ensemble == Ensemble::Rs;
            let points = sample_points(n, field, rep, &mut rng)?;
            ks.iter().map(|&k| rs_code(field, &points, k, rep)).collect()
        }
    }
}

fn monotone_in_k(ks: &[usize], outcome: &[bool]) -> bool {
    let mut order: Vec<usize> = (0..ks.len()).collect();
    order.sort_by_key(|&j| ks[j]);
    order.windows(2).all(|w| !outcome[w[0]] || outcome[w[1]])
}

pub fn run_threshold_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let ks = cfg.dimensions()?;
    let (decider, threshold, source) = compile(cfg)?;
    let results: Vec<std::result::Result<Vec<bool>, (usize, lcl_core::Error)>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let codes = nested_codes(cfg.ensemble, cfg.n, &cfg.field, &ks, RngStream::new(cfg.seed, t)).map_err(|e| (0, e))?;
            codes.iter().enumerate().map(|(j, c)| decider.satisfied(c, cfg.cap).map_err(|e| (j, e))).collect()
        })
        .collect();
    let mut outcomes = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(o) => outcomes.push(o),
            Err((j, source)) => return Err(Error::AtRate { rate: fraction_string(&cfg.rates[j]), source }),
        }
    }
    let rows = ks
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let sat = outcomes.iter().filter(|o| o[j]).count() as u64;
            EstimateRow::new(&cfg.rates[j], k, sat, cfg.trials, &threshold, &cfg.epsilon)
        })
        .collect();
    let monotone_violations = outcomes.iter().filter(|o| !monotone_in_k(&ks, o)).count() as u64;
    Ok(ExperimentReport {
        ensemble: cfg.ensemble,
        n: cfg.n,
        q: cfg.field.order(),
        seed: cfg.seed,
        threshold,
        threshold_source: source,
        decided_by: decider.name(),
        rows,
        outcomes,
        monotone_violations,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairedRow {
    pub rate: Rational,
    pub k: usize,
    pub trials: u64,
    pub rlc: u64,
    pub rs: u64,
    pub threshold: Rational,
    pub side: Side,
    /// `q <= k b`: the field is too small for the reduction's degree argument.
    pub small_field: bool,
}

impl PairedRow {
    pub fn rlc_estimate(&self) -> f64 {
        self.rlc as f64 / self.trials as f64
    }
    pub fn rs_estimate(&self) -> f64 {
        self.rs as f64 / self.trials as f64
    }
    /// RS frequency minus RLC frequency.
    pub fn gap(&self) -> f64 {
        self.rs_estimate() - self.rlc_estimate()
    }
}

#[derive(Clone, Debug)]
pub struct ReductionReport {
    pub rlc: ExperimentReport,
    pub rs: ExperimentReport,
    pub rows: Vec<PairedRow>,
}

pub const PAIRED_CSV_HEADER: &str =
    "rate,k,trials,rlc_satisfied,rlc_estimate,rs_satisfied,rs_estimate,gap,threshold,side,small_field";

impl ReductionReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(PAIRED_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                fraction_string(&r.rate),
                r.k,
                r.trials,
                r.rlc,
                dec6(r.rlc_estimate()),
                r.rs,
                dec6(r.rs_estimate()),
                dec6(r.gap()),
                fraction_string(&r.threshold),
                r.side.name(),
                r.small_field
            );
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "rlc": self.rlc.to_json(),
            "rs": self.rs.to_json(),
            "paired": self.rows.iter().map(|r| json!({
                "rate": fraction_string(&r.rate),
                "k": r.k,
                "gap": dec6(r.gap()),
                "small_field": r.small_field,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Runs the random linear code and the Reed-Solomon ensemble named in `cfg`
/// (`rs` or `rs-norep`) on the same grid and property.
pub fn run_reduction_experiment(cfg: &ExperimentConfig) -> Result<ReductionReport> {
    if !matches!(cfg.ensemble, Ensemble::Rs | Ensemble::RsNoRep) {
        return Err(Error::Config("the reduction compares against rs or rs-norep".into()));
    }
    let rs = run_threshold_experiment(cfg)?;
    let rlc = run_threshold_experiment(&ExperimentConfig { ensemble: Ensemble::Rlc, ..cfg.clone() })?;
    let b = match &cfg.property {
        Property::Profile(v) => v.b(),
        Property::NotRecoverable(p) => p.b(),
    };
    let q = cfg.field.order() as usize;
    let rows = rlc
        .rows
        .iter()
        .zip(&rs.rows)
        .map(|(a, r)| PairedRow {
            rate: a.rate.clone(),
            k: a.k,
            trials: a.trials,
            rlc: a.satisfied,
            rs: r.satisfied,
            threshold: a.threshold.clone(),
            side: a.side,
            small_field: q <= a.k * b,
        })
        .collect();
    Ok(ReductionReport { rlc, rs, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use lcl_core::rational::{int, ratio};
    use lcl_core::Subspace;

    fn cfg(ensemble: Ensemble, q: u64, n: usize, rates: &[(i64, i64)], property: Property) -> ExperimentConfig {
        ExperimentConfig {
            ensemble,
            n,
            field: Field::of_order(q).unwrap(),
            rates: rates.iter().map(|&(a, b)| ratio(a, b)).collect(),
            property,
            trials: 24,
            seed: 7,
            epsilon: int(0),
            decide: Decide::Auto,
            cap: lcl_core::DEFAULT_CAP,
        }
    }

    #[test]
    fn unconstrained_profile_is_always_contained_at_positive_rate() {
        let f5 = Field::of_order(5).unwrap();
        let v = Profile::constant(&Subspace::full(&f5, 2), 4).unwrap();
        for e in [Ensemble::Rlc, Ensemble::RlcUniform, Ensemble::Rs, Ensemble::RsNoRep] {
            let rep = run_threshold_experiment(&cfg(e, 5, 4, &[(0, 1), (1, 4), (3, 4)], Property::Profile(v.clone()))).unwrap();
            assert_eq!(rep.threshold, int(0));
            if e != Ensemble::Rlc {
                // the kernel model can exceed its nominal dimension, the others are {0} at k = 0
                assert_eq!(rep.rows[0].satisfied, 0, "{e:?}: the zero code has no two distinct words");
            }
            assert_eq!(rep.rows[1].satisfied, 24);
            assert_eq!(rep.rows[2].satisfied, 24);
            assert_eq!(rep.monotone_violations, 0);
        }
    }

    #[test]
    fn rates_must_give_integral_dimensions() {
        let f2 = Field::of_order(2).unwrap();
        let v = Profile::constant(&Subspace::full(&f2, 2), 4).unwrap();
        let c = cfg(Ensemble::Rlc, 2, 4, &[(1, 3)], Property::Profile(v.clone()));
        assert!(matches!(run_threshold_experiment(&c), Err(Error::Config(_))));
        let mut c = cfg(Ensemble::Rlc, 2, 4, &[(1, 2)], Property::Profile(v));
        c.trials = 0;
        assert!(run_threshold_experiment(&c).is_err());
    }

    #[test]
    fn sides() {
        let t = ratio(1, 2);
        assert_eq!(Side::of(&ratio(1, 4), &t, &int(0)), Side::Below);
        assert_eq!(Side::of(&ratio(1, 2), &t, &int(0)), Side::At);
        assert_eq!(Side::of(&ratio(5, 8), &t, &ratio(1, 8)), Side::At);
        assert_eq!(Side::of(&ratio(3, 4), &t, &ratio(1, 8)), Side::Above);
    }

    #[test]
    fn family_and_certifier_decisions_agree() {
        let p = RecoveryParams::new(ratio(1, 4), 1, 2, false).unwrap();
        let mut c = cfg(Ensemble::Rlc, 2, 4, &[(1, 4), (1, 2), (3, 4)], Property::NotRecoverable(p));
        c.decide = Decide::Family;
        let fam = run_threshold_experiment(&c).unwrap();
        assert_eq!(fam.threshold_source, ThresholdSource::Exact);
        for s in [Strategy::Subsets, Strategy::Balls, Strategy::LowWeight] {
            c.decide = Decide::Certify(s);
            let cert = run_threshold_experiment(&c).unwrap();
            assert_eq!(cert.outcomes, fam.outcomes, "{s:?}");
        }
    }

    #[test]
    fn reproducible_and_parallel_merge_is_ordered() {
        let p = RecoveryParams::new(ratio(1, 4), 1, 2, false).unwrap();
        let c = cfg(Ensemble::Rs, 7, 4, &[(1, 4), (1, 2)], Property::NotRecoverable(p));
        let a = run_threshold_experiment(&c).unwrap();
        let b = run_threshold_experiment(&c).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.outcomes, b.outcomes);
        assert!(a.to_csv().starts_with(CSV_HEADER));
    }

    #[test]
    fn reduction_pairs_rows() {
        let p = RecoveryParams::new(ratio(1, 4), 1, 2, false).unwrap();
        let c = cfg(Ensemble::RsNoRep, 7, 4, &[(0, 1), (3, 4)], Property::NotRecoverable(p));
        let r = run_reduction_experiment(&c).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert_eq!((r.rows[0].rlc, r.rows[0].rs), (0, 0));
        assert!(r.rows[1].small_field);
        assert!(r.to_csv().starts_with(PAIRED_CSV_HEADER));
        assert!(run_reduction_experiment(&ExperimentConfig { ensemble: Ensemble::Rlc, ..c }).is_err());
    }

    #[test]
    fn cap_errors_name_the_rate() {
        let p = RecoveryParams::new(ratio(1, 4), 1, 2, false).unwrap();
        let mut c = cfg(Ensemble::Rlc, 2, 4, &[(1, 4), (3, 4)], Property::NotRecoverable(p));
        c.decide = Decide::Certify(Strategy::Subsets);
        c.cap = 3;
        match run_threshold_experiment(&c) {
            Err(e @ Error::AtRate { .. }) => assert_eq!(e.exit_code(), 2),
            other => panic!("{other:?}"),
        }
    }
}
