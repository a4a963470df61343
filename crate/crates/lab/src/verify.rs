//! Exhaustive and sampled checks of the algebraic identities behind the
//! thresholds, each reported as pass/fail with counterexamples.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use lcl_core::code::{coupled_rs_pair, random_matrix, rs_code, NestedRlc};
use lcl_core::lr::enumerate_lr_family;
use lcl_core::oracle::{self, annihilates, balls_in_bins_expectation, exhaustive_rlc_law, full_rank_probability};
use lcl_core::poly::{eval_map, lcl_to_poly_profile, solve, span_dim, PolySpace};
use lcl_core::profile::ThresholdEngine;
use lcl_core::rational::{fraction_string, ratio, to_f64};
use lcl_core::subspace::enumerate_subspaces;
use lcl_core::witness::{
    certify_list_recoverable, check_violation, code_contains_profile, hamming_distance, profile_solution_space,
    Strategy,
};
use lcl_core::{Code, Elem, Field, Matrix, Profile, Rational, RecoveryParams, RngStream, Subspace};
use rand::Rng;

use crate::stats::{wilson, Z95};
use crate::trace::{random_profile, random_trace};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selector {
    ProbInRlc,
    Submodularity,
    RvAlt,
    Prop31,
    Coupling,
    EvalDim,
    GammaStep,
    Strategies,
}

impl Selector {
    pub const ALL: [Selector; 8] = [
        Selector::ProbInRlc,
        Selector::Submodularity,
        Selector::RvAlt,
        Selector::Prop31,
        Selector::Coupling,
        Selector::EvalDim,
        Selector::GammaStep,
        Selector::Strategies,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Selector::ProbInRlc => "prob-in-rlc",
            Selector::Submodularity => "submodularity",
            Selector::RvAlt => "rvalt",
            Selector::Prop31 => "prop31",
            Selector::Coupling => "coupling",
            Selector::EvalDim => "evaldim",
            Selector::GammaStep => "gamma-step",
            Selector::Strategies => "strategies",
        }
    }

    /// Sample count used when none is given.
    pub fn default_samples(self) -> usize {
        match self {
            Selector::Submodularity => 1000,
            Selector::Coupling => 4000,
            Selector::EvalDim => 200,
            _ => 100,
        }
    }
}

impl FromStr for Selector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Selector::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown selector {s:?}")))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Random instances for the sampled checks.
    pub samples: usize,
    pub seed: u64,
    /// Enumeration cap passed to every exact computation.
    pub cap: u128,
}

/// Counterexamples kept per check; the failure count is always exact.
const KEEP: usize = 5;

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub instances: u64,
    pub failures: u64,
    pub counterexamples: Vec<String>,
}

impl Check {
    fn new(name: impl Into<String>) -> Self {
        Check { name: name.into(), instances: 0, failures: 0, counterexamples: Vec::new() }
    }

    fn record(&mut self, ok: bool, dump: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.failures += 1;
            if self.counterexamples.len() < KEEP {
                self.counterexamples.push(dump());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.instances > 0
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub selector: Selector,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let verdict = if c.passed() { "PASS" } else { "FAIL" };
            writeln!(f, "{verdict} {}: {}: {} instances, {} failures", self.selector.name(), c.name, c.instances, c.failures)?;
            for ce in &c.counterexamples {
                writeln!(f, "  counterexample: {ce}")?;
            }
        }
        Ok(())
    }
}

pub fn verify_lemmas(selector: Selector, opts: &VerifyOptions) -> Result<Report> {
    let checks = match selector {
        Selector::ProbInRlc => prob_in_rlc(opts)?,
        Selector::Submodularity => submodularity(opts)?,
        Selector::RvAlt => rvalt(opts)?,
        Selector::Prop31 => prop31(opts)?,
        Selector::Coupling => coupling(opts)?,
        Selector::EvalDim => evaldim(opts)?,
        Selector::GammaStep => gamma_step(opts)?,
        Selector::Strategies => strategies(opts)?,
    };
    Ok(Report { selector, checks })
}

fn field(q: u64) -> Result<Field> {
    Ok(Field::of_order(q)?)
}

/// Every `rows x cols` matrix over `F_q`, row-major odometer order.
fn all_matrices(field: &Field, rows: usize, cols: usize) -> impl Iterator<Item = Matrix> + '_ {
    let q = field.order();
    let mut d = Some(vec![0u32; rows * cols]);
    std::iter::from_fn(move || {
        let cur = d.take()?;
        let m = Matrix::from_vec(field, rows, cols, cur.clone()).expect("shape matches");
        let mut next = cur;
        if let Some(i) = next.iter().rposition(|&x| x + 1 < q) {
            next[i] += 1;
            next[i + 1..].iter_mut().for_each(|x| *x = 0);
            d = Some(next);
        }
        Some(m)
    })
}

fn mat(m: &Matrix) -> String {
    format!("{:?}", m.row_vecs())
}

/// Exact probability that a kernel code contains a fixed matrix, and that the
/// kernel has exactly the nominal dimension.
fn prob_in_rlc(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut law = Check::new("P[A in C] = q^(-(n-k) rank A), n <= 3, k <= 2, b <= 2, q in {2,3}");
    let mut dim = Check::new("P[dim C = k] = prod_{i=k+1}^n (1 - q^-i)");
    for q in [2u64, 3] {
        let fq = field(q)?;
        for n in 1..=3usize {
            for k in 0..=n.min(2) {
                for b in 1..=2usize {
                    for a in all_matrices(&fq, n, b) {
                        let p = exhaustive_rlc_law(n, k, &fq, opts.cap, |p| annihilates(p, &a))?;
                        let expected = ratio(1, (q as i64).pow(((n - k) * a.rank()) as u32));
                        law.record(p == expected, || format!("q={q} n={n} k={k} A={} got {p}", mat(&a)));
                    }
                }
                let p = exhaustive_rlc_law(n, k, &fq, opts.cap, |p| p.rank() == n - k)?;
                let expected = full_rank_probability(n, k, q);
                dim.record(p == expected, || format!("q={q} n={n} k={k}: {p} vs {expected}"));
            }
        }
    }
    Ok(vec![law, dim])
}

fn random_subspace<R: Rng + ?Sized>(f: &Field, b: usize, rng: &mut R) -> Subspace {
    let g = rng.gen_range(0..=b);
    Subspace::span(&random_matrix(f, g, b, rng))
}

fn random_rate<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    let d = rng.gen_range(1..=16);
    ratio(rng.gen_range(0..=d), d)
}

fn describe(v: &Profile) -> String {
    crate::format::write_profile(v).replace('\n', " | ")
}

/// `deg(U) + deg(W) <= deg(U ∩ W) + deg(U + W)`.
fn submodularity(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut c = Check::new("deg(V,U,R) + deg(V,W,R) <= deg(V,U^W,R) + deg(V,U+W,R), q in {2,3}, b <= 4, n <= 8");
    let mut rng = RngStream::new(opts.seed, 0).rng();
    for _ in 0..opts.samples {
        let fq = field(rng.gen_range(2..=3))?;
        let b = rng.gen_range(1..=4);
        let n = rng.gen_range(1..=8);
        let v = random_profile(&fq, n, b, &mut rng)?;
        let u = random_subspace(&fq, b, &mut rng);
        let w = random_subspace(&fq, b, &mut rng);
        let r = random_rate(&mut rng);
        let lhs = v.deg(&u, &r)? + v.deg(&w, &r)?;
        let rhs = v.deg(&u.intersect(&w)?, &r)? + v.deg(&u.sum(&w)?, &r)?;
        c.record(lhs <= rhs, || {
            format!("V = {} U = {} W = {} R = {}", describe(&v), mat(u.basis()), mat(w.basis()), fraction_string(&r))
        });
    }
    Ok(vec![c])
}

/// Which lattice members maximise the degree at `rate`.
fn argmax(engine: &ThresholdEngine, v: &Profile, rate: &Rational) -> Result<Vec<usize>> {
    let degs = engine.degrees(v, rate)?;
    let best = degs.iter().max().expect("the lattice is nonempty").clone();
    Ok((0..degs.len()).filter(|&i| degs[i] == best).collect())
}

/// Below the threshold every maximiser of the degree is a non-distinct space,
/// above it every maximiser is distinct-type, and at it both kinds occur.
fn rvalt(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut below = Check::new("R = R_V - 1/n: argmax avoids distinct-type spaces");
    let mut at = Check::new("R = R_V: argmax has both kinds");
    let mut above = Check::new("R = R_V + 1/n: argmax is all distinct-type");
    let mut engines: BTreeMap<(u64, usize), ThresholdEngine> = BTreeMap::new();
    let mut rng = RngStream::new(opts.seed, 0).rng();
    for _ in 0..opts.samples {
        let q = rng.gen_range(2..=3u64);
        let b = rng.gen_range(2..=3usize);
        let n = rng.gen_range(1..=6usize);
        let fq = field(q)?;
        let engine = match engines.entry((q, b)) {
            std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::btree_map::Entry::Vacant(e) => e.insert(ThresholdEngine::new(&fq, b, opts.cap)?),
        };
        let engine = &*engine;
        let distinct: Vec<bool> = engine.lattice().iter().map(Subspace::is_distinct_type).collect();
        let v = random_profile(&fq, n, b, &mut rng)?;
        let rv = engine.threshold(&v)?.rate;
        let step = ratio(1, n as i64);
        let zero = ratio(0, 1);
        let one = ratio(1, 1);
        let dump = |r: &Rational, m: &[usize]| format!("V = {} R_V = {rv} R = {r} argmax = {m:?}", describe(&v));
        let lo = &rv - &step;
        if lo >= zero {
            let m = argmax(engine, &v, &lo)?;
            below.record(m.iter().all(|&i| !distinct[i]), || dump(&lo, &m));
        }
        let m = argmax(engine, &v, &rv)?;
        at.record(m.iter().any(|&i| distinct[i]) && m.iter().any(|&i| !distinct[i]), || dump(&rv, &m));
        let hi = &rv + &step;
        if hi <= one {
            let m = argmax(engine, &v, &hi)?;
            above.record(m.iter().all(|&i| distinct[i]), || dump(&hi, &m));
        }
    }
    Ok(vec![below, at, above])
}

/// Every linear code of `F_q^n` with dimension at most `max_dim`.
pub fn small_codes(fq: &Field, n: usize, max_dim: usize, cap: u128) -> Result<Vec<Code>> {
    Ok(enumerate_subspaces(fq, n, None, cap)?
        .into_iter()
        .filter(|s| s.dim() <= max_dim)
        .map(|s| Code::explicit(s.basis().clone()))
        .collect())
}

/// Parameter triples `(ρ, ℓ, L, average)` used by the exhaustive checks on
/// length-3 binary codes.
pub fn binary_triples() -> Vec<RecoveryParams> {
    [((1, 3), 1, 1, false), ((1, 3), 1, 2, false), ((2, 3), 2, 2, false), ((1, 3), 1, 2, true), ((0, 1), 1, 1, false)]
        .into_iter()
        .map(|((a, b), ell, l, avg)| RecoveryParams::new(ratio(a, b), ell, l, avg).expect("valid triple"))
        .collect()
}

fn params_name(p: &RecoveryParams) -> String {
    format!("rho={} ell={} L={}{}", p.rho, p.ell, p.list_size, if p.average_weight { " avg" } else { "" })
}

/// A code fails list recovery exactly when it contains a member of the
/// list-recovery profile family.
fn prop31(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let f2 = field(2)?;
    let codes = small_codes(&f2, 3, 2, opts.cap)?;
    let mut checks = Vec::new();
    for p in binary_triples() {
        let mut c = Check::new(format!("not recoverable <=> contains a family profile, F_2^3 dim <= 2, {}", params_name(&p)));
        let family = enumerate_lr_family(&f2, 3, &p, opts.cap)?;
        for code in &codes {
            let cert = certify_list_recoverable(code, &p, Strategy::Subsets, opts.cap)?;
            let mut contained = None;
            for v in &family {
                if let Some(a) = code_contains_profile(code, v, opts.cap)? {
                    contained = Some(a);
                    break;
                }
            }
            c.record(cert.is_recoverable() == contained.is_none(), || {
                format!("G = {} recoverable = {} containment = {:?}", mat(code.generator()), cert.is_recoverable(), contained.map(|a| mat(&a)))
            });
        }
        checks.push(c);
    }
    Ok(checks)
}

/// The coupled Reed-Solomon pair: the repeat count has the balls-in-bins
/// mean, and re-evaluating at the repetition-free points moves every codeword
/// and every distance by at most the repeat count.
fn coupling(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut mean = Check::new("E|I| = n - q(1 - (1 - 1/q)^n) within 4 standard errors");
    let mut moved = Check::new("d(c, phi(c)) <= |I| and |d(c1,c2) - d(phi c1, phi c2)| <= |I|");
    for (n, k, q) in [(6usize, 2usize, 8u64), (5, 3, 7), (9, 3, 16)] {
        let fq = field(q)?;
        let (mut sum, mut sq) = (0.0, 0.0);
        for t in 0..opts.samples as u64 {
            let mut rng = RngStream::new(opts.seed, t).rng();
            let pair = coupled_rs_pair(n, k, &fq, &mut rng)?;
            let r = pair.repeats.len();
            sum += r as f64;
            sq += (r * r) as f64;
            let m1: Vec<Elem> = (0..k).map(|_| rng.gen_range(0..fq.order())).collect();
            let m2: Vec<Elem> = (0..k).map(|_| rng.gen_range(0..fq.order())).collect();
            let (a1, b1) = pair.map(&m1);
            let (a2, b2) = pair.map(&m2);
            let shift = hamming_distance(&a1, &a2).abs_diff(hamming_distance(&b1, &b2));
            moved.record(hamming_distance(&a1, &b1) <= r && shift <= r, || format!("n={n} k={k} q={q} trial {t}"));
        }
        let trials = opts.samples as f64;
        let m = sum / trials;
        let se = ((sq / trials - m * m).max(0.0) / trials).sqrt();
        let expected = to_f64(&balls_in_bins_expectation(n, q));
        mean.record((m - expected).abs() <= 4.0 * se.max(1e-9), || {
            format!("n={n} q={q}: mean {m:.6} vs {expected:.6} (se {se:.6})")
        });
    }
    Ok(vec![mean, moved])
}

/// A random subspace of `Q_{k,b}`: the span of `d` uniform coefficient vectors.
fn random_polyspace<R: Rng + ?Sized>(fq: &Field, k: usize, b: usize, rng: &mut R) -> Result<PolySpace> {
    let d = rng.gen_range(1..=k * b);
    let s = Subspace::span(&random_matrix(fq, d, k * b, rng));
    Ok(PolySpace::from_subspace(k, b, s)?)
}

const EVAL_FIELDS: [u64; 8] = [7, 8, 9, 16, 25, 27, 32, 64];

/// Evaluating a space of polynomial tuples at a point never exceeds its
/// dimension over `F_q(X)`, and, counting over all `q` points exactly, it
/// reaches it for at least a `1 - Dk/q` fraction.
fn evaldim(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut bound = Check::new("dim eval_a(S) <= D for every a");
    let mut freq = Check::new("#{a : dim eval_a(S) = D} >= q - Dk");
    let mut rng = RngStream::new(opts.seed, 0).rng();
    for _ in 0..opts.samples {
        let q = EVAL_FIELDS[rng.gen_range(0..EVAL_FIELDS.len())];
        let fq = field(q)?;
        let b = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=4);
        let s = random_polyspace(&fq, k, b, &mut rng)?;
        let d = span_dim(&s)?;
        let mut full = 0usize;
        let mut over = None;
        for a in fq.elements() {
            let e = match eval_map(&s, a) {
                Ok(e) => e.dim(),
                Err(lcl_core::Error::InvariantViolation(_)) => {
                    over = Some(a);
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            full += usize::from(e == d);
        }
        let dump = || format!("q={q} k={k} b={b} D={d} S = {}", mat(s.subspace().basis()));
        bound.record(over.is_none(), dump);
        freq.record(full + d * k >= q as usize, || format!("{} hits {full}", dump()));
    }
    Ok(vec![bound, freq])
}

/// Configurations `(q, b, k, n)` for random traces.
pub const TRACE_CONFIGS: [(u64, usize, usize, usize); 5] =
    [(64, 3, 4, 16), (49, 2, 4, 16), (32, 3, 3, 12), (16, 2, 2, 10), (8, 3, 2, 8)];

/// Per trace step: `γ` never increases and drops by at most the rank of the
/// step's map on the watched space (checked inside the run); per
/// configuration: the frequency of `dim eval = D` is consistent with the
/// `1 - Dk/q` lower bound.
fn gamma_step(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut det = Check::new("0 <= gamma_{i-1} - gamma_i <= dim psi_i(W) and the dimension bounds, on every trace");
    let mut freqs: Vec<Check> = TRACE_CONFIGS
        .iter()
        .map(|(q, b, k, n)| Check::new(format!("eval equality frequency vs 1 - Dk/q (Wilson 95%), q={q} b={b} k={k} n={n}")))
        .collect();
    let mut tallies = vec![(0u64, 0u64, 0.0f64); TRACE_CONFIGS.len()];
    for t in 0..opts.samples {
        let ci = t % TRACE_CONFIGS.len();
        let (q, b, k, n) = TRACE_CONFIGS[ci];
        let fq = field(q)?;
        let mut rng = RngStream::new(opts.seed, t as u64).rng();
        let v = random_profile(&fq, n, b, &mut rng)?;
        match random_trace(&v, k, 2, &mut rng) {
            Ok(trace) => {
                det.record(true, String::new);
                for w in trace.steps.windows(2) {
                    let d = w[0].span_dim;
                    let tally = &mut tallies[ci];
                    tally.0 += u64::from(w[1].eval_dim == Some(d));
                    tally.1 += 1;
                    tally.2 += (1.0 - (d * k) as f64 / q as f64).max(0.0);
                }
            }
            Err(Error::Core(e @ lcl_core::Error::InvariantViolation(_))) => {
                det.record(false, || format!("trace {t} (q={q} b={b} k={k}) V = {}: {e}", describe(&v)));
            }
            Err(e) => return Err(e),
        }
    }
    for (c, &(hits, steps, bound)) in freqs.iter_mut().zip(&tallies) {
        if steps == 0 {
            continue;
        }
        let (_, hi) = wilson(hits, steps, Z95);
        let need = bound / steps as f64;
        c.record(hi >= need, || format!("{hits}/{steps} equal, Wilson high {hi:.6} < mean bound {need:.6}"));
    }
    let mut out = vec![det];
    out.append(&mut freqs);
    Ok(out)
}

fn strategy_params(q: u64) -> Vec<RecoveryParams> {
    match q {
        2 => binary_triples(),
        _ => [((1, 2), 1, 1, false), ((1, 2), 1, 2, false), ((0, 1), 1, 2, false), ((1, 2), 2, 2, false), ((1, 2), 1, 2, true)]
            .into_iter()
            .map(|((a, b), ell, l, avg)| RecoveryParams::new(ratio(a, b), ell, l, avg).expect("valid triple"))
            .collect(),
    }
}

/// The certification strategies agree with each other and with the naive
/// search on every small code; the process and the containment module compute
/// the same solution space on every small Reed-Solomon instance.
fn strategies(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut cert = Check::new("subsets = balls = low-weight = naive search, all codes of F_2^3 (dim <= 2) and F_3^2");
    let mut wit = Check::new("every reported witness re-checks against the definition");
    for (q, n) in [(2u64, 3usize), (3, 2)] {
        let fq = field(q)?;
        for code in small_codes(&fq, n, 2, opts.cap)? {
            for p in strategy_params(q) {
                let naive = oracle::naive_list_recoverable(code.generator(), &p, opts.cap)?;
                let mut verdicts = vec![];
                let mut strategies = vec![Strategy::Subsets, Strategy::Balls];
                if p.ell == 1 {
                    strategies.push(Strategy::LowWeight);
                }
                for s in strategies {
                    let c = certify_list_recoverable(&code, &p, s, opts.cap)?;
                    if let Some(v) = &c.witness {
                        wit.record(check_violation(&code, &p, v)?, || format!("{s:?} {} G = {}", params_name(&p), mat(code.generator())));
                    }
                    verdicts.push((s, c.is_recoverable()));
                }
                cert.record(verdicts.iter().all(|&(_, r)| r == naive), || {
                    format!("{} G = {} naive = {naive} strategies = {verdicts:?}", params_name(&p), mat(code.generator()))
                });
            }
        }
    }
    let mut spaces = Check::new("process output = containment solution space, every profile and point tuple");
    for (q, b, n) in [(2u64, 2usize, 3usize), (3, 2, 2), (2, 3, 2)] {
        let fq = field(q)?;
        let lattice = enumerate_subspaces(&fq, b, None, opts.cap)?;
        let profiles = product(&lattice, n);
        let points: Vec<Vec<Elem>> = all_matrices(&fq, 1, n).map(|m| m.row(0).to_vec()).collect();
        for spaces_v in &profiles {
            let v = Profile::new(spaces_v)?;
            let psi = lcl_to_poly_profile(&v);
            for pts in &points {
                for k in 1..=2 {
                    let sn = solve(&PolySpace::full(&fq, k, b), &psi, pts)?;
                    let direct = profile_solution_space(&rs_code(&fq, pts, k, true)?, &v)?;
                    spaces.record(sn.subspace() == &direct, || format!("V = {} points {pts:?} k={k}", describe(&v)));
                }
            }
        }
    }
    Ok(vec![cert, wit, spaces])
}

fn product(items: &[Subspace], n: usize) -> Vec<Vec<Subspace>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| items.iter().map(move |s| [p.clone(), vec![s.clone()]].concat()))
            .collect();
    }
    out
}

/// Matched nested sampling: the same parity matrix at a larger `k` gives a
/// superset code.
pub fn nested_codes_grow(n: usize, q: u64, seed: u64, trials: u64) -> Result<bool> {
    let fq = field(q)?;
    for t in 0..trials {
        let nested = NestedRlc::sample(n, &fq, &mut RngStream::new(seed, t).rng());
        for k in 0..n {
            let small = nested.code(k)?;
            let big = nested.code(k + 1)?;
            if !small.basis().row_vecs().iter().all(|w| big.contains(w)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
