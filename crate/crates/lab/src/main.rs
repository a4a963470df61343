use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lcl_core::code::{rs_code, sample_points, NestedRlc};
use lcl_core::rational::{fraction_string, parse_rational};
use lcl_core::witness::{certify_list_recoverable, Strategy};
use lcl_core::{Code, Field, Rational, RecoveryParams, RngStream, DEFAULT_CAP};
use lcl_lab::experiment::{
    run_reduction_experiment, run_threshold_experiment, Decide, Ensemble, ExperimentConfig, Property,
};
use lcl_lab::format::{parse_matrix, parse_profile, write_matrix, CodeSidecar, WitnessJson};
use lcl_lab::trace::{random_trace, trace_jsonl};
use lcl_lab::verify::{verify_lemmas, Selector, VerifyOptions};
use lcl_lab::{read_file, write_file, Error, Result};
use serde_json::json;

#[derive(Parser)]
#[command(name = "lcl", version, about = "Threshold rates and random-code experiments for local linear code properties")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact threshold rate of a profile file, with the witnessing (U, W).
    Threshold {
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u128,
    },
    /// Estimate satisfaction for random linear codes over a rate grid.
    SimulateRlc {
        #[command(flatten)]
        sim: SimArgs,
        /// Sample uniform subspaces of dimension exactly k.
        #[arg(long)]
        uniform: bool,
    },
    /// Estimate satisfaction for random Reed-Solomon codes over a rate grid.
    SimulateRs {
        #[command(flatten)]
        sim: SimArgs,
        /// Distinct evaluation points instead of i.i.d. ones.
        #[arg(long)]
        no_repetition: bool,
    },
    /// Random linear codes and random Reed-Solomon codes side by side.
    ReduceCompare {
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long)]
        no_repetition: bool,
    },
    /// Decide list recovery of the code spanned by a generator matrix.
    CertifyCode {
        #[arg(long)]
        generator: String,
        #[command(flatten)]
        params: LrArgs,
        #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
        strategy: StrategyArg,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u128,
    },
    /// Run the exhaustive and sampled identity checks.
    VerifyLemmas {
        /// One of prob-in-rlc, submodularity, rvalt, prop31, coupling,
        /// evaldim, gamma-step, strategies, or all.
        #[arg(long, default_value = "all")]
        select: String,
        /// Random instances per sampled check (default depends on the check).
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = lcl_core::oracle::ORACLE_BUDGET)]
        budget: u128,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Run the constraint revelation process on a profile at random points and
    /// export the trace as JSON lines.
    Trace {
        #[arg(long)]
        profile: String,
        #[arg(long)]
        k: usize,
        /// Random constant subspaces watched besides the whole space.
        #[arg(long, default_value_t = 1)]
        watches: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Sample one code and write its generator and provenance sidecar.
    SampleCode {
        #[arg(long, default_value = "rlc")]
        ensemble: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Writes OUT (matrix text) and OUT.json (sidecar); stdout otherwise.
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Args, Clone)]
struct LrArgs {
    /// Radius fraction, e.g. 1/4.
    #[arg(long)]
    rho: Option<String>,
    #[arg(long, default_value_t = 1)]
    ell: usize,
    #[arg(long = "L")]
    list_size: Option<usize>,
    /// Average-weight variant.
    #[arg(long)]
    avg: bool,
}

impl LrArgs {
    fn params(&self) -> Result<Option<RecoveryParams>> {
        match (&self.rho, self.list_size) {
            (Some(rho), Some(l)) => Ok(Some(RecoveryParams::new(parse_rational(rho)?, self.ell, l, self.avg)?)),
            (None, None) => Ok(None),
            _ => Err(Error::Config("--rho and --L go together".into())),
        }
    }
}

#[derive(Args, Clone)]
struct SimArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    q: u64,
    /// Comma-separated rates, each giving an integral k = R n.
    #[arg(long, value_delimiter = ',', required = true)]
    rates: Vec<String>,
    /// Property: contain this profile.
    #[arg(long, conflicts_with = "rho")]
    profile: Option<String>,
    /// Property: fail list recovery with these parameters.
    #[command(flatten)]
    lr: LrArgs,
    #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
    decide: StrategyArg,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "0")]
    epsilon: String,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u128,
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Auto,
    Family,
    Subsets,
    Balls,
    LowWeight,
}

impl StrategyArg {
    fn decide(self) -> Decide {
        match self {
            StrategyArg::Auto => Decide::Auto,
            StrategyArg::Family => Decide::Family,
            StrategyArg::Subsets => Decide::Certify(Strategy::Subsets),
            StrategyArg::Balls => Decide::Certify(Strategy::Balls),
            StrategyArg::LowWeight => Decide::Certify(Strategy::LowWeight),
        }
    }
}

fn emit(out: &Option<String>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|source| Error::Io { path: "stdout".into(), source })
        }
    }
}

fn config(sim: &SimArgs, ensemble: Ensemble) -> Result<ExperimentConfig> {
    let field = Field::of_order(sim.q)?;
    let property = match (&sim.profile, sim.lr.params()?) {
        (Some(path), None) => Property::Profile(parse_profile(&read_file(path)?)?),
        (None, Some(p)) => Property::NotRecoverable(p),
        _ => return Err(Error::Config("give either --profile or --rho/--L".into())),
    };
    let rates = sim.rates.iter().map(|r| parse_rational(r)).collect::<lcl_core::Result<Vec<Rational>>>()?;
    Ok(ExperimentConfig {
        ensemble,
        n: sim.n,
        field,
        rates,
        property,
        trials: sim.trials,
        seed: sim.seed,
        epsilon: parse_rational(&sim.epsilon)?,
        decide: sim.decide.decide(),
        cap: sim.cap,
    })
}

fn simulate(sim: &SimArgs, ensemble: Ensemble) -> Result<()> {
    let report = run_threshold_experiment(&config(sim, ensemble)?)?;
    let text = match sim.format {
        Format::Csv => report.to_csv(),
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&report.to_json())?),
    };
    emit(&sim.out, &text)
}

fn sample_code(ensemble: &str, n: usize, k: usize, q: u64, seed: u64) -> Result<Code> {
    let field = Field::of_order(q)?;
    let mut rng = RngStream::new(seed, 0).rng();
    let code = match ensemble.parse::<Ensemble>()? {
        Ensemble::Rlc => NestedRlc::sample(n, &field, &mut rng).code(k)?,
        Ensemble::RlcUniform => NestedRlc::sample_uniform(n, &field, &mut rng)?.code(k)?,
        Ensemble::Rs => rs_code(&field, &sample_points(n, &field, true, &mut rng)?, k, true)?,
        Ensemble::RsNoRep => rs_code(&field, &sample_points(n, &field, false, &mut rng)?, k, false)?,
    };
    Ok(code)
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Threshold { profile, cap } => {
            let v = parse_profile(&read_file(&profile)?)?;
            let t = v.threshold_rate_v(cap)?;
            let text = format!(
                "threshold {}\nU {}\n{}W {}\n{}",
                fraction_string(&t.rate),
                t.u.dim(),
                write_rows(t.u.basis()),
                t.w.dim(),
                write_rows(t.w.basis())
            );
            emit(&None, &text)
        }
        Cmd::SimulateRlc { sim, uniform } => {
            simulate(&sim, if uniform { Ensemble::RlcUniform } else { Ensemble::Rlc })
        }
        Cmd::SimulateRs { sim, no_repetition } => {
            simulate(&sim, if no_repetition { Ensemble::RsNoRep } else { Ensemble::Rs })
        }
        Cmd::ReduceCompare { sim, no_repetition } => {
            let ensemble = if no_repetition { Ensemble::RsNoRep } else { Ensemble::Rs };
            let report = run_reduction_experiment(&config(&sim, ensemble)?)?;
            let text = match sim.format {
                Format::Csv => report.to_csv(),
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&report.to_json())?),
            };
            emit(&sim.out, &text)
        }
        Cmd::CertifyCode { generator, params, strategy, cap } => {
            let code = Code::explicit(parse_matrix(&read_file(&generator)?)?);
            let p = params.params()?.ok_or_else(|| Error::Config("--rho and --L are required".into()))?;
            let s = match strategy {
                StrategyArg::Auto if p.ell == 1 => Strategy::LowWeight,
                StrategyArg::Auto => Strategy::Subsets,
                StrategyArg::Family => return Err(Error::Config("certify-code uses a certifier strategy".into())),
                StrategyArg::Subsets => Strategy::Subsets,
                StrategyArg::Balls => Strategy::Balls,
                StrategyArg::LowWeight => Strategy::LowWeight,
            };
            let cert = certify_list_recoverable(&code, &p, s, cap)?;
            let verdict = if cert.is_recoverable() { "recoverable" } else { "not recoverable" };
            let witness = cert.witness.as_ref().map(WitnessJson::from);
            let body = json!({ "verdict": verdict, "examined": cert.examined.to_string(), "witness": witness });
            emit(&None, &format!("{verdict}\n{}\n", serde_json::to_string(&body)?))
        }
        Cmd::VerifyLemmas { select, samples, budget, seed, out } => {
            let selectors = if select == "all" { Selector::ALL.to_vec() } else { vec![select.parse()?] };
            let mut text = String::new();
            let mut ok = true;
            for s in selectors {
                let opts = VerifyOptions { samples: samples.unwrap_or(s.default_samples()), seed, cap: budget };
                let r = verify_lemmas(s, &opts)?;
                ok &= r.passed();
                text.push_str(&r.to_string());
            }
            emit(&out, &text)?;
            if ok {
                Ok(())
            } else {
                Err(lcl_core::Error::InvariantViolation("some identities failed".into()).into())
            }
        }
        Cmd::Trace { profile, k, watches, seed, out } => {
            let v = parse_profile(&read_file(&profile)?)?;
            let t = random_trace(&v, k, watches, &mut RngStream::new(seed, 0).rng())?;
            emit(&out, &trace_jsonl(&t))
        }
        Cmd::SampleCode { ensemble, n, k, q, seed, out } => {
            let code = sample_code(&ensemble, n, k, q, seed)?;
            let sidecar = serde_json::to_string_pretty(&CodeSidecar::describe(&code, k, Some(seed), Some(0)))?;
            match out {
                Some(path) => {
                    write_file(&path, &write_matrix(code.generator()))?;
                    write_file(&format!("{path}.json"), &format!("{sidecar}\n"))
                }
                None => emit(&None, &format!("{}{sidecar}\n", write_matrix(code.generator()))),
            }
        }
    }
}

fn write_rows(m: &lcl_core::Matrix) -> String {
    (0..m.rows())
        .map(|r| m.row(r).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ") + "\n")
        .collect()
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
