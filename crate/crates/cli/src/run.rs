//! One function per subcommand: validate, run trials in parallel, assemble
//! the report in trial order.

use std::f64::consts::PI;
use std::time::Instant;

use qamp::amplify::{
    amplify_known_a, derandomize_phase, derandomize_rescale, iterations_for_known_a, qsearch,
    theta_of, Preparation, QSearchConfig,
};
use qamp::counting::{
    approx_count, approx_count_with, ceil_sqrt, count, count_error_bound, decide_zero_or_t0,
    exact_count, opt_approx_count, opt_cost_scale, ApproxCountOptions, Decision,
};
use qamp::estimate::{est_amp, est_amp_error_bound};
use qamp::heuristics::{
    family, family_bound, heuristic_search, heuristic_search_embedded, FAMILIES,
};
use qamp::oracle::Oracle;
use qamp::{Engine, Error, Rng, StateVector, C64};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::*;
use crate::report::{Bound, Outcome, Report, Row};

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(msg) => write!(f, "invalid experiment: {msg}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn invalid<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Invalid(msg.into()))
}

/// The oracle an experiment runs against, with its true `N` and `t`.
pub struct Source {
    pub oracle: Oracle,
    pub n: usize,
    pub t: usize,
}

pub fn resolve(c: &Common) -> CliResult<Source> {
    if c.trials == 0 {
        return invalid("--trials must be at least 1");
    }
    let oracle = match &c.truth_table {
        Some(path) => {
            let o = Oracle::load_truth_table(path)?;
            if c.n.is_some_and(|n| n != o.domain_size()) {
                return invalid(format!(
                    "--n {} disagrees with the truth table size {}",
                    c.n.unwrap(),
                    o.domain_size()
                ));
            }
            if c.t.is_some_and(|t| t != o.good_count()) {
                return invalid(format!(
                    "--t {} disagrees with the truth table count {}",
                    c.t.unwrap(),
                    o.good_count()
                ));
            }
            o
        }
        None => {
            let n =
                c.n.ok_or_else(|| CliError::Invalid("--n or --truth-table is required".into()))?;
            let t =
                c.t.ok_or_else(|| CliError::Invalid("--t is required with --n".into()))?;
            if n == 0 || t > n {
                return invalid(format!("need N ≥ 1 and 0 ≤ t ≤ N, got N = {n}, t = {t}"));
            }
            Oracle::planted(n, t, &mut Rng::new(c.seed))?
        }
    };
    let (n, t) = (oracle.domain_size(), oracle.good_count());
    if c.engine == EngineArg::Exact && n > qamp::config::MAX_STATE_DIM {
        return invalid(format!(
            "the exact engine handles N ≤ {}, got {n}",
            qamp::config::MAX_STATE_DIM
        ));
    }
    Ok(Source { oracle, n, t })
}

/// Run trial `i` with `Rng::for_trial(seed, i)`. A trial that runs out of
/// budget becomes an exhausted row; any other error aborts the experiment.
pub fn trials(
    seed: u64,
    count: u64,
    timing: bool,
    f: impl Fn(u64, &mut Rng) -> qamp::Result<Row> + Sync + Send,
) -> CliResult<Vec<Row>> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let start = Instant::now();
            let mut row = match f(i, &mut Rng::for_trial(seed, i)) {
                Ok(row) => row,
                Err(Error::BudgetExhausted { queries }) => Row::exhausted(i, queries),
                Err(e) => return Err(CliError::from(e)),
            };
            if timing {
                row.wall_time_s = Some(start.elapsed().as_secs_f64());
            }
            Ok(row)
        })
        .collect()
}

fn experiment_json(args: &impl Serialize) -> serde_json::Value {
    serde_json::to_value(args).expect("argument structs serialize")
}

fn row(trial: u64, outcome: Outcome, success: bool, within: Option<bool>, queries: u64) -> Row {
    Row {
        trial,
        outcome: Some(outcome),
        success,
        within_bound: within,
        queries,
        exhausted: false,
        wall_time_s: None,
    }
}

fn check_a(a: f64) -> CliResult<()> {
    if !(0.0..=1.0).contains(&a) {
        return invalid(format!("a must lie in [0, 1], got {a}"));
    }
    Ok(())
}

pub fn search(args: &SearchArgs) -> CliResult<Report> {
    let src = resolve(&args.common)?;
    let config = QSearchConfig {
        growth: args.c,
        max_total_queries: args.cap,
    };
    config.validate()?;
    let prep = Preparation::uniform(src.n)?;
    let engine: Engine = args.common.engine.into();
    let rows = trials(
        args.common.seed,
        args.common.trials,
        args.output.timing,
        |i, rng| {
            let o = src.oracle.detached();
            let r = qsearch(&prep, &o, &config, rng, engine)?;
            Ok(row(
                i,
                Outcome::Int(r.z as u64),
                src.oracle.truth_table()[r.z],
                None,
                r.queries,
            ))
        },
    )?;
    let bound = Bound {
        query_scale: Some((src.n as f64 / (src.t as f64 + 1.0)).sqrt()),
        ..Bound::default()
    };
    Ok(Report::new("search", experiment_json(args), rows, &bound))
}

fn known_a(a: Option<f64>, src: &Source) -> CliResult<f64> {
    let a = a.unwrap_or(src.t as f64 / src.n as f64);
    check_a(a)?;
    Ok(a)
}

pub fn amplify(args: &AmplifyArgs) -> CliResult<Report> {
    let src = resolve(&args.common)?;
    let a = known_a(args.a, &src)?;
    let m = iterations_for_known_a(a)?;
    let prep = Preparation::uniform(src.n)?;
    let engine: Engine = args.common.engine.into();
    let rows = trials(
        args.common.seed,
        args.common.trials,
        args.output.timing,
        |i, rng| {
            let r = amplify_known_a(&prep, &src.oracle.detached(), a, rng, engine)?;
            Ok(row(i, Outcome::Int(r.z as u64), r.good, None, r.queries))
        },
    )?;
    let bound = Bound {
        kind: Some("success probability lower bound max(1−a, a)".into()),
        value: Some(a.max(1.0 - a)),
        query_scale: Some((m + 1) as f64),
    };
    Ok(Report::new("amplify", experiment_json(args), rows, &bound))
}

pub fn derandomize(args: &DerandomizeArgs) -> CliResult<Report> {
    let src = resolve(&args.common)?;
    let a = known_a(args.a, &src)?;
    let prep = Preparation::uniform(src.n)?;
    let engine: Engine = args.common.engine.into();
    let rows = trials(
        args.common.seed,
        args.common.trials,
        args.output.timing,
        |i, rng| {
            let o = src.oracle.detached();
            let r = match args.method {
                MethodArg::Phase => derandomize_phase(&prep, &o, a, rng, engine)?,
                MethodArg::Rescale => derandomize_rescale(&prep, &o, a, rng, engine)?,
            };
            let certain = r.success_probability >= 1.0 - qamp::config::TOLERANCES.phase_residual;
            Ok(row(
                i,
                Outcome::Int(r.z as u64),
                r.good,
                Some(certain),
                r.queries,
            ))
        },
    )?;
    let bound = Bound {
        kind: Some("good-outcome probability 1".into()),
        value: Some(1.0),
        query_scale: (a > 0.0).then(|| PI / (4.0 * theta_of(a))),
    };
    Ok(Report::new(
        "derandomize",
        experiment_json(args),
        rows,
        &bound,
    ))
}

/// Two-outcome preparation `√(1−a)|0⟩ + √a|1⟩` with `|1⟩` good.
fn two_level(a: f64) -> CliResult<(Preparation, Oracle)> {
    let s = StateVector::new(vec![
        C64::new((1.0 - a).sqrt(), 0.0),
        C64::new(a.sqrt(), 0.0),
    ])?;
    Ok((Preparation::from_state(&s)?, Oracle::singleton(2, 1)?))
}

pub fn estimate(args: &EstimateArgs) -> CliResult<Report> {
    if args.m == 0 {
        return invalid("--m must be at least 1");
    }
    if args.k == 0 {
        return invalid("--k must be at least 1");
    }
    let (prep, oracle, a) = match args.a {
        Some(a) => {
            check_a(a)?;
            if args.common.trials == 0 {
                return invalid("--trials must be at least 1");
            }
            let (p, o) = two_level(a)?;
            (p, o, a)
        }
        None => {
            let src = resolve(&args.common)?;
            (
                Preparation::uniform(src.n)?,
                src.oracle,
                src.t as f64 / src.n as f64,
            )
        }
    };
    let engine: Engine = args.common.engine.into();
    let err = est_amp_error_bound(a, args.m, args.k);
    let rows = trials(
        args.common.seed,
        args.common.trials,
        args.output.timing,
        |i, rng| {
            let r = est_amp(&prep, &oracle.detached(), args.m, rng, engine)?;
            let within = (r.a_tilde - a).abs() <= err;
            Ok(row(
                i,
                Outcome::Real(r.a_tilde),
                within,
                Some(within),
                r.queries,
            ))
        },
    )?;
    let bound = Bound {
        kind: Some("|ã − a| ≤ 2πk√(a(1−a))/M + k²π²/M²".into()),
        value: Some(err),
        query_scale: Some(args.m as f64),
    };
    Ok(Report::new("estimate", experiment_json(args), rows, &bound))
}

pub fn count_cmd(args: &CountArgs) -> CliResult<Report> {
    let src = resolve(&args.common)?;
    let m = args.m.unwrap_or_else(|| ceil_sqrt(src.n as u64));
    if m == 0 || args.k == 0 {
        return invalid("--m and --k must be at least 1");
    }
    let engine: Engine = args.common.engine.into();
    let err = count_error_bound(src.n as u64, src.t as u64, m, args.k);
    let rows = trials(
        args.common.seed,
        args.common.trials,
        args.output.timing,
        |i, rng| {
            let r = count(&src.oracle.detached(), m, rng, engine)?;
            let within = (r.t_tilde as f64 - src.t as f64).abs() <= err;
            Ok(row(
                i,
                Outcome::Int(r.t_tilde),
                within,
                Some(within),
                r.queries,
            ))
        },
    )?;
    let bound = Bound {
        kind: Some("|t̃ − t| ≤ 2πk√(t(N−t))/M + π²k²N/M²".into()),
        value: Some(err),
        query_scale: Some(m as f64),
    };
    Ok(Report::new("count", experiment_json(args), rows, &bound))
}

pub fn approx_count_cmd(args: &ApproxCountArgs) -> CliResult<Report> {
    let src = resolve(&args.common)?;
    let eps = args.eps;
    if !(eps > 0.0 && eps <= 1.0) {
        return invalid(format!("--eps must lie in (0, 1], got {eps}"));
    }
    if args.optimal && eps * src.n as f64 <= 1.0 / 3.0 {
        return invalid(format!(
            "the optimal counter needs εN > 1/3, got εN = {}",
            eps * src.n as f64
        ));
    }
    let engine: Engine = args.common.engine.into();
    let options = ApproxCountOptions {
        seed_from_qsearch: args.qsearch_seed,
        ..ApproxCountOptions::default()
    };
    let t = src.t as f64;
    let rows = trials(
        args.common.seed,
        args.common.trials,
        args.output.timing,
        |i, rng| {
            let o = src.oracle.detached();
            let r = if args.optimal {
                opt_approx_count(&o, eps, rng, engine)?.0
            } else if args.qsearch_seed {
                approx_count_with(&o, eps, &options, rng, engine)?
            } else {
                approx_count(&o, eps, rng, engine)?
            };
            let within = (r.t_tilde as f64 - t).abs() <= eps * t;
            Ok(row(
                i,
                Outcome::Int(r.t_tilde),
                within,
                Some(within),
                r.queries,
            ))
        },
    )?;
    let (n, tu) = (src.n as u64, src.t as u64);
    let scale = if args.optimal {
        opt_cost_scale(n, tu, eps)
    } else if tu == 0 {
        (n as f64).sqrt()
    } else {
        (n as f64 / t).sqrt() / eps
    };
    let bound = Bound {
        kind: Some("|t̃ − t| ≤ εt".into()),
        value: Some(eps * t),
        query_scale: Some(scale),
    };
    Ok(Report::new(
        "approx-count",
        experiment_json(args),
        rows,
        &bound,
    ))
}

pub fn exact_count_cmd(args: &ExactCountArgs) -> CliResult<Report> {
    let src = resolve(&args.common)?;
    let engine: Engine = args.common.engine.into();
    let rows = trials(
        args.common.seed,
        args.common.trials,
        args.output.timing,
        |i, rng| {
            let r = exact_count(&src.oracle.detached(), rng, engine)?;
            Ok(row(
                i,
                Outcome::Int(r.t_tilde),
                r.t_tilde == src.t as u64,
                None,
                r.queries,
            ))
        },
    )?;
    let (n, t) = (src.n as f64, src.t as f64);
    let bound = Bound {
        query_scale: Some(((t + 1.0) * (n - t + 1.0)).sqrt()),
        ..Bound::default()
    };
    Ok(Report::new(
        "exact-count",
        experiment_json(args),
        rows,
        &bound,
    ))
}

pub fn decide(args: &DecideArgs) -> CliResult<Report> {
    let src = resolve(&args.common)?;
    let t0 = args.t0;
    if t0 == 0 || t0 > src.n as u64 {
        return invalid(format!("--t0 must lie in 1..=N, got {t0}"));
    }
    if src.t != 0 && src.t as u64 != t0 {
        return invalid(format!(
            "promise broken: t = {} is neither 0 nor t0 = {t0}",
            src.t
        ));
    }
    let engine: Engine = args.common.engine.into();
    let rows = trials(
        args.common.seed,
        args.common.trials,
        args.output.timing,
        |i, rng| {
            let r = decide_zero_or_t0(&src.oracle.detached(), t0, rng, engine)?;
            let (decided, correct) = match r.decision {
                Decision::Zero => (0, src.t == 0),
                Decision::T0 { witness } => (t0, src.t != 0 && src.oracle.truth_table()[witness]),
            };
            Ok(row(i, Outcome::Int(decided), correct, None, r.queries))
        },
    )?;
    let bound = Bound {
        query_scale: Some((src.n as f64 / t0 as f64).sqrt()),
        ..Bound::default()
    };
    Ok(Report::new("decide", experiment_json(args), rows, &bound))
}

pub fn heuristic(args: &HeuristicArgs) -> CliResult<Report> {
    let c = &args.common;
    if !FAMILIES.contains(&args.family.as_str()) {
        return invalid(format!(
            "unknown family `{}`; known: {}",
            args.family,
            FAMILIES.join(", ")
        ));
    }
    if c.truth_table.is_some() {
        return invalid("heuristic families are generated; --truth-table is not supported here");
    }
    if c.trials == 0 || args.instances == 0 {
        return invalid("--trials and --instances must be at least 1");
    }
    let n =
        c.n.ok_or_else(|| CliError::Invalid("--n is required".into()))?;
    let t =
        c.t.ok_or_else(|| CliError::Invalid("--t is required".into()))?;
    let fam = family(&args.family, n, t, args.instances, &mut Rng::new(c.seed))?;
    let config = QSearchConfig::default();
    let engine: Engine = c.engine.into();
    let rows = trials(c.seed, c.trials, args.output.timing, |i, rng| {
        let inst = &fam[(i % fam.len() as u64) as usize];
        let o = inst.oracle.detached();
        let r = if args.embedded {
            heuristic_search_embedded(&inst.heuristic, &o, &config, rng, engine)?
        } else {
            heuristic_search(&inst.heuristic, &o, &config, rng, engine)?
        };
        Ok(row(
            i,
            Outcome::Int(r.x as u64),
            inst.oracle.truth_table()[r.x],
            None,
            r.queries,
        ))
    })?;
    let bound = Bound {
        query_scale: Some(family_bound(&fam)),
        ..Bound::default()
    };
    Ok(Report::new(
        "heuristic",
        experiment_json(args),
        rows,
        &bound,
    ))
}
