//! The quantum-vs-classical query table at desk scale.

use qamp::amplify::{qsearch, Preparation, QSearchConfig};
use qamp::counting::{
    approx_count, ceil_sqrt, count_std, decide_zero_or_t0, exact_count, opt_approx_count,
    opt_cost_scale, Decision,
};
use qamp::harness::{frequency, mean};
use qamp::oracle::Oracle;
use qamp::{Engine, Rng};

use crate::args::TableArgs;
use crate::report::{TableReport, TableRow};
use crate::run::{trials, CliError, CliResult};

struct Cell {
    problem: &'static str,
    t: usize,
    eps: Option<f64>,
    quantum: f64,
    classical: Option<f64>,
}

pub fn table(args: &TableArgs) -> CliResult<TableReport> {
    let n = args.n;
    if n < 2 || args.trials == 0 {
        return Err(CliError::Invalid("need --n ≥ 2 and --trials ≥ 1".into()));
    }
    if args.t.iter().any(|&t| t == 0 || t > n) || args.t0 == 0 || args.t0 > n {
        return Err(CliError::Invalid(
            "every --t and --t0 must lie in 1..=N".into(),
        ));
    }
    if args
        .eps
        .iter()
        .any(|&e| !(e > 0.0 && e <= 1.0 && e * n as f64 > 1.0 / 3.0))
    {
        return Err(CliError::Invalid(
            "every --eps must lie in (0, 1] with εN > 1/3".into(),
        ));
    }
    let engine: Engine = args.engine.into();
    let nf = n as f64;
    let mut rows = Vec::new();
    let mut push = |cell: Cell, results: Vec<(bool, u64)>| {
        let q = mean(&results.iter().map(|r| r.1 as f64).collect::<Vec<_>>());
        rows.push(
            TableRow {
                problem: cell.problem.into(),
                n: n as u64,
                t: cell.t as u64,
                eps: cell.eps,
                trials: args.trials,
                mean_queries: q,
                success_frequency: frequency(results.iter().map(|r| r.0)),
                quantum_scale: cell.quantum,
                ratio: q / cell.quantum,
                classical_scale: cell.classical,
            }
            .rounded(),
        );
    };
    // each row draws its oracle and trial streams from its own seed
    let mut row_seed = args.seed;
    let mut next_seed = || {
        row_seed = row_seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
        row_seed
    };

    let seed = next_seed();
    let o = Oracle::planted(n, args.t0, &mut Rng::new(seed))?;
    let res = run(seed, args.trials, |rng| {
        let r = decide_zero_or_t0(&o.detached(), args.t0 as u64, rng, engine)?;
        let ok = matches!(r.decision, Decision::T0 { witness } if o.truth_table()[witness]);
        Ok((ok, r.queries))
    })?;
    let t0 = args.t0 as f64;
    push(
        Cell {
            problem: "decision",
            t: args.t0,
            eps: None,
            quantum: (nf / t0).sqrt(),
            classical: Some(nf / t0),
        },
        res,
    );

    let prep = Preparation::uniform(n)?;
    for &t in &args.t {
        let seed = next_seed();
        let o = Oracle::planted(n, t, &mut Rng::new(seed))?;
        let res = run(seed, args.trials, |rng| {
            let r = qsearch(&prep, &o.detached(), &QSearchConfig::default(), rng, engine)?;
            Ok((o.truth_table()[r.z], r.queries))
        })?;
        let s = nf / (t as f64 + 1.0);
        push(
            Cell {
                problem: "search",
                t,
                eps: None,
                quantum: s.sqrt(),
                classical: Some(s),
            },
            res,
        );
    }

    let t = args.t[0];
    let seed = next_seed();
    let o = Oracle::planted(n, t, &mut Rng::new(seed))?;
    let err = 2.0 * std::f64::consts::PI * ((t * (n - t)) as f64 / nf).sqrt() + 11.0;
    let res = run(seed, args.trials, |rng| {
        let r = count_std(&o.detached(), rng, engine)?;
        Ok(((r.t_tilde as f64 - t as f64).abs() < err, r.queries))
    })?;
    push(
        Cell {
            problem: "count-sqrt-t",
            t,
            eps: None,
            quantum: ceil_sqrt(n as u64) as f64,
            classical: None,
        },
        res,
    );

    for &t in &args.t {
        let seed = next_seed();
        let o = Oracle::planted(n, t, &mut Rng::new(seed))?;
        let tf = t as f64;
        for &eps in &args.eps {
            let ok = |t_tilde: u64| (t_tilde as f64 - tf).abs() <= eps * tf;
            let classical = Some(nf / (eps * eps * (tf + 1.0)));
            let res = run(seed, args.trials, |rng| {
                let r = approx_count(&o.detached(), eps, rng, engine)?;
                Ok((ok(r.t_tilde), r.queries))
            })?;
            push(
                Cell {
                    problem: "approx-count",
                    t,
                    eps: Some(eps),
                    quantum: (nf / tf).sqrt() / eps,
                    classical,
                },
                res,
            );
            let res = run(seed ^ 1, args.trials, |rng| {
                let (r, _) = opt_approx_count(&o.detached(), eps, rng, engine)?;
                Ok((ok(r.t_tilde), r.queries))
            })?;
            let s = opt_cost_scale(n as u64, t as u64, eps);
            push(
                Cell {
                    problem: "opt-approx-count",
                    t,
                    eps: Some(eps),
                    quantum: s,
                    classical,
                },
                res,
            );
        }
    }

    for &t in &args.t {
        let seed = next_seed();
        let o = Oracle::planted(n, t, &mut Rng::new(seed))?;
        let res = run(seed, args.trials, |rng| {
            let r = exact_count(&o.detached(), rng, engine)?;
            Ok((r.t_tilde == t as u64, r.queries))
        })?;
        let tf = t as f64;
        let quantum = ((tf + 1.0) * (nf - tf + 1.0)).sqrt();
        push(
            Cell {
                problem: "exact-count",
                t,
                eps: None,
                quantum,
                classical: Some(nf),
            },
            res,
        );
    }

    Ok(TableReport {
        schema: crate::report::SCHEMA,
        algorithm: "table".into(),
        experiment: serde_json::to_value(args).expect("argument structs serialize"),
        rows,
    })
}

fn run(
    seed: u64,
    count: u64,
    f: impl Fn(&mut Rng) -> qamp::Result<(bool, u64)> + Sync + Send,
) -> CliResult<Vec<(bool, u64)>> {
    let rows = trials(seed, count, false, |i, rng| {
        let (ok, q) = f(rng)?;
        Ok(crate::report::Row {
            trial: i,
            outcome: None,
            success: ok,
            within_bound: None,
            queries: q,
            exhausted: false,
            wall_time_s: None,
        })
    })?;
    Ok(rows.into_iter().map(|r| (r.success, r.queries)).collect())
}
